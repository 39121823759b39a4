//! Autoregressive baseline with AIC order selection.
//!
//! Candidate orders `0..=max_order` are fitted by ordinary least squares on
//! the same effective sample (rows `max_order..len`), so their AIC values
//! are comparable; the winner provides frozen parameters for rolling
//! one-step-ahead Gaussian intervals.

use nalgebra::{DMatrix, DVector};

use crate::baselines::normal::z_for_alpha;
use crate::error::{Error, Result};
use crate::linalg::{pinv, rank, DEFAULT_PINV_TOL};

/// Relative rank cutoff for detecting collinear regressors.
const RANK_TOL: f64 = 1e-10;

/// A fitted autoregression `y_t = intercept + sum_k coefficients[k-1] *
/// y_{t-k} + e`, with `e ~ N(0, residual_sigma^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArModel {
    pub order: usize,
    /// Lag coefficients; `coefficients[k-1]` multiplies `y_{t-k}`.
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    /// Residual standard deviation, floored at 1e-9.
    pub residual_sigma: f64,
}

struct Candidate {
    order: usize,
    coefficients: Vec<f64>,
    intercept: f64,
    rss: f64,
    aic: f64,
}

fn fit_order(train: &[f64], p: usize, max_order: usize) -> Result<Option<Candidate>> {
    let rows = train.len() - max_order;
    let n = rows as f64;

    // Design matrix: intercept column plus p lag columns, all candidates
    // sharing the sample t = max_order..len.
    let x = DMatrix::from_fn(rows, p + 1, |r, c| {
        if c == 0 {
            1.0
        } else {
            train[max_order + r - c]
        }
    });
    let y = DVector::from_fn(rows, |r, _| train[max_order + r]);

    // Collinear regressors (e.g. a constant series duplicating the
    // intercept) make the fit unidentifiable; skip this order.
    if rank(&x, RANK_TOL)? < p + 1 {
        return Ok(None);
    }

    let beta = pinv(&x, DEFAULT_PINV_TOL)? * &y;
    let residuals = &y - &x * &beta;
    let rss: f64 = residuals.iter().map(|r| r * r).sum();
    let aic = n * (rss / n).ln() + 2.0 * (p as f64 + 2.0);

    Ok(Some(Candidate {
        order: p,
        coefficients: beta.iter().skip(1).cloned().collect(),
        intercept: beta[0],
        rss,
        aic,
    }))
}

/// Fits autoregressions of order `0..=max_order` and keeps the AIC winner
/// (`AIC = n ln(RSS/n) + 2(p+2)`). Orders whose regressor matrix is rank
/// deficient are skipped, falling back to lower orders.
///
/// # Errors
///
/// * `SeriesTooShort` unless `train.len() > max_order + 2`.
/// * `NonFinite` if the series contains NaN or infinity.
pub fn fit_ar(train: &[f64], max_order: usize) -> Result<ArModel> {
    if train.len() <= max_order + 2 {
        return Err(Error::SeriesTooShort {
            len: train.len(),
            need: max_order + 3,
        });
    }
    if train.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("autoregression training series"));
    }

    let mut best: Option<Candidate> = None;
    for p in 0..=max_order {
        if let Some(candidate) = fit_order(train, p, max_order)? {
            let better = match &best {
                None => true,
                Some(b) => candidate.aic < b.aic,
            };
            if better {
                best = Some(candidate);
            }
        }
    }

    let chosen = best.ok_or(Error::NoArCandidate)?;
    let n = (train.len() - max_order) as f64;
    let sigma = (chosen.rss / n).sqrt().max(1e-9);
    Ok(ArModel {
        order: chosen.order,
        coefficients: chosen.coefficients,
        intercept: chosen.intercept,
        residual_sigma: sigma,
    })
}

/// Rolling one-step-ahead intervals for the last `steps` values of
/// `history`.
///
/// Each step forecasts `history[len - steps + s]` from the realized values
/// before it, with frozen parameters; the interval is the point forecast
/// plus/minus `z_{1-alpha/2} * residual_sigma`.
///
/// # Errors
///
/// * `SeriesTooShort` if fewer than `model.order` values precede the first
///   forecast.
/// * `InvalidParameter` for `steps == 0` or `alpha` outside `(0, 1)`.
pub fn ar_intervals(
    model: &ArModel,
    history: &[f64],
    steps: usize,
    alpha: f64,
) -> Result<Vec<(f64, f64)>> {
    if steps == 0 {
        return Err(Error::invalid("steps", "must be at least 1"));
    }
    if history.len() < steps || history.len() - steps < model.order {
        return Err(Error::SeriesTooShort {
            len: history.len(),
            need: steps + model.order,
        });
    }
    if history.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("forecast history"));
    }
    if model.coefficients.len() != model.order {
        return Err(Error::DimensionMismatch {
            expected: format!("{} coefficients", model.order),
            actual: format!("{} coefficients", model.coefficients.len()),
        });
    }

    let z = z_for_alpha(alpha)?;
    let margin = z * model.residual_sigma;
    let start = history.len() - steps;

    let mut bounds = Vec::with_capacity(steps);
    for t in start..history.len() {
        let mut point = model.intercept;
        for (k, coeff) in model.coefficients.iter().enumerate() {
            point += coeff * history[t - 1 - k];
        }
        bounds.push((point - margin, point + margin));
    }
    Ok(bounds)
}
