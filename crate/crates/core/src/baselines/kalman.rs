//! Local-level Kalman filter with one-step-ahead predictive intervals.
//!
//! State model: `level_t = level_{t-1} + w_t` with `w_t ~ N(0, W)`;
//! observation `y_t = level_t + v_t` with `v_t ~ N(0, V)`. The predictive
//! distribution for the next observation is `N(m, Q)` with `Q = C + W + V`,
//! which yields symmetric Gaussian intervals before the observation
//! arrives. `(V, W)` are chosen by maximizing the one-step predictive
//! log-likelihood over a log-spaced grid, refined once around the winner.

use serde::{Deserialize, Serialize};

use crate::baselines::normal::z_for_alpha;
use crate::error::{Error, Result};

/// Filter state between observations plus the fixed noise variances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KalmanState {
    /// Posterior level mean after the last update.
    pub mean: f64,
    /// Posterior level variance after the last update.
    pub variance: f64,
    /// Observation noise variance `V` (> 0).
    pub obs_noise: f64,
    /// Level innovation variance `W` (>= 0).
    pub state_noise: f64,
}

impl KalmanState {
    pub fn new(mean: f64, variance: f64, obs_noise: f64, state_noise: f64) -> Result<Self> {
        let state = KalmanState {
            mean,
            variance,
            obs_noise,
            state_noise,
        };
        state.validate()?;
        Ok(state)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mean.is_finite() {
            return Err(Error::invalid("kalman state", "mean must be finite"));
        }
        if !self.variance.is_finite() || self.variance < 0.0 {
            return Err(Error::invalid(
                "kalman state",
                format!("variance must be non-negative, got {}", self.variance),
            ));
        }
        if !self.obs_noise.is_finite() || self.obs_noise <= 0.0 {
            return Err(Error::invalid(
                "kalman state",
                format!("obs_noise must be positive, got {}", self.obs_noise),
            ));
        }
        if !self.state_noise.is_finite() || self.state_noise < 0.0 {
            return Err(Error::invalid(
                "kalman state",
                format!("state_noise must be non-negative, got {}", self.state_noise),
            ));
        }
        Ok(())
    }
}

/// Log-spaced search grid for `(V, W)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub v_min: f64,
    pub v_max: f64,
    pub w_min: f64,
    pub w_max: f64,
    pub points_per_axis: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            v_min: 1e-2,
            v_max: 1e4,
            w_min: 1e-2,
            w_max: 1e4,
            points_per_axis: 9,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, lo, hi) in [
            ("v", self.v_min, self.v_max),
            ("w", self.w_min, self.w_max),
        ] {
            if !(lo.is_finite() && hi.is_finite()) || lo <= 0.0 || lo > hi {
                return Err(Error::invalid(
                    "kalman grid",
                    format!("{name} range [{lo}, {hi}] must be positive and ordered"),
                ));
            }
        }
        if self.points_per_axis < 2 {
            return Err(Error::invalid(
                "kalman grid",
                "points_per_axis must be at least 2",
            ));
        }
        Ok(())
    }
}

fn log_space(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 || lo == hi {
        return vec![lo];
    }
    let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (ln_lo + (ln_hi - ln_lo) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Filter prior for a training series: mean at the first observation and a
/// variance diffuse enough (the sample variance) to forget that prior
/// quickly.
pub fn initial_state(train: &[f64], obs_noise: f64, state_noise: f64) -> Result<KalmanState> {
    if train.is_empty() {
        return Err(Error::SeriesTooShort { len: 0, need: 1 });
    }
    if train.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("kalman training series"));
    }
    let n = train.len() as f64;
    let mean = train.iter().sum::<f64>() / n;
    let variance = train.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    KalmanState::new(train[0], variance, obs_noise, state_noise)
}

/// One filter step: returns the predictive interval for the next
/// observation (computed before seeing `y`) and the updated state.
///
/// Prediction: `a = mean`, `R = variance + W`, `Q = R + V`, interval
/// `a +/- z_{1-alpha/2} sqrt(Q)`. Update: gain `K = R / Q`,
/// `mean' = a + K (y - a)`, `variance' = (1 - K) R`.
pub fn kalman_step(state: &KalmanState, y: f64, alpha: f64) -> Result<((f64, f64), KalmanState)> {
    state.validate()?;
    if !y.is_finite() {
        return Err(Error::NonFinite("kalman observation"));
    }

    let a = state.mean;
    let r = state.variance + state.state_noise;
    let q = r + state.obs_noise;
    let z = z_for_alpha(alpha)?;
    let half = z * q.sqrt();
    let interval = (a - half, a + half);

    let gain = r / q;
    let next = KalmanState {
        mean: a + gain * (y - a),
        variance: (1.0 - gain) * r,
        obs_noise: state.obs_noise,
        state_noise: state.state_noise,
    };
    Ok((interval, next))
}

/// One-step predictive Gaussian log-likelihood of `train` under `(V, W)`,
/// starting from [`initial_state`]. The first observation seeds the prior
/// and is not scored.
pub fn log_likelihood(train: &[f64], obs_noise: f64, state_noise: f64) -> Result<f64> {
    if train.len() < 2 {
        return Err(Error::SeriesTooShort {
            len: train.len(),
            need: 2,
        });
    }
    let mut state = initial_state(train, obs_noise, state_noise)?;
    let mut ll = 0.0;
    for &y in &train[1..] {
        let a = state.mean;
        let r = state.variance + state.state_noise;
        let q = r + state.obs_noise;
        ll += -0.5 * ((2.0 * std::f64::consts::PI * q).ln() + (y - a).powi(2) / q);
        let gain = r / q;
        state.mean = a + gain * (y - a);
        state.variance = (1.0 - gain) * r;
    }
    Ok(ll)
}

fn grid_argmax(train: &[f64], vs: &[f64], ws: &[f64]) -> Result<(usize, usize, f64)> {
    let mut best = (0usize, 0usize, f64::NEG_INFINITY);
    for (i, &v) in vs.iter().enumerate() {
        for (j, &w) in ws.iter().enumerate() {
            let ll = log_likelihood(train, v, w)?;
            if ll > best.2 {
                best = (i, j, ll);
            }
        }
    }
    Ok(best)
}

/// Picks `(V, W)` maximizing the one-step predictive log-likelihood on a
/// log-spaced grid, then refines once on a finer grid spanning the winner's
/// neighbors. A degenerate (constant) series lands on the grid minimum.
pub fn kalman_fit(train: &[f64], grid: &GridSpec) -> Result<(f64, f64)> {
    grid.validate()?;
    if train.len() < 3 {
        return Err(Error::SeriesTooShort {
            len: train.len(),
            need: 3,
        });
    }
    if train.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("kalman training series"));
    }

    let vs = log_space(grid.v_min, grid.v_max, grid.points_per_axis);
    let ws = log_space(grid.w_min, grid.w_max, grid.points_per_axis);
    let (vi, wj, coarse_ll) = grid_argmax(train, &vs, &ws)?;

    let fine_vs = log_space(
        vs[vi.saturating_sub(1)],
        vs[(vi + 1).min(vs.len() - 1)],
        grid.points_per_axis,
    );
    let fine_ws = log_space(
        ws[wj.saturating_sub(1)],
        ws[(wj + 1).min(ws.len() - 1)],
        grid.points_per_axis,
    );
    let (fi, fj, fine_ll) = grid_argmax(train, &fine_vs, &fine_ws)?;

    if fine_ll >= coarse_ll {
        Ok((fine_vs[fi], fine_ws[fj]))
    } else {
        Ok((vs[vi], ws[wj]))
    }
}
