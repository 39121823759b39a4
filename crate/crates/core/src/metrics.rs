//! Reliability and sharpness scoring for interval forecasts.
//!
//! A forecast is a set of `(lower, upper)` bounds with the realized values.
//! Reliability is measured as the absolute gap between empirical coverage
//! (PICP) and the nominal confidence level (PINC); sharpness starts from a
//! pointwise width-plus-violation score, is min-max normalized across the
//! evaluation set, and averaged. The swarm optimizer minimizes the weighted
//! sum of the two.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Nominal interval specification. `alpha` is the tail mass; the nominal
/// coverage (PINC) is `1 - alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiConfig {
    pub alpha: f64,
}

impl PiConfig {
    pub fn new(alpha: f64) -> Result<Self> {
        let cfg = PiConfig { alpha };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Convenience constructor from the nominal coverage level, e.g.
    /// `PiConfig::from_pinc(0.95)` for 95% intervals.
    pub fn from_pinc(pinc: f64) -> Result<Self> {
        PiConfig::new(1.0 - pinc)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() || self.alpha <= 0.0 || self.alpha >= 1.0 {
            return Err(Error::invalid(
                "pi config",
                format!("alpha must lie in (0, 1), got {}", self.alpha),
            ));
        }
        Ok(())
    }

    /// Nominal coverage as a fraction, `1 - alpha`.
    pub fn pinc(&self) -> f64 {
        1.0 - self.alpha
    }
}

/// Weights of the pointwise sharpness score: `w1` scales the width term,
/// `w2` scales the violation-distance penalty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpnessWeights {
    pub w1: f64,
    pub w2: f64,
}

impl SharpnessWeights {
    pub fn new(w1: f64, w2: f64) -> Result<Self> {
        let w = SharpnessWeights { w1, w2 };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.w1.is_finite() || self.w1 <= 0.0 {
            return Err(Error::invalid(
                "sharpness weights",
                format!("w1 must be positive, got {}", self.w1),
            ));
        }
        if !self.w2.is_finite() || self.w2 < 0.0 {
            return Err(Error::invalid(
                "sharpness weights",
                format!("w2 must be non-negative, got {}", self.w2),
            ));
        }
        Ok(())
    }
}

/// Weights of the combined objective `gamma * reliability + lambda *
/// sharpness`. At least one weight must be positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveWeights {
    pub gamma: f64,
    pub lambda: f64,
}

impl ObjectiveWeights {
    pub fn new(gamma: f64, lambda: f64) -> Result<Self> {
        let w = ObjectiveWeights { gamma, lambda };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("gamma", self.gamma), ("lambda", self.lambda)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(
                    "objective weights",
                    format!("{name} must be a finite non-negative real, got {v}"),
                ));
            }
        }
        if self.gamma == 0.0 && self.lambda == 0.0 {
            return Err(Error::invalid(
                "objective weights",
                "gamma and lambda may not both be zero",
            ));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// IntervalForecast
// ---------------------------------------------------------------------------

/// A batch of interval forecasts paired with the realized values.
///
/// Invariants enforced at construction: equal lengths, finite entries, and
/// `lower[i] <= upper[i]` for every row.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalForecast {
    lower: Vec<f64>,
    upper: Vec<f64>,
    actual: Vec<f64>,
    pi: PiConfig,
}

impl IntervalForecast {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, actual: Vec<f64>, pi: PiConfig) -> Result<Self> {
        pi.validate()?;
        if lower.len() != upper.len() || lower.len() != actual.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} bounds and actuals", lower.len()),
                actual: format!("{} upper, {} actual", upper.len(), actual.len()),
            });
        }
        for i in 0..lower.len() {
            if !(lower[i].is_finite() && upper[i].is_finite() && actual[i].is_finite()) {
                return Err(Error::NonFinite("interval forecast"));
            }
            if lower[i] > upper[i] {
                return Err(Error::BoundOrder {
                    index: i,
                    lower: lower[i],
                    upper: upper[i],
                });
            }
        }
        Ok(IntervalForecast {
            lower,
            upper,
            actual,
            pi,
        })
    }

    /// Builds a forecast from `(lower, upper)` pairs.
    pub fn from_bounds(bounds: &[(f64, f64)], actual: &[f64], pi: PiConfig) -> Result<Self> {
        let lower = bounds.iter().map(|b| b.0).collect();
        let upper = bounds.iter().map(|b| b.1).collect();
        IntervalForecast::new(lower, upper, actual.to_vec(), pi)
    }

    pub fn len(&self) -> usize {
        self.actual.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actual.is_empty()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn actual(&self) -> &[f64] {
        &self.actual
    }

    pub fn pi(&self) -> PiConfig {
        self.pi
    }

    /// Closed-interval coverage test for row `i`: boundary hits count as
    /// covered.
    pub fn covered_at(&self, i: usize) -> bool {
        self.lower[i] <= self.actual[i] && self.actual[i] <= self.upper[i]
    }
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// Prediction interval coverage probability: the fraction of realized values
/// that fall inside their closed interval.
pub fn picp(f: &IntervalForecast) -> Result<f64> {
    if f.is_empty() {
        return Err(Error::EmptyForecast);
    }
    let covered = (0..f.len()).filter(|&i| f.covered_at(i)).count();
    Ok(covered as f64 / f.len() as f64)
}

/// Absolute average coverage error: `|picp - pinc|`, both as fractions.
pub fn aace(picp: f64, pinc: f64) -> f64 {
    (picp - pinc).abs()
}

/// Pointwise sharpness score for one interval.
///
/// With width `v = upper - lower` and tail mass `alpha`:
/// * covered value: `w1 * alpha * v`
/// * value below the interval: `w1 * alpha * v + w2 * (lower - actual)`
/// * value above the interval: `w1 * alpha * v + w2 * (actual - upper)`
///
/// The violation branches meet the covered branch continuously at the
/// bounds.
pub fn sharpness_point(
    lower: f64,
    upper: f64,
    actual: f64,
    alpha: f64,
    w: &SharpnessWeights,
) -> Result<f64> {
    w.validate()?;
    if !(lower.is_finite() && upper.is_finite() && actual.is_finite()) {
        return Err(Error::NonFinite("sharpness inputs"));
    }
    if lower > upper {
        return Err(Error::BoundOrder {
            index: 0,
            lower,
            upper,
        });
    }
    let width = upper - lower;
    let base = w.w1 * alpha * width;
    let score = if actual < lower {
        base + w.w2 * (lower - actual)
    } else if actual > upper {
        base + w.w2 * (actual - upper)
    } else {
        base
    };
    Ok(score)
}

/// Min-max normalization to `[0, 1]`. A constant input maps to all zeros.
pub fn min_max_normalize(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::EmptyForecast);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("normalization input"));
    }
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == min {
        return Ok(vec![0.0; values.len()]);
    }
    let span = max - min;
    Ok(values.iter().map(|v| (v - min) / span).collect())
}

/// Mean of the min-max normalized pointwise sharpness scores.
pub fn sharpness_mean(f: &IntervalForecast, w: &SharpnessWeights) -> Result<f64> {
    if f.is_empty() {
        return Err(Error::EmptyForecast);
    }
    let mut scores = Vec::with_capacity(f.len());
    for i in 0..f.len() {
        scores.push(sharpness_point(
            f.lower[i], f.upper[i], f.actual[i], f.pi.alpha, w,
        )?);
    }
    let normalized = min_max_normalize(&scores)?;
    Ok(normalized.iter().sum::<f64>() / normalized.len() as f64)
}

/// Combined objective `gamma * aace + lambda * sharpness`.
pub fn objective(aace: f64, sharpness: f64, ow: &ObjectiveWeights) -> f64 {
    ow.gamma * aace + ow.lambda * sharpness
}

/// Mean prediction interval length in the units of the series.
pub fn mpil(f: &IntervalForecast) -> Result<f64> {
    if f.is_empty() {
        return Err(Error::EmptyForecast);
    }
    let total: f64 = f
        .lower
        .iter()
        .zip(&f.upper)
        .map(|(lo, hi)| hi - lo)
        .sum();
    Ok(total / f.len() as f64)
}

/// Where the uncovered points sit relative to their intervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutsideStats {
    /// Points strictly above their upper bound.
    pub above_count: usize,
    /// Mean distance `actual - upper` over those points (0 when none).
    pub above_mean_dist: f64,
    /// Points strictly below their lower bound.
    pub below_count: usize,
    /// Mean distance `lower - actual` over those points (0 when none).
    pub below_mean_dist: f64,
}

/// Counts the uncovered points above and below their intervals and the mean
/// distance to the violated bound on each side.
pub fn outside_stats(f: &IntervalForecast) -> OutsideStats {
    let mut above_count = 0usize;
    let mut above_sum = 0.0;
    let mut below_count = 0usize;
    let mut below_sum = 0.0;
    for i in 0..f.len() {
        if f.actual[i] > f.upper[i] {
            above_count += 1;
            above_sum += f.actual[i] - f.upper[i];
        } else if f.actual[i] < f.lower[i] {
            below_count += 1;
            below_sum += f.lower[i] - f.actual[i];
        }
    }
    OutsideStats {
        above_count,
        above_mean_dist: if above_count > 0 {
            above_sum / above_count as f64
        } else {
            0.0
        },
        below_count,
        below_mean_dist: if below_count > 0 {
            below_sum / below_count as f64
        } else {
            0.0
        },
    }
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Full scorecard of one forecast at one nominal level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub picp: f64,
    /// Reliability: absolute coverage error `|picp - pinc|`.
    pub aace: f64,
    /// Mean of the min-max normalized pointwise sharpness scores.
    pub sharpness_norm_mean: f64,
    /// `gamma * aace + lambda * sharpness_norm_mean`.
    pub objective: f64,
    /// Mean interval length in the units of the series.
    pub mpil: f64,
}

impl Evaluation {
    /// Header for the report TSV produced by [`Evaluation::tsv_row`].
    pub const TSV_HEADER: &'static str = "model\tpinc\treliability\tsharpness\tobjective\tpicp\tmpil";

    /// One report row. Numbers use shortest round-trip formatting so the
    /// text parses back to the identical floats.
    pub fn tsv_row(&self, model: &str, pinc: f64) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            model, pinc, self.aace, self.sharpness_norm_mean, self.objective, self.picp, self.mpil
        )
    }

    /// JSON object with the five metric fields.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("evaluation is always serializable")
    }
}

/// Scores a forecast end to end: PICP, reliability, normalized sharpness,
/// combined objective, and mean interval length.
pub fn evaluate(
    f: &IntervalForecast,
    w: &SharpnessWeights,
    ow: &ObjectiveWeights,
) -> Result<Evaluation> {
    ow.validate()?;
    let picp_v = picp(f)?;
    let aace_v = aace(picp_v, f.pi.pinc());
    let sharp_v = sharpness_mean(f, w)?;
    Ok(Evaluation {
        picp: picp_v,
        aace: aace_v,
        sharpness_norm_mean: sharp_v,
        objective: objective(aace_v, sharp_v, ow),
        mpil: mpil(f)?,
    })
}
