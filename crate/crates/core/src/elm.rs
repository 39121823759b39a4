//! Random-hidden-layer interval regressor trained in closed form.
//!
//! The hidden layer (weights and biases) is drawn once from a seeded uniform
//! distribution and then frozen; only the linear output weights `beta` are
//! learned, by solving `H * beta = T` in the least-squares sense with the
//! Moore-Penrose pseudoinverse. `T` has two columns — the lower and upper
//! percentage-band targets — so one model emits both interval bounds.
//!
//! Features are standardized by train-set statistics before the hidden
//! projection (volumes in the hundreds would otherwise saturate the sigmoid);
//! the scaler is stored in the model and reapplied on prediction. Band
//! targets are regressed in raw volume units, so the learned output weights
//! carry the data's scale and the network emits bounds directly.

use nalgebra::{DMatrix, DVector};
use rand::distributions::Uniform;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{pinv, DEFAULT_PINV_TOL};
use crate::series::SupervisedSet;

/// Hidden-unit activation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    /// Logistic sigmoid `1 / (1 + e^-z)`.
    Sigmoid,
}

impl Activation {
    pub fn apply(&self, z: f64) -> f64 {
        match self {
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
        }
    }
}

/// Model shape and initialization parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElmConfig {
    /// Feature dimension (the lag count of the windowed series).
    pub input_dim: usize,
    /// Number of hidden units.
    pub hidden_count: usize,
    /// Output dimension; interval training requires 2 (lower, upper).
    pub output_dim: usize,
    pub activation: Activation,
    /// Inclusive-exclusive uniform range for hidden weights and biases.
    pub weight_init_low: f64,
    pub weight_init_high: f64,
    /// Seed of the ChaCha8 stream that draws the hidden layer.
    pub seed: u64,
}

impl ElmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.input_dim < 1 {
            return Err(Error::invalid("elm config", "input_dim must be at least 1"));
        }
        if self.hidden_count < 1 {
            return Err(Error::invalid("elm config", "hidden_count must be at least 1"));
        }
        if self.output_dim < 1 {
            return Err(Error::invalid("elm config", "output_dim must be at least 1"));
        }
        if !(self.weight_init_low.is_finite() && self.weight_init_high.is_finite())
            || self.weight_init_low >= self.weight_init_high
        {
            return Err(Error::invalid(
                "elm config",
                format!(
                    "weight init range [{}, {}) is empty or not finite",
                    self.weight_init_low, self.weight_init_high
                ),
            ));
        }
        Ok(())
    }
}

/// Frozen random projection: `weights` is `hidden_count x input_dim`,
/// `biases` has one entry per hidden unit.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenLayer {
    pub weights: DMatrix<f64>,
    pub biases: DVector<f64>,
}

/// Learned linear read-out, `hidden_count x output_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputWeights {
    pub beta: DMatrix<f64>,
}

/// Train-set standardization constants for the feature columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub feature_mean: Vec<f64>,
    pub feature_std: Vec<f64>,
}

/// Standard deviations this close to zero are replaced by 1 so constant
/// columns pass through unscaled.
const STD_FLOOR: f64 = 1e-12;

impl Scaler {
    /// Identity scaler: no centering, unit scale.
    pub fn identity(input_dim: usize) -> Self {
        Scaler {
            feature_mean: vec![0.0; input_dim],
            feature_std: vec![1.0; input_dim],
        }
    }

    /// Per-column feature statistics. Population variance; degenerate
    /// spreads floor to 1.
    pub fn fit(features: &DMatrix<f64>) -> Self {
        let n = features.nrows() as f64;
        let mut feature_mean = Vec::with_capacity(features.ncols());
        let mut feature_std = Vec::with_capacity(features.ncols());
        for j in 0..features.ncols() {
            let col = features.column(j);
            let mean = col.iter().sum::<f64>() / n;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            let std = var.sqrt();
            feature_mean.push(mean);
            feature_std.push(if std < STD_FLOOR { 1.0 } else { std });
        }

        Scaler {
            feature_mean,
            feature_std,
        }
    }

    /// Standardizes a feature matrix column by column.
    pub fn scale_features(&self, features: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if features.ncols() != self.feature_mean.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} feature columns", self.feature_mean.len()),
                actual: format!("{} feature columns", features.ncols()),
            });
        }
        Ok(DMatrix::from_fn(features.nrows(), features.ncols(), |i, j| {
            (features[(i, j)] - self.feature_mean[j]) / self.feature_std[j]
        }))
    }
}

/// A trained interval regressor: frozen hidden layer, learned output
/// weights, and the train-set scaler.
#[derive(Debug, Clone, PartialEq)]
pub struct ElmModel {
    pub config: ElmConfig,
    pub scaler: Scaler,
    pub hidden: HiddenLayer,
    pub output: OutputWeights,
}

/// Draws the hidden layer i.i.d. uniform on the configured range,
/// deterministically from `config.seed`. Weights are drawn row-major, then
/// the biases.
pub fn init_hidden(config: &ElmConfig) -> Result<HiddenLayer> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let dist = Uniform::new(config.weight_init_low, config.weight_init_high);
    let k = config.hidden_count;
    let n = config.input_dim;

    let mut weights = DMatrix::zeros(k, n);
    for j in 0..k {
        for c in 0..n {
            weights[(j, c)] = rng.sample(dist);
        }
    }
    let biases = DVector::from_iterator(k, (0..k).map(|_| rng.sample(dist)));
    Ok(HiddenLayer { weights, biases })
}

/// Hidden activation matrix: entry `(i, j)` is
/// `activation(weights_j . x_i + bias_j)`, shape `N x hidden_count`.
pub fn hidden_matrix(
    hidden: &HiddenLayer,
    features: &DMatrix<f64>,
    activation: Activation,
) -> Result<DMatrix<f64>> {
    if features.ncols() != hidden.weights.ncols() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} feature columns", hidden.weights.ncols()),
            actual: format!("{} feature columns", features.ncols()),
        });
    }
    if features.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("features"));
    }
    let mut z = features * hidden.weights.transpose();
    for i in 0..z.nrows() {
        for j in 0..z.ncols() {
            z[(i, j)] = activation.apply(z[(i, j)] + hidden.biases[j]);
        }
    }
    Ok(z)
}

/// Trains the interval regressor on a supervised set.
///
/// Requires `config.output_dim == 2`: the target matrix has the band lower
/// bounds in column 0 and the band upper bounds in column 1. The solve is
/// `beta = pinv(H) * T` with H built from standardized features and T in
/// raw volume units.
pub fn train(train_set: &SupervisedSet, config: &ElmConfig) -> Result<ElmModel> {
    config.validate()?;
    if config.output_dim != 2 {
        return Err(Error::invalid(
            "elm config",
            format!("interval training requires output_dim 2, got {}", config.output_dim),
        ));
    }
    if train_set.input_dim() != config.input_dim {
        return Err(Error::DimensionMismatch {
            expected: format!("{} feature columns", config.input_dim),
            actual: format!("{} feature columns", train_set.input_dim()),
        });
    }

    let hidden = init_hidden(config)?;
    let scaler = Scaler::fit(train_set.features());

    let scaled = scaler.scale_features(train_set.features())?;
    let h = hidden_matrix(&hidden, &scaled, config.activation)?;
    if h.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("hidden activation matrix"));
    }

    let n = train_set.len();
    let t = DMatrix::from_fn(n, 2, |i, c| {
        if c == 0 {
            train_set.band_lower()[i]
        } else {
            train_set.band_upper()[i]
        }
    });

    let beta = pinv(&h, DEFAULT_PINV_TOL)? * t;

    Ok(ElmModel {
        config: *config,
        scaler,
        hidden,
        output: OutputWeights { beta },
    })
}

/// Emits `(lower, upper)` bounds for each feature row.
///
/// Network outputs are ordered per row, so the returned pairs always
/// satisfy `lower <= upper` even when the two output heads cross.
pub fn predict(model: &ElmModel, features: &DMatrix<f64>) -> Result<Vec<(f64, f64)>> {
    if features.ncols() != model.config.input_dim {
        return Err(Error::DimensionMismatch {
            expected: format!("{} feature columns", model.config.input_dim),
            actual: format!("{} feature columns", features.ncols()),
        });
    }
    if model.output.beta.nrows() != model.config.hidden_count
        || model.output.beta.ncols() != model.config.output_dim
    {
        return Err(Error::DimensionMismatch {
            expected: format!(
                "beta of shape {}x{}",
                model.config.hidden_count, model.config.output_dim
            ),
            actual: format!("{}x{}", model.output.beta.nrows(), model.output.beta.ncols()),
        });
    }

    let scaled = model.scaler.scale_features(features)?;
    let h = hidden_matrix(&model.hidden, &scaled, model.config.activation)?;
    let raw = h * &model.output.beta;

    let mut bounds = Vec::with_capacity(raw.nrows());
    for i in 0..raw.nrows() {
        let a = raw[(i, 0)];
        let b = raw[(i, 1)];
        bounds.push(if a <= b { (a, b) } else { (b, a) });
    }
    Ok(bounds)
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

/// On-disk layout of a model: matrices as row-major nested arrays.
#[derive(Serialize, Deserialize)]
struct ModelDoc {
    config: ElmConfig,
    scaler: Scaler,
    hidden_weights: Vec<Vec<f64>>,
    hidden_biases: Vec<f64>,
    beta: Vec<Vec<f64>>,
}

fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().cloned().collect())
        .collect()
}

fn rows_to_matrix(rows: &[Vec<f64>], what: &'static str) -> Result<DMatrix<f64>> {
    if rows.is_empty() {
        return Err(Error::Serialization(format!("{what}: no rows")));
    }
    let ncols = rows[0].len();
    if ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Serialization(format!("{what}: ragged or empty rows")));
    }
    let flat: Vec<f64> = rows.iter().flatten().cloned().collect();
    Ok(DMatrix::from_row_slice(rows.len(), ncols, &flat))
}

impl ElmModel {
    /// Serializes the model to JSON. Floats use shortest round-trip
    /// formatting, so [`ElmModel::from_json`] restores them bit-exactly.
    pub fn to_json(&self) -> String {
        let doc = ModelDoc {
            config: self.config,
            scaler: self.scaler.clone(),
            hidden_weights: matrix_to_rows(&self.hidden.weights),
            hidden_biases: self.hidden.biases.iter().cloned().collect(),
            beta: matrix_to_rows(&self.output.beta),
        };
        serde_json::to_string_pretty(&doc).expect("model doc is always serializable")
    }

    /// Restores a model serialized by [`ElmModel::to_json`], validating the
    /// stored shapes against the stored config.
    pub fn from_json(json: &str) -> Result<Self> {
        let doc: ModelDoc =
            serde_json::from_str(json).map_err(|e| Error::Serialization(e.to_string()))?;
        doc.config.validate()?;
        let weights = rows_to_matrix(&doc.hidden_weights, "hidden_weights")?;
        let beta = rows_to_matrix(&doc.beta, "beta")?;
        if weights.nrows() != doc.config.hidden_count || weights.ncols() != doc.config.input_dim {
            return Err(Error::Serialization(format!(
                "hidden_weights is {}x{}, config says {}x{}",
                weights.nrows(),
                weights.ncols(),
                doc.config.hidden_count,
                doc.config.input_dim
            )));
        }
        if doc.hidden_biases.len() != doc.config.hidden_count {
            return Err(Error::Serialization(format!(
                "{} biases for {} hidden units",
                doc.hidden_biases.len(),
                doc.config.hidden_count
            )));
        }
        if beta.nrows() != doc.config.hidden_count || beta.ncols() != doc.config.output_dim {
            return Err(Error::Serialization(format!(
                "beta is {}x{}, config says {}x{}",
                beta.nrows(),
                beta.ncols(),
                doc.config.hidden_count,
                doc.config.output_dim
            )));
        }
        if doc.scaler.feature_mean.len() != doc.config.input_dim
            || doc.scaler.feature_std.len() != doc.config.input_dim
        {
            return Err(Error::Serialization("scaler shape disagrees with config".into()));
        }
        Ok(ElmModel {
            config: doc.config,
            scaler: doc.scaler,
            hidden: HiddenLayer {
                weights,
                biases: DVector::from_vec(doc.hidden_biases),
            },
            output: OutputWeights { beta },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{BandConfig, SupervisedSet};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn test_config(input_dim: usize, hidden_count: usize, seed: u64) -> ElmConfig {
        ElmConfig {
            input_dim,
            hidden_count,
            output_dim: 2,
            activation: Activation::Sigmoid,
            weight_init_low: -1.0,
            weight_init_high: 1.0,
            seed,
        }
    }

    /// Random supervised set with positive targets and a 5% band.
    fn random_set(n: usize, dim: usize, seed: u64) -> SupervisedSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let features = DMatrix::from_fn(n, dim, |_, _| rng.gen_range(50.0..500.0));
        let targets: Vec<f64> = (0..n).map(|_| rng.gen_range(50.0..500.0)).collect();
        let band = BandConfig { rho_percent: 5.0 };
        let (lower, upper): (Vec<f64>, Vec<f64>) = targets.iter().map(|&t| band.band(t)).unzip();
        SupervisedSet::new(features, targets, lower, upper).unwrap()
    }

    // --- init_hidden --------------------------------------------------------

    #[test]
    fn init_hidden_is_deterministic_and_in_range() {
        let cfg = test_config(4, 8, 5);
        let a = init_hidden(&cfg).unwrap();
        let b = init_hidden(&cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.weights.iter().all(|&v| (-1.0..1.0).contains(&v)));
        assert!(a.biases.iter().all(|&v| (-1.0..1.0).contains(&v)));

        let other = init_hidden(&test_config(4, 8, 6)).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn init_hidden_rejects_an_empty_range() {
        let mut cfg = test_config(2, 2, 1);
        cfg.weight_init_low = 1.0;
        cfg.weight_init_high = 1.0;
        assert!(init_hidden(&cfg).is_err());
        cfg.weight_init_high = 0.5;
        assert!(init_hidden(&cfg).is_err());
    }

    // --- hidden_matrix ------------------------------------------------------

    #[test]
    fn hidden_matrix_matches_a_scalar_loop() {
        let cfg = test_config(2, 3, 9);
        let hidden = init_hidden(&cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let features = DMatrix::from_fn(3, 2, |_, _| rng.gen_range(-2.0..2.0));
        let h = hidden_matrix(&hidden, &features, Activation::Sigmoid).unwrap();

        for i in 0..3 {
            for j in 0..3 {
                let mut dot = hidden.biases[j];
                for c in 0..2 {
                    dot += hidden.weights[(j, c)] * features[(i, c)];
                }
                let expected = 1.0 / (1.0 + (-dot).exp());
                assert_abs_diff_eq!(h[(i, j)], expected, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn hidden_matrix_entries_are_sigmoid_bounded() {
        let cfg = test_config(3, 5, 11);
        let hidden = init_hidden(&cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let features = DMatrix::from_fn(20, 3, |_, _| rng.gen_range(-100.0..100.0));
        let h = hidden_matrix(&hidden, &features, Activation::Sigmoid).unwrap();
        assert!(h.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn hidden_matrix_rejects_mismatched_features() {
        let cfg = test_config(3, 4, 2);
        let hidden = init_hidden(&cfg).unwrap();
        let features = DMatrix::zeros(5, 2);
        assert!(matches!(
            hidden_matrix(&hidden, &features, Activation::Sigmoid),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    // --- train --------------------------------------------------------------

    #[test]
    fn train_leaves_the_hidden_layer_bitwise_untouched() {
        let cfg = test_config(3, 6, 21);
        let expected = init_hidden(&cfg).unwrap();
        let model = train(&random_set(30, 3, 4), &cfg).unwrap();
        assert_eq!(model.hidden, expected);
        for (a, b) in model
            .hidden
            .weights
            .iter()
            .zip(expected.weights.iter())
        {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn train_residual_matches_a_normal_equations_solve() {
        // Small well-conditioned instance; the least-squares residual from
        // the pseudoinverse route must agree with an independent
        // normal-equations solve (HtH) beta = Ht T.
        let cfg = test_config(2, 3, 33);
        let set = random_set(6, 2, 8);
        let model = train(&set, &cfg).unwrap();

        let scaled = model.scaler.scale_features(set.features()).unwrap();
        let h = hidden_matrix(&model.hidden, &scaled, Activation::Sigmoid).unwrap();
        let t = DMatrix::from_fn(6, 2, |i, c| {
            if c == 0 {
                set.band_lower()[i]
            } else {
                set.band_upper()[i]
            }
        });

        // Normal equations solved by hand-rolled Gauss-Jordan on the 3x3
        // system, independently of the pinv code path.
        let hth = h.transpose() * &h;
        let htt = h.transpose() * &t;
        let k = 3;
        let mut aug = DMatrix::zeros(k, k + 2);
        aug.view_mut((0, 0), (k, k)).copy_from(&hth);
        aug.view_mut((0, k), (k, 2)).copy_from(&htt);
        for col in 0..k {
            let mut pivot = col;
            for r in col + 1..k {
                if aug[(r, col)].abs() > aug[(pivot, col)].abs() {
                    pivot = r;
                }
            }
            aug.swap_rows(col, pivot);
            let p = aug[(col, col)];
            assert!(p.abs() > 1e-12, "test fixture must be well conditioned");
            for c in 0..k + 2 {
                aug[(col, c)] /= p;
            }
            for r in 0..k {
                if r != col {
                    let f = aug[(r, col)];
                    for c in 0..k + 2 {
                        aug[(r, c)] -= f * aug[(col, c)];
                    }
                }
            }
        }
        let beta_ne = aug.view((0, k), (k, 2)).into_owned();

        let res_pinv = (&h * &model.output.beta - &t).norm();
        let res_ne = (&h * &beta_ne - &t).norm();
        // Residuals are in raw volume units (targets in the hundreds).
        assert_abs_diff_eq!(res_pinv, res_ne, epsilon = 1e-6);
        // The pseudoinverse gives the least-squares optimum, so it can never
        // be beaten by the normal-equations route.
        assert!(res_pinv <= res_ne + 1e-8);
    }

    #[test]
    fn square_system_with_distinct_inputs_interpolates() {
        // K = N: H is square and generically invertible, so the band targets
        // are reproduced to numerical precision.
        let cfg = test_config(2, 8, 3);
        let set = random_set(8, 2, 19);
        let model = train(&set, &cfg).unwrap();
        let bounds = predict(&model, set.features()).unwrap();
        let mut worst = 0.0_f64;
        for (i, (lo, hi)) in bounds.iter().enumerate() {
            worst = worst.max((lo - set.band_lower()[i]).abs());
            worst = worst.max((hi - set.band_upper()[i]).abs());
        }
        assert!(worst <= 1e-6, "worst residual {worst}");
    }

    #[test]
    fn overcomplete_hidden_layer_interpolates_too() {
        // K >= N with distinct rows: exact fit is achievable.
        let cfg = test_config(2, 12, 3);
        let set = random_set(8, 2, 23);
        let model = train(&set, &cfg).unwrap();
        let bounds = predict(&model, set.features()).unwrap();
        let mut worst = 0.0_f64;
        for (i, (lo, hi)) in bounds.iter().enumerate() {
            worst = worst.max((lo - set.band_lower()[i]).abs());
            worst = worst.max((hi - set.band_upper()[i]).abs());
        }
        assert!(worst <= 1e-6, "worst residual {worst}");
    }

    #[test]
    fn all_zero_band_targets_give_zero_beta() {
        let features = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let set = SupervisedSet::new(features, vec![0.0; 3], vec![0.0; 3], vec![0.0; 3]).unwrap();
        let cfg = test_config(2, 4, 17);
        let model = train(&set, &cfg).unwrap();
        assert!(model.output.beta.iter().all(|&v| v == 0.0));
        // And the emitted bounds collapse to (0, 0).
        let bounds = predict(&model, set.features()).unwrap();
        for (lo, hi) in bounds {
            assert_eq!(lo, 0.0);
            assert_eq!(hi, 0.0);
        }
    }

    #[test]
    fn train_residual_beats_random_output_weights() {
        let cfg = test_config(3, 5, 41);
        let set = random_set(40, 3, 12);
        let model = train(&set, &cfg).unwrap();

        let scaled = model.scaler.scale_features(set.features()).unwrap();
        let h = hidden_matrix(&model.hidden, &scaled, Activation::Sigmoid).unwrap();
        let t = DMatrix::from_fn(40, 2, |i, c| {
            if c == 0 {
                set.band_lower()[i]
            } else {
                set.band_upper()[i]
            }
        });
        let trained = (&h * &model.output.beta - &t).norm();

        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        for _ in 0..100 {
            let random_beta = DMatrix::from_fn(5, 2, |_, _| rng.gen_range(-500.0..500.0));
            let res = (&h * &random_beta - &t).norm();
            assert!(trained <= res + 1e-12);
        }
    }

    #[test]
    fn train_rejects_wrong_output_dim_and_dimension_mismatch() {
        let mut cfg = test_config(3, 4, 2);
        cfg.output_dim = 1;
        assert!(train(&random_set(10, 3, 1), &cfg).is_err());

        let cfg = test_config(4, 4, 2);
        assert!(matches!(
            train(&random_set(10, 3, 1), &cfg),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    // --- predict ------------------------------------------------------------

    #[test]
    fn predict_orders_crossed_outputs() {
        // One hidden unit with zero weights: h == sigmoid(0) == 0.5 for any
        // input. beta chosen so the raw outputs are (120, 80) -> emitted as
        // (80, 120).
        let cfg = test_config(1, 1, 0);
        let model = ElmModel {
            config: cfg,
            scaler: Scaler::identity(1),
            hidden: HiddenLayer {
                weights: DMatrix::zeros(1, 1),
                biases: DVector::zeros(1),
            },
            output: OutputWeights {
                beta: DMatrix::from_row_slice(1, 2, &[240.0, 160.0]),
            },
        };
        let features = DMatrix::from_row_slice(1, 1, &[3.0]);
        let bounds = predict(&model, &features).unwrap();
        assert_abs_diff_eq!(bounds[0].0, 80.0, epsilon = 1e-12);
        assert_abs_diff_eq!(bounds[0].1, 120.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_beta_emits_zero_bounds_under_identity_scaling() {
        let cfg = test_config(2, 3, 0);
        let model = ElmModel {
            config: cfg,
            scaler: Scaler::identity(2),
            hidden: init_hidden(&cfg).unwrap(),
            output: OutputWeights {
                beta: DMatrix::zeros(3, 2),
            },
        };
        let features = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, -3.0, 4.0]);
        for (lo, hi) in predict(&model, &features).unwrap() {
            assert_eq!(lo, 0.0);
            assert_eq!(hi, 0.0);
        }
    }

    #[test]
    fn predict_matches_a_scalar_loop() {
        let cfg = test_config(3, 4, 55);
        let set = random_set(12, 3, 3);
        let model = train(&set, &cfg).unwrap();
        let bounds = predict(&model, set.features()).unwrap();

        for i in 0..set.len() {
            let mut outs = [0.0_f64; 2];
            for (c, out) in outs.iter_mut().enumerate() {
                let mut acc = 0.0;
                for j in 0..4 {
                    let mut dot = model.hidden.biases[j];
                    for d in 0..3 {
                        let x = (set.features()[(i, d)] - model.scaler.feature_mean[d])
                            / model.scaler.feature_std[d];
                        dot += model.hidden.weights[(j, d)] * x;
                    }
                    acc += model.output.beta[(j, c)] / (1.0 + (-dot).exp());
                }
                *out = acc;
            }
            let (lo, hi) = if outs[0] <= outs[1] {
                (outs[0], outs[1])
            } else {
                (outs[1], outs[0])
            };
            assert_abs_diff_eq!(bounds[i].0, lo, epsilon = 1e-12);
            assert_abs_diff_eq!(bounds[i].1, hi, epsilon = 1e-12);
        }
    }

    // --- serialization ------------------------------------------------------

    #[test]
    fn json_round_trip_is_bit_exact() {
        let cfg = test_config(3, 5, 99);
        let model = train(&random_set(25, 3, 21), &cfg).unwrap();
        let json = model.to_json();
        let back = ElmModel::from_json(&json).unwrap();

        assert_eq!(back.config, model.config);
        for (a, b) in back.hidden.weights.iter().zip(model.hidden.weights.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        for (a, b) in back.hidden.biases.iter().zip(model.hidden.biases.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        for (a, b) in back.output.beta.iter().zip(model.output.beta.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        for (a, b) in back.scaler.feature_mean.iter().zip(&model.scaler.feature_mean) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        for (a, b) in back.scaler.feature_std.iter().zip(&model.scaler.feature_std) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        // Second round trip is textually stable.
        assert_eq!(back.to_json(), json);
    }

    #[test]
    fn from_json_rejects_shape_lies() {
        let cfg = test_config(2, 3, 7);
        let model = train(&random_set(10, 2, 2), &cfg).unwrap();
        let mut doc: serde_json::Value = serde_json::from_str(&model.to_json()).unwrap();
        doc["hidden_biases"] = serde_json::json!([0.0, 0.0]);
        let tampered = serde_json::to_string(&doc).unwrap();
        assert!(matches!(
            ElmModel::from_json(&tampered),
            Err(Error::Serialization(_))
        ));
        assert!(matches!(
            ElmModel::from_json("not json"),
            Err(Error::Serialization(_))
        ));
    }

    // --- properties ----------------------------------------------------------

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn predicted_bounds_are_always_ordered(
            seed in 0u64..500,
            n in 4usize..30,
            k in 1usize..12,
        ) {
            let cfg = test_config(3, k, seed);
            let set = random_set(n, 3, seed.wrapping_add(1));
            let model = train(&set, &cfg).unwrap();
            let bounds = predict(&model, set.features()).unwrap();
            for (lo, hi) in bounds {
                prop_assert!(lo <= hi);
                prop_assert!(lo.is_finite() && hi.is_finite());
            }
        }
    }

    #[test]
    fn model_types_are_send_and_sync() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<ElmModel>();
        assert_send_sync::<HiddenLayer>();
    }
}
