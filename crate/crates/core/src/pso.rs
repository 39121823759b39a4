//! Particle swarm tuner for the interval regressor's output weights.
//!
//! The swarm searches the flattened `beta` space, starting from the
//! closed-form least-squares solution: particle 0 is pinned to it and the
//! rest are uniform perturbations around it. Fitness is the interval
//! objective (`gamma * coverage-error + lambda * normalized sharpness`)
//! evaluated against the true targets of a fitness set, so the swarm can
//! stretch or shrink the bounds the pseudoinverse produced.
//!
//! Updates follow the classic inertia form with one shared random pair per
//! particle per iteration (optionally per dimension), a hard velocity clamp,
//! and a fractional position step. All draws come from a ChaCha8 stream in
//! fixed particle order, so runs are reproducible regardless of platform.

use nalgebra::{DMatrix, DVector};
use rand::distributions::Uniform;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::elm::{hidden_matrix, ElmModel, OutputWeights};
use crate::error::{Error, Result};
use crate::metrics::{
    aace, min_max_normalize, objective, sharpness_point, ObjectiveWeights, PiConfig,
    SharpnessWeights,
};
use crate::series::{split, SplitSpec, SupervisedSet};

/// Which slice of the training data the swarm scores candidates against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitnessSet {
    /// Score against the full training set.
    Train,
    /// Score against the chronologically last quarter of the training set.
    Holdout,
}

/// Swarm size, update coefficients, and termination settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwarmConfig {
    pub particle_count: usize,
    pub iterations: usize,
    /// Inertia weight `w` on the previous velocity.
    pub inertia: f64,
    /// Cognitive coefficient `c1` toward the particle best.
    pub cognitive: f64,
    /// Social coefficient `c2` toward the global best.
    pub social: f64,
    /// Fraction of the velocity applied to the position each step.
    pub step_phi: f64,
    /// Componentwise velocity clamp.
    pub v_max: f64,
    /// Scale of the uniform initial perturbation around the seed position.
    /// `None` auto-scales to half the standard deviation of the seed's
    /// entries; `Some(0.0)` starts every particle exactly at the seed.
    pub init_spread: Option<f64>,
    /// Stop early when the global best improves by less than this between
    /// consecutive iterations. Zero disables early stopping.
    pub early_stop_delta: f64,
    pub fitness_set: FitnessSet,
    /// Draw an independent random pair per dimension instead of one shared
    /// pair per particle update.
    pub per_dimension_draws: bool,
    /// Seed of the ChaCha8 stream driving all swarm randomness.
    pub seed: u64,
}

impl Default for SwarmConfig {
    fn default() -> Self {
        SwarmConfig {
            particle_count: 50,
            iterations: 150,
            inertia: 0.9,
            cognitive: 1.0,
            social: 1.0,
            step_phi: 0.5,
            v_max: 2.0,
            init_spread: None,
            early_stop_delta: 0.0,
            fitness_set: FitnessSet::Train,
            per_dimension_draws: false,
            seed: 0,
        }
    }
}

impl SwarmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.particle_count < 1 {
            return Err(Error::invalid("swarm config", "particle_count must be at least 1"));
        }
        if self.iterations < 1 {
            return Err(Error::invalid("swarm config", "iterations must be at least 1"));
        }
        for (name, v) in [
            ("inertia", self.inertia),
            ("cognitive", self.cognitive),
            ("social", self.social),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(
                    "swarm config",
                    format!("{name} must be a finite non-negative real, got {v}"),
                ));
            }
        }
        if !self.step_phi.is_finite() || self.step_phi <= 0.0 || self.step_phi > 1.0 {
            return Err(Error::invalid(
                "swarm config",
                format!("step_phi must lie in (0, 1], got {}", self.step_phi),
            ));
        }
        if !self.v_max.is_finite() || self.v_max <= 0.0 {
            return Err(Error::invalid(
                "swarm config",
                format!("v_max must be positive, got {}", self.v_max),
            ));
        }
        if let Some(s) = self.init_spread {
            if !s.is_finite() || s < 0.0 {
                return Err(Error::invalid(
                    "swarm config",
                    format!("init_spread must be a finite non-negative real, got {s}"),
                ));
            }
        }
        if !self.early_stop_delta.is_finite() || self.early_stop_delta < 0.0 {
            return Err(Error::invalid(
                "swarm config",
                format!("early_stop_delta must be non-negative, got {}", self.early_stop_delta),
            ));
        }
        Ok(())
    }
}

/// The three components the swarm tracks for a candidate: the minimized
/// objective plus its reliability and sharpness parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitnessValue {
    pub objective: f64,
    pub aace: f64,
    pub sharpness: f64,
}

/// Global-best snapshot after one iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryPoint {
    pub iteration: usize,
    pub objective: f64,
    pub aace: f64,
    pub sharpness: f64,
}

/// One swarm member.
#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: DVector<f64>,
    pub velocity: DVector<f64>,
    pub best_position: DVector<f64>,
    pub best_value: f64,
}

/// Swarm state after initialization or a finished run.
#[derive(Debug, Clone, PartialEq)]
pub struct Swarm {
    pub particles: Vec<Particle>,
    pub global_best: DVector<f64>,
    pub global_best_value: f64,
    /// One entry per completed iteration, starting with the initial swarm
    /// (iteration 0). Objectives never increase along this list.
    pub history: Vec<HistoryPoint>,
}

impl Swarm {
    /// History as CSV with header `iteration,objective,aace,sharpness`.
    pub fn history_csv(&self) -> String {
        let mut out = String::from("iteration,objective,aace,sharpness\n");
        for h in &self.history {
            out.push_str(&format!(
                "{},{},{},{}\n",
                h.iteration, h.objective, h.aace, h.sharpness
            ));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Flatten / reshape
// ---------------------------------------------------------------------------

/// Flattens output weights row-major into a swarm position.
pub fn flatten_beta(beta: &DMatrix<f64>) -> DVector<f64> {
    let mut v = Vec::with_capacity(beta.nrows() * beta.ncols());
    for i in 0..beta.nrows() {
        for j in 0..beta.ncols() {
            v.push(beta[(i, j)]);
        }
    }
    DVector::from_vec(v)
}

/// Inverse of [`flatten_beta`].
pub fn reshape_beta(position: &DVector<f64>, rows: usize, cols: usize) -> Result<DMatrix<f64>> {
    if position.len() != rows * cols {
        return Err(Error::DimensionMismatch {
            expected: format!("{} entries for a {rows}x{cols} matrix", rows * cols),
            actual: format!("{} entries", position.len()),
        });
    }
    Ok(DMatrix::from_row_slice(rows, cols, position.as_slice()))
}

// ---------------------------------------------------------------------------
// Update rules
// ---------------------------------------------------------------------------

fn clamp(v: f64, limit: f64) -> f64 {
    v.clamp(-limit, limit)
}

/// New velocity for one particle given shared random factors `r1`, `r2`:
/// `w*v + c1*r1*(best - x) + c2*r2*(g_best - x)`, clamped componentwise to
/// `[-v_max, v_max]`.
pub fn update_velocity(
    p: &Particle,
    g_best: &DVector<f64>,
    cfg: &SwarmConfig,
    r1: f64,
    r2: f64,
) -> Result<DVector<f64>> {
    if g_best.len() != p.position.len() || p.velocity.len() != p.position.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} velocity and best entries", p.position.len()),
            actual: format!("{} / {}", p.velocity.len(), g_best.len()),
        });
    }
    Ok(DVector::from_fn(p.position.len(), |d, _| {
        let v = cfg.inertia * p.velocity[d]
            + cfg.cognitive * r1 * (p.best_position[d] - p.position[d])
            + cfg.social * r2 * (g_best[d] - p.position[d]);
        clamp(v, cfg.v_max)
    }))
}

/// New position: `x + step_phi * v`. Positions are not clamped.
pub fn update_position(p: &Particle, cfg: &SwarmConfig) -> DVector<f64> {
    &p.position + cfg.step_phi * &p.velocity
}

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

fn population_stddev(v: &DVector<f64>) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt()
}

fn init_swarm_with_rng(
    initial: &DVector<f64>,
    cfg: &SwarmConfig,
    rng: &mut ChaCha8Rng,
    eval: &mut dyn FnMut(&DVector<f64>) -> FitnessValue,
) -> Swarm {
    let dim = initial.len();
    let spread = cfg
        .init_spread
        .unwrap_or_else(|| 0.5 * population_stddev(initial));
    let vel_dist = Uniform::new(-cfg.v_max, cfg.v_max);

    let mut particles = Vec::with_capacity(cfg.particle_count);
    let mut global_best_idx = 0usize;
    let mut global_best_fit = FitnessValue {
        objective: f64::INFINITY,
        aace: f64::INFINITY,
        sharpness: f64::INFINITY,
    };

    for i in 0..cfg.particle_count {
        let position = if i == 0 || spread <= 0.0 {
            initial.clone()
        } else {
            let dist = Uniform::new(-spread, spread);
            DVector::from_iterator(dim, (0..dim).map(|d| initial[d] + rng.sample(dist)))
        };
        let velocity = DVector::from_iterator(dim, (0..dim).map(|_| rng.sample(vel_dist)));
        let fit = eval(&position);
        if fit.objective < global_best_fit.objective {
            global_best_fit = fit;
            global_best_idx = i;
        }
        particles.push(Particle {
            best_position: position.clone(),
            best_value: fit.objective,
            position,
            velocity,
        });
    }

    let global_best = particles[global_best_idx].position.clone();
    Swarm {
        particles,
        global_best,
        global_best_value: global_best_fit.objective,
        history: vec![HistoryPoint {
            iteration: 0,
            objective: global_best_fit.objective,
            aace: global_best_fit.aace,
            sharpness: global_best_fit.sharpness,
        }],
    }
}

/// Builds the initial swarm around a seed position.
///
/// Particle 0 sits exactly on the seed; the others add a uniform
/// perturbation per dimension. Velocities start uniform in
/// `[-v_max, v_max]`. Personal and global bests come from the initial
/// fitness evaluations (ties keep the first particle found).
pub fn init_swarm(
    initial: &DVector<f64>,
    cfg: &SwarmConfig,
    mut eval: impl FnMut(&DVector<f64>) -> FitnessValue,
) -> Result<Swarm> {
    cfg.validate()?;
    if initial.is_empty() {
        return Err(Error::invalid("swarm seed", "seed position must be non-empty"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    Ok(init_swarm_with_rng(initial, cfg, &mut rng, &mut eval))
}

/// Runs the full swarm search from a seed position.
///
/// Per iteration every particle moves (velocity blend, clamp, fractional
/// step), is re-scored, and the bests are reduced in particle order. The
/// returned history has one entry per completed iteration, beginning with
/// the initial swarm, and is non-increasing in the objective. Stops early
/// when the improvement between consecutive iterations falls below
/// `early_stop_delta` (if positive).
pub fn optimize(
    initial: &DVector<f64>,
    cfg: &SwarmConfig,
    mut eval: impl FnMut(&DVector<f64>) -> FitnessValue,
) -> Result<Swarm> {
    cfg.validate()?;
    if initial.is_empty() {
        return Err(Error::invalid("swarm seed", "seed position must be non-empty"));
    }
    let dim = initial.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut swarm = init_swarm_with_rng(initial, cfg, &mut rng, &mut eval);
    let mut global_fit = {
        let h = swarm.history[0];
        FitnessValue {
            objective: h.objective,
            aace: h.aace,
            sharpness: h.sharpness,
        }
    };

    let unit = Uniform::new(0.0, 1.0);
    for iteration in 1..=cfg.iterations {
        let previous_best = swarm.global_best_value;

        // Movement pass: the global best is frozen while everyone moves.
        for p in swarm.particles.iter_mut() {
            let velocity = if cfg.per_dimension_draws {
                DVector::from_fn(dim, |d, _| {
                    let r1: f64 = rng.sample(unit);
                    let r2: f64 = rng.sample(unit);
                    let v = cfg.inertia * p.velocity[d]
                        + cfg.cognitive * r1 * (p.best_position[d] - p.position[d])
                        + cfg.social * r2 * (swarm.global_best[d] - p.position[d]);
                    clamp(v, cfg.v_max)
                })
            } else {
                let r1: f64 = rng.sample(unit);
                let r2: f64 = rng.sample(unit);
                update_velocity(p, &swarm.global_best, cfg, r1, r2)?
            };
            p.velocity = velocity;
            p.position = update_position(p, cfg);
        }

        // Scoring pass, then best reduction in fixed particle order.
        let fits: Vec<FitnessValue> = swarm.particles.iter().map(|p| eval(&p.position)).collect();
        for (p, fit) in swarm.particles.iter_mut().zip(&fits) {
            if fit.objective < p.best_value {
                p.best_value = fit.objective;
                p.best_position = p.position.clone();
            }
        }
        for (p, fit) in swarm.particles.iter().zip(&fits) {
            if fit.objective < swarm.global_best_value {
                swarm.global_best_value = fit.objective;
                swarm.global_best = p.position.clone();
                global_fit = *fit;
            }
        }

        swarm.history.push(HistoryPoint {
            iteration,
            objective: global_fit.objective,
            aace: global_fit.aace,
            sharpness: global_fit.sharpness,
        });

        if previous_best - swarm.global_best_value < cfg.early_stop_delta {
            break;
        }
    }

    Ok(swarm)
}

// ---------------------------------------------------------------------------
// Interval fitness
// ---------------------------------------------------------------------------

/// Precomputed state for scoring candidate output weights against a fitness
/// set: the hidden activations do not depend on `beta`, so they are built
/// once per swarm run.
pub struct FitnessContext {
    h: DMatrix<f64>,
    targets: Vec<f64>,
    hidden_count: usize,
    output_dim: usize,
    pi: PiConfig,
    weights: SharpnessWeights,
    objective_weights: ObjectiveWeights,
}

impl FitnessContext {
    pub fn new(
        model: &ElmModel,
        eval_set: &SupervisedSet,
        pi: PiConfig,
        w: &SharpnessWeights,
        ow: &ObjectiveWeights,
    ) -> Result<Self> {
        pi.validate()?;
        w.validate()?;
        ow.validate()?;
        if eval_set.is_empty() {
            return Err(Error::EmptyForecast);
        }
        let scaled = model.scaler.scale_features(eval_set.features())?;
        let h = hidden_matrix(&model.hidden, &scaled, model.config.activation)?;
        Ok(FitnessContext {
            h,
            targets: eval_set.targets().to_vec(),
            hidden_count: model.config.hidden_count,
            output_dim: model.config.output_dim,
            pi,
            weights: w.clone(),
            objective_weights: ow.clone(),
        })
    }

    /// Length a candidate position must have.
    pub fn dimension(&self) -> usize {
        self.hidden_count * self.output_dim
    }

    /// Scores one candidate. Degenerate candidates (non-finite bounds) get
    /// an infinite objective instead of an error so the swarm can simply
    /// avoid them.
    pub fn value(&self, position: &DVector<f64>) -> FitnessValue {
        debug_assert_eq!(position.len(), self.dimension());
        let beta = DMatrix::from_row_slice(
            self.hidden_count,
            self.output_dim,
            position.as_slice(),
        );
        let raw = &self.h * beta;

        let n = self.targets.len();
        let mut scores = Vec::with_capacity(n);
        let mut covered = 0usize;
        for i in 0..n {
            let a = raw[(i, 0)];
            let b = raw[(i, 1)];
            if !(a.is_finite() && b.is_finite()) {
                return FitnessValue {
                    objective: f64::INFINITY,
                    aace: f64::INFINITY,
                    sharpness: f64::INFINITY,
                };
            }
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let t = self.targets[i];
            if lo <= t && t <= hi {
                covered += 1;
            }
            let score = sharpness_point(lo, hi, t, self.pi.alpha, &self.weights)
                .expect("ordered finite bounds");
            scores.push(score);
        }

        let picp = covered as f64 / n as f64;
        let aace_v = aace(picp, self.pi.pinc());
        let normalized = match min_max_normalize(&scores) {
            Ok(v) => v,
            Err(_) => {
                return FitnessValue {
                    objective: f64::INFINITY,
                    aace: f64::INFINITY,
                    sharpness: f64::INFINITY,
                }
            }
        };
        let sharp = normalized.iter().sum::<f64>() / n as f64;
        FitnessValue {
            objective: objective(aace_v, sharp, &self.objective_weights),
            aace: aace_v,
            sharpness: sharp,
        }
    }
}

/// Interval objective of one candidate position: reshape to output weights,
/// predict bounds on the fitness set, and score
/// `gamma * |picp - pinc| + lambda * normalized-sharpness-mean` against the
/// true targets.
pub fn fitness(
    position: &DVector<f64>,
    model: &ElmModel,
    eval_set: &SupervisedSet,
    pi: PiConfig,
    w: &SharpnessWeights,
    ow: &ObjectiveWeights,
) -> Result<f64> {
    let ctx = FitnessContext::new(model, eval_set, pi, w, ow)?;
    if position.len() != ctx.dimension() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} position entries", ctx.dimension()),
            actual: format!("{} position entries", position.len()),
        });
    }
    Ok(ctx.value(position).objective)
}

/// Tunes a trained model's output weights with the swarm.
///
/// The fitness set is the full training set or its last quarter (see
/// [`FitnessSet`]). Returns the tuned model together with the final swarm;
/// because particle 0 starts on the closed-form solution, the tuned
/// objective can never exceed the untuned one.
pub fn run(
    train_set: &SupervisedSet,
    model: &ElmModel,
    cfg: &SwarmConfig,
    pi: PiConfig,
    w: &SharpnessWeights,
    ow: &ObjectiveWeights,
) -> Result<(ElmModel, Swarm)> {
    cfg.validate()?;
    let holdout_storage;
    let eval_set = match cfg.fitness_set {
        FitnessSet::Train => train_set,
        FitnessSet::Holdout => {
            let n = train_set.len();
            if n < 2 {
                return Err(Error::SeriesTooShort { len: n, need: 2 });
            }
            let hold = (n / 4).max(1);
            let (_, holdout) = split(
                train_set,
                &SplitSpec {
                    train_len: n - hold,
                    test_len: hold,
                },
            )?;
            holdout_storage = holdout;
            &holdout_storage
        }
    };

    let ctx = FitnessContext::new(model, eval_set, pi, w, ow)?;
    let initial = flatten_beta(&model.output.beta);
    if initial.len() != ctx.dimension() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} position entries", ctx.dimension()),
            actual: format!("{} position entries", initial.len()),
        });
    }

    let swarm = optimize(&initial, cfg, |p| ctx.value(p))?;
    let beta = reshape_beta(
        &swarm.global_best,
        model.config.hidden_count,
        model.config.output_dim,
    )?;
    let tuned = ElmModel {
        output: OutputWeights { beta },
        ..model.clone()
    };
    Ok((tuned, swarm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elm::{train, Activation, ElmConfig, HiddenLayer, Scaler};
    use crate::series::BandConfig;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn sphere(p: &DVector<f64>) -> FitnessValue {
        let obj = p.iter().map(|x| x * x).sum::<f64>();
        FitnessValue {
            objective: obj,
            aace: 0.0,
            sharpness: 0.0,
        }
    }

    fn small_cfg(seed: u64) -> SwarmConfig {
        SwarmConfig {
            particle_count: 12,
            iterations: 40,
            init_spread: Some(1.0),
            seed,
            ..SwarmConfig::default()
        }
    }

    fn random_set(n: usize, dim: usize, seed: u64) -> SupervisedSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let features = DMatrix::from_fn(n, dim, |_, _| rng.gen_range(50.0..500.0));
        let targets: Vec<f64> = (0..n).map(|_| rng.gen_range(50.0..500.0)).collect();
        let band = BandConfig { rho_percent: 5.0 };
        let (lower, upper): (Vec<f64>, Vec<f64>) = targets.iter().map(|&t| band.band(t)).unzip();
        SupervisedSet::new(features, targets, lower, upper).unwrap()
    }

    /// Model whose single zero-weight hidden unit outputs 0.5 everywhere, so
    /// a position `[2L, 2U]` produces the constant interval `(L, U)`.
    fn constant_interval_model() -> ElmModel {
        let config = ElmConfig {
            input_dim: 1,
            hidden_count: 1,
            output_dim: 2,
            activation: Activation::Sigmoid,
            weight_init_low: -1.0,
            weight_init_high: 1.0,
            seed: 0,
        };
        ElmModel {
            config,
            scaler: Scaler::identity(1),
            hidden: HiddenLayer {
                weights: DMatrix::zeros(1, 1),
                biases: DVector::zeros(1),
            },
            output: OutputWeights {
                beta: DMatrix::from_row_slice(1, 2, &[16.0, 28.0]),
            },
        }
    }

    fn two_point_set() -> SupervisedSet {
        SupervisedSet::new(
            DMatrix::from_row_slice(2, 1, &[1.0, 2.0]),
            vec![10.0, 12.0],
            vec![9.5, 11.4],
            vec![10.5, 12.6],
        )
        .unwrap()
    }

    // --- update rules -------------------------------------------------------

    #[test]
    fn velocity_blend_matches_hand_arithmetic() {
        let p = Particle {
            position: DVector::from_vec(vec![0.0]),
            velocity: DVector::from_vec(vec![1.0]),
            best_position: DVector::from_vec(vec![2.0]),
            best_value: 0.0,
        };
        let g = DVector::from_vec(vec![4.0]);
        // 0.9*1 + 1*0.5*(2-0) + 1*0.5*(4-0) = 3.9, clamped to v_max = 2.
        let cfg = SwarmConfig::default();
        let v = update_velocity(&p, &g, &cfg, 0.5, 0.5).unwrap();
        assert_abs_diff_eq!(v[0], 2.0, epsilon = 1e-15);

        let loose = SwarmConfig {
            v_max: 10.0,
            ..SwarmConfig::default()
        };
        let v = update_velocity(&p, &g, &loose, 0.5, 0.5).unwrap();
        assert_abs_diff_eq!(v[0], 3.9, epsilon = 1e-12);
    }

    #[test]
    fn position_step_applies_the_phi_fraction() {
        let p = Particle {
            position: DVector::from_vec(vec![1.0]),
            velocity: DVector::from_vec(vec![2.0]),
            best_position: DVector::from_vec(vec![1.0]),
            best_value: 0.0,
        };
        let cfg = SwarmConfig::default();
        assert_abs_diff_eq!(update_position(&p, &cfg)[0], 2.0, epsilon = 1e-15);
    }

    #[test]
    fn velocity_rejects_dimension_mismatch() {
        let p = Particle {
            position: DVector::from_vec(vec![0.0, 0.0]),
            velocity: DVector::from_vec(vec![0.0, 0.0]),
            best_position: DVector::from_vec(vec![0.0, 0.0]),
            best_value: 0.0,
        };
        let g = DVector::from_vec(vec![0.0]);
        assert!(update_velocity(&p, &g, &SwarmConfig::default(), 0.5, 0.5).is_err());
    }

    // --- init ----------------------------------------------------------------

    #[test]
    fn particle_zero_is_pinned_to_the_seed_position() {
        let initial = DVector::from_vec(vec![3.0, -1.0, 2.0]);
        let swarm = init_swarm(&initial, &small_cfg(4), sphere).unwrap();
        assert_eq!(swarm.particles[0].position, initial);
        // Others are perturbed.
        assert_ne!(swarm.particles[1].position, initial);
        // Velocities respect the clamp range.
        for p in &swarm.particles {
            assert!(p.velocity.iter().all(|v| v.abs() <= 2.0));
        }
    }

    #[test]
    fn zero_spread_starts_all_particles_on_the_seed() {
        let initial = DVector::from_vec(vec![1.0, 2.0]);
        let cfg = SwarmConfig {
            init_spread: Some(0.0),
            particle_count: 5,
            ..SwarmConfig::default()
        };
        let swarm = init_swarm(&initial, &cfg, sphere).unwrap();
        for p in &swarm.particles {
            assert_eq!(p.position, initial);
        }
        assert_abs_diff_eq!(swarm.global_best_value, 5.0, epsilon = 1e-12);
    }

    #[test]
    fn init_records_iteration_zero_and_the_best_particle() {
        let initial = DVector::from_vec(vec![2.0, 2.0]);
        let swarm = init_swarm(&initial, &small_cfg(9), sphere).unwrap();
        assert_eq!(swarm.history.len(), 1);
        assert_eq!(swarm.history[0].iteration, 0);
        let manual_best = swarm
            .particles
            .iter()
            .map(|p| p.best_value)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(swarm.global_best_value, manual_best);
        // The global best can only improve on the pinned seed particle.
        assert!(swarm.global_best_value <= sphere(&initial).objective);
    }

    // --- optimize -------------------------------------------------------------

    #[test]
    fn sphere_history_is_monotone_and_velocities_stay_clamped() {
        for seed in 0..10u64 {
            let initial = DVector::from_vec(vec![3.0, -2.5]);
            let swarm = optimize(&initial, &small_cfg(seed), sphere).unwrap();
            for pair in swarm.history.windows(2) {
                assert!(pair[1].objective <= pair[0].objective, "seed {seed}");
            }
            for p in &swarm.particles {
                assert!(p.velocity.iter().all(|v| v.abs() <= 2.0 + 1e-15));
            }
            // Recomputing the personal bests reproduces the stored values.
            for p in &swarm.particles {
                assert_eq!(sphere(&p.best_position).objective, p.best_value);
            }
        }
    }

    #[test]
    fn identical_seeds_give_bitwise_identical_swarms() {
        let initial = DVector::from_vec(vec![1.5, -0.5, 2.0]);
        let a = optimize(&initial, &small_cfg(33), sphere).unwrap();
        let b = optimize(&initial, &small_cfg(33), sphere).unwrap();
        assert_eq!(a, b);
        for (x, y) in a.global_best.iter().zip(b.global_best.iter()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        let c = optimize(&initial, &small_cfg(34), sphere).unwrap();
        assert_ne!(a.global_best_value.to_bits(), c.global_best_value.to_bits());
    }

    #[test]
    fn early_stop_cuts_the_run_short() {
        let initial = DVector::from_vec(vec![3.0, 3.0]);
        let cfg = SwarmConfig {
            early_stop_delta: f64::INFINITY.min(1e6),
            ..small_cfg(5)
        };
        let swarm = optimize(&initial, &cfg, sphere).unwrap();
        // Any improvement is below the huge threshold, so exactly one
        // iteration runs after initialization.
        assert_eq!(swarm.history.len(), 2);
    }

    #[test]
    fn zero_delta_never_stops_early() {
        let initial = DVector::from_vec(vec![0.0, 0.0]);
        // Already optimal: improvements are exactly 0 every iteration, which
        // is not "less than 0".
        let cfg = SwarmConfig {
            early_stop_delta: 0.0,
            ..small_cfg(5)
        };
        let swarm = optimize(&initial, &cfg, sphere).unwrap();
        assert_eq!(swarm.history.len(), cfg.iterations + 1);
    }

    #[test]
    fn per_dimension_draws_also_converge_monotonically() {
        let initial = DVector::from_vec(vec![2.0, -3.0]);
        let cfg = SwarmConfig {
            per_dimension_draws: true,
            ..small_cfg(8)
        };
        let swarm = optimize(&initial, &cfg, sphere).unwrap();
        for pair in swarm.history.windows(2) {
            assert!(pair[1].objective <= pair[0].objective);
        }
        assert!(swarm.global_best_value < sphere(&initial).objective);
    }

    #[test]
    fn history_csv_has_the_documented_header() {
        let initial = DVector::from_vec(vec![1.0]);
        let cfg = SwarmConfig {
            iterations: 2,
            particle_count: 3,
            init_spread: Some(0.5),
            ..SwarmConfig::default()
        };
        let swarm = optimize(&initial, &cfg, sphere).unwrap();
        let csv = swarm.history_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("iteration,objective,aace,sharpness"));
        assert_eq!(csv.lines().count(), swarm.history.len() + 1);
        assert!(csv.lines().nth(1).unwrap().starts_with("0,"));
    }

    // --- interval fitness ------------------------------------------------------

    #[test]
    fn constant_interval_fitness_is_computable_by_hand() {
        // Bounds (8, 14) cover both targets: picp 1, aace |1 - 0.9| = 0.1.
        // Equal widths normalize to zero sharpness, so F = gamma * 0.1.
        let model = constant_interval_model();
        let set = two_point_set();
        let pi = PiConfig::new(0.1).unwrap();
        let w = SharpnessWeights::new(6.0, 0.1).unwrap();
        let ow = ObjectiveWeights::new(1.0, 1.0).unwrap();
        let position = DVector::from_vec(vec![16.0, 28.0]);
        let f = fitness(&position, &model, &set, pi, &w, &ow).unwrap();
        assert_abs_diff_eq!(f, 0.1, epsilon = 1e-12);

        // Doubling gamma doubles the reliability part.
        let ow2 = ObjectiveWeights::new(2.0, 1.0).unwrap();
        let f2 = fitness(&position, &model, &set, pi, &w, &ow2).unwrap();
        assert_abs_diff_eq!(f2, 0.2, epsilon = 1e-12);
    }

    #[test]
    fn fitness_rejects_mismatched_positions() {
        let model = constant_interval_model();
        let set = two_point_set();
        let pi = PiConfig::new(0.1).unwrap();
        let w = SharpnessWeights::new(6.0, 0.1).unwrap();
        let ow = ObjectiveWeights::new(1.0, 1.0).unwrap();
        let position = DVector::from_vec(vec![16.0, 28.0, 1.0]);
        assert!(matches!(
            fitness(&position, &model, &set, pi, &w, &ow),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn fitness_scores_against_true_targets_not_band_targets() {
        // Narrow the interval so it misses target 12 but still contains the
        // band center region; coverage must drop to 1/2.
        let model = constant_interval_model();
        let set = two_point_set();
        let pi = PiConfig::new(0.1).unwrap();
        let w = SharpnessWeights::new(6.0, 0.1).unwrap();
        let ow = ObjectiveWeights::new(1.0, 0.0).unwrap();
        // Interval (9, 11): covers 10, misses 12.
        let position = DVector::from_vec(vec![18.0, 22.0]);
        let f = fitness(&position, &model, &set, pi, &w, &ow).unwrap();
        assert_abs_diff_eq!(f, (0.5f64 - 0.9).abs(), epsilon = 1e-12);
    }

    #[test]
    fn run_never_worsens_the_closed_form_objective() {
        let cfg_elm = ElmConfig {
            input_dim: 3,
            hidden_count: 4,
            output_dim: 2,
            activation: Activation::Sigmoid,
            weight_init_low: -1.0,
            weight_init_high: 1.0,
            seed: 11,
        };
        let set = random_set(40, 3, 5);
        let model = train(&set, &cfg_elm).unwrap();
        let pi = PiConfig::new(0.1).unwrap();
        let w = SharpnessWeights::new(6.0, 0.1).unwrap();
        let ow = ObjectiveWeights::new(1.0, 1.0).unwrap();

        let baseline = fitness(&flatten_beta(&model.output.beta), &model, &set, pi, &w, &ow).unwrap();

        let cfg = SwarmConfig {
            particle_count: 10,
            iterations: 15,
            seed: 3,
            ..SwarmConfig::default()
        };
        let (tuned, swarm) = run(&set, &model, &cfg, pi, &w, &ow).unwrap();
        assert!(swarm.global_best_value <= baseline + 1e-15);
        // The tuned model's beta reproduces the winning position.
        let refit = fitness(&flatten_beta(&tuned.output.beta), &model, &set, pi, &w, &ow).unwrap();
        assert_eq!(refit.to_bits(), swarm.global_best_value.to_bits());
        // Hidden layer and scaler are untouched by tuning.
        assert_eq!(tuned.hidden, model.hidden);
        assert_eq!(tuned.scaler, model.scaler);
    }

    #[test]
    fn holdout_mode_scores_on_the_last_quarter() {
        let cfg_elm = ElmConfig {
            input_dim: 2,
            hidden_count: 3,
            output_dim: 2,
            activation: Activation::Sigmoid,
            weight_init_low: -1.0,
            weight_init_high: 1.0,
            seed: 2,
        };
        let set = random_set(20, 2, 9);
        let model = train(&set, &cfg_elm).unwrap();
        let pi = PiConfig::new(0.1).unwrap();
        let w = SharpnessWeights::new(6.0, 0.1).unwrap();
        let ow = ObjectiveWeights::new(1.0, 1.0).unwrap();
        let cfg = SwarmConfig {
            particle_count: 6,
            iterations: 5,
            fitness_set: FitnessSet::Holdout,
            seed: 7,
            ..SwarmConfig::default()
        };
        let (_, swarm) = run(&set, &model, &cfg, pi, &w, &ow).unwrap();

        // The initial objective must match a fitness evaluation restricted
        // to the final 5 samples (20 / 4).
        let (_, holdout) = split(&set, &SplitSpec { train_len: 15, test_len: 5 }).unwrap();
        let expected =
            fitness(&flatten_beta(&model.output.beta), &model, &holdout, pi, &w, &ow).unwrap();
        // Particle 0 is pinned, so history[0] can only be <= the seed value.
        assert!(swarm.history[0].objective <= expected + 1e-15);
    }

    #[test]
    fn flatten_and_reshape_are_inverses() {
        let beta = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let flat = flatten_beta(&beta);
        assert_eq!(flat.as_slice(), &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let back = reshape_beta(&flat, 3, 2).unwrap();
        assert_eq!(back, beta);
        assert!(reshape_beta(&flat, 2, 2).is_err());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = SwarmConfig::default();
        cfg.particle_count = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = SwarmConfig::default();
        cfg.v_max = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = SwarmConfig::default();
        cfg.step_phi = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = SwarmConfig::default();
        cfg.init_spread = Some(-1.0);
        assert!(cfg.validate().is_err());
        let mut cfg = SwarmConfig::default();
        cfg.early_stop_delta = -0.5;
        assert!(cfg.validate().is_err());
    }
}
