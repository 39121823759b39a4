//! Prediction-interval forecasting for short-term hourly series.
//!
//! The crate builds lower/upper volume bounds for the next hour of an hourly
//! count series (e.g. bridge traffic) and scores them for reliability and
//! sharpness. The main pipeline is:
//!
//! 1. [`series`] — load or synthesize an hourly series, window it into
//!    lagged feature rows, and derive percentage-band training targets.
//! 2. [`elm`] — train a random-hidden-layer network whose output weights are
//!    solved in closed form with a Moore-Penrose pseudoinverse ([`linalg`]).
//! 3. [`pso`] — tune those output weights with a particle swarm so the
//!    emitted intervals trade coverage error against normalized sharpness.
//! 4. [`metrics`] — coverage probability, average coverage error, sharpness,
//!    mean interval length, and the combined objective used by the swarm.
//! 5. [`baselines`] — autoregressive and local-level Kalman interval
//!    forecasters for comparison.
//!
//! All randomized steps take explicit `u64` seeds and draw from ChaCha8, so
//! results are reproducible across runs and platforms.

pub mod baselines;
pub mod elm;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod pso;
pub mod series;

pub use error::{Error, Result};
