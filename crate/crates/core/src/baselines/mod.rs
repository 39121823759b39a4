//! Classical interval baselines: an autoregressive model with AIC order
//! selection and a local-level Kalman filter, both emitting Gaussian
//! one-step-ahead intervals via a shared inverse normal CDF.

pub mod ar;
pub mod kalman;
pub mod normal;

pub use ar::{ar_intervals, fit_ar, ArModel};
pub use kalman::{initial_state, kalman_fit, kalman_step, GridSpec, KalmanState};
pub use normal::{inv_norm_cdf, z_for_alpha};
