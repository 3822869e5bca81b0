//! Monte Carlo estimators.
//!
//! All estimators are deterministic functions of their configuration and
//! seed: path `i` always draws from substream `(seed, domain, i)` and
//! aggregation happens in a fixed order.

mod calibrate;
mod exit;
mod identities;
mod ks;
mod small_ball;

pub use calibrate::{calibrate, exact_exit_rate, Calibration};
pub use exit::{
    estimate_exit_rate, fit_exit_times, ExitRateConfig, ExitRateResult, SurvivalCurve, DEFAULT_SURVIVAL_WINDOW,
    MIN_WINDOW_EXITS,
};
pub use identities::{
    fresh_norm_samples, increment_samples, scaling_identity_check, timechange_samples, IncrementSample, ScalingCheck,
    TimeChangeSamples,
};
pub use ks::{kolmogorov_survival, ks_two_sample, KSResult};
pub use small_ball::{
    estimate_small_ball, estimate_small_ball_with, fit_small_ball_rate, survival_probability, SmallBallConfig,
    SmallBallEstimate,
};

use serde::{Deserialize, Serialize};

/// An exponential decay rate fitted by weighted least squares.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub rate: f64,
    pub stderr: f64,
    pub intercept: f64,
    /// Fit window: `(ε_min, ε_max)` for small-ball fits, `(t_lo, t_hi)`
    /// for exit-time fits.
    pub window: (f64, f64),
    pub n_points: usize,
}
