//! Exit-rate calibration against processes with known Dirichlet eigenvalues.

use serde::{Deserialize, Serialize};

use super::exit::{estimate_exit_rate, ExitRateConfig, ExitRateResult};
use crate::error::{invalid, Result};
use crate::process::ProcessKind;
use crate::spectra::lambda1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub kind: ProcessKind,
    /// Exact exit rate of the unit ball.
    pub exact: f64,
    pub base: ExitRateResult,
    /// Same experiment at twice the step density.
    pub refined: ExitRateResult,
    /// `|rate − exact| / exact` at the base resolution.
    pub rel_error: f64,
    /// `|refined − base| / base`.
    pub refinement_shift: f64,
}

/// Exit rate of the unit ball for the one- and two-dimensional Brownian
/// motions; `None` for the other processes.
pub fn exact_exit_rate(kind: ProcessKind) -> Option<f64> {
    match kind {
        ProcessKind::Bm1 => lambda1(1).ok(),
        ProcessKind::Bm2 => lambda1(2).ok(),
        ProcessKind::Heis | ProcessKind::Area => None,
    }
}

/// Runs `cfg` and the same configuration at `2·steps_per_unit`.
pub fn calibrate(cfg: &ExitRateConfig) -> Result<Calibration> {
    let exact = exact_exit_rate(cfg.kind)
        .ok_or_else(|| invalid(format!("no exact exit rate for {}; use BM1 or BM2", cfg.kind)))?;
    let base = estimate_exit_rate(cfg)?;
    let refined = estimate_exit_rate(&ExitRateConfig {
        steps_per_unit: cfg.steps_per_unit * 2,
        ..*cfg
    })?;
    let rel_error = (base.fit.rate - exact).abs() / exact;
    let refinement_shift = (refined.fit.rate - base.fit.rate).abs() / base.fit.rate;
    Ok(Calibration {
        kind: cfg.kind,
        exact,
        base,
        refined,
        rel_error,
        refinement_shift,
    })
}
