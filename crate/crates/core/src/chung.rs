//! Law-of-iterated-logarithm diagnostics.
//!
//! With `φ(t) = √(log log t / t)`, the liminf of `φ(t)·g*_t` is an almost
//! sure constant bracketed by [`crate::spectra::chung_bounds`], and the
//! liminf of `φ(t)²·A*_t` is `π/4`. No finite simulation reaches a liminf;
//! these traces only show where the running minimum of the statistic sits
//! along a geometric grid of checkpoints.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, HeisError, Result};
use crate::fmt::{fmt_sig, ROUND_TRIP_DIGITS};
use crate::parallel::map_indices;
use crate::process::{Heis, Walker};
use crate::rng::{substream, Domain};
use crate::sim::SimConfig;
use crate::stats::clopper_pearson;

/// `√(log log t / t)`, defined for `t > e`.
pub fn phi(t: f64) -> Result<f64> {
    if !(t > std::f64::consts::E && t.is_finite()) {
        return Err(invalid(format!("phi(t) needs t > e, got {t}")));
    }
    Ok((t.ln().ln() / t).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LilMode {
    /// `φ(t)·g*_t`.
    Group,
    /// `φ(t)²·A*_t`.
    Area,
}

impl fmt::Display for LilMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LilMode::Group => "group",
            LilMode::Area => "area",
        })
    }
}

impl FromStr for LilMode {
    type Err = HeisError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "group" => Ok(LilMode::Group),
            "area" => Ok(LilMode::Area),
            other => Err(invalid(format!("unknown LIL mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LILTrace {
    pub checkpoints: Vec<f64>,
    pub phi_values: Vec<f64>,
    pub stat_values: Vec<f64>,
    pub running_min: Vec<f64>,
    pub mode: LilMode,
}

impl LILTrace {
    pub fn terminal_min(&self) -> f64 {
        *self.running_min.last().expect("traces have at least one checkpoint")
    }

    /// CSV with header `t,phi,stat,running_min`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,phi,stat,running_min")?;
        for k in 0..self.checkpoints.len() {
            writeln!(
                out,
                "{},{},{},{}",
                fmt_sig(self.checkpoints[k], ROUND_TRIP_DIGITS),
                fmt_sig(self.phi_values[k], ROUND_TRIP_DIGITS),
                fmt_sig(self.stat_values[k], ROUND_TRIP_DIGITS),
                fmt_sig(self.running_min[k], ROUND_TRIP_DIGITS),
            )?;
        }
        Ok(())
    }

    fn from_stats(checkpoints: &[f64], sups: &[f64], mode: LilMode) -> LILTrace {
        let phi_values: Vec<f64> = checkpoints
            .iter()
            .map(|&t| phi(t).expect("validated checkpoints"))
            .collect();
        let stat_values: Vec<f64> = phi_values
            .iter()
            .zip(sups)
            .map(|(p, s)| match mode {
                LilMode::Group => p * s,
                LilMode::Area => p * p * s,
            })
            .collect();
        let running_min = stat_values
            .iter()
            .scan(f64::INFINITY, |m, &s| {
                *m = m.min(s);
                Some(*m)
            })
            .collect();
        LILTrace {
            checkpoints: checkpoints.to_vec(),
            phi_values,
            stat_values,
            running_min,
            mode,
        }
    }
}

/// Geometric checkpoints `t_min·ratio^j` up to and including `t_max` (the
/// cap is appended if the grid overshoots it).
pub fn geometric_checkpoints(t_min: f64, t_max: f64, ratio: f64) -> Result<Vec<f64>> {
    if !(t_min > std::f64::consts::E && t_max >= t_min && ratio > 1.0 && t_max.is_finite()) {
        return Err(invalid(format!(
            "checkpoint grid needs e < t_min <= t_max and ratio > 1, got ({t_min}, {t_max}, {ratio})"
        )));
    }
    let mut out = Vec::new();
    let mut t = t_min;
    while t <= t_max * (1.0 + 1e-12) {
        out.push(t.min(t_max));
        t *= ratio;
    }
    if *out.last().expect("t_min is included") < t_max {
        out.push(t_max);
    }
    Ok(out)
}

/// Default grid: `10²·1.2^j` capped at `10⁶`.
pub fn default_checkpoints() -> Vec<f64> {
    geometric_checkpoints(1e2, 1e6, 1.2).expect("valid default grid")
}

fn validate_checkpoints(cfg: &SimConfig, checkpoints: &[f64]) -> Result<()> {
    cfg.validate()?;
    if checkpoints.is_empty() {
        return Err(invalid("need at least one checkpoint"));
    }
    if checkpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("checkpoints must be strictly increasing"));
    }
    if checkpoints[0].is_nan() || checkpoints[0] <= std::f64::consts::E {
        return Err(invalid(format!("checkpoints must exceed e, got {}", checkpoints[0])));
    }
    let last = checkpoints[checkpoints.len() - 1];
    if last > cfg.horizon {
        return Err(invalid(format!(
            "checkpoint {last} lies beyond the horizon {}",
            cfg.horizon
        )));
    }
    if cfg.steps == 0 {
        return Err(invalid("LIL traces need at least one step"));
    }
    Ok(())
}

/// Running maxima `(g*_t, A*_t)` at each checkpoint, from one long path at
/// full step resolution. A checkpoint reads the last grid point not after it.
fn running_maxima(cfg: &SimConfig, checkpoints: &[f64]) -> Vec<(f64, f64)> {
    let h = cfg.step_size();
    let sqrt_h = h.sqrt();
    let mut rng = substream(cfg.seed, Domain::LIL, 0);
    let mut w = Heis::default();
    let (mut g4_max, mut a_max) = (0.0f64, 0.0f64);
    let mut k = 0u64;
    let mut out = Vec::with_capacity(checkpoints.len());
    for &t in checkpoints {
        let target = ((t / h) * (1.0 + 1e-12)).floor() as u64;
        let target = target.min(cfg.steps);
        while k < target {
            w.step(&mut rng, sqrt_h);
            g4_max = g4_max.max(w.g.norm_pow4());
            a_max = a_max.max(w.g.z.abs());
            k += 1;
        }
        out.push((g4_max.sqrt().sqrt(), a_max));
    }
    out
}

pub fn lil_trace(cfg: &SimConfig, checkpoints: &[f64], mode: LilMode) -> Result<LILTrace> {
    validate_checkpoints(cfg, checkpoints)?;
    let maxima = running_maxima(cfg, checkpoints);
    let sups: Vec<f64> = maxima
        .iter()
        .map(|&(g, a)| match mode {
            LilMode::Group => g,
            LilMode::Area => a,
        })
        .collect();
    Ok(LILTrace::from_stats(checkpoints, &sups, mode))
}

/// Group- and area-mode traces of the same path in one pass.
pub fn lil_trace_pair(cfg: &SimConfig, checkpoints: &[f64]) -> Result<(LILTrace, LILTrace)> {
    validate_checkpoints(cfg, checkpoints)?;
    let maxima = running_maxima(cfg, checkpoints);
    let g: Vec<f64> = maxima.iter().map(|m| m.0).collect();
    let a: Vec<f64> = maxima.iter().map(|m| m.1).collect();
    Ok((
        LILTrace::from_stats(checkpoints, &g, LilMode::Group),
        LILTrace::from_stats(checkpoints, &a, LilMode::Area),
    ))
}

/// Acceptance band for the group-mode terminal minimum.
pub const GROUP_BAND: (f64, f64) = (0.85, 3.11);
/// `[π/8, π/2]`, the band for the area-mode terminal minimum.
pub const AREA_BAND: (f64, f64) = (std::f64::consts::FRAC_PI_8, std::f64::consts::FRAC_PI_2);

/// Group- and area-mode traces of one long path per seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LilStudy {
    pub seeds: Vec<u64>,
    pub group: Vec<LILTrace>,
    pub area: Vec<LILTrace>,
}

/// Traces for seeds `base_seed, base_seed + 1, …` over `[0, horizon]` at
/// `steps_per_unit` steps per unit time. Seeds run in parallel.
pub fn lil_study(
    base_seed: u64,
    n_seeds: u64,
    horizon: f64,
    steps_per_unit: u64,
    checkpoints: &[f64],
) -> Result<LilStudy> {
    if n_seeds == 0 {
        return Err(invalid("need at least one seed"));
    }
    if steps_per_unit == 0 {
        return Err(invalid("steps_per_unit must be at least 1"));
    }
    let steps = (horizon * steps_per_unit as f64).round() as u64;
    let cfg_for = |i: u64| SimConfig::new(base_seed.wrapping_add(i), horizon, steps);
    validate_checkpoints(&cfg_for(0), checkpoints)?;
    let pairs = map_indices(n_seeds, |i| {
        lil_trace_pair(&cfg_for(i), checkpoints).expect("validated grid")
    });
    let seeds = (0..n_seeds).map(|i| base_seed.wrapping_add(i)).collect();
    let (group, area) = pairs.into_iter().unzip();
    Ok(LilStudy { seeds, group, area })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandSummary {
    pub mode: LilMode,
    pub band: (f64, f64),
    /// Fraction of traces whose terminal running minimum lies in the band.
    pub fraction: f64,
    /// Exact 95% binomial interval for `fraction`.
    pub ci: (f64, f64),
    pub n_seeds: usize,
    pub inside: usize,
}

pub fn band_check(traces: &[LILTrace], band: (f64, f64)) -> Result<BandSummary> {
    let first = traces
        .first()
        .ok_or_else(|| invalid("band check needs at least one trace"))?;
    if traces.iter().any(|t| t.mode != first.mode) {
        return Err(invalid("band check needs traces of a single mode"));
    }
    let (lo, hi) = band;
    let inside = traces
        .iter()
        .filter(|t| {
            let m = t.terminal_min();
            lo <= m && m <= hi
        })
        .count();
    let n = traces.len();
    Ok(BandSummary {
        mode: first.mode,
        band,
        fraction: inside as f64 / n as f64,
        ci: clopper_pearson(inside as u64, n as u64),
        n_seeds: n,
        inside,
    })
}
