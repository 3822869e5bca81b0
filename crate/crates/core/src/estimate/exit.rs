//! Exponential tail rate of the first exit time from the unit ball.
//!
//! For a diffusion killed on leaving a bounded domain, `P(τ > t)` decays
//! like `C·exp(−λt)` with `λ` the principal Dirichlet eigenvalue of the
//! generator. For the Heisenberg process, scaling turns the small-ball
//! probability `P(g*₁ < ε)` into `P(τ > ε⁻²)`, so `λ` is also the
//! small-deviation constant `c²` whenever the tail is exponential.
//!
//! Exits are detected on the grid, which delays them by `O(√h)` and biases
//! `λ` slightly low; callers compare two step densities to bound this.

use serde::{Deserialize, Serialize};

use super::RateFit;
use crate::error::{invalid, HeisError, Result};
use crate::parallel::{map_chunks, DEFAULT_CHUNK};
use crate::process::{first_exit, AreaOnly, Heis, Line, Plane, ProcessKind};
use crate::rng::{substream, Domain};
use crate::stats::weighted_line_fit;

/// Survival band `[lo, hi]` defining the fit window.
pub const DEFAULT_SURVIVAL_WINDOW: (f64, f64) = (0.02, 0.3);
/// Minimum number of uncensored exits inside the fit window.
pub const MIN_WINDOW_EXITS: u64 = 100;
const FIT_POINTS: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExitRateConfig {
    pub kind: ProcessKind,
    /// Censoring time.
    pub t_max: f64,
    pub n_paths: u64,
    pub steps_per_unit: u64,
    pub seed: u64,
    /// Survival band `(lo, hi)` for the log-linear fit.
    pub window: (f64, f64),
}

impl ExitRateConfig {
    pub fn new(kind: ProcessKind, t_max: f64, n_paths: u64, steps_per_unit: u64, seed: u64) -> Self {
        ExitRateConfig {
            kind,
            t_max,
            n_paths,
            steps_per_unit,
            seed,
            window: DEFAULT_SURVIVAL_WINDOW,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(invalid(format!("t_max must be positive, got {}", self.t_max)));
        }
        if self.n_paths == 0 {
            return Err(invalid("need at least one path"));
        }
        if self.steps_per_unit == 0 {
            return Err(invalid("steps_per_unit must be at least 1"));
        }
        check_window(self.window)
    }

    pub fn max_steps(&self) -> u64 {
        (self.t_max * self.steps_per_unit as f64).round() as u64
    }
}

fn check_window((lo, hi): (f64, f64)) -> Result<()> {
    if !(0.0 < lo && lo < hi && hi < 1.0) {
        return Err(invalid(format!(
            "survival window must satisfy 0 < lo < hi < 1, got ({lo}, {hi})"
        )));
    }
    Ok(())
}

/// Empirical survival function of the first exit time on the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub times: Vec<f64>,
    /// `survival[k]` = fraction of paths still inside after grid time `times[k]`.
    pub survival: Vec<f64>,
    pub n: u64,
    pub censored_at: f64,
}

impl SurvivalCurve {
    /// Survival at the last grid time not after `t` (1 before the first step).
    pub fn at(&self, t: f64) -> f64 {
        match self.times.partition_point(|&s| s <= t) {
            0 => 1.0,
            k => self.survival[k - 1],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExitRateResult {
    pub kind: ProcessKind,
    pub seed: u64,
    pub curve: SurvivalCurve,
    pub fit: RateFit,
    /// Uncensored exits over the whole horizon.
    pub exits: u64,
    /// Uncensored exits inside the fit window.
    pub window_exits: u64,
}

pub fn estimate_exit_rate(cfg: &ExitRateConfig) -> Result<ExitRateResult> {
    cfg.validate()?;
    let max_steps = cfg.max_steps();
    if max_steps == 0 {
        return Err(invalid("t_max is shorter than one grid step"));
    }
    if max_steps > u32::MAX as u64 {
        return Err(invalid("t_max · steps_per_unit exceeds the supported grid length"));
    }
    let sqrt_h = (1.0 / cfg.steps_per_unit as f64).sqrt();
    let (kind, seed) = (cfg.kind, cfg.seed);
    let exit_steps: Vec<Option<u64>> = map_chunks(cfg.n_paths, DEFAULT_CHUNK, |range| {
        range
            .map(|i| {
                let mut rng = substream(seed, Domain::EXIT_TIME, i);
                match kind {
                    ProcessKind::Bm1 => first_exit::<Line>(&mut rng, 1.0, sqrt_h, max_steps),
                    ProcessKind::Bm2 => first_exit::<Plane>(&mut rng, 1.0, sqrt_h, max_steps),
                    ProcessKind::Heis => first_exit::<Heis>(&mut rng, 1.0, sqrt_h, max_steps),
                    ProcessKind::Area => first_exit::<AreaOnly>(&mut rng, 1.0, sqrt_h, max_steps),
                }
            })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect();
    let (curve, fit, exits, window_exits) =
        fit_exit_times(&exit_steps, 1.0 / cfg.steps_per_unit as f64, max_steps, cfg.window)?;
    Ok(ExitRateResult {
        kind,
        seed,
        curve,
        fit,
        exits,
        window_exits,
    })
}

/// Fit the exponential tail of grid exit times.
///
/// `exit_steps[i]` is the grid index (≥ 1) at which path `i` exited, or
/// `None` if it was censored at `max_steps`. The window runs from the first
/// grid time with survival ≤ `window.1` to the last one with survival ≥
/// `window.0` (or the censoring time). Over it, `log S(t)` is regressed on
/// `t` at up to 50 evenly spaced grid times with weights
/// `n·S/(1 − S)`; the rate is minus the slope. The reported standard error
/// is the counting error `rate/√k` of the `k` exits inside the window,
/// since the cumulative survival points are strongly correlated and the
/// regression's own standard error would understate the noise.
///
/// Returns the curve, the fit, the total exit count and the window exit
/// count.
pub fn fit_exit_times(
    exit_steps: &[Option<u64>],
    h: f64,
    max_steps: u64,
    window: (f64, f64),
) -> Result<(SurvivalCurve, RateFit, u64, u64)> {
    check_window(window)?;
    if exit_steps.is_empty() {
        return Err(invalid("no exit times to fit"));
    }
    let n = exit_steps.len() as u64;
    let len = max_steps as usize + 1;
    let mut hist = vec![0u64; len];
    let mut exits = 0u64;
    for e in exit_steps.iter().flatten() {
        if *e == 0 || *e > max_steps {
            return Err(invalid(format!("exit step {e} outside 1..={max_steps}")));
        }
        hist[*e as usize] += 1;
        exits += 1;
    }
    // alive[k] = number of paths with exit step > k.
    let mut alive = vec![0u64; len];
    let mut remaining = n;
    for k in 0..len {
        remaining -= hist[k];
        alive[k] = remaining;
    }
    let nf = n as f64;
    let survival: Vec<f64> = alive.iter().map(|&a| a as f64 / nf).collect();
    let times: Vec<f64> = (0..len).map(|k| k as f64 * h).collect();
    let curve = SurvivalCurve {
        times,
        survival,
        n,
        censored_at: max_steps as f64 * h,
    };

    let (lo, hi) = window;
    let s_end = curve.survival[len - 1];
    if s_end > hi {
        return Err(HeisError::HorizonTooShort {
            t_max: curve.censored_at,
            survival: s_end,
            needed: hi,
        });
    }
    let k_lo = curve
        .survival
        .iter()
        .position(|&s| s <= hi)
        .expect("survival reaches the band");
    let k_hi = match curve.survival.iter().position(|&s| s < lo) {
        Some(k) => k.saturating_sub(1).max(k_lo),
        None => len - 1,
    };
    let window_exits = alive[k_lo] - alive[k_hi];
    if window_exits < MIN_WINDOW_EXITS {
        return Err(HeisError::InsufficientTailData {
            exits: window_exits,
            required: MIN_WINDOW_EXITS,
        });
    }

    let span = k_hi - k_lo;
    let points = FIT_POINTS.min(span + 1);
    let mut ks: Vec<usize> = (0..points)
        .map(|i| k_lo + ((i as f64 / (points - 1).max(1) as f64) * span as f64).round() as usize)
        .collect();
    ks.dedup();
    let xs: Vec<f64> = ks.iter().map(|&k| curve.times[k]).collect();
    let ys: Vec<f64> = ks.iter().map(|&k| curve.survival[k].ln()).collect();
    let ws: Vec<f64> = ks
        .iter()
        .map(|&k| {
            let s = curve.survival[k];
            nf * s / (1.0 - s)
        })
        .collect();
    let line = weighted_line_fit(&xs, &ys, &ws)?;
    let rate = -line.slope;
    let fit = RateFit {
        rate,
        stderr: rate.abs() / (window_exits as f64).sqrt(),
        intercept: line.intercept,
        window: (curve.times[k_lo], curve.times[k_hi]),
        n_points: ks.len(),
    };
    Ok((curve, fit, exits, window_exits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn synthetic_exits(rate: f64, n: u64, h: f64, max_steps: u64, seed: u64) -> Vec<Option<u64>> {
        let mut rng = substream(seed, Domain::SIMULATE, 0);
        (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                let t = -(1.0 - u).ln() / rate;
                let k = (t / h).ceil().max(1.0) as u64;
                (k <= max_steps).then_some(k)
            })
            .collect()
    }

    #[test]
    fn recovers_synthetic_exponential_rate() {
        for (rate, seed) in [(1.2337, 1), (2.8916, 2), (3.5, 3)] {
            let h = 1e-3;
            let max_steps = (5.0 / rate / h) as u64;
            let data = synthetic_exits(rate, 50_000, h, max_steps, seed);
            let (curve, fit, exits, window_exits) =
                fit_exit_times(&data, h, max_steps, DEFAULT_SURVIVAL_WINDOW).unwrap();
            assert!((fit.rate - rate).abs() <= 2.0 * fit.stderr, "rate {rate}: {fit:?}");
            assert!(exits <= 50_000 && window_exits >= MIN_WINDOW_EXITS);
            assert!(curve.survival.windows(2).all(|w| w[1] <= w[0]));
            assert!(curve.survival[0] <= 1.0);
            assert!(fit.window.0 < fit.window.1);
            assert!(curve.at(fit.window.0) <= 0.3 && curve.at(fit.window.1) >= 0.02);
        }
    }

    #[test]
    fn short_horizon_is_an_error() {
        let h = 1e-3;
        let data = synthetic_exits(1.0, 10_000, h, 500, 4);
        let err = fit_exit_times(&data, h, 500, DEFAULT_SURVIVAL_WINDOW).unwrap_err();
        assert!(matches!(err, HeisError::HorizonTooShort { .. }));
    }

    #[test]
    fn few_paths_is_insufficient_tail_data() {
        let h = 1e-3;
        let data = synthetic_exits(2.0, 300, h, 4000, 5);
        let err = fit_exit_times(&data, h, 4000, DEFAULT_SURVIVAL_WINDOW).unwrap_err();
        assert!(matches!(err, HeisError::InsufficientTailData { .. }), "{err:?}");
        assert!(err.to_string().contains("insufficient tail data"));
    }

    #[test]
    fn bad_inputs_rejected() {
        assert!(fit_exit_times(&[], 1e-3, 10, DEFAULT_SURVIVAL_WINDOW).is_err());
        assert!(fit_exit_times(&[Some(0)], 1e-3, 10, DEFAULT_SURVIVAL_WINDOW).is_err());
        assert!(fit_exit_times(&[Some(11)], 1e-3, 10, DEFAULT_SURVIVAL_WINDOW).is_err());
        assert!(fit_exit_times(&[Some(1)], 1e-3, 10, (0.3, 0.02)).is_err());
        let mut cfg = ExitRateConfig::new(ProcessKind::Bm1, 0.0, 10, 10, 1);
        assert!(estimate_exit_rate(&cfg).is_err());
        cfg.t_max = 1.0;
        cfg.steps_per_unit = 0;
        assert!(estimate_exit_rate(&cfg).is_err());
    }

    #[test]
    fn survival_lookup() {
        let curve = SurvivalCurve {
            times: vec![0.0, 0.5, 1.0],
            survival: vec![1.0, 0.6, 0.2],
            n: 10,
            censored_at: 1.0,
        };
        assert_eq!(curve.at(-1.0), 1.0);
        assert_eq!(curve.at(0.7), 0.6);
        assert_eq!(curve.at(5.0), 0.2);
    }

    #[test]
    fn bm1_coarse_rate_is_near_eigenvalue() {
        // Coarse grid: only a smoke test of the full pipeline.
        let cfg = ExitRateConfig::new(ProcessKind::Bm1, 4.0, 20_000, 400, 11);
        let r = estimate_exit_rate(&cfg).unwrap();
        let target = std::f64::consts::PI.powi(2) / 8.0;
        assert!((r.fit.rate / target - 1.0).abs() < 0.12, "{:?}", r.fit);
        assert_eq!(r.curve.n, 20_000);
    }
}
