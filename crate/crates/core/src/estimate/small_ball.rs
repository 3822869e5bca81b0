use serde::{Deserialize, Serialize};

use super::RateFit;
use crate::error::{invalid, HeisError, Result};
use crate::parallel::{map_chunks, DEFAULT_CHUNK};
use crate::process::{first_exit, line_bridge_survival, AreaOnly, Heis, Line, Plane, ProcessKind};
use crate::rng::{substream, Domain};
use crate::stats::{weighted_line_fit, wilson_interval};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallBallConfig {
    pub kind: ProcessKind,
    pub epsilon: f64,
    pub n_paths: u64,
    /// Grid steps on `[0, 1]`.
    pub steps: u64,
    pub seed: u64,
    /// For `BM1` only: replace the grid indicator by the conditional
    /// survival probability of the Brownian bridge between grid points,
    /// which removes the `O(√h)` discrete-monitoring bias. Ignored for the
    /// other kinds (no closed-form crossing law for their balls).
    pub bridge_correction: bool,
}

impl SmallBallConfig {
    /// Defaults: bridge correction on for `BM1`.
    pub fn new(kind: ProcessKind, epsilon: f64, n_paths: u64, steps: u64, seed: u64) -> Self {
        SmallBallConfig {
            kind,
            epsilon,
            n_paths,
            steps,
            seed,
            bridge_correction: kind == ProcessKind::Bm1,
        }
    }
}

/// `P(sup_{s ≤ 1} ‖X_s‖ < ε)` estimate with a 95% Wilson interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallBallEstimate {
    pub kind: ProcessKind,
    pub epsilon: f64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_paths: u64,
    pub steps: u64,
    pub seed: u64,
}

impl SmallBallEstimate {
    /// Binomial standard error of `p_hat`.
    pub fn stderr(&self) -> f64 {
        crate::stats::binomial_se(self.p_hat, self.n_paths)
    }
}

pub fn estimate_small_ball(
    kind: ProcessKind,
    epsilon: f64,
    n_paths: u64,
    steps: u64,
    seed: u64,
) -> Result<SmallBallEstimate> {
    estimate_small_ball_with(&SmallBallConfig::new(kind, epsilon, n_paths, steps, seed))
}

pub fn estimate_small_ball_with(cfg: &SmallBallConfig) -> Result<SmallBallEstimate> {
    if !(cfg.epsilon > 0.0 && cfg.epsilon.is_finite()) {
        return Err(invalid(format!("epsilon must be positive, got {}", cfg.epsilon)));
    }
    let bridge = cfg.bridge_correction && cfg.kind == ProcessKind::Bm1;
    let p_hat = if bridge {
        bridged_line_survival(cfg.epsilon, cfg.n_paths, cfg.steps, cfg.seed)?
    } else {
        survival_probability(
            cfg.kind,
            cfg.epsilon,
            1.0,
            cfg.n_paths,
            cfg.steps,
            cfg.seed,
            Domain::SMALL_BALL,
        )?
    };
    let (ci_low, ci_high) = wilson_interval(p_hat, cfg.n_paths);
    Ok(SmallBallEstimate {
        kind: cfg.kind,
        epsilon: cfg.epsilon,
        p_hat,
        ci_low,
        ci_high,
        n_paths: cfg.n_paths,
        steps: cfg.steps,
        seed: cfg.seed,
    })
}

/// Fraction of `n_paths` grid paths on `[0, horizon]` (with `steps` steps)
/// whose norm stays strictly below `radius` at every grid point.
pub fn survival_probability(
    kind: ProcessKind,
    radius: f64,
    horizon: f64,
    n_paths: u64,
    steps: u64,
    seed: u64,
    domain: Domain,
) -> Result<f64> {
    if n_paths == 0 {
        return Err(invalid("need at least one path"));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(invalid(format!("horizon must be positive, got {horizon}")));
    }
    let sqrt_h = if steps == 0 {
        0.0
    } else {
        (horizon / steps as f64).sqrt()
    };
    let survivors: u64 = map_chunks(n_paths, DEFAULT_CHUNK, |range| {
        range
            .filter(|&i| {
                let mut rng = substream(seed, domain, i);
                let exit = match kind {
                    ProcessKind::Bm1 => first_exit::<Line>(&mut rng, radius, sqrt_h, steps),
                    ProcessKind::Bm2 => first_exit::<Plane>(&mut rng, radius, sqrt_h, steps),
                    ProcessKind::Heis => first_exit::<Heis>(&mut rng, radius, sqrt_h, steps),
                    ProcessKind::Area => first_exit::<AreaOnly>(&mut rng, radius, sqrt_h, steps),
                };
                exit.is_none()
            })
            .count() as u64
    })
    .into_iter()
    .sum();
    Ok(survivors as f64 / n_paths as f64)
}

fn bridged_line_survival(epsilon: f64, n_paths: u64, steps: u64, seed: u64) -> Result<f64> {
    if n_paths == 0 {
        return Err(invalid("need at least one path"));
    }
    if steps == 0 {
        return Ok(1.0);
    }
    let h = 1.0 / steps as f64;
    let total: f64 = map_chunks(n_paths, DEFAULT_CHUNK, |range| {
        range
            .map(|i| line_bridge_survival(&mut substream(seed, Domain::SMALL_BALL, i), epsilon, h, steps))
            .sum::<f64>()
    })
    .into_iter()
    .sum();
    Ok(total / n_paths as f64)
}

/// Weighted regression of `−log p̂` on `1/ε²`. The slope estimates the
/// small-deviation constant `c²`; weights are the inverse binomial
/// variances `n·p̂/(1 − p̂)` of `log p̂`.
pub fn fit_small_ball_rate(estimates: &[SmallBallEstimate]) -> Result<RateFit> {
    if estimates.len() < 3 {
        return Err(invalid(format!("need at least 3 estimates, got {}", estimates.len())));
    }
    if let Some(bad) = estimates.iter().find(|e| !(e.p_hat > 0.0 && e.p_hat < 1.0)) {
        return Err(invalid(format!(
            "p_hat must lie in (0, 1) for a log fit, got {} at epsilon {}",
            bad.p_hat, bad.epsilon
        )));
    }
    if let Some(bad) = estimates.iter().find(|e| !(e.epsilon > 0.0 && e.epsilon.is_finite())) {
        return Err(invalid(format!("epsilon must be positive, got {}", bad.epsilon)));
    }
    let mut eps: Vec<f64> = estimates.iter().map(|e| e.epsilon).collect();
    eps.sort_by(f64::total_cmp);
    eps.dedup();
    if eps.len() == 1 {
        return Err(HeisError::DegenerateDesign("all epsilon values are equal".into()));
    }
    if eps.len() < 3 {
        return Err(invalid(format!(
            "need at least 3 distinct epsilon values, got {}",
            eps.len()
        )));
    }
    let xs: Vec<f64> = estimates.iter().map(|e| 1.0 / (e.epsilon * e.epsilon)).collect();
    let ys: Vec<f64> = estimates.iter().map(|e| -e.p_hat.ln()).collect();
    let ws: Vec<f64> = estimates
        .iter()
        .map(|e| e.n_paths as f64 * e.p_hat / (1.0 - e.p_hat))
        .collect();
    let fit = weighted_line_fit(&xs, &ys, &ws)?;
    Ok(RateFit {
        rate: fit.slope,
        stderr: fit.slope_se,
        intercept: fit.intercept,
        window: (eps[0], eps[eps.len() - 1]),
        n_points: estimates.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(eps: f64, p: f64) -> SmallBallEstimate {
        SmallBallEstimate {
            kind: ProcessKind::Heis,
            epsilon: eps,
            p_hat: p,
            ci_low: p,
            ci_high: p,
            n_paths: 1_000_000,
            steps: 1,
            seed: 0,
        }
    }

    #[test]
    fn noiseless_fit_recovers_rate() {
        let est: Vec<_> = [0.8, 1.0, 1.3, 1.7]
            .iter()
            .map(|&e| synthetic(e, (-3.0 / (e * e)).exp()))
            .collect();
        let fit = fit_small_ball_rate(&est).unwrap();
        assert!((fit.rate - 3.0).abs() < 1e-12);
        assert!(fit.intercept.abs() < 1e-12);
        assert_eq!(fit.window, (0.8, 1.7));
        assert_eq!(fit.n_points, 4);
    }

    #[test]
    fn noiseless_fit_with_prefactor() {
        let est: Vec<_> = [0.8, 1.0, 1.3, 1.7]
            .iter()
            .map(|&e| synthetic(e, (-3.0 / (e * e) + 0.7).exp()))
            .collect();
        let fit = fit_small_ball_rate(&est).unwrap();
        assert!((fit.rate - 3.0).abs() < 1e-12);
        assert!((fit.intercept + 0.7).abs() < 1e-12);
    }

    #[test]
    fn bessel_series_small_ball_data() {
        // Exact disc small-ball law from the eigenfunction expansion
        // P(B*₁ < ε) = Σ_k 2/(j_k J₁(j_k)) · exp(−j_k²/(2ε²)), with the
        // first three J₀ zeros located independently by bisection.
        use crate::spectra::{bessel_j0, bessel_j1};
        let zeros: Vec<f64> = [(2.0, 3.0), (5.0, 6.0), (8.0, 9.0)]
            .iter()
            .map(|&(mut lo, mut hi): &(f64, f64)| {
                let s = bessel_j0(lo).signum();
                for _ in 0..200 {
                    let m = 0.5 * (lo + hi);
                    if bessel_j0(m).signum() == s {
                        lo = m
                    } else {
                        hi = m
                    }
                }
                0.5 * (lo + hi)
            })
            .collect();
        let p = |eps: f64| -> f64 {
            zeros
                .iter()
                .map(|&j| 2.0 / (j * bessel_j1(j)) * (-(j * j) / (2.0 * eps * eps)).exp())
                .sum()
        };
        let est: Vec<_> = [0.35, 0.4, 0.45, 0.5].iter().map(|&e| synthetic(e, p(e))).collect();
        let fit = fit_small_ball_rate(&est).unwrap();
        assert!((fit.rate / 2.891593 - 1.0).abs() < 0.05, "rate {}", fit.rate);
    }

    #[test]
    fn degenerate_and_invalid_designs() {
        let same: Vec<_> = (0..4).map(|_| synthetic(1.0, 0.3)).collect();
        assert!(matches!(
            fit_small_ball_rate(&same),
            Err(HeisError::DegenerateDesign(_))
        ));
        let two = vec![synthetic(1.0, 0.3), synthetic(1.0, 0.3), synthetic(2.0, 0.5)];
        assert!(fit_small_ball_rate(&two).is_err());
        assert!(fit_small_ball_rate(&[synthetic(1.0, 0.3), synthetic(2.0, 0.5)]).is_err());
        let zero = vec![synthetic(1.0, 0.3), synthetic(2.0, 0.5), synthetic(0.5, 0.0)];
        assert!(fit_small_ball_rate(&zero).is_err());
    }

    #[test]
    fn large_ball_contains_everything() {
        let e = estimate_small_ball(ProcessKind::Bm1, 10.0, 2000, 200, 1).unwrap();
        assert_eq!(e.p_hat, 1.0);
        assert_eq!(-100.0 * e.p_hat.ln(), 0.0);
        assert!(e.ci_low <= e.p_hat && e.p_hat <= e.ci_high);
    }

    #[test]
    fn zero_successes_give_one_sided_interval() {
        let e = estimate_small_ball(ProcessKind::Heis, 0.05, 500, 200, 1).unwrap();
        assert_eq!(e.p_hat, 0.0);
        assert_eq!(e.ci_low, 0.0);
        assert!((e.ci_high - (1.0 - 0.05f64.powf(1.0 / 500.0))).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_epsilon() {
        for eps in [0.0, -1.0, f64::NAN] {
            assert!(estimate_small_ball(ProcessKind::Bm2, eps, 10, 10, 1).is_err());
        }
        assert!(estimate_small_ball(ProcessKind::Bm2, 1.0, 0, 10, 1).is_err());
    }

    #[test]
    fn monotone_in_epsilon_for_fixed_seed() {
        for kind in ProcessKind::ALL {
            let ps: Vec<f64> = [0.5, 0.7, 0.9, 1.2]
                .iter()
                .map(|&e| estimate_small_ball(kind, e, 3000, 300, 17).unwrap().p_hat)
                .collect();
            assert!(ps.windows(2).all(|w| w[0] <= w[1]), "{kind}: {ps:?}");
        }
    }

    #[test]
    fn heisenberg_dominated_by_planar_under_coupling() {
        for eps in [0.6, 0.9, 1.2] {
            let heis = estimate_small_ball(ProcessKind::Heis, eps, 3000, 300, 5).unwrap();
            let bm2 = estimate_small_ball(ProcessKind::Bm2, eps, 3000, 300, 5).unwrap();
            assert!(heis.p_hat <= bm2.p_hat);
        }
    }

    #[test]
    fn bridge_correction_lowers_bm1_estimate() {
        let mut cfg = SmallBallConfig::new(ProcessKind::Bm1, 0.5, 20_000, 100, 3);
        let bridged = estimate_small_ball_with(&cfg).unwrap().p_hat;
        cfg.bridge_correction = false;
        let raw = estimate_small_ball_with(&cfg).unwrap().p_hat;
        assert!(bridged < raw);
    }

    #[test]
    fn deterministic_estimates() {
        let a = estimate_small_ball(ProcessKind::Heis, 0.9, 1000, 100, 8).unwrap();
        let b = estimate_small_ball(ProcessKind::Heis, 0.9, 1000, 100, 8).unwrap();
        assert_eq!(a, b);
    }
}
