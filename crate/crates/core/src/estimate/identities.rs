//! Monte Carlo checks of distributional identities of the process:
//! scaling, the time-changed representation of the Lévy area, and the
//! stationarity of left increments.

use serde::{Deserialize, Serialize};

use super::small_ball::survival_probability;
use crate::error::{invalid, Result};
use crate::group::{GroupElement, Side};
use crate::parallel::map_indices;
use crate::process::{Heis, Plane, ProcessKind, Walker};
use crate::rng::{normal, substream, Domain};
use crate::sim::{simulate_stats_indexed, SimConfig};
use crate::stats::{binomial_se, wilson_interval};

/// Two estimates of the same probability: `P(g*₁ < ε)` directly, and
/// `P(τ > ε⁻²)` for the exit time `τ` of the unit ball.
///
/// Both arms use `steps` grid steps over their horizon, so the discrete
/// identity holds exactly in law and only Monte Carlo noise separates them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingCheck {
    pub epsilon: f64,
    pub n_paths: u64,
    pub steps: u64,
    pub direct_p: f64,
    pub direct_ci: (f64, f64),
    pub exit_p: f64,
    pub exit_ci: (f64, f64),
    /// `|direct − exit| / √(se₁² + se₂²)`; 0 when both arms agree exactly.
    pub z: f64,
}

pub fn scaling_identity_check(epsilon: f64, n_paths: u64, steps: u64, seed: u64) -> Result<ScalingCheck> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    let direct_p = survival_probability(
        ProcessKind::Heis,
        epsilon,
        1.0,
        n_paths,
        steps,
        seed,
        Domain::SCALING_DIRECT,
    )?;
    let horizon = 1.0 / (epsilon * epsilon);
    let exit_p = survival_probability(
        ProcessKind::Heis,
        1.0,
        horizon,
        n_paths,
        steps,
        seed,
        Domain::SCALING_EXIT,
    )?;
    let se = (binomial_se(direct_p, n_paths).powi(2) + binomial_se(exit_p, n_paths).powi(2)).sqrt();
    let diff = (direct_p - exit_p).abs();
    let z = if diff == 0.0 { 0.0 } else { diff / se };
    Ok(ScalingCheck {
        epsilon,
        n_paths,
        steps,
        direct_p,
        direct_ci: wilson_interval(direct_p, n_paths),
        exit_p,
        exit_ci: wilson_interval(exit_p, n_paths),
        z,
    })
}

/// Samples for the representation `A_t = b_{τ(t)}` with
/// `τ(t) = ¼∫₀ᵗ‖𝐁_s‖²ds` and `b` a Brownian motion independent of `𝐁`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeChangeSamples {
    /// Terminal Lévy area `A₁` of simulated paths.
    pub area: Vec<f64>,
    /// `b_{τ(1)}`: a centered Gaussian with variance `τ(1)` per sample.
    pub subordinated: Vec<f64>,
    /// The clock values `τ(1)` (trapezoid rule on the grid).
    pub clock: Vec<f64>,
}

pub fn timechange_samples(n_samples: u64, steps: u64, seed: u64) -> Result<TimeChangeSamples> {
    if steps == 0 {
        return Err(invalid("time-change samples need at least one step"));
    }
    let cfg = SimConfig::new(seed, 1.0, steps);
    let area = map_indices(n_samples, |i| {
        simulate_stats_indexed(&cfg, Domain::TIMECHANGE_AREA, i)
            .expect("valid config")
            .a_final
    });
    let h = 1.0 / steps as f64;
    let sqrt_h = h.sqrt();
    let pairs = map_indices(n_samples, |i| {
        let mut rng = substream(seed, Domain::TIMECHANGE_PLANAR, i);
        let mut b = Plane::default();
        let mut prev = 0.0;
        let mut integral = 0.0;
        for _ in 0..steps {
            b.step(&mut rng, sqrt_h);
            let cur = b.size_key();
            integral += 0.5 * h * (prev + cur);
            prev = cur;
        }
        let tau = 0.25 * integral;
        // The clock draw comes from its own stream so it is independent of 𝐁.
        let xi = normal(&mut substream(seed, Domain::TIMECHANGE_CLOCK, i));
        (tau, tau.sqrt() * xi)
    });
    let (clock, subordinated) = pairs.into_iter().unzip();
    Ok(TimeChangeSamples {
        area,
        subordinated,
        clock,
    })
}

/// Norm and vertical component of an increment of the process.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncrementSample {
    pub norm: f64,
    pub area: f64,
}

/// Increments between times `u` and `u + s`: `g_u⁻¹g_{u+s}` for
/// [`Side::Left`], `g_{u+s}g_u⁻¹` for [`Side::Right`]. Paths use
/// `steps_per_unit` steps per unit time; both sides see the same paths.
pub fn increment_samples(
    u: f64,
    s: f64,
    side: Side,
    n_samples: u64,
    steps_per_unit: u64,
    seed: u64,
) -> Result<Vec<IncrementSample>> {
    if !(u > 0.0 && s > 0.0 && u.is_finite() && s.is_finite()) {
        return Err(invalid(format!(
            "increment times must be positive, got u = {u}, s = {s}"
        )));
    }
    if steps_per_unit == 0 {
        return Err(invalid("steps_per_unit must be at least 1"));
    }
    let k_u = (u * steps_per_unit as f64).round() as u64;
    let k_end = ((u + s) * steps_per_unit as f64).round() as u64;
    if k_u == 0 || k_end <= k_u {
        return Err(invalid("u and s must each span at least one grid step"));
    }
    let sqrt_h = (1.0 / steps_per_unit as f64).sqrt();
    Ok(map_indices(n_samples, |i| {
        let mut rng = substream(seed, Domain::INCREMENT, i);
        let mut w = Heis::default();
        for _ in 0..k_u {
            w.step(&mut rng, sqrt_h);
        }
        let g_u = w.g;
        for _ in k_u..k_end {
            w.step(&mut rng, sqrt_h);
        }
        let inc: GroupElement = match side {
            Side::Left => g_u.inv() * w.g,
            Side::Right => w.g * g_u.inv(),
        };
        IncrementSample {
            norm: inc.norm(),
            area: inc.z,
        }
    }))
}

/// `|g_s|` from fresh paths, independent of [`increment_samples`].
pub fn fresh_norm_samples(s: f64, n_samples: u64, steps_per_unit: u64, seed: u64) -> Result<Vec<f64>> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(invalid(format!("horizon must be positive, got {s}")));
    }
    let steps = (s * steps_per_unit as f64).round().max(1.0) as u64;
    let cfg = SimConfig::new(seed, s, steps);
    Ok(map_indices(n_samples, |i| {
        let st = simulate_stats_indexed(&cfg, Domain::INCREMENT_FRESH, i).expect("valid config");
        GroupElement::new(st.w_final.0, st.w_final.1, st.a_final).norm()
    }))
}
