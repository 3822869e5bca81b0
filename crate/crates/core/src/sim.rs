//! Simulation of the hypoelliptic Brownian motion `g_t = (𝐖_t, A_t)`.
//!
//! With `h = T/n` the scheme is
//!
//! ```text
//! 𝐖_{k+1} = 𝐖_k + √h·ξ_k
//! A_{k+1} = A_k + ½ω(𝐖_k, 𝐖_{k+1} − 𝐖_k)
//! ```
//!
//! with `ξ_k` independent standard planar Gaussians. The recorded states are
//! exactly the horizontal lift of the polygonal interpolation of `𝐖`, so
//! their horizontality defect vanishes up to rounding.
//!
//! The running supremum is taken over grid points only and therefore
//! underestimates the continuous `g*_T`; the bias shrinks with `√h`.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::fmt::{fmt_sig, ROUND_TRIP_DIGITS};
use crate::group::{omega, vertex_defect, GroupElement, PolygonalPath};
use crate::parallel::map_indices;
use crate::process::{Heis, Walker};
use crate::rng::{substream, Domain};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub seed: u64,
    /// Horizon `T` in seconds.
    pub horizon: f64,
    /// Number of Euler steps `n` on `[0, T]`.
    pub steps: u64,
    /// Row stride for CSV dumps; does not affect the simulation.
    pub record_stride: u64,
}

impl SimConfig {
    pub fn new(seed: u64, horizon: f64, steps: u64) -> Self {
        SimConfig {
            seed,
            horizon,
            steps,
            record_stride: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(invalid(format!("horizon must be positive, got {}", self.horizon)));
        }
        if self.record_stride == 0 {
            return Err(invalid("record stride must be at least 1"));
        }
        Ok(())
    }

    pub fn step_size(&self) -> f64 {
        self.horizon / self.steps as f64
    }
}

/// A simulated trajectory at full step resolution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergPath {
    pub times: Vec<f64>,
    pub states: Vec<GroupElement>,
    /// `sup_norm[k] = max_{j ≤ k} |states[j]|`.
    pub sup_norm: Vec<f64>,
}

impl HeisenbergPath {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn terminal(&self) -> GroupElement {
        *self.states.last().expect("paths hold at least the initial state")
    }

    /// Largest per-segment horizontality violation (0 for a single point).
    pub fn horizontality_defect(&self) -> f64 {
        vertex_defect(&self.states)
    }

    pub fn to_polygonal(&self) -> Result<PolygonalPath> {
        PolygonalPath::new(self.states.clone(), self.times.clone())
    }

    /// CSV dump with header `t,x,y,z,sup_norm`, one row every `stride`
    /// steps plus the terminal row.
    pub fn write_csv<W: Write>(&self, stride: u64, mut out: W) -> io::Result<()> {
        let stride = stride.max(1) as usize;
        writeln!(out, "t,x,y,z,sup_norm")?;
        let last = self.states.len() - 1;
        for k in (0..=last).filter(|k| k % stride == 0 || *k == last) {
            let g = self.states[k];
            writeln!(
                out,
                "{},{},{},{},{}",
                fmt_sig(self.times[k], ROUND_TRIP_DIGITS),
                fmt_sig(g.x, ROUND_TRIP_DIGITS),
                fmt_sig(g.y, ROUND_TRIP_DIGITS),
                fmt_sig(g.z, ROUND_TRIP_DIGITS),
                fmt_sig(self.sup_norm[k], ROUND_TRIP_DIGITS),
            )?;
        }
        Ok(())
    }
}

/// Running maxima of a path.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathStats {
    /// `g*_T = max |g_s|`.
    pub g_star: f64,
    /// `max ‖𝐖_s‖`.
    pub b_star: f64,
    /// `max |A_s|`.
    pub a_star: f64,
    pub w_final: (f64, f64),
    pub a_final: f64,
}

pub fn simulate_path(cfg: &SimConfig) -> Result<HeisenbergPath> {
    simulate_path_indexed(cfg, Domain::SIMULATE, 0)
}

/// Path `index` of the experiment `(cfg.seed, domain)`.
pub fn simulate_path_indexed(cfg: &SimConfig, domain: Domain, index: u64) -> Result<HeisenbergPath> {
    cfg.validate()?;
    let n = cfg.steps as usize;
    let h = cfg.step_size();
    let sqrt_h = h.sqrt();
    let mut rng = substream(cfg.seed, domain, index);

    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    let mut sup_norm = Vec::with_capacity(n + 1);
    let mut walker = Heis::default();
    let mut sup = 0.0f64;
    times.push(0.0);
    states.push(walker.g);
    sup_norm.push(sup);
    for k in 1..=n {
        walker.step(&mut rng, sqrt_h);
        sup = sup.max(walker.g.norm());
        times.push(if k == n { cfg.horizon } else { k as f64 * h });
        states.push(walker.g);
        sup_norm.push(sup);
    }
    Ok(HeisenbergPath {
        times,
        states,
        sup_norm,
    })
}

/// Terminal state and running maxima of path `index`, without storing the
/// trajectory. Bit-identical to the last entries of
/// [`simulate_path_indexed`] for the same arguments.
pub fn simulate_stats_indexed(cfg: &SimConfig, domain: Domain, index: u64) -> Result<PathStats> {
    cfg.validate()?;
    let sqrt_h = cfg.step_size().sqrt();
    let mut rng = substream(cfg.seed, domain, index);
    let mut walker = Heis::default();
    let (mut g_star, mut b2_star, mut a_star) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..cfg.steps {
        walker.step(&mut rng, sqrt_h);
        let g = walker.g;
        g_star = g_star.max(g.norm());
        b2_star = b2_star.max(g.x * g.x + g.y * g.y);
        a_star = a_star.max(g.z.abs());
    }
    let g = walker.g;
    Ok(PathStats {
        g_star,
        b_star: b2_star.sqrt(),
        a_star,
        w_final: (g.x, g.y),
        a_final: g.z,
    })
}

/// Discrete horizontal lift of a planar polygon started at `z₀ = 0`:
/// `z_{k+1} = z_k + ½ω(𝐱_k, 𝐱_{k+1} − 𝐱_k)`. Vertex times are `0, 1, 2, …`.
pub fn polygonal_lift(planar: &[(f64, f64)]) -> Result<PolygonalPath> {
    if planar.is_empty() {
        return Err(invalid("polygonal lift needs at least one vertex"));
    }
    let mut z = 0.0;
    let mut vertices = Vec::with_capacity(planar.len());
    vertices.push(GroupElement::new(planar[0].0, planar[0].1, 0.0));
    for w in planar.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        z += 0.5 * omega(x0, y0, x1 - x0, y1 - y0);
        vertices.push(GroupElement::new(x1, y1, z));
    }
    PolygonalPath::from_vertices(vertices)
}

pub fn running_sup_norm(path: &HeisenbergPath) -> PathStats {
    let (mut g_star, mut b_star, mut a_star) = (0.0f64, 0.0f64, 0.0f64);
    for g in &path.states {
        g_star = g_star.max(g.norm());
        b_star = b_star.max(g.x.hypot(g.y));
        a_star = a_star.max(g.z.abs());
    }
    let last = path.terminal();
    PathStats {
        g_star,
        b_star,
        a_star,
        w_final: (last.x, last.y),
        a_final: last.z,
    }
}

/// Two samples for the scaling identity `|g_{εT}| =ᵈ √ε·|g_T|`: the first
/// holds `|g_{εT}|`, the second `√ε·|g_T|`, each from `cfg.steps` steps and
/// independent substreams.
pub fn scaled_path_samples(cfg: &SimConfig, epsilon: f64, n_samples: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    cfg.validate()?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    let short = SimConfig {
        horizon: epsilon * cfg.horizon,
        ..*cfg
    };
    let scale = epsilon.sqrt();
    let terminal_norm = |c: &SimConfig, domain: Domain, i: u64| {
        let s = simulate_stats_indexed(c, domain, i).expect("validated config");
        GroupElement::new(s.w_final.0, s.w_final.1, s.a_final).norm()
    };
    let direct = map_indices(n_samples, |i| terminal_norm(&short, Domain::SCALED_SHORT, i));
    let scaled = map_indices(n_samples, |i| scale * terminal_norm(cfg, Domain::SCALED_UNIT, i));
    Ok((direct, scaled))
}
