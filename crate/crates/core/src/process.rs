//! Discrete stepping kernels for the four processes the estimators drive.
//!
//! Every kernel consumes standard normals in the same order (x first, then
//! y), so under a shared substream the planar motion of `Bm2`, `Heis` and
//! `Area` is the same path. That coupling is what makes
//! `P(g*₁ < ε) ≤ P(B*₁ < ε)` hold estimate-wise.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, HeisError};
use crate::group::GroupElement;
use crate::rng::{normal, PathRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProcessKind {
    /// One-dimensional Brownian motion, ball = interval (−1, 1).
    #[serde(rename = "BM1")]
    Bm1,
    /// Planar Brownian motion, ball = unit disc.
    #[serde(rename = "BM2")]
    Bm2,
    /// Hypoelliptic Brownian motion, ball = unit ball of the homogeneous norm.
    #[serde(rename = "HEIS")]
    Heis,
    /// Lévy area alone, ball = {|A| < 1}.
    #[serde(rename = "AREA")]
    Area,
}

impl ProcessKind {
    pub const ALL: [ProcessKind; 4] = [ProcessKind::Bm1, ProcessKind::Bm2, ProcessKind::Heis, ProcessKind::Area];

    pub fn tag(self) -> &'static str {
        match self {
            ProcessKind::Bm1 => "BM1",
            ProcessKind::Bm2 => "BM2",
            ProcessKind::Heis => "HEIS",
            ProcessKind::Area => "AREA",
        }
    }
}

impl fmt::Display for ProcessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ProcessKind {
    type Err = HeisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "BM1" => Ok(ProcessKind::Bm1),
            "BM2" => Ok(ProcessKind::Bm2),
            "HEIS" => Ok(ProcessKind::Heis),
            "AREA" => Ok(ProcessKind::Area),
            other => Err(invalid(format!("unknown process kind {other:?}"))),
        }
    }
}

/// State of a discretized process started at the origin.
///
/// `size_key` is a monotone transform of the process norm (a square or a
/// fourth power) so exit tests avoid roots; `radius_key` maps a radius to
/// the same scale.
pub(crate) trait Walker: Default {
    fn step(&mut self, rng: &mut PathRng, sqrt_h: f64);
    fn size_key(&self) -> f64;
    fn radius_key(radius: f64) -> f64;
}

#[derive(Default, Clone, Copy, Debug)]
pub(crate) struct Line {
    pub x: f64,
}

impl Walker for Line {
    #[inline(always)]
    fn step(&mut self, rng: &mut PathRng, sqrt_h: f64) {
        self.x += sqrt_h * normal(rng);
    }
    #[inline(always)]
    fn size_key(&self) -> f64 {
        self.x * self.x
    }
    fn radius_key(radius: f64) -> f64 {
        radius * radius
    }
}

#[derive(Default, Clone, Copy, Debug)]
pub(crate) struct Plane {
    pub x: f64,
    pub y: f64,
}

impl Walker for Plane {
    #[inline(always)]
    fn step(&mut self, rng: &mut PathRng, sqrt_h: f64) {
        self.x += sqrt_h * normal(rng);
        self.y += sqrt_h * normal(rng);
    }
    #[inline(always)]
    fn size_key(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }
    fn radius_key(radius: f64) -> f64 {
        radius * radius
    }
}

/// Planar Brownian motion together with its Lévy area, advanced by the
/// left-point rule `A ← A + ½ω(𝐖_k, Δ𝐖_k)`.
#[derive(Default, Clone, Copy, Debug)]
pub(crate) struct Heis {
    pub g: GroupElement,
}

impl Heis {
    #[inline(always)]
    pub fn advance(&mut self, dx: f64, dy: f64) {
        let g = &mut self.g;
        g.z += 0.5 * (g.x * dy - g.y * dx);
        g.x += dx;
        g.y += dy;
    }
}

impl Walker for Heis {
    #[inline(always)]
    fn step(&mut self, rng: &mut PathRng, sqrt_h: f64) {
        let dx = sqrt_h * normal(rng);
        let dy = sqrt_h * normal(rng);
        self.advance(dx, dy);
    }
    #[inline(always)]
    fn size_key(&self) -> f64 {
        self.g.norm_pow4()
    }
    fn radius_key(radius: f64) -> f64 {
        let r2 = radius * radius;
        r2 * r2
    }
}

/// Same dynamics as [`Heis`], measured by `|A|` alone.
#[derive(Default, Clone, Copy, Debug)]
pub(crate) struct AreaOnly {
    pub inner: Heis,
}

impl Walker for AreaOnly {
    #[inline(always)]
    fn step(&mut self, rng: &mut PathRng, sqrt_h: f64) {
        self.inner.step(rng, sqrt_h);
    }
    #[inline(always)]
    fn size_key(&self) -> f64 {
        self.inner.g.z * self.inner.g.z
    }
    fn radius_key(radius: f64) -> f64 {
        radius * radius
    }
}

/// First grid index `k ∈ [1, max_steps]` at which the walker leaves the
/// open ball of `radius`, or `None` if it stays inside through `max_steps`.
#[inline]
pub(crate) fn first_exit<W: Walker>(rng: &mut PathRng, radius: f64, sqrt_h: f64, max_steps: u64) -> Option<u64> {
    let key = W::radius_key(radius);
    let mut w = W::default();
    for k in 1..=max_steps {
        w.step(rng, sqrt_h);
        if w.size_key() >= key {
            return Some(k);
        }
    }
    None
}

/// Probability that a Brownian bridge of duration `h` between `a` and `b`
/// (both inside `(−r, r)`) touches `±r`. Uses the single-barrier crossing
/// formula `exp(−2(r−a)(r−b)/h)` on each side; the double-crossing
/// correction is below `f64` resolution at the step sizes used here.
#[inline(always)]
pub(crate) fn bridge_touch_probability(a: f64, b: f64, r: f64, h: f64) -> f64 {
    // exp(-40) < 5e-18: negligible against a unit survival weight.
    const CUTOFF: f64 = 40.0;
    let up = 2.0 * (r - a) * (r - b) / h;
    let down = 2.0 * (r + a) * (r + b) / h;
    let p_up = if up < CUTOFF { (-up).exp() } else { 0.0 };
    let p_down = if down < CUTOFF { (-down).exp() } else { 0.0 };
    1.0 - (1.0 - p_up) * (1.0 - p_down)
}

/// Survival weight of a one-dimensional path on `[0, steps·h]` with
/// continuous monitoring restored by bridge interpolation between grid
/// points: zero if a grid point leaves `(−r, r)`, otherwise
/// `∏ (1 − P(bridge touches the boundary))`.
pub(crate) fn line_bridge_survival(rng: &mut PathRng, r: f64, h: f64, steps: u64) -> f64 {
    let sqrt_h = h.sqrt();
    let mut x = 0.0f64;
    let mut weight = 1.0f64;
    for _ in 0..steps {
        let next = x + sqrt_h * normal(rng);
        if next.abs() >= r {
            return 0.0;
        }
        let p = bridge_touch_probability(x, next, r, h);
        if p > 0.0 {
            weight *= 1.0 - p;
        }
        x = next;
    }
    weight
}
