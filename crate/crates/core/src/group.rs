//! Arithmetic of the Heisenberg group ℍ ≅ ℝ² × ℝ.
//!
//! Points are `(x, y, z)` with the product
//!
//! ```text
//! (x₁, y₁, z₁)·(x₂, y₂, z₂) = (x₁ + x₂, y₁ + y₂, z₁ + z₂ + ½ω((x₁,y₁), (x₂,y₂)))
//! ```
//!
//! where `ω(v₁, v₂) = x₁y₂ − x₂y₁` is the standard symplectic form. The
//! identity is the origin and inverses are coordinate negation.
//!
//! Left translation follows the convention `L_k g = k⁻¹g`, so the
//! pushforward of a tangent vector under `L_k` lives at `k⁻¹g`.

use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// `ω((x₁,y₁), (x₂,y₂)) = x₁y₂ − x₂y₁`.
#[inline(always)]
pub(crate) fn omega(x1: f64, y1: f64, x2: f64, y2: f64) -> f64 {
    x1 * y2 - x2 * y1
}

/// Value of the symplectic form on a pair of planar vectors.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct SymplecticValue(pub f64);

impl SymplecticValue {
    pub fn of(v1: [f64; 2], v2: [f64; 2]) -> Self {
        SymplecticValue(omega(v1[0], v1[1], v2[0], v2[1]))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A point of the Heisenberg group.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        GroupElement { x, y, z }
    }

    /// Horizontal (planar) part `(x, y)`.
    pub fn horizontal(&self) -> [f64; 2] {
        [self.x, self.y]
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Group product `self · other`.
    #[inline]
    pub fn product(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            x: self.x + other.x,
            y: self.y + other.y,
            z: self.z + other.z + 0.5 * omega(self.x, self.y, other.x, other.y),
        }
    }

    #[inline]
    pub fn inv(&self) -> GroupElement {
        GroupElement {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    /// Homogeneous norm `(‖(x,y)‖⁴ + z²)^{1/4}`.
    ///
    /// Evaluated as `m · ((r/m)⁴ + (√|z|/m)⁴)^{1/4}` with
    /// `m = max(r, √|z|)` so no intermediate leaves the range of `f64`.
    pub fn norm(&self) -> f64 {
        let r = self.x.hypot(self.y);
        let s = self.z.abs().sqrt();
        let m = r.max(s);
        if m == 0.0 {
            return 0.0;
        }
        let a = r / m;
        let b = s / m;
        let a2 = a * a;
        let b2 = b * b;
        m * (a2 * a2 + b2 * b2).sqrt().sqrt()
    }

    /// Fourth power of the homogeneous norm, computed directly. Used on hot
    /// paths where only comparisons against a radius are needed.
    #[inline(always)]
    pub fn norm_pow4(&self) -> f64 {
        let r2 = self.x * self.x + self.y * self.y;
        r2 * r2 + self.z * self.z
    }

    /// Anisotropic dilation `(λx, λy, λ²z)`.
    pub fn dilate(&self, lambda: f64) -> Result<GroupElement> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(invalid(format!("dilation factor must be positive, got {lambda}")));
        }
        Ok(GroupElement {
            x: lambda * self.x,
            y: lambda * self.y,
            z: lambda * lambda * self.z,
        })
    }

    /// Max-abs coordinate distance, for comparisons in tests and checks.
    pub fn max_abs_diff(&self, other: &GroupElement) -> f64 {
        (self.x - other.x)
            .abs()
            .max((self.y - other.y).abs())
            .max((self.z - other.z).abs())
    }

    /// Largest absolute coordinate.
    pub fn scale(&self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;

    fn mul(self, rhs: GroupElement) -> GroupElement {
        self.product(&rhs)
    }
}

pub fn mul(g: &GroupElement, h: &GroupElement) -> GroupElement {
    g.product(h)
}

pub fn inv(g: &GroupElement) -> GroupElement {
    g.inv()
}

pub fn homogeneous_norm(g: &GroupElement) -> f64 {
    g.norm()
}

pub fn dilate(lambda: f64, g: &GroupElement) -> Result<GroupElement> {
    g.dilate(lambda)
}

/// Left translation in the `L_k g = k⁻¹g` convention.
pub fn left_translate(k: &GroupElement, g: &GroupElement) -> GroupElement {
    k.inv().product(g)
}

/// Right translation `R_k g = gk`.
pub fn right_translate(k: &GroupElement, g: &GroupElement) -> GroupElement {
    g.product(k)
}

/// Left-invariant homogeneous distance `ρ(g₁, g₂) = |g₂⁻¹g₁|`.
pub fn distance(g1: &GroupElement, g2: &GroupElement) -> f64 {
    g2.inv().product(g1).norm()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// A tangent vector `(v₁, v₂, v₃)` attached to a base point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    pub base: GroupElement,
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
}

impl TangentVector {
    pub const fn new(base: GroupElement, v1: f64, v2: f64, v3: f64) -> Self {
        TangentVector { base, v1, v2, v3 }
    }

    pub fn components(&self) -> [f64; 3] {
        [self.v1, self.v2, self.v3]
    }
}

/// Pushforward of `v ∈ T_gℍ` under left (`g ↦ k⁻¹g`) or right (`g ↦ gk`)
/// translation by `k`. Both differentials act on components as
/// `(v₁, v₂, v₃ + ½ω(𝐯, 𝐤))`; they differ only in the new base point.
pub fn translation_differential(k: &GroupElement, v: &TangentVector, side: Side) -> TangentVector {
    let base = match side {
        Side::Left => left_translate(k, &v.base),
        Side::Right => right_translate(k, &v.base),
    };
    TangentVector {
        base,
        v1: v.v1,
        v2: v.v2,
        v3: v.v3 + 0.5 * omega(v.v1, v.v2, k.x, k.y),
    }
}

/// Left-invariant frame `X = ∂x − ½y∂z`, `Y = ∂y + ½x∂z`, `Z = ∂z` at `p`.
pub fn frame_at(p: &GroupElement) -> [TangentVector; 3] {
    [
        TangentVector::new(*p, 1.0, 0.0, -0.5 * p.y),
        TangentVector::new(*p, 0.0, 1.0, 0.5 * p.x),
        TangentVector::new(*p, 0.0, 0.0, 1.0),
    ]
}

/// Piecewise-linear curve in ℍ sampled at strictly increasing times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolygonalPath {
    vertices: Vec<GroupElement>,
    times: Vec<f64>,
}

impl PolygonalPath {
    pub fn new(vertices: Vec<GroupElement>, times: Vec<f64>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(invalid("polygonal path needs at least one vertex"));
        }
        if vertices.len() != times.len() {
            return Err(invalid(format!(
                "{} vertices but {} times",
                vertices.len(),
                times.len()
            )));
        }
        if let Some(bad) = vertices.iter().position(|g| !g.is_finite()) {
            return Err(invalid(format!("vertex {bad} has a non-finite coordinate")));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("times must be finite and strictly increasing"));
        }
        Ok(PolygonalPath { vertices, times })
    }

    /// Path with unit-spaced times `0, 1, 2, …`.
    pub fn from_vertices(vertices: Vec<GroupElement>) -> Result<Self> {
        let times = (0..vertices.len()).map(|k| k as f64).collect();
        Self::new(vertices, times)
    }

    pub fn vertices(&self) -> &[GroupElement] {
        &self.vertices
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn into_vertices(self) -> Vec<GroupElement> {
        self.vertices
    }
}

/// Largest per-segment violation `|Δz_k − ½ω(𝐱_k, Δ𝐱_k)|` of the discrete
/// horizontality condition, using the left endpoint `𝐱_k`.
pub fn horizontality_defect(path: &PolygonalPath) -> Result<f64> {
    if path.len() < 2 {
        return Err(invalid("horizontality defect needs at least two vertices"));
    }
    Ok(vertex_defect(path.vertices()))
}

pub(crate) fn vertex_defect(vertices: &[GroupElement]) -> f64 {
    vertices
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let (dx, dy) = (b.x - a.x, b.y - a.y);
            ((b.z - a.z) - 0.5 * omega(a.x, a.y, dx, dy)).abs()
        })
        .fold(0.0, f64::max)
}

/// Same as [`vertex_defect`] but with the segment midpoint in place of the
/// left endpoint. Identical in exact arithmetic since `ω(Δ𝐱, Δ𝐱) = 0`.
#[cfg(test)]
pub(crate) fn vertex_defect_midpoint(vertices: &[GroupElement]) -> f64 {
    vertices
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let (dx, dy) = (b.x - a.x, b.y - a.y);
            let (mx, my) = (0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
            ((b.z - a.z) - 0.5 * omega(mx, my, dx, dy)).abs()
        })
        .fold(0.0, f64::max)
}
