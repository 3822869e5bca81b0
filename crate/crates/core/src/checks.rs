//! Randomized structural property suite.
//!
//! Each property is evaluated on `cases` independent random inputs drawn
//! from its own substream, so the report is a pure function of the seed.
//! A case fails when its error exceeds the property's tolerance; the report
//! also keeps the worst error-to-tolerance ratio seen, which makes near
//! misses visible before they turn into failures.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::group::{
    distance, frame_at, homogeneous_norm, inv, left_translate, mul, omega, translation_differential, GroupElement,
    Side, TangentVector,
};
use crate::parallel::{map_chunks, DEFAULT_CHUNK};
use crate::rng::{substream, Domain, PathRng};
use crate::sim::{simulate_path_indexed, SimConfig};

pub const DEFAULT_CASES: u64 = 100_000;

/// Coordinates of random group elements are drawn from `[−BOX, BOX]`.
pub const BOX: f64 = 10.0;

pub const DILATIONS: [f64; 3] = [0.1, 1.0, 7.0];

const REL_TOL: f64 = 1e-12;
const OMEGA_TOL: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Associativity,
    IdentityInverse,
    NormHomogeneity,
    TriangleInequality,
    LeftInvariance,
    MaurerCartan,
    SymplecticAntisymmetry,
    PathHorizontality,
}

impl Property {
    pub const ALL: [Property; 8] = [
        Property::Associativity,
        Property::IdentityInverse,
        Property::NormHomogeneity,
        Property::TriangleInequality,
        Property::LeftInvariance,
        Property::MaurerCartan,
        Property::SymplecticAntisymmetry,
        Property::PathHorizontality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Associativity => "associativity",
            Property::IdentityInverse => "identity_inverse",
            Property::NormHomogeneity => "norm_homogeneity",
            Property::TriangleInequality => "triangle_inequality",
            Property::LeftInvariance => "left_invariance",
            Property::MaurerCartan => "maurer_cartan",
            Property::SymplecticAntisymmetry => "symplectic_antisymmetry",
            Property::PathHorizontality => "path_horizontality",
        }
    }

    fn id(self) -> u64 {
        self as u64
    }

    /// `(error, tolerance)` for one random case.
    fn case(self, rng: &mut PathRng, seed: u64, index: u64) -> (f64, f64) {
        match self {
            Property::Associativity => {
                let (g, h, k) = (element(rng), element(rng), element(rng));
                let lhs = mul(&mul(&g, &h), &k);
                let rhs = mul(&g, &mul(&h, &k));
                let scale = 1f64.max(lhs.scale()).max(rhs.scale());
                (lhs.max_abs_diff(&rhs), REL_TOL * scale)
            }
            Property::IdentityInverse => {
                let g = element(rng);
                let e = GroupElement::IDENTITY;
                let err = mul(&g, &inv(&g))
                    .max_abs_diff(&e)
                    .max(mul(&inv(&g), &g).max_abs_diff(&e))
                    .max(mul(&e, &g).max_abs_diff(&g))
                    .max(mul(&g, &e).max_abs_diff(&g));
                (err, REL_TOL * 1f64.max(g.scale()))
            }
            Property::NormHomogeneity => {
                let g = element(rng);
                let n = homogeneous_norm(&g);
                let mut err: f64 = 0.0;
                let mut tol = f64::INFINITY;
                for lambda in DILATIONS {
                    let d = g.dilate(lambda).expect("positive dilation");
                    let target = lambda * n;
                    // Report the worst λ as a ratio against its own tolerance.
                    let t = REL_TOL * target.max(f64::MIN_POSITIVE);
                    if (homogeneous_norm(&d) - target).abs() / t > err / tol {
                        err = (homogeneous_norm(&d) - target).abs();
                        tol = t;
                    }
                }
                if tol.is_infinite() {
                    tol = REL_TOL;
                }
                (err, tol)
            }
            Property::TriangleInequality => {
                let (g1, g2) = (element(rng), element(rng));
                let rho = distance(&g1, &g2);
                let bound = homogeneous_norm(&g1) + homogeneous_norm(&g2);
                ((rho - bound).max(0.0), REL_TOL * bound.max(1.0))
            }
            Property::LeftInvariance => {
                let (k, g1, g2) = (element(rng), element(rng), element(rng));
                let moved = distance(&mul(&k, &g1), &mul(&k, &g2));
                let rho = distance(&g1, &g2);
                // ρ is homogeneous of degree one, so the natural scale is the
                // sum of the operand norms rather than ρ itself.
                let scale = homogeneous_norm(&k) + homogeneous_norm(&g1) + homogeneous_norm(&g2);
                ((moved - rho).abs(), REL_TOL * scale.max(1.0))
            }
            Property::MaurerCartan => {
                let p = element(rng);
                let (dx, dy, dz) = (coord(rng), coord(rng), coord(rng));
                let v = TangentVector::new(p, dx, dy, dz);
                // Pulling γ′(t) back to the identity along L_{γ(t)}.
                let pulled = translation_differential(&p, &v, Side::Left);
                let expected = [dx, dy, dz - 0.5 * omega(p.x, p.y, dx, dy)];
                let base_err = left_translate(&p, &p).max_abs_diff(&GroupElement::IDENTITY);
                let comp_err = pulled
                    .components()
                    .iter()
                    .zip(expected)
                    .map(|(a, b)| (a - b).abs())
                    .fold(base_err, f64::max);
                // The same coefficients expand v in the left-invariant frame.
                let [fx, fy, fz] = frame_at(&p);
                let c = pulled.components();
                let frame_err = (0..3)
                    .map(|i| {
                        let r = c[0] * fx.components()[i] + c[1] * fy.components()[i] + c[2] * fz.components()[i];
                        (r - v.components()[i]).abs()
                    })
                    .fold(0.0, f64::max);
                let scale = 1f64.max(p.scale() * dx.abs().max(dy.abs())).max(dz.abs());
                (comp_err.max(frame_err), REL_TOL * scale)
            }
            Property::SymplecticAntisymmetry => {
                let (a, b, c, d) = (coord(rng), coord(rng), coord(rng), coord(rng));
                ((omega(a, b, c, d) + omega(c, d, a, b)).abs(), OMEGA_TOL)
            }
            Property::PathHorizontality => {
                let horizon = rng.random_range(0.1..10.0);
                let steps = rng.random_range(8..=128);
                let cfg = SimConfig::new(seed, horizon, steps);
                let path = simulate_path_indexed(&cfg, Domain::CHECK, index).expect("valid config");
                let scale = path.states.iter().map(GroupElement::scale).fold(1.0, f64::max);
                (path.horizontality_defect(), REL_TOL * scale)
            }
        }
    }
}

fn coord(rng: &mut PathRng) -> f64 {
    rng.random_range(-BOX..=BOX)
}

fn element(rng: &mut PathRng) -> GroupElement {
    GroupElement::new(coord(rng), coord(rng), coord(rng))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyOutcome {
    pub property: Property,
    pub cases: u64,
    pub failures: u64,
    /// Largest error-to-tolerance ratio over all cases; below 1 means pass.
    pub worst_ratio: f64,
    pub first_failure: Option<u64>,
}

impl PropertyOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub seed: u64,
    pub cases: u64,
    pub outcomes: Vec<PropertyOutcome>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(PropertyOutcome::passed)
    }

    pub fn outcome(&self, property: Property) -> Option<&PropertyOutcome> {
        self.outcomes.iter().find(|o| o.property == property)
    }
}

#[derive(Clone, Copy, Default)]
struct Tally {
    failures: u64,
    worst: f64,
    first: Option<u64>,
}

pub fn check_property(property: Property, cases: u64, seed: u64) -> Result<PropertyOutcome> {
    if cases == 0 {
        return Err(invalid("the property suite needs at least one case"));
    }
    // Separate the streams of different properties in the high bits.
    let base = property.id() << 48;
    let tallies = map_chunks(cases, DEFAULT_CHUNK, |range| {
        let mut t = Tally::default();
        for i in range {
            let mut rng = substream(seed, Domain::CHECK, base | i);
            let (err, tol) = property.case(&mut rng, seed, base | i);
            let ratio = if err.is_nan() { f64::INFINITY } else { err / tol };
            t.worst = t.worst.max(ratio);
            if err.is_nan() || err > tol {
                t.failures += 1;
                t.first.get_or_insert(i);
            }
        }
        t
    });
    let mut total = Tally::default();
    for t in tallies {
        total.failures += t.failures;
        total.worst = total.worst.max(t.worst);
        if total.first.is_none() {
            total.first = t.first;
        }
    }
    Ok(PropertyOutcome {
        property,
        cases,
        failures: total.failures,
        worst_ratio: total.worst,
        first_failure: total.first,
    })
}

pub fn run_structural_suite(cases: u64, seed: u64) -> Result<CheckReport> {
    let outcomes = Property::ALL
        .iter()
        .map(|&p| check_property(p, cases, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(CheckReport { seed, cases, outcomes })
}
