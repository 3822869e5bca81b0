//! Dirichlet eigenvalues of `−½Δ` on unit balls and the bounds they give
//! for the small-deviation constant of the Heisenberg Brownian motion.
//!
//! * On `(−1, 1)`: `−½u″ = λu`, `u(±1) = 0` has principal solution
//!   `u = cos(πx/2)`, so `λ₁⁽¹⁾ = π²/8`.
//! * On the unit disc the principal eigenfunction is radial, `u = J₀(jr)`
//!   with `j` the first positive zero of `J₀`, so `λ₁⁽²⁾ = j²/2`.
//!
//! The upper bound comes from minimizing
//! `f(x) = λ₁⁽²⁾/√(1−x) + λ₁⁽¹⁾√(1−x)/(4x)` over `x ∈ (0, 1)`; its minimizer
//! has the closed form implemented in [`x_star`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

const J0_SERIES_TERMS: usize = 25;
const ZERO_TOL: f64 = 1e-10;

/// `J₀(x)` by its ascending series, accurate to double precision for
/// `|x| ≤ 8`.
pub fn bessel_j0(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..J0_SERIES_TERMS {
        let kf = k as f64;
        term *= q / (kf * kf);
        sum += term;
    }
    sum
}

/// `J₁(x) = −J₀′(x)` by its ascending series, same range as [`bessel_j0`].
pub fn bessel_j1(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 0.5 * x;
    let mut sum = term;
    for k in 1..J0_SERIES_TERMS {
        let kf = k as f64;
        term *= q / (kf * (kf + 1.0));
        sum += term;
    }
    sum
}

/// First positive zero of `J₀`, by Newton's method safeguarded with
/// bisection on the bracket `[2, 3]`.
pub fn bessel_j0_first_zero() -> f64 {
    let (mut lo, mut hi) = (2.0f64, 3.0f64);
    debug_assert!(bessel_j0(lo) > 0.0 && bessel_j0(hi) < 0.0);
    let mut x = 2.4;
    for _ in 0..100 {
        let fx = bessel_j0(x);
        if fx > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        // J₀′ = −J₁
        let newton = x + fx / bessel_j1(x);
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= ZERO_TOL {
            return next;
        }
        x = next;
    }
    x
}

/// Principal Dirichlet eigenvalue of `−½Δ` on the unit ball of `ℝⁿ`,
/// `n ∈ {1, 2}`.
pub fn lambda1(n: u32) -> Result<f64> {
    match n {
        1 => Ok(PI * PI / 8.0),
        2 => {
            let j = bessel_j0_first_zero();
            Ok(0.5 * j * j)
        }
        other => Err(invalid(format!(
            "eigenvalue only available for n = 1 or 2, got {other}"
        ))),
    }
}

/// `f(x) = l2/√(1−x) + l1·√(1−x)/(4x)` on `(0, 1)`.
pub fn bound_f(x: f64, l1: f64, l2: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(invalid(format!("bound function needs 0 < x < 1, got {x}")));
    }
    check_eigenvalues(l1, l2)?;
    let s = (1.0 - x).sqrt();
    Ok(l2 / s + l1 * s / (4.0 * x))
}

/// Minimizer of [`bound_f`]:
/// `x* = (√(l1² + 32·l1·l2) − 3·l1) / (2(4·l2 − l1))`.
pub fn x_star(l1: f64, l2: f64) -> Result<f64> {
    check_eigenvalues(l1, l2)?;
    let denom = 2.0 * (4.0 * l2 - l1);
    if denom.abs() <= 1e-15 * l2.abs().max(l1.abs()) {
        return Err(invalid("degenerate eigenvalues: 4·l2 = l1"));
    }
    Ok(((l1 * l1 + 32.0 * l1 * l2).sqrt() - 3.0 * l1) / denom)
}

fn check_eigenvalues(l1: f64, l2: f64) -> Result<()> {
    if !(l1 > 0.0 && l2 > 0.0 && l1.is_finite() && l2.is_finite()) {
        return Err(invalid(format!("eigenvalues must be positive, got {l1}, {l2}")));
    }
    Ok(())
}

/// Eigenvalues, the minimizer and the resulting bracket `[c_lower, c_upper]`
/// for the Chung constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub lambda1_1: f64,
    pub lambda1_2: f64,
    pub x_star: f64,
    pub f_at_xstar: f64,
    pub c_lower: f64,
    pub c_upper: f64,
}

pub fn chung_bounds() -> BoundResult {
    let l1 = lambda1(1).expect("n = 1 is supported");
    let l2 = lambda1(2).expect("n = 2 is supported");
    let xs = x_star(l1, l2).expect("standard eigenvalues are not degenerate");
    let fx = bound_f(xs, l1, l2).expect("x* lies in (0, 1)");
    BoundResult {
        lambda1_1: l1,
        lambda1_2: l2,
        x_star: xs,
        f_at_xstar: fx,
        c_lower: l2.sqrt(),
        c_upper: fx.sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from 30-digit evaluations of the closed forms.
    const J01: f64 = 2.404_825_557_695_773;
    const L1: f64 = 1.233_700_550_136_169_8;
    const L2: f64 = 2.891_592_981_473_392_3;
    const XSTAR: f64 = 0.341_356_417_055_991_2;
    const FSTAR: f64 = 4.296_243_146_273_041;

    #[test]
    fn j0_series_sanity() {
        assert_eq!(bessel_j0(0.0), 1.0);
        assert!((bessel_j0(2.0) - 0.223_890_779_141_235_7).abs() < 1e-15);
        assert!((bessel_j0(3.0) + 0.260_051_954_901_933_4).abs() < 1e-15);
        assert!((bessel_j1(1.0) - 0.440_050_585_744_933_5).abs() < 1e-15);
    }

    #[test]
    fn first_zero() {
        let j = bessel_j0_first_zero();
        assert!((j - J01).abs() < 1e-8, "{j}");
        assert!((j - 2.40482556).abs() < 1e-8);
        assert!(bessel_j0(j).abs() < 1e-8);
    }

    #[test]
    fn eigenvalues() {
        let l1 = lambda1(1).unwrap();
        let l2 = lambda1(2).unwrap();
        assert!((l1 - L1).abs() < 1e-15);
        assert!((l1 - 1.2337006).abs() < 1e-7);
        assert!((l2 - L2).abs() < 1e-9);
        assert!((l2 - 2.8915930).abs() < 1e-7);
        assert!(l1 < l2);
        assert!(lambda1(0).is_err());
        assert!(lambda1(3).is_err());
    }

    #[test]
    fn eigenfunction_residuals() {
        // Independent check of the identifications: finite-difference
        // residual of −½u″ − λu for u = cos(πx/2) and of the radial
        // operator −½(u″ + u′/r) − λu for u = J₀(jr).
        let h = 1e-4;
        let l1 = lambda1(1).unwrap();
        for x in [-0.7, 0.0, 0.3, 0.9] {
            let u = |x: f64| (PI * x / 2.0).cos();
            let upp = (u(x + h) - 2.0 * u(x) + u(x - h)) / (h * h);
            assert!((-0.5 * upp - l1 * u(x)).abs() < 1e-6);
        }
        let j = bessel_j0_first_zero();
        let l2 = lambda1(2).unwrap();
        for r in [0.2, 0.5, 0.8] {
            let u = |r: f64| bessel_j0(j * r);
            let up = (u(r + h) - u(r - h)) / (2.0 * h);
            let upp = (u(r + h) - 2.0 * u(r) + u(r - h)) / (h * h);
            assert!((-0.5 * (upp + up / r) - l2 * u(r)).abs() < 1e-6);
        }
        assert!(bessel_j0(j).abs() < 1e-12);
    }

    #[test]
    fn bound_f_examples() {
        let f = bound_f(0.5, L1, L2).unwrap();
        assert!((f - 4.525_509_023_739_955).abs() < 1e-9, "{f}");
        assert!(bound_f(1e-12, L1, L2).unwrap() > 1e10);
        assert!(bound_f(0.0, L1, L2).is_err());
        assert!(bound_f(1.0, L1, L2).is_err());
        assert!(bound_f(0.5, -1.0, L2).is_err());
    }

    #[test]
    fn x_star_examples() {
        let xs = x_star(L1, L2).unwrap();
        assert!((xs - XSTAR).abs() < 1e-12);
        assert!((bound_f(xs, L1, L2).unwrap() - FSTAR).abs() < 1e-12);
        for lam in [0.1, 1.0, 17.0] {
            let v = x_star(lam, lam).unwrap();
            assert!((v - (33f64.sqrt() - 3.0) / 6.0).abs() < 1e-14);
            assert!((v - 0.457427).abs() < 1e-6);
        }
        assert!(x_star(4.0, 1.0).is_err());
    }

    #[test]
    fn x_star_is_stationary() {
        let xs = x_star(L1, L2).unwrap();
        let h = 1e-6;
        let d = (bound_f(xs + h, L1, L2).unwrap() - bound_f(xs - h, L1, L2).unwrap()) / (2.0 * h);
        assert!(d.abs() <= 1e-6, "derivative {d}");
    }

    #[test]
    fn x_star_minimizes_on_grid() {
        let xs = x_star(L1, L2).unwrap();
        let fmin = bound_f(xs, L1, L2).unwrap();
        for i in 1..1000 {
            let x = i as f64 / 1000.0;
            assert!(fmin <= bound_f(x, L1, L2).unwrap() + 1e-15);
        }
    }

    #[test]
    fn scaling_properties() {
        let xs = x_star(L1, L2).unwrap();
        for t in [0.5, 2.0, 10.0] {
            let xt = x_star(t * L1, t * L2).unwrap();
            assert!((xt - xs).abs() <= 1e-12 * xs);
            for x in [0.1, 0.5, 0.9] {
                let a = bound_f(x, t * L1, t * L2).unwrap();
                let b = t * bound_f(x, L1, L2).unwrap();
                assert!((a - b).abs() <= 1e-12 * b);
            }
        }
    }

    #[test]
    fn bounds_table() {
        let b = chung_bounds();
        assert!((b.c_lower - 1.700468).abs() < 1e-6);
        assert!((b.c_upper - 2.072_738_079_515_364).abs() < 1e-9);
        assert!(b.c_lower < b.c_upper);
        assert!(b.lambda1_2 <= b.f_at_xstar);
        assert!(0.0 < b.x_star && b.x_star < 1.0);
        assert_eq!(b.f_at_xstar, bound_f(b.x_star, b.lambda1_1, b.lambda1_2).unwrap());
    }
}
