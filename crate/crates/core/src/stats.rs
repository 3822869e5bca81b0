//! Small statistical toolkit: moments with standard errors, binomial
//! confidence intervals, and weighted least squares.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

use crate::error::{invalid, HeisError, Result};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Sample mean and variance with their standard errors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub n: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub se_mean: f64,
    /// Large-sample standard error `√((m₄ − s⁴)/n)` of the variance.
    pub se_variance: f64,
}

impl Moments {
    pub fn of(xs: &[f64]) -> Moments {
        let n = xs.len();
        assert!(n >= 2, "need at least two samples for a variance");
        let nf = n as f64;
        let mean = xs.iter().sum::<f64>() / nf;
        let (mut m2, mut m4) = (0.0, 0.0);
        for &x in xs {
            let d = (x - mean) * (x - mean);
            m2 += d;
            m4 += d * d;
        }
        let variance = m2 / (nf - 1.0);
        let m2b = m2 / nf;
        let m4b = m4 / nf;
        Moments {
            n,
            mean,
            variance,
            se_mean: (variance / nf).sqrt(),
            se_variance: ((m4b - m2b * m2b).max(0.0) / nf).sqrt(),
        }
    }

    /// `|mean − target| / se_mean`.
    pub fn mean_z(&self, target: f64) -> f64 {
        (self.mean - target).abs() / self.se_mean
    }

    /// `|variance − target| / se_variance`.
    pub fn variance_z(&self, target: f64) -> f64 {
        (self.variance - target).abs() / self.se_variance
    }
}

/// 95% interval for a binomial proportion `p̂` out of `n` trials.
///
/// Wilson score interval in the interior. When `p̂` is exactly 0 (or 1) the
/// interval is the exact one-sided 95% bound `[0, 1 − 0.05^{1/n}]` (or its
/// mirror). The returned interval always contains `p̂`.
pub fn wilson_interval(p_hat: f64, n: u64) -> (f64, f64) {
    assert!(n > 0, "wilson interval needs at least one trial");
    let nf = n as f64;
    if p_hat <= 0.0 {
        return (0.0, 1.0 - 0.05f64.powf(1.0 / nf));
    }
    if p_hat >= 1.0 {
        return (0.05f64.powf(1.0 / nf), 1.0);
    }
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / nf;
    let center = (p_hat + z2 / (2.0 * nf)) / denom;
    let half = Z95 / denom * (p_hat * (1.0 - p_hat) / nf + z2 / (4.0 * nf * nf)).sqrt();
    ((center - half).max(0.0).min(p_hat), (center + half).min(1.0).max(p_hat))
}

/// Exact (Clopper–Pearson) 95% interval for `k` successes in `n` trials.
pub fn clopper_pearson(k: u64, n: u64) -> (f64, f64) {
    assert!(n > 0 && k <= n, "need 0 <= k <= n, n > 0");
    let alpha = 0.05;
    let (kf, nf) = (k as f64, n as f64);
    let lo = if k == 0 {
        0.0
    } else {
        Beta::new(kf, nf - kf + 1.0)
            .expect("positive shape")
            .inverse_cdf(alpha / 2.0)
    };
    let hi = if k == n {
        1.0
    } else {
        Beta::new(kf + 1.0, nf - kf)
            .expect("positive shape")
            .inverse_cdf(1.0 - alpha / 2.0)
    };
    (lo, hi)
}

/// Binomial standard error `√(p(1−p)/n)`.
pub fn binomial_se(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Result of a straight-line weighted least-squares fit `y ≈ a + b·x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    /// Slope standard error treating the weights as inverse variances.
    pub slope_se: f64,
    pub intercept_se: f64,
}

/// Weighted least squares with known inverse-variance weights.
pub fn weighted_line_fit(xs: &[f64], ys: &[f64], ws: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() || xs.len() != ws.len() {
        return Err(invalid("x, y and weight lists differ in length"));
    }
    if xs.len() < 2 {
        return Err(HeisError::DegenerateDesign("need at least two points".into()));
    }
    if ws.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
        return Err(invalid("weights must be positive and finite"));
    }
    let sw: f64 = ws.iter().sum();
    let xbar = xs.iter().zip(ws).map(|(x, w)| w * x).sum::<f64>() / sw;
    let ybar = ys.iter().zip(ws).map(|(y, w)| w * y).sum::<f64>() / sw;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for ((x, y), w) in xs.iter().zip(ys).zip(ws) {
        sxx += w * (x - xbar) * (x - xbar);
        sxy += w * (x - xbar) * (y - ybar);
    }
    let spread = xs.iter().map(|x| (x - xbar).abs()).fold(0.0, f64::max);
    if sxx <= 0.0 || spread <= 1e-12 * xbar.abs().max(1.0) {
        return Err(HeisError::DegenerateDesign("all x values coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    Ok(LineFit {
        intercept,
        slope,
        slope_se: (1.0 / sxx).sqrt(),
        intercept_se: (1.0 / sw + xbar * xbar / sxx).sqrt(),
    })
}
