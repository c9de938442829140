//! Scalar distribution routines used by the threshold and reference models.
//!
//! The special functions (erfc⁻¹, Γ, regularized incomplete Γ) come from
//! `statrs`; this module adds the domain checks and the χ² quantile solver.

use statrs::function::{erf, gamma};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("probability {0} must lie strictly inside (0, 1)")]
    ProbabilityOutOfRange(f64),
    #[error("argument {0} must be non-negative and finite")]
    NegativeArgument(f64),
    #[error("degrees of freedom must be at least 1")]
    ZeroDof,
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erf::erfc(-x / std::f64::consts::SQRT_2)
}

/// Inverse of the standard normal CDF, Φ⁻¹(p).
pub fn inverse_normal_cdf(p: f64) -> Result<f64, StatsError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(StatsError::ProbabilityOutOfRange(p));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    let mut x = -std::f64::consts::SQRT_2 * erf::erfc_inv(2.0 * p);
    // One Halley step polishes the last couple of ulps in the tails.
    let pdf = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    if pdf > 0.0 {
        let err = normal_cdf(x) - p;
        let u = err / pdf;
        x -= u / (1.0 + 0.5 * x * u);
    }
    Ok(x)
}

fn check_dof(dof: u32) -> Result<f64, StatsError> {
    if dof == 0 {
        Err(StatsError::ZeroDof)
    } else {
        Ok(f64::from(dof))
    }
}

/// χ² CDF with `dof` degrees of freedom.
pub fn chi2_cdf(x: f64, dof: u32) -> Result<f64, StatsError> {
    let k = check_dof(dof)?;
    if !(x >= 0.0) || x.is_nan() {
        return Err(StatsError::NegativeArgument(x));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    Ok(gamma::gamma_lr(0.5 * k, 0.5 * x))
}

fn chi2_sf(x: f64, k: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        gamma::gamma_ur(0.5 * k, 0.5 * x)
    }
}

fn chi2_pdf(x: f64, k: f64) -> f64 {
    if x <= 0.0 {
        return if k < 2.0 {
            f64::INFINITY
        } else if k == 2.0 {
            0.5
        } else {
            0.0
        };
    }
    let half = 0.5 * k;
    ((half - 1.0) * x.ln() - 0.5 * x - half * std::f64::consts::LN_2 - gamma::ln_gamma(half)).exp()
}

/// Inverse χ² CDF: the `x` with `chi2_cdf(x, dof) == p`.
///
/// Safeguarded Newton iteration on whichever tail is smaller, with a
/// bisection fallback that keeps the iterate inside a shrinking bracket.
pub fn chi2_quantile(p: f64, dof: u32) -> Result<f64, StatsError> {
    let k = check_dof(dof)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(StatsError::ProbabilityOutOfRange(p));
    }
    if dof == 2 {
        return Ok(-2.0 * (-p).ln_1p());
    }
    let upper_tail = p > 0.5;
    let target = if upper_tail { 1.0 - p } else { p };
    // residual(x) is increasing in x in both branches
    let residual = |x: f64| {
        if upper_tail {
            target - chi2_sf(x, k)
        } else {
            gamma::gamma_lr(0.5 * k, 0.5 * x) - target
        }
    };

    let mut lo = 0.0;
    let mut hi = k.max(1.0);
    while residual(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    // Wilson-Hilferty starting point
    let z = inverse_normal_cdf(p)?;
    let c = 2.0 / (9.0 * k);
    let mut x = (k * (1.0 - c + z * c.sqrt()).powi(3)).clamp(lo, hi);
    if !(x > lo && x < hi) {
        x = 0.5 * (lo + hi);
    }
    for _ in 0..200 {
        let r = residual(x);
        if r == 0.0 {
            return Ok(x);
        }
        if r < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = chi2_pdf(x, k);
        let mut next = if d.is_finite() && d > 0.0 { x - r / d } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * x.abs().max(1e-300) || hi - lo <= 1e-15 * hi {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

/// Factorial extended to the non-negative reals, `(x)! = Γ(x + 1)`.
pub fn generalized_factorial(x: f64) -> Result<f64, StatsError> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(StatsError::NegativeArgument(x));
    }
    if x.fract() == 0.0 && x <= 170.0 {
        // exact product for integers
        let n = x as u32;
        return Ok((1..=n).fold(1.0, |acc, i| acc * f64::from(i)));
    }
    Ok(gamma::gamma(x + 1.0))
}

/// Poisson probability mass `P(N = n)` for mean `mean ≥ 0`.
pub fn poisson_pmf(n: u64, mean: f64) -> f64 {
    if mean == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let n_f = n as f64;
    (n_f * mean.ln() - mean - gamma::ln_gamma(n_f + 1.0)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn inverse_normal_symmetry_and_center() {
        assert_eq!(inverse_normal_cdf(0.5).unwrap(), 0.0);
        for &p in &[1e-6, 1e-4, 0.01, 0.1, 0.3, 0.49] {
            let a = inverse_normal_cdf(p).unwrap();
            let b = inverse_normal_cdf(1.0 - p).unwrap();
            assert_relative_eq!(a, -b, epsilon = 1e-9);
        }
    }

    #[test]
    fn inverse_normal_round_trip() {
        for i in 1..1000 {
            let p = i as f64 / 1000.0;
            let x = inverse_normal_cdf(p).unwrap();
            assert!((normal_cdf(x) - p).abs() < 1e-10, "p={p}");
        }
    }

    #[test]
    fn inverse_normal_rejects_edges() {
        assert!(inverse_normal_cdf(0.0).is_err());
        assert!(inverse_normal_cdf(1.0).is_err());
        assert!(inverse_normal_cdf(f64::NAN).is_err());
    }

    #[test]
    fn chi2_two_dof_closed_form() {
        for &x in &[0.1, 1.0, 1.3863, 5.0, 20.0] {
            assert_relative_eq!(chi2_cdf(x, 2).unwrap(), 1.0 - (-x / 2.0_f64).exp(), epsilon = 1e-12);
        }
        assert!((chi2_cdf(1.3863, 2).unwrap() - 0.5).abs() < 1e-4);
        assert_relative_eq!(chi2_quantile(0.99, 2).unwrap(), -2.0 * 0.01_f64.ln(), epsilon = 1e-12);
        assert!((chi2_quantile(0.99, 2).unwrap() - 9.2103).abs() < 1e-4);
    }

    #[test]
    fn chi2_zero_is_zero() {
        for dof in 1..8 {
            assert_eq!(chi2_cdf(0.0, dof).unwrap(), 0.0);
        }
    }

    #[test]
    fn chi2_round_trip_many_dof() {
        for dof in [1, 2, 3, 4, 7, 50, 100, 1000, 20000] {
            for &p in &[0.005, 0.05, 0.2, 0.5, 0.8, 0.99, 0.995] {
                let x = chi2_quantile(p, dof).unwrap();
                let back = chi2_cdf(x, dof).unwrap();
                assert!((back - p).abs() < 1e-9, "dof={dof} p={p} back={back}");
            }
        }
    }

    #[test]
    fn chi2_errors() {
        assert_eq!(chi2_cdf(1.0, 0), Err(StatsError::ZeroDof));
        assert!(chi2_cdf(-1.0, 2).is_err());
        assert!(chi2_quantile(1.0, 2).is_err());
        assert!(chi2_quantile(0.0, 3).is_err());
    }

    #[test]
    fn factorial_integers_and_halves() {
        assert_eq!(generalized_factorial(0.0).unwrap(), 1.0);
        assert_eq!(generalized_factorial(4.0).unwrap(), 24.0);
        assert_relative_eq!(
            generalized_factorial(0.5).unwrap(),
            std::f64::consts::PI.sqrt() / 2.0,
            max_relative = 1e-12
        );
        assert!(generalized_factorial(-0.1).is_err());
    }

    #[test]
    fn poisson_pmf_sums_to_one() {
        let s: f64 = (0..60).map(|n| poisson_pmf(n, 4.0)).sum();
        assert_relative_eq!(s, 1.0, epsilon = 1e-12);
        assert_eq!(poisson_pmf(0, 0.0), 1.0);
    }
}
