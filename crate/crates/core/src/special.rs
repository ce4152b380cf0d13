//! Integer-order Bessel functions by ascending series, and exact factorial
//! ratios.

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Result, SincError};
use crate::rational::Rational;

/// Largest |x| accepted by [`bessel_j`].
pub const BESSEL_SERIES_LIMIT: f64 = 50.0;
/// Largest order accepted by [`bessel_j`].
pub const BESSEL_MAX_ORDER: u32 = 20;
/// Largest argument accepted by [`exact_factorial_ratio`].
pub const FACTORIAL_LIMIT: u32 = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselSeriesConfig {
    pub max_terms: usize,
    pub rel_tol: f64,
}

impl Default for BesselSeriesConfig {
    fn default() -> Self {
        BesselSeriesConfig {
            max_terms: 60,
            rel_tol: 1e-16,
        }
    }
}

/// J_nu(x) from the ascending series
/// `sum_p (-1)^p (x/2)^(2p+nu) / (p! (p+nu)!)`.
///
/// The series cancels badly for large |x|; it is accurate to roughly
/// `eps * exp(|x|)` absolute, which is fine for the O(1) arguments used here.
pub fn bessel_j(nu: u32, x: f64, cfg: &BesselSeriesConfig) -> Result<f64> {
    if !x.is_finite() || x.abs() > BESSEL_SERIES_LIMIT {
        return Err(SincError::OutOfRegime {
            x,
            limit: BESSEL_SERIES_LIMIT,
        });
    }
    if nu > BESSEL_MAX_ORDER {
        return Err(SincError::InvalidParam(format!(
            "Bessel order {nu} exceeds {BESSEL_MAX_ORDER}"
        )));
    }
    if cfg.max_terms < 10 {
        return Err(SincError::InvalidParam(
            "BesselSeriesConfig.max_terms must be at least 10".into(),
        ));
    }

    let half = 0.5 * x;
    let half_sq = half * half;
    let mut term = half.powi(nu as i32);
    for k in 1..=nu {
        term /= k as f64;
    }
    if term == 0.0 {
        return Ok(0.0);
    }

    let mut sum = term;
    for p in 1..cfg.max_terms {
        let p = p as f64;
        term *= -half_sq / (p * (p + nu as f64));
        sum += term;
        // Terms grow until p ~ |x|/2; only test once they are shrinking.
        if p > half.abs() && term.abs() <= cfg.rel_tol * sum.abs() {
            return Ok(sum);
        }
    }
    Err(SincError::SeriesNotConverged {
        max_terms: cfg.max_terms,
    })
}

/// `p! / q!` as a reduced rational.
pub fn exact_factorial_ratio(p: u32, q: u32) -> Result<Rational> {
    if p > FACTORIAL_LIMIT || q > FACTORIAL_LIMIT {
        return Err(SincError::OutOfRange(format!(
            "factorial ratio {p}!/{q}! exceeds limit {FACTORIAL_LIMIT}"
        )));
    }
    let (lo, hi) = if p >= q { (q, p) } else { (p, q) };
    let prod = falling_product(lo, hi);
    Ok(if p >= q {
        Rational::from_integer(prod)
    } else {
        Rational::new(BigInt::one(), prod).expect("nonzero product")
    })
}

/// `(lo+1) * ... * hi`, or 1 when `lo >= hi`.
fn falling_product(lo: u32, hi: u32) -> BigInt {
    (lo + 1..=hi).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `k!` as a big integer.
pub fn factorial(k: u32) -> BigInt {
    falling_product(0, k)
}
