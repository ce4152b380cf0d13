//! Brute-force evaluation of `I(lambda) = int_0^inf f(x) sin^n(lambda x) / x^n dx`.
//!
//! The half-line is cut at the zeros `k pi / lambda` of the kernel and each
//! segment is integrated with Gauss-Legendre panels. For `n >= 2` the run
//! stops as soon as [`tail_bound`] certifies the truncation; otherwise, and
//! always for `n = 1`, it relies on the accelerated partial-sum limit from
//! [`crate::quadrature::integrate_semi_infinite`].

use std::f64::consts::PI;

use crate::error::{Result, SincError};
use crate::functions::EvenEntireFunction;
use crate::quadrature::{integrate_semi_infinite, SegmentOptions};

pub use crate::quadrature::{QuadratureResult, TailControl};

pub const DEFAULT_MAX_SEGMENTS: usize = 2_000_000;

/// Below `x < NEAR_ORIGIN * pi / lambda` the kernel uses its series.
pub const NEAR_ORIGIN: f64 = 0.1;

/// `sin^n(lambda x) / x^n`, finite at the origin.
pub fn sinc_kernel(n: u32, lambda: f64, x: f64) -> f64 {
    let t = lambda * x;
    let ratio = if x.abs() < NEAR_ORIGIN * PI / lambda {
        // sin(t)/t = 1 - t^2/6 + ...; |t| < 0.1 pi needs nine terms.
        let t2 = t * t;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..10 {
            term *= -t2 / ((2 * k) as f64 * (2 * k + 1) as f64);
            sum += term;
        }
        lambda * sum
    } else {
        t.sin() / x
    };
    ratio.powi(n as i32)
}

/// `sup_{x >= X} |f(x)| * X^(1-n) / (n-1)`, bounding the tail of the
/// transform beyond `X` via `|sin^n| <= 1`.
pub fn tail_bound(f: &EvenEntireFunction, n: u32, x: f64) -> Result<f64> {
    if n < 2 {
        return Err(SincError::Unsupported(
            "the n = 1 tail is only conditionally convergent; no bound exists".into(),
        ));
    }
    if x.is_nan() || x <= 0.0 {
        return Err(SincError::InvalidParam(format!(
            "tail start must be > 0, got {x}"
        )));
    }
    Ok(f.sup_tail_estimate(x) * x.powi(1 - n as i32) / (n - 1) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub tol: f64,
    pub max_segments: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            tol: 1e-10,
            max_segments: DEFAULT_MAX_SEGMENTS,
        }
    }
}

impl OracleConfig {
    pub fn with_tol(tol: f64) -> Self {
        OracleConfig {
            tol,
            ..Default::default()
        }
    }
}

/// Gauss panels needed per half-period so that neither the kernel nor `f`
/// turns through more than about one period per panel.
fn panels_for(n: u32, lambda: f64, tau: f64) -> usize {
    let kernel = if n > 16 { n.div_ceil(16) as usize } else { 1 };
    let phase_of_f = tau * PI / lambda;
    let from_f = (phase_of_f / (2.0 * PI)).ceil() as usize;
    kernel.max(from_f).max(1)
}

pub fn sinc_transform_oracle(
    f: &EvenEntireFunction,
    n: u32,
    lambda: f64,
    cfg: &OracleConfig,
) -> Result<QuadratureResult> {
    if n < 1 {
        return Err(SincError::InvalidParam("sinc power n must be >= 1".into()));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(SincError::InvalidParam(format!(
            "lambda must be > 0, got {lambda}"
        )));
    }
    if cfg.tol.is_nan() || cfg.tol <= 0.0 {
        return Err(SincError::InvalidParam(format!(
            "tol must be > 0, got {}",
            cfg.tol
        )));
    }
    let integrand = |x: f64| f.eval_at(x) * sinc_kernel(n, lambda, x);
    let mut opts = SegmentOptions::new(cfg.tol, cfg.max_segments);
    opts.panels_per_segment = panels_for(n, lambda, f.exponential_type());
    let period = PI / lambda;
    if n >= 2 {
        let bound = |x: f64| tail_bound(f, n, x).unwrap_or(f64::INFINITY);
        integrate_semi_infinite(&integrand, 0.0, period, Some(&bound), &opts)
    } else {
        integrate_semi_infinite(&integrand, 0.0, period, None::<&fn(f64) -> f64>, &opts)
    }
}
