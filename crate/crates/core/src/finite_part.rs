//! Hadamard finite parts `FP int_0^inf f(x) / x^2m dx` for even `f`.
//!
//! With `T` the Taylor polynomial of `f` of degree `2m-1` and a split point
//! `a > 0`,
//!
//! ```text
//! FP = sum_{j<2m} f^(j)(0)/j! * a^(j-2m+1)/(j-2m+1)
//!    + int_0^a (f - T)/x^2m dx + int_a^inf f/x^2m dx.
//! ```
//!
//! The `j = 2m-1` monomial would contribute a logarithm; it never appears
//! because odd Taylor coefficients of an even function vanish.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Result, SincError};
use crate::functions::EvenEntireFunction;
use crate::quadrature::{adaptive_gauss, integrate_semi_infinite, SegmentOptions};
use crate::special::{bessel_j, BesselSeriesConfig};

pub const DEFAULT_SPLIT_POINT: f64 = 1.0;
pub const DEFAULT_FP_TOL: f64 = 1e-10;

/// Segment cap for the tail integral.
const TAIL_MAX_SEGMENTS: usize = 2_000_000;
const CORE_MAX_DEPTH: u32 = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FinitePartMethod {
    TaylorSubtraction,
    ClosedFormMellin,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FinitePartResult {
    pub value: f64,
    pub m: usize,
    pub method: FinitePartMethod,
    /// `None` for closed-form results.
    pub split_point: Option<f64>,
    pub tail_error_estimate: f64,
}

/// Coefficient of `eps^power` in the divergent part of `int_eps^inf f/x^2m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergentTerm {
    pub power: i32,
    pub coefficient: f64,
}

/// Report of the would-be divergent terms alongside the finite part.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinitePartDiagnostic {
    pub value: f64,
    pub method: FinitePartMethod,
    pub split_point: Option<f64>,
    pub divergent_coefficients: Vec<DivergentTerm>,
    /// Coefficient of `-ln(eps)`; zero for every even `f`.
    pub log_coefficient: f64,
}

fn check_order(f: &EvenEntireFunction, m: usize) -> Result<()> {
    if m < 1 {
        return Err(SincError::InvalidParam("finite part needs m >= 1".into()));
    }
    if 2 * m - 2 > f.series_order() {
        return Err(SincError::OrderTooHigh {
            requested: 2 * m - 2,
            max: f.series_order(),
        });
    }
    Ok(())
}

/// Coefficient `f^(2m-1)(0) / (2m-1)!` that would multiply a logarithm.
fn log_coefficient(f: &EvenEntireFunction, m: usize) -> f64 {
    f.taylor_coefficient(2 * m - 1).unwrap_or(0.0)
}

/// Divergent terms `f^(j)(0)/j! * eps^(j-2m+1) / (2m-1-j)` for even
/// `j < 2m-1`.
pub fn divergent_coefficients(f: &EvenEntireFunction, m: usize) -> Result<Vec<DivergentTerm>> {
    check_order(f, m)?;
    (0..2 * m - 1)
        .step_by(2)
        .map(|j| {
            Ok(DivergentTerm {
                power: j as i32 - 2 * m as i32 + 1,
                coefficient: f.taylor_coefficient(j)? / (2 * m - 1 - j) as f64,
            })
        })
        .collect()
}

/// `(f - T_{2m-1}) / x^2m`, extended continuously to the origin.
struct SubtractedCore<'a> {
    f: &'a EvenEntireFunction,
    m: usize,
    /// Below this radius the Taylor remainder series is summed directly.
    series_radius: f64,
}

impl<'a> SubtractedCore<'a> {
    fn new(f: &'a EvenEntireFunction, m: usize) -> Self {
        let tau = f.exponential_type();
        let coeffs = f.taylor_coefficients();
        let remainder = coeffs.get(2 * m..).unwrap_or(&[]);
        let series_radius = if tau == 0.0 {
            f64::INFINITY
        } else if remainder.len() < 3 {
            0.0
        } else {
            // Start where the remainder terms peak for m >= 1 and shrink until
            // the last stored term is negligible against the largest one.
            let mut rho = (2 * m).max(2) as f64 / tau;
            let last = remainder.len() - 1;
            loop {
                let size = |i: usize| remainder[i].abs() * rho.powi(i as i32);
                let largest = (0..=last).map(size).fold(0.0, f64::max);
                if largest == 0.0 || size(last) <= 1e-17 * largest || rho * tau < 1e-3 {
                    break rho;
                }
                rho *= 0.5;
            }
        };
        SubtractedCore {
            f,
            m,
            series_radius,
        }
    }

    fn eval(&self, x: f64) -> f64 {
        let coeffs = self.f.taylor_coefficients();
        let two_m = 2 * self.m;
        if x.abs() <= self.series_radius {
            // sum_{j >= 2m, even} c_j x^(j-2m), Horner in x^2
            let y = x * x;
            let top = coeffs.len() - 1;
            let mut acc = 0.0;
            let mut j = top - (top - two_m) % 2;
            loop {
                acc = acc * y + coeffs[j];
                if j < two_m + 2 {
                    break;
                }
                j -= 2;
            }
            if top < two_m {
                0.0
            } else {
                acc
            }
        } else {
            let mut value = self.f.eval_at(x) / x.powi(two_m as i32);
            for (j, c) in coeffs.iter().enumerate().take(two_m) {
                if *c != 0.0 {
                    value -= c * x.powi(j as i32 - two_m as i32);
                }
            }
            value
        }
    }
}

/// Finite part by Taylor subtraction at split point `a`, each numerical
/// piece resolved to `tol / 2`.
pub fn finite_part_integral(
    f: &EvenEntireFunction,
    m: usize,
    a: f64,
    tol: f64,
) -> Result<FinitePartResult> {
    check_order(f, m)?;
    if !(a > 0.0 && a.is_finite()) {
        return Err(SincError::InvalidParam(format!(
            "split point must be > 0, got {a}"
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(SincError::InvalidParam(format!(
            "tolerance must be > 0, got {tol}"
        )));
    }
    if log_coefficient(f, m) != 0.0 {
        return Err(SincError::InvalidParam(format!(
            "odd Taylor coefficient of order {} is nonzero; f is not even",
            2 * m - 1
        )));
    }

    let two_m = 2 * m as i32;
    let monomials: f64 = (0..2 * m - 1)
        .step_by(2)
        .map(|j| {
            let e = j as i32 - two_m + 1;
            f.taylor_coefficient(j).map(|c| c * a.powi(e) / e as f64)
        })
        .sum::<Result<f64>>()?;

    let core = SubtractedCore::new(f, m);
    let core_fn = |x: f64| core.eval(x);
    let core_int = adaptive_gauss(&core_fn, 0.0, a, 0.5 * tol, CORE_MAX_DEPTH);
    if core_int.error_estimate > 0.5 * tol {
        return Err(SincError::ToleranceNotMet {
            tol,
            estimate: core_int.error_estimate,
        });
    }

    let (tail, tail_err) = tail_integral(f, m, a, 0.5 * tol)?;

    Ok(FinitePartResult {
        value: monomials + core_int.value + tail,
        m,
        method: FinitePartMethod::TaylorSubtraction,
        split_point: Some(a),
        tail_error_estimate: tail_err,
    })
}

/// `int_a^inf f/x^2m` to within `tol`: an adaptive head up to where the
/// segments are short relative to their distance from the origin, then the
/// segmented tail with half-periods of `f` as segments.
fn tail_integral(f: &EvenEntireFunction, m: usize, a: f64, tol: f64) -> Result<(f64, f64)> {
    let tau = f.exponential_type();
    let period = if tau > 0.0 { PI / tau } else { a };
    let two_m = 2 * m as i32;
    let g = |x: f64| f.eval_at(x) / x.powi(two_m);
    let start = a.max(2.0 * period);
    let head = if start > a {
        let h = adaptive_gauss(&g, a, start, 0.5 * tol, CORE_MAX_DEPTH);
        if h.error_estimate > 0.5 * tol {
            return Err(SincError::ToleranceNotMet {
                tol,
                estimate: h.error_estimate,
            });
        }
        h
    } else {
        crate::quadrature::AdaptiveResult {
            value: 0.0,
            error_estimate: 0.0,
            panels: 0,
        }
    };
    let bound = |x: f64| f.sup_tail_estimate(x) * x.powi(1 - two_m) / (two_m - 1) as f64;
    let opts = SegmentOptions::new(0.5 * tol, TAIL_MAX_SEGMENTS);
    match integrate_semi_infinite(&g, start, period, Some(&bound), &opts) {
        Ok(r) => Ok((head.value + r.value, head.error_estimate + r.error_estimate)),
        Err(SincError::NotConverged(best)) => Err(SincError::ToleranceNotMet {
            tol,
            estimate: best.error_estimate,
        }),
        Err(e) => Err(e),
    }
}

/// `FP int_0^inf f/x^4` for `f = sin(sqrt(tau^2 x^2 + sigma^2)) / sqrt(...)`,
/// from the analytically continued Mellin transform:
/// `pi tau^3 J_2(sigma) / (6 sigma^2)`.
pub fn finite_part_paper_example_closed_form(tau: f64, sigma: f64) -> Result<FinitePartResult> {
    if !(tau > 0.0 && tau.is_finite()) || !(sigma > 0.0 && sigma.is_finite()) {
        return Err(SincError::InvalidParam(format!(
            "closed form needs tau > 0 and sigma > 0, got tau={tau}, sigma={sigma}"
        )));
    }
    let j2 = bessel_j(2, sigma, &BesselSeriesConfig::default())?;
    Ok(FinitePartResult {
        value: PI * tau.powi(3) * j2 / (6.0 * sigma * sigma),
        m: 2,
        method: FinitePartMethod::ClosedFormMellin,
        split_point: None,
        tail_error_estimate: 0.0,
    })
}

/// Finite part together with the divergent coefficients it discards.
pub fn finite_part_diagnostic(
    f: &EvenEntireFunction,
    m: usize,
    a: f64,
    tol: f64,
) -> Result<FinitePartDiagnostic> {
    let fp = finite_part_integral(f, m, a, tol)?;
    Ok(FinitePartDiagnostic {
        value: fp.value,
        method: fp.method,
        split_point: fp.split_point,
        divergent_coefficients: divergent_coefficients(f, m)?,
        log_coefficient: log_coefficient(f, m),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_has_zero_finite_part() {
        let one = EvenEntireFunction::constant(1.0).unwrap();
        let r = finite_part_integral(&one, 1, 1.0, 1e-10).unwrap();
        assert!(r.value.abs() < 1e-12, "{}", r.value);
        for m in 2..=3 {
            let r = finite_part_integral(&one, m, 1.0, 1e-10).unwrap();
            assert!(r.value.abs() < 1e-10, "m={m}: {}", r.value);
        }
    }

    #[test]
    fn cosine_m1_known_value() {
        // FP int_0^inf cos(tau x)/x^2 = int_0^inf (cos(tau x) - 1)/x^2 = -pi tau / 2
        let tau = 1.3;
        let f = EvenEntireFunction::cosine(tau).unwrap();
        let r = finite_part_integral(&f, 1, 1.0, 1e-10).unwrap();
        assert!((r.value + PI * tau / 2.0).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn split_point_invariance() {
        let f = EvenEntireFunction::cosine(1.0).unwrap();
        let a = finite_part_integral(&f, 1, 2.0, 1e-10).unwrap().value;
        let b = finite_part_integral(&f, 1, 0.5, 1e-10).unwrap().value;
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn matches_closed_form() {
        let f = EvenEntireFunction::paper_example(1.0, 1.0).unwrap();
        let num = finite_part_integral(&f, 2, 1.0, 1e-10).unwrap();
        let closed = finite_part_paper_example_closed_form(1.0, 1.0).unwrap();
        assert!(
            (num.value - closed.value).abs() < 1e-9,
            "{} vs {}",
            num.value,
            closed.value
        );
        assert_eq!(closed.method, FinitePartMethod::ClosedFormMellin);
        assert_eq!(closed.split_point, None);
    }

    #[test]
    fn closed_form_scaling_and_small_sigma() {
        let one = finite_part_paper_example_closed_form(1.0, 1.0)
            .unwrap()
            .value;
        let two = finite_part_paper_example_closed_form(2.0, 1.0)
            .unwrap()
            .value;
        assert!((two - 8.0 * one).abs() < 1e-15);
        let tiny = finite_part_paper_example_closed_form(1.0, 1e-6)
            .unwrap()
            .value;
        assert!((tiny - PI / 48.0).abs() < 1e-10);
    }

    #[test]
    fn divergent_terms() {
        let f = EvenEntireFunction::cosine(2.0).unwrap();
        let d = divergent_coefficients(&f, 2).unwrap();
        // j = 0: 1 * eps^-3 / 3; j = 2: (-2) * eps^-1 / 1
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].power, -3);
        assert!((d[0].coefficient - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(d[1].power, -1);
        assert!((d[1].coefficient + 2.0).abs() < 1e-15);
        let diag = finite_part_diagnostic(&f, 2, 1.0, 1e-10).unwrap();
        assert_eq!(diag.log_coefficient, 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        let f = EvenEntireFunction::cosine(1.0).unwrap();
        assert!(finite_part_integral(&f, 0, 1.0, 1e-10).is_err());
        assert!(finite_part_integral(&f, 1, 0.0, 1e-10).is_err());
        assert!(finite_part_integral(&f, 1, 1.0, 0.0).is_err());
        assert!(matches!(
            finite_part_integral(&f, 40, 1.0, 1e-10),
            Err(SincError::OrderTooHigh { .. })
        ));
        assert!(finite_part_paper_example_closed_form(0.0, 1.0).is_err());
    }
}
