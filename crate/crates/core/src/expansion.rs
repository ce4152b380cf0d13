//! Terminating expansions of the Sinc transform for even `f`.
//!
//! For `n = 2m` and `lambda > tau/2`:
//!
//! ```text
//! I(lambda) = (2m)!/(2^2m (m!)^2) * FP int_0^inf f/x^2m
//!           - pi (-1)^m (2m)!/2^2m * sum_{l<m} C_{l,m} lambda^(2l+1)
//! ```
//!
//! and for `n = 2m+1` and `lambda > tau`:
//!
//! ```text
//! I(lambda) = (-1)^m pi (2m+1)!/2^(2m+1) * sum_{l<=m} D_{l,m} lambda^(2l)
//! ```
//!
//! All combinatorial factors are exact rationals; floating point enters only
//! when a factor meets `pi` and a derivative of `f` at zero.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, SincError};
use crate::finite_part::{finite_part_integral, FinitePartResult};
use crate::functions::EvenEntireFunction;
use crate::rational::Rational;
use crate::special::factorial;

/// Largest sinc power the engine accepts.
pub const MAX_SINC_POWER: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: usize) -> Self {
        if n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Order in which the terms of an inner sum are accumulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SummationOrder {
    Forward,
    Reverse,
}

fn sign(k: usize) -> BigInt {
    if k.is_multiple_of(2) {
        BigInt::from(1)
    } else {
        BigInt::from(-1)
    }
}

fn ordered_sum(terms: Vec<Rational>, order: SummationOrder) -> Rational {
    match order {
        SummationOrder::Forward => terms.into_iter().sum(),
        SummationOrder::Reverse => terms.into_iter().rev().sum(),
    }
}

/// `sum_{k=0}^{m-1} (-1)^k (m-k)^(2l+1) / (k! (2m-k)!)`
pub fn inner_sum_even(l: usize, m: usize) -> Result<Rational> {
    inner_sum_even_ordered(l, m, SummationOrder::Forward)
}

pub fn inner_sum_even_ordered(l: usize, m: usize, order: SummationOrder) -> Result<Rational> {
    if m < 1 || l >= m {
        return Err(SincError::OutOfRange(format!(
            "inner sum (even) needs 0 <= l < m, m >= 1; got l={l}, m={m}"
        )));
    }
    let terms = (0..m)
        .map(|k| {
            let numer = sign(k) * BigInt::from(m - k).pow(2 * l as u32 + 1);
            let denom = factorial(k as u32) * factorial((2 * m - k) as u32);
            Rational::new(numer, denom).expect("factorials are nonzero")
        })
        .collect();
    Ok(ordered_sum(terms, order))
}

/// `sum_{k=0}^{m} (-1)^k (2m-2k+1)^(2l) / (k! (2m+1-k)!)`
pub fn inner_sum_odd(l: usize, m: usize) -> Result<Rational> {
    inner_sum_odd_ordered(l, m, SummationOrder::Forward)
}

pub fn inner_sum_odd_ordered(l: usize, m: usize, order: SummationOrder) -> Result<Rational> {
    if l > m {
        return Err(SincError::OutOfRange(format!(
            "inner sum (odd) needs 0 <= l <= m; got l={l}, m={m}"
        )));
    }
    let terms = (0..=m)
        .map(|k| {
            let numer = sign(k) * BigInt::from(2 * m - 2 * k + 1).pow(2 * l as u32);
            let denom = factorial(k as u32) * factorial((2 * m + 1 - k) as u32);
            Rational::new(numer, denom).expect("factorials are nonzero")
        })
        .collect();
    Ok(ordered_sum(terms, order))
}

/// Exact part of `C_{l,m}`: everything except `f^(2m-2l-2)(0)`.
pub fn c_prefactor(l: usize, m: usize) -> Result<Rational> {
    let inner = inner_sum_even(l, m)?;
    let numer = sign(l) * BigInt::from(2).pow(2 * l as u32 + 1);
    let denom = factorial(2 * l as u32 + 1) * factorial((2 * m - 2 * l - 2) as u32);
    Ok(Rational::new(numer, denom).expect("nonzero") * inner)
}

/// Exact part of `D_{l,m}`: everything except `f^(2m-2l)(0)`.
pub fn d_prefactor(l: usize, m: usize) -> Result<Rational> {
    let inner = inner_sum_odd(l, m)?;
    let denom = factorial(2 * l as u32) * factorial((2 * m - 2 * l) as u32);
    Ok(Rational::new(sign(l), denom).expect("nonzero") * inner)
}

/// `C_{l,m}` for the function `f`.
pub fn coefficient_c(l: usize, m: usize, f: &EvenEntireFunction) -> Result<f64> {
    let pre = c_prefactor(l, m)?;
    Ok(pre.to_f64() * f.derivative_at_zero(2 * m - 2 * l - 2)?)
}

/// `D_{l,m}` for the function `f`.
pub fn coefficient_d(l: usize, m: usize, f: &EvenEntireFunction) -> Result<f64> {
    let pre = d_prefactor(l, m)?;
    Ok(pre.to_f64() * f.derivative_at_zero(2 * m - 2 * l)?)
}

/// Lower end of the range where the expansion is exact: `tau/2` for even
/// `n`, `tau` for odd `n`.
pub fn threshold(n: usize, tau: f64) -> f64 {
    match Parity::of(n) {
        Parity::Even => 0.5 * tau,
        Parity::Odd => tau,
    }
}

fn check_power(n: usize) -> Result<()> {
    if n == 0 || n > MAX_SINC_POWER {
        return Err(SincError::OutOfRange(format!(
            "sinc power must be in 1..={MAX_SINC_POWER}, got {n}"
        )));
    }
    Ok(())
}

/// Rational factor multiplying `pi * prefactor * f^(j)(0)` in each
/// polynomial term.
pub fn outer_weight(n: usize) -> Result<Rational> {
    check_power(n)?;
    let m = n / 2;
    let w = Rational::new(factorial(n as u32), BigInt::from(2).pow(n as u32)).expect("nonzero");
    Ok(match Parity::of(n) {
        // -(-1)^m (2m)! / 2^2m
        Parity::Even if m.is_multiple_of(2) => -w,
        Parity::Even => w,
        // (-1)^m (2m+1)! / 2^(2m+1)
        Parity::Odd if m.is_multiple_of(2) => w,
        Parity::Odd => -w,
    })
}

/// `(2m)! / (2^2m (m!)^2)` for even `n`, zero for odd `n`.
pub fn finite_part_weight(n: usize) -> Result<Rational> {
    check_power(n)?;
    if n % 2 == 1 {
        return Ok(Rational::zero());
    }
    let m = n / 2;
    let mf = factorial(m as u32);
    Ok(Rational::new(
        factorial(n as u32),
        BigInt::from(2).pow(n as u32) * &mf * &mf,
    )
    .expect("nonzero"))
}

/// One row of the coefficient table for a given `n`, independent of `f`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientRow {
    pub l: usize,
    /// Power of `lambda` the row contributes to.
    pub power: usize,
    /// Exact part of `C_{l,m}` or `D_{l,m}`.
    pub prefactor: Rational,
    /// Order `j` of the derivative `f^(j)(0)` the prefactor multiplies.
    pub derivative_order: usize,
}

/// Exact coefficient rows for sinc power `n`, before the outer weight.
pub fn coefficient_rows(n: usize) -> Result<Vec<CoefficientRow>> {
    check_power(n)?;
    let m = n / 2;
    match Parity::of(n) {
        Parity::Even => (0..m)
            .map(|l| {
                Ok(CoefficientRow {
                    l,
                    power: 2 * l + 1,
                    prefactor: c_prefactor(l, m)?,
                    derivative_order: 2 * m - 2 * l - 2,
                })
            })
            .collect(),
        Parity::Odd => (0..=m)
            .map(|l| {
                Ok(CoefficientRow {
                    l,
                    power: 2 * l,
                    prefactor: d_prefactor(l, m)?,
                    derivative_order: 2 * m - 2 * l,
                })
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpansionTerm {
    pub power: usize,
    pub coefficient: f64,
}

/// Closed form of the transform for one `f` and one `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TerminatingExpansion {
    pub n: usize,
    pub m: usize,
    pub parity: Parity,
    pub fp_weight: Rational,
    /// Finite part `FP int_0^inf f/x^2m`; zero and unused for odd `n`.
    pub fp_value: f64,
    /// Terms in increasing power of `lambda`.
    pub terms: Vec<ExpansionTerm>,
    pub lambda_min: f64,
}

/// JSON export layout of an expansion.
#[derive(Debug, Clone, Serialize)]
pub struct CoefficientTable<'a> {
    pub n: usize,
    pub m: usize,
    pub parity: Parity,
    pub fp_weight: &'a Rational,
    pub terms: &'a [ExpansionTerm],
}

impl TerminatingExpansion {
    pub fn degree(&self) -> usize {
        self.terms.last().map_or(0, |t| t.power)
    }

    pub fn table(&self) -> CoefficientTable<'_> {
        CoefficientTable {
            n: self.n,
            m: self.m,
            parity: self.parity,
            fp_weight: &self.fp_weight,
            terms: &self.terms,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.table()).expect("table serializes")
    }

    /// Value at `lambda`; see [`evaluate_expansion`].
    pub fn evaluate(&self, lambda: f64, enforce: bool) -> Result<f64> {
        evaluate_expansion(self, lambda, enforce)
    }
}

/// Assembles the expansion. Even `n` needs the finite part `fp` of
/// `int_0^inf f/x^n`; odd `n` ignores it.
pub fn build_expansion(
    f: &EvenEntireFunction,
    n: usize,
    fp: Option<&FinitePartResult>,
) -> Result<TerminatingExpansion> {
    check_power(n)?;
    let parity = Parity::of(n);
    let m = n / 2;
    let fp_value = match (parity, fp) {
        (Parity::Even, None) => return Err(SincError::MissingFinitePart { n }),
        (Parity::Even, Some(fp)) if fp.m != m => {
            return Err(SincError::InvalidParam(format!(
                "finite part was computed for m = {}, expansion needs m = {m}",
                fp.m
            )))
        }
        (Parity::Even, Some(fp)) => fp.value,
        (Parity::Odd, _) => 0.0,
    };
    let outer = outer_weight(n)?;
    let terms = coefficient_rows(n)?
        .into_iter()
        .map(|row| {
            let exact = &outer * &row.prefactor;
            let deriv = f.derivative_at_zero(row.derivative_order)?;
            Ok(ExpansionTerm {
                power: row.power,
                coefficient: PI * exact.to_f64() * deriv,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TerminatingExpansion {
        n,
        m,
        parity,
        fp_weight: finite_part_weight(n)?,
        fp_value,
        terms,
        lambda_min: threshold(n, f.exponential_type()),
    })
}

/// [`build_expansion`] with the finite part computed by Taylor subtraction at
/// split point `split` and tolerance `tol`.
pub fn build_expansion_with_finite_part(
    f: &EvenEntireFunction,
    n: usize,
    split: f64,
    tol: f64,
) -> Result<TerminatingExpansion> {
    check_power(n)?;
    if n % 2 == 1 {
        return build_expansion(f, n, None);
    }
    let fp = finite_part_integral(f, n / 2, split, tol)?;
    build_expansion(f, n, Some(&fp))
}

/// `fp_weight * fp_value + sum_p coefficient_p lambda^p`. With `enforce`,
/// `lambda <= lambda_min` is an error because the closed form is not claimed
/// there.
pub fn evaluate_expansion(e: &TerminatingExpansion, lambda: f64, enforce: bool) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(SincError::InvalidParam(format!(
            "lambda must be > 0, got {lambda}"
        )));
    }
    if enforce && lambda <= e.lambda_min {
        return Err(SincError::BelowThreshold {
            lambda,
            threshold: e.lambda_min,
        });
    }
    let poly: f64 = e
        .terms
        .iter()
        .map(|t| t.coefficient * lambda.powi(t.power as i32))
        .sum();
    let fp = if e.fp_weight.is_zero() {
        0.0
    } else {
        e.fp_weight.to_f64() * e.fp_value
    };
    Ok(fp + poly)
}

/// `|sin^n(theta) - binomial exponential sum|` with `n = 2m` or `2m+1`.
///
/// Even: `(-1)^m (2m)!/2^2m sum_k (-1)^k/(k!(2m-k)!) e^(2i theta (m-k))`.
/// Odd: `-i (-1)^m (2m+1)!/2^(2m+1) sum_k (-1)^k/(k!(2m+1-k)!) e^(i theta (2m+1-2k))`.
pub fn sin_power_identity_residual(m: usize, parity: Parity, theta: f64) -> Result<f64> {
    if m > 12 {
        return Err(SincError::OutOfRange(format!(
            "identity check supports m <= 12, got {m}"
        )));
    }
    let n = match parity {
        Parity::Even => 2 * m,
        Parity::Odd => 2 * m + 1,
    };
    let fact = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
    let alt = |k: usize| if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let sum: Complex64 = (0..=n)
        .map(|k| {
            let phase = theta * (n as f64 - 2.0 * k as f64);
            Complex64::from_polar(alt(k) / (fact(k) * fact(n - k)), phase)
        })
        .sum();
    let scale = alt(m) * fact(n) / 2f64.powi(n as i32);
    let prefactor = match parity {
        Parity::Even => Complex64::new(scale, 0.0),
        Parity::Odd => Complex64::new(0.0, -scale),
    };
    Ok((prefactor * sum - theta.sin().powi(n as i32)).norm())
}
