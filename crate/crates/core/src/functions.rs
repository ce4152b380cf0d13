//! Even entire functions of exponential type.
//!
//! Each builtin carries its exponential type `tau` and a table of Taylor
//! coefficients at the origin built from its closed-form series, so that
//! high-order derivatives at zero are exact up to rounding rather than
//! finite-difference estimates.

use std::fmt;
use std::str::FromStr;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::error::{Result, SincError};

/// Default number of Taylor coefficients kept, i.e. the highest derivative
/// order available at zero.
pub const DEFAULT_SERIES_ORDER: usize = 64;

/// Below this value of |tau x| the sinc-type builtins use their series.
pub const SINC_SWITCH: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionKind {
    /// `sin(sqrt(tau^2 x^2 + sigma^2)) / sqrt(tau^2 x^2 + sigma^2)`
    PaperExample,
    /// `f == c`
    Constant,
    /// `cos(tau x)`
    Cosine,
    /// `sin(tau x) / (tau x)`
    Sinc,
    /// `(sin(tau x / 2) / (tau x / 2))^2`
    SincSquared,
}

impl FunctionKind {
    pub const ALL: [FunctionKind; 5] = [
        FunctionKind::PaperExample,
        FunctionKind::Constant,
        FunctionKind::Cosine,
        FunctionKind::Sinc,
        FunctionKind::SincSquared,
    ];

    /// Registry name used on the command line.
    pub fn name(self) -> &'static str {
        match self {
            FunctionKind::PaperExample => "paper-example",
            FunctionKind::Constant => "constant",
            FunctionKind::Cosine => "cos",
            FunctionKind::Sinc => "sinc",
            FunctionKind::SincSquared => "sinc2",
        }
    }
}

impl fmt::Display for FunctionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FunctionKind {
    type Err = SincError;

    fn from_str(s: &str) -> Result<Self> {
        FunctionKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| SincError::InvalidParam(format!("unknown function kind '{s}'")))
    }
}

/// Construction parameters for [`make_builtin`]. Fields irrelevant to a kind
/// are ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionParams {
    pub tau: f64,
    pub sigma: Option<f64>,
    pub c: f64,
    pub series_order: usize,
}

impl Default for FunctionParams {
    fn default() -> Self {
        FunctionParams {
            tau: 1.0,
            sigma: None,
            c: 1.0,
            series_order: DEFAULT_SERIES_ORDER,
        }
    }
}

impl FunctionParams {
    pub fn with_tau(tau: f64) -> Self {
        FunctionParams {
            tau,
            ..Default::default()
        }
    }
}

/// Anything that can be evaluated on the real line and differentiated at the
/// origin. Implemented by [`EvenEntireFunction`]; kept as a trait so the
/// evenness check can be pointed at arbitrary candidates.
pub trait EntireFunction {
    fn value(&self, x: f64) -> f64;
    fn derivative_at_zero(&self, j: usize) -> Result<f64>;
    fn series_order(&self) -> usize;
}

/// An even entire function of exponential type `tau`. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct EvenEntireFunction {
    kind: FunctionKind,
    tau: f64,
    sigma: f64,
    c: f64,
    /// Taylor coefficients `f^(j)(0) / j!` for `j = 0..=series_order`.
    taylor: Vec<f64>,
}

/// Builds one of the registry functions.
pub fn make_builtin(kind: FunctionKind, params: FunctionParams) -> Result<EvenEntireFunction> {
    let FunctionParams {
        tau,
        sigma,
        c,
        series_order,
    } = params;
    if !tau.is_finite() || tau < 0.0 {
        return Err(SincError::InvalidParam(format!(
            "tau must be finite and >= 0, got {tau}"
        )));
    }
    if series_order < 2 || series_order % 2 != 0 {
        return Err(SincError::InvalidParam(format!(
            "series_order must be even and >= 2, got {series_order}"
        )));
    }
    let sigma = match kind {
        FunctionKind::PaperExample => match sigma {
            Some(s) if s.is_finite() && s > 0.0 => s,
            Some(s) => {
                return Err(SincError::InvalidParam(format!(
                    "sigma must be > 0, got {s}"
                )))
            }
            None => return Err(SincError::InvalidParam("paper-example needs sigma".into())),
        },
        _ => 0.0,
    };
    if kind == FunctionKind::Constant && !c.is_finite() {
        return Err(SincError::InvalidParam(format!(
            "constant value must be finite, got {c}"
        )));
    }
    let tau = if kind == FunctionKind::Constant {
        0.0
    } else {
        tau
    };

    let taylor = match kind {
        FunctionKind::Constant => {
            let mut t = vec![0.0; series_order + 1];
            t[0] = c;
            t
        }
        // cos: (-1)^k tau^2k / (2k)!
        FunctionKind::Cosine => even_series(series_order, 1.0, |k| {
            -tau * tau / ((2 * k + 1) as f64 * (2 * k + 2) as f64)
        }),
        // sin(t)/t: (-1)^k tau^2k / (2k+1)!
        FunctionKind::Sinc => even_series(series_order, 1.0, |k| {
            -tau * tau / ((2 * k + 2) as f64 * (2 * k + 3) as f64)
        }),
        // (sin u / u)^2, u = tau x / 2: (-1)^k 2 tau^2k / (2k+2)!
        FunctionKind::SincSquared => even_series(series_order, 1.0, |k| {
            -tau * tau / ((2 * k + 3) as f64 * (2 * k + 4) as f64)
        }),
        FunctionKind::PaperExample => paper_example_taylor(tau, sigma, series_order),
    };

    Ok(EvenEntireFunction {
        kind,
        tau,
        sigma,
        c: if kind == FunctionKind::Constant {
            c
        } else {
            0.0
        },
        taylor,
    })
}

/// Fills the even coefficients from `a_0` and the ratio `a_{2k+2} / a_{2k}`.
fn even_series(order: usize, a0: f64, ratio: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut t = vec![0.0; order + 1];
    let mut a = a0;
    for k in 0..=order / 2 {
        t[2 * k] = a;
        a *= ratio(k);
    }
    t
}

/// Taylor coefficients of `g(tau^2 x^2)` with
/// `g(u) = sum_p (-1)^p (sigma^2 + u)^p / (2p+1)!`.
///
/// The coefficient of `x^2q` is `tau^2q g^(q)(0) / q!` and
/// `g^(q)(0) / q! = sum_{p>=q} (-1)^p C(p,q) sigma^(2(p-q)) / (2p+1)!`.
fn paper_example_taylor(tau: f64, sigma: f64, order: usize) -> Vec<f64> {
    let s2 = sigma * sigma;
    let mut t = vec![0.0; order + 1];
    let mut tau_pow = 1.0;
    // (-1)^q / (2q+1)!, the p = q term of the inner sum.
    let mut lead = 1.0;
    for q in 0..=order / 2 {
        let mut term = lead;
        let mut sum = term;
        let mut p = q;
        loop {
            let ratio = -s2 * (p + 1) as f64
                / ((p + 1 - q) as f64 * (2 * p + 2) as f64 * (2 * p + 3) as f64);
            term *= ratio;
            sum += term;
            p += 1;
            let past_peak = ratio.abs() < 1.0;
            if term == 0.0 || (past_peak && term.abs() <= 1e-18 * sum.abs()) || p > q + 400 {
                break;
            }
        }
        t[2 * q] = tau_pow * sum;
        tau_pow *= tau * tau;
        lead *= -1.0 / ((2 * q + 2) as f64 * (2 * q + 3) as f64);
    }
    t
}

fn sinc_series(t: f64) -> f64 {
    // Six terms of sin(t)/t; exact to rounding for |t| < 1e-2.
    let t2 = t * t;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..6 {
        term *= -t2 / ((2 * k) as f64 * (2 * k + 1) as f64);
        sum += term;
    }
    sum
}

fn sinc_of(t: f64) -> f64 {
    if t.abs() < SINC_SWITCH {
        sinc_series(t)
    } else {
        t.sin() / t
    }
}

impl EvenEntireFunction {
    pub fn paper_example(tau: f64, sigma: f64) -> Result<Self> {
        make_builtin(
            FunctionKind::PaperExample,
            FunctionParams {
                tau,
                sigma: Some(sigma),
                ..Default::default()
            },
        )
    }

    pub fn constant(c: f64) -> Result<Self> {
        make_builtin(
            FunctionKind::Constant,
            FunctionParams {
                c,
                tau: 0.0,
                ..Default::default()
            },
        )
    }

    pub fn cosine(tau: f64) -> Result<Self> {
        make_builtin(FunctionKind::Cosine, FunctionParams::with_tau(tau))
    }

    pub fn sinc(tau: f64) -> Result<Self> {
        make_builtin(FunctionKind::Sinc, FunctionParams::with_tau(tau))
    }

    pub fn sinc_squared(tau: f64) -> Result<Self> {
        make_builtin(FunctionKind::SincSquared, FunctionParams::with_tau(tau))
    }

    /// Looks a builtin up by registry name (`paper-example`, `constant`,
    /// `cos`, `sinc`, `sinc2`).
    pub fn from_name(name: &str, params: FunctionParams) -> Result<Self> {
        make_builtin(name.parse()?, params)
    }

    pub fn kind(&self) -> FunctionKind {
        self.kind
    }

    /// Exponential type; zero for constants.
    pub fn exponential_type(&self) -> f64 {
        self.tau
    }

    pub fn sigma(&self) -> Option<f64> {
        (self.kind == FunctionKind::PaperExample).then_some(self.sigma)
    }

    pub fn series_order(&self) -> usize {
        self.taylor.len() - 1
    }

    /// Value at a finite `x`.
    pub fn eval_at(&self, x: f64) -> f64 {
        let x = x.abs();
        match self.kind {
            FunctionKind::Constant => self.c,
            FunctionKind::Cosine => (self.tau * x).cos(),
            FunctionKind::Sinc => sinc_of(self.tau * x),
            FunctionKind::SincSquared => {
                let u = 0.5 * self.tau * x;
                let s = if (self.tau * x).abs() < SINC_SWITCH {
                    sinc_series(u)
                } else {
                    u.sin() / u
                };
                s * s
            }
            FunctionKind::PaperExample => {
                let r = (self.tau * x).hypot(self.sigma);
                r.sin() / r
            }
        }
    }

    /// `f^(j)(0) / j!`. Zero for odd `j`.
    pub fn taylor_coefficient(&self, j: usize) -> Result<f64> {
        self.taylor.get(j).copied().ok_or(SincError::OrderTooHigh {
            requested: j,
            max: self.series_order(),
        })
    }

    /// All Taylor coefficients `f^(j)(0) / j!`, `j = 0..=series_order`.
    pub fn taylor_coefficients(&self) -> &[f64] {
        &self.taylor
    }

    /// `f^(j)(0)`; exactly zero for odd `j`.
    pub fn derivative_at_zero(&self, j: usize) -> Result<f64> {
        let a = self.taylor_coefficient(j)?;
        if j % 2 == 1 {
            return Ok(0.0);
        }
        let fact: f64 = (1..=j).map(|k| k as f64).product();
        Ok(a * fact)
    }

    /// Bound on `sup |f(x)|` for `x >= x0`, by sampling `[x0, 4 x0]` with a
    /// 1.5 safety factor. Constants are exact.
    pub fn sup_tail_estimate(&self, x0: f64) -> f64 {
        if self.kind == FunctionKind::Constant {
            return self.c.abs();
        }
        // Resolve each oscillation of f with a few points.
        let span = 3.0 * x0;
        let per_period = 8.0;
        let points = ((span * self.tau / (2.0 * std::f64::consts::PI)) * per_period)
            .ceil()
            .clamp(64.0, 1e5) as usize;
        let max = (0..=points)
            .map(|i| self.eval_at(x0 + span * i as f64 / points as f64).abs())
            .fold(0.0, f64::max);
        1.5 * max
    }
}

impl EntireFunction for EvenEntireFunction {
    fn value(&self, x: f64) -> f64 {
        self.eval_at(x)
    }

    fn derivative_at_zero(&self, j: usize) -> Result<f64> {
        EvenEntireFunction::derivative_at_zero(self, j)
    }

    fn series_order(&self) -> usize {
        EvenEntireFunction::series_order(self)
    }
}

/// First failure found by [`validate_even`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum EvenViolation {
    /// `|f(x) - f(-x)|` exceeded `1e-12 (1 + |f(x)|)`.
    Asymmetric { x: f64, value: f64, mirrored: f64 },
    /// An odd derivative at zero was not exactly zero.
    OddDerivative { order: usize, value: f64 },
}

/// Checks evenness on `samples` pseudo-random points in `[-10, 10]` and checks
/// that every odd derivative at zero vanishes.
pub fn validate_even<F: EntireFunction + ?Sized>(
    f: &F,
    samples: usize,
) -> std::result::Result<(), EvenViolation> {
    let mut rng = StdRng::seed_from_u64(0x5eed_0dd5);
    for _ in 0..samples.max(1) {
        let x: f64 = rng.gen_range(-10.0..=10.0);
        let value = f.value(x);
        let mirrored = f.value(-x);
        if (value - mirrored).abs() > 1e-12 * (1.0 + value.abs()) {
            return Err(EvenViolation::Asymmetric { x, value, mirrored });
        }
    }
    for order in (1..=f.series_order()).step_by(2) {
        match f.derivative_at_zero(order) {
            Ok(value) if value != 0.0 => {
                return Err(EvenViolation::OddDerivative { order, value });
            }
            _ => {}
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn builtins() -> Vec<EvenEntireFunction> {
        vec![
            EvenEntireFunction::paper_example(1.0, 1.0).unwrap(),
            EvenEntireFunction::paper_example(2.0, 0.5).unwrap(),
            EvenEntireFunction::constant(1.0).unwrap(),
            EvenEntireFunction::cosine(1.5).unwrap(),
            EvenEntireFunction::sinc(2.0).unwrap(),
            EvenEntireFunction::sinc_squared(2.0).unwrap(),
        ]
    }

    #[test]
    fn construction_values() {
        let f = EvenEntireFunction::paper_example(1.0, 1.0).unwrap();
        assert_eq!(f.eval_at(0.0), 1f64.sin());
        assert!((f.eval_at(0.0) - 0.841_470_984_8).abs() < 1e-10);

        let c = EvenEntireFunction::constant(1.0).unwrap();
        assert_eq!(c.exponential_type(), 0.0);
        assert_eq!(c.eval_at(5.0), 1.0);
        assert_eq!(c.eval_at(3.7), 1.0);

        let s = EvenEntireFunction::sinc(2.0).unwrap();
        assert_eq!(s.eval_at(0.0), 1.0);
        let s1 = EvenEntireFunction::sinc(1.0).unwrap();
        assert!(s1.eval_at(std::f64::consts::PI).abs() < 1e-16);
    }

    #[test]
    fn exponential_types() {
        assert_eq!(
            EvenEntireFunction::constant(1.0)
                .unwrap()
                .exponential_type(),
            0.0
        );
        assert_eq!(
            EvenEntireFunction::paper_example(3.0, 1.0)
                .unwrap()
                .exponential_type(),
            3.0
        );
        assert_eq!(
            EvenEntireFunction::sinc_squared(2.0)
                .unwrap()
                .exponential_type(),
            2.0
        );
    }

    #[test]
    fn invalid_params() {
        assert!(EvenEntireFunction::paper_example(1.0, 0.0).is_err());
        assert!(EvenEntireFunction::paper_example(1.0, -1.0).is_err());
        assert!(EvenEntireFunction::cosine(-1.0).is_err());
        assert!(make_builtin(FunctionKind::PaperExample, FunctionParams::default()).is_err());
        assert!("bessel".parse::<FunctionKind>().is_err());
        let odd = FunctionParams {
            series_order: 7,
            ..Default::default()
        };
        assert!(make_builtin(FunctionKind::Cosine, odd).is_err());
    }

    #[test]
    fn registry_round_trip() {
        for kind in FunctionKind::ALL {
            assert_eq!(kind.name().parse::<FunctionKind>().unwrap(), kind);
        }
        let f = EvenEntireFunction::from_name(
            "paper-example",
            FunctionParams {
                sigma: Some(1.0),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(f.kind(), FunctionKind::PaperExample);
    }

    #[test]
    fn paper_example_second_derivative() {
        for &(tau, sigma) in &[(1.0, 1.0), (2.0, 1.0), (1.0, 2.0), (0.7, 3.5)] {
            let f = EvenEntireFunction::paper_example(tau, sigma).unwrap();
            let want = tau * tau * (sigma * sigma.cos() - sigma.sin()) / sigma.powi(3);
            let got = f.derivative_at_zero(2).unwrap();
            assert!((got - want).abs() <= 1e-14 * want.abs(), "{got} vs {want}");
            assert!((f.derivative_at_zero(0).unwrap() - sigma.sin() / sigma).abs() < 1e-15);
        }
    }

    #[test]
    fn paper_example_fourth_derivative() {
        // g''(0) = d^2/dv^2 [sin s / s] at v = sigma^2, computed via the
        // spherical-Bessel identity g^(q)(0) = (-1)^q j_q(sigma) / (2 sigma)^q.
        let sigma: f64 = 1.3;
        let tau: f64 = 0.9;
        let (s, c) = (sigma.sin(), sigma.cos());
        let j2 = (3.0 / sigma.powi(3) - 1.0 / sigma) * s - 3.0 * c / sigma.powi(2);
        let g2 = j2 / (4.0 * sigma * sigma);
        // f(x) = g(tau^2 x^2): coefficient of x^4 is tau^4 g''(0)/2, f''''(0) = 4! of that.
        let want = 24.0 * tau.powi(4) * g2 / 2.0;
        let f = EvenEntireFunction::paper_example(tau, sigma).unwrap();
        let got = f.derivative_at_zero(4).unwrap();
        assert!((got - want).abs() <= 1e-13 * want.abs(), "{got} vs {want}");
    }

    #[test]
    fn simple_derivatives() {
        assert_eq!(
            EvenEntireFunction::cosine(2.0)
                .unwrap()
                .derivative_at_zero(2)
                .unwrap(),
            -4.0
        );
        let s = EvenEntireFunction::sinc(2.0).unwrap();
        // (-1)^k tau^2k / (2k+1)
        assert!((s.derivative_at_zero(2).unwrap() + 4.0 / 3.0).abs() < 1e-15);
        let s2 = EvenEntireFunction::sinc_squared(2.0).unwrap();
        // (-1)^k 2 tau^2k / ((2k+1)(2k+2))
        assert!((s2.derivative_at_zero(2).unwrap() + 2.0 * 4.0 / 12.0).abs() < 1e-15);
        assert!((s2.derivative_at_zero(4).unwrap() - 2.0 * 16.0 / 30.0).abs() < 1e-14);
    }

    #[test]
    fn odd_derivatives_vanish_and_order_capped() {
        for f in builtins() {
            for j in (1..=f.series_order()).step_by(2) {
                assert_eq!(f.derivative_at_zero(j).unwrap(), 0.0);
            }
            assert!(matches!(
                f.derivative_at_zero(f.series_order() + 1),
                Err(SincError::OrderTooHigh { .. })
            ));
        }
    }

    #[test]
    fn taylor_polynomial_matches_values() {
        for f in builtins() {
            for i in 0..=40 {
                let x = -1.0 + i as f64 / 20.0;
                let series: f64 = f
                    .taylor_coefficients()
                    .iter()
                    .enumerate()
                    .map(|(j, a)| a * x.powi(j as i32))
                    .sum();
                assert!(
                    (series - f.eval_at(x)).abs() < 1e-10,
                    "{:?} at {x}: {series} vs {}",
                    f.kind(),
                    f.eval_at(x)
                );
            }
        }
    }

    #[test]
    fn series_branch_is_continuous() {
        for f in [
            EvenEntireFunction::sinc(1.0).unwrap(),
            EvenEntireFunction::sinc_squared(1.0).unwrap(),
        ] {
            let below = f.eval_at(SINC_SWITCH * (1.0 - 1e-12));
            let above = f.eval_at(SINC_SWITCH * (1.0 + 1e-12));
            assert!((below - above).abs() < 1e-15);
        }
    }

    #[test]
    fn builtins_are_even() {
        for f in builtins() {
            assert_eq!(validate_even(&f, 100), Ok(()));
        }
    }

    struct OddSine(f64);

    impl EntireFunction for OddSine {
        fn value(&self, x: f64) -> f64 {
            (self.0 * x).sin()
        }
        fn derivative_at_zero(&self, j: usize) -> Result<f64> {
            Ok(match j % 4 {
                1 => self.0.powi(j as i32),
                3 => -self.0.powi(j as i32),
                _ => 0.0,
            })
        }
        fn series_order(&self) -> usize {
            8
        }
    }

    #[test]
    fn odd_function_is_rejected() {
        match validate_even(&OddSine(1.0), 100) {
            Err(EvenViolation::Asymmetric { x, value, mirrored }) => {
                assert_eq!(value, -mirrored);
                assert!(x.abs() <= 10.0);
            }
            other => panic!("expected asymmetry, got {other:?}"),
        }
    }

    #[test]
    fn sup_estimate_covers_envelope() {
        let f = EvenEntireFunction::paper_example(1.0, 1.0).unwrap();
        let sup = f.sup_tail_estimate(50.0);
        assert!(sup >= 1.0 / (50f64.hypot(1.0)) && sup <= 1.5 / 50.0);
        assert_eq!(
            EvenEntireFunction::constant(-2.0)
                .unwrap()
                .sup_tail_estimate(3.0),
            2.0
        );
    }
}
