//! Command implementations behind the `sinckit` binary.
//!
//! Every command returns a serializable report; `main.rs` only parses
//! arguments, prints reports and maps [`CliError`] to an exit code.

use std::fmt;
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sinckit::expansion::{
    build_expansion_with_finite_part, coefficient_rows, finite_part_weight, outer_weight, Parity,
    TerminatingExpansion,
};
use sinckit::finite_part::{
    divergent_coefficients, finite_part_integral, finite_part_paper_example_closed_form,
    DivergentTerm, FinitePartMethod,
};
use sinckit::functions::{make_builtin, EvenEntireFunction, FunctionKind, FunctionParams};
use sinckit::oracle::{sinc_kernel, sinc_transform_oracle, OracleConfig, DEFAULT_MAX_SEGMENTS};
use sinckit::quadrature::TailControl;
use sinckit::SincError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_THRESHOLD: i32 = 3;
pub const EXIT_BAD_ARGS: i32 = 4;

pub const MAX_SEGMENTS_ENV: &str = "SINCKIT_MAX_SEGMENTS";

pub const CSV_HEADER: [&str; 5] = [
    "lambda",
    "closed_form",
    "oracle",
    "abs_diff",
    "above_threshold",
];

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn bad_args(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_BAD_ARGS,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<SincError> for CliError {
    fn from(e: SincError) -> Self {
        let code = match e {
            SincError::BelowThreshold { .. } => EXIT_THRESHOLD,
            ref e if e.is_numerical() => EXIT_NUMERICAL,
            _ => EXIT_BAD_ARGS,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError {
            code: EXIT_NUMERICAL,
            message: format!("i/o error: {e}"),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError {
            code: EXIT_NUMERICAL,
            message: format!("csv error: {e}"),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum LambdaSpec {
    Single(f64),
    Range { min: f64, max: f64, count: usize },
}

impl LambdaSpec {
    /// Evenly spaced grid including both ends.
    pub fn points(&self) -> Vec<f64> {
        match *self {
            LambdaSpec::Single(l) => vec![l],
            LambdaSpec::Range { min, max, count } => {
                let step = (max - min) / (count - 1) as f64;
                (0..count)
                    .map(|i| {
                        if i + 1 == count {
                            max
                        } else {
                            min + step * i as f64
                        }
                    })
                    .collect()
            }
        }
    }
}

/// Everything a transform command needs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSpec {
    pub function: String,
    pub tau: f64,
    pub sigma: Option<f64>,
    pub n: usize,
    pub lambda: LambdaSpec,
    pub tol: f64,
    pub format: OutputFormat,
    pub enforce_threshold: bool,
    pub split_point: f64,
    pub max_segments: usize,
}

impl RunSpec {
    pub fn validate(&self) -> CliResult<()> {
        if self.n == 0 {
            return Err(CliError::bad_args("--n must be at least 1"));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(CliError::bad_args(format!(
                "--tol must be > 0, got {}",
                self.tol
            )));
        }
        if self.split_point.is_nan() || self.split_point <= 0.0 {
            return Err(CliError::bad_args("--split-point must be > 0"));
        }
        match self.lambda {
            LambdaSpec::Single(l) if !(l > 0.0 && l.is_finite()) => {
                Err(CliError::bad_args(format!("--lambda must be > 0, got {l}")))
            }
            LambdaSpec::Range { min, max, count } => {
                if !(min > 0.0 && min < max && max.is_finite()) {
                    Err(CliError::bad_args(format!(
                        "need 0 < --lambda-min < --lambda-max, got {min} and {max}"
                    )))
                } else if count < 2 {
                    Err(CliError::bad_args("--points must be at least 2"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    pub fn function(&self) -> CliResult<EvenEntireFunction> {
        build_function(&self.function, self.tau, self.sigma)
    }

    /// Oracle tolerance, a decade below the comparison tolerance.
    fn oracle_config(&self) -> OracleConfig {
        OracleConfig {
            tol: 0.1 * self.tol,
            max_segments: self.max_segments,
        }
    }

    fn fp_tol(&self) -> f64 {
        (0.01 * self.tol).max(1e-13)
    }

    fn expansion(&self, f: &EvenEntireFunction) -> CliResult<TerminatingExpansion> {
        Ok(build_expansion_with_finite_part(
            f,
            self.n,
            self.split_point,
            self.fp_tol(),
        )?)
    }
}

pub fn build_function(name: &str, tau: f64, sigma: Option<f64>) -> CliResult<EvenEntireFunction> {
    let kind: FunctionKind = name.parse()?;
    let params = FunctionParams {
        sigma,
        ..FunctionParams::with_tau(tau)
    };
    Ok(make_builtin(kind, params)?)
}

/// Segment cap from `SINCKIT_MAX_SEGMENTS`, or the library default.
pub fn max_segments_from_env() -> CliResult<usize> {
    match std::env::var(MAX_SEGMENTS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&s| s > 0)
            .ok_or_else(|| {
                CliError::bad_args(format!(
                    "{MAX_SEGMENTS_ENV} must be a positive integer, got '{v}'"
                ))
            }),
        Err(_) => Ok(DEFAULT_MAX_SEGMENTS),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub function: String,
    pub tau: f64,
    pub sigma: Option<f64>,
    pub n: usize,
    pub lambda: f64,
    pub threshold: f64,
    pub above_threshold: bool,
    pub closed_form: f64,
    pub oracle: f64,
    pub oracle_error_estimate: f64,
    pub abs_diff: f64,
    pub tol: f64,
    pub pass: bool,
}

pub fn cmd_eval(spec: &RunSpec) -> CliResult<EvalReport> {
    spec.validate()?;
    let LambdaSpec::Single(lambda) = spec.lambda else {
        return Err(CliError::bad_args("eval takes a single --lambda"));
    };
    let f = spec.function()?;
    let e = spec.expansion(&f)?;
    let closed_form = e.evaluate(lambda, spec.enforce_threshold)?;
    let o = sinc_transform_oracle(&f, spec.n as u32, lambda, &spec.oracle_config())?;
    let abs_diff = (closed_form - o.value).abs();
    let above_threshold = lambda > e.lambda_min;
    Ok(EvalReport {
        function: f.kind().to_string(),
        tau: f.exponential_type(),
        sigma: f.sigma(),
        n: spec.n,
        lambda,
        threshold: e.lambda_min,
        above_threshold,
        closed_form,
        oracle: o.value,
        oracle_error_estimate: o.error_estimate,
        abs_diff,
        tol: spec.tol,
        pass: above_threshold && abs_diff <= spec.tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub lambda: f64,
    pub closed_form: f64,
    pub oracle: f64,
    pub abs_diff: f64,
    pub above_threshold: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub function: String,
    pub tau: f64,
    pub sigma: Option<f64>,
    pub n: usize,
    pub threshold: f64,
    pub rows: Vec<ScanRow>,
}

impl ScanReport {
    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }
}

/// Sweeps `lambda` across the grid in parallel. The closed form is evaluated
/// on both sides of the threshold; a failing oracle leaves `NaN` in its row.
pub fn cmd_scan(spec: &RunSpec) -> CliResult<ScanReport> {
    spec.validate()?;
    let f = spec.function()?;
    let e = spec.expansion(&f)?;
    let cfg = spec.oracle_config();
    let n = spec.n as u32;
    let rows = spec
        .lambda
        .points()
        .into_par_iter()
        .map(|lambda| {
            let closed_form = e.evaluate(lambda, false).unwrap_or(f64::NAN);
            let above_threshold = lambda > e.lambda_min;
            match sinc_transform_oracle(&f, n, lambda, &cfg) {
                Ok(o) => ScanRow {
                    lambda,
                    closed_form,
                    oracle: o.value,
                    abs_diff: (closed_form - o.value).abs(),
                    above_threshold,
                    error: None,
                },
                Err(err) => ScanRow {
                    lambda,
                    closed_form,
                    oracle: f64::NAN,
                    abs_diff: f64::NAN,
                    above_threshold,
                    error: Some(err.to_string()),
                },
            }
        })
        .collect();
    Ok(ScanReport {
        function: f.kind().to_string(),
        tau: f.exponential_type(),
        sigma: f.sigma(),
        n: spec.n,
        threshold: e.lambda_min,
        rows,
    })
}

/// Shortest-exact scientific formatting: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_scan_csv<W: Write>(rows: &[ScanRow], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            fmt_f64(r.lambda),
            fmt_f64(r.closed_form),
            fmt_f64(r.oracle),
            fmt_f64(r.abs_diff),
            r.above_threshold.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Inverse of [`write_scan_csv`]. Rows with a `NaN` oracle come back with a
/// generic error marker.
pub fn read_scan_csv<R: Read>(input: R) -> CliResult<Vec<ScanRow>> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(CliError::bad_args(format!(
            "unexpected csv header: {header:?}"
        )));
    }
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let num = |i: usize| -> CliResult<f64> {
            rec[i]
                .parse()
                .map_err(|_| CliError::bad_args(format!("bad number '{}'", &rec[i])))
        };
        let oracle = num(2)?;
        rows.push(ScanRow {
            lambda: num(0)?,
            closed_form: num(1)?,
            oracle,
            abs_diff: num(3)?,
            above_threshold: rec[4]
                .parse()
                .map_err(|_| CliError::bad_args(format!("bad flag '{}'", &rec[4])))?,
            error: oracle.is_nan().then(|| "oracle failed".to_string()),
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoeffRowReport {
    pub l: usize,
    pub power: usize,
    pub prefactor: String,
    pub derivative_order: usize,
    /// Prefactor times the derivative it multiplies, e.g. `-1/12*f''(0)`.
    pub term: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoeffsReport {
    pub n: usize,
    pub m: usize,
    pub parity: Parity,
    pub symbol: &'static str,
    pub outer_weight_over_pi: String,
    pub fp_weight: String,
    pub rows: Vec<CoeffRowReport>,
}

fn derivative_symbol(j: usize) -> String {
    match j {
        0 => "f(0)".into(),
        1..=3 => format!("f{}(0)", "'".repeat(j)),
        _ => format!("f^({j})(0)"),
    }
}

pub fn cmd_coeffs(n: usize) -> CliResult<CoeffsReport> {
    let rows = coefficient_rows(n)?
        .into_iter()
        .map(|r| CoeffRowReport {
            l: r.l,
            power: r.power,
            prefactor: r.prefactor.to_fraction_string(),
            derivative_order: r.derivative_order,
            term: format!("{}*{}", r.prefactor, derivative_symbol(r.derivative_order)),
        })
        .collect();
    let parity = Parity::of(n);
    Ok(CoeffsReport {
        n,
        m: n / 2,
        parity,
        symbol: match parity {
            Parity::Even => "C",
            Parity::Odd => "D",
        },
        outer_weight_over_pi: outer_weight(n)?.to_fraction_string(),
        fp_weight: finite_part_weight(n)?.to_fraction_string(),
        rows,
    })
}

pub fn write_coeffs_csv<W: Write>(report: &CoeffsReport, out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["l", "power", "prefactor", "derivative_order"])?;
    for r in &report.rows {
        w.write_record([
            r.l.to_string(),
            r.power.to_string(),
            r.prefactor.clone(),
            r.derivative_order.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FpReport {
    pub function: String,
    pub tau: f64,
    pub sigma: Option<f64>,
    pub m: usize,
    pub split_point: f64,
    pub method: FinitePartMethod,
    pub taylor_subtraction: f64,
    pub tail_error_estimate: f64,
    pub closed_form_mellin: Option<f64>,
    pub difference: Option<f64>,
    pub divergent_coefficients: Vec<DivergentTerm>,
}

pub fn cmd_fp(
    function: &str,
    tau: f64,
    sigma: Option<f64>,
    m: usize,
    split_point: f64,
    tol: f64,
) -> CliResult<FpReport> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(CliError::bad_args(format!("--tol must be > 0, got {tol}")));
    }
    let f = build_function(function, tau, sigma)?;
    let ts = finite_part_integral(&f, m, split_point, tol)?;
    let mellin = match (f.kind(), f.sigma()) {
        (FunctionKind::PaperExample, Some(s)) if m == 2 && f.exponential_type() > 0.0 => {
            Some(finite_part_paper_example_closed_form(f.exponential_type(), s)?.value)
        }
        _ => None,
    };
    Ok(FpReport {
        function: f.kind().to_string(),
        tau: f.exponential_type(),
        sigma: f.sigma(),
        m,
        split_point,
        method: ts.method,
        taylor_subtraction: ts.value,
        tail_error_estimate: ts.tail_error_estimate,
        closed_form_mellin: mellin,
        difference: mellin.map(|v| (v - ts.value).abs()),
        divergent_coefficients: divergent_coefficients(&f, m)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub function: String,
    pub n: usize,
    pub lambda: f64,
    pub value: f64,
    pub error_estimate: f64,
    pub segments_used: usize,
    pub converged: bool,
    pub tail_control: &'static str,
}

/// Oracle only, at the requested tolerance itself.
pub fn cmd_oracle(spec: &RunSpec) -> CliResult<Vec<OracleReport>> {
    spec.validate()?;
    let f = spec.function()?;
    let cfg = OracleConfig {
        tol: spec.tol,
        max_segments: spec.max_segments,
    };
    spec.lambda
        .points()
        .into_par_iter()
        .map(|lambda| {
            let r = sinc_transform_oracle(&f, spec.n as u32, lambda, &cfg)?;
            Ok(OracleReport {
                function: f.kind().to_string(),
                n: spec.n,
                lambda,
                value: r.value,
                error_estimate: r.error_estimate,
                segments_used: r.segments_used,
                converged: r.converged,
                tail_control: match r.tail_control {
                    TailControl::Bound => "bound",
                    TailControl::Extrapolation => "extrapolation",
                },
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegrandPoint {
    pub lambda: f64,
    pub x: f64,
    pub value: f64,
}

/// Samples `f(x) sin^n(lambda x) / x^n` on `[0, x_max]` for each lambda.
pub fn cmd_integrand(
    function: &str,
    tau: f64,
    sigma: Option<f64>,
    n: usize,
    lambdas: &[f64],
    x_max: f64,
    points: usize,
) -> CliResult<Vec<IntegrandPoint>> {
    if n == 0 || points < 2 || x_max.is_nan() || x_max <= 0.0 {
        return Err(CliError::bad_args(
            "need n >= 1, --points >= 2 and --x-max > 0",
        ));
    }
    if lambdas.is_empty() || lambdas.iter().any(|l| l.is_nan() || *l <= 0.0) {
        return Err(CliError::bad_args("need at least one --lambda, all > 0"));
    }
    let f = build_function(function, tau, sigma)?;
    let xs = LambdaSpec::Range {
        min: 0.0,
        max: x_max,
        count: points,
    }
    .points();
    let (f, xs) = (&f, &xs);
    Ok(lambdas
        .iter()
        .flat_map(|&lambda| {
            xs.iter().map(move |&x| IntegrandPoint {
                lambda,
                x,
                value: f.eval_at(x) * sinc_kernel(n as u32, lambda, x),
            })
        })
        .collect())
}

pub fn write_integrand_csv<W: Write>(points: &[IntegrandPoint], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["lambda", "x", "value"])?;
    for p in points {
        w.write_record([fmt_f64(p.lambda), fmt_f64(p.x), fmt_f64(p.value)])?;
    }
    w.flush()?;
    Ok(())
}
