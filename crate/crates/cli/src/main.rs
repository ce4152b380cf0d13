//! `sinckit` command-line tool.
//!
//! Exit codes: 0 ok, 2 numerical failure, 3 lambda at or below the validity
//! threshold while enforcing it, 4 bad arguments.

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sinckit_cli::{
    cmd_coeffs, cmd_eval, cmd_fp, cmd_integrand, cmd_oracle, cmd_scan, max_segments_from_env,
    write_coeffs_csv, write_integrand_csv, write_scan_csv, CliError, CliResult, LambdaSpec,
    OutputFormat, RunSpec, EXIT_BAD_ARGS, EXIT_NUMERICAL, EXIT_OK,
};

#[derive(Parser, Debug)]
#[command(
    name = "sinckit",
    version,
    about = "Closed-form Sinc transforms checked against quadrature"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed form and oracle at one lambda.
    Eval(TransformArgs),
    /// Closed form and oracle over a lambda grid.
    Scan(TransformArgs),
    /// Exact coefficient table for sinc power n.
    Coeffs {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Finite part of int f(x)/x^2m, with the closed form where one exists.
    Fp {
        #[command(flatten)]
        func: FunctionArgs,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1.0)]
        split_point: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Brute-force quadrature only.
    Oracle(TransformArgs),
    /// Samples of the integrand for plotting.
    Integrand {
        #[command(flatten)]
        func: FunctionArgs,
        #[arg(long)]
        n: usize,
        /// Comma-separated list of lambda values.
        #[arg(long, value_delimiter = ',', required = true)]
        lambda: Vec<f64>,
        #[arg(long, default_value_t = 10.0)]
        x_max: f64,
        #[arg(long, default_value_t = 501)]
        points: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Args, Debug)]
struct FunctionArgs {
    /// paper-example, constant, cos, sinc or sinc2.
    #[arg(long)]
    function: String,
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    #[arg(long)]
    sigma: Option<f64>,
}

#[derive(Args, Debug)]
struct TransformArgs {
    #[command(flatten)]
    func: FunctionArgs,
    #[arg(long)]
    n: usize,
    #[arg(long, conflicts_with_all = ["lambda_min", "lambda_max", "points"])]
    lambda: Option<f64>,
    #[arg(long, requires_all = ["lambda_max", "points"])]
    lambda_min: Option<f64>,
    #[arg(long, requires_all = ["lambda_min", "points"])]
    lambda_max: Option<f64>,
    #[arg(long, requires_all = ["lambda_min", "lambda_max"])]
    points: Option<usize>,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, default_value_t = 1.0)]
    split_point: f64,
    /// Evaluate the closed form even at or below the threshold.
    #[arg(long)]
    no_enforce: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Format {
    Json,
    Csv,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
        }
    }
}

impl TransformArgs {
    fn into_spec(self) -> CliResult<RunSpec> {
        let lambda = match (self.lambda, self.lambda_min, self.lambda_max, self.points) {
            (Some(l), None, None, None) => LambdaSpec::Single(l),
            (None, Some(min), Some(max), Some(count)) => LambdaSpec::Range { min, max, count },
            _ => {
                return Err(CliError::bad_args(
                    "give either --lambda or all of --lambda-min, --lambda-max, --points",
                ))
            }
        };
        let spec = RunSpec {
            function: self.func.function,
            tau: self.func.tau,
            sigma: self.func.sigma,
            n: self.n,
            lambda,
            tol: self.tol,
            format: self.format.into(),
            enforce_threshold: !self.no_enforce,
            split_point: self.split_point,
            max_segments: max_segments_from_env()?,
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn print_json<T: Serialize>(value: &T) -> CliResult<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)
        .map_err(|e| CliError::bad_args(format!("json error: {e}")))?;
    writeln!(out)?;
    Ok(())
}

fn run(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Eval(args) => {
            let spec = args.into_spec()?;
            let report = cmd_eval(&spec)?;
            match spec.format {
                OutputFormat::Json => print_json(&report)?,
                OutputFormat::Csv => write_scan_csv(
                    &[sinckit_cli::ScanRow {
                        lambda: report.lambda,
                        closed_form: report.closed_form,
                        oracle: report.oracle,
                        abs_diff: report.abs_diff,
                        above_threshold: report.above_threshold,
                        error: None,
                    }],
                    io::stdout().lock(),
                )?,
            }
            Ok(EXIT_OK)
        }
        Command::Scan(args) => {
            let spec = args.into_spec()?;
            let report = cmd_scan(&spec)?;
            match spec.format {
                OutputFormat::Json => print_json(&report)?,
                OutputFormat::Csv => write_scan_csv(&report.rows, io::stdout().lock())?,
            }
            let failed = report.failed_rows();
            if failed > 0 {
                eprintln!(
                    "error: oracle failed on {failed} of {} rows",
                    report.rows.len()
                );
                return Ok(EXIT_NUMERICAL);
            }
            Ok(EXIT_OK)
        }
        Command::Coeffs { n, format } => {
            let report = cmd_coeffs(n)?;
            match format {
                Format::Json => print_json(&report)?,
                Format::Csv => write_coeffs_csv(&report, io::stdout().lock())?,
            }
            Ok(EXIT_OK)
        }
        Command::Fp {
            func,
            m,
            split_point,
            tol,
        } => {
            let report = cmd_fp(&func.function, func.tau, func.sigma, m, split_point, tol)?;
            print_json(&report)?;
            Ok(EXIT_OK)
        }
        Command::Oracle(args) => {
            let spec = args.into_spec()?;
            let reports = cmd_oracle(&spec)?;
            match spec.format {
                OutputFormat::Json => print_json(&reports)?,
                OutputFormat::Csv => {
                    let mut w = csv::Writer::from_writer(io::stdout().lock());
                    w.write_record(["lambda", "oracle", "error_estimate", "segments_used"])?;
                    for r in &reports {
                        w.write_record([
                            sinckit_cli::fmt_f64(r.lambda),
                            sinckit_cli::fmt_f64(r.value),
                            sinckit_cli::fmt_f64(r.error_estimate),
                            r.segments_used.to_string(),
                        ])?;
                    }
                    w.flush()?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Integrand {
            func,
            n,
            lambda,
            x_max,
            points,
            format,
        } => {
            let pts = cmd_integrand(
                &func.function,
                func.tau,
                func.sigma,
                n,
                &lambda,
                x_max,
                points,
            )?;
            match format {
                Format::Json => print_json(&pts)?,
                Format::Csv => write_integrand_csv(&pts, io::stdout().lock())?,
            }
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_BAD_ARGS as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
