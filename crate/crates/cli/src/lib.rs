//! The `specpert` command line: analyze problem files, print bound tables,
//! run fuzz campaigns.
//!
//! Exit codes: 0 when every check holds, 1 on usage or input errors, 2 when
//! a bound is violated.

// NaN must fail every precondition, hence `!(a < b)` throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fuzz;
pub mod problem;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use specpert_core::bounds::{
    bound_n, branch_of, branch_point_2, c_crit, kappa_bracket_upper, kappa_residual, solve_kappa, KAPPA_TOL,
};
use specpert_core::harness::{sharp_example_2x2, VerifyOptions};

pub use error::{CliError, CliResult};
pub use fuzz::{run_fuzz, FuzzConfig, FuzzSummary, LayoutChoice};
pub use problem::{MatrixBlock, ProblemFile, FORMAT_VERSION};
pub use report::{sha256_hex, to_json, ReportFile, TOOL_VERSION};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_VIOLATION: u8 = 2;

/// Largest allowed gap between the sharp example's bound and its measured
/// angle.
pub const SHARP_TOL: f64 = 1e-11;

#[derive(Debug, Parser)]
#[command(name = "specpert", version, about = "Subspace perturbation bounds for Hermitian matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify every applicable bound on a problem file and print the report.
    Analyze {
        file: PathBuf,
        /// Absolute slack for angle comparisons. A negative value demands
        /// that each bound hold with that much margin.
        #[arg(long, allow_negative_numbers = true)]
        tol: Option<f64>,
    },
    /// Print `x,N,branch` rows on a uniform grid.
    BoundTable {
        #[arg(long, allow_negative_numbers = true)]
        min: f64,
        #[arg(long, allow_negative_numbers = true)]
        max: f64,
        #[arg(long)]
        points: usize,
    },
    /// Verify a seeded batch of random instances.
    Fuzz {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        count: u64,
        /// `(|V+| + |V-|) / d` for every instance.
        #[arg(long, allow_negative_numbers = true)]
        scale: f64,
        #[arg(long)]
        seed: u64,
        /// Worker threads; 0 picks the number of CPUs.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Write one report per instance into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = LayoutChoice::Mixed)]
        layout: LayoutChoice,
        /// Spectral gap of every instance.
        #[arg(long, default_value_t = 1.0)]
        gap: f64,
    },
    /// Solve for the interior branch point and print it with its residual.
    Kappa,
    /// Report on the 2x2 example whose angle equals the favourable bound.
    Sharp {
        #[arg(long)]
        vplus: f64,
        #[arg(long)]
        vminus: f64,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_INPUT
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Io {
        path: "<stdout>".into(),
        source: e,
    }
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<u8> {
    match cmd {
        Command::Analyze { file, tol } => {
            let bytes = std::fs::read(&file).map_err(|source| CliError::Io {
                path: file.display().to_string(),
                source,
            })?;
            let text = std::str::from_utf8(&bytes)
                .map_err(|e| CliError::Invalid(format!("{}: {e}", file.display())))?;
            let problem = ProblemFile::parse(text)?;
            let mut options = VerifyOptions::default();
            if let Some(t) = tol {
                if !t.is_finite() {
                    return Err(CliError::Invalid(format!("--tol {t} must be finite")));
                }
                options.angle_tol = t;
            }
            let report = ReportFile::build(problem, &bytes, options)?;
            out.write_all(to_json(&report)?.as_bytes()).map_err(io_err)?;
            Ok(report_exit(&report, err))
        }
        Command::BoundTable { min, max, points } => {
            let rows = bound_table(min, max, points)?;
            out.write_all(rows.as_bytes()).map_err(io_err)?;
            Ok(EXIT_OK)
        }
        Command::Fuzz {
            n,
            count,
            scale,
            seed,
            jobs,
            out: dir,
            layout,
            gap,
        } => {
            let config = FuzzConfig {
                n,
                count,
                scale,
                seed,
                layout,
                gap,
            };
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| CliError::Invalid(format!("cannot start {jobs} workers: {e}")))?;
            let summary = pool.install(|| run_fuzz(&config, dir.as_deref()))?;
            out.write_all(to_json(&summary)?.as_bytes()).map_err(io_err)?;
            let total = summary.total_violations();
            if total > 0 {
                let _ = writeln!(
                    err,
                    "{total} violations in {} instances",
                    summary.violating_instances.len()
                );
                Ok(EXIT_VIOLATION)
            } else {
                Ok(EXIT_OK)
            }
        }
        Command::Kappa => {
            let k = solve_kappa(KAPPA_TOL)?;
            writeln!(out, "kappa = {k:.15}").map_err(io_err)?;
            writeln!(out, "bracket = ({:.15}, {:.15})", branch_point_2(), kappa_bracket_upper())
                .map_err(io_err)?;
            writeln!(out, "residual = {:e}", kappa_residual(k)).map_err(io_err)?;
            Ok(EXIT_OK)
        }
        Command::Sharp { vplus, vminus } => {
            let ex = sharp_example_2x2(vplus, vminus)?;
            let problem = ProblemFile::from_instance(&ex.instance);
            let report = ReportFile::build_generated(problem, VerifyOptions::default())?;
            out.write_all(to_json(&report)?.as_bytes()).map_err(io_err)?;
            let bound = report.report.favgeom.bound;
            let measured = report.report.measured_angle;
            let _ = writeln!(err, "bound    = {}", fmt_opt(bound));
            let _ = writeln!(err, "measured = {}", fmt_opt(measured));
            match (bound, measured) {
                (Some(b), Some(m)) if (b - m).abs() <= SHARP_TOL => Ok(report_exit(&report, err)),
                _ => {
                    let _ = writeln!(err, "bound and measured angle differ by more than {SHARP_TOL:e}");
                    Ok(EXIT_VIOLATION)
                }
            }
        }
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".into(), |v| format!("{v:.17}"))
}

fn report_exit(report: &ReportFile, err: &mut dyn Write) -> u8 {
    if report.report.is_clean() {
        return EXIT_OK;
    }
    for v in &report.report.violations {
        let _ = writeln!(err, "violation: {:?} by {:e}", v.check, v.slack);
    }
    EXIT_VIOLATION
}

/// CSV rows `x,N,branch` on `points` evenly spaced abscissae from `min` to
/// `max` inclusive. Floats use the shortest representation that round-trips.
pub fn bound_table(min: f64, max: f64, points: usize) -> CliResult<String> {
    let top = c_crit();
    if !(0.0 <= min && min <= max && max <= top) {
        return Err(specpert_core::Error::DomainError(format!(
            "need 0 <= min <= max <= {top}, got min = {min}, max = {max}"
        ))
        .into());
    }
    if points == 0 || (points == 1 && min != max) {
        return Err(specpert_core::Error::DomainError(format!(
            "{points} points cannot span [{min}, {max}]"
        ))
        .into());
    }
    let mut csv = String::from("x,N,branch\n");
    for i in 0..points {
        let x = if i + 1 == points {
            max
        } else {
            min + (max - min) * (i as f64 / (points - 1) as f64)
        };
        let branch = branch_of(x)?;
        csv.push_str(&format!("{x},{},{}\n", bound_n(x)?, branch.number()));
    }
    Ok(csv)
}
