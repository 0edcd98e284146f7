//! `condbound`: verification runs, Graeffe recovery and unshifted QR.
//!
//! Exit codes: 0 no violations, 1 violations found, 2 usage or input error,
//! 3 inconclusive records at the precision ceiling.

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use condbound::harness::parse::{parse_matrix_arg, parse_polynomials};
use condbound::harness::{
    run_graeffe, run_qr, verify, InstanceFamily, Mode, Problem, ReportFormat, ReportWriter, VerifyOptions,
};
use condbound::numcore::{IntPolynomial, DEFAULT_PRECISION_BITS};
use condbound::{bounds::THM5_DEFAULT_C, Error};

#[derive(Parser)]
#[command(
    name = "condbound",
    version,
    about = "Certified condition numbers checked against a-priori bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare actual condition values with their bound over an instance family.
    Verify(VerifyArgs),
    /// Recover the roots of a monic polynomial with distinct positive roots.
    Graeffe {
        /// Coefficients, highest degree first, e.g. "1,-3,2".
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long)]
        target_rel_err: f64,
        #[arg(long, default_value_t = DEFAULT_PRECISION_BITS)]
        precision_bits: usize,
    },
    /// Run unshifted QR on a symmetric positive definite matrix.
    Qr {
        /// Path to a matrix file, or the matrix inline ("2 2 2 1 1 2" or "[[2,1],[1,2]]").
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        #[arg(long)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_PRECISION_BITS)]
        precision_bits: usize,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// linsys, lsq, nse, unipoly, system, relgap_mat or relgap_poly.
    #[arg(long)]
    problem: Option<Problem>,
    /// Bound number 1..7; selects the problem when --problem is absent.
    #[arg(long)]
    theorem: Option<u8>,
    /// exhaustive, random, adversarial or file.
    #[arg(long, default_value = "exhaustive")]
    mode: Mode,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Largest absolute entry or coefficient.
    #[arg(long, default_value_t = 1)]
    coeff_range: i64,
    /// Smallest entry; defaults to -coeff-range.
    #[arg(long, allow_hyphen_values = true)]
    min_entry: Option<i64>,
    /// Keep positive definite matrices only.
    #[arg(long)]
    spd: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    count: Option<u64>,
    /// Instance file for --mode file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Report path; records go to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "jsonl")]
    format: ReportFormat,
    #[arg(long, default_value_t = DEFAULT_PRECISION_BITS)]
    precision_bits: usize,
    /// Constant used in the system bound, which is reported only.
    #[arg(long, default_value_t = THM5_DEFAULT_C)]
    thm5_c: u64,
}

fn family(a: &VerifyArgs) -> Result<InstanceFamily, Error> {
    let problem = match (a.problem, a.theorem) {
        (Some(p), Some(t)) if p.theorem() != t => {
            return Err(Error::Domain(format!(
                "problem {p} is checked against bound {}, not {t}",
                p.theorem()
            )))
        }
        (Some(p), _) => p,
        (None, Some(t)) => Problem::from_theorem(t)?,
        (None, None) => return Err(Error::Domain("give --problem or --theorem".into())),
    };
    let mut fam = InstanceFamily::new(problem, a.mode)
        .n(a.n)
        .m(a.m)
        .d(a.d)
        .range(a.coeff_range)
        .positive_definite(a.spd)
        .seed(a.seed);
    if let Some(lo) = a.min_entry {
        fam = fam.entry_min(lo);
    }
    if let Some(c) = a.count {
        fam = fam.count(c);
    }
    if let Some(p) = &a.input {
        fam = fam.input(p);
    }
    Ok(fam)
}

fn run_verify(a: &VerifyArgs) -> Result<i32, Error> {
    let fam = family(a)?;
    let opts = VerifyOptions {
        precision_bits: a.precision_bits,
        thm5_c: a.thm5_c,
    };
    let summary = match &a.out {
        Some(path) => {
            let mut w = ReportWriter::create(path, a.format)?;
            let s = verify(&fam, &opts, |r| w.write(r))?;
            w.finish(&s)?;
            println!("{}", serde_json::to_string(&s).expect("summary serializes"));
            s
        }
        None => {
            let mut w = ReportWriter::new(io::stdout().lock(), a.format, "stdout")?;
            let s = verify(&fam, &opts, |r| w.write(r))?;
            drop(w.finish(&s)?);
            s
        }
    };
    eprintln!(
        "{}: {} instances, {} ok, {} violation, {} degenerate_skipped, {} inconclusive, {} report_only",
        summary.family,
        summary.total,
        summary.ok,
        summary.violation,
        summary.degenerate_skipped,
        summary.inconclusive,
        summary.report_only
    );
    Ok(summary.exit_code())
}

fn parse_poly(s: &str) -> Result<IntPolynomial, Error> {
    let mut ps = parse_polynomials(s)?;
    match ps.len() {
        1 => Ok(ps.remove(0)),
        k => Err(Error::Parse(format!("expected one polynomial, found {k}"))),
    }
}

fn print_json<T: serde::Serialize>(v: &T) -> Result<(), Error> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v).expect("report serializes");
    writeln!(out).map_err(|e| Error::Io {
        path: "stdout".into(),
        source: e,
    })
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Verify(a) => run_verify(&a),
        Command::Graeffe {
            poly,
            target_rel_err,
            precision_bits,
        } => {
            let r = run_graeffe(&parse_poly(&poly)?, target_rel_err, precision_bits)?;
            print_json(&r)?;
            Ok(0)
        }
        Command::Qr {
            matrix,
            tol,
            precision_bits,
        } => {
            let r = run_qr(&parse_matrix_arg(&matrix)?, tol, precision_bits)?;
            print_json(&r)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let code = match run(Cli::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("condbound: {e}");
            match e {
                Error::PrecisionExhausted { .. } | Error::Inconclusive { .. } => 3,
                _ => 2,
            }
        }
    };
    ExitCode::from(code as u8)
}
