//! Command-line front end for the invariant-Laplacian sharp-bound library.
//!
//! Subcommands: `gp-curve` tabulates the extremal bound over a radius grid,
//! `figure1` reproduces the bounded-data non-monotonicity exhibit, `verify`
//! runs the named verification battery, `kernel` tabulates kernel
//! diagnostics, and `schwarz` runs seeded random-data bound trials.
//!
//! Exit codes: 0 success, 1 verification failure, 2 bad parameters,
//! 3 numeric failure.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use invlap::extremal::gp_curve;
use invlap::kernel::{kernel_mass, kernel_zonal};
use invlap::poisson::{bound_trial, zonal_harmonic, ZonalData};
use invlap::quadrature::{kernel_mass_quadrature, DEFAULT_ORDER};
use invlap::verify::{run_all, run_check, CHECK_NAMES};
use invlap::{Error, ModelParams};

const EXIT_VERIFICATION: u8 = 1;
const EXIT_BAD_PARAMS: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

/// Drop threshold that separates numeric jitter from a genuine decrease.
const MONOTONE_DROP_TOL: f64 = 1e-6;

#[derive(Parser)]
#[command(
    name = "invlap",
    version,
    about = "Sharp Schwarz-type bounds for the invariant-Laplacian Dirichlet problem on the unit ball"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the sharp bound G_p, its optimal shift, and the method used.
    GpCurve(CurveArgs),
    /// Bounded-data bound over 400 radii: defaults n=6, alpha=1, p=inf.
    Figure1(Figure1Args),
    /// Run the verification battery (all checks, or one named by --check).
    Verify(VerifyArgs),
    /// Tabulate kernel diagnostics: closed vs quadrature mass, range.
    Kernel(KernelArgs),
    /// Seeded random-data trials of the sharp bound.
    Schwarz(SchwarzArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn parse_p(raw: &str) -> Result<f64, String> {
    let p = if raw.eq_ignore_ascii_case("inf") {
        f64::INFINITY
    } else {
        raw.parse::<f64>()
            .map_err(|e| format!("exponent '{raw}': {e}"))?
    };
    if p >= 1.0 {
        Ok(p)
    } else {
        Err(format!("exponent {raw} outside [1, inf]"))
    }
}

fn parse_radius_max(raw: &str) -> Result<f64, String> {
    let r: f64 = raw.parse().map_err(|e| format!("r-max '{raw}': {e}"))?;
    if (0.0..1.0).contains(&r) {
        Ok(r)
    } else {
        Err(format!("r-max {raw} outside [0, 1)"))
    }
}

fn parse_steps(raw: &str) -> Result<usize, String> {
    let s: usize = raw.parse().map_err(|e| format!("steps '{raw}': {e}"))?;
    if s >= 2 {
        Ok(s)
    } else {
        Err(format!("steps {raw} below minimum 2"))
    }
}

#[derive(Args)]
struct CurveArgs {
    /// Ball dimension (n >= 3).
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Operator parameter (alpha > -1/2).
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// Data norm exponent in [1, inf]; pass "inf" for the supremum norm.
    #[arg(long, default_value = "2", value_parser = parse_p)]
    p: f64,
    /// Largest radius in the grid (must be < 1).
    #[arg(long = "r-max", default_value = "0.9", value_parser = parse_radius_max)]
    r_max: f64,
    /// Number of grid rows, spaced evenly over [0, r-max].
    #[arg(long, default_value = "50", value_parser = parse_steps)]
    steps: usize,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Artifact format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct Figure1Args {
    #[arg(long, default_value_t = 6)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value = "inf", value_parser = parse_p)]
    p: f64,
    #[arg(long = "r-max", default_value = "0.999", value_parser = parse_radius_max)]
    r_max: f64,
    #[arg(long, default_value = "400", value_parser = parse_steps)]
    steps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run only the named check (see `verify --list`).
    #[arg(long)]
    check: Option<String>,
    /// List the available check names and exit.
    #[arg(long, default_value_t = false)]
    list: bool,
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long = "r-max", default_value = "0.9", value_parser = parse_radius_max)]
    r_max: f64,
    #[arg(long, default_value = "10", value_parser = parse_steps)]
    steps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct SchwarzArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value = "inf", value_parser = parse_p)]
    p: f64,
    #[arg(long = "r-max", default_value = "0.9", value_parser = parse_radius_max)]
    r_max: f64,
    /// Number of radii tested (excluding r = 0, where the bound is trivial).
    #[arg(long, default_value = "10", value_parser = parse_steps)]
    steps: usize,
    /// Seed for the random data stream; a fixed default keeps runs reproducible.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random centered data profiles per radius.
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Serialize)]
struct CurveRow {
    r: f64,
    g_value: f64,
    a_star: f64,
    method: String,
}

#[derive(Serialize)]
struct KernelRow {
    r: f64,
    mass_closed: f64,
    mass_quadrature: f64,
    kernel_min: f64,
    kernel_max: f64,
}

#[derive(Serialize)]
struct TrialRow {
    r: f64,
    trial: usize,
    solution: f64,
    bound: f64,
    margin: f64,
}

/// 17 significant digits: lossless for binary64, so CSV re-parses bit-for-bit.
fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

trait CsvRow: Serialize {
    fn header() -> &'static str;
    fn csv_line(&self) -> String;
}

impl CsvRow for CurveRow {
    fn header() -> &'static str {
        "r,g_value,a_star,method"
    }
    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{}",
            fmt17(self.r),
            fmt17(self.g_value),
            fmt17(self.a_star),
            self.method
        )
    }
}

impl CsvRow for KernelRow {
    fn header() -> &'static str {
        "r,mass_closed,mass_quadrature,kernel_min,kernel_max"
    }
    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{}",
            fmt17(self.r),
            fmt17(self.mass_closed),
            fmt17(self.mass_quadrature),
            fmt17(self.kernel_min),
            fmt17(self.kernel_max)
        )
    }
}

impl CsvRow for TrialRow {
    fn header() -> &'static str {
        "r,trial,solution,bound,margin"
    }
    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{}",
            fmt17(self.r),
            self.trial,
            fmt17(self.solution),
            fmt17(self.bound),
            fmt17(self.margin)
        )
    }
}

fn render<R: CsvRow>(rows: &[R], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut text = String::from(R::header());
            text.push('\n');
            for row in rows {
                let _ = writeln!(text, "{}", row.csv_line());
            }
            text
        }
        Format::Json => {
            let mut text =
                serde_json::to_string_pretty(rows).expect("plain structs serialize");
            text.push('\n');
            text
        }
    }
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::Domain(format!("writing {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn radius_grid(r_max: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|i| r_max * i as f64 / (steps - 1) as f64)
        .collect()
}

fn exit_code_for(err: &Error) -> ExitCode {
    match err {
        Error::InvalidParams(_) | Error::Domain(_) => ExitCode::from(EXIT_BAD_PARAMS),
        _ => ExitCode::from(EXIT_NUMERIC),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::GpCurve(args) => cmd_gp_curve(args),
        Command::Figure1(args) => cmd_figure1(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Kernel(args) => cmd_kernel(args),
        Command::Schwarz(args) => cmd_schwarz(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}

fn curve_rows(params: &ModelParams, p: f64, r_max: f64, steps: usize) -> Result<Vec<CurveRow>, Error> {
    // The library's step count is the number of intervals; the CLI's is rows.
    let curve = gp_curve(params, p, r_max, steps - 1)?;
    let rows: Vec<CurveRow> = curve
        .iter()
        .map(|s| CurveRow {
            r: s.r,
            g_value: s.g_value,
            a_star: s.a_star,
            method: s.method.to_string(),
        })
        .collect();
    if rows
        .iter()
        .any(|row| !row.g_value.is_finite() || !row.a_star.is_finite())
    {
        return Err(Error::RootFinding(
            "curve produced a non-finite value".into(),
        ));
    }
    Ok(rows)
}

fn cmd_gp_curve(args: CurveArgs) -> Result<ExitCode, Error> {
    let params = ModelParams::new(args.n, args.alpha)?;
    let rows = curve_rows(&params, args.p, args.r_max, args.steps)?;
    emit(&render(&rows, args.format), &args.out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_figure1(args: Figure1Args) -> Result<ExitCode, Error> {
    let params = ModelParams::new(args.n, args.alpha)?;
    let rows = curve_rows(&params, args.p, args.r_max, args.steps)?;

    let mut running_max = f64::NEG_INFINITY;
    let mut argmax_r = 0.0;
    let mut max_drop = 0.0f64;
    for row in &rows {
        if row.g_value > running_max {
            running_max = row.g_value;
            argmax_r = row.r;
        }
        max_drop = max_drop.max(running_max - row.g_value);
    }
    let verdict = if max_drop > MONOTONE_DROP_TOL {
        "non-monotone"
    } else {
        "monotone"
    };

    emit(&render(&rows, args.format), &args.out)?;
    // Summary goes to stderr so a stdout artifact stays parseable.
    let summary = format!(
        "argmax r* = {}; max later drop = {}; verdict: {verdict}",
        fmt17(argmax_r),
        fmt17(max_drop)
    );
    if args.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, Error> {
    if args.list {
        for name in CHECK_NAMES {
            println!("{name}");
        }
        return Ok(ExitCode::SUCCESS);
    }
    let results = match &args.check {
        Some(name) => vec![run_check(name)?],
        None => run_all(),
    };
    let mut all_passed = true;
    for result in &results {
        println!("{}", result.status_line());
        all_passed &= result.passed;
    }
    if all_passed {
        println!("verify: all {} check(s) passed", results.len());
        Ok(ExitCode::SUCCESS)
    } else {
        println!("verify: FAILURE");
        Ok(ExitCode::from(EXIT_VERIFICATION))
    }
}

fn cmd_kernel(args: KernelArgs) -> Result<ExitCode, Error> {
    let params = ModelParams::new(args.n, args.alpha)?;
    let mut rows = Vec::with_capacity(args.steps);
    for r in radius_grid(args.r_max, args.steps) {
        rows.push(KernelRow {
            r,
            mass_closed: kernel_mass(&params, r)?,
            mass_quadrature: kernel_mass_quadrature(&params, r, DEFAULT_ORDER)?,
            kernel_min: kernel_zonal(&params, r, -1.0)?,
            kernel_max: kernel_zonal(&params, r, 1.0)?,
        });
    }
    if rows.iter().any(|row| {
        !(row.mass_closed.is_finite()
            && row.mass_quadrature.is_finite()
            && row.kernel_min.is_finite()
            && row.kernel_max.is_finite())
    }) {
        return Err(Error::RootFinding(
            "kernel table produced a non-finite value".into(),
        ));
    }
    emit(&render(&rows, args.format), &args.out)?;
    Ok(ExitCode::SUCCESS)
}

/// Random zero-mean zonal polynomial of harmonic degree <= 8: uniform
/// coefficients on the nonconstant modes, nothing on the constant one.
fn random_centered_data(params: ModelParams, rng: &mut ChaCha8Rng) -> ZonalData {
    let coeffs: Vec<f64> = (0..=8)
        .map(|k| {
            if k == 0 {
                0.0
            } else {
                rng.random::<f64>() * 2.0 - 1.0
            }
        })
        .collect();
    ZonalData::new(move |t| {
        coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * zonal_harmonic(&params, k, t))
            .sum()
    })
}

fn cmd_schwarz(args: SchwarzArgs) -> Result<ExitCode, Error> {
    let params = ModelParams::new(args.n, args.alpha)?;
    if args.trials == 0 {
        return Err(Error::Domain("need at least one trial".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let data: Vec<ZonalData> = (0..args.trials)
        .map(|_| random_centered_data(params, &mut rng))
        .collect();

    // Skip r = 0: both sides vanish there.
    let radii: Vec<f64> = radius_grid(args.r_max, args.steps)
        .into_iter()
        .skip(1)
        .collect();
    let mut rows = Vec::with_capacity(radii.len() * args.trials);
    let mut worst_margin = f64::INFINITY;
    for &r in &radii {
        for (trial, datum) in data.iter().enumerate() {
            let outcome = bound_trial(&params, datum, r, args.p)?;
            worst_margin = worst_margin.min(outcome.margin);
            rows.push(TrialRow {
                r,
                trial,
                solution: outcome.solution,
                bound: outcome.bound,
                margin: outcome.margin,
            });
        }
    }
    emit(&render(&rows, args.format), &args.out)?;

    let summary = format!(
        "{} trials x {} radii, seed {}; worst margin = {}",
        args.trials,
        radii.len(),
        args.seed,
        fmt17(worst_margin)
    );
    let verdict_ok = worst_margin >= -1e-9;
    let line = format!(
        "{summary}; verdict: {}",
        if verdict_ok { "bound holds" } else { "BOUND VIOLATED" }
    );
    if args.out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    Ok(if verdict_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFICATION)
    })
}
