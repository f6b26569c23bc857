use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use torus_cone::angle::parse_angle;
use torus_cone::cone::{Cone, KnotCone, LinkCone, DEFAULT_MARGIN};
use torus_cone::exec::Execution;
use torus_cone::export::{write_polyhedron, PolyhedronFile};
use torus_cone::polyhedron::{build_polyhedron_with, BuildOptions};
use torus_cone::report::{evaluate, ReportOptions};
use torus_cone::scan::{run_scan, to_csv, AxisRange, ScanGrid, ScanKind, ScanOptions};
use torus_cone::verify::{self, Scope, VerifyConfig};
use torus_cone::DEFAULT_TOL;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Caps the worker pool; unset means one worker per core.
const THREADS_ENV: &str = "TORUS_CONE_THREADS";

#[derive(Parser)]
#[command(
    name = "torus-cone",
    version,
    about = "Spherical cone-manifold structures on the torus knots t(2n+1,2) and links t(2n,2)",
    after_help = "Angles accept decimals or multiples of pi: pi, 3pi/5, -pi/2, 0.5pi.\n\
                  Exit codes: 0 pass, 1 verification failure, 2 usage or domain error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form and geometric values for one cone-manifold.
    Report(ReportArgs),
    /// Tabulate a grid of cone angles as CSV.
    Scan(ScanArgs),
    /// Run the verification suites.
    Verify(VerifyArgs),
    /// Write the fundamental polyhedron as JSON.
    Export(ExportArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Knot,
    Link,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    All,
    Knot,
    Link,
}

#[derive(Args)]
struct ConeArgs {
    kind: Kind,
    #[arg(long)]
    n: u32,
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    alpha: f64,
    /// Second cone angle (links only).
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Distance kept from the domain boundary.
    #[arg(long, default_value_t = DEFAULT_MARGIN)]
    margin: f64,
    /// Evaluate outside the domain; results are marked unverified.
    #[arg(long)]
    force: bool,
}

impl ConeArgs {
    fn cone(&self) -> anyhow::Result<Cone> {
        Ok(match (self.kind, self.beta) {
            (Kind::Knot, None) => Cone::Knot(KnotCone::new(self.n, self.alpha)?),
            (Kind::Knot, Some(_)) => bail!(UsageError("--beta applies to links only".into())),
            (Kind::Link, Some(b)) => Cone::Link(LinkCone::new(self.n, self.alpha, b)?),
            (Kind::Link, None) => bail!(UsageError("links need --beta".into())),
        })
    }
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    cone: ConeArgs,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Also write the record as JSON (`-` for stdout).
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    kind: Kind,
    #[arg(long)]
    n: u32,
    /// Points per axis.
    #[arg(long, default_value_t = 100)]
    grid: usize,
    /// Distance of the default ranges from the domain boundary (knots) or
    /// from 0 and 2π (links).
    #[arg(long, default_value_t = 1e-3)]
    margin: f64,
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    alpha_min: Option<f64>,
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    alpha_max: Option<f64>,
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    beta_min: Option<f64>,
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    beta_max: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Evaluate out-of-domain points too; they are marked unverified.
    #[arg(long)]
    force: bool,
    /// CSV destination; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = ScopeArg::All)]
    scope: ScopeArg,
    #[arg(long, default_value_t = 4)]
    max_n: u32,
    /// Points per axis on the domain grids.
    #[arg(long, default_value_t = 25)]
    grid: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = VerifyConfig::default().seed)]
    seed: u64,
    /// Write the summary as JSON (`-` for stdout).
    #[arg(long)]
    json: Option<PathBuf>,
    /// Perturb every selected λ by this amount (self-test of the suites).
    #[arg(long, hide = true, allow_hyphen_values = true)]
    inject_fault: Option<f64>,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    cone: ConeArgs,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long)]
    out: PathBuf,
}

/// Errors that should exit with the usage code.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_USAGE);
    }
    let result = match cli.command {
        Command::Report(a) => cmd_report(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Export(a) => cmd_export(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

#[cfg(feature = "parallel")]
fn configure_threads() -> anyhow::Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("{THREADS_ENV}={v:?} is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the worker pool")?;
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn configure_threads() -> anyhow::Result<()> {
    if std::env::var_os(THREADS_ENV).is_some() {
        eprintln!("note: {THREADS_ENV} ignored, built without the parallel feature");
    }
    Ok(())
}

fn write_output(path: &Path, contents: &str) -> anyhow::Result<()> {
    if path.as_os_str() == "-" {
        io::stdout().write_all(contents.as_bytes())?;
        return Ok(());
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn cmd_report(args: ReportArgs) -> anyhow::Result<bool> {
    let cone = args.cone.cone()?;
    let opts = ReportOptions {
        tol: args.tol,
        margin: args.cone.margin,
        force: args.cone.force,
        ..ReportOptions::default()
    };
    let record = evaluate(&cone, &opts)?;
    println!("{record}");
    if let Some(path) = &args.json {
        write_output(path, &(serde_json::to_string_pretty(&record)? + "\n"))?;
    }
    Ok(record.pass)
}

fn cmd_scan(args: ScanArgs) -> anyhow::Result<bool> {
    let mut grid = match args.kind {
        Kind::Knot => ScanGrid::knot(args.n, args.grid, args.margin),
        Kind::Link => ScanGrid::link(args.n, args.grid, args.margin),
    };
    let override_axis = |axis: &mut AxisRange, min: Option<f64>, max: Option<f64>| {
        axis.min = min.unwrap_or(axis.min);
        axis.max = max.unwrap_or(axis.max);
    };
    override_axis(&mut grid.alpha, args.alpha_min, args.alpha_max);
    match (grid.kind, grid.beta.as_mut()) {
        (ScanKind::Link, Some(b)) => override_axis(b, args.beta_min, args.beta_max),
        _ if args.beta_min.is_some() || args.beta_max.is_some() => {
            bail!(UsageError("beta ranges apply to links only".into()))
        }
        _ => {}
    }
    let opts = ScanOptions {
        tol: args.tol,
        force: args.force,
        exec: Execution::default(),
    };
    let rows = run_scan(&grid, &opts)?;
    let csv = to_csv(&rows);
    match &args.out {
        Some(path) => {
            write_output(path, &csv)?;
            let inside = rows.iter().filter(|r| r.in_domain).count();
            eprintln!("{} rows ({inside} in domain) written to {}", rows.len(), path.display());
        }
        None => io::stdout().write_all(csv.as_bytes())?,
    }
    Ok(true)
}

fn cmd_verify(args: VerifyArgs) -> anyhow::Result<bool> {
    let scope = match args.scope {
        ScopeArg::All => Scope::All,
        ScopeArg::Knot => Scope::Knot,
        ScopeArg::Link => Scope::Link,
    };
    let min_n = if matches!(scope, Scope::Link) { 2 } else { 1 };
    if args.max_n < min_n {
        bail!(UsageError(format!("--max-n must be ≥ {min_n} for this scope")));
    }
    if args.grid < 1 {
        bail!(UsageError("--grid must be ≥ 1".into()));
    }
    let cfg = VerifyConfig {
        scope,
        max_n: args.max_n,
        grid: args.grid,
        tol: args.tol,
        seed: args.seed,
        lambda_fault: args.inject_fault.unwrap_or(0.0),
        ..VerifyConfig::default()
    };
    let start = std::time::Instant::now();
    let summary = verify::run(&cfg);
    println!("{summary}");
    println!("elapsed {:.2} s", start.elapsed().as_secs_f64());
    if let Some(path) = &args.json {
        write_output(path, &(serde_json::to_string_pretty(&summary)? + "\n"))?;
    }
    Ok(summary.pass())
}

fn cmd_export(args: ExportArgs) -> anyhow::Result<bool> {
    let cone = args.cone.cone()?;
    let opts = BuildOptions {
        margin: args.cone.margin,
        forced: args.cone.force,
        lambda_offset: 0.0,
    };
    let poly = build_polyhedron_with(&cone, &opts)?;
    write_polyhedron(&poly, &args.out)?;
    let file = PolyhedronFile::from_polyhedron(&poly);
    let claims = poly.verify(args.tol);
    let pass = poly.verified && claims.iter().all(|c| c.pass);
    println!(
        "{} vertices + 2 poles written to {} ({})",
        file.vertices.len(),
        args.out.display(),
        if pass { "verified" } else { "UNVERIFIED" }
    );
    Ok(pass)
}
