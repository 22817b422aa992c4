use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pnkit::config::{ConfigError, Manifold, Pinned, RunConfig};
use pnkit::groupoid_cli::{self, Command};
use pnkit::io::{read_points, spectrum_dump, DumpError};
use pnkit::suite::SuiteError;
use pnkit::{exit, run_suite};
use pnkit_core::geometry::ChartId;

#[derive(Parser)]
#[command(
    name = "pnkit",
    version,
    about = "Numerical checks of PN structures on Grassmannian orbits"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the check suite and write a JSON report.
    Verify(VerifyArgs),
    /// Tabulate GT values and Nijenhuis eigenvalues at given points.
    Spectrum(SpectrumArgs),
    /// Groupoid operations on JSON arguments.
    Groupoid {
        #[arg(value_enum)]
        op: GroupoidOp,
        #[arg(long)]
        json: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ManifoldArg {
    Cpn,
    Grass,
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupoidOp {
    Compose,
    Member,
    Target,
    PairMap,
}

#[derive(Args)]
struct OrbitArgs {
    #[arg(long, value_enum, default_value = "cpn")]
    manifold: ManifoldArg,
    /// Matrix size.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    #[arg(long, requires = "pin_kappa")]
    pin_c: Option<f64>,
    #[arg(long, requires = "pin_c")]
    pin_kappa: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    orbit: OrbitArgs,
    #[arg(long = "t", value_delimiter = ',', allow_hyphen_values = true)]
    t_values: Option<Vec<f64>>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    fd_step: Option<f64>,
    #[arg(long)]
    nested_fd_step: Option<f64>,
    /// Tolerance override, NAME=VALUE; repeatable.
    #[arg(long = "tol", value_parser = parse_tol)]
    tolerances: Vec<(String, f64)>,
    #[arg(long, value_delimiter = ',')]
    checks: Option<Vec<String>>,
    #[arg(long)]
    groupoid_cases: Option<usize>,
    #[arg(long)]
    m0_gap: Option<f64>,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    orbit: OrbitArgs,
    #[arg(long)]
    points: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got {s}"))?;
    let value = value.parse::<f64>().map_err(|e| format!("{name}: {e}"))?;
    Ok((name.to_string(), value))
}

fn base_config(o: &OrbitArgs) -> RunConfig {
    let manifold = match o.manifold {
        ManifoldArg::Cpn => Manifold::Cpn,
        ManifoldArg::Grass => Manifold::Grassmannian,
    };
    let mut cfg = RunConfig::new(manifold, o.n, o.k);
    cfg.seed = o.seed;
    if let (Some(c), Some(kappa)) = (o.pin_c, o.pin_kappa) {
        cfg.pinned_constants = Some(Pinned { c, kappa });
    }
    cfg
}

fn verify_config(a: &VerifyArgs) -> RunConfig {
    let mut cfg = base_config(&a.orbit);
    if let Some(t) = &a.t_values {
        cfg.t_values = t.clone();
    }
    if let Some(s) = a.samples {
        cfg.samples = s;
    }
    if let Some(s) = a.fd_step {
        cfg.fd_step = s;
    }
    if let Some(s) = a.nested_fd_step {
        cfg.nested_fd_step = s;
    }
    for (name, value) in &a.tolerances {
        cfg.tolerances.insert(name.clone(), *value);
    }
    if let Some(c) = &a.checks {
        cfg.checks = c.clone();
    }
    if let Some(g) = a.groupoid_cases {
        cfg.groupoid_cases = g;
    }
    if let Some(g) = a.m0_gap {
        cfg.m0_gap = g;
    }
    cfg
}

fn open_out(path: &Option<PathBuf>) -> std::io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn config_error(e: &ConfigError) -> ExitCode {
    eprintln!("config error: {e}");
    ExitCode::from(exit::CONFIG as u8)
}

fn suite_error(e: &SuiteError) -> ExitCode {
    match e {
        SuiteError::Config(c) => config_error(c),
        SuiteError::Numerical(n) => {
            eprintln!("numerical error: {n}");
            ExitCode::from(exit::NUMERICAL as u8)
        }
    }
}

fn verify(a: &VerifyArgs) -> ExitCode {
    let cfg = verify_config(a);
    let report = match run_suite(&cfg) {
        Ok(r) => r,
        Err(e) => return suite_error(&e),
    };
    for r in &report.results {
        eprintln!(
            "{} {:<28} residual {:.3e} tol {:.1e} points {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.max_residual,
            r.tolerance,
            r.points_evaluated
        );
    }
    let written = open_out(&a.out).and_then(|mut w| writeln!(w, "{}", report.to_json()).and_then(|_| w.flush()));
    if let Err(e) = written {
        eprintln!("cannot write report: {e}");
        return ExitCode::from(exit::CONFIG as u8);
    }
    ExitCode::from(if report.all_pass() {
        exit::PASS
    } else {
        exit::CHECK_FAILURE
    } as u8)
}

fn spectrum(a: &SpectrumArgs) -> ExitCode {
    let cfg = base_config(&a.orbit);
    if let Err(e) = cfg.validate() {
        return config_error(&e);
    }
    let points = File::open(&a.points)
        .map_err(pnkit::io::IoError::from)
        .and_then(|f| read_points(f, &cfg.spec(), &ChartId::standard(cfg.k)));
    let points = match points {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(exit::CONFIG as u8);
        }
    };
    let out = match open_out(&a.out) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("cannot open output: {e}");
            return ExitCode::from(exit::CONFIG as u8);
        }
    };
    match spectrum_dump(&cfg, &points, out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(DumpError::Suite(e)) => suite_error(&e),
        Err(DumpError::Io(e)) => {
            eprintln!("{e}");
            ExitCode::from(exit::CONFIG as u8)
        }
    }
}

fn groupoid(op: GroupoidOp, json: &str) -> ExitCode {
    let command = match op {
        GroupoidOp::Compose => Command::Compose,
        GroupoidOp::Member => Command::Member,
        GroupoidOp::Target => Command::Target,
        GroupoidOp::PairMap => Command::PairMap,
    };
    match groupoid_cli::run_str(command, json) {
        Ok(v) => {
            println!("{v}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            println!("{}", f.body);
            ExitCode::from(f.code as u8)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Cmd::Verify(a) => verify(a),
        Cmd::Spectrum(a) => spectrum(a),
        Cmd::Groupoid { op, json } => groupoid(*op, json),
    }
}
