//! `lagsphere` command-line harness.
//!
//! Exit status: 0 all gated checks pass, 1 a gated check failed, 2 invalid
//! configuration, 3 numerical breakdown, 4 I/O failure.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lagsphere::integrals::{area_scan, QuadratureGrid};
use lagsphere::report::{field_dump, point_dump, run_verify, FieldQuantity, RunConfig, TolProfile};
use lagsphere::GeomError;

#[derive(Parser)]
#[command(name = "lagsphere", version, about = "Verify Lagrangian spheres in S²×S² numerically")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every identity and global check; writes a JSON report.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Deformation parameters, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0", allow_negative_numbers = true)]
        t: Vec<f64>,
        /// Recompute gated integrals on the doubled grid.
        #[arg(long)]
        refine: bool,
        /// Skip the report-only Bochner integrals.
        #[arg(long)]
        no_bochner: bool,
    },
    /// Tabulate the area A(t) as CSV, optionally with an SVG plot.
    ScanArea {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true, default_value_t = -3.0)]
        t_min: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 3.0)]
        t_max: f64,
        #[arg(long, default_value_t = 121)]
        steps: usize,
        /// Also integrate the area numerically on the grid.
        #[arg(long)]
        quad: bool,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Dump a pointwise quantity over the quadrature grid as CSV.
    Field {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        t: f64,
        /// One of C, H2, K, divJH, theta, xi, sigma2, conf.
        #[arg(long)]
        quantity: String,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Full local geometry and identity residuals at one chart point, as JSON.
    Point {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        t: f64,
        #[arg(long, allow_negative_numbers = true)]
        s1: f64,
        #[arg(long, allow_negative_numbers = true)]
        s2: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    Default,
    Strict,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 4.0)]
    c1: f64,
    #[arg(long, default_value_t = 1.0)]
    c2: f64,
    /// Quadrature grid as NxM (Gauss–Legendre nodes in x, uniform nodes in θ).
    #[arg(long, default_value = "200x256")]
    grid: String,
    #[arg(long, default_value_t = 1e-3)]
    fd_step: f64,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.95)]
    pole_band: f64,
    #[arg(long, value_enum, default_value = "default")]
    tol_profile: Profile,
    /// Output file for JSON; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Numeric(String),
    Io(String),
}

impl From<GeomError> for Failure {
    fn from(e: GeomError) -> Self {
        match e {
            GeomError::InvalidParams { .. } | GeomError::Domain(_) | GeomError::PoleBand { .. } => {
                Failure::Config(e.to_string())
            }
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

fn parse_grid(s: &str) -> Result<(usize, usize), Failure> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| Failure::Config(format!("grid {s:?} is not of the form NxM")))?;
    let p = |v: &str| {
        v.trim()
            .parse::<usize>()
            .map_err(|_| Failure::Config(format!("grid {s:?} is not of the form NxM")))
    };
    Ok((p(a)?, p(b)?))
}

fn config(common: &Common, t: Vec<f64>) -> Result<RunConfig, Failure> {
    let cfg = RunConfig {
        c1: common.c1,
        c2: common.c2,
        t,
        grid: parse_grid(&common.grid)?,
        fd_step: common.fd_step,
        samples: common.samples,
        seed: common.seed,
        pole_band: common.pole_band,
        tol_profile: match common.tol_profile {
            Profile::Default => TolProfile::Default,
            Profile::Strict => TolProfile::Strict,
        },
        ..RunConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn write_out(path: Option<&Path>, body: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, body).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| Failure::Numeric(e.to_string()))
}

/// Returns whether every gated check passed.
fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Verify {
            common,
            t,
            refine,
            no_bochner,
        } => {
            let mut cfg = config(&common, t)?;
            cfg.refine = refine;
            cfg.bochner = !no_bochner;
            let report = run_verify(&cfg)?;
            for m in &report.members {
                for s in &m.identities {
                    eprintln!(
                        "t={:<8} {:<16} max {:.3e} {:?}",
                        m.t, s.id, s.max_residual, s.status
                    );
                }
                for g in &m.globals {
                    let verdict = if !g.gated {
                        "report-only"
                    } else if g.passes() {
                        "pass"
                    } else {
                        "FAIL"
                    };
                    eprintln!("t={:<8} {:<16} {:.9} vs {:.9} {verdict}", m.t, g.id, g.value, g.expected);
                }
            }
            write_out(common.out.as_deref(), &to_json(&report)?)?;
            Ok(report.overall)
        }
        Command::ScanArea {
            common,
            t_min,
            t_max,
            steps,
            quad,
            csv,
            svg,
        } => {
            let cfg = config(&common, vec![0.0])?;
            let params = cfg.validate()?;
            let grid = if quad {
                Some(QuadratureGrid::new(cfg.grid.0, cfg.grid.1)?)
            } else {
                None
            };
            let scan = area_scan(&params, t_min, t_max, steps, grid.as_ref())?;
            write_out(csv.as_deref(), &output::scan_csv(&scan))?;
            if let Some(p) = svg {
                write_out(Some(&p), &output::scan_svg(&scan))?;
            }
            if let Some(p) = common.out.as_deref() {
                write_out(Some(p), &to_json(&scan.analysis)?)?;
            }
            Ok(true)
        }
        Command::Field {
            common,
            t,
            quantity,
            csv,
        } => {
            let q: FieldQuantity = quantity.parse()?;
            let cfg = config(&common, vec![t])?;
            let rows = field_dump(&cfg, t, q)?;
            write_out(csv.as_deref().or(common.out.as_deref()), &output::field_csv(&rows))?;
            Ok(true)
        }
        Command::Point { common, t, s1, s2 } => {
            let cfg = config(&common, vec![t])?;
            let dump = point_dump(&cfg, t, s1, s2)?;
            write_out(common.out.as_deref(), &to_json(&dump)?)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(m)) => {
            eprintln!("numerical breakdown: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Io(m)) => {
            eprintln!("i/o error: {m}");
            ExitCode::from(4)
        }
    }
}
