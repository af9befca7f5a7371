//! Verification front end: configure parameters, run a named identity
//! suite, write a deterministic JSON report (or a CSV sweep table), and
//! exit nonzero when anything fails.

mod config;
mod report;
mod suites;
mod sweep;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use config::{parse_complex, ComplexField, OutputFormat, SuiteConfig, SweepParam};
use report::ResidualReport;
use suites::{SuiteError, SuiteRunner};

#[derive(Parser, Debug)]
#[command(
    name = "verify",
    about = "Run machine-precision residual checks for the elliptic R-operator identity suite",
    after_help = "Suites: theta, ybe-pointwise, subspace, belavin-props, ybe-matrix, \
                  irf-star-triangle, vertex-irf, duality, weyl-kac, exchange, rll, \
                  belavin-vertex-irf, belavin-rll, all"
)]
struct Cli {
    /// Suite to run
    suite: String,

    /// JSON config file; command-line flags override its fields
    #[arg(long)]
    config: Option<String>,

    /// Modular parameter, e.g. "0.2+1.0i"
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<String>,

    /// Shift parameter, e.g. "0.41421356237309515" or "0.3+0.1i"
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,

    /// Weight window "K1,K2"
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,

    /// Dimension override for the fixed-k suites
    #[arg(long)]
    k: Option<usize>,

    /// Explicit spectral parameters (repeatable), e.g. --xi 0.3+0.1i
    #[arg(long = "xi", allow_hyphen_values = true)]
    xi: Vec<String>,

    /// Number of random draws per scan when --xi is not given
    #[arg(long)]
    draws: Option<usize>,

    /// PRNG seed
    #[arg(long)]
    seed: Option<u64>,

    /// Pass/fail tolerance
    #[arg(long)]
    tol: Option<f64>,

    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<String>,

    /// Report format
    #[arg(long, value_parser = ["json", "csv"])]
    format: Option<String>,

    /// Sweep one parameter over --grid instead of a single run
    #[arg(long, value_parser = ["xi", "mu", "tau-imag"])]
    sweep: Option<String>,

    /// Comma-separated grid for --sweep
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_GENERICITY: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK_FAILED)
            }
        }
        Err(SuiteError::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(SuiteError::Genericity(m)) => {
            eprintln!("genericity error: {m}");
            ExitCode::from(EXIT_GENERICITY)
        }
    }
}

fn run(cli: Cli) -> Result<bool, SuiteError> {
    let cfg = build_config(&cli)?;

    if let Some(sweep_name) = &cli.sweep {
        let param = match sweep_name.as_str() {
            "xi" => SweepParam::Xi,
            "mu" => SweepParam::Mu,
            "tau-imag" => SweepParam::TauImag,
            other => return Err(SuiteError::Config(format!("unknown sweep parameter {other:?}"))),
        };
        let grid_str = cli
            .grid
            .as_deref()
            .ok_or_else(|| SuiteError::Config("--sweep requires --grid v1,v2,...".into()))?;
        let grid: Vec<f64> = grid_str
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| SuiteError::Config(format!("bad grid value {s:?}")))
            })
            .collect::<Result<_, _>>()?;
        // validate the base config eagerly so config errors beat sweep output
        SuiteRunner::new(&cfg)?;
        let rows = sweep::run_sweep(&cfg, param, &grid)?;
        let body = match cfg.format {
            OutputFormat::Csv => report::sweep_csv(&rows),
            OutputFormat::Json => serde_json::to_string_pretty(&rows).expect("serializable"),
        };
        emit(&cfg, &body)?;
        let pass = rows.iter().all(|r| r.pass != "false");
        return Ok(pass);
    }

    let runner = SuiteRunner::new(&cfg)?;
    let started = Instant::now();
    let checks = runner.run();
    let wall = started.elapsed().as_secs_f64() * 1e3;
    let rep = ResidualReport::new(&cfg, checks, wall);
    emit(&cfg, &rep.to_json())?;
    Ok(rep.pass)
}

fn emit(cfg: &SuiteConfig, body: &str) -> Result<(), SuiteError> {
    match &cfg.out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| SuiteError::Config(format!("cannot write {path}: {e}"))),
        None => {
            println!("{body}");
            Ok(())
        }
    }
}

fn build_config(cli: &Cli) -> Result<SuiteConfig, SuiteError> {
    let mut cfg: SuiteConfig = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| SuiteError::Config(format!("cannot read {path}: {e}")))?;
            serde_json::from_str(&text)
                .map_err(|e| SuiteError::Config(format!("bad config file {path}: {e}")))?
        }
        None => SuiteConfig::default(),
    };
    cfg.suite = cli.suite.clone();
    if let Some(t) = &cli.tau {
        cfg.tau = parse_complex(t).map_err(SuiteError::Config)?.into();
    }
    if let Some(m) = &cli.mu {
        cfg.mu = parse_complex(m).map_err(SuiteError::Config)?.into();
    }
    if let Some(w) = &cli.window {
        let parts: Vec<&str> = w.split(',').collect();
        if parts.len() != 2 {
            return Err(SuiteError::Config(format!("--window expects K1,K2, got {w:?}")));
        }
        let k1 = parts[0].trim().parse::<i32>().map_err(|_| {
            SuiteError::Config(format!("bad window bound {:?}", parts[0]))
        })?;
        let k2 = parts[1].trim().parse::<i32>().map_err(|_| {
            SuiteError::Config(format!("bad window bound {:?}", parts[1]))
        })?;
        cfg.window = (k1, k2);
    }
    if cli.k.is_some() {
        cfg.k = cli.k;
    }
    if !cli.xi.is_empty() {
        cfg.xi = cli
            .xi
            .iter()
            .map(|s| parse_complex(s).map(ComplexField::from))
            .collect::<Result<_, _>>()
            .map_err(SuiteError::Config)?;
    }
    if let Some(d) = cli.draws {
        cfg.draws = d;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.tol {
        cfg.tol = t;
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    if let Some(f) = &cli.format {
        cfg.format = match f.as_str() {
            "json" => OutputFormat::Json,
            "csv" => OutputFormat::Csv,
            other => return Err(SuiteError::Config(format!("unknown format {other:?}"))),
        };
    }
    Ok(cfg)
}
