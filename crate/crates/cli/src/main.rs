//! `nefdual`: dual measures of natural exponential families from the command line.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::commands::{CliError, Outcome};
use crate::report::{write_atomic, Config, Timing};

#[derive(Debug, Parser)]
#[command(name = "nefdual", version, about = "Dual measures of natural exponential families")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Write the JSON report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Write the command's table to this path.
    #[arg(long, global = true, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// Tolerance for pass/fail judgements (each command has its own default).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for anything random.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Record wall-clock time in the report (makes it non-reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Browse the family catalog.
    #[command(subcommand)]
    Catalog(CatalogCmd),
    /// Verify, derive or refute duals.
    #[command(subcommand)]
    Dual(DualCmd),
    /// Lévy–Khintchine identities.
    #[command(subcommand)]
    Levy(LevyCmd),
    /// Large-deviation rates and tails.
    #[command(subcommand)]
    Ldp(LdpCmd),
    /// The dilogarithm law and its relatives.
    #[command(subcommand)]
    Dilog(DilogCmd),
    /// Multivariate families.
    #[command(subcommand)]
    Multivar(MultivarCmd),
}

#[derive(Debug, Subcommand)]
pub enum CatalogCmd {
    List,
    Show {
        name: String,
        /// Family parameter, e.g. `--param p=1.5`.
        #[arg(long = "param", value_parser = parse_kv)]
        params: Vec<(String, f64)>,
    },
}

#[derive(Debug, Subcommand)]
pub enum DualCmd {
    /// Check `-ℓ*'(-ℓ'(s)) = s` for a catalog family and its registered dual.
    Check {
        name: String,
        #[arg(long, default_value_t = 50)]
        grid: usize,
        #[arg(long = "param", value_parser = parse_kv)]
        params: Vec<(String, f64)>,
        /// Matrix order for `wishart`.
        #[arg(long, default_value_t = 3)]
        order: usize,
        /// Shape for `wishart`.
        #[arg(long, default_value_t = 2.0)]
        shape: f64,
    },
    /// Build `ℓ*` from a variance expression in `m`.
    Derive {
        #[arg(long)]
        variance: String,
        /// Mean domain `lo:hi`, with `inf` and `-inf` allowed.
        #[arg(long)]
        domain: String,
        /// `m0,s0,l0` with `ℓ*'(m0) = s0` and `ℓ*(m0) = l0`.
        #[arg(long)]
        anchor: Option<String>,
        #[arg(long, default_value_t = 11)]
        points: usize,
    },
    /// Run a nonexistence test: vinogradov_paris, hyperbolic, tweedie_neg,
    /// mnegbin, nmga:k,n, h1, h2, h3.
    Certify {
        case: String,
        #[arg(long = "param", value_parser = parse_kv)]
        params: Vec<(String, f64)>,
    },
}

#[derive(Debug, Subcommand)]
pub enum LevyCmd {
    /// Verify an identity (or `all`) at grid points.
    Verify {
        id: String,
        #[arg(long = "R", default_value_t = 2.0)]
        r: f64,
        #[arg(long, default_value_t = 1.5)]
        gamma: f64,
        #[arg(long, default_value_t = 20)]
        grid: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum LdpCmd {
    /// Cramér rate `h(m0, m)` of a catalog family.
    Rate {
        name: String,
        #[arg(long, allow_hyphen_values = true)]
        m0: f64,
        #[arg(long, allow_hyphen_values = true)]
        m: f64,
        #[arg(long = "param", value_parser = parse_kv)]
        params: Vec<(String, f64)>,
    },
    /// Exact `Pr(X̄_n > m)^{1/n}` for symmetric ±1 steps.
    Binom {
        #[arg(long, allow_hyphen_values = true)]
        m: f64,
        #[arg(long = "n-list", value_delimiter = ',', required = true)]
        n_list: Vec<u64>,
    },
    /// Monte Carlo `Pr(X̄_n > m)^{1/n}`; `--seed` is required.
    Mc {
        name: String,
        #[arg(long, allow_hyphen_values = true)]
        m: f64,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Law parameter: Poisson mean, gamma shape or Gaussian sigma.
        #[arg(long)]
        law_param: Option<f64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum DilogCmd {
    /// pmf of the dilogarithm law on `0..=n`.
    Pmf {
        #[arg(long, default_value_t = 50)]
        n: usize,
    },
    /// pmf of `Y - Y'` on `-n..=n`.
    Sigma {
        #[arg(long, default_value_t = 10)]
        n: i64,
        /// Also compare with the convolution of two dilogarithm tables.
        #[arg(long)]
        crosscheck: bool,
    },
    /// pmf of the law generated by `sinh`.
    Alpha {
        #[arg(long, default_value_t = 50)]
        n: usize,
    },
    /// Density of `N(0,1) + σ` on `lo:hi:count`.
    Wdensity {
        #[arg(long, default_value = "-5:5:21", allow_hyphen_values = true)]
        range: String,
    },
    /// `α*α ⊛ law(2Y) = μ^{*4}` on `0..=n`.
    Convcheck {
        #[arg(long, default_value_t = 100)]
        n: usize,
    },
    /// Draw from the dilogarithm (or `alpha`) law; `--seed` is required.
    Sample {
        #[arg(long, default_value = "dilog")]
        family: String,
        #[arg(long, default_value_t = 100_000)]
        count: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum MultivarCmd {
    /// Self-duality of Wishart families at random points.
    Wishart {
        #[arg(long, default_value_t = 3)]
        order: usize,
        #[arg(long, default_value_t = 2.0)]
        shape: f64,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
    /// Closed dual variance of the multinomial against the inverse Hessian.
    Multinomial {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
    /// Dual variance of NM-ga₀ at `s` (or at random points).
    Nmga0 {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        s: Option<Vec<f64>>,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
}

fn parse_kv(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("`{v}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(run(cli, argv[1..].to_vec()))
}

fn run(cli: Cli, command: Vec<String>) -> u8 {
    let start = Instant::now();
    let config = Config { tolerance: cli.global.tol, seed: cli.global.seed, ..Config::default() };
    let outcome = match commands::dispatch(&cli, command, config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Lib(nefdual::Error::Syntax { .. }) = e {
                eprintln!("\nvariance expressions follow\n{}", nefdual::varexpr::GRAMMAR);
            }
            return e.exit_code();
        }
    };
    let Outcome { mut report, table, lines } = outcome;
    if cli.global.timing {
        report.timing = Some(Timing { elapsed_seconds: start.elapsed().as_secs_f64() });
    }
    for l in &lines {
        println!("{l}");
    }
    for r in &report.results {
        let verdict = match r.pass {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "INFO",
        };
        match (r.residual, r.tolerance) {
            (Some(res), Some(tol)) => {
                println!("{verdict} {}: value {} residual {res:e} (tol {tol:e})", r.name, show(r.value))
            }
            _ => println!("{verdict} {}: {}", r.name, show(r.value)),
        }
    }
    if let Err(e) = write_outputs(&cli.global, &report, table.as_ref()) {
        eprintln!("error: writing output: {e}");
        return 1;
    }
    if report.passed() {
        0
    } else {
        1
    }
}

fn show(x: f64) -> String {
    if x != 0.0 && (x.abs() < 1e-4 || x.abs() >= 1e7) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn write_outputs(g: &GlobalArgs, report: &report::Report, table: Option<&report::Table>) -> std::io::Result<()> {
    if let Some(p) = &g.json {
        write_atomic(p, &report.to_json()?)?;
    }
    if let Some(p) = &g.csv {
        match table {
            Some(t) => write_atomic(p, &t.to_csv()?)?,
            None => eprintln!("warning: this command produces no table; --csv ignored"),
        }
    }
    Ok(())
}
