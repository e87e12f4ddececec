use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use super::bench::{default_mu, run_kernel_benchmark, write_bench_csv, DEFAULT_REPEATS, DEFAULT_SIZES};
use super::config::parse_config;
use super::scenario::{run_scenario, write_trajectory_csv};
use super::verify::{run_suite, Suite};
use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "phdae", version, about = "Port-Hamiltonian descriptor simulations and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate the scenario described by an INI file and write its trajectory CSV.
    Run { config: PathBuf },
    /// Run invariant suites and print one line per check.
    Verify {
        #[arg(long, default_value = "all", value_parser = ["sbp", "structure", "equivalence", "balance", "all"])]
        suite: String,
    },
    /// Timing benchmarks.
    Bench {
        #[command(subcommand)]
        which: BenchCommand,
    },
}

#[derive(Subcommand, Debug)]
enum BenchCommand {
    /// Dense kernel versus sparse implicit constitutive solve.
    Kernel {
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        e: f64,
        #[arg(long, default_value_t = DEFAULT_REPEATS)]
        repeats: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Errors from bad inputs map to 2, everything else to 3.
fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_) | Error::NonPositiveCoefficient(_) | Error::InvalidGrid(_) | Error::DimensionMismatch(_) => EXIT_CONFIG,
        _ => EXIT_NUMERICAL,
    }
}

fn open_output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(path: &Path) -> i32 {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", path.display());
            return EXIT_CONFIG;
        }
    };
    let cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_CONFIG;
        }
    };
    let (_, traj, balance) = match run_scenario(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{}: {e}", cfg.model);
            return exit_code(&e);
        }
    };
    let out = match open_output(cfg.output.as_deref()) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("cannot open output: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Err(e) = write_trajectory_csv(&traj, &balance, cfg.record_every, out) {
        eprintln!("{e}");
        return EXIT_NUMERICAL;
    }
    if cfg.output.is_some() {
        eprintln!(
            "{}: {} steps, max power-balance residual {:.3e}",
            cfg.model,
            traj.steps.len(),
            balance.max_abs_residual
        );
    }
    EXIT_OK
}

fn verify(suite: &str) -> i32 {
    let suite = Suite::parse(suite).expect("validated by clap");
    match run_suite(suite) {
        Ok(rep) => {
            for c in &rep.checks {
                println!("{c}");
            }
            let failed = rep.checks.iter().filter(|c| !c.pass).count();
            println!("{} checks, {failed} failed", rep.checks.len());
            if failed == 0 {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            }
        }
        Err(e) => {
            eprintln!("verification aborted: {e}");
            EXIT_NUMERICAL
        }
    }
}

fn bench_kernel(sizes: Option<Vec<usize>>, mu: Option<f64>, e: f64, repeats: usize, out: Option<&Path>) -> i32 {
    let sizes = sizes.unwrap_or_else(|| DEFAULT_SIZES.to_vec());
    let mu = mu.unwrap_or_else(|| default_mu(1.0));
    let rows = match run_kernel_benchmark(&sizes, mu, e, repeats) {
        Ok(r) => r,
        Err(err) => {
            eprintln!("benchmark failed: {err}");
            return exit_code(&err);
        }
    };
    let w = match open_output(out) {
        Ok(w) => w,
        Err(err) => {
            eprintln!("cannot open output: {err}");
            return EXIT_CONFIG;
        }
    };
    match write_bench_csv(&rows, w) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            eprintln!("{err}");
            EXIT_NUMERICAL
        }
    }
}

/// Parses `argv` (program name first) and runs the subcommand.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::Run { config } => run(&config),
        Command::Verify { suite } => verify(&suite),
        Command::Bench { which: BenchCommand::Kernel { sizes, mu, e, repeats, out } } => bench_kernel(sizes, mu, e, repeats, out.as_deref()),
    }
}
