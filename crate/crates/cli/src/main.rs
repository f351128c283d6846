mod commands;

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "elrp",
    about = "Two-echelon location-routing solver with stationary and mobile micro-depots",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Baseline,
    Decomp,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Init {
    Flp,
    Kmeans,
}

#[derive(clap::Args, Clone)]
struct SolveOpts {
    /// Base RNG seed; run k uses seed + k.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of independent seeded runs.
    #[arg(long, default_value_t = 1)]
    runs: u32,
    /// Iteration budget override.
    #[arg(long)]
    iters: Option<u64>,
    /// Configuration file (canonical JSON) overriding the defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Baseline search or decomposition start.
    #[arg(long, value_enum, default_value_t = Mode::Baseline)]
    mode: Mode,
    /// Initializer: facility-location heuristic or k-means.
    #[arg(long, value_enum, default_value_t = Init::Flp)]
    init: Init,
    /// Enforce the vehicle-capacity-sum rule at micro-depots.
    #[arg(long)]
    strict_depot_capacity: bool,
    /// Disable direct shipment on first-echelon routes.
    #[arg(long)]
    no_direct_shipment: bool,
    /// Omit wall-clock columns for byte-reproducible reports.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance with repeated seeded runs.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        opts: SolveOpts,
        /// Write a per-iteration CSV trace (seed appended when runs > 1).
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the best solution found.
        #[arg(long)]
        out_solution: Option<PathBuf>,
        /// Emit the report as JSON instead of CSV.
        #[arg(long)]
        json: bool,
    },
    /// Run every instance in a directory and tabulate gaps.
    Bench {
        dir: PathBuf,
        #[command(flatten)]
        opts: SolveOpts,
    },
    /// KPI report for a stored solution.
    ReportKpi { instance: PathBuf, solution: PathBuf },
    /// Generate a synthetic case-study instance.
    Gen {
        #[arg(long, default_value_t = 2000)]
        customers: usize,
        #[arg(long, default_value_t = 40)]
        depots: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact brute-force optimum for tiny instances.
    Oracle {
        instance: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_customers: usize,
        #[arg(long, default_value_t = 3)]
        max_depots: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_thread_pool();
    let result = match cli.command {
        Command::Solve { instance, opts, trace, out_solution, json } => {
            commands::solve(&instance, &opts, trace.as_deref(), out_solution.as_deref(), json)
        }
        Command::Bench { dir, opts } => commands::bench(&dir, &opts),
        Command::ReportKpi { instance, solution } => commands::report_kpi(&instance, &solution),
        Command::Gen { customers, depots, seed, out } => {
            commands::generate(customers, depots, seed, &out)
        }
        Command::Oracle { instance, max_customers, max_depots } => {
            commands::oracle(&instance, max_customers, max_depots)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Caps harness parallelism via ELRP_THREADS; solver runs stay
/// single-threaded regardless.
fn init_thread_pool() {
    #[cfg(feature = "parallel")]
    if let Ok(v) = std::env::var("ELRP_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    }
}
