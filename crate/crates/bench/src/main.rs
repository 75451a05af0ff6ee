use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use eld_bench::{
    comparison_table, run_experiment, write_outputs, BenchConfig, BenchError, ExperimentSpec, ProblemSelector,
};

/// Compare PSO, ABC and BFO on an economic load dispatch problem against
/// the exact lambda-iteration optimum.
#[derive(Debug, Parser)]
#[command(name = "bench", version)]
struct Cli {
    /// Built-in id (problem1, problem2-printed, problem2-corrected) or path to a problem TOML file.
    #[arg(long)]
    problem: String,

    /// pso, abc, bfo, oracle or all.
    #[arg(long, default_value = "all")]
    algo: String,

    /// Seeded runs per algorithm; wall time is averaged over them.
    #[arg(long, default_value_t = 100)]
    runs: usize,

    /// Seed of run 0; run r uses seed + r.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output directory for comparison tables and traces.
    #[arg(long, default_value = "bench-out")]
    out: PathBuf,

    /// TOML file with [pso], [abc] and [bfo] overrides.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Write the best run's convergence trace per algorithm.
    #[arg(long)]
    emit_traces: bool,
}

fn execute(cli: Cli) -> Result<(), BenchError> {
    let mut spec = ExperimentSpec::new(ProblemSelector::parse(&cli.problem), cli.out);
    spec.algorithms = cli.algo.parse()?;
    spec.n_timing_runs = cli.runs;
    spec.seed_base = cli.seed;
    spec.emit_traces = cli.emit_traces;
    if let Some(path) = &cli.config {
        spec.config = BenchConfig::load(path)?;
    }
    let outcome = run_experiment(&spec)?;
    print!("{}", comparison_table(&outcome));
    for path in write_outputs(&outcome, &spec)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bench: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
