use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use meltsph::bench::{self, RunOptions};
use meltsph::exec::{self, Execution};
use meltsph::gradlab;
use meltsph::integrator::Simulation;
use meltsph::io::load_scenario;

#[derive(Parser)]
#[command(name = "meltsph", version, about = "SPH solver for thermo-capillary flow with melting")]
struct Cli {
    /// Worker threads for the parallel loops.
    #[arg(long, global = true, env = "MELTSPH_THREADS")]
    threads: Option<usize>,
    /// Run all particle loops on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    /// Print diagnostics lines to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file.
    Run {
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        resolution_scale: f64,
        #[arg(long)]
        max_steps: Option<u64>,
    },
    /// Run a shipped benchmark and print its observables as JSON.
    Bench {
        name: String,
        #[arg(long, default_value_t = 1.0)]
        resolution_scale: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        max_steps: Option<u64>,
    },
    /// Compare gradient approximations near an interface.
    Gradlab {
        config: PathBuf,
        /// Emit JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// List the shipped benchmarks.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = exec::init_thread_pool(n) {
            eprintln!("warning: could not set thread count: {e}");
        }
    }
    let policy = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    match dispatch(cli.command, policy, cli.verbose) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Command, exec: Execution, verbose: bool) -> meltsph::Result<ExitCode> {
    match cmd {
        Command::Run { scenario, out, resolution_scale, max_steps } => {
            let cfg = load_scenario(&scenario)?.scaled(resolution_scale)?;
            let opts = RunOptions { out_dir: out, max_steps, verbose, exec };
            let mut sim = Simulation::new(cfg, exec)?;
            eprintln!(
                "{}: {} particles, dt {:e}, stable dt {:e}, {} thread(s)",
                sim.config.scenario.name,
                sim.particles.len(),
                sim.dt,
                sim.stable_dt().min(),
                if exec.is_parallel() { exec::current_threads() } else { 1 }
            );
            let summary = bench::run_simulation(&mut sim, &opts, |_| true)?;
            println!("{}", serde_json::to_string_pretty(&summary).unwrap_or_default());
            Ok(match summary.failure {
                Some(f) => {
                    eprintln!("run failed: {f}");
                    ExitCode::FAILURE
                }
                None => ExitCode::SUCCESS,
            })
        }
        Command::Bench { name, resolution_scale, out, max_steps } => {
            let opts = RunOptions { out_dir: out, max_steps, verbose, exec };
            let report = bench::run_benchmark(&name, resolution_scale, &opts)?;
            println!("{}", serde_json::to_string_pretty(&report).unwrap_or_default());
            Ok(if report.run.failure.is_some() { ExitCode::FAILURE } else { ExitCode::SUCCESS })
        }
        Command::Gradlab { config, json } => {
            let cfg = gradlab::load_gradlab(&config)?;
            let report = gradlab::run_gradlab(&cfg)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).unwrap_or_default());
            } else {
                print!("{}", report.table());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::List => {
            for n in bench::scenario_names() {
                println!("{n}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
