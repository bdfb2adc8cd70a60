use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use qtele::cli::{self, CliError, CliResult};

#[derive(Parser)]
#[command(name = "qtele", version, about = "Fiber teleportation simulator and analysis tools")]
struct Args {
    /// TOML configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `run.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value_t = default_workers())]
    workers: usize,
    /// Write JSON output here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Fail with exit code 3 when feed-forward cannot arrive in time.
    #[arg(long, global = true)]
    strict_timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full simulated experiment.
    Run {
        /// Override `run.mode` (with_ff | without_ff).
        #[arg(long, value_parser = ["with_ff", "without_ff"])]
        mode: Option<String>,
        /// Override `run.trials_per_state`.
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Reconstruct a state from a JSON count table.
    TomoState { counts: PathBuf },
    /// Reconstruct χ from JSON output states keyed t0, t1, D, R.
    TomoProcess { states: PathBuf },
    /// Classical-bound p-value for an observed mean fidelity.
    Hoeffding {
        #[arg(long)]
        fidelity: f64,
        #[arg(long)]
        trials: u64,
    },
    /// Itemized four-fold coincidence rate.
    RateBudget,
    /// Feed-forward timing and slack.
    Timeline,
    /// Haar-averaged fidelity of measure-and-prepare.
    ClassicalBaseline {
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn emit<T: Serialize>(out: &Option<PathBuf>, value: &T, text: &str) -> CliResult<()> {
    print!("{text}");
    if let Some(path) = out {
        let json = serde_json::to_string_pretty(value).expect("output serializes");
        cli::write_text(path, &json)?;
    }
    Ok(())
}

fn execute(args: Args) -> CliResult<()> {
    match args.command {
        Command::Run { mode, trials } => {
            let mut cfg = cli::load_config(args.config.as_deref(), args.seed)?;
            if let Some(m) = mode {
                cfg.run.mode = if m == "with_ff" {
                    qtele::Mode::WithFeedForward
                } else {
                    qtele::Mode::WithoutFeedForward
                };
            }
            if let Some(n) = trials {
                cfg.run.trials_per_state = n;
            }
            let report = cli::cmd_run(&cfg, args.workers, args.strict_timing)?;
            emit(&args.out, &report, &report.render_text())
        }
        Command::TomoState { counts } => {
            let (out, text) = cli::cmd_tomo_state(&cli::read_text(&counts)?)?;
            emit(&args.out, &out, &text)
        }
        Command::TomoProcess { states } => {
            let (out, text) = cli::cmd_tomo_process(&cli::read_text(&states)?)?;
            emit(&args.out, &out, &text)
        }
        Command::Hoeffding { fidelity, trials } => {
            let (out, text) = cli::cmd_hoeffding(fidelity, trials)?;
            emit(&args.out, &out, &text)
        }
        Command::RateBudget => {
            let cfg = cli::load_config(args.config.as_deref(), args.seed)?;
            let (out, text) = cli::cmd_rate_budget(&cfg)?;
            emit(&args.out, &out, &text)
        }
        Command::Timeline => {
            let cfg = cli::load_config(args.config.as_deref(), args.seed)?;
            match cli::cmd_timeline(&cfg, false) {
                Ok((out, text)) => {
                    emit(&args.out, &out, &text)?;
                    if args.strict_timing && !out.feasible {
                        return Err(CliError::InfeasibleTiming { slack_ns: out.slack_ns });
                    }
                    Ok(())
                }
                Err(e) => Err(e),
            }
        }
        Command::ClassicalBaseline { samples } => {
            let cfg = cli::load_config(args.config.as_deref(), args.seed)?;
            let (out, text) = cli::cmd_classical_baseline(samples, cfg.run.seed, args.workers)?;
            emit(&args.out, &out, &text)
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
