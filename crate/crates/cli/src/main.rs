use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use spikegnn::report::format_fraction;
use spikegnn_cli::commands::{self, emit};
use spikegnn_cli::config::{Dataset, EvalSetName};
use spikegnn_cli::{Failure, Kind, RunConfig};

#[derive(Parser)]
#[command(name = "spikegnn", version, about = "Spiking graph network citation classifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one configuration and write a report.
    Run(ConfigArgs),
    /// Bayesian optimization over the parameter grid.
    Optimize(ConfigArgs),
    /// Dump per-step neuron traces.
    Inspect {
        #[command(flatten)]
        config: ConfigArgs,
        /// `cluster:index` selectors, or `fig2-demo` / `fig2-plain`.
        #[arg(long, value_delimiter = ',', required = true)]
        neurons: Vec<String>,
        #[arg(long, default_value_t = 30)]
        steps: u64,
        /// Paper id to inject at step 0.
        #[arg(long)]
        paper: Option<String>,
        /// Where to write the injected paper's topic weights.
        #[arg(long)]
        weights: Option<PathBuf>,
    },
}

/// Flags mirror the config keys; any flag given overrides the file.
#[derive(Args, Serialize, Default)]
struct ConfigArgs {
    /// Config file, or a report whose `[config]` section to reuse.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,

    #[arg(long, value_enum)]
    dataset: Option<Dataset>,
    #[arg(long)]
    content: Option<PathBuf>,
    #[arg(long)]
    cites: Option<PathBuf>,

    #[arg(long)]
    paper_to_paper_w: Option<i32>,
    #[arg(long)]
    train_to_topic_w: Option<i32>,
    #[arg(long)]
    tau: Option<u32>,
    #[arg(long)]
    sim_steps: Option<u32>,
    #[arg(long)]
    delay: Option<u32>,
    #[arg(long)]
    reset_length: Option<u32>,
    #[arg(long)]
    lr: Option<i32>,
    #[arg(long, allow_negative_numbers = true)]
    a_plus: Option<i32>,
    #[arg(long, allow_negative_numbers = true)]
    a_minus: Option<i32>,
    #[arg(long)]
    trace_impulse: Option<i32>,
    #[arg(long, allow_negative_numbers = true)]
    initial_plastic_weight: Option<i32>,

    #[arg(long)]
    split_seed: Option<u64>,
    #[arg(long)]
    train_per_topic: Option<usize>,
    #[arg(long)]
    validation_size: Option<usize>,
    #[arg(long, value_enum)]
    eval_set: Option<EvalSetName>,

    #[arg(long)]
    bo_seed: Option<u64>,
    #[arg(long)]
    bo_init: Option<usize>,
    #[arg(long)]
    bo_iter: Option<usize>,
    #[arg(long)]
    grid: Option<PathBuf>,

    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<RunConfig, Failure> {
        let overrides = toml::Table::try_from(self).map_err(|e| Failure::new(Kind::Config, e.to_string()))?;
        RunConfig::resolve(self.config.as_deref(), overrides)
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.resolve()?;
            let out = commands::run(&cfg)?;
            emit(cfg.output.as_deref(), &out.text)?;
            if cfg.output.is_some() {
                println!(
                    "{} accuracy {} ({}/{})",
                    out.report.set,
                    format_fraction(out.report.accuracy()),
                    out.report.correct(),
                    out.report.evaluated()
                );
            }
        }
        Command::Optimize(args) => {
            let cfg = args.resolve()?;
            let out = commands::optimize(&cfg)?;
            emit(cfg.output.as_deref(), &out.text)?;
            if out.result.exhausted {
                println!("grid exhausted after {} evaluations", out.result.history.len());
            }
            match out.result.best_observation() {
                Some(best) => {
                    let values: Vec<String> = out
                        .space
                        .dims()
                        .iter()
                        .zip(&best.point.values)
                        .map(|(d, v)| format!("{}={v}", d.name))
                        .collect();
                    println!(
                        "best {} accuracy {}",
                        values.join(" "),
                        format_fraction(Some(best.objective))
                    );
                }
                None => println!("no successful evaluation"),
            }
        }
        Command::Inspect {
            config,
            neurons,
            steps,
            paper,
            weights,
        } => {
            let cfg = config.resolve()?;
            let out = commands::inspect(&cfg, &neurons, steps, paper.as_deref())?;
            emit(cfg.output.as_deref(), &out.trace)?;
            match (weights, out.weights) {
                (Some(path), Some(text)) => emit(Some(&path), &text)?,
                (Some(_), None) => {
                    return Err(Failure::new(
                        Kind::Params,
                        "--weights needs --paper naming a validation or test paper",
                    ))
                }
                _ => {}
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.kind.exit_code() as u8)
        }
    }
}
