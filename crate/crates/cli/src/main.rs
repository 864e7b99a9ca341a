use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use searchbias::report::write_csv;
use searchbias::{verify_all, AlgorithmSpec, VerifyConfig};
use searchbias_cli::{
    cmd_bias, cmd_estimate, cmd_expressivity, cmd_table, default_p_grid, figure2_rows, load,
    to_csv, to_json, write_atomic, FloatList, Simulation, TargetSpec,
};

/// Bias and entropic expressivity of black-box search algorithms.
#[derive(Parser)]
#[command(name = "searchbias", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Output {
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct Resources {
    /// Resource-set JSON file.
    #[arg(long)]
    resources: PathBuf,
    /// Distribution over the resources, e.g. `0.25,0.75`. Defaults to the
    /// file's weights, else uniform.
    #[arg(long)]
    weights: Option<FloatList>,
    /// Algorithm run on fitness-task resources.
    #[arg(long, default_value = "epsilon-greedy(0.5)")]
    algorithm: AlgorithmSpec,
    /// Runs averaged per fitness task.
    #[arg(long, default_value_t = 1000)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Resources {
    fn load(&self) -> Result<searchbias_cli::Loaded> {
        load(
            &self.resources,
            self.weights.clone().map(|w| w.0),
            Simulation {
                algorithm: self.algorithm,
                runs: self.runs,
                seed: self.seed,
            },
        )
    }
}

#[derive(Subcommand)]
enum Command {
    /// Bias of the resource distribution on a target.
    Bias {
        #[command(flatten)]
        resources: Resources,
        /// Indices (`0,2`) or a size (`k=2`) for every target of that size.
        #[arg(long)]
        target: TargetSpec,
        #[command(flatten)]
        output: Output,
    },
    /// Entropy of the averaged strategy and the Jensen gap.
    Expressivity {
        #[command(flatten)]
        resources: Resources,
        #[command(flatten)]
        output: Output,
    },
    /// How often a sample of n resources misestimates the bias by ε.
    Estimate {
        #[command(flatten)]
        resources: Resources,
        #[arg(long)]
        target: TargetSpec,
        /// Resources per sample.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Sup-bias bound ((p-1)/p)·inf over a grid of p.
    Figure2 {
        #[arg(long, allow_hyphen_values = true)]
        inf_bias: f64,
        /// Comma-separated p values; default 0.05, 0.10, …, 0.95.
        #[arg(long)]
        p_grid: Option<FloatList>,
        #[command(flatten)]
        output: Output,
    },
    /// Entropy ranges at minimum, zero and maximum bias.
    Table {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Re-check every bound numerically; exits 1 if any check fails.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Only checks matching this glob (or under this prefix).
        #[arg(long)]
        only: Option<String>,
        /// Cap every size grid at this |Ω|.
        #[arg(long)]
        max_n: Option<usize>,
        /// Smaller sample counts.
        #[arg(long)]
        quick: bool,
        #[command(flatten)]
        output: Output,
    },
}

fn emit(output: &Output, text: &str) -> Result<()> {
    match &output.out {
        Some(path) => write_atomic(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json_only(output: &Output) -> Result<()> {
    if output.format == Some(Format::Csv) {
        bail!("this command only emits JSON");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Bias {
            resources,
            target,
            output,
        } => {
            json_only(&output)?;
            let report = cmd_bias(&resources.load()?, &target)?;
            emit(&output, &to_json(&report)?)?;
        }
        Command::Expressivity { resources, output } => {
            json_only(&output)?;
            emit(&output, &to_json(&cmd_expressivity(&resources.load()?)?)?)?;
        }
        Command::Estimate {
            resources,
            target,
            n,
            epsilon,
            trials,
            output,
        } => {
            json_only(&output)?;
            let report = cmd_estimate(
                &resources.load()?,
                &target,
                n,
                epsilon,
                trials,
                resources.seed,
            )?;
            emit(&output, &to_json(&report)?)?;
        }
        Command::Figure2 {
            inf_bias,
            p_grid,
            output,
        } => {
            let rows = figure2_rows(inf_bias, &p_grid.map_or_else(default_p_grid, |g| g.0))?;
            let text = match output.format.unwrap_or(Format::Csv) {
                Format::Csv => to_csv(&rows)?,
                Format::Json => to_json(&rows)?,
            };
            emit(&output, &text)?;
        }
        Command::Table { n, k, output } => {
            let rows = cmd_table(n, k)?;
            let text = match output.format.unwrap_or(Format::Csv) {
                Format::Csv => to_csv(&rows)?,
                Format::Json => to_json(&rows)?,
            };
            emit(&output, &text)?;
        }
        Command::Verify {
            seed,
            only,
            max_n,
            quick,
            output,
        } => {
            let mut config = if quick {
                VerifyConfig::quick()
            } else {
                VerifyConfig::default()
            };
            if let Some(n) = max_n {
                config = config.with_max_n(n);
            }
            config.seed = seed;
            config.only = only;
            let report = verify_all(&config)?;
            let text = match output.format.unwrap_or(Format::Json) {
                Format::Json => to_json(&report)?,
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_csv(&report.checks, &mut buf)?;
                    String::from_utf8(buf)?
                }
            };
            emit(&output, &text)?;
            let failed: Vec<_> = report.failures().map(|c| c.name.as_str()).collect();
            eprintln!(
                "{} checks, {} failed, {} ms",
                report.checks.len(),
                failed.len(),
                report.elapsed_ms
            );
            if !failed.is_empty() {
                eprintln!("failed: {}", failed.join(", "));
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
