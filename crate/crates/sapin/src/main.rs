use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use sapin::config::{load_config, FileConfig, Overrides};
use sapin::harness::{run_condition, RunOptions, Summary};
use sapin::output::write_outputs;
use sapin::render::render_svg;
use sapin::snapshot::NetworkSnapshot;
use sapin::trace::{replay, Trace};
use sapin_core::experiment::AgentOutcome;
use sapin_core::{Condition, ExperimentConfig};

/// Self-organising cell grid trained on cart-pole balancing.
#[derive(Parser)]
#[command(name = "sapin", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train agents under one condition.
    Train(RunArgs),
    /// Train with locking on first success, then evaluate locked agents.
    LockEval(RunArgs),
    /// Train agents under all three punishment conditions.
    Ablation(RunArgs),
    /// Re-run an agent from a trace file and check it reproduces.
    Replay { trace: PathBuf },
    /// Draw a network snapshot as SVG.
    Render {
        state_file: PathBuf,
        /// Output file; defaults to the state file with an .svg extension.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Label cells with one action wave from these four normalized inputs.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        inputs: Option<Vec<f64>>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Flat key-value config file. Defaults apply when omitted.
    #[arg(short, long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Agents per condition.
    #[arg(long)]
    agents: Option<usize>,
    /// Training episode budget per agent.
    #[arg(long)]
    episodes: Option<usize>,
    /// failure-only, failure-plus-probabilistic or no-punishment.
    #[arg(long)]
    condition: Option<String>,
    /// Output directory.
    #[arg(short, long, default_value = "out")]
    out: PathBuf,
    /// Also write one trace file and one final network snapshot per agent.
    #[arg(long)]
    traces: bool,
    /// Run agents one at a time.
    #[arg(long)]
    sequential: bool,
}

impl RunArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let overrides = Overrides {
            seed: self.seed,
            agents: self.agents,
            episodes: self.episodes,
            condition: self.condition.clone(),
        };
        Ok(match &self.config {
            Some(path) => load_config(path, &overrides)?,
            None => FileConfig::default().resolve(&overrides)?,
        })
    }
}

fn run(
    command: &str,
    args: &RunArgs,
    conditions: &[Condition],
    mut config: ExperimentConfig,
    evaluate: bool,
) -> Result<()> {
    if evaluate {
        config.lock_on_success = true;
    }
    let opts = RunOptions {
        evaluate,
        parallel: !args.sequential,
    };
    let mut groups = Vec::new();
    for &c in conditions {
        groups.push((c, run_condition(&config, c, opts)?));
    }
    let summary = Summary::build(command, &config, &groups);
    let outcomes: Vec<&AgentOutcome> = groups.iter().flat_map(|(_, o)| o).collect();
    write_outputs(&args.out, &config, &summary, &outcomes, true)?;

    if args.traces {
        let traces = args.out.join("traces");
        fs::create_dir_all(&traces)
            .with_context(|| format!("cannot create {}", traces.display()))?;
        for o in &outcomes {
            let stem = format!("{}-{}", o.condition.name(), o.seed);
            Trace::of(&config, o, evaluate).save(&traces.join(format!("{stem}.trace.json")))?;
            let last_moves = o
                .training
                .movements
                .iter()
                .filter(|m| Some(m.episode) == o.training.movements.last().map(|l| l.episode))
                .map(|m| m.event)
                .collect();
            NetworkSnapshot::capture(&o.training.network)
                .with_moves(last_moves)
                .save(&traces.join(format!("{stem}.network.json")))?;
        }
    }

    for s in &summary.conditions {
        let median = s
            .median_episodes_to_success
            .map_or("-".to_string(), |m| format!("{m}"));
        println!(
            "{:<28} agents {:>4}  solved {:>4} ({:>5.1}%)  within 10 {:>4}  median episodes {}",
            s.condition.name(),
            s.agents,
            s.solved,
            100.0 * s.solve_rate,
            s.solved_within_10,
            median
        );
    }
    if evaluate {
        match summary.mean_locked_success_rate {
            Some(m) => println!(
                "mean locked success rate {m:.3} (reference {:.2})",
                summary.reference_locked_success_rate
            ),
            None => println!("no agent locked; nothing evaluated"),
        }
    }
    println!("results in {}", args.out.display());
    Ok(())
}

fn default_svg_path(state: &Path) -> PathBuf {
    state.with_extension("svg")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Train(a) => a
            .config()
            .and_then(|c| run("train", a, &[c.condition], c, false)),
        Command::LockEval(a) => a
            .config()
            .and_then(|c| run("lock-eval", a, &[c.condition], c, true)),
        Command::Ablation(a) => a
            .config()
            .and_then(|c| run("ablation", a, &Condition::ALL, c, false)),
        Command::Replay { trace } => Trace::load(trace).and_then(|t| {
            let report = replay(&t)?;
            if report.ok() {
                println!("replay ok: {} episodes reproduced", report.episodes);
                Ok(())
            } else {
                anyhow::bail!("replay diverged: {report:?}")
            }
        }),
        Command::Render {
            state_file,
            out,
            inputs,
        } => (|| {
            if let Some(v) = inputs {
                anyhow::ensure!(
                    v.len() == 4,
                    "--inputs takes 4 comma-separated values, got {}",
                    v.len()
                );
            }
            let snap = NetworkSnapshot::load(state_file)?;
            let svg = render_svg(&snap, inputs.as_deref())?;
            let path = out.clone().unwrap_or_else(|| default_svg_path(state_file));
            fs::write(&path, svg).with_context(|| format!("cannot write {}", path.display()))?;
            println!("wrote {}", path.display());
            Ok(())
        })(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
