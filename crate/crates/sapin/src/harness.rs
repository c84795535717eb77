//! Runs many agents, in parallel when allowed, and collects results in a
//! fixed order so that every output file is independent of scheduling.

use rayon::prelude::*;
use sapin_core::experiment::evaluate_locked;
use sapin_core::experiment::{agent_seed, summarize, train, AgentOutcome, ConditionSummary};
use sapin_core::{Condition, ExperimentConfig, RngStream};
use serde::{Deserialize, Serialize};

/// Locked success rate reported by the original study.
pub const REFERENCE_LOCKED_SUCCESS_RATE: f64 = 0.82;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Evaluate locked agents after training.
    pub evaluate: bool,
    pub parallel: bool,
}

/// Trains one agent; with `evaluate`, a locked agent is then evaluated on
/// the same random stream.
pub fn run_one(
    config: &ExperimentConfig,
    condition: Condition,
    seed: u64,
    evaluate: bool,
) -> sapin_core::Result<AgentOutcome> {
    let mut rng = RngStream::new(seed);
    let training = train(config, condition, &mut rng)?;
    let locked_success_rate = if evaluate && training.network.is_locked() {
        Some(evaluate_locked(&training.network, config, &mut rng)?)
    } else {
        None
    };
    Ok(AgentOutcome {
        seed,
        condition,
        training,
        locked_success_rate,
    })
}

/// All agents of `condition`, ordered by agent index.
pub fn run_condition(
    config: &ExperimentConfig,
    condition: Condition,
    opts: RunOptions,
) -> sapin_core::Result<Vec<AgentOutcome>> {
    let job = |i: usize| {
        run_one(
            config,
            condition,
            agent_seed(config.seed, condition, i),
            opts.evaluate,
        )
    };
    if opts.parallel {
        (0..config.agents).into_par_iter().map(job).collect()
    } else {
        (0..config.agents).map(job).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentSummary {
    pub agent_seed: u64,
    pub condition: Condition,
    pub episodes_run: usize,
    pub first_success: Option<u32>,
    pub locked: bool,
    pub locked_success_rate: Option<f64>,
}

impl AgentSummary {
    pub fn of(o: &AgentOutcome) -> Self {
        Self {
            agent_seed: o.seed,
            condition: o.condition,
            episodes_run: o.training.records.len(),
            first_success: o.first_success(),
            locked: o.training.network.is_locked(),
            locked_success_rate: o.locked_success_rate,
        }
    }
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub command: String,
    pub seed: u64,
    pub agents_per_condition: usize,
    pub max_episodes: usize,
    pub eval_episodes: usize,
    pub conditions: Vec<ConditionSummary>,
    /// Mean over all evaluated agents of every condition.
    pub mean_locked_success_rate: Option<f64>,
    pub reference_locked_success_rate: f64,
    pub agents: Vec<AgentSummary>,
}

impl Summary {
    pub fn build(
        command: &str,
        config: &ExperimentConfig,
        groups: &[(Condition, Vec<AgentOutcome>)],
    ) -> Self {
        let all: Vec<&AgentOutcome> = groups.iter().flat_map(|(_, o)| o).collect();
        let rates: Vec<f64> = all.iter().filter_map(|o| o.locked_success_rate).collect();
        Self {
            command: command.to_string(),
            seed: config.seed,
            agents_per_condition: config.agents,
            max_episodes: config.max_episodes,
            eval_episodes: config.eval_episodes,
            conditions: groups.iter().map(|(c, o)| summarize(*c, o)).collect(),
            mean_locked_success_rate: sapin_core::experiment::mean(&rates),
            reference_locked_success_rate: REFERENCE_LOCKED_SUCCESS_RATE,
            agents: all.iter().map(|o| AgentSummary::of(o)).collect(),
        }
    }
}
