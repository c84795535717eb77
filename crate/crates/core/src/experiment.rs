//! Episode loop, macro-episode movement cadence, the locking protocol and
//! the three-condition punishment ablation.
//!
//! Per timestep the order is fixed:
//!
//! 1. normalize the environment state
//! 2. reset immediate state
//! 3. action wave
//! 4. accumulate STM
//! 5. environment step
//! 6. LTM update
//! 7. probabilistic punishment on the new state (non-terminal steps only)
//! 8. catastrophic punishment if the step ended the episode by failure
//!
//! Steps 7 and 8 are gated by the [`Condition`]; everything that writes
//! learned state is a no-op once the network is locked.

use alloc::vec::Vec;

use crate::cartpole::{normalize, CartPole, EnvParams};
use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::grid::Network;
use crate::propagation::{accumulate_stm, action_wave, Action};
use crate::punishment::{catastrophic_punishment, probabilistic_punishment, PunishmentEvent};
use crate::rng::{derive_seed, RngStream};
use crate::structural::{execute_movement_phase, MoveEvent};
use crate::synaptic::ltm_update;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Condition {
    FailureOnly,
    FailurePlusProbabilistic,
    NoPunishment,
}

impl Condition {
    pub const ALL: [Condition; 3] = [
        Condition::FailureOnly,
        Condition::FailurePlusProbabilistic,
        Condition::NoPunishment,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Condition::FailureOnly => "failure-only",
            Condition::FailurePlusProbabilistic => "failure-plus-probabilistic",
            Condition::NoPunishment => "no-punishment",
        }
    }

    pub fn parse(s: &str) -> Option<Condition> {
        Condition::ALL.into_iter().find(|c| c.name() == s)
    }

    pub fn catastrophic(self) -> bool {
        self != Condition::NoPunishment
    }

    pub fn probabilistic(self) -> bool {
        self == Condition::FailurePlusProbabilistic
    }

    fn index(self) -> u64 {
        self as u64
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExperimentConfig {
    pub agents: usize,
    /// Training episode budget per agent.
    pub max_episodes: usize,
    pub condition: Condition,
    /// Lock the network the first time an episode reaches the step limit.
    pub lock_on_success: bool,
    /// Keep training (locked) after the lock instead of stopping.
    pub continue_after_lock: bool,
    pub eval_episodes: usize,
    pub seed: u64,
    pub sim: SimConfig,
    pub env: EnvParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            agents: 20,
            max_episodes: 300,
            condition: Condition::FailureOnly,
            lock_on_success: true,
            continue_after_lock: false,
            eval_episodes: 100,
            seed: 0,
            sim: SimConfig::default(),
            env: EnvParams::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.sim.validate()?;
        if self.max_episodes == 0 {
            return Err(Error::InvalidConfig("max_episodes must be at least 1"));
        }
        Ok(())
    }
}

/// One row of the run log.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunRecord {
    pub agent_seed: u64,
    /// 1-based.
    pub episode: u32,
    pub steps: u32,
    /// Lock state when the episode started.
    pub locked: bool,
    pub punish_events: u32,
    /// Cells moved by the movement phase that closed this episode, if any.
    pub moves: u32,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TimedPunishment {
    /// Environment step (1-based) after which the event fired.
    pub timestep: u32,
    pub event: PunishmentEvent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeOutcome {
    pub steps: u32,
    pub success: bool,
    pub punishments: Vec<TimedPunishment>,
}

/// Runs one episode from a fresh environment reset.
pub fn run_episode(
    network: &mut Network,
    env: &CartPole,
    condition: Condition,
    sim: &SimConfig,
    rng: &mut RngStream,
) -> EpisodeOutcome {
    let mut state = env.reset(rng);
    let mut punishments = Vec::new();
    while !state.terminated {
        let inputs = normalize(&state);
        network.reset_immediate_state();
        let wave = action_wave(network, &inputs);
        accumulate_stm(network);
        let action = wave.action.unwrap_or(Action::Right);
        state = env
            .step(&state, action)
            .expect("loop only steps live episodes");
        ltm_update(network, sim.eta);

        let failed = env.failed(&state);
        let event = if !state.terminated {
            if condition.probabilistic() {
                probabilistic_punishment(network, state.theta.to_degrees(), sim, rng)
            } else {
                None
            }
        } else if failed && condition.catastrophic() {
            catastrophic_punishment(network, sim, rng)
        } else {
            None
        };
        if let Some(event) = event {
            punishments.push(TimedPunishment {
                timestep: state.steps,
                event,
            });
        }
    }
    EpisodeOutcome {
        steps: state.steps,
        success: state.steps >= env.params.max_steps,
        punishments,
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EpisodePunishment {
    pub episode: u32,
    pub timestep: u32,
    pub event: PunishmentEvent,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EpisodeMove {
    pub episode: u32,
    pub event: MoveEvent,
}

#[derive(Debug, Clone)]
pub struct TrainingRun {
    pub network: Network,
    pub records: Vec<RunRecord>,
    /// 1-based index of the first 500-step episode.
    pub first_success: Option<u32>,
    pub punishments: Vec<EpisodePunishment>,
    pub movements: Vec<EpisodeMove>,
}

/// Trains a fresh network drawn from `rng` under `condition`.
///
/// A movement phase closes every `macro_episode`-th episode. With locking
/// enabled the first successful episode locks the network; training then
/// stops unless `continue_after_lock` is set.
pub fn train(
    config: &ExperimentConfig,
    condition: Condition,
    rng: &mut RngStream,
) -> Result<TrainingRun> {
    config.validate()?;
    let sim = &config.sim;
    let env = CartPole::new(config.env);
    let mut network = Network::init(sim, rng)?;
    let mut run = TrainingRun {
        network: network.clone(),
        records: Vec::new(),
        first_success: None,
        punishments: Vec::new(),
        movements: Vec::new(),
    };
    let mut macro_steps: u64 = 0;
    for episode in 1..=config.max_episodes as u32 {
        let locked = network.is_locked();
        let outcome = run_episode(&mut network, &env, condition, sim, rng);
        macro_steps += u64::from(outcome.steps);

        let mut record = RunRecord {
            agent_seed: rng.seed(),
            episode,
            steps: outcome.steps,
            locked,
            punish_events: outcome.punishments.len() as u32,
            moves: 0,
        };
        run.punishments
            .extend(outcome.punishments.into_iter().map(|p| EpisodePunishment {
                episode,
                timestep: p.timestep,
                event: p.event,
            }));

        if outcome.success {
            if run.first_success.is_none() {
                run.first_success = Some(episode);
            }
            if config.lock_on_success {
                network.lock();
            }
        }

        if (episode as usize).is_multiple_of(sim.macro_episode) {
            let report = execute_movement_phase(&mut network, macro_steps, &sim.movement, rng);
            macro_steps = 0;
            record.moves = report.moved() as u32;
            run.movements.extend(
                report
                    .events
                    .into_iter()
                    .map(|event| EpisodeMove { episode, event }),
            );
        }
        run.records.push(record);

        if network.is_locked() && !config.continue_after_lock {
            break;
        }
    }
    run.network = network;
    Ok(run)
}

/// [`train`] with a stream seeded from `agent_seed` and the configured condition.
pub fn run_training(config: &ExperimentConfig, agent_seed: u64) -> Result<TrainingRun> {
    train(config, config.condition, &mut RngStream::new(agent_seed))
}

/// Success rate of a locked network over `config.eval_episodes` episodes,
/// without punishment. Runs on a copy, so `network` is left untouched.
pub fn evaluate_locked(
    network: &Network,
    config: &ExperimentConfig,
    rng: &mut RngStream,
) -> Result<f64> {
    if !network.is_locked() {
        return Err(Error::NotLocked);
    }
    if config.eval_episodes == 0 {
        return Ok(0.0);
    }
    let env = CartPole::new(config.env);
    let mut scratch = network.clone();
    let successes = (0..config.eval_episodes)
        .filter(|_| {
            run_episode(
                &mut scratch,
                &env,
                Condition::NoPunishment,
                &config.sim,
                rng,
            )
            .success
        })
        .count();
    Ok(successes as f64 / config.eval_episodes as f64)
}

#[derive(Debug, Clone)]
pub struct AgentOutcome {
    pub seed: u64,
    pub condition: Condition,
    pub training: TrainingRun,
    /// Present when the agent locked and was evaluated.
    pub locked_success_rate: Option<f64>,
}

impl AgentOutcome {
    pub fn first_success(&self) -> Option<u32> {
        self.training.first_success
    }
}

/// Trains one agent and, if it ended locked, evaluates it on the same stream.
pub fn run_agent(
    config: &ExperimentConfig,
    condition: Condition,
    seed: u64,
) -> Result<AgentOutcome> {
    let mut rng = RngStream::new(seed);
    let training = train(config, condition, &mut rng)?;
    let locked_success_rate = if training.network.is_locked() {
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

/// Seed of agent `index` under `condition`; disjoint across both.
pub fn agent_seed(master: u64, condition: Condition, index: usize) -> u64 {
    derive_seed(master, (condition.index() << 32) | index as u64)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConditionSummary {
    pub condition: Condition,
    pub agents: usize,
    pub solved: usize,
    /// Fraction of agents with a 500-step episode within the budget.
    pub solve_rate: f64,
    pub solved_within_10: usize,
    pub median_episodes_to_success: Option<f64>,
    pub mean_locked_success_rate: Option<f64>,
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    })
}

pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

pub fn summarize(condition: Condition, outcomes: &[AgentOutcome]) -> ConditionSummary {
    let mut firsts: Vec<f64> = outcomes
        .iter()
        .filter_map(|o| o.first_success())
        .map(f64::from)
        .collect();
    let rates: Vec<f64> = outcomes
        .iter()
        .filter_map(|o| o.locked_success_rate)
        .collect();
    let solved = firsts.len();
    ConditionSummary {
        condition,
        agents: outcomes.len(),
        solved,
        solve_rate: if outcomes.is_empty() {
            0.0
        } else {
            solved as f64 / outcomes.len() as f64
        },
        solved_within_10: firsts.iter().filter(|f| **f <= 10.0).count(),
        median_episodes_to_success: median(&mut firsts),
        mean_locked_success_rate: mean(&rates),
    }
}

/// Agents of one condition, run sequentially in index order.
pub fn run_condition(config: &ExperimentConfig, condition: Condition) -> Result<Vec<AgentOutcome>> {
    (0..config.agents)
        .map(|i| run_agent(config, condition, agent_seed(config.seed, condition, i)))
        .collect()
}

/// Sequential ablation over all three conditions.
pub fn run_ablation(
    config: &ExperimentConfig,
) -> Result<Vec<(ConditionSummary, Vec<AgentOutcome>)>> {
    Condition::ALL
        .into_iter()
        .map(|c| {
            let outcomes = run_condition(config, c)?;
            Ok((summarize(c, &outcomes), outcomes))
        })
        .collect()
}
