//! Per-agent trace files and their replay.
//!
//! A trace carries everything needed to re-run one agent: the effective
//! configuration, the condition, the agent seed and whether evaluation ran.
//! Replay re-runs the agent and compares the records, evaluation result and
//! final network state with the stored ones.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use sapin_core::experiment::AgentOutcome;
use sapin_core::{Condition, ExperimentConfig, RunRecord};
use serde::{Deserialize, Serialize};

use crate::harness::run_one;
use crate::snapshot::NetworkSnapshot;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Trace {
    pub config: ExperimentConfig,
    pub condition: Condition,
    pub agent_seed: u64,
    pub evaluated: bool,
    pub records: Vec<RunRecord>,
    pub locked_success_rate: Option<f64>,
    pub final_network: NetworkSnapshot,
}

impl Trace {
    pub fn of(config: &ExperimentConfig, outcome: &AgentOutcome, evaluated: bool) -> Self {
        Self {
            config: config.clone(),
            condition: outcome.condition,
            agent_seed: outcome.seed,
            evaluated,
            records: outcome.training.records.clone(),
            locked_success_rate: outcome.locked_success_rate,
            final_network: NetworkSnapshot::capture(&outcome.training.network),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string(self).context("cannot serialize trace")?;
        fs::write(path, json + "\n").with_context(|| format!("cannot write {}", path.display()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("invalid trace file {}", path.display()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayReport {
    pub episodes: usize,
    /// First episode (1-based) whose record differs, if any.
    pub first_mismatch: Option<usize>,
    pub rate_matches: bool,
    pub network_matches: bool,
}

impl ReplayReport {
    pub fn ok(&self) -> bool {
        self.first_mismatch.is_none() && self.rate_matches && self.network_matches
    }
}

pub fn replay(trace: &Trace) -> Result<ReplayReport> {
    let outcome = run_one(
        &trace.config,
        trace.condition,
        trace.agent_seed,
        trace.evaluated,
    )?;
    let got = &outcome.training.records;
    let first_mismatch = (0..got.len().max(trace.records.len()))
        .find(|&i| got.get(i) != trace.records.get(i))
        .map(|i| i + 1);
    Ok(ReplayReport {
        episodes: got.len(),
        first_mismatch,
        rate_matches: outcome.locked_success_rate == trace.locked_success_rate,
        network_matches: NetworkSnapshot::capture(&outcome.training.network) == trace.final_network,
    })
}
