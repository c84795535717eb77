//! Result files. Every writer is deterministic for a given input, so two
//! runs with the same configuration produce byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sapin_core::experiment::AgentOutcome;
use sapin_core::{ExperimentConfig, RunRecord};
use serde::Serialize;

use crate::config::FileConfig;
use crate::harness::Summary;

pub const RUNS_FILE: &str = "runs.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const CONFIG_ECHO_FILE: &str = "config.toml";
pub const PUNISHMENTS_FILE: &str = "punishments.csv";
pub const MOVEMENTS_FILE: &str = "movements.csv";

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn write_csv<R: Serialize>(path: &Path, rows: impl IntoIterator<Item = R>) -> Result<()> {
    let ctx = || format!("cannot write {}", path.display());
    let mut w = csv::Writer::from_path(path).with_context(ctx)?;
    for row in rows {
        w.serialize(row).with_context(ctx)?;
    }
    w.flush().with_context(ctx)
}

/// Writes `runs.csv`. The header is always present, even with no rows.
pub fn write_runs(path: &Path, records: &[RunRecord]) -> Result<()> {
    let ctx = || format!("cannot write {}", path.display());
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .with_context(ctx)?;
    w.write_record([
        "agent_seed",
        "episode",
        "steps",
        "locked",
        "punish_events",
        "moves",
    ])
    .with_context(ctx)?;
    for r in records {
        w.serialize(r).with_context(ctx)?;
    }
    w.flush().with_context(ctx)
}

#[derive(Serialize)]
struct PunishmentRow<'a> {
    agent_seed: u64,
    episode: u32,
    timestep: u32,
    trigger: &'a str,
    epicenters: usize,
    /// `x:y:value` triples joined by `;`.
    placement: String,
}

#[derive(Serialize)]
struct MoveRow<'a> {
    agent_seed: u64,
    episode: u32,
    cell: u32,
    from_x: i32,
    from_y: i32,
    to_x: i32,
    to_y: i32,
    direction: &'a str,
    desire: f64,
    random_axis: bool,
    blocked: bool,
}

pub fn write_punishments(path: &Path, outcomes: &[&AgentOutcome]) -> Result<()> {
    let rows = outcomes.iter().flat_map(|o| {
        o.training.punishments.iter().map(move |p| PunishmentRow {
            agent_seed: o.seed,
            episode: p.episode,
            timestep: p.timestep,
            trigger: p.event.trigger.name(),
            epicenters: p.event.epicenters.len(),
            placement: p
                .event
                .epicenters
                .iter()
                .map(|e| format!("{}:{}:{}", e.pos.x, e.pos.y, e.value))
                .collect::<Vec<_>>()
                .join(";"),
        })
    });
    write_csv(path, rows)
}

pub fn write_movements(path: &Path, outcomes: &[&AgentOutcome]) -> Result<()> {
    let rows = outcomes.iter().flat_map(|o| {
        o.training.movements.iter().map(move |m| MoveRow {
            agent_seed: o.seed,
            episode: m.episode,
            cell: m.event.id,
            from_x: m.event.from.x,
            from_y: m.event.from.y,
            to_x: m.event.to.x,
            to_y: m.event.to.y,
            direction: m.event.direction.name(),
            desire: m.event.desire,
            random_axis: m.event.random_axis,
            blocked: m.event.blocked,
        })
    });
    write_csv(path, rows)
}

/// Everything a run leaves behind in `dir`. Returns the paths written.
pub fn write_outputs(
    dir: &Path,
    config: &ExperimentConfig,
    summary: &Summary,
    outcomes: &[&AgentOutcome],
    events: bool,
) -> Result<Vec<PathBuf>> {
    create_dir(dir)?;
    let records: Vec<RunRecord> = outcomes
        .iter()
        .flat_map(|o| o.training.records.iter().copied())
        .collect();
    let mut written = Vec::new();

    let runs = dir.join(RUNS_FILE);
    write_runs(&runs, &records)?;
    written.push(runs);

    let summary_path = dir.join(SUMMARY_FILE);
    let json = serde_json::to_string_pretty(summary).context("cannot serialize summary")?;
    write_text(&summary_path, &(json + "\n"))?;
    written.push(summary_path);

    let echo = dir.join(CONFIG_ECHO_FILE);
    write_text(&echo, &FileConfig::echo(config).to_text())?;
    written.push(echo);

    if events {
        let p = dir.join(PUNISHMENTS_FILE);
        write_punishments(&p, outcomes)?;
        written.push(p);
        let m = dir.join(MOVEMENTS_FILE);
        write_movements(&m, outcomes)?;
        written.push(m);
    }
    Ok(written)
}
