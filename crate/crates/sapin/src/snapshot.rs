//! JSON form of a [`Network`]. The layout is described by
//! `schemas/network_state.schema.json`.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use sapin_core::grid::Cell;
use sapin_core::structural::MoveEvent;
use sapin_core::Network;
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSnapshot {
    pub format_version: u32,
    pub width: i32,
    pub height: i32,
    pub locked: bool,
    /// Sorted by id.
    pub cells: Vec<Cell>,
    /// Moves of the last movement phase, drawn as arrows by `render`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub recent_moves: Vec<MoveEvent>,
}

impl NetworkSnapshot {
    pub fn capture(network: &Network) -> Self {
        let mut cells = network.cells().to_vec();
        cells.sort_by_key(|c| c.id);
        Self {
            format_version: FORMAT_VERSION,
            width: network.width(),
            height: network.height(),
            locked: network.is_locked(),
            cells,
            recent_moves: Vec::new(),
        }
    }

    pub fn with_moves(mut self, moves: Vec<MoveEvent>) -> Self {
        self.recent_moves = moves;
        self
    }

    /// Rebuilds the network, re-checking bounds, ids and collisions.
    pub fn restore(&self) -> Result<Network> {
        anyhow::ensure!(
            self.format_version == FORMAT_VERSION,
            "unsupported snapshot format_version {}",
            self.format_version
        );
        Ok(
            Network::from_cells(self.width, self.height, self.cells.clone())?
                .with_lock(self.locked),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("snapshot always serializes")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json() + "\n")
            .with_context(|| format!("cannot write {}", path.display()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("invalid network snapshot {}", path.display()))
    }
}
