//! Desire-driven cell migration, run once per macro-episode.
//!
//! A processing cell's desire is its long-run prediction error
//! `|mean(V) - E|`. Candidates move one grid step along the axis their mean
//! influx came from: away from the source when over-activated, toward it
//! otherwise. Moves into occupied or off-grid coordinates are dropped.

use alloc::vec::Vec;

use crate::config::MovementParams;
use crate::grid::{CellId, Coord, DirVec, Direction, Network};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MovementCandidate {
    pub id: CellId,
    pub desire: f64,
    pub mean_total: f64,
    pub mean_influx: DirVec,
}

/// One attempted move. `to` is the target even when the move was blocked.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MoveEvent {
    pub id: CellId,
    pub from: Coord,
    pub to: Coord,
    pub desire: f64,
    pub direction: Direction,
    pub random_axis: bool,
    pub blocked: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MovementReport {
    pub events: Vec<MoveEvent>,
}

impl MovementReport {
    pub fn moved(&self) -> usize {
        self.events.iter().filter(|e| !e.blocked).count()
    }
}

/// Candidates sorted by desire (descending, lowest id first on ties).
///
/// Cells are visited in ascending id order; a cell under `min_desire`
/// consumes one draw for the random-inclusion test.
pub fn compute_movement_candidates(
    network: &Network,
    n_steps: u64,
    params: &MovementParams,
    rng: &mut RngStream,
) -> Vec<MovementCandidate> {
    if n_steps == 0 {
        return Vec::new();
    }
    let n = n_steps as f64;
    let mut cells: Vec<_> = network
        .cells()
        .iter()
        .filter(|c| c.is_processing())
        .collect();
    cells.sort_unstable_by_key(|c| c.id);

    let mut candidates = Vec::new();
    for cell in cells {
        let mean_total = cell.stm.total / n;
        let mean_influx = cell.stm.influx.map(|v| v / n);
        let desire = (mean_total - cell.ltm.expectation).abs();
        if desire >= params.min_desire || rng.unit() < params.random_inclusion {
            candidates.push(MovementCandidate {
                id: cell.id,
                desire,
                mean_total,
                mean_influx,
            });
        }
    }
    candidates.sort_by(|a, b| b.desire.total_cmp(&a.desire).then(a.id.cmp(&b.id)));
    candidates
}

fn choose_direction(influx: &DirVec, eps_rand: f64, rng: &mut RngStream) -> (Direction, bool) {
    if rng.unit() < eps_rand {
        return (Direction::ALL[rng.index(4)], true);
    }
    let weights = influx.map(f64::abs);
    match rng.weighted_index(&weights.0) {
        Some(i) => (Direction::ALL[i], false),
        // no influx at all: fall back to a uniform axis
        None => (Direction::ALL[rng.index(4)], true),
    }
}

/// Runs one movement phase and always clears STM afterwards.
///
/// Locked networks and empty macro-episodes only clear STM. Candidates move
/// in sorted order against the occupancy left by earlier movers.
pub fn execute_movement_phase(
    network: &mut Network,
    n_steps: u64,
    params: &MovementParams,
    rng: &mut RngStream,
) -> MovementReport {
    let mut report = MovementReport::default();
    if network.is_locked() || n_steps == 0 {
        network.reset_stm();
        return report;
    }
    let candidates = compute_movement_candidates(network, n_steps, params, rng);
    for cand in candidates {
        let (direction, random_axis) = choose_direction(&cand.mean_influx, params.eps_rand, rng);
        let expectation = match network.cell(cand.id) {
            Some(c) => c.ltm.expectation,
            None => continue,
        };
        let (dx, dy) = direction.offset();
        let sign = if cand.mean_total > expectation { -1 } else { 1 };
        let Some(index) = network.cells().iter().position(|c| c.id == cand.id) else {
            continue;
        };
        let from = network.cells()[index].pos;
        let to = from.step(sign * dx, sign * dy);
        let moved = network.move_cell(index, to);
        report.events.push(MoveEvent {
            id: cand.id,
            from,
            to,
            desire: cand.desire,
            direction,
            random_axis,
            blocked: !moved,
        });
    }
    network.reset_stm();
    report
}
