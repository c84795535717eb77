//! Local prediction-error update of long-term memory.

use crate::grid::{Cell, Network};

/// Below this total influx a cell's strengths are left alone.
pub const MIN_INFLUX: f64 = 1e-6;

/// Updates every processing cell from its own activation. Skipped entirely
/// while the network is locked.
///
/// `E += (eta/2) * err` and, when the cell received influx,
/// `s += (eta/2) * (v / sum|v|) * err` clipped to `[-1, 1]`, with
/// `err = V - E` taken before either update. `E` is not clipped.
pub fn ltm_update(network: &mut Network, eta: f64) {
    if network.is_locked() {
        return;
    }
    for cell in network.cells_mut().iter_mut().filter(|c| c.is_processing()) {
        update_cell(cell, eta);
    }
}

pub(crate) fn update_cell(cell: &mut Cell, eta: f64) {
    let rate = eta / 2.0;
    let error = cell.imm.total - cell.ltm.expectation;
    cell.ltm.expectation += rate * error;
    let influx = cell.imm.influx;
    let norm = influx.abs_sum();
    if norm > MIN_INFLUX {
        for (s, v) in cell.ltm.strengths.0.iter_mut().zip(influx.0) {
            *s = (*s + rate * (v / norm) * error).clamp(-1.0, 1.0);
        }
    }
}
