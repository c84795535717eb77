//! Random small wave instances expressed both as crate types and as the
//! oracle's plain structs.

#![allow(dead_code)]

use sapin_core::grid::{Cell, CellKind, Coord, DirVec, Network};
use sapin_core::propagation::WaveSeed;
use sapin_core::RngStream;

use super::wave_oracle::{Kind, OCell, OSeed};

pub struct Instance {
    pub network: Network,
    pub seeds: Vec<WaveSeed>,
    pub ocells: Vec<OCell>,
    pub oseeds: Vec<OSeed>,
    /// Inputs only, so the wave selects an action.
    pub action_wave: bool,
    pub inputs: Vec<f64>,
}

/// Grid up to 6x6 with at most 6 cells. Ids are shuffled relative to
/// storage order. Seeds are either all input cells (action wave) or
/// virtual epicenters anywhere on the grid.
pub fn random_instance(rng: &mut RngStream) -> Instance {
    let width = 2 + rng.index(5) as i32;
    let height = 2 + rng.index(5) as i32;
    let area = (width * height) as usize;
    let total = (2 + rng.index(5)).min(area);
    let n_inputs = 1 + rng.index(2);
    let n_outputs = if total - n_inputs >= 2 {
        rng.index(3)
    } else {
        0
    };

    let mut coords: Vec<Coord> = (0..height)
        .flat_map(|y| (0..width).map(move |x| Coord::new(x, y)))
        .collect();
    let chosen = rng.choose_prefix(&mut coords, total).to_vec();
    let mut ids: Vec<u32> = (0..total as u32).map(|i| i * 3 + 1).collect();
    let ids = rng.choose_prefix(&mut ids, total).to_vec();

    let mut cells = Vec::new();
    let mut ocells = Vec::new();
    for (k, (&pos, &id)) in chosen.iter().zip(&ids).enumerate() {
        let kind = if k < n_inputs {
            CellKind::Input
        } else if k < n_inputs + n_outputs {
            CellKind::Output
        } else {
            CellKind::Processing
        };
        let cell = match kind {
            CellKind::Processing => {
                let s = [0; 4].map(|_| rng.uniform(-1.0, 1.0));
                Cell::processing(id, pos, DirVec(s), rng.uniform(-1.0, 1.0))
            }
            _ => Cell::fixed(id, kind, pos),
        };
        ocells.push(OCell {
            id,
            kind: match kind {
                CellKind::Input => Kind::Input,
                CellKind::Processing => Kind::Processing,
                CellKind::Output => Kind::Output,
            },
            x: pos.x,
            y: pos.y,
            s: cell.ltm.strengths.0,
        });
        cells.push(cell);
    }
    let network = Network::from_cells(width, height, cells).unwrap();

    let action_wave = rng.unit() < 0.6;
    let mut seeds = Vec::new();
    let mut oseeds = Vec::new();
    let mut inputs = Vec::new();
    if action_wave {
        for id in network.input_ids() {
            let c = network.cell(id).unwrap();
            // occasionally an exact zero seed, which must not send
            let value = if rng.unit() < 0.1 {
                0.0
            } else {
                rng.uniform(-1.0, 1.0)
            };
            inputs.push(value);
            seeds.push(WaveSeed {
                position: c.pos,
                value,
                uses_cell_slot: true,
            });
            oseeds.push(OSeed {
                x: c.pos.x,
                y: c.pos.y,
                value,
                cell: Some(id),
            });
        }
    } else {
        for _ in 0..1 + rng.index(4) {
            let pos = Coord::new(
                rng.index(width as usize) as i32,
                rng.index(height as usize) as i32,
            );
            let value = rng.uniform(-1.0, 1.0);
            seeds.push(WaveSeed {
                position: pos,
                value,
                uses_cell_slot: false,
            });
            oseeds.push(OSeed {
                x: pos.x,
                y: pos.y,
                value,
                cell: None,
            });
        }
    }
    Instance {
        network,
        seeds,
        ocells,
        oseeds,
        action_wave,
        inputs,
    }
}

/// Runs both implementations and returns a description of the first
/// mismatch, if any.
pub fn compare(inst: &Instance, tol: f64) -> Result<(), String> {
    use sapin_core::propagation::{action_wave, propagate_wave};
    let mut net = inst.network.clone();
    let wave = if inst.action_wave {
        action_wave(&mut net, &inst.inputs)
    } else {
        propagate_wave(&mut net, &inst.seeds)
    };
    let oracle = super::wave_oracle::run(&inst.ocells, &inst.oseeds, inst.action_wave);
    if wave.activation_order != oracle.order {
        return Err(format!(
            "order {:?} vs oracle {:?}",
            wave.activation_order, oracle.order
        ));
    }
    let got_action = wave.action.map(|a| a.index());
    if got_action != oracle.action {
        return Err(format!(
            "action {got_action:?} vs oracle {:?}",
            oracle.action
        ));
    }
    if wave.activations.len() != oracle.values.len() {
        return Err("receiver count differs".into());
    }
    for a in &wave.activations {
        let (v, dir) = oracle.values[&a.id];
        if (a.total - v).abs() > tol {
            return Err(format!("cell {} V {} vs oracle {}", a.id, a.total, v));
        }
        for (k, (got, want)) in a.influx.0.iter().zip(dir).enumerate() {
            if (got - want).abs() > tol {
                return Err(format!("cell {} v[{k}] {} vs oracle {}", a.id, got, want));
            }
        }
    }
    Ok(())
}
