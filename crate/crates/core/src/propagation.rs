//! Winner-takes-all propagation wave.
//!
//! Seeds send first, all in the same round. After that the not-yet-active
//! processing or output cell with the largest `|V|` (lowest id on ties)
//! becomes active and sends once to every still-inactive receiver within
//! Manhattan distance 2. A sender contributes
//! `tanh(V_s) * D(d) * (s_s . w(theta))` where `theta = atan2(dy, dx)` points
//! from sender to receiver (y grows downward, so "up" is `-sin`).

use alloc::vec::Vec;

use crate::grid::{Cell, CellId, CellKind, Coord, DirVec, Network, UNIFORM_STRENGTHS};

/// Discrete distance kernel.
pub fn distance_decay(d: u32) -> f64 {
    match d {
        0 => 1.0,
        1 => 0.75,
        2 => 0.25,
        _ => 0.0,
    }
}

/// `[max(0,-sin), max(0,cos), max(0,sin), max(0,-cos)]` of `theta`.
pub fn angular_weights(theta: f64) -> DirVec {
    weights_from(libm::cos(theta), libm::sin(theta))
}

fn weights_from(cos: f64, sin: f64) -> DirVec {
    DirVec::new(
        f64::max(0.0, -sin),
        f64::max(0.0, cos),
        f64::max(0.0, sin),
        f64::max(0.0, -cos),
    )
}

/// Sender-side gain: the sender's strengths projected on the angular weights.
pub fn sender_gain(strengths: &DirVec, theta: f64) -> f64 {
    strengths.dot(&angular_weights(theta))
}

/// Direction the signal arrived from, in the receiver's frame. Equal to
/// `angular_weights(theta + pi)`, computed by swapping up/down and
/// left/right so axis-aligned cases stay exact.
pub fn receiver_direction_weights(theta: f64) -> DirVec {
    let [up, right, down, left] = angular_weights(theta).0;
    DirVec::new(down, left, up, right)
}

/// `(cos, sin)` of the sender-to-receiver angle, taken from the grid offset
/// rather than through `atan2`, so that axis-aligned and mirrored geometries
/// give bit-identical weights. Coincident positions use angle 0.
fn heading(from: Coord, to: Coord) -> (f64, f64) {
    let (dx, dy) = (f64::from(to.x - from.x), f64::from(to.y - from.y));
    if dx == 0.0 && dy == 0.0 {
        return (1.0, 0.0);
    }
    let r = libm::sqrt(dx * dx + dy * dy);
    (dx / r, dy / r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Action {
    /// Action 0: push the cart left.
    Left,
    /// Action 1: push the cart right.
    Right,
}

impl Action {
    pub fn index(self) -> u8 {
        match self {
            Action::Left => 0,
            Action::Right => 1,
        }
    }

    pub fn from_index(i: u8) -> Option<Action> {
        match i {
            0 => Some(Action::Left),
            1 => Some(Action::Right),
            _ => None,
        }
    }
}

/// 0 iff the first output is strictly more active than the second.
pub fn decide(first: f64, second: f64) -> Action {
    if first > second {
        Action::Left
    } else {
        Action::Right
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WaveSeed {
    pub position: Coord,
    pub value: f64,
    /// True for input cells. False for punishment epicenters, which are
    /// virtual senders that may sit on empty or occupied coordinates.
    pub uses_cell_slot: bool,
}

/// Final state of one receiver after a wave.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CellActivation {
    pub id: CellId,
    pub total: f64,
    pub influx: DirVec,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WaveResult {
    /// Processing and output cells, ascending by id.
    pub activations: Vec<CellActivation>,
    pub activation_order: Vec<CellId>,
    /// Output ids ascending; the first votes for action 0.
    pub output_ids: Vec<CellId>,
    pub action: Option<Action>,
}

impl WaveResult {
    pub fn activation(&self, id: CellId) -> Option<&CellActivation> {
        self.activations
            .binary_search_by_key(&id, |a| a.id)
            .ok()
            .map(|i| &self.activations[i])
    }
}

/// Chooses the action from the first two output cells of a wave.
pub fn select_action(wave: &WaveResult) -> Option<Action> {
    match wave.output_ids.as_slice() {
        [o0, o1, ..] => Some(decide(
            wave.activation(*o0)?.total,
            wave.activation(*o1)?.total,
        )),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(
    feature = "serde",
    serde(tag = "kind", content = "id", rename_all = "lowercase")
)]
pub enum Sender {
    Cell(CellId),
    /// Index into the seed list of a virtual (non-cell) seed.
    Epicenter(u32),
}

/// One sender-to-receiver contribution, as emitted by trace mode.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Contribution {
    /// 0 for the seed round, then one round per activated cell.
    pub round: u32,
    pub sender: Sender,
    pub receiver: CellId,
    pub delta: f64,
    pub theta: f64,
    pub distance: u32,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    Inert,
    Available,
    Active,
}

struct Emitter {
    sender: Sender,
    pos: Coord,
    value: f64,
    strengths: DirVec,
}

fn emit(
    emitter: &Emitter,
    round: u32,
    cells: &mut [Cell],
    slots: &[Slot],
    trace: &mut Option<&mut Vec<Contribution>>,
) {
    if emitter.value == 0.0 {
        return;
    }
    let drive = libm::tanh(emitter.value);
    for (cell, slot) in cells.iter_mut().zip(slots) {
        if *slot != Slot::Available {
            continue;
        }
        let d = emitter.pos.manhattan(cell.pos);
        let decay = distance_decay(d);
        if decay == 0.0 {
            continue;
        }
        let (cos, sin) = heading(emitter.pos, cell.pos);
        let delta = drive * decay * emitter.strengths.dot(&weights_from(cos, sin));
        cell.imm.total += delta;
        cell.imm.influx += weights_from(-cos, -sin) * delta;
        if let Some(t) = trace.as_deref_mut() {
            t.push(Contribution {
                round,
                sender: emitter.sender,
                receiver: cell.id,
                delta,
                theta: libm::atan2(sin, cos),
                distance: d,
            });
        }
    }
}

/// Runs one wave from `seeds` over the current network. Immediate state is
/// expected to be reset beforehand. No action is selected.
pub fn propagate_wave(network: &mut Network, seeds: &[WaveSeed]) -> WaveResult {
    run_wave(network, seeds, None)
}

/// Like [`propagate_wave`], recording every contribution into `trace`.
pub fn propagate_wave_traced(
    network: &mut Network,
    seeds: &[WaveSeed],
    trace: &mut Vec<Contribution>,
) -> WaveResult {
    run_wave(network, seeds, Some(trace))
}

/// Seeds the input cells (ascending id) with `inputs`, runs the wave and
/// selects an action from the outputs.
pub fn action_wave(network: &mut Network, inputs: &[f64]) -> WaveResult {
    let seeds = input_seeds(network, inputs);
    let mut wave = propagate_wave(network, &seeds);
    wave.action = select_action(&wave);
    wave
}

pub fn input_seeds(network: &Network, inputs: &[f64]) -> Vec<WaveSeed> {
    network
        .input_ids()
        .into_iter()
        .zip(inputs)
        .filter_map(|(id, &value)| {
            network.cell(id).map(|c| WaveSeed {
                position: c.pos,
                value,
                uses_cell_slot: true,
            })
        })
        .collect()
}

fn run_wave(
    network: &mut Network,
    seeds: &[WaveSeed],
    mut trace: Option<&mut Vec<Contribution>>,
) -> WaveResult {
    let output_ids = network.output_ids();
    let mut emitters = Vec::with_capacity(seeds.len());
    for (i, seed) in seeds.iter().enumerate() {
        let occupant = if seed.uses_cell_slot {
            network.occupant(seed.position)
        } else {
            None
        };
        let (sender, strengths) = match occupant.and_then(|id| network.cell_mut(id)) {
            Some(cell) => {
                cell.imm.total = seed.value;
                (Sender::Cell(cell.id), cell.ltm.strengths)
            }
            None => (Sender::Epicenter(i as u32), UNIFORM_STRENGTHS),
        };
        emitters.push(Emitter {
            sender,
            pos: seed.position,
            value: seed.value,
            strengths,
        });
    }

    let cells = network.cells_mut();
    let mut slots: Vec<Slot> = cells
        .iter()
        .map(|c| {
            if c.receives() {
                Slot::Available
            } else {
                Slot::Inert
            }
        })
        .collect();
    let receivers = slots.iter().filter(|s| **s == Slot::Available).count();

    for emitter in &emitters {
        emit(emitter, 0, cells, &slots, &mut trace);
    }

    let mut order = Vec::with_capacity(receivers);
    for round in 1..=receivers as u32 {
        let mut best: Option<usize> = None;
        for (i, cell) in cells.iter().enumerate() {
            if slots[i] != Slot::Available {
                continue;
            }
            best = match best {
                None => Some(i),
                Some(b) => {
                    let (a, m) = (cell.imm.total.abs(), cells[b].imm.total.abs());
                    if a > m || (a == m && cell.id < cells[b].id) {
                        Some(i)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        let Some(next) = best else { break };
        slots[next] = Slot::Active;
        order.push(cells[next].id);
        let emitter = Emitter {
            sender: Sender::Cell(cells[next].id),
            pos: cells[next].pos,
            value: cells[next].imm.total,
            strengths: cells[next].ltm.strengths,
        };
        emit(&emitter, round, cells, &slots, &mut trace);
    }

    let mut activations: Vec<CellActivation> = cells
        .iter()
        .filter(|c| c.receives())
        .map(|c| CellActivation {
            id: c.id,
            total: c.imm.total,
            influx: c.imm.influx,
        })
        .collect();
    activations.sort_unstable_by_key(|a| a.id);
    WaveResult {
        activations,
        activation_order: order,
        output_ids,
        action: None,
    }
}

/// Adds the current wave's immediate state into every processing cell's
/// STM. No-op while the network is locked.
pub fn accumulate_stm(network: &mut Network) {
    if network.is_locked() {
        return;
    }
    for cell in network
        .cells_mut()
        .iter_mut()
        .filter(|c| c.kind == CellKind::Processing)
    {
        cell.stm.influx += cell.imm.influx;
        cell.stm.total += cell.imm.total;
    }
}
