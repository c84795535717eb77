//! Surprise injection: random epicenters drive a propagation wave and an
//! LTM update, either when an episode fails (catastrophic) or, with a small
//! angle-dependent probability, while the pole leans far (probabilistic).

use alloc::vec::Vec;

use crate::config::{PunishmentParams, SimConfig};
use crate::grid::Coord;
use crate::grid::Network;
use crate::propagation::{propagate_wave, WaveResult, WaveSeed};
use crate::rng::RngStream;
use crate::synaptic::ltm_update;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Trigger {
    Catastrophic,
    Probabilistic,
}

impl Trigger {
    pub fn name(self) -> &'static str {
        match self {
            Trigger::Catastrophic => "catastrophic",
            Trigger::Probabilistic => "probabilistic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Epicenter {
    pub pos: Coord,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PunishmentEvent {
    pub trigger: Trigger,
    pub epicenters: Vec<Epicenter>,
}

/// Places `count` epicenters uniformly over the whole grid, with
/// replacement. Each epicenter draws its cell index, then its value.
fn draw_epicenters(network: &Network, count: usize, rng: &mut RngStream) -> Vec<Epicenter> {
    let (w, h) = (network.width(), network.height());
    (0..count)
        .map(|_| {
            let i = rng.index((w * h) as usize) as i32;
            let value = rng.uniform(-1.0, 1.0);
            Epicenter {
                pos: Coord::new(i % w, i / w),
                value,
            }
        })
        .collect()
}

/// Resets immediate state and runs a wave seeded by the epicenters. They
/// send with uniform strengths; no action is taken and STM is untouched.
pub fn punishment_wave(network: &mut Network, event: &PunishmentEvent) -> WaveResult {
    network.reset_immediate_state();
    let seeds: Vec<WaveSeed> = event
        .epicenters
        .iter()
        .map(|e| WaveSeed {
            position: e.pos,
            value: e.value,
            uses_cell_slot: false,
        })
        .collect();
    propagate_wave(network, &seeds)
}

/// Punishes a failed episode. Returns `None`, drawing nothing, when locked.
pub fn catastrophic_punishment(
    network: &mut Network,
    config: &SimConfig,
    rng: &mut RngStream,
) -> Option<PunishmentEvent> {
    if network.is_locked() {
        return None;
    }
    let event = PunishmentEvent {
        trigger: Trigger::Catastrophic,
        epicenters: draw_epicenters(network, config.punishment.catastrophic_epicenters, rng),
    };
    apply(network, &event, config.eta);
    Some(event)
}

/// Chance of a probabilistic event at pole angle `angle_deg` (sign ignored):
/// linear from `probability_min` to `probability_max` across the window and
/// zero outside it.
pub fn trigger_probability(angle_deg: f64, params: &PunishmentParams) -> f64 {
    let a = angle_deg.abs();
    if a < params.angle_min_deg || a > params.angle_max_deg {
        return 0.0;
    }
    let t = (a - params.angle_min_deg) / (params.angle_max_deg - params.angle_min_deg);
    params.probability_min + (params.probability_max - params.probability_min) * t
}

/// Epicenter count for a probabilistic event: a uniform fraction of the
/// catastrophic count, rounded up, never zero.
pub fn probabilistic_count(params: &PunishmentParams, rng: &mut RngStream) -> usize {
    let fraction = rng.uniform(params.fraction_min, params.fraction_max);
    let total = params.catastrophic_epicenters as f64;
    let k = libm::ceil(total * fraction) as usize;
    k.clamp(1, params.catastrophic_epicenters.max(1))
}

/// Possibly punishes a non-terminal step with pole angle `angle_deg`.
///
/// Draws nothing when locked or outside the angle window; otherwise one draw
/// for the trigger and, if it fires, the count and epicenters.
pub fn probabilistic_punishment(
    network: &mut Network,
    angle_deg: f64,
    config: &SimConfig,
    rng: &mut RngStream,
) -> Option<PunishmentEvent> {
    if network.is_locked() {
        return None;
    }
    let p = trigger_probability(angle_deg, &config.punishment);
    if p <= 0.0 || rng.unit() >= p {
        return None;
    }
    let k = probabilistic_count(&config.punishment, rng);
    let event = PunishmentEvent {
        trigger: Trigger::Probabilistic,
        epicenters: draw_epicenters(network, k, rng),
    };
    apply(network, &event, config.eta);
    Some(event)
}

fn apply(network: &mut Network, event: &PunishmentEvent, eta: f64) {
    punishment_wave(network, event);
    ltm_update(network, eta);
}
