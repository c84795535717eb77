//! Model constants. Defaults reproduce the published setup; ablations change
//! these values rather than code.

use alloc::vec;
use alloc::vec::Vec;

use crate::grid::Coord;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MovementParams {
    /// Minimum long-run prediction error that makes a cell a movement candidate.
    pub min_desire: f64,
    /// Probability that a candidate ignores its influx and picks a random axis.
    pub eps_rand: f64,
    /// Probability that a cell below `min_desire` is still a candidate.
    pub random_inclusion: f64,
}

impl Default for MovementParams {
    fn default() -> Self {
        Self {
            min_desire: 0.1,
            eps_rand: 0.05,
            random_inclusion: 0.025,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PunishmentParams {
    /// Epicenters emitted when an episode ends in failure.
    pub catastrophic_epicenters: usize,
    /// Pole-angle window, in degrees, where probabilistic punishment may fire.
    pub angle_min_deg: f64,
    pub angle_max_deg: f64,
    /// Trigger probability at the low and high ends of the angle window.
    pub probability_min: f64,
    pub probability_max: f64,
    /// Fraction of `catastrophic_epicenters` used by a probabilistic event.
    pub fraction_min: f64,
    pub fraction_max: f64,
}

impl Default for PunishmentParams {
    fn default() -> Self {
        Self {
            catastrophic_epicenters: 10,
            angle_min_deg: 4.0,
            angle_max_deg: 12.0,
            probability_min: 0.01,
            probability_max: 0.10,
            fraction_min: 0.01,
            fraction_max: 0.30,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimConfig {
    pub width: i32,
    pub height: i32,
    pub processing_cells: usize,
    /// Fixed input coordinates, in the order the normalized state is fed.
    pub input_coords: Vec<Coord>,
    /// Fixed output coordinates; the first one votes for action 0.
    pub output_coords: Vec<Coord>,
    /// LTM learning rate.
    pub eta: f64,
    /// Environment episodes per macro-episode (movement cadence).
    pub macro_episode: usize,
    pub movement: MovementParams,
    pub punishment: PunishmentParams,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            width: 9,
            height: 9,
            processing_cells: 30,
            input_coords: vec![
                Coord::new(0, 1),
                Coord::new(0, 3),
                Coord::new(0, 5),
                Coord::new(0, 7),
            ],
            output_coords: vec![Coord::new(8, 2), Coord::new(8, 6)],
            eta: 0.02,
            macro_episode: 4,
            movement: MovementParams::default(),
            punishment: PunishmentParams::default(),
        }
    }
}

impl SimConfig {
    // negated comparisons also reject NaN
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> crate::Result<()> {
        use crate::Error::InvalidConfig;
        if self.width <= 0 || self.height <= 0 {
            return Err(InvalidConfig("grid dimensions must be positive"));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(InvalidConfig("eta must be positive"));
        }
        if self.macro_episode == 0 {
            return Err(InvalidConfig("macro_episode must be at least 1"));
        }
        let probs = [
            self.movement.eps_rand,
            self.movement.random_inclusion,
            self.punishment.probability_min,
            self.punishment.probability_max,
            self.punishment.fraction_min,
            self.punishment.fraction_max,
        ];
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(InvalidConfig(
                "probabilities and fractions must lie in [0, 1]",
            ));
        }
        if !(self.movement.min_desire >= 0.0) {
            return Err(InvalidConfig("min_desire must be non-negative"));
        }
        let p = &self.punishment;
        if !(p.angle_min_deg >= 0.0 && p.angle_min_deg < p.angle_max_deg) {
            return Err(InvalidConfig(
                "punishment angle window must satisfy 0 <= min < max",
            ));
        }
        if p.fraction_min > p.fraction_max || p.probability_min > p.probability_max {
            return Err(InvalidConfig("punishment ranges must be ordered"));
        }
        if self.output_coords.len() != 2 {
            return Err(InvalidConfig("exactly two output cells are required"));
        }
        Ok(())
    }
}
