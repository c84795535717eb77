#![no_std]
//! A 9x9 grid network that learns by local prediction-error plasticity and
//! by physically moving its processing cells, together with a cart-pole
//! environment and the training/locking/ablation loop that drives it.
//!
//! Everything here is pure computation over owned state: no IO, no clocks,
//! no global randomness. Every stochastic choice draws from an explicit
//! [`RngStream`], so a run is a function of its configuration and seed.

extern crate alloc;

pub mod cartpole;
pub mod config;
mod error;
pub mod experiment;
pub mod grid;
pub mod propagation;
pub mod punishment;
mod rng;
pub mod structural;
pub mod synaptic;

pub use crate::cartpole::{CartPole, EnvParams, EnvState};
pub use crate::config::{MovementParams, PunishmentParams, SimConfig};
pub use crate::error::{Error, Result};
pub use crate::experiment::{Condition, ExperimentConfig, RunRecord};
pub use crate::grid::{Cell, CellId, CellKind, Coord, DirVec, Direction, Network};
pub use crate::propagation::{Action, WaveResult, WaveSeed};
pub use crate::rng::{derive_seed, RngStream};
