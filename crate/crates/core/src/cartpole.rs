//! Cart-pole balancing task with the classic dynamics, explicit Euler
//! integration, and the usual CartPole-v1 constants and limits.

use crate::error::{Error, Result};
use crate::propagation::Action;
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnvParams {
    pub gravity: f64,
    pub cart_mass: f64,
    pub pole_mass: f64,
    /// Half the pole length.
    pub pole_half_length: f64,
    pub force_mag: f64,
    pub tau: f64,
    pub x_threshold: f64,
    pub theta_threshold: f64,
    pub max_steps: u32,
    /// Reset draws every state component from `[-reset_bound, reset_bound]`.
    pub reset_bound: f64,
}

impl Default for EnvParams {
    fn default() -> Self {
        Self {
            gravity: 9.8,
            cart_mass: 1.0,
            pole_mass: 0.1,
            pole_half_length: 0.5,
            force_mag: 10.0,
            tau: 0.02,
            x_threshold: 2.4,
            theta_threshold: 12.0 * 2.0 * core::f64::consts::PI / 360.0,
            max_steps: 500,
            reset_bound: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnvState {
    pub x: f64,
    pub x_dot: f64,
    pub theta: f64,
    pub theta_dot: f64,
    pub steps: u32,
    pub terminated: bool,
}

impl EnvState {
    pub fn new(x: f64, x_dot: f64, theta: f64, theta_dot: f64) -> Self {
        Self {
            x,
            x_dot,
            theta,
            theta_dot,
            steps: 0,
            terminated: false,
        }
    }
}

/// Bounds used to map raw state onto `[-1, 1]`.
pub const NORM_BOUNDS: [f64; 4] = [2.4, 4.0, 0.209, 4.0];

/// `[x, x_dot, theta, theta_dot]` divided by [`NORM_BOUNDS`] and clipped to
/// `[-1, 1]`, in input-cell order.
pub fn normalize(state: &EnvState) -> [f64; 4] {
    let raw = [state.x, state.x_dot, state.theta, state.theta_dot];
    let mut out = [0.0; 4];
    for ((o, r), b) in out.iter_mut().zip(raw).zip(NORM_BOUNDS) {
        *o = (r / b).clamp(-1.0, 1.0);
    }
    out
}

pub fn denormalize(values: &[f64; 4]) -> EnvState {
    EnvState::new(
        values[0] * NORM_BOUNDS[0],
        values[1] * NORM_BOUNDS[1],
        values[2] * NORM_BOUNDS[2],
        values[3] * NORM_BOUNDS[3],
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CartPole {
    pub params: EnvParams,
}

impl CartPole {
    pub fn new(params: EnvParams) -> Self {
        Self { params }
    }

    /// Fresh episode; draws `x, x_dot, theta, theta_dot` in that order.
    pub fn reset(&self, rng: &mut RngStream) -> EnvState {
        let b = self.params.reset_bound;
        let x = rng.uniform(-b, b);
        let x_dot = rng.uniform(-b, b);
        let theta = rng.uniform(-b, b);
        let theta_dot = rng.uniform(-b, b);
        EnvState::new(x, x_dot, theta, theta_dot)
    }

    /// Pole fell or cart left the track.
    pub fn failed(&self, s: &EnvState) -> bool {
        let p = &self.params;
        s.x < -p.x_threshold
            || s.x > p.x_threshold
            || s.theta < -p.theta_threshold
            || s.theta > p.theta_threshold
    }

    pub fn step(&self, state: &EnvState, action: Action) -> Result<EnvState> {
        if state.terminated {
            return Err(Error::EpisodeTerminated);
        }
        let p = &self.params;
        let force = match action {
            Action::Right => p.force_mag,
            Action::Left => -p.force_mag,
        };
        let total_mass = p.cart_mass + p.pole_mass;
        let polemass_length = p.pole_mass * p.pole_half_length;
        let (sin, cos) = (libm::sin(state.theta), libm::cos(state.theta));

        let temp = (force + polemass_length * state.theta_dot * state.theta_dot * sin) / total_mass;
        let theta_acc = (p.gravity * sin - cos * temp)
            / (p.pole_half_length * (4.0 / 3.0 - p.pole_mass * cos * cos / total_mass));
        let x_acc = temp - polemass_length * theta_acc * cos / total_mass;

        let mut next = EnvState {
            x: state.x + p.tau * state.x_dot,
            x_dot: state.x_dot + p.tau * x_acc,
            theta: state.theta + p.tau * state.theta_dot,
            theta_dot: state.theta_dot + p.tau * theta_acc,
            steps: state.steps + 1,
            terminated: false,
        };
        next.terminated = self.failed(&next) || next.steps >= p.max_steps;
        Ok(next)
    }
}
