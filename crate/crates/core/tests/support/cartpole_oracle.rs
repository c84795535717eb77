//! Line-by-line transcription of the reference CartPole-v1 `step`, using
//! `std` math on a bare tuple state.

#![allow(dead_code)]

use sapin_core::cartpole::{CartPole, EnvState};
use sapin_core::{Action, RngStream};

pub const GRAVITY: f64 = 9.8;
pub const MASSCART: f64 = 1.0;
pub const MASSPOLE: f64 = 0.1;
pub const LENGTH: f64 = 0.5;
pub const FORCE_MAG: f64 = 10.0;
pub const TAU: f64 = 0.02;
pub const X_THRESHOLD: f64 = 2.4;

pub fn theta_threshold_radians() -> f64 {
    12.0 * 2.0 * std::f64::consts::PI / 360.0
}

/// Returns the next state and the `terminated` flag.
#[allow(clippy::manual_range_contains)]
pub fn step(state: (f64, f64, f64, f64), action: u8) -> ((f64, f64, f64, f64), bool) {
    let (x, x_dot, theta, theta_dot) = state;
    let total_mass = MASSPOLE + MASSCART;
    let polemass_length = MASSPOLE * LENGTH;
    let force = if action == 1 { FORCE_MAG } else { -FORCE_MAG };
    let costheta = theta.cos();
    let sintheta = theta.sin();

    let temp = (force + polemass_length * theta_dot.powi(2) * sintheta) / total_mass;
    let thetaacc = (GRAVITY * sintheta - costheta * temp)
        / (LENGTH * (4.0 / 3.0 - MASSPOLE * costheta.powi(2) / total_mass));
    let xacc = temp - polemass_length * thetaacc * costheta / total_mass;

    let x = x + TAU * x_dot;
    let x_dot = x_dot + TAU * xacc;
    let theta = theta + TAU * theta_dot;
    let theta_dot = theta_dot + TAU * thetaacc;

    let terminated = x < -X_THRESHOLD
        || x > X_THRESHOLD
        || theta < -theta_threshold_radians()
        || theta > theta_threshold_radians();
    ((x, x_dot, theta, theta_dot), terminated)
}

fn tuple(s: &EnvState) -> (f64, f64, f64, f64) {
    (s.x, s.x_dot, s.theta, s.theta_dot)
}

/// Random-action rollout of [`CartPole`] against [`step`]. Episodes restart
/// from the same state on both sides when they terminate. Returns the
/// accumulated componentwise error and the number of steps whose
/// termination decisions disagree.
pub fn rollout_error(seed: u64, steps: usize) -> (f64, usize) {
    let env = CartPole::default();
    let mut rng = RngStream::new(seed);
    let mut ours = env.reset(&mut rng);
    let mut theirs = tuple(&ours);
    let mut err = 0.0;
    let mut disagreements = 0;
    for _ in 0..steps {
        let action = rng.index(2) as u8;
        let next = env
            .step(&ours, Action::from_index(action).unwrap())
            .unwrap();
        let (t, done) = step(theirs, action);
        let n = tuple(&next);
        err += (n.0 - t.0).abs() + (n.1 - t.1).abs() + (n.2 - t.2).abs() + (n.3 - t.3).abs();
        let truncated = next.steps >= 500;
        if next.terminated != (done || truncated) || env.failed(&next) != done {
            disagreements += 1;
        }
        if next.terminated {
            ours = env.reset(&mut rng);
            theirs = tuple(&ours);
        } else {
            ours = next;
            theirs = t;
        }
    }
    (err, disagreements)
}
