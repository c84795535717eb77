//! Invariant checks as plain functions so that both the core test suite and
//! the acceptance runner can execute them. Property checks use a
//! deterministic proptest runner.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::hash::{Hash, Hasher};

use proptest::prelude::*;
use proptest::test_runner::{RngAlgorithm, TestRng, TestRunner};
use sapin_core::cartpole::CartPole;
use sapin_core::experiment::{run_episode, Condition, ExperimentConfig};
use sapin_core::grid::{CellKind, Coord, DirVec};
use sapin_core::propagation::{
    accumulate_stm, action_wave, angular_weights, distance_decay, input_seeds,
    propagate_wave_traced, receiver_direction_weights, Sender,
};
use sapin_core::structural::execute_movement_phase;
use sapin_core::synaptic::ltm_update;
use sapin_core::{Network, RngStream, SimConfig};

pub type Check = fn() -> Result<(), String>;

/// Every check, by name.
pub const ALL: &[(&str, Check)] = &[
    (
        "each receiver activates exactly once",
        every_receiver_activates_exactly_once,
    ),
    (
        "contributions bounded, one round per sender",
        contributions_are_bounded_and_directionally_consistent,
    ),
    ("angular weight identities", angular_identities),
    (
        "expectation error contracts by 1 - eta/2",
        expectation_error_contracts,
    ),
    ("LTM update is local", ltm_update_is_local),
    (
        "direction proportions have unit mass",
        direction_proportions_have_unit_mass,
    ),
    ("lock gates LTM and STM", lock_gates_ltm_update),
    ("distance decay table exact", decay_table_is_exact),
    (
        "strength clip closure over 1e5 updates",
        clip_closure_over_many_updates,
    ),
    (
        "occupancy bijection and zeroed STM over 1e4 phases",
        movement_phases_preserve_occupancy,
    ),
    (
        "movement phase deterministic",
        movement_phase_is_deterministic,
    ),
    (
        "lock freezes learned state",
        lock_freezes_learned_state_across_episodes,
    ),
];

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn property<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let config = ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    };
    let rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
    TestRunner::new_with_rng(config, rng)
        .run(&strategy, test)
        .map_err(|e| e.to_string())
}

pub fn standard(seed: u64) -> Network {
    Network::init(&SimConfig::default(), &mut RngStream::new(seed)).unwrap()
}

/// Hash of everything that must stay frozen under the lock.
pub fn learned_state_hash(net: &Network) -> u64 {
    let mut h = DefaultHasher::new();
    for c in net.cells() {
        c.id.hash(&mut h);
        c.pos.hash(&mut h);
        for v in c.ltm.strengths.0 {
            v.to_bits().hash(&mut h);
        }
        c.ltm.expectation.to_bits().hash(&mut h);
        for v in c.stm.influx.0 {
            v.to_bits().hash(&mut h);
        }
        c.stm.total.to_bits().hash(&mut h);
    }
    net.is_locked().hash(&mut h);
    h.finish()
}

pub fn every_receiver_activates_exactly_once() -> Result<(), String> {
    property(
        64,
        (any::<u64>(), prop::array::uniform4(-1.0f64..=1.0)),
        |(seed, inputs)| {
            let mut net = standard(seed);
            let wave = action_wave(&mut net, &inputs);
            prop_assert_eq!(wave.activation_order.len(), 32);
            let mut order = wave.activation_order.clone();
            order.sort_unstable();
            let mut ids: Vec<u32> = net
                .cells()
                .iter()
                .filter(|c| c.kind != CellKind::Input)
                .map(|c| c.id)
                .collect();
            ids.sort_unstable();
            prop_assert_eq!(order, ids);
            Ok(())
        },
    )
}

pub fn contributions_are_bounded_and_directionally_consistent() -> Result<(), String> {
    property(
        64,
        (any::<u64>(), prop::array::uniform4(-1.0f64..=1.0)),
        |(seed, inputs)| {
            let mut net = standard(seed);
            let seeds = input_seeds(&net, &inputs);
            let mut trace = Vec::new();
            let wave = propagate_wave_traced(&mut net, &seeds, &mut trace);
            let mut sent_by = BTreeMap::new();
            for t in &trace {
                prop_assert!(t.delta.abs() < 1.07);
                prop_assert!(t.distance <= 2);
                if let Sender::Cell(id) = t.sender {
                    sent_by
                        .entry(id)
                        .or_insert_with(BTreeSet::new)
                        .insert(t.round);
                }
            }
            // a sender speaks in one round only
            for rounds in sent_by.values() {
                prop_assert_eq!(rounds.len(), 1);
            }
            for a in &wave.activations {
                let expected: f64 = trace
                    .iter()
                    .filter(|t| t.receiver == a.id)
                    .map(|t| t.delta * (t.theta.sin().abs() + t.theta.cos().abs()))
                    .sum();
                prop_assert!((a.influx.sum() - expected).abs() < 1e-12);
            }
            Ok(())
        },
    )
}

pub fn angular_identities() -> Result<(), String> {
    property(256, -10.0f64..10.0, |theta| {
        let w = angular_weights(theta);
        let r = receiver_direction_weights(theta);
        prop_assert!(w.0.iter().all(|c| *c >= 0.0));
        prop_assert!((w.sum() - (theta.sin().abs() + theta.cos().abs())).abs() < 1e-12);
        prop_assert_eq!(r, DirVec::new(w.0[2], w.0[3], w.0[0], w.0[1]));
        let shifted = angular_weights(theta + std::f64::consts::PI);
        for k in 0..4 {
            prop_assert!((shifted.0[k] - r.0[k]).abs() < 1e-12);
        }
        Ok(())
    })
}

pub fn expectation_error_contracts() -> Result<(), String> {
    property(
        256,
        (-5.0f64..5.0, -1.0f64..1.0, 0.001f64..0.5),
        |(v, e, eta)| {
            let mut net = standard(1);
            let id = net.cells().iter().find(|c| c.is_processing()).unwrap().id;
            {
                let c = net.cell_mut(id).unwrap();
                c.ltm.expectation = e;
                c.imm.total = v;
            }
            ltm_update(&mut net, eta);
            let e_new = net.cell(id).unwrap().ltm.expectation;
            let want = (1.0 - eta / 2.0) * (v - e).abs();
            prop_assert!(((v - e_new).abs() - want).abs() <= 1e-12 * (1.0 + want));
            Ok(())
        },
    )
}

pub fn ltm_update_is_local() -> Result<(), String> {
    property(64, (any::<u64>(), -3.0f64..3.0), |(seed, noise)| {
        let mut a = standard(seed);
        action_wave(&mut a, &[0.2, -0.4, 0.6, -0.1]);
        let mut b = a.clone();
        let target = a.cells().iter().find(|c| c.is_processing()).unwrap().id;
        for c in b.cells().iter().map(|c| c.id).collect::<Vec<_>>() {
            if c != target {
                let cell = b.cell_mut(c).unwrap();
                cell.imm.total += noise;
                cell.imm.influx = DirVec([noise; 4]);
                cell.ltm.expectation = -noise;
            }
        }
        ltm_update(&mut a, 0.02);
        ltm_update(&mut b, 0.02);
        prop_assert_eq!(a.cell(target).unwrap().ltm, b.cell(target).unwrap().ltm);
        Ok(())
    })
}

pub fn direction_proportions_have_unit_mass() -> Result<(), String> {
    let strategy = (
        prop::array::uniform4(-2.0f64..2.0),
        -3.0f64..3.0,
        -1.0f64..1.0,
    );
    property(256, strategy, |(influx, v, e)| {
        let influx = DirVec(influx);
        prop_assume!(influx.abs_sum() > 1e-3 && (v - e).abs() > 1e-3);
        let mut net = standard(2);
        let id = net.cells().iter().find(|c| c.is_processing()).unwrap().id;
        {
            let c = net.cell_mut(id).unwrap();
            c.ltm.strengths = DirVec::ZERO;
            c.ltm.expectation = e;
            c.imm.total = v;
            c.imm.influx = influx;
        }
        ltm_update(&mut net, 0.02);
        let s = net.cell(id).unwrap().ltm.strengths;
        let p: Vec<f64> = s.0.iter().map(|d| d / (0.01 * (v - e))).collect();
        let mass: f64 = p.iter().map(|x| x.abs()).sum();
        let signed: f64 = p.iter().sum();
        prop_assert!((mass - 1.0).abs() < 1e-9);
        prop_assert!((-1.0 - 1e-9..=1.0 + 1e-9).contains(&signed));
        Ok(())
    })
}

pub fn lock_gates_ltm_update() -> Result<(), String> {
    property(64, any::<u64>(), |seed| {
        let mut net = standard(seed);
        action_wave(&mut net, &[0.5, 0.5, -0.5, 0.1]);
        net.lock();
        let before = net.clone();
        ltm_update(&mut net, 0.02);
        accumulate_stm(&mut net);
        prop_assert_eq!(net, before);
        Ok(())
    })
}

pub fn decay_table_is_exact() -> Result<(), String> {
    let got: Vec<f64> = (0..6).map(distance_decay).collect();
    ensure!(
        got == [1.0, 0.75, 0.25, 0.0, 0.0, 0.0],
        "decay table {got:?}"
    );
    Ok(())
}

pub fn clip_closure_over_many_updates() -> Result<(), String> {
    let mut rng = RngStream::new(21);
    let mut net = standard(21);
    let mut max_v: f64 = 1.0;
    let ids: Vec<u32> = net
        .cells()
        .iter()
        .filter(|c| c.is_processing())
        .map(|c| c.id)
        .collect();
    for _ in 0..100_000 {
        for &id in &ids {
            let c = net.cell_mut(id).unwrap();
            c.imm.total = rng.uniform(-4.0, 4.0);
            c.imm.influx = DirVec([0; 4].map(|_| rng.uniform(-3.0, 3.0)));
            max_v = max_v.max(c.imm.total.abs());
        }
        ltm_update(&mut net, 0.02);
    }
    for c in net.cells() {
        ensure!(
            c.ltm.strengths.0.iter().all(|s| (-1.0..=1.0).contains(s)),
            "cell {} strengths {:?}",
            c.id,
            c.ltm.strengths
        );
        ensure!(
            c.ltm.expectation.abs() <= max_v,
            "cell {} expectation {}",
            c.id,
            c.ltm.expectation
        );
    }
    Ok(())
}

pub fn movement_phases_preserve_occupancy() -> Result<(), String> {
    let config = SimConfig::default();
    let mut rng = RngStream::new(31);
    let mut net = Network::init(&config, &mut rng).unwrap();
    let fixed: Vec<(u32, Coord)> = net
        .cells()
        .iter()
        .filter(|c| !c.is_processing())
        .map(|c| (c.id, c.pos))
        .collect();
    // loose thresholds so that many cells try to move each phase
    let params = sapin_core::MovementParams {
        min_desire: 0.05,
        eps_rand: 0.2,
        random_inclusion: 0.2,
    };
    let mut moved_total = 0;
    for phase in 0..10_000 {
        let ids: Vec<u32> = net
            .cells()
            .iter()
            .filter(|c| c.is_processing())
            .map(|c| c.id)
            .collect();
        for id in ids {
            let total = rng.uniform(-20.0, 20.0);
            let influx = DirVec([0; 4].map(|_| rng.uniform(-5.0, 5.0)));
            let c = net.cell_mut(id).unwrap();
            c.stm.total = total;
            c.stm.influx = influx;
        }
        let before: Vec<(u32, Coord)> = net.cells().iter().map(|c| (c.id, c.pos)).collect();
        let n_steps = rng.index(40) as u64;
        let report = execute_movement_phase(&mut net, n_steps, &params, &mut rng);
        moved_total += report.moved();

        ensure!(
            net.occupancy_consistent(),
            "occupancy broken after phase {phase}"
        );
        ensure!(
            net.cells()
                .iter()
                .all(|c| c.stm.total == 0.0 && c.stm.influx.is_zero()),
            "STM not cleared after phase {phase}"
        );
        for (id, pos) in &fixed {
            ensure!(
                net.cell(*id).unwrap().pos == *pos,
                "fixed cell {id} moved in phase {phase}"
            );
        }
        for (id, pos) in before {
            ensure!(
                net.cell(id).unwrap().pos.manhattan(pos) <= 1,
                "cell {id} jumped in phase {phase}"
            );
        }
    }
    ensure!(
        moved_total > 10_000,
        "only {moved_total} moves; the check exercised too little"
    );
    Ok(())
}

pub fn movement_phase_is_deterministic() -> Result<(), String> {
    let mut net = standard(8);
    for c in net.cells().iter().map(|c| c.id).collect::<Vec<_>>() {
        let cell = net.cell_mut(c).unwrap();
        if cell.is_processing() {
            cell.stm.total = f64::from(c) - 15.0;
            cell.stm.influx = DirVec::new(0.3, -0.2, f64::from(c % 3), 0.1);
        }
    }
    let mut a = net.clone();
    let mut b = net.clone();
    let ra = execute_movement_phase(&mut a, 10, &Default::default(), &mut RngStream::new(4));
    let rb = execute_movement_phase(&mut b, 10, &Default::default(), &mut RngStream::new(4));
    ensure!(ra == rb && a == b, "two identical movement phases diverged");
    Ok(())
}

pub fn lock_freezes_learned_state_across_episodes() -> Result<(), String> {
    let config = ExperimentConfig {
        condition: Condition::FailurePlusProbabilistic,
        continue_after_lock: true,
        max_episodes: 40,
        ..ExperimentConfig::default()
    };
    let sim = &config.sim;
    let env = CartPole::default();
    let mut rng = RngStream::new(5);
    let mut net = Network::init(sim, &mut rng).unwrap();
    for _ in 0..3 {
        run_episode(&mut net, &env, config.condition, sim, &mut rng);
    }
    net.lock();
    // the first locked phase clears STM left over from before the lock
    execute_movement_phase(&mut net, 100, &sim.movement, &mut rng);
    let frozen = learned_state_hash(&net);
    for i in 0..20 {
        let out = run_episode(&mut net, &env, config.condition, sim, &mut rng);
        ensure!(
            out.punishments.is_empty(),
            "punishment while locked in episode {i}"
        );
        if i % 4 == 3 {
            // a movement phase under the lock only clears (already empty) STM
            execute_movement_phase(&mut net, 100, &sim.movement, &mut rng);
        }
        ensure!(
            learned_state_hash(&net) == frozen,
            "learned state changed in locked episode {i}"
        );
    }
    Ok(())
}
