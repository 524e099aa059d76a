use super::*;
use crate::aero::WindField;
use crate::gait::{GaitParams, ManeuverParams};
use crate::model::ModelParams;
use crate::sim::{simulate_gait, simulate_maneuver, Reference, SimConfig, TraceRow};
use std::sync::atomic::{AtomicUsize, Ordering};

fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn short_sim(t_end: f64) -> SimConfig {
    SimConfig { t_end, ..SimConfig::default() }
}

#[test]
fn sphere_converges_within_budget() {
    let bounds = Bounds::uniform(11, -1.0, 1.0).unwrap();
    let x0 = vec![0.7, -0.4, 0.9, 0.1, -0.8, 0.55, -0.3, 0.2, 0.65, -0.95, 0.35];
    let settings = OptimizerSettings { budget: 2000, seed: 3, ..OptimizerSettings::default() };
    let r = optimize(sphere, &bounds, &x0, &settings).unwrap();
    assert!(r.evaluations <= 2000);
    let dist = r.best.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(dist < 1e-3, "distance {dist}, cost {}", r.best_cost);
}

#[test]
fn history_is_monotone_and_matches_best() {
    let bounds = Bounds::uniform(4, -2.0, 2.0).unwrap();
    let rosen =
        |x: &[f64]| (0..3).map(|i| 100.0 * (x[i + 1] - x[i] * x[i]).powi(2) + (1.0 - x[i]).powi(2)).sum::<f64>();
    let settings = OptimizerSettings { budget: 400, seed: 1, ..OptimizerSettings::default() };
    let r = optimize(rosen, &bounds, &[-1.0, 1.5, 0.3, -0.7], &settings).unwrap();
    assert_eq!(r.history.len(), r.evaluations);
    assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(*r.history.last().unwrap(), r.best_cost);
    assert_eq!(rosen(&r.best), r.best_cost);
    assert!(r.best_cost <= r.initial_cost);
}

#[test]
fn same_seed_same_history() {
    let bounds = Bounds::uniform(6, -1.0, 1.0).unwrap();
    let f = |x: &[f64]| sphere(x) + (5.0 * x[0]).sin() * 0.1;
    let settings = OptimizerSettings { budget: 600, seed: 99, workers: Some(3), ..OptimizerSettings::default() };
    let a = optimize(f, &bounds, &[0.5; 6], &settings).unwrap();
    let b = optimize(f, &bounds, &[0.5; 6], &OptimizerSettings { workers: Some(1), ..settings.clone() }).unwrap();
    assert_eq!(a, b);
}

#[test]
fn every_candidate_is_inside_the_box() {
    let bounds = Bounds::new(vec![0.0, -1.0, 2.0], vec![1.0, 0.0, 3.0]).unwrap();
    let f = |x: &[f64]| {
        assert!(x[0] >= 0.0 && x[0] <= 1.0 && x[1] >= -1.0 && x[1] <= 0.0 && x[2] >= 2.0 && x[2] <= 3.0);
        // Minimum sits outside the box, so the search presses against it.
        (x[0] + 5.0).powi(2) + (x[1] - 4.0).powi(2) + x[2] * x[2]
    };
    let settings = OptimizerSettings { budget: 300, ..OptimizerSettings::default() };
    let r = optimize(f, &bounds, &[0.5, -0.5, 2.5], &settings).unwrap();
    assert!((r.best[0] - 0.0).abs() < 1e-6 && (r.best[1] - 0.0).abs() < 1e-6 && (r.best[2] - 2.0).abs() < 1e-6);
}

#[test]
fn budget_is_respected_exactly() {
    let bounds = Bounds::uniform(5, -1.0, 1.0).unwrap();
    let calls = AtomicUsize::new(0);
    let f = |x: &[f64]| {
        calls.fetch_add(1, Ordering::Relaxed);
        sphere(x)
    };
    for budget in [1, 2, 6, 7, 57] {
        calls.store(0, Ordering::Relaxed);
        let settings = OptimizerSettings { budget, ..OptimizerSettings::default() };
        let r = optimize(f, &bounds, &[0.3; 5], &settings).unwrap();
        assert_eq!(r.evaluations, budget);
        assert_eq!(calls.load(Ordering::Relaxed), budget);
    }
}

#[test]
fn budget_one_returns_start() {
    let bounds = Bounds::uniform(3, -1.0, 1.0).unwrap();
    let settings = OptimizerSettings { budget: 1, ..OptimizerSettings::default() };
    let r = optimize(sphere, &bounds, &[0.1, 0.2, 0.3], &settings).unwrap();
    assert_eq!(r.best, vec![0.1, 0.2, 0.3]);
    assert_eq!(r.best_cost, sphere(&[0.1, 0.2, 0.3]));
}

#[test]
fn all_nan_is_a_failure() {
    let bounds = Bounds::uniform(2, -1.0, 1.0).unwrap();
    let settings = OptimizerSettings { budget: 20, ..OptimizerSettings::default() };
    let r = optimize(|_: &[f64]| f64::NAN, &bounds, &[0.0, 0.0], &settings);
    assert!(matches!(r, Err(crate::Error::OptimizerFailure(_))));
}

#[test]
fn bounds_reject_bad_input() {
    assert!(Bounds::new(vec![1.0], vec![0.0]).is_err());
    assert!(Bounds::new(vec![0.0, 0.0], vec![1.0]).is_err());
    let b = Bounds::uniform(2, 0.0, 1.0).unwrap();
    assert!(matches!(b.check(&[0.5, 1.5]), Err(crate::Error::OutOfBounds { index: 1, .. })));
    assert!(b.check(&[0.5]).is_err());
}

#[test]
fn zero_weights_give_zero_cost() {
    let p = ModelParams::reference();
    let cfg = GaitCostConfig { sim: short_sim(0.05), weights: [0.0; 4], ..GaitCostConfig::default() };
    assert_eq!(gait_cost(&GaitParams::zero_momentum().to_vec(), &p, &cfg).unwrap(), 0.0);
}

#[test]
fn perfect_rows_cost_nothing() {
    let p = ModelParams::reference();
    let reference = Reference::gait(GaitParams::zero_momentum(), &p);
    let mut trace = simulate_gait(&short_sim(0.01), &p, reference);
    for row in &mut trace.rows {
        row.momentum = nalgebra::Vector3::zeros();
        row.qd[5] = 0.0;
    }
    assert_eq!(gait_cost_of_trace(&trace, &[5.0, 5.0, 5.0, 1e-5]), 0.0);
}

#[test]
fn gait_cost_replays_from_trace() {
    let p = ModelParams::reference();
    let cfg = GaitCostConfig { sim: short_sim(0.1), ..GaitCostConfig::default() };
    let k1 = GaitParams::zero_momentum();
    let cost = gait_cost(&k1.to_vec(), &p, &cfg).unwrap();
    let trace = simulate_gait(&cfg.sim, &p, Reference::gait(k1, &p));
    let mut acc = 0.0;
    for row in &trace.rows {
        let pi = row.momentum;
        let vz = row.qd[5];
        acc += 5.0 * pi.x * pi.x + 5.0 * pi.y * pi.y + 5.0 * pi.z * pi.z + 1e-5 * vz * vz;
    }
    assert!((cost - acc).abs() <= 1e-10 * acc.abs());
    assert_eq!(cost, gait_cost(&k1.to_vec(), &p, &cfg).unwrap());
}

#[test]
fn gait_cost_rejects_out_of_bounds() {
    let p = ModelParams::reference();
    let mut k = GaitParams::zero_momentum().to_vec();
    k[4] = -0.1;
    assert!(matches!(gait_cost(&k, &p, &GaitCostConfig::default()), Err(crate::Error::OutOfBounds { index: 4, .. })));
}

#[test]
fn blow_up_is_penalized() {
    let p = ModelParams::reference();
    let sim = SimConfig { wind: WindField::new(1e300, 0.0, 0.0), ..short_sim(0.01) };
    let cfg = GaitCostConfig { sim, ..GaitCostConfig::default() };
    assert_eq!(gait_cost(&GaitParams::zero_momentum().to_vec(), &p, &cfg).unwrap(), BLOWUP_PENALTY);
}

#[test]
fn null_maneuver_costs_the_reference_energy() {
    let p = ModelParams::reference();
    let cfg = PerchCostConfig {
        sim: SimConfig { wind: WindField::new(-2.0, 0.0, 0.0), ..SimConfig::default() },
        ..PerchCostConfig::default()
    };
    let k2 = [1.05, 0.0, 0.0, 0.0, 0.0];
    let cost = perch_cost(&k2, &p, &cfg).unwrap();
    let mut reference_energy = 0.0;
    let mut k = 0;
    loop {
        let t = k as f64 * 1e-3;
        k += 1;
        if t > 1.05 + 0.4 + 1e-9 {
            break;
        }
        if t >= 1.05 - 1e-9 {
            reference_energy += crate::gait::roll_reference(t, 1.05, 0.2).1.powi(2);
        }
    }
    assert!((cost - reference_energy).abs() < 1e-6 * reference_energy, "{cost} vs {reference_energy}");
}

#[test]
fn perch_cost_replays_and_ignores_rows_outside_window() {
    let p = ModelParams::reference();
    let cfg = PerchCostConfig::default();
    let k2 = ManeuverParams::perching();
    let cost = perch_cost(&k2.to_vec(), &p, &cfg).unwrap();
    let sim = SimConfig { t_end: k2.end() + 1e-3, ..cfg.sim };
    let mut trace = simulate_maneuver(&sim, &p, Reference::maneuver(cfg.gait, k2, &p));
    let replay = perch_cost_of_trace(&trace, k2.start, k2.ramp);
    assert!((cost - replay).abs() <= 1e-10 * replay);
    for row in trace.rows.iter_mut().filter(|r: &&mut TraceRow| r.t < k2.start || r.t > k2.end()) {
        row.qd[0] = 1e6;
    }
    assert_eq!(perch_cost_of_trace(&trace, k2.start, k2.ramp), replay);
}

#[test]
fn perch_bounds_follow_config() {
    let b = PerchCostConfig::default().bounds().unwrap();
    assert_eq!(b.lo()[0], 1.0);
    assert_eq!(b.hi()[0], 1.1);
    assert!((b.hi()[1] - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    let p = ModelParams::reference();
    assert!(perch_cost(&[0.9, 0.0, 0.0, 0.0, 0.0], &p, &PerchCostConfig::default()).is_err());
}
