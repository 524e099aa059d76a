use nalgebra::{Matrix3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::model::{angular_velocities, skew, JointAngles};
use crate::testkit::{exp_so3, flow, random_state};

fn params() -> ModelParams {
    ModelParams::reference()
}

#[test]
fn mass_matrix_is_symmetric_positive_definite() {
    let p = params();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..1000 {
        let s = random_state(&mut rng, 1.0);
        let m = mass_matrix(&s, &p);
        assert!((m - m.transpose()).norm() <= 1e-9 * m.norm());
        let eig = m.symmetric_eigenvalues();
        assert!(eig.min() > 0.0, "min eigenvalue {}", eig.min());
    }
}

#[test]
fn translational_block_is_total_mass() {
    let p = params();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let m = mass_matrix(&random_state(&mut rng, 1.0), &p);
    let block = m.fixed_view::<3, 3>(idx::VEL, idx::VEL);
    assert!((block - Matrix3::identity() * 0.0169).norm() < 1e-15);
}

#[test]
fn locked_assembly_rotational_inertia_matches_parallel_axis_sum() {
    let p = params();
    let mut s = State::rest();
    s.theta_left = JointAngles::new(0.4, -0.2, 0.6, 0.3);
    s.theta_right = JointAngles::new(-0.1, 0.5, 0.2, -0.7);
    let m = mass_matrix(&s, &p);
    let (al, wl, ar, wr) = crate::model::com_positions(&s.rotation, &s.position, &s.theta_left, &s.theta_right, &p);
    let (la, lw) = crate::model::wing_rotations(&s.theta_left);
    let (ra, rw) = crate::model::wing_rotations(&s.theta_right);
    let parts = [
        (p.body_mass, p.body_inertia, Matrix3::identity(), Vector3::zeros()),
        (p.arm_mass, p.arm_inertia, la, al),
        (p.arm_mass, p.arm_inertia, ra, ar),
        (p.wing_mass, p.wing_inertia, la * lw, wl),
        (p.wing_mass, p.wing_inertia, ra * rw, wr),
    ];
    let mut oracle = Matrix3::zeros();
    for (mass, inertia, r, pos) in parts {
        oracle += r * Matrix3::from_diagonal(&inertia) * r.transpose() + skew(&pos).transpose() * skew(&pos) * mass;
    }
    let block = m.fixed_view::<3, 3>(0, 0);
    assert!((block - oracle).norm() <= 1e-14 * oracle.norm());
}

#[test]
fn quadratic_form_is_kinetic_energy() {
    let p = params();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..100 {
        let s = random_state(&mut rng, 5.0);
        let kin = velocity_jacobians(&s, &p);
        let m = EomTerms::new(&kin, &p).mass;
        let quad = 0.5 * s.qd.dot(&(m * s.qd));
        // Angular velocities from the closed-form joint-rate expressions.
        let (al, wl, ar, wr) = angular_velocities(&s.theta_left, &s.theta_right, &s.qd);
        let spin = |w: &Vector3<f64>, i: &Vector3<f64>| 0.5 * w.dot(&i.component_mul(w));
        let oracle = 0.5 * p.body_mass * kin.body.velocity.norm_squared()
            + 0.5 * p.arm_mass * (kin.left.arm.velocity.norm_squared() + kin.right.arm.velocity.norm_squared())
            + 0.5 * p.wing_mass * (kin.left.wing.velocity.norm_squared() + kin.right.wing.velocity.norm_squared())
            + spin(&s.omega(), &p.body_inertia)
            + spin(&(kin.left.arm_relative.transpose() * al), &p.arm_inertia)
            + spin(&(kin.right.arm_relative.transpose() * ar), &p.arm_inertia)
            + spin(&(kin.left.wing_relative.transpose() * wl), &p.wing_inertia)
            + spin(&(kin.right.wing_relative.transpose() * wr), &p.wing_inertia);
        assert!((quad - oracle).abs() <= 1e-10 * oracle, "{quad} vs {oracle}");
    }
}

#[test]
fn static_bias_is_gravity() {
    let p = params();
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..20 {
        let mut s = random_state(&mut rng, 1.0);
        s.qd = QdVector::zeros();
        let h = bias_vector(&s, &p);
        let t = h.fixed_rows::<3>(idx::VEL);
        assert!((t - Vector3::new(0.0, 0.0, p.total_mass() * p.gravity)).norm() < 1e-15);
        // Joint blocks: gradient of the potential.
        let eps = 1e-6;
        for j in 0..NJ {
            let u = |d: f64| {
                let mut st = s.clone();
                let mut q = st.joints();
                q[j] += d;
                st.set_joints(&q);
                potential_energy(&velocity_jacobians(&st, &p), &p)
            };
            let grad = (u(eps) - u(-eps)) / (2.0 * eps);
            assert!((h[idx::JOINTS + j] - grad).abs() < 1e-9, "{j}: {} vs {grad}", h[idx::JOINTS + j]);
        }
    }
}

/// Independent route: the bias from the Lagrangian itself, by finite
/// differences. Coordinates p_B and θ use the ordinary Euler–Lagrange
/// equation; the body rotation uses the SO(3) form
/// `d/dt ∂L/∂ω + ω × ∂L/∂ω − ∂L/∂η`, with `η` a right perturbation of R_B.
fn lagrangian_bias(s: &State, p: &ModelParams) -> QdVector {
    let h = 1e-6;
    let energy = |st: &State| {
        let kin = velocity_jacobians(st, p);
        (kinetic_energy(&kin, p), potential_energy(&kin, p))
    };
    let momentum = |st: &State| mass_matrix(st, p) * s.qd;
    let mut out = (momentum(&flow(s, h)) - momentum(&flow(s, -h))) / (2.0 * h);

    let generalized = momentum(s);
    let w = s.omega();
    let pw = generalized.fixed_rows::<3>(idx::OMEGA).into_owned();
    let gyro = w.cross(&pw);
    for i in 0..3 {
        out[idx::OMEGA + i] += gyro[i];
        let rotate = |d: f64| {
            let mut st = s.clone();
            let mut e = Vector3::zeros();
            e[i] = d;
            st.rotation = s.rotation * exp_so3(&e);
            energy(&st)
        };
        let ((tp, up), (tm, um)) = (rotate(h), rotate(-h));
        out[idx::OMEGA + i] += -(tp - tm) / (2.0 * h) + (up - um) / (2.0 * h);

        let shift = |d: f64| {
            let mut st = s.clone();
            st.position[i] += d;
            energy(&st)
        };
        let ((tp, up), (tm, um)) = (shift(h), shift(-h));
        out[idx::VEL + i] += -(tp - tm) / (2.0 * h) + (up - um) / (2.0 * h);
    }
    for j in 0..NJ {
        let bend = |d: f64| {
            let mut st = s.clone();
            let mut q = st.joints();
            q[j] += d;
            st.set_joints(&q);
            energy(&st)
        };
        let ((tp, up), (tm, um)) = (bend(h), bend(-h));
        out[idx::JOINTS + j] += -(tp - tm) / (2.0 * h) + (up - um) / (2.0 * h);
    }
    out
}

#[test]
fn bias_matches_lagrangian_finite_differences() {
    let p = params();
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for _ in 0..50 {
        let s = random_state(&mut rng, 4.0);
        let h = bias_vector(&s, &p);
        let oracle = lagrangian_bias(&s, &p);
        assert!((h - oracle).norm() <= 1e-6 * oracle.norm(), "{}", (h - oracle).norm() / oracle.norm());
    }
}

#[test]
fn equilibrium_forcing_gives_zero_acceleration() {
    let p = params();
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    let s = random_state(&mut rng, 2.0);
    let eom = EomTerms::at(&s, &p);
    let a = eom.forward(&eom.bias).unwrap();
    assert!(a.norm() < 1e-12);
}

#[test]
fn free_fall_centre_of_mass_accelerates_at_g() {
    let p = params();
    let mut rng = ChaCha8Rng::seed_from_u64(27);
    for _ in 0..20 {
        let s = random_state(&mut rng, 3.0);
        let kin = velocity_jacobians(&s, &p);
        let qdd = EomTerms::new(&kin, &p).forward(&QdVector::zeros()).unwrap();
        let acc: Vector3<f64> =
            kin.bodies(&p).iter().map(|(b, m, _)| (b.jv * qdd + b.accel_bias) * *m).sum::<Vector3<f64>>()
                / p.total_mass();
        assert!((acc - Vector3::new(0.0, 0.0, -p.gravity)).norm() < 1e-9, "{acc}");
    }
}

#[test]
fn forward_dynamics_residual() {
    let p = params();
    let mut rng = ChaCha8Rng::seed_from_u64(28);
    for _ in 0..50 {
        let s = random_state(&mut rng, 3.0);
        let u = QdVector::from_fn(|i, _| ((i * 7 % 5) as f64 - 2.0) * 1e-3);
        let eom = EomTerms::at(&s, &p);
        let a = forward_dynamics(&s, &p, &u).unwrap();
        let r = eom.mass * a + eom.bias - u;
        assert!(r.norm() < 1e-10, "{}", r.norm());
    }
}

#[test]
fn constraint_is_met_and_equations_hold() {
    let p = params();
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for _ in 0..100 {
        let s = random_state(&mut rng, 3.0);
        let u = QdVector::from_fn(|i, _| (i as f64 - 6.0) * 1e-4);
        let c = ConstraintSpec { theta_ddot: JointVector::from_fn(|i, _| (i as f64 - 3.5) * 40.0) };
        let eom = EomTerms::at(&s, &p);
        let (lambda, a) = lagrange_multiplier(&s, &p, &u, &c).unwrap();
        let jc = constraint_jacobian();
        assert!((jc * a - c.theta_ddot).norm() < 1e-9);
        let r = eom.mass * a + eom.bias - u - jc.transpose() * lambda;
        assert!(r.norm() < 1e-9, "{}", r.norm());
    }
}

#[test]
fn inactive_constraint_has_zero_multiplier() {
    let p = params();
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    let s = random_state(&mut rng, 3.0);
    let eom = EomTerms::at(&s, &p);
    let u = QdVector::zeros();
    let free = eom.forward(&u).unwrap();
    let c = ConstraintSpec { theta_ddot: free.fixed_rows::<NJ>(idx::JOINTS).into_owned() };
    let (lambda, a) = eom.constrained(&u, &c).unwrap();
    assert!(lambda.norm() < 1e-12, "{}", lambda.norm());
    assert!((a - free).norm() < 1e-9 * free.norm());
}

#[test]
fn motor_torque_is_absorbed_by_constraint() {
    let p = params();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let s = random_state(&mut rng, 3.0);
    let eom = EomTerms::at(&s, &p);
    let c = ConstraintSpec { theta_ddot: JointVector::from_fn(|i, _| i as f64) };
    let (_, a0) = eom.constrained(&QdVector::zeros(), &c).unwrap();
    let u_m = JointVector::from_fn(|i, _| 0.01 * (i as f64 + 1.0));
    let (_, a1) = eom.constrained(&motor_forces(&u_m), &c).unwrap();
    assert!((a0 - a1).norm() <= 1e-10 * a0.norm());
    assert_eq!(motor_input_map() * u_m, motor_forces(&u_m));
}

#[test]
fn block_solve_matches_schur_complement_formula() {
    let p = params();
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for _ in 0..100 {
        let s = random_state(&mut rng, 3.0);
        let eom = EomTerms::at(&s, &p);
        let u = QdVector::from_fn(|i, _| 0.01 * (i as f64 - 6.0));
        let c = ConstraintSpec { theta_ddot: JointVector::from_fn(|i, _| 50.0 * (i as f64 - 3.5)) };
        let (lambda, qdd) = eom.constrained(&u, &c).unwrap();

        let minv = eom.mass.try_inverse().unwrap();
        let jc = constraint_jacobian();
        let schur = jc * minv * jc.transpose();
        let free = minv * (u - eom.bias);
        let lambda_ref = schur.try_inverse().unwrap() * (c.theta_ddot - jc * free);
        let qdd_ref = free + minv * jc.transpose() * lambda_ref;
        assert!((lambda - lambda_ref).norm() < 1e-8 * lambda_ref.norm().max(1e-3));
        assert!((qdd - qdd_ref).norm() < 1e-8 * qdd_ref.norm());
    }
}
