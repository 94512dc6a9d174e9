//! Closed-loop simulations of the controllers against the full rigid-body
//! dynamics: exponential convergence at the commanded rates, the sliding
//! identity, and the unwinding comparison.

use manip_core::control::{
    ik_torque, slotine_li_joint, unwinding_metrics, ControlMode, ControllerConfig,
};
use manip_core::dynamics::{JointState, ManipulatorModel};
use manip_core::integrate::rk4_joint_step;
use manip_core::quat::UnitQuat;
use manip_core::sliding::{error_quaternion, AngularFrame};
use manip_core::trajectory::{Trajectory, TrajectorySpec};
use manip_core::{Vec3, Vec6};

fn config(mode: ControlMode, lambda: f64, sigma: f64) -> ControllerConfig {
    let m = ManipulatorModel::reference();
    let ready = ManipulatorModel::reference_ready_state();
    ControllerConfig {
        mode,
        lambda,
        sigma,
        k_gain: ControllerConfig::default_k_gain(&m, &ready.theta),
        cond_abort: 1e6,
    }
}

/// Least-squares slope of `ln e(t)` over the window
/// `lo < e < hi, t >= t_min`; returns the decay rate (positive).
/// `lo` is raised above the discretization plateau, estimated from the
/// trailing fifth of the trace, so the fit sees only the decay segment.
fn fit_decay_rate(samples: &[(f64, f64)], lo: f64, hi: f64, t_min: f64) -> Option<f64> {
    let tail = &samples[samples.len() - samples.len() / 5..];
    let plateau = tail.iter().fold(0.0f64, |m, (_, e)| m.max(*e));
    let lo = lo.max(3.0 * plateau);
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(t, e)| *t >= t_min && *e > lo && *e < hi)
        .map(|(t, e)| (*t, e.ln()))
        .collect();
    if pts.len() < 10 {
        return None;
    }
    let n = pts.len() as f64;
    let (st, se): (f64, f64) = pts.iter().fold((0.0, 0.0), |(a, b), (t, e)| (a + t, b + e));
    let (mt, me) = (st / n, se / n);
    let mut num = 0.0;
    let mut den = 0.0;
    for (t, e) in &pts {
        num += (t - mt) * (e - me);
        den += (t - mt) * (t - mt);
    }
    Some(-num / den)
}

#[test]
fn slotine_li_tracks_at_rate_lambda() {
    let m = ManipulatorModel::reference();
    let lambda = 2.0;
    let cfg = config(ControlMode::JointSpace, lambda, 2.0);
    let theta_d = Vec6::from_column_slice(&[0.3, -0.6, 0.9, 0.4, 1.1, -0.2]);
    let zero = Vec6::zeros();
    let mut state = JointState {
        theta: theta_d + Vec6::from_column_slice(&[0.5, -0.3, 0.4, -0.6, 0.3, 0.5]),
        theta_dot: Vec6::zeros(),
    };
    let dt = 1e-3;
    let mut err_trace = Vec::new();
    let mut s_trace = Vec::new();
    for k in 0..6000 {
        let t = k as f64 * dt;
        let tau = slotine_li_joint(&m, &state, &theta_d, &zero, &zero, &cfg);
        let thd_r = -cfg.lambda * (state.theta - theta_d);
        s_trace.push((t, (state.theta_dot - thd_r).norm()));
        err_trace.push((t, (state.theta - theta_d).norm()));
        state = rk4_joint_step(&m, &state, &tau, dt).unwrap();
    }
    // s decays fast, theta error decays at lambda
    let rate = fit_decay_rate(&err_trace, 1e-6, 0.5, 1.0).expect("fit window");
    assert!((rate - lambda).abs() <= 0.1 * lambda, "rate {rate}");
    let s_final = s_trace.last().unwrap().1;
    assert!(s_final < 1e-6, "s did not converge: {s_final}");
}

struct LoopResult {
    p_err: Vec<(f64, f64)>,
    q_err: Vec<(f64, f64)>,
    identity_worst: f64,
    omega_trace: Vec<(f64, Vec3)>,
    final_q: UnitQuat,
    final_q_d: UnitQuat,
}

fn run_loop(
    m: &ManipulatorModel,
    init: JointState,
    traj: &Trajectory,
    cfg: &ControllerConfig,
    duration: f64,
    dt: f64,
) -> LoopResult {
    let mut state = init;
    let mut prev_thd_r: Option<Vec6> = None;
    let mut res = LoopResult {
        p_err: Vec::new(),
        q_err: Vec::new(),
        identity_worst: 0.0,
        omega_trace: Vec::new(),
        final_q: UnitQuat::identity(),
        final_q_d: UnitQuat::identity(),
    };
    let steps = (duration / dt).round() as usize;
    for k in 0..steps {
        let t = k as f64 * dt;
        let reference = traj.sample(t).unwrap();
        let ee = m.end_effector_state(&state);
        let out = ik_torque(m, &state, &ee, &reference, cfg, prev_thd_r.as_ref(), dt).unwrap();

        let q_e = error_quaternion(&reference.q_d, &ee.q);
        res.p_err.push((t, (ee.p - reference.p_d).norm()));
        res.q_err.push((t, q_e.vector().norm()));
        res.omega_trace.push((t, ee.omega));
        res.final_q = ee.q;
        res.final_q_d = reference.q_d;

        // J (thd - thd_r) = [s_p; s_q]
        let j = match cfg.mode {
            ControlMode::TaskGlobal => m.geometric_jacobian_world(&state.theta),
            _ => m.geometric_jacobian(&state.theta),
        };
        let lhs = j * (state.theta_dot - out.reference.theta_dot_r);
        let mut s = Vec6::zeros();
        s.fixed_rows_mut::<3>(0).copy_from(&out.sliding.s_p);
        s.fixed_rows_mut::<3>(3).copy_from(&out.sliding.s_q);
        res.identity_worst = res.identity_worst.max((lhs - s).norm());

        prev_thd_r = Some(out.reference.theta_dot_r);
        state = rk4_joint_step(m, &state, &out.tau, dt).unwrap();
    }
    res
}

fn tracking_trajectory(m: &ManipulatorModel, init: &JointState, frame: AngularFrame) -> Trajectory {
    let (p, q) = m.forward_kinematics(&init.theta);
    // offset start + sinusoid position + slow geodesic slew; parameters
    // chosen per frame so the induced joint path stays well-conditioned
    // (checked against reachability_check, max cond < 40)
    let q0 = q.hamilton(&UnitQuat::from_axis_angle(Vec3::new(0.2, 1.0, -0.4), 1.2).unwrap());
    let (center, amplitude, axis, rate) = match frame {
        AngularFrame::Local => (
            p + Vec3::new(-0.10, 0.12, 0.10),
            Vec3::new(0.03, 0.02, 0.02),
            Vec3::new(0.0, 0.0, 1.0),
            0.12,
        ),
        AngularFrame::Global => (
            p + Vec3::new(-0.15, 0.05, 0.05),
            Vec3::new(0.04, 0.03, 0.03),
            Vec3::new(0.0, 1.0, 0.3),
            0.10,
        ),
    };
    Trajectory::new(
        TrajectorySpec::Sinusoid {
            center,
            amplitude,
            freq_hz: Vec3::new(0.2, 0.15, 0.25),
            q0,
            axis,
            rate,
        },
        frame,
        10.0,
    )
    .unwrap()
}

#[test]
fn task_space_tracking_converges_at_commanded_rates() {
    let m = ManipulatorModel::reference();
    let init = ManipulatorModel::reference_ready_state();
    for (mode, frame) in [
        (ControlMode::TaskLocal, AngularFrame::Local),
        (ControlMode::TaskGlobal, AngularFrame::Global),
    ] {
        let cfg = config(mode, 2.0, 2.0);
        let traj = tracking_trajectory(&m, &init, frame);
        let res = run_loop(&m, init, &traj, &cfg, 8.0, 1e-3);

        assert!(res.identity_worst <= 1e-9, "{mode:?}: identity {}", res.identity_worst);

        let final_p = res.p_err.last().unwrap().1;
        let final_q = res.q_err.last().unwrap().1;
        assert!(final_p <= 1e-3, "{mode:?}: final p err {final_p}");
        assert!(final_q <= 1e-3, "{mode:?}: final q err {final_q}");

        let rate_q = fit_decay_rate(&res.q_err, 1e-6, 0.5, 1.0).expect("q fit");
        assert!((rate_q - 2.0).abs() <= 0.2, "{mode:?}: lambda fit {rate_q}");
        let rate_p = fit_decay_rate(&res.p_err, 1e-6, 0.1, 1.0).expect("p fit");
        assert!((rate_p - 2.0).abs() <= 0.2, "{mode:?}: sigma fit {rate_p}");
    }
}

#[test]
fn near_full_turn_error_takes_the_short_way() {
    let m = ManipulatorModel::reference();
    let init = ManipulatorModel::reference_ready_state();
    let (p, q) = m.forward_kinematics(&init.theta);
    // desired orientation 350 deg away about a fixed axis: the geodesic
    // to -q_d is only 10 deg
    let angle = 350.0_f64.to_radians();
    let axis = Vec3::new(0.0, 0.0, 1.0);
    let q_d = q.hamilton(&UnitQuat::from_axis_angle(axis, angle).unwrap());
    let traj = Trajectory::new(
        TrajectorySpec::SetPoint { p, q: q_d },
        AngularFrame::Local,
        10.0,
    )
    .unwrap();

    let sliding = run_loop(&m, init, &traj, &config(ControlMode::TaskLocal, 2.0, 2.0), 8.0, 1e-3);
    let naive = run_loop(&m, init, &traj, &config(ControlMode::TaskNaiveNoSgn, 2.0, 2.0), 8.0, 1e-3);

    let ms = unwinding_metrics(&sliding.omega_trace, &sliding.final_q, &sliding.final_q_d);
    let mn = unwinding_metrics(&naive.omega_trace, &naive.final_q, &naive.final_q_d);

    assert!(ms.path_length < core::f64::consts::PI, "sliding path {}", ms.path_length);
    assert_eq!(ms.final_sign, -1.0, "sliding should settle on -q_d");
    assert!(mn.path_length > 5.0, "naive path {}", mn.path_length);

    // both still converge in orientation
    assert!(sliding.q_err.last().unwrap().1 < 1e-3);
    assert!(naive.q_err.last().unwrap().1 < 1e-3);
}
