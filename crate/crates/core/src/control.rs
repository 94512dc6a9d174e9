//! Joint-space Slotine-Li control and the task-space inverse-kinematics
//! torque controller.
//!
//! The task-space law is
//! `tau = H thdd_r + C thd_r + g - K J^-1 [s_p; s_q]`
//! with the reference joint velocity solved from
//! `J thd_r = [v_d - sigma p_e; angular reference]`. The angular block
//! depends on the mode:
//!
//! - `TaskLocal`:      `R_e^T w_d - 2 lambda sgn(q_e_w) vec(q_e)`,
//! - `TaskGlobal`:     `w_d - 2 lambda sgn(q_e_w) R_d vec(q_e)`,
//! - `TaskNaiveNoSgn`: `TaskLocal` with the sign factor pinned to `+1`.
//!
//! The naive variant exists only as an unwinding baseline: without the
//! sign it distinguishes `q_d` from `-q_d` and will rotate the long way.
//!
//! `thdd_r` is a backward difference of successive `thd_r` values; the
//! resulting error enters only the feedforward term and is absorbed by
//! the `-K s` feedback.

use alloc::vec::Vec;

use crate::dynamics::{condition_number, EndEffectorState, JointState, ManipulatorModel};
use crate::quat::{sgn_modified, UnitQuat};
use crate::sliding::{
    error_quaternion, omega_error_local, s_p, s_q_global, s_q_local, AngularFrame,
    SlidingVariables,
};
use crate::trajectory::TaskReference;
use crate::{Error, Mat6, Vec3, Vec6};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlMode {
    JointSpace,
    TaskLocal,
    TaskGlobal,
    TaskNaiveNoSgn,
}

impl ControlMode {
    pub fn angular_frame(&self) -> AngularFrame {
        match self {
            ControlMode::TaskGlobal => AngularFrame::Global,
            _ => AngularFrame::Local,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControllerConfig {
    pub mode: ControlMode,
    pub lambda: f64,
    pub sigma: f64,
    /// Symmetric positive definite feedback gain on the sliding variable.
    pub k_gain: Mat6,
    /// Condition-number threshold above which the controller aborts.
    pub cond_abort: f64,
}

impl ControllerConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.lambda > 0.0) {
            return Err(Error::InvalidParameter("lambda must be > 0"));
        }
        if !(self.sigma > 0.0) {
            return Err(Error::InvalidParameter("sigma must be > 0"));
        }
        if (self.k_gain - self.k_gain.transpose()).abs().max() > 1e-9 {
            return Err(Error::InvalidParameter("K must be symmetric"));
        }
        if self.k_gain.cholesky().is_none() {
            return Err(Error::InvalidParameter("K must be positive definite"));
        }
        if !(self.cond_abort > 1.0) {
            return Err(Error::InvalidParameter("cond_abort must be > 1"));
        }
        Ok(())
    }

    /// Default gain: diagonal 20 N m s, scaled per joint by the inertia
    /// diagonal at a reference configuration so the s-dynamics are
    /// uniformly fast relative to lambda and sigma.
    pub fn default_k_gain(model: &ManipulatorModel, theta: &Vec6) -> Mat6 {
        let h = model.mass_matrix(theta);
        let href = h.diagonal().max();
        let mut k = Mat6::zeros();
        for i in 0..6 {
            k[(i, i)] = 20.0 * (h[(i, i)] / href).max(0.05);
        }
        k
    }
}

/// Reference joint velocity and its numerically differentiated rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceVelocity {
    pub theta_dot_r: Vec6,
    pub theta_ddot_r: Vec6,
}

/// Everything one task-space control step produces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlOutput {
    pub tau: Vec6,
    pub sliding: SlidingVariables,
    pub reference: ReferenceVelocity,
    pub q_e: UnitQuat,
    pub cond_j: f64,
}

/// Joint-space Slotine-Li sliding controller:
/// `tau = H thdd_r + C thd_r + g - K s` with
/// `thd_r = thd_d - lambda (th - th_d)`, `s = thd - thd_r`.
pub fn slotine_li_joint(
    model: &ManipulatorModel,
    state: &JointState,
    theta_d: &Vec6,
    theta_dot_d: &Vec6,
    theta_ddot_d: &Vec6,
    cfg: &ControllerConfig,
) -> Vec6 {
    let theta_dot_r = theta_dot_d - cfg.lambda * (state.theta - theta_d);
    let theta_ddot_r = theta_ddot_d - cfg.lambda * (state.theta_dot - theta_dot_d);
    let s = state.theta_dot - theta_dot_r;
    // rnea(th, 0, thdd_r) = H thdd_r + g
    let h_term = model.rnea(&state.theta, &Vec6::zeros(), &theta_ddot_r);
    let c_term = model.coriolis_times(&state.theta, &state.theta_dot, &theta_dot_r);
    h_term + c_term - cfg.k_gain * s
}

/// Stacked task-space reference twist whose solve gives `thd_r`.
fn reference_twist(
    task_ref: &TaskReference,
    q_e: &UnitQuat,
    p_e: Vec3,
    cfg: &ControllerConfig,
) -> Vec6 {
    let lin = task_ref.v_d - cfg.sigma * p_e;
    let sign = match cfg.mode {
        ControlMode::TaskNaiveNoSgn => 1.0,
        _ => sgn_modified(q_e.scalar()),
    };
    let ang = match cfg.mode {
        ControlMode::TaskGlobal => {
            let r_d = task_ref.q_d.to_rotation_matrix();
            task_ref.omega_d_global() - 2.0 * cfg.lambda * sign * (r_d * q_e.vector())
        }
        _ => {
            let r_e = q_e.to_rotation_matrix();
            r_e.transpose() * task_ref.omega_d_local() - 2.0 * cfg.lambda * sign * q_e.vector()
        }
    };
    let mut u = Vec6::zeros();
    u.fixed_rows_mut::<3>(0).copy_from(&lin);
    u.fixed_rows_mut::<3>(3).copy_from(&ang);
    u
}

/// Mode-matched Jacobian: angular rows local except for `TaskGlobal`.
fn mode_jacobian(model: &ManipulatorModel, theta: &Vec6, mode: ControlMode) -> Mat6 {
    match mode {
        ControlMode::TaskGlobal => model.geometric_jacobian_world(theta),
        _ => model.geometric_jacobian(theta),
    }
}

/// Reference joint velocity `thd_r = J^-1 [v_d - sigma p_e; ang ref]`.
pub fn theta_dot_r_task(
    model: &ManipulatorModel,
    theta: &Vec6,
    task_ref: &TaskReference,
    ee: &EndEffectorState,
    cfg: &ControllerConfig,
) -> Result<Vec6, Error> {
    let j = mode_jacobian(model, theta, cfg.mode);
    let cond = condition_number(&j);
    if cond > cfg.cond_abort {
        return Err(Error::SingularJacobian { condition: cond });
    }
    let q_e = error_quaternion(&task_ref.q_d, &ee.q);
    let u = reference_twist(task_ref, &q_e, ee.p - task_ref.p_d, cfg);
    solve_checked(&j, &u)
}

/// Factorized solve with a residual check; no explicit inverse.
fn solve_checked(j: &Mat6, rhs: &Vec6) -> Result<Vec6, Error> {
    let lu = j.lu();
    let x = lu
        .solve(rhs)
        .ok_or(Error::SingularJacobian { condition: f64::INFINITY })?;
    let residual = (j * x - rhs).norm();
    let scale = rhs.norm().max(1.0);
    if !(residual <= 1e-8 * scale) {
        return Err(Error::SingularJacobian {
            condition: condition_number(j),
        });
    }
    Ok(x)
}

/// Backward-difference reference acceleration; zero on the first step.
pub fn theta_ddot_r_numeric(prev: Option<&Vec6>, current: &Vec6, dt: f64) -> Vec6 {
    match prev {
        Some(p) => (current - p) / dt,
        None => Vec6::zeros(),
    }
}

/// One step of the task-space inverse-kinematics torque controller.
///
/// `ee` supplies the measured pose; the twist used internally is
/// recomputed from the mode-matched Jacobian so the logged identity
/// `J (thd - thd_r) = [s_p; s_q]` holds exactly up to solve residuals.
pub fn ik_torque(
    model: &ManipulatorModel,
    state: &JointState,
    ee: &EndEffectorState,
    task_ref: &TaskReference,
    cfg: &ControllerConfig,
    prev_theta_dot_r: Option<&Vec6>,
    dt: f64,
) -> Result<ControlOutput, Error> {
    let j = mode_jacobian(model, &state.theta, cfg.mode);
    let cond = condition_number(&j);
    if cond > cfg.cond_abort {
        return Err(Error::SingularJacobian { condition: cond });
    }

    let q_e = error_quaternion(&task_ref.q_d, &ee.q);
    let p_e = ee.p - task_ref.p_d;
    let u = reference_twist(task_ref, &q_e, p_e, cfg);
    let lu = j.lu();
    let theta_dot_r = lu
        .solve(&u)
        .ok_or(Error::SingularJacobian { condition: cond })?;
    let theta_ddot_r = theta_ddot_r_numeric(prev_theta_dot_r, &theta_dot_r, dt);

    // actual twist in the mode frame
    let twist = j * state.theta_dot;
    let v = twist.fixed_rows::<3>(0).into_owned();
    let omega = twist.fixed_rows::<3>(3).into_owned();

    let s_pos = s_p(p_e, v - task_ref.v_d, cfg.sigma);
    let s_ang = match cfg.mode {
        ControlMode::TaskGlobal => {
            let r_d = task_ref.q_d.to_rotation_matrix();
            s_q_global(&q_e, omega - task_ref.omega_d_global(), &r_d, cfg.lambda)
        }
        ControlMode::TaskNaiveNoSgn => {
            let r_e = q_e.to_rotation_matrix();
            let omega_e = omega_error_local(omega, task_ref.omega_d_local(), &r_e);
            omega_e + 2.0 * cfg.lambda * q_e.vector()
        }
        _ => {
            let r_e = q_e.to_rotation_matrix();
            let omega_e = omega_error_local(omega, task_ref.omega_d_local(), &r_e);
            s_q_local(&q_e, omega_e, cfg.lambda)
        }
    };
    let mut s_stacked = Vec6::zeros();
    s_stacked.fixed_rows_mut::<3>(0).copy_from(&s_pos);
    s_stacked.fixed_rows_mut::<3>(3).copy_from(&s_ang);

    // tau = H thdd_r + C thd_r + g - K J^-1 [s_p; s_q]
    let s_theta = lu
        .solve(&s_stacked)
        .ok_or(Error::SingularJacobian { condition: cond })?;
    let h_term = model.rnea(&state.theta, &Vec6::zeros(), &theta_ddot_r);
    let c_term = model.coriolis_times(&state.theta, &state.theta_dot, &theta_dot_r);
    let tau = h_term + c_term - cfg.k_gain * s_theta;

    if !tau.iter().all(|x| x.is_finite()) {
        return Err(Error::NumericalDivergence { t: f64::NAN });
    }

    Ok(ControlOutput {
        tau,
        sliding: SlidingVariables {
            s_p: s_pos,
            s_q: s_ang,
            frame: cfg.mode.angular_frame(),
        },
        reference: ReferenceVelocity {
            theta_dot_r,
            theta_ddot_r,
        },
        q_e,
        cond_j: cond,
    })
}

/// Summary statistics of a rotation trace for the unwinding comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnwindingMetrics {
    /// Integrated rotation `int ||w|| dt` (trapezoidal), in rad.
    pub path_length: f64,
    /// Sign of `<q(T), q_d(T)>`: which cover the controller settled on.
    pub final_sign: f64,
}

/// Path length and final cover from a trace of `(t, omega)` samples plus
/// the final actual and desired orientations.
pub fn unwinding_metrics(
    omega_trace: &[(f64, Vec3)],
    q_final: &UnitQuat,
    q_d_final: &UnitQuat,
) -> UnwindingMetrics {
    let mut path_length = 0.0;
    for pair in omega_trace.windows(2) {
        let (t0, w0) = pair[0];
        let (t1, w1) = pair[1];
        path_length += 0.5 * (w0.norm() + w1.norm()) * (t1 - t0);
    }
    UnwindingMetrics {
        path_length,
        final_sign: sgn_modified(q_final.dot(q_d_final)),
    }
}

/// Convenience: extract the `(t, omega)` trace needed by
/// [`unwinding_metrics`] from logged joint states.
pub fn omega_trace(
    model: &ManipulatorModel,
    samples: &[(f64, JointState)],
) -> Vec<(f64, Vec3)> {
    samples
        .iter()
        .map(|(t, s)| {
            let twist = model.geometric_jacobian(&s.theta) * s.theta_dot;
            (*t, twist.fixed_rows::<3>(3).into_owned())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::{Trajectory, TrajectorySpec};
    use approx::assert_relative_eq;

    fn model() -> ManipulatorModel {
        ManipulatorModel::reference()
    }

    fn config(mode: ControlMode) -> ControllerConfig {
        let m = model();
        let ready = ManipulatorModel::reference_ready_state();
        ControllerConfig {
            mode,
            lambda: 2.0,
            sigma: 2.0,
            k_gain: ControllerConfig::default_k_gain(&m, &ready.theta),
            cond_abort: 1e6,
        }
    }

    fn setpoint_at_current(m: &ManipulatorModel, state: &JointState) -> Trajectory {
        let (p, q) = m.forward_kinematics(&state.theta);
        Trajectory::new(
            TrajectorySpec::SetPoint { p, q },
            AngularFrame::Local,
            10.0,
        )
        .unwrap()
    }

    #[test]
    fn slotine_li_equilibrium_is_gravity_compensation() {
        let m = model();
        let cfg = config(ControlMode::JointSpace);
        let state = ManipulatorModel::reference_ready_state();
        let zero = Vec6::zeros();
        let tau = slotine_li_joint(&m, &state, &state.theta, &zero, &zero, &cfg);
        let g = m.gravity_vector(&state.theta);
        assert_relative_eq!(tau, g, epsilon = 1e-9);
    }

    #[test]
    fn slotine_li_zero_gain_is_pure_feedforward() {
        let m = model();
        let mut cfg = config(ControlMode::JointSpace);
        cfg.k_gain = Mat6::zeros();
        let theta_d = Vec6::from_column_slice(&[0.3, -0.6, 0.9, 0.4, 1.1, -0.2]);
        let thd_d = Vec6::from_column_slice(&[0.2, 0.1, -0.3, 0.0, 0.4, -0.1]);
        let thdd_d = Vec6::from_column_slice(&[0.5, -0.2, 0.1, 0.3, 0.0, 0.2]);
        // on-manifold state: s = 0 means thd = thd_r
        let theta = theta_d + Vec6::from_column_slice(&[0.1, 0.0, -0.05, 0.02, 0.0, 0.03]);
        let thd_r = thd_d - cfg.lambda * (theta - theta_d);
        let state = JointState {
            theta,
            theta_dot: thd_r,
        };
        let tau = slotine_li_joint(&m, &state, &theta_d, &thd_d, &thdd_d, &cfg);
        let thdd_r = thdd_d - cfg.lambda * (state.theta_dot - thd_d);
        let expect = m.rnea(&theta, &Vec6::zeros(), &thdd_r)
            + m.coriolis_times(&theta, &state.theta_dot, &thd_r);
        assert_relative_eq!(tau, expect, epsilon = 1e-12);
    }

    #[test]
    fn theta_dot_r_zero_at_zero_error_stationary_reference() {
        let m = model();
        let state = ManipulatorModel::reference_ready_state();
        let traj = setpoint_at_current(&m, &state);
        let task_ref = traj.sample(0.0).unwrap();
        let ee = m.end_effector_state(&state);
        for mode in [
            ControlMode::TaskLocal,
            ControlMode::TaskGlobal,
            ControlMode::TaskNaiveNoSgn,
        ] {
            let thd_r = theta_dot_r_task(&m, &state.theta, &task_ref, &ee, &config(mode)).unwrap();
            assert!(thd_r.norm() < 1e-9, "{mode:?}: {thd_r}");
        }
    }

    #[test]
    fn theta_dot_r_solve_residual() {
        let m = model();
        let cfg = config(ControlMode::TaskLocal);
        let state = ManipulatorModel::reference_ready_state();
        let (p, q) = m.forward_kinematics(&state.theta);
        let q_d = q
            .hamilton(&UnitQuat::from_axis_angle(Vec3::new(1.0, 0.5, -0.3), 0.8).unwrap());
        let traj = Trajectory::new(
            TrajectorySpec::SetPoint {
                p: p + Vec3::new(0.1, -0.05, 0.08),
                q: q_d,
            },
            AngularFrame::Local,
            10.0,
        )
        .unwrap();
        let task_ref = traj.sample(0.0).unwrap();
        let ee = m.end_effector_state(&state);
        let thd_r = theta_dot_r_task(&m, &state.theta, &task_ref, &ee, &cfg).unwrap();
        let j = m.geometric_jacobian(&state.theta);
        let q_e = error_quaternion(&task_ref.q_d, &ee.q);
        let u = reference_twist(&task_ref, &q_e, ee.p - task_ref.p_d, &cfg);
        assert!((j * thd_r - u).norm() < 1e-10);
    }

    #[test]
    fn local_and_global_agree_at_zero_orientation_error() {
        let m = model();
        let state = ManipulatorModel::reference_ready_state();
        let (p, q) = m.forward_kinematics(&state.theta);
        // q = q_d and the same physical omega_d expressed per frame:
        // omega_d_global = R_d omega_d_local
        let omega_d = Vec3::new(0.2, -0.4, 0.3);
        let ee = m.end_effector_state(&state);
        let mk_ref = |frame, omega: Vec3| {
            let traj = Trajectory::new(
                TrajectorySpec::GeodesicSlew {
                    p,
                    q0: q,
                    axis: omega.normalize(),
                    total_rotation: omega.norm() * 10.0,
                },
                frame,
                10.0,
            )
            .unwrap();
            traj.sample(0.0).unwrap()
        };
        let local = theta_dot_r_task(
            &m,
            &state.theta,
            &mk_ref(AngularFrame::Local, omega_d),
            &ee,
            &config(ControlMode::TaskLocal),
        )
        .unwrap();
        let global = theta_dot_r_task(
            &m,
            &state.theta,
            &mk_ref(AngularFrame::Global, q.rotate(omega_d)),
            &ee,
            &config(ControlMode::TaskGlobal),
        )
        .unwrap();
        assert_relative_eq!(local, global, epsilon = 1e-9);
    }

    #[test]
    fn theta_ddot_r_numeric_cases() {
        let dt = 1e-3;
        let u = Vec6::from_column_slice(&[1.0, -2.0, 0.5, 0.1, 0.0, 3.0]);
        assert_eq!(theta_ddot_r_numeric(None, &u, dt), Vec6::zeros());
        assert_eq!(theta_ddot_r_numeric(Some(&u), &u, dt), Vec6::zeros());
        // linear ramp thd_r = t u: exact
        let prev = u * 1.0;
        let cur = u * (1.0 + dt);
        let d = theta_ddot_r_numeric(Some(&prev), &cur, dt);
        assert_relative_eq!(d, u, epsilon = 1e-10);
    }

    #[test]
    fn theta_ddot_r_sinusoid_taylor_bound() {
        let dt = 1e-3;
        let f = 1.0; // Hz
        let w = 2.0 * core::f64::consts::PI * f;
        let mut max_err = 0.0f64;
        for k in 1..1000 {
            let t = k as f64 * dt;
            let cur = Vec6::repeat((w * t).sin());
            let prev = Vec6::repeat((w * (t - dt)).sin());
            let d = theta_ddot_r_numeric(Some(&prev), &cur, dt);
            let exact = w * (w * t).cos();
            max_err = max_err.max((d[0] - exact).abs());
        }
        // backward difference error <= w^2 dt / 2 ~ 0.02
        assert!(max_err <= 2.0 * core::f64::consts::PI.powi(2) * dt * 10.0);
        assert!(max_err <= 0.02);
    }

    #[test]
    fn ik_torque_perfect_tracking_is_gravity_compensation() {
        let m = model();
        let state = ManipulatorModel::reference_ready_state();
        let traj = setpoint_at_current(&m, &state);
        let task_ref = traj.sample(0.0).unwrap();
        let ee = m.end_effector_state(&state);
        for mode in [ControlMode::TaskLocal, ControlMode::TaskGlobal] {
            let out = ik_torque(&m, &state, &ee, &task_ref, &config(mode), None, 1e-3).unwrap();
            let g = m.gravity_vector(&state.theta);
            assert_relative_eq!(out.tau, g, epsilon = 1e-8);
            assert!(out.sliding.s_p.norm() < 1e-10);
            assert!(out.sliding.s_q.norm() < 1e-10);
        }
    }

    #[test]
    fn sliding_identity_matches_jacobian_times_velocity_error() {
        let m = model();
        let mut state = ManipulatorModel::reference_ready_state();
        state.theta_dot = Vec6::from_column_slice(&[0.3, -0.2, 0.5, -0.1, 0.4, 0.2]);
        let (p, q) = m.forward_kinematics(&state.theta);
        let q_d = q
            .hamilton(&UnitQuat::from_axis_angle(Vec3::new(-0.2, 1.0, 0.4), 1.3).unwrap());
        let traj = Trajectory::new(
            TrajectorySpec::SetPoint {
                p: p + Vec3::new(-0.08, 0.12, 0.05),
                q: q_d,
            },
            AngularFrame::Local,
            10.0,
        )
        .unwrap();
        let task_ref = traj.sample(0.0).unwrap();
        let ee = m.end_effector_state(&state);
        for mode in [
            ControlMode::TaskLocal,
            ControlMode::TaskGlobal,
            ControlMode::TaskNaiveNoSgn,
        ] {
            let cfg = config(mode);
            let out = ik_torque(&m, &state, &ee, &task_ref, &cfg, None, 1e-3).unwrap();
            let j = mode_jacobian(&m, &state.theta, mode);
            let lhs = j * (state.theta_dot - out.reference.theta_dot_r);
            let mut s = Vec6::zeros();
            s.fixed_rows_mut::<3>(0).copy_from(&out.sliding.s_p);
            s.fixed_rows_mut::<3>(3).copy_from(&out.sliding.s_q);
            assert!((lhs - s).norm() < 1e-9, "{mode:?}: {}", (lhs - s).norm());
        }
    }

    #[test]
    fn double_cover_invariance_of_torque() {
        let m = model();
        let mut state = ManipulatorModel::reference_ready_state();
        state.theta_dot = Vec6::from_column_slice(&[0.3, -0.2, 0.5, -0.1, 0.4, 0.2]);
        let (p, q) = m.forward_kinematics(&state.theta);
        let q_d = q
            .hamilton(&UnitQuat::from_axis_angle(Vec3::new(0.6, -0.1, 0.9), 2.1).unwrap());
        let traj = Trajectory::new(
            TrajectorySpec::SetPoint {
                p: p + Vec3::new(0.05, 0.05, -0.1),
                q: q_d,
            },
            AngularFrame::Local,
            10.0,
        )
        .unwrap();
        let task_ref = traj.sample(0.0).unwrap();
        let ee = m.end_effector_state(&state);
        let ee_neg = EndEffectorState { q: -ee.q, ..ee };
        for mode in [ControlMode::TaskLocal, ControlMode::TaskGlobal] {
            let cfg = config(mode);
            let a = ik_torque(&m, &state, &ee, &task_ref, &cfg, None, 1e-3).unwrap();
            let b = ik_torque(&m, &state, &ee_neg, &task_ref, &cfg, None, 1e-3).unwrap();
            assert!((a.tau - b.tau).norm() < 1e-9, "{mode:?}");
        }
        // the naive baseline is NOT invariant
        let cfg = config(ControlMode::TaskNaiveNoSgn);
        let a = ik_torque(&m, &state, &ee, &task_ref, &cfg, None, 1e-3).unwrap();
        let b = ik_torque(&m, &state, &ee_neg, &task_ref, &cfg, None, 1e-3).unwrap();
        assert!((a.tau - b.tau).norm() > 1e-3);
    }

    #[test]
    fn singular_jacobian_rejected() {
        let m = model();
        // wrist singularity: theta_5 = 0 aligns joints 4 and 6
        let state = JointState {
            theta: Vec6::from_column_slice(&[0.3, -0.6, 0.9, 0.4, 0.0, -0.2]),
            theta_dot: Vec6::zeros(),
        };
        let traj = setpoint_at_current(&m, &state);
        let task_ref = traj.sample(0.0).unwrap();
        let ee = m.end_effector_state(&state);
        let cfg = config(ControlMode::TaskLocal);
        let out = ik_torque(&m, &state, &ee, &task_ref, &cfg, None, 1e-3);
        assert!(matches!(out, Err(Error::SingularJacobian { .. })));
    }

    #[test]
    fn unwinding_metrics_hand_values() {
        let q = UnitQuat::identity();
        let stationary = [(0.0, Vec3::zeros()), (1.0, Vec3::zeros())];
        let m = unwinding_metrics(&stationary, &q, &q);
        assert_eq!(m.path_length, 0.0);
        assert_eq!(m.final_sign, 1.0);

        let constant: Vec<_> = (0..=200).map(|k| (k as f64 * 0.01, Vec3::z())).collect();
        let m = unwinding_metrics(&constant, &q, &(-q));
        assert_relative_eq!(m.path_length, 2.0, epsilon = 1e-9);
        assert_eq!(m.final_sign, -1.0);
    }
}
