//! Error quaternions and sliding variables.
//!
//! The error quaternion is `q_e = q_d* (x) q`. Two quaternion sliding
//! variables are provided, one per angular-velocity convention:
//!
//! - local frame:  `s_q = w_e + 2 lambda sgn(q_e_w) vec(q_e)` with
//!   `w_e = w - R_e^T w_d`,
//! - global frame: `s_q = w_e + 2 lambda sgn(q_e_w) R_d vec(q_e)` with
//!   `w_e = w - w_d`.
//!
//! Both are invariant under `q_e -> -q_e`, so feedback built on them
//! cannot unwind. Driving either to zero makes `||vec(q_e)||^2` obey
//! `x' = -2 lambda x sqrt(1 - x)`, whose closed-form solution
//! [`qe_vec_decay_closed_form`] is the quantitative oracle used by the tests.

use alloc::vec::Vec;
use nalgebra::Vector4;

use crate::integrate::rk4_step;
use crate::quat::{sgn_modified, Quat, UnitQuat};
use crate::{Error, Mat3, Vec3};

/// Convergence-rate gains: `lambda` for orientation, `sigma` for position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gains {
    pub lambda: f64,
    pub sigma: f64,
}

impl Gains {
    pub fn new(lambda: f64, sigma: f64) -> Result<Self, Error> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidParameter("lambda must be > 0"));
        }
        if !(sigma > 0.0) {
            return Err(Error::InvalidParameter("sigma must be > 0"));
        }
        Ok(Self { lambda, sigma })
    }
}

/// Which frame the angular block of a sliding variable lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngularFrame {
    Local,
    Global,
}

/// Stacked sliding-variable values for one control step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlidingVariables {
    pub s_p: Vec3,
    pub s_q: Vec3,
    pub frame: AngularFrame,
}

/// Orientation error `q_e = q_d* (x) q` together with its rotation matrix
/// and the frame-consistent angular velocity error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientationError {
    pub q_e: UnitQuat,
    pub r_e: Mat3,
    pub omega_e: Vec3,
}

/// Position tracking error `p_e = p - p_d`, `v_e = v - v_d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionError {
    pub p_e: Vec3,
    pub v_e: Vec3,
}

/// `q_e = q_d* (x) q`.
pub fn error_quaternion(q_d: &UnitQuat, q: &UnitQuat) -> UnitQuat {
    q_d.conjugate().hamilton(q)
}

/// Local-frame angular velocity error `w_e = w - R_e^T w_d`.
///
/// `w_d` lives in the desired frame and `w` in the actual end-effector
/// frame; `R_e^T` transports `w_d` so the difference is meaningful.
pub fn omega_error_local(omega: Vec3, omega_d: Vec3, r_e: &Mat3) -> Vec3 {
    omega - r_e.transpose() * omega_d
}

/// Local-frame quaternion sliding variable.
pub fn s_q_local(q_e: &UnitQuat, omega_e: Vec3, lambda: f64) -> Vec3 {
    omega_e + 2.0 * lambda * sgn_modified(q_e.scalar()) * q_e.vector()
}

/// Global-frame quaternion sliding variable; here `omega_e = w - w_d`
/// with both in the inertial frame, and `R_d` is formed from `q_d`.
pub fn s_q_global(q_e: &UnitQuat, omega_e: Vec3, r_d: &Mat3, lambda: f64) -> Vec3 {
    omega_e + 2.0 * lambda * sgn_modified(q_e.scalar()) * (r_d * q_e.vector())
}

/// Position sliding variable `s_p = v_e + sigma p_e`.
pub fn s_p(p_e: Vec3, v_e: Vec3, sigma: f64) -> Vec3 {
    v_e + sigma * p_e
}

/// Closed-form solution of `x' = -sigma x sqrt(1 - x)` on `[0, 1)`:
/// `x(t) = 4 c e^{-sigma t} / (1 + c e^{-sigma t})^2` with
/// `c = (1 - sqrt(1 - x0)) / (1 + sqrt(1 - x0))`.
pub fn qe_vec_decay_closed_form(x0: f64, sigma: f64, t: f64) -> Result<f64, Error> {
    if !(0.0..1.0).contains(&x0) {
        return Err(Error::DomainError {
            value: x0,
            min: 0.0,
            max: 1.0,
        });
    }
    let root = libm::sqrt(1.0 - x0);
    let c = (1.0 - root) / (1.0 + root);
    let e = c * libm::exp(-sigma * t);
    Ok(4.0 * e / ((1.0 + e) * (1.0 + e)))
}

fn quat_to_state(q: &Quat) -> Vector4<f64> {
    Vector4::new(q.w, q.x, q.y, q.z)
}

fn state_to_quat(y: &Vector4<f64>) -> Quat {
    Quat::new(y[0], y[1], y[2], y[3])
}

fn flow_on_manifold<F>(
    q_e0: UnitQuat,
    dt: f64,
    t_final: f64,
    deriv: F,
) -> Result<Vec<(f64, UnitQuat)>, Error>
where
    F: Fn(&Quat) -> Quat,
{
    if !(dt > 0.0) || !(t_final > dt) {
        return Err(Error::InvalidParameter("need dt > 0 and T > dt"));
    }
    let steps = libm::round(t_final / dt) as usize;
    let mut out = Vec::with_capacity(steps + 1);
    out.push((0.0, q_e0));
    let mut q = q_e0;
    for k in 0..steps {
        let y = quat_to_state(q.as_quat());
        let y_next = rk4_step(&y, dt, |y| quat_to_state(&deriv(&state_to_quat(y))));
        let raw = state_to_quat(&y_next);
        let t = (k + 1) as f64 * dt;
        if !raw.is_finite() {
            return Err(Error::NumericalDivergence { t });
        }
        q = raw
            .normalize()
            .map_err(|_| Error::NumericalDivergence { t })?;
        out.push((t, q));
    }
    Ok(out)
}

/// Integrate the closed-loop error kinematics on the local-frame sliding
/// manifold `s_q = 0`, i.e. `w_e = -2 lambda sgn(q_e_w) vec(q_e)` fed into
/// `q_e' = 1/2 q_e (x) (0, w_e)`. RK4 stages run on the raw flow; the
/// quaternion is renormalized once per step. Samples at every step.
pub fn qe_flow_on_manifold(
    q_e0: UnitQuat,
    lambda: f64,
    dt: f64,
    t_final: f64,
) -> Result<Vec<(f64, UnitQuat)>, Error> {
    flow_on_manifold(q_e0, dt, t_final, |q| {
        let omega_e = -2.0 * lambda * sgn_modified(q.w) * q.vector();
        (q.hamilton(&Quat::pure(omega_e))) * 0.5
    })
}

/// Global-frame counterpart: on `s_q_global = 0`,
/// `w_tilde = R_d^T (w - w_d) = -2 lambda sgn(q_e_w) vec(q_e)` fed into
/// `q_e' = 1/2 (0, w_tilde) (x) q_e`.
pub fn qe_flow_on_manifold_global(
    q_e0: UnitQuat,
    lambda: f64,
    dt: f64,
    t_final: f64,
) -> Result<Vec<(f64, UnitQuat)>, Error> {
    flow_on_manifold(q_e0, dt, t_final, |q| {
        let omega_tilde = -2.0 * lambda * sgn_modified(q.w) * q.vector();
        (Quat::pure(omega_tilde).hamilton(q)) * 0.5
    })
}
