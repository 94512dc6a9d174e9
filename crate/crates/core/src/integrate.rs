//! Fixed-step classical RK4.
//!
//! One stepper serves both the kinematic quaternion flows (state in R^4)
//! and the full joint-space simulation (state in R^12), so step-size
//! behavior is tested once.

use nalgebra::SVector;

use crate::dynamics::{JointState, ManipulatorModel};
use crate::{Error, Vec6};

/// One classical RK4 step of `y' = f(y)` (autonomous form; callers fold
/// time or held inputs into `f`).
pub fn rk4_step<const N: usize, F>(y: &SVector<f64, N>, dt: f64, f: F) -> SVector<f64, N>
where
    F: Fn(&SVector<f64, N>) -> SVector<f64, N>,
{
    let k1 = f(y);
    let k2 = f(&(y + k1 * (0.5 * dt)));
    let k3 = f(&(y + k2 * (0.5 * dt)));
    let k4 = f(&(y + k3 * dt));
    y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
}

/// One RK4 step of the arm dynamics with the torque held constant over
/// the step (zero-order hold).
pub fn rk4_joint_step(
    model: &ManipulatorModel,
    state: &JointState,
    tau: &Vec6,
    dt: f64,
) -> Result<JointState, Error> {
    let mut y = SVector::<f64, 12>::zeros();
    y.fixed_rows_mut::<6>(0).copy_from(&state.theta);
    y.fixed_rows_mut::<6>(6).copy_from(&state.theta_dot);
    let f = |y: &SVector<f64, 12>| {
        let theta = Vec6::from(y.fixed_rows::<6>(0).into_owned());
        let theta_dot = Vec6::from(y.fixed_rows::<6>(6).into_owned());
        let theta_ddot = model.forward_dynamics(&theta, &theta_dot, tau);
        let mut dy = SVector::<f64, 12>::zeros();
        dy.fixed_rows_mut::<6>(0).copy_from(&theta_dot);
        dy.fixed_rows_mut::<6>(6).copy_from(&theta_ddot);
        dy
    };
    let y_next = rk4_step(&y, dt, f);
    if !y_next.iter().all(|v| v.is_finite()) {
        return Err(Error::NumericalDivergence { t: f64::NAN });
    }
    Ok(JointState {
        theta: Vec6::from(y_next.fixed_rows::<6>(0).into_owned()),
        theta_dot: Vec6::from(y_next.fixed_rows::<6>(6).into_owned()),
    })
}
