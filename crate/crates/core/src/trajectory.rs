//! Smooth task-space reference trajectories.
//!
//! Every variant has closed-form derivatives, so the sampled
//! `(p_d, v_d, a_d)` triple and the `(q_d, w_d, alpha_d)` triple are
//! analytically consistent: `v_d = p_d'` and `q_d' = 1/2 q_d (x) (0, w_d)`
//! (local frame) or `1/2 (0, w_d) (x) q_d` (global frame).
//!
//! Rotations are geodesic slews: constant axis, constant rate, which is
//! what keeps `w_d` constant and `alpha_d = 0` in both conventions.

use libm::{cos, sin};

use crate::dynamics::{condition_number, manipulability, ManipulatorModel};
use crate::quat::UnitQuat;
use crate::sliding::AngularFrame;
use crate::{Error, Mat6, Vec3, Vec6};

/// One sample of the desired end-effector trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaskReference {
    pub p_d: Vec3,
    pub v_d: Vec3,
    pub a_d: Vec3,
    pub q_d: UnitQuat,
    /// Desired angular velocity, expressed per `frame`.
    pub omega_d: Vec3,
    pub alpha_d: Vec3,
    pub frame: AngularFrame,
}

impl TaskReference {
    /// `w_d` in the desired-body frame.
    pub fn omega_d_local(&self) -> Vec3 {
        match self.frame {
            AngularFrame::Local => self.omega_d,
            AngularFrame::Global => self.q_d.to_rotation_matrix().transpose() * self.omega_d,
        }
    }

    /// `w_d` in the inertial frame.
    pub fn omega_d_global(&self) -> Vec3 {
        match self.frame {
            AngularFrame::Global => self.omega_d,
            AngularFrame::Local => self.q_d.to_rotation_matrix() * self.omega_d,
        }
    }
}

/// Shape of the desired trajectory.
#[derive(Debug, Clone, PartialEq)]
pub enum TrajectorySpec {
    /// Constant pose.
    SetPoint { p: Vec3, q: UnitQuat },
    /// Componentwise sinusoidal position around `center` combined with a
    /// constant-axis rotation from `q0` at `rate` rad/s.
    Sinusoid {
        center: Vec3,
        amplitude: Vec3,
        freq_hz: Vec3,
        q0: UnitQuat,
        axis: Vec3,
        rate: f64,
    },
    /// Constant position, constant-axis rotation from `q0` covering
    /// `total_rotation` rad over the trajectory duration.
    GeodesicSlew {
        p: Vec3,
        q0: UnitQuat,
        axis: Vec3,
        total_rotation: f64,
    },
}

/// A trajectory spec bound to a duration and an angular-velocity frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub spec: TrajectorySpec,
    pub frame: AngularFrame,
    pub duration: f64,
}

impl Trajectory {
    pub fn new(spec: TrajectorySpec, frame: AngularFrame, duration: f64) -> Result<Self, Error> {
        if !(duration > 0.0) {
            return Err(Error::InvalidParameter("duration must be > 0"));
        }
        match &spec {
            TrajectorySpec::SetPoint { .. } => {}
            TrajectorySpec::Sinusoid { freq_hz, axis, .. } => {
                if freq_hz.iter().any(|f| *f < 0.0) {
                    return Err(Error::InvalidParameter("frequencies must be >= 0"));
                }
                if axis.norm() == 0.0 {
                    return Err(Error::DegenerateAxis);
                }
            }
            TrajectorySpec::GeodesicSlew { axis, .. } => {
                if axis.norm() == 0.0 {
                    return Err(Error::DegenerateAxis);
                }
            }
        }
        Ok(Self {
            spec,
            frame,
            duration,
        })
    }

    /// Sample the reference at time `t` in `[0, duration]`.
    pub fn sample(&self, t: f64) -> Result<TaskReference, Error> {
        if !(0.0..=self.duration).contains(&t) {
            return Err(Error::OutOfRange {
                t,
                duration: self.duration,
            });
        }
        let reference = match &self.spec {
            TrajectorySpec::SetPoint { p, q } => TaskReference {
                p_d: *p,
                v_d: Vec3::zeros(),
                a_d: Vec3::zeros(),
                q_d: *q,
                omega_d: Vec3::zeros(),
                alpha_d: Vec3::zeros(),
                frame: self.frame,
            },
            TrajectorySpec::Sinusoid {
                center,
                amplitude,
                freq_hz,
                q0,
                axis,
                rate,
            } => {
                let tau = core::f64::consts::TAU;
                let mut p = *center;
                let mut v = Vec3::zeros();
                let mut a = Vec3::zeros();
                for i in 0..3 {
                    let w = tau * freq_hz[i];
                    p[i] += amplitude[i] * sin(w * t);
                    v[i] = amplitude[i] * w * cos(w * t);
                    a[i] = -amplitude[i] * w * w * sin(w * t);
                }
                let (q_d, omega_d) = slew(q0, axis, *rate, t, self.frame);
                TaskReference {
                    p_d: p,
                    v_d: v,
                    a_d: a,
                    q_d,
                    omega_d,
                    alpha_d: Vec3::zeros(),
                    frame: self.frame,
                }
            }
            TrajectorySpec::GeodesicSlew {
                p,
                q0,
                axis,
                total_rotation,
            } => {
                let rate = total_rotation / self.duration;
                let (q_d, omega_d) = slew(q0, axis, rate, t, self.frame);
                TaskReference {
                    p_d: *p,
                    v_d: Vec3::zeros(),
                    a_d: Vec3::zeros(),
                    q_d,
                    omega_d,
                    alpha_d: Vec3::zeros(),
                    frame: self.frame,
                }
            }
        };
        Ok(reference)
    }
}

fn slew(q0: &UnitQuat, axis: &Vec3, rate: f64, t: f64, frame: AngularFrame) -> (UnitQuat, Vec3) {
    let unit_axis = axis / axis.norm();
    let rot = UnitQuat::from_axis_angle(unit_axis, rate * t).expect("non-degenerate axis");
    let q_d = match frame {
        AngularFrame::Local => q0.hamilton(&rot),
        AngularFrame::Global => rot.hamilton(q0),
    };
    (q_d, unit_axis * rate)
}

/// Result of sampling a trajectory through damped least-squares IK.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReachabilityReport {
    pub min_manipulability: f64,
    pub max_condition: f64,
    pub max_ik_residual: f64,
    /// Samples whose Jacobian condition number exceeded the abort limit.
    pub condition_violations: usize,
}

/// IK pose residual above which a trajectory is declared unreachable.
const IK_RESIDUAL_LIMIT: f64 = 1e-6;

/// Track the trajectory with damped least-squares IK from `seed` and
/// report how close the induced joint path comes to singularities.
pub fn reachability_check(
    model: &ManipulatorModel,
    trajectory: &Trajectory,
    seed: &Vec6,
    n_samples: usize,
    cond_abort: f64,
) -> Result<ReachabilityReport, Error> {
    let n = n_samples.max(2);
    let mut theta = *seed;
    let mut report = ReachabilityReport {
        min_manipulability: f64::INFINITY,
        max_condition: 0.0,
        max_ik_residual: 0.0,
        condition_violations: 0,
    };
    for k in 0..n {
        let t = trajectory.duration * k as f64 / (n - 1) as f64;
        let reference = trajectory.sample(t)?;
        let residual = ik_solve(model, &mut theta, &reference.p_d, &reference.q_d);
        report.max_ik_residual = report.max_ik_residual.max(residual);
        if residual > IK_RESIDUAL_LIMIT {
            return Err(Error::UnreachableTrajectory { residual });
        }
        let j = model.geometric_jacobian(&theta);
        let cond = condition_number(&j);
        report.min_manipulability = report.min_manipulability.min(manipulability(&j));
        report.max_condition = report.max_condition.max(cond);
        if cond > cond_abort {
            report.condition_violations += 1;
        }
    }
    Ok(report)
}

/// Damped least-squares IK toward a single pose from `seed`. Fails with
/// `UnreachableTrajectory` when the residual stays above tolerance.
pub fn ik_pose(
    model: &ManipulatorModel,
    seed: &Vec6,
    p_d: &Vec3,
    q_d: &UnitQuat,
) -> Result<Vec6, Error> {
    let mut theta = *seed;
    let residual = ik_solve(model, &mut theta, p_d, q_d);
    if residual > IK_RESIDUAL_LIMIT {
        return Err(Error::UnreachableTrajectory { residual });
    }
    Ok(theta)
}

/// Damped least-squares IK toward a single pose. Returns the final pose
/// residual (m + rad, summed norms).
fn ik_solve(model: &ManipulatorModel, theta: &mut Vec6, p_d: &Vec3, q_d: &UnitQuat) -> f64 {
    const DAMPING: f64 = 1e-3;
    const MAX_ITERS: usize = 200;
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_ITERS {
        let (p, q) = model.forward_kinematics(theta);
        let e_p = p_d - p;
        // world-frame rotation carrying q onto q_d, as a rotation vector
        let mut q_err = q_d.hamilton(&q.conjugate());
        if q_err.scalar() < 0.0 {
            q_err = -q_err;
        }
        let vec_norm = q_err.vector().norm();
        let e_q = if vec_norm < 1e-14 {
            Vec3::zeros()
        } else {
            let angle = 2.0 * libm::atan2(vec_norm, q_err.scalar());
            q_err.vector() * (angle / vec_norm)
        };
        residual = e_p.norm() + e_q.norm();
        if residual < 1e-10 {
            break;
        }
        let j = model.geometric_jacobian_world(theta);
        let mut e = Vec6::zeros();
        e.fixed_rows_mut::<3>(0).copy_from(&e_p);
        e.fixed_rows_mut::<3>(3).copy_from(&e_q);
        let jjt = j * j.transpose() + Mat6::identity() * (DAMPING * DAMPING);
        let y = jjt.cholesky().expect("damped normal matrix is SPD").solve(&e);
        *theta += j.transpose() * y;
    }
    residual
}
