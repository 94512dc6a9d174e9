//! Rigid-body dynamics of a 6R serial arm.
//!
//! Kinematics use the standard (distal) Denavit-Hartenberg convention:
//! the transform from frame `i-1` to frame `i` is
//! `Rz(theta_i + offset_i) Tz(d_i) Tx(a_i) Rx(alpha_i)`, joint `i`
//! rotates about the z axis of frame `i-1`, and frame origins sit at the
//! distal end of each link.
//!
//! The geometric Jacobian maps joint velocities to the stacked twist
//! `[v; w]` with `v` in the world frame and `w` in the end-effector
//! (local) frame; [`ManipulatorModel::geometric_jacobian_world`] gives
//! the world-frame angular rows instead (`w_world = R w_local`).
//!
//! Inverse dynamics is recursive Newton-Euler; the inertia matrix comes
//! from column-wise RNEA with unit accelerations, and the Coriolis
//! matrix from Christoffel symbols with finite-difference dH/dtheta,
//! which guarantees the skew-symmetry of `Hdot - 2C` the stability
//! proofs rely on.

use nalgebra::Vector3;

use crate::quat::UnitQuat;
use crate::{Error, Mat3, Mat6, Vec3, Vec6};

/// Step used for finite-difference dH/dtheta in the Christoffel form.
const FD_STEP: f64 = 1e-6;

/// One revolute link: standard DH geometry plus inertial parameters.
///
/// `com` and `inertia` are expressed in the link's own DH frame, with
/// `inertia` taken about the center of mass.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkParams {
    pub dh_a: f64,
    pub dh_alpha: f64,
    pub dh_d: f64,
    pub dh_theta_offset: f64,
    pub mass: f64,
    pub com: Vec3,
    pub inertia: Mat3,
}

impl LinkParams {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.mass > 0.0) {
            return Err(Error::InvalidParameter("link mass must be > 0"));
        }
        if (self.inertia - self.inertia.transpose()).abs().max() > 1e-12 {
            return Err(Error::InvalidParameter("link inertia must be symmetric"));
        }
        let eig = self.inertia.symmetric_eigenvalues();
        let (a, b, c) = (eig[0], eig[1], eig[2]);
        if !(a > 0.0 && b > 0.0 && c > 0.0) {
            return Err(Error::InvalidParameter("link inertia must be positive definite"));
        }
        // principal moments of a physical body obey the triangle inequalities
        if a + b < c || b + c < a || a + c < b {
            return Err(Error::InvalidParameter(
                "link inertia violates the triangle inequalities",
            ));
        }
        Ok(())
    }
}

/// World pose of the manipulator base.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasePose {
    pub position: Vec3,
    pub orientation: UnitQuat,
}

impl BasePose {
    pub fn identity() -> Self {
        Self {
            position: Vec3::zeros(),
            orientation: UnitQuat::identity(),
        }
    }
}

/// Joint angles and velocities of the arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointState {
    pub theta: Vec6,
    pub theta_dot: Vec6,
}

/// End-effector pose and twist. `omega` is in the end-effector frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndEffectorState {
    pub p: Vec3,
    pub q: UnitQuat,
    pub v: Vec3,
    pub omega: Vec3,
}

/// Kinematic and inertial description of a 6R serial arm. Immutable
/// after construction; all operations are pure.
#[derive(Debug, Clone, PartialEq)]
pub struct ManipulatorModel {
    pub links: [LinkParams; 6],
    pub gravity: Vec3,
    pub base_pose: BasePose,
}

/// Rotation and translation of one DH step: frame `i-1` -> frame `i`.
fn dh_step(link: &LinkParams, theta: f64) -> (UnitQuat, Vec3) {
    let th = theta + link.dh_theta_offset;
    let qz = UnitQuat::from_axis_angle(Vec3::z(), th).expect("unit axis");
    let qx = UnitQuat::from_axis_angle(Vec3::x(), link.dh_alpha).expect("unit axis");
    let rot = qz.hamilton(&qx);
    let (s, c) = (libm::sin(th), libm::cos(th));
    let trans = Vec3::new(link.dh_a * c, link.dh_a * s, link.dh_d);
    (rot, trans)
}

impl ManipulatorModel {
    pub fn validate(&self) -> Result<(), Error> {
        for link in &self.links {
            link.validate()?;
        }
        if !self.gravity.iter().all(|g| g.is_finite()) {
            return Err(Error::InvalidParameter("gravity must be finite"));
        }
        Ok(())
    }

    /// World poses of frames 0..=6 (frame 0 is the base).
    fn frame_poses(&self, theta: &Vec6) -> [(UnitQuat, Vec3); 7] {
        let mut poses = [(UnitQuat::identity(), Vec3::zeros()); 7];
        poses[0] = (self.base_pose.orientation, self.base_pose.position);
        for i in 0..6 {
            let (rot, trans) = dh_step(&self.links[i], theta[i]);
            let (q_prev, p_prev) = poses[i];
            poses[i + 1] = (q_prev.hamilton(&rot), p_prev + q_prev.rotate(trans));
        }
        poses
    }

    /// End-effector pose `(p, q)` in the world frame.
    pub fn forward_kinematics(&self, theta: &Vec6) -> (Vec3, UnitQuat) {
        let poses = self.frame_poses(theta);
        let (q, p) = poses[6];
        (p, q)
    }

    /// World position of each link's center of mass.
    pub fn com_positions(&self, theta: &Vec6) -> [Vec3; 6] {
        let poses = self.frame_poses(theta);
        let mut out = [Vec3::zeros(); 6];
        for i in 0..6 {
            let (q, p) = poses[i + 1];
            out[i] = p + q.rotate(self.links[i].com);
        }
        out
    }

    /// Geometric Jacobian with linear rows in the world frame and
    /// angular rows in the end-effector frame.
    pub fn geometric_jacobian(&self, theta: &Vec6) -> Mat6 {
        let mut j = self.geometric_jacobian_world(theta);
        let (_, q_ee) = self.forward_kinematics(theta);
        let r_t = q_ee.to_rotation_matrix().transpose();
        let ang = r_t * j.fixed_view::<3, 6>(3, 0).clone_owned();
        j.fixed_view_mut::<3, 6>(3, 0).copy_from(&ang);
        j
    }

    /// Geometric Jacobian with both blocks in the world frame.
    pub fn geometric_jacobian_world(&self, theta: &Vec6) -> Mat6 {
        let poses = self.frame_poses(theta);
        let p_ee = poses[6].1;
        let mut j = Mat6::zeros();
        for i in 0..6 {
            let (q, p) = poses[i]; // joint i+1 rotates about z of frame i
            let z = q.rotate(Vec3::z());
            let lin = z.cross(&(p_ee - p));
            j.fixed_view_mut::<3, 1>(0, i).copy_from(&lin);
            j.fixed_view_mut::<3, 1>(3, i).copy_from(&z);
        }
        j
    }

    /// Recursive Newton-Euler inverse dynamics:
    /// `tau = H(theta) theta_ddot + C(theta, theta_dot) theta_dot + g(theta)`.
    pub fn rnea(&self, theta: &Vec6, theta_dot: &Vec6, theta_ddot: &Vec6) -> Vec6 {
        self.rnea_with_gravity(theta, theta_dot, theta_ddot, self.gravity)
    }

    fn rnea_with_gravity(
        &self,
        theta: &Vec6,
        theta_dot: &Vec6,
        theta_ddot: &Vec6,
        gravity: Vec3,
    ) -> Vec6 {
        // All link quantities in the link's own frame. The base is given
        // the fictitious acceleration -g, which injects gravity torques.
        let mut rots = [Mat3::zeros(); 6]; // frame i-1 -> i
        let mut trans = [Vec3::zeros(); 6]; // origin i in frame i-1
        for i in 0..6 {
            let (q, t) = dh_step(&self.links[i], theta[i]);
            rots[i] = q.to_rotation_matrix();
            trans[i] = t;
        }

        let base_r = self.base_pose.orientation.to_rotation_matrix();
        let mut omega = Vec3::zeros();
        let mut omega_dot = Vec3::zeros();
        let mut accel = -(base_r.transpose() * gravity);

        let mut omegas = [Vec3::zeros(); 6];
        let mut omega_dots = [Vec3::zeros(); 6];
        let mut net_force = [Vec3::zeros(); 6]; // m a_com
        let mut net_moment = [Vec3::zeros(); 6]; // I wdot + w x I w

        for i in 0..6 {
            let rt = rots[i].transpose();
            let zdot = Vec3::z() * theta_dot[i];
            // joint axis is z of frame i-1; compose there, then rotate into frame i
            let w_parent = omega + zdot;
            let wd_parent = omega_dot + Vec3::z() * theta_ddot[i] + omega.cross(&zdot);
            let a_origin = accel
                + wd_parent.cross(&trans[i])
                + w_parent.cross(&w_parent.cross(&trans[i]));

            omega = rt * w_parent;
            omega_dot = rt * wd_parent;
            accel = rt * a_origin;

            let link = &self.links[i];
            let a_com = accel + omega_dot.cross(&link.com) + omega.cross(&omega.cross(&link.com));
            omegas[i] = omega;
            omega_dots[i] = omega_dot;
            net_force[i] = link.mass * a_com;
            net_moment[i] =
                link.inertia * omega_dot + omega.cross(&(link.inertia * omega));
        }

        // Backward pass. n_i is the moment link i-1 exerts on link i,
        // taken about the origin of frame i-1 (a point on joint axis i),
        // expressed in frame i; its child counterpart arrives already
        // taken about this link's distal origin.
        let mut tau = Vec6::zeros();
        let mut f_child = Vec3::zeros();
        let mut n_child = Vec3::zeros();
        for i in (0..6).rev() {
            let link = &self.links[i];
            let (f_from_child, n_from_child) = if i < 5 {
                let r = rots[i + 1]; // frame i+1 -> i
                (r * f_child, r * n_child)
            } else {
                (Vec3::zeros(), Vec3::zeros())
            };
            let f = net_force[i] + f_from_child;
            let parent_origin = -(rots[i].transpose() * trans[i]); // o_{i-1} in frame i
            let n = net_moment[i]
                + n_from_child
                + link.com.cross(&net_force[i])
                - parent_origin.cross(&f);
            // project onto the joint axis (z of frame i-1, seen from frame i)
            tau[i] = (rots[i] * n).z;
            f_child = f;
            n_child = n;
        }
        tau
    }

    /// Inertia matrix via column-wise RNEA with unit accelerations, zero
    /// velocity, and gravity off. Symmetric positive definite.
    pub fn mass_matrix(&self, theta: &Vec6) -> Mat6 {
        let zero = Vec6::zeros();
        let mut h = Mat6::zeros();
        for j in 0..6 {
            let mut e = Vec6::zeros();
            e[j] = 1.0;
            let col = self.rnea_with_gravity(theta, &zero, &e, Vec3::zeros());
            h.set_column(j, &col);
        }
        // columns are equal-magnitude transposes up to rounding
        0.5 * (h + h.transpose())
    }

    /// Gravity torque vector `g(theta) = rnea(theta, 0, 0)`.
    pub fn gravity_vector(&self, theta: &Vec6) -> Vec6 {
        let zero = Vec6::zeros();
        self.rnea(theta, &zero, &zero)
    }

    /// Centripetal-Coriolis matrix from Christoffel symbols,
    /// `C_ij = 1/2 sum_k (dH_ij/dth_k + dH_ik/dth_j - dH_jk/dth_i) thd_k`,
    /// with dH/dtheta by central differences. This construction makes
    /// `Hdot - 2C` skew-symmetric.
    pub fn coriolis_matrix(&self, theta: &Vec6, theta_dot: &Vec6) -> Mat6 {
        let mut dh = [Mat6::zeros(); 6]; // dH/dtheta_k
        for k in 0..6 {
            let mut tp = *theta;
            let mut tm = *theta;
            tp[k] += FD_STEP;
            tm[k] -= FD_STEP;
            dh[k] = (self.mass_matrix(&tp) - self.mass_matrix(&tm)) / (2.0 * FD_STEP);
        }
        let mut c = Mat6::zeros();
        for i in 0..6 {
            for j in 0..6 {
                let mut sum = 0.0;
                for k in 0..6 {
                    sum += (dh[k][(i, j)] + dh[j][(i, k)] - dh[i][(j, k)]) * theta_dot[k];
                }
                c[(i, j)] = 0.5 * sum;
            }
        }
        c
    }

    /// Exact product `C(theta, theta_dot) v` for the Christoffel `C`,
    /// via polarization of the quadratic velocity torque:
    /// `C(thd) v = 1/2 [c(thd + v) - c(thd) - c(v)]` where
    /// `c(x) = rnea(theta, x, 0) - g(theta)`.
    pub fn coriolis_times(&self, theta: &Vec6, theta_dot: &Vec6, v: &Vec6) -> Vec6 {
        let zero = Vec6::zeros();
        let g = Vec3::zeros();
        let sum = self.rnea_with_gravity(theta, &(theta_dot + v), &zero, g);
        let a = self.rnea_with_gravity(theta, theta_dot, &zero, g);
        let b = self.rnea_with_gravity(theta, v, &zero, g);
        0.5 * (sum - a - b)
    }

    /// Joint accelerations from the equations of motion:
    /// `theta_ddot = H^-1 (tau - C theta_dot - g)`.
    pub fn forward_dynamics(&self, theta: &Vec6, theta_dot: &Vec6, tau: &Vec6) -> Vec6 {
        let zero = Vec6::zeros();
        let bias = self.rnea(theta, theta_dot, &zero); // C thd + g, exactly
        let h = self.mass_matrix(theta);
        h.cholesky()
            .expect("inertia matrix is positive definite")
            .solve(&(tau - bias))
    }

    /// Kinetic energy `1/2 thd^T H thd`.
    pub fn kinetic_energy(&self, theta: &Vec6, theta_dot: &Vec6) -> f64 {
        let h = self.mass_matrix(theta);
        0.5 * theta_dot.dot(&(h * theta_dot))
    }

    /// Gravitational potential energy `-sum m_i g . p_com_i`.
    pub fn potential_energy(&self, theta: &Vec6) -> f64 {
        let coms = self.com_positions(theta);
        let mut u = 0.0;
        for i in 0..6 {
            u -= self.links[i].mass * self.gravity.dot(&coms[i]);
        }
        u
    }

    /// End-effector pose plus twist from the Jacobian (`omega` local).
    pub fn end_effector_state(&self, state: &JointState) -> EndEffectorState {
        let (p, q) = self.forward_kinematics(&state.theta);
        let twist = self.geometric_jacobian(&state.theta) * state.theta_dot;
        EndEffectorState {
            p,
            q,
            v: twist.fixed_rows::<3>(0).into_owned(),
            omega: twist.fixed_rows::<3>(3).into_owned(),
        }
    }
}

/// `|det J|`; zero at a singularity.
pub fn manipulability(j: &Mat6) -> f64 {
    j.determinant().abs()
}

/// `sigma_max / sigma_min`; `+inf` when rank deficient.
pub fn condition_number(j: &Mat6) -> f64 {
    let svd = j.clone_owned().svd(false, false);
    let s = &svd.singular_values;
    let (mut smax, mut smin) = (0.0f64, f64::INFINITY);
    for v in s.iter() {
        smax = smax.max(*v);
        smin = smin.min(*v);
    }
    if smin <= 0.0 {
        f64::INFINITY
    } else {
        smax / smin
    }
}

/// Inertia of a solid box with side lengths `(lx, ly, lz)` about its com.
fn box_inertia(mass: f64, lx: f64, ly: f64, lz: f64) -> Mat3 {
    let k = mass / 12.0;
    Mat3::from_diagonal(&Vector3::new(
        k * (ly * ly + lz * lz),
        k * (lx * lx + lz * lz),
        k * (lx * lx + ly * ly),
    ))
}

fn reference_link(a: f64, alpha: f64, d: f64, mass: f64) -> LinkParams {
    // com at the link midpoint; in the distal frame the proximal origin
    // sits at -(a, d sin(alpha), d cos(alpha)).
    let to_parent = Vec3::new(a, d * libm::sin(alpha), d * libm::cos(alpha));
    let com = -0.5 * to_parent;
    let len = libm::sqrt(a * a + d * d);
    let inertia = box_inertia(mass, len + 0.06, 0.08, 0.08);
    LinkParams {
        dh_a: a,
        dh_alpha: alpha,
        dh_d: d,
        dh_theta_offset: 0.0,
        mass,
        com,
        inertia,
    }
}

impl ManipulatorModel {
    /// The reference 6R arm used by the shipped demos and golden tests:
    /// a spherical-wrist elbow arm, ~0.9 m reach, link masses 1-5 kg,
    /// gravity along -z, base at the world origin.
    ///
    /// Standard DH table (a [m], alpha [rad], d [m], offset = 0):
    /// ```text
    /// link 1: a = 0.00  alpha =  pi/2  d = 0.30  m = 4.0 kg
    /// link 2: a = 0.40  alpha =  0     d = 0.00  m = 5.0 kg
    /// link 3: a = 0.05  alpha =  pi/2  d = 0.00  m = 3.0 kg
    /// link 4: a = 0.00  alpha = -pi/2  d = 0.35  m = 2.0 kg
    /// link 5: a = 0.00  alpha =  pi/2  d = 0.00  m = 1.5 kg
    /// link 6: a = 0.00  alpha =  0     d = 0.10  m = 1.0 kg
    /// ```
    pub fn reference() -> Self {
        use core::f64::consts::FRAC_PI_2;
        let model = Self {
            links: [
                reference_link(0.00, FRAC_PI_2, 0.30, 4.0),
                reference_link(0.40, 0.0, 0.00, 5.0),
                reference_link(0.05, FRAC_PI_2, 0.00, 3.0),
                reference_link(0.00, -FRAC_PI_2, 0.35, 2.0),
                reference_link(0.00, FRAC_PI_2, 0.00, 1.5),
                reference_link(0.00, 0.0, 0.10, 1.0),
            ],
            gravity: Vec3::new(0.0, 0.0, -9.81),
            base_pose: BasePose::identity(),
        };
        debug_assert!(model.validate().is_ok());
        model
    }

    /// A joint configuration away from the wrist and elbow singularities,
    /// used as the default initial state of the shipped demos.
    pub fn reference_ready_state() -> JointState {
        JointState {
            theta: Vec6::from_column_slice(&[0.3, -0.6, 0.9, 0.4, 1.1, -0.2]),
            theta_dot: Vec6::zeros(),
        }
    }
}
