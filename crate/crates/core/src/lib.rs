//! Quaternion sliding-variable control for 6R serial manipulators.
//!
//! The crate is split into:
//! - [`quat`]: unit-quaternion algebra with both local- and global-frame
//!   kinematic conventions,
//! - [`sliding`]: error quaternions, the two quaternion sliding variables,
//!   the position sliding variable, and closed-form decay solutions,
//! - [`dynamics`]: rigid-body dynamics of a 6R arm (forward kinematics,
//!   geometric Jacobian, inertia/Coriolis/gravity, RNEA),
//! - [`control`]: joint-space sliding controller and the task-space
//!   inverse-kinematics torque controller,
//! - [`trajectory`]: smooth task-space reference trajectories,
//! - [`integrate`]: fixed-step RK4.
//!
//! `no_std` compatible (requires `alloc`). All types are plain values and
//! all operations are pure functions; everything is `Send + Sync`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod control;
pub mod dynamics;
pub mod error;
pub mod integrate;
pub mod quat;
pub mod sliding;
pub mod trajectory;

pub use error::Error;

/// 3-vector of `f64` (positions in m, velocities in m/s, angular rates in rad/s).
pub type Vec3 = nalgebra::Vector3<f64>;
/// 6-vector of `f64` (joint angles, velocities, torques; stacked twists).
pub type Vec6 = nalgebra::Vector6<f64>;
/// 3x3 matrix of `f64`.
pub type Mat3 = nalgebra::Matrix3<f64>;
/// 6x6 matrix of `f64`.
pub type Mat6 = nalgebra::Matrix6<f64>;
