//! Quaternion algebra with scalar-first component ordering `(w, x, y, z)`.
//!
//! [`Quat`] is the raw four-vector: no unit constraint, so it can hold
//! derivatives. [`UnitQuat`] wraps a `Quat` whose norm is 1 within `1e-9`
//! and represents an orientation on S^3. Both `q` and `-q` encode the same
//! rotation (double cover); consumers must accept either sign.
//!
//! Two kinematic conventions are provided: `qdot_local` for angular
//! velocity expressed in the body frame (`q_dot = 1/2 q (0, w)`) and
//! `qdot_global` for angular velocity in the inertial frame
//! (`q_dot = 1/2 (0, w) q`).

use core::ops::{Add, Mul, Neg, Sub};

use crate::{Error, Mat3, Vec3};

/// Norm below which `normalize` refuses to produce a direction.
pub const EPS_NORM: f64 = 1e-8;

/// Raw quaternion, scalar part first. Not necessarily unit norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quat {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quat {
    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub const fn identity() -> Self {
        Self::new(1.0, 0.0, 0.0, 0.0)
    }

    pub const fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0)
    }

    /// Build from scalar and vector parts.
    pub fn from_parts(scalar: f64, vector: Vec3) -> Self {
        Self::new(scalar, vector.x, vector.y, vector.z)
    }

    /// Pure quaternion `(0, v)`.
    pub fn pure(v: Vec3) -> Self {
        Self::from_parts(0.0, v)
    }

    pub fn vector(&self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.dot(self))
    }

    /// Four-vector inner product.
    pub fn dot(&self, rhs: &Quat) -> f64 {
        self.w * rhs.w + self.x * rhs.x + self.y * rhs.y + self.z * rhs.z
    }

    /// `q* = (w, -v)`.
    pub fn conjugate(&self) -> Quat {
        Quat::new(self.w, -self.x, -self.y, -self.z)
    }

    /// Hamilton product `self (x) rhs`.
    pub fn hamilton(&self, rhs: &Quat) -> Quat {
        let (w1, v1) = (self.w, self.vector());
        let (w2, v2) = (rhs.w, rhs.vector());
        Quat::from_parts(w1 * w2 - v1.dot(&v2), w1 * v2 + w2 * v1 + v1.cross(&v2))
    }

    /// Scale to unit norm, preserving direction.
    pub fn normalize(&self) -> Result<UnitQuat, Error> {
        let n = self.norm();
        if n <= EPS_NORM {
            return Err(Error::DegenerateQuaternion { norm: n });
        }
        Ok(UnitQuat(Quat::new(
            self.w / n,
            self.x / n,
            self.y / n,
            self.z / n,
        )))
    }

    pub fn is_finite(&self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Quat {
    type Output = Quat;
    fn add(self, rhs: Quat) -> Quat {
        Quat::new(self.w + rhs.w, self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Quat {
    type Output = Quat;
    fn sub(self, rhs: Quat) -> Quat {
        Quat::new(self.w - rhs.w, self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Quat {
    type Output = Quat;
    fn mul(self, s: f64) -> Quat {
        Quat::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Quat {
    type Output = Quat;
    fn neg(self) -> Quat {
        self * -1.0
    }
}

/// Orientation on S^3: a quaternion with `| ||q|| - 1 | <= 1e-9`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitQuat(Quat);

impl UnitQuat {
    pub const fn identity() -> Self {
        UnitQuat(Quat::identity())
    }

    /// `(cos(angle/2), sin(angle/2) axis/||axis||)`.
    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Result<Self, Error> {
        let n = axis.norm();
        if n == 0.0 {
            return Err(Error::DegenerateAxis);
        }
        let half = 0.5 * angle;
        let s = libm::sin(half) / n;
        Ok(UnitQuat(Quat::from_parts(libm::cos(half), axis * s)))
    }

    /// Wrap a quaternion already known to be unit norm (e.g. a product of
    /// unit quaternions). Debug-checked only.
    pub(crate) fn wrap(q: Quat) -> Self {
        debug_assert!((q.norm() - 1.0).abs() <= 1e-9);
        UnitQuat(q)
    }

    pub fn as_quat(&self) -> &Quat {
        &self.0
    }

    pub fn scalar(&self) -> f64 {
        self.0.w
    }

    pub fn vector(&self) -> Vec3 {
        self.0.vector()
    }

    pub fn dot(&self, rhs: &UnitQuat) -> f64 {
        self.0.dot(&rhs.0)
    }

    pub fn conjugate(&self) -> UnitQuat {
        UnitQuat(self.0.conjugate())
    }

    /// Hamilton product of two unit quaternions; unit within rounding.
    pub fn hamilton(&self, rhs: &UnitQuat) -> UnitQuat {
        UnitQuat::wrap(self.0.hamilton(&rhs.0))
    }

    /// Rotation matrix `R(q)`. Satisfies `R(q) = R(-q)`.
    pub fn to_rotation_matrix(&self) -> Mat3 {
        let Quat { w, x, y, z } = self.0;
        Mat3::new(
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        )
    }

    /// Rotate a vector: the vector part of `q (0, v) q*`.
    pub fn rotate(&self, v: Vec3) -> Vec3 {
        // Rodrigues form, cheaper than two Hamilton products.
        let u = self.vector();
        let t = 2.0 * u.cross(&v);
        v + self.scalar() * t + u.cross(&t)
    }

    /// Local-frame kinematics `q_dot = 1/2 q (0, w)`.
    pub fn qdot_local(&self, omega: Vec3) -> Quat {
        self.0.hamilton(&Quat::pure(omega)) * 0.5
    }

    /// Global-frame kinematics `q_dot = 1/2 (0, w) q`.
    pub fn qdot_global(&self, omega_global: Vec3) -> Quat {
        Quat::pure(omega_global).hamilton(&self.0) * 0.5
    }
}

impl Neg for UnitQuat {
    type Output = UnitQuat;
    fn neg(self) -> UnitQuat {
        UnitQuat(-self.0)
    }
}

/// Sign function with `sgn(0) = 1`.
///
/// The nonstandard value at zero makes the orientation-error equator a
/// non-equilibrium set, which is what turns almost-global convergence
/// into global convergence.
pub fn sgn_modified(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}
