use core::fmt;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Quaternion norm at or below the degeneracy threshold; no direction to preserve.
    DegenerateQuaternion { norm: f64 },
    /// Zero-length rotation axis.
    DegenerateAxis,
    /// Scalar argument outside its admissible interval.
    DomainError { value: f64, min: f64, max: f64 },
    /// NaN or infinity appeared during integration.
    NumericalDivergence { t: f64 },
    /// Jacobian condition number exceeded the configured abort threshold.
    SingularJacobian { condition: f64 },
    /// Sample time outside the trajectory's [0, duration] interval.
    OutOfRange { t: f64, duration: f64 },
    /// Inverse kinematics could not track the trajectory to tolerance.
    UnreachableTrajectory { residual: f64 },
    /// Model or controller parameters violate their invariants.
    InvalidParameter(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DegenerateQuaternion { norm } => {
                write!(f, "degenerate quaternion (norm {norm:e})")
            }
            Error::DegenerateAxis => write!(f, "zero-length rotation axis"),
            Error::DomainError { value, min, max } => {
                write!(f, "value {value} outside [{min}, {max})")
            }
            Error::NumericalDivergence { t } => {
                write!(f, "numerical divergence at t = {t}")
            }
            Error::SingularJacobian { condition } => {
                write!(f, "singular Jacobian (condition number {condition:e})")
            }
            Error::OutOfRange { t, duration } => {
                write!(f, "sample time {t} outside [0, {duration}]")
            }
            Error::UnreachableTrajectory { residual } => {
                write!(f, "trajectory unreachable (IK residual {residual:e})")
            }
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
        }
    }
}

impl core::error::Error for Error {}
