//! Scenario configuration: JSON schema, defaults, and resolution into
//! ready-to-run objects.
//!
//! A scenario file has `sim`, `controller`, `model`, `trajectory`,
//! `initial`, and `outputs` blocks; see the repository README for the
//! full schema. `model.path` is resolved relative to the scenario file;
//! omitting it selects the built-in reference arm.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use manip_core::control::{ControlMode, ControllerConfig};
use manip_core::dynamics::{JointState, ManipulatorModel};
use manip_core::quat::{Quat, UnitQuat};
use manip_core::sliding::AngularFrame;
use manip_core::trajectory::{ik_pose, Trajectory, TrajectorySpec};
use manip_core::{Mat6, Vec3, Vec6};
use serde::{Deserialize, Serialize};

use crate::model_file;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub sim: SimBlock,
    pub controller: ControllerBlock,
    #[serde(default)]
    pub model: ModelBlock,
    pub trajectory: TrajectoryBlock,
    pub initial: InitialBlock,
    #[serde(default)]
    pub outputs: OutputsBlock,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimBlock {
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_duration")]
    pub duration: f64,
    #[serde(default = "default_stride")]
    pub log_stride: usize,
}

fn default_dt() -> f64 {
    1e-3
}
fn default_duration() -> f64 {
    10.0
}
fn default_stride() -> usize {
    1
}
fn default_cond_abort() -> f64 {
    1e6
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    TaskLocal,
    TaskGlobal,
    TaskNaiveNoSgn,
}

impl ModeName {
    pub fn to_mode(self) -> ControlMode {
        match self {
            ModeName::TaskLocal => ControlMode::TaskLocal,
            ModeName::TaskGlobal => ControlMode::TaskGlobal,
            ModeName::TaskNaiveNoSgn => ControlMode::TaskNaiveNoSgn,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ControllerBlock {
    pub mode: ModeName,
    pub lambda: f64,
    pub sigma: f64,
    /// Diagonal of the sliding-variable gain K; omitted means the
    /// inertia-scaled default computed at the initial configuration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_diag: Option<[f64; 6]>,
    #[serde(default = "default_cond_abort")]
    pub cond_abort: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ModelBlock {
    /// Model JSON path; `None` selects the built-in reference arm.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameName {
    Local,
    Global,
}

impl FrameName {
    pub fn to_frame(self) -> AngularFrame {
        match self {
            FrameName::Local => AngularFrame::Local,
            FrameName::Global => AngularFrame::Global,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryBlock {
    pub frame: FrameName,
    #[serde(flatten)]
    pub spec: SpecBlock,
}

/// Trajectory variants. Quaternions are scalar-first `[w, x, y, z]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SpecBlock {
    SetPoint {
        p: [f64; 3],
        q: [f64; 4],
    },
    Sinusoid {
        center: [f64; 3],
        amplitude: [f64; 3],
        freq_hz: [f64; 3],
        q0: [f64; 4],
        axis: [f64; 3],
        rate: f64,
    },
    GeodesicSlew {
        p: [f64; 3],
        q0: [f64; 4],
        axis: [f64; 3],
        total_rotation: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialBlock {
    Joint {
        theta: [f64; 6],
        #[serde(default)]
        theta_dot: [f64; 6],
    },
    /// Task-space pose resolved to joints via damped least-squares IK.
    Task { task: TaskPose },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaskPose {
    pub p: [f64; 3],
    pub q: [f64; 4],
    /// IK seed configuration.
    #[serde(default = "default_seed")]
    pub seed: [f64; 6],
}

fn default_seed() -> [f64; 6] {
    [0.3, -0.6, 0.9, 0.4, 1.1, -0.2]
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct OutputsBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

/// A scenario with defaults filled and every block converted to the
/// objects the runner needs.
#[derive(Debug, Clone)]
pub struct Resolved {
    /// Echo of the input with defaults and derived values filled in.
    pub echo: Scenario,
    pub model: ManipulatorModel,
    pub cfg: ControllerConfig,
    pub trajectory: Trajectory,
    pub initial: JointState,
    pub dt: f64,
    pub duration: f64,
    pub log_stride: usize,
}

fn quat(v: &[f64; 4], what: &str) -> anyhow::Result<UnitQuat> {
    Quat::new(v[0], v[1], v[2], v[3])
        .normalize()
        .with_context(|| format!("{what}: degenerate quaternion"))
}

fn vec3(v: &[f64; 3]) -> Vec3 {
    Vec3::from_column_slice(v)
}

impl SpecBlock {
    fn to_spec(&self) -> anyhow::Result<TrajectorySpec> {
        Ok(match self {
            SpecBlock::SetPoint { p, q } => TrajectorySpec::SetPoint {
                p: vec3(p),
                q: quat(q, "trajectory.q")?,
            },
            SpecBlock::Sinusoid {
                center,
                amplitude,
                freq_hz,
                q0,
                axis,
                rate,
            } => TrajectorySpec::Sinusoid {
                center: vec3(center),
                amplitude: vec3(amplitude),
                freq_hz: vec3(freq_hz),
                q0: quat(q0, "trajectory.q0")?,
                axis: vec3(axis),
                rate: *rate,
            },
            SpecBlock::GeodesicSlew {
                p,
                q0,
                axis,
                total_rotation,
            } => TrajectorySpec::GeodesicSlew {
                p: vec3(p),
                q0: quat(q0, "trajectory.q0")?,
                axis: vec3(axis),
                total_rotation: *total_rotation,
            },
        })
    }
}

/// Validate a scenario and build the runnable objects. `base_dir` is
/// the directory of the scenario file, for relative model paths.
pub fn resolve(scenario: &Scenario, base_dir: &Path) -> anyhow::Result<Resolved> {
    let sim = &scenario.sim;
    if !(sim.dt > 0.0 && sim.dt <= 1e-2) {
        bail!("sim.dt must be in (0, 1e-2], got {}", sim.dt);
    }
    if !(sim.duration >= sim.dt) {
        bail!("sim.duration must be >= dt, got {}", sim.duration);
    }
    if sim.log_stride < 1 {
        bail!("sim.log_stride must be >= 1");
    }

    let model = match &scenario.model.path {
        Some(p) => {
            let path = if p.is_absolute() {
                p.clone()
            } else {
                base_dir.join(p)
            };
            model_file::load(&path)?
        }
        None => ManipulatorModel::reference(),
    };

    let trajectory = Trajectory::new(
        scenario.trajectory.spec.to_spec()?,
        scenario.trajectory.frame.to_frame(),
        sim.duration,
    )
    .context("trajectory block invalid")?;

    let initial = match &scenario.initial {
        InitialBlock::Joint { theta, theta_dot } => JointState {
            theta: Vec6::from_column_slice(theta),
            theta_dot: Vec6::from_column_slice(theta_dot),
        },
        InitialBlock::Task { task } => {
            let theta = ik_pose(
                &model,
                &Vec6::from_column_slice(&task.seed),
                &vec3(&task.p),
                &quat(&task.q, "initial.task.q")?,
            )
            .context("initial.task pose not reachable")?;
            JointState {
                theta,
                theta_dot: Vec6::zeros(),
            }
        }
    };

    let ctrl = &scenario.controller;
    let k_gain = match ctrl.k_diag {
        Some(d) => Mat6::from_diagonal(&Vec6::from_column_slice(&d)),
        None => ControllerConfig::default_k_gain(&model, &initial.theta),
    };
    let cfg = ControllerConfig {
        mode: ctrl.mode.to_mode(),
        lambda: ctrl.lambda,
        sigma: ctrl.sigma,
        k_gain,
        cond_abort: ctrl.cond_abort,
    };
    cfg.validate().context("controller block invalid")?;

    // echo with every default and derived value materialized
    let mut echo = scenario.clone();
    echo.controller.k_diag = Some(core::array::from_fn(|i| k_gain[(i, i)]));
    echo.initial = InitialBlock::Joint {
        theta: core::array::from_fn(|i| initial.theta[i]),
        theta_dot: core::array::from_fn(|i| initial.theta_dot[i]),
    };

    Ok(Resolved {
        echo,
        model,
        cfg,
        trajectory,
        initial,
        dt: sim.dt,
        duration: sim.duration,
        log_stride: sim.log_stride,
    })
}

/// Parse scenario JSON with line/column diagnostics.
pub fn parse(text: &str) -> anyhow::Result<Scenario> {
    serde_json::from_str(text).map_err(|e| {
        anyhow::anyhow!(
            "scenario parse error at line {}, column {}: {e}",
            e.line(),
            e.column()
        )
    })
}
