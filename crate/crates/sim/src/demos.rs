//! Built-in demo scenarios against the reference arm.
//!
//! Poses are derived from the arm's ready configuration at build time so
//! the demos stay consistent with the shipped model. The tracking and
//! global-frame trajectories were screened with `reachability_check`
//! (max condition < 40 along the induced joint path).

use manip_core::dynamics::ManipulatorModel;
use manip_core::quat::UnitQuat;
use manip_core::Vec3;

use crate::config::{
    ControllerBlock, FrameName, InitialBlock, ModeName, ModelBlock, OutputsBlock, Scenario,
    SimBlock, SpecBlock, TrajectoryBlock,
};

pub const DEMO_NAMES: [&str; 4] = ["setpoint", "tracking", "unwinding", "global-frame"];

fn arr3(v: Vec3) -> [f64; 3] {
    [v.x, v.y, v.z]
}

fn arr4(q: &UnitQuat) -> [f64; 4] {
    let q = q.as_quat();
    [q.w, q.x, q.y, q.z]
}

fn scenario(
    mode: ModeName,
    frame: FrameName,
    duration: f64,
    spec: SpecBlock,
    theta: [f64; 6],
) -> Scenario {
    Scenario {
        sim: SimBlock {
            dt: 1e-3,
            duration,
            log_stride: 1,
        },
        controller: ControllerBlock {
            mode,
            lambda: 2.0,
            sigma: 2.0,
            k_diag: None,
            cond_abort: 1e6,
        },
        model: ModelBlock::default(),
        trajectory: TrajectoryBlock { frame, spec },
        initial: InitialBlock::Joint {
            theta,
            theta_dot: [0.0; 6],
        },
        outputs: OutputsBlock::default(),
    }
}

/// Build the named demo as `(subdirectory, scenario)` pairs; multi-run
/// demos (the unwinding A/B) return one entry per run.
pub fn build(name: &str) -> Option<Vec<(String, Scenario)>> {
    let m = ManipulatorModel::reference();
    let ready = ManipulatorModel::reference_ready_state();
    let theta: [f64; 6] = core::array::from_fn(|i| ready.theta[i]);
    let (p, q) = m.forward_kinematics(&ready.theta);

    let runs = match name {
        "setpoint" => {
            let q_d = q.hamilton(
                &UnitQuat::from_axis_angle(Vec3::new(0.3, 1.0, -0.2), 0.7).unwrap(),
            );
            vec![(
                String::new(),
                scenario(
                    ModeName::TaskLocal,
                    FrameName::Local,
                    8.0,
                    SpecBlock::SetPoint {
                        p: arr3(p + Vec3::new(-0.06, 0.08, 0.06)),
                        q: arr4(&q_d),
                    },
                    theta,
                ),
            )]
        }
        "tracking" => {
            let q0 = q.hamilton(
                &UnitQuat::from_axis_angle(Vec3::new(0.2, 1.0, -0.4), 1.2).unwrap(),
            );
            vec![(
                String::new(),
                scenario(
                    ModeName::TaskLocal,
                    FrameName::Local,
                    10.0,
                    SpecBlock::Sinusoid {
                        center: arr3(p + Vec3::new(-0.10, 0.12, 0.10)),
                        amplitude: [0.03, 0.02, 0.02],
                        freq_hz: [0.2, 0.15, 0.25],
                        q0: arr4(&q0),
                        axis: [0.0, 0.0, 1.0],
                        rate: 0.12,
                    },
                    theta,
                ),
            )]
        }
        "global-frame" => {
            let q0 = q.hamilton(
                &UnitQuat::from_axis_angle(Vec3::new(0.2, 1.0, -0.4), 1.2).unwrap(),
            );
            vec![(
                String::new(),
                scenario(
                    ModeName::TaskGlobal,
                    FrameName::Global,
                    10.0,
                    SpecBlock::Sinusoid {
                        center: arr3(p + Vec3::new(-0.15, 0.05, 0.05)),
                        amplitude: [0.04, 0.03, 0.03],
                        freq_hz: [0.2, 0.15, 0.25],
                        q0: arr4(&q0),
                        axis: [0.0, 1.0, 0.3],
                        rate: 0.10,
                    },
                    theta,
                ),
            )]
        }
        "unwinding" => {
            // desired orientation 350 deg away about a fixed axis: the
            // short geodesic (10 deg) leads to -q_d
            let q_d = q.hamilton(
                &UnitQuat::from_axis_angle(Vec3::z(), 350.0_f64.to_radians()).unwrap(),
            );
            let spec = SpecBlock::SetPoint {
                p: arr3(p),
                q: arr4(&q_d),
            };
            vec![
                (
                    "sliding".to_string(),
                    scenario(
                        ModeName::TaskLocal,
                        FrameName::Local,
                        8.0,
                        spec.clone(),
                        theta,
                    ),
                ),
                (
                    "naive".to_string(),
                    scenario(
                        ModeName::TaskNaiveNoSgn,
                        FrameName::Local,
                        8.0,
                        spec,
                        theta,
                    ),
                ),
            ]
        }
        _ => return None,
    };
    Some(runs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::resolve;
    use manip_core::trajectory::reachability_check;
    use std::path::Path;

    #[test]
    fn every_demo_resolves() {
        for name in DEMO_NAMES {
            let runs = build(name).unwrap();
            assert!(!runs.is_empty());
            for (_, scn) in runs {
                resolve(&scn, Path::new(".")).unwrap();
            }
        }
    }

    #[test]
    fn unknown_demo_is_none() {
        assert!(build("nope").is_none());
    }

    #[test]
    fn demo_trajectories_stay_away_from_singularities() {
        for name in DEMO_NAMES {
            for (_, scn) in build(name).unwrap() {
                let r = resolve(&scn, Path::new(".")).unwrap();
                let report =
                    reachability_check(&r.model, &r.trajectory, &r.initial.theta, 200, 1e3)
                        .unwrap_or_else(|e| panic!("{name}: {e}"));
                assert_eq!(report.condition_violations, 0, "{name}");
                assert!(report.max_condition < 1e3, "{name}: {}", report.max_condition);
            }
        }
    }
}
