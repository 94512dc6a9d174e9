//! Fixed-step closed-loop runner: integrate, log, summarize.

use std::fs;
use std::path::Path;

use anyhow::Context;
use manip_core::control::{ik_torque, ControlMode};
use manip_core::integrate::rk4_joint_step;
use manip_core::sliding::error_quaternion;
use manip_core::{Error, Vec6};

use crate::config::Resolved;
use crate::metrics::{fit_decay_rate, transient_end, RunMetrics};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbortReason {
    None,
    SingularJacobian,
    NumericalDivergence,
}

impl AbortReason {
    pub fn exit_code(self) -> i32 {
        match self {
            AbortReason::None => 0,
            AbortReason::SingularJacobian => 2,
            AbortReason::NumericalDivergence => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AbortReason::None => "none",
            AbortReason::SingularJacobian => "singular_jacobian",
            AbortReason::NumericalDivergence => "numerical_divergence",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub metrics: RunMetrics,
    pub abort: AbortReason,
    /// Worst residual of `J (thd - thd_r) = [s_p; s_q]` over the run.
    pub identity_worst: f64,
}

/// Column order is fixed: time first, then the state, control, and
/// logged error quantities, one scalar per column.
pub const CSV_HEADER: [&str; 46] = [
    "t", "th1", "th2", "th3", "th4", "th5", "th6", "thd1", "thd2", "thd3", "thd4", "thd5",
    "thd6", "tau1", "tau2", "tau3", "tau4", "tau5", "tau6", "px", "py", "pz", "pdx", "pdy",
    "pdz", "qw", "qx", "qy", "qz", "qdw", "qdx", "qdy", "qdz", "qew", "qex", "qey", "qez",
    "spx", "spy", "spz", "sqx", "sqy", "sqz", "qe_vec_norm_sq", "cond_j", "aborting",
];

/// Run a resolved scenario, writing `trace.csv`, `metrics.json`, and
/// `scenario.resolved.json` into `out_dir`.
///
/// Deterministic for a fixed scenario: one controller evaluation per
/// step (zero-order-hold torque), fixed float formatting. A singular or
/// divergent step truncates the trace but leaves every written row
/// well-formed; the abort reason lands in `metrics.json` and in the
/// final row's `aborting` column.
pub fn run_scenario(r: &Resolved, out_dir: &Path) -> anyhow::Result<RunOutcome> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    fs::write(
        out_dir.join("scenario.resolved.json"),
        serde_json::to_string_pretty(&r.echo)? + "\n",
    )?;

    let mut writer = csv::Writer::from_path(out_dir.join("trace.csv"))?;
    writer.write_record(CSV_HEADER)?;

    let steps = (r.duration / r.dt).round() as usize;
    let mut state = r.initial;
    let mut prev_thd_r: Option<Vec6> = None;
    let mut abort = AbortReason::None;

    let mut p_err = Vec::with_capacity(steps + 1);
    let mut q_err = Vec::with_capacity(steps + 1);
    let mut s_norm = Vec::with_capacity(steps + 1);
    let mut identity_worst = 0.0f64;
    let mut path_length = 0.0;
    let mut prev_omega_norm: Option<f64> = None;
    let mut final_sign = 1.0;

    for k in 0..=steps {
        let t = (k as f64 * r.dt).min(r.duration);
        let reference = r.trajectory.sample(t).expect("t within duration");
        let ee = r.model.end_effector_state(&state);

        let out = match ik_torque(
            &r.model,
            &state,
            &ee,
            &reference,
            &r.cfg,
            prev_thd_r.as_ref(),
            r.dt,
        ) {
            Ok(out) => out,
            Err(Error::SingularJacobian { .. }) => {
                abort = AbortReason::SingularJacobian;
                break;
            }
            Err(Error::NumericalDivergence { .. }) => {
                abort = AbortReason::NumericalDivergence;
                break;
            }
            Err(e) => return Err(e.into()),
        };

        let q_e = error_quaternion(&reference.q_d, &ee.q);
        let qe_vec = q_e.vector().norm();
        p_err.push((t, (ee.p - reference.p_d).norm()));
        q_err.push((t, qe_vec));
        s_norm.push((t, (out.sliding.s_p.norm_squared() + out.sliding.s_q.norm_squared()).sqrt()));
        final_sign = manip_core::quat::sgn_modified(ee.q.dot(&reference.q_d));

        let omega_norm = ee.omega.norm();
        if let Some(prev) = prev_omega_norm {
            path_length += 0.5 * (prev + omega_norm) * r.dt;
        }
        prev_omega_norm = Some(omega_norm);

        let j = match r.cfg.mode {
            ControlMode::TaskGlobal => r.model.geometric_jacobian_world(&state.theta),
            _ => r.model.geometric_jacobian(&state.theta),
        };
        let lhs = j * (state.theta_dot - out.reference.theta_dot_r);
        let mut s = Vec6::zeros();
        s.fixed_rows_mut::<3>(0).copy_from(&out.sliding.s_p);
        s.fixed_rows_mut::<3>(3).copy_from(&out.sliding.s_q);
        identity_worst = identity_worst.max((lhs - s).norm());

        if k % r.log_stride == 0 || k == steps {
            // q fields renormalized before logging
            let q = ee.q.as_quat();
            let q_d = reference.q_d.as_quat();
            let q_e_raw = q_e.as_quat();
            let mut row: Vec<String> = Vec::with_capacity(46);
            row.push(fmt(t));
            for i in 0..6 {
                row.push(fmt(state.theta[i]));
            }
            for i in 0..6 {
                row.push(fmt(state.theta_dot[i]));
            }
            for i in 0..6 {
                row.push(fmt(out.tau[i]));
            }
            for v in [ee.p, reference.p_d] {
                row.extend([fmt(v.x), fmt(v.y), fmt(v.z)]);
            }
            for v in [q, q_d, q_e_raw] {
                row.extend([fmt(v.w), fmt(v.x), fmt(v.y), fmt(v.z)]);
            }
            for v in [out.sliding.s_p, out.sliding.s_q] {
                row.extend([fmt(v.x), fmt(v.y), fmt(v.z)]);
            }
            row.push(fmt(qe_vec * qe_vec));
            row.push(fmt(out.cond_j));
            row.push("none".into());
            writer.write_record(&row)?;
        }

        if k < steps {
            state = match rk4_joint_step(&r.model, &state, &out.tau, r.dt) {
                Ok(s) => s,
                Err(_) => {
                    abort = AbortReason::NumericalDivergence;
                    break;
                }
            };
            prev_thd_r = Some(out.reference.theta_dot_r);
        }
    }

    if abort != AbortReason::None {
        // final marker row: time only, plus the abort reason
        let mut row = vec![fmt((p_err.len() as f64) * r.dt)];
        row.extend(vec![String::new(); CSV_HEADER.len() - 2]);
        row.push(abort.as_str().into());
        writer.write_record(&row)?;
    }
    writer.flush()?;

    let t_min = transient_end(&s_norm);
    let metrics = RunMetrics {
        fitted_rate_position: fit_decay_rate(&p_err, t_min),
        fitted_rate_orientation: fit_decay_rate(&q_err, t_min),
        final_p_err: p_err.last().map(|(_, e)| *e).unwrap_or(f64::NAN),
        final_qvec_err: q_err.last().map(|(_, e)| *e).unwrap_or(f64::NAN),
        path_length,
        final_sign,
        aborted: abort.as_str().into(),
    };
    fs::write(
        out_dir.join("metrics.json"),
        serde_json::to_string_pretty(&metrics)? + "\n",
    )?;

    Ok(RunOutcome {
        metrics,
        abort,
        identity_worst,
    })
}

/// Shortest round-trip decimal form; deterministic on one platform.
fn fmt(v: f64) -> String {
    format!("{v}")
}
