//! Run metrics: exponential-rate fits and the `metrics.json` sidecar.

use serde::Serialize;

/// Summary written next to the trace CSV.
#[derive(Debug, Clone, Serialize)]
pub struct RunMetrics {
    /// Fitted decay rate of `||p_e||`, 1/s; `null` when the fit window
    /// is empty.
    pub fitted_rate_position: Option<f64>,
    /// Fitted decay rate of `||vec(q_e)||`, 1/s.
    pub fitted_rate_orientation: Option<f64>,
    pub final_p_err: f64,
    pub final_qvec_err: f64,
    /// Integrated rotation `int ||omega|| dt`, rad.
    pub path_length: f64,
    /// Sign of `<q, q_d>` at the end: which cover the run settled on.
    pub final_sign: f64,
    /// `"none"`, `"singular_jacobian"`, or `"numerical_divergence"`.
    pub aborted: String,
}

/// Least-squares slope of `ln e(t)` over the window
/// `lo < e(t) < 0.5, t >= t_min`; returns the decay rate (positive).
///
/// The lower bound is `max(1e-6, 3 x plateau)`, where the plateau is the
/// largest value in the trailing fifth of the trace. A converged run has
/// a tiny plateau and the bound reduces to 1e-6; a discrete closed loop
/// whose error floors near the hold-induced level keeps the floor out of
/// the fit.
pub fn fit_decay_rate(samples: &[(f64, f64)], t_min: f64) -> Option<f64> {
    if samples.is_empty() {
        return None;
    }
    let tail = &samples[samples.len() - samples.len() / 5..];
    let plateau = tail.iter().fold(0.0f64, |m, (_, e)| m.max(*e));
    let lo = (3.0 * plateau).max(1e-6);
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(t, e)| *t >= t_min && *e > lo && *e < 0.5)
        .map(|(t, e)| (*t, e.ln()))
        .collect();
    if pts.len() < 10 {
        return None;
    }
    let n = pts.len() as f64;
    let (st, se) = pts.iter().fold((0.0, 0.0), |(a, b), (t, e)| (a + t, b + e));
    let (mt, me) = (st / n, se / n);
    let mut num = 0.0;
    let mut den = 0.0;
    for (t, e) in &pts {
        num += (t - mt) * (e - me);
        den += (t - mt) * (t - mt);
    }
    Some(-num / den)
}

/// End of the sliding-variable transient: first time `||s||` drops below
/// 1% of its initial value (or an absolute floor). Rate fits start here.
pub fn transient_end(s_norm: &[(f64, f64)]) -> f64 {
    let Some(&(_, s0)) = s_norm.first() else {
        return 0.0;
    };
    let threshold = (0.01 * s0).max(1e-9);
    s_norm
        .iter()
        .find(|(_, s)| *s <= threshold)
        .map(|(t, _)| *t)
        .unwrap_or(f64::INFINITY)
}
