//! Resource estimates for a machine of `K` logical qubits: code distance,
//! syndrome bandwidth and the number of decoding units needed when the lazy
//! decoder filters out most decoding tasks.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;
use thiserror::Error;

/// Physical error rate at which the heuristic logical rate stops improving with `d`.
pub const THRESHOLD: f64 = 1e-2;

/// Syndrome round duration used when none is given: one microsecond.
pub const DEFAULT_TAU: f64 = 1e-6;

const MAX_DISTANCE: usize = 100_001;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResourceError {
    #[error("p = {0} is not below the threshold 1e-2; no distance reaches the target")]
    AboveThreshold(f64),
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
}

/// `0.1 (100 p)^((d + 1) / 2)`.
pub fn logical_error_rate(p: f64, d: usize) -> f64 {
    let exponent = (d as f64 + 1.0) / 2.0;
    let direct = 0.1 * (100.0 * p).powf(exponent);
    if direct > 0.0 && direct.is_finite() {
        direct
    } else {
        (0.1f64.ln() + exponent * (100.0 * p).ln()).exp()
    }
}

/// Natural log of [`logical_error_rate`], finite far below `f64::MIN_POSITIVE`.
pub fn ln_logical_error_rate(p: f64, d: usize) -> f64 {
    0.1f64.ln() + (d as f64 + 1.0) / 2.0 * (100.0 * p).ln()
}

/// Smallest odd `d >= 3` whose logical rate meets `p_target`.
///
/// The rate is compared with `<=`: the grid points `p_L == p_target` of the
/// usual provisioning tables (e.g. `p = 1e-4`, `d = 7`, target `1e-9`) are
/// accepted.
pub fn select_distance(p: f64, p_target: f64) -> Result<usize, ResourceError> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(ResourceError::InvalidParams(format!("p = {p} must be positive")));
    }
    if !(p_target > 0.0 && p_target < 1.0) {
        return Err(ResourceError::InvalidParams(format!("p_target = {p_target} must be in (0, 1)")));
    }
    if p >= THRESHOLD {
        return Err(ResourceError::AboveThreshold(p));
    }
    let ln_target = p_target.ln();
    let mut d = 3;
    while d <= MAX_DISTANCE {
        let p_l = logical_error_rate(p, d);
        let meets = if p_l > 0.0 { p_l <= p_target } else { ln_logical_error_rate(p, d) <= ln_target };
        if meets {
            return Ok(d);
        }
        d += 2;
    }
    Err(ResourceError::InvalidParams(format!("p = {p} needs a distance above {MAX_DISTANCE}")))
}

/// Syndrome bits per second of one logical qubit, both bases: `(d^2 - 1) / tau`.
pub fn bandwidth_per_qubit(d: usize, tau: f64) -> f64 {
    (d * d - 1) as f64 / tau
}

/// Smallest `M` with `C(2K, M+1) p_fail^(M+1) < p_L`, found by a scan in log
/// space. Never exceeds `2K`.
pub fn max_concurrent_failures(p_fail: f64, k: u64, p_l: f64) -> u64 {
    let n = 2 * k;
    if p_fail <= 0.0 {
        return 0;
    }
    let ln_p = p_fail.ln();
    let ln_target = p_l.ln();
    for m in 0..n {
        let j = m + 1;
        if ln_binomial(n, j) + j as f64 * ln_p < ln_target {
            return m;
        }
    }
    n
}

/// Binary relative entropy `D(a || p)` in nats.
pub fn binary_kl(a: f64, p: f64) -> f64 {
    let term = |x: f64, y: f64| if x == 0.0 { 0.0 } else { x * (x / y).ln() };
    term(a, p) + term(1.0 - a, 1.0 - p)
}

/// Smallest `M` such that `a = (M+1)/(2K)` exceeds `p_fail` and the
/// Chernoff tail `exp(-2K D(a || p_fail))` is below `p_L`. Capped at `2K`.
pub fn chernoff_upper_bound_m(p_fail: f64, k: u64, p_l: f64) -> u64 {
    let n = 2 * k;
    if p_fail <= 0.0 {
        return 0;
    }
    if p_fail >= 1.0 {
        return n;
    }
    let ln_target = p_l.ln();
    let nf = n as f64;
    // the exponent grows with a above p_fail, so bisect on M
    let holds = |m: u64| {
        let a = (m + 1) as f64 / nf;
        a > p_fail && -nf * binary_kl(a.min(1.0), p_fail) < ln_target
    };
    let start = ((p_fail * nf).floor() as u64).min(n);
    if start >= n || !holds(n - 1) {
        return n;
    }
    let (mut lo, mut hi) = (start, n - 1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub p: f64,
    pub p_target: f64,
    /// Number of logical qubits.
    pub k: u64,
    /// Seconds per syndrome round.
    pub tau: f64,
    /// Lazy failure probability of one basis over a `d`-round window.
    pub p_fail: f64,
}

impl SystemParams {
    pub fn new(p: f64, p_target: f64, k: u64, p_fail: f64) -> Self {
        SystemParams { p, p_target, k, tau: DEFAULT_TAU, p_fail }
    }

    pub fn validate(&self) -> Result<(), ResourceError> {
        let bad = |msg: String| Err(ResourceError::InvalidParams(msg));
        if !(self.p_target > 0.0 && self.p_target < 1.0) {
            return bad(format!("p_target = {} must be in (0, 1)", self.p_target));
        }
        if self.k < 1 {
            return bad("K must be at least 1".into());
        }
        if !(self.tau > 0.0) {
            return bad(format!("tau = {} must be positive", self.tau));
        }
        if !(0.0..=1.0).contains(&self.p_fail) {
            return bad(format!("p_fail = {} must be in [0, 1]", self.p_fail));
        }
        Ok(())
    }
}

/// How `M` is obtained from `p_fail`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum MMethod {
    #[default]
    Exact,
    Chernoff,
}

/// Bandwidth carried by one decoding task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TaskBandwidth {
    /// One basis per task: `(d^2 - 1) / (2 tau)`. Matches the tabulated numbers.
    #[default]
    PerBasis,
    /// `bw(d) = (d^2 - 1) / tau` per task, the formula taken literally.
    FullQubit,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ReportOptions {
    pub method: MMethod,
    pub task_bandwidth: TaskBandwidth,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RequirementReport {
    pub d: usize,
    #[serde(rename = "p_L")]
    pub p_l: f64,
    #[serde(rename = "M")]
    pub m: u64,
    /// Bits per second for the whole machine.
    pub bw_required: f64,
    pub bw_no_lazy: f64,
    pub dec_units_lazy: u64,
    pub dec_units_naive: u64,
    pub savings_fraction: f64,
}

pub fn requirement_report(params: &SystemParams) -> Result<RequirementReport, ResourceError> {
    requirement_report_with(params, ReportOptions::default())
}

pub fn requirement_report_with(params: &SystemParams, options: ReportOptions) -> Result<RequirementReport, ResourceError> {
    params.validate()?;
    let d = select_distance(params.p, params.p_target)?;
    let p_l = logical_error_rate(params.p, d);
    let m = match options.method {
        MMethod::Exact => max_concurrent_failures(params.p_fail, params.k, p_l),
        MMethod::Chernoff => chernoff_upper_bound_m(params.p_fail, params.k, p_l),
    };
    let per_task = match options.task_bandwidth {
        TaskBandwidth::PerBasis => bandwidth_per_qubit(d, params.tau) / 2.0,
        TaskBandwidth::FullQubit => bandwidth_per_qubit(d, params.tau),
    };
    let naive = 2 * params.k;
    Ok(RequirementReport {
        d,
        p_l,
        m,
        bw_required: m as f64 * per_task,
        bw_no_lazy: params.k as f64 * bandwidth_per_qubit(d, params.tau),
        dec_units_lazy: m,
        dec_units_naive: naive,
        savings_fraction: 1.0 - m as f64 / naive as f64,
    })
}

/// One cell of a requirements table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RequirementRow {
    pub p_target: f64,
    pub p: f64,
    pub k: u64,
    pub p_fail: f64,
    pub report: RequirementReport,
}

/// `8.4e10` -> `84 GBit/s`.
pub fn format_bandwidth(bits_per_second: f64) -> String {
    let units = [(1e12, "TBit/s"), (1e9, "GBit/s"), (1e6, "MBit/s"), (1e3, "kBit/s")];
    for (scale, unit) in units {
        if bits_per_second >= scale {
            let v = bits_per_second / scale;
            return if v >= 10.0 { format!("{v:.0} {unit}") } else { format!("{v:.1} {unit}") };
        }
    }
    format!("{bits_per_second:.0} Bit/s")
}

/// Renders rows as blocks of `p_target`, one block row per `p` and one
/// column per `K`, each cell listing distance, bandwidth, units and savings.
pub fn render_table(rows: &[RequirementRow]) -> String {
    let mut ks: Vec<u64> = rows.iter().map(|r| r.k).collect();
    ks.sort_unstable();
    ks.dedup();
    let mut targets: Vec<f64> = rows.iter().map(|r| r.p_target).collect();
    targets.sort_by(|a, b| b.total_cmp(a));
    targets.dedup();

    let width = 18;
    let mut out = String::new();
    let rule = "-".repeat(10 + (width + 3) * ks.len());
    for target in targets {
        let _ = writeln!(out, "{rule}");
        let _ = writeln!(out, "p_target = {target:e}");
        let _ = write!(out, "{:<10}", "p");
        for k in &ks {
            let _ = write!(out, " | {:<width$}", format!("K = {k}"));
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "{rule}");
        let mut ps: Vec<f64> = rows.iter().filter(|r| r.p_target == target).map(|r| r.p).collect();
        ps.sort_by(|a, b| b.total_cmp(a));
        ps.dedup();
        for p in ps {
            let cell = |k: u64| rows.iter().find(|r| r.p_target == target && r.p == p && r.k == k);
            let lines: [&dyn Fn(&RequirementRow) -> String; 4] = [
                &|r| format!("d = {}", r.report.d),
                &|r| format_bandwidth(r.report.bw_required),
                &|r| format!("{} dec. units", r.report.dec_units_lazy),
                &|r| format!("save {:.1}%", 100.0 * r.report.savings_fraction),
            ];
            for (i, line) in lines.iter().enumerate() {
                let label = if i == 0 { format!("{p:e}") } else { String::new() };
                let _ = write!(out, "{label:<10}");
                for &k in &ks {
                    let text = cell(k).map(|r| line(r)).unwrap_or_default();
                    let _ = write!(out, " | {text:<width$}");
                }
                let _ = writeln!(out);
            }
            let _ = writeln!(out, "{rule}");
        }
    }
    out
}

#[cfg(test)]
mod tests;
