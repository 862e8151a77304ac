//! Monte Carlo campaigns: lazy failure rates, logical error rates, decoder
//! timings, bandwidth curves and provisioning tables.
//!
//! Trials are spread over a rayon pool. Every trial draws from its own
//! seeded stream and per-trial results are combined in trial order, so the
//! outcome does not depend on the number of workers.

mod output;
mod stats;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use output::{
    bandwidth_rows, logical_rows, p_fail_rows, render_aligned, render_csv, render_json, requirement_rows, runtime_rows,
    BandwidthRow,
    LogicalRow, OutputFormat, PFailRow, RequirementCsvRow, RuntimeRow,
};
pub use stats::{summarize, wilson_interval, Estimate, Z95};

use crate::code_model::{Basis, CircuitSchedule, CodeLayout, LayoutError};
use crate::decoding_graph::{
    build_decoding_graph, data_errors_to_syndrome, faults_to_syndrome, DecodingGraph, GraphError, GraphWindow, Syndrome,
};
use crate::full_decoders::{DecodeError, Decoder, DecoderKind};
use crate::lazy_decoder::{lazy_decode, window_message_bits, FailureReason};
use crate::noise::{sample_data_errors_with, simulate_circuit, FaultSampler, NoiseError, NoiseParams};
use crate::resource_model::{
    bandwidth_per_qubit, requirement_report_with, select_distance, ReportOptions, RequirementRow,
    ResourceError, SystemParams,
};
use crate::rng::trial_rng;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Resource(#[from] ResourceError),
    #[error("could not start the worker pool: {0}")]
    Pool(String),
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
}

/// Trial count, master seed and worker count of a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Campaign {
    pub trials: u64,
    pub seed: u64,
    /// 0 picks one worker per core.
    pub workers: usize,
}

impl Campaign {
    pub fn new(trials: u64, seed: u64) -> Self {
        Campaign { trials, seed, workers: 0 }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    fn pool(&self) -> Result<rayon::ThreadPool, ExperimentError> {
        rayon::ThreadPoolBuilder::new().num_threads(self.workers).build().map_err(|e| ExperimentError::Pool(e.to_string()))
    }

    /// Runs `trial` for every index with per-worker state from `init` and
    /// returns the results in trial order.
    fn run<S, T, I, F>(&self, init: I, trial: F) -> Result<Vec<T>, ExperimentError>
    where
        T: Send,
        I: Fn() -> S + Sync + Send,
        F: Fn(&mut S, u64) -> T + Sync + Send,
    {
        Ok(self.pool()?.install(|| (0..self.trials).into_par_iter().map_init(&init, |s, t| trial(s, t)).collect()))
    }

    fn count<S, I, F>(&self, init: I, trial: F) -> Result<u64, ExperimentError>
    where
        I: Fn() -> S + Sync + Send,
        F: Fn(&mut S, u64) -> bool + Sync + Send,
    {
        Ok(self.pool()?.install(|| {
            (0..self.trials).into_par_iter().map_init(&init, |s, t| trial(s, t) as u64).sum()
        }))
    }
}

fn check_rate(p: f64) -> Result<(), ExperimentError> {
    if (0.0..1.0).contains(&p) {
        Ok(())
    } else {
        Err(ExperimentError::InvalidParams(format!("p = {p} must lie in [0, 1)")))
    }
}

/// Failure rate of the lazy decoder on `d`-round windows of circuit-level
/// noise on the rotated code, X checks.
pub fn estimate_p_fail(p: f64, d: usize, campaign: &Campaign) -> Result<Estimate, ExperimentError> {
    check_rate(p)?;
    let layout = CodeLayout::rotated_surface(d)?;
    let schedule = CircuitSchedule::new(&layout);
    let noise = NoiseParams::circuit(p)?;
    let graph = build_decoding_graph(&layout, &schedule, d, noise, Basis::X)?;
    let sampler = FaultSampler::new(&schedule, d, noise)?;
    let failures = campaign.count(Vec::new, |faults, t| {
        sampler.sample_into(&mut trial_rng(campaign.seed, t), faults);
        let s = faults_to_syndrome(&graph, faults).expect("sampled faults lie in the graph window");
        !lazy_decode(&graph, &s).is_success()
    })?;
    Ok(Estimate::from_counts(failures, campaign.trials, campaign.seed))
}

/// Noise model and code of a logical-error experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LogicalMode {
    /// Toric code, independent data errors, perfect syndrome.
    PerfectMeasurement,
    /// Rotated code, `d` noisy rounds of circuit-level noise between two
    /// noiseless rounds.
    CircuitWindow,
}

impl LogicalMode {
    pub fn name(self) -> &'static str {
        match self {
            LogicalMode::PerfectMeasurement => "perfect",
            LogicalMode::CircuitWindow => "circuit",
        }
    }
}

/// What the lazy stage did in one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LazyStatus {
    NotRun,
    Success,
    Failure(FailureReason),
    /// The lazy stage failed and the fallback returned an error.
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialResult {
    pub trial: u64,
    pub lazy: LazyStatus,
    pub used_fallback: bool,
    /// `None` when no correction was produced and the trial was not scored.
    pub logical_failure: Option<bool>,
    /// Seconds spent in the decode call.
    pub wall_time: f64,
}

impl TrialResult {
    /// A trial counts as a logical failure when the correction leaves a
    /// logical error or when no correction was produced at all.
    pub fn failed(&self) -> bool {
        self.logical_failure.unwrap_or(true)
    }
}

/// Graph, sampler and scoring for one logical-error experiment.
struct LogicalSetup {
    p: f64,
    layout: CodeLayout,
    schedule: CircuitSchedule,
    graph: DecodingGraph,
    sampler: Option<FaultSampler>,
    rounds: usize,
}

impl LogicalSetup {
    fn new(mode: LogicalMode, p: f64, d: usize) -> Result<Self, ExperimentError> {
        check_rate(p)?;
        match mode {
            LogicalMode::PerfectMeasurement => {
                let layout = CodeLayout::toric(d)?;
                let schedule = CircuitSchedule::new(&layout);
                let graph = DecodingGraph::perfect_measurement(&layout, Basis::X, p)?;
                Ok(LogicalSetup { p, layout, schedule, graph, sampler: None, rounds: 1 })
            }
            LogicalMode::CircuitWindow => {
                let layout = CodeLayout::rotated_surface(d)?;
                let schedule = CircuitSchedule::new(&layout);
                let noise = NoiseParams::circuit(p)?;
                let window = GraphWindow::closed(d);
                let graph = DecodingGraph::circuit_level(&layout, &schedule, &window, noise, Basis::X)?;
                let sampler = FaultSampler::with_noisy_rounds(&schedule, window.rounds, window.noisy.clone(), noise)?;
                Ok(LogicalSetup { p, layout, schedule, graph, sampler: Some(sampler), rounds: window.rounds })
            }
        }
    }

    /// Syndrome and the data errors left at the end of trial `t`.
    fn instance(&self, seed: u64, t: u64) -> (Syndrome, Vec<usize>) {
        let mut rng = trial_rng(seed, t);
        match &self.sampler {
            None => {
                let errors = sample_data_errors_with(&self.layout, self.p, &mut rng);
                let s = data_errors_to_syndrome(&self.graph, &errors).expect("data qubits of the layout");
                (s, errors)
            }
            Some(sampler) => {
                let faults = sampler.sample(&mut rng);
                let s = faults_to_syndrome(&self.graph, &faults).expect("sampled faults lie in the graph window");
                let record = simulate_circuit(&self.schedule, self.rounds, &faults).expect("sampled faults match the schedule");
                (s, record.data_errors(Basis::X))
            }
        }
    }

    fn trial(&self, decoder: &mut Decoder, seed: u64, t: u64) -> TrialResult {
        let (s, errors) = self.instance(seed, t);
        let start = Instant::now();
        let outcome = decoder.decode(&s);
        let wall_time = start.elapsed().as_secs_f64();
        let uses_lazy = decoder.kind().uses_lazy();
        match outcome {
            Ok(rec) => {
                let lazy = match (uses_lazy, rec.lazy_failure) {
                    (false, _) => LazyStatus::NotRun,
                    (true, None) => LazyStatus::Success,
                    (true, Some(r)) => LazyStatus::Failure(r),
                };
                let mut residual = errors;
                residual.extend(rec.correction.data_effect(&self.graph));
                // an inconsistent residual is scored as a failure
                let logical = self.layout.is_logical_failure(Basis::X, &residual).unwrap_or(true);
                TrialResult { trial: t, lazy, used_fallback: rec.used_fallback, logical_failure: Some(logical), wall_time }
            }
            Err(DecodeError::LazyFailed(r)) => TrialResult {
                trial: t,
                lazy: LazyStatus::Failure(r),
                used_fallback: false,
                logical_failure: None,
                wall_time,
            },
            Err(_) => TrialResult {
                trial: t,
                lazy: if uses_lazy { LazyStatus::Unknown } else { LazyStatus::NotRun },
                used_fallback: !matches!(decoder.kind(), DecoderKind::Lazy),
                logical_failure: None,
                wall_time,
            },
        }
    }
}

/// Per-trial results of a logical-error experiment, in trial order.
pub fn simulate_trials(
    kind: DecoderKind,
    p: f64,
    d: usize,
    mode: LogicalMode,
    campaign: &Campaign,
) -> Result<Vec<TrialResult>, ExperimentError> {
    let setup = LogicalSetup::new(mode, p, d)?;
    campaign.run(|| Decoder::new(&setup.graph, kind), |dec, t| setup.trial(dec, campaign.seed, t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogicalEstimate {
    pub decoder: DecoderKind,
    pub mode: LogicalMode,
    pub p: f64,
    pub d: usize,
    pub logical: Estimate,
    /// Trials decoded by the fallback decoder.
    pub fallbacks: u64,
}

pub fn estimate_logical_error(
    kind: DecoderKind,
    p: f64,
    d: usize,
    mode: LogicalMode,
    campaign: &Campaign,
) -> Result<LogicalEstimate, ExperimentError> {
    let setup = LogicalSetup::new(mode, p, d)?;
    let (failures, fallbacks) = campaign
        .run(
            || Decoder::new(&setup.graph, kind),
            |dec, t| {
                let r = setup.trial(dec, campaign.seed, t);
                (r.failed() as u64, r.used_fallback as u64)
            },
        )?
        .into_iter()
        .fold((0, 0), |(a, b), (f, u)| (a + f, b + u));
    Ok(LogicalEstimate {
        decoder: kind,
        mode,
        p,
        d,
        logical: Estimate::from_counts(failures, campaign.trials, campaign.seed),
        fallbacks,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RuntimeStats {
    pub decoder: DecoderKind,
    pub trials: u64,
    /// Seconds per decode call.
    pub mean: f64,
    pub p99: f64,
    pub max: f64,
    /// Fraction of calls handled by the fallback decoder.
    pub fallback_fraction: f64,
}

/// Times every decoder kind on the same stream of toric-code syndromes with
/// perfect measurements. Instances are drawn up front; each kind then runs
/// alone on one thread and only the decode call is timed.
pub fn benchmark_runtime(
    kinds: &[DecoderKind],
    p: f64,
    d: usize,
    campaign: &Campaign,
) -> Result<Vec<RuntimeStats>, ExperimentError> {
    let setup = LogicalSetup::new(LogicalMode::PerfectMeasurement, p, d)?;
    let instances: Vec<Syndrome> = campaign.run(|| (), |_, t| setup.instance(campaign.seed, t).0)?;
    let mut out = Vec::with_capacity(kinds.len());
    for &kind in kinds {
        let mut decoder = Decoder::new(&setup.graph, kind);
        let mut times = Vec::with_capacity(instances.len());
        let mut fallbacks = 0u64;
        for s in &instances {
            let start = Instant::now();
            let result = decoder.decode(s);
            times.push(start.elapsed().as_secs_f64());
            if let Ok(rec) = std::hint::black_box(result) {
                fallbacks += rec.used_fallback as u64;
            }
        }
        let (mean, p99, max) = summarize(&mut times);
        let fallback_fraction = if instances.is_empty() { 0.0 } else { fallbacks as f64 / instances.len() as f64 };
        out.push(RuntimeStats { decoder: kind, trials: instances.len() as u64, mean, p99, max, fallback_fraction });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandwidthPoint {
    pub p: f64,
    pub d: usize,
    pub p_fail: Estimate,
    /// Bits per second per logical qubit without lazy decoding.
    pub bw_no_lazy: f64,
    /// Average bits per second per logical qubit with lazy decoding.
    pub bw_lazy: f64,
}

impl BandwidthPoint {
    /// `bw_no_lazy / bw_lazy`; infinite when nothing is sent.
    pub fn reduction(&self) -> f64 {
        self.bw_no_lazy / self.bw_lazy
    }
}

/// Average bandwidth per logical qubit when each basis sends its whole
/// window of syndrome bits only when the lazy decoder fails.
pub fn lazy_bandwidth(p_fail: f64, d: usize, tau: f64) -> f64 {
    2.0 * p_fail * window_message_bits(d) as f64 / (d as f64 * tau)
}

pub fn bandwidth_curve(
    p_list: &[f64],
    d_list: &[usize],
    tau: f64,
    campaign: &Campaign,
) -> Result<Vec<BandwidthPoint>, ExperimentError> {
    let mut out = Vec::with_capacity(p_list.len() * d_list.len());
    for &p in p_list {
        for &d in d_list {
            let p_fail = estimate_p_fail(p, d, campaign)?;
            out.push(BandwidthPoint {
                p,
                d,
                p_fail,
                bw_no_lazy: bandwidth_per_qubit(d, tau),
                bw_lazy: lazy_bandwidth(p_fail.value, d, tau),
            });
        }
    }
    Ok(out)
}

/// Measured failure rate behind one row group of a provisioning table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasuredPFail {
    pub p: f64,
    pub d: usize,
    pub estimate: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableReproduction {
    pub rows: Vec<RequirementRow>,
    pub measured: Vec<MeasuredPFail>,
}

/// Provisioning table for `p_target`: for each `p` the distance is selected,
/// `p_fail` is measured at that distance, and `M` follows from `options`.
/// A censored measurement enters with its upper bound.
pub fn reproduce_table(
    p_target: f64,
    p_list: &[f64],
    k_list: &[u64],
    tau: f64,
    options: ReportOptions,
    campaign: &Campaign,
) -> Result<TableReproduction, ExperimentError> {
    let mut rows = Vec::new();
    let mut measured = Vec::new();
    for &p in p_list {
        let d = select_distance(p, p_target)?;
        let estimate = estimate_p_fail(p, d, campaign)?;
        measured.push(MeasuredPFail { p, d, estimate });
        let p_fail = estimate.conservative();
        for &k in k_list {
            let params = SystemParams { p, p_target, k, tau, p_fail };
            let report = requirement_report_with(&params, options)?;
            rows.push(RequirementRow { p_target, p, k, p_fail, report });
        }
    }
    Ok(TableReproduction { rows, measured })
}
