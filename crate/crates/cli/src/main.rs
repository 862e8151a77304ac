//! `lazyqec` command line: Monte Carlo campaigns, decoder benchmarks,
//! bandwidth curves, provisioning tables and decoding-graph dumps.
//!
//! Exit status is 0 on success, 1 for usage errors and 2 when the parameters
//! are infeasible (no code distance reaches the target).

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lazyqec::code_model::{Basis, CircuitSchedule, CodeLayout};
use lazyqec::decoding_graph::{DecodingGraph, GraphWindow};
use lazyqec::experiments::{
    bandwidth_curve, bandwidth_rows, benchmark_runtime, estimate_logical_error, estimate_p_fail, logical_rows,
    p_fail_rows, render_aligned, render_csv, render_json, reproduce_table, requirement_rows, runtime_rows, Campaign,
    ExperimentError, LogicalMode,
};
use lazyqec::full_decoders::DecoderKind;
use lazyqec::noise::NoiseParams;
use lazyqec::resource_model::{
    render_table, requirement_report_with, MMethod, ReportOptions, RequirementRow, ResourceError, SystemParams,
    TaskBandwidth,
};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "lazyqec", version, about = "Lazy pre-decoding simulations and decoder resource planning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the lazy failure rate, or the logical error rate of a decoder.
    Simulate(SimulateArgs),
    /// Provisioning table: distance, bandwidth and decoding units per (p, K).
    Requirements(RequirementsArgs),
    /// Time decoders on identical toric-code syndromes with perfect measurements.
    Benchmark(BenchmarkArgs),
    /// Average syndrome bandwidth per logical qubit with and without lazy decoding.
    Bandwidth(BandwidthArgs),
    /// Write a decoding graph as JSON.
    GraphDump(GraphDumpArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long, value_enum, default_value_t = Out::Table)]
    out: Out,
}

impl Common {
    fn campaign(&self) -> Campaign {
        Campaign::new(self.trials, self.seed).with_workers(self.workers)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Out {
    Csv,
    Json,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Circuit,
    Perfect,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Exact,
    Chernoff,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BasisArg {
    X,
    Z,
}

#[derive(Args)]
struct SimulateArgs {
    /// Physical error rates (comma separated).
    #[arg(long, value_delimiter = ',', required = true)]
    p: Vec<f64>,
    /// Code distances (comma separated).
    #[arg(long, value_delimiter = ',', required = true)]
    d: Vec<usize>,
    /// Decoder for a logical-error-rate run; without it the lazy failure rate is estimated.
    #[arg(long, value_parser = parse_decoder)]
    decoder: Option<DecoderKind>,
    #[arg(long, value_enum, default_value_t = Mode::Circuit)]
    mode: Mode,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct RequirementsArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [1e-3, 1e-4, 1e-5])]
    p: Vec<f64>,
    /// Logical qubit counts (comma separated).
    #[arg(long, value_delimiter = ',', default_values_t = [100, 1000, 10_000])]
    k: Vec<u64>,
    #[arg(long, default_value_t = 1e-15)]
    p_target: f64,
    /// Use this lazy failure rate instead of measuring it.
    #[arg(long)]
    p_fail: Option<f64>,
    /// How M is derived from p_fail.
    #[arg(long, value_enum, default_value_t = Method::Exact)]
    method: Method,
    /// Charge every decoding task the bandwidth of both bases.
    #[arg(long)]
    full_task_bandwidth: bool,
    #[arg(long, default_value_t = 1000.0)]
    tau_ns: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[arg(long, value_delimiter = ',', value_parser = parse_decoder, default_values = ["uf", "mwpm", "lazy+uf", "lazy+mwpm"])]
    decoder: Vec<DecoderKind>,
    #[arg(long, default_value_t = 1e-3)]
    p: f64,
    #[arg(long, default_value_t = 20)]
    d: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BandwidthArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [1e-3, 5e-4, 1e-4])]
    p: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [5, 15, 25])]
    d: Vec<usize>,
    #[arg(long, default_value_t = 1000.0)]
    tau_ns: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct GraphDumpArgs {
    #[arg(long, default_value_t = 1e-3)]
    p: f64,
    #[arg(long)]
    d: usize,
    /// Syndrome rounds (circuit mode); defaults to d.
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long, value_enum, default_value_t = Mode::Circuit)]
    mode: Mode,
    #[arg(long, value_enum, default_value_t = BasisArg::X)]
    basis: BasisArg,
}

fn parse_decoder(s: &str) -> Result<DecoderKind, String> {
    DecoderKind::from_name(s).ok_or_else(|| format!("unknown decoder `{s}` (expected lazy, uf, mwpm, lazy+uf or lazy+mwpm)"))
}

enum Failure {
    Usage(String),
    Infeasible(String),
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Resource(r) => r.into(),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<ResourceError> for Failure {
    fn from(e: ResourceError) -> Self {
        match e {
            ResourceError::AboveThreshold(_) => Failure::Infeasible(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn emit<T: Serialize>(rows: &[T], out: Out) -> Result<String, Failure> {
    let text = match out {
        Out::Csv => render_csv(rows),
        Out::Json => Ok(render_json(rows) + "\n"),
        Out::Table => render_aligned(rows),
    };
    text.map_err(|e| Failure::Usage(e.to_string()))
}

fn tau(tau_ns: f64) -> Result<f64, Failure> {
    if tau_ns > 0.0 && tau_ns.is_finite() {
        Ok(tau_ns * 1e-9)
    } else {
        Err(Failure::Usage(format!("--tau-ns must be positive, got {tau_ns}")))
    }
}

fn simulate(args: &SimulateArgs) -> Result<String, Failure> {
    let campaign = args.common.campaign();
    match args.decoder {
        None => {
            if args.mode == Mode::Perfect {
                return Err(Failure::Usage("the lazy failure rate is defined for circuit-level noise only".into()));
            }
            let mut points = Vec::new();
            for &p in &args.p {
                for &d in &args.d {
                    points.push((p, d, estimate_p_fail(p, d, &campaign)?));
                }
            }
            emit(&p_fail_rows(&points), args.common.out)
        }
        Some(kind) => {
            let mode = match args.mode {
                Mode::Circuit => LogicalMode::CircuitWindow,
                Mode::Perfect => LogicalMode::PerfectMeasurement,
            };
            let mut estimates = Vec::new();
            for &p in &args.p {
                for &d in &args.d {
                    estimates.push(estimate_logical_error(kind, p, d, mode, &campaign)?);
                }
            }
            emit(&logical_rows(&estimates), args.common.out)
        }
    }
}

fn requirements(args: &RequirementsArgs) -> Result<String, Failure> {
    let tau = tau(args.tau_ns)?;
    let options = ReportOptions {
        method: match args.method {
            Method::Exact => MMethod::Exact,
            Method::Chernoff => MMethod::Chernoff,
        },
        task_bandwidth: if args.full_task_bandwidth { TaskBandwidth::FullQubit } else { TaskBandwidth::PerBasis },
    };
    let mut notes = String::new();
    let rows: Vec<RequirementRow> = match args.p_fail {
        Some(p_fail) => {
            let mut rows = Vec::new();
            for &p in &args.p {
                for &k in &args.k {
                    let params = SystemParams { p, p_target: args.p_target, k, tau, p_fail };
                    let report = requirement_report_with(&params, options)?;
                    rows.push(RequirementRow { p_target: args.p_target, p, k, p_fail, report });
                }
            }
            rows
        }
        None => {
            let table = reproduce_table(args.p_target, &args.p, &args.k, tau, options, &args.common.campaign())?;
            for m in &table.measured {
                let e = m.estimate;
                notes.push_str(&format!(
                    "p = {:e}: d = {}, p_fail = {:.3e} [{:.3e}, {:.3e}] over {} windows{}\n",
                    m.p,
                    m.d,
                    e.value,
                    e.lower,
                    e.upper,
                    e.trials,
                    if e.censored { " (no failure seen, upper bound used)" } else { "" }
                ));
            }
            table.rows
        }
    };
    match args.common.out {
        Out::Table => Ok(render_table(&rows) + &notes),
        out => emit(&requirement_rows(&rows), out),
    }
}

fn benchmark(args: &BenchmarkArgs) -> Result<String, Failure> {
    let stats = benchmark_runtime(&args.decoder, args.p, args.d, &args.common.campaign())?;
    emit(&runtime_rows(&stats, args.p, args.d, args.common.seed), args.common.out)
}

fn bandwidth(args: &BandwidthArgs) -> Result<String, Failure> {
    let points = bandwidth_curve(&args.p, &args.d, tau(args.tau_ns)?, &args.common.campaign())?;
    emit(&bandwidth_rows(&points), args.common.out)
}

fn graph_dump(args: &GraphDumpArgs) -> Result<String, Failure> {
    let basis = match args.basis {
        BasisArg::X => Basis::X,
        BasisArg::Z => Basis::Z,
    };
    let usage = |e: &dyn std::fmt::Display| Failure::Usage(e.to_string());
    let graph = match args.mode {
        Mode::Perfect => {
            let layout = CodeLayout::toric(args.d).map_err(|e| usage(&e))?;
            DecodingGraph::perfect_measurement(&layout, basis, args.p).map_err(|e| usage(&e))?
        }
        Mode::Circuit => {
            let layout = CodeLayout::rotated_surface(args.d).map_err(|e| usage(&e))?;
            let schedule = CircuitSchedule::new(&layout);
            let noise = NoiseParams::circuit(args.p).map_err(|e| usage(&e))?;
            let window = GraphWindow::open(args.rounds.unwrap_or(args.d));
            DecodingGraph::circuit_level(&layout, &schedule, &window, noise, basis).map_err(|e| usage(&e))?
        }
    };
    Ok(graph.dump().to_json() + "\n")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Requirements(a) => requirements(a),
        Command::Benchmark(a) => benchmark(a),
        Command::Bandwidth(a) => bandwidth(a),
        Command::GraphDump(a) => graph_dump(a),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Infeasible(msg)) => {
            eprintln!("infeasible: {msg}");
            ExitCode::from(2)
        }
    }
}
