//! Flat records for CSV output, one type per campaign, plus JSON and
//! aligned-text rendering.
//!
//! Column order is the field order of each row type:
//!
//! - `PFailRow`: p, d, rounds, trials, failures, p_fail, ci_low, ci_high, censored, seed
//! - `LogicalRow`: decoder, mode, p, d, trials, failures, rate, ci_low, ci_high, censored, fallbacks, seed
//! - `RuntimeRow`: decoder, p, d, trials, mean_s, p99_s, max_s, fallback_fraction, seed
//! - `BandwidthRow`: p, d, p_fail, ci_low, ci_high, censored, bw_no_lazy, bw_lazy, reduction
//! - `RequirementCsvRow`: p_target, p, K, p_fail, d, p_L, M, bw_required, bw_no_lazy,
//!   dec_units_lazy, dec_units_naive, savings_fraction

use std::str::FromStr;

use serde::Serialize;

use super::{BandwidthPoint, Estimate, LogicalEstimate, RuntimeStats};
use crate::resource_model::RequirementRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    Csv,
    Json,
    #[default]
    Table,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "table" => Ok(OutputFormat::Table),
            other => Err(format!("unknown output format `{other}` (expected csv, json or table)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PFailRow {
    pub p: f64,
    pub d: usize,
    pub rounds: usize,
    pub trials: u64,
    pub failures: u64,
    pub p_fail: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub censored: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogicalRow {
    pub decoder: String,
    pub mode: String,
    pub p: f64,
    pub d: usize,
    pub trials: u64,
    pub failures: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub censored: bool,
    pub fallbacks: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuntimeRow {
    pub decoder: String,
    pub p: f64,
    pub d: usize,
    pub trials: u64,
    pub mean_s: f64,
    pub p99_s: f64,
    pub max_s: f64,
    pub fallback_fraction: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandwidthRow {
    pub p: f64,
    pub d: usize,
    pub p_fail: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub censored: bool,
    pub bw_no_lazy: f64,
    pub bw_lazy: f64,
    pub reduction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RequirementCsvRow {
    pub p_target: f64,
    pub p: f64,
    #[serde(rename = "K")]
    pub k: u64,
    pub p_fail: f64,
    pub d: usize,
    #[serde(rename = "p_L")]
    pub p_l: f64,
    #[serde(rename = "M")]
    pub m: u64,
    pub bw_required: f64,
    pub bw_no_lazy: f64,
    pub dec_units_lazy: u64,
    pub dec_units_naive: u64,
    pub savings_fraction: f64,
}

pub fn p_fail_rows(points: &[(f64, usize, Estimate)]) -> Vec<PFailRow> {
    points
        .iter()
        .map(|&(p, d, e)| PFailRow {
            p,
            d,
            rounds: d,
            trials: e.trials,
            failures: e.failures,
            p_fail: e.value,
            ci_low: e.lower,
            ci_high: e.upper,
            censored: e.censored,
            seed: e.seed,
        })
        .collect()
}

pub fn logical_rows(estimates: &[LogicalEstimate]) -> Vec<LogicalRow> {
    estimates
        .iter()
        .map(|e| LogicalRow {
            decoder: e.decoder.name().to_string(),
            mode: e.mode.name().to_string(),
            p: e.p,
            d: e.d,
            trials: e.logical.trials,
            failures: e.logical.failures,
            rate: e.logical.value,
            ci_low: e.logical.lower,
            ci_high: e.logical.upper,
            censored: e.logical.censored,
            fallbacks: e.fallbacks,
            seed: e.logical.seed,
        })
        .collect()
}

pub fn runtime_rows(stats: &[RuntimeStats], p: f64, d: usize, seed: u64) -> Vec<RuntimeRow> {
    stats
        .iter()
        .map(|s| RuntimeRow {
            decoder: s.decoder.name().to_string(),
            p,
            d,
            trials: s.trials,
            mean_s: s.mean,
            p99_s: s.p99,
            max_s: s.max,
            fallback_fraction: s.fallback_fraction,
            seed,
        })
        .collect()
}

pub fn bandwidth_rows(points: &[BandwidthPoint]) -> Vec<BandwidthRow> {
    points
        .iter()
        .map(|b| BandwidthRow {
            p: b.p,
            d: b.d,
            p_fail: b.p_fail.value,
            ci_low: b.p_fail.lower,
            ci_high: b.p_fail.upper,
            censored: b.p_fail.censored,
            bw_no_lazy: b.bw_no_lazy,
            bw_lazy: b.bw_lazy,
            reduction: b.reduction(),
        })
        .collect()
}

pub fn requirement_rows(rows: &[RequirementRow]) -> Vec<RequirementCsvRow> {
    rows.iter()
        .map(|r| RequirementCsvRow {
            p_target: r.p_target,
            p: r.p,
            k: r.k,
            p_fail: r.p_fail,
            d: r.report.d,
            p_l: r.report.p_l,
            m: r.report.m,
            bw_required: r.report.bw_required,
            bw_no_lazy: r.report.bw_no_lazy,
            dec_units_lazy: r.report.dec_units_lazy,
            dec_units_naive: r.report.dec_units_naive,
            savings_fraction: r.report.savings_fraction,
        })
        .collect()
}

pub fn render_csv<T: Serialize>(rows: &[T]) -> Result<String, csv::Error> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    let bytes = writer.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn render_json<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("records serialize to json")
}

/// Space-aligned columns with a header line.
pub fn render_aligned<T: Serialize>(rows: &[T]) -> Result<String, csv::Error> {
    let text = render_csv(rows)?;
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(text.as_bytes());
    let records: Vec<Vec<String>> =
        reader.records().map(|r| r.map(|r| r.iter().map(str::to_string).collect())).collect::<Result<_, _>>()?;
    let columns = records.first().map_or(0, Vec::len);
    let widths: Vec<usize> =
        (0..columns).map(|c| records.iter().map(|r| r.get(c).map_or(0, String::len)).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for r in &records {
        let line: Vec<String> = r.iter().zip(&widths).map(|(cell, &w)| format!("{cell:<w$}")).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    Ok(out)
}
