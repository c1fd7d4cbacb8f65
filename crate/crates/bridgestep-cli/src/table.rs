//! Tabular file formats: results.csv and selection.csv.
//!
//! Deflections carry 6 significant digits, impact factors 5 decimals.
//! Readers look columns up by header name and ignore anything extra, so a
//! file can be round-tripped through other tools without breaking the
//! pipeline.

use anyhow::{bail, Context, Result};
use bridgestep::{ImpactRecord, TimeStepSelection};
use std::path::Path;

pub const RESULTS_HEADER: [&str; 7] = [
    "span_m",
    "axle_distance_m",
    "speed_kmh",
    "dt_s",
    "d_dyn_m",
    "d_st_m",
    "impact_factor",
];

pub const SELECTION_HEADER: [&str; 6] = [
    "span_m",
    "axle_distance_m",
    "speed_kmh",
    "chosen_dt_s",
    "converged",
    "k",
];

/// Plain decimal with `sig` significant digits (no exponent notation).
pub fn format_sig(value: f64, sig: usize) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let magnitude = value.abs().log10().floor() as i32;
    let decimals = (sig as i32 - 1 - magnitude).clamp(0, 17) as usize;
    format!("{value:.decimals$}")
}

pub fn write_results_csv(path: &Path, records: &[ImpactRecord]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    writer.write_record(RESULTS_HEADER)?;
    for r in records {
        writer.write_record([
            r.key.span_m.to_string(),
            r.key.axle_distance_m.to_string(),
            format_sig(r.key.speed_m_s * 3.6, 6),
            r.key.dt_s.to_string(),
            format_sig(r.d_dyn_m, 6),
            format_sig(r.d_st_m, 6),
            format!("{:.5}", r.impact_factor),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// One row of results.csv; the key fields keep their exact file text so
/// grouping never falls prey to float round-tripping.
#[derive(Debug, Clone)]
pub struct ResultRow {
    pub span_text: String,
    pub distance_text: String,
    pub speed_text: String,
    pub span_m: f64,
    pub axle_distance_m: f64,
    pub speed_kmh: f64,
    pub dt_s: f64,
    pub impact_factor: f64,
}

fn column_index(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h == name)
        .with_context(|| format!("missing column '{name}'"))
}

fn parse_field(record: &csv::StringRecord, idx: usize, name: &str, line: u64) -> Result<f64> {
    let text = record
        .get(idx)
        .with_context(|| format!("line {line}: missing field '{name}'"))?;
    text.parse::<f64>()
        .with_context(|| format!("line {line}: field '{name}' is not a number: '{text}'"))
}

pub fn read_results_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let mut reader = csv::Reader::from_path(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let headers = reader.headers()?.clone();
    let span_i = column_index(&headers, "span_m")?;
    let dist_i = column_index(&headers, "axle_distance_m")?;
    let speed_i = column_index(&headers, "speed_kmh")?;
    let dt_i = column_index(&headers, "dt_s")?;
    let if_i = column_index(&headers, "impact_factor")?;

    let mut rows = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let record = record?;
        let line = n as u64 + 2;
        rows.push(ResultRow {
            span_text: record.get(span_i).unwrap_or_default().to_string(),
            distance_text: record.get(dist_i).unwrap_or_default().to_string(),
            speed_text: record.get(speed_i).unwrap_or_default().to_string(),
            span_m: parse_field(&record, span_i, "span_m", line)?,
            axle_distance_m: parse_field(&record, dist_i, "axle_distance_m", line)?,
            speed_kmh: parse_field(&record, speed_i, "speed_kmh", line)?,
            dt_s: parse_field(&record, dt_i, "dt_s", line)?,
            impact_factor: parse_field(&record, if_i, "impact_factor", line)?,
        });
    }
    Ok(rows)
}

/// A selection row ready for writing; key fields echo the results.csv text.
#[derive(Debug, Clone)]
pub struct SelectionRow {
    pub span_text: String,
    pub distance_text: String,
    pub speed_text: String,
    pub chosen_dt_s: f64,
    pub converged: bool,
    pub k: f64,
}

pub fn write_selection_csv(path: &Path, rows: &[SelectionRow]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    writer.write_record(SELECTION_HEADER)?;
    for row in rows {
        writer.write_record([
            row.span_text.clone(),
            row.distance_text.clone(),
            row.speed_text.clone(),
            row.chosen_dt_s.to_string(),
            row.converged.to_string(),
            format_sig(row.k, 6),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_selection_csv(path: &Path) -> Result<Vec<TimeStepSelection>> {
    let mut reader = csv::Reader::from_path(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let headers = reader.headers()?.clone();
    let span_i = column_index(&headers, "span_m")?;
    let dist_i = column_index(&headers, "axle_distance_m")?;
    let speed_i = column_index(&headers, "speed_kmh")?;
    let dt_i = column_index(&headers, "chosen_dt_s")?;
    let conv_i = column_index(&headers, "converged")?;
    let k_i = column_index(&headers, "k")?;

    let mut selections = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let record = record?;
        let line = n as u64 + 2;
        let converged_text = record.get(conv_i).unwrap_or_default();
        let converged = match converged_text {
            "true" => true,
            "false" => false,
            other => bail!("line {line}: converged must be true/false, got '{other}'"),
        };
        selections.push(TimeStepSelection {
            condition: bridgestep::ConditionKey {
                span_m: parse_field(&record, span_i, "span_m", line)?,
                axle_distance_m: parse_field(&record, dist_i, "axle_distance_m", line)?,
                speed_m_s: parse_field(&record, speed_i, "speed_kmh", line)? / 3.6,
            },
            if_by_dt: Vec::new(),
            chosen_dt_s: parse_field(&record, dt_i, "chosen_dt_s", line)?,
            converged,
            k_value: parse_field(&record, k_i, "k", line)?,
        });
    }
    Ok(selections)
}
