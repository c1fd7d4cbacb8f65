//! Proper-time-step selection and the `dt = k * L / V` calibration sweep.
//!
//! For each condition (bridge, axle distance, speed) the impact factor is
//! computed on a descending grid of time steps. The proper step is the
//! largest one whose impact factor sits within tolerance of the finest-grid
//! value. Expressed as `k = dt * V / L`, the grid-wide minimum of the chosen
//! steps gives a conservative single-coefficient rule for picking a step
//! before running anything.

use crate::error::{Error, Result};
use crate::impact::{self, CaseKey, ConditionKey, ImpactRecord};
use crate::model::{positive_finite, AnalysisCase, BridgeSpec, TrainSpec};
use crate::solver;
use crate::statics;
use rayon::prelude::*;

/// Impact factors are compared at two decimals; half of the last retained
/// decimal is the default acceptability band.
pub const DEFAULT_IF_TOLERANCE: f64 = 0.01;

/// Conservative calibration coefficient for `dt = k * L / V`.
pub const RECOMMENDED_K: f64 = 0.0195;

/// Proper-step choice for one condition.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeStepSelection {
    pub condition: ConditionKey,
    /// `(dt, impact factor)` pairs, descending in `dt`.
    pub if_by_dt: Vec<(f64, f64)>,
    /// Largest grid step within tolerance of the finest-grid impact factor.
    pub chosen_dt_s: f64,
    /// False when even the second-smallest step missed the tolerance, i.e.
    /// the grid itself may be too coarse and `chosen_dt_s` is its floor.
    pub converged: bool,
    /// `chosen_dt * V / L`.
    pub k_value: f64,
}

/// Per-bridge spread of the calibration coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BridgeKStats {
    pub span_m: f64,
    pub k_min: f64,
    pub k_mean: f64,
    /// Population standard deviation over the bridge's conditions.
    pub k_std: f64,
    pub condition_count: usize,
}

/// Every selection plus the aggregated `k` statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationReport {
    pub selections: Vec<TimeStepSelection>,
    pub per_bridge: Vec<BridgeKStats>,
    pub global_k_min: f64,
}

/// Cartesian sweep definition.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyGrid {
    pub bridges: Vec<BridgeSpec>,
    pub axle_load_newton: f64,
    pub axle_count: usize,
    pub axle_distances_m: Vec<f64>,
    pub speeds_m_s: Vec<f64>,
    /// Strictly decreasing, at least two entries.
    pub dt_grid_s: Vec<f64>,
    pub if_tolerance: f64,
}

/// A case that could not be solved, with the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseFailure {
    pub key: CaseKey,
    pub message: String,
}

/// Full sweep output: every impact record, the calibration report, and any
/// per-case failures.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyOutput {
    pub records: Vec<ImpactRecord>,
    pub report: CalibrationReport,
    pub failures: Vec<CaseFailure>,
}

/// Picks the proper time step from `(dt, impact factor)` pairs.
///
/// The reference is the impact factor at the smallest step. Scanning from
/// the largest step down, the first step within `tolerance` of the
/// reference wins. When nothing larger qualifies the smallest step is
/// returned with `converged = false`.
pub fn select_proper_dt(if_by_dt: &[(f64, f64)], tolerance: f64) -> Result<(f64, bool)> {
    if if_by_dt.len() < 2 {
        return Err(Error::InsufficientGrid(if_by_dt.len()));
    }
    if !positive_finite(tolerance) {
        return Err(Error::InvalidCase(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    let mut rows: Vec<(f64, f64)> = if_by_dt.to_vec();
    rows.sort_by(|a, b| b.0.total_cmp(&a.0));
    for pair in rows.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(Error::DuplicateDt(pair[0].0));
        }
    }
    let reference = rows.last().expect("len >= 2").1;
    for (i, &(dt, factor)) in rows.iter().enumerate() {
        if (factor - reference).abs() <= tolerance {
            return Ok((dt, i < rows.len() - 1));
        }
    }
    unreachable!("the reference row always matches itself");
}

/// Calibration coefficient `k = dt * V / L` of one chosen step.
pub fn k_coefficient(chosen_dt_s: f64, speed_m_s: f64, span_m: f64) -> f64 {
    chosen_dt_s * speed_m_s / span_m
}

pub fn k_from_selection(selection: &TimeStepSelection) -> f64 {
    k_coefficient(
        selection.chosen_dt_s,
        selection.condition.speed_m_s,
        selection.condition.span_m,
    )
}

/// Recommended integration step `k * L / V` in seconds.
pub fn recommended_dt(span_m: f64, speed_m_s: f64, k: f64) -> f64 {
    debug_assert!(span_m > 0.0 && speed_m_s > 0.0);
    k * span_m / speed_m_s
}

/// Aggregates selections into per-bridge and global `k` statistics.
pub fn aggregate_k(selections: Vec<TimeStepSelection>) -> Result<CalibrationReport> {
    if selections.is_empty() {
        return Err(Error::EmptyStudy(
            "no selections to aggregate".to_string(),
        ));
    }
    let mut sorted = selections;
    sorted.sort_by_key(|s| s.condition);

    let mut per_bridge = Vec::new();
    let mut start = 0;
    while start < sorted.len() {
        let span = sorted[start].condition.span_m;
        let mut end = start;
        while end < sorted.len() && sorted[end].condition.span_m == span {
            end += 1;
        }
        let ks: Vec<f64> = sorted[start..end].iter().map(|s| s.k_value).collect();
        let n = ks.len() as f64;
        let mean = ks.iter().sum::<f64>() / n;
        let var = ks.iter().map(|k| (k - mean) * (k - mean)).sum::<f64>() / n;
        per_bridge.push(BridgeKStats {
            span_m: span,
            k_min: ks.iter().copied().fold(f64::INFINITY, f64::min),
            k_mean: mean,
            k_std: var.sqrt(),
            condition_count: ks.len(),
        });
        start = end;
    }
    let global_k_min = per_bridge
        .iter()
        .map(|b| b.k_min)
        .fold(f64::INFINITY, f64::min);
    Ok(CalibrationReport {
        selections: sorted,
        per_bridge,
        global_k_min,
    })
}

impl StudyGrid {
    pub fn validate(&self) -> Result<()> {
        if self.bridges.is_empty() {
            return Err(Error::InvalidSpec("study needs at least one bridge".into()));
        }
        for b in &self.bridges {
            b.validate()?;
        }
        if !positive_finite(self.axle_load_newton) {
            return Err(Error::InvalidSpec(format!(
                "axle_load_newton must be positive, got {}",
                self.axle_load_newton
            )));
        }
        if self.axle_count < 1 {
            return Err(Error::InvalidSpec("axle_count must be at least 1".into()));
        }
        if self.axle_distances_m.is_empty() {
            return Err(Error::InvalidSpec("study needs axle distances".into()));
        }
        if self.axle_distances_m.iter().any(|d| !positive_finite(*d)) {
            return Err(Error::InvalidSpec("axle distances must be positive".into()));
        }
        if self.speeds_m_s.is_empty() {
            return Err(Error::InvalidSpec("study needs speeds".into()));
        }
        if self.speeds_m_s.iter().any(|v| !positive_finite(*v)) {
            return Err(Error::InvalidSpec("speeds must be positive".into()));
        }
        if self.dt_grid_s.len() < 2 {
            return Err(Error::InsufficientGrid(self.dt_grid_s.len()));
        }
        if self
            .dt_grid_s
            .windows(2)
            .any(|w| !(w[1] < w[0] && w[1] > 0.0))
        {
            return Err(Error::InvalidSpec(
                "dt_grid_s must be strictly decreasing and positive".into(),
            ));
        }
        if !positive_finite(self.if_tolerance) {
            return Err(Error::InvalidSpec(format!(
                "if_tolerance must be positive, got {}",
                self.if_tolerance
            )));
        }
        Ok(())
    }

    /// The reference sweep: four bridges, 20 t axles on 13-24 m pitches,
    /// 34 speeds and the six-step grid.
    pub fn reference_study() -> Self {
        StudyGrid {
            bridges: reference_bridges(),
            axle_load_newton: 20.0 * 1000.0 * crate::model::GRAVITY_M_S2,
            axle_count: 10,
            axle_distances_m: reference_axle_distances_m(),
            speeds_m_s: reference_speeds_m_s(),
            dt_grid_s: reference_dt_grid_s(),
            if_tolerance: DEFAULT_IF_TOLERANCE,
        }
    }
}

/// The four reference bridges: 10/15/20/25 m spans at 12/8/6/4.8 Hz.
pub fn reference_bridges() -> Vec<BridgeSpec> {
    [(10.0, 12.0), (15.0, 8.0), (20.0, 6.0), (25.0, 4.8)]
        .iter()
        .map(|&(l, f1)| BridgeSpec::new(l, f1).expect("reference bridges are valid"))
        .collect()
}

/// Axle distances 13..=24 m in 1 m steps.
pub fn reference_axle_distances_m() -> Vec<f64> {
    (13..=24).map(|d| d as f64).collect()
}

/// 34 speeds from 109 km/h in 2.5 m/s increments (109..406 km/h).
pub fn reference_speeds_m_s() -> Vec<f64> {
    let start = 109.0 / 3.6;
    (0..34).map(|i| start + 2.5 * i as f64).collect()
}

/// The descending six-step grid 0.05..0.0025 s.
pub fn reference_dt_grid_s() -> Vec<f64> {
    vec![0.05, 0.025, 0.015, 0.01, 0.005, 0.0025]
}

struct ConditionOutcome {
    records: Vec<ImpactRecord>,
    selection: Option<TimeStepSelection>,
    failures: Vec<CaseFailure>,
}

/// Runs the full sweep: one solve per (bridge, distance, speed, dt), one
/// selection per condition, aggregated `k` statistics at the end.
///
/// Conditions are independent and evaluated on the current rayon pool; the
/// fold back into the report runs in a fixed order, so the output is
/// identical for any worker count.
pub fn run_study(grid: &StudyGrid) -> Result<StudyOutput> {
    grid.validate()?;

    // Static maxima depend only on (bridge, distance); share them across
    // speeds and time steps.
    let static_max: Vec<Vec<f64>> = grid
        .bridges
        .iter()
        .map(|bridge| {
            grid.axle_distances_m
                .iter()
                .map(|&d| {
                    let train = TrainSpec {
                        axle_load_newton: grid.axle_load_newton,
                        axle_count: grid.axle_count,
                        axle_spacing_m: d,
                    };
                    statics::max_static_sweep(bridge, &train).max_midpoint_deflection_m
                })
                .collect()
        })
        .collect();

    let mut conditions = Vec::new();
    for (bi, bridge) in grid.bridges.iter().enumerate() {
        for (di, &d) in grid.axle_distances_m.iter().enumerate() {
            for &speed in &grid.speeds_m_s {
                conditions.push((bi, di, *bridge, d, speed));
            }
        }
    }

    let outcomes: Vec<ConditionOutcome> = conditions
        .par_iter()
        .map(|&(bi, di, bridge, d, speed)| {
            let train = TrainSpec {
                axle_load_newton: grid.axle_load_newton,
                axle_count: grid.axle_count,
                axle_spacing_m: d,
            };
            let condition = ConditionKey {
                span_m: bridge.span_m,
                axle_distance_m: d,
                speed_m_s: speed,
            };
            let d_st = static_max[bi][di];
            let mut records = Vec::with_capacity(grid.dt_grid_s.len());
            let mut failures = Vec::new();
            for &dt in &grid.dt_grid_s {
                let key = condition.with_dt(dt);
                let result = AnalysisCase::new(bridge, train, speed, dt)
                    .and_then(|case| solver::solve_case(&case))
                    .and_then(|history| {
                        let factor = impact::impact_factor(history.max_abs_deflection_m, d_st)?;
                        Ok(ImpactRecord {
                            key,
                            d_dyn_m: history.max_abs_deflection_m,
                            d_st_m: d_st,
                            impact_factor: factor,
                        })
                    });
                match result {
                    Ok(record) => records.push(record),
                    Err(err) => failures.push(CaseFailure {
                        key,
                        message: err.to_string(),
                    }),
                }
            }
            let selection = if failures.is_empty() {
                let if_by_dt: Vec<(f64, f64)> = records
                    .iter()
                    .map(|r| (r.key.dt_s, r.impact_factor))
                    .collect();
                select_proper_dt(&if_by_dt, grid.if_tolerance)
                    .ok()
                    .map(|(chosen_dt_s, converged)| TimeStepSelection {
                        condition,
                        k_value: k_coefficient(chosen_dt_s, speed, bridge.span_m),
                        if_by_dt,
                        chosen_dt_s,
                        converged,
                    })
            } else {
                None
            };
            ConditionOutcome {
                records,
                selection,
                failures,
            }
        })
        .collect();

    let mut records = Vec::new();
    let mut selections = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        records.extend(outcome.records);
        selections.extend(outcome.selection);
        failures.extend(outcome.failures);
    }
    records.sort_by_key(|r| r.key);
    failures.sort_by_key(|f| f.key);
    let report = aggregate_k(selections)?;
    Ok(StudyOutput {
        records,
        report,
        failures,
    })
}
