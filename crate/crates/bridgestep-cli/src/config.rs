//! Study configuration file: TOML with a strict schema.
//!
//! Every key is optional and falls back to the reference-study defaults;
//! unknown keys are rejected outright so a typo cannot silently run a
//! different study. Unit suffixes are part of the key names. Speeds are
//! given in km/h, axle loads in metric tons; everything is converted to SI
//! here, at the boundary.

use anyhow::{bail, Context, Result};
use bridgestep::{calibration, BridgeSpec, StudyGrid, GRAVITY_M_S2};
use serde::Deserialize;
use std::path::PathBuf;

pub const DEFAULT_AXLE_LOAD_TON: f64 = 20.0;
pub const DEFAULT_AXLE_COUNT: usize = 10;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    bridges: Option<Vec<RawBridge>>,
    train: Option<RawTrain>,
    speeds: Option<RawSpeeds>,
    dt_grid_s: Option<Vec<f64>>,
    if_tolerance: Option<f64>,
    workers: Option<usize>,
    output_dir: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBridge {
    span_m: f64,
    f1_hz: f64,
    damping_ratio: Option<f64>,
    mode_count: Option<usize>,
    mass_per_length_kg_m: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrain {
    axle_load_ton: Option<f64>,
    axle_count: Option<usize>,
    axle_spacing_m: Option<RawSpacing>,
}

/// A single spacing or a list of spacings to sweep.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawSpacing {
    One(f64),
    Many(Vec<f64>),
}

/// Either an explicit list of speeds in km/h or a uniform ramp.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawSpeeds {
    ListKmh(Vec<f64>),
    Ramp(RawRamp),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRamp {
    start_kmh: f64,
    step_m_s: f64,
    count: usize,
}

/// Fully resolved study configuration.
#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub grid: StudyGrid,
    pub workers: Option<usize>,
    pub output_dir: Option<PathBuf>,
    /// Dotted paths of every field that fell back to its default.
    pub defaults_used: Vec<String>,
}

pub fn parse_config(text: &str) -> Result<StudyConfig> {
    let raw: RawConfig = toml::from_str(text).context("malformed config")?;
    let mut defaults = Vec::new();

    let bridges: Vec<BridgeSpec> = match raw.bridges {
        None => {
            defaults.push("bridges".to_string());
            calibration::reference_bridges()
        }
        Some(list) => {
            if list.is_empty() {
                bail!("config: bridges list must not be empty");
            }
            let mut out = Vec::with_capacity(list.len());
            for (i, b) in list.iter().enumerate() {
                if b.damping_ratio.is_none() {
                    defaults.push(format!("bridges[{i}].damping_ratio"));
                }
                if b.mode_count.is_none() {
                    defaults.push(format!("bridges[{i}].mode_count"));
                }
                if b.mass_per_length_kg_m.is_none() {
                    defaults.push(format!("bridges[{i}].mass_per_length_kg_m"));
                }
                let mut bridge = BridgeSpec::new(b.span_m, b.f1_hz)
                    .with_context(|| format!("config: bridges[{i}]"))?;
                if let Some(xi) = b.damping_ratio {
                    bridge = bridge
                        .with_damping(xi)
                        .with_context(|| format!("config: bridges[{i}].damping_ratio"))?;
                }
                if let Some(modes) = b.mode_count {
                    bridge = bridge
                        .with_mode_count(modes)
                        .with_context(|| format!("config: bridges[{i}].mode_count"))?;
                }
                if let Some(mass) = b.mass_per_length_kg_m {
                    bridge = bridge
                        .with_mass_per_length(mass)
                        .with_context(|| format!("config: bridges[{i}].mass_per_length_kg_m"))?;
                }
                out.push(bridge);
            }
            out
        }
    };

    let (axle_load_ton, axle_count, spacings) = match raw.train {
        None => {
            defaults.push("train".to_string());
            (
                DEFAULT_AXLE_LOAD_TON,
                DEFAULT_AXLE_COUNT,
                calibration::reference_axle_distances_m(),
            )
        }
        Some(train) => {
            let load = train.axle_load_ton.unwrap_or_else(|| {
                defaults.push("train.axle_load_ton".to_string());
                DEFAULT_AXLE_LOAD_TON
            });
            let count = train.axle_count.unwrap_or_else(|| {
                defaults.push("train.axle_count".to_string());
                DEFAULT_AXLE_COUNT
            });
            let spacings = match train.axle_spacing_m {
                None => {
                    defaults.push("train.axle_spacing_m".to_string());
                    calibration::reference_axle_distances_m()
                }
                Some(RawSpacing::One(d)) => vec![d],
                Some(RawSpacing::Many(list)) => list,
            };
            (load, count, spacings)
        }
    };
    if !(axle_load_ton.is_finite() && axle_load_ton > 0.0) {
        bail!("config: train.axle_load_ton must be positive, got {axle_load_ton}");
    }

    let speeds_m_s: Vec<f64> = match raw.speeds {
        None => {
            defaults.push("speeds".to_string());
            calibration::reference_speeds_m_s()
        }
        Some(RawSpeeds::ListKmh(list)) => {
            if list.is_empty() {
                bail!("config: speeds list must not be empty");
            }
            list.iter().map(|v| v / 3.6).collect()
        }
        Some(RawSpeeds::Ramp(ramp)) => {
            if ramp.count == 0 {
                bail!("config: speeds.count must be at least 1");
            }
            if !(ramp.start_kmh.is_finite() && ramp.start_kmh > 0.0) {
                bail!("config: speeds.start_kmh must be positive");
            }
            if !(ramp.step_m_s.is_finite() && ramp.step_m_s > 0.0) {
                bail!("config: speeds.step_m_s must be positive");
            }
            let start = ramp.start_kmh / 3.6;
            (0..ramp.count)
                .map(|i| start + i as f64 * ramp.step_m_s)
                .collect()
        }
    };

    let dt_grid_s = raw.dt_grid_s.unwrap_or_else(|| {
        defaults.push("dt_grid_s".to_string());
        calibration::reference_dt_grid_s()
    });
    let if_tolerance = raw.if_tolerance.unwrap_or_else(|| {
        defaults.push("if_tolerance".to_string());
        calibration::DEFAULT_IF_TOLERANCE
    });

    let grid = StudyGrid {
        bridges,
        axle_load_newton: axle_load_ton * 1000.0 * GRAVITY_M_S2,
        axle_count,
        axle_distances_m: spacings,
        speeds_m_s,
        dt_grid_s,
        if_tolerance,
    };
    grid.validate().context("config validation")?;

    Ok(StudyConfig {
        grid,
        workers: raw.workers,
        output_dir: raw.output_dir,
        defaults_used: defaults,
    })
}
