//! Impact factor and the loading-frequency resonance relations.

use crate::error::{Error, Result};
use std::cmp::Ordering;

/// One calibration condition: bridge span, axle distance and crossing speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionKey {
    pub span_m: f64,
    pub axle_distance_m: f64,
    pub speed_m_s: f64,
}

impl ConditionKey {
    pub fn with_dt(self, dt_s: f64) -> CaseKey {
        CaseKey {
            span_m: self.span_m,
            axle_distance_m: self.axle_distance_m,
            speed_m_s: self.speed_m_s,
            dt_s,
        }
    }
}

impl Eq for ConditionKey {}

impl Ord for ConditionKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.span_m
            .total_cmp(&other.span_m)
            .then(self.axle_distance_m.total_cmp(&other.axle_distance_m))
            .then(self.speed_m_s.total_cmp(&other.speed_m_s))
    }
}

impl PartialOrd for ConditionKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A condition plus the time step it was run at. Orders by condition, then
/// by descending time step (coarse grids first, matching presentation
/// order).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseKey {
    pub span_m: f64,
    pub axle_distance_m: f64,
    pub speed_m_s: f64,
    pub dt_s: f64,
}

impl CaseKey {
    pub fn condition(&self) -> ConditionKey {
        ConditionKey {
            span_m: self.span_m,
            axle_distance_m: self.axle_distance_m,
            speed_m_s: self.speed_m_s,
        }
    }
}

impl Eq for CaseKey {}

impl Ord for CaseKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.condition()
            .cmp(&other.condition())
            .then(other.dt_s.total_cmp(&self.dt_s))
    }
}

impl PartialOrd for CaseKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Outcome of one dynamic analysis compared against the static sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpactRecord {
    pub key: CaseKey,
    /// Grid maximum of the dynamic midpoint deflection, meters.
    pub d_dyn_m: f64,
    /// Maximum static midpoint deflection, meters.
    pub d_st_m: f64,
    /// `(d_dyn - d_st) / d_st`.
    pub impact_factor: f64,
}

/// Impact factor `(d_dyn - d_st) / d_st`.
///
/// May come out negative on a coarse grid whose sampling missed the true
/// dynamic peak; negative values are reported as-is since they are evidence
/// of undersampling, not clamped away.
pub fn impact_factor(d_dyn_m: f64, d_st_m: f64) -> Result<f64> {
    if !crate::model::positive_finite(d_st_m) {
        return Err(Error::InvalidStatic(d_st_m));
    }
    if !(d_dyn_m >= 0.0 && d_dyn_m.is_finite()) {
        return Err(Error::InvalidCase(format!(
            "dynamic deflection must be non-negative, got {d_dyn_m}"
        )));
    }
    Ok((d_dyn_m - d_st_m) / d_st_m)
}

/// Speed at which the axle-passage frequency `V/d` meets the first natural
/// frequency: `V = f1 * d`, in m/s.
pub fn resonance_speed(f1_hz: f64, axle_spacing_m: f64) -> f64 {
    debug_assert!(f1_hz > 0.0 && axle_spacing_m > 0.0);
    f1_hz * axle_spacing_m
}

/// Axle-passage frequency `V/d` in Hz.
pub fn loading_frequency(speed_m_s: f64, axle_spacing_m: f64) -> f64 {
    debug_assert!(speed_m_s > 0.0 && axle_spacing_m > 0.0);
    speed_m_s / axle_spacing_m
}
