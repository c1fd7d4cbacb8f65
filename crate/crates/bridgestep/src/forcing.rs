//! Axle arrival schedule and the modal generalized force of a load train.
//!
//! Each axle contributes a half-sine sweep while it is on the span. The
//! force on mode `n` carries an entry term windowed at the arrival time and
//! an exit term windowed at `arrival + L/v`; past the exit the two terms
//! cancel to round-off, so loads that have left the bridge stop forcing it.
//! Step functions are taken right-continuous: a load counts from the exact
//! instant its window opens.

use crate::error::{Error, Result};
use crate::model::{positive_finite, BridgeSpec, TrainSpec};
use std::f64::consts::PI;

/// Entry and exit schedule of a train crossing one span.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadTimeline {
    /// Arrival time of each axle at the span, `t_j = (j-1)*d/v`, `t_1 = 0`.
    pub arrival_times_s: Vec<f64>,
    /// Exit time of each axle, `t_j + L/v`.
    pub exit_times_s: Vec<f64>,
    /// Last-axle exit, `t_N + L/v`.
    pub passage_end_s: f64,
    /// Span the schedule was built for, in meters.
    pub span_m: f64,
    /// Crossing speed in m/s.
    pub speed_m_s: f64,
}

/// Builds the axle schedule for a train crossing `span_m` at `speed_m_s`.
pub fn arrival_times(train: &TrainSpec, span_m: f64, speed_m_s: f64) -> Result<LoadTimeline> {
    if !positive_finite(speed_m_s) {
        return Err(Error::InvalidCase(format!(
            "speed_m_s must be positive, got {speed_m_s}"
        )));
    }
    let crossing = span_m / speed_m_s;
    let arrival_times_s: Vec<f64> = (0..train.axle_count)
        .map(|j| j as f64 * train.axle_spacing_m / speed_m_s)
        .collect();
    let exit_times_s: Vec<f64> = arrival_times_s.iter().map(|t| t + crossing).collect();
    let passage_end_s = *exit_times_s.last().expect("axle_count >= 1");
    Ok(LoadTimeline {
        arrival_times_s,
        exit_times_s,
        passage_end_s,
        span_m,
        speed_m_s,
    })
}

/// Generalized modal force `F_n(t)` in acceleration units (m/s^2).
///
/// `F_n(t) = (2P/mL) * sum_j [ sin(n*pi*v*(t - t_j)/L) * H(t - t_j)
///   + (-1)^(n+1) * sin(n*pi*v*(t - t_j - L/v)/L) * H(t - t_j - L/v) ]`
///
/// Zero before the first axle arrives and zero to round-off once every axle
/// has exited.
pub fn modal_force(
    bridge: &BridgeSpec,
    train: &TrainSpec,
    timeline: &LoadTimeline,
    n: usize,
    t: f64,
) -> Result<f64> {
    if n < 1 || n > bridge.mode_count {
        return Err(Error::InvalidMode {
            n,
            max: bridge.mode_count,
        });
    }
    let span = timeline.span_m;
    let rate = n as f64 * PI * timeline.speed_m_s / span;
    let exit_sign = if n.is_multiple_of(2) { -1.0 } else { 1.0 };
    let mut sum = 0.0;
    for (t_in, t_out) in timeline
        .arrival_times_s
        .iter()
        .zip(timeline.exit_times_s.iter())
    {
        if t >= *t_in {
            sum += (rate * (t - t_in)).sin();
        }
        if t >= *t_out {
            sum += exit_sign * (rate * (t - t_out)).sin();
        }
    }
    let amplitude = 2.0 * train.axle_load_newton / (bridge.mass_per_length_kg_m * span);
    Ok(amplitude * sum)
}

/// Number of axles on the span at time `t`: those with `t_j <= t < t_j + L/v`.
pub fn axles_on_bridge(timeline: &LoadTimeline, t: f64) -> usize {
    timeline
        .arrival_times_s
        .iter()
        .zip(timeline.exit_times_s.iter())
        .filter(|(t_in, t_out)| **t_in <= t && t < **t_out)
        .count()
}
