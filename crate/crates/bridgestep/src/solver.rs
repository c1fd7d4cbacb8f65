//! Modal time-history solver for a train of moving loads.
//!
//! Each retained mode is a damped SDOF oscillator driven by the modal force.
//! The propagator advances one step at a time with the closed-form response
//! to linearly interpolated forcing, so the only discretization error on a
//! grid is forcing undersampling between nodes plus the grid-only sampling
//! of the response maximum. Both shrink with the time step, which is exactly
//! the sensitivity the calibration study measures.

use crate::error::{Error, Result};
use crate::forcing;
use crate::model::{midspan_mode_sign, positive_finite, AnalysisCase, BridgeSpec};

/// Hard cap on retained modes per solve.
pub const MODE_COUNT_CAP: usize = 64;

/// Midpoint deflection history of one analysis case on its uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseHistory {
    /// Grid step in seconds.
    pub dt_s: f64,
    /// Uniform grid `t_i = i * dt`, starting at 0, extended to the first
    /// full multiple of `dt` past the passage plus a two-period tail.
    pub times_s: Vec<f64>,
    /// Midpoint deflection `u(L/2, t_i)` in meters.
    pub midpoint_deflection_m: Vec<f64>,
    /// Per-mode generalized coordinates, when recorded.
    pub modal_coordinates: Option<Vec<Vec<f64>>>,
    /// Grid maximum of `|u(L/2, .)|`; no interpolation between nodes.
    pub max_abs_deflection_m: f64,
    /// Time of the grid maximum (first occurrence on ties).
    pub max_time_s: f64,
}

/// One-step exact propagator for `q'' + 2*xi*w*q' + w^2*q = F(t)` with `F`
/// linear inside the step.
///
/// The step splits the solution into the particular response to the linear
/// forcing segment and a decaying rotation of the remaining homogeneous
/// part; both are evaluated in closed form, so composed steps reproduce the
/// continuous solution to round-off for piecewise-linear forcing.
#[derive(Debug, Clone, Copy)]
pub struct SdofStepper {
    dt: f64,
    xi_omega: f64,
    omega_d: f64,
    exp_decay: f64,
    cos_wd: f64,
    sin_wd: f64,
    inv_w2: f64,
    // 2*xi/w^3, the static offset of the ramp response
    ramp_offset: f64,
}

impl SdofStepper {
    pub fn new(omega: f64, xi: f64, dt: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&xi) {
            return Err(Error::UnsupportedDamping(xi));
        }
        if !positive_finite(omega) {
            return Err(Error::InvalidCase(format!(
                "natural frequency must be positive, got {omega}"
            )));
        }
        if !positive_finite(dt) {
            return Err(Error::InvalidCase(format!(
                "time step must be positive, got {dt}"
            )));
        }
        let omega_d = omega * (1.0 - xi * xi).sqrt();
        let inv_w2 = 1.0 / (omega * omega);
        Ok(SdofStepper {
            dt,
            xi_omega: xi * omega,
            omega_d,
            exp_decay: (-xi * omega * dt).exp(),
            cos_wd: (omega_d * dt).cos(),
            sin_wd: (omega_d * dt).sin(),
            inv_w2,
            ramp_offset: 2.0 * xi * inv_w2 / omega,
        })
    }

    /// Advances `(q, q_dot)` across one step with forcing interpolated
    /// linearly from `f_start` to `f_end`.
    pub fn step(&self, q: f64, q_dot: f64, f_start: f64, f_end: f64) -> (f64, f64) {
        let slope = (f_end - f_start) / self.dt;
        // Particular response to F(tau) = f_start + slope*tau:
        //   q_p(tau) = (f_start + slope*tau)/w^2 - 2*xi*slope/w^3
        let hom_q = q - f_start * self.inv_w2 + slope * self.ramp_offset;
        let hom_v = q_dot - slope * self.inv_w2;
        let b = (hom_v + self.xi_omega * hom_q) / self.omega_d;
        let q_next = self.exp_decay * (hom_q * self.cos_wd + b * self.sin_wd)
            + f_end * self.inv_w2
            - slope * self.ramp_offset;
        let v_next = self.exp_decay
            * ((b * self.omega_d - hom_q * self.xi_omega) * self.cos_wd
                - (hom_q * self.omega_d + b * self.xi_omega) * self.sin_wd)
            + slope * self.inv_w2;
        (q_next, v_next)
    }
}

/// Single step of the exact SDOF propagator. For tight loops build an
/// [`SdofStepper`] once and reuse it.
pub fn step_sdof(
    omega: f64,
    xi: f64,
    state: (f64, f64),
    f_start: f64,
    f_end: f64,
    dt: f64,
) -> Result<(f64, f64)> {
    Ok(SdofStepper::new(omega, xi, dt)?.step(state.0, state.1, f_start, f_end))
}

/// Integrates one analysis case and returns the midpoint history.
pub fn solve_case(case: &AnalysisCase) -> Result<ResponseHistory> {
    solve(case, false)
}

/// Like [`solve_case`], additionally recording every modal coordinate.
pub fn solve_case_recording_modes(case: &AnalysisCase) -> Result<ResponseHistory> {
    solve(case, true)
}

fn solve(case: &AnalysisCase, record_modes: bool) -> Result<ResponseHistory> {
    let bridge = &case.bridge;
    let train = &case.train;
    if bridge.mode_count > MODE_COUNT_CAP {
        return Err(Error::ModeCountExceeded {
            requested: bridge.mode_count,
            cap: MODE_COUNT_CAP,
        });
    }
    let timeline = forcing::arrival_times(train, bridge.span_m, case.speed_m_s)?;
    let dt = case.dt_s;
    if dt >= timeline.passage_end_s {
        return Err(Error::DegenerateGrid {
            dt,
            passage: timeline.passage_end_s,
        });
    }
    // Two first-mode periods of free vibration past the last exit, so late
    // maxima near resonance are not truncated.
    let t_end = timeline.passage_end_s + 2.0 / bridge.f1_hz;
    let n_steps = (t_end / dt).ceil() as usize;
    let n_points = n_steps + 1;

    let mut midpoint = vec![0.0; n_points];
    let mut modal = if record_modes {
        Some(vec![vec![0.0; n_points]; bridge.mode_count])
    } else {
        None
    };

    for n in 1..=bridge.mode_count {
        let omega = bridge.natural_frequency(n)?;
        let stepper = SdofStepper::new(omega, bridge.damping_ratio, dt)?;
        let sign = midspan_mode_sign(n);
        let mut q = 0.0;
        let mut q_dot = 0.0;
        let mut f_prev = forcing::modal_force(bridge, train, &timeline, n, 0.0)?;
        for i in 1..=n_steps {
            let t = i as f64 * dt;
            let f = forcing::modal_force(bridge, train, &timeline, n, t)?;
            let (q_next, v_next) = stepper.step(q, q_dot, f_prev, f);
            q = q_next;
            q_dot = v_next;
            f_prev = f;
            if sign != 0.0 {
                midpoint[i] += sign * q;
            }
            if let Some(m) = modal.as_mut() {
                m[n - 1][i] = q;
            }
        }
    }

    let times: Vec<f64> = (0..n_points).map(|i| i as f64 * dt).collect();
    let (mut max_abs, mut max_idx) = (0.0, 0);
    for (i, u) in midpoint.iter().enumerate() {
        if u.abs() > max_abs {
            max_abs = u.abs();
            max_idx = i;
        }
    }
    Ok(ResponseHistory {
        dt_s: dt,
        max_time_s: times[max_idx],
        times_s: times,
        midpoint_deflection_m: midpoint,
        modal_coordinates: modal,
        max_abs_deflection_m: max_abs,
    })
}

/// Closed-form generalized coordinate of mode `n` while a single undamped
/// load is on the span: `q_n(t) = (2P/mL) * (sin(W t) - (W/w) sin(w t)) /
/// (w^2 - W^2)` with `W = n*pi*v/L`.
pub fn analytic_single_load_mode(
    bridge: &BridgeSpec,
    axle_load_newton: f64,
    speed_m_s: f64,
    n: usize,
    t: f64,
) -> Result<f64> {
    let omega = bridge.natural_frequency(n)?;
    let loading = n as f64 * std::f64::consts::PI * speed_m_s / bridge.span_m;
    if (omega - loading).abs() <= 1e-9 * omega {
        return Err(Error::OracleSingularity { n });
    }
    let amplitude =
        2.0 * axle_load_newton / (bridge.mass_per_length_kg_m * bridge.span_m);
    Ok(amplitude * ((loading * t).sin() - (loading / omega) * (omega * t).sin())
        / (omega * omega - loading * loading))
}

/// Closed-form midpoint deflection under a single moving load, valid while
/// the load is on the span and the bridge is undamped.
pub fn analytic_single_load_midpoint(
    bridge: &BridgeSpec,
    axle_load_newton: f64,
    speed_m_s: f64,
    t: f64,
) -> Result<f64> {
    if bridge.damping_ratio != 0.0 {
        return Err(Error::InvalidCase(
            "analytic single-load solution requires zero damping".to_string(),
        ));
    }
    if !positive_finite(speed_m_s) {
        return Err(Error::InvalidCase(format!(
            "speed_m_s must be positive, got {speed_m_s}"
        )));
    }
    let position = speed_m_s * t;
    if !(0.0..=bridge.span_m).contains(&position) {
        return Err(Error::OutOfDomain {
            x: position,
            span: bridge.span_m,
        });
    }
    // The singularity check covers every retained mode, midspan-null ones
    // included, so callers learn about a resonant speed either way.
    let mut u = 0.0;
    for n in 1..=bridge.mode_count {
        let q = analytic_single_load_mode(bridge, axle_load_newton, speed_m_s, n, t)?;
        let sign = midspan_mode_sign(n);
        if sign != 0.0 {
            u += sign * q;
        }
    }
    Ok(u)
}
