//! Bridge and train specifications and the modal properties of a simply
//! supported Euler-Bernoulli beam.
//!
//! A bridge is parameterized by its span and first flexural frequency rather
//! than by `E`, `I` and `m` separately: the frequency fixes the stiffness to
//! mass ratio `EI/m`, and `mass_per_length_kg_m` only scales absolute
//! deflection amplitudes. Impact factors are invariant to that scale.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Retained flexural modes unless specified otherwise.
pub const DEFAULT_MODE_COUNT: usize = 5;

/// Default beam mass per unit length in kg/m. Amplitude scale only.
pub const DEFAULT_MASS_PER_LENGTH_KG_M: f64 = 1000.0;

/// Standard gravity in m/s^2, used when converting axle tonnage to Newtons.
pub const GRAVITY_M_S2: f64 = 9.81;

/// Finite and strictly positive; rejects NaN in validations.
pub(crate) fn positive_finite(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

/// Simply supported single-span bridge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BridgeSpec {
    /// Span length `L` in meters.
    pub span_m: f64,
    /// First flexural natural frequency in Hz.
    pub f1_hz: f64,
    /// Modal damping ratio `xi`, identical for all modes.
    pub damping_ratio: f64,
    /// Number of retained modes.
    pub mode_count: usize,
    /// Beam mass per unit length in kg/m.
    pub mass_per_length_kg_m: f64,
}

impl BridgeSpec {
    /// A bridge with default damping (0), mode count (5) and mass (1000 kg/m).
    pub fn new(span_m: f64, f1_hz: f64) -> Result<Self> {
        let bridge = BridgeSpec {
            span_m,
            f1_hz,
            damping_ratio: 0.0,
            mode_count: DEFAULT_MODE_COUNT,
            mass_per_length_kg_m: DEFAULT_MASS_PER_LENGTH_KG_M,
        };
        bridge.validate()?;
        Ok(bridge)
    }

    pub fn with_damping(mut self, damping_ratio: f64) -> Result<Self> {
        self.damping_ratio = damping_ratio;
        self.validate()?;
        Ok(self)
    }

    pub fn with_mode_count(mut self, mode_count: usize) -> Result<Self> {
        self.mode_count = mode_count;
        self.validate()?;
        Ok(self)
    }

    pub fn with_mass_per_length(mut self, mass_per_length_kg_m: f64) -> Result<Self> {
        self.mass_per_length_kg_m = mass_per_length_kg_m;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !positive_finite(self.span_m) {
            return Err(Error::InvalidSpec(format!(
                "span_m must be positive, got {}",
                self.span_m
            )));
        }
        if !positive_finite(self.f1_hz) {
            return Err(Error::InvalidSpec(format!(
                "f1_hz must be positive, got {}",
                self.f1_hz
            )));
        }
        if !(self.damping_ratio >= 0.0 && self.damping_ratio < 1.0) {
            return Err(Error::InvalidSpec(format!(
                "damping_ratio must lie in [0, 1), got {}",
                self.damping_ratio
            )));
        }
        if self.mode_count < 1 {
            return Err(Error::InvalidSpec(
                "mode_count must be at least 1".to_string(),
            ));
        }
        if !positive_finite(self.mass_per_length_kg_m) {
            return Err(Error::InvalidSpec(format!(
                "mass_per_length_kg_m must be positive, got {}",
                self.mass_per_length_kg_m
            )));
        }
        Ok(())
    }

    /// Angular natural frequency `omega_n = n^2 * 2*pi*f1` in rad/s.
    ///
    /// For a simply supported prismatic beam the frequencies scale with the
    /// square of the mode index, so the whole spectrum follows from `f1_hz`.
    pub fn natural_frequency(&self, n: usize) -> Result<f64> {
        self.check_mode(n)?;
        Ok((n * n) as f64 * 2.0 * PI * self.f1_hz)
    }

    /// Mode shape `sin(n*pi*x/L)` of the simply supported beam.
    pub fn mode_shape(&self, n: usize, x: f64) -> Result<f64> {
        self.check_mode(n)?;
        if !(0.0..=self.span_m).contains(&x) {
            return Err(Error::OutOfDomain {
                x,
                span: self.span_m,
            });
        }
        Ok((n as f64 * PI * x / self.span_m).sin())
    }

    /// Stiffness to mass ratio `EI/m = (2*pi*f1)^2 * L^4 / pi^4` in m^4/s^2.
    ///
    /// Inversion of the first-mode frequency relation; this is what the
    /// solver and the static formulas actually consume.
    pub fn flexural_rigidity_ratio(&self) -> f64 {
        let w1 = 2.0 * PI * self.f1_hz;
        w1 * w1 * self.span_m.powi(4) / PI.powi(4)
    }

    /// Flexural rigidity `EI` in N*m^2.
    pub fn flexural_rigidity(&self) -> f64 {
        self.flexural_rigidity_ratio() * self.mass_per_length_kg_m
    }

    fn check_mode(&self, n: usize) -> Result<()> {
        if n < 1 || n > self.mode_count {
            return Err(Error::InvalidMode {
                n,
                max: self.mode_count,
            });
        }
        Ok(())
    }
}

/// Midspan value of mode `n`, i.e. `sin(n*pi/2)` evaluated exactly.
///
/// Even modes have a node at midspan; returning an exact 0 keeps their
/// contribution out of midpoint reconstructions to the last bit.
pub fn midspan_mode_sign(n: usize) -> f64 {
    match n % 4 {
        1 => 1.0,
        3 => -1.0,
        _ => 0.0,
    }
}

/// Train of identical concentrated axle loads at uniform spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainSpec {
    /// Load per axle `P` in Newtons.
    pub axle_load_newton: f64,
    /// Number of axles `N`.
    pub axle_count: usize,
    /// Distance `d` between consecutive axles in meters.
    pub axle_spacing_m: f64,
}

impl TrainSpec {
    pub fn new(axle_load_newton: f64, axle_count: usize, axle_spacing_m: f64) -> Result<Self> {
        let train = TrainSpec {
            axle_load_newton,
            axle_count,
            axle_spacing_m,
        };
        train.validate()?;
        Ok(train)
    }

    /// A train specified in metric tons per axle.
    pub fn from_tons(axle_load_ton: f64, axle_count: usize, axle_spacing_m: f64) -> Result<Self> {
        Self::new(axle_load_ton * 1000.0 * GRAVITY_M_S2, axle_count, axle_spacing_m)
    }

    pub fn validate(&self) -> Result<()> {
        if !positive_finite(self.axle_load_newton) {
            return Err(Error::InvalidSpec(format!(
                "axle_load_newton must be positive, got {}",
                self.axle_load_newton
            )));
        }
        if self.axle_count < 1 {
            return Err(Error::InvalidSpec(
                "axle_count must be at least 1".to_string(),
            ));
        }
        if self.axle_count > 1 && !positive_finite(self.axle_spacing_m) {
            return Err(Error::InvalidSpec(format!(
                "axle_spacing_m must be positive for multi-axle trains, got {}",
                self.axle_spacing_m
            )));
        }
        Ok(())
    }

    /// First-axle entry to last-axle exit: `(N-1)*d/v + L/v` seconds.
    pub fn passage_time_s(&self, span_m: f64, speed_m_s: f64) -> f64 {
        (self.axle_count - 1) as f64 * self.axle_spacing_m / speed_m_s + span_m / speed_m_s
    }
}

/// One dynamic run: a bridge, a train, a crossing speed and a time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisCase {
    pub bridge: BridgeSpec,
    pub train: TrainSpec,
    /// Crossing speed `v` in m/s.
    pub speed_m_s: f64,
    /// Integration time step in seconds.
    pub dt_s: f64,
}

impl AnalysisCase {
    pub fn new(bridge: BridgeSpec, train: TrainSpec, speed_m_s: f64, dt_s: f64) -> Result<Self> {
        bridge.validate()?;
        train.validate()?;
        if !positive_finite(speed_m_s) {
            return Err(Error::InvalidCase(format!(
                "speed_m_s must be positive, got {speed_m_s}"
            )));
        }
        if !positive_finite(dt_s) {
            return Err(Error::InvalidCase(format!(
                "dt_s must be positive, got {dt_s}"
            )));
        }
        let passage = train.passage_time_s(bridge.span_m, speed_m_s);
        if dt_s >= passage {
            return Err(Error::DegenerateGrid {
                dt: dt_s,
                passage,
            });
        }
        Ok(AnalysisCase {
            bridge,
            train,
            speed_m_s,
            dt_s,
        })
    }

    /// Total passage time `(N-1)*d/v + L/v` in seconds.
    pub fn passage_time_s(&self) -> f64 {
        self.train.passage_time_s(self.bridge.span_m, self.speed_m_s)
    }
}
