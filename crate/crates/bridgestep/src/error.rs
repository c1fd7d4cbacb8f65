use thiserror::Error;

/// Errors produced by the bridge dynamics and calibration routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A specification value violates a type invariant.
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    /// Mode index outside `1..=mode_count`.
    #[error("mode index {n} out of range 1..={max}")]
    InvalidMode { n: usize, max: usize },

    /// Position outside the span `[0, L]`.
    #[error("position {x} m outside span [0, {span}] m")]
    OutOfDomain { x: f64, span: f64 },

    /// An analysis case that cannot be run as posed.
    #[error("invalid case: {0}")]
    InvalidCase(String),

    /// Time step too coarse to resolve the load passage at all.
    #[error("time step {dt} s does not resolve the passage ({passage} s)")]
    DegenerateGrid { dt: f64, passage: f64 },

    /// The exact step propagator assumes an underdamped oscillator.
    #[error("damping ratio {0} unsupported; require 0 <= xi < 1")]
    UnsupportedDamping(f64),

    /// Retained mode count above the solver's hard cap.
    #[error("mode count {requested} exceeds cap {cap}")]
    ModeCountExceeded { requested: usize, cap: usize },

    /// The closed-form moving-load solution divides by `omega_n^2 - Omega_n^2`.
    #[error("analytic oracle singular: loading frequency of mode {n} matches its natural frequency")]
    OracleSingularity { n: usize },

    /// Time-step selection needs at least two grid entries.
    #[error("time-step selection needs at least 2 grid entries, got {0}")]
    InsufficientGrid(usize),

    /// Duplicate time-step key in a selection input.
    #[error("duplicate time step {0} s in selection input")]
    DuplicateDt(f64),

    /// Dynamic-to-static comparison requires a positive static response.
    #[error("static deflection must be positive, got {0} m")]
    InvalidStatic(f64),

    /// A study with nothing to aggregate.
    #[error("empty study: {0}")]
    EmptyStudy(String),
}

pub type Result<T> = std::result::Result<T, Error>;
