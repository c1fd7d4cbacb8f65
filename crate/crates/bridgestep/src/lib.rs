//! Dynamics of simply supported bridges under trains of moving loads, and
//! calibration of the integration time step required for accurate impact
//! factors.
//!
//! The crate computes midpoint deflection histories by modal superposition
//! with an exact per-step propagator, compares dynamic maxima against the
//! quasi-static sweep, and distills full parameter studies into the
//! `dt = k * L / V` time-step rule.
//!
//! All quantities are SI: meters, seconds, Newtons, Hz. Unit conversions
//! (km/h, axle tons) belong to the caller.

pub mod calibration;
pub mod error;
pub mod forcing;
pub mod impact;
pub mod model;
pub mod solver;
pub mod statics;

pub use calibration::{
    aggregate_k, k_coefficient, recommended_dt, run_study, select_proper_dt, BridgeKStats,
    CalibrationReport, CaseFailure, StudyGrid, StudyOutput, TimeStepSelection,
    DEFAULT_IF_TOLERANCE, RECOMMENDED_K,
};
pub use error::{Error, Result};
pub use forcing::{arrival_times, axles_on_bridge, modal_force, LoadTimeline};
pub use impact::{
    impact_factor, loading_frequency, resonance_speed, CaseKey, ConditionKey, ImpactRecord,
};
pub use model::{AnalysisCase, BridgeSpec, TrainSpec, GRAVITY_M_S2};
pub use solver::{
    analytic_single_load_midpoint, solve_case, solve_case_recording_modes, step_sdof,
    ResponseHistory, SdofStepper, MODE_COUNT_CAP,
};
pub use statics::{max_static_sweep, static_midpoint_deflection, StaticResult};
