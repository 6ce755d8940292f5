//! Static aeroelastic demo application: standard atmosphere, strip-theory
//! loads, cantilever beam response, grid-to-grid field mapping and the
//! under-relaxed coupling fixed point.

mod atmosphere;
mod beam;
mod coupling;
mod mapping;
mod strip;
mod wing;

pub use atmosphere::{isa_atmosphere, AtmosphereState};
pub use beam::{beam_bending, beam_torsion};
pub use coupling::{
    aero_stage, coupling_step, divergence_q, mesh_stage, solve_at_q, solve_static,
    structure_stage, AlphaMode, CouplingOptions, CouplingState, IterationRecord, SolveResult,
    SolveStatus,
};
pub use mapping::map_fields;
pub use strip::{aero_loads, flight_condition, total_lift, trim_alpha, FlightCondition, StripLoads};
pub use wing::{AeroConfig, FlightCase, SpanProperty, WingModel};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AeroError {
    #[error("altitude {altitude_m} m outside the supported range [0, 20000]")]
    AltitudeOutOfRange { altitude_m: f64 },
    #[error("invalid wing model: {0}")]
    InvalidWing(String),
    #[error("invalid flight case: {0}")]
    InvalidCase(String),
    #[error("invalid coupling options: {0}")]
    InvalidOptions(String),
    #[error("array length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("source stations must be strictly increasing")]
    NonMonotonicGrid,
    #[error("degenerate lift slope: total lift does not depend on incidence")]
    DegenerateLiftSlope,
    #[error("no divergence: elastic-axis offset is not positive")]
    NoDivergence,
    #[error("configuration error: {0}")]
    Config(String),
}
