//! Deterministic simulator of virtual private environments (VPEs) on a
//! shared compute grid, paired with a coupled static-aeroelastic application
//! that runs both in process and as a scheduled workflow on the simulated
//! infrastructure.
//!
//! Modules:
//! - [`infrastructure`]: resource catalog, capability queries, transfer costs
//! - [`vpe`]: environment slices and the hierarchical service registry
//! - [`workflow`]: sequence/parallel/loop composition and dataflow checks
//! - [`runtime`]: discrete-event execution with placement and staging
//! - [`aeroelastic`]: strip loads, beam response and the coupling fixed point
//! - [`demo`]: the bundled flight cases in both execution modes

pub mod aeroelastic;
pub mod defaults;
pub mod demo;
pub mod infrastructure;
pub mod runtime;
pub mod vpe;
pub mod workflow;
