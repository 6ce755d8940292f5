//! Demo orchestration: run a flight case either in process or as a workflow
//! on the simulated grid, and render identical convergence reports for both.

use thiserror::Error;

use crate::aeroelastic::{
    flight_condition, solve_at_q, AeroError, AlphaMode, CouplingOptions, FlightCase, SolveStatus,
    WingModel,
};
use crate::defaults;
use crate::runtime::{
    demo_library, simulate, CaseSetup, ExecutionTrace, Payload, RunStatus, SimError, SimRun,
};
use crate::workflow::WorkflowError;

#[derive(Debug, Error)]
pub enum DemoError {
    #[error("unknown case {0:?}")]
    UnknownCase(String),
    #[error(transparent)]
    Aero(#[from] AeroError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Workflow(#[from] WorkflowError),
    #[error("on-grid run ended with status {0:?}")]
    GridRun(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemoMode {
    InProcess,
    OnGrid,
}

/// One convergence row: residual and tip state after each coupling iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub iteration: u32,
    pub residual_rad: f64,
    pub tip_twist_rad: f64,
    pub tip_deflection_m: f64,
}

/// Demo outcome, identical across modes for converged cases.
#[derive(Debug, Clone, PartialEq)]
pub struct DemoResult {
    pub case: String,
    pub mode: DemoMode,
    pub converged: bool,
    pub iterations: u32,
    pub alpha_root_rad: f64,
    pub twist_rad: Vec<f64>,
    pub deflection_m: Vec<f64>,
    pub rows: Vec<ConvergenceRow>,
    /// Present only for on-grid runs.
    pub trace: Option<ExecutionTrace>,
}

impl DemoResult {
    pub fn tip_twist_rad(&self) -> f64 {
        *self.twist_rad.last().unwrap_or(&0.0)
    }

    pub fn tip_deflection_m(&self) -> f64 {
        *self.deflection_m.last().unwrap_or(&0.0)
    }
}

/// Fixed 9-significant-digit decimal rendering used by every numeric output.
pub fn sig9(x: f64) -> String {
    format!("{x:.8e}")
}

/// CSV body for the convergence history.
pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("iter,residual_rad,tip_twist_deg,tip_deflection_m\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.iteration,
            sig9(row.residual_rad),
            sig9(row.tip_twist_rad.to_degrees()),
            sig9(row.tip_deflection_m),
        ));
    }
    out
}

/// Coupling setup shared by both execution modes.
fn case_setup(case: &FlightCase, wing: &WingModel) -> Result<CaseSetup, DemoError> {
    let fc = flight_condition(case, wing)?;
    Ok(CaseSetup {
        wing: wing.clone(),
        dynamic_pressure_pa: fc.dynamic_pressure_pa,
        alpha: AlphaMode::Trim {
            cl_target: fc.cl_target,
        },
        relaxation: CouplingOptions::default().relaxation,
    })
}

/// Run a named demo case. Both modes share the wing, the flight condition
/// and the per-iteration stage functions; the grid mode additionally runs
/// the workflow machinery (binding, placement, staging, events).
pub fn run_demo_case(label: &str, mode: DemoMode) -> Result<DemoResult, DemoError> {
    let config = defaults::demo_aero_config();
    let case = config
        .case(label)
        .ok_or_else(|| DemoError::UnknownCase(label.to_string()))?;
    match mode {
        DemoMode::InProcess => run_in_process(case, &config.wing),
        DemoMode::OnGrid => run_on_grid(case, &config.wing),
    }
}

fn run_in_process(case: &FlightCase, wing: &WingModel) -> Result<DemoResult, DemoError> {
    let setup = case_setup(case, wing)?;
    let opts = CouplingOptions::default();
    let result = solve_at_q(wing, setup.dynamic_pressure_pa, setup.alpha, &opts)?;
    let rows = result
        .history
        .iter()
        .map(|r| ConvergenceRow {
            iteration: r.iteration,
            residual_rad: r.residual_rad,
            tip_twist_rad: r.tip_twist_rad,
            tip_deflection_m: r.tip_deflection_m,
        })
        .collect();
    Ok(DemoResult {
        case: case.label.clone(),
        mode: DemoMode::InProcess,
        converged: result.status == SolveStatus::Converged,
        iterations: result.iterations,
        alpha_root_rad: result.state.alpha_root_rad,
        twist_rad: result.state.twist_rad,
        deflection_m: result.state.deflection_m,
        rows,
        trace: None,
    })
}

fn run_on_grid(case: &FlightCase, wing: &WingModel) -> Result<DemoResult, DemoError> {
    let setup = case_setup(case, wing)?;
    let catalog = defaults::testbed_catalog();
    let vpe = defaults::demo_vpe(&catalog);
    let workflow = defaults::demo_workflow();
    let bound = workflow.bind(&vpe)?;
    let library = demo_library(&setup);
    let runs = vec![SimRun {
        workflow: bound,
        vpe,
    }];
    let mut traces = simulate(&runs, &catalog, &library, &[])?;
    let trace = traces.remove(0);
    if trace.status == RunStatus::Failed {
        return Err(DemoError::GridRun(
            trace.failure.clone().unwrap_or_else(|| "failed".into()),
        ));
    }
    let rows: Vec<ConvergenceRow> = trace
        .loop_records
        .iter()
        .map(|r| ConvergenceRow {
            iteration: r.iteration,
            residual_rad: r.condition_value,
            tip_twist_rad: r.snapshots.get("twist").copied().unwrap_or(0.0),
            tip_deflection_m: r.snapshots.get("deflection").copied().unwrap_or(0.0),
        })
        .collect();
    let twist = trace
        .final_payloads
        .get("twist")
        .and_then(Payload::as_vector)
        .map(<[f64]>::to_vec)
        .unwrap_or_default();
    let deflection = trace
        .final_payloads
        .get("deflection")
        .and_then(Payload::as_vector)
        .map(<[f64]>::to_vec)
        .unwrap_or_default();
    let alpha = trace
        .final_payloads
        .get("alpha")
        .and_then(Payload::as_scalar)
        .unwrap_or(0.0);
    let iterations = rows.len() as u32;
    Ok(DemoResult {
        case: case.label.clone(),
        mode: DemoMode::OnGrid,
        converged: trace.status == RunStatus::Completed,
        iterations,
        alpha_root_rad: alpha,
        twist_rad: twist,
        deflection_m: deflection,
        rows,
        trace: Some(trace),
    })
}
