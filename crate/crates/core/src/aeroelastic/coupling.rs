//! Partitioned aero-structure coupling: the three discipline stages, the
//! under-relaxed fixed-point iteration and the closed-form divergence
//! pressure used as its stability oracle.
//!
//! The three stage functions are the single source of truth for the
//! per-iteration numerics. `coupling_step` composes them in process; the
//! grid runtime wraps the same functions as workflow components, so both
//! execution paths produce bit-identical payloads.

use super::beam::{beam_bending, beam_torsion};
use super::mapping::map_fields;
use super::strip::{aero_loads, flight_condition, trim_alpha};
use super::wing::{FlightCase, WingModel};
use super::AeroError;

/// Root incidence policy for the coupling iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaMode {
    /// Re-trim the root incidence every iteration to hold the lift target.
    Trim { cl_target: f64 },
    /// Hold the root incidence fixed (divergence studies).
    Fixed { alpha_rad: f64 },
}

/// Iteration controls. `relaxation` must lie in (0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingOptions {
    pub relaxation: f64,
    pub tolerance_rad: f64,
    pub max_iterations: u32,
}

impl Default for CouplingOptions {
    fn default() -> Self {
        Self {
            relaxation: 0.5,
            tolerance_rad: 1e-6,
            max_iterations: 50,
        }
    }
}

impl CouplingOptions {
    pub fn validate(&self) -> Result<(), AeroError> {
        if !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            return Err(AeroError::InvalidOptions(format!(
                "relaxation {} outside (0, 1]",
                self.relaxation
            )));
        }
        if self.tolerance_rad <= 0.0 {
            return Err(AeroError::InvalidOptions("tolerance must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(AeroError::InvalidOptions("max_iterations must be >= 1".into()));
        }
        Ok(())
    }
}

/// State of the coupled fixed point after `iteration` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingState {
    /// Elastic twist on the aerodynamic grid, rad.
    pub twist_rad: Vec<f64>,
    /// Bending deflection on the structural grid, m.
    pub deflection_m: Vec<f64>,
    /// Running lift on the aerodynamic grid, N/m.
    pub lift_npm: Vec<f64>,
    /// Running torque on the aerodynamic grid, N·m/m.
    pub moment_nmpm: Vec<f64>,
    /// Root incidence used by the latest aero evaluation, rad.
    pub alpha_root_rad: f64,
    /// Max-norm twist update per iteration, rad.
    pub residual_history: Vec<f64>,
    pub iteration: u32,
}

impl CouplingState {
    /// Initial state: undeformed wing, zero loads.
    pub fn initial(wing: &WingModel) -> Self {
        Self {
            twist_rad: vec![0.0; wing.stations_aero],
            deflection_m: vec![0.0; wing.stations_struct],
            lift_npm: vec![0.0; wing.stations_aero],
            moment_nmpm: vec![0.0; wing.stations_aero],
            alpha_root_rad: 0.0,
            residual_history: Vec::new(),
            iteration: 0,
        }
    }

    pub fn tip_twist_rad(&self) -> f64 {
        *self.twist_rad.last().unwrap_or(&0.0)
    }

    pub fn tip_deflection_m(&self) -> f64 {
        *self.deflection_m.last().unwrap_or(&0.0)
    }
}

/// Aerodynamic stage: current aero-grid twist to strip loads.
/// Returns (alpha_root, lift, moment), all on the aerodynamic grid.
pub fn aero_stage(
    wing: &WingModel,
    q_pa: f64,
    alpha: AlphaMode,
    twist_rad: &[f64],
) -> Result<(f64, Vec<f64>, Vec<f64>), AeroError> {
    let alpha_root = match alpha {
        AlphaMode::Trim { cl_target } => trim_alpha(wing, twist_rad, q_pa, cl_target)?,
        AlphaMode::Fixed { alpha_rad } => alpha_rad,
    };
    let loads = aero_loads(wing, twist_rad, alpha_root, q_pa)?;
    Ok((alpha_root, loads.lift_npm, loads.moment_nmpm))
}

/// Structural stage: aero-grid loads onto the structural grid, then beam
/// bending and torsion. Returns (deflection, twist), both on the structural
/// grid.
pub fn structure_stage(
    wing: &WingModel,
    lift_npm: &[f64],
    moment_nmpm: &[f64],
) -> Result<(Vec<f64>, Vec<f64>), AeroError> {
    let aero_y = wing.aero_grid();
    let struct_y = wing.struct_grid();
    let lift_s = map_fields(&aero_y, lift_npm, &struct_y)?;
    let moment_s = map_fields(&aero_y, moment_nmpm, &struct_y)?;
    let deflection = beam_bending(wing, &lift_s)?;
    let twist = beam_torsion(wing, &moment_s)?;
    Ok((deflection, twist))
}

/// Mesh stage: structural twist back onto the aerodynamic grid, blended with
/// the previous aero twist by the relaxation factor. Returns the new aero
/// twist and the max-norm update residual.
pub fn mesh_stage(
    wing: &WingModel,
    twist_struct_rad: &[f64],
    twist_prev_rad: &[f64],
    relaxation: f64,
) -> Result<(Vec<f64>, f64), AeroError> {
    if twist_prev_rad.len() != wing.stations_aero {
        return Err(AeroError::LengthMismatch {
            expected: wing.stations_aero,
            got: twist_prev_rad.len(),
        });
    }
    let struct_y = wing.struct_grid();
    let aero_y = wing.aero_grid();
    let mapped = map_fields(&struct_y, twist_struct_rad, &aero_y)?;
    let mut twist_new = Vec::with_capacity(wing.stations_aero);
    let mut residual = 0.0_f64;
    for i in 0..wing.stations_aero {
        let blended = (1.0 - relaxation) * twist_prev_rad[i] + relaxation * mapped[i];
        residual = residual.max((blended - twist_prev_rad[i]).abs());
        twist_new.push(blended);
    }
    Ok((twist_new, residual))
}

/// One full coupling iteration: aero, map to structure, beam response, map
/// back, relax, record the residual.
pub fn coupling_step(
    state: &CouplingState,
    wing: &WingModel,
    q_pa: f64,
    alpha: AlphaMode,
    relaxation: f64,
) -> Result<CouplingState, AeroError> {
    let (alpha_root, lift, moment) = aero_stage(wing, q_pa, alpha, &state.twist_rad)?;
    let (deflection, twist_struct) = structure_stage(wing, &lift, &moment)?;
    let (twist_new, residual) = mesh_stage(wing, &twist_struct, &state.twist_rad, relaxation)?;
    let mut residual_history = state.residual_history.clone();
    residual_history.push(residual);
    Ok(CouplingState {
        twist_rad: twist_new,
        deflection_m: deflection,
        lift_npm: lift,
        moment_nmpm: moment,
        alpha_root_rad: alpha_root,
        residual_history,
        iteration: state.iteration + 1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    Diverged,
}

/// Per-iteration convergence record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iteration: u32,
    pub residual_rad: f64,
    pub tip_twist_rad: f64,
    pub tip_deflection_m: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub iterations: u32,
    pub state: CouplingState,
    pub history: Vec<IterationRecord>,
}

/// Number of consecutive residual increases that, combined with a 10³ blowup
/// over the first residual, declares early divergence.
const DIVERGENCE_GROWTH_STEPS: usize = 3;
const DIVERGENCE_BLOWUP_FACTOR: f64 = 1e3;

/// Iterate the coupling at a prescribed dynamic pressure until the twist
/// update drops below tolerance, the iteration cap is hit, or the residual
/// blows up monotonically.
pub fn solve_at_q(
    wing: &WingModel,
    q_pa: f64,
    alpha: AlphaMode,
    opts: &CouplingOptions,
) -> Result<SolveResult, AeroError> {
    wing.validate()?;
    opts.validate()?;
    let mut state = CouplingState::initial(wing);
    let mut history = Vec::new();
    for k in 1..=opts.max_iterations {
        state = coupling_step(&state, wing, q_pa, alpha, opts.relaxation)?;
        let residual = *state.residual_history.last().expect("step pushes a residual");
        history.push(IterationRecord {
            iteration: k,
            residual_rad: residual,
            tip_twist_rad: state.tip_twist_rad(),
            tip_deflection_m: state.tip_deflection_m(),
        });
        if residual < opts.tolerance_rad {
            return Ok(SolveResult {
                status: SolveStatus::Converged,
                iterations: k,
                state,
                history,
            });
        }
        let r = &state.residual_history;
        if r.len() > DIVERGENCE_GROWTH_STEPS {
            let tail = &r[r.len() - (DIVERGENCE_GROWTH_STEPS + 1)..];
            let growing = tail.windows(2).all(|w| w[1] > w[0]);
            if growing && residual > DIVERGENCE_BLOWUP_FACTOR * r[0] {
                return Ok(SolveResult {
                    status: SolveStatus::Diverged,
                    iterations: k,
                    state,
                    history,
                });
            }
        }
    }
    Ok(SolveResult {
        status: SolveStatus::Diverged,
        iterations: opts.max_iterations,
        state,
        history,
    })
}

/// Solve a flight case: resolve the atmosphere and lift target, then iterate
/// the coupling. `trim` selects between per-iteration trim and a fixed root
/// incidence.
pub fn solve_static(
    case: &FlightCase,
    wing: &WingModel,
    opts: &CouplingOptions,
    trim: bool,
    fixed_alpha_rad: f64,
) -> Result<SolveResult, AeroError> {
    let fc = flight_condition(case, wing)?;
    let alpha = if trim {
        AlphaMode::Trim {
            cl_target: fc.cl_target,
        }
    } else {
        AlphaMode::Fixed {
            alpha_rad: fixed_alpha_rad,
        }
    };
    solve_at_q(wing, fc.dynamic_pressure_pa, alpha, opts)
}

/// Closed-form torsional divergence pressure of a uniform cantilever:
/// q_D = GJ (π / 2L)² / (c · e · a).
///
/// Requires constant chord, elastic-axis offset and torsional stiffness.
pub fn divergence_q(wing: &WingModel) -> Result<f64, AeroError> {
    let chord = wing
        .chord_m
        .constant_value()
        .ok_or_else(|| AeroError::InvalidWing("divergence_q needs constant chord".into()))?;
    let offset = wing
        .ea_offset_m
        .constant_value()
        .ok_or_else(|| AeroError::InvalidWing("divergence_q needs constant ea_offset".into()))?;
    let gj = wing
        .gj_nm2
        .constant_value()
        .ok_or_else(|| AeroError::InvalidWing("divergence_q needs constant GJ".into()))?;
    if offset <= 0.0 {
        return Err(AeroError::NoDivergence);
    }
    let k = std::f64::consts::PI / (2.0 * wing.half_span_m);
    Ok(gj * k * k / (chord * offset * wing.lift_slope_per_rad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aeroelastic::wing::SpanProperty;
    use approx::assert_relative_eq;

    fn demo_wing() -> WingModel {
        WingModel {
            half_span_m: 15.0,
            stations_aero: 40,
            stations_struct: 60,
            chord_m: SpanProperty::Constant(3.0),
            lift_slope_per_rad: std::f64::consts::TAU,
            ea_offset_m: SpanProperty::Constant(0.25),
            ei_nm2: SpanProperty::Constant(1.0e8),
            gj_nm2: SpanProperty::Constant(8.0e6),
            geometric_twist_rad: SpanProperty::Constant(0.0),
            ref_area_m2: 90.0,
            weight_n: 5.0e5,
        }
    }

    #[test]
    fn divergence_pressure_closed_form() {
        let w = demo_wing();
        let q = divergence_q(&w).unwrap();
        // GJ (pi/2L)^2 / (c e a) with the demo constants
        assert_relative_eq!(q, 1.86e4, max_relative = 0.005);

        let mut stiffer = w.clone();
        stiffer.gj_nm2 = SpanProperty::Constant(1.6e7);
        assert_relative_eq!(divergence_q(&stiffer).unwrap(), 2.0 * q, max_relative = 1e-12);
    }

    #[test]
    fn zero_offset_has_no_divergence() {
        let mut w = demo_wing();
        w.ea_offset_m = SpanProperty::Constant(0.0);
        assert!(matches!(divergence_q(&w), Err(AeroError::NoDivergence)));
    }

    #[test]
    fn zero_offset_converges_immediately() {
        // no aero moment -> twist stays zero -> residual 0 after first step
        let mut w = demo_wing();
        w.ea_offset_m = SpanProperty::Constant(0.0);
        let state = CouplingState::initial(&w);
        let next = coupling_step(
            &state,
            &w,
            9_000.0,
            AlphaMode::Fixed { alpha_rad: 0.05 },
            0.5,
        )
        .unwrap();
        assert_eq!(next.residual_history, vec![0.0]);
        assert!(next.twist_rad.iter().all(|t| *t == 0.0));
    }

    #[test]
    fn unit_relaxation_reproduces_raw_update() {
        let w = demo_wing();
        let state = CouplingState::initial(&w);
        let alpha = AlphaMode::Fixed { alpha_rad: 0.02 };
        let stepped = coupling_step(&state, &w, 5_000.0, alpha, 1.0).unwrap();

        let (_, lift, moment) = aero_stage(&w, 5_000.0, alpha, &state.twist_rad).unwrap();
        let (_, twist_struct) = structure_stage(&w, &lift, &moment).unwrap();
        let raw = map_fields(&w.struct_grid(), &twist_struct, &w.aero_grid()).unwrap();
        for (stepped_v, raw_v) in stepped.twist_rad.iter().zip(&raw) {
            assert_relative_eq!(stepped_v, raw_v, epsilon = 1e-15);
        }
    }

    #[test]
    fn step_matches_composition_of_sub_operations() {
        // 3-station toy with matching grids: every sub-result is hand-checkable.
        let w = WingModel {
            half_span_m: 10.0,
            stations_aero: 3,
            stations_struct: 3,
            chord_m: SpanProperty::Constant(2.0),
            lift_slope_per_rad: std::f64::consts::TAU,
            ea_offset_m: SpanProperty::Constant(0.5),
            ei_nm2: SpanProperty::Constant(1.0e6),
            gj_nm2: SpanProperty::Constant(1.0e5),
            geometric_twist_rad: SpanProperty::Constant(0.0),
            ref_area_m2: 40.0,
            weight_n: 1.0e4,
        };
        let q = 100.0;
        let alpha = 0.1;
        let state = CouplingState::initial(&w);
        let next = coupling_step(
            &state,
            &w,
            q,
            AlphaMode::Fixed { alpha_rad: alpha },
            1.0,
        )
        .unwrap();

        // l = q c a alpha = 100 * 2 * 2pi * 0.1 uniformly; m = 0.5 l.
        let l0 = q * 2.0 * std::f64::consts::TAU * alpha;
        assert_relative_eq!(next.lift_npm[0], l0, max_relative = 1e-12);
        assert_relative_eq!(next.moment_nmpm[2], 0.5 * l0, max_relative = 1e-12);

        // Torque from tip over y = {0, 5, 10}: T = {m0*10, m0*5, 0};
        // twist = cumulative T/GJ: {0, m0*37.5/GJ, m0*50/GJ} by trapezoid.
        let m0 = 0.5 * l0;
        assert_relative_eq!(next.twist_rad[1], m0 * 37.5 / 1.0e5, max_relative = 1e-12);
        assert_relative_eq!(next.twist_rad[2], m0 * 50.0 / 1.0e5, max_relative = 1e-12);

        // Uniform-load cantilever is nodally exact: w(L) = l0 L^4 / (8 EI).
        assert_relative_eq!(
            next.deflection_m[2],
            l0 * 10.0_f64.powi(4) / (8.0 * 1.0e6),
            max_relative = 1e-12
        );
        assert_relative_eq!(next.residual_history[0], next.twist_rad[2], max_relative = 1e-12);
    }

    #[test]
    fn near_rigid_wing_converges_with_negligible_twist() {
        // stiffness x1e6: converged tip twist ~ m L^2 / (2 GJ) ~ 4e-8 rad
        let mut w = demo_wing();
        w.ei_nm2 = SpanProperty::Constant(1.0e14);
        w.gj_nm2 = SpanProperty::Constant(8.0e12);
        let res = solve_at_q(
            &w,
            9_000.0,
            AlphaMode::Trim { cl_target: 0.45 },
            &CouplingOptions::default(),
        )
        .unwrap();
        assert_eq!(res.status, SolveStatus::Converged);
        assert!(res.state.twist_rad.iter().all(|t| t.abs() < 1e-7));

        // stiffness x1e8 pushes the twist below 1e-9 rad
        w.ei_nm2 = SpanProperty::Constant(1.0e16);
        w.gj_nm2 = SpanProperty::Constant(8.0e14);
        let res = solve_at_q(
            &w,
            9_000.0,
            AlphaMode::Trim { cl_target: 0.45 },
            &CouplingOptions::default(),
        )
        .unwrap();
        assert_eq!(res.status, SolveStatus::Converged);
        assert!(res.state.twist_rad.iter().all(|t| t.abs() < 1e-9));
    }

    #[test]
    fn solve_static_resolves_the_case_then_iterates() {
        let w = demo_wing();
        let case = crate::aeroelastic::FlightCase {
            label: "cruise".into(),
            mach: 0.8,
            altitude_m: 11_277.0,
            cl: Some(0.45),
            nz: None,
        };
        let opts = CouplingOptions::default();
        let via_case = solve_static(&case, &w, &opts, true, 0.0).unwrap();
        assert_eq!(via_case.status, SolveStatus::Converged);

        let fc = crate::aeroelastic::flight_condition(&case, &w).unwrap();
        let direct = solve_at_q(
            &w,
            fc.dynamic_pressure_pa,
            AlphaMode::Trim { cl_target: fc.cl_target },
            &opts,
        )
        .unwrap();
        assert_eq!(via_case.state, direct.state);
        assert_eq!(via_case.iterations, direct.iterations);

        // fixed incidence ignores the lift target
        let fixed = solve_static(&case, &w, &opts, false, 0.02).unwrap();
        assert_eq!(fixed.status, SolveStatus::Converged);
        assert_eq!(fixed.state.alpha_root_rad, 0.02);
    }

    #[test]
    fn beyond_divergence_pressure_diverges() {
        let w = demo_wing();
        let qd = divergence_q(&w).unwrap();
        let res = solve_at_q(
            &w,
            1.2 * qd,
            AlphaMode::Fixed { alpha_rad: 0.05 },
            &CouplingOptions {
                relaxation: 1.0,
                tolerance_rad: 1e-6,
                max_iterations: 1000,
            },
        )
        .unwrap();
        assert_eq!(res.status, SolveStatus::Diverged);
        assert!(res.iterations < 1000, "early divergence detection should fire");
    }

    #[test]
    fn invalid_options_rejected() {
        let w = demo_wing();
        let bad = CouplingOptions {
            relaxation: 0.0,
            ..CouplingOptions::default()
        };
        assert!(solve_at_q(&w, 1.0, AlphaMode::Fixed { alpha_rad: 0.0 }, &bad).is_err());
        let bad_tol = CouplingOptions {
            tolerance_rad: -1.0,
            ..CouplingOptions::default()
        };
        assert!(solve_at_q(&w, 1.0, AlphaMode::Fixed { alpha_rad: 0.0 }, &bad_tol).is_err());
    }
}
