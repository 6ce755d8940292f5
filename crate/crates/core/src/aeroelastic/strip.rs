//! Strip-theory aerodynamics: spanwise loads, trapezoid lift integration and
//! the root-incidence trim solve.

use super::atmosphere::isa_atmosphere;
use super::wing::{FlightCase, WingModel};
use super::AeroError;

/// Resolved steady flight condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlightCondition {
    pub airspeed_ms: f64,
    pub dynamic_pressure_pa: f64,
    pub cl_target: f64,
}

/// Spanwise running lift and pitching moment on the aerodynamic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StripLoads {
    /// Running lift, N/m.
    pub lift_npm: Vec<f64>,
    /// Running torque about the elastic axis, N·m/m, nose-up positive.
    pub moment_nmpm: Vec<f64>,
}

/// Resolve a flight case to airspeed, dynamic pressure and lift-coefficient
/// target. A load-factor target converts via cl = Nz·W / (q·S).
pub fn flight_condition(case: &FlightCase, wing: &WingModel) -> Result<FlightCondition, AeroError> {
    case.validate()?;
    let atm = isa_atmosphere(case.altitude_m)?;
    let airspeed_ms = case.mach * atm.speed_of_sound_ms;
    let dynamic_pressure_pa = 0.5 * atm.density_kg_m3 * airspeed_ms * airspeed_ms;
    if dynamic_pressure_pa <= 0.0 {
        return Err(AeroError::InvalidCase(
            "dynamic pressure is zero (M = 0?)".into(),
        ));
    }
    let cl_target = match (case.cl, case.nz) {
        (Some(cl), _) => cl,
        (None, Some(nz)) => nz * wing.weight_n / (dynamic_pressure_pa * wing.ref_area_m2),
        (None, None) => unreachable!("validated above"),
    };
    Ok(FlightCondition {
        airspeed_ms,
        dynamic_pressure_pa,
        cl_target,
    })
}

/// Strip loads for the given elastic twist (aero grid) and root incidence:
/// l_i = q c_i a (α + twist_geo_i + twist_i), m_i = e_i l_i.
pub fn aero_loads(
    wing: &WingModel,
    twist_rad: &[f64],
    alpha_root_rad: f64,
    q_pa: f64,
) -> Result<StripLoads, AeroError> {
    if twist_rad.len() != wing.stations_aero {
        return Err(AeroError::LengthMismatch {
            expected: wing.stations_aero,
            got: twist_rad.len(),
        });
    }
    let chord = wing.chord();
    let offset = wing.ea_offset();
    let geo = wing.geometric_twist();
    let a = wing.lift_slope_per_rad;
    let mut lift_npm = Vec::with_capacity(wing.stations_aero);
    let mut moment_nmpm = Vec::with_capacity(wing.stations_aero);
    for i in 0..wing.stations_aero {
        let l = q_pa * chord[i] * a * (alpha_root_rad + geo[i] + twist_rad[i]);
        lift_npm.push(l);
        moment_nmpm.push(offset[i] * l);
    }
    Ok(StripLoads {
        lift_npm,
        moment_nmpm,
    })
}

/// Total lift of both half-wings: trapezoid over the half-span, doubled.
pub fn total_lift(wing: &WingModel, lift_npm: &[f64]) -> f64 {
    let y = wing.aero_grid();
    let mut sum = 0.0;
    for i in 0..y.len() - 1 {
        sum += 0.5 * (lift_npm[i] + lift_npm[i + 1]) * (y[i + 1] - y[i]);
    }
    2.0 * sum
}

/// Root incidence achieving total lift = q·S·cl_target for the given twist.
///
/// Total lift is affine in α, so two strip evaluations (α = 0 and α = 1)
/// determine the exact solution.
pub fn trim_alpha(
    wing: &WingModel,
    twist_rad: &[f64],
    q_pa: f64,
    cl_target: f64,
) -> Result<f64, AeroError> {
    let at_zero = total_lift(wing, &aero_loads(wing, twist_rad, 0.0, q_pa)?.lift_npm);
    let at_one = total_lift(wing, &aero_loads(wing, twist_rad, 1.0, q_pa)?.lift_npm);
    let slope = at_one - at_zero;
    if slope == 0.0 {
        return Err(AeroError::DegenerateLiftSlope);
    }
    Ok((q_pa * wing.ref_area_m2 * cl_target - at_zero) / slope)
}
