//! International Standard Atmosphere, troposphere plus lower stratosphere.

use super::AeroError;

/// Specific gas constant of dry air, J/(kg·K).
pub const GAS_CONSTANT_AIR: f64 = 287.05;
/// Standard gravitational acceleration, m/s².
pub const STANDARD_GRAVITY: f64 = 9.80665;
/// Sea-level temperature, K.
pub const SEA_LEVEL_TEMPERATURE_K: f64 = 288.15;
/// Sea-level density, kg/m³.
pub const SEA_LEVEL_DENSITY: f64 = 1.225;
/// Tropospheric lapse rate, K/m.
pub const LAPSE_RATE: f64 = 0.0065;
/// Tropopause altitude, m.
pub const TROPOPAUSE_M: f64 = 11_000.0;
/// Upper limit of the supported altitude range, m.
pub const MAX_ALTITUDE_M: f64 = 20_000.0;

const HEAT_CAPACITY_RATIO: f64 = 1.4;
const DENSITY_EXPONENT: f64 = 4.2561;

/// Static air state at a given altitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtmosphereState {
    pub temperature_k: f64,
    pub density_kg_m3: f64,
    pub speed_of_sound_ms: f64,
}

/// Evaluate the standard atmosphere at geometric altitude `altitude_m`.
///
/// Piecewise model: linear-lapse troposphere up to 11 km, isothermal layer
/// above, valid to 20 km.
pub fn isa_atmosphere(altitude_m: f64) -> Result<AtmosphereState, AeroError> {
    if !(0.0..=MAX_ALTITUDE_M).contains(&altitude_m) {
        return Err(AeroError::AltitudeOutOfRange { altitude_m });
    }
    let (temperature_k, density_kg_m3) = if altitude_m <= TROPOPAUSE_M {
        let t = SEA_LEVEL_TEMPERATURE_K - LAPSE_RATE * altitude_m;
        let rho = SEA_LEVEL_DENSITY * (t / SEA_LEVEL_TEMPERATURE_K).powf(DENSITY_EXPONENT);
        (t, rho)
    } else {
        let t11 = SEA_LEVEL_TEMPERATURE_K - LAPSE_RATE * TROPOPAUSE_M;
        let rho11 = SEA_LEVEL_DENSITY * (t11 / SEA_LEVEL_TEMPERATURE_K).powf(DENSITY_EXPONENT);
        let t = t11;
        let rho = rho11
            * (-STANDARD_GRAVITY * (altitude_m - TROPOPAUSE_M) / (GAS_CONSTANT_AIR * t)).exp();
        (t, rho)
    };
    let speed_of_sound_ms = (HEAT_CAPACITY_RATIO * GAS_CONSTANT_AIR * temperature_k).sqrt();
    Ok(AtmosphereState {
        temperature_k,
        density_kg_m3,
        speed_of_sound_ms,
    })
}
