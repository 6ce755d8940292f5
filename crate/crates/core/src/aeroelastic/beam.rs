//! Cantilever beam response: Euler–Bernoulli bending and Saint-Venant
//! torsion, integrated by repeated trapezoid sums on the structural grid.

use super::wing::WingModel;
use super::AeroError;

/// Cumulative trapezoid integral measured from the tip:
/// `out[i] = ∫_{y_i}^{L} f dy`.
fn integrate_from_tip(y: &[f64], f: &[f64]) -> Vec<f64> {
    let n = y.len();
    let mut out = vec![0.0; n];
    for i in (0..n.saturating_sub(1)).rev() {
        out[i] = out[i + 1] + 0.5 * (f[i] + f[i + 1]) * (y[i + 1] - y[i]);
    }
    out
}

/// Cumulative trapezoid integral measured from the root:
/// `out[i] = ∫_{0}^{y_i} f dy`.
fn integrate_from_root(y: &[f64], f: &[f64]) -> Vec<f64> {
    let n = y.len();
    let mut out = vec![0.0; n];
    for i in 1..n {
        out[i] = out[i - 1] + 0.5 * (f[i] + f[i - 1]) * (y[i] - y[i - 1]);
    }
    out
}

/// Bending deflection of the clamped half-wing under the spanwise load
/// `lift_npm` (N/m, one entry per structural station).
///
/// Shear and moment accumulate from the free tip, slope and deflection from
/// the clamped root, so w(0) = w'(0) = 0 by construction.
pub fn beam_bending(wing: &WingModel, lift_npm: &[f64]) -> Result<Vec<f64>, AeroError> {
    if lift_npm.len() != wing.stations_struct {
        return Err(AeroError::LengthMismatch {
            expected: wing.stations_struct,
            got: lift_npm.len(),
        });
    }
    let y = wing.struct_grid();
    let ei = wing.ei();
    let shear = integrate_from_tip(&y, lift_npm);
    let moment = integrate_from_tip(&y, &shear);
    let curvature: Vec<f64> = moment.iter().zip(&ei).map(|(m, ei)| m / ei).collect();
    let slope = integrate_from_root(&y, &curvature);
    Ok(integrate_from_root(&y, &slope))
}

/// Elastic twist of the clamped half-wing under the spanwise torque
/// distribution `moment_nmpm` (N·m/m, one entry per structural station).
///
/// Torque accumulates from the free tip (θ'(L) = 0), twist from the root
/// (θ(0) = 0).
pub fn beam_torsion(wing: &WingModel, moment_nmpm: &[f64]) -> Result<Vec<f64>, AeroError> {
    if moment_nmpm.len() != wing.stations_struct {
        return Err(AeroError::LengthMismatch {
            expected: wing.stations_struct,
            got: moment_nmpm.len(),
        });
    }
    let y = wing.struct_grid();
    let gj = wing.gj();
    let torque = integrate_from_tip(&y, moment_nmpm);
    let rate: Vec<f64> = torque.iter().zip(&gj).map(|(t, gj)| t / gj).collect();
    Ok(integrate_from_root(&y, &rate))
}
