//! Wing definition: planform, stiffness distributions and flight cases.

use serde::{Deserialize, Serialize};

use super::AeroError;

/// A spanwise property, either uniform or tabulated per station.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpanProperty {
    Constant(f64),
    Table(Vec<f64>),
}

impl SpanProperty {
    /// Sample the property on a grid of `n` stations.
    pub fn sample(&self, n: usize) -> Vec<f64> {
        match self {
            SpanProperty::Constant(v) => vec![*v; n],
            SpanProperty::Table(t) => t.clone(),
        }
    }

    /// The uniform value, if the property is constant along the span.
    pub fn constant_value(&self) -> Option<f64> {
        match self {
            SpanProperty::Constant(v) => Some(*v),
            SpanProperty::Table(t) => {
                let first = *t.first()?;
                t.iter().all(|v| *v == first).then_some(first)
            }
        }
    }

    fn len_matches(&self, n: usize) -> bool {
        match self {
            SpanProperty::Constant(_) => true,
            SpanProperty::Table(t) => t.len() == n,
        }
    }

    fn all_positive(&self) -> bool {
        match self {
            SpanProperty::Constant(v) => *v > 0.0,
            SpanProperty::Table(t) => !t.is_empty() && t.iter().all(|v| *v > 0.0),
        }
    }
}

/// Half-wing beam/strip idealization of the airframe.
///
/// Chord, elastic-axis offset and geometric twist are tabulated on the
/// aerodynamic grid; bending and torsional stiffness on the structural grid.
/// Both grids run from the root (y = 0) to the tip (y = half span).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WingModel {
    pub half_span_m: f64,
    pub stations_aero: usize,
    pub stations_struct: usize,
    pub chord_m: SpanProperty,
    pub lift_slope_per_rad: f64,
    pub ea_offset_m: SpanProperty,
    pub ei_nm2: SpanProperty,
    pub gj_nm2: SpanProperty,
    #[serde(default = "zero_property")]
    pub geometric_twist_rad: SpanProperty,
    pub ref_area_m2: f64,
    pub weight_n: f64,
}

fn zero_property() -> SpanProperty {
    SpanProperty::Constant(0.0)
}

impl WingModel {
    /// Validate dimensional and tabulation invariants.
    pub fn validate(&self) -> Result<(), AeroError> {
        if self.half_span_m <= 0.0 {
            return Err(AeroError::InvalidWing("half span must be positive".into()));
        }
        if self.stations_aero < 3 || self.stations_struct < 3 {
            return Err(AeroError::InvalidWing(
                "station counts must be at least 3".into(),
            ));
        }
        if !self.chord_m.all_positive() {
            return Err(AeroError::InvalidWing("chord must be positive".into()));
        }
        if !self.ei_nm2.all_positive() || !self.gj_nm2.all_positive() {
            return Err(AeroError::InvalidWing(
                "EI and GJ must be positive".into(),
            ));
        }
        if self.lift_slope_per_rad <= 0.0 {
            return Err(AeroError::InvalidWing("lift slope must be positive".into()));
        }
        for (prop, n, what) in [
            (&self.chord_m, self.stations_aero, "chord"),
            (&self.ea_offset_m, self.stations_aero, "ea_offset"),
            (&self.geometric_twist_rad, self.stations_aero, "geometric_twist"),
            (&self.ei_nm2, self.stations_struct, "EI"),
            (&self.gj_nm2, self.stations_struct, "GJ"),
        ] {
            if !prop.len_matches(n) {
                return Err(AeroError::InvalidWing(format!(
                    "{what} table length does not match its grid ({n} stations)"
                )));
            }
        }
        Ok(())
    }

    /// Aerodynamic stations, root to tip.
    pub fn aero_grid(&self) -> Vec<f64> {
        uniform_grid(self.half_span_m, self.stations_aero)
    }

    /// Structural stations, root to tip.
    pub fn struct_grid(&self) -> Vec<f64> {
        uniform_grid(self.half_span_m, self.stations_struct)
    }

    pub fn chord(&self) -> Vec<f64> {
        self.chord_m.sample(self.stations_aero)
    }

    pub fn ea_offset(&self) -> Vec<f64> {
        self.ea_offset_m.sample(self.stations_aero)
    }

    pub fn geometric_twist(&self) -> Vec<f64> {
        self.geometric_twist_rad.sample(self.stations_aero)
    }

    pub fn ei(&self) -> Vec<f64> {
        self.ei_nm2.sample(self.stations_struct)
    }

    pub fn gj(&self) -> Vec<f64> {
        self.gj_nm2.sample(self.stations_struct)
    }
}

fn uniform_grid(length: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| length * i as f64 / (n - 1) as f64)
        .collect()
}

/// Steady flight condition request: Mach/altitude plus either a lift
/// coefficient or a load factor target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlightCase {
    pub label: String,
    pub mach: f64,
    pub altitude_m: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cl: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nz: Option<f64>,
}

impl FlightCase {
    pub fn validate(&self) -> Result<(), AeroError> {
        if !(0.0 < self.mach && self.mach < 1.0) {
            return Err(AeroError::InvalidCase(format!(
                "mach {} outside (0, 1)",
                self.mach
            )));
        }
        if !(0.0..=20_000.0).contains(&self.altitude_m) {
            return Err(AeroError::AltitudeOutOfRange {
                altitude_m: self.altitude_m,
            });
        }
        if self.cl.is_none() && self.nz.is_none() {
            return Err(AeroError::InvalidCase(format!(
                "case {:?} needs either cl or nz",
                self.label
            )));
        }
        Ok(())
    }
}

/// Wing plus flight cases, as read from a configuration document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AeroConfig {
    pub wing: WingModel,
    pub cases: Vec<FlightCase>,
}

impl AeroConfig {
    pub fn from_json(text: &str) -> Result<Self, AeroError> {
        let cfg: AeroConfig =
            serde_json::from_str(text).map_err(|e| AeroError::Config(e.to_string()))?;
        cfg.wing.validate()?;
        for case in &cfg.cases {
            case.validate()?;
        }
        Ok(cfg)
    }

    pub fn case(&self, label: &str) -> Option<&FlightCase> {
        self.cases.iter().find(|c| c.label == label)
    }
}
