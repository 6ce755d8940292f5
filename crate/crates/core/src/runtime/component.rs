//! Artifact payloads and the builtin component library.
//!
//! Components are pure functions from input payloads to output payloads,
//! keyed by the artifact names a workflow declares. Placement never reaches
//! a component, so payload values cannot depend on scheduling.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::aeroelastic::{aero_stage, mesh_stage, structure_stage, AlphaMode, WingModel};
use crate::workflow::InitialValue;

/// Typed artifact payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    Scalar(f64),
    Vector(Vec<f64>),
    Bytes(Vec<u8>),
}

impl Payload {
    pub fn from_initial(initial: &InitialValue) -> Payload {
        match initial {
            InitialValue::Scalar(v) => Payload::Scalar(*v),
            InitialValue::Vector(v) => Payload::Vector(v.clone()),
            InitialValue::Zeros { zeros } => Payload::Vector(vec![0.0; *zeros]),
        }
    }

    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            Payload::Scalar(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_vector(&self) -> Option<&[f64]> {
        match self {
            Payload::Vector(v) => Some(v),
            _ => None,
        }
    }

    /// Scalar view for loop-record snapshots: scalars verbatim, vectors by
    /// their last (tip) element.
    pub fn snapshot_value(&self) -> Option<f64> {
        match self {
            Payload::Scalar(v) => Some(*v),
            Payload::Vector(v) => v.last().copied(),
            Payload::Bytes(_) => None,
        }
    }
}

pub type Inputs = BTreeMap<String, Payload>;
pub type Outputs = BTreeMap<String, Payload>;

/// A builtin component implementation.
pub type ComponentFn = Arc<dyn Fn(&Inputs) -> Result<Outputs, String> + Send + Sync>;

/// Builtin components available to a simulation, keyed by kind.
#[derive(Clone, Default)]
pub struct ComponentLibrary {
    fns: BTreeMap<String, ComponentFn>,
}

impl fmt::Debug for ComponentLibrary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComponentLibrary")
            .field("builtins", &self.fns.keys().collect::<Vec<_>>())
            .finish()
    }
}

impl ComponentLibrary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register<F>(&mut self, builtin: &str, f: F)
    where
        F: Fn(&Inputs) -> Result<Outputs, String> + Send + Sync + 'static,
    {
        self.fns.insert(builtin.to_string(), Arc::new(f));
    }

    pub fn get(&self, builtin: &str) -> Option<&ComponentFn> {
        self.fns.get(builtin)
    }
}

/// Flight-point parameters captured by the aeroelastic builtins.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseSetup {
    pub wing: WingModel,
    pub dynamic_pressure_pa: f64,
    pub alpha: AlphaMode,
    pub relaxation: f64,
}

fn require_vector<'a>(inputs: &'a Inputs, name: &str) -> Result<&'a [f64], String> {
    inputs
        .get(name)
        .and_then(Payload::as_vector)
        .ok_or_else(|| format!("expected vector payload {name:?}"))
}

/// Library with the three aeroelastic builtins wired to `setup`, plus the
/// generic `synthetic` compute kind.
///
/// Artifact port names: `aero-strip` reads `twist` and writes `alpha`,
/// `lift`, `moment`; `beam-csm` reads `lift`/`moment` and writes
/// `deflection`/`twist-struct`; `field-map` reads `twist`/`twist-struct`
/// and writes `twist`/`residual`.
pub fn demo_library(setup: &CaseSetup) -> ComponentLibrary {
    let mut lib = ComponentLibrary::new();

    let s = setup.clone();
    lib.register("aero-strip", move |inputs| {
        let twist = require_vector(inputs, "twist")?;
        let (alpha, lift, moment) =
            aero_stage(&s.wing, s.dynamic_pressure_pa, s.alpha, twist).map_err(|e| e.to_string())?;
        let mut out = Outputs::new();
        out.insert("alpha".into(), Payload::Scalar(alpha));
        out.insert("lift".into(), Payload::Vector(lift));
        out.insert("moment".into(), Payload::Vector(moment));
        Ok(out)
    });

    let s = setup.clone();
    lib.register("beam-csm", move |inputs| {
        let lift = require_vector(inputs, "lift")?;
        let moment = require_vector(inputs, "moment")?;
        let (deflection, twist_struct) =
            structure_stage(&s.wing, lift, moment).map_err(|e| e.to_string())?;
        let mut out = Outputs::new();
        out.insert("deflection".into(), Payload::Vector(deflection));
        out.insert("twist-struct".into(), Payload::Vector(twist_struct));
        Ok(out)
    });

    let s = setup.clone();
    lib.register("field-map", move |inputs| {
        let twist_struct = require_vector(inputs, "twist-struct")?;
        let twist_prev = require_vector(inputs, "twist")?;
        let (twist_new, residual) =
            mesh_stage(&s.wing, twist_struct, twist_prev, s.relaxation).map_err(|e| e.to_string())?;
        let mut out = Outputs::new();
        out.insert("twist".into(), Payload::Vector(twist_new));
        out.insert("residual".into(), Payload::Scalar(residual));
        Ok(out)
    });

    register_synthetic(&mut lib);
    lib
}

/// Generic placeholder component: emits a zero scalar for every declared
/// output. Useful for scheduling experiments that do not care about values.
pub fn register_synthetic(lib: &mut ComponentLibrary) {
    lib.register("synthetic", |_inputs| Ok(Outputs::new()));
}
