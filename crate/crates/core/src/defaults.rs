//! Self-contained default documents: the testbed catalog, the demo VPE, the
//! coupled aeroelastic workflow and the demo wing with its flight cases.

use crate::aeroelastic::AeroConfig;
use crate::infrastructure::{load_catalog, InfrastructureCatalog};
use crate::vpe::{create_vpe, load_vpe_spec, VirtualPrivateEnvironment, VpeSpec};
use crate::workflow::{load_workflow, WorkflowGraph};

pub const TESTBED_CATALOG_JSON: &str = include_str!("../assets/testbed.json");
pub const DEMO_VPE_JSON: &str = include_str!("../assets/demo_vpe.json");
pub const DEMO_WORKFLOW_JSON: &str = include_str!("../assets/demo_workflow.json");
pub const DEMO_WING_JSON: &str = include_str!("../assets/demo_wing.json");

pub fn testbed_catalog() -> InfrastructureCatalog {
    load_catalog(TESTBED_CATALOG_JSON).expect("embedded testbed catalog is valid")
}

pub fn demo_vpe_spec() -> VpeSpec {
    load_vpe_spec(DEMO_VPE_JSON).expect("embedded demo vpe spec is valid")
}

pub fn demo_vpe(catalog: &InfrastructureCatalog) -> VirtualPrivateEnvironment {
    create_vpe(catalog, &demo_vpe_spec()).expect("demo vpe resolves against the testbed")
}

pub fn demo_workflow() -> WorkflowGraph {
    let wf = load_workflow(DEMO_WORKFLOW_JSON).expect("embedded demo workflow is valid");
    wf.validate_dataflow().expect("embedded demo workflow dataflow is valid");
    wf
}

pub fn demo_aero_config() -> AeroConfig {
    AeroConfig::from_json(DEMO_WING_JSON).expect("embedded wing config is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_documents_load() {
        let catalog = testbed_catalog();
        assert_eq!(catalog.nodes().len(), 19 + 16 + 100 + 3);
        let vpe = demo_vpe(&catalog);
        assert_eq!(vpe.resolved_nodes.len(), 4);
        let wf = demo_workflow();
        assert_eq!(wf.components.len(), 3);
        let cfg = demo_aero_config();
        assert_eq!(cfg.cases.len(), 3);
    }
}
