//! High-level workflows: sequence/parallel/loop composition over declared
//! components and data artifacts, dataflow validation, and binding of
//! component kinds to VPE services.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vpe::VirtualPrivateEnvironment;

#[derive(Debug, Error)]
pub enum WorkflowError {
    #[error("workflow syntax error: {0}")]
    Syntax(String),
    #[error("invalid workflow: {0}")]
    Invalid(String),
    #[error("task references undeclared component {0:?}")]
    UnknownComponent(String),
    #[error("component {component:?} references undeclared artifact {artifact:?}")]
    UnknownArtifact { component: String, artifact: String },
    #[error("loop needs a condition or max_iter")]
    LoopWithoutTermination,
    #[error("loop condition artifact {0:?} is not produced in the loop body it terminates")]
    ConditionNotProducedInLoop(String),
    #[error(
        "component {component:?} consumes {artifact:?} which is neither produced earlier nor loop-carried with an initial value"
    )]
    UnproducedInput { component: String, artifact: String },
    #[error("artifact {artifact:?} has more than one producer: {producers:?}")]
    DoubleProducer {
        artifact: String,
        producers: Vec<String>,
    },
    #[error("parallel branches race on artifact {0:?}")]
    ParallelRace(String),
    #[error("component kind {0:?} does not resolve to any service")]
    Unresolved(String),
    #[error("component kind {kind:?} resolves to {count} builtins; exactly one is required")]
    AmbiguousBinding { kind: String, count: usize },
}

/// Iteration cap applied to loops declared with a condition but no explicit
/// max_iter, so every simulation terminates.
pub const LOOP_ITERATION_CAP: u32 = 10_000;

/// Software requirements of a component.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentRequires {
    #[serde(default)]
    pub software: BTreeSet<String>,
}

/// An opaque executable unit with declared inputs, outputs and cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentDecl {
    pub id: String,
    pub kind: String,
    #[serde(default)]
    pub requires: ComponentRequires,
    pub work_gflop: f64,
    #[serde(default)]
    pub inputs: Vec<String>,
    #[serde(default)]
    pub outputs: Vec<String>,
}

/// Initial payload of an artifact, making it loop-carried.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialValue {
    Scalar(f64),
    Vector(Vec<f64>),
    Zeros { zeros: usize },
}

/// A named data artifact; `size_bytes` drives the transfer model
/// independently of the payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataArtifactSpec {
    pub name: String,
    pub size_bytes: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialValue>,
}

/// Loop termination test: exit once the artifact's scalar payload drops
/// below the threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopCondition {
    pub artifact: String,
    pub threshold: f64,
}

/// Composition tree over tasks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum GraphNode {
    Task {
        component: String,
    },
    Seq {
        children: Vec<GraphNode>,
    },
    Par {
        children: Vec<GraphNode>,
    },
    Loop {
        body: Box<GraphNode>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_iter: Option<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        condition: Option<LoopCondition>,
    },
}

impl GraphNode {
    pub fn task(component: &str) -> Self {
        GraphNode::Task {
            component: component.to_string(),
        }
    }

    /// Effective iteration bound of a loop node.
    pub fn loop_cap(max_iter: Option<u32>) -> u32 {
        max_iter.unwrap_or(LOOP_ITERATION_CAP)
    }
}

/// A parsed, structurally validated workflow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkflowGraph {
    pub name: String,
    pub components: Vec<ComponentDecl>,
    pub artifacts: Vec<DataArtifactSpec>,
    pub graph: GraphNode,
}

/// Parse and structurally validate a workflow document.
pub fn load_workflow(text: &str) -> Result<WorkflowGraph, WorkflowError> {
    let graph: WorkflowGraph =
        serde_json::from_str(text).map_err(|e| WorkflowError::Syntax(e.to_string()))?;
    graph.validate_structure()?;
    Ok(graph)
}

impl WorkflowGraph {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("workflow serializes")
    }

    pub fn component(&self, id: &str) -> Option<&ComponentDecl> {
        self.components.iter().find(|c| c.id == id)
    }

    pub fn artifact(&self, name: &str) -> Option<&DataArtifactSpec> {
        self.artifacts.iter().find(|a| a.name == name)
    }

    fn validate_structure(&self) -> Result<(), WorkflowError> {
        if self.name.is_empty() {
            return Err(WorkflowError::Invalid("workflow name must be non-empty".into()));
        }
        let mut component_ids = BTreeSet::new();
        for c in &self.components {
            if c.id.is_empty() {
                return Err(WorkflowError::Invalid("component id must be non-empty".into()));
            }
            if !component_ids.insert(c.id.as_str()) {
                return Err(WorkflowError::Invalid(format!(
                    "duplicate component id {:?}",
                    c.id
                )));
            }
            if c.work_gflop <= 0.0 {
                return Err(WorkflowError::Invalid(format!(
                    "component {:?}: work_gflop must be positive",
                    c.id
                )));
            }
            for list in [&c.inputs, &c.outputs] {
                let mut seen = BTreeSet::new();
                for name in list {
                    if name.is_empty() {
                        return Err(WorkflowError::Invalid(format!(
                            "component {:?}: artifact names must be non-empty",
                            c.id
                        )));
                    }
                    if !seen.insert(name.as_str()) {
                        return Err(WorkflowError::Invalid(format!(
                            "component {:?} lists artifact {:?} twice",
                            c.id, name
                        )));
                    }
                    if self.artifact(name).is_none() {
                        return Err(WorkflowError::UnknownArtifact {
                            component: c.id.clone(),
                            artifact: name.clone(),
                        });
                    }
                }
            }
        }
        let mut artifact_names = BTreeSet::new();
        for a in &self.artifacts {
            if !artifact_names.insert(a.name.as_str()) {
                return Err(WorkflowError::Invalid(format!(
                    "duplicate artifact {:?}",
                    a.name
                )));
            }
        }
        self.check_node(&self.graph)?;
        Ok(())
    }

    fn check_node(&self, node: &GraphNode) -> Result<(), WorkflowError> {
        match node {
            GraphNode::Task { component } => {
                if self.component(component).is_none() {
                    return Err(WorkflowError::UnknownComponent(component.clone()));
                }
                Ok(())
            }
            GraphNode::Seq { children } | GraphNode::Par { children } => {
                for c in children {
                    self.check_node(c)?;
                }
                Ok(())
            }
            GraphNode::Loop {
                body,
                max_iter,
                condition,
            } => {
                if max_iter.is_none() && condition.is_none() {
                    return Err(WorkflowError::LoopWithoutTermination);
                }
                if let Some(0) = max_iter {
                    return Err(WorkflowError::Invalid("loop max_iter must be >= 1".into()));
                }
                if let Some(cond) = condition {
                    if self.artifact(&cond.artifact).is_none() {
                        return Err(WorkflowError::UnknownArtifact {
                            component: "<loop condition>".into(),
                            artifact: cond.artifact.clone(),
                        });
                    }
                    // the condition artifact must come from this loop's body,
                    // outside any deeper nested loop
                    if !self.produced_at_depth(body, &cond.artifact, 0) {
                        return Err(WorkflowError::ConditionNotProducedInLoop(
                            cond.artifact.clone(),
                        ));
                    }
                }
                self.check_node(body)
            }
        }
    }

    fn produced_at_depth(&self, node: &GraphNode, artifact: &str, extra_loops: usize) -> bool {
        match node {
            GraphNode::Task { component } => {
                extra_loops == 0
                    && self
                        .component(component)
                        .map(|c| c.outputs.iter().any(|o| o == artifact))
                        .unwrap_or(false)
            }
            GraphNode::Seq { children } | GraphNode::Par { children } => children
                .iter()
                .any(|c| self.produced_at_depth(c, artifact, extra_loops)),
            GraphNode::Loop { body, .. } => {
                self.produced_at_depth(body, artifact, extra_loops + 1)
            }
        }
    }

    /// Check producer/consumer consistency and return the per-artifact audit.
    ///
    /// Every consumed artifact must be produced earlier in the same iteration
    /// (dataflow order) or be loop-carried with a declared initial value;
    /// each artifact has at most one static producer; parallel branches may
    /// not write the same artifact.
    pub fn validate_dataflow(&self) -> Result<DataflowAudit, WorkflowError> {
        // single static producer per artifact
        let mut producers: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        collect_producers(self, &self.graph, &mut producers);
        for (artifact, who) in &producers {
            if who.len() > 1 {
                return Err(WorkflowError::DoubleProducer {
                    artifact: artifact.to_string(),
                    producers: who.iter().map(|s| s.to_string()).collect(),
                });
            }
        }

        let mut available: BTreeSet<String> = BTreeSet::new();
        self.flow_check(&self.graph, &mut available, &BTreeSet::new())?;

        let entries = self
            .artifacts
            .iter()
            .map(|a| AuditEntry {
                artifact: a.name.clone(),
                producer: producers
                    .get(a.name.as_str())
                    .and_then(|v| v.first())
                    .map(|s| s.to_string()),
                loop_carried: a.initial.is_some(),
            })
            .collect();
        Ok(DataflowAudit { entries })
    }

    /// Walk the tree accumulating the set of artifacts available so far.
    /// `loop_outputs` carries everything produced anywhere inside the
    /// enclosing loops, which an initialized artifact may consume before its
    /// in-iteration producer runs.
    fn flow_check(
        &self,
        node: &GraphNode,
        available: &mut BTreeSet<String>,
        loop_outputs: &BTreeSet<String>,
    ) -> Result<(), WorkflowError> {
        match node {
            GraphNode::Task { component } => {
                let decl = self
                    .component(component)
                    .expect("structure validated");
                for input in &decl.inputs {
                    let ok = available.contains(input)
                        || (loop_outputs.contains(input)
                            && self
                                .artifact(input)
                                .map(|a| a.initial.is_some())
                                .unwrap_or(false));
                    if !ok {
                        return Err(WorkflowError::UnproducedInput {
                            component: component.clone(),
                            artifact: input.clone(),
                        });
                    }
                }
                for output in &decl.outputs {
                    available.insert(output.clone());
                }
                Ok(())
            }
            GraphNode::Seq { children } => {
                for c in children {
                    self.flow_check(c, available, loop_outputs)?;
                }
                Ok(())
            }
            GraphNode::Par { children } => {
                // each branch sees only what precedes the parallel block
                let before = available.clone();
                let mut branch_outputs: Vec<BTreeSet<String>> = Vec::new();
                for c in children {
                    let mut branch = before.clone();
                    self.flow_check(c, &mut branch, loop_outputs)?;
                    branch_outputs.push(&branch - &before);
                }
                for (i, a) in branch_outputs.iter().enumerate() {
                    for b in &branch_outputs[i + 1..] {
                        if let Some(shared) = a.intersection(b).next() {
                            return Err(WorkflowError::ParallelRace(shared.clone()));
                        }
                    }
                    available.extend(a.iter().cloned());
                }
                Ok(())
            }
            GraphNode::Loop { body, .. } => {
                let mut body_outputs = BTreeSet::new();
                collect_outputs(self, body, &mut body_outputs);
                let inner: BTreeSet<String> =
                    loop_outputs.union(&body_outputs).cloned().collect();
                self.flow_check(body, available, &inner)
            }
        }
    }

    /// Bind every component's kind to exactly one builtin service of the VPE.
    pub fn bind(&self, vpe: &VirtualPrivateEnvironment) -> Result<BoundWorkflow, WorkflowError> {
        let mut bindings = BTreeMap::new();
        for c in &self.components {
            let leaves = vpe
                .resolve_service(&c.kind)
                .map_err(|_| WorkflowError::Unresolved(c.kind.clone()))?;
            if leaves.len() != 1 {
                return Err(WorkflowError::AmbiguousBinding {
                    kind: c.kind.clone(),
                    count: leaves.len(),
                });
            }
            let leaf = leaves[0];
            let mut software = c.requires.software.clone();
            software.extend(leaf.requires.software.iter().cloned());
            bindings.insert(
                c.id.clone(),
                ResolvedService {
                    service: leaf.name.clone(),
                    builtin: leaf.kind.clone(),
                    software,
                },
            );
        }
        Ok(BoundWorkflow {
            graph: self.clone(),
            bindings,
        })
    }
}

fn collect_producers<'a>(
    wf: &'a WorkflowGraph,
    node: &'a GraphNode,
    producers: &mut BTreeMap<&'a str, Vec<&'a str>>,
) {
    match node {
        GraphNode::Task { component } => {
            if let Some(decl) = wf.component(component) {
                for out in &decl.outputs {
                    producers.entry(out.as_str()).or_default().push(component);
                }
            }
        }
        GraphNode::Seq { children } | GraphNode::Par { children } => {
            for c in children {
                collect_producers(wf, c, producers);
            }
        }
        GraphNode::Loop { body, .. } => collect_producers(wf, body, producers),
    }
}

fn collect_outputs(wf: &WorkflowGraph, node: &GraphNode, out: &mut BTreeSet<String>) {
    match node {
        GraphNode::Task { component } => {
            if let Some(decl) = wf.component(component) {
                out.extend(decl.outputs.iter().cloned());
            }
        }
        GraphNode::Seq { children } | GraphNode::Par { children } => {
            for c in children {
                collect_outputs(wf, c, out);
            }
        }
        GraphNode::Loop { body, .. } => collect_outputs(wf, body, out),
    }
}

/// Result of a dataflow validation, one entry per declared artifact in
/// declaration order.
#[derive(Debug, Clone, PartialEq)]
pub struct DataflowAudit {
    pub entries: Vec<AuditEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditEntry {
    pub artifact: String,
    pub producer: Option<String>,
    pub loop_carried: bool,
}

/// A component bound to one builtin service.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedService {
    pub service: String,
    pub builtin: String,
    /// Union of the component's and the service's software requirements.
    pub software: BTreeSet<String>,
}

/// A workflow whose components all resolved to builtin services.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundWorkflow {
    pub graph: WorkflowGraph,
    pub bindings: BTreeMap<String, ResolvedService>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infrastructure::load_catalog;
    use crate::vpe::{create_vpe, ServiceBinding, SliceSpec, VpeSpec};

    fn demo_doc() -> String {
        r#"{
          "name": "aeroelastic-loop",
          "components": [
            {"id": "cfd", "kind": "aero-strip", "requires": {"software": ["CAST"]},
             "work_gflop": 2.0, "inputs": ["twist"], "outputs": ["alpha", "lift", "moment"]},
            {"id": "csm", "kind": "beam-csm", "requires": {"software": ["CAST"]},
             "work_gflop": 3.0, "inputs": ["lift", "moment"], "outputs": ["deflection", "twist-struct"]},
            {"id": "mesh", "kind": "field-map", "requires": {"software": ["CAST"]},
             "work_gflop": 1.0, "inputs": ["twist", "twist-struct"], "outputs": ["twist", "residual"]}
          ],
          "artifacts": [
            {"name": "twist", "size_bytes": 320, "initial": {"zeros": 40}},
            {"name": "alpha", "size_bytes": 8},
            {"name": "lift", "size_bytes": 320},
            {"name": "moment", "size_bytes": 320},
            {"name": "deflection", "size_bytes": 480},
            {"name": "twist-struct", "size_bytes": 480},
            {"name": "residual", "size_bytes": 8}
          ],
          "graph": {
            "op": "loop",
            "max_iter": 50,
            "condition": {"artifact": "residual", "threshold": 1e-6},
            "body": {"op": "seq", "children": [
              {"op": "task", "component": "cfd"},
              {"op": "task", "component": "csm"},
              {"op": "task", "component": "mesh"}
            ]}
          }
        }"#
        .to_string()
    }

    #[test]
    fn demo_workflow_parses_to_conditioned_loop() {
        let wf = load_workflow(&demo_doc()).unwrap();
        match &wf.graph {
            GraphNode::Loop {
                max_iter,
                condition,
                body,
            } => {
                assert_eq!(*max_iter, Some(50));
                let cond = condition.as_ref().unwrap();
                assert_eq!(cond.artifact, "residual");
                assert_eq!(cond.threshold, 1e-6);
                match body.as_ref() {
                    GraphNode::Seq { children } => {
                        let ids: Vec<_> = children
                            .iter()
                            .map(|c| match c {
                                GraphNode::Task { component } => component.as_str(),
                                _ => "?",
                            })
                            .collect();
                        assert_eq!(ids, vec!["cfd", "csm", "mesh"]);
                    }
                    _ => panic!("body should be a sequence"),
                }
            }
            _ => panic!("root should be a loop"),
        }
        wf.validate_dataflow().unwrap();
    }

    #[test]
    fn empty_sequence_is_a_valid_noop() {
        let wf = load_workflow(
            r#"{"name": "empty", "components": [], "artifacts": [],
                "graph": {"op": "seq", "children": []}}"#,
        )
        .unwrap();
        wf.validate_dataflow().unwrap();
    }

    #[test]
    fn loop_without_termination_rejected() {
        let doc = r#"{
          "name": "bad",
          "components": [{"id": "t", "kind": "k", "work_gflop": 1.0, "inputs": [], "outputs": []}],
          "artifacts": [],
          "graph": {"op": "loop", "body": {"op": "task", "component": "t"}}
        }"#;
        assert!(matches!(
            load_workflow(doc),
            Err(WorkflowError::LoopWithoutTermination)
        ));
    }

    #[test]
    fn repeated_artifact_in_component_ports_rejected() {
        let doc = r#"{
          "name": "dup-port",
          "components": [
            {"id": "t", "kind": "k", "work_gflop": 1.0, "inputs": ["x", "x"], "outputs": []}
          ],
          "artifacts": [{"name": "x", "size_bytes": 1, "initial": 0.0}],
          "graph": {"op": "task", "component": "t"}
        }"#;
        assert!(matches!(load_workflow(doc), Err(WorkflowError::Invalid(_))));
    }

    #[test]
    fn task_with_undeclared_component_rejected() {
        let doc = r#"{"name": "bad", "components": [], "artifacts": [],
                      "graph": {"op": "task", "component": "ghost"}}"#;
        assert!(matches!(
            load_workflow(doc),
            Err(WorkflowError::UnknownComponent(c)) if c == "ghost"
        ));
    }

    #[test]
    fn loop_carried_input_requires_initial() {
        let mut wf = load_workflow(&demo_doc()).unwrap();
        wf.artifacts[0].initial = None; // twist no longer initialized
        let err = wf.validate_dataflow().unwrap_err();
        assert!(matches!(
            err,
            WorkflowError::UnproducedInput { artifact, .. } if artifact == "twist"
        ));
    }

    #[test]
    fn sequence_dataflow_accepts_forward_production() {
        let doc = r#"{
          "name": "chain",
          "components": [
            {"id": "a", "kind": "k", "work_gflop": 1.0, "inputs": [], "outputs": ["x"]},
            {"id": "b", "kind": "k", "work_gflop": 1.0, "inputs": ["x"], "outputs": ["y"]}
          ],
          "artifacts": [{"name": "x", "size_bytes": 1}, {"name": "y", "size_bytes": 1}],
          "graph": {"op": "seq", "children": [
            {"op": "task", "component": "a"}, {"op": "task", "component": "b"}
          ]}
        }"#;
        load_workflow(doc).unwrap().validate_dataflow().unwrap();
    }

    #[test]
    fn double_producer_rejected() {
        let doc = r#"{
          "name": "race",
          "components": [
            {"id": "a", "kind": "k", "work_gflop": 1.0, "inputs": [], "outputs": ["loads"]},
            {"id": "b", "kind": "k", "work_gflop": 1.0, "inputs": [], "outputs": ["loads"]}
          ],
          "artifacts": [{"name": "loads", "size_bytes": 1}],
          "graph": {"op": "par", "children": [
            {"op": "task", "component": "a"}, {"op": "task", "component": "b"}
          ]}
        }"#;
        let err = load_workflow(doc).unwrap().validate_dataflow().unwrap_err();
        assert!(matches!(err, WorkflowError::DoubleProducer { artifact, .. } if artifact == "loads"));
    }

    #[test]
    fn parallel_validation_invariant_under_reordering() {
        let doc = r#"{
          "name": "par",
          "components": [
            {"id": "a", "kind": "k", "work_gflop": 1.0, "inputs": [], "outputs": ["x"]},
            {"id": "b", "kind": "k", "work_gflop": 1.0, "inputs": [], "outputs": ["y"]}
          ],
          "artifacts": [{"name": "x", "size_bytes": 1}, {"name": "y", "size_bytes": 1}],
          "graph": {"op": "par", "children": [
            {"op": "task", "component": "a"}, {"op": "task", "component": "b"}
          ]}
        }"#;
        let wf = load_workflow(doc).unwrap();
        assert!(wf.validate_dataflow().is_ok());
        let mut flipped = wf.clone();
        if let GraphNode::Par { children } = &mut flipped.graph {
            children.reverse();
        }
        assert!(flipped.validate_dataflow().is_ok());
    }

    #[test]
    fn sibling_branch_output_is_not_available() {
        let doc = r#"{
          "name": "par-dep",
          "components": [
            {"id": "a", "kind": "k", "work_gflop": 1.0, "inputs": [], "outputs": ["x"]},
            {"id": "b", "kind": "k", "work_gflop": 1.0, "inputs": ["x"], "outputs": ["y"]}
          ],
          "artifacts": [{"name": "x", "size_bytes": 1}, {"name": "y", "size_bytes": 1}],
          "graph": {"op": "par", "children": [
            {"op": "task", "component": "a"}, {"op": "task", "component": "b"}
          ]}
        }"#;
        let err = load_workflow(doc).unwrap().validate_dataflow().unwrap_err();
        assert!(matches!(err, WorkflowError::UnproducedInput { .. }));
    }

    #[test]
    fn condition_artifact_must_come_from_the_loop_body() {
        let doc = r#"{
          "name": "bad-cond",
          "components": [
            {"id": "t", "kind": "k", "work_gflop": 1.0, "inputs": [], "outputs": ["out"]}
          ],
          "artifacts": [{"name": "out", "size_bytes": 1}, {"name": "res", "size_bytes": 8}],
          "graph": {"op": "loop", "max_iter": 5,
                    "condition": {"artifact": "res", "threshold": 0.1},
                    "body": {"op": "task", "component": "t"}}
        }"#;
        assert!(matches!(
            load_workflow(doc),
            Err(WorkflowError::ConditionNotProducedInLoop(a)) if a == "res"
        ));
    }

    #[test]
    fn condition_must_come_from_the_innermost_loop() {
        // the producer sits in a nested inner loop, so the outer loop may
        // not test the artifact; the inner one may
        let inner_ok = r#"{
          "name": "nested",
          "components": [
            {"id": "t", "kind": "k", "work_gflop": 1.0, "inputs": [], "outputs": ["res"]}
          ],
          "artifacts": [{"name": "res", "size_bytes": 8}],
          "graph": {"op": "loop", "max_iter": 3,
                    "body": {"op": "loop", "max_iter": 5,
                             "condition": {"artifact": "res", "threshold": 0.1},
                             "body": {"op": "task", "component": "t"}}}
        }"#;
        load_workflow(inner_ok).unwrap();

        let outer_bad = r#"{
          "name": "nested",
          "components": [
            {"id": "t", "kind": "k", "work_gflop": 1.0, "inputs": [], "outputs": ["res"]}
          ],
          "artifacts": [{"name": "res", "size_bytes": 8}],
          "graph": {"op": "loop", "max_iter": 3,
                    "condition": {"artifact": "res", "threshold": 0.1},
                    "body": {"op": "loop", "max_iter": 5,
                             "body": {"op": "task", "component": "t"}}}
        }"#;
        assert!(matches!(
            load_workflow(outer_bad),
            Err(WorkflowError::ConditionNotProducedInLoop(_))
        ));
    }

    #[test]
    fn round_trip_is_identity_on_the_graph_value() {
        let wf = load_workflow(&demo_doc()).unwrap();
        let again = load_workflow(&wf.to_json()).unwrap();
        assert_eq!(wf, again);
    }

    #[test]
    fn bind_resolves_one_builtin_per_component() {
        let cat = load_catalog(
            r#"{"sites": [{"id": "s", "clusters": [
                 {"id": "nina", "node_count": 4, "cores_per_node": 2, "clock_ghz": 2.0,
                  "software": ["CAST"], "os": "l",
                  "intra_bandwidth_mbps": 1000.0, "intra_latency_ms": 0.1}]}]}"#,
        )
        .unwrap();
        let spec = VpeSpec {
            name: "demo".into(),
            slices: vec![SliceSpec {
                cluster: "nina".into(),
                node_count: Some(4),
                node_ids: None,
            }],
            services: vec![
                ServiceBinding::builtin("aero-strip", "aero-strip"),
                ServiceBinding::builtin("beam-csm", "beam-csm"),
                ServiceBinding::builtin("field-map", "field-map"),
            ],
        };
        let vpe = create_vpe(&cat, &spec).unwrap();
        let wf = load_workflow(&demo_doc()).unwrap();
        let bound = wf.bind(&vpe).unwrap();
        assert_eq!(bound.bindings["cfd"].builtin, "aero-strip");
        assert_eq!(bound.bindings["csm"].builtin, "beam-csm");
        assert_eq!(bound.bindings["mesh"].builtin, "field-map");
        assert!(bound.bindings["cfd"].software.contains("CAST"));

        let mut missing = wf.clone();
        missing.components[0].kind = "missing-solver".into();
        assert!(matches!(
            missing.bind(&vpe),
            Err(WorkflowError::Unresolved(k)) if k == "missing-solver"
        ));
    }

    #[test]
    fn bind_rejects_multi_leaf_composites() {
        let cat = load_catalog(
            r#"{"sites": [{"id": "s", "clusters": [
                 {"id": "n", "node_count": 1, "cores_per_node": 1, "clock_ghz": 1.0,
                  "software": [], "os": "l",
                  "intra_bandwidth_mbps": 100.0, "intra_latency_ms": 0.1}]}]}"#,
        )
        .unwrap();
        let spec = VpeSpec {
            name: "v".into(),
            slices: vec![SliceSpec {
                cluster: "n".into(),
                node_count: Some(1),
                node_ids: None,
            }],
            services: vec![ServiceBinding::composite(
                "pair",
                vec![
                    ServiceBinding::builtin("x", "kx"),
                    ServiceBinding::builtin("y", "ky"),
                ],
            )],
        };
        let vpe = create_vpe(&cat, &spec).unwrap();
        let doc = r#"{
          "name": "w",
          "components": [{"id": "t", "kind": "pair", "work_gflop": 1.0, "inputs": [], "outputs": []}],
          "artifacts": [],
          "graph": {"op": "task", "component": "t"}
        }"#;
        let wf = load_workflow(doc).unwrap();
        assert!(matches!(
            wf.bind(&vpe),
            Err(WorkflowError::AmbiguousBinding { count: 2, .. })
        ));
    }
}
