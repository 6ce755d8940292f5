//! Virtual private environments: named resource slices over the shared
//! catalog plus a hierarchical service registry. Slices may overlap across
//! environments; isolation is namespace and fault isolation, with core
//! contention resolved at the runtime layer.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::infrastructure::InfrastructureCatalog;

#[derive(Debug, Error)]
pub enum VpeError {
    #[error("vpe spec syntax error: {0}")]
    Syntax(String),
    #[error("invalid vpe spec: {0}")]
    Invalid(String),
    #[error("unknown cluster {0:?}")]
    UnknownCluster(String),
    #[error("slice exceeds cluster: requested {requested} of {available} nodes in {cluster:?}")]
    SliceExceedsCluster {
        cluster: String,
        requested: usize,
        available: usize,
    },
    #[error("unknown node {0:?} in explicit slice")]
    UnknownNode(String),
    #[error("duplicate service name {0:?} in one scope")]
    DuplicateService(String),
    #[error("unknown service {0:?}")]
    UnknownService(String),
    #[error("unknown vpe {0:?}")]
    UnknownVpe(String),
    #[error("a vpe named {0:?} already exists")]
    DuplicateVpe(String),
    #[error("vpe {0:?} is busy: a workflow is executing")]
    Busy(String),
}

/// Software requirements carried by a service binding.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServiceRequires {
    #[serde(default)]
    pub software: BTreeSet<String>,
}

/// Reserved `kind` marking a composite service; anything else names a
/// builtin component.
pub const COMPOSITE_KIND: &str = "composite";

/// A named service: either a builtin component or a composite of child
/// services forming a nested scope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceBinding {
    pub name: String,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<ServiceBinding>,
    #[serde(default)]
    pub requires: ServiceRequires,
}

impl ServiceBinding {
    pub fn builtin(name: &str, kind: &str) -> Self {
        Self {
            name: name.to_string(),
            kind: kind.to_string(),
            children: Vec::new(),
            requires: ServiceRequires::default(),
        }
    }

    pub fn composite(name: &str, children: Vec<ServiceBinding>) -> Self {
        Self {
            name: name.to_string(),
            kind: COMPOSITE_KIND.to_string(),
            children,
            requires: ServiceRequires::default(),
        }
    }

    pub fn is_composite(&self) -> bool {
        self.kind == COMPOSITE_KIND
    }

    fn validate(&self) -> Result<(), VpeError> {
        if self.name.is_empty() {
            return Err(VpeError::Invalid("service name must be non-empty".into()));
        }
        if self.is_composite() {
            if self.children.is_empty() {
                return Err(VpeError::Invalid(format!(
                    "composite service {:?} needs at least one child",
                    self.name
                )));
            }
        } else if !self.children.is_empty() {
            return Err(VpeError::Invalid(format!(
                "builtin service {:?} cannot have children",
                self.name
            )));
        }
        check_scope_names(&self.children)?;
        for child in &self.children {
            child.validate()?;
        }
        Ok(())
    }

    /// Leaf builtins in declaration order (depth-first).
    pub fn leaves(&self) -> Vec<&ServiceBinding> {
        if self.is_composite() {
            self.children.iter().flat_map(|c| c.leaves()).collect()
        } else {
            vec![self]
        }
    }
}

fn check_scope_names(scope: &[ServiceBinding]) -> Result<(), VpeError> {
    let mut seen = BTreeSet::new();
    for binding in scope {
        if !seen.insert(binding.name.as_str()) {
            return Err(VpeError::DuplicateService(binding.name.clone()));
        }
    }
    Ok(())
}

/// One slice request: a node count (lowest ids win) or an explicit id list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceSpec {
    pub cluster: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_ids: Option<Vec<String>>,
}

/// Environment specification as read from a spec document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VpeSpec {
    pub name: String,
    pub slices: Vec<SliceSpec>,
    #[serde(default)]
    pub services: Vec<ServiceBinding>,
}

/// Parse a VPE spec document.
pub fn load_vpe_spec(text: &str) -> Result<VpeSpec, VpeError> {
    let spec: VpeSpec = serde_json::from_str(text).map_err(|e| VpeError::Syntax(e.to_string()))?;
    if spec.name.is_empty() {
        return Err(VpeError::Invalid("vpe name must be non-empty".into()));
    }
    Ok(spec)
}

/// A deployed environment: resolved slice plus its service registry.
/// Values are immutable; registration produces a new snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct VirtualPrivateEnvironment {
    pub name: String,
    /// Resolved node ids: slice order, ascending within each slice,
    /// first occurrence kept on overlap.
    pub resolved_nodes: Vec<String>,
    services: Vec<ServiceBinding>,
}

/// Resolve a spec against the catalog and deploy the environment.
/// Count slices take the lowest node ids; explicit id lists are honored
/// verbatim. Overlap with other environments is permitted.
pub fn create_vpe(
    catalog: &InfrastructureCatalog,
    spec: &VpeSpec,
) -> Result<VirtualPrivateEnvironment, VpeError> {
    if spec.name.is_empty() {
        return Err(VpeError::Invalid("vpe name must be non-empty".into()));
    }
    let mut resolved_nodes = Vec::new();
    let mut seen = BTreeSet::new();
    for slice in &spec.slices {
        if !catalog.has_cluster(&slice.cluster) {
            return Err(VpeError::UnknownCluster(slice.cluster.clone()));
        }
        let cluster_nodes = catalog.cluster_nodes(&slice.cluster);
        let picked: Vec<String> = match (&slice.node_count, &slice.node_ids) {
            (Some(count), None) => {
                if *count > cluster_nodes.len() {
                    return Err(VpeError::SliceExceedsCluster {
                        cluster: slice.cluster.clone(),
                        requested: *count,
                        available: cluster_nodes.len(),
                    });
                }
                cluster_nodes.iter().take(*count).map(|n| n.id.clone()).collect()
            }
            (None, Some(ids)) => {
                for id in ids {
                    if !cluster_nodes.iter().any(|n| &n.id == id) {
                        return Err(VpeError::UnknownNode(id.clone()));
                    }
                }
                ids.clone()
            }
            _ => {
                return Err(VpeError::Invalid(format!(
                    "slice of {:?} must give exactly one of node_count or node_ids",
                    slice.cluster
                )))
            }
        };
        for id in picked {
            if seen.insert(id.clone()) {
                resolved_nodes.push(id);
            }
        }
    }
    check_scope_names(&spec.services)?;
    for binding in &spec.services {
        binding.validate()?;
    }
    Ok(VirtualPrivateEnvironment {
        name: spec.name.clone(),
        resolved_nodes,
        services: spec.services.clone(),
    })
}

impl VirtualPrivateEnvironment {
    /// Register a service at top scope, returning the updated snapshot.
    pub fn register_service(&self, binding: ServiceBinding) -> Result<Self, VpeError> {
        binding.validate()?;
        if self.services.iter().any(|s| s.name == binding.name) {
            return Err(VpeError::DuplicateService(binding.name));
        }
        let mut next = self.clone();
        next.services.push(binding);
        Ok(next)
    }

    pub fn services(&self) -> &[ServiceBinding] {
        &self.services
    }

    /// Resolve a service name to its leaf builtins, depth-first in
    /// declaration order. When the name exists at several nesting levels the
    /// innermost definition wins; equal depth resolves to the first declared.
    pub fn resolve_service(&self, name: &str) -> Result<Vec<&ServiceBinding>, VpeError> {
        let mut best: Option<(usize, &ServiceBinding)> = None;
        fn walk<'a>(
            scope: &'a [ServiceBinding],
            depth: usize,
            name: &str,
            best: &mut Option<(usize, &'a ServiceBinding)>,
        ) {
            for binding in scope {
                if binding.name == name && best.is_none_or(|(d, _)| depth > d) {
                    *best = Some((depth, binding));
                }
                walk(&binding.children, depth + 1, name, best);
            }
        }
        walk(&self.services, 0, name, &mut best);
        let (_, binding) = best.ok_or_else(|| VpeError::UnknownService(name.to_string()))?;
        Ok(binding.leaves())
    }
}

/// Deployed environments by name, with a busy flag guarding teardown while a
/// workflow executes. Single-writer structure.
#[derive(Debug, Clone, Default)]
pub struct VpeRegistry {
    vpes: BTreeMap<String, VirtualPrivateEnvironment>,
    busy: BTreeSet<String>,
}

impl VpeRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, vpe: VirtualPrivateEnvironment) -> Result<(), VpeError> {
        if self.vpes.contains_key(&vpe.name) {
            return Err(VpeError::DuplicateVpe(vpe.name));
        }
        self.vpes.insert(vpe.name.clone(), vpe);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&VirtualPrivateEnvironment, VpeError> {
        self.vpes
            .get(name)
            .ok_or_else(|| VpeError::UnknownVpe(name.to_string()))
    }

    pub fn mark_busy(&mut self, name: &str) -> Result<(), VpeError> {
        if !self.vpes.contains_key(name) {
            return Err(VpeError::UnknownVpe(name.to_string()));
        }
        self.busy.insert(name.to_string());
        Ok(())
    }

    pub fn mark_idle(&mut self, name: &str) {
        self.busy.remove(name);
    }

    /// Remove an idle environment; overlapping siblings are untouched.
    pub fn teardown(&mut self, name: &str) -> Result<(), VpeError> {
        if !self.vpes.contains_key(name) {
            return Err(VpeError::UnknownVpe(name.to_string()));
        }
        if self.busy.contains(name) {
            return Err(VpeError::Busy(name.to_string()));
        }
        self.vpes.remove(name);
        Ok(())
    }

    pub fn names(&self) -> Vec<&str> {
        self.vpes.keys().map(|k| k.as_str()).collect()
    }
}
