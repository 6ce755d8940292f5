//! Compute-resource catalog: sites, clusters, generated nodes and network
//! links, plus the capability query and data-transfer cost model built on it.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("catalog syntax error: {0}")]
    Syntax(String),
    #[error("empty catalog: no nodes declared")]
    EmptyCatalog,
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("link endpoint {0:?} does not name a known cluster or site")]
    DanglingLink(String),
    #[error("invalid catalog: {0}")]
    Invalid(String),
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("no route between {from:?} and {to:?}")]
    NoRoute { from: String, to: String },
}

/// A single compute node generated from its cluster declaration.
#[derive(Debug, Clone, PartialEq)]
pub struct ComputeNode {
    pub id: String,
    pub cluster_id: String,
    pub site_id: String,
    pub cores: u32,
    pub clock_ghz: f64,
    pub software: BTreeSet<String>,
    pub os: String,
    /// Per-core throughput override; when absent the clock maps 1 GHz to
    /// 1 Gflop/s.
    pub gflops_per_core: Option<f64>,
}

/// Per-core sustained throughput in Gflop/s.
pub fn node_speed(node: &ComputeNode) -> f64 {
    node.gflops_per_core.unwrap_or(node.clock_ghz)
}

/// A point-to-point link between two scopes (cluster or site ids). Lookup is
/// symmetric in the endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkLink {
    pub from: String,
    pub to: String,
    pub bandwidth_mbps: f64,
    pub latency_ms: f64,
}

impl NetworkLink {
    fn transfer_seconds(&self, bytes: u64) -> f64 {
        self.latency_ms / 1e3 + bytes as f64 * 8.0 / (self.bandwidth_mbps * 1e6)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ClusterDoc {
    id: String,
    node_count: usize,
    cores_per_node: u32,
    clock_ghz: f64,
    software: Vec<String>,
    os: String,
    intra_bandwidth_mbps: f64,
    intra_latency_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    gflops_per_core: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SiteDoc {
    id: String,
    clusters: Vec<ClusterDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CatalogDoc {
    sites: Vec<SiteDoc>,
    #[serde(default)]
    links: Vec<NetworkLink>,
}

/// Node capability filter: required software tags and a clock floor.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Requirements {
    pub software: BTreeSet<String>,
    pub min_clock_ghz: f64,
}

impl Requirements {
    pub fn software(tags: &[&str]) -> Self {
        Self {
            software: tags.iter().map(|t| t.to_string()).collect(),
            ..Self::default()
        }
    }
}

/// Validated resource catalog with generated per-node records.
#[derive(Debug, Clone, PartialEq)]
pub struct InfrastructureCatalog {
    doc: CatalogDoc,
    nodes: Vec<ComputeNode>,
    node_index: BTreeMap<String, usize>,
    cluster_site: BTreeMap<String, String>,
    intra_links: BTreeMap<String, NetworkLink>,
    site_ids: BTreeSet<String>,
}

/// Parse and validate a catalog document.
pub fn load_catalog(text: &str) -> Result<InfrastructureCatalog, CatalogError> {
    let doc: CatalogDoc =
        serde_json::from_str(text).map_err(|e| CatalogError::Syntax(e.to_string()))?;
    InfrastructureCatalog::from_doc(doc)
}

impl InfrastructureCatalog {
    fn from_doc(doc: CatalogDoc) -> Result<Self, CatalogError> {
        let mut nodes = Vec::new();
        let mut node_index = BTreeMap::new();
        let mut cluster_site = BTreeMap::new();
        let mut intra_links = BTreeMap::new();
        let mut site_ids = BTreeSet::new();

        for site in &doc.sites {
            if site.id.is_empty() {
                return Err(CatalogError::Invalid("empty site id".into()));
            }
            if !site_ids.insert(site.id.clone()) {
                return Err(CatalogError::DuplicateId(site.id.clone()));
            }
            for cluster in &site.clusters {
                if cluster.id.is_empty() {
                    return Err(CatalogError::Invalid("empty cluster id".into()));
                }
                if cluster_site
                    .insert(cluster.id.clone(), site.id.clone())
                    .is_some()
                {
                    return Err(CatalogError::DuplicateId(cluster.id.clone()));
                }
                if cluster.node_count == 0 {
                    return Err(CatalogError::Invalid(format!(
                        "cluster {:?} declares zero nodes",
                        cluster.id
                    )));
                }
                if cluster.cores_per_node == 0 {
                    return Err(CatalogError::Invalid(format!(
                        "cluster {:?}: cores_per_node must be >= 1",
                        cluster.id
                    )));
                }
                if cluster.clock_ghz <= 0.0 {
                    return Err(CatalogError::Invalid(format!(
                        "cluster {:?}: clock_ghz must be positive",
                        cluster.id
                    )));
                }
                if cluster.intra_bandwidth_mbps <= 0.0 || cluster.intra_latency_ms < 0.0 {
                    return Err(CatalogError::Invalid(format!(
                        "cluster {:?}: invalid intra-cluster link",
                        cluster.id
                    )));
                }
                if let Some(g) = cluster.gflops_per_core {
                    if g <= 0.0 {
                        return Err(CatalogError::Invalid(format!(
                            "cluster {:?}: gflops_per_core must be positive",
                            cluster.id
                        )));
                    }
                }
                intra_links.insert(
                    cluster.id.clone(),
                    NetworkLink {
                        from: cluster.id.clone(),
                        to: cluster.id.clone(),
                        bandwidth_mbps: cluster.intra_bandwidth_mbps,
                        latency_ms: cluster.intra_latency_ms,
                    },
                );
                let width = std::cmp::max(2, cluster.node_count.to_string().len());
                for i in 1..=cluster.node_count {
                    let id = format!("{}-{:0width$}", cluster.id, i, width = width);
                    let node = ComputeNode {
                        id: id.clone(),
                        cluster_id: cluster.id.clone(),
                        site_id: site.id.clone(),
                        cores: cluster.cores_per_node,
                        clock_ghz: cluster.clock_ghz,
                        software: cluster.software.iter().cloned().collect(),
                        os: cluster.os.clone(),
                        gflops_per_core: cluster.gflops_per_core,
                    };
                    if node_index.contains_key(&id) {
                        return Err(CatalogError::DuplicateId(id));
                    }
                    nodes.push(node);
                    node_index.insert(id, nodes.len() - 1);
                }
            }
        }
        if nodes.is_empty() {
            return Err(CatalogError::EmptyCatalog);
        }
        for link in &doc.links {
            for scope in [&link.from, &link.to] {
                if !cluster_site.contains_key(scope) && !site_ids.contains(scope) {
                    return Err(CatalogError::DanglingLink(scope.clone()));
                }
            }
            if link.bandwidth_mbps <= 0.0 || link.latency_ms < 0.0 {
                return Err(CatalogError::Invalid(format!(
                    "invalid link {:?} -> {:?}",
                    link.from, link.to
                )));
            }
        }

        nodes.sort_by(|a, b| a.id.cmp(&b.id));
        let node_index = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.clone(), i))
            .collect();
        Ok(Self {
            doc,
            nodes,
            node_index,
            cluster_site,
            intra_links,
            site_ids,
        })
    }

    /// Serialize back to the document form accepted by `load_catalog`.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.doc).expect("catalog doc serializes")
    }

    /// All nodes, ordered by id.
    pub fn nodes(&self) -> &[ComputeNode] {
        &self.nodes
    }

    pub fn node(&self, id: &str) -> Result<&ComputeNode, CatalogError> {
        self.node_index
            .get(id)
            .map(|i| &self.nodes[*i])
            .ok_or_else(|| CatalogError::UnknownNode(id.to_string()))
    }

    pub fn has_cluster(&self, cluster_id: &str) -> bool {
        self.cluster_site.contains_key(cluster_id)
    }

    /// Node ids of a cluster, ascending.
    pub fn cluster_nodes(&self, cluster_id: &str) -> Vec<&ComputeNode> {
        self.nodes
            .iter()
            .filter(|n| n.cluster_id == cluster_id)
            .collect()
    }

    pub fn total_cores(&self) -> u64 {
        self.nodes.iter().map(|n| n.cores as u64).sum()
    }

    /// Nodes whose software covers the requirement set and whose clock meets
    /// the floor, ordered by id.
    pub fn query_nodes(&self, req: &Requirements) -> Vec<&ComputeNode> {
        self.nodes
            .iter()
            .filter(|n| n.clock_ghz >= req.min_clock_ghz && req.software.is_subset(&n.software))
            .collect()
    }

    fn find_pair_link(&self, a: &str, b: &str) -> Option<&NetworkLink> {
        self.doc.links.iter().find(|l| {
            (l.from == a && l.to == b) || (l.from == b && l.to == a)
        })
    }

    /// Modeled staging time for `bytes` from `from_id` to `to_id`:
    /// latency + volume/bandwidth over the most specific link. Co-located
    /// transfers are free; inter-cluster traffic resolves a cluster-pair
    /// link first, then a site-pair link.
    pub fn transfer_time(
        &self,
        from_id: &str,
        to_id: &str,
        bytes: u64,
    ) -> Result<f64, CatalogError> {
        let from = self.node(from_id)?;
        let to = self.node(to_id)?;
        if from.id == to.id {
            return Ok(0.0);
        }
        if from.cluster_id == to.cluster_id {
            let link = &self.intra_links[&from.cluster_id];
            return Ok(link.transfer_seconds(bytes));
        }
        if let Some(link) = self.find_pair_link(&from.cluster_id, &to.cluster_id) {
            return Ok(link.transfer_seconds(bytes));
        }
        if let Some(link) = self.find_pair_link(&from.site_id, &to.site_id) {
            return Ok(link.transfer_seconds(bytes));
        }
        Err(CatalogError::NoRoute {
            from: from.cluster_id.clone(),
            to: to.cluster_id.clone(),
        })
    }
}
