//! Deterministic discrete-event execution of bound workflows on VPE slices.
//!
//! Tasks are placed the moment their control dependencies are satisfied,
//! booking the earliest-completing core among eligible nodes (list
//! scheduling). Competing ready tasks are ordered by (vpe name, task label);
//! equal-time events by (time, kind priority, vpe, labels). There is no
//! randomness anywhere, so identical inputs give byte-identical traces.

mod component;
mod trace;

pub use component::{
    demo_library, register_synthetic, CaseSetup, ComponentFn, ComponentLibrary, Inputs, Outputs,
    Payload,
};
pub use trace::{
    trace_metrics, EventKind, ExecutionTrace, LoopRecord, OrdF64, RunStatus, SimEvent,
    TraceMetrics,
};

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use thiserror::Error;

use crate::infrastructure::{node_speed, CatalogError, InfrastructureCatalog};
use crate::vpe::VirtualPrivateEnvironment;
use crate::workflow::{BoundWorkflow, ComponentDecl, GraphNode, LoopCondition, WorkflowError};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("no eligible node for component {component:?} in vpe {vpe:?}")]
    NoEligibleNode { vpe: String, component: String },
    #[error("workflow {workflow:?} is not runnable: {reason}")]
    InvalidWorkflow { workflow: String, reason: String },
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

/// One workflow instance to execute in its environment.
#[derive(Debug, Clone)]
pub struct SimRun {
    pub workflow: BoundWorkflow,
    pub vpe: VirtualPrivateEnvironment,
}

/// Crash injection: the named component instance fails at the end of its
/// compute window and the whole run stops (fail-fast, no retry).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailureInjection {
    pub vpe: String,
    pub component: String,
    pub iteration: u32,
}

/// Booked core availability per node.
#[derive(Debug, Clone, Default)]
pub struct NodeStates {
    cores: BTreeMap<String, Vec<f64>>,
}

impl NodeStates {
    pub fn new() -> Self {
        Self::default()
    }

    /// Track a node with the given core count (idempotent).
    pub fn ensure(&mut self, node_id: &str, cores: u32) {
        self.cores
            .entry(node_id.to_string())
            .or_insert_with(|| vec![0.0; cores as usize]);
    }

    /// Earliest time any core of the node frees up (0 if never booked).
    pub fn earliest_free(&self, node_id: &str) -> f64 {
        self.cores
            .get(node_id)
            .map(|slots| slots.iter().copied().fold(f64::INFINITY, f64::min))
            .unwrap_or(0.0)
    }

    /// Occupy the earliest-free core until `until`.
    pub fn book(&mut self, node_id: &str, until: f64) {
        let slots = self.cores.get_mut(node_id).expect("node ensured");
        let idx = slots
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .expect("at least one core");
        slots[idx] = until;
    }
}

/// Placement request for one ready task.
#[derive(Debug, Clone)]
pub struct PlacementRequest<'a> {
    pub component: &'a str,
    pub ready_time: f64,
    pub work_gflop: f64,
    pub software: &'a BTreeSet<String>,
    /// Declared inputs in order: (artifact, bytes, current location).
    /// `None` location means the artifact's initial payload, available
    /// everywhere without staging.
    pub stage_in: &'a [(String, u64, Option<String>)],
}

/// Chosen node and timing for a task.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub node: String,
    /// When the task occupies the node: max(ready time, earliest free core).
    pub start_time: f64,
    /// Staging windows in input order: (artifact, bytes, source node, seconds).
    pub transfers: Vec<(String, u64, String, f64)>,
    /// Compute begins after staging completes.
    pub compute_start: f64,
    pub completion: f64,
}

/// Pick the node minimizing estimated completion
/// max(ready, free) + staging + work/speed among nodes that are in the VPE
/// slice and satisfy the software requirements; ties break by node id.
pub fn place_task(
    req: &PlacementRequest,
    vpe: &VirtualPrivateEnvironment,
    node_states: &NodeStates,
    catalog: &InfrastructureCatalog,
) -> Result<Placement, SimError> {
    let mut slice: Vec<&str> = vpe.resolved_nodes.iter().map(|s| s.as_str()).collect();
    slice.sort_unstable();
    let mut best: Option<Placement> = None;
    'candidates: for node_id in slice {
        let node = catalog.node(node_id)?;
        if !req.software.is_subset(&node.software) {
            continue;
        }
        let start_time = req.ready_time.max(node_states.earliest_free(node_id));
        let mut transfers = Vec::new();
        let mut cursor = start_time;
        for (artifact, bytes, location) in req.stage_in {
            match location {
                None => {}
                Some(src) if src == node_id => {}
                Some(src) => {
                    let dt = match catalog.transfer_time(src, node_id, *bytes) {
                        Ok(dt) => dt,
                        // unroutable source makes this candidate infeasible
                        Err(CatalogError::NoRoute { .. }) => continue 'candidates,
                        Err(e) => return Err(e.into()),
                    };
                    transfers.push((artifact.clone(), *bytes, src.clone(), dt));
                    cursor += dt;
                }
            }
        }
        let compute_start = cursor;
        let completion = compute_start + req.work_gflop / node_speed(node);
        if best
            .as_ref()
            .is_none_or(|b| completion < b.completion)
        {
            best = Some(Placement {
                node: node_id.to_string(),
                start_time,
                transfers,
                compute_start,
                completion,
            });
        }
    }
    best.ok_or_else(|| SimError::NoEligibleNode {
        vpe: vpe.name.clone(),
        component: req.component.to_string(),
    })
}

// ---------------------------------------------------------------------------
// compiled graph and per-run execution state
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
enum CNode {
    Task {
        component: String,
    },
    Seq {
        children: Vec<usize>,
    },
    Par {
        children: Vec<usize>,
    },
    Loop {
        body: usize,
        cap: u32,
        condition: Option<LoopCondition>,
        label: String,
    },
}

#[derive(Debug, Clone)]
struct CompiledGraph {
    nodes: Vec<CNode>,
    parent: Vec<Option<usize>>,
    root: usize,
}

fn compile(node: &GraphNode, nodes: &mut Vec<CNode>, parent: &mut Vec<Option<usize>>, loops: &mut u32) -> usize {
    let id = nodes.len();
    nodes.push(CNode::Seq { children: Vec::new() }); // placeholder
    parent.push(None);
    let compiled = match node {
        GraphNode::Task { component } => CNode::Task {
            component: component.clone(),
        },
        GraphNode::Seq { children } => {
            let ids: Vec<usize> = children
                .iter()
                .map(|c| {
                    let cid = compile(c, nodes, parent, loops);
                    parent[cid] = Some(id);
                    cid
                })
                .collect();
            CNode::Seq { children: ids }
        }
        GraphNode::Par { children } => {
            let ids: Vec<usize> = children
                .iter()
                .map(|c| {
                    let cid = compile(c, nodes, parent, loops);
                    parent[cid] = Some(id);
                    cid
                })
                .collect();
            CNode::Par { children: ids }
        }
        GraphNode::Loop {
            body,
            max_iter,
            condition,
        } => {
            *loops += 1;
            let label = format!("loop{loops}");
            let body_id = compile(body, nodes, parent, loops);
            parent[body_id] = Some(id);
            CNode::Loop {
                body: body_id,
                cap: GraphNode::loop_cap(*max_iter),
                condition: condition.clone(),
                label,
            }
        }
    };
    nodes[id] = compiled;
    id
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NState {
    Idle,
    SeqAt(usize),
    ParRemaining(usize),
    LoopIter(u32),
    Running,
    Done,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ExecStatus {
    Running,
    Completed,
    Failed,
    Diverged,
}

struct RunExec {
    vpe: VirtualPrivateEnvironment,
    workflow: BoundWorkflow,
    graph: CompiledGraph,
}

impl RunExec {
    fn decl(&self, component: &str) -> &ComponentDecl {
        self.workflow
            .graph
            .component(component)
            .expect("bound workflow is structurally valid")
    }

    fn artifact_bytes(&self, name: &str) -> u64 {
        self.workflow
            .graph
            .artifact(name)
            .map(|a| a.size_bytes)
            .unwrap_or(0)
    }
}

struct RunState {
    node_state: Vec<NState>,
    values: BTreeMap<String, Payload>,
    locations: BTreeMap<String, Option<String>>,
    status: ExecStatus,
    failure: Option<String>,
    events: Vec<SimEvent>,
    loop_records: Vec<LoopRecord>,
}

#[derive(Debug, Clone)]
struct ReadyTask {
    arena_id: usize,
    component: String,
    iteration: u32,
    ready_time: f64,
}

fn task_label(component: &str, iteration: u32) -> String {
    format!("{component}@{iteration}")
}

/// Innermost enclosing loop iteration of a task node, 1 outside loops.
fn iteration_of(exec: &RunExec, st: &RunState, mut node: usize) -> u32 {
    while let Some(p) = exec.graph.parent[node] {
        if let CNode::Loop { .. } = exec.graph.nodes[p] {
            if let NState::LoopIter(i) = st.node_state[p] {
                return i;
            }
        }
        node = p;
    }
    1
}

enum LoopOutcome {
    Exit { diverged: bool },
    Continue,
}

fn evaluate_loop(exec: &RunExec, st: &mut RunState, loop_id: usize, iter: u32, t: f64) -> LoopOutcome {
    let CNode::Loop {
        cap,
        condition,
        label,
        ..
    } = &exec.graph.nodes[loop_id]
    else {
        unreachable!("evaluate_loop on a loop node")
    };
    let mut met = false;
    if let Some(cond) = condition {
        let Some(value) = st.values.get(&cond.artifact).and_then(Payload::as_scalar) else {
            st.status = ExecStatus::Failed;
            st.failure = Some(format!(
                "loop condition artifact {:?} has no scalar payload",
                cond.artifact
            ));
            return LoopOutcome::Exit { diverged: false };
        };
        let snapshots = st
            .values
            .iter()
            .filter_map(|(k, v)| v.snapshot_value().map(|s| (k.clone(), s)))
            .collect();
        st.loop_records.push(LoopRecord {
            loop_label: label.clone(),
            iteration: iter,
            condition_value: value,
            snapshots,
        });
        met = value < cond.threshold;
    }
    if met || iter >= *cap {
        st.events.push(SimEvent {
            t,
            kind: EventKind::LoopExit,
            vpe: exec.vpe.name.clone(),
            task: Some(task_label(label, iter)),
            node: None,
            artifact: condition.as_ref().map(|c| c.artifact.clone()),
            bytes: None,
        });
        LoopOutcome::Exit {
            diverged: !met && condition.is_some(),
        }
    } else {
        LoopOutcome::Continue
    }
}

/// Activate a subtree at time `t`. Returns true when the subtree finished
/// instantly (no tasks to run).
fn activate(exec: &RunExec, st: &mut RunState, node: usize, t: f64, ready: &mut Vec<ReadyTask>) -> bool {
    if st.status != ExecStatus::Running {
        return false;
    }
    match &exec.graph.nodes[node] {
        CNode::Task { component } => {
            st.node_state[node] = NState::Running;
            ready.push(ReadyTask {
                arena_id: node,
                component: component.clone(),
                iteration: iteration_of(exec, st, node),
                ready_time: t,
            });
            false
        }
        CNode::Seq { .. } => {
            st.node_state[node] = NState::SeqAt(0);
            advance_seq(exec, st, node, t, ready)
        }
        CNode::Par { children } => {
            let children = children.clone();
            let mut remaining = 0;
            for c in children {
                if !activate(exec, st, c, t, ready) {
                    remaining += 1;
                }
            }
            if st.status != ExecStatus::Running {
                return false;
            }
            if remaining == 0 {
                st.node_state[node] = NState::Done;
                true
            } else {
                st.node_state[node] = NState::ParRemaining(remaining);
                false
            }
        }
        CNode::Loop { body, .. } => {
            let body = *body;
            st.node_state[node] = NState::LoopIter(1);
            if !activate(exec, st, body, t, ready) {
                return false;
            }
            drive_loop(exec, st, node, 1, t, ready)
        }
    }
}

/// Run children of a sequence from its cursor; true when the sequence is done.
fn advance_seq(exec: &RunExec, st: &mut RunState, seq: usize, t: f64, ready: &mut Vec<ReadyTask>) -> bool {
    loop {
        if st.status != ExecStatus::Running {
            return false;
        }
        let NState::SeqAt(idx) = st.node_state[seq] else {
            unreachable!("sequence cursor present")
        };
        let CNode::Seq { children } = &exec.graph.nodes[seq] else {
            unreachable!("advance_seq on a sequence")
        };
        if idx >= children.len() {
            st.node_state[seq] = NState::Done;
            return true;
        }
        let child = children[idx];
        st.node_state[seq] = NState::SeqAt(idx + 1);
        if !activate(exec, st, child, t, ready) {
            return false;
        }
    }
}

/// Body of `loop_id` finished iteration `iter_done`; evaluate the exit test
/// and keep re-running instantly-completing bodies. Returns true when the
/// loop exited normally.
fn drive_loop(
    exec: &RunExec,
    st: &mut RunState,
    loop_id: usize,
    mut iter_done: u32,
    t: f64,
    ready: &mut Vec<ReadyTask>,
) -> bool {
    loop {
        match evaluate_loop(exec, st, loop_id, iter_done, t) {
            LoopOutcome::Exit { diverged } => {
                if st.status != ExecStatus::Running {
                    return false;
                }
                st.node_state[loop_id] = NState::Done;
                if diverged {
                    st.status = ExecStatus::Diverged;
                    return false;
                }
                return true;
            }
            LoopOutcome::Continue => {
                let CNode::Loop { body, .. } = &exec.graph.nodes[loop_id] else {
                    unreachable!()
                };
                let body = *body;
                iter_done += 1;
                st.node_state[loop_id] = NState::LoopIter(iter_done);
                if !activate(exec, st, body, t, ready) {
                    return false;
                }
            }
        }
    }
}

/// A child subtree completed; advance the parent chain.
fn on_done(exec: &RunExec, st: &mut RunState, node: usize, t: f64, ready: &mut Vec<ReadyTask>) {
    if st.status != ExecStatus::Running {
        return;
    }
    let Some(parent) = exec.graph.parent[node] else {
        st.status = ExecStatus::Completed;
        return;
    };
    match &exec.graph.nodes[parent] {
        CNode::Seq { .. } => {
            if advance_seq(exec, st, parent, t, ready) {
                on_done(exec, st, parent, t, ready);
            }
        }
        CNode::Par { .. } => {
            let NState::ParRemaining(r) = st.node_state[parent] else {
                unreachable!("parallel counter present")
            };
            if r > 1 {
                st.node_state[parent] = NState::ParRemaining(r - 1);
            } else {
                st.node_state[parent] = NState::Done;
                on_done(exec, st, parent, t, ready);
            }
        }
        CNode::Loop { .. } => {
            let NState::LoopIter(iter) = st.node_state[parent] else {
                unreachable!("loop counter present")
            };
            if drive_loop(exec, st, parent, iter, t, ready) {
                on_done(exec, st, parent, t, ready);
            }
        }
        CNode::Task { .. } => unreachable!("tasks have no children"),
    }
}

// ---------------------------------------------------------------------------
// the event loop
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Completion {
    t: OrdF64,
    vpe: String,
    label: String,
    run_idx: usize,
    arena_id: usize,
    component: String,
    iteration: u32,
    node: String,
    crash: bool,
}

/// Execute all runs against the shared catalog. Overlapping VPE slices
/// contend for cores; runs on disjoint slices cannot influence each other's
/// traces. The result order matches the input order.
pub fn simulate(
    runs: &[SimRun],
    catalog: &InfrastructureCatalog,
    library: &ComponentLibrary,
    failures: &[FailureInjection],
) -> Result<Vec<ExecutionTrace>, SimError> {
    let mut execs = Vec::new();
    let mut states = Vec::new();
    for run in runs {
        run.workflow.graph.validate_dataflow().map_err(|e: WorkflowError| {
            SimError::InvalidWorkflow {
                workflow: run.workflow.graph.name.clone(),
                reason: e.to_string(),
            }
        })?;
        for node_id in &run.vpe.resolved_nodes {
            catalog.node(node_id)?;
        }
        let mut nodes = Vec::new();
        let mut parent = Vec::new();
        let mut loops = 0;
        let root = compile(&run.workflow.graph.graph, &mut nodes, &mut parent, &mut loops);
        let graph = CompiledGraph { nodes, parent, root };
        let mut values = BTreeMap::new();
        let mut locations = BTreeMap::new();
        for artifact in &run.workflow.graph.artifacts {
            if let Some(initial) = &artifact.initial {
                values.insert(artifact.name.clone(), Payload::from_initial(initial));
                locations.insert(artifact.name.clone(), None);
            }
        }
        states.push(RunState {
            node_state: vec![NState::Idle; graph.nodes.len()],
            values,
            locations,
            status: ExecStatus::Running,
            failure: None,
            events: Vec::new(),
            loop_records: Vec::new(),
        });
        execs.push(RunExec {
            vpe: run.vpe.clone(),
            workflow: run.workflow.clone(),
            graph,
        });
    }

    let mut node_states = NodeStates::new();
    for exec in &execs {
        for node_id in &exec.vpe.resolved_nodes {
            node_states.ensure(node_id, catalog.node(node_id)?.cores);
        }
    }

    let mut completions: BinaryHeap<Reverse<Completion>> = BinaryHeap::new();

    // activate roots at t = 0
    let mut ready: Vec<(usize, ReadyTask)> = Vec::new();
    for (idx, exec) in execs.iter().enumerate() {
        let st = &mut states[idx];
        let mut local = Vec::new();
        let root = exec.graph.root;
        if activate(exec, st, root, 0.0, &mut local) && st.status == ExecStatus::Running {
            st.status = ExecStatus::Completed;
        }
        ready.extend(local.into_iter().map(|r| (idx, r)));
    }
    place_batch(
        ready,
        &execs,
        &mut states,
        &mut node_states,
        &mut completions,
        catalog,
        failures,
    );

    while let Some(Reverse(first)) = completions.pop() {
        let t = first.t;
        let mut batch = vec![first];
        while let Some(Reverse(peek)) = completions.peek() {
            if peek.t == t {
                batch.push(completions.pop().unwrap().0);
            } else {
                break;
            }
        }
        let mut ready: Vec<(usize, ReadyTask)> = Vec::new();
        for c in batch {
            process_completion(c, &execs, &mut states, library, &mut ready);
        }
        place_batch(
            ready,
            &execs,
            &mut states,
            &mut node_states,
            &mut completions,
            catalog,
            failures,
        );
    }

    let mut traces = Vec::new();
    for (exec, mut st) in execs.into_iter().zip(states) {
        st.events.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        let status = match st.status {
            ExecStatus::Completed => RunStatus::Completed,
            ExecStatus::Diverged => RunStatus::Diverged,
            ExecStatus::Failed => RunStatus::Failed,
            ExecStatus::Running => {
                st.failure.get_or_insert_with(|| "workflow did not complete".into());
                RunStatus::Failed
            }
        };
        traces.push(ExecutionTrace {
            vpe: exec.vpe.name,
            workflow: exec.workflow.graph.name,
            events: st.events,
            final_payloads: st.values,
            status,
            failure: st.failure,
            loop_records: st.loop_records,
        });
    }
    Ok(traces)
}

fn process_completion(
    c: Completion,
    execs: &[RunExec],
    states: &mut [RunState],
    library: &ComponentLibrary,
    ready: &mut Vec<(usize, ReadyTask)>,
) {
    let exec = &execs[c.run_idx];
    let st = &mut states[c.run_idx];
    if st.status != ExecStatus::Running {
        return;
    }
    st.node_state[c.arena_id] = NState::Done;
    if c.crash {
        st.status = ExecStatus::Failed;
        st.failure = Some(format!("crash injected into {}", c.label));
        return;
    }
    let decl = exec.decl(&c.component);
    let mut inputs = Inputs::new();
    for name in &decl.inputs {
        let Some(value) = st.values.get(name) else {
            st.status = ExecStatus::Failed;
            st.failure = Some(format!(
                "component {:?} ran before its input {:?} existed",
                c.component, name
            ));
            return;
        };
        inputs.insert(name.clone(), value.clone());
    }
    let binding = &exec.workflow.bindings[&c.component];
    let Some(f) = library.get(&binding.builtin) else {
        st.status = ExecStatus::Failed;
        st.failure = Some(format!("no implementation for builtin {:?}", binding.builtin));
        return;
    };
    match f(&inputs) {
        Ok(mut outputs) => {
            for name in &decl.outputs {
                let value = outputs.remove(name).unwrap_or(Payload::Scalar(0.0));
                st.values.insert(name.clone(), value);
                st.locations.insert(name.clone(), Some(c.node.clone()));
            }
        }
        Err(msg) => {
            st.status = ExecStatus::Failed;
            st.failure = Some(format!("component {:?} failed: {msg}", c.component));
            return;
        }
    }
    let mut local = Vec::new();
    on_done(exec, st, c.arena_id, c.t.0, &mut local);
    ready.extend(local.into_iter().map(|r| (c.run_idx, r)));
}

fn place_batch(
    mut batch: Vec<(usize, ReadyTask)>,
    execs: &[RunExec],
    states: &mut [RunState],
    node_states: &mut NodeStates,
    completions: &mut BinaryHeap<Reverse<Completion>>,
    catalog: &InfrastructureCatalog,
    failures: &[FailureInjection],
) {
    batch.sort_by(|a, b| {
        let ka = (
            &execs[a.0].vpe.name,
            task_label(&a.1.component, a.1.iteration),
        );
        let kb = (
            &execs[b.0].vpe.name,
            task_label(&b.1.component, b.1.iteration),
        );
        ka.cmp(&kb)
    });
    for (run_idx, task) in batch {
        let exec = &execs[run_idx];
        let st = &mut states[run_idx];
        if st.status != ExecStatus::Running {
            continue;
        }
        let decl = exec.decl(&task.component);
        let binding = &exec.workflow.bindings[&task.component];
        let stage_in: Vec<(String, u64, Option<String>)> = decl
            .inputs
            .iter()
            .map(|name| {
                let bytes = exec.artifact_bytes(name);
                let location = st.locations.get(name).cloned().flatten();
                (name.clone(), bytes, location)
            })
            .collect();
        let request = PlacementRequest {
            component: &task.component,
            ready_time: task.ready_time,
            work_gflop: decl.work_gflop,
            software: &binding.software,
            stage_in: &stage_in,
        };
        let placement = match place_task(&request, &exec.vpe, node_states, catalog) {
            Ok(p) => p,
            Err(e) => {
                st.status = ExecStatus::Failed;
                st.failure = Some(format!(
                    "placement of {:?} failed: {e}",
                    task_label(&task.component, task.iteration)
                ));
                continue;
            }
        };
        node_states.book(&placement.node, placement.completion);

        let label = task_label(&task.component, task.iteration);
        let vpe_name = exec.vpe.name.clone();
        let mut cursor = placement.start_time;
        for (artifact, bytes, src, dt) in &placement.transfers {
            let route = format!("{src}->{}", placement.node);
            st.events.push(SimEvent {
                t: cursor,
                kind: EventKind::XferStart,
                vpe: vpe_name.clone(),
                task: Some(label.clone()),
                node: Some(route.clone()),
                artifact: Some(artifact.clone()),
                bytes: Some(*bytes),
            });
            cursor += dt;
            st.events.push(SimEvent {
                t: cursor,
                kind: EventKind::XferEnd,
                vpe: vpe_name.clone(),
                task: Some(label.clone()),
                node: Some(route),
                artifact: Some(artifact.clone()),
                bytes: Some(*bytes),
            });
        }
        let crash = failures.iter().any(|f| {
            f.vpe == vpe_name && f.component == task.component && f.iteration == task.iteration
        });
        st.events.push(SimEvent {
            t: placement.compute_start,
            kind: EventKind::TaskStart,
            vpe: vpe_name.clone(),
            task: Some(label.clone()),
            node: Some(placement.node.clone()),
            artifact: None,
            bytes: None,
        });
        st.events.push(SimEvent {
            t: placement.completion,
            kind: if crash {
                EventKind::TaskFail
            } else {
                EventKind::TaskEnd
            },
            vpe: vpe_name.clone(),
            task: Some(label.clone()),
            node: Some(placement.node.clone()),
            artifact: None,
            bytes: None,
        });
        completions.push(Reverse(Completion {
            t: OrdF64(placement.completion),
            vpe: vpe_name,
            label,
            run_idx,
            arena_id: task.arena_id,
            component: task.component,
            iteration: task.iteration,
            node: placement.node,
            crash,
        }));
    }
}
