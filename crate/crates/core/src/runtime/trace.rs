//! Simulation events, traces and derived metrics.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::component::Payload;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    TaskStart,
    TaskEnd,
    TaskFail,
    XferStart,
    XferEnd,
    LoopExit,
}

impl EventKind {
    /// Tie-break priority at equal timestamps: ends sort before starts.
    pub fn priority(self) -> u8 {
        match self {
            EventKind::XferEnd => 0,
            EventKind::TaskEnd => 1,
            EventKind::TaskFail => 2,
            EventKind::LoopExit => 3,
            EventKind::TaskStart => 4,
            EventKind::XferStart => 5,
        }
    }
}

/// One simulated event. Serialized field order is fixed; traces are compared
/// byte for byte in determinism tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimEvent {
    pub t: f64,
    pub kind: EventKind,
    pub vpe: String,
    pub task: Option<String>,
    pub node: Option<String>,
    pub artifact: Option<String>,
    pub bytes: Option<u64>,
}

impl SimEvent {
    /// Total event order: (t, kind priority, vpe, task, artifact, node).
    pub fn sort_key(&self) -> impl Ord + '_ {
        (
            OrdF64(self.t),
            self.kind.priority(),
            &self.vpe,
            &self.task,
            &self.artifact,
            &self.node,
        )
    }
}

/// f64 wrapper ordered by IEEE total order; simulation times are never NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrdF64(pub f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    Failed,
    Diverged,
}

/// Condition evaluation snapshot taken after each loop iteration: the
/// condition value plus a scalar view of every live artifact (scalars
/// verbatim, vectors by their last element).
#[derive(Debug, Clone, PartialEq)]
pub struct LoopRecord {
    pub loop_label: String,
    pub iteration: u32,
    pub condition_value: f64,
    pub snapshots: BTreeMap<String, f64>,
}

/// Everything a simulated run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionTrace {
    pub vpe: String,
    pub workflow: String,
    pub events: Vec<SimEvent>,
    pub final_payloads: BTreeMap<String, Payload>,
    pub status: RunStatus,
    pub failure: Option<String>,
    pub loop_records: Vec<LoopRecord>,
}

impl ExecutionTrace {
    /// One JSON object per event, in trace order.
    pub fn events_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("event serializes"));
            out.push('\n');
        }
        out
    }
}

/// Aggregate metrics of a trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceMetrics {
    pub makespan_s: f64,
    pub total_transfer_s: f64,
    pub task_count: u64,
    pub iterations: u64,
}

/// Compute makespan, summed transfer time, task count and total loop
/// iterations from a trace.
pub fn trace_metrics(trace: &ExecutionTrace) -> TraceMetrics {
    let makespan_s = trace.events.iter().map(|e| e.t).fold(0.0, f64::max);
    let mut total_transfer_s = 0.0;
    let mut open_transfers: BTreeMap<(&Option<String>, &Option<String>), f64> = BTreeMap::new();
    let mut task_count = 0;
    for e in &trace.events {
        match e.kind {
            EventKind::XferStart => {
                open_transfers.insert((&e.task, &e.artifact), e.t);
            }
            EventKind::XferEnd => {
                if let Some(t0) = open_transfers.remove(&(&e.task, &e.artifact)) {
                    total_transfer_s += e.t - t0;
                }
            }
            EventKind::TaskStart => task_count += 1,
            _ => {}
        }
    }
    // every loop activation ends in a loop_exit labeled "<loop>@<iterations>"
    let iterations = trace
        .events
        .iter()
        .filter(|e| e.kind == EventKind::LoopExit)
        .filter_map(|e| e.task.as_deref()?.split_once('@')?.1.parse::<u64>().ok())
        .sum();
    TraceMetrics {
        makespan_s,
        total_transfer_s,
        task_count,
        iterations,
    }
}
