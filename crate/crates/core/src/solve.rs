//! Result type shared by every solver.

use std::time::Duration;

use serde::Serialize;
use serde_json::json;

use crate::instance::Instance;
use crate::objective::{ObjectiveSpec, ObjectiveValue};
use crate::schedule::Schedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveStatus {
    /// The search space was exhausted; the incumbent is optimal.
    Optimal,
    /// A feasible schedule is known, optimality is not proven.
    Feasible,
    /// The search space was exhausted without finding a feasible schedule.
    Infeasible,
    /// Nothing is known.
    Unknown,
}

/// One improvement of the incumbent, stamped with the elapsed wall time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IncumbentEvent {
    pub elapsed: Duration,
    pub key: (u64, u64),
    pub nodes: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub wall_time: Duration,
    pub incumbents: Vec<IncumbentEvent>,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub spec: ObjectiveSpec,
    pub schedule: Option<Schedule>,
    pub objective: Option<ObjectiveValue>,
    /// Lower bound in objective-key space; `None` when infeasibility is proven.
    pub dual_bound: Option<(u64, u64)>,
    pub stats: SearchStats,
}

impl SolveResult {
    pub(crate) fn unknown(spec: ObjectiveSpec) -> Self {
        Self {
            status: SolveStatus::Unknown,
            spec,
            schedule: None,
            objective: None,
            dual_bound: None,
            stats: SearchStats::default(),
        }
    }

    /// Scalar rendering of an objective key: the first component, unless the
    /// spec is lexicographic, in which case both are reported separately.
    fn key_json(spec: &ObjectiveSpec, key: (u64, u64)) -> serde_json::Value {
        match spec.mode() {
            crate::objective::ObjectiveMode::LexDisqThenFlow => {
                json!({"disq": key.0, "flow": key.1})
            }
            _ => json!(key.0),
        }
    }

    /// JSON rendering emitted by the `solve` command.
    pub fn to_json(&self, inst: &Instance) -> serde_json::Value {
        let spec = &self.spec;
        json!({
            "status": self.status,
            "objective": self.objective.map(|v| json!({
                "flow": v.flow_time,
                "cmax": v.cmax,
                "disq": v.disq_count,
                "qualified": v.qualified_count,
                "weighted": v.weighted,
                "value": Self::key_json(spec, v.key()),
            })),
            "dual_bound": self.dual_bound.map(|k| Self::key_json(spec, k)),
            "nodes": self.stats.nodes,
            "time": self.stats.wall_time.as_secs_f64(),
            "incumbents": self.stats.incumbents.iter().map(|e| json!({
                "t": e.elapsed.as_secs_f64(),
                "objective": Self::key_json(spec, e.key),
            })).collect::<Vec<_>>(),
            "schedule": self.schedule.as_ref().map(|s| {
                debug_assert_eq!(s.assignments().len(), inst.job_count());
                serde_json::to_value(s.to_file()).expect("serializable")
            }),
        })
    }
}
