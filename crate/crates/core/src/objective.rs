//! Objective configurations and evaluated objective values.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{Instance, Time};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveMode {
    /// `alpha * flow + beta * disqualifications`.
    WeightedSum,
    /// Disqualifications first, flow time second.
    LexDisqThenFlow,
    /// Flow time only.
    FlowOnly,
}

/// Objective configuration. The flow weight is always 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    mode: ObjectiveMode,
    beta: u64,
}

impl ObjectiveSpec {
    pub const ALPHA: u64 = 1;

    pub fn flow_only() -> Self {
        Self {
            mode: ObjectiveMode::FlowOnly,
            beta: 0,
        }
    }

    pub fn lex_disq_then_flow() -> Self {
        Self {
            mode: ObjectiveMode::LexDisqThenFlow,
            beta: 0,
        }
    }

    /// Weighted sum with `beta = 1`: the flow time dominates.
    pub fn weighted_flow_priority() -> Self {
        Self {
            mode: ObjectiveMode::WeightedSum,
            beta: 1,
        }
    }

    /// Weighted sum with `beta = N * T`: one disqualification outweighs any
    /// flow time difference.
    pub fn weighted_disq_priority(inst: &Instance) -> Self {
        Self {
            mode: ObjectiveMode::WeightedSum,
            beta: inst.job_count() as u64 * u64::from(inst.horizon()),
        }
    }

    pub fn mode(&self) -> ObjectiveMode {
        self.mode
    }

    pub fn beta(&self) -> u64 {
        self.beta
    }

    /// Totally ordered key; smaller is better.
    pub fn key(&self, flow: u64, disq: u64) -> (u64, u64) {
        match self.mode {
            ObjectiveMode::WeightedSum => (flow + self.beta * disq, 0),
            ObjectiveMode::LexDisqThenFlow => (disq, flow),
            ObjectiveMode::FlowOnly => (flow, 0),
        }
    }
}

impl fmt::Display for ObjectiveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            ObjectiveMode::WeightedSum => write!(f, "wsum(beta={})", self.beta),
            ObjectiveMode::LexDisqThenFlow => write!(f, "lex(disq,flow)"),
            ObjectiveMode::FlowOnly => write!(f, "flow"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("objective values evaluated under different specs ({0} vs {1})")]
pub struct SpecMismatch(pub ObjectiveSpec, pub ObjectiveSpec);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectiveValue {
    pub spec: ObjectiveSpec,
    pub flow_time: u64,
    pub cmax: Time,
    pub disq_count: u64,
    pub qualified_count: u64,
    /// `flow_time + beta * disq_count`; equals `flow_time` outside weighted mode.
    pub weighted: u64,
}

impl ObjectiveValue {
    pub fn new(spec: ObjectiveSpec, flow_time: u64, cmax: Time, disq: u64, pairs: u64) -> Self {
        Self {
            spec,
            flow_time,
            cmax,
            disq_count: disq,
            qualified_count: pairs - disq,
            weighted: flow_time + spec.beta * disq,
        }
    }

    pub fn key(&self) -> (u64, u64) {
        self.spec.key(self.flow_time, self.disq_count)
    }

    /// Scalar shown in reports: the weighted value, the flow time, or the
    /// flow time of a lexicographic run.
    pub fn primary(&self) -> u64 {
        match self.spec.mode {
            ObjectiveMode::WeightedSum => self.weighted,
            _ => self.flow_time,
        }
    }
}

/// Orders two values; `Less` means `a` is better.
pub fn compare(
    a: &ObjectiveValue,
    b: &ObjectiveValue,
    spec: &ObjectiveSpec,
) -> Result<Ordering, SpecMismatch> {
    if a.spec != *spec {
        return Err(SpecMismatch(a.spec, *spec));
    }
    if b.spec != *spec {
        return Err(SpecMismatch(b.spec, *spec));
    }
    Ok(a.key().cmp(&b.key()))
}
