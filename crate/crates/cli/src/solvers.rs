//! Uniform entry point over every solver.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use ptc_core::{
    enumerate_optimal, qualification_centric, schedule_centric, solve, HeuristicError, Instance,
    ObjectiveSpec, OracleLimits, Schedule, SearchConfig, SolveResult,
};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Bnb,
    Sch,
    Qch,
    Oracle,
}

impl SolverKind {
    pub const ALL: [SolverKind; 4] = [SolverKind::Bnb, SolverKind::Sch, SolverKind::Qch, SolverKind::Oracle];
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::Bnb => "bnb",
            SolverKind::Sch => "sch",
            SolverKind::Qch => "qch",
            SolverKind::Oracle => "oracle",
        })
    }
}

impl FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| format!("unknown solver `{s}` (expected bnb, sch, qch or oracle)"))
    }
}

/// Objective presets exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveArg {
    /// Disqualifications first, then flow time.
    LexDisq,
    /// Weighted sum with beta = 1.
    WsumFlow,
    /// Weighted sum with beta = N * T.
    WsumDisq,
    /// Flow time alone.
    Flow,
}

impl ObjectiveArg {
    pub const ALL: [ObjectiveArg; 4] =
        [ObjectiveArg::LexDisq, ObjectiveArg::WsumFlow, ObjectiveArg::WsumDisq, ObjectiveArg::Flow];

    pub fn spec(self, inst: &Instance) -> ObjectiveSpec {
        match self {
            ObjectiveArg::LexDisq => ObjectiveSpec::lex_disq_then_flow(),
            ObjectiveArg::WsumFlow => ObjectiveSpec::weighted_flow_priority(),
            ObjectiveArg::WsumDisq => ObjectiveSpec::weighted_disq_priority(inst),
            ObjectiveArg::Flow => ObjectiveSpec::flow_only(),
        }
    }
}

impl fmt::Display for ObjectiveArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObjectiveArg::LexDisq => "lex-disq",
            ObjectiveArg::WsumFlow => "wsum-flow",
            ObjectiveArg::WsumDisq => "wsum-disq",
            ObjectiveArg::Flow => "flow",
        })
    }
}

impl FromStr for ObjectiveArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| format!("unknown objective `{s}` (expected lex-disq, wsum-flow, wsum-disq or flow)"))
    }
}

/// Why a solver produced no result at all.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverError {
    /// The solver refuses the input, e.g. the oracle on a large instance.
    Refused(String),
    /// Anything else.
    Internal(String),
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::Refused(m) | SolverError::Internal(m) => f.write_str(m),
        }
    }
}

/// Runs one solver. A heuristic dead end is a result with status unknown,
/// not an error.
pub fn run_solver(
    inst: &Instance,
    kind: SolverKind,
    spec: &ObjectiveSpec,
    time_limit: Option<Duration>,
    warm_start: Option<Schedule>,
) -> Result<SolveResult, SolverError> {
    let heuristic = |r: Result<SolveResult, HeuristicError>| match r {
        Ok(r) => Ok(r),
        Err(HeuristicError::Failure(_)) => Ok(no_result(*spec)),
    };
    match kind {
        SolverKind::Bnb => {
            let config = SearchConfig { time_limit, warm_start, ..Default::default() };
            solve(inst, spec, &config).map_err(|e| SolverError::Refused(e.to_string()))
        }
        SolverKind::Sch => heuristic(schedule_centric(inst, spec)),
        SolverKind::Qch => heuristic(qualification_centric(inst, spec)),
        SolverKind::Oracle => {
            let limits = OracleLimits { time_limit, ..Default::default() };
            enumerate_optimal(inst, spec, &limits).map_err(|e| SolverError::Refused(e.to_string()))
        }
    }
}

fn no_result(spec: ObjectiveSpec) -> SolveResult {
    SolveResult {
        status: ptc_core::SolveStatus::Unknown,
        spec,
        schedule: None,
        objective: None,
        dual_bound: None,
        stats: Default::default(),
    }
}
