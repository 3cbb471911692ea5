//! Parallel machine scheduling with time constraints on machine
//! qualifications.
//!
//! A machine stays qualified for a job family only while jobs of that family
//! keep starting on it at most `threshold` time units apart. The crate
//! provides the instance model, a schedule validator that fixes the problem
//! semantics, constructive heuristics, an exact branch-and-bound search, an
//! exhaustive oracle for tiny instances, an LP exporter for the time-indexed
//! integer program, and a benchmark instance generator.

pub mod generator;
pub mod heuristics;
pub mod ilp;
pub mod instance;
pub mod objective;
pub mod oracle;
pub mod schedule;
pub mod search;
pub mod solve;

pub use generator::{
    generate, generate_set, generate_tiny, GeneratorConfig, GeneratorError, ThresholdClass, TinyLimits,
};
pub use heuristics::{
    construct, qualification_centric, schedule_centric, HeuristicConfig, HeuristicError,
    HeuristicKind,
};
pub use ilp::{export_ip3, model_counts, replay, IlpError, IlpModelSummary};
pub use instance::{Family, Instance, InstanceError, Time};
pub use objective::{compare, ObjectiveMode, ObjectiveSpec, ObjectiveValue};
pub use oracle::{enumerate_optimal, OracleError, OracleLimits};
pub use schedule::{
    check_feasibility, compute_disqualifications, compute_makespan_flow, evaluate, Assignment,
    DisqualificationReport, PairStatus, Schedule, ScheduleError, Violation,
};
pub use search::{solve, CandidatePolicy, NodeOrder, SearchConfig, SearchError};
pub use solve::{IncumbentEvent, SearchStats, SolveResult, SolveStatus};
