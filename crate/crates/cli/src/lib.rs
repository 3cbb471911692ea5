//! Command-line front end for the ptc solvers and the benchmark harness.

pub mod bench;
pub mod solvers;

pub use bench::{run_benchmark, run_instances, BenchConfig, BenchReport, RunRecord, SummaryRow};
pub use solvers::{run_solver, ObjectiveArg, SolverError, SolverKind};
