//! Schedules and their ground-truth semantics: feasibility, makespan, flow
//! time, disqualifications and objective values.
//!
//! Qualification thresholds are measured start to start. Every
//! (family, qualified machine) pair behaves as if a job of the family had
//! started at time 0, and a start exactly `threshold` after the previous one
//! keeps the qualification. A pair is lost at `last_start + threshold` only if
//! that instant is strictly before the makespan.

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::instance::{Instance, Time};
use crate::objective::{ObjectiveSpec, ObjectiveValue};

/// One job placed on one machine. All indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    pub job: usize,
    pub machine: usize,
    pub start: Time,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScheduleError {
    #[error("job {0} is assigned more than once")]
    DuplicateJob(usize),
    #[error("job {0} is not assigned")]
    MissingJob(usize),
    #[error("job {job} out of range 1..={count}")]
    JobOutOfRange { job: usize, count: usize },
    #[error("machine {machine} out of range 1..={count}")]
    MachineOutOfRange { machine: usize, count: usize },
    #[error("schedule is infeasible ({} violations)", .0.len())]
    Infeasible(Vec<Violation>),
    #[error("malformed solution file: {0}")]
    Syntax(String),
}

/// Exactly one assignment per job, stored in job order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Schedule {
    assignments: Vec<Assignment>,
}

impl Schedule {
    /// Checks that every job of `inst` appears exactly once and that machine
    /// indices are in range. Feasibility is a separate question.
    pub fn new(inst: &Instance, mut assignments: Vec<Assignment>) -> Result<Self, ScheduleError> {
        let n = inst.job_count();
        let mut seen = vec![false; n];
        for a in &assignments {
            if a.job >= n {
                return Err(ScheduleError::JobOutOfRange {
                    job: a.job + 1,
                    count: n,
                });
            }
            if a.machine >= inst.machine_count() {
                return Err(ScheduleError::MachineOutOfRange {
                    machine: a.machine + 1,
                    count: inst.machine_count(),
                });
            }
            if std::mem::replace(&mut seen[a.job], true) {
                return Err(ScheduleError::DuplicateJob(a.job + 1));
            }
        }
        if let Some(j) = seen.iter().position(|s| !s) {
            return Err(ScheduleError::MissingJob(j + 1));
        }
        assignments.sort_unstable_by_key(|a| a.job);
        Ok(Self { assignments })
    }

    /// Builds a schedule from family-level placements `(family, machine,
    /// start)`, numbering the jobs of each family in start order.
    pub fn from_placements(
        inst: &Instance,
        placements: &[(usize, usize, Time)],
    ) -> Result<Self, ScheduleError> {
        let mut sorted = placements.to_vec();
        sorted.sort_unstable_by_key(|&(f, m, t)| (f, t, m));
        let mut next: Vec<usize> = (0..inst.family_count()).map(|f| inst.jobs_of(f).start).collect();
        let mut assignments = Vec::with_capacity(sorted.len());
        for (f, machine, start) in sorted {
            if next[f] >= inst.jobs_of(f).end {
                return Err(ScheduleError::DuplicateJob(next[f] + 1));
            }
            assignments.push(Assignment {
                job: next[f],
                machine,
                start,
            });
            next[f] += 1;
        }
        Self::new(inst, assignments)
    }

    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    pub fn from_json(inst: &Instance, text: &str) -> Result<Self, ScheduleError> {
        let file: SolutionFile =
            serde_json::from_str(text).map_err(|e| ScheduleError::Syntax(e.to_string()))?;
        let mut assignments = Vec::with_capacity(file.assignments.len());
        for a in file.assignments {
            if a.job == 0 {
                return Err(ScheduleError::JobOutOfRange {
                    job: 0,
                    count: inst.job_count(),
                });
            }
            if a.machine == 0 {
                return Err(ScheduleError::MachineOutOfRange {
                    machine: 0,
                    count: inst.machine_count(),
                });
            }
            assignments.push(Assignment {
                job: a.job - 1,
                machine: a.machine - 1,
                start: a.start,
            });
        }
        Self::new(inst, assignments)
    }

    pub fn to_file(&self) -> SolutionFile {
        SolutionFile {
            assignments: self
                .assignments
                .iter()
                .map(|a| AssignmentFile {
                    job: a.job + 1,
                    machine: a.machine + 1,
                    start: a.start,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("schedule serialization cannot fail")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub assignments: Vec<AssignmentFile>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssignmentFile {
    pub job: usize,
    pub machine: usize,
    pub start: Time,
}

/// A single feasibility violation. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// The job runs on a machine outside its family's qualification set.
    NotQualified { job: usize, machine: usize },
    /// The job ends after the horizon.
    BeyondHorizon { job: usize, end: Time, horizon: Time },
    /// The job starts before the previous job on the machine has ended (plus
    /// the setup time when the families differ).
    Overlap {
        machine: usize,
        previous: usize,
        job: usize,
        earliest: Time,
        start: Time,
    },
    /// Two consecutive starts of a family on a machine are more than the
    /// threshold apart. `previous` is `None` for the virtual start at time 0.
    QualificationGap {
        family: usize,
        machine: usize,
        previous: Option<usize>,
        previous_start: Time,
        job: usize,
        start: Time,
        threshold: Time,
    },
}

impl Violation {
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::NotQualified { .. } => "not-qualified",
            Violation::BeyondHorizon { .. } => "beyond-horizon",
            Violation::Overlap { .. } => "overlap",
            Violation::QualificationGap { .. } => "qualification-gap",
        }
    }

    /// 1-based JSON rendering used in evaluation reports.
    pub fn to_json(&self) -> serde_json::Value {
        match *self {
            Violation::NotQualified { job, machine } => {
                json!({"kind": self.kind(), "job": job + 1, "machine": machine + 1})
            }
            Violation::BeyondHorizon { job, end, horizon } => {
                json!({"kind": self.kind(), "job": job + 1, "end": end, "horizon": horizon})
            }
            Violation::Overlap {
                machine,
                previous,
                job,
                earliest,
                start,
            } => json!({
                "kind": self.kind(), "machine": machine + 1, "previous_job": previous + 1,
                "job": job + 1, "earliest": earliest, "start": start
            }),
            Violation::QualificationGap {
                family,
                machine,
                previous,
                previous_start,
                job,
                start,
                threshold,
            } => json!({
                "kind": self.kind(), "family": family + 1, "machine": machine + 1,
                "previous_job": previous.map(|p| p + 1), "previous_start": previous_start,
                "job": job + 1, "start": start, "threshold": threshold
            }),
        }
    }
}

/// Jobs of each machine sorted by start time.
fn machine_sequences(inst: &Instance, sched: &Schedule) -> Vec<Vec<Assignment>> {
    let mut seqs = vec![Vec::new(); inst.machine_count()];
    for a in sched.assignments() {
        seqs[a.machine].push(*a);
    }
    for seq in &mut seqs {
        seq.sort_unstable_by_key(|a| (a.start, a.job));
    }
    seqs
}

/// Lists every violated constraint; an empty list means the schedule is
/// feasible.
pub fn check_feasibility(inst: &Instance, sched: &Schedule) -> Vec<Violation> {
    let horizon = inst.horizon();
    let family_of = |job: usize| inst.family_of(job).expect("schedule jobs are in range");
    let mut violations = Vec::new();

    for a in sched.assignments() {
        let fam = inst.family(family_of(a.job));
        if !fam.is_qualified(a.machine) {
            violations.push(Violation::NotQualified {
                job: a.job,
                machine: a.machine,
            });
        }
        let end = a.start + fam.processing;
        if end > horizon {
            violations.push(Violation::BeyondHorizon {
                job: a.job,
                end,
                horizon,
            });
        }
    }

    for (machine, seq) in machine_sequences(inst, sched).iter().enumerate() {
        for pair in seq.windows(2) {
            let (prev, next) = (pair[0], pair[1]);
            let (fp, fnext) = (family_of(prev.job), family_of(next.job));
            let mut earliest = prev.start + inst.family(fp).processing;
            if fp != fnext {
                earliest += inst.family(fnext).setup;
            }
            if next.start < earliest {
                violations.push(Violation::Overlap {
                    machine,
                    previous: prev.job,
                    job: next.job,
                    earliest,
                    start: next.start,
                });
            }
        }
        for (f, fam) in inst.families().iter().enumerate() {
            if !fam.is_qualified(machine) {
                continue;
            }
            let mut previous = None;
            let mut previous_start = 0;
            for a in seq.iter().filter(|a| family_of(a.job) == f) {
                if a.start > previous_start + fam.threshold {
                    violations.push(Violation::QualificationGap {
                        family: f,
                        machine,
                        previous,
                        previous_start,
                        job: a.job,
                        start: a.start,
                        threshold: fam.threshold,
                    });
                }
                previous = Some(a.job);
                previous_start = a.start;
            }
        }
    }
    violations
}

/// Makespan and flow time (sum of completion times).
pub fn compute_makespan_flow(inst: &Instance, sched: &Schedule) -> (Time, u64) {
    let mut cmax = 0;
    let mut flow = 0u64;
    for a in sched.assignments() {
        let end = a.start + inst.family(inst.family_of(a.job).expect("in range")).processing;
        cmax = cmax.max(end);
        flow += u64::from(end);
    }
    (cmax, flow)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum PairStatus {
    Retained,
    Lost { at: Time },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairEntry {
    pub family: usize,
    pub machine: usize,
    pub status: PairStatus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisqualificationReport {
    pub entries: Vec<PairEntry>,
    pub disq_count: u64,
    pub qualified_count: u64,
}

impl DisqualificationReport {
    pub fn lost(&self) -> impl Iterator<Item = (usize, usize, Time)> + '_ {
        self.entries.iter().filter_map(|e| match e.status {
            PairStatus::Lost { at } => Some((e.family, e.machine, at)),
            PairStatus::Retained => None,
        })
    }
}

fn require_feasible(inst: &Instance, sched: &Schedule) -> Result<(), ScheduleError> {
    let violations = check_feasibility(inst, sched);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(ScheduleError::Infeasible(violations))
    }
}

/// Disqualification status of every (family, qualified machine) pair.
pub fn compute_disqualifications(
    inst: &Instance,
    sched: &Schedule,
) -> Result<DisqualificationReport, ScheduleError> {
    require_feasible(inst, sched)?;
    Ok(disqualifications_unchecked(inst, sched))
}

fn disqualifications_unchecked(inst: &Instance, sched: &Schedule) -> DisqualificationReport {
    let (cmax, _) = compute_makespan_flow(inst, sched);
    let m = inst.machine_count();
    let mut last = vec![0 as Time; inst.family_count() * m];
    for a in sched.assignments() {
        let f = inst.family_of(a.job).expect("in range");
        let slot = &mut last[f * m + a.machine];
        *slot = (*slot).max(a.start);
    }
    let mut entries = Vec::with_capacity(inst.pair_count());
    let mut disq_count = 0;
    for (f, fam) in inst.families().iter().enumerate() {
        for &machine in &fam.qualified {
            let deadline = last[f * m + machine] + fam.threshold;
            let status = if deadline < cmax {
                disq_count += 1;
                PairStatus::Lost { at: deadline }
            } else {
                PairStatus::Retained
            };
            entries.push(PairEntry {
                family: f,
                machine,
                status,
            });
        }
    }
    DisqualificationReport {
        qualified_count: inst.pair_count() as u64 - disq_count,
        entries,
        disq_count,
    }
}

/// Evaluates a feasible schedule under `spec`.
pub fn evaluate(
    inst: &Instance,
    sched: &Schedule,
    spec: &ObjectiveSpec,
) -> Result<ObjectiveValue, ScheduleError> {
    require_feasible(inst, sched)?;
    let (cmax, flow) = compute_makespan_flow(inst, sched);
    let report = disqualifications_unchecked(inst, sched);
    Ok(ObjectiveValue::new(
        *spec,
        flow,
        cmax,
        report.disq_count,
        inst.pair_count() as u64,
    ))
}

/// Evaluation report in the JSON shape used by the `validate` command.
pub fn evaluation_report(
    inst: &Instance,
    sched: &Schedule,
    spec: &ObjectiveSpec,
) -> serde_json::Value {
    let violations = check_feasibility(inst, sched);
    if !violations.is_empty() {
        return json!({
            "feasible": false,
            "violations": violations.iter().map(Violation::to_json).collect::<Vec<_>>(),
            "cmax": null,
            "flow": null,
            "disqualified": [],
            "objective": null,
        });
    }
    let (cmax, flow) = compute_makespan_flow(inst, sched);
    let report = disqualifications_unchecked(inst, sched);
    let value = ObjectiveValue::new(*spec, flow, cmax, report.disq_count, inst.pair_count() as u64);
    json!({
        "feasible": true,
        "violations": [],
        "cmax": cmax,
        "flow": flow,
        "disqualified": report
            .lost()
            .map(|(f, m, at)| json!({"family": f + 1, "machine": m + 1, "at": at}))
            .collect::<Vec<_>>(),
        "objective": {
            "mode": spec.mode(),
            "beta": spec.beta(),
            "flow": value.flow_time,
            "disq": value.disq_count,
            "qualified": value.qualified_count,
            "value": value.primary(),
        },
    })
}
