//! Constructive heuristics used as fast incumbents.
//!
//! Both heuristics are event driven: the machine that becomes available
//! first (lowest index on ties) receives the next job. They differ in how
//! that job is picked.
//!
//! * The scheduling-centric rule picks the family with the shortest
//!   processing time including the setup it would cost on that machine.
//! * The qualification-centric rule looks at the pair whose qualification
//!   deadline on that machine is closest. If the scheduling-centric choice
//!   would make that deadline unreachable, a job of the urgent family runs
//!   instead, possibly delayed toward the deadline so that the refreshed
//!   window reaches further.
//!
//! When no qualification deadline can fall inside the horizon both rules
//! produce the same schedule.

use std::time::Instant;

use thiserror::Error;

use crate::instance::{Instance, Time};
use crate::objective::ObjectiveSpec;
use crate::schedule::{evaluate, Schedule};
use crate::solve::{IncumbentEvent, SearchStats, SolveResult, SolveStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HeuristicKind {
    SchedulingCentric,
    QualificationCentric,
}

/// Tie-breaking is fixed: lowest family index, then lowest machine index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeuristicConfig {
    pub kind: HeuristicKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HeuristicError {
    #[error("heuristic dead end: {0}")]
    Failure(String),
}

struct Greedy<'a> {
    inst: &'a Instance,
    horizon: Time,
    available: Vec<Time>,
    last_family: Vec<Option<usize>>,
    retired: Vec<bool>,
    /// Passed over at the current instant in favour of a tied machine.
    deferred: Vec<bool>,
    /// Last start per (family, machine), virtual 0 initially.
    last_start: Vec<Time>,
    remaining: Vec<u32>,
    placements: Vec<(usize, usize, Time)>,
}

impl<'a> Greedy<'a> {
    fn new(inst: &'a Instance) -> Self {
        let m = inst.machine_count();
        Self {
            inst,
            horizon: inst.horizon(),
            available: vec![0; m],
            last_family: vec![None; m],
            retired: vec![false; m],
            deferred: vec![false; m],
            last_start: vec![0; inst.family_count() * m],
            remaining: inst.families().iter().map(|f| f.jobs).collect(),
            placements: Vec::with_capacity(inst.job_count()),
        }
    }

    fn deadline(&self, f: usize, m: usize) -> Time {
        self.last_start[f * self.inst.machine_count() + m] + self.inst.family(f).threshold
    }

    fn setup(&self, f: usize, m: usize) -> Time {
        match self.last_family[m] {
            Some(g) if g != f => self.inst.family(f).setup,
            _ => 0,
        }
    }

    /// Families that can start on `m` at its availability, with that start.
    fn candidates(&self, m: usize) -> Vec<(usize, Time)> {
        self.inst
            .families()
            .iter()
            .enumerate()
            .filter(|(f, fam)| self.remaining[*f] > 0 && fam.is_qualified(m))
            .filter_map(|(f, fam)| {
                let start = self.available[m] + self.setup(f, m);
                (start <= self.deadline(f, m) && start + fam.processing <= self.horizon)
                    .then_some((f, start))
            })
            .collect()
    }

    fn place(&mut self, f: usize, m: usize, start: Time) {
        let fam = self.inst.family(f);
        debug_assert!(start >= self.available[m] + self.setup(f, m));
        debug_assert!(start <= self.deadline(f, m));
        self.available[m] = start + fam.processing;
        self.last_family[m] = Some(f);
        self.last_start[f * self.inst.machine_count() + m] = start;
        self.remaining[f] -= 1;
        self.placements.push((f, m, start));
        self.deferred.iter_mut().for_each(|d| *d = false);
    }

    fn next_machine(&self) -> Option<usize> {
        (0..self.inst.machine_count())
            .filter(|&m| !self.retired[m])
            .min_by_key(|&m| (self.available[m], self.deferred[m], m))
    }

    fn run(mut self, kind: HeuristicKind) -> Result<Vec<(usize, usize, Time)>, HeuristicError> {
        // With one family there is nothing to trade off.
        let kind = if self.inst.family_count() == 1 { HeuristicKind::SchedulingCentric } else { kind };
        while self.remaining.iter().any(|&r| r > 0) {
            let Some(m) = self.next_machine() else {
                let f = self.remaining.iter().position(|&r| r > 0).expect("jobs remain");
                return Err(HeuristicError::Failure(format!(
                    "family {} has {} unscheduled jobs but no machine can still take them",
                    f + 1,
                    self.remaining[f]
                )));
            };
            let candidates = self.candidates(m);
            let Some(&(spt, spt_start)) = candidates.iter().min_by_key(|&&(f, start)| {
                (start - self.available[m] + self.inst.family(f).processing, f)
            }) else {
                // Windows only close as time advances, so the machine is done.
                self.retired[m] = true;
                continue;
            };
            let (f, start) = match kind {
                HeuristicKind::SchedulingCentric => (spt, spt_start),
                HeuristicKind::QualificationCentric => match self.urgent_choice(m, &candidates) {
                    Some(choice) => choice,
                    None => match self.next_event(m, &candidates) {
                        Some(t) if t == self.available[m] => {
                            self.deferred[m] = true;
                            continue;
                        }
                        Some(t) => {
                            self.available[m] = t;
                            continue;
                        }
                        None => (spt, spt_start),
                    },
                },
            };
            let (f, start) = self.rescue(m, &candidates, (f, start));
            self.place(f, m, start);
        }
        Ok(self.placements)
    }

    /// Makespan estimate: pending work spread evenly over the machines, and
    /// over the qualified machines of each family.
    fn estimated_cmax(&self) -> Time {
        let spread = |machines: &[usize], work: u64| {
            let ready: u64 = machines.iter().map(|&m| u64::from(self.available[m])).sum();
            (ready + work).div_ceil(machines.len() as u64) as Time
        };
        let work = |f: usize| u64::from(self.remaining[f]) * u64::from(self.inst.family(f).processing);
        let all: Vec<usize> = (0..self.inst.machine_count()).collect();
        let mut est = spread(&all, (0..self.inst.family_count()).map(work).sum());
        for fam in self.inst.families() {
            let inside: u64 = (0..self.inst.family_count())
                .filter(|&g| self.inst.family(g).qualified.iter().all(|m| fam.qualified.contains(m)))
                .map(work)
                .sum();
            est = est.max(spread(&fam.qualified, inside));
        }
        est.max(self.available.iter().copied().max().unwrap_or(0))
    }

    /// Further starts needed after a window closing at `deadline` to stay
    /// qualified until `cmax`.
    fn needed(&self, f: usize, deadline: Time, cmax: Time) -> u32 {
        cmax.saturating_sub(deadline).div_ceil(self.inst.family(f).threshold.max(1))
    }

    fn refreshes(&self, f: usize, m: usize, cmax: Time) -> u32 {
        let deadline = self.deadline(f, m);
        if self.retired[m] || deadline < self.available[m] {
            return 0;
        }
        self.needed(f, deadline, cmax)
    }

    /// Whether starting `f` on `m` at `start` brings the pair closer to
    /// lasting until `cmax`.
    fn helps(&self, f: usize, m: usize, start: Time, cmax: Time) -> bool {
        let after = self.needed(f, start + self.inst.family(f).threshold, cmax);
        after < self.refreshes(f, m, cmax)
    }

    /// Jobs of `f` not reserved for refreshing its qualifications.
    fn spare(&self, f: usize, cmax: Time) -> i64 {
        let reserved: u32 = self.inst.family(f).qualified.iter().map(|&m| self.refreshes(f, m, cmax)).sum();
        i64::from(self.remaining[f]) - i64::from(reserved)
    }

    /// Whether `f` can still start on some machine other than `m`.
    fn has_other_machine(&self, f: usize, m: usize) -> bool {
        let fam = self.inst.family(f);
        fam.qualified.iter().any(|&k| {
            k != m
                && !self.retired[k]
                && self.available[k] + self.setup(f, k) <= self.deadline(f, k)
                && self.available[k] + self.setup(f, k) + fam.processing <= self.horizon
        })
    }

    /// Overrides `choice` when it would close the last open window of a
    /// family that still has jobs.
    fn rescue(&self, m: usize, candidates: &[(usize, Time)], choice: (usize, Time)) -> (usize, Time) {
        let (g, start) = choice;
        let end = start + self.inst.family(g).processing;
        candidates
            .iter()
            .filter(|&&(f, _)| f != g && !self.has_other_machine(f, m))
            .filter(|&&(f, _)| {
                let fam = self.inst.family(f);
                end + fam.setup > self.deadline(f, m) || end + fam.setup + fam.processing > self.horizon
            })
            .min_by_key(|&&(f, _)| (self.deadline(f, m), f))
            .copied()
            .unwrap_or(choice)
    }

    /// Next time another machine may act, no earlier than `m` itself and
    /// no later than the last moment every candidate can still start on `m`.
    fn next_event(&self, m: usize, candidates: &[(usize, Time)]) -> Option<Time> {
        let now = self.available[m];
        let cap = candidates
            .iter()
            .map(|&(f, start)| {
                let latest = self.deadline(f, m).min(self.horizon - self.inst.family(f).processing);
                now + (latest - start)
            })
            .min()?;
        (0..self.inst.machine_count())
            .filter(|&k| k != m && !self.retired[k])
            .filter(|&k| self.available[k] > now || (self.available[k] == now && !self.deferred[k]))
            .map(|k| self.available[k].min(cap))
            .min()
            .filter(|&t| t > now || cap > now)
    }

    /// `None` asks to idle: every candidate would spend a job another
    /// machine needs for its qualification.
    fn urgent_choice(&self, m: usize, candidates: &[(usize, Time)]) -> Option<(usize, Time)> {
        let cmax = self.estimated_cmax();
        let spt_key = |&&(g, start): &&(usize, Time)| (start - self.available[m] + self.inst.family(g).processing, g);
        // A job spent here must either refresh this machine or be spare.
        let affordable = |&(g, start): &(usize, Time)| self.helps(g, m, start, cmax) || self.spare(g, cmax) > 0;
        let urgent = candidates
            .iter()
            .filter(|&&(f, _)| self.refreshes(f, m, cmax) > 0)
            .min_by_key(|&&(f, _)| (self.deadline(f, m), f));
        let Some(&(u, u_start)) = urgent else {
            return candidates.iter().filter(|c| affordable(c)).min_by_key(spt_key).copied();
        };
        let deadline = self.deadline(u, m);
        let setup_u = self.inst.family(u).setup;
        // Use the slack before the deadline for other work first.
        let filler = candidates
            .iter()
            .filter(|&&(g, start)| {
                g != u && affordable(&(g, start)) && start + self.inst.family(g).processing + setup_u <= deadline
            })
            .min_by_key(spt_key);
        Some(filler.copied().unwrap_or((u, u_start)))
    }
}

/// Builds a schedule with the chosen rule.
pub fn construct(inst: &Instance, config: &HeuristicConfig) -> Result<Schedule, HeuristicError> {
    let placements = Greedy::new(inst).run(config.kind)?;
    Ok(Schedule::from_placements(inst, &placements).expect("heuristic places every job once"))
}

fn run(inst: &Instance, kind: HeuristicKind, spec: &ObjectiveSpec) -> Result<SolveResult, HeuristicError> {
    let started = Instant::now();
    let schedule = construct(inst, &HeuristicConfig { kind })?;
    let value = evaluate(inst, &schedule, spec).map_err(|e| {
        HeuristicError::Failure(format!("internal error, constructed schedule rejected: {e}"))
    })?;
    let elapsed = started.elapsed();
    Ok(SolveResult {
        status: SolveStatus::Feasible,
        spec: *spec,
        schedule: Some(schedule),
        objective: Some(value),
        dual_bound: None,
        stats: SearchStats {
            nodes: 0,
            wall_time: elapsed,
            incumbents: vec![IncumbentEvent {
                elapsed,
                key: value.key(),
                nodes: 0,
            }],
        },
    })
}

/// Flow-oriented heuristic.
pub fn schedule_centric(inst: &Instance, spec: &ObjectiveSpec) -> Result<SolveResult, HeuristicError> {
    run(inst, HeuristicKind::SchedulingCentric, spec)
}

/// Disqualification-oriented heuristic.
pub fn qualification_centric(
    inst: &Instance,
    spec: &ObjectiveSpec,
) -> Result<SolveResult, HeuristicError> {
    run(inst, HeuristicKind::QualificationCentric, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Family;
    use crate::schedule::check_feasibility;
    use crate::schedule::tests::example;

    fn single_family(jobs: u32, p: Time, machines: usize, threshold: Time) -> Instance {
        Instance::new(
            machines,
            vec![Family { jobs, processing: p, setup: 1, threshold, qualified: (0..machines).collect() }],
        )
        .unwrap()
    }

    #[test]
    fn example_one_schedules_are_feasible() {
        let inst = example();
        let spec = ObjectiveSpec::lex_disq_then_flow();
        let sch = schedule_centric(&inst, &spec).unwrap();
        let qch = qualification_centric(&inst, &spec).unwrap();
        for r in [&sch, &qch] {
            assert!(check_feasibility(&inst, r.schedule.as_ref().unwrap()).is_empty());
            assert!(r.objective.unwrap().flow_time >= 114);
        }
        assert!(qch.objective.unwrap().disq_count <= 3);
    }

    #[test]
    fn single_machine_single_family_is_back_to_back() {
        let inst = single_family(4, 3, 1, 100);
        let r = schedule_centric(&inst, &ObjectiveSpec::flow_only()).unwrap();
        assert_eq!(r.objective.unwrap().flow_time, 3 + 6 + 9 + 12);
        let starts: Vec<_> = r.schedule.unwrap().assignments().iter().map(|a| a.start).collect();
        assert_eq!(starts, vec![0, 3, 6, 9]);
    }

    #[test]
    fn rules_agree_without_trade_off() {
        let spec = ObjectiveSpec::flow_only();
        let inst = single_family(5, 2, 2, 3);
        assert_eq!(
            construct(&inst, &HeuristicConfig { kind: HeuristicKind::SchedulingCentric }),
            construct(&inst, &HeuristicConfig { kind: HeuristicKind::QualificationCentric })
        );
        let loose = Instance::new(
            2,
            vec![
                Family { jobs: 2, processing: 3, setup: 1, threshold: 100, qualified: vec![0, 1] },
                Family { jobs: 3, processing: 2, setup: 2, threshold: 100, qualified: vec![1] },
            ],
        )
        .unwrap();
        assert!(loose.horizon() <= 100);
        assert_eq!(
            schedule_centric(&loose, &spec).unwrap().schedule,
            qualification_centric(&loose, &spec).unwrap().schedule
        );
    }

    #[test]
    fn dead_end_is_reported() {
        // Second job can start at 3 at the earliest, but the window closes at 1.
        let inst = single_family(2, 3, 1, 1);
        assert!(matches!(
            schedule_centric(&inst, &ObjectiveSpec::flow_only()),
            Err(HeuristicError::Failure(_))
        ));
    }

    #[test]
    fn deterministic() {
        let inst = example();
        let config = HeuristicConfig { kind: HeuristicKind::QualificationCentric };
        assert_eq!(construct(&inst, &config), construct(&inst, &config));
    }
}
