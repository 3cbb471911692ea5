//! Partial schedules explored by the branch-and-bound.
//!
//! Jobs are fixed in nondecreasing start order, ties broken by strictly
//! increasing machine index. Every complete schedule has exactly one such
//! ordering, and every job placed later starts no earlier than `time`, which
//! makes "this window has closed" a local test.

use crate::instance::{Instance, Time};

/// Marks a pair whose window has closed while jobs were still pending.
pub const LOST: Time = Time::MAX;

/// `(family, machine, start)`, 0-based.
pub type Placement = (usize, usize, Time);

/// Start times offered to a branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CandidatePolicy {
    /// Every integer start between the earliest and the latest feasible one.
    #[default]
    FullGrid,
    /// The earliest feasible start plus every open qualification deadline in
    /// range. Faster but can miss optima; kept for experiments.
    Deadlines,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SearchState {
    time: Time,
    last_machine: Option<usize>,
    machine_end: Vec<Time>,
    machine_family: Vec<Option<usize>>,
    /// Last start per `(family, machine)` slot, `LOST`, or `horizon` once no
    /// job of the family remains and the pair is sure to be retained.
    pair_last: Vec<Time>,
    remaining: Vec<u32>,
    flow: u64,
}

impl SearchState {
    pub fn root(inst: &Instance) -> Self {
        let mut state = Self {
            time: 0,
            last_machine: None,
            machine_end: vec![0; inst.machine_count()],
            machine_family: vec![None; inst.machine_count()],
            pair_last: vec![0; inst.family_count() * inst.machine_count()],
            remaining: inst.families().iter().map(|f| f.jobs).collect(),
            flow: 0,
        };
        state.normalize(inst);
        state
    }

    pub fn time(&self) -> Time {
        self.time
    }

    pub fn flow(&self) -> u64 {
        self.flow
    }

    pub fn remaining(&self, f: usize) -> u32 {
        self.remaining[f]
    }

    pub fn remaining_jobs(&self) -> u32 {
        self.remaining.iter().sum()
    }

    pub fn is_complete(&self) -> bool {
        self.remaining.iter().all(|&r| r == 0)
    }

    pub fn machine_end(&self, m: usize) -> Time {
        self.machine_end[m]
    }

    pub(crate) fn slot(inst: &Instance, f: usize, m: usize) -> usize {
        f * inst.machine_count() + m
    }

    /// Last start of `f` on `m`, or `None` once the pair is lost.
    pub fn last_start(&self, inst: &Instance, f: usize, m: usize) -> Option<Time> {
        let last = self.pair_last[Self::slot(inst, f, m)];
        (last != LOST).then_some(last)
    }

    pub fn is_lost(&self, inst: &Instance, f: usize, m: usize) -> bool {
        self.pair_last[Self::slot(inst, f, m)] == LOST
    }

    /// Pairs already known to be lost.
    pub fn lost_count(&self, inst: &Instance) -> u64 {
        pairs(inst).filter(|&(f, m)| self.is_lost(inst, f, m)).count() as u64
    }

    pub fn setup(&self, inst: &Instance, f: usize, m: usize) -> Time {
        match self.machine_family[m] {
            Some(g) if g != f => inst.family(f).setup,
            _ => 0,
        }
    }

    /// Earliest start a new `f` job may take on `m`, ignoring windows.
    pub fn earliest_start(&self, inst: &Instance, f: usize, m: usize) -> Time {
        let order = match self.last_machine {
            Some(last) if m <= last => self.time + 1,
            _ => self.time,
        };
        order.max(self.machine_end[m] + self.setup(inst, f, m))
    }

    /// Latest start a new `f` job may take on `m`.
    pub fn latest_start(&self, inst: &Instance, f: usize, m: usize) -> Option<Time> {
        let fam = inst.family(f);
        let last = self.last_start(inst, f, m)?;
        let horizon = inst.horizon();
        (fam.processing <= horizon).then(|| (last + fam.threshold).min(horizon - fam.processing))
    }

    /// Start window `[earliest, latest]` of the next `f` job on `m`.
    pub fn window(&self, inst: &Instance, f: usize, m: usize) -> Option<(Time, Time)> {
        if self.remaining[f] == 0 || !inst.family(f).is_qualified(m) {
            return None;
        }
        let latest = self.latest_start(inst, f, m)?;
        let earliest = self.earliest_start(inst, f, m);
        (earliest <= latest).then_some((earliest, latest))
    }

    /// Fixes one more job. Returns `None` if the start is outside its window.
    pub fn place(&self, inst: &Instance, (f, m, t): Placement) -> Option<Self> {
        let (earliest, latest) = self.window(inst, f, m)?;
        if t < earliest || t > latest {
            return None;
        }
        let p = inst.family(f).processing;
        let mut child = self.clone();
        child.time = t;
        child.last_machine = Some(m);
        child.machine_end[m] = t + p;
        child.machine_family[m] = Some(f);
        child.pair_last[Self::slot(inst, f, m)] = t;
        child.remaining[f] -= 1;
        child.flow += u64::from(t + p);
        child.normalize(inst);
        Some(child)
    }

    /// Children in `(family, machine, start)` order.
    pub fn expand(&self, inst: &Instance, policy: CandidatePolicy) -> Vec<(Placement, Self)> {
        let mut children = Vec::new();
        let deadlines = match policy {
            CandidatePolicy::FullGrid => Vec::new(),
            CandidatePolicy::Deadlines => self.open_deadlines(inst),
        };
        for (f, fam) in inst.families().iter().enumerate() {
            if self.remaining[f] == 0 {
                continue;
            }
            for &m in &fam.qualified {
                let Some((earliest, latest)) = self.window(inst, f, m) else {
                    continue;
                };
                let mut push = |t| {
                    let child = self.place(inst, (f, m, t)).expect("start inside window");
                    children.push(((f, m, t), child));
                };
                match policy {
                    CandidatePolicy::FullGrid => (earliest..=latest).for_each(&mut push),
                    CandidatePolicy::Deadlines => {
                        push(earliest);
                        deadlines
                            .iter()
                            .filter(|&&d| earliest < d && d <= latest)
                            .for_each(|&d| push(d));
                    }
                }
            }
        }
        children
    }

    fn open_deadlines(&self, inst: &Instance) -> Vec<Time> {
        let horizon = inst.horizon();
        let mut out: Vec<Time> = pairs(inst)
            .filter_map(|(f, m)| self.last_start(inst, f, m).map(|l| l + inst.family(f).threshold))
            .filter(|&d| d < horizon)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Canonical form, so equivalent partial schedules compare equal.
    fn normalize(&mut self, inst: &Instance) {
        if self.is_complete() {
            return;
        }
        let horizon = inst.horizon();
        let max_setup = inst.families().iter().map(|f| f.setup).max().unwrap_or(0);
        for (f, m) in pairs(inst) {
            let slot = Self::slot(inst, f, m);
            let last = self.pair_last[slot];
            if last == LOST {
                continue;
            }
            let deadline = last + inst.family(f).threshold;
            if deadline < self.time {
                // Pending jobs end after `time`, so the makespan passes the deadline.
                self.pair_last[slot] = LOST;
            } else if self.remaining[f] == 0 && deadline >= horizon {
                self.pair_last[slot] = horizon;
            }
        }
        for m in 0..self.machine_end.len() {
            if self.machine_end[m] + max_setup <= self.time {
                self.machine_end[m] = 0;
                self.machine_family[m] = None;
            }
        }
    }

    /// Makespan, flow time and disqualifications of a complete state.
    pub fn completion(&self, inst: &Instance) -> (Time, u64, u64) {
        debug_assert!(self.is_complete());
        let cmax = self.machine_end.iter().copied().max().unwrap_or(0);
        let disq = pairs(inst)
            .filter(|&(f, m)| match self.last_start(inst, f, m) {
                None => true,
                Some(last) => last + inst.family(f).threshold < cmax,
            })
            .count();
        (cmax, self.flow, disq as u64)
    }

    /// Dominance key; equal keys mean identical futures, so only the flow
    /// time accumulated so far tells two states apart.
    pub fn memo_key(&self, inst: &Instance) -> Box<[u32]> {
        let mut key = Vec::with_capacity(2 + 2 * self.machine_end.len() + inst.pair_count() + self.remaining.len());
        key.push(self.time);
        key.push(self.last_machine.map_or(0, |m| m as u32 + 1));
        key.extend(&self.machine_end);
        key.extend(self.machine_family.iter().map(|f| f.map_or(0, |f| f as u32 + 1)));
        key.extend(pairs(inst).map(|(f, m)| self.pair_last[Self::slot(inst, f, m)]));
        key.extend(&self.remaining);
        key.into_boxed_slice()
    }
}

/// Qualified `(family, machine)` pairs in family-major order.
pub(crate) fn pairs(inst: &Instance) -> impl Iterator<Item = (usize, usize)> + '_ {
    inst.families()
        .iter()
        .enumerate()
        .flat_map(|(f, fam)| fam.qualified.iter().map(move |&m| (f, m)))
}
