//! Exhaustive reference solver for tiny instances.
//!
//! Time is swept from 0 to T-1. At each instant every machine either stays
//! idle or starts a job of some family, so every integer-start schedule is
//! reached by exactly one decision path (jobs of one family are
//! interchangeable). Sub-results are memoized on the complete state, which
//! determines the rest of the schedule's objective.

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::instance::{Instance, Time};
use crate::objective::{ObjectiveSpec, ObjectiveValue};
use crate::schedule::{evaluate, Schedule};
use crate::solve::{IncumbentEvent, SearchStats, SolveResult, SolveStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_jobs: usize,
    pub max_horizon: Time,
    /// Maximum number of memoized states.
    pub max_states: usize,
    pub time_limit: Option<Duration>,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            max_jobs: 5,
            max_horizon: 32,
            max_states: 20_000_000,
            time_limit: None,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance too large for the oracle: {what} = {value} exceeds {limit}")]
    LimitsExceeded {
        what: &'static str,
        value: u64,
        limit: u64,
    },
}

const DEAD: Time = Time::MAX;
const IDLE: u8 = u8::MAX;

#[derive(Clone, PartialEq, Eq, Hash)]
struct State {
    /// End of the last job per machine.
    busy: Vec<Time>,
    /// Last family per machine, `IDLE` when nothing constrains the next start.
    last_family: Vec<u8>,
    /// Last start per (family, machine) slot; `DEAD` once the pair can no
    /// longer receive jobs and is certain to be lost.
    last_start: Vec<Time>,
    remaining: Vec<u32>,
}

/// Cost-to-go stored as `(flow, disq)`; `u32::MAX` flow marks "no completion".
#[derive(Clone, Copy)]
struct Entry {
    flow: u32,
    disq: u32,
    decision: u64,
}

const NO_COMPLETION: u32 = u32::MAX;

type Cost = Option<(u64, u64)>;

/// Bit layout used to pack a state into a `u128` memo key.
struct Packing {
    time_bits: u32,
    family_bits: u32,
    remaining_bits: Vec<u32>,
    /// Qualified (family, machine) slots, in packing order.
    slots: Vec<usize>,
}

impl Packing {
    fn new(inst: &Instance) -> Option<Self> {
        let bits = |max: u64| 64 - max.leading_zeros();
        let horizon = u64::from(inst.horizon());
        let time_bits = bits(horizon + 2);
        let family_bits = bits(inst.family_count() as u64 + 1);
        let remaining_bits: Vec<u32> = inst.families().iter().map(|f| bits(u64::from(f.jobs))).collect();
        let m = inst.machine_count();
        let slots: Vec<usize> = inst
            .families()
            .iter()
            .enumerate()
            .flat_map(|(f, fam)| fam.qualified.iter().map(move |&q| f * m + q))
            .collect();
        let total = time_bits
            + m as u32 * (time_bits + family_bits)
            + slots.len() as u32 * time_bits
            + remaining_bits.iter().sum::<u32>();
        (total <= 128).then_some(Self {
            time_bits,
            family_bits,
            remaining_bits,
            slots,
        })
    }

    fn pack(&self, t: Time, state: &State, horizon: Time) -> u128 {
        let mut key = 0u128;
        let mut push = |value: u128, width: u32| {
            key = (key << width) | value;
        };
        let time_code = |v: Time| if v == DEAD { u128::from(horizon) + 1 } else { u128::from(v) };
        push(u128::from(t), self.time_bits);
        for (&busy, &fam) in state.busy.iter().zip(&state.last_family) {
            push(u128::from(busy), self.time_bits);
            let code = if fam == IDLE { 0 } else { u128::from(fam) + 1 };
            push(code, self.family_bits);
        }
        for &s in &self.slots {
            push(time_code(state.last_start[s]), self.time_bits);
        }
        for (&r, &w) in state.remaining.iter().zip(&self.remaining_bits) {
            push(u128::from(r), w);
        }
        key
    }
}

struct Oracle<'a> {
    inst: &'a Instance,
    spec: ObjectiveSpec,
    horizon: Time,
    machines: usize,
    max_setup: Time,
    packing: Packing,
    memo: HashMap<u128, Entry, BuildHasherDefault<KeyHasher>>,
    limits: OracleLimits,
    deadline: Option<Instant>,
    aborted: bool,
}

/// Multiplicative hasher for packed `u128` keys.
#[derive(Default)]
struct KeyHasher(u64);

impl Hasher for KeyHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0.rotate_left(5) ^ u64::from(b)).wrapping_mul(0x51_7c_c1_b7_27_22_0a_95);
        }
    }

    fn write_u128(&mut self, v: u128) {
        let mixed = (v as u64) ^ ((v >> 64) as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        self.0 = (mixed ^ (mixed >> 29)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        self.0 ^= self.0 >> 32;
    }
}

impl<'a> Oracle<'a> {
    fn slot(&self, f: usize, m: usize) -> usize {
        f * self.machines + m
    }

    fn better(&self, a: (u64, u64), b: (u64, u64)) -> bool {
        self.spec.key(a.0, a.1) < self.spec.key(b.0, b.1)
    }

    fn terminal(&self, state: &State) -> (u64, u64) {
        let cmax = state.busy.iter().copied().max().unwrap_or(0);
        let mut disq = 0;
        for (f, fam) in self.inst.families().iter().enumerate() {
            for &m in &fam.qualified {
                let last = state.last_start[self.slot(f, m)];
                if last == DEAD || last + fam.threshold < cmax {
                    disq += 1;
                }
            }
        }
        (0, disq)
    }

    /// Canonical form of a state at time `t` while jobs remain: a pair whose
    /// window closed is certainly lost, and a machine that has been free for
    /// at least the largest setup no longer constrains anything (the makespan
    /// will exceed `t` anyway).
    fn normalize(&self, t: Time, state: &mut State) {
        if state.remaining.iter().all(|&r| r == 0) {
            return;
        }
        for (f, fam) in self.inst.families().iter().enumerate() {
            for &m in &fam.qualified {
                let s = self.slot(f, m);
                let last = state.last_start[s];
                if last != DEAD && last + fam.threshold < t {
                    state.last_start[s] = DEAD;
                }
            }
        }
        for m in 0..self.machines {
            if state.busy[m] + self.max_setup <= t {
                state.busy[m] = 0;
                state.last_family[m] = IDLE;
            }
        }
    }

    fn solve_at(&mut self, t: Time, state: &State) -> Cost {
        if state.remaining.iter().all(|&r| r == 0) {
            return Some(self.terminal(state));
        }
        if t >= self.horizon || self.aborted {
            return None;
        }
        let key = self.packing.pack(t, state, self.horizon);
        if let Some(entry) = self.memo.get(&key) {
            return (entry.flow != NO_COMPLETION).then_some((u64::from(entry.flow), u64::from(entry.disq)));
        }
        if self.memo.len() >= self.limits.max_states {
            self.aborted = true;
            return None;
        }
        if let Some(deadline) = self.deadline {
            if self.memo.len().is_multiple_of(4096) && Instant::now() >= deadline {
                self.aborted = true;
                return None;
            }
        }
        let mut best: Option<((u64, u64), u64)> = None;
        let mut work = state.clone();
        self.decide(t, 0, &mut work, 0, 0, &mut best);
        let entry = match best {
            Some(((flow, disq), decision)) => Entry {
                flow: flow as u32,
                disq: disq as u32,
                decision,
            },
            None => Entry {
                flow: NO_COMPLETION,
                disq: 0,
                decision: 0,
            },
        };
        if !self.aborted {
            self.memo.insert(key, entry);
        }
        best.map(|b| b.0)
    }

    /// Decision encoding: byte `m` holds `family + 1`, 0 for idle.
    fn decide(
        &mut self,
        t: Time,
        machine: usize,
        state: &mut State,
        decision: u64,
        added_flow: u64,
        best: &mut Option<((u64, u64), u64)>,
    ) {
        if machine == self.machines {
            let mut next = state.clone();
            self.normalize(t + 1, &mut next);
            if let Some((flow, disq)) = self.solve_at(t + 1, &next) {
                let total = (flow + added_flow, disq);
                if best.as_ref().is_none_or(|b| self.better(total, b.0)) {
                    *best = Some((total, decision));
                }
            }
            return;
        }
        let m = machine;
        if state.busy[m] <= t {
            for (f, fam) in self.inst.families().iter().enumerate() {
                if state.remaining[f] == 0 || !fam.is_qualified(m) || t + fam.processing > self.horizon {
                    continue;
                }
                let setup = match state.last_family[m] {
                    IDLE => 0,
                    g if g as usize == f => 0,
                    _ => fam.setup,
                };
                if t < state.busy[m] + setup {
                    continue;
                }
                let s = self.slot(f, m);
                let last = state.last_start[s];
                if last == DEAD || t > last + fam.threshold {
                    continue;
                }
                let saved = (state.busy[m], state.last_family[m], last);
                state.busy[m] = t + fam.processing;
                state.last_family[m] = f as u8;
                state.last_start[s] = t;
                state.remaining[f] -= 1;
                let code = decision | ((f as u64 + 1) << (8 * m));
                self.decide(t, m + 1, state, code, added_flow + u64::from(t + fam.processing), best);
                state.remaining[f] += 1;
                (state.busy[m], state.last_family[m], state.last_start[s]) = saved;
            }
        }
        self.decide(t, m + 1, state, decision, added_flow, best);
    }

    fn apply(&self, t: Time, state: &mut State, decision: u64, out: &mut Vec<(usize, usize, Time)>) {
        for m in 0..self.machines {
            let code = (decision >> (8 * m)) & 0xff;
            if code == 0 {
                continue;
            }
            let f = code as usize - 1;
            let fam = self.inst.family(f);
            state.busy[m] = t + fam.processing;
            state.last_family[m] = f as u8;
            state.last_start[self.slot(f, m)] = t;
            state.remaining[f] -= 1;
            out.push((f, m, t));
        }
    }
}

/// Computes a proven optimum under `spec` by exhaustive enumeration.
///
/// Refuses instances beyond `limits` instead of approximating. Hitting the
/// state ceiling or the time limit mid-run yields status `Unknown`.
pub fn enumerate_optimal(
    inst: &Instance,
    spec: &ObjectiveSpec,
    limits: &OracleLimits,
) -> Result<SolveResult, OracleError> {
    let started = Instant::now();
    if inst.job_count() > limits.max_jobs {
        return Err(OracleError::LimitsExceeded {
            what: "jobs",
            value: inst.job_count() as u64,
            limit: limits.max_jobs as u64,
        });
    }
    if inst.horizon() > limits.max_horizon {
        return Err(OracleError::LimitsExceeded {
            what: "horizon",
            value: u64::from(inst.horizon()),
            limit: u64::from(limits.max_horizon),
        });
    }
    assert!(inst.family_count() < IDLE as usize, "family ids must fit in a byte");
    assert!(inst.machine_count() <= 8, "decisions are packed one byte per machine");
    let packing = Packing::new(inst).ok_or(OracleError::LimitsExceeded {
        what: "state bits",
        value: 129,
        limit: 128,
    })?;
    let machines = inst.machine_count();
    let mut oracle = Oracle {
        inst,
        spec: *spec,
        horizon: inst.horizon(),
        machines,
        max_setup: inst.families().iter().map(|f| f.setup).max().unwrap_or(0),
        packing,
        memo: HashMap::default(),
        limits: *limits,
        deadline: limits.time_limit.map(|d| started + d),
        aborted: false,
    };
    let root = State {
        busy: vec![0; machines],
        last_family: vec![IDLE; machines],
        last_start: vec![0; inst.family_count() * machines],
        remaining: inst.families().iter().map(|f| f.jobs).collect(),
    };
    let cost = oracle.solve_at(0, &root);
    let nodes = oracle.memo.len() as u64;
    let mut result = SolveResult::unknown(*spec);
    result.stats = SearchStats {
        nodes,
        wall_time: Duration::ZERO,
        incumbents: Vec::new(),
    };
    if oracle.aborted {
        result.stats.wall_time = started.elapsed();
        return Ok(result);
    }
    match cost {
        None => {
            result.status = SolveStatus::Infeasible;
        }
        Some(_) => {
            let mut placements = Vec::with_capacity(inst.job_count());
            let mut state = root;
            let mut t = 0;
            while state.remaining.iter().any(|&r| r > 0) {
                let key = oracle.packing.pack(t, &state, oracle.horizon);
                let decision = oracle.memo[&key].decision;
                oracle.apply(t, &mut state, decision, &mut placements);
                oracle.normalize(t + 1, &mut state);
                t += 1;
            }
            let schedule =
                Schedule::from_placements(inst, &placements).expect("oracle placements are complete");
            let value: ObjectiveValue =
                evaluate(inst, &schedule, spec).expect("oracle schedules are feasible");
            debug_assert_eq!(Some(spec.key(value.flow_time, value.disq_count)), cost.map(|c| spec.key(c.0, c.1)));
            result.status = SolveStatus::Optimal;
            result.dual_bound = Some(value.key());
            result.stats.incumbents.push(IncumbentEvent {
                elapsed: started.elapsed(),
                key: value.key(),
                nodes,
            });
            result.objective = Some(value);
            result.schedule = Some(schedule);
        }
    }
    result.stats.wall_time = started.elapsed();
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Family;

    fn family(jobs: u32, processing: Time, setup: Time, threshold: Time, qualified: Vec<usize>) -> Family {
        Family { jobs, processing, setup, threshold, qualified }
    }

    fn solve(inst: &Instance, spec: ObjectiveSpec) -> SolveResult {
        enumerate_optimal(inst, &spec, &OracleLimits::default()).unwrap()
    }

    #[test]
    fn single_family_back_to_back() {
        let inst = Instance::new(1, vec![family(2, 2, 1, 10, vec![0])]).unwrap();
        let r = solve(&inst, ObjectiveSpec::flow_only());
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.objective.unwrap().flow_time, 6);
    }

    #[test]
    fn threshold_shorter_than_processing_always_loses() {
        // T = 3, the job can only start at 0; 0 + 2 < 3.
        let inst = Instance::new(1, vec![family(1, 3, 0, 2, vec![0])]).unwrap();
        let r = solve(&inst, ObjectiveSpec::lex_disq_then_flow());
        let v = r.objective.unwrap();
        assert_eq!((v.disq_count, v.flow_time), (1, 3));
        // With a setup the horizon grows to 4, and a late start still loses.
        let inst = Instance::new(1, vec![family(1, 3, 1, 2, vec![0])]).unwrap();
        let v = solve(&inst, ObjectiveSpec::lex_disq_then_flow()).objective.unwrap();
        assert_eq!((v.disq_count, v.flow_time), (1, 3));
    }

    #[test]
    fn second_family_pays_setup() {
        let inst = Instance::new(
            1,
            vec![family(1, 1, 1, 5, vec![0]), family(1, 1, 1, 5, vec![0])],
        )
        .unwrap();
        let r = solve(&inst, ObjectiveSpec::flow_only());
        assert_eq!(r.objective.unwrap().flow_time, 4);
    }

    #[test]
    fn refuses_large_instances() {
        let inst = Instance::new(1, vec![family(6, 1, 0, 5, vec![0])]).unwrap();
        assert!(matches!(
            enumerate_optimal(&inst, &ObjectiveSpec::flow_only(), &OracleLimits::default()),
            Err(OracleError::LimitsExceeded { what: "jobs", .. })
        ));
        let inst = Instance::new(1, vec![family(2, 20, 0, 50, vec![0])]).unwrap();
        assert!(matches!(
            enumerate_optimal(&inst, &ObjectiveSpec::flow_only(), &OracleLimits::default()),
            Err(OracleError::LimitsExceeded { what: "horizon", .. })
        ));
    }

    #[test]
    fn proven_infeasible() {
        // Two jobs on one machine, threshold 1: the second start (>= 3) is
        // more than 1 after the first (>= 0).
        let inst = Instance::new(1, vec![family(2, 3, 0, 1, vec![0])]).unwrap();
        let r = solve(&inst, ObjectiveSpec::flow_only());
        assert_eq!(r.status, SolveStatus::Infeasible);
        assert!(r.schedule.is_none());
    }
}
