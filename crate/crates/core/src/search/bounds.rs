//! Admissible lower bounds for partial schedules.

use crate::instance::{Instance, Time};
use crate::objective::ObjectiveSpec;

use super::state::{pairs, SearchState};

/// Machines that can still take a job of `f`.
fn usable<'a>(inst: &'a Instance, s: &'a SearchState, f: usize) -> impl Iterator<Item = usize> + 'a {
    let fam = inst.family(f);
    fam.qualified
        .iter()
        .copied()
        .filter(move |&m| s.remaining(f) > 0 && s.window(inst, f, m).is_some())
}

/// Earliest time each machine could start any pending job, or `None` for
/// machines no pending family can use.
fn ready_times(inst: &Instance, s: &SearchState) -> Vec<Option<Time>> {
    let mut ready = vec![None; inst.machine_count()];
    for f in 0..inst.family_count() {
        for m in usable(inst, s, f) {
            let t = s.time().max(s.machine_end(m) + s.setup(inst, f, m));
            ready[m] = Some(ready[m].map_or(t, |r: Time| r.min(t)));
        }
    }
    ready
}

/// Smallest `c` with `sum max(0, c - a)` over `ready` at least `work`.
fn fill_time(ready: &[Time], work: u64) -> Time {
    let lo = ready.iter().copied().min().expect("at least one machine");
    let capacity = |c: Time| ready.iter().map(|&a| u64::from(c.saturating_sub(a))).sum::<u64>();
    let (mut lo, mut hi) = (lo, lo + Time::try_from(work).unwrap_or(Time::MAX - lo));
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if capacity(mid) >= work {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Lower bound on the makespan of every completion of `s`, or `None` if some
/// pending family has no machine left.
pub fn cmax_lower_bound(inst: &Instance, s: &SearchState) -> Option<Time> {
    let machines = inst.machine_count();
    let done = (0..machines).map(|m| s.machine_end(m)).max().unwrap_or(0);
    if s.is_complete() {
        return Some(done);
    }
    let ready = ready_times(inst, s);
    let sets: Vec<(usize, Vec<usize>)> = (0..inst.family_count())
        .filter(|&f| s.remaining(f) > 0)
        .map(|f| (f, usable(inst, s, f).collect()))
        .collect();
    if sets.iter().any(|(_, ms)| ms.is_empty()) {
        return None;
    }
    let mut lb = done.max(s.time() + 1);
    // Work whose machines all lie in one family's machine set must finish
    // on that set.
    let all: Vec<usize> = (0..machines).filter(|&m| ready[m].is_some()).collect();
    let groups = sets.iter().map(|(_, ms)| ms.clone()).chain(std::iter::once(all));
    for group in groups {
        let work: u64 = sets
            .iter()
            .filter(|(_, ms)| ms.iter().all(|m| group.contains(m)))
            .map(|&(f, _)| u64::from(s.remaining(f)) * u64::from(inst.family(f).processing))
            .sum();
        let group_ready: Vec<Time> = group.iter().map(|&m| ready[m].expect("usable")).collect();
        lb = lb.max(fill_time(&group_ready, work));
    }
    for (f, ms) in &sets {
        let first = ms.iter().map(|&m| ready[m].expect("usable")).min().expect("non-empty");
        lb = lb.max(first + inst.family(*f).processing);
    }
    Some(lb)
}

/// Flow time so far plus the optimal total completion time of the pending
/// jobs on identical machines released at their ready times, ignoring
/// qualifications, windows and setups after the first job.
pub fn flow_lower_bound(inst: &Instance, s: &SearchState) -> u64 {
    if s.is_complete() {
        return s.flow();
    }
    let mut free: Vec<Time> = ready_times(inst, s).into_iter().flatten().collect();
    if free.is_empty() {
        return s.flow();
    }
    let mut jobs: Vec<Time> = (0..inst.family_count())
        .flat_map(|f| std::iter::repeat_n(inst.family(f).processing, s.remaining(f) as usize))
        .collect();
    jobs.sort_unstable();
    let mut total = s.flow();
    for p in jobs {
        let m = (0..free.len()).min_by_key(|&m| free[m]).expect("non-empty");
        free[m] += p;
        total += u64::from(free[m]);
    }
    total
}

/// Pairs that are lost in every completion of `s`, given that the makespan
/// reaches at least `cmax_lb`.
pub fn disq_lower_bound(inst: &Instance, s: &SearchState, cmax_lb: Time) -> u64 {
    let mut lost = 0;
    let mut needs: Vec<Vec<u32>> = vec![Vec::new(); inst.family_count()];
    for (f, m) in pairs(inst) {
        let Some(last) = s.last_start(inst, f, m) else {
            lost += 1;
            continue;
        };
        let gamma = inst.family(f).threshold;
        let deadline = last + gamma;
        if deadline >= cmax_lb {
            continue;
        }
        if s.window(inst, f, m).is_none() {
            lost += 1;
            continue;
        }
        // Each further start extends the window by at most `gamma`.
        needs[f].push((cmax_lb - deadline).div_ceil(gamma.max(1)));
    }
    for (f, mut k) in needs.into_iter().enumerate() {
        k.sort_unstable();
        let mut budget = s.remaining(f);
        for need in k {
            if need <= budget {
                budget -= need;
            } else {
                lost += 1;
            }
        }
    }
    lost
}

/// Bound in objective-key space, or `None` if `s` has no completion.
pub fn bound_key(inst: &Instance, s: &SearchState, spec: &ObjectiveSpec) -> Option<(u64, u64)> {
    if s.is_complete() {
        let (_, flow, disq) = s.completion(inst);
        return Some(spec.key(flow, disq));
    }
    let cmax_lb = cmax_lower_bound(inst, s)?;
    let flow = flow_lower_bound(inst, s);
    let disq = match spec.mode() {
        crate::objective::ObjectiveMode::FlowOnly => 0,
        _ => disq_lower_bound(inst, s, cmax_lb),
    };
    Some(spec.key(flow, disq))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Family;
    use crate::schedule::tests::example;

    #[test]
    fn root_bounds_on_example() {
        let inst = example();
        let root = SearchState::root(&inst);
        // Family 1 only runs on machine 2: 27 units of work.
        assert_eq!(cmax_lower_bound(&inst, &root), Some(27));
        assert_eq!(disq_lower_bound(&inst, &root, 27), 0);
        let flow = flow_lower_bound(&inst, &root);
        assert!(flow <= 114);
        // SPT of 1,1,1,1,6,6,6,9,9,9 on two machines.
        assert_eq!(flow, 1 + 1 + 2 + 2 + 8 + 8 + 14 + 17 + 23 + 26);
    }

    #[test]
    fn early_family_three_is_lost_against_remaining_work() {
        let inst = example();
        let s = [(2, 0, 0), (2, 1, 0), (2, 0, 1), (2, 1, 1)]
            .into_iter()
            .try_fold(SearchState::root(&inst), |s, p| s.place(&inst, p))
            .unwrap();
        let cmax = cmax_lower_bound(&inst, &s).unwrap();
        assert!(cmax >= 28, "{cmax}");
        assert_eq!(disq_lower_bound(&inst, &s, cmax), 2);
    }

    #[test]
    fn counting_bound_limits_refreshes() {
        // One pending job cannot refresh two machines.
        let inst = Instance::new(
            2,
            vec![
                Family { jobs: 1, processing: 1, setup: 1, threshold: 2, qualified: vec![0, 1] },
                Family { jobs: 2, processing: 10, setup: 1, threshold: 50, qualified: vec![0, 1] },
            ],
        )
        .unwrap();
        let root = SearchState::root(&inst);
        assert_eq!(cmax_lower_bound(&inst, &root), Some(11));
        assert_eq!(disq_lower_bound(&inst, &root, 11), 2);
        assert_eq!(disq_lower_bound(&inst, &root, 3), 1);
    }

    #[test]
    fn fill_time_levels_machines() {
        assert_eq!(fill_time(&[0, 0], 5), 3);
        assert_eq!(fill_time(&[0, 10], 5), 5);
        assert_eq!(fill_time(&[0, 2], 6), 4);
        assert_eq!(fill_time(&[3], 0), 3);
    }
}
