//! Exact branch-and-bound over start-ordered partial schedules.
//!
//! Nodes are explored best bound first, deeper nodes first on ties, so an
//! incumbent appears quickly. Partial schedules that reach an identical
//! state with no less flow time are discarded. Weighted and lexicographic
//! objectives share one search: bounds live in the same key space as
//! objective values.

mod bounds;
mod state;

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::rc::Rc;
use std::time::{Duration, Instant};

use thiserror::Error;

pub use bounds::{bound_key, cmax_lower_bound, disq_lower_bound, flow_lower_bound};
pub use state::{CandidatePolicy, Placement, SearchState, LOST};

use crate::heuristics::{construct, HeuristicConfig, HeuristicKind};
use crate::instance::Instance;
use crate::objective::ObjectiveSpec;
use crate::schedule::{evaluate, Schedule, ScheduleError};
use crate::solve::{IncumbentEvent, SearchStats, SolveResult, SolveStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum NodeOrder {
    #[default]
    BestFirst,
    DepthFirst,
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub time_limit: Option<Duration>,
    pub node_limit: Option<u64>,
    /// Initial incumbent supplied by the caller.
    pub warm_start: Option<Schedule>,
    /// Seed the incumbent with both constructive heuristics.
    pub heuristic_warm_start: bool,
    pub candidates: CandidatePolicy,
    pub order: NodeOrder,
    /// Entries kept for the dominance check; 0 disables it.
    pub memo_limit: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            time_limit: None,
            node_limit: None,
            warm_start: None,
            heuristic_warm_start: true,
            candidates: CandidatePolicy::FullGrid,
            order: NodeOrder::BestFirst,
            memo_limit: 4_000_000,
        }
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("warm start rejected: {0}")]
    WarmStart(#[from] ScheduleError),
}

struct Trail {
    placement: Placement,
    parent: Option<Rc<Trail>>,
}

fn unwind(mut trail: Option<&Rc<Trail>>) -> Vec<Placement> {
    let mut out = Vec::new();
    while let Some(t) = trail {
        out.push(t.placement);
        trail = t.parent.as_ref();
    }
    out.reverse();
    out
}

struct Node {
    bound: (u64, u64),
    depth: u32,
    seq: u64,
    state: SearchState,
    trail: Option<Rc<Trail>>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // Max-heap: smallest bound, then deepest, then newest on top.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(self.seq.cmp(&other.seq))
    }
}

enum Frontier {
    Heap(BinaryHeap<Node>),
    Stack(Vec<Node>),
}

impl Frontier {
    fn pop(&mut self) -> Option<Node> {
        match self {
            Frontier::Heap(h) => h.pop(),
            Frontier::Stack(s) => s.pop(),
        }
    }

    /// Children must arrive best first.
    fn extend(&mut self, nodes: Vec<Node>) {
        match self {
            Frontier::Heap(h) => h.extend(nodes),
            Frontier::Stack(s) => s.extend(nodes.into_iter().rev()),
        }
    }

    fn min_bound(&self) -> Option<(u64, u64)> {
        match self {
            Frontier::Heap(h) => h.peek().map(|n| n.bound),
            Frontier::Stack(s) => s.iter().map(|n| n.bound).min(),
        }
    }
}

struct Incumbent {
    key: (u64, u64),
    placements: Option<Vec<Placement>>,
    schedule: Option<Schedule>,
}

/// Solves `inst` under `spec`, to optimality unless a limit is hit.
pub fn solve(
    inst: &Instance,
    spec: &ObjectiveSpec,
    config: &SearchConfig,
) -> Result<SolveResult, SearchError> {
    let started = Instant::now();
    let deadline = config.time_limit.map(|d| started + d);
    let mut stats = SearchStats::default();
    let mut best: Option<Incumbent> = None;
    let offer = |schedule: Schedule, stats: &mut SearchStats, best: &mut Option<Incumbent>| {
        let value = evaluate(inst, &schedule, spec)?;
        if best.as_ref().is_none_or(|b| value.key() < b.key) {
            stats.incumbents.push(IncumbentEvent {
                elapsed: started.elapsed(),
                key: value.key(),
                nodes: stats.nodes,
            });
            *best = Some(Incumbent {
                key: value.key(),
                placements: None,
                schedule: Some(schedule),
            });
        }
        Ok::<_, ScheduleError>(())
    };
    if let Some(warm) = &config.warm_start {
        offer(warm.clone(), &mut stats, &mut best)?;
    }
    if config.heuristic_warm_start {
        for kind in [HeuristicKind::SchedulingCentric, HeuristicKind::QualificationCentric] {
            if let Ok(schedule) = construct(inst, &HeuristicConfig { kind }) {
                offer(schedule, &mut stats, &mut best).expect("heuristic schedules are feasible");
            }
        }
    }

    let mut memo: HashMap<Box<[u32]>, u64> = HashMap::new();
    let mut frontier = match config.order {
        NodeOrder::BestFirst => Frontier::Heap(BinaryHeap::new()),
        NodeOrder::DepthFirst => Frontier::Stack(Vec::new()),
    };
    let root = SearchState::root(inst);
    if let Some(bound) = bound_key(inst, &root, spec) {
        frontier.extend(vec![Node { bound, depth: 0, seq: 0, state: root, trail: None }]);
    }
    let mut seq = 1u64;
    let mut aborted = false;
    while let Some(node) = frontier.pop() {
        if best.as_ref().is_some_and(|b| node.bound >= b.key) {
            continue;
        }
        if config.memo_limit > 0 {
            if let Some(&flow) = memo.get(&node.state.memo_key(inst)) {
                if flow < node.state.flow() {
                    continue;
                }
            }
        }
        let over_time = stats.nodes % 64 == 0 && deadline.is_some_and(|d| Instant::now() >= d);
        if over_time || config.node_limit.is_some_and(|l| stats.nodes >= l) {
            frontier.extend(vec![node]);
            aborted = true;
            break;
        }
        stats.nodes += 1;
        let mut children = Vec::new();
        for (placement, child) in node.state.expand(inst, config.candidates) {
            let Some(bound) = bound_key(inst, &child, spec) else {
                continue;
            };
            if best.as_ref().is_some_and(|b| bound >= b.key) {
                continue;
            }
            let trail = Some(Rc::new(Trail { placement, parent: node.trail.clone() }));
            if child.is_complete() {
                stats.incumbents.push(IncumbentEvent {
                    elapsed: started.elapsed(),
                    key: bound,
                    nodes: stats.nodes,
                });
                best = Some(Incumbent {
                    key: bound,
                    placements: Some(unwind(trail.as_ref())),
                    schedule: None,
                });
                continue;
            }
            if config.memo_limit > 0 {
                let key = child.memo_key(inst);
                let full = memo.len() >= config.memo_limit;
                match memo.get_mut(&key) {
                    Some(flow) if *flow <= child.flow() => continue,
                    Some(flow) => *flow = child.flow(),
                    None if !full => {
                        memo.insert(key, child.flow());
                    }
                    None => {}
                }
            }
            children.push(Node { bound, depth: node.depth + 1, seq, state: child, trail });
            seq += 1;
        }
        children.sort_by(|a, b| b.cmp(a));
        frontier.extend(children);
    }

    stats.wall_time = started.elapsed();
    let open = if aborted { frontier.min_bound() } else { None };
    let mut result = SolveResult::unknown(*spec);
    match best {
        Some(b) => {
            let schedule = match (b.schedule, b.placements) {
                (Some(s), _) => s,
                (None, Some(p)) => Schedule::from_placements(inst, &p).expect("complete placement"),
                (None, None) => unreachable!("incumbent without schedule"),
            };
            let value = evaluate(inst, &schedule, spec).expect("search schedules are feasible");
            debug_assert_eq!(value.key(), b.key);
            result.status = if aborted { SolveStatus::Feasible } else { SolveStatus::Optimal };
            result.dual_bound = Some(open.map_or(b.key, |o| o.min(b.key)));
            result.objective = Some(value);
            result.schedule = Some(schedule);
        }
        None if aborted => {
            result.dual_bound = open;
        }
        None => {
            result.status = SolveStatus::Infeasible;
        }
    }
    result.stats = stats;
    Ok(result)
}
