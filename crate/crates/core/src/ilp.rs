//! Time-indexed family-based integer program, written in CPLEX LP format.
//!
//! Variables exist only for qualified `(family, machine)` pairs:
//!
//! * `x_f{f}_m{m}_t{t}`: a job of `f` starts on `m` at `t`, for `t <= T - p_f`
//! * `y_f{f}_m{m}_t{t}`: `m` is disqualified for `f` at `t`, for `t < T`
//! * `Y_f{f}_m{m}`: the disqualification happens before the makespan
//! * `C_f{f}`: total completion time of `f` (continuous)
//!
//! Indices in names are 1-based. Rows come in seven groups:
//!
//! | group | meaning |
//! |---|---|
//! | `jobs` | every job of the family starts once |
//! | `compl` | `C_f` covers the completion times |
//! | `setup` | no `f` job may end within `s_g` before a `g` job starts |
//! | `busy` | one `f` job at a time, and only while qualified |
//! | `disq` | no `f` start during `(t - gamma_f, t]` disqualifies at `t` |
//! | `keep` | disqualification persists |
//! | `tail` | a disqualification counts if jobs run after it |
//!
//! The `tail` rows carry a `1 / (M (T - t))` factor on the job count. They are
//! written multiplied through by `M (T - t)` so every coefficient stays an
//! exact integer.
//!
//! The model assumes every threshold is at least the longest processing
//! time. Below that, `busy` and `disq` rows cut off schedules the validator
//! accepts.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::instance::{Instance, Time};
use crate::objective::{ObjectiveMode, ObjectiveSpec};
use crate::schedule::{compute_disqualifications, Schedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Start { f: usize, m: usize, t: Time },
    Disqualified { f: usize, m: usize, t: Time },
    Lost { f: usize, m: usize },
    Completion { f: usize },
}

impl fmt::Display for Var {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Var::Start { f, m, t } => write!(out, "x_f{}_m{}_t{}", f + 1, m + 1, t),
            Var::Disqualified { f, m, t } => write!(out, "y_f{}_m{}_t{}", f + 1, m + 1, t),
            Var::Lost { f, m } => write!(out, "Y_f{}_m{}", f + 1, m + 1),
            Var::Completion { f } => write!(out, "C_f{}", f + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowGroup {
    Jobs,
    Completion,
    Setup,
    Busy,
    Disqualify,
    Keep,
    Tail,
}

impl RowGroup {
    pub const ALL: [RowGroup; 7] = [
        RowGroup::Jobs,
        RowGroup::Completion,
        RowGroup::Setup,
        RowGroup::Busy,
        RowGroup::Disqualify,
        RowGroup::Keep,
        RowGroup::Tail,
    ];

    fn prefix(self) -> &'static str {
        match self {
            RowGroup::Jobs => "jobs",
            RowGroup::Completion => "compl",
            RowGroup::Setup => "setup",
            RowGroup::Busy => "busy",
            RowGroup::Disqualify => "disq",
            RowGroup::Keep => "keep",
            RowGroup::Tail => "tail",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub group: RowGroup,
    pub name: String,
    pub terms: Vec<(i64, Var)>,
    pub sense: Sense,
    pub rhs: i64,
}

impl Row {
    fn holds(&self, value: impl Fn(Var) -> i64) -> bool {
        let lhs: i64 = self.terms.iter().map(|&(c, v)| c * value(v)).sum();
        match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Ge => lhs >= self.rhs,
            Sense::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Model {
    pub horizon: Time,
    pub objective: Vec<(i64, Var)>,
    pub rows: Vec<Row>,
    pub binaries: Vec<Var>,
    pub continuous: Vec<Var>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IlpError {
    #[error("the integer program uses a weighted objective, got {0}")]
    NotWeighted(ObjectiveSpec),
    #[error("horizon {horizon} exceeds the time-indexed cap of {cap}")]
    HorizonTooLarge { horizon: Time, cap: Time },
}

/// Largest horizon accepted by [`export_ip3`].
pub const DEFAULT_HORIZON_CAP: Time = 5_000;

/// Model sizes: the closed-form bounds over all pairs and the exact counts
/// of what is emitted for qualified pairs only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IlpModelSummary {
    pub horizon: Time,
    /// `F M (2T + 1)`.
    pub variable_bound: u64,
    /// `2F + T M (4F + F^2)`.
    pub constraint_bound: u64,
    pub start_vars: u64,
    pub disq_vars: u64,
    pub lost_vars: u64,
    pub completion_vars: u64,
    /// Emitted rows per group, in [`RowGroup::ALL`] order.
    pub rows: [u64; 7],
}

impl IlpModelSummary {
    pub fn variable_count(&self) -> u64 {
        self.start_vars + self.disq_vars + self.lost_vars + self.completion_vars
    }

    pub fn constraint_count(&self) -> u64 {
        self.rows.iter().sum()
    }
}

fn last_start(inst: &Instance, f: usize) -> Option<Time> {
    inst.horizon().checked_sub(inst.family(f).processing)
}

fn qualified_pairs(inst: &Instance) -> impl Iterator<Item = (usize, usize)> + '_ {
    inst.families()
        .iter()
        .enumerate()
        .flat_map(|(f, fam)| fam.qualified.iter().map(move |&m| (f, m)))
}

/// Closed-form sizes, consistent with [`build_model`].
pub fn model_counts(inst: &Instance) -> IlpModelSummary {
    let t = u64::from(inst.horizon());
    let (f_count, m_count) = (inst.family_count() as u64, inst.machine_count() as u64);
    let starts = |f: usize| last_start(inst, f).map_or(0, |l| u64::from(l) + 1);
    let pairs: Vec<(usize, usize)> = qualified_pairs(inst).collect();
    let mut rows = [0u64; 7];
    rows[0] = f_count;
    rows[1] = f_count;
    for f in 0..inst.family_count() {
        for g in (0..inst.family_count()).filter(|&g| g != f) {
            let shared = inst.family(f).qualified.iter().filter(|&&m| inst.family(g).is_qualified(m)).count();
            rows[2] += shared as u64 * starts(g);
        }
    }
    rows[3] = pairs.len() as u64 * t;
    rows[4] = pairs
        .iter()
        .map(|&(f, _)| t.saturating_sub(u64::from(inst.family(f).threshold)))
        .sum();
    rows[5] = pairs.len() as u64 * t.saturating_sub(1);
    rows[6] = rows[5];
    IlpModelSummary {
        horizon: inst.horizon(),
        variable_bound: f_count * m_count * (2 * t + 1),
        constraint_bound: 2 * f_count + t * m_count * (4 * f_count + f_count * f_count),
        start_vars: pairs.iter().map(|&(f, _)| starts(f)).sum(),
        disq_vars: pairs.len() as u64 * t,
        lost_vars: pairs.len() as u64,
        completion_vars: f_count,
        rows,
    }
}

/// Builds the model with objective `sum C_f + beta * sum Y`.
pub fn build_model(inst: &Instance, beta: u64) -> Model {
    let horizon = inst.horizon();
    let machines = inst.machine_count() as i64;
    let x = |f: usize, m: usize, t: Time| Var::Start { f, m, t };
    let y = |f: usize, m: usize, t: Time| Var::Disqualified { f, m, t };
    // Starts of `f` on `m` within `[from, to]`, clipped to existing variables.
    let starts = |f: usize, m: usize, from: i64, to: i64| -> Vec<(i64, Var)> {
        let hi = last_start(inst, f).map_or(-1, i64::from).min(to);
        (from.max(0)..=hi).map(|t| (1, x(f, m, t as Time))).collect()
    };
    let pairs: Vec<(usize, usize)> = qualified_pairs(inst).collect();
    let mut rows = Vec::new();
    let mut push = |group: RowGroup, suffix: String, terms: Vec<(i64, Var)>, sense, rhs| {
        rows.push(Row { group, name: format!("{}_{}", group.prefix(), suffix), terms, sense, rhs });
    };

    for (f, fam) in inst.families().iter().enumerate() {
        let all: Vec<(i64, Var)> = fam.qualified.iter().flat_map(|&m| starts(f, m, 0, i64::from(horizon))).collect();
        push(RowGroup::Jobs, format!("f{}", f + 1), all.clone(), Sense::Eq, i64::from(fam.jobs));
        let mut terms: Vec<(i64, Var)> = all
            .into_iter()
            .map(|(_, v)| match v {
                Var::Start { t, .. } => (i64::from(t + fam.processing), v),
                _ => unreachable!(),
            })
            .collect();
        terms.push((-1, Var::Completion { f }));
        push(RowGroup::Completion, format!("f{}", f + 1), terms, Sense::Le, 0);
    }

    for (f, fam) in inst.families().iter().enumerate() {
        for (g, other) in inst.families().iter().enumerate() {
            if g == f {
                continue;
            }
            let n = i64::from(fam.jobs);
            for &m in fam.qualified.iter().filter(|&&m| other.is_qualified(m)) {
                let Some(last) = last_start(inst, g) else { continue };
                for t in 0..=last {
                    let ti = i64::from(t);
                    let mut terms = vec![(n, x(g, m, t))];
                    terms.extend(starts(f, m, ti - i64::from(fam.processing + other.setup) + 1, ti));
                    push(RowGroup::Setup, format!("f{}_g{}_m{}_t{}", f + 1, g + 1, m + 1, t), terms, Sense::Le, n);
                }
            }
        }
    }

    for &(f, m) in &pairs {
        let fam = inst.family(f);
        let tag = |t: Time| format!("f{}_m{}_t{}", f + 1, m + 1, t);
        for t in 0..horizon {
            let ti = i64::from(t);
            let mut terms = vec![(1, y(f, m, t))];
            terms.extend(starts(f, m, ti - i64::from(fam.processing) + 1, ti));
            push(RowGroup::Busy, tag(t), terms, Sense::Le, 1);
        }
        for t in fam.threshold..horizon {
            let ti = i64::from(t);
            let mut terms = vec![(1, y(f, m, t))];
            terms.extend(starts(f, m, ti - i64::from(fam.threshold) + 1, ti));
            push(RowGroup::Disqualify, tag(t), terms, Sense::Ge, 1);
        }
        for t in 1..horizon {
            push(RowGroup::Keep, tag(t), vec![(1, y(f, m, t - 1)), (-1, y(f, m, t))], Sense::Le, 0);
        }
        for t in 1..horizon {
            let ti = i64::from(t);
            let scale = machines * i64::from(horizon - t);
            let mut terms: Vec<(i64, Var)> = qualified_pairs(inst)
                .flat_map(|(g, k)| starts(g, k, ti - i64::from(inst.family(g).processing), i64::from(horizon) - 1))
                .collect();
            terms.push((scale, y(f, m, t - 1)));
            terms.push((-scale, Var::Lost { f, m }));
            push(RowGroup::Tail, tag(t), terms, Sense::Le, scale);
        }
    }

    let beta = i64::try_from(beta).expect("beta fits in i64");
    let mut objective: Vec<(i64, Var)> = (0..inst.family_count()).map(|f| (1, Var::Completion { f })).collect();
    if beta != 0 {
        objective.extend(pairs.iter().map(|&(f, m)| (beta, Var::Lost { f, m })));
    }
    let mut binaries = Vec::new();
    for &(f, m) in &pairs {
        if let Some(last) = last_start(inst, f) {
            binaries.extend((0..=last).map(|t| x(f, m, t)));
        }
    }
    for &(f, m) in &pairs {
        binaries.extend((0..horizon).map(|t| y(f, m, t)));
    }
    binaries.extend(pairs.iter().map(|&(f, m)| Var::Lost { f, m }));
    Model {
        horizon,
        objective,
        rows,
        binaries,
        continuous: (0..inst.family_count()).map(|f| Var::Completion { f }).collect(),
    }
}

const WIDTH: usize = 100;

fn write_terms(out: &mut String, head: &str, terms: &[(i64, Var)]) {
    let mut line = String::from(head);
    for (i, &(c, v)) in terms.iter().enumerate() {
        let term = match (i, c) {
            (0, 1) => format!("{v}"),
            (0, -1) => format!("- {v}"),
            (0, c) => format!("{c} {v}"),
            (_, 1) => format!("+ {v}"),
            (_, -1) => format!("- {v}"),
            (_, c) if c < 0 => format!("- {} {v}", -c),
            (_, c) => format!("+ {c} {v}"),
        };
        if line.len() + term.len() + 1 > WIDTH {
            out.push_str(&line);
            out.push('\n');
            line = String::from("  ");
        }
        line.push(' ');
        line.push_str(&term);
    }
    out.push_str(&line);
}

fn write_vars(out: &mut String, vars: &[Var]) {
    let mut line = String::new();
    for v in vars {
        let name = v.to_string();
        if line.len() + name.len() + 1 > WIDTH {
            out.push_str(&line);
            out.push('\n');
            line.clear();
        }
        line.push(' ');
        line.push_str(&name);
    }
    if !line.is_empty() {
        out.push_str(&line);
        out.push('\n');
    }
}

/// Renders `model` in CPLEX LP format.
pub fn write_lp(model: &Model, title: &str) -> String {
    let mut out = String::new();
    writeln!(out, "\\ {title}").unwrap();
    out.push_str("Minimize\n");
    write_terms(&mut out, " obj:", &model.objective);
    out.push_str("\nSubject To\n");
    for row in &model.rows {
        write_terms(&mut out, &format!(" {}:", row.name), &row.terms);
        let sense = match row.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        writeln!(out, " {sense} {}", row.rhs).unwrap();
    }
    out.push_str("Bounds\n");
    for v in &model.continuous {
        writeln!(out, " {v} >= 0").unwrap();
    }
    out.push_str("Binaries\n");
    write_vars(&mut out, &model.binaries);
    out.push_str("End\n");
    out
}

/// LP text for `inst` under a weighted-sum `spec`.
pub fn export_ip3(inst: &Instance, spec: &ObjectiveSpec, horizon_cap: Time) -> Result<String, IlpError> {
    if spec.mode() != ObjectiveMode::WeightedSum {
        return Err(IlpError::NotWeighted(*spec));
    }
    if inst.horizon() > horizon_cap {
        return Err(IlpError::HorizonTooLarge { horizon: inst.horizon(), cap: horizon_cap });
    }
    let model = build_model(inst, spec.beta());
    let title = format!(
        "time-indexed model: F={} M={} T={} alpha={} beta={}",
        inst.family_count(),
        inst.machine_count(),
        inst.horizon(),
        ObjectiveSpec::ALPHA,
        spec.beta()
    );
    Ok(write_lp(&model, &title))
}

/// A schedule substituted into the model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replay {
    /// Pairs whose `Y` is forced to 1, 0-based.
    pub lost: Vec<(usize, usize)>,
    /// Names of rows the substituted values violate.
    pub violated: Vec<String>,
    /// `C_f` values, i.e. total completion time per family.
    pub completion: Vec<u64>,
}

/// Substitutes `sched` into the model: `x` from the starts, the smallest `y`
/// the disqualification rows allow, the smallest `Y` the tail rows allow,
/// and `C_f` at equality; then checks every row.
pub fn replay(inst: &Instance, sched: &Schedule) -> Replay {
    let model = build_model(inst, 0);
    let horizon = inst.horizon();
    let machines = inst.machine_count();
    let mut starts = vec![false; inst.family_count() * machines * horizon as usize];
    let idx = |f: usize, m: usize, t: Time| (f * machines + m) * horizon as usize + t as usize;
    let mut completion = vec![0u64; inst.family_count()];
    let mut last = vec![0 as Time; inst.family_count() * machines];
    for a in sched.assignments() {
        let f = inst.family_of(a.job).expect("job in range");
        if a.start < horizon {
            starts[idx(f, a.machine, a.start)] = true;
        }
        completion[f] += u64::from(a.start + inst.family(f).processing);
        let slot = &mut last[f * machines + a.machine];
        *slot = (*slot).max(a.start);
    }
    // Disqualified from the first instant with no start in the trailing
    // threshold window, counting the virtual start at 0.
    let onset = |f: usize, m: usize| -> Time {
        let gamma = inst.family(f).threshold;
        (gamma..horizon)
            .find(|&t| (t + 1 - gamma..=t).all(|tau| !starts[idx(f, m, tau)]))
            .unwrap_or(horizon)
    };
    let onsets: Vec<Time> = (0..inst.family_count() * machines)
        .map(|s| {
            let (f, m) = (s / machines, s % machines);
            if inst.family(f).is_qualified(m) { onset(f, m) } else { horizon }
        })
        .collect();
    let y_value = |f: usize, m: usize, t: Time| i64::from(t >= onsets[f * machines + m]);
    let base = |v: Var| -> i64 {
        match v {
            Var::Start { f, m, t } => i64::from(starts[idx(f, m, t)]),
            Var::Disqualified { f, m, t } => y_value(f, m, t),
            Var::Lost { .. } => 0,
            Var::Completion { f } => completion[f] as i64,
        }
    };
    let mut lost = Vec::new();
    for row in model.rows.iter().filter(|r| r.group == RowGroup::Tail) {
        let pair = row.terms.iter().find_map(|&(_, v)| match v {
            Var::Lost { f, m } => Some((f, m)),
            _ => None,
        });
        if !row.holds(base) {
            lost.extend(pair);
        }
    }
    lost.sort_unstable();
    lost.dedup();
    let value = |v: Var| match v {
        Var::Lost { f, m } => i64::from(lost.contains(&(f, m))),
        _ => base(v),
    };
    let violated = model.rows.iter().filter(|r| !r.holds(value)).map(|r| r.name.clone()).collect();
    debug_assert!(last.len() == inst.family_count() * machines);
    Replay { lost, violated, completion }
}

/// Pairs the validator reports lost, for comparison with [`replay`].
pub fn validator_losses(inst: &Instance, sched: &Schedule) -> Option<Vec<(usize, usize)>> {
    let report = compute_disqualifications(inst, sched).ok()?;
    let mut out: Vec<(usize, usize)> = report.lost().map(|(f, m, _)| (f, m)).collect();
    out.sort_unstable();
    Some(out)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::instance::Family;
    use crate::schedule::tests::{build, example, solution_a, solution_b};
    use std::collections::HashSet;

    /// Minimal reader for the LP subset written above. Returns row names and
    /// the set of declared binaries, or an error describing the first
    /// grammar problem.
    pub(crate) fn parse_lp(text: &str) -> Result<(Vec<String>, HashSet<String>), String> {
        #[derive(PartialEq)]
        enum Section {
            Start,
            Objective,
            Rows,
            Bounds,
            Binaries,
            End,
        }
        let mut section = Section::Start;
        let mut rows = Vec::new();
        let mut binaries = HashSet::new();
        let mut statement = String::new();
        let is_name = |s: &str| {
            !s.is_empty()
                && s.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        };
        let check_expr = |expr: &str| -> Result<(), String> {
            let tokens: Vec<&str> = expr.split_whitespace().collect();
            let mut expect_var = false;
            let mut first = true;
            for tok in tokens {
                if tok == "+" || tok == "-" {
                    if expect_var {
                        return Err(format!("sign after coefficient in `{expr}`"));
                    }
                    first = false;
                    continue;
                }
                if tok.parse::<i64>().is_ok() {
                    expect_var = true;
                    continue;
                }
                if !is_name(tok) {
                    return Err(format!("bad token `{tok}`"));
                }
                let _ = first;
                expect_var = false;
            }
            if expect_var {
                return Err(format!("dangling coefficient in `{expr}`"));
            }
            Ok(())
        };
        let mut finish = |section: &Section, statement: &mut String| -> Result<(), String> {
            let s = std::mem::take(statement);
            if s.trim().is_empty() {
                return Ok(());
            }
            let (name, body) = s.split_once(':').ok_or_else(|| format!("unnamed statement `{s}`"))?;
            let name = name.trim();
            if !is_name(name) {
                return Err(format!("bad row name `{name}`"));
            }
            match section {
                Section::Objective => check_expr(body),
                Section::Rows => {
                    let (lhs, rhs) = ["<=", ">=", "="]
                        .iter()
                        .find_map(|op| body.split_once(op))
                        .ok_or_else(|| format!("row `{name}` has no sense"))?;
                    check_expr(lhs)?;
                    rhs.trim().parse::<i64>().map_err(|_| format!("row `{name}` rhs `{rhs}`"))?;
                    rows.push(name.to_string());
                    Ok(())
                }
                _ => Err("statement outside a section".into()),
            }
        };
        for line in text.lines() {
            if line.starts_with('\\') {
                continue;
            }
            let header = match line.trim() {
                "Minimize" => Some(Section::Objective),
                "Subject To" => Some(Section::Rows),
                "Bounds" => Some(Section::Bounds),
                "Binaries" => Some(Section::Binaries),
                "End" => Some(Section::End),
                _ => None,
            };
            if let Some(next) = header {
                finish(&section, &mut statement)?;
                section = next;
                continue;
            }
            match section {
                Section::Objective | Section::Rows => {
                    if !line.starts_with("  ") && !statement.is_empty() {
                        finish(&section, &mut statement)?;
                    }
                    statement.push_str(line);
                    statement.push(' ');
                }
                Section::Bounds => {
                    let parts: Vec<&str> = line.split_whitespace().collect();
                    if parts.len() != 3 || !is_name(parts[0]) || parts[1] != ">=" {
                        return Err(format!("bad bound `{line}`"));
                    }
                }
                Section::Binaries => {
                    for name in line.split_whitespace() {
                        if !is_name(name) {
                            return Err(format!("bad binary `{name}`"));
                        }
                        binaries.insert(name.to_string());
                    }
                }
                Section::Start | Section::End => return Err(format!("text outside sections: `{line}`")),
            }
        }
        if section != Section::End {
            return Err("missing End".into());
        }
        Ok((rows, binaries))
    }

    #[test]
    fn example_counts() {
        let inst = example();
        let s = model_counts(&inst);
        assert_eq!(s.variable_bound, 714);
        assert_eq!(s.constraint_bound, 2484);
        assert_eq!((s.start_vars, s.disq_vars, s.lost_vars, s.completion_vars), (277, 295, 5, 3));
        assert_eq!(s.variable_count(), 580);
        assert_eq!(s.rows, [3, 3, 441, 295, 176, 290, 290]);
        assert_eq!(s.constraint_count(), 1498);
    }

    #[test]
    fn counts_match_emitted_model() {
        let inst = example();
        let model = build_model(&inst, 1);
        let s = model_counts(&inst);
        for (i, group) in RowGroup::ALL.iter().enumerate() {
            assert_eq!(model.rows.iter().filter(|r| r.group == *group).count() as u64, s.rows[i]);
        }
        assert_eq!(model.binaries.len() as u64 + model.continuous.len() as u64, s.variable_count());
    }

    #[test]
    fn smallest_instance() {
        let inst = Instance::new(
            1,
            vec![Family { jobs: 1, processing: 1, setup: 0, threshold: 1, qualified: vec![0] }],
        )
        .unwrap();
        assert_eq!(model_counts(&inst).variable_bound, 3);
        let lp = export_ip3(&inst, &ObjectiveSpec::weighted_flow_priority(), DEFAULT_HORIZON_CAP).unwrap();
        assert!(lp.contains(" jobs_f1: x_f1_m1_t0 = 1\n"), "{lp}");
        let (rows, _) = parse_lp(&lp).unwrap();
        assert_eq!(rows.iter().filter(|r| r.starts_with("jobs_")).count(), 1);
    }

    #[test]
    fn example_file_parses() {
        let inst = example();
        let spec = ObjectiveSpec::weighted_disq_priority(&inst);
        let lp = export_ip3(&inst, &spec, DEFAULT_HORIZON_CAP).unwrap();
        let (rows, binaries) = parse_lp(&lp).unwrap();
        assert_eq!(rows.len(), 1498);
        assert_eq!(binaries.len(), 577);
        assert!(lp.contains("+ 590 Y_f1_m2"));
        assert!(lp.lines().all(|l| l.len() <= WIDTH + 40));
        assert!(!lp.contains("x_f1_m1_"), "family 1 is not qualified on machine 1");
    }

    #[test]
    fn refuses_non_weighted_and_large() {
        let inst = example();
        assert!(matches!(
            export_ip3(&inst, &ObjectiveSpec::flow_only(), DEFAULT_HORIZON_CAP),
            Err(IlpError::NotWeighted(_))
        ));
        assert_eq!(
            export_ip3(&inst, &ObjectiveSpec::weighted_flow_priority(), 10),
            Err(IlpError::HorizonTooLarge { horizon: 59, cap: 10 })
        );
    }

    #[test]
    fn replay_of_example_solutions() {
        let inst = example();
        let a = build(&inst, &solution_a());
        let r = replay(&inst, &a);
        assert!(r.violated.is_empty(), "{:?}", r.violated);
        assert_eq!(r.lost, vec![(1, 1), (2, 0), (2, 1)]);
        assert_eq!(Some(r.lost), validator_losses(&inst, &a));
        assert_eq!(r.completion.iter().sum::<u64>(), 114);
        let b = build(&inst, &solution_b());
        let r = replay(&inst, &b);
        assert!(r.violated.is_empty(), "{:?}", r.violated);
        assert!(r.lost.is_empty());
        assert_eq!(r.completion.iter().sum::<u64>(), 159);
    }

    #[test]
    fn replay_flags_overlaps() {
        let inst = example();
        let mut placements = solution_a();
        let moved = placements.iter().position(|&p| p == (2, 1, 9)).unwrap();
        placements[moved] = (2, 1, 14);
        let r = replay(&inst, &build(&inst, &placements));
        assert!(r.violated.iter().any(|n| n.starts_with("setup_") || n.starts_with("busy_")));
    }
}
