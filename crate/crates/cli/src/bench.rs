//! Benchmark campaigns: every solver on every instance of a directory, with
//! indicator tables grouped by instance size.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use ptc_core::{evaluate, Instance, ObjectiveMode, ObjectiveSpec, SolveStatus};
use rayon::prelude::*;
use serde::Serialize;

use crate::solvers::{run_solver, ObjectiveArg, SolverKind};

/// Fraction of the time limit a solver may overrun before its run is
/// discarded.
pub const GRACE: f64 = 0.05;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub solvers: Vec<SolverKind>,
    pub objective: ObjectiveArg,
    pub time_limit: Duration,
    /// Worker threads; `None` lets rayon decide.
    pub threads: Option<usize>,
}

/// One solver on one instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub instance: String,
    pub jobs: usize,
    pub solver: SolverKind,
    pub status: String,
    pub solved: bool,
    pub optimal: bool,
    pub vbs: bool,
    /// Reported objective matched the re-evaluated schedule.
    pub consistent: bool,
    pub flow: Option<u64>,
    pub disq: Option<u64>,
    pub obj: Option<u64>,
    /// Comparison key under the run's objective.
    #[serde(skip)]
    pub key: Option<(u64, u64)>,
    pub time: f64,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub solver: SolverKind,
    pub group: String,
    pub instances: usize,
    pub pct_sol: f64,
    pub pct_opt: f64,
    pub pct_vbs: f64,
    pub avg_disq: Option<f64>,
    pub avg_obj: Option<f64>,
    pub avg_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub objective: ObjectiveArg,
    pub time_limit: f64,
    pub solvers: Vec<SolverKind>,
    pub rows: Vec<SummaryRow>,
    pub records: Vec<RunRecord>,
}

/// Instance files of `dir` (every `*.json`), sorted by name.
pub fn load_dir(dir: &Path) -> Result<Vec<(String, Instance)>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("cannot read directory {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    paths.retain(|p| p.is_file() && p.extension().is_some_and(|e| e == "json"));
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let text = std::fs::read_to_string(&p).with_context(|| format!("cannot read {}", p.display()))?;
            let inst = Instance::from_json(&text).with_context(|| format!("invalid instance {}", p.display()))?;
            let name = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            Ok((name, inst))
        })
        .collect()
}

pub fn run_benchmark(dir: &Path, config: &BenchConfig) -> Result<BenchReport> {
    let instances = load_dir(dir)?;
    if instances.is_empty() {
        eprintln!("warning: no instance files in {}", dir.display());
    }
    run_instances(&instances, config)
}

pub fn run_instances(instances: &[(String, Instance)], config: &BenchConfig) -> Result<BenchReport> {
    let mut solvers = config.solvers.clone();
    solvers.sort();
    solvers.dedup();
    let jobs: Vec<(usize, SolverKind)> =
        (0..instances.len()).flat_map(|i| solvers.iter().map(move |&s| (i, s))).collect();
    let work = || -> Vec<RunRecord> {
        jobs.par_iter()
            .map(|&(i, solver)| {
                let (name, inst) = &instances[i];
                run_one(name, inst, solver, config.objective, config.time_limit)
            })
            .collect()
    };
    let mut records = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(work),
        None => work(),
    };
    mark_vbs(&mut records);
    let rows = summarize(&records, &solvers);
    Ok(BenchReport {
        objective: config.objective,
        time_limit: config.time_limit.as_secs_f64(),
        solvers,
        rows,
        records,
    })
}

fn run_one(name: &str, inst: &Instance, solver: SolverKind, objective: ObjectiveArg, limit: Duration) -> RunRecord {
    let spec = objective.spec(inst);
    let mut record = RunRecord {
        instance: name.to_string(),
        jobs: inst.job_count(),
        solver,
        status: "unknown".into(),
        solved: false,
        optimal: false,
        vbs: false,
        consistent: true,
        flow: None,
        disq: None,
        obj: None,
        key: None,
        time: 0.0,
        note: None,
    };
    let started = Instant::now();
    let outcome = panic::catch_unwind(AssertUnwindSafe(|| run_solver(inst, solver, &spec, Some(limit), None)));
    let elapsed = started.elapsed();
    let result = match outcome {
        Ok(Ok(r)) => r,
        Ok(Err(e)) => {
            record.status = "error".into();
            record.note = Some(e.to_string());
            record.time = elapsed.as_secs_f64();
            return record;
        }
        Err(_) => {
            record.status = "crash".into();
            record.note = Some("solver panicked".into());
            record.time = elapsed.as_secs_f64();
            return record;
        }
    };
    record.status = status_name(result.status).into();
    record.time = result.stats.wall_time.as_secs_f64();
    if record.time > limit.as_secs_f64() * (1.0 + GRACE) {
        record.status = "timeout".into();
        record.note = Some(format!("ran {:.3}s", record.time));
        return record;
    }
    let Some(schedule) = &result.schedule else {
        return record;
    };
    let value = match evaluate(inst, schedule, &spec) {
        Ok(v) => v,
        Err(e) => {
            record.consistent = false;
            record.note = Some(format!("invalid schedule: {e}"));
            return record;
        }
    };
    if result.objective.map(|o| o.key()) != Some(value.key()) {
        record.consistent = false;
        record.note = Some("reported objective differs from re-evaluation".into());
        return record;
    }
    record.solved = true;
    record.optimal = result.status == SolveStatus::Optimal;
    record.flow = Some(value.flow_time);
    record.disq = Some(value.disq_count);
    record.obj = Some(obj_column(&spec, value.flow_time, value.disq_count));
    record.key = Some(value.key());
    record
}

/// Scalar for the obj. column: plain flow time for flow-only runs, and
/// flow plus disqualifications on the unit-weight scale otherwise.
fn obj_column(spec: &ObjectiveSpec, flow: u64, disq: u64) -> u64 {
    match spec.mode() {
        ObjectiveMode::FlowOnly => flow,
        _ => flow + disq,
    }
}

fn status_name(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Optimal => "optimal",
        SolveStatus::Feasible => "feasible",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::Unknown => "unknown",
    }
}

fn mark_vbs(records: &mut [RunRecord]) {
    let mut best: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
    for r in records.iter() {
        if let Some(k) = r.key {
            let e = best.entry(r.instance.as_str()).or_insert(k);
            *e = (*e).min(k);
        }
    }
    let best: BTreeMap<String, (u64, u64)> = best.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    for r in records.iter_mut() {
        r.vbs = r.key.is_some() && r.key == best.get(&r.instance).copied();
    }
}

fn summarize(records: &[RunRecord], solvers: &[SolverKind]) -> Vec<SummaryRow> {
    let mut sizes: Vec<usize> = records.iter().map(|r| r.jobs).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let mut groups: Vec<(String, Option<usize>)> = sizes.into_iter().map(|n| (n.to_string(), Some(n))).collect();
    groups.push(("all".into(), None));
    let mut rows = Vec::new();
    for &solver in solvers {
        for (label, size) in &groups {
            let rs: Vec<&RunRecord> = records
                .iter()
                .filter(|r| r.solver == solver && size.is_none_or(|n| r.jobs == n))
                .collect();
            if rs.is_empty() {
                continue;
            }
            let pct = |pred: fn(&RunRecord) -> bool| 100.0 * rs.iter().filter(|r| pred(r)).count() as f64 / rs.len() as f64;
            let solved: Vec<&&RunRecord> = rs.iter().filter(|r| r.solved).collect();
            let avg = |get: fn(&RunRecord) -> Option<u64>| {
                (!solved.is_empty()).then(|| {
                    solved.iter().filter_map(|r| get(r)).sum::<u64>() as f64 / solved.len() as f64
                })
            };
            rows.push(SummaryRow {
                solver,
                group: label.clone(),
                instances: rs.len(),
                pct_sol: pct(|r| r.solved),
                pct_opt: pct(|r| r.optimal),
                pct_vbs: pct(|r| r.vbs),
                avg_disq: avg(|r| r.disq),
                avg_obj: avg(|r| r.obj),
                avg_time: rs.iter().map(|r| r.time).sum::<f64>() / rs.len() as f64,
            });
        }
    }
    rows
}

impl BenchReport {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row)?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    pub fn records_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.records {
            w.serialize(r)?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One block per solver, one line per size group; the last column is
    /// #dis for lexicographic runs and obj. otherwise.
    pub fn to_markdown(&self) -> String {
        let lex = self.objective == ObjectiveArg::LexDisq;
        let last = if lex { "#dis." } else { "obj." };
        let mut out = format!(
            "objective: {}, time limit: {}s\n\n| solver | N | %sol. | %opt. | %vbs | {last} | time (s) |\n|---|---|---:|---:|---:|---:|---:|\n",
            self.objective, self.time_limit
        );
        for r in &self.rows {
            let value = if lex { r.avg_disq } else { r.avg_obj };
            let value = value.map_or("-".to_string(), |v| format!("{v:.1}"));
            let _ = writeln!(
                out,
                "| {} | {} | {:.1} | {:.1} | {:.1} | {} | {:.2} |",
                r.solver, r.group, r.pct_sol, r.pct_opt, r.pct_vbs, value, r.avg_time
            );
        }
        out
    }
}
