use std::time::Duration;

use ptc_cli::{run_instances, BenchConfig, BenchReport, ObjectiveArg, SolverKind};
use ptc_core::{generate_set, generate_tiny, Instance, TinyLimits};

/// Small enough that every exact run finishes well inside the time limit, so
/// results do not depend on machine load.
fn corpus() -> Vec<(String, Instance)> {
    let mut out: Vec<(String, Instance)> =
        (0..12).map(|s| (format!("tiny_{s}"), generate_tiny(s, &TinyLimits::default()))).collect();
    out.extend(generate_set(9, 2, 3, 3, 2).unwrap().into_iter().map(|g| (g.file_name, g.instance)));
    out
}

fn run(instances: &[(String, Instance)], solvers: &[SolverKind], objective: ObjectiveArg) -> BenchReport {
    let config = BenchConfig { solvers: solvers.to_vec(), objective, time_limit: Duration::from_secs(120), threads: Some(2) };
    run_instances(instances, &config).unwrap()
}

fn vbs(report: &BenchReport, solver: SolverKind) -> f64 {
    report.rows.iter().find(|r| r.solver == solver && r.group == "all").unwrap().pct_vbs
}

#[test]
fn vbs_never_drops_when_competitors_leave() {
    let instances = corpus();
    let everyone = SolverKind::ALL;
    for objective in [ObjectiveArg::LexDisq, ObjectiveArg::WsumFlow] {
        let full = run(&instances, &everyone, objective);
        for keep in 1u32..(1 << everyone.len()) {
            let subset: Vec<SolverKind> = (0..everyone.len()).filter(|i| keep >> i & 1 == 1).map(|i| everyone[i]).collect();
            let part = run(&instances, &subset, objective);
            for &s in &subset {
                assert!(vbs(&part, s) >= vbs(&full, s), "{objective} {s} in {subset:?}");
            }
        }
    }
}

#[test]
fn report_is_deterministic_and_self_consistent() {
    let instances = corpus();
    let solvers = [SolverKind::Bnb, SolverKind::Sch, SolverKind::Qch];
    let a = run(&instances, &solvers, ObjectiveArg::WsumDisq);
    let b = run(&instances, &solvers, ObjectiveArg::WsumDisq);
    let strip = |r: &BenchReport| r.records.iter().map(|x| (x.instance.clone(), x.solver, x.key, x.vbs)).collect::<Vec<_>>();
    assert_eq!(strip(&a), strip(&b));
    assert!(a.records.iter().all(|r| r.consistent));
    for r in a.records.iter().filter(|r| r.solved) {
        assert_eq!(r.obj, Some(r.flow.unwrap() + r.disq.unwrap()));
    }
    // Every instance has at least one best solver whenever anyone solved it.
    for (name, _) in &instances {
        let rs: Vec<_> = a.records.iter().filter(|r| &r.instance == name).collect();
        assert_eq!(rs.iter().any(|r| r.solved), rs.iter().any(|r| r.vbs), "{name}");
    }
    let all = a.rows.iter().filter(|r| r.group == "all").count();
    assert_eq!(all, solvers.len());
}
