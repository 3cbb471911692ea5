use proptest::prelude::*;
use proptest::sample::subsequence;

use ptc_core::search::{flow_lower_bound, SearchState};
use ptc_core::{
    check_feasibility, compute_disqualifications, compute_makespan_flow, enumerate_optimal, evaluate, generate,
    generate_tiny, qualification_centric, replay, schedule_centric, solve, Family, GeneratorConfig, HeuristicError,
    Instance, NodeOrder, ObjectiveSpec, OracleLimits, SearchConfig, SolveResult, SolveStatus, ThresholdClass,
    TinyLimits,
};

fn tiny() -> impl Strategy<Value = Instance> {
    any::<u64>().prop_map(|seed| generate_tiny(seed, &TinyLimits::default()))
}

fn all_specs(inst: &Instance) -> [ObjectiveSpec; 4] {
    [
        ObjectiveSpec::flow_only(),
        ObjectiveSpec::lex_disq_then_flow(),
        ObjectiveSpec::weighted_flow_priority(),
        ObjectiveSpec::weighted_disq_priority(inst),
    ]
}

fn exact(inst: &Instance, spec: &ObjectiveSpec) -> SolveResult {
    solve(inst, spec, &SearchConfig::default()).unwrap()
}

fn key(r: &SolveResult) -> (SolveStatus, Option<(u64, u64)>) {
    (r.status, r.objective.map(|v| v.key()))
}

/// `inst` with machines renumbered by `machines` and families listed in
/// the order `families`.
fn relabel(inst: &Instance, machines: &[usize], families: &[usize]) -> Instance {
    let fams = families
        .iter()
        .map(|&f| {
            let old = inst.family(f);
            let mut qualified: Vec<usize> = old.qualified.iter().map(|&m| machines[m]).collect();
            qualified.sort_unstable();
            Family { qualified, ..old.clone() }
        })
        .collect();
    Instance::new(inst.machine_count(), fams).unwrap()
}

fn generator_config() -> impl Strategy<Value = GeneratorConfig> {
    (1usize..=5, 1usize..=4, 0usize..=25, 0usize..3, any::<u64>()).prop_map(|(families, machines, extra, c, seed)| {
        GeneratorConfig { jobs: families + extra, machines, families, class: ThresholdClass::ALL[c], seed }
    })
}

proptest! {
    #[test]
    fn instance_json_round_trip(inst in tiny()) {
        prop_assert_eq!(Instance::from_json(&inst.to_json()).unwrap(), inst);
    }

    #[test]
    fn jobs_are_grouped_by_family(inst in tiny()) {
        let owners: Vec<usize> = (0..inst.job_count()).map(|j| inst.family_of(j).unwrap()).collect();
        prop_assert!(owners.windows(2).all(|w| w[0] <= w[1]));
        for f in 0..inst.family_count() {
            prop_assert_eq!(inst.jobs_of(f).len(), inst.family(f).jobs as usize);
        }
        prop_assert!(inst.family_of(inst.job_count()).is_err());
    }

    #[test]
    fn bnb_matches_oracle(inst in tiny()) {
        for spec in all_specs(&inst) {
            let oracle = enumerate_optimal(&inst, &spec, &OracleLimits::default()).unwrap();
            prop_assert_eq!(key(&exact(&inst, &spec)), key(&oracle));
            let dfs = solve(&inst, &spec, &SearchConfig { order: NodeOrder::DepthFirst, ..Default::default() }).unwrap();
            prop_assert_eq!(key(&dfs), key(&oracle));
        }
    }

    #[test]
    fn optimum_ignores_labels(
        inst in tiny(),
        mperm in Just(vec![0usize, 1]).prop_shuffle(),
        fperm in Just(vec![0usize, 1, 2]).prop_shuffle(),
    ) {
        let machines: Vec<usize> = if inst.machine_count() == 2 { mperm } else { vec![0] };
        let families: Vec<usize> = fperm.into_iter().filter(|&f| f < inst.family_count()).collect();
        let other = relabel(&inst, &machines, &families);
        for spec in [ObjectiveSpec::flow_only(), ObjectiveSpec::lex_disq_then_flow()] {
            prop_assert_eq!(key(&exact(&inst, &spec)), key(&exact(&other, &spec)));
        }
    }

    #[test]
    fn large_beta_is_lexicographic(inst in tiny()) {
        let lex = exact(&inst, &ObjectiveSpec::lex_disq_then_flow()).objective;
        let weighted = exact(&inst, &ObjectiveSpec::weighted_disq_priority(&inst)).objective;
        prop_assert_eq!(lex.map(|v| (v.disq_count, v.flow_time)), weighted.map(|v| (v.disq_count, v.flow_time)));
    }

    #[test]
    fn optimal_schedules_are_consistent(inst in tiny()) {
        let lb = flow_lower_bound(&inst, &SearchState::root(&inst));
        for spec in all_specs(&inst) {
            let r = exact(&inst, &spec);
            let Some(sched) = &r.schedule else {
                prop_assert_eq!(r.status, SolveStatus::Infeasible);
                continue;
            };
            prop_assert!(check_feasibility(&inst, sched).is_empty());
            let value = evaluate(&inst, sched, &spec).unwrap();
            prop_assert_eq!(Some(value), r.objective);
            prop_assert_eq!(value.weighted, value.flow_time + spec.beta() * value.disq_count);
            prop_assert_eq!(value.disq_count + value.qualified_count, inst.pair_count() as u64);
            prop_assert!(inst.makespan_lower_bound() <= value.cmax && value.cmax <= inst.horizon());
            prop_assert!(lb <= value.flow_time);
            prop_assert_eq!(r.dual_bound, Some(value.key()));
        }
    }

    #[test]
    fn heuristics_return_valid_schedules(cfg in generator_config()) {
        let inst = generate(&cfg).unwrap();
        for spec in all_specs(&inst) {
            for run in [schedule_centric, qualification_centric] {
                match run(&inst, &spec) {
                    Ok(r) => {
                        let sched = r.schedule.as_ref().unwrap();
                        prop_assert!(check_feasibility(&inst, sched).is_empty());
                        prop_assert_eq!(Some(evaluate(&inst, sched, &spec).unwrap()), r.objective);
                    }
                    Err(HeuristicError::Failure(msg)) => prop_assert!(!msg.is_empty()),
                }
            }
        }
    }

    #[test]
    fn generator_structure(cfg in generator_config()) {
        let inst = generate(&cfg).unwrap();
        prop_assert_eq!(generate(&cfg).unwrap(), inst.clone());
        prop_assert_eq!(inst.job_count(), cfg.jobs);
        prop_assert_eq!((inst.machine_count(), inst.family_count()), (cfg.machines, cfg.families));
        prop_assert!(ptc_core::generator::check_structure(&inst).is_ok());
        let max_p = inst.families().iter().map(|f| f.processing).max().unwrap();
        let counts: Vec<u32> = inst.families().iter().map(|f| f.jobs).collect();
        prop_assert!(counts.windows(2).all(|w| w[0] >= w[1] && w[0] - w[1] <= 1));
        for f in inst.families() {
            prop_assert_eq!(ThresholdClass::classify(f.threshold, max_p), Some(cfg.class));
            prop_assert!(1 <= f.setup && f.setup <= f.processing);
        }
        for m in 0..cfg.machines {
            prop_assert!(inst.families().iter().any(|f| f.is_qualified(m)));
        }
    }

    #[test]
    fn lp_replay_agrees_with_validator(inst in tiny(), lex in any::<bool>()) {
        let max_p = inst.families().iter().map(|f| f.processing).max().unwrap();
        prop_assume!(inst.families().iter().all(|f| f.threshold >= max_p));
        let spec = if lex { ObjectiveSpec::lex_disq_then_flow() } else { ObjectiveSpec::flow_only() };
        let r = exact(&inst, &spec);
        prop_assume!(r.schedule.is_some());
        let sched = r.schedule.unwrap();
        let rp = replay(&inst, &sched);
        prop_assert!(rp.violated.iter().all(|row| row.starts_with("tail_")), "{:?}", rp.violated);
        let (cmax, flow) = compute_makespan_flow(&inst, &sched);
        prop_assert_eq!(rp.completion.iter().sum::<u64>(), flow);
        let horizon = inst.horizon();
        for (f, m, at) in compute_disqualifications(&inst, &sched).unwrap().lost() {
            prop_assert!(rp.lost.contains(&(f, m)) || (at + 1 == horizon && cmax == horizon), "({f}, {m}) lost at {at}");
        }
    }

    #[test]
    fn dropping_jobs_never_raises_the_flow_optimum(inst in tiny(), keep in subsequence(vec![0usize, 1, 2], 1..=3)) {
        // Same machines, subset of families, thresholds unchanged.
        let keep: Vec<usize> = keep.into_iter().filter(|&f| f < inst.family_count()).collect();
        prop_assume!(!keep.is_empty());
        let fams: Vec<Family> = keep.iter().map(|&f| inst.family(f).clone()).collect();
        let Ok(sub) = Instance::new(inst.machine_count(), fams) else {
            return Ok(());
        };
        let full = exact(&inst, &ObjectiveSpec::flow_only());
        if let Some(v) = full.objective {
            let part = exact(&sub, &ObjectiveSpec::flow_only()).objective;
            prop_assert!(part.is_some_and(|p| p.flow_time <= v.flow_time));
        }
    }
}
