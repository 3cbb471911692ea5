use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ptc_bench::{example_one, example_one_a, sized, tiny_corpus};
use ptc_core::generator::PRESETS;
use ptc_core::ilp::DEFAULT_HORIZON_CAP;
use ptc_core::{
    enumerate_optimal, evaluate, export_ip3, generate_set, qualification_centric, schedule_centric, solve,
    ObjectiveSpec, OracleLimits, SearchConfig, ThresholdClass,
};

fn validator(c: &mut Criterion) {
    let inst = example_one();
    let sched = example_one_a(&inst);
    let spec = ObjectiveSpec::lex_disq_then_flow();
    c.bench_function("evaluate/example1", |b| b.iter(|| evaluate(&inst, black_box(&sched), &spec).unwrap()));
}

fn heuristics(c: &mut Criterion) {
    let mut group = c.benchmark_group("heuristics");
    let spec = ObjectiveSpec::lex_disq_then_flow();
    for (n, m, f) in [(10, 2, 2), (30, 3, 5), (70, 4, 5)] {
        let inst = sized(n, m, f, ThresholdClass::Large);
        let label = format!("N{n}_M{m}_F{f}");
        group.bench_with_input(BenchmarkId::new("sch", &label), &inst, |b, inst| {
            b.iter(|| schedule_centric(inst, &spec))
        });
        group.bench_with_input(BenchmarkId::new("qch", &label), &inst, |b, inst| {
            b.iter(|| qualification_centric(inst, &spec))
        });
    }
    group.finish();
}

fn exact(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact");
    group.sample_size(10);
    let inst = example_one();
    let config = SearchConfig::default();
    group.bench_function("bnb_flow/example1", |b| {
        b.iter(|| solve(&inst, &ObjectiveSpec::flow_only(), &config).unwrap())
    });
    let corpus = tiny_corpus(50);
    group.bench_function("bnb_lex/tiny50", |b| {
        b.iter(|| {
            for inst in &corpus {
                solve(inst, &ObjectiveSpec::lex_disq_then_flow(), &config).unwrap();
            }
        })
    });
    group.bench_function("oracle_lex/tiny50", |b| {
        b.iter(|| {
            for inst in &corpus {
                enumerate_optimal(inst, &ObjectiveSpec::lex_disq_then_flow(), &OracleLimits::default()).unwrap();
            }
        })
    });
    group.finish();
}

fn export(c: &mut Criterion) {
    let inst = example_one();
    let spec = ObjectiveSpec::weighted_disq_priority(&inst);
    c.bench_function("export_lp/example1", |b| b.iter(|| export_ip3(&inst, &spec, DEFAULT_HORIZON_CAP).unwrap()));
}

fn generator(c: &mut Criterion) {
    let (n, m, f) = PRESETS[PRESETS.len() - 1];
    c.bench_function("generate_set/largest_preset", |b| b.iter(|| generate_set(n, m, f, black_box(7), 10).unwrap()));
}

criterion_group!(benches, validator, heuristics, exact, export, generator);
criterion_main!(benches);
