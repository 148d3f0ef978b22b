use std::path::PathBuf;

use criterion::{criterion_group, criterion_main, Criterion};
use rvt_core::checks::{check_consistency, check_property, CheckConfig};
use rvt_core::project::{load_project, Project};
use rvt_core::Strategy;

fn fixture(name: &str) -> Project {
    load_project(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)).unwrap()
}

fn with(strategy: Strategy) -> CheckConfig {
    let mut cfg = CheckConfig::default();
    cfg.solve.strategy = strategy;
    cfg.cores = false;
    cfg
}

fn engines(c: &mut Criterion) {
    let mut g = c.benchmark_group("engines");
    g.sample_size(10);

    let train = fixture("train.json");
    g.bench_function("bmc_consistent", |b| b.iter(|| check_consistency(&train, &with(Strategy::BmcOnly)).unwrap()));
    g.bench_function("cegar_entailed", |b| b.iter(|| check_property(&train, "P1", &with(Strategy::CegarOnly)).unwrap()));

    let contra = fixture("contradictory.json");
    g.bench_function("sequential_inconsistent", |b| b.iter(|| check_consistency(&contra, &with(Strategy::Sequential)).unwrap()));
    let mut cored = with(Strategy::Sequential);
    cored.cores = true;
    g.bench_function("core_minimization", |b| b.iter(|| check_consistency(&contra, &cored).unwrap()));
    g.finish();
}

criterion_group!(benches, engines);
criterion_main!(benches);
