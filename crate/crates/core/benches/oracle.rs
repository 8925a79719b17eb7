use std::hint::black_box;

use abduction::engines::{brute_force, SatConfig};
use abduction::gen::{generate, GenFragment};
use abduction::oracle::{ExplanationSpace, OracleConfig};
use abduction::{parse_instance, AbductionInstance, ExecMode};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [ExecMode; 2] = [ExecMode::Sequential, ExecMode::Parallel];

fn instance(fragment: GenFragment, n: usize, atoms: usize, seed: u64) -> AbductionInstance {
    parse_instance(&generate(fragment, n, atoms, seed)).unwrap().into_base()
}

fn bench_oracle(c: &mut Criterion) {
    let inst = instance(GenFragment::Horn, 16, 24, 11);
    let mut group = c.benchmark_group("oracle");
    for mode in MODES {
        let config = OracleConfig { mode, ..OracleConfig::default() };
        group.bench_with_input(BenchmarkId::new("report", format!("{mode:?}")), &config, |b, config| {
            b.iter(|| black_box(ExplanationSpace::compute(&inst, config).unwrap().report()))
        });
    }
    group.finish();
}

fn bench_brute_force(c: &mut Criterion) {
    // unsatisfiable, so every assignment is evaluated
    let inst = instance(GenFragment::Pos2Cnf, 18, 30, 5);
    let kb = inst.kb.with_units(inst.kb.vars.iter().map(|&v| (v, false)));
    let mut group = c.benchmark_group("brute_force");
    for mode in MODES {
        let config = SatConfig { mode, ..SatConfig::default() };
        group.bench_with_input(BenchmarkId::new("sat", format!("{mode:?}")), &config, |b, config| {
            b.iter(|| black_box(brute_force(&kb, config).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_oracle, bench_brute_force);
criterion_main!(benches);
