use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use funvol::convex::{ConvexBody, ConvexFunction};
use funvol::numerics::{Execution, SymMatrix};
use funvol::valuations::{classical_ck_check, eval_ck_general, EvalOptions, ValuationSpec};
use funvol::verify::{default_manifest, run_suite, IdentityId, SuiteOptions};
use funvol::weights::WeightFunction;

const POLICIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn functional_ck(c: &mut Criterion) {
    let spec = ValuationSpec::new(1, 3, WeightFunction::tent(1.0).unwrap()).unwrap();
    let u = ConvexFunction::quadratic(SymMatrix::diagonal(&[1.0, 2.0, 4.0]), vec![0.0; 3], 0.0).unwrap();
    let mut g = c.benchmark_group("ck_general_n3_k2");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        let opts = EvalOptions::default().with_samples(64).with_execution(exec);
        g.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, o| b.iter(|| eval_ck_general(&spec, black_box(&u), 2, o).unwrap()));
    }
    g.finish();
}

fn classical_ck(c: &mut Criterion) {
    let cube = ConvexBody::cuboid(&[(0.0, 1.0), (0.0, 1.0), (0.0, 1.0)]).unwrap();
    let mut g = c.benchmark_group("classical_ck_cube_v2");
    for (name, exec) in POLICIES {
        let opts = EvalOptions::default().with_samples(10_000).with_execution(exec);
        g.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, o| b.iter(|| classical_ck_check(black_box(&cube), 2, 2, o).unwrap()));
    }
    g.finish();
}

fn suite_slice(c: &mut Criterion) {
    let cases: Vec<_> = default_manifest().into_iter().filter(|k| matches!(k.id, IdentityId::Cone | IdentityId::Invariance)).collect();
    let mut g = c.benchmark_group("suite_cone_invariance");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        let opts = SuiteOptions { execution: exec, ..SuiteOptions::default() };
        g.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, o| b.iter(|| run_suite(black_box(&cases), o).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, functional_ck, classical_ck, suite_slice);
criterion_main!(benches);
