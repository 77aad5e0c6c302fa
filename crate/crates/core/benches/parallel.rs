use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use selp_core::exec::Parallelism;
use selp_core::gen::{chain_elp, random_elp, random_qbf, rng, ElpShape};
use selp_core::graph::decompose_program;
use selp_core::oracle::{enumerate_world_views, OracleConfig};
use selp_core::qbf::qbf_validity_bruteforce;
use selp_core::reduction::{reduce, ReductionOptions};

const MODES: [(&str, Parallelism); 2] = [("sequential", Parallelism::Sequential), ("parallel", Parallelism::Parallel)];

fn world_views(c: &mut Criterion) {
    let shape = ElpShape { max_atoms: 10, max_rules: 14, max_elits: 10, max_head: 2, max_body: 3 };
    let mut r = rng(3);
    let p = (0..200).map(|_| random_elp(&mut r, &shape)).max_by_key(|p| p.elits().len()).unwrap();
    let mut group = c.benchmark_group("enumerate_world_views");
    for (name, mode) in MODES {
        let cfg = OracleConfig { parallelism: mode, ..OracleConfig::default() };
        group.bench_with_input(BenchmarkId::from_parameter(name), &p, |b, p| {
            b.iter(|| enumerate_world_views(black_box(p), &cfg).unwrap())
        });
    }
    group.finish();
}

fn qbf_validity(c: &mut Criterion) {
    let mut r = rng(4);
    let q = (0..500)
        .map(|_| random_qbf(&mut r, 18, 12))
        .filter(|q| q.x.len() >= 5 && !qbf_validity_bruteforce(q, Parallelism::Sequential).unwrap())
        .max_by_key(|q| (q.x.len(), q.variable_count()))
        .unwrap();
    let mut group = c.benchmark_group("qbf_validity_bruteforce");
    for (name, mode) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &q, |b, q| {
            b.iter(|| qbf_validity_bruteforce(black_box(q), mode).unwrap())
        });
    }
    group.finish();
}

fn decomposition(c: &mut Criterion) {
    let prog = reduce(&chain_elp(60, 4, 1), &ReductionOptions::default()).unwrap();
    let mut group = c.benchmark_group("decompose_program");
    for (name, mode) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &prog, |b, p| {
            b.iter(|| decompose_program(black_box(p), mode).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, world_views, qbf_validity, decomposition);
criterion_main!(benches);
