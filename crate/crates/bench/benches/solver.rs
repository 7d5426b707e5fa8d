use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use jumpfactor::graphfactor::oracle_parity_factor;
use jumpfactor::matching::max_weight_perfect_matching;
use jumpfactor::report::{solve_instance, SolveOptions};
use jumpfactor_bench::{dense_matching_graph, instances, oracle_queries};

fn matching(c: &mut Criterion) {
    let mut group = c.benchmark_group("matching");
    for n in [16, 32, 64] {
        let g = dense_matching_graph(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| max_weight_perfect_matching(black_box(g)))
        });
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    for n in [5, 10, 20] {
        let queries = oracle_queries(n, 32);
        group.bench_with_input(BenchmarkId::from_parameter(n), &queries, |b, qs| {
            b.iter(|| {
                for (g, p) in qs {
                    black_box(oracle_parity_factor(g, p).unwrap());
                }
            })
        });
    }
    group.finish();
}

fn solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(20);
    for n in [4, 6, 8] {
        let insts = instances(n, 8);
        let opts = SolveOptions::default();
        group.bench_with_input(BenchmarkId::from_parameter(n), &insts, |b, insts| {
            b.iter(|| {
                for inst in insts {
                    black_box(solve_instance(inst, &opts).unwrap());
                }
            })
        });
    }
    group.finish();
}

criterion_group!(benches, matching, oracle, solve);
criterion_main!(benches);
