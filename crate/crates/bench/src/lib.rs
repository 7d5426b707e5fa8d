//! Fixed workloads shared by the benchmarks.

use jumpfactor::generate::{
    random_graph, random_parity_product, rng_from_seed, trial_seed, InstanceParams,
};
use jumpfactor::matching::MatchingGraph;
use jumpfactor::{Instance, MultiGraph, ParityProduct};

/// `count` random instances with `vertices` vertices and twice as many edges.
pub fn instances(vertices: usize, count: u64) -> Vec<Instance> {
    let params = InstanceParams {
        vertices,
        edges: 2 * vertices,
        ..InstanceParams::default()
    };
    (0..count)
        .map(|t| Instance::random(&params, trial_seed(7, vertices as u64, t)))
        .collect()
}

/// Random graphs, each paired with a random product of parity intervals.
pub fn oracle_queries(vertices: usize, count: u64) -> Vec<(MultiGraph, ParityProduct)> {
    let params = InstanceParams {
        vertices,
        edges: 2 * vertices,
        ..InstanceParams::default()
    };
    (0..count)
        .map(|t| {
            let mut rng = rng_from_seed(trial_seed(11, vertices as u64, t));
            let g = random_graph(&mut rng, &params);
            let p = random_parity_product(&mut rng, &g);
            (g, p)
        })
        .collect()
}

/// Dense graph on `n` nodes with deterministic pseudo-random weights.
pub fn dense_matching_graph(n: usize) -> MatchingGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let w = ((u * 31 + v * 17) % 23) as i64 - 11;
            edges.push((u, v, w));
        }
    }
    MatchingGraph::new(n, edges).expect("simple graph")
}
