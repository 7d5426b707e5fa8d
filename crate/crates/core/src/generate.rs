//! Seeded random instances.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graphfactor::{degree_sequence, Edge, Factor, MultiGraph};
use crate::parityset::{BProfile, GapFreeSet, IntVector, ParityInterval, ParityProduct};

pub type TrialRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `trial` in stream `stream`, derived from a master seed.
pub fn trial_seed(seed: u64, stream: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(stream)) ^ trial)
}

pub fn rng_from_seed(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gap-free set of `len` elements starting at `start`, each gap 1 or 2.
pub fn random_gap_free_set<R: Rng>(rng: &mut R, start: i64, len: usize) -> GapFreeSet {
    let mut elems = Vec::with_capacity(len);
    let mut a = start;
    for i in 0..len.max(1) {
        if i > 0 {
            a += rng.random_range(1..=2);
        }
        elems.push(a);
    }
    GapFreeSet::new(elems).expect("gaps are 1 or 2")
}

/// `n` sets with sizes in `1..=max_len` and first elements in `start_lo..=start_hi`.
pub fn random_profile<R: Rng>(
    rng: &mut R,
    n: usize,
    max_len: usize,
    start_lo: i64,
    start_hi: i64,
) -> BProfile {
    BProfile::new(
        (0..n.max(1))
            .map(|_| {
                let len = rng.random_range(1..=max_len.max(1));
                let start = rng.random_range(start_lo..=start_hi);
                random_gap_free_set(rng, start, len)
            })
            .collect(),
    )
    .expect("nonempty")
}

pub fn random_point_in<R: Rng>(rng: &mut R, profile: &BProfile) -> IntVector {
    IntVector::from(
        profile
            .sets()
            .iter()
            .map(|s| *s.elements().choose(rng).unwrap())
            .collect::<Vec<_>>(),
    )
}

/// Uniform point of the box `[min B, max B]`.
pub fn random_point_in_box<R: Rng>(rng: &mut R, profile: &BProfile) -> IntVector {
    IntVector::from(
        profile
            .sets()
            .iter()
            .map(|s| rng.random_range(s.min()..=s.max()))
            .collect::<Vec<_>>(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceParams {
    pub vertices: usize,
    pub edges: usize,
    /// Largest `|B(v)|`.
    pub max_b: usize,
    pub weight_lo: i64,
    pub weight_hi: i64,
    /// Chance in percent that an edge is a loop.
    pub loop_percent: u32,
}

impl Default for InstanceParams {
    fn default() -> Self {
        InstanceParams {
            vertices: 5,
            edges: 8,
            max_b: 4,
            weight_lo: -9,
            weight_hi: 9,
            loop_percent: 10,
        }
    }
}

pub fn random_graph<R: Rng>(rng: &mut R, params: &InstanceParams) -> MultiGraph {
    let n = params.vertices.max(1);
    let edges = (0..params.edges)
        .map(|_| {
            let u = rng.random_range(0..n);
            let v = if n == 1 || rng.random_range(0..100) < params.loop_percent {
                u
            } else {
                let mut v = rng.random_range(0..n - 1);
                if v >= u {
                    v += 1;
                }
                v
            };
            Edge {
                u,
                v,
                weight: rng.random_range(params.weight_lo..=params.weight_hi),
            }
        })
        .collect();
    MultiGraph::new(n, edges).expect("valid endpoints")
}

/// Random graph plus `B(v)` sets starting between 0 and 2.
pub fn random_instance<R: Rng>(rng: &mut R, params: &InstanceParams) -> (MultiGraph, BProfile) {
    let g = random_graph(rng, params);
    let b = random_profile(rng, g.vertex_count(), params.max_b, 0, 2);
    (g, b)
}

/// Random product of parity intervals around the degree sequence of a random
/// factor, so most products are feasible. With probability 0.3 one coordinate
/// moves to the other parity class, which usually makes it infeasible.
pub fn random_parity_product<R: Rng>(rng: &mut R, g: &MultiGraph) -> ParityProduct {
    let d = degree_sequence(g, &random_factor(rng, g));
    let n = d.len();
    let moved = rng.random_bool(0.3).then(|| rng.random_range(0..n));
    ParityProduct::new(
        (0..n)
            .map(|v| {
                let center = if moved == Some(v) {
                    d[v] + if rng.random_bool(0.5) { 1 } else { -1 }
                } else {
                    d[v]
                };
                let lo = center - 2 * rng.random_range(0..=1);
                let hi = center + 2 * rng.random_range(0..=1);
                ParityInterval::new(lo, hi).unwrap()
            })
            .collect(),
    )
}

pub fn random_factor<R: Rng>(rng: &mut R, g: &MultiGraph) -> Factor {
    let ids: Vec<usize> = (0..g.edge_count())
        .filter(|_| rng.random_bool(0.5))
        .collect();
    Factor::from_ids(g.edge_count(), &ids).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_sets_are_valid_and_deterministic() {
        let mut a = rng_from_seed(5);
        let mut b = rng_from_seed(5);
        for _ in 0..200 {
            let pa = random_profile(&mut a, 4, 6, -3, 3);
            let pb = random_profile(&mut b, 4, 6, -3, 3);
            assert_eq!(pa, pb);
            for s in pa.sets() {
                assert!(GapFreeSet::new(s.elements().to_vec()).is_ok());
            }
        }
    }

    #[test]
    fn trial_seeds_differ() {
        assert_ne!(trial_seed(1, 0, 0), trial_seed(1, 0, 1));
        assert_ne!(trial_seed(1, 0, 0), trial_seed(1, 1, 0));
        assert_eq!(trial_seed(9, 2, 3), trial_seed(9, 2, 3));
    }

    #[test]
    fn single_vertex_graph_has_only_loops() {
        let mut rng = rng_from_seed(1);
        let p = InstanceParams {
            vertices: 1,
            edges: 3,
            ..Default::default()
        };
        let g = random_graph(&mut rng, &p);
        assert!(g.edges().iter().all(Edge::is_loop));
    }
}
