//! Degree-sequence jump systems of graphs and the weighted general factor problem.
//!
//! `J = { d_F : F ⊆ E }` with valuation `f(x) = max { w(F) : d_F = x }`. The
//! oracle over a parity product `B'` reduces to maximum-weight perfect
//! matching in two steps:
//!
//! 1. parity constraints become exact degrees by adding zero-weight loops
//!    (`(hi - lo) / 2` loops at `v`, demand `hi`);
//! 2. exact degrees become a perfect matching problem by splitting every
//!    vertex into `b(v)` copies and every edge into a two-node gadget.
//!
//! A loop contributes 2 to the degree of its vertex throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jumpcore::{local_search, JumpOracle, Optimum, OracleAnswer, SearchTrace};
use crate::matching::{max_weight_perfect_matching, Matching, MatchingGraph};
use crate::parityset::{BProfile, IntVector, ParityInterval, ParityProduct};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: i64,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }
}

/// Undirected multigraph on `0..n`; parallel edges and loops allowed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl MultiGraph {
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        for (k, e) in edges.iter().enumerate() {
            for endpoint in [e.u, e.v] {
                if endpoint >= n {
                    return Err(Error::BadEndpoint {
                        edge: k,
                        endpoint,
                        n,
                    });
                }
            }
            if i32::try_from(e.weight).is_err() {
                return Err(Error::WeightOverflow {
                    edge: k,
                    weight: e.weight,
                });
            }
        }
        Ok(MultiGraph { n, edges })
    }

    /// From `(u, v, weight)` triples.
    pub fn from_triples(n: usize, triples: &[(usize, usize, i64)]) -> Result<Self> {
        Self::new(
            n,
            triples
                .iter()
                .map(|&(u, v, weight)| Edge { u, v, weight })
                .collect(),
        )
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    /// Same graph with every weight set to 1.
    pub fn with_unit_weights(&self) -> MultiGraph {
        MultiGraph {
            n: self.n,
            edges: self
                .edges
                .iter()
                .map(|e| Edge { weight: 1, ..*e })
                .collect(),
        }
    }

    /// Degree of every vertex in the whole graph.
    pub fn degrees(&self) -> IntVector {
        degree_sequence(self, &Factor::full(self.edge_count()))
    }
}

/// Edge subset `F ⊆ E`, stored as an indicator over edge ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Factor {
    used: Vec<bool>,
}

impl Factor {
    pub fn empty(m: usize) -> Self {
        Factor {
            used: vec![false; m],
        }
    }

    pub fn full(m: usize) -> Self {
        Factor {
            used: vec![true; m],
        }
    }

    pub fn from_ids(m: usize, ids: &[usize]) -> Result<Self> {
        let mut used = vec![false; m];
        for &id in ids {
            if id >= m {
                return Err(Error::BadEdgeId { edge: id, m });
            }
            used[id] = true;
        }
        Ok(Factor { used })
    }

    /// Bit `k` of `mask` selects edge `k`.
    pub fn from_mask(m: usize, mask: u64) -> Self {
        Factor {
            used: (0..m).map(|k| mask >> k & 1 == 1).collect(),
        }
    }

    pub fn edge_universe(&self) -> usize {
        self.used.len()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.used.get(id).copied().unwrap_or(false)
    }

    pub fn ids(&self) -> Vec<usize> {
        self.used
            .iter()
            .enumerate()
            .filter_map(|(k, &b)| b.then_some(k))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.used.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn toggle(&mut self, id: usize) {
        self.used[id] = !self.used[id];
    }

    pub fn symmetric_difference(&self, other: &Factor) -> Factor {
        Factor {
            used: self
                .used
                .iter()
                .zip(&other.used)
                .map(|(a, b)| a != b)
                .collect(),
        }
    }
}

/// `d_F(v)`: ordinary edges count once at each end, loops count twice.
pub fn degree_sequence(g: &MultiGraph, f: &Factor) -> IntVector {
    let mut d = vec![0i64; g.vertex_count()];
    for id in f.ids() {
        let e = g.edge(id);
        d[e.u] += 1;
        d[e.v] += 1;
    }
    IntVector::from(d)
}

pub fn factor_weight(g: &MultiGraph, f: &Factor) -> i64 {
    f.ids().into_iter().map(|id| g.edge(id).weight).sum()
}

/// An alternating path of `M △ N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlternatingPath {
    /// `d_{N ∩ P} − d_{M ∩ P}`; always of 1-norm 2.
    pub step: IntVector,
    /// `w(N ∩ P) − w(M ∩ P)`.
    pub gain: i64,
    /// Edge ids in walk order.
    pub edges: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlternatingCycle {
    pub gain: i64,
    pub edges: Vec<usize>,
}

/// `M △ N` split into alternating paths (the steps of a 2-step decomposition of
/// `d_N − d_M`) and degree-neutral alternating cycles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoStepDecomposition {
    pub paths: Vec<AlternatingPath>,
    pub cycles: Vec<AlternatingCycle>,
}

impl TwoStepDecomposition {
    pub fn steps(&self) -> Vec<IntVector> {
        self.paths.iter().map(|p| p.step.clone()).collect()
    }

    pub fn gains(&self) -> Vec<i64> {
        self.paths.iter().map(|p| p.gain).collect()
    }

    /// `M` with the paths selected by `subset` toggled.
    pub fn apply(&self, m: &Factor, subset: &[usize]) -> Factor {
        let mut f = m.clone();
        for &i in subset {
            for &id in &self.paths[i].edges {
                f.toggle(id);
            }
        }
        f
    }
}

/// Decomposes `M △ N` into alternating paths and cycles.
///
/// At every vertex the `M`-edge ends and `N`-edge ends of the symmetric
/// difference are paired in edge-id order; the unpaired ends, which all share
/// one type, are path endpoints. Paths are emitted in order of their first
/// free end (by vertex, then edge id), then cycles by smallest edge id.
pub fn sbo_witness(g: &MultiGraph, m: &Factor, n: &Factor) -> Result<TwoStepDecomposition> {
    let edge_count = g.edge_count();
    for f in [m, n] {
        if f.edge_universe() != edge_count {
            return Err(Error::DimensionMismatch {
                expected: edge_count,
                got: f.edge_universe(),
            });
        }
    }
    let diff = m.symmetric_difference(n);
    let in_n = |id: usize| n.contains(id);

    // End slot 2*id + side; side 0 is at `u`, side 1 at `v`.
    let end_vertex = |slot: usize| {
        let e = g.edge(slot / 2);
        if slot.is_multiple_of(2) {
            e.u
        } else {
            e.v
        }
    };
    let mut partner = vec![usize::MAX; 2 * edge_count];
    let mut free = vec![false; 2 * edge_count];
    let mut free_order = Vec::new();
    let mut ends_at: Vec<(Vec<usize>, Vec<usize>)> =
        vec![(Vec::new(), Vec::new()); g.vertex_count()];
    for id in diff.ids() {
        for slot in [2 * id, 2 * id + 1] {
            let side = &mut ends_at[end_vertex(slot)];
            if in_n(id) {
                side.1.push(slot);
            } else {
                side.0.push(slot);
            }
        }
    }
    for (m_ends, n_ends) in &ends_at {
        for (&a, &b) in m_ends.iter().zip(n_ends) {
            partner[a] = b;
            partner[b] = a;
        }
        let rest = if m_ends.len() > n_ends.len() {
            &m_ends[n_ends.len()..]
        } else {
            &n_ends[m_ends.len()..]
        };
        for &slot in rest {
            free[slot] = true;
            free_order.push(slot);
        }
    }

    let mut visited = vec![false; edge_count];
    let tally = |edges: &[usize]| {
        let mut step = vec![0i64; g.vertex_count()];
        let mut gain = 0i64;
        for &id in edges {
            let e = g.edge(id);
            let sign = if in_n(id) { 1 } else { -1 };
            step[e.u] += sign;
            step[e.v] += sign;
            gain += sign * e.weight;
        }
        (IntVector::from(step), gain)
    };

    let mut paths = Vec::new();
    for &start in &free_order {
        if visited[start / 2] {
            continue;
        }
        let mut edges = Vec::new();
        let mut slot = start;
        loop {
            let id = slot / 2;
            visited[id] = true;
            edges.push(id);
            let other = slot ^ 1;
            if free[other] {
                break;
            }
            slot = partner[other];
        }
        let (step, gain) = tally(&edges);
        if step.l1_norm() != 2 {
            return Err(Error::Invariant(format!(
                "alternating path with step {step}"
            )));
        }
        paths.push(AlternatingPath { step, gain, edges });
    }

    let mut cycles = Vec::new();
    for id in diff.ids() {
        if visited[id] {
            continue;
        }
        let mut edges = Vec::new();
        let mut slot = 2 * id;
        loop {
            let cur = slot / 2;
            if visited[cur] {
                break;
            }
            visited[cur] = true;
            edges.push(cur);
            slot = partner[slot ^ 1];
        }
        let (step, gain) = tally(&edges);
        if step.l1_norm() != 0 {
            return Err(Error::Invariant(format!(
                "alternating cycle with step {step}"
            )));
        }
        cycles.push(AlternatingCycle { gain, edges });
    }

    Ok(TwoStepDecomposition { paths, cycles })
}

/// Parity constraints rewritten as exact degree demands on a graph with extra
/// zero-weight loops. Edges `0..original_edges` are the original ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityReduction {
    pub graph: MultiGraph,
    pub demand: IntVector,
    pub original_edges: usize,
}

impl ParityReduction {
    /// Drops the added loops.
    pub fn decode(&self, f: &Factor) -> Factor {
        Factor::from_ids(
            self.original_edges,
            &f.ids()
                .into_iter()
                .filter(|&id| id < self.original_edges)
                .collect::<Vec<_>>(),
        )
        .expect("ids below original edge count")
    }
}

/// Intervals are first cut to `[0, deg_G(v)]`, the only attainable degrees;
/// `None` when some interval becomes empty. Then `(hi - lo) / 2` loops are
/// added at `v` and the demand is `hi`.
pub fn parity_to_bfactor(
    g: &MultiGraph,
    product: &ParityProduct,
) -> Result<Option<ParityReduction>> {
    if product.dim() != g.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: g.vertex_count(),
            got: product.dim(),
        });
    }
    let deg = g.degrees();
    let mut edges = g.edges().to_vec();
    let mut demand = Vec::with_capacity(g.vertex_count());
    for (v, iv) in product.intervals().iter().enumerate() {
        let Some(cut) = iv.restrict(0, deg[v]) else {
            return Ok(None);
        };
        for _ in 0..(cut.hi() - cut.lo()) / 2 {
            edges.push(Edge { u: v, v, weight: 0 });
        }
        demand.push(cut.hi());
    }
    Ok(Some(ParityReduction {
        graph: MultiGraph {
            n: g.vertex_count(),
            edges,
        },
        demand: IntVector::from(demand),
        original_edges: g.edge_count(),
    }))
}

/// Vertex-splitting gadget turning a `b`-factor problem into perfect matching.
///
/// Node layout: the `b(0)` copies of vertex 0, then those of vertex 1, and so
/// on; then two nodes per edge in id order. For edge `e = (u, v)` the nodes
/// are `e_u, e_v`, joined by a weight-0 inner edge, with spokes of weight
/// `w(e)` from `e_u` to every copy of `u` and from `e_v` to every copy of `v`
/// (both gadget nodes of a loop attach to the copies of its vertex). Taking
/// `e` uses both spokes, so a perfect matching of weight `W` is a `b`-factor of
/// weight `W / 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BFactorGadget {
    pub graph: MatchingGraph,
    /// First copy of each vertex; copies of `v` are `copy_start[v]..copy_start[v + 1]`.
    copy_start: Vec<usize>,
    /// `(e_u, e_v)` per original edge.
    edge_nodes: Vec<(usize, usize)>,
}

/// `None` when some demand is negative or exceeds the degree, or `Σ b` is odd.
pub fn bfactor_to_matching(g: &MultiGraph, demand: &IntVector) -> Result<Option<BFactorGadget>> {
    if demand.len() != g.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: g.vertex_count(),
            got: demand.len(),
        });
    }
    let deg = g.degrees();
    if demand.iter().zip(deg.iter()).any(|(&b, &d)| b < 0 || b > d)
        || demand.iter().sum::<i64>() % 2 != 0
    {
        return Ok(None);
    }
    let mut copy_start = Vec::with_capacity(g.vertex_count() + 1);
    let mut next = 0usize;
    for &b in demand.iter() {
        copy_start.push(next);
        next += b as usize;
    }
    copy_start.push(next);
    let copies = |v: usize| copy_start[v]..copy_start[v + 1];

    let mut edge_nodes = Vec::with_capacity(g.edge_count());
    let mut medges = Vec::new();
    for e in g.edges() {
        let (a, b) = (next, next + 1);
        next += 2;
        edge_nodes.push((a, b));
        medges.push((a, b, 0));
        for c in copies(e.u) {
            medges.push((c, a, e.weight));
        }
        for c in copies(e.v) {
            medges.push((b, c, e.weight));
        }
    }
    Ok(Some(BFactorGadget {
        graph: MatchingGraph::new(next, medges)?,
        copy_start,
        edge_nodes,
    }))
}

impl BFactorGadget {
    /// Edge `e` is selected exactly when its inner edge is not matched.
    pub fn decode(&self, m: &Matching) -> Factor {
        let mate = m.mates(self.graph.node_count());
        let used = self
            .edge_nodes
            .iter()
            .map(|&(a, b)| mate[a] != Some(b))
            .collect();
        Factor { used }
    }

    /// The perfect matching corresponding to a `b`-factor `f` of `g`.
    /// Copies of each vertex are handed out to selected edge ends in id order.
    pub fn encode(&self, g: &MultiGraph, f: &Factor) -> Result<Matching> {
        let mut next_copy: Vec<usize> = self.copy_start[..g.vertex_count()].to_vec();
        let mut take = |v: usize| -> Result<usize> {
            let c = next_copy[v];
            if c >= self.copy_start[v + 1] {
                return Err(Error::Precondition(format!(
                    "factor exceeds demand at vertex {v}"
                )));
            }
            next_copy[v] += 1;
            Ok(c)
        };
        let mut pairs = Vec::new();
        let mut weight = 0;
        for (id, e) in g.edges().iter().enumerate() {
            let (a, b) = self.edge_nodes[id];
            if f.contains(id) {
                let cu = take(e.u)?;
                let cv = take(e.v)?;
                pairs.push((cu.min(a), cu.max(a)));
                pairs.push((cv.min(b), cv.max(b)));
                weight += 2 * e.weight;
            } else {
                pairs.push((a, b));
            }
        }
        if next_copy
            .iter()
            .zip(&self.copy_start[1..])
            .any(|(used, end)| used != end)
        {
            return Err(Error::Precondition("factor falls short of demand".into()));
        }
        pairs.sort_unstable();
        Ok(Matching {
            pairs,
            weight,
            certified: false,
        })
    }
}

/// Exact maximum-weight `(a, b)`-parity factor oracle over `J = { d_F }`.
#[derive(Clone, Debug)]
pub struct GeneralFactorOracle {
    graph: MultiGraph,
}

impl GeneralFactorOracle {
    pub fn new(graph: MultiGraph) -> Self {
        GeneralFactorOracle { graph }
    }

    pub fn graph(&self) -> &MultiGraph {
        &self.graph
    }
}

impl JumpOracle for GeneralFactorOracle {
    type Witness = Factor;

    fn dim(&self) -> usize {
        self.graph.vertex_count()
    }

    fn maximize(&self, product: &ParityProduct) -> Result<OracleAnswer<Factor>> {
        oracle_parity_factor(&self.graph, product)
    }
}

/// Maximum-weight `F` with `d_F(v) ∈ B'(v)` for all `v`.
pub fn oracle_parity_factor(
    g: &MultiGraph,
    product: &ParityProduct,
) -> Result<OracleAnswer<Factor>> {
    let Some(reduction) = parity_to_bfactor(g, product)? else {
        return Ok(OracleAnswer::Infeasible);
    };
    let Some(gadget) = bfactor_to_matching(&reduction.graph, &reduction.demand)? else {
        return Ok(OracleAnswer::Infeasible);
    };
    let Some(matching) = max_weight_perfect_matching(&gadget.graph) else {
        return Ok(OracleAnswer::Infeasible);
    };
    let factor = reduction.decode(&gadget.decode(&matching));
    let value = factor_weight(g, &factor);
    if 2 * value != matching.weight {
        return Err(Error::Invariant(format!(
            "matching weight {} does not decode to factor weight {value}",
            matching.weight
        )));
    }
    Ok(OracleAnswer::Feasible(Optimum {
        value,
        point: degree_sequence(g, &factor),
        witness: factor,
    }))
}

/// Hard cap on exhaustive initial-solution search.
pub const INITIAL_SEARCH_CAP: u64 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InitialStrategy {
    Provided(Factor),
    /// Enumerate all edge subsets, up to `max_subsets` (clamped to [`INITIAL_SEARCH_CAP`]).
    BruteForce {
        max_subsets: u64,
    },
}

/// Checks `d_F ∈ B`, reporting the first violating vertex.
pub fn check_factor(g: &MultiGraph, profile: &BProfile, f: &Factor) -> Result<()> {
    if f.edge_universe() != g.edge_count() {
        return Err(Error::DimensionMismatch {
            expected: g.edge_count(),
            got: f.edge_universe(),
        });
    }
    let d = degree_sequence(g, f);
    for (v, &deg) in d.iter().enumerate() {
        if !profile.set(v).contains(deg) {
            return Err(Error::InfeasibleStart {
                vertex: v,
                degree: deg,
            });
        }
    }
    Ok(())
}

/// A factor with `d_F ∈ B`. `Ok(None)` certifies that no subset of `E` works.
pub fn initial_factor(
    g: &MultiGraph,
    profile: &BProfile,
    strategy: &InitialStrategy,
) -> Result<Option<Factor>> {
    if profile.dim() != g.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: g.vertex_count(),
            got: profile.dim(),
        });
    }
    match strategy {
        InitialStrategy::Provided(f) => {
            check_factor(g, profile, f)?;
            Ok(Some(f.clone()))
        }
        InitialStrategy::BruteForce { max_subsets } => {
            let m = g.edge_count();
            let budget = (*max_subsets).min(INITIAL_SEARCH_CAP);
            let needed = 1u128 << m.min(127);
            if m >= 64 || needed > budget as u128 {
                return Err(Error::BudgetExceeded { needed, budget });
            }
            // Gray-code walk so each subset costs one edge toggle.
            let mut deg = vec![0i64; g.vertex_count()];
            let mut bad = (0..g.vertex_count())
                .filter(|&v| !profile.set(v).contains(0))
                .count();
            let mut mask = 0u64;
            for i in 0u64..(1u64 << m) {
                if i > 0 {
                    let k = i.trailing_zeros() as usize;
                    let e = g.edge(k);
                    let sign = if mask >> k & 1 == 1 { -1 } else { 1 };
                    mask ^= 1 << k;
                    for v in [e.u, e.v] {
                        let before = profile.set(v).contains(deg[v]);
                        deg[v] += sign;
                        let after = profile.set(v).contains(deg[v]);
                        match (before, after) {
                            (true, false) => bad += 1,
                            (false, true) => bad -= 1,
                            _ => {}
                        }
                    }
                }
                if bad == 0 {
                    return Ok(Some(Factor::from_mask(m, mask)));
                }
            }
            Ok(None)
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    /// Maximize `|F|` (every weight treated as 1).
    Cardinality,
    #[default]
    Weighted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorSolution {
    Optimal {
        factor: Factor,
        /// `w(F)`, or `|F|` for the cardinality objective.
        value: i64,
        degrees: IntVector,
        trace: SearchTrace,
    },
    Infeasible,
}

/// Maximum-weight `B`-factor by local search over degree sequences.
pub fn solve_general_factor(
    g: &MultiGraph,
    profile: &BProfile,
    objective: Objective,
    initial: &InitialStrategy,
) -> Result<FactorSolution> {
    let graph = match objective {
        Objective::Cardinality => g.with_unit_weights(),
        Objective::Weighted => g.clone(),
    };
    let Some(f0) = initial_factor(&graph, profile, initial)? else {
        return Ok(FactorSolution::Infeasible);
    };
    let oracle = GeneralFactorOracle::new(graph);
    let x0 = degree_sequence(oracle.graph(), &f0);
    let out = local_search(&oracle, profile, &x0)?;
    if degree_sequence(oracle.graph(), &out.witness) != out.point
        || factor_weight(oracle.graph(), &out.witness) != out.value
    {
        return Err(Error::Invariant(
            "final witness does not match the search point".into(),
        ));
    }
    Ok(FactorSolution::Optimal {
        factor: out.witness,
        value: out.value,
        degrees: out.point,
        trace: out.trace,
    })
}

/// `ParityInterval` shorthand used by callers building products by hand.
pub fn parity_product(bounds: &[(i64, i64)]) -> Result<ParityProduct> {
    Ok(ParityProduct::new(
        bounds
            .iter()
            .map(|&(lo, hi)| ParityInterval::new(lo, hi))
            .collect::<Result<Vec<_>>>()?,
    ))
}
