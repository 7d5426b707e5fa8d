//! Exhaustive reference oracles. Slow on purpose and kept obviously correct;
//! everything else is checked against these.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphfactor::{degree_sequence, factor_weight, Factor, MultiGraph};
use crate::jumpcore::{JumpOracle, Optimum, OracleAnswer};
use crate::parityset::{BProfile, IntVector, ParityProduct};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationBudget {
    pub max_subsets: u64,
    pub max_points: u64,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget {
            max_subsets: 1 << 20,
            max_points: 1_000_000,
        }
    }
}

impl EnumerationBudget {
    pub fn new(max_subsets: u64, max_points: u64) -> Result<Self> {
        if max_subsets == 0 || max_points == 0 {
            return Err(Error::Precondition("budgets must be positive".into()));
        }
        Ok(EnumerationBudget {
            max_subsets,
            max_points,
        })
    }

    fn check_subsets(&self, m: usize) -> Result<()> {
        let needed = 1u128 << m.min(127);
        if m >= 64 || needed > self.max_subsets as u128 {
            return Err(Error::BudgetExceeded {
                needed,
                budget: self.max_subsets,
            });
        }
        Ok(())
    }
}

/// Calls `visit` on every edge subset in increasing mask order.
fn for_each_subset(
    g: &MultiGraph,
    budget: &EnumerationBudget,
    mut visit: impl FnMut(Factor),
) -> Result<()> {
    let m = g.edge_count();
    budget.check_subsets(m)?;
    for mask in 0..(1u64 << m) {
        visit(Factor::from_mask(m, mask));
    }
    Ok(())
}

/// Higher weight first, then the smaller degree vector, then the earlier subset.
fn better(value: i64, point: &IntVector, best: &Option<Optimum<Factor>>) -> bool {
    match best {
        None => true,
        Some(b) => value > b.value || (value == b.value && *point < b.point),
    }
}

/// Maximum-weight `F` with `d_F ∈ B` by full enumeration.
pub fn brute_optimal_factor(
    g: &MultiGraph,
    profile: &BProfile,
    budget: &EnumerationBudget,
) -> Result<Option<(Factor, i64)>> {
    let mut best: Option<Optimum<Factor>> = None;
    for_each_subset(g, budget, |f| {
        let d = degree_sequence(g, &f);
        if profile.contains(&d) {
            let w = factor_weight(g, &f);
            if better(w, &d, &best) {
                best = Some(Optimum {
                    value: w,
                    point: d,
                    witness: f,
                });
            }
        }
    })?;
    Ok(best.map(|b| (b.witness, b.value)))
}

/// Maximum-weight `F` with `d_F ∈ B'` by full enumeration.
pub fn brute_oracle(
    g: &MultiGraph,
    product: &ParityProduct,
    budget: &EnumerationBudget,
) -> Result<OracleAnswer<Factor>> {
    if product.dim() != g.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: g.vertex_count(),
            got: product.dim(),
        });
    }
    let mut best: Option<Optimum<Factor>> = None;
    for_each_subset(g, budget, |f| {
        let d = degree_sequence(g, &f);
        if product.contains(&d) {
            let w = factor_weight(g, &f);
            if better(w, &d, &best) {
                best = Some(Optimum {
                    value: w,
                    point: d,
                    witness: f,
                });
            }
        }
    })?;
    Ok(best.map_or(OracleAnswer::Infeasible, OracleAnswer::Feasible))
}

/// `f(x) = max { w(F) : d_F = x }` for every `x ∈ J`, with a maximizing `F`.
pub fn valuation_table(
    g: &MultiGraph,
    budget: &EnumerationBudget,
) -> Result<BTreeMap<IntVector, (i64, Factor)>> {
    let mut table: BTreeMap<IntVector, (i64, Factor)> = BTreeMap::new();
    for_each_subset(g, budget, |f| {
        let d = degree_sequence(g, &f);
        let w = factor_weight(g, &f);
        match table.get(&d) {
            Some((bw, _)) if *bw >= w => {}
            _ => {
                table.insert(d, (w, f));
            }
        }
    })?;
    Ok(table)
}

/// Every point of `B`, lexicographically.
pub fn enumerate_profile(profile: &BProfile, budget: &EnumerationBudget) -> Result<Vec<IntVector>> {
    let needed = profile
        .sets()
        .iter()
        .fold(1u128, |acc, s| acc.saturating_mul(s.len() as u128));
    if needed > budget.max_points as u128 {
        return Err(Error::BudgetExceeded {
            needed,
            budget: budget.max_points,
        });
    }
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for s in profile.sets() {
        out = out
            .into_iter()
            .flat_map(|p| {
                s.elements().iter().map(move |&a| {
                    let mut q = p.clone();
                    q.push(a);
                    q
                })
            })
            .collect();
    }
    Ok(out.into_iter().map(IntVector::from).collect())
}

/// `{ x' ∈ B : dist_B(x, x') <= r }`, lexicographically.
pub fn brute_ball(
    profile: &BProfile,
    x: &IntVector,
    r: u64,
    budget: &EnumerationBudget,
) -> Result<Vec<IntVector>> {
    profile.check_in_box(x)?;
    let mut out = Vec::new();
    for y in enumerate_profile(profile, budget)? {
        if profile.dist(x, &y)? <= r {
            out.push(y);
        }
    }
    Ok(out)
}

/// Oracle backed by [`brute_oracle`].
#[derive(Clone, Debug)]
pub struct BruteFactorOracle {
    graph: MultiGraph,
    budget: EnumerationBudget,
}

impl BruteFactorOracle {
    pub fn new(graph: MultiGraph, budget: EnumerationBudget) -> Self {
        BruteFactorOracle { graph, budget }
    }
}

impl JumpOracle for BruteFactorOracle {
    type Witness = Factor;

    fn dim(&self) -> usize {
        self.graph.vertex_count()
    }

    fn maximize(&self, product: &ParityProduct) -> Result<OracleAnswer<Factor>> {
        brute_oracle(&self.graph, product, &self.budget)
    }
}

/// A finite jump system given as an explicit table `x ↦ f(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableOracle {
    dim: usize,
    table: BTreeMap<IntVector, i64>,
}

impl TableOracle {
    pub fn new(dim: usize, table: BTreeMap<IntVector, i64>) -> Result<Self> {
        if let Some(x) = table.keys().find(|x| x.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: x.len(),
            });
        }
        Ok(TableOracle { dim, table })
    }

    pub fn table(&self) -> &BTreeMap<IntVector, i64> {
        &self.table
    }
}

impl JumpOracle for TableOracle {
    type Witness = ();

    fn dim(&self) -> usize {
        self.dim
    }

    fn maximize(&self, product: &ParityProduct) -> Result<OracleAnswer<()>> {
        let mut best: Option<Optimum<()>> = None;
        // BTreeMap order makes the first maximum the lexicographically smallest.
        for (x, &v) in &self.table {
            if product.contains(x) && best.as_ref().is_none_or(|b| v > b.value) {
                best = Some(Optimum {
                    value: v,
                    point: x.clone(),
                    witness: (),
                });
            }
        }
        Ok(best.map_or(OracleAnswer::Infeasible, OracleAnswer::Feasible))
    }
}
