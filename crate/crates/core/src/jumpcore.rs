//! Local search over the intersection of a jump system `J` with a box `B`.
//!
//! The jump system is only reachable through a [`JumpOracle`], which
//! maximizes the objective over `J ∩ B'` for a product `B'` of parity
//! intervals. Each step of [`local_search`] queries the oracle on the
//! products partitioning the `dist_B <= 2` ball around the current point and
//! moves to the best answer, stopping once the value no longer increases.
//! Linear objectives and valuated ones go through the same driver: the
//! oracle owns the objective.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parityset::{BProfile, IntVector, ParityInterval, ParityProduct};

/// A maximizer reported by an oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Optimum<W> {
    pub value: i64,
    pub point: IntVector,
    pub witness: W,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleAnswer<W> {
    Feasible(Optimum<W>),
    Infeasible,
}

impl<W> OracleAnswer<W> {
    pub fn is_feasible(&self) -> bool {
        matches!(self, OracleAnswer::Feasible(_))
    }

    pub fn feasible(&self) -> Option<&Optimum<W>> {
        match self {
            OracleAnswer::Feasible(o) => Some(o),
            OracleAnswer::Infeasible => None,
        }
    }

    pub fn into_feasible(self) -> Option<Optimum<W>> {
        match self {
            OracleAnswer::Feasible(o) => Some(o),
            OracleAnswer::Infeasible => None,
        }
    }

    pub fn value(&self) -> Option<i64> {
        self.feasible().map(|o| o.value)
    }
}

/// Exact maximization over `J ∩ B'` for a product of parity intervals `B'`.
///
/// Implementations must be deterministic and return a true maximizer whose
/// point lies in the queried product.
pub trait JumpOracle {
    /// Instantiation-specific certificate for the returned point.
    type Witness: Clone;

    fn dim(&self) -> usize;

    fn maximize(&self, product: &ParityProduct) -> Result<OracleAnswer<Self::Witness>>;
}

impl<O: JumpOracle + ?Sized> JumpOracle for &O {
    type Witness = O::Witness;

    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn maximize(&self, product: &ParityProduct) -> Result<OracleAnswer<Self::Witness>> {
        (**self).maximize(product)
    }
}

/// Higher value wins; equal values go to the lexicographically smaller point.
fn prefer<W>(a: &Optimum<W>, b: &Optimum<W>) -> Ordering {
    a.value.cmp(&b.value).then_with(|| b.point.cmp(&a.point))
}

/// `x ∈ J`, via the singleton product at `x`.
pub fn membership<O: JumpOracle>(oracle: &O, x: &IntVector) -> Result<bool> {
    Ok(oracle.maximize(&ParityProduct::singleton(x))?.is_feasible())
}

/// Best point of `J ∩ B` within `dist_B <= 2` of `x`, with the number of
/// oracle calls spent.
pub fn best_in_neighborhood<O: JumpOracle>(
    oracle: &O,
    profile: &BProfile,
    x: &IntVector,
) -> Result<(Optimum<O::Witness>, usize)> {
    let products = profile.neighborhood_products(x)?;
    let mut best: Option<Optimum<O::Witness>> = None;
    for product in &products {
        if let OracleAnswer::Feasible(ans) = oracle.maximize(product)? {
            if best
                .as_ref()
                .is_none_or(|b| prefer(&ans, b) == Ordering::Greater)
            {
                best = Some(ans);
            }
        }
    }
    best.map(|b| (b, products.len()))
        .ok_or(Error::NotInJumpSystem)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchTrace {
    /// Loop passes, including the final non-improving one.
    pub iterations: usize,
    pub oracle_calls: usize,
    /// Value at the start, then the neighborhood optimum of every pass. Strictly
    /// increasing except for the final repeat.
    pub value_sequence: Vec<i64>,
    /// Points visited, starting with `x0`.
    pub point_sequence: Vec<IntVector>,
    pub final_point: IntVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome<W> {
    pub point: IntVector,
    pub value: i64,
    /// Oracle witness for `point`: from the last accepted step, or from the
    /// membership query at `x0` when no step was taken.
    pub witness: W,
    pub trace: SearchTrace,
}

/// Runs the local search from `x0 ∈ J ∩ B` to a point with no better
/// neighbor at `dist_B <= 2`.
pub fn local_search<O: JumpOracle>(
    oracle: &O,
    profile: &BProfile,
    x0: &IntVector,
) -> Result<SearchOutcome<O::Witness>> {
    profile.check_member(x0)?;
    let start = oracle
        .maximize(&ParityProduct::singleton(x0))?
        .into_feasible()
        .ok_or(Error::NotInJumpSystem)?;

    let mut x = start.point;
    let mut value = start.value;
    let mut witness = start.witness;
    let mut trace = SearchTrace {
        iterations: 0,
        oracle_calls: 1,
        value_sequence: vec![value],
        point_sequence: vec![x.clone()],
        final_point: x.clone(),
    };

    loop {
        trace.iterations += 1;
        let (best, calls) = best_in_neighborhood(oracle, profile, &x)?;
        trace.oracle_calls += calls;
        trace.value_sequence.push(best.value);
        match best.value.cmp(&value) {
            Ordering::Equal => break,
            Ordering::Less => {
                return Err(Error::Invariant(format!(
                    "neighborhood optimum {} below current value {value}",
                    best.value
                )))
            }
            Ordering::Greater => {
                x = best.point;
                value = best.value;
                witness = best.witness;
                trace.point_sequence.push(x.clone());
            }
        }
    }

    trace.final_point = x.clone();
    Ok(SearchOutcome {
        point: x,
        value,
        witness,
        trace,
    })
}

/// Degree vectors of bases of a partition matroid:
/// `J = { x : Σ_v x(v) = total, 0 <= x(v) <= capacity(v) }`, objective `c^T x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionSystemOracle {
    capacities: Vec<i64>,
    total: i64,
    objective: IntVector,
}

impl PartitionSystemOracle {
    pub fn new(capacities: Vec<i64>, total: i64, objective: IntVector) -> Result<Self> {
        if capacities.len() != objective.len() {
            return Err(Error::DimensionMismatch {
                expected: capacities.len(),
                got: objective.len(),
            });
        }
        if total < 0 || capacities.iter().any(|&u| u < 0) {
            return Err(Error::Precondition(
                "capacities and total must be nonnegative".into(),
            ));
        }
        Ok(PartitionSystemOracle {
            capacities,
            total,
            objective,
        })
    }

    pub fn objective(&self) -> &IntVector {
        &self.objective
    }

    pub fn capacities(&self) -> &[i64] {
        &self.capacities
    }

    pub fn total(&self) -> i64 {
        self.total
    }
}

impl JumpOracle for PartitionSystemOracle {
    type Witness = ();

    fn dim(&self) -> usize {
        self.capacities.len()
    }

    /// Dynamic program over vertices and running sum. Among maximizers the
    /// lexicographically smallest point is returned.
    fn maximize(&self, product: &ParityProduct) -> Result<OracleAnswer<()>> {
        let n = self.dim();
        if product.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: product.dim(),
            });
        }
        let r = self.total as usize;
        let choices: Vec<Option<ParityInterval>> = product
            .intervals()
            .iter()
            .zip(&self.capacities)
            .map(|(iv, &u)| iv.restrict(0, u.min(self.total)))
            .collect();
        if choices.iter().any(Option::is_none) {
            return Ok(OracleAnswer::Infeasible);
        }

        // suffix[v][s]: best value placing exactly s units on vertices v..n
        let mut suffix = vec![vec![None::<i128>; r + 1]; n + 1];
        suffix[n][0] = Some(0);
        for v in (0..n).rev() {
            let iv = choices[v].unwrap();
            let c = self.objective[v] as i128;
            for s in 0..=r {
                let mut best = None;
                for a in iv.members().take_while(|&a| a as usize <= s) {
                    if let Some(rest) = suffix[v + 1][s - a as usize] {
                        let val = rest + c * a as i128;
                        if best.is_none_or(|b| val > b) {
                            best = Some(val);
                        }
                    }
                }
                suffix[v][s] = best;
            }
        }

        let Some(total_value) = suffix[0][r] else {
            return Ok(OracleAnswer::Infeasible);
        };
        let mut point = Vec::with_capacity(n);
        let mut s = r;
        for v in 0..n {
            let c = self.objective[v] as i128;
            let a = choices[v]
                .unwrap()
                .members()
                .take_while(|&a| a as usize <= s)
                .find(|&a| {
                    suffix[v + 1][s - a as usize]
                        .is_some_and(|rest| rest + c * a as i128 == suffix[v][s].unwrap())
                })
                .expect("reconstruction follows the table");
            point.push(a);
            s -= a as usize;
        }
        let value = i64::try_from(total_value).map_err(|_| Error::Overflow)?;
        Ok(OracleAnswer::Feasible(Optimum {
            value,
            point: IntVector::from(point),
            witness: (),
        }))
    }
}
