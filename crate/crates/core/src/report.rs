//! Machine-readable results of the CLI operations. Field order is part of the
//! format; solve and oracle reports hold no timings, so equal inputs give
//! byte-identical output.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bruteforce::{brute_optimal_factor, brute_oracle, EnumerationBudget};
use crate::error::{Error, Result};
use crate::graphfactor::{
    check_factor, degree_sequence, factor_weight, oracle_parity_factor, solve_general_factor,
    Factor, FactorSolution, InitialStrategy, Objective,
};
use crate::instance::Instance;
use crate::lemmalab::{run_suite, Suite, SuiteReport};
use crate::parityset::ParityProduct;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Optimal,
    Infeasible,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    LocalSearch,
    Matching,
    BruteForce,
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    /// Overrides the objective stored in the instance.
    pub objective: Option<Objective>,
    pub brute: bool,
    pub budget: EnumerationBudget,
    /// Overrides the initial factor stored in the instance.
    pub initial: Option<Factor>,
    /// Search for a start by enumeration when the given one violates `B`.
    pub fallback: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: Status,
    pub objective: Objective,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degrees: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_calls: Option<usize>,
}

impl SolveReport {
    fn infeasible(objective: Objective, method: Method) -> Self {
        SolveReport {
            status: Status::Infeasible,
            objective,
            method,
            value: None,
            edges: None,
            degrees: None,
            iterations: None,
            oracle_calls: None,
        }
    }
}

pub fn solve_instance(inst: &Instance, opts: &SolveOptions) -> Result<SolveReport> {
    let objective = opts.objective.or(inst.objective).unwrap_or_default();
    let graph = match objective {
        Objective::Cardinality => inst.graph.with_unit_weights(),
        Objective::Weighted => inst.graph.clone(),
    };
    if opts.brute {
        return Ok(
            match brute_optimal_factor(&graph, &inst.profile, &opts.budget)? {
                None => SolveReport::infeasible(objective, Method::BruteForce),
                Some((f, value)) => SolveReport {
                    status: Status::Optimal,
                    objective,
                    method: Method::BruteForce,
                    value: Some(value),
                    edges: Some(f.ids()),
                    degrees: Some(degree_sequence(&graph, &f).into_inner()),
                    iterations: None,
                    oracle_calls: None,
                },
            },
        );
    }
    let search = InitialStrategy::BruteForce {
        max_subsets: opts.budget.max_subsets,
    };
    let strategy = match opts.initial.as_ref().or(inst.initial.as_ref()) {
        None => search,
        Some(f) => match check_factor(&graph, &inst.profile, f) {
            Ok(()) => InitialStrategy::Provided(f.clone()),
            Err(Error::InfeasibleStart { .. }) if opts.fallback => search,
            Err(e) => return Err(e),
        },
    };
    Ok(
        match solve_general_factor(&inst.graph, &inst.profile, objective, &strategy)? {
            FactorSolution::Infeasible => SolveReport::infeasible(objective, Method::LocalSearch),
            FactorSolution::Optimal {
                factor,
                value,
                degrees,
                trace,
            } => SolveReport {
                status: Status::Optimal,
                objective,
                method: Method::LocalSearch,
                value: Some(value),
                edges: Some(factor.ids()),
                degrees: Some(degrees.into_inner()),
                iterations: Some(trace.iterations),
                oracle_calls: Some(trace.oracle_calls),
            },
        },
    )
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for SolveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let objective = match self.objective {
            Objective::Cardinality => "cardinality",
            Objective::Weighted => "weighted",
        };
        match self.status {
            Status::Infeasible => {
                writeln!(f, "infeasible: no factor with degrees in B ({objective})")
            }
            Status::Optimal => {
                writeln!(
                    f,
                    "optimal {objective} value: {}",
                    self.value.unwrap_or_default()
                )?;
                writeln!(
                    f,
                    "edges: {}",
                    join(self.edges.as_deref().unwrap_or_default())
                )?;
                writeln!(
                    f,
                    "degrees: {}",
                    join(self.degrees.as_deref().unwrap_or_default())
                )?;
                if let (Some(it), Some(calls)) = (self.iterations, self.oracle_calls) {
                    writeln!(f, "iterations: {it}, oracle calls: {calls}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub product: String,
    pub method: Method,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degrees: Option<Vec<i64>>,
}

/// One maximization over `product` with the instance's edge weights.
pub fn oracle_instance(
    inst: &Instance,
    product: &ParityProduct,
    brute: bool,
    budget: &EnumerationBudget,
) -> Result<OracleReport> {
    let (method, answer) = if brute {
        (
            Method::BruteForce,
            brute_oracle(&inst.graph, product, budget)?,
        )
    } else {
        (
            Method::Matching,
            oracle_parity_factor(&inst.graph, product)?,
        )
    };
    let mut report = OracleReport {
        product: product.to_string(),
        method,
        status: Status::Infeasible,
        value: None,
        edges: None,
        degrees: None,
    };
    if let Some(opt) = answer.into_feasible() {
        debug_assert_eq!(factor_weight(&inst.graph, &opt.witness), opt.value);
        report.status = Status::Optimal;
        report.value = Some(opt.value);
        report.edges = Some(opt.witness.ids());
        report.degrees = Some(opt.point.into_inner());
    }
    Ok(report)
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.status {
            Status::Infeasible => writeln!(f, "product {}: infeasible", self.product),
            Status::Optimal => {
                writeln!(
                    f,
                    "product {}: value {}",
                    self.product,
                    self.value.unwrap_or_default()
                )?;
                writeln!(
                    f,
                    "edges: {}",
                    join(self.edges.as_deref().unwrap_or_default())
                )?;
                writeln!(
                    f,
                    "degrees: {}",
                    join(self.degrees.as_deref().unwrap_or_default())
                )
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

/// Runs each suite with `trials` trials, or its default count when `None`.
pub fn verify(suites: &[Suite], seed: u64, trials: Option<u64>) -> VerifyReport {
    let suites: Vec<SuiteReport> = suites
        .iter()
        .map(|&s| run_suite(s, seed, trials.unwrap_or_else(|| s.default_trials())))
        .collect();
    VerifyReport {
        seed,
        passed: suites.iter().all(SuiteReport::passed),
        suites,
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.suites {
            let verdict = if r.passed() { "PASS" } else { "FAIL" };
            writeln!(
                f,
                "{verdict} {:<10} trials={} failures={} seed={}",
                r.suite.name(),
                r.trials,
                r.failures,
                r.seed
            )?;
            if let Some(first) = &r.first_failure {
                writeln!(
                    f,
                    "  first failure: trial {} (trial seed {}): {}",
                    first.trial, first.trial_seed, first.detail
                )?;
            }
        }
        writeln!(
            f,
            "{}",
            if self.passed {
                "all suites passed"
            } else {
                "some suites failed"
            }
        )
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphfactor::MultiGraph;
    use crate::parityset::BProfile;

    fn k3() -> Instance {
        let g = MultiGraph::from_triples(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap();
        Instance::new(g, BProfile::from_lists(vec![vec![0, 1, 2]; 3]).unwrap())
    }

    #[test]
    fn k3_cardinality() {
        let opts = SolveOptions {
            objective: Some(Objective::Cardinality),
            ..Default::default()
        };
        let r = solve_instance(&k3(), &opts).unwrap();
        assert_eq!(r.status, Status::Optimal);
        assert_eq!(r.value, Some(3));
        assert_eq!(r.degrees, Some(vec![2, 2, 2]));
        let brute = solve_instance(
            &k3(),
            &SolveOptions {
                brute: true,
                ..opts
            },
        )
        .unwrap();
        assert_eq!(brute.value, Some(3));
        assert_eq!(brute.method, Method::BruteForce);
    }

    #[test]
    fn path_with_all_ones_is_infeasible() {
        let g = MultiGraph::from_triples(3, &[(0, 1, 1), (1, 2, 1)]).unwrap();
        let inst = Instance::new(g, BProfile::from_lists(vec![vec![1]; 3]).unwrap());
        let r = solve_instance(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(r.status, Status::Infeasible);
        assert_eq!(to_json(&r), "{\n  \"status\": \"infeasible\",\n  \"objective\": \"weighted\",\n  \"method\": \"local-search\"\n}\n");
    }

    #[test]
    fn infeasible_start_needs_fallback() {
        let mut inst = k3();
        inst.initial = Some(Factor::from_ids(3, &[0]).unwrap());
        inst.profile = BProfile::from_lists([vec![0, 2], vec![0, 2], vec![0, 2]]).unwrap();
        assert!(matches!(
            solve_instance(&inst, &SolveOptions::default()),
            Err(Error::InfeasibleStart { .. })
        ));
        let r = solve_instance(
            &inst,
            &SolveOptions {
                fallback: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.value, Some(3));
    }

    #[test]
    fn oracle_matches_brute() {
        let g = MultiGraph::from_triples(3, &[(0, 1, 2), (1, 2, 5)]).unwrap();
        let inst = Instance::new(g, BProfile::from_lists(vec![vec![0, 1]; 3]).unwrap());
        let p: ParityProduct = "1,2,1".parse().unwrap();
        let a = oracle_instance(&inst, &p, false, &EnumerationBudget::default()).unwrap();
        let b = oracle_instance(&inst, &p, true, &EnumerationBudget::default()).unwrap();
        assert_eq!(a.value, Some(7));
        assert_eq!((a.value, &a.edges), (b.value, &b.edges));
    }
}
