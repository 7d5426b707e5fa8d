//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Run with `cargo test -p jumpfactor --test acceptance`.

use std::cell::OnceCell;
use std::collections::BTreeSet;
use std::process::ExitCode;
use std::rc::Rc;
use std::time::Instant;

use jumpfactor::bruteforce::{brute_ball, brute_oracle, EnumerationBudget};
use jumpfactor::generate::{
    random_graph, random_instance, random_parity_product, random_point_in, random_profile,
    rng_from_seed, trial_seed, InstanceParams,
};
use jumpfactor::graphfactor::{degree_sequence, factor_weight, oracle_parity_factor};
use jumpfactor::lemmalab::{check_search_run, run_suite, SearchCheck, Suite};
use jumpfactor::matching::{
    brute_force_perfect_matching, max_weight_perfect_matching, MatchingGraph,
};
use jumpfactor::report::{solve_instance, to_json, verify, SolveOptions};
use jumpfactor::{Instance, Objective, OracleAnswer};
use rand::Rng;

const SEED: u64 = 20_240_601;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(failures: u64, total: u64, what: &str, first: Option<String>) -> Outcome {
    let mut detail = format!("{}/{} {what}", total - failures, total);
    if let Some(f) = first {
        detail.push_str(&format!("; first failure: {f}"));
    }
    Outcome {
        passed: failures == 0,
        detail,
    }
}

fn small_params<R: Rng>(rng: &mut R) -> InstanceParams {
    InstanceParams {
        vertices: rng.random_range(1..=5),
        edges: rng.random_range(0..=8),
        max_b: 4,
        weight_lo: -9,
        weight_hi: 9,
        loop_percent: 10,
    }
}

/// Criterion 1 runs, reused by criterion 8.
fn search_runs() -> Vec<Result<SearchCheck, String>> {
    let budget = EnumerationBudget::default();
    let mut out = Vec::new();
    for t in 0..1000 {
        let mut rng = rng_from_seed(trial_seed(SEED, 1, t));
        let params = small_params(&mut rng);
        let (g, b) = random_instance(&mut rng, &params);
        for objective in [Objective::Cardinality, Objective::Weighted] {
            out.push(
                check_search_run(&g, &b, objective, &budget).map_err(|e| format!("trial {t}: {e}")),
            );
        }
    }
    out
}

fn end_to_end(runs: &[Result<SearchCheck, String>]) -> Outcome {
    let bad: Vec<String> = runs
        .iter()
        .enumerate()
        .filter_map(|(i, r)| match r {
            Ok(c) if c.exact => None,
            Ok(c) => Some(format!("run {i}: {c:?}")),
            Err(e) => Some(e.clone()),
        })
        .collect();
    outcome(
        bad.len() as u64,
        runs.len() as u64,
        "solves equal brute force (1000 instances x 2 objectives)",
        bad.first().cloned(),
    )
}

fn oracle_exactness() -> Outcome {
    let budget = EnumerationBudget::default();
    let mut failures = 0;
    let mut first = None;
    let mut infeasible = 0;
    for t in 0..1000 {
        let mut rng = rng_from_seed(trial_seed(SEED, 2, t));
        let params = small_params(&mut rng);
        let g = random_graph(&mut rng, &params);
        let p = random_parity_product(&mut rng, &g);
        let fast = oracle_parity_factor(&g, &p).unwrap();
        let slow = brute_oracle(&g, &p, &budget).unwrap();
        let witness_ok = match &fast {
            OracleAnswer::Infeasible => {
                infeasible += 1;
                true
            }
            OracleAnswer::Feasible(o) => {
                let d = degree_sequence(&g, &o.witness);
                p.contains(&d) && d == o.point && factor_weight(&g, &o.witness) == o.value
            }
        };
        if fast.value() != slow.value() || !witness_ok {
            failures += 1;
            first.get_or_insert_with(|| {
                format!(
                    "trial {t}: product {p}, {:?} vs {:?}",
                    fast.value(),
                    slow.value()
                )
            });
        }
    }
    let mut o = outcome(failures, 1000, "oracle answers equal brute force", first);
    o.detail.push_str(&format!(" ({infeasible} infeasible)"));
    o
}

fn matching_engine() -> Outcome {
    let mut failures = 0;
    let mut first = None;
    for t in 0..10_000 {
        let mut rng = rng_from_seed(trial_seed(SEED, 3, t));
        let n = rng.random_range(0..=10);
        let density = rng.random_range(0.2..=1.0);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random_bool(density) {
                    edges.push((u, v, rng.random_range(-20..=20)));
                }
            }
        }
        let g = MatchingGraph::new(n, edges).unwrap();
        let fast = max_weight_perfect_matching(&g);
        let slow = brute_force_perfect_matching(&g).unwrap();
        let ok = match (&fast, &slow) {
            (None, None) => true,
            (Some(a), Some(b)) => a.weight == b.weight && a.is_perfect(n) && a.is_valid_for(&g),
            _ => false,
        };
        if !ok {
            failures += 1;
            first.get_or_insert_with(|| {
                format!(
                    "trial {t}: {:?} vs {:?}",
                    fast.map(|m| m.weight),
                    slow.map(|m| m.weight)
                )
            });
        }
    }
    outcome(
        failures,
        10_000,
        "matching weights equal brute force",
        first,
    )
}

fn neighborhood_partition() -> Outcome {
    let budget = EnumerationBudget::default();
    let mut failures = 0;
    let mut first = None;
    for t in 0..200 {
        let mut rng = rng_from_seed(trial_seed(SEED, 4, t));
        let n = rng.random_range(1..=4);
        let b = random_profile(&mut rng, n, 6, -3, 3);
        let x = random_point_in(&mut rng, &b);
        let products = b.neighborhood_products(&x).unwrap();
        let mut union = BTreeSet::new();
        let mut disjoint = true;
        for p in &products {
            for pt in p.points() {
                disjoint &= union.insert(pt);
            }
        }
        let ball: BTreeSet<_> = brute_ball(&b, &x, 2, &budget)
            .unwrap()
            .into_iter()
            .collect();
        let bound = 1 + 4 * n + 2 * n * (n - 1);
        if !(disjoint && union == ball && products.len() <= bound) {
            failures += 1;
            first.get_or_insert_with(|| format!("trial {t}: B={b:?} x={x}"));
        }
    }
    outcome(
        failures,
        200,
        "profiles with exact disjoint cover of the radius-2 ball",
        first,
    )
}

fn suite(s: Suite, trials: u64, what: &str) -> Outcome {
    let r = run_suite(s, SEED, trials);
    let first = r
        .first_failure
        .map(|f| format!("trial {} (seed {}): {}", f.trial, f.trial_seed, f.detail));
    outcome(r.failures, r.trials, what, first)
}

fn improvement_and_bound(runs: &[Result<SearchCheck, String>]) -> Outcome {
    let mut failures = 0;
    let mut first = None;
    let mut max_iterations = 0;
    for (i, r) in runs.iter().enumerate() {
        match r {
            Ok(c) if c.ratio_ok && c.bound_ok => max_iterations = max_iterations.max(c.iterations),
            other => {
                failures += 1;
                first.get_or_insert_with(|| format!("run {i}: {other:?}"));
            }
        }
    }
    let mut o = outcome(
        failures,
        runs.len() as u64,
        "runs satisfy the per-step ratio and the iteration bound",
        first,
    );
    o.detail
        .push_str(&format!(" (at most {max_iterations} iterations)"));
    o
}

fn determinism() -> Outcome {
    let mut failures = 0;
    let mut first = None;
    let opts = SolveOptions::default();
    for t in 0..100 {
        let seed = trial_seed(SEED, 10, t);
        let a = Instance::random(&InstanceParams::default(), seed);
        let b = Instance::random(&InstanceParams::default(), seed);
        let ra = solve_instance(&a, &opts).map(|r| to_json(&r));
        let rb = solve_instance(&Instance::parse(&b.emit()).unwrap(), &opts).map(|r| to_json(&r));
        if a.emit() != b.emit() || ra != rb {
            failures += 1;
            first.get_or_insert_with(|| format!("seed {seed}"));
        }
    }
    let v1 = to_json(&verify(&Suite::ALL, SEED, Some(20)));
    let v2 = to_json(&verify(&Suite::ALL, SEED, Some(20)));
    if v1 != v2 {
        failures += 1;
        first.get_or_insert_with(|| "verify reports differ".into());
    }
    outcome(
        failures,
        101,
        "byte-identical instance/report pairs under equal seeds",
        first,
    )
}

fn main() -> ExitCode {
    type Criterion = Box<dyn FnOnce() -> Outcome>;
    let runs: Rc<OnceCell<Vec<Result<SearchCheck, String>>>> = Rc::default();
    let (r1, r8) = (runs.clone(), runs);
    let criteria: Vec<(&str, Criterion)> = vec![
        (
            "end-to-end exactness",
            Box::new(move || end_to_end(r1.get_or_init(search_runs))),
        ),
        ("oracle exactness", Box::new(oracle_exactness)),
        ("matching engine", Box::new(matching_engine)),
        ("neighborhood partition", Box::new(neighborhood_partition)),
        (
            "parity of dist_B",
            Box::new(|| suite(Suite::Parity, 10_000, "in-box pairs with even parity sum")),
        ),
        (
            "distance-4 midpoint",
            Box::new(|| {
                suite(
                    Suite::Lemma2,
                    1000,
                    "instances solved, revalidated, complement solves swapped",
                )
            }),
        ),
        (
            "distance-2 chains",
            Box::new(|| suite(Suite::Lemma3, 1000, "chains built and validated")),
        ),
        (
            "improvement ratio and iteration bound",
            Box::new(move || improvement_and_bound(r8.get_or_init(search_runs))),
        ),
        (
            "alternating-path witnesses",
            Box::new(|| suite(Suite::Sbo, 200, "factor pairs with valid witnesses")),
        ),
        ("determinism", Box::new(determinism)),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let o = run();
        all &= o.passed;
        println!(
            "criterion {:>2} {} {name}: {} [{:.1}s]",
            i + 1,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if all {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}
