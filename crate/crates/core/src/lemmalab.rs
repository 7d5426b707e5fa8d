//! Randomized falsification harness for the structural facts the local search
//! relies on: the parity identity of `dist_B`, existence of a good half-way
//! point between two points at distance 4, the chain construction between
//! two points at distance `2k`, local-to-global optimality, the per-step
//! improvement ratio and iteration bound, and the exchange properties of the
//! degree-sequence valuation.
//!
//! Every trial draws from its own RNG derived from `(seed, suite, trial)`, so
//! trials run in parallel and any failure is reproducible from the report.

use std::collections::BTreeMap;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bruteforce::{
    brute_ball, brute_optimal_factor, enumerate_profile, valuation_table, EnumerationBudget,
};
use crate::error::{Error, Result};
use crate::generate::{
    random_factor, random_graph, random_instance, random_point_in, random_point_in_box,
    random_profile, rng_from_seed, trial_seed, InstanceParams,
};
use crate::graphfactor::{
    degree_sequence, factor_weight, sbo_witness, solve_general_factor, Factor, FactorSolution,
    GeneralFactorOracle, InitialStrategy, MultiGraph, Objective,
};
use crate::jumpcore::{membership, SearchTrace};
use crate::parityset::{BProfile, GapFreeSet, IntVector};

/// Points `x, y ∈ B`, a 2-step decomposition of `y − x`, and one weight per step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionInstance {
    pub profile: BProfile,
    pub x: IntVector,
    pub y: IntVector,
    pub steps: Vec<IntVector>,
    pub weights: Vec<i64>,
}

impl DecompositionInstance {
    pub fn validate(&self) -> Result<()> {
        self.profile.check_member(&self.x)?;
        self.profile.check_member(&self.y)?;
        validate_decomposition(&self.x, &self.y, &self.steps)?;
        if self.weights.len() != self.steps.len() {
            return Err(Error::BadDecomposition(
                "one weight per step required".into(),
            ));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `x + Σ_{i ∈ subset} p_i`.
    pub fn point(&self, subset: &[usize]) -> IntVector {
        subset
            .iter()
            .fold(self.x.clone(), |z, &i| z.add(&self.steps[i]))
    }

    pub fn weight(&self, subset: &[usize]) -> i64 {
        subset.iter().map(|&i| self.weights[i]).sum()
    }

    /// The same instance seen from `y`: steps and weights negated.
    pub fn swapped(&self) -> DecompositionInstance {
        DecompositionInstance {
            profile: self.profile.clone(),
            x: self.y.clone(),
            y: self.x.clone(),
            steps: self.steps.iter().map(IntVector::neg).collect(),
            weights: self.weights.iter().map(|w| -w).collect(),
        }
    }
}

/// Each step has 1-norm 2, the steps sum to `y − x`, and `‖y − x‖₁ = 2ℓ`.
pub fn validate_decomposition(x: &IntVector, y: &IntVector, steps: &[IntVector]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let mut sum = IntVector::zeros(x.len());
    for (i, p) in steps.iter().enumerate() {
        if p.len() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                got: p.len(),
            });
        }
        if p.l1_norm() != 2 {
            return Err(Error::BadDecomposition(format!(
                "step {i} = {p} does not have norm 2"
            )));
        }
        sum = sum.add(p);
    }
    let diff = y.sub(x);
    if sum != diff {
        return Err(Error::BadDecomposition(format!(
            "steps sum to {sum}, expected {diff}"
        )));
    }
    if diff.l1_norm() != 2 * steps.len() as i64 {
        return Err(Error::BadDecomposition("steps cancel each other".into()));
    }
    Ok(())
}

/// `(dist_B(base, z), q(z))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PhiState {
    pub dist: u64,
    pub q: usize,
}

impl PhiState {
    pub const fn new(dist: u64, q: usize) -> Self {
        PhiState { dist, q }
    }
}

pub fn phi(profile: &BProfile, base: &IntVector, z: &IntVector) -> Result<PhiState> {
    Ok(PhiState {
        dist: profile.dist(base, z)?,
        q: profile.q(z)?,
    })
}

/// `dist_B(x, y) + ‖x − y‖₁ + q(x) + q(y)` is even.
pub fn check_parity_lemma(profile: &BProfile, x: &IntVector, y: &IntVector) -> Result<bool> {
    check_parity_lemma_with(|b, x, y| b.dist(x, y), profile, x, y)
}

/// As [`check_parity_lemma`] with a substitute distance function.
pub fn check_parity_lemma_with<D>(
    dist: D,
    profile: &BProfile,
    x: &IntVector,
    y: &IntVector,
) -> Result<bool>
where
    D: Fn(&BProfile, &IntVector, &IntVector) -> Result<u64>,
{
    let total = dist(profile, x, y)? as i64
        + x.l1_distance(y)
        + profile.q(x)? as i64
        + profile.q(y)? as i64;
    Ok(total % 2 == 0)
}

/// `z = x + Σ_I p_i ∈ B`, `dist_B(x, z) = 2` and `w(I) >= min(0, w([ℓ]))`.
pub fn is_lemma2_solution(inst: &DecompositionInstance, subset: &[usize]) -> Result<bool> {
    let z = inst.point(subset);
    if !inst.profile.contains(&z) {
        return Ok(false);
    }
    let total: i64 = inst.weights.iter().sum();
    Ok(inst.profile.dist(&inst.x, &z)? == 2 && inst.weight(subset) >= total.min(0))
}

fn subset_of(mask: u64, len: usize) -> Vec<usize> {
    (0..len).filter(|&i| mask >> i & 1 == 1).collect()
}

/// First subset in increasing bitmask order that solves the distance-4 instance.
pub fn find_lemma2_solution(inst: &DecompositionInstance) -> Result<Option<Vec<usize>>> {
    inst.validate()?;
    let d = inst.profile.dist(&inst.x, &inst.y)?;
    if d != 4 {
        return Err(Error::Precondition(format!(
            "dist_B(x, y) = {d}, expected 4"
        )));
    }
    if inst.len() > 30 {
        return Err(Error::BudgetExceeded {
            needed: 1u128 << inst.len(),
            budget: 1 << 30,
        });
    }
    for mask in 0..(1u64 << inst.len()) {
        let subset = subset_of(mask, inst.len());
        if is_lemma2_solution(inst, &subset)? {
            return Ok(Some(subset));
        }
    }
    Ok(None)
}

fn complement(subset: &[usize], len: usize) -> Vec<usize> {
    (0..len).filter(|i| !subset.contains(i)).collect()
}

/// The complement of a solution solves the swapped instance.
pub fn complement_solves_swapped(inst: &DecompositionInstance, subset: &[usize]) -> Result<bool> {
    is_lemma2_solution(&inst.swapped(), &complement(subset, inst.len()))
}

/// Flips every axis on which `x(v) > y(v)`, so afterwards `x <= y` and every
/// step is a sum of two unit vectors.
fn normalize_axes(
    profile: &BProfile,
    x: &IntVector,
    y: &IntVector,
    steps: &[IntVector],
) -> Result<(BProfile, IntVector, IntVector, Vec<IntVector>)> {
    let flip: Vec<bool> = x.iter().zip(y.iter()).map(|(a, b)| a > b).collect();
    let apply = |p: &IntVector| {
        IntVector::from(
            p.iter()
                .zip(&flip)
                .map(|(&a, &f)| if f { -a } else { a })
                .collect::<Vec<_>>(),
        )
    };
    let sets = profile
        .sets()
        .iter()
        .zip(&flip)
        .map(|(s, &f)| {
            if f {
                GapFreeSet::new(s.elements().iter().rev().map(|a| -a).collect())
            } else {
                Ok(s.clone())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((
        BProfile::new(sets)?,
        apply(x),
        apply(y),
        steps.iter().map(apply).collect(),
    ))
}

const CHAIN_STATES: [PhiState; 4] = [
    PhiState::new(0, 0),
    PhiState::new(0, 2),
    PhiState::new(1, 1),
    PhiState::new(2, 0),
];

/// Nested index sets `I_1 ⊊ ... ⊊ I_k = [ℓ]` (0-based indices, each sorted)
/// whose points `z_j = x + Σ_{I_j} p_i` lie in `B` at distance 2 apart.
///
/// Each stage grows the set one step at a time from the previous chain point,
/// keeping `φ(z)` in `{(0,0), (0,2), (1,1), (2,0)}` and stopping at `(2,0)`.
/// From `(0,0)` any unused step works; from `(0,2)` or `(1,1)` the next step
/// must raise a coordinate that is currently outside `B`. The last stage takes
/// every remaining step.
pub fn build_chain(
    profile: &BProfile,
    x: &IntVector,
    y: &IntVector,
    steps: &[IntVector],
) -> Result<Vec<Vec<usize>>> {
    profile.check_member(x)?;
    profile.check_member(y)?;
    validate_decomposition(x, y, steps)?;
    let total = profile.dist(x, y)?;
    if total == 0 || total % 2 != 0 {
        return Err(Error::Precondition(format!(
            "dist_B(x, y) = {total}, expected a positive even value"
        )));
    }
    let (b, x, _y, p) = normalize_axes(profile, x, y, steps)?;

    let mut used = vec![false; p.len()];
    let mut current: Vec<usize> = Vec::new();
    let mut chain = Vec::new();
    let mut base = x;
    for _stage in 1..total / 2 {
        let mut z = base.clone();
        loop {
            let state = phi(&b, &base, &z)?;
            if state == PhiState::new(2, 0) {
                break;
            }
            let pick = if state == PhiState::new(0, 0) {
                used.iter().position(|&u| !u)
            } else if state == PhiState::new(0, 2) || state == PhiState::new(1, 1) {
                let a = (0..z.len())
                    .find(|&v| !b.set(v).contains(z[v]))
                    .ok_or_else(|| {
                        Error::Invariant("q(z) > 0 but no infeasible coordinate".into())
                    })?;
                (0..p.len()).find(|&i| !used[i] && p[i][a] > 0)
            } else {
                return Err(Error::Invariant(format!(
                    "phi left the admissible states: {state:?}"
                )));
            };
            let i = pick.ok_or_else(|| {
                Error::Invariant(format!("no admissible step from phi = {state:?}"))
            })?;
            used[i] = true;
            current.push(i);
            z = z.add(&p[i]);
            let next = phi(&b, &base, &z)?;
            if !CHAIN_STATES.contains(&next) {
                return Err(Error::Invariant(format!("step {i} moved phi to {next:?}")));
            }
        }
        let mut set = current.clone();
        set.sort_unstable();
        chain.push(set);
        base = z;
    }
    if current.len() == p.len() {
        return Err(Error::Invariant(
            "steps exhausted before the last stage".into(),
        ));
    }
    chain.push((0..p.len()).collect());
    Ok(chain)
}

/// Strict nesting, membership of every chain point, distance 2 per link, last set `[ℓ]`.
pub fn validate_chain(
    profile: &BProfile,
    x: &IntVector,
    steps: &[IntVector],
    chain: &[Vec<usize>],
) -> Result<bool> {
    let mut prev_set: Vec<usize> = Vec::new();
    let mut prev_point = x.clone();
    for set in chain {
        if set.len() <= prev_set.len() || !prev_set.iter().all(|i| set.contains(i)) {
            return Ok(false);
        }
        let z = set.iter().fold(x.clone(), |z, &i| z.add(&steps[i]));
        if !profile.contains(&z) || profile.dist(&prev_point, &z)? != 2 {
            return Ok(false);
        }
        prev_set = set.clone();
        prev_point = z;
    }
    Ok(prev_set.len() == steps.len())
}

/// Every locally optimal point of `J ∩ B` (no better point within `dist_B <= 2`)
/// is globally optimal, with `f(x) = max { w(F) : d_F = x }`.
pub fn check_corollary1(
    g: &MultiGraph,
    profile: &BProfile,
    budget: &EnumerationBudget,
) -> Result<bool> {
    let table = valuation_table(g, budget)?;
    let feasible: Vec<(&IntVector, i64)> = table
        .iter()
        .filter(|(x, _)| profile.contains(x))
        .map(|(x, (w, _))| (x, *w))
        .collect();
    let Some(opt) = feasible.iter().map(|&(_, w)| w).max() else {
        return Ok(true);
    };
    for &(x, fx) in &feasible {
        let mut local = true;
        for &(y, fy) in &feasible {
            if fy > fx && profile.dist(x, y)? <= 2 {
                local = false;
                break;
            }
        }
        if local && fx != opt {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `±χ_v` toward `to` for every coordinate where `from` and `to` differ.
fn steps_toward(from: &IntVector, to: &IntVector) -> Vec<IntVector> {
    (0..from.len())
        .filter(|&v| from[v] != to[v])
        .map(|v| {
            let mut s = IntVector::zeros(from.len());
            s[v] = (to[v] - from[v]).signum();
            s
        })
        .collect()
}

/// For sampled `x, y ∈ J` and every `(x, y)`-step `s`, some `(x + s, y)`-step `t`
/// has `f(x + s + t) + f(y − s − t) >= f(x) + f(y)`.
pub fn check_mjump<R: Rng>(
    g: &MultiGraph,
    rng: &mut R,
    samples: usize,
    budget: &EnumerationBudget,
) -> Result<bool> {
    let table = valuation_table(g, budget)?;
    let f = |x: &IntVector| table.get(x).map(|(w, _)| *w);
    let points: Vec<&IntVector> = table.keys().collect();
    for _ in 0..samples {
        let x = *points.choose(rng).unwrap();
        let y = *points.choose(rng).unwrap();
        let target = f(x).unwrap() + f(y).unwrap();
        for s in steps_toward(x, y) {
            let xs = x.add(&s);
            let ok = steps_toward(&xs, y).into_iter().any(|t| {
                let st = s.add(&t);
                match (f(&x.add(&st)), f(&y.sub(&st))) {
                    (Some(a), Some(b)) => a + b >= target,
                    _ => false,
                }
            });
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Outcome of checking the alternating-path witness of one pair `(M, N)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SboCheck {
    pub paths: usize,
    /// Every `x + Σ_I p_i` is a degree sequence.
    pub members: bool,
    /// `f(x + Σ_I p_i) >= f(x) + Σ_I g_i` for every `I`.
    pub gains: bool,
    /// `f(y) = f(x) + Σ g_i`.
    pub total_gain: bool,
    pub cycles_neutral: bool,
}

impl SboCheck {
    pub fn passed(&self) -> bool {
        self.members && self.gains && self.total_gain && self.cycles_neutral
    }
}

/// Checks the witness for `M, N`; both should be maximum-weight for their own
/// degree sequences. `max_paths` bounds the `2^ℓ` subset sweep.
pub fn check_sbo_witness(
    g: &MultiGraph,
    m: &Factor,
    n: &Factor,
    table: &BTreeMap<IntVector, (i64, Factor)>,
    max_paths: usize,
) -> Result<SboCheck> {
    let dec = sbo_witness(g, m, n)?;
    let ell = dec.paths.len();
    if ell > max_paths {
        return Err(Error::BudgetExceeded {
            needed: 1u128 << ell,
            budget: 1 << max_paths,
        });
    }
    let oracle = GeneralFactorOracle::new(g.clone());
    let x = degree_sequence(g, m);
    let fx = factor_weight(g, m);
    let fy = factor_weight(g, n);
    let f = |p: &IntVector| table.get(p).map(|(w, _)| *w);

    let mut members = true;
    let mut gains = true;
    for mask in 0..(1u64 << ell) {
        let subset = subset_of(mask, ell);
        let point = subset
            .iter()
            .fold(x.clone(), |z, &i| z.add(&dec.paths[i].step));
        let toggled = dec.apply(m, &subset);
        members &= degree_sequence(g, &toggled) == point && membership(&oracle, &point)?;
        let bound = fx + subset.iter().map(|&i| dec.paths[i].gain).sum::<i64>();
        gains &= f(&point).is_some_and(|v| v >= bound);
    }
    Ok(SboCheck {
        paths: ell,
        members,
        gains,
        total_gain: fy == fx + dec.gains().iter().sum::<i64>(),
        cycles_neutral: dec.cycles.iter().all(|c| c.gain == 0),
    })
}

/// `value(x') − value(x) >= 2 (OPT − value(x)) / ‖x* − x‖₁`, in exact arithmetic.
pub fn improvement_ratio_holds(
    prev: i64,
    next: i64,
    x: &IntVector,
    x_star: &IntVector,
    opt: i64,
) -> bool {
    let norm = x.l1_distance(x_star) as i128;
    if norm == 0 {
        return prev == opt;
    }
    (next as i128 - prev as i128) * norm >= 2 * (opt as i128 - prev as i128)
}

/// `⌈b_size · ln(gap₀ + 1)⌉ + 2`.
pub fn iteration_bound(b_size: usize, gap0: i64) -> u64 {
    let gap = gap0.max(0) as f64;
    (b_size as f64 * (gap + 1.0).ln()).ceil() as u64 + 2
}

/// Result of one local-search run checked against brute force.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchCheck {
    pub exact: bool,
    pub ratio_ok: bool,
    pub bound_ok: bool,
    pub iterations: usize,
    pub bound: u64,
}

impl SearchCheck {
    pub fn passed(&self) -> bool {
        self.exact && self.ratio_ok && self.bound_ok
    }
}

/// Checks every accepted step of a trace against the improvement ratio and the
/// run against the iteration bound.
pub fn check_trace(
    trace: &SearchTrace,
    x_star: &IntVector,
    opt: i64,
    b_size: usize,
) -> (bool, bool, u64) {
    let mut ratio_ok = true;
    for j in 0..trace.point_sequence.len() - 1 {
        let (prev, next) = (trace.value_sequence[j], trace.value_sequence[j + 1]);
        ratio_ok &= improvement_ratio_holds(prev, next, &trace.point_sequence[j], x_star, opt);
    }
    let bound = iteration_bound(b_size, opt - trace.value_sequence[0]);
    (ratio_ok, trace.iterations as u64 <= bound, bound)
}

/// Solves with local search and with brute force, then checks exactness, the
/// improvement ratio at each accepted step, and the iteration bound.
pub fn check_search_run(
    g: &MultiGraph,
    profile: &BProfile,
    objective: Objective,
    budget: &EnumerationBudget,
) -> Result<SearchCheck> {
    let graph = match objective {
        Objective::Cardinality => g.with_unit_weights(),
        Objective::Weighted => g.clone(),
    };
    let brute = brute_optimal_factor(&graph, profile, budget)?;
    let solved = solve_general_factor(
        g,
        profile,
        objective,
        &InitialStrategy::BruteForce {
            max_subsets: budget.max_subsets,
        },
    )?;
    match (brute, solved) {
        (None, FactorSolution::Infeasible) => Ok(SearchCheck {
            exact: true,
            ratio_ok: true,
            bound_ok: true,
            iterations: 0,
            bound: 0,
        }),
        (Some((f_star, opt)), FactorSolution::Optimal { value, trace, .. }) => {
            let x_star = degree_sequence(&graph, &f_star);
            let (ratio_ok, bound_ok, bound) = check_trace(&trace, &x_star, opt, profile.size());
            Ok(SearchCheck {
                exact: value == opt,
                ratio_ok,
                bound_ok,
                iterations: trace.iterations,
                bound,
            })
        }
        _ => Ok(SearchCheck {
            exact: false,
            ratio_ok: false,
            bound_ok: false,
            iterations: 0,
            bound: 0,
        }),
    }
}

/// Random instance with `dist_B(x, y) = target` and at most `max_steps` steps:
/// per-vertex displacements from the enumerated ball, unit moves shuffled and
/// paired. Weights are uniform in `-10..=10`.
pub fn random_decomposition_instance<R: Rng>(
    rng: &mut R,
    target: u64,
    max_steps: usize,
) -> DecompositionInstance {
    let budget = EnumerationBudget::default();
    loop {
        let n = rng.random_range(1..=4);
        let profile = random_profile(rng, n, 6, -3, 3);
        let x = random_point_in(rng, &profile);
        let candidates: Vec<IntVector> = enumerate_profile(&profile, &budget)
            .expect("small profile")
            .into_iter()
            .filter(|y| {
                profile.dist(&x, y).unwrap() == target
                    && (x.l1_distance(y) as usize) <= 2 * max_steps
            })
            .collect();
        let Some(y) = candidates.choose(rng).cloned() else {
            continue;
        };
        let mut moves: Vec<IntVector> = Vec::new();
        for v in 0..n {
            let d = y[v] - x[v];
            for _ in 0..d.abs() {
                let mut u = IntVector::zeros(n);
                u[v] = d.signum();
                moves.push(u);
            }
        }
        moves.shuffle(rng);
        let steps: Vec<IntVector> = moves.chunks(2).map(|c| c[0].add(&c[1])).collect();
        let weights = (0..steps.len())
            .map(|_| rng.random_range(-10..=10))
            .collect();
        return DecompositionInstance {
            profile,
            x,
            y,
            steps,
            weights,
        };
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Parity,
    Lemma2,
    Lemma3,
    Corollary1,
    Mjump,
    Sbo,
    Search,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Parity,
        Suite::Lemma2,
        Suite::Lemma3,
        Suite::Corollary1,
        Suite::Mjump,
        Suite::Sbo,
        Suite::Search,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Parity => "parity",
            Suite::Lemma2 => "lemma2",
            Suite::Lemma3 => "lemma3",
            Suite::Corollary1 => "corollary1",
            Suite::Mjump => "mjump",
            Suite::Sbo => "sbo",
            Suite::Search => "search",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn default_trials(self) -> u64 {
        match self {
            Suite::Parity => 10_000,
            Suite::Lemma2 | Suite::Lemma3 | Suite::Search => 1_000,
            Suite::Corollary1 | Suite::Sbo => 200,
            Suite::Mjump => 100,
        }
    }

    fn stream(self) -> u64 {
        self as u64 + 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub trial: u64,
    pub trial_seed: u64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub trials: u64,
    pub failures: u64,
    pub first_failure: Option<FailureRecord>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

type DistFn = fn(&BProfile, &IntVector, &IntVector) -> Result<u64>;

/// Knobs for [`run_suite_with`]; the default is the real implementation.
#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub dist: DistFn,
    pub budget: EnumerationBudget,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            dist: |b, x, y| b.dist(x, y),
            budget: EnumerationBudget::default(),
        }
    }
}

pub fn run_suite(suite: Suite, seed: u64, trials: u64) -> SuiteReport {
    run_suite_with(suite, seed, trials, &SuiteConfig::default())
}

pub fn run_suite_with(suite: Suite, seed: u64, trials: u64, config: &SuiteConfig) -> SuiteReport {
    let outcomes: Vec<Option<FailureRecord>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let ts = trial_seed(seed, suite.stream(), t);
            match run_trial(suite, ts, config) {
                Ok(None) => None,
                Ok(Some(detail)) => Some(FailureRecord {
                    trial: t,
                    trial_seed: ts,
                    detail,
                }),
                Err(e) => Some(FailureRecord {
                    trial: t,
                    trial_seed: ts,
                    detail: e.to_string(),
                }),
            }
        })
        .collect();
    let failures = outcomes.iter().filter(|o| o.is_some()).count() as u64;
    SuiteReport {
        suite,
        seed,
        trials,
        failures,
        first_failure: outcomes.into_iter().flatten().next(),
    }
}

fn small_params<R: Rng>(rng: &mut R) -> InstanceParams {
    InstanceParams {
        vertices: rng.random_range(1..=5),
        edges: rng.random_range(0..=8),
        ..InstanceParams::default()
    }
}

/// `Ok(None)` on success, `Ok(Some(description))` on a counterexample.
fn run_trial(suite: Suite, seed: u64, config: &SuiteConfig) -> Result<Option<String>> {
    let mut rng = rng_from_seed(seed);
    let budget = &config.budget;
    match suite {
        Suite::Parity => {
            let n = rng.random_range(1..=4);
            let b = random_profile(&mut rng, n, 6, -3, 3);
            let x = random_point_in_box(&mut rng, &b);
            let y = random_point_in_box(&mut rng, &b);
            let ok = check_parity_lemma_with(config.dist, &b, &x, &y)?;
            Ok((!ok).then(|| format!("B={b:?} x={x} y={y}")))
        }
        Suite::Lemma2 => {
            let inst = random_decomposition_instance(&mut rng, 4, 10);
            let describe = || serde_json::to_string(&inst).unwrap_or_default();
            let Some(sol) = find_lemma2_solution(&inst)? else {
                return Ok(Some(format!("no solution: {}", describe())));
            };
            if !is_lemma2_solution(&inst, &sol)? || !complement_solves_swapped(&inst, &sol)? {
                return Ok(Some(format!(
                    "solution {sol:?} failed revalidation: {}",
                    describe()
                )));
            }
            Ok(None)
        }
        Suite::Lemma3 => {
            let k = rng.random_range(1..=4u64);
            let inst = random_decomposition_instance(&mut rng, 2 * k, 16);
            let chain = build_chain(&inst.profile, &inst.x, &inst.y, &inst.steps)?;
            let ok = chain.len() as u64 == k
                && validate_chain(&inst.profile, &inst.x, &inst.steps, &chain)?
                && chain_matches_ball(&inst, &chain, budget)?;
            Ok((!ok).then(|| {
                format!(
                    "bad chain {chain:?}: {}",
                    serde_json::to_string(&inst).unwrap_or_default()
                )
            }))
        }
        Suite::Corollary1 => {
            let params = small_params(&mut rng);
            let (g, b) = random_instance(&mut rng, &params);
            let card = check_corollary1(&g.with_unit_weights(), &b, budget)?;
            let weighted = check_corollary1(&g, &b, budget)?;
            Ok((!(card && weighted)).then(|| format!("local optimum not global: g={g:?} B={b:?}")))
        }
        Suite::Mjump => {
            let params = small_params(&mut rng);
            let g = random_graph(&mut rng, &params);
            let ok = check_mjump(&g, &mut rng, 100, budget)?;
            Ok((!ok).then(|| format!("exchange failed: g={g:?}")))
        }
        Suite::Sbo => {
            // At most 8 edges keeps ℓ <= 8.
            let params = InstanceParams {
                vertices: rng.random_range(1..=6),
                edges: rng.random_range(0..=8),
                ..InstanceParams::default()
            };
            let g = random_graph(&mut rng, &params);
            let table = valuation_table(&g, budget)?;
            // Any pair of factors certifies membership; f-optimal pairs also the gains.
            let m = random_factor(&mut rng, &g);
            let n = random_factor(&mut rng, &g);
            let plain = check_sbo_witness(&g, &m, &n, &table, 8)?;
            let opt_m = table[&degree_sequence(&g, &m)].1.clone();
            let opt_n = table[&degree_sequence(&g, &n)].1.clone();
            let optimal = check_sbo_witness(&g, &opt_m, &opt_n, &table, 8)?;
            let ok = plain.members && optimal.passed();
            Ok((!ok).then(|| {
                format!(
                    "witness check {plain:?} / {optimal:?}: g={g:?} M={:?} N={:?}",
                    m.ids(),
                    n.ids()
                )
            }))
        }
        Suite::Search => {
            let params = small_params(&mut rng);
            let (g, b) = random_instance(&mut rng, &params);
            for objective in [Objective::Cardinality, Objective::Weighted] {
                let check = check_search_run(&g, &b, objective, budget)?;
                if !check.passed() {
                    return Ok(Some(format!("{objective:?}: {check:?} g={g:?} B={b:?}")));
                }
            }
            Ok(None)
        }
    }
}

/// Each chain link `z_j` is in the brute-force ball of radius 2 around `z_{j-1}`.
fn chain_matches_ball(
    inst: &DecompositionInstance,
    chain: &[Vec<usize>],
    budget: &EnumerationBudget,
) -> Result<bool> {
    let mut prev = inst.x.clone();
    for set in chain {
        let z = inst.point(set);
        if !brute_ball(&inst.profile, &prev, 2, budget)?.contains(&z) {
            return Ok(false);
        }
        prev = z;
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(a: &[i64]) -> IntVector {
        IntVector::from(a.to_vec())
    }

    #[test]
    fn parity_trivial_cases() {
        let b = BProfile::from_lists([vec![0, 1, 3, 5, 6], vec![1, 3]]).unwrap();
        let x = v(&[2, 2]);
        assert!(check_parity_lemma(&b, &x, &x).unwrap());
        assert!(check_parity_lemma(&b, &v(&[1, 1]), &v(&[3, 1])).unwrap());
        let broken = |b: &BProfile, x: &IntVector, y: &IntVector| b.dist(x, y).map(|d| d + 1);
        assert!(!check_parity_lemma_with(broken, &b, &x, &x).unwrap());
    }

    #[test]
    fn lemma2_with_two_steps() {
        // B(0) = {0,1,2}: intervals {0},{1},{2}; x = (0,0), y = (2,2), dist 4.
        let b = BProfile::from_lists([vec![0, 1, 2], vec![0, 1, 2]]).unwrap();
        let inst = DecompositionInstance {
            profile: b,
            x: v(&[0, 0]),
            y: v(&[2, 2]),
            steps: vec![v(&[1, 1]), v(&[1, 1])],
            weights: vec![1, -1],
        };
        assert_eq!(find_lemma2_solution(&inst).unwrap(), Some(vec![0]));
        assert!(complement_solves_swapped(&inst, &[0]).unwrap());

        let mut bad = inst.clone();
        bad.y = v(&[1, 1]);
        bad.steps = vec![v(&[1, 1])];
        bad.weights = vec![0];
        assert!(matches!(
            find_lemma2_solution(&bad),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn nonnegative_weights_accept_any_valid_point() {
        let b = BProfile::from_lists([vec![0, 1, 2, 3, 4]]).unwrap();
        let inst = DecompositionInstance {
            profile: b,
            x: v(&[0]),
            y: v(&[4]),
            steps: vec![v(&[2]), v(&[2])],
            weights: vec![3, 5],
        };
        // The only distance-2 member reachable from x is 2.
        assert_eq!(find_lemma2_solution(&inst).unwrap(), Some(vec![0]));
        assert!(is_lemma2_solution(&inst, &[1]).unwrap());
    }

    #[test]
    fn decomposition_validation() {
        let x = v(&[0, 0]);
        let y = v(&[2, 0]);
        assert!(validate_decomposition(&x, &y, &[v(&[2, 0])]).is_ok());
        assert!(validate_decomposition(&x, &y, &[v(&[1, 1]), v(&[1, -1])]).is_err());
        assert!(validate_decomposition(&x, &y, &[v(&[1, 0])]).is_err());
    }

    #[test]
    fn chain_single_stage() {
        let b = BProfile::from_lists([vec![0, 1, 2], vec![0, 1]]).unwrap();
        let x = v(&[0, 0]);
        let y = v(&[1, 1]);
        assert_eq!(
            build_chain(&b, &x, &y, &[v(&[1, 1])]).unwrap(),
            vec![vec![0]]
        );
        // (1,0) is not a 2-step.
        assert!(build_chain(&b, &x, &v(&[2, 1]), &[v(&[1, 1]), v(&[1, 0])]).is_err());
    }

    #[test]
    fn chain_handles_flipped_axes() {
        let b = BProfile::from_lists([vec![0, 1, 2, 3], vec![0, 1, 2]]).unwrap();
        let x = v(&[3, 0]);
        let y = v(&[0, 1]);
        assert_eq!(b.dist(&x, &y).unwrap(), 4);
        let steps = vec![v(&[-1, 1]), v(&[-2, 0])];
        let chain = build_chain(&b, &x, &y, &steps).unwrap();
        assert_eq!(chain.len(), 2);
        assert!(validate_chain(&b, &x, &steps, &chain).unwrap());
    }

    #[test]
    fn improvement_ratio_exact() {
        let x = v(&[0, 0]);
        let xs = v(&[2, 2]);
        assert!(improvement_ratio_holds(0, 5, &x, &xs, 10));
        assert!(!improvement_ratio_holds(0, 4, &x, &xs, 10));
        assert!(improvement_ratio_holds(3, 3, &xs, &xs, 3));
    }

    #[test]
    fn iteration_bound_values() {
        assert_eq!(iteration_bound(10, 0), 2);
        // 4 * ln 8 = 8.317...
        assert_eq!(iteration_bound(4, 7), 11);
    }

    #[test]
    fn corollary_and_mjump_small() {
        let g = MultiGraph::from_triples(1, &[]).unwrap();
        let b = BProfile::from_lists([vec![0]]).unwrap();
        assert!(check_corollary1(&g, &b, &EnumerationBudget::default()).unwrap());
        let one = MultiGraph::from_triples(2, &[(0, 1, 4)]).unwrap();
        let mut rng = rng_from_seed(3);
        assert!(check_mjump(&one, &mut rng, 10, &EnumerationBudget::default()).unwrap());
    }

    #[test]
    fn zero_trials_pass() {
        for suite in Suite::ALL {
            let r = run_suite(suite, 1, 0);
            assert!(r.passed());
            assert_eq!(r.trials, 0);
        }
    }

    #[test]
    fn corrupted_distance_fails_parity_suite() {
        let config = SuiteConfig {
            dist: |b, x, y| b.dist(x, y).map(|d| d + 1),
            ..SuiteConfig::default()
        };
        let r = run_suite_with(Suite::Parity, 17, 200, &config);
        assert_eq!(r.failures, 200);
        assert!(r.first_failure.is_some());
    }

    #[test]
    fn suites_pass_briefly() {
        for suite in Suite::ALL {
            let r = run_suite(suite, 42, 20);
            assert!(r.passed(), "{r:?}");
        }
    }
}
