use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use jumpfactor::bruteforce::EnumerationBudget;
use jumpfactor::generate::{trial_seed, InstanceParams};
use jumpfactor::instance::parse_edge_ids;
use jumpfactor::lemmalab::Suite;
use jumpfactor::report::{oracle_instance, solve_instance, to_json, verify, SolveOptions, Status};
use jumpfactor::{Instance, Objective, ParityProduct};
use serde::Serialize;

const DEFAULT_SEED: u64 = 1;

#[derive(Parser)]
#[command(
    name = "jumpfactor",
    version,
    about = "Exact maximum-weight general factors by jump-system local search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance to optimality.
    Solve(SolveArgs),
    /// Maximize over one product of parity intervals.
    Oracle(OracleArgs),
    /// Run the randomized lemma suites.
    Verify(VerifyArgs),
    /// Write a random instance.
    Gen(GenArgs),
    /// Time the solver on random instances.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Cardinality,
    Weighted,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Cardinality => Objective::Cardinality,
            ObjectiveArg::Weighted => Objective::Weighted,
        }
    }
}

#[derive(Args)]
struct BudgetArg {
    /// Largest number of edge subsets any exhaustive search may visit.
    #[arg(long, default_value_t = 1 << 20)]
    budget: u64,
}

impl BudgetArg {
    fn budget(&self) -> Result<EnumerationBudget> {
        Ok(EnumerationBudget::new(
            self.budget,
            EnumerationBudget::default().max_points,
        )?)
    }
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum)]
    objective: Option<ObjectiveArg>,
    /// Solve by enumerating every edge subset instead.
    #[arg(long)]
    brute: bool,
    /// JSON list of edge ids to start from; overrides the instance's own.
    #[arg(long)]
    initial: Option<PathBuf>,
    /// Search for a feasible start when the given one violates B.
    #[arg(long)]
    fallback: bool,
    #[command(flatten)]
    budget: BudgetArg,
    /// Also write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    instance: PathBuf,
    /// One `lo:hi` per vertex, comma separated; spans must be even.
    #[arg(long, allow_hyphen_values = true)]
    product: String,
    /// Use the exhaustive reference oracle.
    #[arg(long)]
    brute: bool,
    #[command(flatten)]
    budget: BudgetArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    Suite::parse(s).ok_or_else(|| {
        let names: Vec<_> = Suite::ALL.iter().map(|k| k.name()).collect();
        format!("unknown suite {s:?}; expected one of {}", names.join(", "))
    })
}

#[derive(Args)]
struct VerifyArgs {
    /// Suites to run (repeatable); all when omitted.
    #[arg(long = "suite", value_parser = parse_suite)]
    suites: Vec<Suite>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Trials per suite; each suite has its own default.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenParams {
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
    vertices: u32,
    #[arg(long, default_value_t = 8)]
    edges: u32,
    /// Largest |B(v)|.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    max_b: u32,
    #[arg(long, default_value_t = -9, allow_hyphen_values = true)]
    weight_lo: i64,
    #[arg(long, default_value_t = 9, allow_hyphen_values = true)]
    weight_hi: i64,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(0..=100))]
    loop_percent: u32,
}

impl GenParams {
    fn params(&self) -> Result<InstanceParams> {
        anyhow::ensure!(
            self.weight_lo <= self.weight_hi,
            "--weight-lo must not exceed --weight-hi"
        );
        Ok(InstanceParams {
            vertices: self.vertices as usize,
            edges: self.edges as usize,
            max_b: self.max_b as usize,
            weight_lo: self.weight_lo,
            weight_hi: self.weight_hi,
            loop_percent: self.loop_percent,
        })
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    params: GenParams,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Objective stored in the file.
    #[arg(long, value_enum)]
    objective: Option<ObjectiveArg>,
    /// Write the instance here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    params: GenParams,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, value_enum, default_value = "weighted")]
    objective: ObjectiveArg,
    #[command(flatten)]
    budget: BudgetArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct BenchReport {
    seed: u64,
    trials: u64,
    optimal: u64,
    infeasible: u64,
    iterations: u64,
    oracle_calls: u64,
    total_micros: u64,
    max_micros: u64,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load(path: &Path) -> Result<Instance> {
    Instance::parse(&read(path)?).with_context(|| format!("invalid instance {}", path.display()))
}

/// Writes the structured report first so a failed write leaves stdout empty.
fn finish(out: Option<&Path>, json: &str, text: &str) -> Result<()> {
    if let Some(path) = out {
        fs::write(path, json).with_context(|| format!("cannot write {}", path.display()))?;
    }
    print!("{text}");
    Ok(())
}

fn status_code(status: Status) -> u8 {
    match status {
        Status::Optimal => 0,
        Status::Infeasible => 2,
    }
}

fn cmd_solve(args: &SolveArgs) -> Result<u8> {
    let inst = load(&args.instance)?;
    let initial = match &args.initial {
        None => None,
        Some(p) => Some(
            parse_edge_ids(&read(p)?, inst.graph.edge_count())
                .with_context(|| format!("invalid initial factor {}", p.display()))?,
        ),
    };
    let opts = SolveOptions {
        objective: args.objective.map(Into::into),
        brute: args.brute,
        budget: args.budget.budget()?,
        initial,
        fallback: args.fallback,
    };
    let report = solve_instance(&inst, &opts)?;
    finish(args.out.as_deref(), &to_json(&report), &report.to_string())?;
    Ok(status_code(report.status))
}

fn cmd_oracle(args: &OracleArgs) -> Result<u8> {
    let inst = load(&args.instance)?;
    let product: ParityProduct = args.product.parse().context("invalid --product")?;
    let report = oracle_instance(&inst, &product, args.brute, &args.budget.budget()?)?;
    finish(args.out.as_deref(), &to_json(&report), &report.to_string())?;
    Ok(status_code(report.status))
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8> {
    let suites = if args.suites.is_empty() {
        Suite::ALL.to_vec()
    } else {
        args.suites.clone()
    };
    let report = verify(&suites, args.seed, args.trials);
    finish(args.out.as_deref(), &to_json(&report), &report.to_string())?;
    Ok(if report.passed { 0 } else { 1 })
}

fn cmd_gen(args: &GenArgs) -> Result<u8> {
    let mut inst = Instance::random(&args.params.params()?, args.seed);
    inst.objective = args.objective.map(Into::into);
    let text = inst.emit();
    match &args.out {
        None => print!("{text}"),
        Some(path) => {
            fs::write(path, &text).with_context(|| format!("cannot write {}", path.display()))?;
            println!(
                "wrote {} vertices, {} edges to {}",
                inst.graph.vertex_count(),
                inst.graph.edge_count(),
                path.display()
            );
        }
    }
    Ok(0)
}

fn cmd_bench(args: &BenchArgs) -> Result<u8> {
    let params = args.params.params()?;
    let opts = SolveOptions {
        objective: Some(args.objective.into()),
        budget: args.budget.budget()?,
        ..SolveOptions::default()
    };
    let mut report = BenchReport {
        seed: args.seed,
        trials: args.trials,
        optimal: 0,
        infeasible: 0,
        iterations: 0,
        oracle_calls: 0,
        total_micros: 0,
        max_micros: 0,
    };
    for t in 0..args.trials {
        let inst = Instance::random(&params, trial_seed(args.seed, 0, t));
        let start = Instant::now();
        let r = solve_instance(&inst, &opts).with_context(|| format!("trial {t}"))?;
        let micros = start.elapsed().as_micros() as u64;
        report.total_micros += micros;
        report.max_micros = report.max_micros.max(micros);
        match r.status {
            Status::Optimal => report.optimal += 1,
            Status::Infeasible => report.infeasible += 1,
        }
        report.iterations += r.iterations.unwrap_or(0) as u64;
        report.oracle_calls += r.oracle_calls.unwrap_or(0) as u64;
    }
    let mean = report.total_micros.checked_div(report.trials).unwrap_or(0);
    let text = format!(
        "{} trials ({} optimal, {} infeasible): {} iterations, {} oracle calls\ntime: total {} us, mean {} us, max {} us\n",
        report.trials,
        report.optimal,
        report.infeasible,
        report.iterations,
        report.oracle_calls,
        report.total_micros,
        mean,
        report.max_micros
    );
    finish(args.out.as_deref(), &to_json(&report), &text)?;
    Ok(0)
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which here means "infeasible".
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
