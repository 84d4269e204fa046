mod output;
mod plot;
mod spec;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use output::{summary_csv, summary_curves, trace_csv, write_atomic, RunIndex, RunRecord};
use rayon::prelude::*;
use spec::{RunSpec, SpecError};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use vrvi_core::solvers::TraceMeta;
use vrvi_core::verify::{self, Mutation};
use vrvi_core::{run, Algo, GameKind, RunTrace};

const EXIT_VERIFY: u8 = 1;
const EXIT_SPEC: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(name = "vrvi", version, about = "Variance-reduced VI solvers: benchmark runs and self-checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (algorithm, seed) pair of a spec file or preset.
    Run(RunArgs),
    /// Run the property suites and print a pass/fail table.
    Verify {
        /// Scale every stochastic evaluation by this factor.
        #[arg(long)]
        inject_bias: Option<f64>,
        /// Replace the Lyapunov-suite step by FACTOR / L.
        #[arg(long, value_name = "FACTOR")]
        inject_step: Option<f64>,
    },
    /// Write a generated payoff matrix in MatrixMarket format.
    Gen {
        generator: String,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// List the built-in presets.
    Presets,
}

#[derive(Args)]
struct RunArgs {
    /// Spec file path or preset name.
    spec: String,
    /// Comma-separated algorithms.
    #[arg(long)]
    algo: Option<String>,
    /// Comma-separated seeds or an inclusive range `a..b`.
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    epochs: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    oracle: Option<String>,
    #[arg(long)]
    geometry: Option<String>,
    #[arg(long)]
    eval_every: Option<String>,
    #[arg(long)]
    target_gap: Option<String>,
}

impl RunArgs {
    /// `(flag, spec key, value)` for every flag given.
    fn overrides(&self) -> Vec<(&'static str, &'static str, &str)> {
        [
            ("algo", "algos", &self.algo),
            ("seed", "seeds", &self.seed),
            ("epochs", "epochs", &self.epochs),
            ("out", "out", &self.out),
            ("n", "n", &self.n),
            ("p", "p", &self.p),
            ("oracle", "oracle", &self.oracle),
            ("geometry", "geometry", &self.geometry),
            ("eval-every", "eval_every", &self.eval_every),
            ("target-gap", "target_gap", &self.target_gap),
        ]
        .into_iter()
        .filter_map(|(f, k, v)| v.as_deref().map(|v| (f, k, v)))
        .collect()
    }
}

fn thread_pool() -> anyhow::Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("VRVI_THREADS") {
        let k: usize = v.trim().parse().with_context(|| format!("VRVI_THREADS={v:?} is not a count"))?;
        b = b.num_threads(k.max(1));
    }
    Ok(b.build()?)
}

fn cmd_run(args: &RunArgs) -> anyhow::Result<ExitCode> {
    let mut spec = RunSpec::load(&args.spec)?;
    for (flag, key, v) in args.overrides() {
        spec.set(key, v).map_err(|e| SpecError(format!("--{flag}: {e}")))?;
    }
    spec.validate()?;
    let problem = spec.build_problem()?;
    for &algo in &spec.algos {
        vrvi_core::Solver::new(&problem, &spec.config(algo, spec.seeds[0]))
            .map_err(|e| SpecError(format!("{algo}: {e}")))?;
    }
    std::fs::create_dir_all(&spec.out).with_context(|| format!("cannot create {}", spec.out.display()))?;

    let jobs: Vec<(Algo, u64)> = spec.algos.iter().flat_map(|&a| spec.seeds.iter().map(move |&s| (a, s))).collect();
    let traces: Vec<RunTrace> = thread_pool()?.install(|| {
        jobs.par_iter().map(|&(a, s)| run(&problem, &spec.config(a, s))).collect::<Result<_, _>>()
    })?;

    let label = spec.problem_label();
    let mut records = Vec::new();
    let mut failed = false;
    for (&(algo, seed), t) in jobs.iter().zip(&traces) {
        let file = format!("{label}-{algo}-seed{seed}.csv");
        write_atomic(&spec.out.join(&file), trace_csv(t).as_bytes())?;
        if let Some(f) = &t.failure {
            eprintln!("{algo} seed {seed}: stopped early: {f}");
            failed = true;
        }
        records.push(RunRecord {
            algo,
            seed,
            file,
            epochs_to_1e_2: t.epochs_to(1e-2),
            final_gap: t.final_gap(),
            failure: t.failure.clone(),
            clipped: t.clipped,
            meta: t.meta.clone(),
        });
    }
    let pairs: Vec<(Algo, &RunTrace)> = jobs.iter().map(|j| j.0).zip(&traces).collect();
    let summary = summary_csv(&pairs, spec.eval_every);
    write_atomic(&spec.out.join("summary.csv"), summary.as_bytes())?;
    let svg = plot::gap_plot(&format!("{} ({label})", spec.name), &summary_curves(&summary));
    write_atomic(&spec.out.join(format!("{label}.svg")), svg.as_bytes())?;
    let index = RunIndex {
        name: spec.name.clone(),
        problem: label,
        epoch_unit: epoch_unit(traces.first().map(|t| &t.meta)),
        runs: records,
    };
    write_atomic(&spec.out.join("runs.json"), serde_json::to_string_pretty(&index)?.as_bytes())?;

    println!("{:<8} {:>6} {:>14} {:>12}", "algo", "seed", "epochs-to-1e-2", "final-gap");
    for r in &index.runs {
        let reached = r.epochs_to_1e_2.map_or("-".to_string(), |e| format!("{e:.1}"));
        println!("{:<8} {:>6} {:>14} {:>12.4e}", r.algo.name(), r.seed, reached, r.final_gap);
    }
    println!("wrote {} traces to {}", index.runs.len(), spec.out.display());
    Ok(if failed { ExitCode::from(EXIT_NUMERIC) } else { ExitCode::SUCCESS })
}

fn epoch_unit(meta: Option<&TraceMeta>) -> String {
    meta.map_or_else(String::new, |m| format!("one full operator evaluation = {} cost units (nnz(A))", m.full_cost))
}

fn cmd_verify(inject_bias: Option<f64>, inject_step: Option<f64>) -> anyhow::Result<ExitCode> {
    let mutation = match (inject_bias, inject_step) {
        (Some(_), Some(_)) => return Err(SpecError("inject one defect at a time".into()).into()),
        (Some(b), None) => Mutation::OracleBias(b),
        (None, Some(f)) => Mutation::StepOverL(f),
        (None, None) => Mutation::None,
    };
    let reports = verify::run_all(mutation)?;
    println!("{:<18} {:>7} {:>11}  status", "suite", "checks", "worst");
    for r in &reports {
        let status = if r.passed { "pass".to_string() } else { format!("FAIL  {}", r.detail) };
        println!("{:<18} {:>7} {:>11.3e}  {status}", r.name, r.checks, r.worst);
    }
    Ok(if reports.iter().all(|r| r.passed) { ExitCode::SUCCESS } else { ExitCode::from(EXIT_VERIFY) })
}

fn cmd_gen(generator: &str, n: usize, seed: u64, out: &Path) -> anyhow::Result<ExitCode> {
    let kind: GameKind = generator.parse().map_err(|e| SpecError(format!("{e}")))?;
    let a = kind.generate(n, seed).map_err(|e| SpecError(e.to_string()))?;
    let mut bytes = Vec::new();
    a.write_matrix_market(&mut bytes)?;
    write_atomic(out, &bytes).with_context(|| format!("cannot write {}", out.display()))?;
    println!("wrote {}x{} matrix ({} nonzeros) to {}", a.rows(), a.cols(), a.nnz(), out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_presets() -> ExitCode {
    for p in &vrvi_core::PRESETS {
        let algos: Vec<&str> = p.algos.iter().map(|a| a.name()).collect();
        let geometry = if p.entropic { "entropic" } else { "euclidean" };
        println!("{:<18} {:<12} {:<10} {:<18} n={} {}", p.name, p.game, geometry, p.scheme, p.n, algos.join(","));
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Verify { inject_bias, inject_step } => cmd_verify(*inject_bias, *inject_step),
        Command::Gen { generator, n, seed, out } => cmd_gen(generator, *n, *seed, out),
        Command::Presets => Ok(cmd_presets()),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<SpecError>().is_some() {
                ExitCode::from(EXIT_SPEC)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
