use super::{Params, Solver, SolverConfig, DEFAULT_EVAL_EVERY};
use crate::error::{Result, VrviError};
use crate::linalg::dist2_sq;
use crate::metrics::problem_gap;
use crate::problems::VIProblem;
use serde::{Deserialize, Serialize};
use std::time::{Duration, Instant};

/// One evaluation of the averaged iterate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    /// Cumulative oracle cost; the first row is taken before any work.
    pub cost: f64,
    pub epoch: f64,
    pub gap: f64,
    /// `||z_k - z*||^2` for the last iterate when a solution is known.
    pub dist_sq: Option<f64>,
    /// Solver time so far, excluding evaluations.
    pub wall_ns: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub problem: String,
    pub oracle: String,
    pub n: usize,
    pub m: usize,
    pub full_cost: f64,
    pub params: Params,
    pub seed: u64,
    pub budget_epochs: f64,
    pub iterations: u64,
    pub full_evals: u64,
    pub sample_evals: u64,
    pub prox_calls: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub rows: Vec<TraceRow>,
    pub meta: TraceMeta,
    /// Set when the run stopped on a non-finite iterate.
    pub failure: Option<String>,
    /// Evaluations whose gap was within rounding of zero and reported as zero.
    pub clipped: usize,
}

impl RunTrace {
    /// First epoch at which the gap reached `target`.
    pub fn epochs_to(&self, target: f64) -> Option<f64> {
        self.rows.iter().find(|r| r.gap <= target).map(|r| r.epoch)
    }

    pub fn final_gap(&self) -> f64 {
        self.rows.last().map_or(f64::INFINITY, |r| r.gap)
    }
}

/// Runs until the epoch budget is spent or the target gap is reached,
/// evaluating the averaged iterate every `eval_every` epochs and at the end.
/// A non-finite iterate ends the run early with `failure` set.
pub fn run(problem: &VIProblem, config: &SolverConfig) -> Result<RunTrace> {
    if !(config.budget_epochs >= 0.0) || !config.budget_epochs.is_finite() {
        return Err(VrviError::Config(format!("budget_epochs = {} is invalid", config.budget_epochs)));
    }
    let every = config.eval_every.unwrap_or(DEFAULT_EVAL_EVERY);
    if !(every > 0.0) || !every.is_finite() {
        return Err(VrviError::Config(format!("eval_every = {every} must be positive")));
    }
    let mut solver = Solver::new(problem, config)?;
    let full_cost = problem.oracle.full_cost();
    let mut rows = Vec::new();
    let mut clipped = 0;
    let mut busy = Duration::ZERO;

    let mut record = |solver: &Solver, cost: f64, busy: Duration, rows: &mut Vec<TraceRow>| -> Result<f64> {
        let (gap, was_clipped) = problem_gap(problem, &solver.averaged())?;
        clipped += was_clipped as usize;
        let dist_sq = problem.known_solution.as_ref().map(|s| dist2_sq(solver.z(), s.as_slice()));
        rows.push(TraceRow { cost, epoch: cost / full_cost, gap, dist_sq, wall_ns: busy.as_nanos() as u64 });
        Ok(gap)
    };
    let reached = |gap: f64| config.target_gap.is_some_and(|t| gap <= t);

    let mut gap = record(&solver, 0.0, busy, &mut rows)?;
    let mut next_eval = every;
    let mut failure = None;
    let mut last_recorded = 0;
    while !reached(gap) && solver.epochs() < config.budget_epochs {
        let t = Instant::now();
        let stepped = solver.step();
        busy += t.elapsed();
        match stepped {
            Ok(()) => {}
            Err(VrviError::Numeric(msg)) => {
                failure = Some(msg);
                break;
            }
            Err(e) => return Err(e),
        }
        if solver.epochs() >= next_eval {
            gap = record(&solver, solver.cost(), busy, &mut rows)?;
            last_recorded = solver.counters().iterations;
            while next_eval <= solver.epochs() {
                next_eval += every;
            }
        }
    }
    if failure.is_none() && last_recorded != solver.counters().iterations {
        record(&solver, solver.cost(), busy, &mut rows)?;
    }

    let c = solver.counters();
    let meta = TraceMeta {
        problem: problem.name.clone(),
        oracle: problem.oracle.scheme().name().to_string(),
        n: problem.n(),
        m: problem.m(),
        full_cost,
        params: *solver.params(),
        seed: config.seed,
        budget_epochs: config.budget_epochs,
        iterations: c.iterations,
        full_evals: c.full_evals,
        sample_evals: c.sample_evals,
        prox_calls: c.prox_calls,
    };
    Ok(RunTrace { rows, meta, failure, clipped })
}
