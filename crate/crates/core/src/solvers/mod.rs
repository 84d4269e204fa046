//! The variance-reduced steppers, the deterministic baseline and the run loop.
//!
//! Every stepper keeps `F(w)` for the current snapshot `w` and pays for a
//! full evaluation only when the snapshot changes. Per iteration the RNG is
//! consumed in a fixed order: the oracle index first, then the snapshot coin.

mod config;
mod det;
mod eg;
mod forb;
mod mp;
mod run;

pub use config::{Algo, Params, SolverConfig, DEFAULT_EVAL_EVERY, DEFAULT_GAMMA};
pub use run::{run, RunTrace, TraceMeta, TraceRow};

use crate::error::{Result, VrviError};
use crate::geometry::Point;
use crate::linalg::KahanSum;
use crate::oracle::{Draw, OracleScratch};
use crate::problems::VIProblem;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// How the random choices of one iteration are made.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepChoice {
    /// Draw from the solver's own RNG stream.
    Sample,
    /// Use the given index and snapshot outcome; the RNG is not touched.
    Forced { draw: Draw, refresh: bool },
}

/// Work and call counters.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Counters {
    pub iterations: u64,
    pub prox_calls: u64,
    pub full_evals: u64,
    pub sample_evals: u64,
    /// Cumulative oracle cost in the units of `StochasticOracle::full_cost`.
    pub cost: f64,
}

#[derive(Clone, Debug)]
pub(crate) struct Work {
    zbar: Vec<f64>,
    anchor: Vec<f64>,
    half: Vec<f64>,
    half_dual: Vec<f64>,
    est: Vec<f64>,
    next: Vec<f64>,
    next_dual: Vec<f64>,
    scratch: Vec<f64>,
    oracle: OracleScratch,
}

impl Work {
    fn new(d: usize) -> Self {
        Work {
            zbar: vec![0.0; d],
            anchor: vec![0.0; d],
            half: vec![0.0; d],
            half_dual: vec![0.0; d],
            est: vec![0.0; d],
            next: vec![0.0; d],
            next_dual: vec![0.0; d],
            scratch: vec![0.0; d],
            oracle: OracleScratch::default(),
        }
    }
}

/// Iteration state shared by all algorithms. Fields that an algorithm does
/// not use stay at their initial values.
#[derive(Clone, Debug)]
pub struct Solver<'a> {
    problem: &'a VIProblem,
    params: Params,
    rng: ChaCha8Rng,
    n: usize,
    z: Vec<f64>,
    z_dual: Vec<f64>,
    w: Vec<f64>,
    fw: Vec<f64>,
    /// Previous snapshot `w_{k-1}` and `F(w_{k-1})` (forward-reflected method).
    prev_w: Vec<f64>,
    prev_fw: Vec<f64>,
    /// `F(z)` for the deterministic baseline.
    fz: Vec<f64>,
    /// Dual image of the Bregman anchor `w_bar` (double loop).
    wbar_dual: Vec<f64>,
    sum_w: KahanSum,
    sum_dual: KahanSum,
    inner: usize,
    outer: u64,
    avg: KahanSum,
    last_half: Vec<f64>,
    counters: Counters,
    work: Work,
}

impl<'a> Solver<'a> {
    /// Validates the configuration and initializes `z = w = z0`, charging one
    /// full evaluation of `F(z0)`.
    pub fn new(problem: &'a VIProblem, config: &SolverConfig) -> Result<Self> {
        let params = config.resolve(problem)?;
        Self::with_params(problem, params, config.seed)
    }

    /// Like [`Solver::new`] but keeps an explicit step size even when it
    /// violates the admissibility condition.
    pub fn new_unchecked(problem: &'a VIProblem, config: &SolverConfig) -> Result<Self> {
        let params = config.resolve_unchecked(problem)?;
        Self::with_params(problem, params, config.seed)
    }

    fn with_params(problem: &'a VIProblem, params: Params, seed: u64) -> Result<Self> {
        let z0 = &problem.z0;
        let d = z0.dim();
        let z = z0.as_slice().to_vec();
        let z_dual = problem.geometry.to_dual(z0)?;
        let mut work = Work::new(d);
        let mut fw = vec![0.0; d];
        problem.oracle.full_into(&z, &mut fw, &mut work.scratch);
        let counters = Counters { full_evals: 1, cost: problem.oracle.full_cost(), ..Counters::default() };
        Ok(Solver {
            problem,
            params,
            rng: ChaCha8Rng::seed_from_u64(seed),
            n: z0.n(),
            z_dual: z_dual.clone(),
            w: z.clone(),
            fz: fw.clone(),
            prev_w: z.clone(),
            prev_fw: fw.clone(),
            fw,
            wbar_dual: z_dual,
            sum_w: KahanSum::new(d),
            sum_dual: KahanSum::new(d),
            inner: 0,
            outer: 0,
            avg: KahanSum::new(d),
            last_half: z.clone(),
            z,
            counters,
            work,
        })
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn problem(&self) -> &VIProblem {
        self.problem
    }

    pub fn counters(&self) -> Counters {
        self.counters
    }

    pub fn cost(&self) -> f64 {
        self.counters.cost
    }

    /// Cost in epochs (full operator evaluations).
    pub fn epochs(&self) -> f64 {
        self.counters.cost / self.problem.oracle.full_cost()
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    /// Current snapshot `w`.
    pub fn w(&self) -> &[f64] {
        &self.w
    }

    /// Cached `F(w)`.
    pub fn cached_fw(&self) -> &[f64] {
        &self.fw
    }

    /// Snapshot of the previous iteration, `w_{k-1}`.
    pub fn prev_w(&self) -> &[f64] {
        &self.prev_w
    }

    /// Cached `F(w_{k-1})`.
    pub fn prev_fw(&self) -> &[f64] {
        &self.prev_fw
    }

    /// The most recent extrapolated point `z_{k+1/2}`.
    pub fn last_half(&self) -> &[f64] {
        &self.last_half
    }

    pub fn inner_counter(&self) -> usize {
        self.inner
    }

    pub fn outer_counter(&self) -> u64 {
        self.outer
    }

    /// The averaged iterate reported by the method (the start point before
    /// the first iteration).
    pub fn averaged(&self) -> Point {
        let coords = self.avg.mean().unwrap_or_else(|| self.problem.z0.as_slice().to_vec());
        Point::from_vec(coords, self.n).expect("averages of finite iterates are finite")
    }

    pub fn current(&self) -> Point {
        Point::from_vec(self.z.clone(), self.n).expect("iterates are checked after each step")
    }

    /// One iteration with fresh randomness.
    pub fn step(&mut self) -> Result<()> {
        self.step_with(StepChoice::Sample)
    }

    pub fn step_with(&mut self, choice: StepChoice) -> Result<()> {
        match self.params.algo {
            Algo::VrEg => eg::step(self, choice, false)?,
            Algo::VrFbf => eg::step(self, choice, true)?,
            Algo::VrForb => forb::step(self, choice)?,
            Algo::VrMp => mp::step(self, choice)?,
            Algo::DetEg => det::step(self)?,
        }
        self.counters.iterations += 1;
        if !crate::linalg::all_finite(&self.z) {
            return Err(VrviError::Numeric(format!(
                "iterate became non-finite at iteration {}",
                self.counters.iterations
            )));
        }
        Ok(())
    }

    /// The pair of points the next draw's distribution is built from, and the
    /// support of that distribution. Used by exact-expectation harnesses.
    pub fn next_support(&self) -> Result<Vec<(f64, Draw)>> {
        let oracle = &self.problem.oracle;
        match self.params.algo {
            Algo::DetEg => Ok(vec![(1.0, Draw::Exact)]),
            Algo::VrForb => oracle.support(&self.z, &self.prev_w),
            Algo::VrEg | Algo::VrFbf | Algo::VrMp => {
                let mut probe = self.clone();
                let half = probe.half_point()?;
                oracle.support(&half, &self.w)
            }
        }
    }

    /// Computes `z_{k+1/2}` for the next iteration without advancing.
    fn half_point(&mut self) -> Result<Vec<f64>> {
        match self.params.algo {
            Algo::VrEg | Algo::VrFbf => eg::half_step(self),
            Algo::VrMp => mp::half_step(self)?,
            _ => return Err(VrviError::Config("no extrapolation point for this method".into())),
        }
        Ok(self.work.half.clone())
    }

    fn draw(&mut self, choice: StepChoice, u_is_half: bool) -> Draw {
        match choice {
            StepChoice::Forced { draw, .. } => draw,
            StepChoice::Sample => {
                let (u, v) = if u_is_half { (&self.work.half, &self.w) } else { (&self.z, &self.prev_w) };
                self.problem.oracle.draw(u, v, &mut self.rng, &mut self.work.oracle)
            }
        }
    }

    fn coin(&mut self, choice: StepChoice) -> bool {
        match choice {
            StepChoice::Forced { refresh, .. } => refresh,
            StepChoice::Sample => self.rng.random::<f64>() < self.params.p,
        }
    }

    fn charge_full(&mut self) {
        self.counters.full_evals += 1;
        self.counters.cost += self.problem.oracle.full_cost();
    }

    /// `work.est = F(w) + F_xi(u) - F_xi(w)`, or `F(u)` for the exact oracle.
    fn estimate_at(&mut self, draw: &Draw, u_is_half: bool) {
        let oracle = &self.problem.oracle;
        let w = &mut self.work;
        let u = if u_is_half { &w.half } else { &self.z };
        if let Draw::Exact = draw {
            oracle.full_into(u, &mut w.est, &mut w.scratch);
            self.counters.full_evals += 1;
            self.counters.cost += oracle.full_cost();
        } else {
            w.est.copy_from_slice(&self.fw);
            oracle.add_diff(draw, 1.0, u, &self.w, &mut w.est, &mut w.oracle);
            self.counters.sample_evals += 2;
            self.counters.cost += 2.0 * oracle.sample_cost();
        }
    }

    /// Replaces the snapshot with `z` and refreshes the cached `F(w)`.
    fn refresh_snapshot(&mut self) {
        self.w.copy_from_slice(&self.z);
        self.problem.oracle.full_into(&self.w, &mut self.fw, &mut self.work.scratch);
        self.charge_full();
    }
}

/// `out = a - tau * f`
#[inline]
fn shifted(a: &[f64], tau: f64, f: &[f64], out: &mut [f64]) {
    for ((o, x), g) in out.iter_mut().zip(a).zip(f) {
        *o = x - tau * g;
    }
}

#[cfg(test)]
mod tests;
