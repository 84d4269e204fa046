//! Property suites run by `vrvi verify` and the acceptance tests, with
//! optional fault injection to confirm that each suite can fail.

use crate::error::Result;
use crate::geometry::{
    mirror_argmin, on_simplex, project_simplex, BlockFunction, DualSet, Geometry, Point, ProxFriendlyG,
};
use crate::linalg::{dist2_sq, dot};
use crate::metrics::{lyapunov_phi, LyapunovKind};
use crate::oracle::{verify_mean_lipschitz, verify_unbiased, NormPairing, OracleScheme, StochasticOracle};
use crate::problems::{generators, make_matrix_game, make_planted_simplex_sum, MatrixGame, VIProblem};
use crate::solvers::{Algo, Solver, SolverConfig, StepChoice};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// Deliberate defects for checking the suites themselves.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum Mutation {
    #[default]
    None,
    /// Multiply every stochastic evaluation by this factor.
    OracleBias(f64),
    /// Replace the step by `factor / L`.
    StepOverL(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub checks: usize,
    /// Largest violation seen (0 when none).
    pub worst: f64,
    pub detail: String,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport { name, passed: true, checks: 0, worst: 0.0, detail: String::new() }
    }

    fn check(&mut self, violation: f64, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !(violation <= 0.0) {
            if self.passed {
                self.detail = what();
            }
            self.passed = false;
            self.worst = if violation.is_nan() { f64::INFINITY } else { self.worst.max(violation) };
        }
    }
}

pub const UNBIASED_TOL: f64 = 1e-12;
pub const MEAN_LIPSCHITZ_TOL: f64 = 1e-10;
pub const LYAPUNOV_TOL: f64 = 1e-9;
pub const FORB_NONNEG_TOL: f64 = 1e-10;

/// Runs every suite.
pub fn run_all(mutation: Mutation) -> Result<Vec<SuiteReport>> {
    Ok(vec![
        unbiasedness(mutation, 50)?,
        mean_lipschitz(mutation, 100)?,
        lyapunov(mutation, 3, 60)?,
        prox_inequality(200)?,
        simplex_invariants(200)?,
    ])
}

fn random_simplex_point(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Point {
    let mut draw = |k: usize| -> Vec<f64> {
        let v: Vec<f64> = (0..k).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    };
    let x = draw(n);
    let y = draw(m);
    Point::new(&x, &y).expect("normalized draws are finite")
}

fn random_box_point(rng: &mut ChaCha8Rng, n: usize, m: usize, half_width: f64) -> Point {
    let v = (0..n + m).map(|_| half_width * (2.0 * rng.random::<f64>() - 1.0)).collect();
    Point::from_vec(v, n).expect("finite draws")
}

fn game_oracles(a: &Arc<MatrixGame>, mutation: Mutation) -> Result<Vec<StochasticOracle>> {
    let bias = match mutation {
        Mutation::OracleBias(b) => b,
        _ => 1.0,
    };
    Ok(vec![
        StochasticOracle::game(a.clone(), OracleScheme::FixedRowColNorms, NormPairing::Euclidean)?.scaled(bias),
        StochasticOracle::game(a.clone(), OracleScheme::VariableEuclidean, NormPairing::Euclidean)?.scaled(bias),
        StochasticOracle::game(a.clone(), OracleScheme::VariableEntropic, NormPairing::BlockL1)?.scaled(bias),
    ])
}

fn sum_oracles(mutation: Mutation) -> Result<Vec<StochasticOracle>> {
    let bias = match mutation {
        Mutation::OracleBias(b) => b,
        _ => 1.0,
    };
    let p = make_planted_simplex_sum(3, 3, 4, 11)?;
    let sum = match p.oracle.source() {
        crate::oracle::Source::Sum(s) => s.clone(),
        crate::oracle::Source::Game(_) => unreachable!("planted instance is a finite sum"),
    };
    Ok(vec![
        StochasticOracle::finite_sum(sum.clone(), OracleScheme::Uniform)?.scaled(bias),
        StochasticOracle::finite_sum(sum, OracleScheme::Importance)?.scaled(bias),
    ])
}

/// Enumerated `E[F_xi] = F` (differences for variable schemes) on `points`
/// random feasible points per scheme.
pub fn unbiasedness(mutation: Mutation, points: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("unbiasedness");
    let a = Arc::new(generators::gaussian(5, 4, 3)?);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut oracles = game_oracles(&a, mutation)?;
    oracles.extend(sum_oracles(mutation)?);
    for o in &oracles {
        for _ in 0..points {
            let (n, m) = (o.n(), o.m());
            let z = random_simplex_point(&mut rng, n, m);
            let w = random_simplex_point(&mut rng, n, m);
            let dev = if o.scheme().is_variable() {
                verify_unbiased(o, &z, Some(&w))?
            } else {
                verify_unbiased(o, &z, None)?.max(verify_unbiased(o, &z, Some(&w))?)
            };
            rep.check(dev - UNBIASED_TOL, || format!("{}: deviation {dev:.3e}", o.scheme()));
        }
    }
    Ok(rep)
}

/// `E||F_xi(u) - F_xi(v)||_*^2 <= L^2 ||u - v||^2` on random pairs, plus the
/// equality of the fixed row/column oracle at `v = 0`.
pub fn mean_lipschitz(mutation: Mutation, pairs: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("mean-lipschitz");
    let a = Arc::new(generators::gaussian(4, 6, 8)?);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut oracles = game_oracles(&a, mutation)?;
    oracles.extend(sum_oracles(mutation)?);
    for o in &oracles {
        let (n, m) = (o.n(), o.m());
        for _ in 0..pairs {
            let (u, v) = if o.pairing() == NormPairing::BlockL1 {
                (random_simplex_point(&mut rng, n, m), random_simplex_point(&mut rng, n, m))
            } else {
                (random_box_point(&mut rng, n, m, 2.0), random_box_point(&mut rng, n, m, 2.0))
            };
            let (lhs, rhs) = verify_mean_lipschitz(o, &u, &v)?;
            rep.check(lhs - rhs - MEAN_LIPSCHITZ_TOL, || format!("{}: {lhs:.6e} > {rhs:.6e}", o.scheme()));
        }
        if o.scheme() == OracleScheme::FixedRowColNorms {
            for _ in 0..pairs {
                let u = random_box_point(&mut rng, n, m, 2.0);
                let (lhs, rhs) = verify_mean_lipschitz(o, &u, &Point::zeros(n, m))?;
                let gap = (lhs - rhs).abs() / rhs.max(1.0);
                rep.check(gap - MEAN_LIPSCHITZ_TOL, || format!("equality witness off by {gap:.3e}"));
            }
        }
    }
    Ok(rep)
}

/// `E_k[Phi_{k+1}(z*)]` by enumerating the oracle support and both outcomes
/// of the snapshot coin.
pub fn expected_next_phi(solver: &Solver, kind: LyapunovKind, z_star: &[f64]) -> Result<f64> {
    let q = solver.params().p;
    let mut e = 0.0;
    for (prob, draw) in solver.next_support()? {
        for (refresh, pc) in [(true, q), (false, 1.0 - q)] {
            if pc == 0.0 {
                continue;
            }
            let mut t = solver.clone();
            t.step_with(StepChoice::Forced { draw, refresh })?;
            e += prob * pc * lyapunov_phi(kind, &t, z_star);
        }
    }
    Ok(e)
}

/// Step used by the Lyapunov harness: half the admissible bound, or the
/// mutated value.
fn harness_config(algo: Algo, problem: &VIProblem, p: f64, seed: u64, mutation: Mutation) -> SolverConfig {
    let l = problem.oracle.lipschitz();
    let alpha = 1.0 - p;
    let bound = if algo == Algo::VrForb { (alpha * (1.0 - alpha)).sqrt() } else { (1.0 - alpha).sqrt() };
    let tau = match mutation {
        Mutation::StepOverL(f) => f / l,
        _ => 0.5 * bound / l,
    };
    SolverConfig::new(algo).p(p).alpha(alpha).tau(tau).seed(seed)
}

/// Runs `iterations` steps of `algo` on the planted three-component instance
/// and checks the conditional decrease of the potential at every step (and
/// its nonnegativity for the forward-reflected method).
pub fn lyapunov_run(
    algo: Algo,
    seed: u64,
    iterations: usize,
    mutation: Mutation,
    rep: &mut SuiteReport,
) -> Result<()> {
    let problem = make_planted_simplex_sum(3, 2, 3, 5)?;
    let problem = match mutation {
        Mutation::OracleBias(b) => {
            let mut p = problem;
            p.oracle = p.oracle.scaled(b);
            p
        }
        _ => problem,
    };
    let z_star = problem.known_solution.clone().expect("planted solution").into_vec();
    let kind = if algo == Algo::VrForb { LyapunovKind::Forb } else { LyapunovKind::EgFbf };
    let cfg = harness_config(algo, &problem, 0.4, seed, mutation);
    let mut s = Solver::new_unchecked(&problem, &cfg)?;
    for k in 0..iterations {
        let now = lyapunov_phi(kind, &s, &z_star);
        if kind == LyapunovKind::Forb {
            rep.check(-now - FORB_NONNEG_TOL, || format!("{algo} seed {seed} iter {k}: potential {now:.3e}"));
        }
        let next = expected_next_phi(&s, kind, &z_star)?;
        rep.check(next - now - LYAPUNOV_TOL, || format!("{algo} seed {seed} iter {k}: {next:.6e} > {now:.6e}"));
        s.step()?;
    }
    Ok(())
}

pub fn lyapunov(mutation: Mutation, seeds: u64, iterations: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("lyapunov");
    for algo in [Algo::VrEg, Algo::VrFbf, Algo::VrForb] {
        for seed in 0..seeds {
            lyapunov_run(algo, seed, iterations, mutation, &mut rep)?;
        }
    }
    Ok(rep)
}

/// `<p - a, z - p> + tau (g(z) - g(p)) >= 0` for `p = prox_{tau g}(a)` and
/// random `z` in `dom g`, over every regularizer family.
pub fn prox_inequality(samples: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("prox-inequality");
    let (n, m) = (3, 4);
    let gs = vec![
        ProxFriendlyG::Zero,
        ProxFriendlyG::simplex(n, m),
        ProxFriendlyG::LinearPlusIndicator {
            f: BlockFunction::L1 { weight: 0.7 },
            b: vec![0.5, -1.0, 0.2, 0.3],
            dual_set: DualSet::Free,
        },
        ProxFriendlyG::LinearPlusIndicator {
            f: BlockFunction::HalfSquaredDistance { center: vec![1.0, -2.0, 0.5] },
            b: vec![0.1; 4],
            dual_set: DualSet::Nonneg,
        },
        ProxFriendlyG::strongly_convex_quadratic(0.8, vec![0.3; n + m])?,
        ProxFriendlyG::box_nonneg(vec![-1.0; n], vec![2.0; n], m)?,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for g in &gs {
        for _ in 0..samples {
            let tau = 0.05 + 2.0 * rng.random::<f64>();
            let a = random_box_point(&mut rng, n, m, 3.0);
            let p = g.prox(&a, tau)?;
            let z = g.project_to_domain(&random_box_point(&mut rng, n, m, 3.0));
            let pa: Vec<f64> = p.as_slice().iter().zip(a.as_slice()).map(|(x, y)| x - y).collect();
            let zp: Vec<f64> = z.as_slice().iter().zip(p.as_slice()).map(|(x, y)| x - y).collect();
            let lhs = dot(&pa, &zp) + tau * (g.value(&z) - g.value(&p));
            let scale = 1.0 + dist2_sq(a.as_slice(), z.as_slice());
            rep.check(-lhs - 1e-10 * scale, || format!("{g:?}: prox inequality {lhs:.3e}"));
        }
    }
    Ok(rep)
}

/// Projection lands on the simplex, entropic steps stay strictly positive
/// and normalized, and double-loop entropic iterates stay interior.
pub fn simplex_invariants(samples: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("simplex-invariants");
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..samples {
        let k = 1 + rng.random_range(0..12);
        let v: Vec<f64> = (0..k).map(|_| 10.0 * rng.random::<f64>() - 5.0).collect();
        let p = project_simplex(&v);
        let off = (p.iter().sum::<f64>() - 1.0).abs();
        let neg = p.iter().cloned().fold(0.0f64, |acc, x| acc.max(-x));
        rep.check(off.max(neg) - 1e-12, || format!("projection of {v:?} is off the simplex"));
    }
    let (n, m) = (4, 3);
    let geom = Geometry::EntropicSimplex { n, m };
    let g = ProxFriendlyG::simplex(n, m);
    for _ in 0..samples {
        let z1 = random_simplex_point(&mut rng, n, m);
        let z2 = random_simplex_point(&mut rng, n, m);
        let d1 = geom.to_dual(&z1)?;
        let d2 = geom.to_dual(&z2)?;
        let lin: Vec<f64> = (0..n + m).map(|_| 40.0 * rng.random::<f64>() - 20.0).collect();
        let alpha = rng.random::<f64>();
        let (p, _) = mirror_argmin(&geom, &g, &lin, alpha, 1.0, &z1, &d1, &d2)?;
        let ok = on_simplex(p.x(), 1e-9) && on_simplex(p.y(), 1e-9) && p.as_slice().iter().all(|v| *v > 0.0);
        rep.check(if ok { 0.0 } else { 1.0 }, || format!("entropic step left the relative interior: {p:?}"));
    }
    let problem = make_matrix_game(
        Arc::new(generators::policeman_burglar(6, 1)?),
        Geometry::EntropicSimplex { n: 6, m: 6 },
        OracleScheme::VariableEntropic,
    )?;
    for seed in 0..3 {
        let mut s = Solver::new(&problem, &SolverConfig::new(Algo::VrMp).seed(seed))?;
        for _ in 0..samples {
            s.step()?;
            let z = s.current();
            let ok = on_simplex(z.x(), 1e-9) && on_simplex(z.y(), 1e-9) && z.as_slice().iter().all(|v| *v > 0.0);
            rep.check(if ok { 0.0 } else { 1.0 }, || format!("double-loop iterate left the interior: {z:?}"));
        }
    }
    Ok(rep)
}
