//! Convergence measures and Lyapunov evaluators.

use crate::error::{Result, VrviError};
use crate::geometry::{checked_simplex, Point, ProxFriendlyG};
use crate::linalg::{dist2_sq, dot};
use crate::oracle::StochasticOracle;
use crate::problems::{GapKind, MatrixGame, VIProblem};
use crate::solvers::Solver;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Rounding noise below zero that is reported as an exact zero gap.
pub const GAP_CLIP: f64 = 1e-12;

/// `max_i (Ax)_i - min_j (A^T y)_j` without clipping. Both blocks must lie
/// on their simplices (within `1e-9`); they are renormalized first.
pub fn simplex_duality_gap_raw(game: &MatrixGame, z: &Point) -> Result<f64> {
    if z.n() != game.cols() || z.m() != game.rows() {
        return Err(VrviError::Dimension { expected: game.cols() + game.rows(), got: z.dim() });
    }
    let x = checked_simplex(z.x(), "x block")?;
    let y = checked_simplex(z.y(), "y block")?;
    let ax = game.apply(&x);
    let aty = game.apply_t(&y);
    let hi = ax.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = aty.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(hi - lo)
}

/// Duality gap of a simplex-constrained bilinear game; rounding noise in
/// `[-1e-12, 0)` is clipped to zero.
pub fn simplex_duality_gap(game: &MatrixGame, z: &Point) -> Result<f64> {
    Ok(clip_gap(simplex_duality_gap_raw(game, z)?).0)
}

/// Returns the clipped value and whether clipping happened.
pub fn clip_gap(v: f64) -> (f64, bool) {
    if (-GAP_CLIP..0.0).contains(&v) {
        (0.0, true)
    } else {
        (v, false)
    }
}

/// A lower bound on `max_{u in C} <F(u), z - u> + g(z) - g(u)` where `C` is
/// the ball of radius `radius` around `z0` intersected with `dom g`.
///
/// Candidates are `z0`, the known solution, the vertex pairs of the simplex
/// product (when `g` is the simplex indicator and they fit in `budget`), and
/// otherwise `budget` pseudo-random points of `dom g` at radii spread
/// geometrically over `[1e-3, 1e3]`. The candidate list does not depend on
/// `radius`, so the bound is nondecreasing in it. Negative values are
/// clipped to zero.
pub fn restricted_gap(problem: &VIProblem, z: &Point, radius: f64, budget: usize) -> Result<f64> {
    let g = &problem.g;
    let gz = g.value(z);
    if !gz.is_finite() {
        return Ok(f64::INFINITY);
    }
    let z0 = &problem.z0;
    let r2 = radius * radius;
    let mut best = f64::NEG_INFINITY;
    let mut consider = |u: &Point| -> Result<()> {
        if dist2_sq(u.as_slice(), z0.as_slice()) > r2 * (1.0 + 1e-12) {
            return Ok(());
        }
        let gu = g.value(u);
        if !gu.is_finite() {
            return Ok(());
        }
        let fu = problem.oracle.full(u)?;
        let diff: Vec<f64> = z.as_slice().iter().zip(u.as_slice()).map(|(a, b)| a - b).collect();
        best = best.max(dot(&fu, &diff) + gz - gu);
        Ok(())
    };
    consider(z0)?;
    if let Some(s) = &problem.known_solution {
        consider(s)?;
    }
    let (n, m) = (z0.n(), z0.m());
    let mut remaining = budget;
    if let ProxFriendlyG::SimplexIndicator { .. } = g {
        if n * m <= remaining {
            remaining -= n * m;
            for i in 0..n {
                for j in 0..m {
                    let mut v = vec![0.0; n + m];
                    v[i] = 1.0;
                    v[n + j] = 1.0;
                    consider(&Point::from_vec(v, n)?)?;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x6a9);
    for k in 0..remaining {
        let t = if remaining > 1 { k as f64 / (remaining - 1) as f64 } else { 0.5 };
        let r = 10f64.powf(-3.0 + 6.0 * t);
        let dir: Vec<f64> = (0..n + m).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = dot(&dir, &dir).sqrt().max(f64::MIN_POSITIVE);
        let scale = r * rng.random::<f64>().sqrt() / norm;
        let raw: Vec<f64> = z0.as_slice().iter().zip(&dir).map(|(a, d)| a + scale * d).collect();
        consider(&g.project_to_domain(&Point::from_vec(raw, n)?))?;
    }
    Ok(best.max(0.0))
}

/// The problem's convergence measure at `z`, and whether rounding noise was
/// clipped to zero.
pub fn problem_gap(problem: &VIProblem, z: &Point) -> Result<(f64, bool)> {
    match problem.gap_kind {
        GapKind::SimplexDuality => {
            let game = problem
                .game()
                .ok_or_else(|| VrviError::Config("duality gap needs a matrix game".into()))?;
            Ok(clip_gap(simplex_duality_gap_raw(game, z)?))
        }
        GapKind::RestrictedMerit { radius, budget } => Ok((restricted_gap(problem, z, radius, budget)?, false)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LyapunovKind {
    /// `alpha ||z - z*||^2 + (1 - alpha)/p ||w - z*||^2`
    EgFbf,
    /// The above plus `2 tau <F(z) - F(w_prev), z* - z> + (1 - alpha) ||z - w_prev||^2`.
    Forb,
}

/// The potential at explicit points. `oracle` supplies `F` for the
/// forward-reflected terms.
#[allow(clippy::too_many_arguments)]
pub fn lyapunov_value(
    kind: LyapunovKind,
    z: &[f64],
    w: &[f64],
    prev_w: &[f64],
    z_star: &[f64],
    alpha: f64,
    p: f64,
    tau: f64,
    oracle: &StochasticOracle,
) -> f64 {
    let base = alpha * dist2_sq(z, z_star) + (1.0 - alpha) / p * dist2_sq(w, z_star);
    match kind {
        LyapunovKind::EgFbf => base,
        LyapunovKind::Forb => {
            let d = z.len();
            let (mut fz, mut fp, mut scratch) = (vec![0.0; d], vec![0.0; d], Vec::new());
            oracle.full_into(z, &mut fz, &mut scratch);
            oracle.full_into(prev_w, &mut fp, &mut scratch);
            let cross: f64 = (0..d).map(|i| (fz[i] - fp[i]) * (z_star[i] - z[i])).sum();
            base + 2.0 * tau * cross + (1.0 - alpha) * dist2_sq(z, prev_w)
        }
    }
}

/// The potential at the solver's current state.
pub fn lyapunov_phi(kind: LyapunovKind, solver: &Solver, z_star: &[f64]) -> f64 {
    let p = solver.params();
    lyapunov_value(
        kind,
        solver.z(),
        solver.w(),
        solver.prev_w(),
        z_star,
        p.alpha,
        p.p,
        p.tau,
        &solver.problem().oracle,
    )
}
