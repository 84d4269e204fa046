//! Prox-friendly regularizers `g` and their Euclidean proximal maps.

use super::point::Point;
use super::simplex::{on_simplex, project_simplex_into, SIMPLEX_TOL};
use crate::error::{Result, VrviError};
use serde::{Deserialize, Serialize};

/// A separable convex function of the `x` block with a closed-form prox.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum BlockFunction {
    Zero,
    /// `1/2 ||x - center||^2`
    HalfSquaredDistance { center: Vec<f64> },
    /// `weight * ||x||_1`
    L1 { weight: f64 },
}

impl BlockFunction {
    fn value(&self, x: &[f64]) -> f64 {
        match self {
            BlockFunction::Zero => 0.0,
            BlockFunction::HalfSquaredDistance { center } => {
                0.5 * x
                    .iter()
                    .zip(center)
                    .map(|(a, c)| (a - c) * (a - c))
                    .sum::<f64>()
            }
            BlockFunction::L1 { weight } => weight * x.iter().map(|a| a.abs()).sum::<f64>(),
        }
    }

    fn prox_into(&self, a: &[f64], tau: f64, out: &mut [f64]) {
        match self {
            BlockFunction::Zero => out.copy_from_slice(a),
            BlockFunction::HalfSquaredDistance { center } => {
                for ((o, ai), ci) in out.iter_mut().zip(a).zip(center) {
                    *o = (ai + tau * ci) / (1.0 + tau);
                }
            }
            BlockFunction::L1 { weight } => {
                let t = tau * weight;
                for (o, &ai) in out.iter_mut().zip(a) {
                    *o = ai.signum() * (ai.abs() - t).max(0.0);
                }
            }
        }
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        match self {
            BlockFunction::HalfSquaredDistance { center } if center.len() != n => {
                Err(VrviError::Dimension {
                    expected: n,
                    got: center.len(),
                })
            }
            BlockFunction::L1 { weight } if !(*weight >= 0.0) => Err(VrviError::Domain(
                format!("l1 weight must be nonnegative, got {weight}"),
            )),
            _ => Ok(()),
        }
    }
}

/// Constraint set for the `y` block of [`ProxFriendlyG::LinearPlusIndicator`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DualSet {
    Free,
    Nonneg,
}

/// The regularizer `g` of the variational inequality. Every variant has a
/// closed-form proximal operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ProxFriendlyG {
    /// `g = 0`; the prox is the identity.
    Zero,
    /// Indicator of `simplex(n) x simplex(m)`.
    SimplexIndicator { n: usize, m: usize },
    /// `g(x, y) = f(x) + <b, y> + indicator of the dual set on y`.
    LinearPlusIndicator {
        f: BlockFunction,
        b: Vec<f64>,
        dual_set: DualSet,
    },
    /// `g(z) = mu/2 ||z - center||^2` with `mu > 0`.
    StronglyConvexQuadratic { mu: f64, center: Vec<f64> },
    /// Indicator of the box `[lower, upper]` on `x` and of the nonnegative
    /// orthant of dimension `n_dual` on `y`.
    BoxNonneg {
        lower: Vec<f64>,
        upper: Vec<f64>,
        n_dual: usize,
    },
}

impl ProxFriendlyG {
    pub fn simplex(n: usize, m: usize) -> Self {
        ProxFriendlyG::SimplexIndicator { n, m }
    }

    pub fn strongly_convex_quadratic(mu: f64, center: Vec<f64>) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(VrviError::Domain(format!(
                "strong convexity modulus must be positive, got {mu}"
            )));
        }
        Ok(ProxFriendlyG::StronglyConvexQuadratic { mu, center })
    }

    pub fn box_nonneg(lower: Vec<f64>, upper: Vec<f64>, n_dual: usize) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(VrviError::Dimension {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l <= u)) {
            return Err(VrviError::Domain("box lower bound exceeds upper bound".into()));
        }
        Ok(ProxFriendlyG::BoxNonneg {
            lower,
            upper,
            n_dual,
        })
    }

    /// Checks that the regularizer is defined on points with blocks `(n, m)`.
    pub fn check_dims(&self, n: usize, m: usize) -> Result<()> {
        let mismatch = |expected: usize, got: usize| {
            if expected == got {
                Ok(())
            } else {
                Err(VrviError::Dimension { expected, got })
            }
        };
        match self {
            ProxFriendlyG::Zero => Ok(()),
            ProxFriendlyG::SimplexIndicator { n: gn, m: gm } => {
                mismatch(*gn, n)?;
                mismatch(*gm, m)
            }
            ProxFriendlyG::LinearPlusIndicator { f, b, .. } => {
                f.check_dim(n)?;
                mismatch(m, b.len())
            }
            ProxFriendlyG::StronglyConvexQuadratic { center, .. } => {
                mismatch(n + m, center.len())
            }
            ProxFriendlyG::BoxNonneg { lower, n_dual, .. } => {
                mismatch(n, lower.len())?;
                mismatch(*n_dual, m)
            }
        }
    }

    /// Strong convexity modulus of `g` (zero unless quadratic).
    pub fn strong_convexity(&self) -> f64 {
        match self {
            ProxFriendlyG::StronglyConvexQuadratic { mu, .. } => *mu,
            _ => 0.0,
        }
    }

    /// `g(z)`, or `+inf` outside the domain.
    pub fn value(&self, z: &Point) -> f64 {
        let (x, y) = (z.x(), z.y());
        match self {
            ProxFriendlyG::Zero => 0.0,
            ProxFriendlyG::SimplexIndicator { .. } => {
                if on_simplex(x, SIMPLEX_TOL) && on_simplex(y, SIMPLEX_TOL) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            ProxFriendlyG::LinearPlusIndicator { f, b, dual_set } => {
                if *dual_set == DualSet::Nonneg && y.iter().any(|&v| v < 0.0) {
                    return f64::INFINITY;
                }
                f.value(x) + y.iter().zip(b).map(|(a, c)| a * c).sum::<f64>()
            }
            ProxFriendlyG::StronglyConvexQuadratic { mu, center } => {
                0.5 * mu
                    * z.as_slice()
                        .iter()
                        .zip(center)
                        .map(|(a, c)| (a - c) * (a - c))
                        .sum::<f64>()
            }
            ProxFriendlyG::BoxNonneg { lower, upper, .. } => {
                let in_box = x
                    .iter()
                    .zip(lower.iter().zip(upper))
                    .all(|(v, (l, u))| *l <= *v && *v <= *u);
                if in_box && y.iter().all(|&v| v >= 0.0) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// `prox_{tau g}(anchor)`.
    pub fn prox(&self, anchor: &Point, tau: f64) -> Result<Point> {
        self.check_dims(anchor.n(), anchor.m())?;
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(VrviError::Domain(format!("prox step must be positive, got {tau}")));
        }
        let mut out = anchor.clone();
        self.prox_into(anchor.as_slice(), anchor.n(), tau, out.coords_mut());
        if !crate::linalg::all_finite(out.as_slice()) {
            return Err(VrviError::Numeric("prox produced a non-finite point".into()));
        }
        Ok(out)
    }

    /// Unchecked prox on raw coordinates split after `n`; `out` may not alias `a`.
    pub(crate) fn prox_into(&self, a: &[f64], n: usize, tau: f64, out: &mut [f64]) {
        let (ax, ay) = a.split_at(n);
        let (ox, oy) = out.split_at_mut(n);
        match self {
            ProxFriendlyG::Zero => out.copy_from_slice(a),
            ProxFriendlyG::SimplexIndicator { .. } => {
                project_simplex_into(ax, ox);
                project_simplex_into(ay, oy);
            }
            ProxFriendlyG::LinearPlusIndicator { f, b, dual_set } => {
                f.prox_into(ax, tau, ox);
                for ((o, &v), &bi) in oy.iter_mut().zip(ay).zip(b) {
                    let shifted = v - tau * bi;
                    *o = match dual_set {
                        DualSet::Free => shifted,
                        DualSet::Nonneg => shifted.max(0.0),
                    };
                }
            }
            ProxFriendlyG::StronglyConvexQuadratic { mu, center } => {
                let s = tau * mu;
                for ((o, &v), &c) in out.iter_mut().zip(a).zip(center) {
                    *o = (v + s * c) / (1.0 + s);
                }
            }
            ProxFriendlyG::BoxNonneg { lower, upper, .. } => {
                for (((o, &v), &l), &u) in ox.iter_mut().zip(ax).zip(lower).zip(upper) {
                    *o = v.clamp(l, u);
                }
                for (o, &v) in oy.iter_mut().zip(ay) {
                    *o = v.max(0.0);
                }
            }
        }
    }

    /// Some point of `dom g` close to `z`: the projection for indicator-type
    /// regularizers, `z` itself when `g` is finite everywhere.
    pub fn project_to_domain(&self, z: &Point) -> Point {
        match self {
            ProxFriendlyG::SimplexIndicator { .. } | ProxFriendlyG::BoxNonneg { .. } => {
                let mut out = z.clone();
                self.prox_into(z.as_slice(), z.n(), 1.0, out.coords_mut());
                out
            }
            ProxFriendlyG::LinearPlusIndicator {
                dual_set: DualSet::Nonneg,
                ..
            } => {
                let mut out = z.clone();
                let n = z.n();
                for v in &mut out.coords_mut()[n..] {
                    *v = v.max(0.0);
                }
                out
            }
            _ => z.clone(),
        }
    }
}
