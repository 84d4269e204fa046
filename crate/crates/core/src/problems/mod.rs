//! Problem instances: the operator, its oracle, the regularizer and geometry.

pub mod generators;
mod matrix;

pub use matrix::{AccessCounter, MatrixGame, SparseSlice};

use crate::error::{Result, VrviError};
use crate::geometry::{BlockFunction, DualSet, Geometry, Point, ProxFriendlyG};
use crate::oracle::{Component, FiniteSum, NormPairing, OracleScheme, Source, StochasticOracle};
use std::fmt;
use std::sync::Arc;

/// How convergence is measured for a problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GapKind {
    /// `max_i (Ax)_i - min_j (A^T y)_j` on the simplex product.
    SimplexDuality,
    /// Sampled lower bound on the gap restricted to a ball around `z0`.
    RestrictedMerit { radius: f64, budget: usize },
}

/// Find `z*` with `<F(z*), z - z*> + g(z) - g(z*) >= 0` for all `z`.
#[derive(Clone, Debug)]
pub struct VIProblem {
    pub name: String,
    pub oracle: StochasticOracle,
    pub g: ProxFriendlyG,
    pub geometry: Geometry,
    pub z0: Point,
    pub known_solution: Option<Point>,
    pub gap_kind: GapKind,
}

impl VIProblem {
    pub fn new(
        name: impl Into<String>,
        oracle: StochasticOracle,
        g: ProxFriendlyG,
        geometry: Geometry,
        z0: Point,
        gap_kind: GapKind,
    ) -> Result<Self> {
        let (n, m) = (oracle.n(), oracle.m());
        if z0.n() != n || z0.m() != m {
            return Err(VrviError::Dimension { expected: n + m, got: z0.dim() });
        }
        g.check_dims(n, m)?;
        if let Geometry::EntropicSimplex { n: gn, m: gm } = geometry {
            if (gn, gm) != (n, m) {
                return Err(VrviError::Dimension { expected: n + m, got: gn + gm });
            }
            if !matches!(g, ProxFriendlyG::SimplexIndicator { .. }) {
                return Err(VrviError::Config("the entropic geometry requires the simplex indicator".into()));
            }
            if oracle.pairing() != NormPairing::BlockL1 {
                return Err(VrviError::Config(format!(
                    "oracle scheme {} is not paired with the entropic geometry",
                    oracle.scheme()
                )));
            }
        } else if oracle.pairing() != NormPairing::Euclidean {
            return Err(VrviError::Config(format!(
                "oracle scheme {} is not paired with the Euclidean geometry",
                oracle.scheme()
            )));
        }
        if !g.value(&z0).is_finite() {
            return Err(VrviError::Domain("starting point lies outside dom g".into()));
        }
        Ok(VIProblem { name: name.into(), oracle, g, geometry, z0, known_solution: None, gap_kind })
    }

    pub fn with_known_solution(mut self, z: Point) -> Result<Self> {
        if !z.same_shape(&self.z0) {
            return Err(VrviError::Dimension { expected: self.z0.dim(), got: z.dim() });
        }
        self.known_solution = Some(z);
        Ok(self)
    }

    pub fn with_start(mut self, z0: Point) -> Result<Self> {
        if !z0.same_shape(&self.z0) {
            return Err(VrviError::Dimension { expected: self.z0.dim(), got: z0.dim() });
        }
        if !self.g.value(&z0).is_finite() {
            return Err(VrviError::Domain("starting point lies outside dom g".into()));
        }
        if self.geometry.is_entropic() {
            self.geometry.to_dual(&z0)?;
        }
        self.z0 = z0;
        Ok(self)
    }

    /// Same problem with a different oracle scheme on the same operator.
    pub fn with_scheme(&self, scheme: OracleScheme) -> Result<Self> {
        let oracle = match self.oracle.source() {
            Source::Game(g) => StochasticOracle::game(g.clone(), scheme, self.oracle.pairing())?,
            Source::Sum(s) => StochasticOracle::finite_sum(s.clone(), scheme)?,
        };
        let mut p = self.clone();
        p.oracle = oracle;
        Ok(p)
    }

    pub fn game(&self) -> Option<&Arc<MatrixGame>> {
        match self.oracle.source() {
            Source::Game(g) => Some(g),
            Source::Sum(_) => None,
        }
    }

    pub fn n(&self) -> usize {
        self.z0.n()
    }

    pub fn m(&self) -> usize {
        self.z0.m()
    }

    /// Lipschitz constant `L_F` of the full operator in the geometry's norm:
    /// `||A||` (Euclidean) or `||A||_max` (entropic) for games, `sum_i L_i`
    /// for finite sums.
    pub fn operator_lipschitz(&self) -> f64 {
        match self.oracle.source() {
            Source::Game(g) if self.geometry.is_entropic() => g.max_norm(),
            Source::Game(g) => g.spectral_norm(),
            Source::Sum(s) => s.lipschitz().iter().sum(),
        }
    }

    /// Natural residual `||z - prox_g(z - F(z))||_2`, zero exactly at solutions.
    pub fn natural_residual(&self, z: &Point) -> Result<f64> {
        let f = self.oracle.full(z)?;
        let shifted: Vec<f64> = z.as_slice().iter().zip(&f).map(|(a, b)| a - b).collect();
        let p = self.g.prox(&z.with_coords(shifted)?, 1.0)?;
        Ok(crate::linalg::dist2_sq(p.as_slice(), z.as_slice()).sqrt())
    }
}

/// Bilinear game `min_x max_y <Ax, y>` over `simplex(n) x simplex(m)`,
/// started at the uniform point. Euclidean geometry pairs with the fixed or
/// variable Euclidean oracles, the entropic geometry with the variable
/// entropic oracle; both accept the exact oracle. When the uniform point is
/// an equilibrium it is recorded as the known solution.
pub fn make_matrix_game(a: Arc<MatrixGame>, geometry: Geometry, scheme: OracleScheme) -> Result<VIProblem> {
    let (m, n) = (a.rows(), a.cols());
    let pairing = match geometry {
        Geometry::Euclidean => NormPairing::Euclidean,
        Geometry::EntropicSimplex { .. } => {
            if scheme == OracleScheme::FixedRowColNorms || scheme == OracleScheme::VariableEuclidean {
                return Err(VrviError::Config(format!(
                    "oracle scheme {scheme} has no established bound in the entropic geometry"
                )));
            }
            NormPairing::BlockL1
        }
    };
    let oracle = StochasticOracle::game(a.clone(), scheme, pairing)?;
    let z0 = Point::uniform(n, m);
    let gap0 = crate::metrics::simplex_duality_gap(&a, &z0)?;
    let problem = VIProblem::new(
        "matrix-game",
        oracle,
        ProxFriendlyG::simplex(n, m),
        geometry,
        z0.clone(),
        GapKind::SimplexDuality,
    )?;
    if gap0 <= 1e-12 {
        problem.with_known_solution(z0)
    } else {
        Ok(problem)
    }
}

/// `min f(x)` subject to `Ax = b`, posed with `F = (A^T y; -Ax)` and
/// `g = f(x) + <b, y>` on free `y`, started at zero.
pub fn make_lin_constrained(
    f: BlockFunction,
    a: Arc<MatrixGame>,
    b: Vec<f64>,
    scheme: OracleScheme,
) -> Result<VIProblem> {
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m {
        return Err(VrviError::Dimension { expected: m, got: b.len() });
    }
    let oracle = StochasticOracle::game(a, scheme, NormPairing::Euclidean)?;
    let g = ProxFriendlyG::LinearPlusIndicator { f, b, dual_set: DualSet::Free };
    VIProblem::new(
        "lin-constrained",
        oracle,
        g,
        Geometry::Euclidean,
        Point::zeros(n, m),
        GapKind::RestrictedMerit { radius: 10.0, budget: 64 },
    )
}

type ValueFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradFn = dyn Fn(&[f64], &mut [f64]) + Send + Sync;

/// A smooth function with an optional gradient callback and a declared
/// Lipschitz constant for whatever the caller needs bounded (it is used
/// verbatim to build component bounds).
#[derive(Clone)]
pub struct SmoothFunction {
    pub value: Arc<ValueFn>,
    pub gradient: Option<Arc<GradFn>>,
    pub lipschitz: f64,
}

impl fmt::Debug for SmoothFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothFunction")
            .field("gradient", &self.gradient.is_some())
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

impl SmoothFunction {
    pub fn new(
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
        lipschitz: f64,
    ) -> Self {
        SmoothFunction { value: Arc::new(value), gradient: Some(Arc::new(gradient)), lipschitz }
    }
}

/// `min f(x)` over the box `[lower, upper]` subject to `h_i(x) <= 0`, posed
/// with `F = (grad f + sum_i y_i grad h_i; -h(x))` and
/// `g = indicator(box) + indicator(y >= 0)`.
///
/// Component `i` is `F_i = (grad f / N + y_i grad h_i; -h_i e_i)`, sampled
/// uniformly, so that `N F_i` is the stochastic oracle. Its declared bound
/// is `L_f / N + L_{h_i}`.
pub fn make_nonbilinear_constrained(
    f: SmoothFunction,
    h: Vec<SmoothFunction>,
    lower: Vec<f64>,
    upper: Vec<f64>,
) -> Result<VIProblem> {
    let n = lower.len();
    let big_n = h.len();
    if big_n == 0 {
        return Err(VrviError::Domain("at least one constraint is required".into()));
    }
    let grad_f = f
        .gradient
        .clone()
        .ok_or_else(|| VrviError::Config("objective gradient callback is missing".into()))?;
    let mut components = Vec::with_capacity(big_n);
    let mut lipschitz = Vec::with_capacity(big_n);
    for (i, hi) in h.iter().enumerate() {
        let grad_h = hi
            .gradient
            .clone()
            .ok_or_else(|| VrviError::Config(format!("gradient callback of constraint {i} is missing")))?;
        let value_h = hi.value.clone();
        let grad_f = grad_f.clone();
        let scale = 1.0 / big_n as f64;
        let op = move |z: &[f64], out: &mut [f64]| {
            let (x, y) = z.split_at(n);
            let (ox, oy) = out.split_at_mut(n);
            grad_f(x, ox);
            ox.iter_mut().for_each(|v| *v *= scale);
            let mut gh = vec![0.0; n];
            grad_h(x, &mut gh);
            crate::linalg::axpy(y[i], &gh, ox);
            oy.iter_mut().for_each(|v| *v = 0.0);
            oy[i] = -value_h(x);
        };
        components.push(Component::Callback(Arc::new(op)));
        lipschitz.push(f.lipschitz / big_n as f64 + hi.lipschitz);
    }
    let sum = Arc::new(FiniteSum::new(n, big_n, components, lipschitz)?);
    let oracle = StochasticOracle::finite_sum(sum, OracleScheme::Uniform)?;
    let g = ProxFriendlyG::box_nonneg(lower, upper, big_n)?;
    let z0 = g.project_to_domain(&Point::zeros(n, big_n));
    VIProblem::new(
        "nonbilinear-constrained",
        oracle,
        g,
        Geometry::Euclidean,
        z0,
        GapKind::RestrictedMerit { radius: 10.0, budget: 64 },
    )
}

/// Bilinear saddle with `A = scale * R` for a block rotation `R`
/// (`n` even, angles `pi/3` per 2x2 block), `g = mu/2 ||z||^2` and the fixed
/// row/column-norm oracle. The solution is `z* = 0`; the start is `z0`.
pub fn make_strongly_convex(n: usize, mu: f64, scale: f64, z0: Point) -> Result<VIProblem> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(VrviError::Domain(format!("dimension must be even and at least 2, got {n}")));
    }
    let (c, s) = ((std::f64::consts::PI / 3.0).cos(), (std::f64::consts::PI / 3.0).sin());
    let mut data = vec![0.0; n * n];
    for k in (0..n).step_by(2) {
        data[k * n + k] = scale * c;
        data[k * n + k + 1] = -scale * s;
        data[(k + 1) * n + k] = scale * s;
        data[(k + 1) * n + k + 1] = scale * c;
    }
    let a = Arc::new(MatrixGame::from_dense(n, n, data)?);
    let oracle = StochasticOracle::game(a, OracleScheme::FixedRowColNorms, NormPairing::Euclidean)?;
    let g = ProxFriendlyG::strongly_convex_quadratic(mu, vec![0.0; 2 * n])?;
    VIProblem::new(
        "strongly-convex",
        oracle,
        g,
        Geometry::Euclidean,
        z0,
        GapKind::RestrictedMerit { radius: 10.0, budget: 64 },
    )?
    .with_known_solution(Point::zeros(n, n))
}

/// A generic finite-sum problem in the Euclidean geometry.
pub fn make_finite_sum(
    sum: Arc<FiniteSum>,
    scheme: OracleScheme,
    g: ProxFriendlyG,
    z0: Point,
) -> Result<VIProblem> {
    let oracle = StochasticOracle::finite_sum(sum, scheme)?;
    let gap_kind = if matches!(g, ProxFriendlyG::SimplexIndicator { .. }) {
        GapKind::RestrictedMerit { radius: 4.0, budget: 64 }
    } else {
        GapKind::RestrictedMerit { radius: 10.0, budget: 64 }
    };
    VIProblem::new("finite-sum", oracle, g, Geometry::Euclidean, z0, gap_kind)
}

/// Simplex-constrained finite sum of `count` affine components with a
/// planted interior solution `c`: `F_i(z) = M_i (z - c) + d_i` where the
/// `M_i` are skew plus a shared positive semidefinite part and the `d_i` sum
/// to zero, so `F(c) = 0` and `F` is monotone.
pub fn make_planted_simplex_sum(n: usize, m: usize, count: usize, seed: u64) -> Result<VIProblem> {
    use rand::{Rng, SeedableRng};
    if n == 0 || m == 0 || count == 0 {
        return Err(VrviError::Domain("blocks and component count must be positive".into()));
    }
    let d = n + m;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let noise = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> { (0..d * d).map(|_| rng.random::<f64>() - 0.5).collect() };
    let b = noise(&mut rng);
    let mut psd = vec![0.0; d * d];
    for r in 0..d {
        for c in 0..d {
            psd[r * d + c] = (0..d).map(|k| b[r * d + k] * b[c * d + k]).sum::<f64>() / (d * count) as f64;
        }
    }
    let interior = |rng: &mut rand_chacha::ChaCha8Rng, k: usize| -> Vec<f64> {
        let v: Vec<f64> = (0..k).map(|_| 0.5 + rng.random::<f64>()).collect();
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    };
    let cx = interior(&mut rng, n);
    let cy = interior(&mut rng, m);
    let c = Point::new(&cx, &cy)?;
    let mut shifts: Vec<Vec<f64>> = (0..count).map(|_| (0..d).map(|_| rng.random::<f64>() - 0.5).collect()).collect();
    for k in 0..d {
        let mean = shifts.iter().map(|v| v[k]).sum::<f64>() / count as f64;
        shifts.iter_mut().for_each(|v| v[k] -= mean);
    }
    let parts = shifts
        .into_iter()
        .map(|shift| {
            let r = noise(&mut rng);
            let mat: Vec<f64> = (0..d * d).map(|k| r[k] - r[(k % d) * d + k / d] + psd[k]).collect();
            let offset = (0..d)
                .map(|row| shift[row] - crate::linalg::dot(&mat[row * d..(row + 1) * d], c.as_slice()))
                .collect();
            (mat, offset)
        })
        .collect();
    let sum = Arc::new(FiniteSum::affine(n, m, parts)?);
    let mut p = make_finite_sum(sum, OracleScheme::Uniform, ProxFriendlyG::simplex(n, m), Point::uniform(n, m))?;
    p.name = "planted-simplex-sum".into();
    p.with_known_solution(c)
}

#[cfg(test)]
mod tests;
