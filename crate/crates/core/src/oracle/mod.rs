//! Unbiased stochastic oracles `F_xi` for finite sums and bilinear games.
//!
//! An oracle draws an index `xi` (possibly from a distribution that depends
//! on the pair of points `(u, v)` the estimator will be evaluated at) and
//! then evaluates `F_xi` at any point. Solvers only ever need the corrected
//! difference `F_xi(u) - F_xi(v)`, which every scheme estimates without bias.
//!
//! Per-draw RNG consumption: finite sums draw one index; games draw the row
//! first and then the column.

mod finite_sum;
mod sampler;

pub use finite_sum::{Component, FiniteSum, OperatorFn};
pub use sampler::{DiscreteSampler, FixedSampler};

use crate::error::{Result, VrviError};
use crate::geometry::Point;
use crate::linalg::{norm1, norm2_sq, norm_inf};
use crate::problems::MatrixGame;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

/// Largest support [`StochasticOracle::support`] will enumerate.
pub const SUPPORT_BOUND: usize = 250_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OracleScheme {
    /// `F_xi = F`: no randomness.
    Exact,
    /// Finite sums, `q_i = 1/N`.
    Uniform,
    /// Finite sums, `q_i = L_i / sum_j L_j`.
    Importance,
    /// Games, `r_i ~ ||A_i:||^2`, `c_j ~ ||A_:j||^2`.
    FixedRowColNorms,
    /// Games, `r_i ~ (u^y_i - v^y_i)^2`, `c_j ~ (u^x_j - v^x_j)^2`.
    VariableEuclidean,
    /// Games, `r_i ~ |u^y_i - v^y_i|`, `c_j ~ |u^x_j - v^x_j|`.
    VariableEntropic,
}

impl OracleScheme {
    pub fn name(&self) -> &'static str {
        match self {
            OracleScheme::Exact => "full",
            OracleScheme::Uniform => "uniform",
            OracleScheme::Importance => "importance",
            OracleScheme::FixedRowColNorms => "fixed",
            OracleScheme::VariableEuclidean => "variable-euclidean",
            OracleScheme::VariableEntropic => "variable-entropic",
        }
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, OracleScheme::VariableEuclidean | OracleScheme::VariableEntropic)
    }
}

impl fmt::Display for OracleScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for OracleScheme {
    type Err = VrviError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "full" | "exact" => OracleScheme::Exact,
            "uniform" => OracleScheme::Uniform,
            "importance" => OracleScheme::Importance,
            "fixed" | "row-col-norms" => OracleScheme::FixedRowColNorms,
            "variable-euclidean" => OracleScheme::VariableEuclidean,
            "variable-entropic" => OracleScheme::VariableEntropic,
            other => return Err(VrviError::Config(format!("unknown oracle scheme {other:?}"))),
        })
    }
}

/// Norms in which the mean-Lipschitz property is stated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormPairing {
    /// `||z||_2` and its self-dual.
    Euclidean,
    /// `sqrt(||x||_1^2 + ||y||_1^2)` with dual `sqrt(||gx||_inf^2 + ||gy||_inf^2)`.
    BlockL1,
}

impl NormPairing {
    fn primal_sq(&self, d: &[f64], n: usize) -> f64 {
        match self {
            NormPairing::Euclidean => norm2_sq(d),
            NormPairing::BlockL1 => norm1(&d[..n]).powi(2) + norm1(&d[n..]).powi(2),
        }
    }

    fn dual_sq(&self, g: &[f64], n: usize) -> f64 {
        match self {
            NormPairing::Euclidean => norm2_sq(g),
            NormPairing::BlockL1 => norm_inf(&g[..n]).powi(2) + norm_inf(&g[n..]).powi(2),
        }
    }
}

/// The underlying operator.
#[derive(Clone, Debug)]
pub enum Source {
    Game(Arc<MatrixGame>),
    Sum(Arc<FiniteSum>),
}

/// A realized index together with the importance weights that make
/// `F_xi` unbiased.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Draw {
    Exact,
    /// `F_xi = scale * F_index`.
    Component { index: usize, scale: f64 },
    /// `F_xi(z) = (row_scale A_row:^T y_row ; -col_scale A_:col x_col)`.
    Entry { row: usize, col: usize, row_scale: f64, col_scale: f64 },
}

/// The sampling distribution for one draw.
#[derive(Clone, Debug, PartialEq)]
pub enum Distribution {
    Exact,
    Components(Vec<f64>),
    Entries { rows: Vec<f64>, cols: Vec<f64> },
}

/// Reusable buffers for the per-iteration samplers.
#[derive(Clone, Debug, Default)]
pub struct OracleScratch {
    rows: DiscreteSampler,
    cols: DiscreteSampler,
    buf: Vec<f64>,
    buf2: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct StochasticOracle {
    source: Source,
    scheme: OracleScheme,
    pairing: NormPairing,
    lipschitz: f64,
    bias: f64,
    fixed_a: Option<FixedSampler>,
    fixed_b: Option<FixedSampler>,
}

impl StochasticOracle {
    /// Game oracle. `pairing` selects the norms (and therefore the constant
    /// `L`) used for the exact scheme; stochastic schemes fix it.
    pub fn game(game: Arc<MatrixGame>, scheme: OracleScheme, pairing: NormPairing) -> Result<Self> {
        if game.frobenius_norm() == 0.0 {
            return Err(VrviError::Domain("payoff matrix is identically zero".into()));
        }
        let (lipschitz, pairing) = match (scheme, pairing) {
            (OracleScheme::Exact, NormPairing::Euclidean) => (game.spectral_norm(), pairing),
            (OracleScheme::Exact, NormPairing::BlockL1) => (game.max_norm(), pairing),
            (OracleScheme::FixedRowColNorms | OracleScheme::VariableEuclidean, NormPairing::Euclidean) => {
                (game.frobenius_norm(), pairing)
            }
            (OracleScheme::VariableEntropic, NormPairing::BlockL1) => (game.max_norm(), pairing),
            (OracleScheme::Uniform | OracleScheme::Importance, _) => {
                return Err(VrviError::Config(format!(
                    "scheme {scheme} applies to finite sums, not matrix games"
                )))
            }
            (s, p) => {
                return Err(VrviError::Config(format!(
                    "scheme {s} has no mean-Lipschitz bound in the {p:?} norm pairing"
                )))
            }
        };
        let fixed_a = Some(FixedSampler::new(game.row_sq_norms())?);
        let fixed_b = Some(FixedSampler::new(game.col_sq_norms())?);
        Ok(StochasticOracle {
            source: Source::Game(game),
            scheme,
            pairing,
            lipschitz,
            bias: 1.0,
            fixed_a,
            fixed_b,
        })
    }

    pub fn finite_sum(sum: Arc<FiniteSum>, scheme: OracleScheme) -> Result<Self> {
        let l = sum.lipschitz();
        let n = l.len() as f64;
        let (lipschitz, fixed_a) = match scheme {
            OracleScheme::Exact => (l.iter().sum(), None),
            OracleScheme::Uniform => ((n * l.iter().map(|v| v * v).sum::<f64>()).sqrt(), None),
            OracleScheme::Importance => (l.iter().sum(), Some(FixedSampler::new(l)?)),
            s => {
                return Err(VrviError::Config(format!(
                    "scheme {s} applies to matrix games, not finite sums"
                )))
            }
        };
        Ok(StochasticOracle {
            source: Source::Sum(sum),
            scheme,
            pairing: NormPairing::Euclidean,
            lipschitz,
            bias: 1.0,
            fixed_a,
            fixed_b: None,
        })
    }

    /// Copy whose stochastic evaluations are multiplied by `factor`. Only
    /// useful for checking that the verification suites catch a biased oracle.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut o = self.clone();
        o.bias = factor;
        o
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    pub fn scheme(&self) -> OracleScheme {
        self.scheme
    }

    pub fn pairing(&self) -> NormPairing {
        self.pairing
    }

    /// Mean-Lipschitz constant `L` of the scheme.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn n(&self) -> usize {
        match &self.source {
            Source::Game(g) => g.cols(),
            Source::Sum(s) => s.n(),
        }
    }

    pub fn m(&self) -> usize {
        match &self.source {
            Source::Game(g) => g.rows(),
            Source::Sum(s) => s.m(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n() + self.m()
    }

    /// Cost of one full evaluation of `F`, which is also the epoch unit:
    /// `nnz(A)` for games, `N` for finite sums.
    pub fn full_cost(&self) -> f64 {
        match &self.source {
            Source::Game(g) => g.nnz() as f64,
            Source::Sum(s) => s.len() as f64,
        }
    }

    /// Cost of one evaluation of `F_xi`: one component for finite sums; for
    /// games, one row plus one column, i.e. `(m + n) / 2` entry-sized units
    /// so that `nnz(A)` units touch as many entries as a full pass.
    pub fn sample_cost(&self) -> f64 {
        match (&self.source, self.scheme) {
            (_, OracleScheme::Exact) => self.full_cost(),
            (Source::Game(g), _) => (g.rows() + g.cols()) as f64 / 2.0,
            (Source::Sum(_), _) => 1.0,
        }
    }

    /// Suggested snapshot probability: `2/N` for finite sums and
    /// `(m + n) / nnz(A)` for games, capped at 1.
    pub fn default_p(&self) -> f64 {
        match (&self.source, self.scheme) {
            (_, OracleScheme::Exact) => 1.0,
            (Source::Game(g), _) => ((g.rows() + g.cols()) as f64 / g.nnz() as f64).min(1.0),
            (Source::Sum(s), _) => (2.0 / s.len() as f64).min(1.0),
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(VrviError::Dimension { expected: self.dim(), got: len });
        }
        Ok(())
    }

    fn check_point(&self, z: &Point) -> Result<()> {
        self.check_len(z.dim())?;
        if z.n() != self.n() {
            return Err(VrviError::Dimension { expected: self.n(), got: z.n() });
        }
        Ok(())
    }

    /// `out = F(z)`. `scratch` needs the problem dimension for finite sums.
    pub fn full_into(&self, z: &[f64], out: &mut [f64], scratch: &mut Vec<f64>) {
        match &self.source {
            Source::Game(g) => {
                let n = g.cols();
                let (ox, oy) = out.split_at_mut(n);
                g.apply_t_into(&z[n..], ox);
                g.apply_into(&z[..n], oy);
                oy.iter_mut().for_each(|v| *v = -*v);
            }
            Source::Sum(s) => {
                scratch.resize(z.len(), 0.0);
                s.eval_into(z, out, scratch);
            }
        }
    }

    /// `F(z)`
    pub fn full(&self, z: &Point) -> Result<Vec<f64>> {
        self.check_point(z)?;
        let mut out = vec![0.0; z.dim()];
        self.full_into(z.as_slice(), &mut out, &mut Vec::new());
        Ok(out)
    }

    fn block_weights(&self, u: &[f64], v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.n();
        let pw = |a: f64, b: f64| match self.scheme {
            OracleScheme::VariableEntropic => (a - b).abs(),
            _ => (a - b) * (a - b),
        };
        let rows: Vec<f64> = u[n..].iter().zip(&v[n..]).map(|(a, b)| pw(*a, *b)).collect();
        let cols: Vec<f64> = u[..n].iter().zip(&v[..n]).map(|(a, b)| pw(*a, *b)).collect();
        (rows, cols)
    }

    /// The distribution `Q_{u,v}` (which ignores `(u, v)` for fixed schemes).
    /// Variable schemes fall back to the row/column-norm marginal on a block
    /// where `u` and `v` coincide.
    pub fn distribution(&self, u: &[f64], v: &[f64]) -> Result<Distribution> {
        self.check_len(u.len())?;
        self.check_len(v.len())?;
        Ok(match self.scheme {
            OracleScheme::Exact => Distribution::Exact,
            OracleScheme::Uniform => {
                let n = self.num_components();
                Distribution::Components(vec![1.0 / n as f64; n])
            }
            OracleScheme::Importance => {
                Distribution::Components(self.fixed_a.as_ref().expect("importance table").probs().to_vec())
            }
            OracleScheme::FixedRowColNorms => Distribution::Entries {
                rows: self.fixed_a.as_ref().expect("row table").probs().to_vec(),
                cols: self.fixed_b.as_ref().expect("col table").probs().to_vec(),
            },
            OracleScheme::VariableEuclidean | OracleScheme::VariableEntropic => {
                let (rw, cw) = self.block_weights(u, v);
                let norm = |w: Vec<f64>, fallback: &FixedSampler| -> Vec<f64> {
                    let s: f64 = w.iter().sum();
                    if s > 0.0 {
                        w.iter().map(|x| x / s).collect()
                    } else {
                        fallback.probs().to_vec()
                    }
                };
                Distribution::Entries {
                    rows: norm(rw, self.fixed_a.as_ref().expect("row table")),
                    cols: norm(cw, self.fixed_b.as_ref().expect("col table")),
                }
            }
        })
    }

    fn num_components(&self) -> usize {
        match &self.source {
            Source::Sum(s) => s.len(),
            Source::Game(g) => g.rows() * g.cols(),
        }
    }

    /// Draws `xi ~ Q_{u,v}`. `u` and `v` are read only by variable schemes.
    pub fn draw<R: Rng + ?Sized>(&self, u: &[f64], v: &[f64], rng: &mut R, scratch: &mut OracleScratch) -> Draw {
        match self.scheme {
            OracleScheme::Exact => Draw::Exact,
            OracleScheme::Uniform => {
                let n = self.num_components();
                Draw::Component { index: rng.random_range(0..n), scale: self.bias * n as f64 }
            }
            OracleScheme::Importance => {
                let t = self.fixed_a.as_ref().expect("importance table");
                let index = t.sample(rng);
                Draw::Component { index, scale: self.bias / t.prob(index) }
            }
            OracleScheme::FixedRowColNorms => {
                let (ta, tb) = (self.fixed_a.as_ref().expect("rows"), self.fixed_b.as_ref().expect("cols"));
                let row = ta.sample(rng);
                let col = tb.sample(rng);
                Draw::Entry {
                    row,
                    col,
                    row_scale: self.bias / ta.prob(row),
                    col_scale: self.bias / tb.prob(col),
                }
            }
            OracleScheme::VariableEuclidean | OracleScheme::VariableEntropic => {
                let n = self.n();
                let entropic = self.scheme == OracleScheme::VariableEntropic;
                let pw = move |(a, b): (&f64, &f64)| {
                    let d = a - b;
                    if entropic {
                        d.abs()
                    } else {
                        d * d
                    }
                };
                let (row, row_p) = sample_block(
                    &mut scratch.rows,
                    u[n..].iter().zip(&v[n..]).map(pw),
                    self.fixed_a.as_ref().expect("rows"),
                    rng,
                );
                let (col, col_p) = sample_block(
                    &mut scratch.cols,
                    u[..n].iter().zip(&v[..n]).map(pw),
                    self.fixed_b.as_ref().expect("cols"),
                    rng,
                );
                Draw::Entry { row, col, row_scale: self.bias / row_p, col_scale: self.bias / col_p }
            }
        }
    }

    /// `out = F_xi(z)`
    pub fn eval_into(&self, draw: &Draw, z: &[f64], out: &mut [f64], scratch: &mut OracleScratch) {
        match (*draw, &self.source) {
            (Draw::Exact, _) => self.full_into(z, out, &mut scratch.buf),
            (Draw::Component { index, scale }, Source::Sum(s)) => {
                s.component(index).eval_into(z, out);
                out.iter_mut().for_each(|o| *o *= scale);
            }
            (Draw::Entry { row, col, row_scale, col_scale }, Source::Game(g)) => {
                let n = g.cols();
                out.iter_mut().for_each(|o| *o = 0.0);
                let (ox, oy) = out.split_at_mut(n);
                g.row(row).scatter_add(row_scale * z[n + row], ox);
                g.col(col).scatter_add(-col_scale * z[col], oy);
            }
            _ => panic!("draw {draw:?} does not belong to this oracle"),
        }
    }

    /// `out += s * (F_xi(u) - F_xi(v))`. For games this touches exactly one
    /// row and one column of `A`.
    pub fn add_diff(&self, draw: &Draw, s: f64, u: &[f64], v: &[f64], out: &mut [f64], scratch: &mut OracleScratch) {
        match (*draw, &self.source) {
            (Draw::Exact, _) => {
                let d = u.len();
                let mut a = std::mem::take(&mut scratch.buf2);
                a.resize(d, 0.0);
                let mut tmp = std::mem::take(&mut scratch.buf);
                self.full_into(u, &mut a, &mut tmp);
                crate::linalg::axpy(s, &a, out);
                self.full_into(v, &mut a, &mut tmp);
                crate::linalg::axpy(-s, &a, out);
                scratch.buf = tmp;
                scratch.buf2 = a;
            }
            (Draw::Component { index, scale }, Source::Sum(sum)) => {
                scratch.buf.resize(u.len(), 0.0);
                sum.component(index).add_diff(s * scale, u, v, out, &mut scratch.buf);
            }
            (Draw::Entry { row, col, row_scale, col_scale }, Source::Game(g)) => {
                let n = g.cols();
                let (ox, oy) = out.split_at_mut(n);
                g.row(row).scatter_add(s * row_scale * (u[n + row] - v[n + row]), ox);
                g.col(col).scatter_add(-s * col_scale * (u[col] - v[col]), oy);
            }
            _ => panic!("draw {draw:?} does not belong to this oracle"),
        }
    }

    /// Every outcome of `Q_{u,v}` with positive probability.
    pub fn support(&self, u: &[f64], v: &[f64]) -> Result<Vec<(f64, Draw)>> {
        let dist = self.distribution(u, v)?;
        let bias = self.bias;
        match dist {
            Distribution::Exact => Ok(vec![(1.0, Draw::Exact)]),
            Distribution::Components(q) => Ok(q
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(|(index, &p)| (p, Draw::Component { index, scale: bias / p }))
                .collect()),
            Distribution::Entries { rows, cols } => {
                let nr = rows.iter().filter(|&&p| p > 0.0).count();
                let nc = cols.iter().filter(|&&p| p > 0.0).count();
                let size = nr.saturating_mul(nc);
                if size > SUPPORT_BOUND {
                    return Err(VrviError::SupportTooLarge { size, bound: SUPPORT_BOUND });
                }
                let mut out = Vec::with_capacity(size);
                for (row, &r) in rows.iter().enumerate().filter(|(_, &p)| p > 0.0) {
                    for (col, &c) in cols.iter().enumerate().filter(|(_, &p)| p > 0.0) {
                        out.push((
                            r * c,
                            Draw::Entry { row, col, row_scale: bias / r, col_scale: bias / c },
                        ));
                    }
                }
                Ok(out)
            }
        }
    }
}

fn sample_block<R: Rng + ?Sized>(
    sampler: &mut DiscreteSampler,
    weights: impl Iterator<Item = f64>,
    fallback: &FixedSampler,
    rng: &mut R,
) -> (usize, f64) {
    match sampler.rebuild(weights) {
        Ok(()) => {
            let i = sampler.sample(rng);
            (i, sampler.prob(i))
        }
        Err(_) => {
            let i = fallback.sample(rng);
            (i, fallback.prob(i))
        }
    }
}

/// Largest coordinate deviation of the enumerated expectation from the
/// full operator: `E[F_xi(z)] - F(z)` when `anchor` is `None`, otherwise
/// `E_{Q_{z,w}}[F_xi(z) - F_xi(w)] - (F(z) - F(w))`. Variable schemes are only
/// unbiased in the second sense and require an anchor.
pub fn verify_unbiased(oracle: &StochasticOracle, z: &Point, anchor: Option<&Point>) -> Result<f64> {
    oracle.check_point(z)?;
    let d = z.dim();
    let mut scratch = OracleScratch::default();
    let mut want = oracle.full(z)?;
    let mut mean = vec![0.0; d];
    let mut buf = vec![0.0; d];
    match anchor {
        None => {
            if oracle.scheme().is_variable() {
                return Err(VrviError::Config(
                    "variable schemes are unbiased only for differences; supply an anchor".into(),
                ));
            }
            for (p, draw) in oracle.support(z.as_slice(), z.as_slice())? {
                oracle.eval_into(&draw, z.as_slice(), &mut buf, &mut scratch);
                crate::linalg::axpy(p, &buf, &mut mean);
            }
        }
        Some(w) => {
            oracle.check_point(w)?;
            let fw = oracle.full(w)?;
            want.iter_mut().zip(&fw).for_each(|(a, b)| *a -= b);
            for (p, draw) in oracle.support(z.as_slice(), w.as_slice())? {
                buf.iter_mut().for_each(|b| *b = 0.0);
                oracle.add_diff(&draw, 1.0, z.as_slice(), w.as_slice(), &mut buf, &mut scratch);
                crate::linalg::axpy(p, &buf, &mut mean);
            }
        }
    }
    Ok(mean.iter().zip(&want).fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs())))
}

/// `(E_{Q_{u,v}} ||F_xi(u) - F_xi(v)||_*^2, L^2 ||u - v||^2)` by enumeration,
/// in the oracle's norm pairing.
pub fn verify_mean_lipschitz(oracle: &StochasticOracle, u: &Point, v: &Point) -> Result<(f64, f64)> {
    oracle.check_point(u)?;
    oracle.check_point(v)?;
    let n = u.n();
    let mut scratch = OracleScratch::default();
    let mut buf = vec![0.0; u.dim()];
    let mut lhs = 0.0;
    for (p, draw) in oracle.support(u.as_slice(), v.as_slice())? {
        buf.iter_mut().for_each(|b| *b = 0.0);
        oracle.add_diff(&draw, 1.0, u.as_slice(), v.as_slice(), &mut buf, &mut scratch);
        lhs += p * oracle.pairing().dual_sq(&buf, n);
    }
    let diff: Vec<f64> = u.as_slice().iter().zip(v.as_slice()).map(|(a, b)| a - b).collect();
    let rhs = oracle.lipschitz().powi(2) * oracle.pairing().primal_sq(&diff, n);
    Ok((lhs, rhs))
}
