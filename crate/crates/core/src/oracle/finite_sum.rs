//! Operators of the form `F = sum_i F_i`.

use crate::error::{Result, VrviError};
use std::fmt;
use std::sync::Arc;

pub type OperatorFn = dyn Fn(&[f64], &mut [f64]) + Send + Sync;

/// One summand `F_i`. Lipschitz bounds are declared by the caller.
#[derive(Clone)]
pub enum Component {
    /// `F_i(z) = M z + c` with `M` stored row-major (`d x d`).
    Affine { matrix: Vec<f64>, offset: Vec<f64> },
    /// Arbitrary map writing `F_i(z)` into the output buffer.
    Callback(Arc<OperatorFn>),
}

impl fmt::Debug for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Affine { offset, .. } => write!(f, "Affine(dim {})", offset.len()),
            Component::Callback(_) => write!(f, "Callback"),
        }
    }
}

impl Component {
    /// `out = F_i(z)`
    pub fn eval_into(&self, z: &[f64], out: &mut [f64]) {
        match self {
            Component::Affine { matrix, offset } => {
                let d = offset.len();
                for (r, o) in out.iter_mut().enumerate() {
                    *o = offset[r] + crate::linalg::dot(&matrix[r * d..(r + 1) * d], z);
                }
            }
            Component::Callback(f) => f(z, out),
        }
    }

    /// `out += s * (F_i(u) - F_i(v))`. `scratch` must have the problem dimension.
    pub fn add_diff(&self, s: f64, u: &[f64], v: &[f64], out: &mut [f64], scratch: &mut [f64]) {
        match self {
            Component::Affine { matrix, .. } => {
                let d = u.len();
                for (r, o) in out.iter_mut().enumerate() {
                    let row = &matrix[r * d..(r + 1) * d];
                    let mut acc = 0.0;
                    for k in 0..d {
                        acc += row[k] * (u[k] - v[k]);
                    }
                    *o += s * acc;
                }
            }
            Component::Callback(f) => {
                f(u, scratch);
                crate::linalg::axpy(s, scratch, out);
                f(v, scratch);
                crate::linalg::axpy(-s, scratch, out);
            }
        }
    }
}

/// `F = sum_i F_i` on points with blocks `(n, m)`.
#[derive(Clone, Debug)]
pub struct FiniteSum {
    n: usize,
    m: usize,
    components: Vec<Component>,
    lipschitz: Vec<f64>,
}

impl FiniteSum {
    pub fn new(n: usize, m: usize, components: Vec<Component>, lipschitz: Vec<f64>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(VrviError::Domain("both blocks must be non-empty".into()));
        }
        if components.is_empty() {
            return Err(VrviError::Domain("a finite sum needs at least one component".into()));
        }
        if components.len() != lipschitz.len() {
            return Err(VrviError::Dimension { expected: components.len(), got: lipschitz.len() });
        }
        if let Some(l) = lipschitz.iter().find(|l| !(**l >= 0.0) || !l.is_finite()) {
            return Err(VrviError::Domain(format!("component Lipschitz bound {l} is invalid")));
        }
        let d = n + m;
        for c in &components {
            if let Component::Affine { matrix, offset } = c {
                if offset.len() != d {
                    return Err(VrviError::Dimension { expected: d, got: offset.len() });
                }
                if matrix.len() != d * d {
                    return Err(VrviError::Dimension { expected: d * d, got: matrix.len() });
                }
            }
        }
        Ok(FiniteSum { n, m, components, lipschitz })
    }

    /// Affine components with the Lipschitz bound set to the spectral norm
    /// of each matrix (computed by power iteration on `M^T M`).
    pub fn affine(n: usize, m: usize, parts: Vec<(Vec<f64>, Vec<f64>)>) -> Result<Self> {
        let d = n + m;
        if let Some((mat, _)) = parts.iter().find(|(mat, _)| mat.len() != d * d) {
            return Err(VrviError::Dimension { expected: d * d, got: mat.len() });
        }
        let lipschitz = parts.iter().map(|(mat, _)| spectral_norm_square(mat, d)).collect();
        let components = parts
            .into_iter()
            .map(|(matrix, offset)| Component::Affine { matrix, offset })
            .collect();
        Self::new(n, m, components, lipschitz)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn component(&self, i: usize) -> &Component {
        &self.components[i]
    }

    pub fn lipschitz(&self) -> &[f64] {
        &self.lipschitz
    }

    /// `out = sum_i F_i(z)`
    pub fn eval_into(&self, z: &[f64], out: &mut [f64], scratch: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for c in &self.components {
            c.eval_into(z, scratch);
            crate::linalg::axpy(1.0, scratch, out);
        }
    }
}

/// Spectral norm of a square row-major matrix; a 1% safety margin covers the
/// power-iteration underestimate.
fn spectral_norm_square(mat: &[f64], d: usize) -> f64 {
    let mut v: Vec<f64> = (0..d).map(|k| 1.0 + 0.1 * (k as f64).sin()).collect();
    let mut mv = vec![0.0; d];
    let mut sigma = 0.0;
    for _ in 0..500 {
        let nv = crate::linalg::norm2_sq(&v).sqrt();
        if nv == 0.0 {
            break;
        }
        v.iter_mut().for_each(|c| *c /= nv);
        for r in 0..d {
            mv[r] = crate::linalg::dot(&mat[r * d..(r + 1) * d], &v);
        }
        sigma = crate::linalg::norm2_sq(&mv).sqrt();
        for c in 0..d {
            v[c] = (0..d).map(|r| mat[r * d + c] * mv[r]).sum();
        }
    }
    sigma * 1.01
}
