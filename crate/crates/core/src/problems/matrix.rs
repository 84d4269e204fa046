//! Payoff matrices of bilinear games, their norms, and MatrixMarket I/O.

use crate::error::{Result, VrviError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::{BufRead, Write};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

const POWER_ITERS: usize = 200;
const POWER_RTOL: f64 = 1e-8;
const POWER_SEED: u64 = 0x5eed;

/// Counts row and column slices handed out by [`MatrixGame::row`] and
/// [`MatrixGame::col`]. Only present when explicitly attached.
#[derive(Debug, Default)]
pub struct AccessCounter {
    rows: AtomicU64,
    cols: AtomicU64,
}

impl AccessCounter {
    pub fn rows(&self) -> u64 {
        self.rows.load(Ordering::Relaxed)
    }

    pub fn cols(&self) -> u64 {
        self.cols.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.rows.store(0, Ordering::Relaxed);
        self.cols.store(0, Ordering::Relaxed);
    }
}

/// Sparse view of one row or column: parallel index and value lists.
#[derive(Clone, Copy, Debug)]
pub struct SparseSlice<'a> {
    pub idx: &'a [usize],
    pub val: &'a [f64],
}

impl SparseSlice<'_> {
    /// `out[idx] += s * val`
    #[inline]
    pub fn scatter_add(&self, s: f64, out: &mut [f64]) {
        for (&k, &a) in self.idx.iter().zip(self.val) {
            out[k] += s * a;
        }
    }
}

/// An `m x n` payoff matrix `A`: the `x` player (dimension `n`) minimizes and
/// the `y` player (dimension `m`) maximizes `<Ax, y>`.
#[derive(Clone, Debug)]
pub struct MatrixGame {
    m: usize,
    n: usize,
    dense: Vec<f64>,
    row_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    row_val: Vec<f64>,
    col_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    col_val: Vec<f64>,
    row_sq: Vec<f64>,
    col_sq: Vec<f64>,
    spectral: f64,
    frobenius: f64,
    max_abs: f64,
    counter: Option<Arc<AccessCounter>>,
}

impl MatrixGame {
    /// Builds from a dense row-major `m x n` array. Entries must be finite.
    pub fn from_dense(m: usize, n: usize, data: Vec<f64>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(VrviError::Domain("matrix must have at least one row and column".into()));
        }
        if data.len() != m * n {
            return Err(VrviError::Dimension { expected: m * n, got: data.len() });
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(VrviError::Domain(format!("entry ({}, {}) is not finite", k / n, k % n)));
        }

        let mut row_ptr = Vec::with_capacity(m + 1);
        let (mut row_idx, mut row_val) = (Vec::new(), Vec::new());
        row_ptr.push(0);
        for i in 0..m {
            for j in 0..n {
                let a = data[i * n + j];
                if a != 0.0 {
                    row_idx.push(j);
                    row_val.push(a);
                }
            }
            row_ptr.push(row_idx.len());
        }
        let mut col_ptr = Vec::with_capacity(n + 1);
        let (mut col_idx, mut col_val) = (Vec::new(), Vec::new());
        col_ptr.push(0);
        for j in 0..n {
            for i in 0..m {
                let a = data[i * n + j];
                if a != 0.0 {
                    col_idx.push(i);
                    col_val.push(a);
                }
            }
            col_ptr.push(col_idx.len());
        }

        let row_sq: Vec<f64> = (0..m)
            .map(|i| row_val[row_ptr[i]..row_ptr[i + 1]].iter().map(|a| a * a).sum())
            .collect();
        let col_sq: Vec<f64> = (0..n)
            .map(|j| col_val[col_ptr[j]..col_ptr[j + 1]].iter().map(|a| a * a).sum())
            .collect();
        let frobenius = row_sq.iter().sum::<f64>().sqrt();
        let max_abs = data.iter().fold(0.0f64, |acc, a| acc.max(a.abs()));

        let mut game = MatrixGame {
            m,
            n,
            dense: data,
            row_ptr,
            row_idx,
            row_val,
            col_ptr,
            col_idx,
            col_val,
            row_sq,
            col_sq,
            spectral: 0.0,
            frobenius,
            max_abs,
            counter: None,
        };
        game.spectral = game.power_iteration();
        Ok(game)
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(m: usize, n: usize, entries: &[(usize, usize, f64)]) -> Result<Self> {
        let mut data = vec![0.0; m * n];
        for &(i, j, v) in entries {
            if i >= m || j >= n {
                return Err(VrviError::Domain(format!("entry ({i}, {j}) outside a {m}x{n} matrix")));
            }
            data[i * n + j] += v;
        }
        Self::from_dense(m, n, data)
    }

    /// Largest singular value by power iteration on `A^T A` from a fixed
    /// pseudo-random start.
    fn power_iteration(&self) -> f64 {
        if self.frobenius == 0.0 {
            return 0.0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(POWER_SEED);
        let mut v: Vec<f64> = (0..self.n).map(|_| rng.random::<f64>() + 0.5).collect();
        let mut av = vec![0.0; self.m];
        let mut atav = vec![0.0; self.n];
        let mut sigma = 0.0;
        for _ in 0..POWER_ITERS {
            let nv = crate::linalg::norm2_sq(&v).sqrt();
            if nv == 0.0 {
                break;
            }
            v.iter_mut().for_each(|c| *c /= nv);
            self.apply_into(&v, &mut av);
            let next = crate::linalg::norm2_sq(&av).sqrt();
            self.apply_t_into(&av, &mut atav);
            std::mem::swap(&mut v, &mut atav);
            let done = (next - sigma).abs() <= POWER_RTOL * next;
            sigma = next;
            if done {
                break;
            }
        }
        sigma
    }

    /// Attaches a fresh access counter and returns it.
    pub fn attach_counter(&mut self) -> Arc<AccessCounter> {
        let c = Arc::new(AccessCounter::default());
        self.counter = Some(c.clone());
        c
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.dense[i * self.n + j]
    }

    pub fn dense(&self) -> &[f64] {
        &self.dense
    }

    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    /// `||A||` (largest singular value).
    pub fn spectral_norm(&self) -> f64 {
        self.spectral
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius
    }

    /// `max_ij |A_ij|`
    pub fn max_norm(&self) -> f64 {
        self.max_abs
    }

    /// Squared Euclidean norms of the rows.
    pub fn row_sq_norms(&self) -> &[f64] {
        &self.row_sq
    }

    /// Squared Euclidean norms of the columns.
    pub fn col_sq_norms(&self) -> &[f64] {
        &self.col_sq
    }

    /// Row `i` of `A` as a sparse slice over column indices.
    #[inline]
    pub fn row(&self, i: usize) -> SparseSlice<'_> {
        if let Some(c) = &self.counter {
            c.rows.fetch_add(1, Ordering::Relaxed);
        }
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        SparseSlice { idx: &self.row_idx[r.clone()], val: &self.row_val[r] }
    }

    /// Column `j` of `A` as a sparse slice over row indices.
    #[inline]
    pub fn col(&self, j: usize) -> SparseSlice<'_> {
        if let Some(c) = &self.counter {
            c.cols.fetch_add(1, Ordering::Relaxed);
        }
        let r = self.col_ptr[j]..self.col_ptr[j + 1];
        SparseSlice { idx: &self.col_idx[r.clone()], val: &self.col_val[r] }
    }

    /// `out = A x`
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let r = self.row_ptr[i]..self.row_ptr[i + 1];
            *o = self.row_idx[r.clone()]
                .iter()
                .zip(&self.row_val[r])
                .map(|(&j, &a)| a * x[j])
                .sum();
        }
    }

    /// `out = A^T y`
    pub fn apply_t_into(&self, y: &[f64], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            let r = self.col_ptr[j]..self.col_ptr[j + 1];
            *o = self.col_idx[r.clone()]
                .iter()
                .zip(&self.col_val[r])
                .map(|(&i, &a)| a * y[i])
                .sum();
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        self.apply_into(x, &mut out);
        out
    }

    pub fn apply_t(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.apply_t_into(y, &mut out);
        out
    }

    /// `-A^T`, the payoff matrix of the game with the players swapped.
    pub fn neg_transpose(&self) -> Result<Self> {
        let mut data = vec![0.0; self.m * self.n];
        for i in 0..self.m {
            for j in 0..self.n {
                data[j * self.m + i] = -self.get(i, j);
            }
        }
        Self::from_dense(self.n, self.m, data)
    }

    /// Reads a MatrixMarket file (`coordinate` or `array`, real or integer,
    /// general or symmetric).
    pub fn read_matrix_market<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| VrviError::Parse("empty MatrixMarket input".into()))??;
        let tokens: Vec<String> = header.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
        if tokens.len() < 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
            return Err(VrviError::Parse(format!("not a MatrixMarket matrix header: {header:?}")));
        }
        let coordinate = match tokens[2].as_str() {
            "coordinate" => true,
            "array" => false,
            other => return Err(VrviError::Parse(format!("unsupported format {other:?}"))),
        };
        if !matches!(tokens[3].as_str(), "real" | "integer" | "double") {
            return Err(VrviError::Parse(format!("unsupported field {:?}", tokens[3])));
        }
        let symmetry = tokens[4].clone();
        if !matches!(symmetry.as_str(), "general" | "symmetric" | "skew-symmetric") {
            return Err(VrviError::Parse(format!("unsupported symmetry {symmetry:?}")));
        }

        let mut body = Vec::new();
        for line in lines {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('%') {
                continue;
            }
            body.push(t.to_string());
        }
        let mut body = body.into_iter();
        let size = body.next().ok_or_else(|| VrviError::Parse("missing size line".into()))?;
        let dims: Vec<usize> = size
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| VrviError::Parse(format!("bad size line {size:?}"))))
            .collect::<Result<_>>()?;

        let parse_f = |s: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|_| VrviError::Parse(format!("bad value {s:?}")))
        };
        let sign = if symmetry == "skew-symmetric" { -1.0 } else { 1.0 };
        if coordinate {
            if dims.len() != 3 {
                return Err(VrviError::Parse(format!("bad coordinate size line {size:?}")));
            }
            let (m, n, count) = (dims[0], dims[1], dims[2]);
            let mut entries = Vec::with_capacity(count);
            for line in body.by_ref().take(count) {
                let f: Vec<&str> = line.split_whitespace().collect();
                if f.len() < 3 {
                    return Err(VrviError::Parse(format!("bad entry line {line:?}")));
                }
                let i: usize = f[0].parse().map_err(|_| VrviError::Parse(format!("bad row in {line:?}")))?;
                let j: usize = f[1].parse().map_err(|_| VrviError::Parse(format!("bad column in {line:?}")))?;
                if i == 0 || j == 0 {
                    return Err(VrviError::Parse(format!("indices are 1-based: {line:?}")));
                }
                let v = parse_f(f[2])?;
                entries.push((i - 1, j - 1, v));
                if symmetry != "general" && i != j {
                    entries.push((j - 1, i - 1, sign * v));
                }
            }
            if entries.len() < count {
                return Err(VrviError::Parse(format!("expected {count} entries")));
            }
            Self::from_triplets(m, n, &entries)
        } else {
            if dims.len() != 2 {
                return Err(VrviError::Parse(format!("bad array size line {size:?}")));
            }
            let (m, n) = (dims[0], dims[1]);
            let mut data = vec![0.0; m * n];
            // Column-major; symmetric storage lists the lower triangle only.
            let mut next = || -> Result<f64> {
                let s = body.next().ok_or_else(|| VrviError::Parse("array data ended early".into()))?;
                parse_f(s.split_whitespace().next().unwrap_or(""))
            };
            for j in 0..n {
                let start = match symmetry.as_str() {
                    "general" => 0,
                    "symmetric" => j,
                    _ => j + 1,
                };
                for i in start..m {
                    let v = next()?;
                    data[i * n + j] = v;
                    if symmetry != "general" {
                        data[j * n + i] = sign * v;
                    }
                }
            }
            Self::from_dense(m, n, data)
        }
    }

    /// Writes the nonzeros in `coordinate real general` format with
    /// round-trip exact values.
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", self.m, self.n, self.nnz())?;
        for i in 0..self.m {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                writeln!(w, "{} {} {:e}", i + 1, self.row_idx[k] + 1, self.row_val[k])?;
            }
        }
        Ok(())
    }

    /// Writes the full matrix in `array real general` (column-major) format.
    pub fn write_matrix_market_array<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "%%MatrixMarket matrix array real general")?;
        writeln!(w, "{} {}", self.m, self.n)?;
        for j in 0..self.n {
            for i in 0..self.m {
                writeln!(w, "{:e}", self.get(i, j))?;
            }
        }
        Ok(())
    }

    /// A 64-bit FNV-1a hash of the shape and entries, used to tag traces.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        let mut feed = |bytes: &[u8]| {
            for b in bytes {
                h ^= *b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        };
        feed(&(self.m as u64).to_le_bytes());
        feed(&(self.n as u64).to_le_bytes());
        for v in &self.dense {
            feed(&v.to_bits().to_le_bytes());
        }
        h
    }
}
