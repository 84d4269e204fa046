use crate::error::{Result, VrviError};
use serde::{Deserialize, Serialize};

/// A joint primal-dual vector `z = (x, y)`, stored contiguously with the
/// `x` block first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    coords: Vec<f64>,
    split: usize,
}

impl Point {
    /// Builds a point from its two blocks. Both blocks must be non-empty and finite.
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        let mut coords = Vec::with_capacity(x.len() + y.len());
        coords.extend_from_slice(x);
        coords.extend_from_slice(y);
        Self::from_vec(coords, x.len())
    }

    /// Builds a point from a contiguous coordinate list split after `n` entries.
    pub fn from_vec(coords: Vec<f64>, n: usize) -> Result<Self> {
        if n == 0 || n >= coords.len() {
            return Err(VrviError::Domain(format!(
                "both blocks must be non-empty (split {n} of {})",
                coords.len()
            )));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(VrviError::Numeric(format!("coordinate {i} is not finite")));
        }
        Ok(Point { coords, split: n })
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        assert!(n >= 1 && m >= 1, "blocks must be non-empty");
        Point {
            coords: vec![0.0; n + m],
            split: n,
        }
    }

    /// Uniform distribution on each block: `x = 1/n`, `y = 1/m`.
    pub fn uniform(n: usize, m: usize) -> Self {
        assert!(n >= 1 && m >= 1, "blocks must be non-empty");
        let mut coords = vec![1.0 / n as f64; n];
        coords.extend(std::iter::repeat_n(1.0 / m as f64, m));
        Point { coords, split: n }
    }

    pub fn x(&self) -> &[f64] {
        &self.coords[..self.split]
    }

    pub fn y(&self) -> &[f64] {
        &self.coords[self.split..]
    }

    pub fn n(&self) -> usize {
        self.split
    }

    pub fn m(&self) -> usize {
        self.coords.len() - self.split
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.coords
    }

    /// Mutable access to the raw coordinates. Callers are responsible for
    /// keeping them finite.
    pub(crate) fn coords_mut(&mut self) -> &mut [f64] {
        &mut self.coords
    }

    /// A point with the same block split and new coordinates.
    pub fn with_coords(&self, coords: Vec<f64>) -> Result<Self> {
        if coords.len() != self.coords.len() {
            return Err(VrviError::Dimension {
                expected: self.coords.len(),
                got: coords.len(),
            });
        }
        Self::from_vec(coords, self.split)
    }

    pub fn same_shape(&self, other: &Point) -> bool {
        self.split == other.split && self.coords.len() == other.coords.len()
    }
}
