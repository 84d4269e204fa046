//! Benchmark payoff matrices.
//!
//! Pinned formulas (version 1 of the generator set):
//! - policeman and burglar: `A_ij = w_i (1 - exp(-theta |i - j|))`, `w_i = |N(0, 1)|`,
//!   `theta = 0.8`;
//! - test family 1: `A_ij = ((i + j - 1) / (2n - 1))^a`;
//! - test family 2: `A_ij = ((|i - j| + 1) / (2n - 1))^a`;
//!
//! with 1-based `i, j` and exponent `a = 1` by default.

use super::matrix::MatrixGame;
use crate::error::{Result, VrviError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub const GENERATOR_VERSION: u32 = 1;
pub const POLICEMAN_THETA: f64 = 0.8;
pub const NEMIROVSKI_EXPONENT: f64 = 1.0;

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(VrviError::Domain(format!("generators need n >= 2, got {n}")));
    }
    Ok(())
}

pub fn policeman_burglar(n: usize, seed: u64) -> Result<MatrixGame> {
    check_n(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w: Vec<f64> = (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z.abs()
        })
        .collect();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let d = (i as f64 - j as f64).abs();
            data[i * n + j] = w[i] * (1.0 - (-POLICEMAN_THETA * d).exp());
        }
    }
    MatrixGame::from_dense(n, n, data)
}

/// The two deterministic test families. `seed` is accepted for a uniform
/// generator interface and ignored.
pub fn nemirovski_test(n: usize, family: u8, _seed: u64) -> Result<MatrixGame> {
    nemirovski_test_with_exponent(n, family, NEMIROVSKI_EXPONENT)
}

pub fn nemirovski_test_with_exponent(n: usize, family: u8, exponent: f64) -> Result<MatrixGame> {
    check_n(n)?;
    if !(exponent > 0.0) {
        return Err(VrviError::Domain(format!("exponent must be positive, got {exponent}")));
    }
    let denom = (2 * n - 1) as f64;
    let entry: fn(usize, usize) -> usize = match family {
        1 => |i, j| i + j + 1,
        2 => |i, j| i.abs_diff(j) + 1,
        f => return Err(VrviError::Domain(format!("unknown test family {f}, expected 1 or 2"))),
    };
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            // 0-based i, j: i + j + 1 equals the 1-based i + j - 1.
            data[i * n + j] = (entry(i, j) as f64 / denom).powf(exponent);
        }
    }
    MatrixGame::from_dense(n, n, data)
}

/// Dense `m x n` matrix with independent standard normal entries.
pub fn gaussian(m: usize, n: usize, seed: u64) -> Result<MatrixGame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f64> = (0..m * n).map(|_| StandardNormal.sample(&mut rng)).collect();
    MatrixGame::from_dense(m, n, data)
}

/// Dense `m x n` matrix with entries uniform on `[-1, 1]`.
pub fn uniform(m: usize, n: usize, seed: u64) -> Result<MatrixGame> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f64> = (0..m * n).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect();
    MatrixGame::from_dense(m, n, data)
}

pub fn matching_pennies() -> MatrixGame {
    MatrixGame::from_dense(2, 2, vec![1.0, -1.0, -1.0, 1.0]).expect("static matrix")
}

pub fn rock_paper_scissors() -> MatrixGame {
    MatrixGame::from_dense(3, 3, vec![0.0, -1.0, 1.0, 1.0, 0.0, -1.0, -1.0, 1.0, 0.0])
        .expect("static matrix")
}
