//! Variance-reduced splitting methods for monotone variational inequalities
//! `0 in F(z) + dg(z)` with finite-sum or bilinear structure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod linalg;
pub mod metrics;
pub mod oracle;
pub mod presets;
pub mod problems;
pub mod solvers;
pub mod verify;

pub use error::{Result, VrviError};
pub use geometry::{bregman_div, mirror_argmin, Geometry, Point, ProxFriendlyG};
pub use oracle::{NormPairing, OracleScheme, StochasticOracle};
pub use presets::{find_preset, GameKind, Preset, PRESETS};
pub use problems::{GapKind, MatrixGame, VIProblem};
pub use solvers::{run, Algo, RunTrace, Solver, SolverConfig};
