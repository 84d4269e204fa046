//! Shared fixtures for the criterion benches.

use std::sync::Arc;
use vrvi_core::presets::game_problem;
use vrvi_core::problems::generators;
use vrvi_core::{OracleScheme, Solver, SolverConfig, VIProblem};

/// Policeman-burglar game of size `n` in the requested geometry.
pub fn policeman(n: usize, entropic: bool) -> VIProblem {
    let a = Arc::new(generators::policeman_burglar(n, 1).expect("valid size"));
    let scheme = if entropic { OracleScheme::VariableEntropic } else { OracleScheme::FixedRowColNorms };
    game_problem(a, entropic, scheme).expect("valid pairing")
}

/// A solver advanced past its first snapshot so that steps are representative.
pub fn warmed<'a>(problem: &'a VIProblem, config: &SolverConfig, steps: usize) -> Solver<'a> {
    let mut s = Solver::new(problem, config).expect("valid config");
    for _ in 0..steps {
        s.step().expect("finite iterates");
    }
    s
}
