//! Named matrix-game experiments: payoff generator, geometry, oracle and the
//! algorithms compared on it.

use crate::error::{Result, VrviError};
use crate::geometry::Geometry;
use crate::oracle::OracleScheme;
use crate::problems::{generators, make_matrix_game, MatrixGame, VIProblem};
use crate::solvers::{Algo, SolverConfig};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GameKind {
    Policeman,
    Nemirovski1,
    Nemirovski2,
    Gaussian,
    Uniform,
    Pennies,
    RockPaperScissors,
}

impl GameKind {
    pub const ALL: [GameKind; 7] = [
        GameKind::Policeman,
        GameKind::Nemirovski1,
        GameKind::Nemirovski2,
        GameKind::Gaussian,
        GameKind::Uniform,
        GameKind::Pennies,
        GameKind::RockPaperScissors,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            GameKind::Policeman => "policeman",
            GameKind::Nemirovski1 => "nemirovski1",
            GameKind::Nemirovski2 => "nemirovski2",
            GameKind::Gaussian => "gaussian",
            GameKind::Uniform => "uniform",
            GameKind::Pennies => "pennies",
            GameKind::RockPaperScissors => "rps",
        }
    }

    /// Square `n x n` payoff; the fixed-size games ignore `n`.
    pub fn generate(&self, n: usize, seed: u64) -> Result<MatrixGame> {
        match self {
            GameKind::Policeman => generators::policeman_burglar(n, seed),
            GameKind::Nemirovski1 => generators::nemirovski_test(n, 1, seed),
            GameKind::Nemirovski2 => generators::nemirovski_test(n, 2, seed),
            GameKind::Gaussian => generators::gaussian(n, n, seed),
            GameKind::Uniform => generators::uniform(n, n, seed),
            GameKind::Pennies => Ok(generators::matching_pennies()),
            GameKind::RockPaperScissors => Ok(generators::rock_paper_scissors()),
        }
    }
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for GameKind {
    type Err = VrviError;

    fn from_str(s: &str) -> Result<Self> {
        GameKind::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| VrviError::Config(format!("unknown generator {s:?}")))
    }
}

/// Builds the simplex game in the requested geometry.
pub fn game_problem(a: Arc<MatrixGame>, entropic: bool, scheme: OracleScheme) -> Result<VIProblem> {
    let geometry = if entropic {
        Geometry::EntropicSimplex { n: a.cols(), m: a.rows() }
    } else {
        Geometry::Euclidean
    };
    make_matrix_game(a, geometry, scheme)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub game: GameKind,
    pub entropic: bool,
    pub scheme: OracleScheme,
    pub algos: &'static [Algo],
    pub n: usize,
    /// Seed of the payoff generator; run seeds are separate.
    pub matrix_seed: u64,
    pub seeds: &'static [u64],
    pub budget_epochs: f64,
    pub eval_every: f64,
}

const EUCLIDEAN_ALGOS: &[Algo] = &[Algo::DetEg, Algo::VrEg, Algo::VrMp, Algo::VrFbf, Algo::VrForb];
const ENTROPIC_ALGOS: &[Algo] = &[Algo::DetEg, Algo::VrMp];
const SEEDS: &[u64] = &[1, 2, 3, 4, 5];

const fn preset(name: &'static str, game: GameKind, entropic: bool) -> Preset {
    Preset {
        name,
        game,
        entropic,
        scheme: if entropic { OracleScheme::VariableEntropic } else { OracleScheme::FixedRowColNorms },
        algos: if entropic { ENTROPIC_ALGOS } else { EUCLIDEAN_ALGOS },
        n: 200,
        matrix_seed: 1,
        seeds: SEEDS,
        budget_epochs: 3000.0,
        eval_every: 2.0,
    }
}

pub const PRESETS: [Preset; 6] = [
    preset("fig1-policeman", GameKind::Policeman, false),
    preset("fig1-nemirovski1", GameKind::Nemirovski1, false),
    preset("fig1-nemirovski2", GameKind::Nemirovski2, false),
    preset("fig2-policeman", GameKind::Policeman, true),
    preset("fig2-nemirovski1", GameKind::Nemirovski1, true),
    preset("fig2-nemirovski2", GameKind::Nemirovski2, true),
];

pub fn find_preset(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

impl Preset {
    pub fn problem(&self, n: usize) -> Result<VIProblem> {
        let a = Arc::new(self.game.generate(n, self.matrix_seed)?);
        game_problem(a, self.entropic, self.scheme)
    }

    pub fn config(&self, algo: Algo, seed: u64) -> SolverConfig {
        SolverConfig::new(algo).budget_epochs(self.budget_epochs).eval_every(self.eval_every).seed(seed)
    }
}
