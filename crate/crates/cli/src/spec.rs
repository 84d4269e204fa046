//! Run specifications: a flat `key = value` file, optionally seeded from a
//! named preset, with command-line overrides applied last.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use vrvi_core::presets::game_problem;
use vrvi_core::{find_preset, Algo, GameKind, MatrixGame, OracleScheme, SolverConfig, VIProblem};

/// Invalid or unreadable specification; maps to exit code 2.
#[derive(Debug)]
pub struct SpecError(pub String);

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for SpecError {}

fn bad(msg: impl Into<String>) -> SpecError {
    SpecError(msg.into())
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProblemSource {
    Generator(GameKind),
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunSpec {
    pub name: String,
    pub source: ProblemSource,
    pub n: usize,
    pub matrix_seed: u64,
    pub entropic: bool,
    pub oracle: Option<OracleScheme>,
    pub algos: Vec<Algo>,
    pub seeds: Vec<u64>,
    pub epochs: f64,
    pub eval_every: f64,
    pub target_gap: Option<f64>,
    pub p: Option<f64>,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub tau: Option<f64>,
    pub k_inner: Option<usize>,
    pub out: PathBuf,
}

pub const KEYS: [&str; 19] = [
    "preset", "name", "problem", "matrix", "n", "matrix_seed", "geometry", "oracle", "algos", "seeds", "epochs",
    "eval_every", "target_gap", "p", "alpha", "gamma", "tau", "k_inner", "out",
];

impl Default for RunSpec {
    fn default() -> Self {
        RunSpec {
            name: "run".into(),
            source: ProblemSource::Generator(GameKind::Policeman),
            n: 200,
            matrix_seed: 1,
            entropic: false,
            oracle: None,
            algos: vec![Algo::DetEg, Algo::VrEg],
            seeds: vec![1],
            epochs: 100.0,
            eval_every: 1.0,
            target_gap: None,
            p: None,
            alpha: None,
            gamma: None,
            tau: None,
            k_inner: None,
            out: PathBuf::from("vrvi-out"),
        }
    }
}

/// Parses `key = value` lines; `#` starts a comment. Duplicate and unknown
/// keys are errors.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, SpecError> {
    let mut seen = BTreeMap::new();
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("line {}: expected `key = value`, got {line:?}", i + 1)))?;
        let (k, v) = (k.trim().to_string(), v.trim().to_string());
        if !KEYS.contains(&k.as_str()) {
            return Err(bad(format!("line {}: unknown key {k:?}", i + 1)));
        }
        if seen.insert(k.clone(), i + 1).is_some() {
            return Err(bad(format!("line {}: duplicate key {k:?}", i + 1)));
        }
        pairs.push((k, v));
    }
    Ok(pairs)
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, SpecError> {
    v.parse().map_err(|_| bad(format!("{key}: cannot parse {v:?}")))
}

fn parse_seeds(v: &str) -> Result<Vec<u64>, SpecError> {
    if let Some((a, b)) = v.split_once("..") {
        let (a, b): (u64, u64) = (num("seeds", a.trim())?, num("seeds", b.trim())?);
        if a > b {
            return Err(bad(format!("seeds: empty range {v:?}")));
        }
        return Ok((a..=b).collect());
    }
    v.split(',').map(|s| num("seeds", s.trim())).collect()
}

fn parse_algos(v: &str) -> Result<Vec<Algo>, SpecError> {
    v.split(',').map(|s| s.trim().parse::<Algo>().map_err(|e| bad(format!("algos: {e}")))).collect()
}

impl RunSpec {
    pub fn from_preset(name: &str) -> Result<Self, SpecError> {
        let p = find_preset(name).ok_or_else(|| bad(format!("unknown preset {name:?}")))?;
        Ok(RunSpec {
            name: p.name.to_string(),
            source: ProblemSource::Generator(p.game),
            n: p.n,
            matrix_seed: p.matrix_seed,
            entropic: p.entropic,
            oracle: Some(p.scheme),
            algos: p.algos.to_vec(),
            seeds: p.seeds.to_vec(),
            epochs: p.budget_epochs,
            eval_every: p.eval_every,
            ..RunSpec::default()
        })
    }

    /// Reads a spec file; a `preset` key, if present, supplies the defaults
    /// that the remaining keys then override.
    pub fn from_file(path: &Path) -> Result<Self, SpecError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| bad(format!("cannot read spec file {}: {e}", path.display())))?;
        let pairs = parse_pairs(&text).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        let mut spec = match pairs.iter().find(|(k, _)| k == "preset") {
            Some((_, name)) => RunSpec::from_preset(name)?,
            None => RunSpec { name: file_stem(path), ..RunSpec::default() },
        };
        for (k, v) in &pairs {
            if k != "preset" {
                spec.set(k, v).map_err(|e| bad(format!("{}: {e}", path.display())))?;
            }
        }
        Ok(spec)
    }

    /// Either a spec file or, when no such file exists, a preset name.
    pub fn load(arg: &str) -> Result<Self, SpecError> {
        let path = Path::new(arg);
        if path.exists() {
            return RunSpec::from_file(path);
        }
        if find_preset(arg).is_some() {
            return RunSpec::from_preset(arg);
        }
        Err(bad(format!("spec file not found: {arg} (and no preset of that name)")))
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<(), SpecError> {
        match key {
            "name" => self.name = v.to_string(),
            "problem" => {
                self.source = match (v, &self.source) {
                    ("file", ProblemSource::File(_)) => return Ok(()),
                    ("file", _) => ProblemSource::File(PathBuf::new()),
                    _ => ProblemSource::Generator(v.parse().map_err(|e| bad(format!("problem: {e}")))?),
                }
            }
            "matrix" => self.source = ProblemSource::File(PathBuf::from(v)),
            "n" => self.n = num(key, v)?,
            "matrix_seed" => self.matrix_seed = num(key, v)?,
            "geometry" => {
                self.entropic = match v {
                    "euclidean" => false,
                    "entropic" => true,
                    _ => return Err(bad(format!("geometry: expected euclidean or entropic, got {v:?}"))),
                }
            }
            "oracle" => self.oracle = Some(v.parse().map_err(|e| bad(format!("oracle: {e}")))?),
            "algos" => self.algos = parse_algos(v)?,
            "seeds" => self.seeds = parse_seeds(v)?,
            "epochs" => self.epochs = num(key, v)?,
            "eval_every" => self.eval_every = num(key, v)?,
            "target_gap" => self.target_gap = Some(num(key, v)?),
            "p" => self.p = Some(num(key, v)?),
            "alpha" => self.alpha = Some(num(key, v)?),
            "gamma" => self.gamma = Some(num(key, v)?),
            "tau" => self.tau = Some(num(key, v)?),
            "k_inner" => self.k_inner = Some(num(key, v)?),
            "out" => self.out = PathBuf::from(v),
            _ => return Err(bad(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn scheme(&self) -> OracleScheme {
        self.oracle.unwrap_or(if self.entropic {
            OracleScheme::VariableEntropic
        } else {
            OracleScheme::FixedRowColNorms
        })
    }

    /// Checks everything that can be checked without building the problem.
    pub fn validate(&self) -> Result<(), SpecError> {
        if self.algos.is_empty() || self.seeds.is_empty() {
            return Err(bad("at least one algorithm and one seed are required"));
        }
        if !(self.epochs >= 0.0 && self.epochs.is_finite()) {
            return Err(bad(format!("epochs = {} must be finite and nonnegative", self.epochs)));
        }
        if !(self.eval_every > 0.0 && self.eval_every.is_finite()) {
            return Err(bad(format!("eval_every = {} must be positive", self.eval_every)));
        }
        if let ProblemSource::File(p) = &self.source {
            if p.as_os_str().is_empty() {
                return Err(bad("problem = file needs a `matrix` path"));
            }
        }
        Ok(())
    }

    pub fn problem_label(&self) -> String {
        match &self.source {
            ProblemSource::Generator(g) => format!("{g}-n{}", self.n),
            ProblemSource::File(p) => file_stem(p),
        }
    }

    pub fn build_problem(&self) -> Result<VIProblem, SpecError> {
        let a = match &self.source {
            ProblemSource::Generator(g) => g.generate(self.n, self.matrix_seed).map_err(|e| bad(e.to_string()))?,
            ProblemSource::File(path) => {
                let f = File::open(path).map_err(|e| bad(format!("cannot open matrix file {}: {e}", path.display())))?;
                MatrixGame::read_matrix_market(BufReader::new(f))
                    .map_err(|e| bad(format!("matrix file {}: {e}", path.display())))?
            }
        };
        game_problem(Arc::new(a), self.entropic, self.scheme()).map_err(|e| bad(e.to_string()))
    }

    pub fn config(&self, algo: Algo, seed: u64) -> SolverConfig {
        let mut c = SolverConfig::new(algo).budget_epochs(self.epochs).eval_every(self.eval_every).seed(seed);
        c.p = self.p;
        c.alpha = self.alpha;
        c.gamma = self.gamma;
        c.tau = self.tau;
        c.k_inner = self.k_inner;
        c.target_gap = self.target_gap;
        c
    }
}

fn file_stem(p: &Path) -> String {
    p.file_stem().map_or_else(|| "run".into(), |s| s.to_string_lossy().into_owned())
}
