use crate::error::{Result, VrviError};
use crate::problems::VIProblem;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algo {
    /// Loopless extragradient with variance reduction.
    VrEg,
    /// Double-loop mirror-prox with variance reduction (Euclidean or entropic).
    VrMp,
    /// Forward-backward-forward with variance reduction.
    VrFbf,
    /// Forward-reflected-backward with variance reduction.
    VrForb,
    /// Deterministic extragradient / mirror-prox with full operator calls.
    DetEg,
}

impl Algo {
    pub const ALL: [Algo; 5] = [Algo::VrEg, Algo::VrMp, Algo::VrFbf, Algo::VrForb, Algo::DetEg];

    pub fn name(&self) -> &'static str {
        match self {
            Algo::VrEg => "vr-eg",
            Algo::VrMp => "vr-mp",
            Algo::VrFbf => "vr-fbf",
            Algo::VrForb => "vr-forb",
            Algo::DetEg => "det-eg",
        }
    }

    fn euclidean_only(&self) -> bool {
        matches!(self, Algo::VrEg | Algo::VrFbf | Algo::VrForb)
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Algo {
    type Err = VrviError;

    fn from_str(s: &str) -> Result<Self> {
        Algo::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| VrviError::Config(format!("unknown algorithm {s:?}")))
    }
}

/// User-facing parameters; `None` fields are derived from the problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub algo: Algo,
    /// Snapshot refresh probability.
    pub p: Option<f64>,
    /// Weight of the current iterate in the anchor `alpha z + (1 - alpha) w`.
    pub alpha: Option<f64>,
    /// Fraction of the largest admissible step used for the default `tau`.
    pub gamma: Option<f64>,
    pub tau: Option<f64>,
    /// Inner loop length of the double-loop method.
    pub k_inner: Option<usize>,
    pub budget_epochs: f64,
    pub seed: u64,
    /// Evaluation interval in epochs.
    pub eval_every: Option<f64>,
    /// Stop once the reported gap drops to this value.
    pub target_gap: Option<f64>,
}

pub const DEFAULT_GAMMA: f64 = 0.99;
pub const DEFAULT_EVAL_EVERY: f64 = 0.5;

impl SolverConfig {
    pub fn new(algo: Algo) -> Self {
        SolverConfig {
            algo,
            p: None,
            alpha: None,
            gamma: None,
            tau: None,
            k_inner: None,
            budget_epochs: 10.0,
            seed: 0,
            eval_every: None,
            target_gap: None,
        }
    }

    pub fn p(mut self, p: f64) -> Self {
        self.p = Some(p);
        self
    }

    pub fn alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn tau(mut self, tau: f64) -> Self {
        self.tau = Some(tau);
        self
    }

    pub fn k_inner(mut self, k: usize) -> Self {
        self.k_inner = Some(k);
        self
    }

    pub fn budget_epochs(mut self, epochs: f64) -> Self {
        self.budget_epochs = epochs;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn eval_every(mut self, epochs: f64) -> Self {
        self.eval_every = Some(epochs);
        self
    }

    pub fn target_gap(mut self, gap: f64) -> Self {
        self.target_gap = Some(gap);
        self
    }

    /// Fills in defaults and checks the step-size condition.
    pub fn resolve(&self, problem: &VIProblem) -> Result<Params> {
        let p = self.resolve_unchecked(problem)?;
        p.check()?;
        Ok(p)
    }

    /// Fills in defaults without the step-size check (explicit `tau` is taken
    /// as given).
    pub fn resolve_unchecked(&self, problem: &VIProblem) -> Result<Params> {
        if self.algo.euclidean_only() && problem.geometry.is_entropic() {
            return Err(VrviError::Config(format!(
                "{} is defined for the Euclidean geometry only",
                self.algo
            )));
        }
        let in_unit = |name: &str, v: f64, open_left: bool, open_right: bool| -> Result<f64> {
            let ok = v.is_finite()
                && if open_left { v > 0.0 } else { v >= 0.0 }
                && if open_right { v < 1.0 } else { v <= 1.0 };
            if ok {
                Ok(v)
            } else {
                Err(VrviError::Config(format!("{name} = {v} is out of range")))
            }
        };
        let gamma = in_unit("gamma", self.gamma.unwrap_or(DEFAULT_GAMMA), true, true)?;
        if let Some(t) = self.tau {
            if !(t > 0.0) || !t.is_finite() {
                return Err(VrviError::Config(format!("tau = {t} must be positive")));
            }
        }
        let oracle_l = problem.oracle.lipschitz();
        let (p, alpha, k_inner, lipschitz, bound) = match self.algo {
            Algo::DetEg => {
                let l = problem.operator_lipschitz();
                (1.0, 0.0, 1, l, 1.0)
            }
            Algo::VrMp => {
                let k = match (self.k_inner, self.p) {
                    (Some(0), _) => return Err(VrviError::Config("k_inner must be positive".into())),
                    (Some(k), _) => k,
                    (None, p) => {
                        let p = in_unit("p", p.unwrap_or_else(|| problem.oracle.default_p()), true, false)?;
                        ((1.0 / p).round() as usize).max(1)
                    }
                };
                let alpha = match self.alpha {
                    Some(a) => in_unit("alpha", a, false, true)?,
                    None => 1.0 - 1.0 / k as f64,
                };
                (1.0 / k as f64, alpha, k, oracle_l, (1.0 - alpha).sqrt())
            }
            Algo::VrEg | Algo::VrFbf | Algo::VrForb => {
                let p = in_unit("p", self.p.unwrap_or_else(|| problem.oracle.default_p()), true, false)?;
                let alpha = match self.alpha {
                    Some(a) => in_unit("alpha", a, false, true)?,
                    None => 1.0 - p,
                };
                let bound = if self.algo == Algo::VrForb {
                    (alpha * (1.0 - alpha)).sqrt()
                } else {
                    (1.0 - alpha).sqrt()
                };
                (p, alpha, 1, oracle_l, bound)
            }
        };
        if !(lipschitz > 0.0) || !lipschitz.is_finite() {
            return Err(VrviError::Config(format!("Lipschitz constant {lipschitz} is not positive")));
        }
        let tau = match self.tau {
            Some(t) => t,
            None => {
                if bound <= 0.0 {
                    return Err(VrviError::Config(format!(
                        "{} admits no positive step with alpha = {alpha}",
                        self.algo
                    )));
                }
                gamma * bound / lipschitz
            }
        };
        Ok(Params { algo: self.algo, p, alpha, tau, gamma, k_inner, lipschitz, step_bound: bound })
    }
}

/// Fully resolved parameters of one run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub algo: Algo,
    pub p: f64,
    pub alpha: f64,
    pub tau: f64,
    pub gamma: f64,
    pub k_inner: usize,
    /// The constant `L` the step is measured against.
    pub lipschitz: f64,
    /// `tau * L` must stay strictly below this value.
    pub step_bound: f64,
}

impl Params {
    pub fn check(&self) -> Result<()> {
        if !(self.tau * self.lipschitz < self.step_bound) {
            return Err(VrviError::Config(format!(
                "step tau = {} violates tau * L < {} (L = {})",
                self.tau, self.step_bound, self.lipschitz
            )));
        }
        Ok(())
    }
}
