//! Discrete distributions over `0..len`.

use crate::error::{Result, VrviError};
use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;

/// Prefix-sum sampler, cheap to rebuild: `O(len)` build, `O(log len)` draw.
#[derive(Clone, Debug, Default)]
pub struct DiscreteSampler {
    weights: Vec<f64>,
    cumulative: Vec<f64>,
    last_positive: usize,
}

impl DiscreteSampler {
    pub fn new(weights: &[f64]) -> Result<Self> {
        let mut s = Self::default();
        s.rebuild(weights.iter().copied())?;
        Ok(s)
    }

    /// Replaces the distribution with `weights / sum(weights)`, reusing buffers.
    pub fn rebuild<I: IntoIterator<Item = f64>>(&mut self, weights: I) -> Result<()> {
        self.weights.clear();
        self.weights.extend(weights);
        if let Some(w) = self.weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(VrviError::Domain(format!("sampling weight {w} is negative or not finite")));
        }
        let total: f64 = self.weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(VrviError::Domain("sampling weights have no positive mass".into()));
        }
        self.cumulative.clear();
        let mut acc = 0.0;
        for (i, w) in self.weights.iter_mut().enumerate() {
            *w /= total;
            acc += *w;
            self.cumulative.push(acc);
            if *w > 0.0 {
                self.last_positive = i;
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Normalized probabilities.
    pub fn probs(&self) -> &[f64] {
        &self.weights
    }

    pub fn prob(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("sampler not built");
        let u = rng.random::<f64>() * total;
        // First index with cumulative mass above u; zero-weight entries are
        // never selected because they do not raise the prefix sum.
        let i = self.cumulative.partition_point(|&c| c <= u);
        i.min(self.last_positive)
    }
}

/// Walker alias table for distributions that never change during a run.
#[derive(Clone, Debug)]
pub struct FixedSampler {
    probs: Vec<f64>,
    table: WeightedAliasIndex<f64>,
}

impl FixedSampler {
    pub fn new(weights: &[f64]) -> Result<Self> {
        let base = DiscreteSampler::new(weights)?;
        let probs = base.probs().to_vec();
        let table = WeightedAliasIndex::new(probs.clone())
            .map_err(|e| VrviError::Domain(format!("alias table: {e}")))?;
        Ok(FixedSampler { probs, table })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, i: usize) -> f64 {
        self.probs[i]
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.table.sample(rng)
    }
}
