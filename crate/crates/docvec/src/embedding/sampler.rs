//! Noise distribution for negative sampling: unigram frequencies raised to a
//! power.

use rand::Rng as _;
use rand_chacha::ChaCha8Rng;

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};

/// Draws word ids with probability `freq^power / sum(freq^power)`.
#[derive(Debug, Clone)]
pub struct NegativeSampler {
    cumulative: Vec<f64>,
}

/// Build the noise distribution over the whole vocabulary.
pub fn build_negative_table(vocab: &Vocabulary, power: f64) -> Result<NegativeSampler> {
    if power < 0.0 {
        return Err(Error::Param("unigram power must be >= 0".into()));
    }
    let mut cumulative = Vec::with_capacity(vocab.len());
    let mut acc = 0.0;
    for &freq in vocab.freqs() {
        acc += (freq as f64).powf(power);
        cumulative.push(acc);
    }
    if acc.is_nan() || acc <= 0.0 {
        return Err(Error::Param("degenerate noise distribution".into()));
    }
    Ok(NegativeSampler { cumulative })
}

impl NegativeSampler {
    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    /// One draw from the powered unigram distribution.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> u32 {
        let total = *self.cumulative.last().unwrap();
        let x = rng.random::<f64>() * total;
        // partition_point: first index whose cumulative weight exceeds x.
        self.cumulative
            .partition_point(|&c| c <= x)
            .min(self.len() - 1) as u32
    }

    /// Draw until the result differs from `exclude`. Fails when the
    /// vocabulary has no other word to offer.
    pub fn sample_excluding(&self, rng: &mut ChaCha8Rng, exclude: u32) -> Result<u32> {
        if self.len() < 2 {
            return Err(Error::Param(
                "cannot draw a negative sample: vocabulary has fewer than two words".into(),
            ));
        }
        // Rejection terminates almost surely; the cap guards pathological
        // distributions where the excluded word holds nearly all the mass.
        for _ in 0..1_000_000 {
            let pick = self.sample(rng);
            if pick != exclude {
                return Ok(pick);
            }
        }
        Err(Error::Param(
            "negative sampling stalled: excluded word dominates the distribution".into(),
        ))
    }
}
