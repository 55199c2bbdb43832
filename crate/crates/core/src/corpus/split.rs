use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{CorpusError, ParallelCorpus, SentencePair};
use crate::rng;

/// Train/validation/test proportions and the shuffle seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train: f64,
    pub valid: f64,
    pub test: f64,
    pub seed: u64,
}

const RATIO_TOLERANCE: f64 = 1e-9;

impl SplitSpec {
    pub fn new(train: f64, valid: f64, test: f64, seed: u64) -> Result<Self, CorpusError> {
        let spec = SplitSpec { train, valid, test, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        for (name, r) in [("train", self.train), ("valid", self.valid), ("test", self.test)] {
            if !(0.0..=1.0).contains(&r) {
                return Err(CorpusError::InvalidSplit(format!("{name} ratio {r} outside [0, 1]")));
            }
        }
        let sum = self.train + self.valid + self.test;
        if (sum - 1.0).abs() > RATIO_TOLERANCE {
            return Err(CorpusError::InvalidSplit(format!("ratios sum to {sum}, expected 1")));
        }
        Ok(())
    }

    /// Cut points `(⌊train·N⌋, ⌊(train+valid)·N⌋)`. A tiny epsilon keeps
    /// products such as `0.29 * 100` from flooring one below the exact value.
    pub fn cut_points(&self, n: usize) -> (usize, usize) {
        let cut = |r: f64| ((r * n as f64 + RATIO_TOLERANCE).floor() as usize).min(n);
        let a = cut(self.train);
        let b = cut(self.train + self.valid).max(a);
        (a, b)
    }
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec { train: 0.8, valid: 0.1, test: 0.1, seed: 0 }
    }
}

fn shuffled(corpus: &ParallelCorpus, seed: u64) -> Vec<SentencePair> {
    let mut pairs = corpus.pairs().to_vec();
    pairs.shuffle(&mut rng::seeded(seed));
    pairs
}

fn sub(name: String, pairs: Vec<SentencePair>) -> ParallelCorpus {
    ParallelCorpus::new(name, pairs).expect("subset of a corpus has distinct ids")
}

/// Seeded shuffle followed by two contiguous cuts.
pub fn split_dataset(
    corpus: &ParallelCorpus,
    spec: &SplitSpec,
) -> Result<(ParallelCorpus, ParallelCorpus, ParallelCorpus), CorpusError> {
    spec.validate()?;
    if corpus.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    let mut pairs = shuffled(corpus, spec.seed);
    let (a, b) = spec.cut_points(pairs.len());
    let test = pairs.split_off(b);
    let valid = pairs.split_off(a);
    Ok((
        sub(format!("{}.train", corpus.name), pairs),
        sub(format!("{}.valid", corpus.name), valid),
        sub(format!("{}.test", corpus.name), test),
    ))
}

/// Seeded two-way partition: the first output holds `⌊fraction·N⌋` pairs.
/// Used to set aside the share of training data that is fed to the backend
/// as chunks rather than whole sentences.
pub fn partition_fraction(
    corpus: &ParallelCorpus,
    fraction: f64,
    seed: u64,
) -> Result<(ParallelCorpus, ParallelCorpus), CorpusError> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(CorpusError::InvalidSplit(format!("fraction {fraction} outside [0, 1]")));
    }
    let mut pairs = shuffled(corpus, seed);
    let cut = ((fraction * pairs.len() as f64 + RATIO_TOLERANCE).floor() as usize).min(pairs.len());
    let rest = pairs.split_off(cut);
    Ok((sub(format!("{}.chunked", corpus.name), pairs), sub(format!("{}.full", corpus.name), rest)))
}
