//! Corpus-level BLEU-4.
//!
//! Clipped n-gram matches and n-gram totals are pooled over the whole corpus
//! before the precisions are formed; no smoothing is applied, so any zero
//! precision gives a score of zero.

use std::collections::HashMap;
use std::hash::Hash;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::tokenize;

pub const MAX_ORDER: usize = 4;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("no sentences to score")]
    Empty,
    #[error("{hyp} hypotheses but {refs} references")]
    LengthMismatch { hyp: usize, refs: usize },
    #[error("cannot access {path}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BleuReport {
    /// 0..=100.
    #[serde(rename = "bleu")]
    pub score: f64,
    pub precisions: [f64; MAX_ORDER],
    #[serde(rename = "bp")]
    pub brevity_penalty: f64,
    #[serde(rename = "hyp_len")]
    pub hyp_length: usize,
    #[serde(rename = "ref_len")]
    pub ref_length: usize,
}

impl BleuReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Matched and total n-gram counts per order, plus lengths. Sentence stats
/// add up to corpus stats.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BleuStats {
    pub matches: [u64; MAX_ORDER],
    pub totals: [u64; MAX_ORDER],
    pub hyp_length: usize,
    pub ref_length: usize,
}

impl std::ops::AddAssign for BleuStats {
    fn add_assign(&mut self, rhs: BleuStats) {
        for n in 0..MAX_ORDER {
            self.matches[n] += rhs.matches[n];
            self.totals[n] += rhs.totals[n];
        }
        self.hyp_length += rhs.hyp_length;
        self.ref_length += rhs.ref_length;
    }
}

fn ngram_counts<T: Hash + Eq>(tokens: &[T], n: usize) -> HashMap<&[T], u64> {
    let mut counts = HashMap::new();
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_default() += 1;
    }
    counts
}

pub fn sentence_stats<T: Hash + Eq>(hyp: &[T], reference: &[T]) -> BleuStats {
    let mut stats = BleuStats { hyp_length: hyp.len(), ref_length: reference.len(), ..Default::default() };
    for n in 1..=MAX_ORDER {
        let h = ngram_counts(hyp, n);
        let r = ngram_counts(reference, n);
        stats.matches[n - 1] = h
            .iter()
            .map(|(gram, &c)| c.min(r.get(gram).copied().unwrap_or(0)))
            .sum();
        stats.totals[n - 1] = hyp.len().saturating_sub(n - 1) as u64;
    }
    stats
}

impl BleuStats {
    pub fn report(&self) -> BleuReport {
        let precisions: [f64; MAX_ORDER] = std::array::from_fn(|n| match self.totals[n] {
            0 => 0.0,
            total => self.matches[n] as f64 / total as f64,
        });
        let brevity_penalty = if self.hyp_length == 0 {
            0.0
        } else {
            (1.0 - self.ref_length as f64 / self.hyp_length as f64).exp().min(1.0)
        };
        let score = if precisions.iter().all(|&p| p > 0.0) {
            let log_mean = precisions.iter().map(|p| p.ln()).sum::<f64>() / MAX_ORDER as f64;
            100.0 * brevity_penalty * log_mean.exp()
        } else {
            0.0
        };
        BleuReport {
            score,
            precisions,
            brevity_penalty,
            hyp_length: self.hyp_length,
            ref_length: self.ref_length,
        }
    }
}

/// Unsmoothed corpus BLEU-4 with a single reference per hypothesis.
pub fn corpus_bleu<S: AsRef<[T]>, T: Hash + Eq>(
    hypotheses: &[S],
    references: &[S],
) -> Result<BleuReport, EvalError> {
    if hypotheses.len() != references.len() {
        return Err(EvalError::LengthMismatch { hyp: hypotheses.len(), refs: references.len() });
    }
    if hypotheses.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut total = BleuStats::default();
    for (h, r) in hypotheses.iter().zip(references) {
        total += sentence_stats(h.as_ref(), r.as_ref());
    }
    Ok(total.report())
}

/// Tokenizes each line with the corpus tokenizer.
pub fn tokenize_lines(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| tokenize(l).into_iter().map(|t| t.surface().to_string()).collect())
        .collect()
}

/// Scores two line-aligned plain-text files.
pub fn evaluate_files(hyp_path: &Path, ref_path: &Path) -> Result<BleuReport, EvalError> {
    let read = |p: &Path| {
        std::fs::read_to_string(p).map_err(|source| EvalError::Io { path: p.to_path_buf(), source })
    };
    evaluate_texts(&read(hyp_path)?, &read(ref_path)?)
}

pub fn evaluate_texts(hyp: &str, reference: &str) -> Result<BleuReport, EvalError> {
    corpus_bleu(&tokenize_lines(hyp), &tokenize_lines(reference))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> Vec<String> {
        text.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn identical_corpus_scores_100() {
        let c = vec![s("a b c d"), s("e f g h i")];
        let r = corpus_bleu(&c, &c).unwrap();
        assert!((r.score - 100.0).abs() < 1e-12);
        assert_eq!(r.brevity_penalty, 1.0);
    }

    #[test]
    fn one_substitution_at_the_end() {
        let r = corpus_bleu(&[s("a b c d e")], &[s("a b c d f")]).unwrap();
        assert_eq!(r.precisions, [4.0 / 5.0, 3.0 / 4.0, 2.0 / 3.0, 1.0 / 2.0]);
        assert_eq!(r.brevity_penalty, 1.0);
        // (4/5 · 3/4 · 2/3 · 1/2)^(1/4) = 0.2^(1/4)
        assert!((r.score - 100.0 * 0.2f64.powf(0.25)).abs() < 1e-9);
        assert!((r.score - 66.87).abs() < 0.01);
    }

    #[test]
    fn no_shared_four_gram_scores_zero() {
        let r = corpus_bleu(&[s("a b c x d")], &[s("a b c y d")]).unwrap();
        assert_eq!(r.precisions[3], 0.0);
        assert_eq!(r.score, 0.0);
    }

    #[test]
    fn clipping_caps_repeated_unigrams() {
        let r = corpus_bleu(&[s("the the the the")], &[s("the cat")]).unwrap();
        assert_eq!(r.precisions[0], 1.0 / 4.0);
    }

    #[test]
    fn brevity_penalty_for_short_hypothesis() {
        let r = corpus_bleu(&[s("a b c d")], &[s("a b c d e f g h")]).unwrap();
        assert!((r.brevity_penalty - (1.0f64 - 2.0).exp()).abs() < 1e-12);
        assert!((r.score - 100.0 * (-1.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn errors() {
        let empty: Vec<Vec<String>> = vec![];
        assert!(matches!(corpus_bleu(&empty, &empty), Err(EvalError::Empty)));
        assert!(matches!(
            corpus_bleu(&[s("a")], &[s("a"), s("b")]),
            Err(EvalError::LengthMismatch { hyp: 1, refs: 2 })
        ));
        assert!(matches!(evaluate_texts("", ""), Err(EvalError::Empty)));
    }

    #[test]
    fn pooled_differs_from_sentence_average() {
        // Line 1 is perfect (4 tokens), line 2 shares nothing (6 tokens).
        let hyp = "a b c d\nu v w x y z\n";
        let reference = "a b c d\nf g h i j k\n";
        let pooled = evaluate_texts(hyp, reference).unwrap();
        // Pooled: matches (4,3,2,1) over totals (10,8,6,4).
        assert_eq!(pooled.precisions, [0.4, 0.375, 2.0 / 6.0, 0.25]);
        let expected = 100.0 * 0.0125f64.powf(0.25);
        assert!((pooled.score - expected).abs() < 1e-9);
        let mean = (evaluate_texts("a b c d", "a b c d").unwrap().score
            + evaluate_texts("u v w x y z", "f g h i j k").unwrap().score)
            / 2.0;
        assert!((mean - 50.0).abs() < 1e-9);
        assert!((pooled.score - mean).abs() > 1.0);
    }

    #[test]
    fn json_field_names() {
        let r = corpus_bleu(&[s("a b c d")], &[s("a b c d")]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for key in ["bleu", "precisions", "bp", "hyp_len", "ref_len"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }
}
