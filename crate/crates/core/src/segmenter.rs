//! Multiword segmentation and anchor/chunk/literal classification.
//!
//! Bahnaric words are frequently written as two or more space-separated
//! syllables. A [`FrequencyLexicon`] of adjacent word groups harvested from
//! the corpus decides which runs are merged back into one unit; the merged
//! units are then classified against the bilingual dictionary.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{join_tokens, tokenize, BilingualDictionary, Gloss, Token};

pub const DEFAULT_MAX_NGRAM: usize = 3;
pub const DEFAULT_MIN_COUNT: u64 = 2;

/// Scores closer than this are treated as equal, so `ln 2 + ln 3` ties `ln 6`.
const SCORE_EPSILON: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum SegmenterError {
    #[error("max_ngram must be at least 2, got {0}")]
    MaxNgram(usize),
    #[error("min_count must be at least 1, got {0}")]
    MinCount(u64),
    #[error("lexicon key {key:?}: {reason}")]
    InvalidKey { key: String, reason: String },
    #[error("cannot access {path}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid lexicon JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Counts of frequent adjacent word groups, keyed by the lowercased words
/// joined with single spaces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyLexicon {
    pub max_ngram: usize,
    pub min_count: u64,
    pub entries: BTreeMap<String, u64>,
}

impl Default for FrequencyLexicon {
    fn default() -> Self {
        FrequencyLexicon {
            max_ngram: DEFAULT_MAX_NGRAM,
            min_count: DEFAULT_MIN_COUNT,
            entries: BTreeMap::new(),
        }
    }
}

impl FrequencyLexicon {
    pub fn empty(max_ngram: usize, min_count: u64) -> Result<Self, SegmenterError> {
        check_params(max_ngram, min_count)?;
        Ok(FrequencyLexicon { max_ngram, min_count, entries: BTreeMap::new() })
    }

    pub fn get(&self, key: &str) -> Option<u64> {
        self.entries.get(key).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Checks parameters and that every key is 2..=max_ngram word tokens
    /// with a count of at least `min_count`.
    pub fn validate(&self) -> Result<(), SegmenterError> {
        check_params(self.max_ngram, self.min_count)?;
        for (key, &count) in &self.entries {
            let bad = |reason: String| SegmenterError::InvalidKey { key: key.clone(), reason };
            let tokens = tokenize(key);
            if !(2..=self.max_ngram).contains(&tokens.len()) {
                return Err(bad(format!("has {} tokens, expected 2..={}", tokens.len(), self.max_ngram)));
            }
            if tokens.iter().any(|t| !t.is_word()) {
                return Err(bad("contains punctuation or numbers".into()));
            }
            if join_tokens(&tokens) != *key || key.to_lowercase() != *key {
                return Err(bad("is not a normalized lowercase key".into()));
            }
            if count < self.min_count {
                return Err(bad(format!("count {count} below min_count {}", self.min_count)));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, SegmenterError> {
        let lex: FrequencyLexicon = serde_json::from_str(text)?;
        lex.validate()?;
        Ok(lex)
    }

    pub fn load(path: &Path) -> Result<Self, SegmenterError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| SegmenterError::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("lexicon serializes")
    }
}

fn check_params(max_ngram: usize, min_count: u64) -> Result<(), SegmenterError> {
    if max_ngram < 2 {
        return Err(SegmenterError::MaxNgram(max_ngram));
    }
    if min_count < 1 {
        return Err(SegmenterError::MinCount(min_count));
    }
    Ok(())
}

fn count_sentence(tokens: &[Token], max_ngram: usize, counts: &mut HashMap<String, u64>) {
    for run in tokens.split(|t| !t.is_word()) {
        let keys: Vec<String> = run.iter().map(Token::key).collect();
        for start in 0..keys.len() {
            for len in 2..=max_ngram.min(keys.len() - start) {
                *counts.entry(keys[start..start + len].join(" ")).or_default() += 1;
            }
        }
    }
}

/// Counts every contiguous run of 2..=max_ngram word tokens. Runs never
/// cross punctuation or numbers. Groups seen fewer than `min_count` times
/// are dropped.
pub fn build_frequency_lexicon(
    sentences: &[Vec<Token>],
    max_ngram: usize,
    min_count: u64,
) -> Result<FrequencyLexicon, SegmenterError> {
    check_params(max_ngram, min_count)?;
    let counts = sentences
        .par_iter()
        .fold(HashMap::new, |mut acc, s| {
            count_sentence(s, max_ngram, &mut acc);
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });
    let entries = counts.into_iter().filter(|&(_, c)| c >= min_count).collect();
    Ok(FrequencyLexicon { max_ngram, min_count, entries })
}

/// A segmentation unit: one token, or several merged into one word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordUnit {
    pub tokens: Vec<Token>,
    pub merged: bool,
}

impl WordUnit {
    pub fn single(token: Token) -> Self {
        WordUnit { tokens: vec![token], merged: false }
    }

    pub fn merged(tokens: Vec<Token>) -> Self {
        debug_assert!(tokens.len() >= 2);
        WordUnit { tokens, merged: true }
    }

    /// Lowercased lookup key.
    pub fn key(&self) -> String {
        self.tokens.iter().map(Token::key).collect::<Vec<_>>().join(" ")
    }

    /// Surface text, original casing.
    pub fn text(&self) -> String {
        join_tokens(&self.tokens)
    }

    /// The token, when this unit is a lone punctuation mark or number.
    pub fn as_literal(&self) -> Option<&Token> {
        match self.tokens.as_slice() {
            [t] if t.is_literal() => Some(t),
            _ => None,
        }
    }
}

/// A segmentation together with the objective value it achieved.
#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    pub units: Vec<WordUnit>,
    /// Sum of `ln(count)` over merged units.
    pub score: f64,
}

/// Score of merging `tokens` into one unit, if that merge is allowed.
/// Lexicon keys score `ln(count)`; multiword dictionary headwords that the
/// lexicon lacks score `ln(min_count)`.
pub fn merge_score(
    tokens: &[Token],
    lexicon: &FrequencyLexicon,
    dictionary: &BilingualDictionary,
) -> Option<f64> {
    if tokens.len() < 2 {
        return None;
    }
    let key = tokens.iter().map(Token::key).collect::<Vec<_>>().join(" ");
    if tokens.len() <= lexicon.max_ngram && tokens.iter().all(Token::is_word) {
        if let Some(count) = lexicon.get(&key) {
            return Some((count as f64).ln());
        }
    }
    if tokens.len() <= dictionary.max_headword_tokens() && dictionary.contains_key(&key) {
        return Some((lexicon.min_count as f64).ln());
    }
    None
}

#[derive(Clone, Copy)]
struct Best {
    score: f64,
    units: usize,
    first_len: usize,
}

impl Best {
    /// Higher score, then fewer units, then a longer leftmost unit.
    fn beats(&self, other: &Best) -> bool {
        if self.score > other.score + SCORE_EPSILON {
            return true;
        }
        if other.score > self.score + SCORE_EPSILON {
            return false;
        }
        if self.units != other.units {
            return self.units < other.units;
        }
        self.first_len > other.first_len
    }
}

/// Splits a token sequence into word units, maximizing the total
/// `ln(count)` of merged units. Ties go to fewer units, then to the
/// segmentation whose leftmost differing unit is longer.
pub fn segment_sentence(
    tokens: &[Token],
    lexicon: &FrequencyLexicon,
    dictionary: &BilingualDictionary,
) -> Vec<WordUnit> {
    segment_scored(tokens, lexicon, dictionary).units
}

pub fn segment_scored(
    tokens: &[Token],
    lexicon: &FrequencyLexicon,
    dictionary: &BilingualDictionary,
) -> Segmentation {
    let n = tokens.len();
    let max_span = lexicon.max_ngram.max(dictionary.max_headword_tokens()).max(1);
    // best[i] describes the optimal segmentation of tokens[i..].
    let mut best = vec![Best { score: 0.0, units: 0, first_len: 0 }; n + 1];
    for i in (0..n).rev() {
        let rest = best[i + 1];
        let mut choice = Best { score: rest.score, units: rest.units + 1, first_len: 1 };
        for len in 2..=max_span.min(n - i) {
            if let Some(s) = merge_score(&tokens[i..i + len], lexicon, dictionary) {
                let rest = best[i + len];
                let cand = Best { score: s + rest.score, units: rest.units + 1, first_len: len };
                if cand.beats(&choice) {
                    choice = cand;
                }
            }
        }
        best[i] = choice;
    }

    let mut units = Vec::with_capacity(best[0].units);
    let mut i = 0;
    while i < n {
        let len = best[i].first_len;
        let slice = tokens[i..i + len].to_vec();
        units.push(if len == 1 {
            WordUnit::single(slice.into_iter().next().expect("one token"))
        } else {
            WordUnit::merged(slice)
        });
        i += len;
    }
    Segmentation { units, score: best[0].score }
}

/// Output of the segmentation phase.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Segment {
    /// A unit found in the dictionary, with its glosses in dictionary order.
    Anchor { unit: WordUnit, candidates: Vec<Gloss> },
    /// A maximal run of units the dictionary does not cover.
    Chunk { units: Vec<WordUnit> },
    /// A punctuation mark or number, copied unchanged.
    Literal { token: Token },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentKind {
    Anchor,
    Chunk,
    Literal,
}

impl Segment {
    pub fn kind(&self) -> SegmentKind {
        match self {
            Segment::Anchor { .. } => SegmentKind::Anchor,
            Segment::Chunk { .. } => SegmentKind::Chunk,
            Segment::Literal { .. } => SegmentKind::Literal,
        }
    }

    pub fn tokens(&self) -> Vec<Token> {
        match self {
            Segment::Anchor { unit, .. } => unit.tokens.clone(),
            Segment::Chunk { units } => units.iter().flat_map(|u| u.tokens.iter().cloned()).collect(),
            Segment::Literal { token } => vec![token.clone()],
        }
    }

    pub fn text(&self) -> String {
        join_tokens(&self.tokens())
    }

    /// Number of word units the segment spans.
    pub fn unit_count(&self) -> usize {
        match self {
            Segment::Chunk { units } => units.len(),
            _ => 1,
        }
    }
}

/// Classifies units: a lone punctuation mark or number is a literal, a unit
/// whose key is a dictionary headword is an anchor, and everything else is
/// grouped into maximal chunks.
pub fn classify_segments(units: &[WordUnit], dictionary: &BilingualDictionary) -> Vec<Segment> {
    let mut out = Vec::new();
    let mut chunk: Vec<WordUnit> = Vec::new();
    let flush = |out: &mut Vec<Segment>, chunk: &mut Vec<WordUnit>| {
        if !chunk.is_empty() {
            out.push(Segment::Chunk { units: std::mem::take(chunk) });
        }
    };
    for unit in units {
        if let Some(token) = unit.as_literal() {
            flush(&mut out, &mut chunk);
            out.push(Segment::Literal { token: token.clone() });
        } else if let Some(glosses) = dictionary.get_key(&unit.key()) {
            flush(&mut out, &mut chunk);
            out.push(Segment::Anchor { unit: unit.clone(), candidates: glosses.to_vec() });
        } else {
            chunk.push(unit.clone());
        }
    }
    flush(&mut out, &mut chunk);
    out
}

/// Tokenize, segment and classify in one step.
pub fn segment_text(
    text: &str,
    lexicon: &FrequencyLexicon,
    dictionary: &BilingualDictionary,
) -> (Segmentation, Vec<Segment>) {
    let tokens = tokenize(text);
    let seg = segment_scored(&tokens, lexicon, dictionary);
    let segments = classify_segments(&seg.units, dictionary);
    (seg, segments)
}
