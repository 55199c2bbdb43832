//! Gloss selection for anchors with several dictionary senses.
//!
//! A [`CooccurrenceIndex`] records which target-language words appear near
//! each other in the target side of the corpus. A candidate gloss earns
//! `1/d` for every already-translated context word at distance `d` that is
//! one of its corpus neighbours; the highest total wins.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Gloss, Token};

pub const DEFAULT_WINDOW: usize = 5;

/// Largest disambiguation window. Scores are exact fractions with
/// denominators dividing lcm(1..=window), which must fit in a `u128`.
pub const MAX_WINDOW: usize = 64;

/// Exact candidate score. Sums of reciprocals are compared without rounding
/// so ties are detected exactly.
pub type Score = Ratio<u128>;

#[derive(Debug, thiserror::Error)]
pub enum DisambiguationError {
    #[error("window must be at least 1")]
    ZeroWindow,
    #[error("disambiguation window {0} exceeds the maximum of {MAX_WINDOW}")]
    WindowTooLarge(usize),
    #[error("cannot access {path}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid index JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("index line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("index is not symmetric: {a:?}/{b:?}")]
    Asymmetric { a: String, b: String },
}

/// Target word to neighbour counts within a fixed window.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CooccurrenceIndex {
    pub window: usize,
    pub neighbors: BTreeMap<String, BTreeMap<String, u64>>,
}

impl CooccurrenceIndex {
    pub fn empty(window: usize) -> Self {
        CooccurrenceIndex { window, neighbors: BTreeMap::new() }
    }

    /// Whether `other` co-occurred with `word` at least once.
    pub fn is_neighbor(&self, word: &str, other: &str) -> bool {
        self.neighbors
            .get(word)
            .and_then(|n| n.get(other))
            .is_some_and(|&c| c > 0)
    }

    pub fn count(&self, word: &str, other: &str) -> u64 {
        self.neighbors.get(word).and_then(|n| n.get(other)).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    /// Full scan for the structural invariants: symmetric counts, no self
    /// pairs, no zero counts.
    pub fn check(&self) -> Result<(), DisambiguationError> {
        if self.window == 0 {
            return Err(DisambiguationError::ZeroWindow);
        }
        for (a, ns) in &self.neighbors {
            for (b, &c) in ns {
                if a == b || c == 0 || self.count(b, a) != c {
                    return Err(DisambiguationError::Asymmetric { a: a.clone(), b: b.clone() });
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("index serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, DisambiguationError> {
        let idx: CooccurrenceIndex = serde_json::from_str(text)?;
        idx.check()?;
        Ok(idx)
    }

    /// Sorted `word<TAB>neighbor<TAB>count` lines, preceded by a
    /// `#window<TAB>W` header.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "#window\t{}", self.window)?;
        for (a, ns) in &self.neighbors {
            for (b, c) in ns {
                writeln!(out, "{a}\t{b}\t{c}")?;
            }
        }
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(input: R) -> Result<Self, DisambiguationError> {
        let mut idx = CooccurrenceIndex::empty(DEFAULT_WINDOW);
        for (i, line) in input.lines().enumerate() {
            let line = line.map_err(|source| DisambiguationError::Io { path: "<tsv>".into(), source })?;
            let bad = |reason: &str| DisambiguationError::MalformedLine { line: i + 1, reason: reason.into() };
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            match cols.as_slice() {
                ["#window", w] => idx.window = w.parse().map_err(|_| bad("bad window"))?,
                [a, b, c] => {
                    let c: u64 = c.parse().map_err(|_| bad("bad count"))?;
                    idx.neighbors.entry(a.to_string()).or_default().insert(b.to_string(), c);
                }
                _ => return Err(bad("expected word<TAB>neighbor<TAB>count")),
            }
        }
        idx.check()?;
        Ok(idx)
    }

    /// Loads JSON, or TSV when the file name ends in `.tsv`.
    pub fn load(path: &Path) -> Result<Self, DisambiguationError> {
        let io = |source| DisambiguationError::Io { path: path.to_path_buf(), source };
        if path.extension().is_some_and(|e| e == "tsv") {
            let file = std::fs::File::open(path).map_err(io)?;
            Self::read_tsv(std::io::BufReader::new(file))
        } else {
            Self::from_json(&std::fs::read_to_string(path).map_err(io)?)
        }
    }

    /// Multiplies every count by `factor`. Scores only look at membership,
    /// so this never changes a disambiguation result.
    pub fn scaled(&self, factor: u64) -> Self {
        let mut out = self.clone();
        for ns in out.neighbors.values_mut() {
            for c in ns.values_mut() {
                *c *= factor;
            }
        }
        out
    }
}

fn count_sentence(tokens: &[Token], window: usize, acc: &mut HashMap<String, HashMap<String, u64>>) {
    let keys: Vec<Option<String>> = tokens
        .iter()
        .map(|t| t.is_word().then(|| t.key()))
        .collect();
    for (i, a) in keys.iter().enumerate() {
        let Some(a) = a else { continue };
        let lo = i.saturating_sub(window);
        let hi = (i + window).min(keys.len() - 1);
        for (j, b) in keys.iter().enumerate().take(hi + 1).skip(lo) {
            match b {
                Some(b) if j != i && a != b => {
                    *acc.entry(a.clone()).or_default().entry(b.clone()).or_default() += 1;
                }
                _ => {}
            }
        }
    }
}

/// Counts ordered position pairs `(i, j)` with `1 <= |i-j| <= window`.
/// Punctuation and numbers keep their positions but contribute nothing.
pub fn build_cooccurrence_index(
    sentences: &[Vec<Token>],
    window: usize,
) -> Result<CooccurrenceIndex, DisambiguationError> {
    if window == 0 {
        return Err(DisambiguationError::ZeroWindow);
    }
    let counts = sentences
        .par_iter()
        .fold(HashMap::new, |mut acc, s| {
            count_sentence(s, window, &mut acc);
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (w, ns) in b {
                let slot = a.entry(w).or_default();
                for (n, c) in ns {
                    *slot.entry(n).or_default() += c;
                }
            }
            a
        });
    let neighbors = counts
        .into_iter()
        .map(|(w, ns)| (w, ns.into_iter().collect()))
        .collect();
    Ok(CooccurrenceIndex { window, neighbors })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    /// Highest dictionary frequency, then dictionary order.
    #[default]
    GlossFrequency,
    /// Earliest gloss in the dictionary.
    DictionaryOrder,
}

impl FromStr for TieBreak {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gloss-frequency" | "frequency" => Ok(TieBreak::GlossFrequency),
            "dictionary-order" | "order" => Ok(TieBreak::DictionaryOrder),
            other => Err(format!("unknown tie-break {other:?} (expected gloss-frequency or dictionary-order)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisambiguationConfig {
    pub window: usize,
    pub tie_break: TieBreak,
}

impl Default for DisambiguationConfig {
    fn default() -> Self {
        DisambiguationConfig { window: DEFAULT_WINDOW, tie_break: TieBreak::GlossFrequency }
    }
}

impl DisambiguationConfig {
    pub fn new(window: usize, tie_break: TieBreak) -> Result<Self, DisambiguationError> {
        let config = DisambiguationConfig { window, tie_break };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), DisambiguationError> {
        match self.window {
            0 => Err(DisambiguationError::ZeroWindow),
            w if w > MAX_WINDOW => Err(DisambiguationError::WindowTooLarge(w)),
            _ => Ok(()),
        }
    }
}

/// A translated word near the anchor, `distance >= 1` units away.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextWord {
    pub word: String,
    pub distance: usize,
}

impl ContextWord {
    pub fn new(word: impl Into<String>, distance: usize) -> Self {
        ContextWord { word: word.into(), distance }
    }
}

/// `Σ 1/d` over context words that neighbour the gloss head word.
pub fn score_candidate(candidate: &Gloss, context: &[ContextWord], index: &CooccurrenceIndex) -> Score {
    let Some(head) = candidate.head() else {
        return Score::from_integer(0);
    };
    context
        .iter()
        .filter(|c| c.distance >= 1 && index.is_neighbor(&head, &c.word.to_lowercase()))
        .fold(Score::from_integer(0), |acc, c| acc + Score::new(1, c.distance as u128))
}

/// Which gloss was chosen and why.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub chosen: usize,
    /// One score per candidate; empty when there was a single candidate.
    pub scores: Vec<Score>,
}

/// Picks the best gloss. Context words farther than `config.window` are
/// ignored. Returns `None` only for an empty candidate list.
pub fn disambiguate(
    candidates: &[Gloss],
    context: &[ContextWord],
    index: &CooccurrenceIndex,
    config: &DisambiguationConfig,
) -> Option<Decision> {
    match candidates.len() {
        0 => return None,
        1 => return Some(Decision { chosen: 0, scores: Vec::new() }),
        _ => {}
    }
    let in_window: Vec<ContextWord> = context
        .iter()
        .filter(|c| (1..=config.window).contains(&c.distance))
        .cloned()
        .collect();
    let scores: Vec<Score> = candidates
        .iter()
        .map(|g| score_candidate(g, &in_window, index))
        .collect();
    let mut chosen = 0;
    for i in 1..candidates.len() {
        let better = match scores[i].cmp(&scores[chosen]) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => match config.tie_break {
                TieBreak::GlossFrequency => {
                    candidates[i].freq.unwrap_or(0) > candidates[chosen].freq.unwrap_or(0)
                }
                TieBreak::DictionaryOrder => false,
            },
        };
        if better {
            chosen = i;
        }
    }
    Some(Decision { chosen, scores })
}

pub fn score_to_f64(score: &Score) -> f64 {
    *score.numer() as f64 / *score.denom() as f64
}
