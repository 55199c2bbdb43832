//! Synthetic training pairs for low-resource corpora.
//!
//! Five auxiliary transforms perturb the target side of a pair (swap, mask,
//! copy source, reverse, dictionary replace) and sentence boundary
//! augmentation recombines halves of two adjacent pairs.
//! [`augment_dataset`] doubles a corpus with one synthetic pair per original.
//!
//! Randomness is keyed by `(seed, pair id, task)`, so output does not depend
//! on evaluation order or thread count.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{BilingualDictionary, ParallelCorpus, SentencePair, Token};
use crate::rng::{self, StreamRng};

pub const DEFAULT_ALPHA: f64 = 0.5;
pub const DEFAULT_UNK: &str = "<unk>";

#[derive(Debug, thiserror::Error)]
pub enum AugmentError {
    #[error("task list is empty")]
    NoTasks,
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("alpha must be within [0, 1], got {0}")]
    Alpha(f64),
    #[error("unknown augmentation task {0:?}")]
    UnknownTask(String),
    #[error("invalid unk symbol {0:?}")]
    UnkSymbol(String),
    #[error("synthetic id {0:?} collides with an existing pair id")]
    IdCollision(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AugmentationTask {
    Swap,
    Token,
    Source,
    Reverse,
    Replace,
    SentenceBoundary,
}

impl AugmentationTask {
    pub const ALL: [AugmentationTask; 6] = [
        AugmentationTask::Swap,
        AugmentationTask::Token,
        AugmentationTask::Source,
        AugmentationTask::Reverse,
        AugmentationTask::Replace,
        AugmentationTask::SentenceBoundary,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AugmentationTask::Swap => "swap",
            AugmentationTask::Token => "token",
            AugmentationTask::Source => "source",
            AugmentationTask::Reverse => "reverse",
            AugmentationTask::Replace => "replace",
            AugmentationTask::SentenceBoundary => "sentence-boundary",
        }
    }

    /// Source-side marker token for synthetic pairs, e.g. `<task:swap>`.
    pub fn marker(self) -> Token {
        Token::new(format!("<task:{}>", self.name())).expect("marker has no whitespace")
    }
}

impl fmt::Display for AugmentationTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AugmentationTask {
    type Err = AugmentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        match norm.as_str() {
            "swap" => Ok(AugmentationTask::Swap),
            "token" | "mask" => Ok(AugmentationTask::Token),
            "source" | "copy" => Ok(AugmentationTask::Source),
            "reverse" => Ok(AugmentationTask::Reverse),
            "replace" => Ok(AugmentationTask::Replace),
            "sentence-boundary" | "boundary" | "sb" => Ok(AugmentationTask::SentenceBoundary),
            _ => Err(AugmentError::UnknownTask(s.to_string())),
        }
    }
}

/// Parses a comma-separated task list such as `swap,token`.
pub fn parse_tasks(list: &str) -> Result<Vec<AugmentationTask>, AugmentError> {
    let tasks = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<_>, _>>()?;
    if tasks.is_empty() {
        return Err(AugmentError::NoTasks);
    }
    Ok(tasks)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AugmentConfig {
    pub alpha: f64,
    pub tasks: Vec<AugmentationTask>,
    pub seed: u64,
    pub unk_symbol: String,
    pub tag_synthetic: bool,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig {
            alpha: DEFAULT_ALPHA,
            tasks: vec![AugmentationTask::Swap],
            seed: 0,
            unk_symbol: DEFAULT_UNK.to_string(),
            tag_synthetic: true,
        }
    }
}

impl AugmentConfig {
    pub fn validate(&self) -> Result<(), AugmentError> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(AugmentError::Alpha(self.alpha));
        }
        if self.tasks.is_empty() {
            return Err(AugmentError::NoTasks);
        }
        if Token::new(self.unk_symbol.clone()).is_none() {
            return Err(AugmentError::UnkSymbol(self.unk_symbol.clone()));
        }
        Ok(())
    }

    fn unk(&self) -> Token {
        Token::new(self.unk_symbol.clone()).expect("validated unk symbol")
    }
}

/// Number of target words a transform touches: `⌊α·t⌋`, no minimum.
pub fn affected_count(alpha: f64, t: usize) -> usize {
    ((alpha * t as f64).floor() as usize).min(t)
}

/// `⌊α·t⌋` uniform transpositions of two distinct target positions.
pub fn apply_swap(pair: &SentencePair, alpha: f64, rng: &mut StreamRng) -> SentencePair {
    let mut out = pair.clone();
    let t = out.target.len();
    if t < 2 {
        return out;
    }
    for _ in 0..affected_count(alpha, t) {
        let i = rng.random_range(0..t);
        let mut j = rng.random_range(0..t - 1);
        if j >= i {
            j += 1;
        }
        out.target.swap(i, j);
    }
    out
}

/// Replaces `⌊α·t⌋` distinct target positions with `unk`.
pub fn apply_token_mask(pair: &SentencePair, alpha: f64, unk: &Token, rng: &mut StreamRng) -> SentencePair {
    let mut out = pair.clone();
    let t = out.target.len();
    for i in index::sample(rng, t, affected_count(alpha, t)) {
        out.target[i] = unk.clone();
    }
    out
}

pub fn apply_source_copy(pair: &SentencePair) -> SentencePair {
    SentencePair { target: pair.source.clone(), ..pair.clone() }
}

pub fn apply_reverse(pair: &SentencePair) -> SentencePair {
    let mut out = pair.clone();
    out.target.reverse();
    out
}

/// Source/target position pairs linked by the dictionary: source word `s`
/// at `i` aligns to target word `w` at `j` when `w` is a token of one of
/// `s`'s glosses. Each source position takes the leftmost unused target
/// position that matches.
pub fn dictionary_alignment(pair: &SentencePair, dictionary: &BilingualDictionary) -> Vec<(usize, usize)> {
    let mut used = vec![false; pair.target.len()];
    let target_keys: Vec<String> = pair.target.iter().map(Token::key).collect();
    let mut links = Vec::new();
    for (i, s) in pair.source.iter().enumerate() {
        if !s.is_word() {
            continue;
        }
        let Some(glosses) = dictionary.get_key(&s.key()) else { continue };
        let words: HashSet<String> = glosses
            .iter()
            .flat_map(|g| g.tokens())
            .filter(Token::is_word)
            .map(|t| t.key())
            .collect();
        if let Some(j) = (0..target_keys.len()).find(|&j| !used[j] && words.contains(&target_keys[j])) {
            used[j] = true;
            links.push((i, j));
        }
    }
    links
}

/// Dictionary entries usable as one-for-one replacements: single-token
/// headword with a single-token first gloss.
fn replacement_pool(dictionary: &BilingualDictionary) -> Vec<(Token, Token)> {
    dictionary
        .iter()
        .filter_map(|(head, glosses)| {
            let s = Token::new(head)?;
            let g = glosses.first()?.tokens();
            match g.as_slice() {
                [w] if s.is_word() && w.is_word() => Some((s, w.clone())),
                _ => None,
            }
        })
        .collect()
}

/// Outcome of a replace transform.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplaceOutcome {
    pub pair: SentencePair,
    pub aligned: usize,
    pub replaced: usize,
}

/// Substitutes up to `⌊α·t⌋` aligned word pairs with a random dictionary
/// entry `(s', first gloss w')`. The replacement is drawn among entries that
/// differ from the current word on both sides, so each substitution changes
/// exactly one source and one target position.
pub fn apply_replace(
    pair: &SentencePair,
    alpha: f64,
    dictionary: &BilingualDictionary,
    rng: &mut StreamRng,
) -> ReplaceOutcome {
    let pool = replacement_pool(dictionary);
    apply_replace_with_pool(pair, alpha, dictionary, &pool, rng)
}

fn apply_replace_with_pool(
    pair: &SentencePair,
    alpha: f64,
    dictionary: &BilingualDictionary,
    pool: &[(Token, Token)],
    rng: &mut StreamRng,
) -> ReplaceOutcome {
    let links = dictionary_alignment(pair, dictionary);
    let mut out = pair.clone();
    let n = affected_count(alpha, pair.target.len()).min(links.len());
    let mut replaced = 0;
    let mut chosen: Vec<usize> = index::sample(rng, links.len(), n).into_vec();
    chosen.sort_unstable();
    for k in chosen {
        let (i, j) = links[k];
        let (s_key, t_key) = (out.source[i].key(), out.target[j].key());
        let options: Vec<&(Token, Token)> = pool
            .iter()
            .filter(|(s, w)| s.key() != s_key && w.key() != t_key)
            .collect();
        if options.is_empty() {
            continue;
        }
        let (s, w) = options[rng.random_range(0..options.len())];
        out.source[i] = s.clone();
        out.target[j] = w.clone();
        replaced += 1;
    }
    ReplaceOutcome { pair: out, aligned: links.len(), replaced }
}

/// Split index `clamp(⌊r·L⌋, 1, L-1)`.
pub fn boundary_index(r: f64, len: usize) -> usize {
    ((r * len as f64).floor() as usize).clamp(1, len - 1)
}

/// Recombines two adjacent pairs at fractions `r_a` (for `a`) and `r_b`
/// (for `b`): `a`'s head joins `b`'s tail and `b`'s head joins `a`'s tail,
/// on both sides. Any side shorter than two tokens returns the inputs.
pub fn sentence_boundary_split(
    a: &SentencePair,
    b: &SentencePair,
    r_a: f64,
    r_b: f64,
) -> (SentencePair, SentencePair) {
    let sides = [&a.source, &a.target, &b.source, &b.target];
    if sides.iter().any(|s| s.len() < 2) {
        return (a.clone(), b.clone());
    }
    let (i, i2) = (boundary_index(r_a, a.source.len()), boundary_index(r_a, a.target.len()));
    let (j, j2) = (boundary_index(r_b, b.source.len()), boundary_index(r_b, b.target.len()));
    let cat = |x: &[Token], y: &[Token]| x.iter().chain(y).cloned().collect::<Vec<_>>();
    (
        SentencePair {
            id: a.id.clone(),
            source: cat(&a.source[..i], &b.source[j..]),
            target: cat(&a.target[..i2], &b.target[j2..]),
        },
        SentencePair {
            id: b.id.clone(),
            source: cat(&b.source[..j], &a.source[i..]),
            target: cat(&b.target[..j2], &a.target[i2..]),
        },
    )
}

pub fn sentence_boundary_augment(
    a: &SentencePair,
    b: &SentencePair,
    rng: &mut StreamRng,
) -> (SentencePair, SentencePair) {
    let r_a: f64 = rng.random();
    let r_b: f64 = rng.random();
    sentence_boundary_split(a, b, r_a, r_b)
}

/// Counters reported by [`augment_dataset`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AugmentStats {
    /// Synthetic pairs per task name, in task order.
    pub per_task: Vec<(String, usize)>,
    /// Replace applications with no aligned word pair (emitted unchanged).
    pub replace_skipped: usize,
    /// Sentence boundary applications that hit a side shorter than two.
    pub boundary_passthrough: usize,
    /// Swap transpositions performed.
    pub swap_transpositions: usize,
    /// Distinct target positions whose token changed under swap.
    pub swap_words_moved: usize,
}

/// One scheduled synthetic output.
#[derive(Debug, Clone, Copy)]
struct Job {
    task: AugmentationTask,
    first: usize,
    /// Second original for sentence boundary jobs.
    second: usize,
    /// How many of the job's outputs fit in the remaining budget.
    emit: usize,
}

/// Round-robin schedule over the task list. Each original feeds exactly one
/// synthetic pair; sentence boundary jobs consume two adjacent originals
/// (wrapping to the start of the corpus for the last one) and are truncated
/// to one output when only one slot remains.
fn schedule(n: usize, tasks: &[AugmentationTask]) -> Vec<Job> {
    let mut jobs = Vec::new();
    let mut cursor = 0;
    let mut k = 0;
    while cursor < n {
        let task = tasks[k % tasks.len()];
        k += 1;
        if task == AugmentationTask::SentenceBoundary {
            let emit = (n - cursor).min(2);
            jobs.push(Job { task, first: cursor, second: (cursor + 1) % n, emit });
            cursor += emit;
        } else {
            jobs.push(Job { task, first: cursor, second: cursor, emit: 1 });
            cursor += 1;
        }
    }
    jobs
}

struct JobOutput {
    pairs: Vec<SentencePair>,
    replace_skipped: bool,
    boundary_passthrough: bool,
    transpositions: usize,
    words_moved: usize,
}

fn run_job(
    job: &Job,
    originals: &[SentencePair],
    config: &AugmentConfig,
    dictionary: &BilingualDictionary,
    pool: &[(Token, Token)],
) -> JobOutput {
    let a = &originals[job.first];
    let mut rng = rng::keyed(config.seed, &[&a.id, job.task.name()]);
    let mut out = JobOutput {
        pairs: Vec::new(),
        replace_skipped: false,
        boundary_passthrough: false,
        transpositions: 0,
        words_moved: 0,
    };
    let pairs = match job.task {
        AugmentationTask::Swap => {
            let p = apply_swap(a, config.alpha, &mut rng);
            if a.target.len() >= 2 {
                out.transpositions = affected_count(config.alpha, a.target.len());
            }
            out.words_moved = a.target.iter().zip(&p.target).filter(|(x, y)| x != y).count();
            vec![p]
        }
        AugmentationTask::Token => vec![apply_token_mask(a, config.alpha, &config.unk(), &mut rng)],
        AugmentationTask::Source => vec![apply_source_copy(a)],
        AugmentationTask::Reverse => vec![apply_reverse(a)],
        AugmentationTask::Replace => {
            let r = apply_replace_with_pool(a, config.alpha, dictionary, pool, &mut rng);
            out.replace_skipped = r.aligned == 0;
            vec![r.pair]
        }
        AugmentationTask::SentenceBoundary => {
            let b = &originals[job.second];
            let (x, y) = sentence_boundary_augment(a, b, &mut rng);
            out.boundary_passthrough = [&a.source, &a.target, &b.source, &b.target]
                .iter()
                .any(|s| s.len() < 2);
            vec![x, y]
        }
    };
    let suffix = job.task.name();
    let sources = [job.first, job.second];
    for (k, mut p) in pairs.into_iter().take(job.emit).enumerate() {
        p.id = format!("{}#{}", originals[sources[k]].id, suffix);
        if config.tag_synthetic {
            p.source.insert(0, job.task.marker());
        }
        out.pairs.push(p);
    }
    out
}

/// Returns the original pairs followed by exactly `|corpus|` synthetic
/// pairs. Synthetic ids are `<original id>#<task>`.
pub fn augment_dataset(
    corpus: &ParallelCorpus,
    config: &AugmentConfig,
    dictionary: &BilingualDictionary,
) -> Result<(ParallelCorpus, AugmentStats), AugmentError> {
    config.validate()?;
    if corpus.is_empty() {
        return Err(AugmentError::EmptyCorpus);
    }
    let originals = corpus.pairs();
    let pool = replacement_pool(dictionary);
    let jobs = schedule(originals.len(), &config.tasks);
    let outputs: Vec<JobOutput> = jobs
        .par_iter()
        .map(|job| run_job(job, originals, config, dictionary, &pool))
        .collect();

    let mut stats = AugmentStats::default();
    for task in &config.tasks {
        if !stats.per_task.iter().any(|(n, _)| n == task.name()) {
            stats.per_task.push((task.name().to_string(), 0));
        }
    }
    let mut pairs = originals.to_vec();
    let mut ids: HashSet<String> = originals.iter().map(|p| p.id.clone()).collect();
    for (job, out) in jobs.iter().zip(outputs) {
        if let Some(slot) = stats.per_task.iter_mut().find(|(n, _)| n == job.task.name()) {
            slot.1 += out.pairs.len();
        }
        stats.replace_skipped += out.replace_skipped as usize;
        stats.boundary_passthrough += out.boundary_passthrough as usize;
        stats.swap_transpositions += out.transpositions;
        stats.swap_words_moved += out.words_moved;
        for p in out.pairs {
            if !ids.insert(p.id.clone()) {
                return Err(AugmentError::IdCollision(p.id));
            }
            pairs.push(p);
        }
    }
    let name = format!("{}.augmented", corpus.name);
    let out = ParallelCorpus::new(name, pairs).expect("ids checked above");
    Ok((out, stats))
}
