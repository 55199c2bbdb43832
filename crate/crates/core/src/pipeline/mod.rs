//! Sentence translation: segment, classify, map anchors, send chunks to a
//! backend, reassemble.

pub mod backend;
mod remote;
pub mod server;

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use backend::{BackendError, MockBackend, MockMode, TranslationBackend};
pub use remote::{
    BackendEndpoint, RemoteBackend, DEFAULT_BACKOFF_MS, DEFAULT_MAX_BATCH, DEFAULT_RETRIES,
    DEFAULT_TIMEOUT_MS,
};

use crate::corpus::{tokenize_spans, BilingualDictionary};
use crate::disambiguator::{
    disambiguate, score_to_f64, ContextWord, CooccurrenceIndex, DisambiguationConfig,
    DisambiguationError,
};
use crate::segmenter::{classify_segments, segment_sentence, FrequencyLexicon, Segment, SegmentKind, SegmenterError};

#[derive(Debug, thiserror::Error)]
pub enum ResourceError {
    #[error(transparent)]
    Lexicon(#[from] SegmenterError),
    #[error(transparent)]
    Disambiguation(#[from] DisambiguationError),
}

/// Everything needed to translate a sentence apart from the backend.
#[derive(Debug, Clone)]
pub struct TranslationResources {
    dictionary: Arc<BilingualDictionary>,
    lexicon: FrequencyLexicon,
    cooc_index: CooccurrenceIndex,
    disamb_config: DisambiguationConfig,
}

impl TranslationResources {
    pub fn new(
        dictionary: Arc<BilingualDictionary>,
        lexicon: FrequencyLexicon,
        cooc_index: CooccurrenceIndex,
        disamb_config: DisambiguationConfig,
    ) -> Result<Self, ResourceError> {
        lexicon.validate()?;
        cooc_index.check()?;
        disamb_config.validate()?;
        Ok(TranslationResources { dictionary, lexicon, cooc_index, disamb_config })
    }

    pub fn dictionary(&self) -> &Arc<BilingualDictionary> {
        &self.dictionary
    }

    pub fn lexicon(&self) -> &FrequencyLexicon {
        &self.lexicon
    }

    pub fn cooc_index(&self) -> &CooccurrenceIndex {
        &self.cooc_index
    }

    pub fn disamb_config(&self) -> &DisambiguationConfig {
        &self.disamb_config
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Single-gloss anchor.
    Dictionary,
    /// Multi-gloss anchor resolved by co-occurrence scoring.
    Disambiguated,
    Literal,
    Backend,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlossScore {
    pub gloss: String,
    pub score: f64,
    /// Exact score as a reduced fraction, e.g. `"3/2"`.
    pub exact: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub kind: SegmentKind,
    pub source: String,
    /// Empty for chunks whose backend call failed.
    pub output: String,
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scores: Option<Vec<GlossScore>>,
    /// Source whitespace between this literal and a directly preceding
    /// literal; reproduced verbatim so literal runs come out unchanged.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_gap: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TranslationTrace {
    pub records: Vec<TraceRecord>,
}

impl TranslationTrace {
    /// The translation these records assemble to.
    pub fn assemble(&self) -> String {
        let mut out = String::new();
        let mut prev: Option<&str> = None;
        for r in &self.records {
            if r.output.is_empty() {
                continue;
            }
            match (&r.source_gap, prev) {
                (Some(gap), Some(_)) => out.push_str(gap),
                (None, Some(p)) if needs_space(p, &r.output) => out.push(' '),
                _ => {}
            }
            out.push_str(&r.output);
            prev = Some(&r.output);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trace serializes")
    }
}

const CLOSING: [char; 9] = [',', '.', '!', '?', ';', ':', ')', ']', '}'];
const OPENING: [char; 3] = ['(', '[', '{'];

fn needs_space(prev: &str, next: &str) -> bool {
    let closes = next.chars().next().is_some_and(|c| CLOSING.contains(&c));
    let opens = prev.chars().last().is_some_and(|c| OPENING.contains(&c));
    !(closes || opens)
}

/// Joins segment outputs with single spaces, except before closing
/// punctuation and after opening brackets. Empty pieces are skipped.
pub fn assemble(pieces: &[(String, SegmentKind)]) -> String {
    let mut out = String::new();
    let mut prev: Option<&str> = None;
    for (text, _) in pieces.iter().filter(|(t, _)| !t.is_empty()) {
        if prev.is_some_and(|p| needs_space(p, text)) {
            out.push(' ');
        }
        out.push_str(text);
        prev = Some(text);
    }
    out
}

#[derive(Debug, thiserror::Error)]
pub enum TranslateError {
    #[error("backend failed on {} chunk(s): {source}", chunks.len())]
    Backend {
        chunks: Vec<String>,
        #[source]
        source: BackendError,
        /// Anchor and literal records are complete; chunk outputs are empty.
        partial: TranslationTrace,
    },
}

/// Translates one sentence. The backend is called once, with every chunk
/// of the sentence in order, and only if there is at least one chunk.
pub fn translate_sentence(
    text: &str,
    resources: &TranslationResources,
    backend: &dyn TranslationBackend,
) -> Result<(String, TranslationTrace), TranslateError> {
    let spanned = tokenize_spans(text);
    let tokens: Vec<_> = spanned.iter().map(|(t, _)| t.clone()).collect();
    let units = segment_sentence(&tokens, &resources.lexicon, &resources.dictionary);
    let segments = classify_segments(&units, &resources.dictionary);

    // Unit position and token offset of each segment's start.
    let mut starts = Vec::with_capacity(segments.len());
    let (mut unit_pos, mut tok_pos) = (0usize, 0usize);
    for seg in &segments {
        starts.push((unit_pos, tok_pos));
        unit_pos += seg.unit_count();
        tok_pos += seg.tokens().len();
    }

    let mut records: Vec<TraceRecord> = segments
        .iter()
        .map(|seg| TraceRecord {
            kind: seg.kind(),
            source: seg.text(),
            output: String::new(),
            method: Method::Backend,
            scores: None,
            source_gap: None,
        })
        .collect();

    // Pass 1: literals and single-gloss anchors.
    for (i, seg) in segments.iter().enumerate() {
        match seg {
            Segment::Literal { token } => {
                records[i].output = token.surface().to_string();
                records[i].method = Method::Literal;
                if i > 0 && matches!(segments[i - 1], Segment::Literal { .. }) {
                    let tok = starts[i].1;
                    let gap = &text[spanned[tok - 1].1.end..spanned[tok].1.start];
                    records[i].source_gap = Some(gap.to_string());
                }
            }
            Segment::Anchor { candidates, .. } if candidates.len() == 1 => {
                records[i].output = candidates[0].text.clone();
                records[i].method = Method::Dictionary;
            }
            _ => {}
        }
    }

    // Pass 2: multi-gloss anchors, scored against pass-1 resolutions.
    let resolved: Vec<(usize, &str)> = records
        .iter()
        .enumerate()
        .filter(|(_, r)| matches!(r.method, Method::Literal | Method::Dictionary))
        .map(|(i, r)| (starts[i].0, r.output.as_str()))
        .collect();
    let mut decisions = Vec::new();
    for (i, seg) in segments.iter().enumerate() {
        let Segment::Anchor { candidates, .. } = seg else { continue };
        if candidates.len() < 2 {
            continue;
        }
        let here = starts[i].0;
        let context: Vec<ContextWord> = resolved
            .iter()
            .flat_map(|&(pos, out)| {
                let d = pos.abs_diff(here);
                out.split_whitespace().map(move |w| ContextWord::new(w, d))
            })
            .collect();
        let decision = disambiguate(candidates, &context, &resources.cooc_index, &resources.disamb_config)
            .expect("anchors have candidates");
        let scores = candidates
            .iter()
            .zip(&decision.scores)
            .map(|(g, s)| GlossScore { gloss: g.text.clone(), score: score_to_f64(s), exact: s.to_string() })
            .collect();
        decisions.push((i, candidates[decision.chosen].text.clone(), scores));
    }
    for (i, output, scores) in decisions {
        records[i].output = output;
        records[i].method = Method::Disambiguated;
        records[i].scores = Some(scores);
    }

    let chunk_ids: Vec<usize> = (0..segments.len())
        .filter(|&i| segments[i].kind() == SegmentKind::Chunk)
        .collect();
    if !chunk_ids.is_empty() {
        let chunks: Vec<String> = chunk_ids.iter().map(|&i| records[i].source.clone()).collect();
        match backend.translate_chunks(&chunks) {
            Ok(out) if out.len() == chunks.len() => {
                for (&i, t) in chunk_ids.iter().zip(out) {
                    records[i].output = t;
                }
            }
            Ok(out) => {
                let source = BackendError::Protocol {
                    batch: 0,
                    reason: format!("sent {} chunks, received {} translations", chunks.len(), out.len()),
                };
                return Err(TranslateError::Backend { chunks, source, partial: TranslationTrace { records } });
            }
            Err(source) => {
                return Err(TranslateError::Backend { chunks, source, partial: TranslationTrace { records } })
            }
        }
    }

    let trace = TranslationTrace { records };
    Ok((trace.assemble(), trace))
}

/// Translates sentences in parallel on the current rayon pool. Results are
/// in input order; a failed sentence does not stop the others.
pub fn translate_corpus(
    sentences: &[String],
    resources: &TranslationResources,
    backend: &dyn TranslationBackend,
) -> Vec<Result<(String, TranslationTrace), TranslateError>> {
    sentences
        .par_iter()
        .map(|s| translate_sentence(s, resources, backend))
        .collect()
}
