//! Bahnaric to Vietnamese chunked translation toolkit.
//!
//! A sentence is tokenized, segmented into multiword units using a corpus
//! frequency lexicon, and classified into dictionary anchors, untranslatable
//! chunks and literals. Anchors are mapped through the bilingual dictionary
//! (with co-occurrence based sense selection when a headword has several
//! glosses), chunks go to a pluggable neural backend over a small HTTP
//! protocol, and literals are copied through unchanged.
//!
//! The crate also ships the data augmentation tasks used to expand
//! low-resource training corpora and a corpus-level BLEU scorer.

pub mod augmenter;
pub mod corpus;
pub mod disambiguator;
pub mod evaluator;
pub mod pipeline;
pub mod rng;
pub mod segmenter;

pub use augmenter::{AugmentConfig, AugmentStats, AugmentationTask};
pub use corpus::{
    BilingualDictionary, CorpusFormat, Gloss, ParallelCorpus, SentencePair, SplitSpec, Token,
    TokenKind,
};
pub use disambiguator::{CooccurrenceIndex, DisambiguationConfig, TieBreak};
pub use evaluator::BleuReport;
pub use pipeline::{
    BackendEndpoint, BackendError, MockBackend, MockMode, RemoteBackend, TranslationBackend,
    TranslationResources, TranslationTrace,
};
pub use segmenter::{FrequencyLexicon, Segment, WordUnit};
