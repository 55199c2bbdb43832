use std::sync::Arc;

use crate::corpus::{tokenize, BilingualDictionary};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BackendError {
    #[error("batch {batch}: backend answered HTTP {status}")]
    Status { batch: usize, status: u16, body: String },
    #[error("batch {batch}: request timed out")]
    Timeout { batch: usize },
    #[error("batch {batch}: {message}")]
    Transport { batch: usize, message: String },
    #[error("batch {batch}: protocol violation: {reason}")]
    Protocol { batch: usize, reason: String },
    #[error("batch {batch} failed after {attempts} attempts: {last}")]
    Exhausted { batch: usize, attempts: u32, last: Box<BackendError> },
    #[error("invalid backend endpoint: {0}")]
    Endpoint(String),
}

impl BackendError {
    /// Status codes, timeouts and transport failures may succeed on retry;
    /// malformed responses will not.
    pub fn is_retriable(&self) -> bool {
        matches!(
            self,
            BackendError::Status { .. } | BackendError::Timeout { .. } | BackendError::Transport { .. }
        )
    }

    /// The error at the root of a retry chain.
    pub fn root(&self) -> &BackendError {
        match self {
            BackendError::Exhausted { last, .. } => last.root(),
            other => other,
        }
    }
}

/// Translates chunk texts. Implementations must return exactly one
/// translation per input, in input order, or an error.
pub trait TranslationBackend: Send + Sync {
    fn translate_chunks(&self, chunks: &[String]) -> Result<Vec<String>, BackendError>;
}

impl<T: TranslationBackend + ?Sized> TranslationBackend for &T {
    fn translate_chunks(&self, chunks: &[String]) -> Result<Vec<String>, BackendError> {
        (**self).translate_chunks(chunks)
    }
}

impl<T: TranslationBackend + ?Sized> TranslationBackend for Box<T> {
    fn translate_chunks(&self, chunks: &[String]) -> Result<Vec<String>, BackendError> {
        (**self).translate_chunks(chunks)
    }
}

impl<T: TranslationBackend + ?Sized> TranslationBackend for Arc<T> {
    fn translate_chunks(&self, chunks: &[String]) -> Result<Vec<String>, BackendError> {
        (**self).translate_chunks(chunks)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MockMode {
    /// Echo every chunk.
    Identity,
    /// Word-by-word first gloss; unknown words pass through.
    DictionaryGloss,
}

impl std::str::FromStr for MockMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "identity" => Ok(MockMode::Identity),
            "gloss" | "dictionary-gloss" => Ok(MockMode::DictionaryGloss),
            other => Err(format!("unknown mock mode {other:?} (expected identity or gloss)")),
        }
    }
}

/// In-process stand-in for the neural chunk translator.
#[derive(Debug, Clone)]
pub struct MockBackend {
    mode: MockMode,
    dictionary: Arc<BilingualDictionary>,
}

impl MockBackend {
    pub fn new(mode: MockMode, dictionary: Arc<BilingualDictionary>) -> Self {
        MockBackend { mode, dictionary }
    }

    pub fn identity() -> Self {
        Self::new(MockMode::Identity, Arc::default())
    }

    pub fn gloss(dictionary: Arc<BilingualDictionary>) -> Self {
        Self::new(MockMode::DictionaryGloss, dictionary)
    }

    pub fn mode(&self) -> MockMode {
        self.mode
    }

    fn gloss_chunk(&self, chunk: &str) -> String {
        tokenize(chunk)
            .iter()
            .map(|t| match self.dictionary.get_key(&t.key()) {
                Some(glosses) if !t.is_literal() => glosses[0].text.clone(),
                _ => t.surface().to_string(),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl TranslationBackend for MockBackend {
    fn translate_chunks(&self, chunks: &[String]) -> Result<Vec<String>, BackendError> {
        Ok(match self.mode {
            MockMode::Identity => chunks.to_vec(),
            MockMode::DictionaryGloss => chunks.iter().map(|c| self.gloss_chunk(c)).collect(),
        })
    }
}
