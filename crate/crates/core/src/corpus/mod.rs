//! Parallel corpora, bilingual dictionaries and tokenization.

mod dictionary;
mod split;
mod token;

use std::collections::HashSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use dictionary::{headword_key, BilingualDictionary, Gloss};
pub use split::{partition_fraction, split_dataset, SplitSpec};
pub use token::{is_numeral, is_punctuation_char, join_tokens, tokenize, tokenize_spans, Token, TokenKind};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid JSON: {source}")]
    Json {
        #[source]
        source: serde_json::Error,
    },
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("pair {id:?}: empty {side} side")]
    EmptySide { id: String, side: &'static str },
    #[error("line {line}: duplicate pair id {id:?}")]
    DuplicateId { id: String, line: usize },
    #[error("dictionary record at line {line}: {reason}")]
    InvalidRecord { line: usize, reason: String },
    #[error("invalid split: {0}")]
    InvalidSplit(String),
    #[error("corpus is empty")]
    EmptyCorpus,
}

/// A sentence-aligned source/target pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentencePair {
    pub id: String,
    pub source: Vec<Token>,
    pub target: Vec<Token>,
}

impl SentencePair {
    /// Tokenizes both sides; fails if either side has no tokens.
    pub fn from_text(id: impl Into<String>, source: &str, target: &str) -> Result<Self, CorpusError> {
        let id = id.into();
        let source = tokenize(source);
        if source.is_empty() {
            return Err(CorpusError::EmptySide { id, side: "source" });
        }
        let target = tokenize(target);
        if target.is_empty() {
            return Err(CorpusError::EmptySide { id, side: "target" });
        }
        Ok(SentencePair { id, source, target })
    }

    pub fn source_text(&self) -> String {
        join_tokens(&self.source)
    }

    pub fn target_text(&self) -> String {
        join_tokens(&self.target)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Tsv,
    Jsonl,
}

impl CorpusFormat {
    /// Guesses from the file extension; anything but `.jsonl`/`.json` is TSV.
    pub fn from_path(path: &Path) -> CorpusFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") => CorpusFormat::Jsonl,
            _ => CorpusFormat::Tsv,
        }
    }
}

impl FromStr for CorpusFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tsv" => Ok(CorpusFormat::Tsv),
            "jsonl" => Ok(CorpusFormat::Jsonl),
            other => Err(format!("unknown corpus format {other:?} (expected tsv or jsonl)")),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonRecord {
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "id_string")]
    id: Option<String>,
    src: String,
    tgt: String,
}

fn id_string<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<String>, D::Error> {
    let v = Option::<serde_json::Value>::deserialize(d)?;
    Ok(match v {
        None | Some(serde_json::Value::Null) => None,
        Some(serde_json::Value::String(s)) => Some(s),
        Some(other) => Some(other.to_string()),
    })
}

/// An ordered collection of pairs with pairwise distinct ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParallelCorpus {
    pub name: String,
    pairs: Vec<SentencePair>,
}

impl ParallelCorpus {
    pub fn new(name: impl Into<String>, pairs: Vec<SentencePair>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::new();
        for (i, p) in pairs.iter().enumerate() {
            if !seen.insert(p.id.as_str()) {
                return Err(CorpusError::DuplicateId { id: p.id.clone(), line: i + 1 });
            }
        }
        Ok(ParallelCorpus { name: name.into(), pairs })
    }

    pub fn pairs(&self) -> &[SentencePair] {
        &self.pairs
    }

    pub fn into_pairs(self) -> Vec<SentencePair> {
        self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn sources(&self) -> Vec<Vec<Token>> {
        self.pairs.iter().map(|p| p.source.clone()).collect()
    }

    pub fn targets(&self) -> Vec<Vec<Token>> {
        self.pairs.iter().map(|p| p.target.clone()).collect()
    }

    pub fn load(path: &Path, format: CorpusFormat) -> Result<Self, CorpusError> {
        let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::parse(&name, &text, format)
    }

    /// Parses TSV (`[id<TAB>]source<TAB>target`) or JSONL
    /// (`{"id": .., "src": .., "tgt": ..}`). Blank lines are skipped; a pair
    /// without an id gets its 1-based line number.
    pub fn parse(name: &str, text: &str, format: CorpusFormat) -> Result<Self, CorpusError> {
        let mut pairs = Vec::new();
        let mut seen = HashSet::new();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let (id, src, tgt) = match format {
                CorpusFormat::Tsv => {
                    let cols: Vec<&str> = line.split('\t').collect();
                    match cols.as_slice() {
                        [s, t] => (None, s.to_string(), t.to_string()),
                        [i, s, t] => (Some(i.trim().to_string()), s.to_string(), t.to_string()),
                        _ => {
                            return Err(CorpusError::MalformedLine {
                                line: lineno,
                                reason: format!("expected 2 or 3 tab-separated columns, found {}", cols.len()),
                            })
                        }
                    }
                }
                CorpusFormat::Jsonl => {
                    let rec: JsonRecord = serde_json::from_str(line).map_err(|e| {
                        CorpusError::MalformedLine { line: lineno, reason: e.to_string() }
                    })?;
                    (rec.id, rec.src, rec.tgt)
                }
            };
            let id = match id {
                Some(id) if !id.is_empty() => id,
                _ => lineno.to_string(),
            };
            if !seen.insert(id.clone()) {
                return Err(CorpusError::DuplicateId { id, line: lineno });
            }
            pairs.push(SentencePair::from_text(id, &src, &tgt)?);
        }
        Ok(ParallelCorpus { name: name.to_string(), pairs })
    }

    pub fn write_to<W: Write>(&self, mut out: W, format: CorpusFormat) -> std::io::Result<()> {
        for p in &self.pairs {
            match format {
                CorpusFormat::Tsv => {
                    writeln!(out, "{}\t{}\t{}", p.id, p.source_text(), p.target_text())?;
                }
                CorpusFormat::Jsonl => {
                    let rec = JsonRecord {
                        id: Some(p.id.clone()),
                        src: p.source_text(),
                        tgt: p.target_text(),
                    };
                    serde_json::to_writer(&mut out, &rec)?;
                    out.write_all(b"\n")?;
                }
            }
        }
        Ok(())
    }

    pub fn to_string(&self, format: CorpusFormat) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf, format).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("corpus text is UTF-8")
    }

    pub fn save(&self, path: &Path, format: CorpusFormat) -> Result<(), CorpusError> {
        let io_err = |source| CorpusError::Io { path: path.to_path_buf(), source };
        let file = std::fs::File::create(path).map_err(io_err)?;
        let mut w = std::io::BufWriter::new(file);
        self.write_to(&mut w, format).map_err(io_err)?;
        w.flush().map_err(io_err)
    }
}
