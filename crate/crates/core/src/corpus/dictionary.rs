use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::value::RawValue;

use super::token::{join_tokens, tokenize, Token};
use super::CorpusError;

/// One target-language rendering of a headword.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gloss {
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freq: Option<u64>,
}

impl Gloss {
    pub fn new(text: impl Into<String>) -> Gloss {
        Gloss { text: normalize_space(&text.into()), freq: None }
    }

    pub fn with_freq(text: impl Into<String>, freq: u64) -> Gloss {
        Gloss { freq: Some(freq), ..Gloss::new(text) }
    }

    pub fn tokens(&self) -> Vec<Token> {
        tokenize(&self.text)
    }

    /// Lowercased first token, used for co-occurrence lookups.
    pub fn head(&self) -> Option<String> {
        self.tokens().first().map(Token::key)
    }
}

impl fmt::Display for Gloss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Source headword to ordered target glosses.
///
/// Headwords are stored as lookup keys: tokenized, lowercased and joined by
/// single spaces, so `"Kơ-tă"` and `"kơ - tă"` name the same entry and match
/// the keys produced for segmented text.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BilingualDictionary {
    entries: BTreeMap<String, Vec<Gloss>>,
    max_headword_tokens: usize,
}

impl BilingualDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a dictionary from `(headword, glosses)` pairs, merging repeated
    /// headwords. Invalid entries are reported with their 1-based position.
    pub fn from_entries<I, H, G>(entries: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = (H, Vec<G>)>,
        H: AsRef<str>,
        G: Into<Gloss>,
    {
        let mut dict = Self::new();
        for (i, (head, glosses)) in entries.into_iter().enumerate() {
            let glosses = glosses.into_iter().map(Into::into).collect();
            dict.insert(head.as_ref(), glosses, i + 1)?;
        }
        Ok(dict)
    }

    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Parses either a JSON object `{headword: [gloss, ...]}` or an array of
    /// `{"bahnaric": .., "vietnamese": [..], "freq": n}` records.
    pub fn parse(text: &str) -> Result<Self, CorpusError> {
        let trimmed = text.trim_start();
        let mut dict = Self::new();
        if trimmed.is_empty() {
            return Ok(dict);
        }
        if trimmed.starts_with('[') {
            let records: Vec<&RawValue> =
                serde_json::from_str(text).map_err(|e| CorpusError::Json { source: e })?;
            let mut lines = LineCounter::new(text);
            for raw in records {
                let line = lines.line_of(raw);
                let record: Record = serde_json::from_str(raw.get()).map_err(|e| {
                    CorpusError::InvalidRecord { line, reason: e.to_string() }
                })?;
                let glosses = record
                    .vietnamese
                    .into_vec()
                    .into_iter()
                    .map(|g| Gloss { freq: record.freq, ..Gloss::new(g) })
                    .collect();
                dict.insert(&record.bahnaric, glosses, line)?;
            }
        } else {
            let OrderedEntries(entries) =
                serde_json::from_str(text).map_err(|e| CorpusError::Json { source: e })?;
            let mut lines = LineCounter::new(text);
            for (head, raw) in entries {
                let line = lines.line_of(raw);
                let glosses: OneOrMany = serde_json::from_str(raw.get()).map_err(|e| {
                    CorpusError::InvalidRecord { line, reason: e.to_string() }
                })?;
                let glosses = glosses.into_vec().into_iter().map(Gloss::new).collect();
                dict.insert(&head, glosses, line)?;
            }
        }
        Ok(dict)
    }

    fn insert(&mut self, headword: &str, glosses: Vec<Gloss>, line: usize) -> Result<(), CorpusError> {
        let key = headword_key(headword);
        if key.is_empty() {
            return Err(CorpusError::InvalidRecord { line, reason: "empty headword".into() });
        }
        let glosses: Vec<Gloss> = glosses.into_iter().filter(|g| !g.text.is_empty()).collect();
        if glosses.is_empty() {
            return Err(CorpusError::InvalidRecord {
                line,
                reason: format!("headword {key:?} has no glosses"),
            });
        }
        let n_tokens = key.split(' ').count();
        self.max_headword_tokens = self.max_headword_tokens.max(n_tokens);
        let slot = self.entries.entry(key).or_default();
        for gloss in glosses {
            match slot.iter_mut().find(|g| g.text == gloss.text) {
                Some(existing) => {
                    existing.freq = match (existing.freq, gloss.freq) {
                        (Some(a), Some(b)) => Some(a.max(b)),
                        (a, b) => a.or(b),
                    }
                }
                None => slot.push(gloss),
            }
        }
        Ok(())
    }

    /// Looks up a headword; the argument is normalized the same way keys are.
    pub fn get(&self, headword: &str) -> Option<&[Gloss]> {
        self.entries.get(&headword_key(headword)).map(Vec::as_slice)
    }

    /// Looks up an already-normalized key without re-tokenizing.
    pub fn get_key(&self, key: &str) -> Option<&[Gloss]> {
        self.entries.get(key).map(Vec::as_slice)
    }

    pub fn contains_key(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in headword order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[Gloss])> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Longest headword, in tokens.
    pub fn max_headword_tokens(&self) -> usize {
        self.max_headword_tokens
    }

    /// Serializes as a JSON object of headword to gloss texts.
    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .entries
            .iter()
            .map(|(k, gs)| (k.clone(), gs.iter().map(|g| g.text.clone()).collect()))
            .collect();
        serde_json::Value::Object(map)
    }
}

impl From<&str> for Gloss {
    fn from(s: &str) -> Gloss {
        Gloss::new(s)
    }
}

impl From<String> for Gloss {
    fn from(s: String) -> Gloss {
        Gloss::new(s)
    }
}

/// Normalized lookup key: tokenized, lowercased, single-space joined.
pub fn headword_key(text: &str) -> String {
    join_tokens(&tokenize(&text.to_lowercase()))
}

fn normalize_space(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Maps raw values back to 1-based source lines. Values must be visited in
/// document order.
struct LineCounter<'a> {
    text: &'a str,
    offset: usize,
    line: usize,
}

impl<'a> LineCounter<'a> {
    fn new(text: &'a str) -> Self {
        LineCounter { text, offset: 0, line: 1 }
    }

    fn line_of(&mut self, raw: &RawValue) -> usize {
        let offset = raw.get().as_ptr() as usize - self.text.as_ptr() as usize;
        self.line += self.text.as_bytes()[self.offset..offset].iter().filter(|&&b| b == b'\n').count();
        self.offset = offset;
        self.line
    }
}

#[derive(Deserialize)]
struct Record {
    bahnaric: String,
    vietnamese: OneOrMany,
    #[serde(default)]
    freq: Option<u64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<String> {
        match self {
            OneOrMany::One(s) => vec![s],
            OneOrMany::Many(v) => v,
        }
    }
}

/// A JSON object read as a list so repeated keys survive.
struct OrderedEntries<'a>(Vec<(String, &'a RawValue)>);

impl<'de: 'a, 'a> Deserialize<'de> for OrderedEntries<'a> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct EntriesVisitor<'a>(std::marker::PhantomData<&'a ()>);

        impl<'de: 'a, 'a> Visitor<'de> for EntriesVisitor<'a> {
            type Value = OrderedEntries<'a>;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a JSON object mapping headwords to gloss arrays")
            }

            fn visit_map<M: MapAccess<'de>>(self, mut map: M) -> Result<Self::Value, M::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, &'de RawValue>()? {
                    out.push((k, v));
                }
                Ok(OrderedEntries(out))
            }
        }

        deserializer.deserialize_map(EntriesVisitor(std::marker::PhantomData))
    }
}
