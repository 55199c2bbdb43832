#![allow(dead_code)]

pub mod criteria;
pub mod oracles;

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::seq::IndexedRandom;
use rand::Rng;

use bahnaric_mt::corpus::{join_tokens, Gloss};
use bahnaric_mt::rng::StreamRng;
use bahnaric_mt::{BilingualDictionary, FrequencyLexicon, SentencePair, Token};

pub fn demo_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/demo")
}

pub fn tok(s: &str) -> Token {
    Token::new(s).unwrap_or_else(|| panic!("bad token {s:?}"))
}

pub fn toks(words: &[&str]) -> Vec<Token> {
    words.iter().map(|w| tok(w)).collect()
}

/// A tiny segmentation problem over the words a..d with a few literals.
pub struct SegInstance {
    pub tokens: Vec<Token>,
    pub lexicon: FrequencyLexicon,
    pub dictionary: BilingualDictionary,
}

const SEG_WORDS: [&str; 4] = ["a", "b", "c", "d"];
const SEG_LITERALS: [&str; 3] = ["1", ",", "."];

pub fn seg_instance(rng: &mut StreamRng) -> SegInstance {
    let n = rng.random_range(1..=8);
    let tokens: Vec<Token> = (0..n)
        .map(|_| {
            let pool: &[&str] = if rng.random_bool(0.15) { &SEG_LITERALS } else { &SEG_WORDS };
            tok(pool.choose(rng).unwrap())
        })
        .collect();

    let mut entries = BTreeMap::new();
    for _ in 0..rng.random_range(0..=6) {
        let len = rng.random_range(2..=3);
        let key: Vec<Token> = if rng.random_bool(0.5) && tokens.len() >= len {
            let start = rng.random_range(0..=tokens.len() - len);
            tokens[start..start + len].to_vec()
        } else {
            (0..len).map(|_| tok(SEG_WORDS.choose(rng).unwrap())).collect()
        };
        if key.iter().all(Token::is_word) {
            entries.insert(join_tokens(&key), rng.random_range(2..=20));
        }
    }
    let lexicon = FrequencyLexicon { max_ngram: 3, min_count: 2, entries };

    let mut heads: Vec<String> = SEG_WORDS.iter().map(|w| w.to_string()).collect();
    for _ in 0..rng.random_range(0..=2) {
        let len = rng.random_range(2..=4);
        let key: Vec<Token> = if rng.random_bool(0.5) && tokens.len() >= len {
            let start = rng.random_range(0..=tokens.len() - len);
            tokens[start..start + len].to_vec()
        } else {
            (0..len).map(|_| tok(SEG_WORDS.choose(rng).unwrap())).collect()
        };
        if key.iter().any(Token::is_word) {
            heads.push(join_tokens(&key));
        }
    }
    let dictionary =
        BilingualDictionary::from_entries(heads.iter().map(|h| (h.clone(), vec![Gloss::new(format!("g {h}"))])))
            .expect("valid dictionary");
    SegInstance { tokens, lexicon, dictionary }
}

const FUZZ_ATOMS: [&str; 24] = [
    "hên", "pơm", "đak", "Ƀok", "tơ", "drong", "a", "B", "kon", "năr", "12", "3", "2024", ",", ".", "!",
    "?", "(", ")", "«", "…", "<unk>", "<5>", "-",
];
const FUZZ_GAPS: [&str; 5] = ["", " ", " ", "  ", "\t"];

/// Mixed words, numbers, punctuation and markers with irregular spacing.
pub fn fuzz_sentence(rng: &mut StreamRng) -> String {
    let n = rng.random_range(0..=14);
    let mut s = String::new();
    if rng.random_bool(0.1) {
        s.push(' ');
    }
    for i in 0..n {
        if i > 0 {
            s.push_str(FUZZ_GAPS.choose(rng).unwrap());
        }
        s.push_str(FUZZ_ATOMS.choose(rng).unwrap());
    }
    s
}

const LITERAL_ATOMS: [&str; 22] = [
    "0", "7", "12", "345", "2024", ".", ",", "!", "?", ";", ":", "(", ")", "[", "]", "%", "+", "-", "/", "…",
    "«", "»",
];
const LITERAL_GAPS: [&str; 3] = ["", " ", "  "];

/// Numbers and punctuation only, joined by zero, one or two spaces.
pub fn literal_sentence(rng: &mut StreamRng) -> String {
    let n = rng.random_range(1..=10);
    let mut s = String::new();
    for i in 0..n {
        if i > 0 {
            s.push_str(LITERAL_GAPS.choose(rng).unwrap());
        }
        s.push_str(LITERAL_ATOMS.choose(rng).unwrap());
    }
    s
}

pub const SRC_WORDS: [&str; 6] = ["s0", "s1", "s2", "s3", "s4", "s5"];
pub const TGT_WORDS: [&str; 6] = ["t0", "t1", "t2", "t3", "t4", "t5"];

/// `s_i` glosses to `t_i`; `s5` has a second, multiword gloss.
pub fn toy_dictionary() -> BilingualDictionary {
    let mut entries: Vec<(String, Vec<Gloss>)> = SRC_WORDS
        .iter()
        .zip(TGT_WORDS)
        .map(|(s, t)| (s.to_string(), vec![Gloss::new(t)]))
        .collect();
    entries[5].1.push(Gloss::new("t0 t1"));
    BilingualDictionary::from_entries(entries).expect("valid dictionary")
}

pub fn random_side(rng: &mut StreamRng, words: &[&str], len: usize) -> Vec<Token> {
    (0..len)
        .map(|_| {
            if rng.random_bool(0.1) {
                tok(",")
            } else {
                tok(words.choose(rng).unwrap())
            }
        })
        .collect()
}

pub fn random_pair(rng: &mut StreamRng, id: &str, target_len: usize) -> SentencePair {
    let source_len = rng.random_range(1..=20);
    SentencePair {
        id: id.to_string(),
        source: random_side(rng, &SRC_WORDS, source_len),
        target: random_side(rng, &TGT_WORDS, target_len),
    }
}
