use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use unicode_general_category::{get_general_category, GeneralCategory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenKind {
    Word,
    Punctuation,
    Number,
}

/// A whitespace-free unit of text. The kind is always derived from the
/// surface, so a `Token` can never carry a kind that disagrees with it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    surface: String,
    kind: TokenKind,
}

impl Token {
    /// Returns `None` for empty surfaces or surfaces containing whitespace.
    pub fn new(surface: impl Into<String>) -> Option<Token> {
        let surface = surface.into();
        if surface.is_empty() || surface.chars().any(char::is_whitespace) {
            return None;
        }
        let kind = classify(&surface);
        Some(Token { surface, kind })
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }

    pub fn kind(&self) -> TokenKind {
        self.kind
    }

    pub fn is_word(&self) -> bool {
        self.kind == TokenKind::Word
    }

    /// Punctuation and numbers are copied through translation unchanged.
    pub fn is_literal(&self) -> bool {
        matches!(self.kind, TokenKind::Punctuation | TokenKind::Number)
    }

    /// Case-folded lookup key. Surfaces themselves are never altered.
    pub fn key(&self) -> String {
        self.surface.to_lowercase()
    }
}

impl Serialize for Token {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.surface)
    }
}

impl<'de> Deserialize<'de> for Token {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Token::new(s).ok_or_else(|| serde::de::Error::custom("token must be non-empty and contain no whitespace"))
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.surface)
    }
}

pub fn is_punctuation_char(c: char) -> bool {
    use GeneralCategory::*;
    matches!(
        get_general_category(c),
        ClosePunctuation
            | ConnectorPunctuation
            | DashPunctuation
            | FinalPunctuation
            | InitialPunctuation
            | OpenPunctuation
            | OtherPunctuation
            | CurrencySymbol
            | MathSymbol
            | ModifierSymbol
            | OtherSymbol
    )
}

/// Optional sign, ASCII digits, and at most one internal `.` or `,` that is
/// followed by more digits.
pub fn is_numeral(s: &str) -> bool {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    let digits = |part: &str| !part.is_empty() && part.bytes().all(|b| b.is_ascii_digit());
    match body.find(['.', ',']) {
        Some(at) => digits(&body[..at]) && digits(&body[at + 1..]),
        None => digits(body),
    }
}

fn classify(surface: &str) -> TokenKind {
    if is_numeral(surface) {
        TokenKind::Number
    } else if surface.chars().all(is_punctuation_char) {
        TokenKind::Punctuation
    } else {
        TokenKind::Word
    }
}

/// Splits text into tokens.
///
/// Whitespace separates tokens. Inside a whitespace-delimited piece, every
/// punctuation character becomes its own token, a digit run at the start of
/// a word (with at most one internal `.`/`,` between digits) becomes a
/// number, and bracketed markers that start with a letter, such as `<unk>`
/// or `<task:swap>`, are kept whole.
pub fn tokenize(text: &str) -> Vec<Token> {
    tokenize_spans(text).into_iter().map(|(t, _)| t).collect()
}

/// Like [`tokenize`], with the byte range of each token in `text`.
pub fn tokenize_spans(text: &str) -> Vec<(Token, Range<usize>)> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let end_of = |i: usize| chars.get(i).map_or(text.len(), |&(b, _)| b);
    let mut word_start: Option<usize> = None;
    let mut i = 0;

    let flush = |out: &mut Vec<(Token, Range<usize>)>, start: &mut Option<usize>, end: usize| {
        if let Some(s) = start.take() {
            if let Some(tok) = Token::new(&text[s..end]) {
                out.push((tok, s..end));
            }
        }
    };

    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            flush(&mut out, &mut word_start, pos);
            i += 1;
        } else if c == '<' {
            if let Some(close) = marker_end(&chars, i) {
                flush(&mut out, &mut word_start, pos);
                let end = end_of(close + 1);
                out.push((Token::new(&text[pos..end]).expect("marker"), pos..end));
                i = close + 1;
            } else {
                flush(&mut out, &mut word_start, pos);
                out.push((Token::new(c.to_string()).expect("punct"), pos..end_of(i + 1)));
                i += 1;
            }
        } else if is_punctuation_char(c) {
            flush(&mut out, &mut word_start, pos);
            out.push((Token::new(c.to_string()).expect("punct"), pos..end_of(i + 1)));
            i += 1;
        } else if c.is_ascii_digit() && word_start.is_none() {
            let mut j = i;
            while j < chars.len() && chars[j].1.is_ascii_digit() {
                j += 1;
            }
            if j + 1 < chars.len()
                && matches!(chars[j].1, '.' | ',')
                && chars[j + 1].1.is_ascii_digit()
            {
                j += 1;
                while j < chars.len() && chars[j].1.is_ascii_digit() {
                    j += 1;
                }
            }
            let end = end_of(j);
            out.push((Token::new(&text[pos..end]).expect("numeral"), pos..end));
            i = j;
        } else {
            word_start.get_or_insert(pos);
            i += 1;
        }
    }
    flush(&mut out, &mut word_start, text.len());
    out
}

/// Index of the closing `>` when `chars[open]` starts a `<marker>`. A marker
/// begins with a letter, so bracketed numbers stay literal.
fn marker_end(chars: &[(usize, char)], open: usize) -> Option<usize> {
    if !chars.get(open + 1).is_some_and(|&(_, c)| c.is_alphabetic()) {
        return None;
    }
    let mut j = open + 1;
    while j < chars.len() {
        match chars[j].1 {
            '>' if j > open + 1 => return Some(j),
            '>' | '<' => return None,
            c if c.is_whitespace() => return None,
            _ => j += 1,
        }
    }
    None
}

/// Joins token surfaces with single spaces.
pub fn join_tokens(tokens: &[Token]) -> String {
    let mut s = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        s.push_str(t.surface());
    }
    s
}
