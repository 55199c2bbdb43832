//! Straightforward reference implementations, written without reference to
//! the library's algorithms.

use std::collections::{HashMap, HashSet};

use bahnaric_mt::corpus::{Gloss, Token, TokenKind};
use bahnaric_mt::{BilingualDictionary, FrequencyLexicon, TieBreak};

/// Count a merge of `block` is worth, if it may be merged at all.
fn block_count(block: &[Token], lexicon: &FrequencyLexicon, dictionary: &BilingualDictionary) -> Option<u64> {
    let key = block.iter().map(|t| t.surface().to_lowercase()).collect::<Vec<_>>().join(" ");
    let all_words = block.iter().all(|t| t.kind() == TokenKind::Word);
    if block.len() <= lexicon.max_ngram && all_words {
        if let Some(&c) = lexicon.entries.get(&key) {
            return Some(c);
        }
    }
    if dictionary.contains_key(&key) {
        return Some(lexicon.min_count);
    }
    None
}

/// Enumerates every split of `tokens` into consecutive blocks and returns
/// the unit lengths of the winner. The objective `Σ ln(count)` is compared
/// as the exact integer product of counts; ties go to fewer units, then to
/// the lexicographically largest length sequence.
pub fn segment_brute_force(
    tokens: &[Token],
    lexicon: &FrequencyLexicon,
    dictionary: &BilingualDictionary,
) -> Vec<usize> {
    let n = tokens.len();
    if n == 0 {
        return Vec::new();
    }
    let mut best: Option<(u128, usize, Vec<usize>)> = None;
    for mask in 0u32..(1 << (n - 1)) {
        let mut lens = Vec::new();
        let mut start = 0;
        for k in 0..n {
            if k == n - 1 || mask & (1 << k) != 0 {
                lens.push(k + 1 - start);
                start = k + 1;
            }
        }
        let mut product = 1u128;
        let mut pos = 0;
        let mut valid = true;
        for &len in &lens {
            if len >= 2 {
                match block_count(&tokens[pos..pos + len], lexicon, dictionary) {
                    Some(c) => product *= c as u128,
                    None => {
                        valid = false;
                        break;
                    }
                }
            }
            pos += len;
        }
        if !valid {
            continue;
        }
        let better = match &best {
            None => true,
            Some((bp, bu, bl)) => {
                product > *bp || (product == *bp && (lens.len() < *bu || (lens.len() == *bu && lens > *bl)))
            }
        };
        if better {
            best = Some((product, lens.len(), lens));
        }
    }
    best.expect("the all-singletons split is always valid").2
}

/// Scores in sixtieths (60 = lcm(1..=5)), so they are exact integers for
/// windows up to 5.
pub fn disambiguate_brute_force(
    candidates: &[Gloss],
    context: &[(String, usize)],
    neighbors: &HashMap<String, HashSet<String>>,
    window: usize,
    tie_break: TieBreak,
) -> (usize, Vec<u64>) {
    assert!(window <= 5);
    let scores: Vec<u64> = candidates
        .iter()
        .map(|g| {
            let head = g.text.split_whitespace().next().unwrap_or("").to_lowercase();
            let set = neighbors.get(&head);
            context
                .iter()
                .filter(|(_, d)| *d >= 1 && *d <= window)
                .filter(|(w, _)| set.is_some_and(|s| s.contains(&w.to_lowercase())))
                .map(|(_, d)| 60 / *d as u64)
                .sum()
        })
        .collect();
    let key = |i: usize| {
        let freq = match tie_break {
            TieBreak::GlossFrequency => candidates[i].freq.unwrap_or(0),
            TieBreak::DictionaryOrder => 0,
        };
        (scores[i], freq, std::cmp::Reverse(i))
    };
    let chosen = (0..candidates.len()).max_by_key(|&i| key(i)).expect("non-empty");
    (chosen, scores)
}

/// BLEU-4 from first principles: n-gram occurrences are counted by scanning
/// every window of both sentences.
pub fn bleu_brute_force(hyps: &[Vec<String>], refs: &[Vec<String>]) -> f64 {
    let mut matched = [0u64; 4];
    let mut total = [0u64; 4];
    let (mut c, mut r) = (0usize, 0usize);
    for (h, rf) in hyps.iter().zip(refs) {
        c += h.len();
        r += rf.len();
        for n in 1..=4 {
            if h.len() < n {
                continue;
            }
            total[n - 1] += (h.len() - n + 1) as u64;
            let mut seen: Vec<&[String]> = Vec::new();
            for i in 0..=h.len() - n {
                let gram = &h[i..i + n];
                if seen.contains(&gram) {
                    continue;
                }
                seen.push(gram);
                let in_hyp = (0..=h.len() - n).filter(|&j| &h[j..j + n] == gram).count();
                let in_ref = if rf.len() >= n {
                    (0..=rf.len() - n).filter(|&j| &rf[j..j + n] == gram).count()
                } else {
                    0
                };
                matched[n - 1] += in_hyp.min(in_ref) as u64;
            }
        }
    }
    if (0..4).any(|n| total[n] == 0 || matched[n] == 0) {
        return 0.0;
    }
    let bp = if c > r { 1.0 } else { (1.0 - r as f64 / c as f64).exp() };
    let mut product = 1.0f64;
    for n in 0..4 {
        product *= matched[n] as f64 / total[n] as f64;
    }
    100.0 * bp * product.powf(0.25)
}

/// Multiset of token surfaces.
pub fn multiset<'a>(tokens: impl IntoIterator<Item = &'a Token>) -> HashMap<String, usize> {
    let mut m = HashMap::new();
    for t in tokens {
        *m.entry(t.surface().to_string()).or_default() += 1;
    }
    m
}
