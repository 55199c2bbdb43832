//! One function per acceptance criterion. Each returns an [`Outcome`]
//! instead of panicking so the acceptance target can report all of them.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, BufReader};
use std::process::{Child, Command, Stdio};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::IndexedRandom;
use rand::Rng;

use bahnaric_mt::augmenter::{
    apply_replace, apply_reverse, apply_source_copy, apply_swap, apply_token_mask, augment_dataset,
    sentence_boundary_augment,
};
use bahnaric_mt::corpus::tokenize;
use bahnaric_mt::disambiguator::{build_cooccurrence_index, disambiguate, ContextWord};
use bahnaric_mt::evaluator::corpus_bleu;
use bahnaric_mt::pipeline::translate_sentence;
use bahnaric_mt::rng::seeded;
use bahnaric_mt::segmenter::{build_frequency_lexicon, segment_sentence, segment_text};
use bahnaric_mt::{
    AugmentConfig, AugmentationTask, BackendEndpoint, BackendError, BilingualDictionary, CooccurrenceIndex,
    CorpusFormat, DisambiguationConfig, FrequencyLexicon, Gloss, MockBackend, ParallelCorpus, RemoteBackend,
    SentencePair, TieBreak, Token, TranslationBackend, TranslationResources,
};

use super::oracles::{bleu_brute_force, disambiguate_brute_force, multiset, segment_brute_force};
use super::{demo_dir, fuzz_sentence, literal_sentence, random_pair, seg_instance, tok, toy_dictionary};

#[derive(Debug, Clone)]
pub struct Outcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    fn new(name: &'static str, failures: &[String], summary: String) -> Outcome {
        let passed = failures.is_empty();
        let detail = if passed {
            summary
        } else {
            let shown: Vec<&str> = failures.iter().take(3).map(String::as_str).collect();
            format!("{summary}; {} failure(s), e.g. {}", failures.len(), shown.join(" | "))
        };
        Outcome { name, passed, detail }
    }

    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

pub fn segmentation_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = seeded(11);
    let mut failures = Vec::new();
    let mut merged = 0;
    for case in 0..1000 {
        let inst = seg_instance(&mut rng);
        let got: Vec<usize> = segment_sentence(&inst.tokens, &inst.lexicon, &inst.dictionary)
            .iter()
            .map(|u| u.tokens.len())
            .collect();
        let want = segment_brute_force(&inst.tokens, &inst.lexicon, &inst.dictionary);
        if want.iter().any(|&l| l > 1) {
            merged += 1;
        }
        if got != want {
            let text: Vec<&str> = inst.tokens.iter().map(Token::surface).collect();
            failures.push(format!("case {case} {text:?}: got {got:?}, want {want:?}"));
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(10) {
        failures.push(format!("took {elapsed:?}"));
    }
    if merged < 100 {
        failures.push(format!("only {merged} instances exercised a merge"));
    }
    Outcome::new(
        "segmentation oracle",
        &failures,
        format!("1000/1000 agree with brute force ({merged} with merges) in {:.2?}", elapsed),
    )
}

pub fn reconstruction() -> Outcome {
    let mut rng = seeded(12);
    let sentences: Vec<String> = (0..5000).map(|_| fuzz_sentence(&mut rng)).collect();
    let tokenized: Vec<Vec<Token>> = sentences.iter().map(|s| tokenize(s)).collect();
    let lexicon = build_frequency_lexicon(&tokenized, 3, 2).expect("lexicon");
    let dictionary = BilingualDictionary::from_entries([
        ("hên", vec!["tôi"]),
        ("đak", vec!["nước"]),
        ("tơ drong", vec!["công việc"]),
        ("12 , kon", vec!["mười hai con"]),
    ])
    .expect("dictionary");
    let mut failures = Vec::new();
    for (s, tokens) in sentences.iter().zip(&tokenized) {
        let (_, segments) = segment_text(s, &lexicon, &dictionary);
        let flat: Vec<Token> = segments.iter().flat_map(|seg| seg.tokens()).collect();
        if &flat != tokens {
            failures.push(format!("{s:?}"));
        }
    }
    Outcome::new(
        "reconstruction",
        &failures,
        format!("{} fuzz sentences, lexicon of {} keys, 0 violations", sentences.len(), lexicon.len()),
    )
}

fn demo_dictionary() -> Arc<BilingualDictionary> {
    Arc::new(BilingualDictionary::load(&demo_dir().join("dict.json")).expect("demo dictionary"))
}

fn plain_resources(dictionary: Arc<BilingualDictionary>) -> TranslationResources {
    TranslationResources::new(
        dictionary,
        FrequencyLexicon::default(),
        CooccurrenceIndex::empty(5),
        DisambiguationConfig::default(),
    )
    .expect("resources")
}

pub fn literal_passthrough() -> Outcome {
    let dictionary = demo_dictionary();
    let resources = plain_resources(dictionary.clone());
    let backends: [(&str, Box<dyn TranslationBackend>); 2] = [
        ("identity", Box::new(MockBackend::identity())),
        ("gloss", Box::new(MockBackend::gloss(dictionary))),
    ];
    let mut rng = seeded(13);
    let sentences: Vec<String> = (0..5000).map(|_| literal_sentence(&mut rng)).collect();
    let mut failures = Vec::new();
    for s in &sentences {
        for (name, backend) in &backends {
            match translate_sentence(s, &resources, backend.as_ref()) {
                Ok((out, _)) if &out == s => {}
                Ok((out, _)) => failures.push(format!("{name}: {s:?} -> {out:?}")),
                Err(e) => failures.push(format!("{name}: {s:?}: {e}")),
            }
        }
    }
    Outcome::new(
        "literal passthrough",
        &failures,
        format!("{} sentences x 2 mock backends, 0 violations", sentences.len()),
    )
}

const HEADS: [&str; 8] = ["x0", "x1", "x2", "x3", "x4", "x5", "x6", "x7"];

struct DisambInstance {
    candidates: Vec<Gloss>,
    context: Vec<(String, usize)>,
    neighbors: HashMap<String, HashSet<String>>,
    index: CooccurrenceIndex,
    window: usize,
    tie_break: TieBreak,
}

fn disamb_instance(rng: &mut bahnaric_mt::rng::StreamRng) -> DisambInstance {
    let mut index = CooccurrenceIndex::empty(5);
    let mut neighbors: HashMap<String, HashSet<String>> = HashMap::new();
    for (i, a) in HEADS.iter().enumerate() {
        for b in &HEADS[i + 1..] {
            if rng.random_bool(0.35) {
                let c = rng.random_range(1..=9);
                index.neighbors.entry(a.to_string()).or_default().insert(b.to_string(), c);
                index.neighbors.entry(b.to_string()).or_default().insert(a.to_string(), c);
                neighbors.entry(a.to_string()).or_default().insert(b.to_string());
                neighbors.entry(b.to_string()).or_default().insert(a.to_string());
            }
        }
    }
    let n = rng.random_range(1..=5);
    let candidates = (0..n)
        .map(|_| {
            let head = HEADS.choose(rng).unwrap();
            let text = if rng.random_bool(0.3) { format!("{head} y") } else { head.to_string() };
            match rng.random_range(0..4) {
                0 => Gloss::new(text),
                f => Gloss::with_freq(text, f),
            }
        })
        .collect();
    let context = (0..rng.random_range(0..=6))
        .map(|_| (HEADS.choose(rng).unwrap().to_string(), rng.random_range(1..=7)))
        .collect();
    let tie_break = if rng.random_bool(0.5) { TieBreak::GlossFrequency } else { TieBreak::DictionaryOrder };
    DisambInstance { candidates, context, neighbors, index, window: rng.random_range(1..=5), tie_break }
}

fn run_disambiguate(inst: &DisambInstance, index: &CooccurrenceIndex) -> (usize, Vec<bahnaric_mt::disambiguator::Score>) {
    let context: Vec<ContextWord> = inst.context.iter().map(|(w, d)| ContextWord::new(w.clone(), *d)).collect();
    let config = DisambiguationConfig::new(inst.window, inst.tie_break).expect("config");
    let d = disambiguate(&inst.candidates, &context, index, &config).expect("non-empty candidates");
    (d.chosen, d.scores)
}

pub fn disambiguation_oracle() -> Outcome {
    let mut rng = seeded(14);
    let mut failures = Vec::new();
    let mut contested = 0;
    for case in 0..1000 {
        let inst = disamb_instance(&mut rng);
        let (want, want_scores) =
            disambiguate_brute_force(&inst.candidates, &inst.context, &inst.neighbors, inst.window, inst.tie_break);
        let (got, got_scores) = run_disambiguate(&inst, &inst.index);
        if got != want {
            failures.push(format!("case {case}: chose {got}, want {want}"));
        }
        if inst.candidates.len() > 1 {
            contested += 1;
            let sixtieths: Vec<Option<u64>> = got_scores
                .iter()
                .map(|s| {
                    let x = s * 60u128;
                    x.is_integer().then(|| x.to_integer() as u64)
                })
                .collect();
            let want: Vec<Option<u64>> = want_scores.into_iter().map(Some).collect();
            if sixtieths != want {
                failures.push(format!("case {case}: scores {sixtieths:?}, want {want:?}"));
            }
        }
    }
    for trial in 0..100 {
        let inst = disamb_instance(&mut rng);
        let base = run_disambiguate(&inst, &inst.index).0;
        let k = rng.random_range(2..=1000);
        let scaled = run_disambiguate(&inst, &inst.index.scaled(k)).0;
        if base != scaled {
            failures.push(format!("scaling trial {trial} (x{k}): {base} -> {scaled}"));
        }
    }
    Outcome::new(
        "disambiguation oracle",
        &failures,
        format!("1000 instances ({contested} with several candidates) exact, 100 scaling trials invariant"),
    )
}

fn count_diff(a: &[Token], b: &[Token]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

pub fn augmentation_invariants() -> Outcome {
    let dictionary = toy_dictionary();
    let unk = tok("<unk>");
    let mut failures = Vec::new();
    let mut checks = 0usize;
    let mut substitutions = 0usize;
    for alpha in [0.0, 0.25, 0.5, 1.0] {
        for t in 1..=20usize {
            for seed in 0..8u64 {
                let mut rng = seeded(seed * 1000 + t as u64);
                let pair = random_pair(&mut rng, "p", t);
                let other_len = rng.random_range(1..=20);
                let other = random_pair(&mut rng, "q", other_len);
                let tag = format!("alpha={alpha} t={t} seed={seed}");

                let swapped = apply_swap(&pair, alpha, &mut rng);
                if multiset(&swapped.target) != multiset(&pair.target) || swapped.source != pair.source {
                    failures.push(format!("swap {tag}"));
                }

                let masked = apply_token_mask(&pair, alpha, &unk, &mut rng);
                let want = (alpha * t as f64).floor() as usize;
                let hits = masked.target.iter().filter(|x| **x == unk).count();
                if hits != want || count_diff(&masked.target, &pair.target) != want || masked.source != pair.source {
                    failures.push(format!("mask {tag}: {hits} masked, want {want}"));
                }

                if apply_reverse(&apply_reverse(&pair)) != pair {
                    failures.push(format!("reverse {tag}"));
                }

                let copied = apply_source_copy(&pair);
                if copied.target != pair.source || copied.source != pair.source {
                    failures.push(format!("source copy {tag}"));
                }

                let replaced = apply_replace(&pair, alpha, &dictionary, &mut rng);
                let (ds, dt) =
                    (count_diff(&replaced.pair.source, &pair.source), count_diff(&replaced.pair.target, &pair.target));
                if ds != dt
                    || ds != replaced.replaced
                    || replaced.pair.source.len() != pair.source.len()
                    || replaced.pair.target.len() != pair.target.len()
                {
                    failures.push(format!("replace {tag}: {ds} source vs {dt} target changes"));
                }

                substitutions += replaced.replaced;

                let (x, y) = sentence_boundary_augment(&pair, &other, &mut rng);
                let union = |a: &[Token], b: &[Token]| multiset(a.iter().chain(b));
                if union(&x.source, &y.source) != union(&pair.source, &other.source)
                    || union(&x.target, &y.target) != union(&pair.target, &other.target)
                {
                    failures.push(format!("sentence boundary {tag}"));
                }
                checks += 6;
            }
        }
    }
    if substitutions == 0 {
        failures.push("replace never substituted anything".into());
    }
    Outcome::new(
        "augmentation invariants",
        &failures,
        format!("{checks} checks over 4 alphas x t in 1..=20 x 8 seeds ({substitutions} replacements), 0 violations"),
    )
}

fn sized_corpus(n: usize) -> ParallelCorpus {
    let mut rng = seeded(n as u64);
    let pairs: Vec<SentencePair> = (0..n)
        .map(|i| {
            let t = rng.random_range(1..=12);
            random_pair(&mut rng, &format!("p{i}"), t)
        })
        .collect();
    ParallelCorpus::new(format!("n{n}"), pairs).expect("corpus")
}

pub fn dataset_doubling() -> Outcome {
    let dictionary = toy_dictionary();
    let mut task_sets: Vec<Vec<AugmentationTask>> = AugmentationTask::ALL.iter().map(|t| vec![*t]).collect();
    task_sets.push(AugmentationTask::ALL.to_vec());
    let mut failures = Vec::new();
    let mut runs = 0;
    for n in [1usize, 2, 17, 100] {
        let corpus = sized_corpus(n);
        for tasks in &task_sets {
            let config = AugmentConfig { tasks: tasks.clone(), seed: 7, ..AugmentConfig::default() };
            let run = || augment_dataset(&corpus, &config, &dictionary).map(|(c, _)| c.to_string(CorpusFormat::Tsv));
            let label = format!("n={n} tasks={tasks:?}");
            match (run(), run()) {
                (Ok(a), Ok(b)) => {
                    let lines = a.lines().count();
                    if lines != 2 * n {
                        failures.push(format!("{label}: {lines} pairs"));
                    }
                    if a != b {
                        failures.push(format!("{label}: reruns differ"));
                    }
                    let original = corpus.to_string(CorpusFormat::Tsv);
                    if !a.starts_with(&original) {
                        failures.push(format!("{label}: originals not kept first"));
                    }
                }
                (Err(e), _) | (_, Err(e)) => failures.push(format!("{label}: {e}")),
            }
            runs += 1;
        }
    }
    Outcome::new(
        "dataset doubling",
        &failures,
        format!("{runs} runs over sizes 1, 2, 17, 100: exactly 2N pairs, byte-identical reruns"),
    )
}

pub fn bleu_oracle() -> Outcome {
    let mut rng = seeded(17);
    let vocab = ["a", "b", "c", "d"];
    let mut failures = Vec::new();
    let mut nonzero = 0;
    let mut worst = 0.0f64;
    for case in 0..200 {
        let n = rng.random_range(1..=5);
        let words = &vocab[..2 + case % 3];
        let mut refs: Vec<Vec<String>> = Vec::new();
        let mut hyps: Vec<Vec<String>> = Vec::new();
        for _ in 0..n {
            let len = rng.random_range(0..=9);
            let reference: Vec<String> = (0..len).map(|_| words.choose(&mut rng).unwrap().to_string()).collect();
            // Half of the hypotheses are noisy copies so that many corpora
            // have matches at every order.
            let hyp = if rng.random_bool(0.5) {
                let mut h = Vec::new();
                for w in &reference {
                    if rng.random_bool(0.1) {
                        continue;
                    }
                    h.push(if rng.random_bool(0.15) { words.choose(&mut rng).unwrap().to_string() } else { w.clone() });
                }
                if rng.random_bool(0.3) {
                    h.push(words.choose(&mut rng).unwrap().to_string());
                }
                h
            } else {
                let len = rng.random_range(0..=9);
                (0..len).map(|_| words.choose(&mut rng).unwrap().to_string()).collect()
            };
            refs.push(reference);
            hyps.push(hyp);
        }
        let want = bleu_brute_force(&hyps, &refs);
        match corpus_bleu(&hyps, &refs) {
            Ok(r) => {
                let err = (r.score - want).abs();
                worst = worst.max(err);
                if err > 1e-6 {
                    failures.push(format!("case {case}: {} vs {want}", r.score));
                }
            }
            Err(e) => failures.push(format!("case {case}: {e}")),
        }
        if want > 0.0 {
            nonzero += 1;
        }
    }
    if nonzero < 50 {
        failures.push(format!("only {nonzero} corpora had nonzero BLEU"));
    }

    let identity: Vec<Vec<String>> = (0..10)
        .map(|_| (0..rng.random_range(4..=12)).map(|_| vocab.choose(&mut rng).unwrap().to_string()).collect())
        .collect();
    let identity_score = corpus_bleu(&identity, &identity).map(|r| r.score);
    if identity_score.as_ref().ok() != Some(&100.0) {
        failures.push(format!("identity corpus scored {identity_score:?}"));
    }

    let h = vec!["a b c d e".split(' ').collect::<Vec<_>>()];
    let r = vec!["a b c d f".split(' ').collect::<Vec<_>>()];
    let single = corpus_bleu(&h, &r).map(|r| r.score).unwrap_or(f64::NAN);
    if (single - 66.87).abs() > 0.01 {
        failures.push(format!("single pair scored {single}"));
    }
    Outcome::new(
        "BLEU oracle",
        &failures,
        format!(
            "200 corpora ({nonzero} nonzero) within {worst:.1e}; identity = 100; single pair = {single:.4}"
        ),
    )
}

/// A `serve-mock` child process, killed on drop.
pub struct MockServer {
    child: Child,
    pub base_url: String,
}

impl MockServer {
    pub fn start(extra: &[&str]) -> MockServer {
        let dict = demo_dir().join("dict.json");
        let mut child = Command::new(env!("CARGO_BIN_EXE_bahnaric-mt"))
            .args(["serve-mock", "--port", "0", "--mode", "gloss", "--dict"])
            .arg(&dict)
            .args(extra)
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .expect("spawn serve-mock");
        let mut line = String::new();
        BufReader::new(child.stdout.take().expect("stdout")).read_line(&mut line).expect("read banner");
        let base_url = line
            .trim()
            .strip_prefix("listening on ")
            .unwrap_or_else(|| panic!("unexpected banner {line:?}"))
            .to_string();
        MockServer { child, base_url }
    }

    pub fn backend(&self, max_batch: usize, retries: u32) -> RemoteBackend {
        RemoteBackend::new(BackendEndpoint {
            max_batch,
            retries,
            timeout: Duration::from_secs(10),
            backoff: Duration::from_millis(10),
            ..BackendEndpoint::new(self.base_url.clone())
        })
        .expect("endpoint")
    }
}

impl Drop for MockServer {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

pub fn wire_protocol() -> Outcome {
    let start = Instant::now();
    let dictionary = demo_dictionary();
    let words: Vec<&str> = dictionary.iter().map(|(h, _)| h).collect();
    let chunks: Vec<String> = (0..1000)
        .map(|i| format!("{} w{i} {}", words[i % words.len()], words[(i * 7 + 3) % words.len()]))
        .collect();
    let expected = MockBackend::gloss(dictionary).translate_chunks(&chunks).expect("in-process mock");

    let mut failures = Vec::new();
    let server = MockServer::start(&[]);
    for batch in [1usize, 2, 7, 64] {
        match server.backend(batch, 0).translate_chunks(&chunks) {
            Ok(got) if got == expected => {}
            Ok(got) => {
                let first = got.iter().zip(&expected).position(|(a, b)| a != b);
                failures.push(format!("batch {batch}: {} results, first mismatch at {first:?}", got.len()));
            }
            Err(e) => failures.push(format!("batch {batch}: {e}")),
        }
    }
    drop(server);

    let faulty = MockServer::start(&["--fault", "drop-last"]);
    match faulty.backend(16, 3).translate_chunks(&chunks[..5]) {
        Err(BackendError::Protocol { batch: 0, .. }) => {}
        other => failures.push(format!("length mismatch mapped to {other:?}")),
    }
    drop(faulty);

    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(30) {
        failures.push(format!("took {elapsed:?}"));
    }
    Outcome::new(
        "wire protocol",
        &failures,
        format!("1000 chunks at batch sizes 1, 2, 7, 64 in order; short response -> Protocol; {elapsed:.2?}"),
    )
}

pub fn demo_resources() -> (TranslationResources, Arc<BilingualDictionary>) {
    let dir = demo_dir();
    let dictionary = demo_dictionary();
    let corpus = ParallelCorpus::load(&dir.join("corpus.tsv"), CorpusFormat::Tsv).expect("demo corpus");
    let lexicon = build_frequency_lexicon(&corpus.sources(), 3, 2).expect("lexicon");
    let index = build_cooccurrence_index(&corpus.targets(), 5).expect("index");
    let resources =
        TranslationResources::new(dictionary.clone(), lexicon, index, DisambiguationConfig::default())
            .expect("resources");
    (resources, dictionary)
}

pub fn end_to_end_demo() -> Outcome {
    let dir = demo_dir();
    let (resources, dictionary) = demo_resources();
    let backend = MockBackend::gloss(dictionary.clone());
    let sentences = std::fs::read_to_string(dir.join("sentences.txt")).expect("sentences");
    let expected = std::fs::read_to_string(dir.join("expected.txt")).expect("expected");
    let corpus_len = ParallelCorpus::load(&dir.join("corpus.tsv"), CorpusFormat::Tsv).map(|c| c.len()).unwrap_or(0);
    let mut failures = Vec::new();
    if dictionary.len() != 20 {
        failures.push(format!("dictionary has {} entries", dictionary.len()));
    }
    if corpus_len != 30 {
        failures.push(format!("corpus has {corpus_len} pairs"));
    }
    let inputs: Vec<&str> = sentences.lines().collect();
    let wants: Vec<&str> = expected.lines().collect();
    if inputs.len() != 10 || wants.len() != 10 {
        failures.push(format!("{} sentences, {} expectations", inputs.len(), wants.len()));
    }
    for (s, want) in inputs.iter().zip(&wants) {
        match translate_sentence(s, &resources, &backend) {
            Ok((got, _)) if got == *want => {}
            Ok((got, _)) => failures.push(format!("{s:?} -> {got:?}, want {want:?}")),
            Err(e) => failures.push(format!("{s:?}: {e}")),
        }
    }
    Outcome::new(
        "end-to-end demo",
        &failures,
        format!("{} sentences match the hand-derived outputs", inputs.len()),
    )
}

pub fn all() -> Vec<Outcome> {
    vec![
        segmentation_oracle(),
        reconstruction(),
        literal_passthrough(),
        disambiguation_oracle(),
        augmentation_invariants(),
        dataset_doubling(),
        bleu_oracle(),
        wire_protocol(),
        end_to_end_demo(),
    ]
}
