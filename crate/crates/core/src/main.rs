use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use bahnaric_mt::augmenter::{self, augment_dataset, AugmentConfig, AugmentationTask};
use bahnaric_mt::corpus::{partition_fraction, split_dataset, tokenize, CorpusFormat, ParallelCorpus, SplitSpec, Token};
use bahnaric_mt::disambiguator::{build_cooccurrence_index, CooccurrenceIndex, DisambiguationConfig, TieBreak};
use bahnaric_mt::evaluator::{corpus_bleu, tokenize_lines};
use bahnaric_mt::pipeline::server::{self, Fault, ServerOptions};
use bahnaric_mt::pipeline::{
    translate_corpus, BackendEndpoint, MockBackend, MockMode, RemoteBackend, TranslateError, TranslationBackend,
    TranslationResources,
};
use bahnaric_mt::segmenter::{build_frequency_lexicon, segment_text, FrequencyLexicon};
use bahnaric_mt::BilingualDictionary;

const USAGE: u8 = 1;
const DATA: u8 = 2;
const BACKEND: u8 = 3;

/// Bahnaric to Vietnamese chunked translation toolkit.
#[derive(Parser, Debug)]
#[command(name = "bahnaric-mt", version, term_width = 100)]
struct Cli {
    /// Worker threads [default: number of CPUs]
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// More logging on stderr (-v info, -vv debug, -vvv trace)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Shuffle a parallel corpus and cut it into train/valid/test files
    Split(SplitArgs),
    /// Count frequent adjacent word groups into a lexicon JSON file
    BuildLexicon(LexiconArgs),
    /// Build a target-side co-occurrence index (JSON, or TSV for a .tsv output)
    BuildCooc(CoocArgs),
    /// Segment sentences into anchors, chunks and literals (JSONL output)
    Segment(SegmentArgs),
    /// Append one synthetic pair per original pair
    Augment(AugmentArgs),
    /// Translate sentences through the dictionary and a chunk backend
    Translate(TranslateArgs),
    /// Corpus BLEU-4 of hypotheses against references (JSON output)
    Evaluate(EvaluateArgs),
    /// Run a chunk translation server backed by a mock backend
    ServeMock(ServeArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum CorpusFmt {
    Tsv,
    Jsonl,
}

impl From<CorpusFmt> for CorpusFormat {
    fn from(f: CorpusFmt) -> Self {
        match f {
            CorpusFmt::Tsv => CorpusFormat::Tsv,
            CorpusFmt::Jsonl => CorpusFormat::Jsonl,
        }
    }
}

/// Text inputs: plain lines, or a parallel corpus read from one side.
#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum TextFmt {
    Text,
    Tsv,
    Jsonl,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Side {
    Source,
    Target,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SentenceFmt {
    Text,
    Jsonl,
}

#[derive(Args, Debug)]
struct SplitArgs {
    /// Parallel corpus (TSV or JSONL)
    #[arg(long)]
    input: PathBuf,
    /// Corpus format [default: from the file extension]
    #[arg(long, value_enum)]
    format: Option<CorpusFmt>,
    /// Directory for train/valid/test files
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 0.8)]
    train: f64,
    #[arg(long, default_value_t = 0.1)]
    valid: f64,
    #[arg(long, default_value_t = 0.1)]
    test: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also split train into train.chunked (this share) and train.full
    #[arg(long, value_name = "F")]
    chunk_fraction: Option<f64>,
}

#[derive(Args, Debug)]
struct TextInput {
    /// Input file, or - for stdin
    #[arg(long, default_value = "-")]
    input: PathBuf,
    /// Input format [default: tsv/jsonl by extension, else text]
    #[arg(long, value_enum)]
    format: Option<TextFmt>,
}

#[derive(Args, Debug)]
struct LexiconArgs {
    #[command(flatten)]
    input: TextInput,
    /// Corpus side to count
    #[arg(long, value_enum, default_value_t = Side::Source)]
    side: Side,
    /// Output file [default: stdout]
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = bahnaric_mt::segmenter::DEFAULT_MAX_NGRAM)]
    max_ngram: usize,
    #[arg(long, default_value_t = bahnaric_mt::segmenter::DEFAULT_MIN_COUNT)]
    min_count: u64,
}

#[derive(Args, Debug)]
struct CoocArgs {
    #[command(flatten)]
    input: TextInput,
    /// Corpus side to count
    #[arg(long, value_enum, default_value_t = Side::Target)]
    side: Side,
    /// Output file; .tsv writes TSV [default: JSON on stdout]
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = bahnaric_mt::disambiguator::DEFAULT_WINDOW)]
    window: usize,
}

#[derive(Args, Debug)]
struct ResourceArgs {
    /// Bilingual dictionary JSON
    #[arg(long)]
    dict: PathBuf,
    /// Frequency lexicon JSON [default: empty]
    #[arg(long)]
    lexicon: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SegmentArgs {
    /// Sentences, or - for stdin
    #[arg(long, default_value = "-")]
    input: PathBuf,
    /// Text: one sentence per line. JSONL: objects with "text" or "src"
    #[arg(long, value_enum, default_value_t = SentenceFmt::Text)]
    format: SentenceFmt,
    #[command(flatten)]
    resources: ResourceArgs,
    /// Output file [default: stdout]
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AugmentArgs {
    /// Parallel corpus (TSV or JSONL)
    #[arg(long)]
    input: PathBuf,
    /// Corpus format for input and output [default: from the input extension]
    #[arg(long, value_enum)]
    format: Option<CorpusFmt>,
    /// Output file [default: stdout]
    #[arg(long)]
    output: Option<PathBuf>,
    /// Share of target words each transform touches
    #[arg(long, default_value_t = augmenter::DEFAULT_ALPHA)]
    alpha: f64,
    /// Comma-separated: swap, token, source, reverse, replace, sentence-boundary
    #[arg(long, default_value = "swap")]
    tasks: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bilingual dictionary JSON (required by replace)
    #[arg(long)]
    dict: Option<PathBuf>,
    /// Mask symbol for the token task
    #[arg(long, default_value = augmenter::DEFAULT_UNK)]
    unk: String,
    /// Do not prefix synthetic sources with a <task:NAME> marker
    #[arg(long)]
    no_tag: bool,
}

#[derive(Args, Debug)]
struct TranslateArgs {
    /// Sentences, or - for stdin
    #[arg(long, default_value = "-")]
    input: PathBuf,
    /// Text: one sentence per line. JSONL: objects with "text" or "src"
    #[arg(long, value_enum, default_value_t = SentenceFmt::Text)]
    format: SentenceFmt,
    #[command(flatten)]
    resources: ResourceArgs,
    /// Co-occurrence index (JSON or .tsv) [default: empty]
    #[arg(long)]
    cooc: Option<PathBuf>,
    /// Disambiguation window in word units
    #[arg(long, default_value_t = bahnaric_mt::disambiguator::DEFAULT_WINDOW)]
    window: usize,
    /// gloss-frequency or dictionary-order
    #[arg(long, default_value = "gloss-frequency")]
    tie_break: TieBreak,
    /// mock:identity, mock:gloss or remote
    #[arg(long, default_value = "mock:identity")]
    backend: String,
    /// Server base URL for the remote backend; BACKEND_URL overrides it
    #[arg(long)]
    endpoint: Option<String>,
    /// Chunks per request
    #[arg(long, default_value_t = bahnaric_mt::pipeline::DEFAULT_MAX_BATCH)]
    batch: usize,
    #[arg(long, default_value_t = bahnaric_mt::pipeline::DEFAULT_TIMEOUT_MS)]
    timeout_ms: u64,
    /// Retries per failed batch
    #[arg(long, default_value_t = bahnaric_mt::pipeline::DEFAULT_RETRIES)]
    retries: u32,
    /// Write per-segment trace records here (JSONL)
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Output file [default: stdout]
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    /// Hypotheses
    #[arg(long)]
    hyp: PathBuf,
    /// References, line-aligned with the hypotheses
    #[arg(long = "ref")]
    reference: PathBuf,
    /// Format of both files [default: tsv/jsonl by extension, else text]
    #[arg(long, value_enum)]
    format: Option<TextFmt>,
    /// Side to score when a file is a parallel corpus
    #[arg(long, value_enum, default_value_t = Side::Target)]
    side: Side,
}

#[derive(Args, Debug)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    /// 0 picks a free port
    #[arg(long, default_value_t = 8000)]
    port: u16,
    /// identity or gloss
    #[arg(long, default_value = "identity")]
    mode: MockMode,
    /// Bilingual dictionary JSON (required by gloss)
    #[arg(long)]
    dict: Option<PathBuf>,
    /// Misbehave on purpose: drop-last, status:N or fail-first:N
    #[arg(long)]
    fault: Option<Fault>,
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

trait Classify<T> {
    fn usage(self) -> Result<T, Failure>;
    fn data(self) -> Result<T, Failure>;
    fn backend(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn usage(self) -> Result<T, Failure> {
        self.map_err(|e| Failure { code: USAGE, error: e.into() })
    }
    fn data(self) -> Result<T, Failure> {
        self.map_err(|e| Failure { code: DATA, error: e.into() })
    }
    fn backend(self) -> Result<T, Failure> {
        self.map_err(|e| Failure { code: BACKEND, error: e.into() })
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(USAGE),
            };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> CliResult {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(anyhow!("--jobs must be at least 1")).usage();
        }
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().usage()?;
    }
    match cli.command {
        Command::Split(a) => split(a),
        Command::BuildLexicon(a) => build_lexicon(a),
        Command::BuildCooc(a) => build_cooc(a),
        Command::Segment(a) => segment(a),
        Command::Augment(a) => augment(a),
        Command::Translate(a) => translate(a),
        Command::Evaluate(a) => evaluate(a),
        Command::ServeMock(a) => serve_mock(a),
    }
}

fn is_stdio(path: &Path) -> bool {
    path.as_os_str() == "-"
}

fn read_input(path: &Path) -> CliResult<String> {
    let mut text = String::new();
    if is_stdio(path) {
        io::stdin().read_to_string(&mut text).context("reading stdin").data()?;
    } else {
        File::open(path)
            .and_then(|mut f| f.read_to_string(&mut text))
            .with_context(|| format!("reading {}", path.display()))
            .data()?;
    }
    Ok(text)
}

fn open_output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) if !is_stdio(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display())).data()?,
        )),
        _ => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn finish(mut out: Box<dyn Write>) -> CliResult {
    out.flush().context("writing output").data()
}

fn corpus_format(path: &Path, explicit: Option<CorpusFmt>) -> CorpusFormat {
    explicit.map(Into::into).unwrap_or_else(|| CorpusFormat::from_path(path))
}

fn text_format(path: &Path, explicit: Option<TextFmt>) -> TextFmt {
    explicit.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some("tsv") => TextFmt::Tsv,
        Some("jsonl") => TextFmt::Jsonl,
        _ => TextFmt::Text,
    })
}

fn load_corpus(path: &Path, format: CorpusFormat) -> CliResult<ParallelCorpus> {
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("corpus");
    let text = read_input(path)?;
    ParallelCorpus::parse(name, &text, format)
        .with_context(|| format!("parsing {}", path.display()))
        .data()
}

/// Tokenized sentences from plain text lines or one side of a corpus.
fn load_side(path: &Path, format: TextFmt, side: Side) -> CliResult<Vec<Vec<Token>>> {
    let corpus_fmt = match format {
        TextFmt::Text => return Ok(read_input(path)?.lines().map(tokenize).collect()),
        TextFmt::Tsv => CorpusFormat::Tsv,
        TextFmt::Jsonl => CorpusFormat::Jsonl,
    };
    let corpus = load_corpus(path, corpus_fmt)?;
    Ok(match side {
        Side::Source => corpus.sources(),
        Side::Target => corpus.targets(),
    })
}

fn load_dictionary(path: &Path) -> CliResult<BilingualDictionary> {
    BilingualDictionary::load(path)
        .with_context(|| format!("loading dictionary {}", path.display()))
        .data()
}

fn load_lexicon(path: Option<&Path>) -> CliResult<FrequencyLexicon> {
    match path {
        Some(p) => FrequencyLexicon::load(p).with_context(|| format!("loading lexicon {}", p.display())).data(),
        None => Ok(FrequencyLexicon::default()),
    }
}

/// `(id, text)` per sentence. Text input keeps empty lines so output stays
/// line-aligned.
fn read_sentences(path: &Path, format: SentenceFmt) -> CliResult<Vec<(serde_json::Value, String)>> {
    let text = read_input(path)?;
    match format {
        SentenceFmt::Text => Ok(text.lines().enumerate().map(|(i, l)| (json!(i + 1), l.to_string())).collect()),
        SentenceFmt::Jsonl => {
            let mut out = Vec::new();
            for (i, line) in text.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                let v: serde_json::Value = serde_json::from_str(line)
                    .with_context(|| format!("{}: line {}", path.display(), i + 1))
                    .data()?;
                let sentence = v
                    .get("text")
                    .or_else(|| v.get("src"))
                    .and_then(|s| s.as_str())
                    .ok_or_else(|| anyhow!("{}: line {}: no \"text\" or \"src\" string", path.display(), i + 1))
                    .data()?;
                let id = v.get("id").cloned().unwrap_or_else(|| json!(i + 1));
                out.push((id, sentence.to_string()));
            }
            Ok(out)
        }
    }
}

fn write_line(out: &mut dyn Write, line: &str) -> CliResult {
    writeln!(out, "{line}").context("writing output").data()
}

fn split(a: SplitArgs) -> CliResult {
    let format = corpus_format(&a.input, a.format);
    let spec = SplitSpec::new(a.train, a.valid, a.test, a.seed).usage()?;
    if let Some(f) = a.chunk_fraction {
        if !(0.0..=1.0).contains(&f) {
            return Err(anyhow!("--chunk-fraction {f} outside [0, 1]")).usage();
        }
    }
    let corpus = load_corpus(&a.input, format)?;
    let (train, valid, test) = split_dataset(&corpus, &spec).data()?;
    std::fs::create_dir_all(&a.out_dir)
        .with_context(|| format!("creating {}", a.out_dir.display()))
        .data()?;
    let ext = match format {
        CorpusFormat::Tsv => "tsv",
        CorpusFormat::Jsonl => "jsonl",
    };
    let mut parts = vec![("train", train), ("valid", valid), ("test", test)];
    if let Some(f) = a.chunk_fraction {
        let (chunked, full) = partition_fraction(&parts[0].1, f, a.seed).data()?;
        parts.push(("train.chunked", chunked));
        parts.push(("train.full", full));
    }
    let mut summary = serde_json::Map::new();
    for (name, part) in &parts {
        let path = a.out_dir.join(format!("{name}.{ext}"));
        part.save(&path, format).data()?;
        summary.insert(name.to_string(), json!(part.len()));
    }
    println!("{}", serde_json::Value::Object(summary));
    Ok(())
}

fn build_lexicon(a: LexiconArgs) -> CliResult {
    let format = text_format(&a.input.input, a.input.format);
    FrequencyLexicon::empty(a.max_ngram, a.min_count).usage()?;
    let sentences = load_side(&a.input.input, format, a.side)?;
    let lexicon = build_frequency_lexicon(&sentences, a.max_ngram, a.min_count).usage()?;
    log::info!("{} lexicon entries from {} sentences", lexicon.len(), sentences.len());
    let mut out = open_output(a.output.as_deref())?;
    write_line(&mut out, &lexicon.to_json())?;
    finish(out)
}

fn build_cooc(a: CoocArgs) -> CliResult {
    let format = text_format(&a.input.input, a.input.format);
    DisambiguationConfig::new(a.window, TieBreak::default()).usage()?;
    let sentences = load_side(&a.input.input, format, a.side)?;
    let index = build_cooccurrence_index(&sentences, a.window).usage()?;
    log::info!("{} indexed words from {} sentences", index.len(), sentences.len());
    let tsv = a.output.as_deref().is_some_and(|p| p.extension().is_some_and(|e| e == "tsv"));
    let mut out = open_output(a.output.as_deref())?;
    if tsv {
        index.write_tsv(&mut out).context("writing index").data()?;
    } else {
        write_line(&mut out, &index.to_json())?;
    }
    finish(out)
}

fn segment(a: SegmentArgs) -> CliResult {
    let dictionary = load_dictionary(&a.resources.dict)?;
    let lexicon = load_lexicon(a.resources.lexicon.as_deref())?;
    let sentences = read_sentences(&a.input, a.format)?;
    let mut out = open_output(a.output.as_deref())?;
    for (id, text) in sentences {
        let (seg, segments) = segment_text(&text, &lexicon, &dictionary);
        let line = json!({ "id": id, "text": text, "score": seg.score, "segments": segments });
        write_line(&mut out, &line.to_string())?;
    }
    finish(out)
}

fn augment(a: AugmentArgs) -> CliResult {
    let format = corpus_format(&a.input, a.format);
    let tasks = augmenter::parse_tasks(&a.tasks).usage()?;
    let config = AugmentConfig { alpha: a.alpha, tasks, seed: a.seed, unk_symbol: a.unk, tag_synthetic: !a.no_tag };
    config.validate().usage()?;
    let dictionary = match &a.dict {
        Some(p) => load_dictionary(p)?,
        None if config.tasks.contains(&AugmentationTask::Replace) => {
            return Err(anyhow!("the replace task needs --dict")).usage();
        }
        None => BilingualDictionary::new(),
    };
    let corpus = load_corpus(&a.input, format)?;
    let (augmented, stats) = augment_dataset(&corpus, &config, &dictionary).data()?;
    log::info!("augmentation stats: {}", serde_json::to_string(&stats).unwrap_or_default());
    let mut out = open_output(a.output.as_deref())?;
    augmented.write_to(&mut out, format).context("writing corpus").data()?;
    finish(out)
}

fn make_backend(a: &TranslateArgs, dictionary: &Arc<BilingualDictionary>) -> CliResult<Box<dyn TranslationBackend>> {
    match a.backend.as_str() {
        "mock:identity" => Ok(Box::new(MockBackend::identity())),
        "mock:gloss" => Ok(Box::new(MockBackend::gloss(dictionary.clone()))),
        "remote" => {
            let url = std::env::var("BACKEND_URL")
                .ok()
                .filter(|u| !u.is_empty())
                .or_else(|| a.endpoint.clone())
                .ok_or_else(|| anyhow!("the remote backend needs --endpoint or BACKEND_URL"))
                .usage()?;
            let endpoint = BackendEndpoint {
                timeout: Duration::from_millis(a.timeout_ms),
                max_batch: a.batch,
                retries: a.retries,
                ..BackendEndpoint::new(url)
            };
            Ok(Box::new(RemoteBackend::new(endpoint).usage()?))
        }
        other => Err(anyhow!("unknown backend {other:?} (expected mock:identity, mock:gloss or remote)")).usage(),
    }
}

fn translate(a: TranslateArgs) -> CliResult {
    let config = DisambiguationConfig::new(a.window, a.tie_break).usage()?;
    let dictionary = Arc::new(load_dictionary(&a.resources.dict)?);
    let backend = make_backend(&a, &dictionary)?;
    let lexicon = load_lexicon(a.resources.lexicon.as_deref())?;
    let index = match &a.cooc {
        Some(p) => CooccurrenceIndex::load(p).with_context(|| format!("loading index {}", p.display())).data()?,
        None => CooccurrenceIndex::empty(a.window),
    };
    let resources = TranslationResources::new(dictionary, lexicon, index, config).data()?;
    let sentences = read_sentences(&a.input, a.format)?;
    let texts: Vec<String> = sentences.iter().map(|(_, t)| t.clone()).collect();
    let results = translate_corpus(&texts, &resources, backend.as_ref());

    let mut out = open_output(a.output.as_deref())?;
    let mut trace_out = match &a.trace {
        Some(p) => Some(open_output(Some(p))?),
        None => None,
    };
    let mut failures = 0usize;
    for ((id, _), result) in sentences.iter().zip(&results) {
        let (line, trace_line) = match result {
            Ok((translation, trace)) => {
                let line = match a.format {
                    SentenceFmt::Text => translation.clone(),
                    SentenceFmt::Jsonl => json!({ "id": id, "translation": translation }).to_string(),
                };
                (line, json!({ "id": id, "records": trace.records }))
            }
            Err(e @ TranslateError::Backend { partial, .. }) => {
                failures += 1;
                eprintln!("sentence {id}: {e}");
                let line = match a.format {
                    SentenceFmt::Text => String::new(),
                    SentenceFmt::Jsonl => json!({ "id": id, "error": e.to_string() }).to_string(),
                };
                (line, json!({ "id": id, "error": e.to_string(), "records": partial.records }))
            }
        };
        write_line(&mut out, &line)?;
        if let Some(t) = trace_out.as_mut() {
            write_line(t, &trace_line.to_string())?;
        }
    }
    finish(out)?;
    if let Some(t) = trace_out {
        finish(t)?;
    }
    if failures > 0 {
        return Err(anyhow!("{failures} of {} sentences failed", sentences.len())).backend();
    }
    Ok(())
}

fn evaluate_lines(path: &Path, format: TextFmt, side: Side) -> CliResult<Vec<Vec<String>>> {
    match format {
        TextFmt::Text => Ok(tokenize_lines(&read_input(path)?)),
        _ => Ok(load_side(path, format, side)?
            .into_iter()
            .map(|s| s.iter().map(|t| t.surface().to_string()).collect())
            .collect()),
    }
}

fn evaluate(a: EvaluateArgs) -> CliResult {
    let hyp = evaluate_lines(&a.hyp, text_format(&a.hyp, a.format), a.side)?;
    let reference = evaluate_lines(&a.reference, text_format(&a.reference, a.format), a.side)?;
    let report = corpus_bleu(&hyp, &reference).data()?;
    println!("{}", report.to_json());
    Ok(())
}

fn serve_mock(a: ServeArgs) -> CliResult {
    let dictionary = match (&a.dict, a.mode) {
        (Some(p), _) => load_dictionary(p)?,
        (None, MockMode::DictionaryGloss) => return Err(anyhow!("gloss mode needs --dict")).usage(),
        (None, MockMode::Identity) => BilingualDictionary::new(),
    };
    let backend = Arc::new(MockBackend::new(a.mode, Arc::new(dictionary)));
    let listener = TcpListener::bind((a.host.as_str(), a.port))
        .with_context(|| format!("binding {}:{}", a.host, a.port))
        .backend()?;
    let addr = listener.local_addr().context("reading bound address").backend()?;
    println!("listening on http://{addr}");
    io::stdout().flush().ok();
    server::serve_forever(listener, backend, ServerOptions { fault: a.fault }).backend()
}

