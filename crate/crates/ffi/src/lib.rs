//! C ABI for bahnaric-mt.
//!
//! Resources and backends are opaque handles, created by the
//! `bvmt_resources_*` and `bvmt_backend_*` constructors and released with the
//! matching `*_free`. Every fallible call returns a
//! [`BvmtStatus`]; on failure [`bvmt_last_error`] describes the problem.
//! Strings returned through out-parameters are owned by the caller and must
//! be released with [`bvmt_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::sync::Arc;
use std::time::Duration;

use bahnaric_mt::disambiguator::{CooccurrenceIndex, DisambiguationConfig, TieBreak};
use bahnaric_mt::evaluator::evaluate_texts;
use bahnaric_mt::pipeline::{
    translate_sentence, BackendEndpoint, MockBackend, MockMode, RemoteBackend, TranslateError, TranslationBackend,
    TranslationResources,
};
use bahnaric_mt::segmenter::{segment_text, FrequencyLexicon};
use bahnaric_mt::BilingualDictionary;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BvmtStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// A numeric or enum argument was out of range.
    InvalidArgument = 3,
    /// A file could not be read or its contents are malformed.
    DataError = 4,
    /// The translation backend failed.
    BackendError = 5,
    /// An internal panic was caught at the boundary.
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BvmtMockMode {
    Identity = 0,
    DictionaryGloss = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BvmtTieBreak {
    GlossFrequency = 0,
    DictionaryOrder = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BvmtBleuReport {
    /// 0 to 100.
    pub bleu: f64,
    pub precisions: [f64; 4],
    pub brevity_penalty: f64,
    pub hyp_length: usize,
    pub ref_length: usize,
}

/// Dictionary, lexicon, co-occurrence index and disambiguation settings.
pub struct BvmtResources(TranslationResources);

/// A chunk translation backend.
pub struct BvmtBackend(Box<dyn TranslationBackend>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

struct Fail(BvmtStatus, String);

type FfiResult<T = ()> = Result<T, Fail>;

fn fail<E: std::fmt::Display>(status: BvmtStatus) -> impl Fn(E) -> Fail {
    move |e| Fail(status, e.to_string())
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> FfiResult) -> BvmtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BvmtStatus::Ok,
        Ok(Err(Fail(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            BvmtStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(Fail(BvmtStatus::NullArgument, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(BvmtStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

unsafe fn opt_str_arg<'a>(p: *const c_char, name: &str) -> FfiResult<Option<&'a str>> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, name).map(Some)
    }
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| Fail(BvmtStatus::NullArgument, format!("{name} is null")))
}

fn out_arg<T>(p: *mut T, name: &str) -> FfiResult<*mut T> {
    if p.is_null() {
        Err(Fail(BvmtStatus::NullArgument, format!("{name} is null")))
    } else {
        Ok(p)
    }
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw()
}

fn config(window: u32, tie_break: u32) -> FfiResult<DisambiguationConfig> {
    let tie_break = match tie_break {
        t if t == BvmtTieBreak::GlossFrequency as u32 => TieBreak::GlossFrequency,
        t if t == BvmtTieBreak::DictionaryOrder as u32 => TieBreak::DictionaryOrder,
        t => return Err(Fail(BvmtStatus::InvalidArgument, format!("unknown tie-break {t}"))),
    };
    DisambiguationConfig::new(window as usize, tie_break).map_err(fail(BvmtStatus::InvalidArgument))
}

fn build_resources(
    dictionary: BilingualDictionary,
    lexicon: Option<FrequencyLexicon>,
    index: Option<CooccurrenceIndex>,
    config: DisambiguationConfig,
) -> FfiResult<*mut BvmtResources> {
    let resources = TranslationResources::new(
        Arc::new(dictionary),
        lexicon.unwrap_or_default(),
        index.unwrap_or_else(|| CooccurrenceIndex::empty(config.window)),
        config,
    )
    .map_err(fail(BvmtStatus::DataError))?;
    Ok(Box::into_raw(Box::new(BvmtResources(resources))))
}

/// Loads resources from files. `lexicon_path` and `cooc_path` may be null
/// for empty defaults. A `.tsv` index path is read as TSV. `tie_break` is a
/// `BvmtTieBreak` value.
///
/// # Safety
/// String arguments must be null or valid NUL-terminated strings; `out`
/// must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bvmt_resources_load(
    dict_path: *const c_char,
    lexicon_path: *const c_char,
    cooc_path: *const c_char,
    window: u32,
    tie_break: u32,
    out: *mut *mut BvmtResources,
) -> BvmtStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let dict_path = str_arg(dict_path, "dict_path")?;
        let config = config(window, tie_break)?;
        let dictionary = BilingualDictionary::load(Path::new(dict_path)).map_err(fail(BvmtStatus::DataError))?;
        let lexicon = opt_str_arg(lexicon_path, "lexicon_path")?
            .map(|p| FrequencyLexicon::load(Path::new(p)))
            .transpose()
            .map_err(fail(BvmtStatus::DataError))?;
        let index = opt_str_arg(cooc_path, "cooc_path")?
            .map(|p| CooccurrenceIndex::load(Path::new(p)))
            .transpose()
            .map_err(fail(BvmtStatus::DataError))?;
        *out = build_resources(dictionary, lexicon, index, config)?;
        Ok(())
    })
}

/// Like [`bvmt_resources_load`] but takes JSON documents instead of paths.
///
/// # Safety
/// String arguments must be null or valid NUL-terminated strings; `out`
/// must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bvmt_resources_from_json(
    dict_json: *const c_char,
    lexicon_json: *const c_char,
    cooc_json: *const c_char,
    window: u32,
    tie_break: u32,
    out: *mut *mut BvmtResources,
) -> BvmtStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let dict_json = str_arg(dict_json, "dict_json")?;
        let config = config(window, tie_break)?;
        let dictionary = BilingualDictionary::parse(dict_json).map_err(fail(BvmtStatus::DataError))?;
        let lexicon = opt_str_arg(lexicon_json, "lexicon_json")?
            .map(FrequencyLexicon::from_json)
            .transpose()
            .map_err(fail(BvmtStatus::DataError))?;
        let index = opt_str_arg(cooc_json, "cooc_json")?
            .map(CooccurrenceIndex::from_json)
            .transpose()
            .map_err(fail(BvmtStatus::DataError))?;
        *out = build_resources(dictionary, lexicon, index, config)?;
        Ok(())
    })
}

/// # Safety
/// `resources` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn bvmt_resources_free(resources: *mut BvmtResources) {
    if !resources.is_null() {
        drop(Box::from_raw(resources));
    }
}

/// An in-process mock backend; `mode` is a `BvmtMockMode` value. Gloss
/// mode uses the dictionary of `resources`, which may be null for identity
/// mode.
///
/// # Safety
/// `resources` must be null or a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bvmt_backend_mock(
    mode: u32,
    resources: *const BvmtResources,
    out: *mut *mut BvmtBackend,
) -> BvmtStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let backend = match mode {
            m if m == BvmtMockMode::Identity as u32 => MockBackend::identity(),
            m if m == BvmtMockMode::DictionaryGloss as u32 => {
                let r = ref_arg(resources, "resources")?;
                MockBackend::new(MockMode::DictionaryGloss, r.0.dictionary().clone())
            }
            m => return Err(Fail(BvmtStatus::InvalidArgument, format!("unknown mock mode {m}"))),
        };
        *out = Box::into_raw(Box::new(BvmtBackend(Box::new(backend))));
        Ok(())
    })
}

/// A client for a chunk translation server at `base_url`.
///
/// # Safety
/// `base_url` must be a valid NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bvmt_backend_remote(
    base_url: *const c_char,
    timeout_ms: u64,
    max_batch: usize,
    retries: u32,
    out: *mut *mut BvmtBackend,
) -> BvmtStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let endpoint = BackendEndpoint {
            timeout: Duration::from_millis(timeout_ms),
            max_batch,
            retries,
            ..BackendEndpoint::new(str_arg(base_url, "base_url")?)
        };
        let backend = RemoteBackend::new(endpoint).map_err(fail(BvmtStatus::InvalidArgument))?;
        *out = Box::into_raw(Box::new(BvmtBackend(Box::new(backend))));
        Ok(())
    })
}

/// # Safety
/// `backend` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn bvmt_backend_free(backend: *mut BvmtBackend) {
    if !backend.is_null() {
        drop(Box::from_raw(backend));
    }
}

/// Translates one sentence. `out_trace_json` may be null; otherwise it
/// receives the per-segment trace as JSON. On a backend failure the trace,
/// if requested, holds the partial records.
///
/// # Safety
/// Handles must be live; `text` must be a valid string; `out_translation`
/// must be valid.
#[no_mangle]
pub unsafe extern "C" fn bvmt_translate(
    resources: *const BvmtResources,
    backend: *const BvmtBackend,
    text: *const c_char,
    out_translation: *mut *mut c_char,
    out_trace_json: *mut *mut c_char,
) -> BvmtStatus {
    guard(|| {
        let out = out_arg(out_translation, "out_translation")?;
        let resources = ref_arg(resources, "resources")?;
        let backend = ref_arg(backend, "backend")?;
        let text = str_arg(text, "text")?;
        match translate_sentence(text, &resources.0, backend.0.as_ref()) {
            Ok((translation, trace)) => {
                *out = owned_string(translation);
                if !out_trace_json.is_null() {
                    *out_trace_json = owned_string(trace.to_json());
                }
                Ok(())
            }
            Err(e @ TranslateError::Backend { .. }) => {
                let TranslateError::Backend { partial, .. } = &e;
                *out = ptr::null_mut();
                if !out_trace_json.is_null() {
                    *out_trace_json = owned_string(partial.to_json());
                }
                Err(Fail(BvmtStatus::BackendError, e.to_string()))
            }
        }
    })
}

/// Segments and classifies a sentence; writes a JSON array of segments.
///
/// # Safety
/// `resources` must be live; `text` must be a valid string; `out_json`
/// must be valid.
#[no_mangle]
pub unsafe extern "C" fn bvmt_segment_json(
    resources: *const BvmtResources,
    text: *const c_char,
    out_json: *mut *mut c_char,
) -> BvmtStatus {
    guard(|| {
        let out = out_arg(out_json, "out_json")?;
        let r = &ref_arg(resources, "resources")?.0;
        let text = str_arg(text, "text")?;
        let (_, segments) = segment_text(text, r.lexicon(), r.dictionary());
        *out = owned_string(serde_json::to_string(&segments).map_err(fail(BvmtStatus::Panic))?);
        Ok(())
    })
}

/// Corpus BLEU-4 of newline-separated hypotheses against references.
///
/// # Safety
/// String arguments must be valid; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bvmt_corpus_bleu(
    hypotheses: *const c_char,
    references: *const c_char,
    out: *mut BvmtBleuReport,
) -> BvmtStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let hyp = str_arg(hypotheses, "hypotheses")?;
        let reference = str_arg(references, "references")?;
        let r = evaluate_texts(hyp, reference).map_err(fail(BvmtStatus::InvalidArgument))?;
        *out = BvmtBleuReport {
            bleu: r.score,
            precisions: r.precisions,
            brevity_penalty: r.brevity_penalty,
            hyp_length: r.hyp_length,
            ref_length: r.ref_length,
        };
        Ok(())
    })
}

/// Message for the most recent failure on this thread, or null. Valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bvmt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn bvmt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, statically allocated.
#[no_mangle]
pub extern "C" fn bvmt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
