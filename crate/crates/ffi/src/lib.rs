//! C interface to `gec-eval`.
//!
//! Every function returns a [`GecStatus`]; results go through out-pointers.
//! On failure the message is kept per thread and can be read with
//! [`gec_last_error_message`]. Strings handed out by this library must be
//! released with [`gec_string_free`], model handles with [`gec_lm_free`].

use gec_eval::lm::{LanguageModel, NgramModel};
use gec_eval::metrics::{gleu_corpus, qwk, scribendi_sentence, GleuConfig, GleuSentence, RatingMatrix, ScribendiConfig};
use gec_eval::text::{levenshtein, nld, normalize, tokenize};
use gec_eval::Error;
use libc::{c_char, c_double, size_t};
use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GecStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Io = 4,
    Parse = 5,
    Scorer = 6,
    Undefined = 7,
    Panic = 99,
}

/// Character n-gram language model.
pub struct GecLm {
    model: NgramModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(GecStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Io { .. } => GecStatus::Io,
            Error::Parse { .. } => GecStatus::Parse,
            Error::Scorer(_) => GecStatus::Scorer,
            Error::UndefinedKappa(_) | Error::UndefinedCorrelation(_) => GecStatus::Undefined,
            _ => GecStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

/// Runs `f`, recording any failure or panic as the thread's last error.
fn guard<F>(f: F) -> GecStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            GecStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".to_string());
            GecStatus::Panic
        }
    }
}

fn null(name: &str) -> Failure {
    Failure(GecStatus::NullPointer, format!("{name} is NULL"))
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(GecStatus::InvalidUtf8, format!("{name}: {e}")))
}

unsafe fn texts<'a>(p: *const *const c_char, n: size_t, name: &str) -> Result<Vec<&'a str>, Failure> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if p.is_null() {
        return Err(null(name));
    }
    std::slice::from_raw_parts(p, n)
        .iter()
        .enumerate()
        .map(|(i, &s)| text(s, &format!("{name}[{i}]")))
        .collect()
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(name))
}

/// Message of the last failed call on this thread, or NULL after a
/// successful call. The pointer stays valid until the next call on the
/// same thread; do not free it.
#[no_mangle]
pub extern "C" fn gec_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gec_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn gec_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// NFC-normalized, whitespace-collapsed copy of `input`.
///
/// # Safety
/// `input` must be a NUL-terminated string; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gec_normalize(input: *const c_char, result: *mut *mut c_char) -> GecStatus {
    guard(|| {
        let s = normalize(text(input, "input")?);
        let slot = out(result, "result")?;
        *slot = CString::new(s).expect("input had no NUL").into_raw();
        Ok(())
    })
}

/// Character-level Levenshtein distance.
///
/// # Safety
/// `a` and `b` must be NUL-terminated strings; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gec_levenshtein(a: *const c_char, b: *const c_char, result: *mut size_t) -> GecStatus {
    guard(|| {
        let d = levenshtein(text(a, "a")?, text(b, "b")?);
        *out(result, "result")? = d;
        Ok(())
    })
}

/// Levenshtein distance divided by the longer string's length.
///
/// # Safety
/// `a` and `b` must be NUL-terminated strings; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gec_nld(a: *const c_char, b: *const c_char, result: *mut c_double) -> GecStatus {
    guard(|| {
        let d = nld(text(a, "a")?, text(b, "b")?);
        *out(result, "result")? = d;
        Ok(())
    })
}

/// Corpus GLEU with one reference per sentence and default settings.
///
/// # Safety
/// The three arrays must each hold `n` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn gec_gleu(
    sources: *const *const c_char,
    hypotheses: *const *const c_char,
    references: *const *const c_char,
    n: size_t,
    result: *mut c_double,
) -> GecStatus {
    guard(|| {
        let src = texts(sources, n, "sources")?;
        let hyp = texts(hypotheses, n, "hypotheses")?;
        let refs = texts(references, n, "references")?;
        let tok = |s: &str| tokenize(&normalize(s));
        let sentences: Vec<GleuSentence> = (0..n)
            .map(|i| GleuSentence {
                id: (i + 1).to_string(),
                source: tok(src[i]),
                hypothesis: tok(hyp[i]),
                references: vec![tok(refs[i])],
            })
            .collect();
        let score = gleu_corpus(&sentences, &GleuConfig::default())?;
        *out(result, "result")? = score;
        Ok(())
    })
}

/// Quadratically weighted kappa of two rating arrays with values in
/// `1..=categories`.
///
/// # Safety
/// `a` and `b` must each point to `n` readable values.
#[no_mangle]
pub unsafe extern "C" fn gec_qwk(
    a: *const u32,
    b: *const u32,
    n: size_t,
    categories: u32,
    result: *mut c_double,
) -> GecStatus {
    guard(|| {
        if n > 0 && (a.is_null() || b.is_null()) {
            return Err(null("ratings"));
        }
        let pairs = if n == 0 {
            Vec::new()
        } else {
            let (a, b) = (std::slice::from_raw_parts(a, n), std::slice::from_raw_parts(b, n));
            a.iter().copied().zip(b.iter().copied()).collect()
        };
        let k = qwk(&RatingMatrix::new(categories, pairs)?)?;
        *out(result, "result")? = k;
        Ok(())
    })
}

fn publish(slot: &mut *mut GecLm, model: NgramModel) {
    *slot = Box::into_raw(Box::new(GecLm { model }));
}

/// Trains a model on `n` sentences.
///
/// # Safety
/// `sentences` must hold `n` NUL-terminated strings; `lm` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gec_lm_train(
    sentences: *const *const c_char,
    n: size_t,
    order: size_t,
    k: c_double,
    lm: *mut *mut GecLm,
) -> GecStatus {
    guard(|| {
        let corpus = texts(sentences, n, "sentences")?;
        let slot = out(lm, "lm")?;
        publish(slot, NgramModel::train(&corpus, order, k)?);
        Ok(())
    })
}

/// Loads a model saved by [`gec_lm_save`] or the command-line tool.
///
/// # Safety
/// `path` must be a NUL-terminated string; `lm` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gec_lm_load(path: *const c_char, lm: *mut *mut GecLm) -> GecStatus {
    guard(|| {
        let p = text(path, "path")?;
        let slot = out(lm, "lm")?;
        publish(slot, NgramModel::load(Path::new(p))?);
        Ok(())
    })
}

/// # Safety
/// `lm` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn gec_lm_save(lm: *const GecLm, path: *const c_char) -> GecStatus {
    guard(|| {
        let lm = lm.as_ref().ok_or_else(|| null("lm"))?;
        lm.model.save(Path::new(text(path, "path")?))?;
        Ok(())
    })
}

/// Natural-log probability of `input` and the number of predicted symbols.
///
/// # Safety
/// `lm` must be a live handle; the out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn gec_lm_score(
    lm: *const GecLm,
    input: *const c_char,
    log_prob: *mut c_double,
    token_count: *mut u64,
) -> GecStatus {
    guard(|| {
        let lm = lm.as_ref().ok_or_else(|| null("lm"))?;
        let s = lm.model.score(text(input, "input")?).map_err(Error::from)?;
        *out(log_prob, "log_prob")? = s.log_prob;
        *out(token_count, "token_count")? = s.token_count;
        Ok(())
    })
}

/// Releases a model handle. NULL is ignored.
///
/// # Safety
/// `lm` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn gec_lm_free(lm: *mut GecLm) {
    if !lm.is_null() {
        drop(Box::from_raw(lm));
    }
}

/// Sentence Scribendi score (-1, 0 or 1). `lm` may be NULL, in which case
/// only sentences decided without a model succeed.
///
/// # Safety
/// Strings must be NUL-terminated; `lm` NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gec_scribendi(
    source: *const c_char,
    hypothesis: *const c_char,
    lm: *const GecLm,
    threshold: c_double,
    result: *mut i8,
) -> GecStatus {
    guard(|| {
        let cfg = ScribendiConfig {
            similarity_threshold: threshold,
        };
        cfg.validate()?;
        let (src, hyp) = (text(source, "source")?, text(hypothesis, "hypothesis")?);
        let slot = out(result, "result")?;
        let score = match lm.as_ref() {
            Some(h) => scribendi_sentence(src, hyp, &h.model, &cfg),
            None => scribendi_sentence(src, hyp, &gec_eval::lm::NoModel, &cfg),
        }
        .map_err(Error::from)?;
        *slot = score;
        Ok(())
    })
}
