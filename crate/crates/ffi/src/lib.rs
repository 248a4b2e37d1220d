//! C ABI over the `mesc` library.
//!
//! Every fallible function returns a [`MescStatus`]; on anything other than
//! `MESC_STATUS_OK` a description is available from
//! [`mesc_last_error_message`] on the same thread. Objects are opaque
//! handles created by `*_load`/`*_build` functions and released with the
//! matching `*_free`. Strings passed in must be NUL-terminated UTF-8;
//! strings returned must be released with [`mesc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mesc::edit_distance;
use mesc::lexicon::load_dictionary_with;
use mesc::translit::{load_translit_rules, TransliterationTable};
use mesc::{BilingualDictionary, CooccurrenceIndex, Error, MescConfig, TokenizerConfig};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MescStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Malformed = 4,
    IndexFormat = 5,
    Checksum = 6,
    VersionMismatch = 7,
    InvalidArgument = 8,
    NoCooccurrenceMass = 9,
    EmptyInput = 10,
    Panic = 11,
}

/// Co-occurrence index handle.
pub struct MescIndex(CooccurrenceIndex);

/// Bilingual dictionary handle.
pub struct MescDictionary(BilingualDictionary);

/// Transliteration table handle.
pub struct MescTranslitTable(TransliterationTable);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> MescStatus {
    match err {
        Error::Io { .. } => MescStatus::Io,
        Error::Malformed { .. } => MescStatus::Malformed,
        Error::EmptyCorpus | Error::EmptyDictionary => MescStatus::EmptyInput,
        Error::NoCooccurrenceMass => MescStatus::NoCooccurrenceMass,
        Error::IndexFormat(_) => MescStatus::IndexFormat,
        Error::VersionMismatch { .. } => MescStatus::VersionMismatch,
        Error::Checksum => MescStatus::Checksum,
        Error::UnknownDocument(_) | Error::InvalidArgument(_) => MescStatus::InvalidArgument,
    }
}

struct Fail(MescStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> MescStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            MescStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MescStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(MescStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        Fail(
            MescStatus::InvalidUtf8,
            format!("{what} is not valid UTF-8"),
        )
    })
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail(MescStatus::NullPointer, format!("{what} is null")))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(
            MescStatus::NullPointer,
            "output pointer is null".into(),
        ));
    }
    out.write(value);
    Ok(())
}

/// Message for the last failed call on this thread, or NULL after a
/// successful one. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn mesc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Build an index from a `doc_id<TAB>text` corpus file with the default
/// tokenizer (case folding and punctuation stripping on).
///
/// # Safety
/// `corpus_path` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mesc_index_build(
    corpus_path: *const c_char,
    window: usize,
    out: *mut *mut MescIndex,
) -> MescStatus {
    guard(|| {
        let path = str_arg(corpus_path, "corpus_path")?;
        let collection = mesc::ingest_corpus(path, &TokenizerConfig::default())?;
        let index = mesc::build_index(&collection, window)?;
        write_out(out, Box::into_raw(Box::new(MescIndex(index))))
    })
}

/// Load an index written by `mesc_index_save` or `mesc index`.
///
/// # Safety
/// `path` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mesc_index_load(
    path: *const c_char,
    out: *mut *mut MescIndex,
) -> MescStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let index = CooccurrenceIndex::load(path)?;
        write_out(out, Box::into_raw(Box::new(MescIndex(index))))
    })
}

/// # Safety
/// `index` must be a live handle; `path` a valid C string.
#[no_mangle]
pub unsafe extern "C" fn mesc_index_save(
    index: *const MescIndex,
    path: *const c_char,
) -> MescStatus {
    guard(|| {
        let index = ref_arg(index, "index")?;
        let path = str_arg(path, "path")?;
        index.0.save(path)?;
        Ok(())
    })
}

/// Release an index. NULL is ignored.
///
/// # Safety
/// `index` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mesc_index_free(index: *mut MescIndex) {
    if !index.is_null() {
        drop(Box::from_raw(index));
    }
}

/// Number of distinct terms in the index; 0 for NULL.
///
/// # Safety
/// `index` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mesc_index_vocabulary_size(index: *const MescIndex) -> usize {
    index.as_ref().map_or(0, |i| i.0.vocabulary().len())
}

/// Number of documents in the index; 0 for NULL.
///
/// # Safety
/// `index` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mesc_index_doc_count(index: *const MescIndex) -> usize {
    index.as_ref().map_or(0, |i| i.0.doc_count())
}

/// Whether two terms co-occur within the index window.
///
/// # Safety
/// `index` must be a live handle, `a`/`b` valid C strings, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mesc_index_cooccurs(
    index: *const MescIndex,
    a: *const c_char,
    b: *const c_char,
    out: *mut bool,
) -> MescStatus {
    guard(|| {
        let index = ref_arg(index, "index")?;
        let (a, b) = (str_arg(a, "a")?, str_arg(b, "b")?);
        write_out(out, index.0.cooccurs(a, b))
    })
}

/// Joint co-occurrence probability of two terms.
///
/// # Safety
/// `index` must be a live handle, `a`/`b` valid C strings, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mesc_index_joint_probability(
    index: *const MescIndex,
    a: *const c_char,
    b: *const c_char,
    out: *mut f64,
) -> MescStatus {
    guard(|| {
        let index = ref_arg(index, "index")?;
        let (a, b) = (str_arg(a, "a")?, str_arg(b, "b")?);
        write_out(out, index.0.joint_probability(a, b)?)
    })
}

/// Levenshtein distance between two strings, counted in characters.
///
/// # Safety
/// `a`/`b` must be valid C strings, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mesc_med(
    a: *const c_char,
    b: *const c_char,
    out: *mut usize,
) -> MescStatus {
    guard(|| {
        let (a, b) = (str_arg(a, "a")?, str_arg(b, "b")?);
        write_out(out, edit_distance::med(a, b))
    })
}

/// Whether the edit distance between `a` and `b` is at most `k`.
///
/// # Safety
/// `a`/`b` must be valid C strings, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mesc_within_distance(
    a: *const c_char,
    b: *const c_char,
    k: usize,
    out: *mut bool,
) -> MescStatus {
    guard(|| {
        let (a, b) = (str_arg(a, "a")?, str_arg(b, "b")?);
        write_out(out, edit_distance::within_distance(a, b, k))
    })
}

/// Load a `source<TAB>cand1|cand2|...` dictionary, normalised with the
/// tokenizer settings of `index`.
///
/// # Safety
/// `index` must be a live handle, `path` a valid C string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mesc_dictionary_load(
    index: *const MescIndex,
    path: *const c_char,
    out: *mut *mut MescDictionary,
) -> MescStatus {
    guard(|| {
        let index = ref_arg(index, "index")?;
        let path = str_arg(path, "path")?;
        let dict = load_dictionary_with(path, &index.0.tokenizer())?;
        write_out(out, Box::into_raw(Box::new(MescDictionary(dict))))
    })
}

/// Number of source entries in the dictionary; 0 for NULL.
///
/// # Safety
/// `dict` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mesc_dictionary_len(dict: *const MescDictionary) -> usize {
    dict.as_ref().map_or(0, |d| d.0.len())
}

/// Release a dictionary. NULL is ignored.
///
/// # Safety
/// `dict` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mesc_dictionary_free(dict: *mut MescDictionary) {
    if !dict.is_null() {
        drop(Box::from_raw(dict));
    }
}

/// Load a transliteration rule file.
///
/// # Safety
/// `path` must be a valid C string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mesc_translit_load(
    path: *const c_char,
    out: *mut *mut MescTranslitTable,
) -> MescStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let table = load_translit_rules(path)?;
        write_out(out, Box::into_raw(Box::new(MescTranslitTable(table))))
    })
}

/// Release a transliteration table. NULL is ignored.
///
/// # Safety
/// `table` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mesc_translit_free(table: *mut MescTranslitTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Translate a source-language query. On success `*out` receives the
/// selected target terms joined by single spaces; release it with
/// `mesc_string_free`. `translit` may be NULL.
///
/// # Safety
/// Handles must be live (or NULL for `translit`), `query` a valid C string,
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mesc_translate_query(
    index: *const MescIndex,
    dict: *const MescDictionary,
    translit: *const MescTranslitTable,
    query: *const c_char,
    out: *mut *mut c_char,
) -> MescStatus {
    guard(|| {
        let index = ref_arg(index, "index")?;
        let dict = ref_arg(dict, "dict")?;
        let table = translit.as_ref().map(|t| &t.0);
        let query = str_arg(query, "query")?;
        let terms = index.0.tokenizer().tokenize(query);
        let result =
            mesc::translate_query(&terms, &dict.0, &index.0, table, &MescConfig::default());
        let text = CString::new(result.target_terms().join(" ")).map_err(|_| {
            Fail(
                MescStatus::InvalidArgument,
                "translation contains NUL".into(),
            )
        })?;
        write_out(out, text.into_raw())
    })
}

/// Release a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mesc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
