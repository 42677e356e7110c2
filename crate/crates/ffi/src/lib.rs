//! C ABI over the specforge engine.
//!
//! Objects are opaque handles created by `*_load`/`*_new`/`*_start` calls and
//! released with the matching `*_free`. Every call returns an [`SfStatus`];
//! on failure [`sf_last_error`] describes the problem. Strings passed in are
//! UTF-8 and NUL terminated. Strings handed out must be released with
//! [`sf_string_free`]. Structured values cross the boundary as JSON.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use specforge::catalog::{catalog_stats, load_catalog_set, CatalogSet};
use specforge::collation;
use specforge::drawing::{load_document, save_document, Document};
use specforge::pipeline::autofill;
use specforge::po::{duplicates_in, DuplicateScope};
use specforge::rules::{start_session, Answer, SelectionSession};
use specforge::table::{load_table_kind, GoodsBuffer, TableInstance, TableOp};

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfStatus {
    Ok = 0,
    /// A required pointer was null.
    NullArgument = 1,
    /// A string was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Malformed JSON or an out-of-range value.
    InvalidArgument = 3,
    NotFound = 4,
    Io = 5,
    /// The engine rejected the request; see `sf_last_error`.
    Domain = 6,
    /// A session was asked for results before all prompts were answered,
    /// or answered after it finished.
    WrongState = 7,
    Internal = 8,
}

pub struct SfCatalog(CatalogSet);
pub struct SfSession(SelectionSession);
pub struct SfDocument(Document);
/// A table together with its goods buffer.
pub struct SfTable {
    table: TableInstance,
    buffer: GoodsBuffer,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(SfStatus, String);

type Res<T> = Result<T, Failure>;

fn fail<E: std::fmt::Display>(status: SfStatus) -> impl Fn(E) -> Failure {
    move |e| Failure(status, e.to_string())
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Runs `f`, records its error message and converts panics.
fn guard(f: impl FnOnce() -> Res<()>) -> SfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SfStatus::Ok
        }
        Ok(Err(Failure(s, m))) => {
            set_error(&m);
            s
        }
        Err(_) => {
            set_error("internal error");
            SfStatus::Internal
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Res<&'a str> {
    if p.is_null() {
        return Err(Failure(SfStatus::NullArgument, "null string".into()));
    }
    CStr::from_ptr(p).to_str().map_err(fail(SfStatus::InvalidUtf8))
}

unsafe fn handle<'a, T>(p: *const T) -> Res<&'a T> {
    p.as_ref().ok_or_else(|| Failure(SfStatus::NullArgument, "null handle".into()))
}

unsafe fn handle_mut<'a, T>(p: *mut T) -> Res<&'a mut T> {
    p.as_mut().ok_or_else(|| Failure(SfStatus::NullArgument, "null handle".into()))
}

unsafe fn put<T>(out: *mut *mut T, v: T) -> Res<()> {
    if out.is_null() {
        return Err(Failure(SfStatus::NullArgument, "null output pointer".into()));
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Res<()> {
    if out.is_null() {
        return Err(Failure(SfStatus::NullArgument, "null output pointer".into()));
    }
    *out = CString::new(s).map_err(fail(SfStatus::Internal))?.into_raw();
    Ok(())
}

fn json<T: serde::Serialize>(v: &T) -> Res<String> {
    serde_json::to_string(v).map_err(fail(SfStatus::Internal))
}

fn io_or_domain(e: impl std::fmt::Display, io: bool) -> Failure {
    Failure(if io { SfStatus::Io } else { SfStatus::Domain }, e.to_string())
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn sf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Compares two designations: negative, zero or positive.
///
/// # Safety
/// `a` and `b` must be valid NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn sf_compare_designations(a: *const c_char, b: *const c_char, out: *mut c_int) -> SfStatus {
    guard(|| {
        let (a, b) = (text(a)?, text(b)?);
        if out.is_null() {
            return Err(Failure(SfStatus::NullArgument, "null output pointer".into()));
        }
        *out = collation::compare(a, b) as c_int;
        Ok(())
    })
}

/// Sorts a JSON array of designations.
///
/// # Safety
/// `items_json` must be a valid string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_sort_designations(items_json: *const c_char, out: *mut *mut c_char) -> SfStatus {
    guard(|| {
        let mut items: Vec<String> = serde_json::from_str(text(items_json)?).map_err(fail(SfStatus::InvalidArgument))?;
        collation::sort_designations(&mut items);
        put_string(out, json(&items)?)
    })
}

/// Loads and validates a catalog directory.
///
/// # Safety
/// `dir` must be a valid string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_catalog_load(dir: *const c_char, out: *mut *mut SfCatalog) -> SfStatus {
    guard(|| {
        let dir = Path::new(text(dir)?);
        if !dir.is_dir() {
            return Err(Failure(SfStatus::NotFound, format!("{}: not a directory", dir.display())));
        }
        let set = load_catalog_set(dir).map_err(fail(SfStatus::Domain))?;
        put(out, SfCatalog(set))
    })
}

/// # Safety
/// `c` must come from `sf_catalog_load` or be null.
#[no_mangle]
pub unsafe extern "C" fn sf_catalog_free(c: *mut SfCatalog) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Per-profile statistics as a JSON array.
///
/// # Safety
/// `c` must be a live catalog; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_catalog_stats(c: *const SfCatalog, out: *mut *mut c_char) -> SfStatus {
    guard(|| {
        let c = handle(c)?;
        put_string(out, json(&catalog_stats(&c.0, &[]))?)
    })
}

/// Starts a selection session. The session keeps its own copy of what it
/// needs, so the catalog may be freed afterwards.
///
/// # Safety
/// `c` must be a live catalog, `table` a valid string, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_session_start(
    c: *const SfCatalog,
    table: *const c_char,
    row: usize,
    out: *mut *mut SfSession,
) -> SfStatus {
    guard(|| {
        let c = handle(c)?;
        let s = start_session(&c.0, text(table)?, row).map_err(|e| {
            let status = match e {
                specforge::rules::RuleError::UnknownTable(_) => SfStatus::NotFound,
                specforge::rules::RuleError::BadRow { .. } => SfStatus::InvalidArgument,
                _ => SfStatus::Domain,
            };
            Failure(status, e.to_string())
        })?;
        put(out, SfSession(s))
    })
}

/// # Safety
/// `s` must come from `sf_session_start` or be null.
#[no_mangle]
pub unsafe extern "C" fn sf_session_free(s: *mut SfSession) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// The next prompt as JSON (`{"prompt":"done"}` when nothing is left).
///
/// # Safety
/// `s` must be a live session; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_session_prompt(s: *const SfSession, out: *mut *mut c_char) -> SfStatus {
    guard(|| {
        let s = handle(s)?;
        put_string(out, json(&s.0.next_prompt())?)
    })
}

/// Answers the current prompt. `answer_json` is an option index, a number
/// or a JSON string.
///
/// # Safety
/// `s` must be a live session; `answer_json` a valid string.
#[no_mangle]
pub unsafe extern "C" fn sf_session_answer(s: *mut SfSession, answer_json: *const c_char) -> SfStatus {
    guard(|| {
        let s = handle_mut(s)?;
        let a: Answer = serde_json::from_str(text(answer_json)?).map_err(fail(SfStatus::InvalidArgument))?;
        s.0.answer(a).map_err(|e| {
            let status = if matches!(e, specforge::rules::RuleError::SessionDone) {
                SfStatus::WrongState
            } else {
                SfStatus::InvalidArgument
            };
            Failure(status, e.to_string())
        })?;
        Ok(())
    })
}

/// Generated fields of a finished session as JSON.
///
/// # Safety
/// `s` must be a live session; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_session_finish(s: *const SfSession, out: *mut *mut c_char) -> SfStatus {
    guard(|| {
        let s = handle(s)?;
        let f = s.0.finish().map_err(|e| {
            let status = if matches!(e, specforge::rules::RuleError::NotDone) { SfStatus::WrongState } else { SfStatus::Domain };
            Failure(status, e.to_string())
        })?;
        put_string(out, json(&f)?)
    })
}

/// Loads a drawing file.
///
/// # Safety
/// `path` must be a valid string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_document_load(path: *const c_char, out: *mut *mut SfDocument) -> SfStatus {
    guard(|| {
        let path = Path::new(text(path)?);
        if !path.is_file() {
            return Err(Failure(SfStatus::NotFound, format!("{}: not found", path.display())));
        }
        let d = load_document(path).map_err(|e| io_or_domain(&e, matches!(e, specforge::drawing::DrawingError::Io { .. })))?;
        put(out, SfDocument(d))
    })
}

/// An empty drawing.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_document_new(out: *mut *mut SfDocument) -> SfStatus {
    guard(|| put(out, SfDocument(Document::new())))
}

/// # Safety
/// `d` must be a live document; `path` a valid string.
#[no_mangle]
pub unsafe extern "C" fn sf_document_save(d: *const SfDocument, path: *const c_char) -> SfStatus {
    guard(|| {
        let d = handle(d)?;
        save_document(&d.0, Path::new(text(path)?)).map_err(fail(SfStatus::Io))
    })
}

/// # Safety
/// `d` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn sf_document_free(d: *mut SfDocument) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

fn scope_of(s: &str) -> Res<DuplicateScope> {
    DuplicateScope::parse_list(s).map_err(fail(SfStatus::InvalidArgument))
}

/// Repeated designations within the document, as JSON. `scope` is a comma
/// list of `po`, `axono`, `vk`.
///
/// # Safety
/// `d` must be a live document; `scope` a valid string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_document_duplicates(d: *const SfDocument, scope: *const c_char, out: *mut *mut c_char) -> SfStatus {
    guard(|| {
        let d = handle(d)?;
        let scope = scope_of(text(scope)?)?;
        let file = d.0.source_path.clone().unwrap_or_default();
        put_string(out, json(&duplicates_in(&[(file, d.0.clone())], &scope))?)
    })
}

/// Fills a new table of the kind in `kind_path` from the document.
///
/// # Safety
/// `d` must be a live document; strings valid; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_document_autofill(
    d: *const SfDocument,
    kind_path: *const c_char,
    scope: *const c_char,
    out: *mut *mut SfTable,
) -> SfStatus {
    guard(|| {
        let d = handle(d)?;
        let kind = load_table_kind(Path::new(text(kind_path)?)).map_err(fail(SfStatus::Domain))?;
        let scope = scope_of(text(scope)?)?;
        let table = autofill(&d.0, &kind, &scope).map_err(fail(SfStatus::Domain))?;
        put(out, SfTable { table, buffer: GoodsBuffer::default() })
    })
}

/// An empty table of the kind in `kind_path`.
///
/// # Safety
/// `kind_path` must be a valid string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_table_new(kind_path: *const c_char, out: *mut *mut SfTable) -> SfStatus {
    guard(|| {
        let kind = load_table_kind(Path::new(text(kind_path)?)).map_err(fail(SfStatus::Domain))?;
        put(out, SfTable { table: TableInstance::new(kind), buffer: GoodsBuffer::default() })
    })
}

/// A table from its JSON file form.
///
/// # Safety
/// `table_json` must be a valid string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_table_from_json(table_json: *const c_char, out: *mut *mut SfTable) -> SfStatus {
    guard(|| {
        let table = TableInstance::from_json(text(table_json)?).map_err(fail(SfStatus::InvalidArgument))?;
        put(out, SfTable { table, buffer: GoodsBuffer::default() })
    })
}

/// # Safety
/// `t` must be a live table; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_table_to_json(t: *const SfTable, out: *mut *mut c_char) -> SfStatus {
    guard(|| {
        let t = handle(t)?;
        put_string(out, t.table.to_json())
    })
}

/// Number of data rows.
///
/// # Safety
/// `t` must be a live table; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_table_len(t: *const SfTable, out: *mut usize) -> SfStatus {
    guard(|| {
        let t = handle(t)?;
        if out.is_null() {
            return Err(Failure(SfStatus::NullArgument, "null output pointer".into()));
        }
        *out = t.table.len();
        Ok(())
    })
}

/// Applies one operation object or an array of them. Either all apply or
/// the table is unchanged.
///
/// # Safety
/// `t` must be a live table; `ops_json` a valid string.
#[no_mangle]
pub unsafe extern "C" fn sf_table_apply(t: *mut SfTable, ops_json: *const c_char) -> SfStatus {
    guard(|| {
        let t = handle_mut(t)?;
        let v: serde_json::Value = serde_json::from_str(text(ops_json)?).map_err(fail(SfStatus::InvalidArgument))?;
        let items = match v {
            serde_json::Value::Array(a) => a,
            other => vec![other],
        };
        let ops: Vec<TableOp> =
            items.into_iter().map(serde_json::from_value).collect::<Result<_, _>>().map_err(fail(SfStatus::InvalidArgument))?;
        let (mut table, mut buffer) = (t.table.clone(), t.buffer.clone());
        for (i, op) in ops.into_iter().enumerate() {
            table.apply(op, &mut buffer).map_err(|e| Failure(SfStatus::Domain, format!("operation {i}: {e}")))?;
        }
        t.table = table;
        t.buffer = buffer;
        Ok(())
    })
}

/// Copies the goods buffer of `from` into `to`, for moving rows between tables.
///
/// # Safety
/// Both must be live tables.
#[no_mangle]
pub unsafe extern "C" fn sf_table_share_buffer(from: *const SfTable, to: *mut SfTable) -> SfStatus {
    guard(|| {
        let buf = handle(from)?.buffer.clone();
        handle_mut(to)?.buffer = buf;
        Ok(())
    })
}

/// # Safety
/// `t` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn sf_table_free(t: *mut SfTable) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}
