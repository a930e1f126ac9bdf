//! C ABI over `fixfree`. Objects cross the boundary as opaque handles that
//! the caller releases with the matching `_free` function. Strings returned
//! through out-parameters are owned by the caller and released with
//! `ff_string_free`. Every call returns an `FfStatus`; on failure a message
//! is kept per thread and read with `ff_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fixfree::constructors::{construct_with, Construction};
use fixfree::verifier::{self, LengthsSeq, SearchOptions, Verdict};
use fixfree::words::{fits, fmt_rational, is_free, ratio, LevelSet, Mode, Profile};
use fixfree::Error;

/// Result of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    Unsupported = 5,
    Internal = 6,
    Panic = 7,
}

/// Outcome of construct and search.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FfVerdict {
    Found = 0,
    Nonexistent = 1,
    Unknown = 2,
}

/// Codeword counts per length over an alphabet of size q.
pub struct FfProfile(Profile);

/// A finite set of words.
pub struct FfCode(LevelSet);

thread_local! {
    static LAST_ERROR: RefCell<Option<String>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> FfStatus {
    match e {
        Error::Parse(_) | Error::InvalidWord(_) => FfStatus::Parse,
        Error::Unsupported(_) | Error::LevelTooLarge { .. } => FfStatus::Unsupported,
        Error::Internal(_) | Error::Io(_) => FfStatus::Internal,
        _ => FfStatus::InvalidArgument,
    }
}

/// Runs `f`, records any error or panic and maps it to a status.
fn guard(f: impl FnOnce() -> Result<(), (FfStatus, String)>) -> FfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FfStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("panic inside fixfree".into());
            FfStatus::Panic
        }
    }
}

fn lib(e: Error) -> (FfStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (FfStatus, String) {
    (FfStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, (FfStatus, String)> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| (FfStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (FfStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, v: T, what: &str) -> Result<(), (FfStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), (FfStatus, String)> {
    let c = CString::new(s).map_err(|e| (FfStatus::Internal, e.to_string()))?;
    put(out, c.into_raw(), "string out-parameter")
}

/// Message of the last failed call on this thread, or null. Release with
/// `ff_string_free`.
#[no_mangle]
pub extern "C" fn ff_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| match e.borrow().as_deref() {
        Some(m) => CString::new(m.replace('\0', " ")).map(CString::into_raw).unwrap_or(ptr::null_mut()),
        None => ptr::null_mut(),
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn ff_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `q=<int> alpha=<c1>,<c2>,...`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ff_profile_parse(text: *const c_char, out: *mut *mut FfProfile) -> FfStatus {
    guard(|| {
        let p = Profile::parse(read_str(text, "text")?).map_err(lib)?;
        put(out, Box::into_raw(Box::new(FfProfile(p))), "out")
    })
}

/// Builds a profile from `len` counts, index 0 being length 1.
///
/// # Safety
/// `counts` must point to `len` values (or be null when `len` is 0).
#[no_mangle]
pub unsafe extern "C" fn ff_profile_new(q: u32, counts: *const u64, len: usize, out: *mut *mut FfProfile) -> FfStatus {
    guard(|| {
        let v = if len == 0 {
            Vec::new()
        } else {
            if counts.is_null() {
                return Err(null("counts"));
            }
            std::slice::from_raw_parts(counts, len).to_vec()
        };
        let p = Profile::new(q, v).map_err(lib)?;
        put(out, Box::into_raw(Box::new(FfProfile(p))), "out")
    })
}

/// # Safety
/// `p` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ff_profile_free(p: *mut FfProfile) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Text form of a profile.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ff_profile_to_string(p: *const FfProfile, out: *mut *mut c_char) -> FfStatus {
    guard(|| put_string(out, deref(p, "profile")?.0.to_string()))
}

/// Kraft sum as a reduced fraction `a/b`.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ff_profile_kraft(p: *const FfProfile, out: *mut *mut c_char) -> FfStatus {
    guard(|| put_string(out, fmt_rational(&deref(p, "profile")?.0.kraft_sum())))
}

fn opts(budget: u64, jobs: usize) -> SearchOptions {
    SearchOptions {
        budget,
        jobs: jobs.max(1),
        deterministic: true,
    }
}

/// Runs the constructor dispatcher. On `FF_VERDICT_FOUND` a code handle is
/// written to `out_code`; otherwise `out_code` receives null.
///
/// # Safety
/// `p` must be a live handle; both out-parameters must be writable.
#[no_mangle]
pub unsafe extern "C" fn ff_construct(
    p: *const FfProfile,
    budget: u64,
    out_verdict: *mut FfVerdict,
    out_code: *mut *mut FfCode,
) -> FfStatus {
    guard(|| {
        let p = deref(p, "profile")?;
        let (v, c) = match construct_with(&p.0, &opts(budget, 1)) {
            Construction::Found(r) => (FfVerdict::Found, Box::into_raw(Box::new(FfCode(r.code)))),
            Construction::Nonexistent { .. } => (FfVerdict::Nonexistent, ptr::null_mut()),
            Construction::Unknown { .. } => (FfVerdict::Unknown, ptr::null_mut()),
        };
        put(out_verdict, v, "out_verdict")?;
        put(out_code, c, "out_code")
    })
}

/// Exhaustive search with a node budget. Same out-parameter contract as
/// `ff_construct`.
///
/// # Safety
/// `p` must be a live handle; both out-parameters must be writable.
#[no_mangle]
pub unsafe extern "C" fn ff_search(
    p: *const FfProfile,
    budget: u64,
    jobs: usize,
    out_verdict: *mut FfVerdict,
    out_code: *mut *mut FfCode,
) -> FfStatus {
    guard(|| {
        let p = deref(p, "profile")?;
        let r = verifier::search(&p.0, &opts(budget, jobs));
        let v = match r.verdict {
            Verdict::Found => FfVerdict::Found,
            Verdict::Nonexistent => FfVerdict::Nonexistent,
            Verdict::Unknown => FfVerdict::Unknown,
        };
        let c = r.witness.map_or(ptr::null_mut(), |w| Box::into_raw(Box::new(FfCode(w))));
        put(out_verdict, v, "out_verdict")?;
        put(out_code, c, "out_code")
    })
}

/// Parses code text: a `q=<int>` header line, then one word per line.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ff_code_parse(text: *const c_char, out: *mut *mut FfCode) -> FfStatus {
    guard(|| {
        let c = LevelSet::parse_code_text(read_str(text, "text")?).map_err(lib)?;
        put(out, Box::into_raw(Box::new(FfCode(c))), "out")
    })
}

/// # Safety
/// `c` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ff_code_free(c: *mut FfCode) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Number of words, or 0 for a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ff_code_len(c: *const FfCode) -> usize {
    c.as_ref().map_or(0, |c| c.0.len())
}

/// Code text form.
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ff_code_to_text(c: *const FfCode, out: *mut *mut c_char) -> FfStatus {
    guard(|| put_string(out, deref(c, "code")?.0.to_code_text()))
}

/// Whether no word is a proper prefix or suffix of another.
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ff_code_is_fix_free(c: *const FfCode, out: *mut bool) -> FfStatus {
    guard(|| put(out, is_free(&deref(c, "code")?.0, Mode::Fix), "out"))
}

/// Whether the code has exactly the counts of `p`.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ff_code_fits(c: *const FfCode, p: *const FfProfile, out: *mut bool) -> FfStatus {
    guard(|| put(out, fits(&deref(c, "code")?.0, &deref(p, "profile")?.0), "out"))
}

/// Profile with Kraft sum in `(3/4, 3/4 + eps]` that no fix-free code fits,
/// with `eps = eps_num / eps_den`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ff_counterexample(q: u32, eps_num: u64, eps_den: u64, out: *mut *mut FfProfile) -> FfStatus {
    guard(|| {
        if eps_den == 0 {
            return Err((FfStatus::InvalidArgument, "eps denominator is zero".into()));
        }
        let (p, _) = verifier::counterexample(q, &ratio(eps_num, eps_den)).map_err(lib)?;
        put(out, Box::into_raw(Box::new(FfProfile(p))), "out")
    })
}

/// su and ne of comma-separated binary lengths, as fractions.
///
/// # Safety
/// `lengths` must be a NUL-terminated string; both out-parameters writable.
#[no_mangle]
pub unsafe extern "C" fn ff_sune(lengths: *const c_char, out_su: *mut *mut c_char, out_ne: *mut *mut c_char) -> FfStatus {
    guard(|| {
        let s = LengthsSeq::parse(read_str(lengths, "lengths")?).map_err(lib)?;
        if out_su.is_null() || out_ne.is_null() {
            return Err(null("out"));
        }
        put_string(out_su, fmt_rational(&verifier::su(&s)))?;
        put_string(out_ne, fmt_rational(&verifier::ne(&s)))
    })
}
