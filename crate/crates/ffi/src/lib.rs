//! C interface to the rewrite engine, verifier and heuristic prover.
//!
//! Programs cross the boundary as opaque `PqProgram` handles. Every fallible
//! function returns a `PqStatus`; on failure a description is available from
//! `pq_last_error()` on the same thread. Strings returned through `char **`
//! out-parameters are owned by the caller and released with
//! `pq_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use progeq::lang::{parse_prefix, Program};
use progeq::rewrite::{parse_rule, RewriteRule, Rewriter};
use progeq::search::{prove, HeuristicPolicy, SearchConfig};
use progeq::verify::{verify, VerifyStatus};

/// Result codes shared by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PqStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    RuleError = 4,
    NotApplicable = 5,
    NotProven = 6,
    Internal = 7,
}

/// An immutable, parsed program.
pub struct PqProgram(Program);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let text = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

struct Failure(PqStatus, String);

impl Failure {
    fn new(status: PqStatus, msg: impl ToString) -> Failure {
        Failure(status, msg.to_string())
    }
}

/// Runs `body`, converting errors and panics into a status and the thread's
/// last error message.
fn guarded(body: impl FnOnce() -> Result<(), Failure>) -> PqStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            PqStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal error");
            PqStatus::Internal
        }
    }
}

unsafe fn c_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure::new(PqStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(s).to_str().map_err(|e| Failure::new(PqStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn program<'a>(p: *const PqProgram, what: &str) -> Result<&'a Program, Failure> {
    p.as_ref().map(|h| &h.0).ok_or_else(|| Failure::new(PqStatus::NullArgument, format!("{what} is null")))
}

unsafe fn out_ptr<'a, T>(out: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    out.as_mut().ok_or_else(|| Failure::new(PqStatus::NullArgument, format!("{what} is null")))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

fn parse_rules(text: &str) -> Result<Vec<RewriteRule>, Failure> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| parse_rule(l).map_err(|e| Failure::new(PqStatus::RuleError, format!("`{l}`: {e}"))))
        .collect()
}

fn join_rules(rules: &[RewriteRule]) -> String {
    rules.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}

/// Message describing the most recent failure on this thread, or an empty
/// string. Valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn pq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn pq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses prefix text such as `s01 === ( +s s02 s03 ) ;`.
///
/// # Safety
/// `text` must be null or a valid NUL-terminated string; `out` must be null
/// or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pq_program_parse(text: *const c_char, out: *mut *mut PqProgram) -> PqStatus {
    guarded(|| {
        let out = out_ptr(out, "out")?;
        let src = c_str(text, "text")?;
        let p = parse_prefix(src).map_err(|e| Failure::new(PqStatus::ParseError, e))?;
        *out = Box::into_raw(Box::new(PqProgram(p)));
        Ok(())
    })
}

/// Releases a program. Null is ignored.
///
/// # Safety
/// `p` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pq_program_free(p: *mut PqProgram) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Writes the program's prefix text to `*out`.
///
/// # Safety
/// `p` must be null or a live handle; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pq_program_print(p: *const PqProgram, out: *mut *mut c_char) -> PqStatus {
    guarded(|| {
        let out = out_ptr(out, "out")?;
        *out = into_c_string(program(p, "program")?.to_prefix());
        Ok(())
    })
}

/// Number of statements in the program, or 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pq_program_len(p: *const PqProgram) -> usize {
    p.as_ref().map_or(0, |h| h.0.len())
}

/// Applies one rule such as `stm1 Commute N`, writing a new handle to `*out`.
/// Returns `NotApplicable` when the rule is not legal on the program.
///
/// # Safety
/// Pointers must be null or valid as described for the other functions.
#[no_mangle]
pub unsafe extern "C" fn pq_program_apply(
    p: *const PqProgram,
    rule: *const c_char,
    out: *mut *mut PqProgram,
) -> PqStatus {
    guarded(|| {
        let out = out_ptr(out, "out")?;
        let p = program(p, "program")?;
        let rule = parse_rule(c_str(rule, "rule")?).map_err(|e| Failure::new(PqStatus::RuleError, e))?;
        let q = Rewriter::default()
            .apply(&rule, p)
            .map_err(|e| Failure::new(PqStatus::NotApplicable, format!("{rule}: {e}")))?;
        *out = Box::into_raw(Box::new(PqProgram(q)));
        Ok(())
    })
}

/// Writes every legal rule on the program to `*out`, one per line.
///
/// # Safety
/// `p` must be null or a live handle; `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn pq_program_enumerate(p: *const PqProgram, out: *mut *mut c_char) -> PqStatus {
    guarded(|| {
        let out = out_ptr(out, "out")?;
        let rules = Rewriter::default().enumerate_legal(program(p, "program")?);
        *out = into_c_string(join_rules(&rules));
        Ok(())
    })
}

/// Checks that `rules` (one per line, `#` comments allowed) rewrites `a`
/// into `b`. Returns `Ok` when proven and `NotProven` otherwise.
///
/// # Safety
/// Pointers must be null or valid as described for the other functions.
#[no_mangle]
pub unsafe extern "C" fn pq_verify(a: *const PqProgram, b: *const PqProgram, rules: *const c_char) -> PqStatus {
    guarded(|| {
        let (a, b) = (program(a, "a")?, program(b, "b")?);
        let seq = parse_rules(c_str(rules, "rules")?)?;
        match verify(a, b, &seq).status {
            VerifyStatus::Proven => Ok(()),
            status => Err(Failure::new(PqStatus::NotProven, status)),
        }
    })
}

/// Searches for a proof with the built-in heuristic policy. On success the
/// proof is written to `*out`, one rule per line; otherwise the status is
/// `NotProven` and `*out` is untouched.
///
/// # Safety
/// Pointers must be null or valid as described for the other functions.
#[no_mangle]
pub unsafe extern "C" fn pq_prove_heuristic(
    a: *const PqProgram,
    b: *const PqProgram,
    beam: usize,
    intermediates: usize,
    max_steps: usize,
    out: *mut *mut c_char,
) -> PqStatus {
    guarded(|| {
        let out = out_ptr(out, "out")?;
        let (a, b) = (program(a, "a")?, program(b, "b")?);
        if beam == 0 || intermediates == 0 {
            return Err(Failure::new(PqStatus::RuleError, "beam and intermediates must be positive"));
        }
        let cfg = SearchConfig { max_steps, ..SearchConfig::new(beam, intermediates) };
        let result = prove(a, b, &HeuristicPolicy::default(), &cfg).map_err(|e| Failure::new(PqStatus::Internal, e))?;
        match result.proof() {
            Some(seq) => {
                *out = into_c_string(join_rules(seq));
                Ok(())
            }
            None => Err(Failure::new(PqStatus::NotProven, result.status_name())),
        }
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
