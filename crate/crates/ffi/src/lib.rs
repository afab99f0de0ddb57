//! C ABI over `strandfold`.
//!
//! Handles are opaque and owned by the caller: every `*_parse` / `sf_mfe`
//! success must be paired with the matching `*_free`. Strings returned by
//! the library are released with `sf_string_free`. On failure a call returns
//! a non-zero [`SfStatus`] and `sf_last_error` describes it (per thread).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use strandfold::backtrack::{MfeResult, SearchError, SearchOptions};
use strandfold::energy::{Energy, LinearParams};
use strandfold::pipeline::{mfe_all_orderings, snmfe_over};
use strandfold::strands::{circular_permutations, parse_system, PairingRule, StrandOrdering, StrandSystem};
use strandfold::structure::to_dot_bracket;

/// Allow G-U / G-T pairs.
pub const SF_FLAG_WOBBLE: u32 = 1;
/// Bounded candidate storage during the search.
pub const SF_FLAG_LOW_MEM: u32 = 2;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    ParamsError = 4,
    Infeasible = 5,
    SearchFailed = 6,
    Panic = 7,
}

/// A parsed strand system.
pub struct SfSystem {
    system: StrandSystem,
}

/// Energy parameters.
pub struct SfParams {
    params: LinearParams,
}

/// Symmetry-corrected optimum with its witness structure.
pub struct SfResult {
    result: MfeResult,
    ordering: StrandOrdering,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: SfStatus, msg: impl AsRef<str>) -> SfStatus {
    set_error(msg.as_ref());
    status
}

fn guard(f: impl FnOnce() -> SfStatus) -> SfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == SfStatus::Ok {
                set_error("");
            }
            s
        }
        Err(_) => fail(SfStatus::Panic, "internal panic"),
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, SfStatus> {
    if p.is_null() {
        return Err(fail(SfStatus::NullArgument, "null string"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(SfStatus::InvalidUtf8, "string is not UTF-8"))
}

fn rule_of(flags: u32) -> PairingRule {
    if flags & SF_FLAG_WOBBLE != 0 {
        PairingRule::WITH_WOBBLE
    } else {
        PairingRule::WATSON_CRICK
    }
}

unsafe fn params_or_default(params: *const SfParams) -> LinearParams {
    if params.is_null() {
        LinearParams::test_model()
    } else {
        (*params).params.clone()
    }
}

fn owned_string(s: &str) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn sf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn sf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a strand system (`name sequence count` lines).
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_system_parse(text_ptr: *const c_char, out: *mut *mut SfSystem) -> SfStatus {
    guard(|| {
        if out.is_null() {
            return fail(SfStatus::NullArgument, "null output pointer");
        }
        *out = ptr::null_mut();
        let t = match text(text_ptr) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_system(t) {
            Ok(system) => {
                *out = Box::into_raw(Box::new(SfSystem { system }));
                SfStatus::Ok
            }
            Err(e) => fail(SfStatus::ParseError, e.to_string()),
        }
    })
}

/// # Safety
/// `system` must come from `sf_system_parse` (or be null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sf_system_free(system: *mut SfSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Number of distinct circular orderings; 0 for a null handle.
///
/// # Safety
/// `system` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sf_system_ordering_count(system: *const SfSystem) -> usize {
    if system.is_null() {
        return 0;
    }
    circular_permutations(&(*system).system).len()
}

/// Parses `key=value` energy parameters over the built-in defaults.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_params_parse(text_ptr: *const c_char, out: *mut *mut SfParams) -> SfStatus {
    guard(|| {
        if out.is_null() {
            return fail(SfStatus::NullArgument, "null output pointer");
        }
        *out = ptr::null_mut();
        let t = match text(text_ptr) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match LinearParams::parse(t) {
            Ok(params) => {
                *out = Box::into_raw(Box::new(SfParams { params }));
                SfStatus::Ok
            }
            Err(e) => fail(SfStatus::ParamsError, e.to_string()),
        }
    })
}

/// # Safety
/// `params` must come from `sf_params_parse` (or be null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sf_params_free(params: *mut SfParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Symmetry-corrected MFE over every ordering. `params` may be null for the
/// built-in model; `flags` combines `SF_FLAG_*`.
///
/// # Safety
/// Handles must be live; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_mfe(system: *const SfSystem, params: *const SfParams, flags: u32, out: *mut *mut SfResult) -> SfStatus {
    guard(|| {
        if out.is_null() || system.is_null() {
            return fail(SfStatus::NullArgument, "null argument");
        }
        *out = ptr::null_mut();
        let model = params_or_default(params);
        let sys = &(*system).system;
        let opts = SearchOptions { low_mem: flags & SF_FLAG_LOW_MEM != 0, ..Default::default() };
        match mfe_all_orderings(sys, &model, rule_of(flags), opts) {
            Ok(res) => {
                let ordering = circular_permutations(sys).swap_remove(res.best);
                let result = res.winner().clone();
                *out = Box::into_raw(Box::new(SfResult { result, ordering }));
                SfStatus::Ok
            }
            Err(SearchError::Infeasible) => fail(SfStatus::Infeasible, "no connected structure exists"),
            Err(e) => fail(SfStatus::SearchFailed, e.to_string()),
        }
    })
}

/// Symmetry-naive minimum over every ordering, in 0.01 kcal/mol.
///
/// # Safety
/// Handles must be live; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_snmfe(system: *const SfSystem, params: *const SfParams, flags: u32, out: *mut i32) -> SfStatus {
    guard(|| {
        if out.is_null() || system.is_null() {
            return fail(SfStatus::NullArgument, "null argument");
        }
        let model = params_or_default(params);
        let rows = snmfe_over(&circular_permutations(&(*system).system), &model, rule_of(flags));
        match rows.iter().filter_map(|r| r.snmfe).min() {
            Some(e) => {
                *out = e as Energy;
                SfStatus::Ok
            }
            None => fail(SfStatus::Infeasible, "no connected structure exists"),
        }
    })
}

/// # Safety
/// `result` must come from `sf_mfe` (or be null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sf_result_free(result: *mut SfResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Total free energy in 0.01 kcal/mol, symmetry term included; NaN for null.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sf_result_energy(result: *const SfResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.result.energy)
}

/// Loop energy sum in 0.01 kcal/mol.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sf_result_loops(result: *const SfResult) -> i32 {
    result.as_ref().map_or(0, |r| r.result.breakdown.loops)
}

/// Association penalty in 0.01 kcal/mol.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sf_result_association(result: *const SfResult) -> i32 {
    result.as_ref().map_or(0, |r| r.result.breakdown.association)
}

/// Symmetry-naive minimum of the winning ordering.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sf_result_snmfe(result: *const SfResult) -> i32 {
    result.as_ref().map_or(0, |r| r.result.snmfe)
}

/// Rotational symmetry degree R of the witness; 0 for null.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sf_result_symmetry(result: *const SfResult) -> usize {
    result.as_ref().map_or(0, |r| r.result.breakdown.symmetry_degree)
}

/// Witness in dot-bracket notation; free with `sf_string_free`.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sf_result_structure(result: *const SfResult) -> *mut c_char {
    match result.as_ref() {
        Some(r) => owned_string(&to_dot_bracket(&r.result.structure, &r.ordering).unwrap_or_default()),
        None => ptr::null_mut(),
    }
}

/// Label of the winning ordering; free with `sf_string_free`.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sf_result_ordering(result: *const SfResult) -> *mut c_char {
    match result.as_ref() {
        Some(r) => owned_string(r.ordering.label()),
        None => ptr::null_mut(),
    }
}

/// Full result as JSON; free with `sf_string_free`.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sf_result_json(result: *const SfResult) -> *mut c_char {
    match result.as_ref() {
        Some(r) => owned_string(&serde_json::to_string(&r.result).unwrap_or_default()),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `s` must come from this library (or be null) and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
