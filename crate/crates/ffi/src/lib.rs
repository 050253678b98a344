//! C interface. Objects are opaque handles released with the matching
//! `_free` function; every call returns an [`ApgeoStatus`] and leaves a
//! message for [`apgeo_last_error`] on failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use apgeo_core::exact::IntMatrix;
use apgeo_core::filtration::{DirectN, NFunction};
use apgeo_core::geodesics::{hyperbolic, is_absolutely_primitive, is_primitive};
use apgeo_core::progressions::{
    a1_element, build_progression, build_progression_containing, verify_witness, BuildOptions, ProgressionError,
    ProgressionWitness,
};
use apgeo_core::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ApgeoStatus {
    Ok = 0,
    InvalidArgument = 1,
    VerificationFailed = 2,
    CapExceeded = 3,
    Internal = 4,
    Panic = 5,
}

/// An integer matrix.
pub struct ApgeoMatrix(IntMatrix);

/// A certified progression witness.
pub struct ApgeoWitness(ProgressionWitness);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> ApgeoStatus {
    match e {
        Error::Progression(p) if p.is_cap() => ApgeoStatus::CapExceeded,
        Error::Progression(ProgressionError::Inconsistent(_)) => ApgeoStatus::Internal,
        _ => ApgeoStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (ApgeoStatus, String)>) -> ApgeoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ApgeoStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside apgeo");
            ApgeoStatus::Panic
        }
    }
}

fn fail<E: Into<Error>>(e: E) -> (ApgeoStatus, String) {
    let e = e.into();
    (status_of(&e), e.to_string())
}

fn null_arg(name: &str) -> (ApgeoStatus, String) {
    (ApgeoStatus::InvalidArgument, format!("{name} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, (ApgeoStatus, String)> {
    if p.is_null() {
        return Err(null_arg(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (ApgeoStatus::InvalidArgument, format!("{name} is not UTF-8")))
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Message describing the last failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn apgeo_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn apgeo_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse a row-major matrix such as `"2,1;1,1"`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn apgeo_matrix_parse(text: *const c_char, out: *mut *mut ApgeoMatrix) -> ApgeoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let m: IntMatrix = read_str(text, "text")?.parse().map_err(fail)?;
        *out = Box::into_raw(Box::new(ApgeoMatrix(m)));
        Ok(())
    })
}

/// # Safety
/// `m` must come from [`apgeo_matrix_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn apgeo_matrix_free(m: *mut ApgeoMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// `"a,b;c,d"` form of the matrix; free with [`apgeo_string_free`].
///
/// # Safety
/// `m` must be a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn apgeo_matrix_to_string(m: *const ApgeoMatrix) -> *mut c_char {
    match m.as_ref() {
        Some(m) => to_c_string(m.0.to_string()),
        None => ptr::null_mut(),
    }
}

/// Primitivity flags of a hyperbolic element of `SL(2, Z)`.
///
/// # Safety
/// `m` must be a live handle; the output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn apgeo_primitivity(
    m: *const ApgeoMatrix,
    primitive: *mut bool,
    absolutely_primitive: *mut bool,
) -> ApgeoStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null_arg("m"))?;
        if primitive.is_null() || absolutely_primitive.is_null() {
            return Err(null_arg("output"));
        }
        let h = hyperbolic(&m.0).map_err(fail)?;
        *primitive = is_primitive(&h).map_err(fail)?;
        *absolutely_primitive = is_absolutely_primitive(&h).map_err(fail)?;
        Ok(())
    })
}

/// `n(gamma, eta_p^r)` for the `A1` element at the prime `p`.
///
/// # Safety
/// `gamma` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn apgeo_nfun(gamma: *const ApgeoMatrix, p: u64, r: u32, out: *mut u64) -> ApgeoStatus {
    guard(|| {
        let g = gamma.as_ref().ok_or_else(|| null_arg("gamma"))?;
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let eta = a1_element(p).map_err(fail)?;
        *out = DirectN.n_value(&g.0, &eta, r).map_err(fail)?;
        Ok(())
    })
}

unsafe fn build_with(
    gamma: *const ApgeoMatrix,
    k: usize,
    containing: bool,
    out: *mut *mut ApgeoWitness,
) -> ApgeoStatus {
    guard(|| {
        let g = gamma.as_ref().ok_or_else(|| null_arg("gamma"))?;
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let opts = BuildOptions::default();
        let w = if containing {
            build_progression_containing(&DirectN, &g.0, k, &opts)
        } else {
            build_progression(&DirectN, &g.0, k, &opts)
        }
        .map_err(fail)?;
        *out = Box::into_raw(Box::new(ApgeoWitness(w)));
        Ok(())
    })
}

/// Certified `k`-term progression over an absolutely primitive element.
///
/// # Safety
/// `gamma` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn apgeo_build_progression(
    gamma: *const ApgeoMatrix,
    k: usize,
    out: *mut *mut ApgeoWitness,
) -> ApgeoStatus {
    build_with(gamma, k, false, out)
}

/// Certified `k`-term progression containing the length of a primitive element.
///
/// # Safety
/// `gamma` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn apgeo_build_progression_containing(
    gamma: *const ApgeoMatrix,
    k: usize,
    out: *mut *mut ApgeoWitness,
) -> ApgeoStatus {
    build_with(gamma, k, true, out)
}

/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn apgeo_witness_from_json(json: *const c_char, out: *mut *mut ApgeoWitness) -> ApgeoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let w = ProgressionWitness::from_json(read_str(json, "json")?)
            .map_err(|e| (ApgeoStatus::InvalidArgument, e.to_string()))?;
        *out = Box::into_raw(Box::new(ApgeoWitness(w)));
        Ok(())
    })
}

/// Witness JSON; free with [`apgeo_string_free`].
///
/// # Safety
/// `w` must be a live witness handle.
#[no_mangle]
pub unsafe extern "C" fn apgeo_witness_to_json(w: *const ApgeoWitness) -> *mut c_char {
    match w.as_ref() {
        Some(w) => to_c_string(w.0.to_json()),
        None => ptr::null_mut(),
    }
}

/// Number of terms.
///
/// # Safety
/// `w` must be a live witness handle.
#[no_mangle]
pub unsafe extern "C" fn apgeo_witness_len(w: *const ApgeoWitness) -> usize {
    w.as_ref().map_or(0, |w| w.0.terms.len())
}

/// The constant `C` and the multiplier of term `i` (0-based).
///
/// # Safety
/// `w` must be a live witness handle; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn apgeo_witness_term(
    w: *const ApgeoWitness,
    i: usize,
    c: *mut u64,
    multiplier: *mut u64,
) -> ApgeoStatus {
    guard(|| {
        let w = w.as_ref().ok_or_else(|| null_arg("w"))?;
        if c.is_null() || multiplier.is_null() {
            return Err(null_arg("output"));
        }
        let t = w.0.terms.get(i).ok_or_else(|| {
            (ApgeoStatus::InvalidArgument, format!("term {i} out of range for {} terms", w.0.terms.len()))
        })?;
        *c = w.0.c;
        *multiplier = t.multiplier;
        Ok(())
    })
}

/// Re-check the witness. Returns `APGEO_STATUS_VERIFICATION_FAILED` and names
/// the failing checks in [`apgeo_last_error`] when it does not hold up.
///
/// # Safety
/// `w` must be a live witness handle.
#[no_mangle]
pub unsafe extern "C" fn apgeo_witness_verify(w: *const ApgeoWitness) -> ApgeoStatus {
    guard(|| {
        let w = w.as_ref().ok_or_else(|| null_arg("w"))?;
        let rep = verify_witness(&w.0);
        if rep.passed() {
            return Ok(());
        }
        let names: Vec<String> = rep.failures().map(|c| format!("{}: {}", c.name, c.detail)).collect();
        Err((ApgeoStatus::VerificationFailed, names.join("; ")))
    })
}

/// # Safety
/// `w` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn apgeo_witness_free(w: *mut ApgeoWitness) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}
