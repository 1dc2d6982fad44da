//! C ABI for the mdirac toolkit.
//!
//! Conventions:
//! - Handles (`MdiracNk`) are opaque pointers created and freed here.
//! - Structured data crosses the boundary as JSON strings in the shared
//!   wire formats; returned strings are freed with [`mdirac_string_free`].
//! - Every function returns an [`MdiracStatus`]; on failure
//!   [`mdirac_last_error`] holds a thread-local message until the next call
//!   on that thread.
//! - All entry points catch panics, so no unwinding crosses the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use mdirac::dirac::build_plane_wave;
use mdirac::gamma::GammaSet;
use mdirac::jsonio::{CanonicalJson, NkPairJson, PlaneWaveJson, ValidationJson};
use mdirac::linalg::{CMat, Tolerances, C64};
use mdirac::nk::{classify, validate_consistency, validate_two_level, NkPair};
use mdirac::report::RunConfig;
use mdirac::suites;

/// Result codes crossing the C boundary.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MdiracStatus {
    /// Success.
    Ok = 0,
    /// A required pointer was null.
    NullPointer = 1,
    /// Arguments failed shape, range, or parse validation.
    InvalidInput = 2,
    /// Input JSON failed to parse or had the wrong schema.
    BadJson = 3,
    /// A mathematical precondition was violated.
    ConstraintViolation = 4,
    /// The operation ran but a verification check failed.
    CheckFailed = 5,
    /// Internal failure (panic caught at the boundary).
    Internal = 6,
}

/// Opaque parameter pair handle.
pub struct MdiracNk {
    pair: NkPair,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let clean = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(clean).unwrap_or_default();
    });
}

fn status_of(err: &mdirac::Error) -> MdiracStatus {
    use mdirac::Error::*;
    match err {
        ShapeMismatch { .. } | IndexOutOfRange(_) | InvalidTolerance(_) | BadPartition { .. } => {
            MdiracStatus::InvalidInput
        }
        NotASolution(_) => MdiracStatus::CheckFailed,
        _ => MdiracStatus::ConstraintViolation,
    }
}

fn guard(f: impl FnOnce() -> MdiracStatus) -> MdiracStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            MdiracStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, MdiracStatus> {
    if ptr.is_null() {
        set_error("null string pointer");
        return Err(MdiracStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string is not valid UTF-8");
        MdiracStatus::InvalidInput
    })
}

fn write_string(out: *mut *mut c_char, text: String) -> MdiracStatus {
    if out.is_null() {
        set_error("null output pointer");
        return MdiracStatus::NullPointer;
    }
    match CString::new(text) {
        Ok(s) => {
            unsafe { *out = s.into_raw() };
            MdiracStatus::Ok
        }
        Err(_) => {
            set_error("output contained an interior NUL");
            MdiracStatus::Internal
        }
    }
}

fn make_tol(rel: f64, rank_cut: f64) -> Result<Tolerances, MdiracStatus> {
    Tolerances::new(rel, rank_cut).map_err(|e| {
        set_error(&e.to_string());
        MdiracStatus::InvalidInput
    })
}

/// Version string of the underlying library; static storage, do not free.
#[no_mangle]
pub extern "C" fn mdirac_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

/// Message for the most recent failure on this thread; borrowed pointer,
/// valid until the next failing call on the same thread. Do not free.
#[no_mangle]
pub extern "C" fn mdirac_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Free a string returned by this library.
///
/// # Safety
/// `s` must be a pointer previously returned through an `out` parameter of
/// this library and not freed before. Null is accepted and ignored.
#[no_mangle]
pub unsafe extern "C" fn mdirac_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Free a pair handle. Null is accepted and ignored.
///
/// # Safety
/// `nk` must be a handle returned by one of the constructors and not freed
/// before.
#[no_mangle]
pub unsafe extern "C" fn mdirac_nk_free(nk: *mut MdiracNk) {
    if !nk.is_null() {
        drop(Box::from_raw(nk));
    }
}

fn emit_handle(out: *mut *mut MdiracNk, pair: NkPair) -> MdiracStatus {
    if out.is_null() {
        set_error("null output pointer");
        return MdiracStatus::NullPointer;
    }
    unsafe { *out = Box::into_raw(Box::new(MdiracNk { pair })) };
    MdiracStatus::Ok
}

unsafe fn deref_handle<'a>(nk: *const MdiracNk) -> Result<&'a NkPair, MdiracStatus> {
    if nk.is_null() {
        set_error("null pair handle");
        return Err(MdiracStatus::NullPointer);
    }
    Ok(&(*nk).pair)
}

/// Standard pair N = 1, K = 0 of size l.
///
/// # Safety
/// Pointer arguments must be valid for the duration of the call: handles
/// must come from this library, strings must be NUL-terminated, `p` must
/// point at four doubles, and `out` must be a valid location to write to.
#[no_mangle]
pub unsafe extern "C" fn mdirac_nk_standard(l: usize, rel_tol: f64, out: *mut *mut MdiracNk) -> MdiracStatus {
    guard(|| {
        if l == 0 || l > 16 {
            set_error("l must be in 1..=16");
            return MdiracStatus::InvalidInput;
        }
        let tol = match make_tol(rel_tol, 1e-10) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match NkPair::standard(l, &tol) {
            Ok(pair) => emit_handle(out, pair),
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// 4×4 Jordan-block pair from complex z and y with z² + y² = 1, y ≠ 0.
///
/// # Safety
/// Pointer arguments must be valid for the duration of the call: handles
/// must come from this library, strings must be NUL-terminated, `p` must
/// point at four doubles, and `out` must be a valid location to write to.
#[no_mangle]
pub unsafe extern "C" fn mdirac_nk_example2(
    z_re: f64,
    z_im: f64,
    y_re: f64,
    y_im: f64,
    rel_tol: f64,
    out: *mut *mut MdiracNk,
) -> MdiracStatus {
    guard(|| {
        let tol = match make_tol(rel_tol, 1e-10) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let z = C64::new(z_re, z_im);
        let y = C64::new(y_re, y_im);
        match NkPair::example2(z, y, &CMat::identity(4, 4), &tol) {
            Ok(pair) => emit_handle(out, pair),
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Load a pair from NkPair JSON ({"l", "N", "K", "provenance"}).
///
/// # Safety
/// Pointer arguments must be valid for the duration of the call: handles
/// must come from this library, strings must be NUL-terminated, `p` must
/// point at four doubles, and `out` must be a valid location to write to.
#[no_mangle]
pub unsafe extern "C" fn mdirac_nk_from_json(
    json: *const c_char,
    rel_tol: f64,
    out: *mut *mut MdiracNk,
) -> MdiracStatus {
    guard(|| {
        let text = match unsafe { read_str(json) } {
            Ok(t) => t,
            Err(s) => return s,
        };
        let tol = match make_tol(rel_tol, 1e-10) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let parsed: NkPairJson = match serde_json::from_str(text) {
            Ok(p) => p,
            Err(e) => {
                set_error(&format!("bad pair JSON: {e}"));
                return MdiracStatus::BadJson;
            }
        };
        match parsed.to_pair(&tol) {
            Ok(pair) => emit_handle(out, pair),
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Serialize a pair to NkPair JSON.
///
/// # Safety
/// Pointer arguments must be valid for the duration of the call: handles
/// must come from this library, strings must be NUL-terminated, `p` must
/// point at four doubles, and `out` must be a valid location to write to.
#[no_mangle]
pub unsafe extern "C" fn mdirac_nk_to_json(nk: *const MdiracNk, out: *mut *mut c_char) -> MdiracStatus {
    guard(|| {
        let pair = match unsafe { deref_handle(nk) } {
            Ok(p) => p,
            Err(s) => return s,
        };
        let json = serde_json::to_string_pretty(&NkPairJson::from_pair(pair))
            .expect("pair serialization cannot fail");
        write_string(out, json)
    })
}

/// Validate the consistency and two-level conditions; writes ValidationJson.
///
/// # Safety
/// Pointer arguments must be valid for the duration of the call: handles
/// must come from this library, strings must be NUL-terminated, `p` must
/// point at four doubles, and `out` must be a valid location to write to.
#[no_mangle]
pub unsafe extern "C" fn mdirac_nk_validate(
    nk: *const MdiracNk,
    rel_tol: f64,
    out: *mut *mut c_char,
) -> MdiracStatus {
    guard(|| {
        let pair = match unsafe { deref_handle(nk) } {
            Ok(p) => p,
            Err(s) => return s,
        };
        let tol = match make_tol(rel_tol, 1e-10) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let report = match validate_consistency(&pair.n, &pair.k, &tol) {
            Ok(r) => r,
            Err(e) => {
                set_error(&e.to_string());
                return status_of(&e);
            }
        };
        let two_level = match validate_two_level(&pair.n, &pair.k, &tol) {
            Ok(v) => v,
            Err(e) => {
                set_error(&e.to_string());
                return status_of(&e);
            }
        };
        let json = serde_json::to_string_pretty(&ValidationJson {
            l: pair.l,
            commutator_residual: report.commutator_residual,
            completeness_residual: report.completeness_residual,
            consistent: report.ok,
            two_level,
            hermitian: pair.hermitian,
        })
        .expect("validation serialization cannot fail");
        write_string(out, json)
    })
}

/// Recover the canonical description; writes CanonicalJson.
///
/// # Safety
/// Pointer arguments must be valid for the duration of the call: handles
/// must come from this library, strings must be NUL-terminated, `p` must
/// point at four doubles, and `out` must be a valid location to write to.
#[no_mangle]
pub unsafe extern "C" fn mdirac_nk_classify(
    nk: *const MdiracNk,
    rel_tol: f64,
    out: *mut *mut c_char,
) -> MdiracStatus {
    guard(|| {
        let pair = match unsafe { deref_handle(nk) } {
            Ok(p) => p,
            Err(s) => return s,
        };
        let tol = match make_tol(rel_tol, 1e-10) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match classify(&pair.n, &pair.k, &tol) {
            Ok(canon) => {
                let json = serde_json::to_string_pretty(&CanonicalJson::from_canonical(&canon))
                    .expect("canonical serialization cannot fail");
                write_string(out, json)
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Solve the plane-wave amplitude equation at covariant momentum p[4];
/// writes PlaneWaveJson (an empty basis is a success, with dimension 0).
///
/// # Safety
/// Pointer arguments must be valid for the duration of the call: handles
/// must come from this library, strings must be NUL-terminated, `p` must
/// point at four doubles, and `out` must be a valid location to write to.
#[no_mangle]
pub unsafe extern "C" fn mdirac_plane_wave(
    nk: *const MdiracNk,
    p: *const f64,
    m: f64,
    rel_tol: f64,
    out: *mut *mut c_char,
) -> MdiracStatus {
    guard(|| {
        let pair = match unsafe { deref_handle(nk) } {
            Ok(p) => p,
            Err(s) => return s,
        };
        if p.is_null() {
            set_error("null momentum pointer");
            return MdiracStatus::NullPointer;
        }
        if !m.is_finite() || m < 0.0 {
            set_error("mass must be finite and nonnegative");
            return MdiracStatus::InvalidInput;
        }
        let tol = match make_tol(rel_tol, 1e-10) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let momentum = unsafe { [*p, *p.add(1), *p.add(2), *p.add(3)] };
        if momentum.iter().any(|v| !v.is_finite()) {
            set_error("momentum components must be finite");
            return MdiracStatus::InvalidInput;
        }
        let gamma = GammaSet::dirac();
        let sol = build_plane_wave(momentum, pair, m, &tol, &gamma);
        let json = serde_json::to_string_pretty(&PlaneWaveJson::from_solution(&sol))
            .expect("solution serialization cannot fail");
        write_string(out, json)
    })
}

/// Run the full verification battery; writes the JSON report. Returns
/// `CheckFailed` when any check fails (the report is still written).
///
/// # Safety
/// Pointer arguments must be valid for the duration of the call: handles
/// must come from this library, strings must be NUL-terminated, `p` must
/// point at four doubles, and `out` must be a valid location to write to.
#[no_mangle]
pub unsafe extern "C" fn mdirac_verify_all(
    seed: u64,
    l: usize,
    trials: usize,
    sample_points: usize,
    rel_tol: f64,
    rank_cut: f64,
    out: *mut *mut c_char,
) -> MdiracStatus {
    guard(|| {
        let tol = match make_tol(rel_tol, rank_cut) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let cfg = RunConfig {
            l,
            seed,
            trials,
            sample_points,
            tol,
            timings: false,
        };
        match suites::verify_all(&cfg) {
            Ok(report) => {
                let all_passed = report.all_passed();
                let status = write_string(out, report.to_json());
                if status != MdiracStatus::Ok {
                    return status;
                }
                if all_passed {
                    MdiracStatus::Ok
                } else {
                    set_error("one or more verification checks failed");
                    MdiracStatus::CheckFailed
                }
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn take_string(ptr: *mut c_char) -> String {
        assert!(!ptr.is_null());
        let s = unsafe { CStr::from_ptr(ptr) }.to_str().unwrap().to_owned();
        unsafe { mdirac_string_free(ptr) };
        s
    }

    #[test]
    fn version_is_static() {
        let v = unsafe { CStr::from_ptr(mdirac_version()) };
        assert!(!v.to_str().unwrap().is_empty());
    }

    #[test]
    fn jordan_pair_round_trip_through_abi() {
        let mut handle: *mut MdiracNk = ptr::null_mut();
        let status = unsafe { mdirac_nk_example2(0.0, 0.0, 1.0, 0.0, 1e-10, &mut handle) };
        assert_eq!(status, MdiracStatus::Ok);

        let mut json: *mut c_char = ptr::null_mut();
        assert_eq!(unsafe { mdirac_nk_to_json(handle, &mut json) }, MdiracStatus::Ok);
        let text = take_string(json);
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["l"], 4);
        assert_eq!(parsed["K"]["re"][0][2], -0.5);

        // Load it back through the JSON constructor.
        let c_text = CString::new(text).unwrap();
        let mut reloaded: *mut MdiracNk = ptr::null_mut();
        assert_eq!(
            unsafe { mdirac_nk_from_json(c_text.as_ptr(), 1e-10, &mut reloaded) },
            MdiracStatus::Ok
        );

        let mut validation: *mut c_char = ptr::null_mut();
        assert_eq!(
            unsafe { mdirac_nk_validate(reloaded, 1e-10, &mut validation) },
            MdiracStatus::Ok
        );
        let v: serde_json::Value = serde_json::from_str(&take_string(validation)).unwrap();
        assert_eq!(v["consistent"], true);
        assert_eq!(v["two_level"], false);

        unsafe {
            mdirac_nk_free(handle);
            mdirac_nk_free(reloaded);
        }
    }

    #[test]
    fn classify_standard_pair_through_abi() {
        let mut handle: *mut MdiracNk = ptr::null_mut();
        assert_eq!(
            unsafe { mdirac_nk_standard(3, 1e-10, &mut handle) },
            MdiracStatus::Ok
        );
        let mut json: *mut c_char = ptr::null_mut();
        assert_eq!(unsafe { mdirac_nk_classify(handle, 1e-10, &mut json) }, MdiracStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(v["form"], "angles");
        assert_eq!(v["p"], 3);
        unsafe { mdirac_nk_free(handle) };
    }

    #[test]
    fn classify_rejects_jordan_pair() {
        let mut handle: *mut MdiracNk = ptr::null_mut();
        assert_eq!(
            unsafe { mdirac_nk_example2(0.0, 0.0, 1.0, 0.0, 1e-10, &mut handle) },
            MdiracStatus::Ok
        );
        let mut json: *mut c_char = ptr::null_mut();
        let status = unsafe { mdirac_nk_classify(handle, 1e-10, &mut json) };
        assert_eq!(status, MdiracStatus::ConstraintViolation);
        let msg = unsafe { CStr::from_ptr(mdirac_last_error()) };
        assert!(!msg.to_str().unwrap().is_empty());
        unsafe { mdirac_nk_free(handle) };
    }

    #[test]
    fn plane_wave_dimensions_through_abi() {
        let mut handle: *mut MdiracNk = ptr::null_mut();
        assert_eq!(unsafe { mdirac_nk_standard(1, 1e-10, &mut handle) }, MdiracStatus::Ok);
        let p = [1.0f64, 0.0, 0.0, 0.0];
        let mut json: *mut c_char = ptr::null_mut();
        assert_eq!(
            unsafe { mdirac_plane_wave(handle, p.as_ptr(), 1.0, 1e-10, &mut json) },
            MdiracStatus::Ok
        );
        let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(v["dimension"], 2);

        // Off shell: still Ok, dimension 0.
        let off = [1.9f64, 0.0, 0.0, 0.0];
        let mut json2: *mut c_char = ptr::null_mut();
        assert_eq!(
            unsafe { mdirac_plane_wave(handle, off.as_ptr(), 1.0, 1e-10, &mut json2) },
            MdiracStatus::Ok
        );
        let v2: serde_json::Value = serde_json::from_str(&take_string(json2)).unwrap();
        assert_eq!(v2["dimension"], 0);
        unsafe { mdirac_nk_free(handle) };
    }

    #[test]
    fn null_pointers_are_rejected() {
        assert_eq!(
            unsafe { mdirac_nk_standard(2, 1e-10, ptr::null_mut()) },
            MdiracStatus::NullPointer
        );
        let mut json: *mut c_char = ptr::null_mut();
        assert_eq!(
            unsafe { mdirac_nk_to_json(ptr::null(), &mut json) },
            MdiracStatus::NullPointer
        );
        assert_eq!(
            unsafe { mdirac_nk_from_json(ptr::null(), 1e-10, ptr::null_mut()) },
            MdiracStatus::NullPointer
        );
    }

    #[test]
    fn bad_json_is_reported() {
        let text = CString::new("{ not json").unwrap();
        let mut handle: *mut MdiracNk = ptr::null_mut();
        assert_eq!(
            unsafe { mdirac_nk_from_json(text.as_ptr(), 1e-10, &mut handle) },
            MdiracStatus::BadJson
        );
    }

    #[test]
    fn verify_all_small_run_through_abi() {
        let mut json: *mut c_char = ptr::null_mut();
        let status = unsafe { mdirac_verify_all(7, 3, 2, 2, 1e-10, 1e-10, &mut json) };
        assert_eq!(status, MdiracStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(v["failed"], 0);

        // Impossible tolerance: report written, CheckFailed returned.
        let mut json2: *mut c_char = ptr::null_mut();
        let status = unsafe { mdirac_verify_all(7, 3, 2, 2, 1e-30, 1e-10, &mut json2) };
        assert_eq!(status, MdiracStatus::CheckFailed);
        let v2: serde_json::Value = serde_json::from_str(&take_string(json2)).unwrap();
        assert!(v2["failed"].as_u64().unwrap() > 0);
    }
}
