//! C ABI over `affine_caps`.
//!
//! Pairs are opaque handles created by [`ac_pair_new`] and released with
//! [`ac_pair_free`]. Every fallible call returns an [`AcStatus`] and
//! writes its result through an out-pointer; strings handed out must be
//! released with [`ac_string_free`]. Panics never cross the boundary.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use affine_caps::capset::{build_cap, eg_constant, size_estimate, verify_cap, ENUMERATION_LIMIT};
use affine_caps::json::to_canonical_string;
use affine_caps::search::{check_pair, verify_bundle, CertificateBundle};
use affine_caps::zp::{equation_classes, DigitSetPair, Prime};
use affine_caps::CapError;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidPrime = 2,
    InvalidDigits = 3,
    Divisibility = 4,
    TooLarge = 5,
    Parse = 6,
    Error = 7,
    Panic = 8,
}

impl From<&CapError> for AcStatus {
    fn from(e: &CapError) -> Self {
        match e {
            CapError::NotPrime(_) | CapError::ModulusTooSmall(_) => AcStatus::InvalidPrime,
            CapError::DigitOutOfRange { .. }
            | CapError::DuplicateDigit(_)
            | CapError::TooFewDigits { .. }
            | CapError::FixedNotInDigits(_)
            | CapError::DegenerateEquation { .. } => AcStatus::InvalidDigits,
            CapError::Divisibility { .. } => AcStatus::Divisibility,
            CapError::EnumerationTooLarge { .. } | CapError::InstanceTooLarge(_) => AcStatus::TooLarge,
            CapError::Parse(_) | CapError::Json(_) => AcStatus::Parse,
            _ => AcStatus::Error,
        }
    }
}

/// Opaque digit-set pair.
pub struct AcPair {
    inner: DigitSetPair,
}

fn guard(f: impl FnOnce() -> AcStatus) -> AcStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(AcStatus::Panic)
}

unsafe fn slice_arg<'a>(ptr: *const u32, len: usize) -> Option<&'a [u32]> {
    if len == 0 {
        Some(&[])
    } else if ptr.is_null() {
        None
    } else {
        Some(slice::from_raw_parts(ptr, len))
    }
}

fn give_string(s: String, out: *mut *mut c_char) -> AcStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            AcStatus::Ok
        }
        Err(_) => AcStatus::Error,
    }
}

/// Creates a pair. `fixed` may be null when `n_fixed` is 0.
///
/// # Safety
/// `digits` and `fixed` must point to `n_digits` and `n_fixed` readable
/// values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_pair_new(
    p: u32,
    digits: *const u32,
    n_digits: usize,
    fixed: *const u32,
    n_fixed: usize,
    out: *mut *mut AcPair,
) -> AcStatus {
    guard(|| {
        if out.is_null() {
            return AcStatus::NullPointer;
        }
        let (Some(d), Some(f)) = (slice_arg(digits, n_digits), slice_arg(fixed, n_fixed)) else {
            return AcStatus::NullPointer;
        };
        let pair = Prime::new(p).and_then(|p| DigitSetPair::new(p, d, f));
        match pair {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(AcPair { inner }));
                AcStatus::Ok
            }
            Err(e) => AcStatus::from(&e),
        }
    })
}

/// # Safety
/// `pair` must come from [`ac_pair_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ac_pair_free(pair: *mut AcPair) {
    if !pair.is_null() {
        drop(Box::from_raw(pair));
    }
}

/// # Safety
/// `pair` must be a live handle and `admissible` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_pair_check(pair: *const AcPair, admissible: *mut bool) -> AcStatus {
    guard(|| {
        let (Some(pair), false) = (pair.as_ref(), admissible.is_null()) else {
            return AcStatus::NullPointer;
        };
        *admissible = check_pair(&pair.inner, true).admissible;
        AcStatus::Ok
    })
}

/// Full certificate bundle as canonical JSON.
///
/// # Safety
/// `pair` must be a live handle and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_pair_check_json(pair: *const AcPair, out_json: *mut *mut c_char) -> AcStatus {
    guard(|| {
        let (Some(pair), false) = (pair.as_ref(), out_json.is_null()) else {
            return AcStatus::NullPointer;
        };
        match to_canonical_string(&check_pair(&pair.inner, false)) {
            Ok(s) => give_string(s, out_json),
            Err(e) => AcStatus::from(&e),
        }
    })
}

/// Exact size of `S(D, D', n)` as a decimal string.
///
/// # Safety
/// `pair` must be a live handle and `out_decimal` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_cap_count(pair: *const AcPair, n: usize, out_decimal: *mut *mut c_char) -> AcStatus {
    guard(|| {
        let (Some(pair), false) = (pair.as_ref(), out_decimal.is_null()) else {
            return AcStatus::NullPointer;
        };
        match size_estimate(&pair.inner, n) {
            Ok(est) => give_string(est.exact_count.to_string(), out_decimal),
            Err(e) => AcStatus::from(&e),
        }
    })
}

/// Builds `S(D, D', n)` and checks it for collinear triples.
///
/// # Safety
/// `pair` must be a live handle and `is_cap` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_cap_verify(pair: *const AcPair, n: usize, is_cap: *mut bool) -> AcStatus {
    guard(|| {
        let (Some(pair), false) = (pair.as_ref(), is_cap.is_null()) else {
            return AcStatus::NullPointer;
        };
        match build_cap(&pair.inner, n, ENUMERATION_LIMIT) {
            Ok(cap) => {
                *is_cap = verify_cap(&cap.points).is_ok();
                AcStatus::Ok
            }
            Err(e) => AcStatus::from(&e),
        }
    })
}

/// Re-checks a bundle produced by [`ac_pair_check_json`] or the CLI.
///
/// # Safety
/// `json` must be a NUL-terminated string and `ok` writable.
#[no_mangle]
pub unsafe extern "C" fn ac_certificate_verify_json(json: *const c_char, ok: *mut bool) -> AcStatus {
    guard(|| {
        if json.is_null() || ok.is_null() {
            return AcStatus::NullPointer;
        }
        let Ok(text) = CStr::from_ptr(json).to_str() else {
            return AcStatus::Parse;
        };
        let bundle: CertificateBundle = match serde_json::from_str(text) {
            Ok(b) => b,
            Err(_) => return AcStatus::Parse,
        };
        match verify_bundle(&bundle) {
            Ok(v) => {
                *ok = v;
                AcStatus::Ok
            }
            Err(e) => AcStatus::from(&e),
        }
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_equation_class_count(p: u32, out: *mut usize) -> AcStatus {
    guard(|| {
        if out.is_null() {
            return AcStatus::NullPointer;
        }
        match Prime::new(p) {
            Ok(p) => {
                *out = equation_classes(p).classes.len();
                AcStatus::Ok
            }
            Err(e) => AcStatus::from(&e),
        }
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_eg_constant(p: u32, out: *mut f64) -> AcStatus {
    guard(|| {
        if out.is_null() {
            return AcStatus::NullPointer;
        }
        if !affine_caps::zp::is_prime(p) {
            return AcStatus::InvalidPrime;
        }
        *out = eg_constant(p);
        AcStatus::Ok
    })
}

/// # Safety
/// `s` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn ac_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn ac_status_message(status: AcStatus) -> *const c_char {
    let msg: &'static [u8] = match status {
        AcStatus::Ok => b"ok\0",
        AcStatus::NullPointer => b"null pointer argument\0",
        AcStatus::InvalidPrime => b"modulus is not a prime >= 5\0",
        AcStatus::InvalidDigits => b"invalid digit set\0",
        AcStatus::Divisibility => b"n is not a multiple of |D|\0",
        AcStatus::TooLarge => b"instance too large\0",
        AcStatus::Parse => b"malformed input\0",
        AcStatus::Error => b"error\0",
        AcStatus::Panic => b"internal panic\0",
    };
    msg.as_ptr().cast()
}
