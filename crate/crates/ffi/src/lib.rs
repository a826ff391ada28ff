//! C ABI over `siegel-core`.
//!
//! Objects are opaque handles released with their `*_free` function. Every
//! fallible call returns a [`SiegelStatus`]; on failure the message is
//! available from [`siegel_last_error`]. Strings returned through out
//! pointers are owned by the caller and released with [`siegel_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use siegel_core::cmdata::CmContext;
use siegel_core::rayclass::{compute_invariants, enumerate_ray_classes, InvariantTable, RayClassTable};
use siegel_core::report::TableJson;
use siegel_core::theta::big_theta_working_prec;
use siegel_core::{big_theta, theta_eval, BigComplex, Error, SiegelPoint, ThetaChar};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SiegelStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Unsupported = 3,
    InsufficientPrecision = 4,
    PoleOfTheta = 5,
    OutOfRange = 6,
    Numerical = 7,
    Panic = 8,
}

/// Ray class group of `Q(ζ_ℓ)` modulo `N`.
pub struct SiegelRayClasses(RayClassTable);

/// Siegel invariants of every ray class, ordered by label.
pub struct SiegelInvariants(InvariantTable);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SiegelStatus {
    match e {
        Error::ClassFailure { source, .. } => status_of(source),
        Error::Parse(_)
        | Error::Dimension(_)
        | Error::InvalidLevel(_)
        | Error::DenominatorMismatch(_)
        | Error::NotUpperHalfPlane
        | Error::NotInSiegelSpace(_)
        | Error::IntegralCharacteristic
        | Error::BadCharacter => SiegelStatus::InvalidArgument,
        Error::UnsupportedClassNumber(_) => SiegelStatus::Unsupported,
        Error::InsufficientPrecision(_) => SiegelStatus::InsufficientPrecision,
        Error::PoleOfTheta(_) => SiegelStatus::PoleOfTheta,
        Error::UnknownClass(_) => SiegelStatus::OutOfRange,
        _ => SiegelStatus::Numerical,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (SiegelStatus, String)>) -> SiegelStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SiegelStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SiegelStatus::Panic
        }
    }
}

fn lift(e: Error) -> (SiegelStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (SiegelStatus, String) {
    (SiegelStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (SiegelStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (SiegelStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) {
    *out = CString::new(s).expect("no interior nul").into_raw();
}

unsafe fn write_complex(out_re: *mut *mut c_char, out_im: *mut *mut c_char, z: &BigComplex) {
    write_string(out_re, z.re().to_decimal_string());
    write_string(out_im, z.im().to_decimal_string());
}

/// Message of the last failed call on this thread, or null. Release with
/// `siegel_string_free`.
#[no_mangle]
pub extern "C" fn siegel_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn siegel_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `θ(v, Z)` as decimal strings. `characteristic` is `1/5,2/5,0,3/5` or
/// `[1/5, 2/5; 0, 3/5]`; `point` lists `re:im` entries with `,` between
/// columns and `;` between rows.
///
/// # Safety
/// Inputs must be valid NUL-terminated strings; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn siegel_theta(
    characteristic: *const c_char,
    point: *const c_char,
    prec: u32,
    out_re: *mut *mut c_char,
    out_im: *mut *mut c_char,
) -> SiegelStatus {
    guard(|| {
        if out_re.is_null() || out_im.is_null() {
            return Err(null("output"));
        }
        let v: ThetaChar = read_str(characteristic, "characteristic")?.parse().map_err(lift)?;
        let z = SiegelPoint::parse(read_str(point, "point")?, prec + 32).map_err(lift)?;
        let value = theta_eval(&v, &z, prec).map_err(lift)?;
        write_complex(out_re, out_im, &value);
        Ok(())
    })
}

/// `Θ(v, Z)` at level `level`; arguments as for `siegel_theta`.
///
/// # Safety
/// Inputs must be valid NUL-terminated strings; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn siegel_big_theta(
    characteristic: *const c_char,
    level: i64,
    point: *const c_char,
    prec: u32,
    out_re: *mut *mut c_char,
    out_im: *mut *mut c_char,
) -> SiegelStatus {
    guard(|| {
        if out_re.is_null() || out_im.is_null() {
            return Err(null("output"));
        }
        let v: ThetaChar = read_str(characteristic, "characteristic")?.parse().map_err(lift)?;
        let wp = big_theta_working_prec(v.g(), level, prec);
        let z = SiegelPoint::parse(read_str(point, "point")?, wp).map_err(lift)?;
        let value = big_theta(&v, level, &z, prec).map_err(lift)?;
        write_complex(out_re, out_im, &value);
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn siegel_ray_classes_new(ell: u32, level: i64, out: *mut *mut SiegelRayClasses) -> SiegelStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output"));
        }
        let t = enumerate_ray_classes(ell, level).map_err(lift)?;
        *out = Box::into_raw(Box::new(SiegelRayClasses(t)));
        Ok(())
    })
}

/// Number of classes, or 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn siegel_ray_classes_order(h: *const SiegelRayClasses) -> usize {
    h.as_ref().map_or(0, |t| t.0.order())
}

/// Writes up to `cap` cyclic factor orders into `out` and their count into
/// `len`.
///
/// # Safety
/// `h` must be a live handle, `out` must hold `cap` values, `len` writable.
#[no_mangle]
pub unsafe extern "C" fn siegel_ray_classes_cyclic_orders(
    h: *const SiegelRayClasses,
    out: *mut u32,
    cap: usize,
    len: *mut usize,
) -> SiegelStatus {
    guard(|| {
        let t = h.as_ref().ok_or_else(|| null("handle"))?;
        if len.is_null() || (out.is_null() && cap > 0) {
            return Err(null("output"));
        }
        let orders = t.0.cyclic_orders();
        *len = orders.len();
        for (k, &o) in orders.iter().take(cap).enumerate() {
            *out.add(k) = o;
        }
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn siegel_ray_classes_free(h: *mut SiegelRayClasses) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Computes the invariant of every ray class modulo `level` at `prec` bits.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn siegel_invariants_compute(
    ell: u32,
    level: i64,
    prec: u32,
    out: *mut *mut SiegelInvariants,
) -> SiegelStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output"));
        }
        if prec < 64 {
            return Err((SiegelStatus::InvalidArgument, format!("precision must be at least 64 bits, got {prec}")));
        }
        let ctx = CmContext::new(ell).map_err(lift)?;
        let t = enumerate_ray_classes(ell, level).map_err(lift)?;
        let inv = compute_invariants(&ctx, &t, prec).map_err(lift)?;
        *out = Box::into_raw(Box::new(SiegelInvariants(inv)));
        Ok(())
    })
}

/// Number of rows, or 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn siegel_invariants_len(h: *const SiegelInvariants) -> usize {
    h.as_ref().map_or(0, |t| t.0.rows.len())
}

/// Value of class `C_label` (labels start at 1).
///
/// # Safety
/// `h` must be a live handle; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn siegel_invariants_value(
    h: *const SiegelInvariants,
    label: usize,
    out_re: *mut *mut c_char,
    out_im: *mut *mut c_char,
) -> SiegelStatus {
    guard(|| {
        let t = h.as_ref().ok_or_else(|| null("handle"))?;
        if out_re.is_null() || out_im.is_null() {
            return Err(null("output"));
        }
        let v = t.0.value(label).ok_or_else(|| lift(Error::UnknownClass(label)))?;
        write_complex(out_re, out_im, v);
        Ok(())
    })
}

/// Characteristic numerators `k` of class `C_label`, so that `r = k / N`.
/// Writes up to `cap` values and the full count into `len`.
///
/// # Safety
/// `h` must be a live handle, `out` must hold `cap` values, `len` writable.
#[no_mangle]
pub unsafe extern "C" fn siegel_invariants_r_vector(
    h: *const SiegelInvariants,
    label: usize,
    out: *mut i64,
    cap: usize,
    len: *mut usize,
) -> SiegelStatus {
    guard(|| {
        let t = h.as_ref().ok_or_else(|| null("handle"))?;
        if len.is_null() || (out.is_null() && cap > 0) {
            return Err(null("output"));
        }
        let row = t.0.rows.get(label.wrapping_sub(1)).ok_or_else(|| lift(Error::UnknownClass(label)))?;
        *len = row.r_vector.len();
        for (k, &x) in row.r_vector.iter().take(cap).enumerate() {
            *out.add(k) = x;
        }
        Ok(())
    })
}

/// The table as JSON with keys `ell, N, prec_bits, cm_point, classes`.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn siegel_invariants_to_json(h: *const SiegelInvariants, out: *mut *mut c_char) -> SiegelStatus {
    guard(|| {
        let t = h.as_ref().ok_or_else(|| null("handle"))?;
        if out.is_null() {
            return Err(null("output"));
        }
        write_string(out, TableJson::from_table(&t.0).to_json_string());
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn siegel_invariants_free(h: *mut SiegelInvariants) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}
