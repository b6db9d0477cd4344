//! C ABI over `grcob`.
//!
//! Every object crosses the boundary as an opaque handle created by a
//! `*_from_*` or operation call and released with the matching `*_free`.
//! Calls return a [`GrcobStatus`]; on failure the message is available from
//! [`grcob_last_error`] until the next failing call on the same thread.
//! Strings returned through `char **` out-parameters are owned by the caller
//! and released with [`grcob_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use grcob::category::{compose, tensor};
use grcob::collapse::{minimize_marked, reduce};
use grcob::det::{xi_compose_sign, xi_object};
use grcob::frobenius::{evaluate, FrobeniusAlgebra, FrobeniusError, GradedTensorMap};
use grcob::graph::GraphError;
use grcob::spine::{spine_chain_complex, SpineError};
use grcob::{Error, MarkedGaf};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrcobStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    MalformedJson = 3,
    InvalidGaf = 4,
    Mismatch = 5,
    InvalidAlgebra = 6,
    RankUnsupported = 7,
    Panic = 8,
}

/// A marked gaf `B -> A`.
pub struct GrcobGaf(MarkedGaf);

/// A graded commutative Frobenius algebra.
pub struct GrcobAlgebra(FrobeniusAlgebra);

/// The value of an evaluation, with the algebra it lives over.
pub struct GrcobMap {
    map: GradedTensorMap,
    algebra: FrobeniusAlgebra,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> GrcobStatus {
    match e {
        Error::Json(_) => GrcobStatus::MalformedJson,
        Error::Graph(GraphError::Invalid(_)) => GrcobStatus::InvalidGaf,
        Error::Frobenius(FrobeniusError::Json(_)) => GrcobStatus::MalformedJson,
        Error::Frobenius(FrobeniusError::SourceMismatch { .. }) => GrcobStatus::Mismatch,
        Error::Frobenius(_) => GrcobStatus::InvalidAlgebra,
        Error::Spine(SpineError::RankTooLarge(_) | SpineError::RankTooSmall(_)) => GrcobStatus::RankUnsupported,
        _ => GrcobStatus::Mismatch,
    }
}

enum Fail {
    Status(GrcobStatus, String),
    Core(Error),
}

impl<E: Into<Error>> From<E> for Fail {
    fn from(e: E) -> Self {
        Fail::Core(e.into())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> GrcobStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GrcobStatus::Ok,
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".to_string());
            GrcobStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail::Status(GrcobStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Status(GrcobStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = CString::new(s).expect("json has no nul bytes").into_raw();
    Ok(())
}

unsafe fn put_value<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = v;
    Ok(())
}

/// Message of the last failing call on this thread, or null.
#[no_mangle]
pub extern "C" fn grcob_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn grcob_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn grcob_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `json` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grcob_gaf_from_json(json: *const c_char, out: *mut *mut GrcobGaf) -> GrcobStatus {
    guard(|| {
        let m = MarkedGaf::from_json(text(json, "json")?)?;
        put(out, GrcobGaf(m))
    })
}

/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grcob_gaf_to_json(g: *const GrcobGaf, out: *mut *mut c_char) -> GrcobStatus {
    guard(|| put_string(out, handle(g, "gaf")?.0.to_json()))
}

/// # Safety
/// `g` must be null or a handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn grcob_gaf_free(g: *mut GrcobGaf) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Relative Euler characteristic `|V| - |E|`.
///
/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grcob_gaf_chi(g: *const GrcobGaf, out: *mut i64) -> GrcobStatus {
    guard(|| put_value(out, handle(g, "gaf")?.0.euler_char_rel()))
}

/// `g ∘ h` for `g: B -> A`, `h: C -> B`.
///
/// # Safety
/// `g`, `h` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grcob_compose(g: *const GrcobGaf, h: *const GrcobGaf, out: *mut *mut GrcobGaf) -> GrcobStatus {
    guard(|| {
        let k = compose(&handle(g, "g")?.0, &handle(h, "h")?.0)?;
        put(out, GrcobGaf(k))
    })
}

/// # Safety
/// `g`, `h` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grcob_tensor(g: *const GrcobGaf, h: *const GrcobGaf, out: *mut *mut GrcobGaf) -> GrcobStatus {
    guard(|| {
        let k = tensor(&handle(g, "g")?.0, &handle(h, "h")?.0)?;
        put(out, GrcobGaf(k))
    })
}

/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grcob_reduce(g: *const GrcobGaf, out: *mut *mut GrcobGaf) -> GrcobStatus {
    guard(|| put(out, GrcobGaf(reduce(&handle(g, "gaf")?.0))))
}

/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grcob_minimize(g: *const GrcobGaf, out: *mut *mut GrcobGaf) -> GrcobStatus {
    guard(|| put(out, GrcobGaf(minimize_marked(&handle(g, "gaf")?.0).0)))
}

/// Degree of the determinant line `ξ_d`.
///
/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grcob_xi_degree(g: *const GrcobGaf, d: i64, out: *mut i64) -> GrcobStatus {
    guard(|| put_value(out, xi_object(handle(g, "gaf")?.0.gaf(), d).degree))
}

/// Sign (+1 or -1) of the composition isomorphism for `g ∘ h`.
///
/// # Safety
/// `g`, `h` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grcob_xi_compose_sign(g: *const GrcobGaf, h: *const GrcobGaf, d: i64, out: *mut i32) -> GrcobStatus {
    guard(|| {
        let s = xi_compose_sign(&handle(g, "g")?.0, &handle(h, "h")?.0, d)?;
        put_value(out, s.as_i64() as i32)
    })
}

/// One of the bundled algebras: `s2`, `t2`, `cp2`, `s1`, `ground`.
///
/// # Safety
/// `name` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grcob_algebra_bundled(name: *const c_char, out: *mut *mut GrcobAlgebra) -> GrcobStatus {
    guard(|| {
        let a = FrobeniusAlgebra::bundled(text(name, "name")?)?;
        put(out, GrcobAlgebra(a))
    })
}

/// # Safety
/// `json` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grcob_algebra_from_json(json: *const c_char, out: *mut *mut GrcobAlgebra) -> GrcobStatus {
    guard(|| {
        let a = FrobeniusAlgebra::from_json(text(json, "json")?)?;
        let v = a.validate();
        if !v.is_empty() {
            return Err(Fail::Status(GrcobStatus::InvalidAlgebra, v.join("; ")));
        }
        put(out, GrcobAlgebra(a))
    })
}

/// # Safety
/// `a` must be null or a handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn grcob_algebra_free(a: *mut GrcobAlgebra) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// # Safety
/// `g`, `a` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grcob_evaluate(g: *const GrcobGaf, a: *const GrcobAlgebra, out: *mut *mut GrcobMap) -> GrcobStatus {
    guard(|| {
        let algebra = handle(a, "algebra")?.0.clone();
        let map = evaluate(&handle(g, "gaf")?.0, &algebra)?;
        put(out, GrcobMap { map, algebra })
    })
}

/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grcob_map_degree(m: *const GrcobMap, out: *mut i64) -> GrcobStatus {
    guard(|| put_value(out, handle(m, "map")?.map.degree))
}

/// Sparse entries as JSON with coefficients as `"p/q"` strings.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn grcob_map_to_json(m: *const GrcobMap, out: *mut *mut c_char) -> GrcobStatus {
    guard(|| {
        let m = handle(m, "map")?;
        put_string(out, m.map.to_json(&m.algebra).to_string())
    })
}

/// # Safety
/// `m` must be null or a handle from this library, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn grcob_map_free(m: *mut GrcobMap) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Number of spine objects of rank `n`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn grcob_spine_count(n: usize, out: *mut usize) -> GrcobStatus {
    guard(|| put_value(out, grcob::spine::enumerate_spine_objects(n)?.len()))
}

/// Betti numbers of the twisted spine complex as a JSON array.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn grcob_spine_betti(n: usize, d: i64, experimental: bool, out: *mut *mut c_char) -> GrcobStatus {
    guard(|| {
        let betti = spine_chain_complex(n, d, experimental)?.betti();
        put_string(out, serde_json_array(&betti))
    })
}

fn serde_json_array(xs: &[usize]) -> String {
    format!("[{}]", xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
}
