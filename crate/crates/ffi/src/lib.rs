//! C ABI for `rsrepair`.
//!
//! Schemes are opaque handles created by `rs_scheme_*` constructors and
//! released with [`rs_scheme_free`]. Every fallible call returns an
//! [`RsStatus`]; on failure [`rs_last_error_message`] describes the error
//! for the calling thread. Strings returned by the library are released
//! with [`rs_string_free`].
//!
//! Field elements cross the boundary as canonical residues (`uint64_t` in
//! `[0, p)`), polynomials as coefficient arrays with the constant term
//! first, and transcripts as bucket arrays in ascending node order.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rsrepair::reconstruct::{enumerate_consistent_limited, repair_detailed};
use rsrepair::schemes::{leak_transcript, TranscriptEntry};
use rsrepair::verify::{check_window_condition, SearchConfig, WindowProblem};
use rsrepair::{
    expsums, DecodingScheme, Error, LeakageScheme, Poly, PrimeField, RepairScheme, Scheme,
    SchemeDescriptor, Transcript,
};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsStatus {
    Ok = 0,
    NullPointer = 1,
    /// Bad parameters (composite modulus, index out of range, ...).
    InvalidArgument = 2,
    /// Malformed JSON or mismatched transcript.
    Parse = 3,
    BudgetExceeded = 4,
    /// No polynomial matches the transcript.
    Inconsistent = 5,
    /// Several polynomials match and disagree where it matters.
    Ambiguous = 6,
    /// An output buffer is too small; the needed length was written.
    BufferTooSmall = 7,
    /// The operation does not apply to this kind of scheme.
    WrongScheme = 8,
    /// A panic was caught at the boundary.
    Internal = 9,
}

impl From<&Error> for RsStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::SearchBudgetExceeded { .. } => RsStatus::BudgetExceeded,
            Error::InconsistentTranscript => RsStatus::Inconsistent,
            Error::AmbiguousRepair | Error::AmbiguousDecoding => RsStatus::Ambiguous,
            Error::Parse(_) | Error::TranscriptMismatch(_) => RsStatus::Parse,
            _ => RsStatus::InvalidArgument,
        }
    }
}

/// Opaque scheme handle.
pub struct RsScheme {
    inner: Scheme,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: RsStatus, msg: impl Into<String>) -> RsStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> RsStatus {
    let status = RsStatus::from(&e);
    fail(status, e.to_string())
}

/// Runs `f`, turning library errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), RsStatus>) -> RsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RsStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(RsStatus::Internal, "panic inside rsrepair"),
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, RsStatus>;
}

impl<T> OrStatus<T> for rsrepair::Result<T> {
    fn or_status(self) -> Result<T, RsStatus> {
        self.map_err(from_error)
    }
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), RsStatus> {
    if p.is_null() {
        Err(fail(RsStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], RsStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    non_null(p, what)?;
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn scheme_ref<'a>(s: *const RsScheme) -> Result<&'a RsScheme, RsStatus> {
    non_null(s, "scheme")?;
    Ok(&*s)
}

unsafe fn write_out<T>(out: *mut T, v: T, what: &str) -> Result<(), RsStatus> {
    non_null(out, what)?;
    *out = v;
    Ok(())
}

unsafe fn write_array(out: *mut u64, cap: usize, len_out: *mut usize, data: &[u64]) -> Result<(), RsStatus> {
    if !len_out.is_null() {
        *len_out = data.len();
    }
    if data.len() > cap {
        return Err(fail(
            RsStatus::BufferTooSmall,
            format!("need {} slots, buffer holds {cap}", data.len()),
        ));
    }
    if !data.is_empty() {
        non_null(out, "output buffer")?;
        ptr::copy_nonoverlapping(data.as_ptr(), out, data.len());
    }
    Ok(())
}

unsafe fn c_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, RsStatus> {
    non_null(s, what)?;
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(RsStatus::Parse, format!("{what} is not UTF-8")))
}

fn boxed(scheme: Scheme) -> *mut RsScheme {
    Box::into_raw(Box::new(RsScheme { inner: scheme }))
}

fn to_c_string(s: String) -> Result<*mut c_char, RsStatus> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| fail(RsStatus::Internal, "string contains NUL"))
}

/// Three-bit repair scheme for node `ell` on the points `0..=n`.
///
/// # Safety
/// `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn rs_scheme_kloosterman(p: u64, n: u64, ell: u64, out: *mut *mut RsScheme) -> RsStatus {
    guard(|| {
        non_null(out, "out")?;
        let s = RepairScheme::kloosterman(p, n, ell).or_status()?;
        *out = boxed(Scheme::Repair(s));
        Ok(())
    })
}

/// `bits`-bit full-length decoding scheme with dimension `k` and the
/// `missing_len` silent nodes in `missing`. Fails for inadmissible `k`.
///
/// # Safety
/// `missing` must point to `missing_len` values (or be null when it is 0);
/// `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn rs_scheme_weil(
    p: u64,
    bits: u32,
    k: usize,
    missing: *const u64,
    missing_len: usize,
    out: *mut *mut RsScheme,
) -> RsStatus {
    guard(|| {
        non_null(out, "out")?;
        let m = slice(missing, missing_len, "missing")?;
        let s = DecodingScheme::weil(p, bits, k, m).or_status()?;
        *out = boxed(Scheme::Decoding(s));
        Ok(())
    })
}

/// Scheme from a JSON descriptor such as
/// `{"type":"weil","p":101,"B":3,"k":4,"missing":[0,1],"t":13}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn rs_scheme_from_json(json: *const c_char, out: *mut *mut RsScheme) -> RsStatus {
    guard(|| {
        non_null(out, "out")?;
        let text = c_str(json, "json")?;
        let d: SchemeDescriptor =
            serde_json::from_str(text).map_err(|e| fail(RsStatus::Parse, e.to_string()))?;
        *out = boxed(Scheme::from_descriptor(&d).or_status()?);
        Ok(())
    })
}

/// Releases a scheme. Null is ignored.
///
/// # Safety
/// `s` must come from a constructor in this library and not be used after.
#[no_mangle]
pub unsafe extern "C" fn rs_scheme_free(s: *mut RsScheme) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Writes the scheme's JSON descriptor; free it with [`rs_string_free`].
///
/// # Safety
/// `s` must be a live handle; `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn rs_scheme_descriptor_json(s: *const RsScheme, out: *mut *mut c_char) -> RsStatus {
    guard(|| {
        let s = scheme_ref(s)?;
        non_null(out, "out")?;
        let text = serde_json::to_string(&s.inner.descriptor()).map_err(|e| fail(RsStatus::Internal, e.to_string()))?;
        *out = to_c_string(text)?;
        Ok(())
    })
}

/// Field size, code dimension, bucket width and bits per node.
///
/// # Safety
/// `s` must be a live handle; each non-null output must be writable.
#[no_mangle]
pub unsafe extern "C" fn rs_scheme_params(
    s: *const RsScheme,
    p: *mut u64,
    k: *mut usize,
    t: *mut u64,
    bits_per_node: *mut u32,
) -> RsStatus {
    guard(|| {
        let s = &scheme_ref(s)?.inner;
        if !p.is_null() {
            *p = s.field().modulus();
        }
        if !k.is_null() {
            *k = s.dimension();
        }
        if !t.is_null() {
            *t = s.width();
        }
        if !bits_per_node.is_null() {
            *bits_per_node = s.bits_per_node();
        }
        Ok(())
    })
}

/// Total bits sent by all participating nodes.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rs_scheme_bandwidth(s: *const RsScheme, out: *mut u64) -> RsStatus {
    guard(|| write_out(out, scheme_ref(s)?.inner.bandwidth(), "out"))
}

/// Indices of the participating nodes, ascending. `len` receives the
/// count even when the buffer is too small.
///
/// # Safety
/// `s` must be a live handle; `out` must hold `cap` values.
#[no_mangle]
pub unsafe extern "C" fn rs_scheme_nodes(s: *const RsScheme, out: *mut u64, cap: usize, len: *mut usize) -> RsStatus {
    guard(|| {
        let nodes: Vec<u64> = scheme_ref(s)?.inner.nodes().iter().map(|n| n.index).collect();
        write_array(out, cap, len, &nodes)
    })
}

unsafe fn poly_from(s: &Scheme, coeffs: *const u64, n: usize) -> Result<Poly, RsStatus> {
    let field = s.field();
    let c = slice(coeffs, n, "coeffs")?;
    if let Some(&bad) = c.iter().find(|&&v| v >= field.modulus()) {
        return Err(fail(RsStatus::InvalidArgument, format!("coefficient {bad} is not a residue")));
    }
    Ok(Poly::new(field, c.to_vec()))
}

fn transcript_from(s: &Scheme, buckets: &[u64]) -> Result<Transcript, RsStatus> {
    let nodes = s.nodes();
    if buckets.len() != nodes.len() {
        return Err(fail(
            RsStatus::Parse,
            format!("{} buckets for {} nodes", buckets.len(), nodes.len()),
        ));
    }
    Ok(Transcript {
        scheme: s.descriptor(),
        entries: nodes
            .iter()
            .zip(buckets)
            .map(|(n, &b)| TranscriptEntry { node: n.index, bucket: b })
            .collect(),
        bits_per_node: s.bits_per_node(),
    })
}

/// Bucket index of every participating node for the polynomial with the
/// given coefficients.
///
/// # Safety
/// `s` must be a live handle; `coeffs` must hold `ncoeffs` values and
/// `out` `cap` values.
#[no_mangle]
pub unsafe extern "C" fn rs_scheme_leak(
    s: *const RsScheme,
    coeffs: *const u64,
    ncoeffs: usize,
    out: *mut u64,
    cap: usize,
    len: *mut usize,
) -> RsStatus {
    guard(|| {
        let s = &scheme_ref(s)?.inner;
        let f = poly_from(s, coeffs, ncoeffs)?;
        let t = leak_transcript(s, &f).or_status()?;
        write_array(out, cap, len, &t.buckets())
    })
}

/// Recovers the polynomial (`k` coefficients) from the buckets.
///
/// # Safety
/// `s` must be a live handle; `buckets` must hold `nbuckets` values and
/// `out` `cap` values.
#[no_mangle]
pub unsafe extern "C" fn rs_scheme_decode(
    s: *const RsScheme,
    buckets: *const u64,
    nbuckets: usize,
    out: *mut u64,
    cap: usize,
) -> RsStatus {
    guard(|| {
        let s = &scheme_ref(s)?.inner;
        let t = transcript_from(s, slice(buckets, nbuckets, "buckets")?)?;
        let set = enumerate_consistent_limited(s, &t, 2).or_status()?;
        let f = match set.candidates.len() {
            0 => return Err(from_error(Error::InconsistentTranscript)),
            1 => &set.candidates[0],
            _ => return Err(from_error(Error::AmbiguousDecoding)),
        };
        write_array(out, cap, ptr::null_mut(), &f.padded(s.dimension()))
    })
}

/// Recovers the target symbol of a repair scheme.
///
/// # Safety
/// `s` must be a live handle; `buckets` must hold `nbuckets` values and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rs_scheme_repair(
    s: *const RsScheme,
    buckets: *const u64,
    nbuckets: usize,
    out: *mut u64,
) -> RsStatus {
    guard(|| {
        let s = &scheme_ref(s)?.inner;
        let Scheme::Repair(r) = s else {
            return Err(fail(RsStatus::WrongScheme, "repair needs a kloosterman scheme"));
        };
        let t = transcript_from(s, slice(buckets, nbuckets, "buckets")?)?;
        let outcome = repair_detailed(r, &t).or_status()?;
        write_out(out, outcome.value.value(), "out")
    })
}

/// Runs the window check for the scheme. `budget` of 0 means the default.
/// A failed check is not an error: `passed` is set to false.
///
/// # Safety
/// `s` must be a live handle; `passed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rs_scheme_check(s: *const RsScheme, budget: u64, passed: *mut bool) -> RsStatus {
    guard(|| {
        let s = &scheme_ref(s)?.inner;
        non_null(passed, "passed")?;
        let problem = match s {
            Scheme::Repair(r) => WindowProblem::for_repair_scheme(r),
            Scheme::Decoding(d) => WindowProblem::for_decoding_scheme(d),
        };
        let mut cfg = SearchConfig::from_env().or_status()?;
        if budget > 0 {
            cfg = cfg.with_budget(budget);
        }
        let v = check_window_condition(&problem, &cfg).or_status()?;
        *passed = v.passed;
        Ok(())
    })
}

/// Transcript JSON (the CLI file format) for a polynomial.
///
/// # Safety
/// As for [`rs_scheme_leak`]; `out` receives a string to free with
/// [`rs_string_free`].
#[no_mangle]
pub unsafe extern "C" fn rs_transcript_json(
    s: *const RsScheme,
    coeffs: *const u64,
    ncoeffs: usize,
    out: *mut *mut c_char,
) -> RsStatus {
    guard(|| {
        let s = &scheme_ref(s)?.inner;
        non_null(out, "out")?;
        let f = poly_from(s, coeffs, ncoeffs)?;
        let t = leak_transcript(s, &f).or_status()?;
        *out = to_c_string(serde_json::to_string(&t).map_err(|e| fail(RsStatus::Internal, e.to_string()))?)?;
        Ok(())
    })
}

/// Decodes a transcript JSON document; writes
/// `{"coefficients":[...],"candidates":1}`.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rs_decode_json(json: *const c_char, out: *mut *mut c_char) -> RsStatus {
    guard(|| {
        non_null(out, "out")?;
        let t: Transcript =
            serde_json::from_str(c_str(json, "json")?).map_err(|e| fail(RsStatus::Parse, e.to_string()))?;
        let s = Scheme::from_descriptor(&t.scheme).or_status()?;
        let set = enumerate_consistent_limited(&s, &t, 2).or_status()?;
        let f = match set.candidates.len() {
            0 => return Err(from_error(Error::InconsistentTranscript)),
            1 => &set.candidates[0],
            _ => return Err(from_error(Error::AmbiguousDecoding)),
        };
        let v = serde_json::json!({ "coefficients": f.padded(s.dimension()), "candidates": 1 });
        *out = to_c_string(v.to_string())?;
        Ok(())
    })
}

/// Repairs from a transcript JSON document; writes
/// `{"node":..,"value":..,"candidates":..}`.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rs_repair_json(json: *const c_char, out: *mut *mut c_char) -> RsStatus {
    guard(|| {
        non_null(out, "out")?;
        let t: Transcript =
            serde_json::from_str(c_str(json, "json")?).map_err(|e| fail(RsStatus::Parse, e.to_string()))?;
        let Scheme::Repair(r) = Scheme::from_descriptor(&t.scheme).or_status()? else {
            return Err(fail(RsStatus::WrongScheme, "repair needs a kloosterman transcript"));
        };
        let o = repair_detailed(&r, &t).or_status()?;
        let v = serde_json::json!({ "node": r.target(), "value": o.value.value(), "candidates": o.candidates });
        *out = to_c_string(v.to_string())?;
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used after.
#[no_mangle]
pub unsafe extern "C" fn rs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `sum_{nu=1}^{len} e_p(a/nu + b nu)`.
///
/// # Safety
/// `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rs_kloosterman_sum(p: u64, a: u64, b: u64, len: u64, re: *mut f64, im: *mut f64) -> RsStatus {
    guard(|| {
        non_null(re, "re")?;
        non_null(im, "im")?;
        let field = PrimeField::new(p).or_status()?;
        let r = expsums::kloosterman_sum(field, a, b, len).or_status()?;
        *re = r.re;
        *im = r.im;
        Ok(())
    })
}

/// `sum_{x in F_p} e_p(f(x))` for residue coefficients `coeffs`.
///
/// # Safety
/// `coeffs` must hold `ncoeffs` values; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rs_weil_sum(
    p: u64,
    coeffs: *const u64,
    ncoeffs: usize,
    re: *mut f64,
    im: *mut f64,
) -> RsStatus {
    guard(|| {
        non_null(re, "re")?;
        non_null(im, "im")?;
        let field = PrimeField::new(p).or_status()?;
        let c = slice(coeffs, ncoeffs, "coeffs")?;
        let r = expsums::weil_sum(&Poly::new(field, c.to_vec())).or_status()?;
        *re = r.sum.re;
        *im = r.sum.im;
        Ok(())
    })
}

/// Message for the last failure on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rs_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}
