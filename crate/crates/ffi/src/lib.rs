//! C interface to gadgetforge.
//!
//! Matrices and classification verdicts are opaque handles owned by the caller
//! and released with their `_free` function. Every fallible call returns a
//! [`GfStatus`]; on failure a message is available from [`gf_last_error`] until
//! the next failing call on the same thread. Strings returned through `char**`
//! out-parameters must be released with [`gf_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gadgetforge::classify::{classify_interaction_set, classify_two_qudit, ClassificationVerdict, InteractionClass};
use gadgetforge::error::Error;
use gadgetforge::gadgets::{run_gadget, GadgetParams};
use gadgetforge::interactions::{max_d_cut, Graph, InteractionSetFile};
use gadgetforge::linalg::Mat;
use gadgetforge::simcert::{certify_simulation, OffsetMode};
use num_complex::Complex64;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidDimension = 3,
    NotHermitian = 4,
    Numerical = 5,
    Unsupported = 6,
    Parse = 7,
    /// A gadget ran but at least one of its checks failed.
    CheckFailed = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GfClass {
    LaUniversal = 0,
    LaStoquasticUniversal = 1,
    OneLocalOnly = 2,
}

/// Dense complex matrix.
pub struct GfMatrix(Mat);

/// Result of classifying an interaction.
pub struct GfVerdict(ClassificationVerdict);

/// Optional gadget parameters. NaN (or 0 for `d`) selects the gadget's default.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct GfGadgetParams {
    pub d: usize,
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
    pub seed: u64,
    pub tol: f64,
}

/// Simulation measurements. `eta` and `eps` are NaN when the ranks differ.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct GfSimulation {
    pub low_space_dim: usize,
    pub encoded_dim: usize,
    pub rank_match: bool,
    pub eta: f64,
    pub eps: f64,
    pub identity_offset: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> GfStatus {
    match e {
        Error::InvalidDimension(_) | Error::Sites(_) | Error::RankMismatch { .. } => GfStatus::InvalidDimension,
        Error::NotHermitian { .. } => GfStatus::NotHermitian,
        Error::NotNormalized(_) | Error::OutOfRange(_) | Error::GroundEnergyNotZero(_) | Error::NotPositive(_) => {
            GfStatus::InvalidArgument
        }
        Error::NoConvergence { .. } | Error::SingularPolar(_) | Error::Condition { .. } => GfStatus::Numerical,
        Error::Unsupported(_) | Error::Io(_) => GfStatus::Unsupported,
        Error::Parse(_) => GfStatus::Parse,
    }
}

/// Runs `f`, converting errors and panics into a status and the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), (GfStatus, String)>) -> GfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GfStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            GfStatus::Panic
        }
    }
}

fn lib(e: Error) -> (GfStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (GfStatus, String) {
    (GfStatus::NullPointer, format!("{what} is null"))
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (GfStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn as_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (GfStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (GfStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (GfStatus, String)> {
    if out.is_null() {
        return Err(null("output string pointer"));
    }
    let c = CString::new(s).map_err(|_| (GfStatus::InvalidArgument, "string contains NUL".to_string()))?;
    *out = c.into_raw();
    Ok(())
}

fn opt(x: f64) -> Option<f64> {
    (!x.is_nan()).then_some(x)
}

/// Message of the last failing call on this thread, or NULL. Owned by the library.
#[no_mangle]
pub extern "C" fn gf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn gf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a `rows`×`cols` matrix from row-major real and imaginary parts.
/// `im` may be NULL for a real matrix.
///
/// # Safety
/// `re` (and `im` if non-null) must point to `rows*cols` doubles.
#[no_mangle]
pub unsafe extern "C" fn gf_matrix_new(
    rows: usize,
    cols: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut GfMatrix,
) -> GfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if re.is_null() {
            return Err(null("re"));
        }
        let len = rows.checked_mul(cols).filter(|&n| n > 0).ok_or((GfStatus::InvalidDimension, "empty or overflowing matrix".to_string()))?;
        let re = std::slice::from_raw_parts(re, len);
        let im = (!im.is_null()).then(|| std::slice::from_raw_parts(im, len));
        let m = Mat::from_fn(rows, cols, |r, c| {
            let k = r * cols + c;
            Complex64::new(re[k], im.map_or(0.0, |v| v[k]))
        });
        *out = Box::into_raw(Box::new(GfMatrix(m)));
        Ok(())
    })
}

/// # Safety
/// `m` must be NULL or a handle from this library not already freed.
#[no_mangle]
pub unsafe extern "C" fn gf_matrix_free(m: *mut GfMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live handle; `rows` and `cols` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_matrix_dims(m: *const GfMatrix, rows: *mut usize, cols: *mut usize) -> GfStatus {
    guard(|| {
        let m = as_ref(m, "matrix")?;
        if rows.is_null() || cols.is_null() {
            return Err(null("dimension pointer"));
        }
        *rows = m.0.nrows();
        *cols = m.0.ncols();
        Ok(())
    })
}

/// Copies the entries in row-major order. Either output may be NULL.
///
/// # Safety
/// Non-null outputs must have room for `rows*cols` doubles.
#[no_mangle]
pub unsafe extern "C" fn gf_matrix_copy(m: *const GfMatrix, re: *mut f64, im: *mut f64) -> GfStatus {
    guard(|| {
        let m = &as_ref(m, "matrix")?.0;
        let cols = m.ncols();
        for r in 0..m.nrows() {
            for c in 0..cols {
                let z = m[(r, c)];
                if !re.is_null() {
                    *re.add(r * cols + c) = z.re;
                }
                if !im.is_null() {
                    *im.add(r * cols + c) = z.im;
                }
            }
        }
        Ok(())
    })
}

/// Classifies a two-qudit interaction on C^d ⊗ C^d.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gf_classify_two_qudit(h: *const GfMatrix, d: usize, tol: f64, out: *mut *mut GfVerdict) -> GfStatus {
    guard(|| {
        let h = as_ref(h, "matrix")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let v = classify_two_qudit(&h.0, d, tol).map_err(lib)?;
        *out = Box::into_raw(Box::new(GfVerdict(v)));
        Ok(())
    })
}

/// Classifies an interaction set given in the CLI's JSON format.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gf_classify_set_json(json: *const c_char, tol: f64, out: *mut *mut GfVerdict) -> GfStatus {
    guard(|| {
        let json = as_str(json, "json")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let file = InteractionSetFile::from_json(json).map_err(lib)?;
        let set = file.resolve().map_err(lib)?;
        let v = classify_interaction_set(&set, tol).map_err(lib)?;
        *out = Box::into_raw(Box::new(GfVerdict(v)));
        Ok(())
    })
}

/// # Safety
/// `v` must be a live verdict handle.
#[no_mangle]
pub unsafe extern "C" fn gf_verdict_class(v: *const GfVerdict) -> GfClass {
    match v.as_ref().map(|v| v.0.class) {
        Some(InteractionClass::LaUniversal) => GfClass::LaUniversal,
        Some(InteractionClass::LaStoquasticUniversal) => GfClass::LaStoquasticUniversal,
        Some(InteractionClass::OneLocalOnly) | None => GfClass::OneLocalOnly,
    }
}

/// Full verdict as JSON, written to `*out`.
///
/// # Safety
/// `v` must be a live verdict handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gf_verdict_json(v: *const GfVerdict, out: *mut *mut c_char) -> GfStatus {
    guard(|| {
        let v = as_ref(v, "verdict")?;
        write_string(out, v.0.to_json().to_string())
    })
}

/// # Safety
/// `v` must be NULL or a handle from this library not already freed.
#[no_mangle]
pub unsafe extern "C" fn gf_verdict_free(v: *mut GfVerdict) {
    if !v.is_null() {
        drop(Box::from_raw(v));
    }
}

/// Builds a named gadget and writes its report as JSON to `*out`.
/// Returns `CHECK_FAILED` (with the report still written) if any check failed.
///
/// # Safety
/// `name` must be a NUL-terminated string; `params` may be NULL for defaults.
#[no_mangle]
pub unsafe extern "C" fn gf_gadget_run(name: *const c_char, params: *const GfGadgetParams, out: *mut *mut c_char) -> GfStatus {
    let mut failed = Vec::new();
    let status = guard(|| {
        let name = as_str(name, "name")?;
        let mut p = GadgetParams::default();
        if let Some(q) = params.as_ref() {
            p = GadgetParams {
                d: (q.d != 0).then_some(q.d),
                theta: opt(q.theta),
                alpha: opt(q.alpha),
                beta: opt(q.beta),
                mu: opt(q.mu),
                seed: q.seed,
                tol: opt(q.tol).unwrap_or(p.tol),
            };
        }
        let (_, report) = run_gadget(name, &p).map_err(lib)?;
        failed = report.failures().iter().map(|r| r.name.clone()).collect();
        let json = serde_json::to_string(&report).map_err(|e| (GfStatus::Parse, e.to_string()))?;
        write_string(out, json)
    });
    if status == GfStatus::Ok && !failed.is_empty() {
        set_error(format!("failed checks: {}", failed.join("; ")));
        return GfStatus::CheckFailed;
    }
    status
}

/// Measures how well `h_sim` simulates `h_target` through the isometry `v`
/// with low-energy cutoff `delta`.
///
/// # Safety
/// Matrix arguments must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gf_certify_simulation(
    h_sim: *const GfMatrix,
    h_target: *const GfMatrix,
    v: *const GfMatrix,
    delta: f64,
    modulo_identity: bool,
    out: *mut GfSimulation,
) -> GfStatus {
    guard(|| {
        let (hs, ht, v) = (as_ref(h_sim, "h_sim")?, as_ref(h_target, "h_target")?, as_ref(v, "v")?);
        if out.is_null() {
            return Err(null("out"));
        }
        let mode = if modulo_identity { OffsetMode::ModuloIdentity } else { OffsetMode::Exact };
        let r = certify_simulation(&hs.0, &ht.0, &v.0, delta, mode).map_err(lib)?;
        *out = GfSimulation {
            low_space_dim: r.low_space_dim,
            encoded_dim: r.encoded_dim,
            rank_match: r.rank_match,
            eta: r.eta.unwrap_or(f64::NAN),
            eps: r.eps.unwrap_or(f64::NAN),
            identity_offset: r.identity_offset.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// Quantum Max-d-Cut on a graph given as `{"n": .., "edges": [[i, j, w], ..]}`;
/// writes the result as JSON to `*out`.
///
/// # Safety
/// `graph_json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gf_max_d_cut(graph_json: *const c_char, d: usize, out: *mut *mut c_char) -> GfStatus {
    guard(|| {
        let graph: Graph = serde_json::from_str(as_str(graph_json, "graph_json")?).map_err(|e| (GfStatus::Parse, e.to_string()))?;
        let r = max_d_cut(&graph, d).map_err(lib)?;
        write_string(out, serde_json::to_string(&r).map_err(|e| (GfStatus::Parse, e.to_string()))?)
    })
}
