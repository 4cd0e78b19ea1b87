//! C ABI for the procell library: opaque datum handles, status codes, and
//! JSON string results, so other languages can bind without knowing any
//! Rust types.
//!
//! Conventions:
//! - Every function returns a [`PcStatus`]; `PcStatusOk` is 0.
//! - Output strings are heap-allocated, NUL-terminated UTF-8 owned by the
//!   caller; release them with `pc_string_free`.
//! - Datum handles are released with `pc_datum_free`.
//! - On any non-OK status, `pc_last_error` returns a thread-local message
//!   valid until the next call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use procell::cell::CellDatum;
use procell::completion::smooth_classify;
use procell::datum_json;
use procell::field::Field;
use procell::instances::poly::{poly_completion, poly_datum};
use procell::instances::tl::tl_datum;
use procell::poset::{Label, DEFAULT_UPSET_CAP};
use procell::rep::{classify, gram};
use procell::report;

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PcStatus {
    /// Success.
    PcStatusOk = 0,
    /// A required pointer argument was NULL.
    PcStatusNullPointer = 1,
    /// A string argument was not valid UTF-8.
    PcStatusUtf8 = 2,
    /// Input could not be parsed (JSON, field or scalar syntax, labels).
    PcStatusParse = 3,
    /// A mathematical operation failed (unknown cell, mismatch, bounds).
    PcStatusMath = 4,
    /// The datum was processed but fails axiom verification.
    PcStatusAxiomFailure = 5,
    /// An internal invariant was violated.
    PcStatusInternal = 6,
}

use PcStatus::*;

/// Opaque handle to an immutable cell datum.
pub struct PcDatum {
    inner: CellDatum,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> =
        RefCell::new(CString::new("").expect("empty string has no NUL"));
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = CString::new(sanitized).expect("NUL bytes stripped");
    });
}

/// Message for the most recent error on this thread. The pointer stays
/// valid until the next library call on the same thread. Never NULL.
#[no_mangle]
pub extern "C" fn pc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must have been returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn pc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Frees a datum handle. NULL is ignored.
///
/// # Safety
/// `d` must have been returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn pc_datum_free(d: *mut PcDatum) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, PcStatus> {
    if p.is_null() {
        set_error("NULL string argument");
        return Err(PcStatusNullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|e| {
        set_error(&format!("invalid UTF-8: {e}"));
        PcStatusUtf8
    })
}

fn write_string(out: *mut *mut c_char, s: String) -> PcStatus {
    if out.is_null() {
        set_error("NULL output pointer");
        return PcStatusNullPointer;
    }
    let sanitized: String = s.chars().filter(|&c| c != '\0').collect();
    let c = CString::new(sanitized).expect("NUL bytes stripped");
    unsafe { *out = c.into_raw() };
    PcStatusOk
}

fn write_datum(out: *mut *mut PcDatum, d: CellDatum) -> PcStatus {
    if out.is_null() {
        set_error("NULL output pointer");
        return PcStatusNullPointer;
    }
    unsafe { *out = Box::into_raw(Box::new(PcDatum { inner: d })) };
    PcStatusOk
}

unsafe fn datum_ref<'a>(d: *const PcDatum) -> Result<&'a CellDatum, PcStatus> {
    if d.is_null() {
        set_error("NULL datum handle");
        return Err(PcStatusNullPointer);
    }
    Ok(&(*d).inner)
}

fn guard(f: impl FnOnce() -> PcStatus) -> PcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            PcStatusInternal
        }
    }
}

/// Loads a finite datum from the JSON interchange format.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pc_datum_from_json(
    json: *const c_char,
    out: *mut *mut PcDatum,
) -> PcStatus {
    guard(|| {
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match datum_json::load_str(text) {
            Ok(d) => write_datum(out, d),
            Err(e) => {
                set_error(&e.to_string());
                PcStatusParse
            }
        }
    })
}

/// Builds the Temperley-Lieb datum TL_n(delta). `delta` is an exact scalar
/// string, `field` is `q` or `gf:p`.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pc_datum_builtin_tl(
    n: u32,
    delta: *const c_char,
    field: *const c_char,
    out: *mut *mut PcDatum,
) -> PcStatus {
    guard(|| {
        let (delta, field) = match (read_str(delta), read_str(field)) {
            (Ok(d), Ok(f)) => (d, f),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let field = match Field::parse(field) {
            Ok(f) => f,
            Err(e) => {
                set_error(&e.to_string());
                return PcStatusParse;
            }
        };
        let delta = match field.parse_scalar(delta) {
            Ok(d) => d,
            Err(e) => {
                set_error(&e.to_string());
                return PcStatusParse;
            }
        };
        match tl_datum(n as usize, &delta) {
            Ok(d) => write_datum(out, d),
            Err(e) => {
                set_error(&e.to_string());
                PcStatusMath
            }
        }
    })
}

/// Builds the polynomial datum truncated at the principal coideal of `k`.
///
/// # Safety
/// `field` must be NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pc_datum_builtin_poly(
    truncate: u64,
    field: *const c_char,
    out: *mut *mut PcDatum,
) -> PcStatus {
    guard(|| {
        let field = match read_str(field) {
            Ok(f) => f,
            Err(s) => return s,
        };
        let field = match Field::parse(field) {
            Ok(f) => f,
            Err(e) => {
                set_error(&e.to_string());
                return PcStatusParse;
            }
        };
        let parent = poly_datum(field);
        let result = (|| -> Result<CellDatum, String> {
            let p = parent
                .poset()
                .coideal(&[Label::new(truncate.to_string())], DEFAULT_UPSET_CAP)
                .map_err(|e| e.to_string())?;
            let q = procell::completion::quotient(&parent, &p).map_err(|e| e.to_string())?;
            Ok(q.datum().clone())
        })();
        match result {
            Ok(d) => write_datum(out, d),
            Err(e) => {
                set_error(&e);
                PcStatusMath
            }
        }
    })
}

/// Dimension of the datum (its basis size).
///
/// # Safety
/// `d` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pc_datum_dimension(d: *const PcDatum, out: *mut usize) -> PcStatus {
    guard(|| {
        let datum = match datum_ref(d) {
            Ok(x) => x,
            Err(s) => return s,
        };
        if out.is_null() {
            set_error("NULL output pointer");
            return PcStatusNullPointer;
        }
        match datum.dimension() {
            Ok(n) => {
                *out = n;
                PcStatusOk
            }
            Err(e) => {
                set_error(&e.to_string());
                PcStatusMath
            }
        }
    })
}

/// Serializes the datum to the JSON interchange format.
///
/// # Safety
/// `d` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pc_datum_export_json(
    d: *const PcDatum,
    out: *mut *mut c_char,
) -> PcStatus {
    guard(|| {
        let datum = match datum_ref(d) {
            Ok(x) => x,
            Err(s) => return s,
        };
        match datum_json::save(datum) {
            Ok(file) => write_string(out, file.to_json()),
            Err(e) => {
                set_error(&e.to_string());
                PcStatusMath
            }
        }
    })
}

/// Runs the exhaustive axiom verification. Writes the JSON report either
/// way; returns `PcStatusAxiomFailure` when any axiom fails.
///
/// # Safety
/// `d` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pc_verify_json(d: *const PcDatum, out: *mut *mut c_char) -> PcStatus {
    guard(|| {
        let datum = match datum_ref(d) {
            Ok(x) => x,
            Err(s) => return s,
        };
        match datum.verify() {
            Ok(rep) => {
                let passed = rep.passed();
                let json = serde_json::to_string_pretty(&report::axiom_json(&rep))
                    .expect("report serializes");
                let status = write_string(out, json);
                if status != PcStatusOk {
                    return status;
                }
                if passed {
                    PcStatusOk
                } else {
                    set_error("axiom verification failed");
                    PcStatusAxiomFailure
                }
            }
            Err(e) => {
                set_error(&e.to_string());
                PcStatusMath
            }
        }
    })
}

/// Classification table (dim W, dim L, membership in the nonvanishing-form
/// index set) as JSON.
///
/// # Safety
/// `d` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pc_classify_json(d: *const PcDatum, out: *mut *mut c_char) -> PcStatus {
    guard(|| {
        let datum = match datum_ref(d) {
            Ok(x) => x,
            Err(s) => return s,
        };
        match classify(datum) {
            Ok(c) => write_string(
                out,
                serde_json::to_string_pretty(&report::classification_json(&c))
                    .expect("report serializes"),
            ),
            Err(e) => {
                set_error(&e.to_string());
                PcStatusMath
            }
        }
    })
}

/// Gram matrix of one cell as JSON `{cell, rank, matrix}` with bit-exact
/// scalar strings.
///
/// # Safety
/// `d` must be a live handle; `cell` NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn pc_gram_json(
    d: *const PcDatum,
    cell: *const c_char,
    out: *mut *mut c_char,
) -> PcStatus {
    guard(|| {
        let datum = match datum_ref(d) {
            Ok(x) => x,
            Err(s) => return s,
        };
        let cell = match read_str(cell) {
            Ok(c) => c,
            Err(s) => return s,
        };
        match gram(datum, &Label::new(cell)) {
            Ok(g) => {
                let n = g.matrix.rows();
                let rows: Vec<Vec<String>> = (0..n)
                    .map(|r| (0..n).map(|c| g.matrix.at(r, c).to_string()).collect())
                    .collect();
                let json = serde_json::json!({
                    "cell": g.cell.to_string(),
                    "rank": g.matrix.rank(),
                    "matrix": rows,
                });
                write_string(out, serde_json::to_string_pretty(&json).expect("serializes"))
            }
            Err(e) => {
                set_error(&e.to_string());
                PcStatusMath
            }
        }
    })
}

/// Smooth-simple classification of the completed polynomial datum within
/// the window generated by `bound`, as a JSON list of `{cell, dim_l}`.
///
/// # Safety
/// `field` must be NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pc_poly_smooth_classify_json(
    bound: u64,
    field: *const c_char,
    out: *mut *mut c_char,
) -> PcStatus {
    guard(|| {
        let field = match read_str(field) {
            Ok(f) => f,
            Err(s) => return s,
        };
        let field = match Field::parse(field) {
            Ok(f) => f,
            Err(e) => {
                set_error(&e.to_string());
                return PcStatusParse;
            }
        };
        let result = (|| -> Result<String, String> {
            let c = poly_completion(field, 0).map_err(|e| e.to_string())?;
            let p = c
                .datum()
                .poset()
                .coideal(&[Label::new(bound.to_string())], DEFAULT_UPSET_CAP)
                .map_err(|e| e.to_string())?;
            let simples = smooth_classify(&c, &p).map_err(|e| e.to_string())?;
            let json: Vec<serde_json::Value> = simples
                .iter()
                .map(|(cell, dim)| serde_json::json!({"cell": cell.to_string(), "dim_l": dim}))
                .collect();
            Ok(serde_json::to_string_pretty(&json).expect("serializes"))
        })();
        match result {
            Ok(s) => write_string(out, s),
            Err(e) => {
                set_error(&e);
                PcStatusMath
            }
        }
    })
}
