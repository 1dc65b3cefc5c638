//! C ABI for `pcadepth`.
//!
//! Every fallible function returns a [`PcadepthStatus`]. On failure a
//! human-readable message is kept per thread and can be fetched with
//! [`pcadepth_last_error`]. Panics never cross the boundary; they surface as
//! `PCADEPTH_STATUS_PANIC`.
//!
//! Images are row-major `f64` buffers of `width * height` values. Invalid
//! pixels are NaN.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pcadepth::{
    densify, io, nearest_neighbor_densify, CovarianceMode, Error, ErrorKind, MapConfig, PcaBasis,
    SparseEntry, SparseMeasurement,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcadepthStatus {
    Ok = 0,
    Validation = 1,
    Io = 2,
    Numerical = 3,
    NullPointer = 4,
    Panic = 5,
}

/// Coefficient covariance scaling, see `CovarianceMode`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcadepthCovariance {
    Unscaled = 0,
    SigmaScaled = 1,
}

/// Opaque handle to a loaded basis.
pub struct PcadepthBasis {
    inner: PcaBasis,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(e: Error) -> PcadepthStatus {
    set_error(e.to_string());
    match e.kind() {
        ErrorKind::Validation => PcadepthStatus::Validation,
        ErrorKind::Io => PcadepthStatus::Io,
        ErrorKind::Numerical => PcadepthStatus::Numerical,
    }
}

fn null(what: &str) -> PcadepthStatus {
    set_error(format!("{what} is null"));
    PcadepthStatus::NullPointer
}

fn guard(f: impl FnOnce() -> PcadepthStatus) -> PcadepthStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| {
        set_error("internal panic".to_string());
        PcadepthStatus::Panic
    })
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn pcadepth_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Loads a basis file. At most `max_components` leading components are
/// read; pass 0 for all of them.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pcadepth_basis_load(
    path: *const c_char,
    max_components: usize,
    out: *mut *mut PcadepthBasis,
) -> PcadepthStatus {
    guard(|| {
        if path.is_null() {
            return null("path");
        }
        if out.is_null() {
            return null("out");
        }
        let path = match CStr::from_ptr(path).to_str() {
            Ok(p) => p,
            Err(_) => return fail(Error::InvalidInput("path is not valid UTF-8".into())),
        };
        let loaded = if max_components == 0 {
            io::load_basis(path)
        } else {
            io::load_basis_prefix(path, max_components)
        };
        match loaded {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(PcadepthBasis { inner }));
                PcadepthStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Releases a handle from [`pcadepth_basis_load`]. NULL is ignored.
///
/// # Safety
/// `basis` must come from [`pcadepth_basis_load`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pcadepth_basis_free(basis: *mut PcadepthBasis) {
    if !basis.is_null() {
        drop(Box::from_raw(basis));
    }
}

/// Writes width, height and component count. Any output pointer may be NULL.
///
/// # Safety
/// `basis` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn pcadepth_basis_dims(
    basis: *const PcadepthBasis,
    width: *mut usize,
    height: *mut usize,
    components: *mut usize,
) -> PcadepthStatus {
    guard(|| {
        let Some(b) = basis.as_ref() else {
            return null("basis");
        };
        for (p, v) in [(width, b.inner.width()), (height, b.inner.height()), (components, b.inner.l())] {
            if !p.is_null() {
                *p = v;
            }
        }
        PcadepthStatus::Ok
    })
}

unsafe fn read_entries(
    rows: *const usize,
    cols: *const usize,
    disparities: *const f64,
    count: usize,
) -> Result<Vec<SparseEntry>, PcadepthStatus> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if rows.is_null() || cols.is_null() || disparities.is_null() {
        return Err(null("measurement array"));
    }
    let (r, c, d) = (
        std::slice::from_raw_parts(rows, count),
        std::slice::from_raw_parts(cols, count),
        std::slice::from_raw_parts(disparities, count),
    );
    Ok((0..count).map(|i| SparseEntry::new(r[i], c[i], d[i])).collect())
}

/// MAP densification. `out_dense` receives `width * height` values;
/// `out_uncertainty`, when not NULL, receives the per-pixel uncertainty.
/// `count` may be 0, in which case the result is the basis mean.
///
/// # Safety
/// Measurement arrays must hold `count` elements; output buffers must hold
/// `width * height` elements.
#[no_mangle]
pub unsafe extern "C" fn pcadepth_densify(
    basis: *const PcadepthBasis,
    rows: *const usize,
    cols: *const usize,
    disparities: *const f64,
    count: usize,
    sigma_z: f64,
    covariance: PcadepthCovariance,
    clamp_negative: bool,
    out_dense: *mut f64,
    out_uncertainty: *mut f64,
) -> PcadepthStatus {
    guard(|| {
        let Some(b) = basis.as_ref() else {
            return null("basis");
        };
        if out_dense.is_null() {
            return null("out_dense");
        }
        let entries = match read_entries(rows, cols, disparities, count) {
            Ok(e) => e,
            Err(s) => return s,
        };
        let b = &b.inner;
        let config = MapConfig {
            sigma_z,
            covariance_mode: match covariance {
                PcadepthCovariance::Unscaled => CovarianceMode::Unscaled,
                PcadepthCovariance::SigmaScaled => CovarianceMode::SigmaScaled,
            },
            compute_uncertainty: !out_uncertainty.is_null(),
            clamp_negative,
        };
        let result = SparseMeasurement::new(b.width(), b.height(), entries)
            .and_then(|s| densify(b, &s, &config));
        match result {
            Ok(r) => {
                let n = b.pixels();
                std::slice::from_raw_parts_mut(out_dense, n).copy_from_slice(r.dense.values());
                if let Some(u) = r.uncertainty {
                    std::slice::from_raw_parts_mut(out_uncertainty, n).copy_from_slice(u.values());
                }
                PcadepthStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Nearest-measurement interpolation into `out`, which must hold
/// `width * height` values. Needs at least one measurement.
///
/// # Safety
/// Measurement arrays must hold `count` elements; `out` must hold
/// `width * height` elements.
#[no_mangle]
pub unsafe extern "C" fn pcadepth_nearest(
    width: usize,
    height: usize,
    rows: *const usize,
    cols: *const usize,
    disparities: *const f64,
    count: usize,
    out: *mut f64,
) -> PcadepthStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        let entries = match read_entries(rows, cols, disparities, count) {
            Ok(e) => e,
            Err(s) => return s,
        };
        match SparseMeasurement::new(width, height, entries).and_then(|s| nearest_neighbor_densify(&s)) {
            Ok(m) => {
                std::slice::from_raw_parts_mut(out, width * height).copy_from_slice(m.values());
                PcadepthStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
