//! C ABI over the `holderforms` library.
//!
//! Every function returns an [`HfStatus`]; on failure the message is kept per
//! thread and read with [`hf_last_error_message`]. Sampled fields cross the
//! boundary as opaque [`HfGridField`] handles owned by the caller and released
//! with [`hf_grid_field_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

use holderforms::dynamics::{
    accessibility_criterion, anosov_section_criterion, pisot_example, spectral_rates, CriterionReport, SpectralRates,
    ToralAutomorphism,
};
use holderforms::fields::{c_theta_norm, holder_seminorm, make_weierstrass, Axis, GridField, HolderEstimate};
use holderforms::mollify::mollify;
use holderforms::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnderResolved = 3,
    NonConvergent = 4,
    OutsideDomain = 5,
    EpsilonTooLarge = 6,
    AmbiguousModulus = 7,
    DimensionHypothesis = 8,
    Inconsistent = 9,
    Parse = 10,
    Io = 11,
    Config = 12,
    Panic = 13,
}

/// Opaque sampled field.
pub struct HfGridField(GridField);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HfHolderEstimate {
    pub theta: f64,
    pub seminorm: f64,
    pub supnorm: f64,
    pub cnorm: f64,
    pub pairs: u64,
}

/// Absent rates are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HfSpectralRates {
    pub lambda_u: f64,
    pub m_u: f64,
    pub lambda_s: f64,
    pub m_s: f64,
    pub m_c: f64,
    pub big_m_c: f64,
    pub dim_s: usize,
    pub dim_c: usize,
    pub dim_u: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HfCriterion {
    pub value: f64,
    pub holds: bool,
    pub theta: f64,
    pub theta_threshold: f64,
    pub threshold_reachable: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HfPisot {
    pub xi: f64,
    pub eta: f64,
    pub det_residual: f64,
    pub poly_residual: f64,
    pub accessibility_threshold: f64,
    pub standard_bound: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> HfStatus {
    match e {
        Error::InvalidArgument { .. } => HfStatus::InvalidArgument,
        Error::UnderResolved { .. } => HfStatus::UnderResolved,
        Error::NonConvergent { .. } => HfStatus::NonConvergent,
        Error::OutsideDomain { .. } => HfStatus::OutsideDomain,
        Error::EpsilonTooLarge { .. } => HfStatus::EpsilonTooLarge,
        Error::AmbiguousModulus { .. } => HfStatus::AmbiguousModulus,
        Error::DimensionHypothesis { .. } => HfStatus::DimensionHypothesis,
        Error::Inconsistent(_) => HfStatus::Inconsistent,
        Error::Parse(_) => HfStatus::Parse,
        Error::Config { .. } => HfStatus::Config,
        Error::Io { .. } | Error::Csv(_) => HfStatus::Io,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail> + UnwindSafe) -> HfStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(f) {
        Ok(Ok(())) => HfStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            HfStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".to_string());
            HfStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn put<T>(out: *mut T, v: T, what: &'static str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null(what));
    }
    out.write(v);
    Ok(())
}

fn boxed(f: GridField) -> *mut HfGridField {
    Box::into_raw(Box::new(HfGridField(f)))
}

fn opt(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

fn unopt(v: f64) -> Option<f64> {
    (!v.is_nan()).then_some(v)
}

impl From<SpectralRates> for HfSpectralRates {
    fn from(r: SpectralRates) -> Self {
        Self {
            lambda_u: opt(r.lambda_u),
            m_u: opt(r.m_u),
            lambda_s: opt(r.lambda_s),
            m_s: opt(r.m_s),
            m_c: r.m_c,
            big_m_c: r.big_m_c,
            dim_s: r.dim_s,
            dim_c: r.dim_c,
            dim_u: r.dim_u,
        }
    }
}

impl From<&HfSpectralRates> for SpectralRates {
    fn from(r: &HfSpectralRates) -> Self {
        Self {
            lambda_u: unopt(r.lambda_u),
            m_u: unopt(r.m_u),
            lambda_s: unopt(r.lambda_s),
            m_s: unopt(r.m_s),
            m_c: r.m_c,
            big_m_c: r.big_m_c,
            dim_s: r.dim_s,
            dim_c: r.dim_c,
            dim_u: r.dim_u,
        }
    }
}

impl From<HolderEstimate> for HfHolderEstimate {
    fn from(h: HolderEstimate) -> Self {
        Self {
            theta: h.theta,
            seminorm: h.seminorm,
            supnorm: h.supnorm,
            cnorm: h.cnorm,
            pairs: h.pairs,
        }
    }
}

impl From<CriterionReport> for HfCriterion {
    fn from(c: CriterionReport) -> Self {
        Self {
            value: c.value,
            holds: c.holds,
            theta: c.theta,
            theta_threshold: c.theta_threshold,
            threshold_reachable: c.threshold_reachable,
        }
    }
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn hf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Truncated Weierstrass series on the periodic unit interval.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hf_weierstrass_new(
    theta: f64,
    base: u32,
    terms: u32,
    resolution: usize,
    out: *mut *mut HfGridField,
) -> HfStatus {
    guard(|| {
        let f = make_weierstrass(theta, base, terms, resolution)?;
        put(out, boxed(f), "out")
    })
}

/// A 1D field from `nodes` samples on `[lo, hi]`. Periodic fields repeat the
/// first sample as the last.
///
/// # Safety
/// `values` must point to `nodes` doubles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hf_grid_field_new_1d(
    lo: f64,
    hi: f64,
    periodic: bool,
    values: *const f64,
    nodes: usize,
    out: *mut *mut HfGridField,
) -> HfStatus {
    guard(|| {
        let v = slice(values, nodes, "values")?;
        let f = GridField::new(vec![Axis::new(lo, hi, nodes, periodic)?], v.to_vec())?;
        put(out, boxed(f), "out")
    })
}

/// Releases a handle. NULL is a no-op.
///
/// # Safety
/// `field` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hf_grid_field_free(field: *mut HfGridField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Number of samples.
///
/// # Safety
/// `field` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hf_grid_field_len(field: *const HfGridField, out: *mut usize) -> HfStatus {
    guard(|| {
        let f = deref(field, "field")?;
        put(out, f.0.len(), "out")
    })
}

/// Copies the samples, row-major, into `buf`. Fails unless `len` equals the
/// field's length.
///
/// # Safety
/// `field` must be a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn hf_grid_field_values(field: *const HfGridField, buf: *mut f64, len: usize) -> HfStatus {
    guard(|| {
        let f = deref(field, "field")?;
        let v = f.0.values();
        if len != v.len() {
            return Err(Error::InvalidArgument {
                name: "len",
                reason: format!("buffer holds {len}, field has {}", v.len()),
            }
            .into());
        }
        if buf.is_null() {
            return Err(Fail::Null("buf"));
        }
        ptr::copy_nonoverlapping(v.as_ptr(), buf, len);
        Ok(())
    })
}

/// # Safety
/// `field` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hf_holder_seminorm(
    field: *const HfGridField,
    theta: f64,
    out: *mut HfHolderEstimate,
) -> HfStatus {
    guard(|| {
        let f = deref(field, "field")?;
        put(out, holder_seminorm(&f.0, theta)?.into(), "out")
    })
}

/// # Safety
/// `field` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hf_c_theta_norm(
    field: *const HfGridField,
    theta: f64,
    out: *mut HfHolderEstimate,
) -> HfStatus {
    guard(|| {
        let f = deref(field, "field")?;
        put(out, c_theta_norm(&f.0, theta)?.into(), "out")
    })
}

/// Mollified copy of `field` as a new handle.
///
/// # Safety
/// `field` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hf_mollify(field: *const HfGridField, epsilon: f64, out: *mut *mut HfGridField) -> HfStatus {
    guard(|| {
        let f = deref(field, "field")?;
        let m = mollify(&f.0, epsilon)?;
        put(out, boxed(m), "out")
    })
}

/// Rates of `A × id` on `T^{n+extra}` for the `n×n` matrix with row-major
/// `entries` (`len = n²`).
///
/// # Safety
/// `entries` must hold `len` values; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hf_spectral_rates(
    entries: *const i64,
    len: usize,
    extra_center_dims: usize,
    out: *mut HfSpectralRates,
) -> HfStatus {
    guard(|| {
        let e = slice(entries, len, "entries")?;
        let a = ToralAutomorphism::from_row_major(e)?;
        put(out, spectral_rates(&a, extra_center_dims)?.into(), "out")
    })
}

/// # Safety
/// `rates` must be readable; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hf_anosov_section_criterion(
    rates: *const HfSpectralRates,
    theta: f64,
    out: *mut HfCriterion,
) -> HfStatus {
    guard(|| {
        let r = SpectralRates::from(deref(rates, "rates")?);
        put(out, anosov_section_criterion(&r, theta)?.into(), "out")
    })
}

/// # Safety
/// `rates` must be readable; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hf_accessibility_criterion(
    rates: *const HfSpectralRates,
    theta: f64,
    ell: usize,
    out: *mut HfCriterion,
) -> HfStatus {
    guard(|| {
        let r = SpectralRates::from(deref(rates, "rates")?);
        put(out, accessibility_criterion(&r, theta, ell)?.into(), "out")
    })
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hf_pisot_example(out: *mut HfPisot) -> HfStatus {
    guard(|| {
        let p = pisot_example()?;
        put(
            out,
            HfPisot {
                xi: p.xi,
                eta: p.eta,
                det_residual: p.det_residual,
                poly_residual: p.poly_residual,
                accessibility_threshold: p.accessibility_threshold,
                standard_bound: p.standard_bound,
            },
            "out",
        )
    })
}
