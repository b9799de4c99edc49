//! C ABI for the aew library.
//!
//! Conventions:
//! - Handles (`AewDataset`, `AewDictionary`, `AewDistribution`) are opaque.
//!   Constructors write a pointer through an out-parameter and the matching
//!   `_free` function releases it. Free functions accept null.
//! - Every fallible function returns an [`AewStatus`]. Output parameters are
//!   written only when the result is `AEW_STATUS_OK`.
//! - On failure, a thread-local message describing the error is stored and
//!   can be read with [`aew_last_error_message`].
//! - Panics never cross the boundary: they are caught and reported as
//!   `AEW_STATUS_INTERNAL`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::slice;

use aew::aggregation::{aggregation_certificate, aew_weights, erm_select, Dictionary};
use aew::config::{parse_json, DictionaryConfig, DistributionSpec};
use aew::data::{Dataset, Label, LabeledExample};
use aew::distributions::Distribution;
use aew::plugin::{LocalPolyEstimator, PluginConfig};
use aew::Error;

/// Result code returned by every fallible function in this library.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AewStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    Utf8 = 2,
    /// An argument was outside the domain of the operation
    /// (empty dataset, dimension mismatch, bad parameter, bad config).
    InvalidArgument = 3,
    /// Valid input that exceeds a documented implementation limit.
    Capacity = 4,
    /// Unparseable input (CSV or JSON).
    Parse = 5,
    /// A mathematical invariant that should hold by construction failed.
    InvariantViolation = 6,
    /// An I/O operation failed.
    Io = 7,
    /// An internal panic was caught.
    Internal = 8,
}

/// An owned set of labeled examples. Opaque.
pub struct AewDataset(Dataset);

/// A finite dictionary of score functions. Opaque.
pub struct AewDictionary(Dictionary);

/// A joint distribution over features and labels. Opaque.
pub struct AewDistribution(Distribution);

/// The quantities certifying the exponential-weights risk bound:
/// `slack = min_member_hinge_risk + log_m_over_n - aggregate_hinge_risk`,
/// nonnegative up to rounding.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct AewCertificate {
    /// Empirical hinge risk of the weighted aggregate.
    pub aggregate_hinge_risk: f64,
    /// Smallest empirical hinge risk over dictionary members.
    pub min_member_hinge_risk: f64,
    /// log(dictionary size) divided by the sample size.
    pub log_m_over_n: f64,
    /// Bound minus achieved risk; at least -1e-9.
    pub slack: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let owned = CString::new(msg.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("error").expect("static string"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(owned));
}

fn status_of(err: &Error) -> AewStatus {
    match err {
        Error::EmptyDataset
        | Error::DimensionMismatch { .. }
        | Error::Domain(_)
        | Error::Config(_) => AewStatus::InvalidArgument,
        Error::Capacity(_) => AewStatus::Capacity,
        Error::Parse(_) => AewStatus::Parse,
        Error::InvariantViolation(_) => AewStatus::InvariantViolation,
        Error::Io(_) => AewStatus::Io,
    }
}

fn fail(err: Error) -> AewStatus {
    let status = status_of(&err);
    set_error(&err.to_string());
    status
}

fn fail_null(what: &str) -> AewStatus {
    set_error(&format!("{what} must not be null"));
    AewStatus::NullPointer
}

fn guarded<F: FnOnce() -> AewStatus>(f: F) -> AewStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            AewStatus::Internal
        }
    }
}

/// Reads a caller string; on error reports it and yields the status to return.
///
/// # Safety
/// `ptr` must be null or point to a NUL-terminated string.
unsafe fn read_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, AewStatus> {
    if ptr.is_null() {
        return Err(fail_null(what));
    }
    match unsafe { CStr::from_ptr(ptr) }.to_str() {
        Ok(s) => Ok(s),
        Err(_) => {
            set_error(&format!("{what} is not valid UTF-8"));
            Err(AewStatus::Utf8)
        }
    }
}

/// Version of the library as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn aew_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message from the most recent failed call on the calling thread, or null
/// if none has failed. The pointer stays valid until the next failed call
/// on the same thread.
#[no_mangle]
pub extern "C" fn aew_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| match slot.borrow().as_ref() {
        Some(msg) => msg.as_ptr(),
        None => std::ptr::null(),
    })
}

/// Builds a dataset from flat arrays: `xs` holds `n` rows of `dim` features
/// in row-major order, `labels` holds `n` entries, each +1 or -1.
///
/// # Safety
/// `xs` must be valid for `n * dim` reads, `labels` for `n` reads, and
/// `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn aew_dataset_from_arrays(
    dim: usize,
    n: usize,
    xs: *const f64,
    labels: *const i32,
    out: *mut *mut AewDataset,
) -> AewStatus {
    guarded(|| {
        if out.is_null() {
            return fail_null("out");
        }
        if xs.is_null() {
            return fail_null("xs");
        }
        if labels.is_null() {
            return fail_null("labels");
        }
        let Some(total) = n.checked_mul(dim) else {
            return fail(Error::Domain(format!("{n} x {dim} features overflow")));
        };
        let xs = unsafe { slice::from_raw_parts(xs, total) };
        let labels = unsafe { slice::from_raw_parts(labels, n) };
        let mut examples = Vec::with_capacity(n);
        for (row, &label) in xs.chunks_exact(dim.max(1)).zip(labels) {
            let y = match Label::from_int(i64::from(label)) {
                Ok(y) => y,
                Err(e) => return fail(e),
            };
            examples.push(LabeledExample { x: row.to_vec(), y });
        }
        match Dataset::new(dim, examples) {
            Ok(data) => {
                unsafe { out.write(Box::into_raw(Box::new(AewDataset(data)))) };
                AewStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Loads a dataset from a CSV file with header `x1,...,xd,label`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn aew_dataset_load_csv(
    path: *const c_char,
    out: *mut *mut AewDataset,
) -> AewStatus {
    guarded(|| {
        if out.is_null() {
            return fail_null("out");
        }
        let path = match unsafe { read_str(path, "path") } {
            Ok(p) => p,
            Err(status) => return status,
        };
        match Dataset::load_csv(Path::new(path)) {
            Ok(data) => {
                unsafe { out.write(Box::into_raw(Box::new(AewDataset(data)))) };
                AewStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Number of examples, or 0 if `data` is null.
///
/// # Safety
/// `data` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn aew_dataset_len(data: *const AewDataset) -> usize {
    unsafe { data.as_ref() }.map_or(0, |d| d.0.len())
}

/// Feature dimension, or 0 if `data` is null.
///
/// # Safety
/// `data` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn aew_dataset_dim(data: *const AewDataset) -> usize {
    unsafe { data.as_ref() }.map_or(0, |d| d.0.dim())
}

/// Releases a dataset handle. Accepts null.
///
/// # Safety
/// `data` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn aew_dataset_free(data: *mut AewDataset) {
    if !data.is_null() {
        drop(unsafe { Box::from_raw(data) });
    }
}

/// Parses a dictionary from JSON (`{"schema_version": 1, "members": [...]}`)
/// and resolves each member rule at feature dimension `dim`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn aew_dictionary_from_json(
    json: *const c_char,
    dim: usize,
    out: *mut *mut AewDictionary,
) -> AewStatus {
    guarded(|| {
        if out.is_null() {
            return fail_null("out");
        }
        let json = match unsafe { read_str(json, "json") } {
            Ok(s) => s,
            Err(status) => return status,
        };
        let config: DictionaryConfig = match parse_json(json) {
            Ok(c) => c,
            Err(e) => return fail(e),
        };
        match config.resolve(dim) {
            Ok(dict) => {
                unsafe { out.write(Box::into_raw(Box::new(AewDictionary(dict)))) };
                AewStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Number of members, or 0 if `dict` is null.
///
/// # Safety
/// `dict` must be null or a live dictionary handle.
#[no_mangle]
pub unsafe extern "C" fn aew_dictionary_len(dict: *const AewDictionary) -> usize {
    unsafe { dict.as_ref() }.map_or(0, |d| d.0.len())
}

/// Releases a dictionary handle. Accepts null.
///
/// # Safety
/// `dict` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn aew_dictionary_free(dict: *mut AewDictionary) {
    if !dict.is_null() {
        drop(unsafe { Box::from_raw(dict) });
    }
}

/// Computes the exponential weights of every dictionary member on `data`.
/// `len` must equal the dictionary size; weights are written in member order
/// and sum to one.
///
/// # Safety
/// `data` and `dict` must be live handles; `out_weights` must be valid for
/// `len` writes.
#[no_mangle]
pub unsafe extern "C" fn aew_exponential_weights(
    data: *const AewDataset,
    dict: *const AewDictionary,
    out_weights: *mut f64,
    len: usize,
) -> AewStatus {
    guarded(|| {
        let Some(data) = (unsafe { data.as_ref() }) else {
            return fail_null("data");
        };
        let Some(dict) = (unsafe { dict.as_ref() }) else {
            return fail_null("dict");
        };
        if out_weights.is_null() {
            return fail_null("out_weights");
        }
        if len != dict.0.len() {
            return fail(Error::Domain(format!(
                "out_weights holds {len} entries but the dictionary has {} members",
                dict.0.len()
            )));
        }
        match aew_weights(&data.0, &dict.0) {
            Ok(w) => {
                let out = unsafe { slice::from_raw_parts_mut(out_weights, len) };
                out.copy_from_slice(w.as_slice());
                AewStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Computes the empirical-risk certificate for the exponential-weights
/// aggregate on `data`.
///
/// # Safety
/// `data` and `dict` must be live handles; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn aew_certificate(
    data: *const AewDataset,
    dict: *const AewDictionary,
    out: *mut AewCertificate,
) -> AewStatus {
    guarded(|| {
        let Some(data) = (unsafe { data.as_ref() }) else {
            return fail_null("data");
        };
        let Some(dict) = (unsafe { dict.as_ref() }) else {
            return fail_null("dict");
        };
        if out.is_null() {
            return fail_null("out");
        }
        match aggregation_certificate(&data.0, &dict.0) {
            Ok(cert) => {
                unsafe {
                    out.write(AewCertificate {
                        aggregate_hinge_risk: cert.aggregate_hinge_risk,
                        min_member_hinge_risk: cert.min_member_hinge_risk,
                        log_m_over_n: cert.log_m_over_n,
                        slack: cert.slack,
                    });
                }
                AewStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Writes the 0-based index of a member minimizing the empirical zero-one
/// risk on `data` (ties go to the earliest member).
///
/// # Safety
/// `data` and `dict` must be live handles; `out_index` must be valid for one
/// write.
#[no_mangle]
pub unsafe extern "C" fn aew_erm_select(
    data: *const AewDataset,
    dict: *const AewDictionary,
    out_index: *mut usize,
) -> AewStatus {
    guarded(|| {
        let Some(data) = (unsafe { data.as_ref() }) else {
            return fail_null("data");
        };
        let Some(dict) = (unsafe { dict.as_ref() }) else {
            return fail_null("dict");
        };
        if out_index.is_null() {
            return fail_null("out_index");
        }
        match erm_select(&data.0, &dict.0) {
            Ok(j) => {
                unsafe { out_index.write(j) };
                AewStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Parses a distribution from JSON, e.g. `{"finite": {...}}`,
/// `{"lower_bound": {...}}`, `{"holder_sinusoid": {...}}`, or
/// `{"holder_bump": {...}}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn aew_distribution_from_json(
    json: *const c_char,
    out: *mut *mut AewDistribution,
) -> AewStatus {
    guarded(|| {
        if out.is_null() {
            return fail_null("out");
        }
        let json = match unsafe { read_str(json, "json") } {
            Ok(s) => s,
            Err(status) => return status,
        };
        let spec: DistributionSpec = match parse_json(json) {
            Ok(s) => s,
            Err(e) => return fail(e),
        };
        match spec.resolve() {
            Ok(dist) => {
                unsafe { out.write(Box::into_raw(Box::new(AewDistribution(dist)))) };
                AewStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Feature dimension, or 0 if `dist` is null.
///
/// # Safety
/// `dist` must be null or a live distribution handle.
#[no_mangle]
pub unsafe extern "C" fn aew_distribution_dim(dist: *const AewDistribution) -> usize {
    unsafe { dist.as_ref() }.map_or(0, |d| d.0.dim())
}

/// Writes the Bayes risk (the smallest achievable zero-one risk).
///
/// # Safety
/// `dist` must be a live handle; `out_risk` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn aew_distribution_bayes_risk(
    dist: *const AewDistribution,
    out_risk: *mut f64,
) -> AewStatus {
    guarded(|| {
        let Some(dist) = (unsafe { dist.as_ref() }) else {
            return fail_null("dist");
        };
        if out_risk.is_null() {
            return fail_null("out_risk");
        }
        unsafe { out_risk.write(dist.0.bayes_risk()) };
        AewStatus::Ok
    })
}

/// Draws `n` independent examples with the given seed into a new dataset
/// handle. The same seed yields the same sample.
///
/// # Safety
/// `dist` must be a live handle; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn aew_distribution_sample(
    dist: *const AewDistribution,
    n: usize,
    seed: u64,
    out: *mut *mut AewDataset,
) -> AewStatus {
    guarded(|| {
        let Some(dist) = (unsafe { dist.as_ref() }) else {
            return fail_null("dist");
        };
        if out.is_null() {
            return fail_null("out");
        }
        match dist.0.sample(n, seed) {
            Ok(data) => {
                unsafe { out.write(Box::into_raw(Box::new(AewDataset(data)))) };
                AewStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Releases a distribution handle. Accepts null.
///
/// # Safety
/// `dist` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn aew_distribution_free(dist: *mut AewDistribution) {
    if !dist.is_null() {
        drop(unsafe { Box::from_raw(dist) });
    }
}

/// Fits the local-polynomial regression estimator of smoothness `beta` on
/// `train` and evaluates it at `n_queries` points. `queries` holds rows of
/// `aew_dataset_dim(train)` coordinates. For query `i`, `out_eta[i]` is the
/// estimated conditional probability of label +1, clipped to [0, 1], and
/// `out_labels[i]` is +1 when it is at least one half, else -1.
///
/// # Safety
/// `train` must be a live handle; with `n_queries > 0`, `queries` must be
/// valid for `n_queries * dim` reads and `out_eta`, `out_labels` for
/// `n_queries` writes.
#[no_mangle]
pub unsafe extern "C" fn aew_plugin_predict(
    train: *const AewDataset,
    beta: f64,
    queries: *const f64,
    n_queries: usize,
    out_eta: *mut f64,
    out_labels: *mut i32,
) -> AewStatus {
    guarded(|| {
        let Some(train) = (unsafe { train.as_ref() }) else {
            return fail_null("train");
        };
        let d = train.0.dim();
        let config = match PluginConfig::for_beta(beta, d, train.0.len()) {
            Ok(c) => c,
            Err(e) => return fail(e),
        };
        if n_queries == 0 {
            return AewStatus::Ok;
        }
        if queries.is_null() {
            return fail_null("queries");
        }
        if out_eta.is_null() {
            return fail_null("out_eta");
        }
        if out_labels.is_null() {
            return fail_null("out_labels");
        }
        let Some(total) = n_queries.checked_mul(d) else {
            return fail(Error::Domain(format!("{n_queries} x {d} coordinates overflow")));
        };
        let estimator = match LocalPolyEstimator::fit(&train.0, config) {
            Ok(est) => est,
            Err(e) => return fail(e),
        };
        let queries = unsafe { slice::from_raw_parts(queries, total) };
        for (i, q) in queries.chunks_exact(d).enumerate() {
            let est = match estimator.estimate(q) {
                Ok(est) => est,
                Err(e) => return fail(e),
            };
            unsafe {
                out_eta.add(i).write(est.eta);
                out_labels.add(i).write(if est.eta >= 0.5 { 1 } else { -1 });
            }
        }
        AewStatus::Ok
    })
}
