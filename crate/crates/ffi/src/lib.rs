//! C ABI over `resample-core`.
//!
//! Datasets and synthetic batches are opaque handles owned by the caller and
//! released with their `_free` function. Every fallible call returns an
//! [`RsStatus`]; on failure the message is available from
//! [`rs_last_error_message`] on the same thread. Matrices cross the boundary
//! row-major, labels as class tags 0 and 1.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use resample_core::data::{load_csv, LabelColumn};
use resample_core::evaluator::roc_auc;
use resample_core::silhouette::silhouette_coefficients;
use resample_core::{imbalance_degree, rebalance, Algorithm, Dataset, Error, Matrix, OversampleConfig, SyntheticBatch};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// The data violates a precondition (single class, NaN, shape, ...).
    DataInvariant = 3,
    /// Oversampling ran out of attempts; the partial batch is still returned.
    BudgetExhausted = 4,
    Io = 5,
    /// A Rust panic was caught at the boundary.
    Internal = 6,
}

/// Values accepted by the `algorithm` argument of [`rs_oversample`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsAlgorithm {
    Smote = 0,
    Adasyn = 1,
    G1no = 2,
    G1noGourmet = 3,
}

/// Generator counters of a batch.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RsBatchCounters {
    pub requested: usize,
    pub accepted: usize,
    pub rejected_by_1nn: usize,
    pub rejected_duplicate: usize,
    pub attempts: usize,
}

/// Opaque dataset handle.
pub struct RsDataset {
    inner: Dataset,
}

/// Opaque synthetic batch handle.
pub struct RsBatch {
    inner: SyntheticBatch,
    requested: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
}

fn status_of(e: &Error) -> RsStatus {
    match e {
        Error::BudgetExhausted { .. } => RsStatus::BudgetExhausted,
        Error::Io { .. } => RsStatus::Io,
        Error::Config(_) | Error::InvalidArgument(_) => RsStatus::InvalidArgument,
        Error::Iteration { source, .. } => status_of(source),
        _ => RsStatus::DataInvariant,
    }
}

fn fail(e: Error) -> RsStatus {
    set_error(e.to_string());
    status_of(&e)
}

/// Runs `f`, clearing the last error first and turning panics into
/// [`RsStatus::Internal`].
fn guard(f: impl FnOnce() -> RsStatus) -> RsStatus {
    set_error("");
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| {
        set_error("internal panic");
        RsStatus::Internal
    })
}

macro_rules! non_null {
    ($($p:expr),+) => {
        $(if $p.is_null() {
            set_error(concat!("null pointer: ", stringify!($p)));
            return RsStatus::NullPointer;
        })+
    };
}

/// Message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn rs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a dataset from `rows × cols` row-major values and `rows` labels
/// (0 or 1). Classes are named "0" and "1".
///
/// # Safety
/// `samples` must point to `rows * cols` doubles and `labels` to `rows`
/// bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rs_dataset_new(
    samples: *const f64,
    rows: usize,
    cols: usize,
    labels: *const u8,
    out: *mut *mut RsDataset,
) -> RsStatus {
    guard(|| {
        non_null!(samples, labels, out);
        let Some(len) = rows.checked_mul(cols) else {
            set_error("rows * cols overflows");
            return RsStatus::InvalidArgument;
        };
        let values = std::slice::from_raw_parts(samples, len).to_vec();
        let tags = std::slice::from_raw_parts(labels, rows).to_vec();
        if let Some(bad) = tags.iter().find(|&&t| t > 1) {
            set_error(format!("label {bad} is not 0 or 1"));
            return RsStatus::InvalidArgument;
        }
        let names: Vec<String> = (0..cols).map(|j| format!("f{j}")).collect();
        let built = Matrix::new(rows, cols, values)
            .and_then(|m| Dataset::new(m, tags, vec!["0".into(), "1".into()], names));
        match built {
            Ok(d) => {
                *out = Box::into_raw(Box::new(RsDataset { inner: d }));
                RsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Loads a headed CSV. `label_column` is a column name or zero-based index;
/// NULL selects the last column.
///
/// # Safety
/// `path` and a non-NULL `label_column` must be NUL-terminated strings;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rs_dataset_load_csv(
    path: *const c_char,
    label_column: *const c_char,
    out: *mut *mut RsDataset,
) -> RsStatus {
    guard(|| {
        non_null!(path, out);
        let Ok(path) = CStr::from_ptr(path).to_str() else {
            set_error("path is not valid UTF-8");
            return RsStatus::InvalidArgument;
        };
        let column = if label_column.is_null() {
            LabelColumn::Last
        } else {
            match CStr::from_ptr(label_column).to_str() {
                Ok(s) => s.parse().unwrap_or_default(),
                Err(_) => {
                    set_error("label column is not valid UTF-8");
                    return RsStatus::InvalidArgument;
                }
            }
        };
        match load_csv(path, &column) {
            Ok(d) => {
                *out = Box::into_raw(Box::new(RsDataset { inner: d }));
                RsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `dataset` must come from this library and not be used afterwards. NULL is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn rs_dataset_free(dataset: *mut RsDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// # Safety
/// `dataset` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rs_dataset_rows(dataset: *const RsDataset, out: *mut usize) -> RsStatus {
    guard(|| {
        non_null!(dataset, out);
        *out = (*dataset).inner.n_samples();
        RsStatus::Ok
    })
}

/// # Safety
/// `dataset` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rs_dataset_cols(dataset: *const RsDataset, out: *mut usize) -> RsStatus {
    guard(|| {
        non_null!(dataset, out);
        *out = (*dataset).inner.n_features();
        RsStatus::Ok
    })
}

unsafe fn copy_into<T: Copy>(src: &[T], dst: *mut T, len: usize) -> RsStatus {
    if len != src.len() {
        set_error(format!("buffer holds {len} values, {} required", src.len()));
        return RsStatus::InvalidArgument;
    }
    ptr::copy_nonoverlapping(src.as_ptr(), dst, len);
    RsStatus::Ok
}

/// Copies the row-major samples into `buf`, which must hold exactly
/// `rows * cols` values.
///
/// # Safety
/// `dataset` must be a live handle and `buf` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rs_dataset_copy_samples(dataset: *const RsDataset, buf: *mut f64, len: usize) -> RsStatus {
    guard(|| {
        non_null!(dataset, buf);
        copy_into((*dataset).inner.samples().as_slice(), buf, len)
    })
}

/// Copies the class tags into `buf`, which must hold exactly `rows` bytes.
///
/// # Safety
/// `dataset` must be a live handle and `buf` writable for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn rs_dataset_copy_labels(dataset: *const RsDataset, buf: *mut u8, len: usize) -> RsStatus {
    guard(|| {
        non_null!(dataset, buf);
        copy_into((*dataset).inner.labels(), buf, len)
    })
}

/// Minority-to-majority count ratio.
///
/// # Safety
/// `dataset` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rs_dataset_imbalance_degree(dataset: *const RsDataset, out: *mut f64) -> RsStatus {
    guard(|| {
        non_null!(dataset, out);
        match imbalance_degree(&(*dataset).inner) {
            Ok(v) => {
                *out = v;
                RsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Silhouette coefficient of every row; `buf` must hold exactly `rows`
/// values.
///
/// # Safety
/// `dataset` must be a live handle and `buf` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rs_silhouette(dataset: *const RsDataset, buf: *mut f64, len: usize) -> RsStatus {
    guard(|| {
        non_null!(dataset, buf);
        match silhouette_coefficients(&(*dataset).inner) {
            Ok(s) => copy_into(&s, buf, len),
            Err(e) => fail(e),
        }
    })
}

/// Generates enough minority samples to balance `dataset` with one of the
/// [`RsAlgorithm`] values. `k` is used by SMOTE and ADASYN; 0 selects the
/// default. On [`RsStatus::BudgetExhausted`] the partial batch is still
/// written to `out` so that its counters can be read.
///
/// # Safety
/// `dataset` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rs_oversample(
    dataset: *const RsDataset,
    algorithm: u32,
    k: usize,
    seed: u64,
    out: *mut *mut RsBatch,
) -> RsStatus {
    guard(|| {
        non_null!(dataset, out);
        let alg = match algorithm {
            0 => Algorithm::Smote,
            1 => Algorithm::Adasyn,
            2 => Algorithm::G1no,
            3 => Algorithm::G1noGourmet,
            other => {
                set_error(format!("unknown algorithm {other}"));
                return RsStatus::InvalidArgument;
            }
        };
        let mut config = OversampleConfig::default();
        if k > 0 {
            config.k = k;
        }
        let d = &(*dataset).inner;
        match rebalance(d, alg, &config, seed) {
            Ok((_, batch)) => {
                let requested = batch.len();
                *out = Box::into_raw(Box::new(RsBatch { inner: batch, requested }));
                RsStatus::Ok
            }
            Err(e @ Error::BudgetExhausted { .. }) => {
                set_error(e.to_string());
                if let Error::BudgetExhausted { requested, batch } = e {
                    *out = Box::into_raw(Box::new(RsBatch { inner: *batch, requested }));
                }
                RsStatus::BudgetExhausted
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `batch` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rs_batch_rows(batch: *const RsBatch, out: *mut usize) -> RsStatus {
    guard(|| {
        non_null!(batch, out);
        *out = (*batch).inner.samples.rows();
        RsStatus::Ok
    })
}

/// # Safety
/// `batch` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rs_batch_cols(batch: *const RsBatch, out: *mut usize) -> RsStatus {
    guard(|| {
        non_null!(batch, out);
        *out = (*batch).inner.samples.cols();
        RsStatus::Ok
    })
}

/// Copies the generated rows (row-major) into `buf`.
///
/// # Safety
/// `batch` must be a live handle and `buf` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rs_batch_copy_samples(batch: *const RsBatch, buf: *mut f64, len: usize) -> RsStatus {
    guard(|| {
        non_null!(batch, buf);
        copy_into((*batch).inner.samples.as_slice(), buf, len)
    })
}

/// # Safety
/// `batch` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rs_batch_counters(batch: *const RsBatch, out: *mut RsBatchCounters) -> RsStatus {
    guard(|| {
        non_null!(batch, out);
        let b = &(*batch).inner;
        *out = RsBatchCounters {
            requested: (*batch).requested,
            accepted: b.accepted,
            rejected_by_1nn: b.rejected_by_1nn,
            rejected_duplicate: b.rejected_duplicate,
            attempts: b.attempts,
        };
        RsStatus::Ok
    })
}

/// # Safety
/// `batch` must come from this library and not be used afterwards. NULL is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn rs_batch_free(batch: *mut RsBatch) {
    if !batch.is_null() {
        drop(Box::from_raw(batch));
    }
}

/// Area under the ROC curve of `scores` against 0/1 `labels` (1 positive).
///
/// # Safety
/// `scores` and `labels` must point to `len` elements; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn rs_roc_auc(scores: *const f64, labels: *const u8, len: usize, out: *mut f64) -> RsStatus {
    guard(|| {
        non_null!(scores, labels, out);
        let s = std::slice::from_raw_parts(scores, len);
        let y: Vec<bool> = std::slice::from_raw_parts(labels, len).iter().map(|&t| t != 0).collect();
        match roc_auc(s, &y) {
            Ok((_, auc)) => {
                *out = auc;
                RsStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
