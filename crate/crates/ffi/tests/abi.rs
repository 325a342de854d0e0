use std::ffi::{CStr, CString};
use std::ptr;

use resample_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(rs_last_error_message()) }.to_string_lossy().into_owned()
}

/// 12 majority rows around the origin, 4 minority rows around (5, 5).
fn imbalanced() -> (Vec<f64>, Vec<u8>) {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 0..12 {
        x.extend([(i % 4) as f64 * 0.3, (i / 4) as f64 * 0.3]);
        y.push(0);
    }
    for i in 0..4 {
        x.extend([5.0 + (i % 2) as f64 * 0.4, 5.0 + (i / 2) as f64 * 0.4]);
        y.push(1);
    }
    (x, y)
}

fn dataset(x: &[f64], y: &[u8]) -> *mut RsDataset {
    let mut d = ptr::null_mut();
    let s = unsafe { rs_dataset_new(x.as_ptr(), y.len(), x.len() / y.len(), y.as_ptr(), &mut d) };
    assert_eq!(s, RsStatus::Ok, "{}", last_error());
    d
}

#[test]
fn dataset_round_trip() {
    let (x, y) = imbalanced();
    let d = dataset(&x, &y);
    let (mut rows, mut cols, mut id) = (0, 0, 0.0);
    unsafe {
        assert_eq!(rs_dataset_rows(d, &mut rows), RsStatus::Ok);
        assert_eq!(rs_dataset_cols(d, &mut cols), RsStatus::Ok);
        assert_eq!(rs_dataset_imbalance_degree(d, &mut id), RsStatus::Ok);
    }
    assert_eq!((rows, cols), (16, 2));
    assert!((id - 4.0 / 12.0).abs() < 1e-15);
    let mut xs = vec![0.0; 32];
    let mut ys = vec![9u8; 16];
    unsafe {
        assert_eq!(rs_dataset_copy_samples(d, xs.as_mut_ptr(), xs.len()), RsStatus::Ok);
        assert_eq!(rs_dataset_copy_labels(d, ys.as_mut_ptr(), ys.len()), RsStatus::Ok);
        assert_eq!(rs_dataset_copy_samples(d, xs.as_mut_ptr(), 3), RsStatus::InvalidArgument);
        rs_dataset_free(d);
    }
    assert_eq!((xs, ys), (x, y));
    assert!(last_error().contains("buffer"));
}

#[test]
fn silhouette_of_separated_clusters_is_high() {
    let (x, y) = imbalanced();
    let d = dataset(&x, &y);
    let mut s = vec![0.0; 16];
    unsafe {
        assert_eq!(rs_silhouette(d, s.as_mut_ptr(), s.len()), RsStatus::Ok);
        rs_dataset_free(d);
    }
    assert!(s.iter().all(|&v| v > 0.8), "{s:?}");
}

#[test]
fn oversampling_balances_and_reports_counters() {
    let (x, y) = imbalanced();
    let d = dataset(&x, &y);
    for alg in [RsAlgorithm::Smote, RsAlgorithm::Adasyn, RsAlgorithm::G1no, RsAlgorithm::G1noGourmet] {
        let mut b = ptr::null_mut();
        let s = unsafe { rs_oversample(d, alg as u32, 3, 11, &mut b) };
        assert_eq!(s, RsStatus::Ok, "{alg:?}: {}", last_error());
        let (mut rows, mut cols) = (0, 0);
        let mut c = RsBatchCounters::default();
        unsafe {
            rs_batch_rows(b, &mut rows);
            rs_batch_cols(b, &mut cols);
            rs_batch_counters(b, &mut c);
        }
        assert_eq!((rows, cols), (8, 2));
        assert_eq!((c.requested, c.accepted), (8, 8));
        assert_eq!(c.attempts, c.accepted + c.rejected_by_1nn + c.rejected_duplicate);
        let mut buf = vec![0.0; 16];
        unsafe {
            assert_eq!(rs_batch_copy_samples(b, buf.as_mut_ptr(), 16), RsStatus::Ok);
            rs_batch_free(b);
        }
        assert!(buf.iter().all(|v| v.is_finite()));
    }
    unsafe { rs_dataset_free(d) };
}

#[test]
fn error_codes() {
    let (x, y) = imbalanced();
    let d = dataset(&x, &y);
    let mut b = ptr::null_mut();
    unsafe {
        assert_eq!(rs_oversample(d, 9, 0, 0, &mut b), RsStatus::InvalidArgument);
        assert!(last_error().contains("unknown algorithm"));
        assert_eq!(rs_oversample(ptr::null(), 0, 0, 0, &mut b), RsStatus::NullPointer);
        assert_eq!(rs_oversample(d, 0, 50, 0, &mut b), RsStatus::InvalidArgument);
        rs_dataset_free(d);
        rs_dataset_free(ptr::null_mut());
    }

    let bad_label = [0u8, 2];
    let mut out = ptr::null_mut();
    let s = unsafe { rs_dataset_new([0.0, 1.0].as_ptr(), 2, 1, bad_label.as_ptr(), &mut out) };
    assert_eq!(s, RsStatus::InvalidArgument);

    let nan = [f64::NAN, 1.0];
    let s = unsafe { rs_dataset_new(nan.as_ptr(), 2, 1, [0u8, 1].as_ptr(), &mut out) };
    assert_eq!(s, RsStatus::DataInvariant);

    let missing = CString::new("/definitely/not/here.csv").unwrap();
    let s = unsafe { rs_dataset_load_csv(missing.as_ptr(), ptr::null(), &mut out) };
    assert_eq!(s, RsStatus::Io);
    assert!(last_error().contains("/definitely/not/here.csv"));

    let mut auc = 0.0;
    let s = unsafe { rs_roc_auc([0.1, 0.2].as_ptr(), [1u8, 1].as_ptr(), 2, &mut auc) };
    assert_eq!(s, RsStatus::DataInvariant);
}

#[test]
fn starved_generator_returns_partial_batch() {
    // identical minority rows have zero spread, so every draw duplicates them
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 0..20 {
        for j in 0..20 {
            x.extend([i as f64, j as f64]);
            y.push(0);
        }
    }
    x.extend([100.0; 20]);
    y.extend([1; 10]);
    let d = dataset(&x, &y);
    let mut b = ptr::null_mut();
    let s = unsafe { rs_oversample(d, RsAlgorithm::G1no as u32, 0, 1, &mut b) };
    assert_eq!(s, RsStatus::BudgetExhausted, "{}", last_error());
    assert!(last_error().contains("budget"));
    assert!(!b.is_null());
    let mut c = RsBatchCounters::default();
    let mut rows = 1;
    unsafe {
        rs_batch_counters(b, &mut c);
        rs_batch_rows(b, &mut rows);
        rs_batch_free(b);
        rs_dataset_free(d);
    }
    assert_eq!((c.requested, c.accepted, rows), (390, 0, 0));
    assert_eq!((c.attempts, c.rejected_duplicate), (390 * 1000, 390 * 1000));
}

#[test]
fn csv_loading_and_auc() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    std::fs::write(&path, "cls,a,b\nx,0,0\ny,1,1\nx,0,1\n").unwrap();
    let c_path = CString::new(path.to_str().unwrap()).unwrap();
    let column = CString::new("cls").unwrap();
    let mut d = ptr::null_mut();
    let mut cols = 0;
    unsafe {
        assert_eq!(rs_dataset_load_csv(c_path.as_ptr(), column.as_ptr(), &mut d), RsStatus::Ok, "{}", last_error());
        rs_dataset_cols(d, &mut cols);
        rs_dataset_free(d);
    }
    assert_eq!(cols, 2);

    let mut auc = 0.0;
    let s = unsafe { rs_roc_auc([0.9, 0.1, 0.5, 0.5].as_ptr(), [1u8, 0, 1, 0].as_ptr(), 4, &mut auc) };
    assert_eq!(s, RsStatus::Ok);
    assert_eq!(auc, 0.875);
    assert_eq!(unsafe { CStr::from_ptr(rs_version()) }.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
