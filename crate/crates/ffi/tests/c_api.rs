use std::ffi::{CStr, CString};
use std::ptr;

use lanfa_ffi::*;

fn last_error() -> String {
    let p = lanfa_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn uniform(n: usize) -> *mut LanfaOperator {
    let mut op = ptr::null_mut();
    assert_eq!(unsafe { lanfa_operator_uniform(n, 0.1, 10.0, &mut op) }, LanfaStatus::Ok);
    op
}

#[test]
fn operator_round_trip() {
    let eigs = [1.0, 2.0, 3.0];
    let mut op = ptr::null_mut();
    unsafe {
        assert_eq!(lanfa_operator_diagonal(eigs.as_ptr(), 3, &mut op), LanfaStatus::Ok);
        assert_eq!(lanfa_operator_dim(op), 3);
        let x = [1.0, 1.0, 1.0];
        let mut y = [0.0; 3];
        assert_eq!(lanfa_operator_apply(op, x.as_ptr(), y.as_mut_ptr(), 3), LanfaStatus::Ok);
        assert_eq!(y, [1.0, 2.0, 3.0]);
        assert_eq!(lanfa_operator_apply(op, x.as_ptr(), y.as_mut_ptr(), 2), LanfaStatus::DimensionMismatch);
        lanfa_operator_free(op);
        lanfa_operator_free(ptr::null_mut());
    }
}

#[test]
fn errors_are_reported() {
    let mut op = ptr::null_mut();
    unsafe {
        assert_eq!(lanfa_operator_uniform(1, 0.0, 1.0, &mut op), LanfaStatus::InvalidArgument);
        assert!(op.is_null());
        assert!(last_error().contains("uniform"));
        assert_eq!(lanfa_operator_diagonal(ptr::null(), 3, &mut op), LanfaStatus::NullPointer);
        assert!(last_error().contains("eigenvalues"));
        let mut v = 0.0;
        assert_eq!(lanfa_cg_bound(0.5, 3, &mut v), LanfaStatus::InvalidArgument);
    }
}

#[test]
fn lanczos_fa_matches_exact_at_full_dimension() {
    let n = 12;
    let op = uniform(n);
    let b = vec![1.0 / (n as f64).sqrt(); n];
    let mut fact = ptr::null_mut();
    unsafe {
        assert_eq!(lanfa_lanczos(op, b.as_ptr(), n, n, true, LanfaPrecision::Fp64, &mut fact), LanfaStatus::Ok);
        assert_eq!(lanfa_factorization_steps(fact), n);
        let f = CString::new("sqrt").unwrap();
        let mut out = vec![0.0; n];
        assert_eq!(lanfa_fa(fact, f.as_ptr(), out.as_mut_ptr(), n), LanfaStatus::Ok);
        for (i, v) in out.iter().enumerate() {
            let lam = 0.1 + 9.9 * i as f64 / (n - 1) as f64;
            assert!((v - lam.sqrt() * b[i]).abs() < 1e-12, "{i}: {v}");
        }
        let mut q = 0.0;
        assert_eq!(lanfa_quadform(fact, f.as_ptr(), &mut q), LanfaStatus::Ok);
        let exact: f64 = (0..n).map(|i| (0.1 + 9.9 * i as f64 / (n - 1) as f64).sqrt() / n as f64).sum();
        assert!((q - exact).abs() < 1e-12);

        let mut written = 0;
        let mut small = [0.0; 2];
        assert_eq!(lanfa_factorization_ritz(fact, small.as_mut_ptr(), 2, &mut written), LanfaStatus::BufferTooSmall);
        assert_eq!(written, n);
        let mut ritz = vec![0.0; n];
        assert_eq!(lanfa_factorization_ritz(fact, ritz.as_mut_ptr(), n, &mut written), LanfaStatus::Ok);
        assert!((ritz[0] - 0.1).abs() < 1e-10 && (ritz[n - 1] - 10.0).abs() < 1e-10);

        let bad = CString::new("step").unwrap();
        assert_eq!(lanfa_fa(fact, bad.as_ptr(), out.as_mut_ptr(), n), LanfaStatus::InvalidArgument);
        lanfa_factorization_free(fact);
        lanfa_operator_free(op);
    }
}

#[test]
fn bound_curve_rows_dominate_the_error() {
    let n = 200;
    let op = uniform(n);
    let b = vec![1.0 / (n as f64).sqrt(); n];
    let settings = CString::new("f = \"sqrt\"\nkmax = 15\nsets = \"aposteriori\"\n").unwrap();
    let mut rows = vec![
        LanfaBoundRow { k: 0, true_err: 0.0, err_w: 0.0, res_w: 0.0, integral_term: 0.0, bound: 0.0, fp_term: 0.0, quad_err: 0.0 };
        15
    ];
    let mut written = 0;
    unsafe {
        let s = lanfa_bound_curve(op, b.as_ptr(), n, settings.as_ptr(), rows.as_mut_ptr(), rows.len(), &mut written);
        assert_eq!(s, LanfaStatus::Ok, "{}", last_error());
        assert_eq!(written, 15);
        for r in &rows {
            assert!(r.bound + r.quad_err >= r.true_err, "k={}", r.k);
            assert!(r.fp_term.is_nan());
        }
        let mut q = vec![
            LanfaQuadformRow { k: 0, true_err: 0.0, res_w_sq: 0.0, integral_term: 0.0, bound: 0.0, quad_err: 0.0 };
            4
        ];
        let s = lanfa_quadform_curve(op, b.as_ptr(), n, settings.as_ptr(), q.as_mut_ptr(), q.len(), &mut written);
        assert_eq!(s, LanfaStatus::BufferTooSmall);
        assert_eq!(written, 15);
        let bad = CString::new("nonsense_key = 1").unwrap();
        let s = lanfa_bound_curve(op, b.as_ptr(), n, bad.as_ptr(), rows.as_mut_ptr(), rows.len(), &mut written);
        assert_eq!(s, LanfaStatus::InvalidArgument);
        lanfa_operator_free(op);
    }
}

#[test]
fn constants() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(lanfa_piecewise_constant(LanfaPiecewise::Step, 1.0, 0.0, 3.0, &mut v), LanfaStatus::Ok);
        assert!(v > 0.0);
        assert_eq!(lanfa_indefinite_iterations(-2.0, -1.0, 1.0, 2.0, 0.01, &mut v), LanfaStatus::Ok);
        assert!((v - 4.0 * (200.0 * 2f64.sqrt()).ln()).abs() < 1e-12);
        assert_eq!(lanfa_sqrt_pacman_constant(5, 1.0, &mut v), LanfaStatus::Ok);
        assert!(v.is_finite() && v > 0.0);
    }
    assert!(!lanfa_version().is_null());
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/lanfa.h");
    let Ok(status) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header])
        .status()
    else {
        eprintln!("no C compiler; skipping");
        return;
    };
    assert!(status.success());
}
