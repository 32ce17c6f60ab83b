//! Values computed once with 40-digit arithmetic (mpmath) and frozen here.

#![allow(clippy::excessive_precision)]

use lanfa::bounds::{disk_integral, pacman_gamma_ratio, sqrt_pacman_constant};
use lanfa::contour::QuadOptions;
use lanfa::fa::lanczos_fa;
use lanfa::function::ScalarFunction;
use lanfa::lanczos::{lanczos, Precision};
use lanfa::linalg::SymmetricOperator;
use lanfa::linsys::{cg_apriori_bound, indefinite_iteration_bound};

fn close(got: f64, want: f64, rel: f64) {
    assert!((got - want).abs() <= rel * want.abs(), "got {got:e}, want {want:e}");
}

#[test]
fn gamma_ratio() {
    // Gamma(k - 1/2) / Gamma(k + 1)
    for (k, want) in [
        (1, 1.772453850905516027298167483341145),
        (2, 0.4431134627263790068245418708352863),
        (10, 0.03287380456200645036591983911134586),
        (100, 0.001003769634297740523679513328625142),
    ] {
        close(pacman_gamma_ratio(k), want, 1e-14);
    }
}

#[test]
fn sqrt_pacman_limit_constant() {
    close(sqrt_pacman_constant(10, 4.0).unwrap(), 0.074188232421875, 1e-14);
}

#[test]
fn cg_bound_value() {
    close(cg_apriori_bound(100.0, 20).unwrap(), 0.03614319004276076435486304888735105, 1e-14);
}

#[test]
fn indefinite_iteration_count() {
    let b = indefinite_iteration_bound(-2.0, -1.0, 1.0, 2.0, 0.01).unwrap();
    close(b.gamma, 2.0, 1e-15);
    close(b.k_bound, 22.57956382731203732864732436622397, 1e-14);
}

#[test]
fn disk_integral_of_exp() {
    // e * I_0(1)
    let v = disk_integral(&ScalarFunction::Exp { scale: 1.0 }, 0.0, 1.0, &QuadOptions { rel_tol: 1e-12, ..Default::default() }).unwrap();
    close(v, 3.441523869125335257995533485217653, 1e-10);
}

#[test]
fn two_step_exponential() {
    let a = SymmetricOperator::diagonal(vec![1.0, 2.0, 3.0, 5.0]).unwrap();
    let fact = lanczos(&a, &[1.0; 4], 2, true, Precision::Fp64).unwrap();
    let got = lanczos_fa(&fact, &ScalarFunction::Exp { scale: 1.0 }).unwrap();
    let want = [
        -12.43728560261043388038960553915401,
        18.36847432280579937214735739311779,
        49.17423424822203262468432032538959,
        110.7857540990544991297582461899332,
    ];
    for (g, w) in got.iter().zip(want) {
        close(*g, w, 1e-12);
    }
}
