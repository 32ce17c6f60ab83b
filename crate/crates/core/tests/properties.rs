use num_complex::Complex64;
use proptest::prelude::*;

use lanfa::bounds::bound_curve;
use lanfa::cli::RunConfig;
use lanfa::contour::h_norm_interval;
use lanfa::fa::{ground_truth, lanczos_fa};
use lanfa::function::ScalarFunction;
use lanfa::lanczos::{lanczos, recurrence_residual, Precision};
use lanfa::linalg::operator::norm2;
use lanfa::linalg::SymmetricOperator;
use lanfa::linsys::{lanczos_residual_norms, minres_residual_norms};
use lanfa::problems::{gen_rhs, RhsPolicy};

fn spectrum() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.1f64..10.0, 20..60)
}

fn problem(eigs: Vec<f64>, seed: u64) -> (SymmetricOperator, Vec<f64>) {
    let a = SymmetricOperator::diagonal(eigs).unwrap();
    let b = gen_rhs(RhsPolicy::Gaussian, &a, seed).unwrap();
    (a, b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn reorthogonalized_basis_is_orthonormal(eigs in spectrum(), seed in 0u64..1000, k in 2usize..20) {
        let (a, b) = problem(eigs, seed);
        let fact = lanczos(&a, &b, k, true, Precision::Fp64).unwrap();
        prop_assert!(fact.orthogonality_loss() < 1e-12, "loss {}", fact.orthogonality_loss());
        let rr = recurrence_residual(&a, &fact).unwrap();
        let rel = rr.frobenius_prefix(fact.steps()) / a.norm_estimate();
        prop_assert!(rel < 1e-12, "recurrence residual {rel}");
    }

    #[test]
    fn h_norm_matches_dense_sampling(
        w in -5.0f64..0.0,
        re in -2.0f64..12.0,
        im in 0.05f64..5.0,
        lo in 0.1f64..5.0,
        width in 0.0f64..5.0,
    ) {
        let z = Complex64::new(re, im);
        let hi = lo + width;
        let closed = h_norm_interval(w, z, lo, hi);
        let sampled = (0..=20_000)
            .map(|i| lo + width * i as f64 / 20_000.0)
            .map(|x| (x - w).abs() / (Complex64::new(x, 0.0) - z).norm())
            .fold(0.0f64, f64::max);
        prop_assert!(sampled <= closed * (1.0 + 1e-12));
        prop_assert!(sampled >= closed * (1.0 - 1e-4), "sampled {sampled} closed {closed}");
    }

    #[test]
    fn low_degree_polynomials_are_exact(
        eigs in spectrum(),
        seed in 0u64..1000,
        coeffs in prop::collection::vec(-1.0f64..1.0, 1..8),
    ) {
        let (a, b) = problem(eigs, seed);
        let f = ScalarFunction::Polynomial { coeffs: coeffs.clone() };
        let fact = lanczos(&a, &b, coeffs.len(), true, Precision::Fp64).unwrap();
        let approx = lanczos_fa(&fact, &f).unwrap();
        let exact = ground_truth(&a, &b, &f).unwrap();
        let diff: Vec<f64> = approx.iter().zip(&exact).map(|(x, y)| x - y).collect();
        let scale = norm2(&exact).max(norm2(&b));
        prop_assert!(norm2(&diff) <= 1e-9 * scale, "err {} scale {scale}", norm2(&diff));
    }

    #[test]
    fn minres_never_exceeds_galerkin(eigs in spectrum(), seed in 0u64..1000, w in -3.0f64..5.0) {
        let (a, b) = problem(eigs, seed);
        let fact = lanczos(&a, &b, 15, true, Precision::Fp64).unwrap();
        let minres = minres_residual_norms(&fact, w);
        let galerkin = lanczos_residual_norms(&fact, w).unwrap();
        for pair in minres.windows(2) {
            prop_assert!(pair[1] <= pair[0] * (1.0 + 1e-10));
        }
        for (m, g) in minres.iter().zip(&galerkin) {
            if let Some(g) = g {
                prop_assert!(*m <= g * (1.0 + 1e-8) + 1e-14 * minres[0], "minres {m} galerkin {g}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn aposteriori_bound_dominates_apriori(
        seed in 0u64..1000,
        f in prop::sample::select(vec!["sqrt", "log", "invpow:2", "exp:-1"]),
    ) {
        let base = RunConfig {
            problem: Some("wishart".into()),
            n: Some(40),
            m: Some(80),
            seed: Some(seed),
            rhs: Some("gaussian".into()),
            f: Some(f.into()),
            kmax: Some(15),
            ..Default::default()
        };
        let (spec, cfg) = base.problem_spec().unwrap();
        let (a, b) = spec.build().unwrap();
        let mut reports = Vec::new();
        for sets in ["apriori", "aposteriori"] {
            let c = RunConfig { sets: Some(sets.into()), ..cfg.clone() };
            let (bound, _) = c.resolve_bound(&a, false).unwrap();
            reports.push(bound_curve(&a, &b, &bound).unwrap());
        }
        for rep in &reports {
            prop_assert!(rep.violations().is_empty());
        }
        for (p, q) in reports[0].rows.iter().zip(&reports[1].rows) {
            let slack = p.quad_err_estimate + q.quad_err_estimate + 1e-12 * p.bound_value.abs();
            prop_assert!(q.bound_value <= p.bound_value + slack, "k {} apriori {} aposteriori {}", p.k, p.bound_value, q.bound_value);
        }
    }
}
