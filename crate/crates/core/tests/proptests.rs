mod common;

use common::{c, eigs, gaussian, set_dist, M};
use krylov_prescribe::block::{blnorm, loewner_cmp, Loewner, NormalizingQuantity};
use krylov_prescribe::cli::{mtx, Scenario};
use krylov_prescribe::linalg::{companion, eig, poly_from_roots, qr, random_unitary, CMat};
use krylov_prescribe::prescribe::{construct_full_gmres, construct_restarted};
use krylov_prescribe::scenarios::{random_full, random_restarted};
use krylov_prescribe::verify::{verify_full, verify_scalar, VerifyOptions};
use num_complex::Complex64;
use proptest::prelude::*;

fn unitary_defect(q: &M) -> f64 {
    (q.adjoint() * q - M::identity(q.ncols(), q.ncols())).norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn qr_reconstructs(rows in 1usize..9, extra in 0usize..4, seed in any::<u64>()) {
        let cols = rows.saturating_sub(extra).max(1);
        let a = gaussian(rows, cols, seed);
        let f = qr(&a);
        prop_assert!(unitary_defect(&f.q) < 1e-13);
        prop_assert!((&f.q * &f.r - &a).norm() <= 1e-13 * a.norm());
        for j in 0..f.r.ncols() {
            for i in j + 1..f.r.nrows() {
                prop_assert_eq!(f.r[(i, j)], c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn blnorm_is_left_unitarily_invariant(n in 2usize..9, p in 1usize..3, seed in any::<u64>()) {
        prop_assume!(p <= n);
        let z = gaussian(n, p, seed);
        let g = blnorm(&z);
        prop_assert!((g.gram() - z.adjoint() * &z).norm() <= 1e-12 * z.norm_squared());
        let u: CMat = random_unitary(n, seed ^ 0x5a5a);
        prop_assert!((blnorm(&(u * &z)).matrix() - g.matrix()).norm() <= 1e-12 * z.norm());
        for i in 0..p {
            prop_assert!(g.matrix()[(i, i)].im == 0.0 && g.matrix()[(i, i)].re > 0.0);
        }
    }

    #[test]
    fn loewner_scaling_orders(p in 1usize..4, seed in any::<u64>(), s in 0.1f64..0.95) {
        let r = blnorm(&gaussian(p + 2, p, seed));
        let smaller = NormalizingQuantity::new(r.matrix() * c(s, 0.0)).unwrap();
        prop_assert_eq!(loewner_cmp(&r, &smaller), Loewner::Greater);
        prop_assert_eq!(loewner_cmp(&smaller, &r), Loewner::Less);
        prop_assert_eq!(loewner_cmp(&r, &r), Loewner::Equal);
    }

    #[test]
    fn companion_eigenvalues_are_the_roots(
        roots in prop::collection::vec((0.5f64..2.0, -3.2f64..3.2), 1..7)
    ) {
        let roots: Vec<Complex64> = roots.into_iter().map(|(r, t)| Complex64::from_polar(r, t)).collect();
        let comp = companion(&poly_from_roots(&roots));
        prop_assert!(set_dist(&eig(&comp).unwrap(), &roots) < 1e-6);
        // the nonsymmetric eigensolver against nalgebra's Schur form
        let h = gaussian(6, 6, roots.len() as u64);
        prop_assert!(set_dist(&eig(&h).unwrap(), &eigs(&h)) < 1e-9);
    }

    #[test]
    fn matrix_market_round_trip_is_exact(
        vals in prop::collection::vec((any::<f64>(), any::<f64>()), 1..13),
        cols in 1usize..4,
    ) {
        let vals: Vec<_> = vals.into_iter().filter(|(a, b)| a.is_finite() && b.is_finite()).collect();
        prop_assume!(vals.len() >= cols);
        let rows = vals.len() / cols;
        let m = M::from_fn(rows, cols, |i, j| { let (a, b) = vals[i * cols + j]; c(a, b) });
        let back = mtx::parse(&mtx::to_string(&m)).unwrap();
        prop_assert_eq!(back, m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn full_constructions_verify(n in 2usize..11, seed in any::<u64>()) {
        let p = random_full(n, seed);
        let con = construct_full_gmres(&p).unwrap();
        let rep = verify_full(&con, &p, &VerifyOptions::default());
        prop_assert!(rep.pass, "{:?}", rep.failures());
    }

    #[test]
    fn restarted_constructions_verify(m in 1usize..5, cycles in 1usize..5, seed in any::<u64>()) {
        let sp = random_restarted(m, cycles, seed);
        let con = construct_restarted(&sp).unwrap();
        let rep = verify_scalar(&con, &sp, &VerifyOptions::default());
        // a failure must come with the sensitivity warning that explains it
        let warned = rep.warnings.iter().any(|w| w.contains("amplify"));
        prop_assert!(rep.pass || warned, "{:?}", rep.failures());
    }

    #[test]
    fn verdict_is_monotone_in_tolerance(seed in any::<u64>(), exp in -13i32..-2) {
        let sp = random_restarted(3, 3, seed);
        let mut con = construct_restarted(&sp).unwrap();
        // a small perturbation makes the verdict depend on the tolerance
        let e = gaussian(9, 9, seed ^ 1);
        let a = con.a() + &e * c(1e-9 * con.a().norm() / e.norm(), 0.0);
        con.assembly.a = a;
        let tight = VerifyOptions { tolerance: 10f64.powi(exp) };
        let loose = VerifyOptions { tolerance: 10f64.powi(exp + 1) };
        let rt = verify_scalar(&con, &sp, &tight);
        let rl = verify_scalar(&con, &sp, &loose);
        if rt.pass {
            prop_assert!(rl.pass);
        }
        for ch in &rl.checks {
            if let Some(t) = rt.check(&ch.name) {
                prop_assert!(!t.pass || ch.pass, "{} passes tight but not loose", ch.name);
            }
        }
    }

    #[test]
    fn scenario_json_round_trips(m in 1usize..4, cycles in 1usize..4, seed in any::<u64>()) {
        let sc = Scenario::from_scalar(&random_restarted(m, cycles, seed), None);
        let text = sc.to_json();
        let back = Scenario::parse(&text).unwrap();
        prop_assert_eq!(&back, &sc);
        prop_assert_eq!(back.to_json(), text);
    }
}
