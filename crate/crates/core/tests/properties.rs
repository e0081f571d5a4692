use std::f64::consts::PI;

use proptest::collection::vec;
use proptest::prelude::*;

use specbox::exec::Exec;
use specbox::inclusion::{
    grid_points, hausdorff, GridSpec, InclusionMethod, IndexFamily, PointSet, SectionFamily, SymbolAlphabet,
};
use specbox::linalg::{
    characteristic_polynomial, complex_eigenvalues_small, hermitian_eigenvalues, is_psd, relative_residual,
    smallest_singular_value, Tolerances,
};
use specbox::operator::{extract_rect, extract_square, OperatorSpec};
use specbox::penalty::{eps_tau, eps_weighted, theta_n, theta_residual, Method, Mode, PenaltyTable};
use specbox::{CMatrix, C64};

fn c64() -> impl Strategy<Value = C64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| C64::new(a, b))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix> {
    vec(c64(), rows * cols).prop_map(move |d| CMatrix::from_vec(rows, cols, d).unwrap())
}

fn square() -> impl Strategy<Value = CMatrix> {
    (1usize..=6).prop_flat_map(|n| matrix(n, n))
}

fn periodic_op() -> impl Strategy<Value = OperatorSpec> {
    (vec(c64(), 1..=3), vec(c64(), 1..=3), vec(c64(), 1..=3))
        .prop_map(|(a, b, g)| OperatorSpec::periodic(&a, &b, &g).unwrap())
}

fn point_set(max: usize) -> impl Strategy<Value = PointSet> {
    vec(c64(), 1..=max).prop_map(PointSet::new)
}

fn full_period(op: &OperatorSpec) -> IndexFamily {
    IndexFamily::ExplicitK((0..op.period().unwrap() as i64).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smin_invariant_under_adjoint(m in square()) {
        let tol = Tolerances::default().sv;
        let d = (smallest_singular_value(&m) - smallest_singular_value(&m.conj_transpose())).abs();
        prop_assert!(d <= 2.0 * tol, "difference {d}");
    }

    #[test]
    fn psd_monotone_in_shift(m in matrix(5, 5), s1 in -3.0..6.0f64, drop in 0.0..4.0f64) {
        let h = m.gram();
        if is_psd(&h, s1).unwrap() {
            prop_assert!(is_psd(&h, s1 - drop).unwrap());
        }
    }

    #[test]
    fn smin_squared_is_min_gram_eigenvalue(m in matrix(8, 5)) {
        let s = smallest_singular_value(&m);
        let ev = hermitian_eigenvalues(&m.gram()).unwrap();
        let min = ev.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert!((s * s - min).abs() <= 1e-9, "{} vs {min}", s * s);
    }

    #[test]
    fn small_eigenvalues_are_polynomial_roots(m in matrix(4, 4)) {
        let poly = characteristic_polynomial(&m).unwrap();
        for z in complex_eigenvalues_small(&m).unwrap() {
            prop_assert!(relative_residual(&poly, z) < 1e-8);
        }
    }

    #[test]
    fn rect_middle_rows_are_square(op in periodic_op(), n in 1usize..=8, k in -20i64..=20) {
        let rect = extract_rect(&op, n, k).unwrap().matrix;
        let sq = extract_square(&op, n, k).unwrap().matrix;
        prop_assert_eq!(rect.submatrix(1, 0, n, n), sq);
    }

    #[test]
    fn sections_periodic_in_k(op in periodic_op(), n in 1usize..=8, k in -20i64..=20) {
        let p = op.period().unwrap() as i64;
        prop_assert_eq!(extract_square(&op, n, k).unwrap().matrix, extract_square(&op, n, k + p).unwrap().matrix);
        prop_assert_eq!(extract_rect(&op, n, k).unwrap().matrix, extract_rect(&op, n, k + p).unwrap().matrix);
    }

    #[test]
    fn adjoint_is_involution(op in periodic_op()) {
        prop_assert_eq!(op.adjoint().adjoint(), op);
    }

    #[test]
    fn tau1_branches_swap_under_adjoint(op in periodic_op(), n in 1usize..=6, z in c64()) {
        let fam = SectionFamily::build(&op, InclusionMethod::Tau1, n, &full_period(&op)).unwrap();
        let adj = op.adjoint();
        let fam_adj = SectionFamily::build(&adj, InclusionMethod::Tau1, n, &full_period(&adj)).unwrap();
        let d = (fam.mu(z) - fam_adj.mu(z.conj())).abs();
        prop_assert!(d <= 2.0 * Tolerances::default().sv, "difference {d}");
    }

    #[test]
    fn mu_is_one_lipschitz(op in periodic_op(), n in 1usize..=6, a in c64(), b in c64()) {
        let fam = SectionFamily::build(&op, InclusionMethod::Tau1, n, &full_period(&op)).unwrap();
        let slack = 2.0 * Tolerances::default().sv;
        prop_assert!((fam.mu(a) - fam.mu(b)).abs() <= (a - b).norm() + slack);
    }

    #[test]
    fn operator_json_round_trip(op in periodic_op()) {
        let back = OperatorSpec::from_json_str(&op.to_json_string()).unwrap();
        prop_assert_eq!(back.to_json_string(), op.to_json_string());
        prop_assert_eq!(back, op);
    }

    #[test]
    fn alphabet_json_round_trip(a in vec(c64(), 1..4), b in vec(c64(), 1..4), g in vec(c64(), 1..4)) {
        let alphabet = SymbolAlphabet::new(a, b, g).unwrap();
        prop_assert_eq!(SymbolAlphabet::from_json_str(&alphabet.to_json_string()).unwrap(), alphabet);
    }

    #[test]
    fn theta_in_bracket(n in 1usize..200, phi in 0.0..=1.0f64) {
        let t = theta_n(n, phi);
        prop_assert!(PI / (2 * n + 1) as f64 <= t && t <= PI / (n + 2) as f64);
        prop_assert!(theta_residual(n, phi, t).abs() < 1e-12);
        prop_assert!((t - theta_n(n, 1.0 - phi)).abs() <= 1e-14);
    }

    #[test]
    fn optimal_tau_symmetric(n in 1usize..=40, r in 0.0..3.0f64, s in 0.0..3.0f64) {
        let a = eps_tau(n, r, s, Mode::Optimal).unwrap().value;
        let b = eps_tau(n, s, r, Mode::Optimal).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
    }

    #[test]
    fn optimal_tau_below_any_weighting(n in 2usize..=10, r in 0.0..3.0f64, s in 0.0..3.0f64, seed in vec(0.01..1.0f64, 10)) {
        let w = &seed[..n];
        let opt = eps_tau(n, r, s, Mode::Optimal).unwrap().value;
        prop_assert!(opt <= eps_weighted(Method::Tau, w, r, s).unwrap() + 1e-12);
    }

    #[test]
    fn penalty_tables_nonincreasing(r in 0.0..3.0f64, s in 0.01..3.0f64) {
        let ns: Vec<usize> = (1..=30).collect();
        let cases = [
            (Method::Tau, Mode::Optimal),
            (Method::Tau, Mode::CorollaryA),
            (Method::Tau, Mode::CorollaryB),
            (Method::Tau, Mode::RationalBound),
            (Method::Pi, Mode::Optimal),
            (Method::Tau1, Mode::Optimal),
        ];
        for (method, mode) in cases {
            let table = PenaltyTable::build(method, mode, &ns, r, s).unwrap();
            for w in table.rows.windows(2) {
                prop_assert!(w[1].value <= w[0].value + 1e-12, "{method:?} {mode:?} n={}", w[1].n);
                prop_assert!(w[1].value >= 0.0);
            }
        }
    }

    #[test]
    fn hausdorff_is_a_metric(a in point_set(12), b in point_set(12), c in point_set(12)) {
        let d = |x: &PointSet, y: &PointSet| hausdorff(x, y, Exec::Sequential).unwrap();
        prop_assert_eq!(d(&a, &a), 0.0);
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-12);
    }

    #[test]
    fn hausdorff_same_in_parallel(a in point_set(40), b in point_set(40)) {
        prop_assert_eq!(
            hausdorff(&a, &b, Exec::Sequential).unwrap().to_bits(),
            hausdorff(&a, &b, Exec::Parallel).unwrap().to_bits()
        );
    }

    #[test]
    fn grid_symmetric_and_inside(n in 1usize..=12, radius in 0.1..3.0f64) {
        let g = grid_points(&GridSpec::new(n, radius).unwrap());
        for z in g.iter() {
            prop_assert!(z.norm() < radius + 1e-12);
            for w in [z.conj(), -z, C64::new(z.im, z.re)] {
                prop_assert!(g.iter().any(|&p| (p - w).norm() < 1e-12), "{w} missing");
            }
        }
    }
}
