use std::f64::consts::PI;

use proptest::prelude::*;
use sturmkit::deficiency::{
    analyze, log_grid, min_sinh, sweep, Branch, DeficiencyProblem, DEFAULT_SHOOTING_STEPS,
};
use sturmkit::eigensolver::{bisect_descending, bisect_eigenvalue};
use sturmkit::quadrature::QuadratureRule;
use sturmkit::spectrum::{
    analytic_eigenfunction, analytic_eigenvalue, quadratic_fit, BISECTION_TOL,
};
use sturmkit::symmetry::{boundary_corpus, check_pair, dirichlet_corpus, symmetry_residual};
use sturmkit::{
    apply_operator, build_grid, deformation_value, discretize, Complex64, OperatorSpec,
    PhysicalConstants, TestFunction,
};

fn spec_with(hbar: f64, c: f64) -> OperatorSpec {
    OperatorSpec::canonical(PhysicalConstants::new(hbar, c).unwrap())
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn smooth_function() -> impl Strategy<Value = TestFunction> {
    prop_oneof![
        prop::collection::vec(complex(), 1..6).prop_map(TestFunction::polynomial),
        (complex(), 0.1f64..8.0, 0.0f64..6.3).prop_map(|(a, k, p)| TestFunction::sine(a, k, p)),
        (complex(), -6.0f64..6.0).prop_map(|(a, k)| TestFunction::plane_wave(a, k)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn deformation_even_for_random_speeds(v in -50.0f64..50.0, hbar in 0.1f64..5.0, c in 0.1f64..5.0) {
        let k = PhysicalConstants::new(hbar, c).unwrap();
        prop_assert_eq!(deformation_value(v, &k), deformation_value(-v, &k));
    }

    #[test]
    fn operator_is_linear(
        f in smooth_function(),
        g in smooth_function(),
        alpha in complex(),
        beta in complex(),
        t in -1.0f64..1.0,
        hbar in 0.2f64..3.0,
    ) {
        let spec = spec_with(hbar, 1.0);
        let v = t * spec.v_c();
        let combined = f.linear_combination(alpha, &g, beta);
        let lhs = apply_operator(&combined, v, &spec).unwrap();
        let cf = apply_operator(&f, v, &spec).unwrap();
        let cg = apply_operator(&g, v, &spec).unwrap();
        let rhs = alpha * cf + beta * cg;
        let scale = (alpha * cf).norm() + (beta * cg).norm() + 1.0;
        prop_assert!((lhs - rhs).norm() <= 1e-13 * scale, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn green_identity_holds_for_random_corpora(seed in any::<u64>(), hbar in 0.3f64..2.0, c in 0.5f64..2.0) {
        let spec = spec_with(hbar, c);
        let rule = QuadratureRule::for_domain(&spec.domain);
        for (psi, phi) in dirichlet_corpus(&spec, seed, 4).iter().chain(&boundary_corpus(seed, 4)) {
            let check = check_pair(psi, phi, &spec, &rule).unwrap();
            prop_assert!(check.passed, "{:?}", check);
        }
    }

    #[test]
    fn only_the_coupling_enters_the_residual(seed in any::<u64>(), scale in 0.2f64..5.0) {
        let base = OperatorSpec::with_half_width(PhysicalConstants::new(0.7, 1.3).unwrap(), 0.9).unwrap();
        let scaled = OperatorSpec::with_half_width(
            PhysicalConstants::new(0.7 * scale, 1.3 * scale).unwrap(),
            0.9,
        );
        // the half-width must stay below c
        prop_assume!(scaled.is_ok());
        let scaled = scaled.unwrap();
        let rule = QuadratureRule::for_domain(&base.domain);
        for (psi, phi) in boundary_corpus(seed, 3) {
            let a = symmetry_residual(&psi, &phi, &base, &rule).unwrap();
            let b = symmetry_residual(&psi, &phi, &scaled, &rule).unwrap();
            prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()), "{} vs {}", a, b);
        }
    }

    #[test]
    fn branches_are_exact_conjugates(lambda in 1e-3f64..1e3, hbar in 0.2f64..5.0, c in 0.2f64..5.0) {
        let spec = spec_with(hbar, c);
        let plus = analyze(&DeficiencyProblem::new(lambda, Branch::Plus).unwrap(), &spec, 200).unwrap();
        let minus = analyze(&DeficiencyProblem::new(lambda, Branch::Minus).unwrap(), &spec, 200).unwrap();
        prop_assert_eq!(minus.mu, plus.mu.conj());
        prop_assert_eq!(minus.determinant, plus.determinant.conj());
    }

    #[test]
    fn spectrum_stays_below_pi(n in 1usize..400, hbar in 0.01f64..3.0, c in 0.2f64..5.0) {
        let spec = spec_with(hbar, c);
        let matrix = discretize(&spec, &build_grid(&spec.domain, n).unwrap()).unwrap();
        let top = bisect_descending(&matrix, 1, BISECTION_TOL).unwrap();
        prop_assert!(top < PI, "{}", top);
    }

    #[test]
    fn bisection_matches_closed_form(n in 1usize..=2000, index in 1usize..=20) {
        prop_assume!(index <= n);
        let spec = OperatorSpec::default();
        let matrix = discretize(&spec, &build_grid(&spec.domain, n).unwrap()).unwrap();
        let got = bisect_descending(&matrix, index, BISECTION_TOL).unwrap();
        let want = matrix.closed_form_eigenvalue(index).unwrap();
        prop_assert!((got - want).abs() <= 1e-10, "{} vs {}", got, want);
    }

    #[test]
    fn top_gaps_are_simple(n in 20usize..=2000) {
        let spec = OperatorSpec::default();
        let matrix = discretize(&spec, &build_grid(&spec.domain, n).unwrap()).unwrap();
        let values: Vec<f64> = (1..=20).map(|k| bisect_descending(&matrix, k, BISECTION_TOL).unwrap()).collect();
        for w in values.windows(2) {
            prop_assert!(w[0] - w[1] > 1e-12 * w[0].abs().max(w[1].abs()));
        }
    }

    #[test]
    fn analytic_eigenfunctions_satisfy_the_eigenrelation(n in 1usize..=20, hbar in 0.2f64..3.0) {
        let spec = spec_with(hbar, 1.0);
        let phi = analytic_eigenfunction(n, &spec).unwrap();
        let want = analytic_eigenvalue(n, &spec).unwrap();
        for i in 0..100 {
            let v = spec.v_c() * (-0.99 + 1.98 * i as f64 / 99.0);
            let value = phi.value(v);
            if value.norm() < 1e-3 {
                continue;
            }
            let ratio = apply_operator(&phi, v, &spec).unwrap() / value;
            prop_assert!((ratio.re - want).abs() <= 1e-10 * want.abs(), "{} vs {}", ratio, want);
            prop_assert!(ratio.im.abs() <= 1e-10 * want.abs());
        }
    }
}

#[test]
fn quadratic_decrease_of_the_analytic_spectrum() {
    for (hbar, c) in [(1.0, 1.0), (0.5, 2.0), (3.0, 1.5)] {
        let fit = quadratic_fit(&spec_with(hbar, c), 20).unwrap();
        assert!(fit.r_squared > 1.0 - 1e-12);
        assert!(fit.slope < 0.0);
    }
}

#[test]
fn bisection_agrees_with_sturm_order() {
    let spec = OperatorSpec::default();
    let matrix = discretize(&spec, &build_grid(&spec.domain, 37).unwrap()).unwrap();
    for k in 1..=37 {
        let up = bisect_eigenvalue(&matrix, k, BISECTION_TOL).unwrap();
        let down = bisect_descending(&matrix, 38 - k, BISECTION_TOL).unwrap();
        assert_eq!(up, down);
    }
}

#[test]
fn determinant_never_vanishes_on_the_log_grid() {
    for (hbar, c) in [(1.0, 1.0), (0.5, 2.0), (2.0, 0.5)] {
        let spec = spec_with(hbar, c);
        let results = sweep(&spec, &log_grid(1e-3, 1e3, 50), DEFAULT_SHOOTING_STEPS).unwrap();
        assert!(results.iter().all(|r| r.n_plus == 0 && r.n_minus == 0));
        let (_, m) = min_sinh(&results).unwrap();
        assert!(m > 0.0);
    }
}

/// Max error of the matrix against the operator at nodes away from the ends.
fn stencil_error(f: &TestFunction, spec: &OperatorSpec, n: usize) -> f64 {
    let grid = build_grid(&spec.domain, n).unwrap();
    let matrix = discretize(spec, &grid).unwrap();
    let x = grid.sample(|v| f.value(v).re);
    let ax = matrix.apply(&x);
    grid.nodes()
        .iter()
        .enumerate()
        .skip(1)
        .take(n - 2)
        .map(|(i, &v)| (ax[i] - apply_operator(f, v, spec).unwrap().re).abs())
        .fold(0.0, f64::max)
}

#[test]
fn stencil_is_exact_on_cubics() {
    let spec = OperatorSpec::default();
    let cubic = TestFunction::polynomial(vec![0.3.into(), (-1.0).into(), 0.5.into(), 2.0.into()]);
    for n in [10, 40, 160] {
        assert!(stencil_error(&cubic, &spec, n) < 1e-8 * (n * n) as f64);
    }
}

#[test]
fn stencil_converges_at_second_order() {
    let spec = OperatorSpec::default();
    let quartic = TestFunction::polynomial(vec![0.0.into(), 0.0.into(), 0.0.into(), 0.0.into(), 1.0.into()]);
    let wave = TestFunction::sine(1.0.into(), 3.0, 0.4);
    for f in [quartic, wave] {
        let sizes = [50, 100, 200, 400];
        let errors: Vec<f64> = sizes.iter().map(|&n| stencil_error(&f, &spec, n)).collect();
        for (s, e) in sizes.windows(2).zip(errors.windows(2)) {
            let h_ratio = (s[1] + 1) as f64 / (s[0] + 1) as f64;
            let order = (e[0] / e[1]).ln() / h_ratio.ln();
            assert!((1.8..=2.2).contains(&order), "{}: order {order} from {errors:?}", f.label());
        }
    }
}
