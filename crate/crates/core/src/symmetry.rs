//! Formal symmetry of the operator under the `L^2([-v_c, v_c])` inner product.
//!
//! For smooth `psi`, `phi` Green's identity gives
//!
//! ```text
//! <C psi, phi> - <psi, C phi> = pi (hbar^2/c^2) [psi' conj(phi) - psi conj(phi')]_{-v_c}^{v_c}
//! ```
//!
//! so the residual vanishes whenever both functions satisfy the Dirichlet
//! condition. This module evaluates both sides independently: the left by
//! quadrature, the right in closed form.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::function::TestFunction;
use crate::operator::{operator_image, IntervalDomain, OperatorSpec};
use crate::quadrature::QuadratureRule;

/// Relative tolerance of the Dirichlet residual against the natural scale.
pub const DIRICHLET_RESIDUAL_TOL: f64 = 1e-10;
/// Relative size of `|f(+-v_c)|` below which a function counts as Dirichlet.
pub const DIRICHLET_MEMBERSHIP_TOL: f64 = 1e-12;
/// Roundoff allowance added to the doubling error estimate, relative to the natural scale.
pub const ROUNDOFF_FLOOR: f64 = 1e-13;

/// `sum_i w_i f(x_i) conj(g(x_i))`.
pub fn inner_product(f: &TestFunction, g: &TestFunction, rule: &QuadratureRule) -> Complex64 {
    rule.integrate(|v| f.value(v) * g.value(v).conj())
}

/// `sqrt(<f, f>)`.
pub fn norm(f: &TestFunction, rule: &QuadratureRule) -> f64 {
    rule.integrate_real(|v| f.value(v).norm_sqr()).sqrt()
}

/// `<C psi, phi> - <psi, C phi>`.
pub fn symmetry_residual(
    psi: &TestFunction,
    phi: &TestFunction,
    spec: &OperatorSpec,
    rule: &QuadratureRule,
) -> Result<Complex64> {
    rule.check_spans(&spec.domain)?;
    let c_psi = operator_image(psi, spec)?;
    let c_phi = operator_image(phi, spec)?;
    Ok(inner_product(&c_psi, phi, rule) - inner_product(psi, &c_phi, rule))
}

/// Closed form of the residual from two integrations by parts.
pub fn boundary_term(psi: &TestFunction, phi: &TestFunction, spec: &OperatorSpec) -> Result<Complex64> {
    let v_c = spec.v_c();
    let bracket = |v: f64| -> Result<Complex64> {
        Ok(psi.first_derivative(v)? * phi.value(v).conj()
            - psi.value(v) * phi.first_derivative(v)?.conj())
    };
    Ok(PI * spec.coupling() * (bracket(v_c)? - bracket(-v_c)?))
}

/// `||C psi|| ||phi|| + ||psi|| ||C phi||`, the size the residual is measured against.
pub fn natural_scale(
    psi: &TestFunction,
    phi: &TestFunction,
    spec: &OperatorSpec,
    rule: &QuadratureRule,
) -> Result<f64> {
    let c_psi = operator_image(psi, spec)?;
    let c_phi = operator_image(phi, spec)?;
    Ok(norm(&c_psi, rule) * norm(phi, rule) + norm(psi, rule) * norm(&c_phi, rule))
}

/// `|f(+-v_c)| <= 1e-12 * max|f|`, the maximum taken over the endpoints and `rule`'s nodes.
pub fn is_dirichlet(f: &TestFunction, domain: &IntervalDomain, rule: &QuadratureRule) -> bool {
    let v_c = domain.v_c();
    let ends = f.value(-v_c).norm().max(f.value(v_c).norm());
    let peak = rule
        .nodes()
        .iter()
        .map(|&v| f.value(v).norm())
        .fold(ends, f64::max);
    if peak == 0.0 {
        return true;
    }
    ends <= DIRICHLET_MEMBERSHIP_TOL * peak
}

/// Everything measured for one `(psi, phi)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairCheck {
    pub label: String,
    pub dirichlet: bool,
    pub residual: Complex64,
    pub boundary: Complex64,
    pub scale: f64,
    /// `|residual - residual on the doubled rule| + ROUNDOFF_FLOOR * scale`.
    pub error_bound: f64,
    pub passed: bool,
}

impl PairCheck {
    /// `|residual - boundary|`.
    pub fn green_defect(&self) -> f64 {
        (self.residual - self.boundary).norm()
    }

    /// Residual divided by the natural scale.
    pub fn relative_residual(&self) -> f64 {
        if self.scale == 0.0 {
            self.residual.norm()
        } else {
            self.residual.norm() / self.scale
        }
    }
}

/// Dirichlet pairs must have a negligible residual; all pairs must satisfy
/// Green's identity to within the quadrature error estimate.
pub fn check_pair(
    psi: &TestFunction,
    phi: &TestFunction,
    spec: &OperatorSpec,
    rule: &QuadratureRule,
) -> Result<PairCheck> {
    let residual = symmetry_residual(psi, phi, spec, rule)?;
    let fine = symmetry_residual(psi, phi, spec, &rule.refined())?;
    let boundary = boundary_term(psi, phi, spec)?;
    let scale = natural_scale(psi, phi, spec, rule)?;
    let dirichlet = is_dirichlet(psi, &spec.domain, rule) && is_dirichlet(phi, &spec.domain, rule);
    let error_bound = (residual - fine).norm() + ROUNDOFF_FLOOR * scale;
    let green_ok = (residual - boundary).norm() <= error_bound;
    let passed = if dirichlet {
        green_ok && residual.norm() <= DIRICHLET_RESIDUAL_TOL * scale
    } else {
        green_ok
    };
    Ok(PairCheck {
        label: format!("<{}, {}>", psi.label(), phi.label()),
        dirichlet,
        residual,
        boundary,
        scale,
        error_bound,
        passed,
    })
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// `v_c^2 - v^2`, the basic function vanishing at both endpoints.
pub fn bump(v_c: f64) -> TestFunction {
    TestFunction::polynomial(vec![(v_c * v_c).into(), 0.0.into(), (-1.0).into()])
        .relabel("(v_c^2-v^2)")
}

/// `sin(n pi (v + v_c) / (2 v_c))`.
pub fn dirichlet_sine(n: usize, v_c: f64) -> TestFunction {
    let k = n as f64 * PI / (2.0 * v_c);
    TestFunction::sine(1.0.into(), k, k * v_c).relabel(format!("sin{n}"))
}

fn random_polynomial(rng: &mut ChaCha8Rng, max_degree: usize) -> TestFunction {
    let degree = rng.gen_range(0..=max_degree);
    let coefficients = (0..=degree).map(|_| random_complex(rng)).collect();
    TestFunction::polynomial(coefficients)
}

fn random_sine(rng: &mut ChaCha8Rng) -> TestFunction {
    let k = rng.gen_range(0.5..6.0);
    let phase = rng.gen_range(0.0..(2.0 * PI));
    TestFunction::sine(random_complex(rng), k, phase)
}

fn random_dirichlet(rng: &mut ChaCha8Rng, v_c: f64) -> TestFunction {
    match rng.gen_range(0..3) {
        0 => bump(v_c).product(&random_polynomial(rng, 3)),
        1 => bump(v_c).product(&random_sine(rng)),
        _ => {
            let n = rng.gen_range(1..=6);
            let k = n as f64 * PI / (2.0 * v_c);
            TestFunction::sine(random_complex(rng), k, k * v_c).relabel(format!("a*sin{n}"))
        }
    }
}

fn random_free(rng: &mut ChaCha8Rng) -> TestFunction {
    match rng.gen_range(0..3) {
        0 => random_polynomial(rng, 4),
        1 => random_sine(rng),
        _ => TestFunction::plane_wave(random_complex(rng), rng.gen_range(-4.0..4.0)),
    }
}

/// `count` pairs of functions that vanish at `+-v_c`: the bump times
/// polynomials or sines, and the Dirichlet sine modes.
pub fn dirichlet_corpus(spec: &OperatorSpec, seed: u64, count: usize) -> Vec<(TestFunction, TestFunction)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v_c = spec.v_c();
    (0..count)
        .map(|_| (random_dirichlet(&mut rng, v_c), random_dirichlet(&mut rng, v_c)))
        .collect()
}

/// `count` pairs of generic smooth functions (polynomials, sines, plane
/// waves) that do not vanish at the endpoints.
pub fn boundary_corpus(seed: u64, count: usize) -> Vec<(TestFunction, TestFunction)> {
    // separate stream so the two corpora do not share draws
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    (0..count)
        .map(|_| (random_free(&mut rng), random_free(&mut rng)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::PhysicalConstants;
    use approx::assert_relative_eq;

    fn setup() -> (OperatorSpec, QuadratureRule) {
        let spec = OperatorSpec::default();
        let rule = QuadratureRule::for_domain(&spec.domain);
        (spec, rule)
    }

    #[test]
    fn inner_product_examples() {
        let (spec, rule) = setup();
        let v_c = spec.v_c();
        let one = TestFunction::constant(1.0.into());
        assert_relative_eq!(inner_product(&one, &one, &rule).re, 2.0 * v_c, epsilon = 1e-14);
        let s1 = dirichlet_sine(1, v_c);
        let s2 = dirichlet_sine(2, v_c);
        assert!(inner_product(&s1, &s2, &rule).norm() < 1e-14);
        assert_relative_eq!(inner_product(&s1, &s1, &rule).re, v_c, epsilon = 1e-14);
    }

    #[test]
    fn inner_product_is_conjugate_symmetric() {
        let (spec, rule) = setup();
        let f = TestFunction::plane_wave(Complex64::new(0.3, -1.1), 2.2);
        let g = bump(spec.v_c()).product(&TestFunction::sine(Complex64::new(0.0, 1.0), 1.7, 0.2));
        let a = inner_product(&f, &g, &rule);
        let b = inner_product(&g, &f, &rule);
        assert!((a - b.conj()).norm() < 1e-13);
    }

    #[test]
    fn dirichlet_pair_has_no_residual() {
        let (spec, rule) = setup();
        let v_c = spec.v_c();
        let psi = bump(v_c);
        let phi = bump(v_c).product(&TestFunction::polynomial(vec![0.0.into(), 1.0.into()]));
        let r = symmetry_residual(&psi, &phi, &spec, &rule).unwrap();
        let scale = natural_scale(&psi, &phi, &spec, &rule).unwrap();
        assert!(r.norm() <= 1e-10 * scale, "residual {r}");
        assert!(boundary_term(&psi, &phi, &spec).unwrap().norm() < 1e-14);
    }

    #[test]
    fn square_against_constant_gives_four_pi_vc() {
        let (spec, rule) = setup();
        let psi = TestFunction::polynomial(vec![0.0.into(), 0.0.into(), 1.0.into()]);
        let phi = TestFunction::constant(1.0.into());
        let want = 4.0 * PI * spec.v_c();
        let r = symmetry_residual(&psi, &phi, &spec, &rule).unwrap();
        let b = boundary_term(&psi, &phi, &spec).unwrap();
        assert_relative_eq!(r.re, want, epsilon = 1e-12);
        assert_relative_eq!(b.re, want, epsilon = 1e-13);
        assert!((want - 10.3753).abs() < 1e-4);
    }

    #[test]
    fn linear_against_constant_has_zero_bracket() {
        let (spec, _) = setup();
        let psi = TestFunction::polynomial(vec![0.0.into(), 1.0.into()]);
        let phi = TestFunction::constant(1.0.into());
        assert_eq!(boundary_term(&psi, &phi, &spec).unwrap().norm(), 0.0);
    }

    #[test]
    fn self_residual_is_imaginary() {
        let (spec, rule) = setup();
        let f = TestFunction::plane_wave(Complex64::new(1.0, 0.5), 1.3)
            .linear_combination(1.0.into(), &TestFunction::polynomial(vec![0.2.into(), 0.0.into(), 1.0.into()]), 1.0.into());
        let r = symmetry_residual(&f, &f, &spec, &rule).unwrap();
        let scale = natural_scale(&f, &f, &spec, &rule).unwrap();
        assert!(r.re.abs() <= 1e-13 * scale);
    }

    #[test]
    fn rejects_rule_on_other_interval() {
        let spec = OperatorSpec::default();
        let rule = QuadratureRule::composite(-0.5, 0.5, 8, 5).unwrap();
        let f = bump(spec.v_c());
        assert!(symmetry_residual(&f, &f, &spec, &rule).is_err());
    }

    #[test]
    fn membership_check() {
        let (spec, rule) = setup();
        assert!(is_dirichlet(&bump(spec.v_c()), &spec.domain, &rule));
        assert!(is_dirichlet(&dirichlet_sine(3, spec.v_c()), &spec.domain, &rule));
        assert!(!is_dirichlet(&TestFunction::constant(1.0.into()), &spec.domain, &rule));
    }

    #[test]
    fn corpora_are_deterministic_and_classified() {
        let (spec, rule) = setup();
        let a = dirichlet_corpus(&spec, 7, 20);
        let b = dirichlet_corpus(&spec, 7, 20);
        for ((p, q), (r, s)) in a.iter().zip(&b) {
            assert_eq!(p.value(0.1), r.value(0.1));
            assert_eq!(q.value(-0.3), s.value(-0.3));
        }
        for (p, q) in &a {
            assert!(is_dirichlet(p, &spec.domain, &rule), "{}", p.label());
            assert!(is_dirichlet(q, &spec.domain, &rule), "{}", q.label());
        }
        let free = boundary_corpus(7, 10);
        assert!(free.iter().all(|(p, _)| !is_dirichlet(p, &spec.domain, &rule)));
    }

    #[test]
    fn rescaling_both_constants_leaves_residual_alone() {
        let base = OperatorSpec::default();
        let rule = QuadratureRule::for_domain(&base.domain);
        let psi = TestFunction::plane_wave(Complex64::new(0.4, 0.9), 2.0);
        let phi = TestFunction::polynomial(vec![1.0.into(), Complex64::new(0.0, 1.0), 0.5.into()]);
        let r0 = symmetry_residual(&psi, &phi, &base, &rule).unwrap();
        for s in [1.5, 10.0, 1e3] {
            let k = PhysicalConstants::new(s, s).unwrap();
            let spec = OperatorSpec::with_half_width(k, base.v_c()).unwrap();
            let r = symmetry_residual(&psi, &phi, &spec, &rule).unwrap();
            assert!((r - r0).norm() <= 1e-14 * r0.norm(), "s={s}");
        }
    }
}
