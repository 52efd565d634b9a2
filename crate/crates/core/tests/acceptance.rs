//! One line per acceptance criterion; exits non-zero if any fails.

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use sturmkit::deficiency::{
    analyze, exact_terminal, log_grid, min_sinh, principal_root, shoot, sweep, Branch,
    DeficiencyProblem, DEFAULT_SHOOTING_STEPS,
};
use sturmkit::eigensolver::{bisect_descending, bisect_eigenvalue, characteristic_roots};
use sturmkit::quadrature::QuadratureRule;
use sturmkit::spectrum::{
    analytic_eigenvalue, compute_spectrum, convergence_study, BISECTION_TOL,
};
use sturmkit::symmetry::{boundary_corpus, check_pair, dirichlet_corpus, symmetry_residual};
use sturmkit::{
    build_grid, critical_velocity, deformation_value, discretize, Complex64, OperatorSpec,
    PhysicalConstants, TestFunction,
};

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

fn critical_velocity_criterion() -> Verdict {
    let k = PhysicalConstants::unit();
    let v_c = critical_velocity(&k);
    let at_vc = deformation_value(v_c, &k);
    let passed = (v_c - 0.825645).abs() <= 1e-6 && (v_c - 0.8257).abs() <= 1e-4 && (at_vc - 1.0).abs() <= 1e-12;
    verdict(passed, format!("v_c/c = {v_c:.10}, C(v_c) - 1 = {:.1e}", at_vc - 1.0))
}

fn anchors_criterion() -> Verdict {
    let mut worst = 0.0f64;
    for c in [1.0, 0.5, 3.0] {
        let k = PhysicalConstants::new(1.0, c).unwrap();
        worst = worst
            .max((deformation_value(0.0, &k) - PI).abs())
            .max(deformation_value(c, &k).abs())
            .max(deformation_value(-c, &k).abs());
    }
    verdict(worst <= 1e-12, format!("max anchor defect {worst:.1e}"))
}

fn symmetry_criterion() -> Verdict {
    let spec = OperatorSpec::default();
    let rule = QuadratureRule::for_domain(&spec.domain);
    let mut worst_relative = 0.0f64;
    let mut dirichlet_ok = true;
    for (psi, phi) in dirichlet_corpus(&spec, 0, 20) {
        let check = check_pair(&psi, &phi, &spec, &rule).unwrap();
        dirichlet_ok &= check.dirichlet && check.passed;
        worst_relative = worst_relative.max(check.relative_residual());
    }
    let mut green_ok = true;
    for (psi, phi) in boundary_corpus(0, 10) {
        let check = check_pair(&psi, &phi, &spec, &rule).unwrap();
        green_ok &= !check.dirichlet && check.green_defect() <= check.error_bound;
    }
    let square = TestFunction::polynomial(vec![0.0.into(), 0.0.into(), 1.0.into()]);
    let one = TestFunction::constant(1.0.into());
    let residual = symmetry_residual(&square, &one, &spec, &rule).unwrap();
    let four_pi_vc = 4.0 * PI * spec.v_c();
    let anchor_ok = (residual.re - four_pi_vc).abs() <= 1e-6
        && residual.im.abs() <= 1e-6
        && (residual.re - 10.3753).abs() <= 1e-4;
    verdict(
        dirichlet_ok && worst_relative <= 1e-10 && green_ok && anchor_ok,
        format!(
            "20 Dirichlet pairs max rel residual {worst_relative:.1e}, 10 boundary pairs within error bound: {green_ok}, <Cv^2,1> - <v^2,C1> = {:.7}",
            residual.re
        ),
    )
}

fn deficiency_criterion() -> Verdict {
    let spec = OperatorSpec::default();
    let results = match sweep(&spec, &log_grid(1e-3, 1e3, 50), DEFAULT_SHOOTING_STEPS) {
        Ok(r) => r,
        Err(e) => return verdict(false, e.to_string()),
    };
    let zero = results.iter().all(|r| {
        r.n_plus == 0
            && r.n_minus == 0
            && r.plus.shooting_index == 0
            && r.minus.shooting_index == 0
    });
    let (at, min) = min_sinh(&results).unwrap();
    let report = analyze(&DeficiencyProblem::new(PI, Branch::Plus).unwrap(), &spec, DEFAULT_SHOOTING_STEPS).unwrap();
    let mu = principal_root(Complex64::new(-1.0, 1.0)).unwrap();
    let v_c = spec.v_c();
    let expected = -2.0 * (2.0 * mu * v_c).sinh();
    let defect = (report.determinant - expected).norm();
    verdict(
        zero && min > 1e-2 && defect <= 1e-12,
        format!("(n+, n-) = (0, 0) on 50 points: {zero}, min |sinh| = {min:.4} at lambda = {at:.3e}, det(pi) defect {defect:.1e}"),
    )
}

fn shooting_criterion() -> Verdict {
    let spec = OperatorSpec::default();
    let problem = DeficiencyProblem::new(1e3, Branch::Plus).unwrap();
    let mu = principal_root(sturmkit::deficiency::mu_squared(&problem, &spec.constants)).unwrap();
    let exact = exact_terminal(mu, spec.v_c());
    let errors: Vec<f64> = [100, 1_000, 10_000]
        .iter()
        .map(|&n| (shoot(mu, spec.v_c(), n).unwrap() - exact).norm() / exact.norm())
        .collect();
    let orders: Vec<f64> = errors.windows(2).map(|e| (e[0] / e[1]).log10()).collect();
    verdict(
        orders.iter().all(|o| (o - 4.0).abs() <= 0.2),
        format!(
            "lambda = 1e3, errors {:?}, orders {orders:.3?}",
            errors.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>()
        ),
    )
}

fn spectrum_criterion() -> Verdict {
    let spec = OperatorSpec::default();
    let decomposition = match compute_spectrum(&spec, 2000, 5) {
        Ok(d) => d,
        Err(e) => return verdict(false, e.to_string()),
    };
    let mut worst = 0.0f64;
    for (i, &numeric) in decomposition.eigenvalues.iter().enumerate() {
        let analytic = analytic_eigenvalue(i + 1, &spec).unwrap();
        worst = worst.max(((numeric - analytic) / analytic).abs());
    }
    let c1 = analytic_eigenvalue(1, &spec).unwrap();
    let table = convergence_study(&spec, &[250, 500, 1000, 2000], 1).unwrap();
    let passed = worst <= 1e-3
        && (c1 + 8.2295).abs() <= 1e-2
        && (table.richardson + 8.2295).abs() <= 1e-2
        && table.richardson_relative_error() <= 1e-6
        && decomposition.max_eigenvalue() < PI;
    verdict(
        passed,
        format!(
            "top-5 max rel error {worst:.1e}, C1 = {c1:.6}, Richardson C1 = {:.6}",
            table.richardson
        ),
    )
}

fn exactness_criterion() -> Verdict {
    let spec = OperatorSpec::default();
    let mut closed = 0.0f64;
    for n in [100, 1000] {
        let matrix = discretize(&spec, &build_grid(&spec.domain, n).unwrap()).unwrap();
        for k in 1..=20 {
            let got = bisect_descending(&matrix, k, BISECTION_TOL).unwrap();
            closed = closed.max((got - matrix.closed_form_eigenvalue(k).unwrap()).abs());
        }
    }
    let mut brute = 0.0f64;
    for n in 1..=8 {
        let matrix = discretize(&spec, &build_grid(&spec.domain, n).unwrap()).unwrap();
        let roots = characteristic_roots(&vec![matrix.diag(); n], &vec![matrix.off(); n - 1]);
        for (k, root) in roots.iter().enumerate() {
            brute = brute.max((bisect_eigenvalue(&matrix, k + 1, BISECTION_TOL).unwrap() - root).abs());
        }
    }
    verdict(
        closed <= 1e-10 && brute <= 1e-10,
        format!("closed form max error {closed:.1e}, characteristic roots (N <= 8) max error {brute:.1e}"),
    )
}

fn sturm_liouville_criterion() -> Verdict {
    let spec = OperatorSpec::default();
    let d = match compute_spectrum(&spec, 2000, 10) {
        Ok(d) => d,
        Err(e) => return verdict(false, e.to_string()),
    };
    let gaps_ok = d
        .eigenvalues
        .windows(2)
        .all(|w| w[0] > w[1] && w[0] - w[1] > 1e-12 * w[0].abs().max(w[1].abs()));
    let nodes = d.node_counts();
    let nodes_ok = nodes.iter().enumerate().all(|(k, &c)| c == k);
    let gram = d.gram_defect();
    let below_pi = d.max_eigenvalue() < PI;
    verdict(
        gaps_ok && nodes_ok && gram <= 1e-10 && below_pi,
        format!("simple and decreasing: {gaps_ok}, node counts {nodes:?}, Gram defect {gram:.1e}, max < pi: {below_pi}"),
    )
}

fn convergence_criterion() -> Verdict {
    let spec = OperatorSpec::default();
    let table = match convergence_study(&spec, &[250, 500, 1000, 2000], 1) {
        Ok(t) => t,
        Err(e) => return verdict(false, e.to_string()),
    };
    let orders = table.orders();
    verdict(
        orders.len() == 3 && orders.iter().all(|o| (o - 2.0).abs() <= 0.1),
        format!("observed orders {orders:.4?}"),
    )
}

fn end_to_end_criterion() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for run in ["a", "b"] {
        let path = dir.path().join(format!("verify-{run}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_sturmkit"))
            .args(["verify", "--out", path.to_str().unwrap()])
            .env("STURMKIT_NO_COLOR", "1")
            .stderr(std::process::Stdio::null())
            .status()
            .expect("binary runs");
        if status.code() != Some(0) {
            return verdict(false, format!("verify exited with {status}"));
        }
        reports.push(std::fs::read(&path).unwrap());
    }
    let identical = reports[0] == reports[1];
    let parsed: serde_json::Value = serde_json::from_slice(&reports[0]).unwrap();
    let green = parsed["passed"] == true
        && parsed["suites"].as_array().unwrap().iter().all(|s| s["passed"] == true);
    verdict(
        identical && green,
        format!("verify exit 0, all suites green: {green}, byte-identical: {identical}"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("critical velocity", critical_velocity_criterion),
        ("deformation anchors", anchors_criterion),
        ("formal symmetry", symmetry_criterion),
        ("deficiency indices", deficiency_criterion),
        ("shooting convergence", shooting_criterion),
        ("spectrum vs analytic oracle", spectrum_criterion),
        ("eigensolver exactness", exactness_criterion),
        ("sturm-liouville corollary", sturm_liouville_criterion),
        ("convergence order", convergence_criterion),
        ("end-to-end verify", end_to_end_criterion),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let v = run();
        let elapsed = started.elapsed().as_secs_f64();
        let tag = if v.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag} {name} ({elapsed:.2} s): {}", i + 1, v.detail);
        failures += usize::from(!v.passed);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
