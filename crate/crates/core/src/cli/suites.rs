//! Check suites behind each subcommand.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use super::config::{ConfigError, RunConfig};
use super::report::{checks_table, sig17, Check, ComplexValue, Payload, Table};
use crate::deficiency::{
    self, analyze, exact_terminal, log_grid, min_sinh, principal_root, shoot, sweep, Branch,
    DeficiencyIndices, DeficiencyProblem, DeficiencyReport, DEFAULT_SHOOTING_STEPS,
};
use crate::eigensolver::{bisect_descending, bisect_eigenvalue, characteristic_roots, RESIDUAL_TOL};
use crate::function::TestFunction;
use crate::operator::{build_grid, critical_velocity, deformation_value, discretize, OperatorSpec};
use crate::quadrature::QuadratureRule;
use crate::spectrum::{
    analytic_eigenvalue, compute_spectrum, convergence_study, quadratic_fit, AnalyticSpectrum,
    BISECTION_TOL, ORTHOGONALITY_TOL, SIMPLICITY_TOL,
};
use crate::symmetry::{check_pair, dirichlet_corpus, boundary_corpus, symmetry_residual, PairCheck, DIRICHLET_RESIDUAL_TOL};
use crate::Error;

/// Tolerance for closed-form identities evaluated in floating point.
const IDENTITY_TOL: f64 = 1e-12;
/// Bisection against exact eigenvalues.
const EXACTNESS_TOL: f64 = 1e-10;

pub const DIRICHLET_PAIRS: usize = 20;
pub const BOUNDARY_PAIRS: usize = 10;
pub const SWEEP_POINTS: usize = 50;
pub const SWEEP_RANGE: (f64, f64) = (1e-3, 1e3);
pub const MIN_SINH_FLOOR: f64 = 1e-2;
pub const SHOOTING_STUDY_LAMBDA: f64 = 1e3;
pub const SHOOTING_STUDY_STEPS: [usize; 3] = [100, 1_000, 10_000];
pub const EXACTNESS_GRIDS: [usize; 2] = [100, 1000];
pub const EXACTNESS_INDICES: usize = 20;
pub const BRUTE_FORCE_MAX: usize = 8;

/// Why a suite could not produce a report.
#[derive(Debug)]
pub enum SuiteError {
    Config(ConfigError),
    Numeric(Error),
}

impl fmt::Display for SuiteError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SuiteError::Config(e) => e.fmt(f),
            SuiteError::Numeric(e) => e.fmt(f),
        }
    }
}

impl From<Error> for SuiteError {
    fn from(e: Error) -> Self {
        SuiteError::Numeric(e)
    }
}

impl From<ConfigError> for SuiteError {
    fn from(e: ConfigError) -> Self {
        SuiteError::Config(e)
    }
}

pub type Outcome<P> = Result<(P, Vec<Check>), SuiteError>;

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

// ---------------------------------------------------------------- info

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfoPayload {
    pub v_c: f64,
    pub v_c_over_c: f64,
    pub coupling: f64,
    pub deformation_at_zero: f64,
    pub deformation_at_v_c: f64,
    pub deformation_at_c: f64,
    pub top_eigenvalue: f64,
    pub quadratic_coefficient: f64,
}

impl Payload for InfoPayload {
    fn table(&self, _: &[Check]) -> Table {
        let mut t = Table::new(vec!["quantity", "value"]);
        for (name, value) in [
            ("v_c", self.v_c),
            ("v_c_over_c", self.v_c_over_c),
            ("coupling", self.coupling),
            ("deformation_at_zero", self.deformation_at_zero),
            ("deformation_at_v_c", self.deformation_at_v_c),
            ("deformation_at_c", self.deformation_at_c),
            ("top_eigenvalue", self.top_eigenvalue),
            ("quadratic_coefficient", self.quadratic_coefficient),
        ] {
            t.push(vec![name.to_string(), sig17(value)]);
        }
        t
    }
}

pub fn info(config: &RunConfig) -> Outcome<InfoPayload> {
    let spec = config.operator();
    let k = spec.constants;
    let c = k.c();
    let v_c = spec.v_c();
    let payload = InfoPayload {
        v_c,
        v_c_over_c: v_c / c,
        coupling: spec.coupling(),
        deformation_at_zero: deformation_value(0.0, &k),
        deformation_at_v_c: deformation_value(v_c, &k),
        deformation_at_c: deformation_value(c, &k),
        top_eigenvalue: analytic_eigenvalue(1, &spec)?,
        quadratic_coefficient: AnalyticSpectrum::new(spec).quadratic_coefficient(),
    };
    let critical = critical_velocity(&k);
    let mut checks = vec![
        Check::near("critical_velocity_ratio", critical / c, 0.825645, 1e-6),
        Check::near("critical_velocity_rounded", critical / c, 0.8257, 1e-4),
        Check::near("deformation_at_critical", deformation_value(critical, &k), 1.0, IDENTITY_TOL),
        Check::near("deformation_at_zero", payload.deformation_at_zero, PI, IDENTITY_TOL),
        Check::near("deformation_at_plus_c", payload.deformation_at_c, 0.0, IDENTITY_TOL),
        Check::near("deformation_at_minus_c", deformation_value(-c, &k), 0.0, IDENTITY_TOL),
    ];
    if config.is_reference_operator() {
        checks.push(Check::near("top_eigenvalue_reference", payload.top_eigenvalue, -8.2295, 1e-2));
    }
    Ok((payload, checks))
}

// ---------------------------------------------------------------- symmetry

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRow {
    pub corpus: &'static str,
    pub label: String,
    pub dirichlet: bool,
    pub residual: ComplexValue,
    pub boundary_term: ComplexValue,
    pub natural_scale: f64,
    pub relative_residual: f64,
    pub green_defect: f64,
    pub error_bound: f64,
    pub passed: bool,
}

impl PairRow {
    fn new(corpus: &'static str, p: &PairCheck) -> Self {
        Self {
            corpus,
            label: p.label.clone(),
            dirichlet: p.dirichlet,
            residual: p.residual.into(),
            boundary_term: p.boundary.into(),
            natural_scale: p.scale,
            relative_residual: p.relative_residual(),
            green_defect: p.green_defect(),
            error_bound: p.error_bound,
            passed: p.passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SquareAnchor {
    pub psi: &'static str,
    pub phi: &'static str,
    pub residual: ComplexValue,
    /// `4 pi (hbar^2/c^2) v_c`.
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryPayload {
    pub quadrature_panels: usize,
    pub quadrature_points: usize,
    pub pairs: Vec<PairRow>,
    pub anchor: SquareAnchor,
}

impl Payload for SymmetryPayload {
    fn table(&self, _: &[Check]) -> Table {
        let mut t = Table::new(vec![
            "corpus",
            "label",
            "dirichlet",
            "residual_re",
            "residual_im",
            "boundary_re",
            "boundary_im",
            "natural_scale",
            "relative_residual",
            "green_defect",
            "error_bound",
            "passed",
        ]);
        for r in &self.pairs {
            t.push(vec![
                r.corpus.to_string(),
                r.label.clone(),
                r.dirichlet.to_string(),
                sig17(r.residual.re),
                sig17(r.residual.im),
                sig17(r.boundary_term.re),
                sig17(r.boundary_term.im),
                sig17(r.natural_scale),
                sig17(r.relative_residual),
                sig17(r.green_defect),
                sig17(r.error_bound),
                r.passed.to_string(),
            ]);
        }
        t
    }
}

pub fn symmetry(config: &RunConfig) -> Outcome<SymmetryPayload> {
    let spec = config.operator();
    let rule = QuadratureRule::for_domain(&spec.domain);
    let dirichlet = dirichlet_corpus(&spec, config.seed, DIRICHLET_PAIRS)
        .iter()
        .map(|(psi, phi)| check_pair(psi, phi, &spec, &rule))
        .collect::<crate::Result<Vec<_>>>()?;
    let free = boundary_corpus(config.seed, BOUNDARY_PAIRS)
        .iter()
        .map(|(psi, phi)| check_pair(psi, phi, &spec, &rule))
        .collect::<crate::Result<Vec<_>>>()?;

    let square = TestFunction::polynomial(vec![0.0.into(), 0.0.into(), 1.0.into()]);
    let one = TestFunction::constant(1.0.into());
    let residual = symmetry_residual(&square, &one, &spec, &rule)?;
    let expected = 4.0 * PI * spec.coupling() * spec.v_c();

    let not_dirichlet = dirichlet.iter().filter(|p| !p.dirichlet).count();
    let worst_relative = dirichlet.iter().map(PairCheck::relative_residual).fold(0.0, f64::max);
    let worst_green = dirichlet
        .iter()
        .chain(&free)
        .map(|p| p.green_defect() / p.error_bound)
        .fold(0.0, f64::max);
    let mut checks = vec![
        Check::at_most("dirichlet_corpus_membership_failures", not_dirichlet as f64, 0.0),
        Check::at_most("dirichlet_max_relative_residual", worst_relative, DIRICHLET_RESIDUAL_TOL),
        Check::at_most("green_identity_defect_over_error_bound", worst_green, 1.0),
        Check::at_most("failed_pairs", dirichlet.iter().chain(&free).filter(|p| !p.passed).count() as f64, 0.0),
        Check::near("square_constant_residual_re", residual.re, expected, 1e-6),
        Check::near("square_constant_residual_im", residual.im, 0.0, 1e-6),
    ];
    if config.is_reference_operator() {
        checks.push(Check::near("square_constant_reference_4_digits", residual.re, 10.3753, 1e-4));
    }

    let mut pairs: Vec<PairRow> = dirichlet.iter().map(|p| PairRow::new("dirichlet", p)).collect();
    pairs.extend(free.iter().map(|p| PairRow::new("boundary", p)));
    let payload = SymmetryPayload {
        quadrature_panels: rule.panels(),
        quadrature_points: rule.order(),
        pairs,
        anchor: SquareAnchor {
            psi: "v^2",
            phi: "1",
            residual: residual.into(),
            expected,
        },
    };
    Ok((payload, checks))
}

// ---------------------------------------------------------------- deficiency

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchRow {
    pub lambda: f64,
    pub branch: &'static str,
    pub mu: ComplexValue,
    pub mu_squared: ComplexValue,
    pub determinant: ComplexValue,
    pub abs_determinant: f64,
    pub threshold: f64,
    pub shooting_terminal: ComplexValue,
    pub shooting_steps: usize,
    pub shooting_error: f64,
    pub determinant_index: usize,
    pub shooting_index: usize,
}

impl From<&DeficiencyReport> for BranchRow {
    fn from(r: &DeficiencyReport) -> Self {
        Self {
            lambda: r.lambda,
            branch: r.branch.as_str(),
            mu: r.mu.into(),
            mu_squared: r.mu_squared.into(),
            determinant: r.determinant.into(),
            abs_determinant: r.determinant.norm(),
            threshold: r.threshold,
            shooting_terminal: r.shooting_terminal.into(),
            shooting_steps: r.shooting_steps,
            shooting_error: r.shooting_error,
            determinant_index: r.determinant_index,
            shooting_index: r.shooting_index,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexRow {
    pub lambda: f64,
    pub n_plus: usize,
    pub n_minus: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub shooting_steps: usize,
    pub n_plus_total: usize,
    pub n_minus_total: usize,
    pub min_abs_sinh: f64,
    pub min_abs_sinh_lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeterminantAnchor {
    pub lambda: f64,
    pub mu: ComplexValue,
    pub determinant: ComplexValue,
    /// `e^{-2 mu v_c} - e^{2 mu v_c}` with `mu` from the library square root.
    pub exponential_form: ComplexValue,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShootingStudy {
    pub lambda: f64,
    pub branch: &'static str,
    pub steps: Vec<usize>,
    pub relative_errors: Vec<f64>,
    pub observed_orders: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeficiencyPayload {
    pub indices: Vec<IndexRow>,
    pub branches: Vec<BranchRow>,
    pub sweep: SweepSummary,
    pub determinant_anchor: DeterminantAnchor,
    pub shooting_study: ShootingStudy,
}

impl Payload for DeficiencyPayload {
    fn table(&self, _: &[Check]) -> Table {
        let mut t = Table::new(vec![
            "lambda",
            "branch",
            "mu_re",
            "mu_im",
            "determinant_re",
            "determinant_im",
            "abs_determinant",
            "threshold",
            "shooting_error",
            "determinant_index",
            "shooting_index",
        ]);
        for r in &self.branches {
            t.push(vec![
                sig17(r.lambda),
                r.branch.to_string(),
                sig17(r.mu.re),
                sig17(r.mu.im),
                sig17(r.determinant.re),
                sig17(r.determinant.im),
                sig17(r.abs_determinant),
                sig17(r.threshold),
                sig17(r.shooting_error),
                r.determinant_index.to_string(),
                r.shooting_index.to_string(),
            ]);
        }
        t
    }
}

fn index_total(results: &[DeficiencyIndices]) -> (usize, usize) {
    results
        .iter()
        .fold((0, 0), |(p, m), r| (p + r.n_plus, m + r.n_minus))
}

/// Relative errors of RK4 against `sinh(2 mu v_c)/mu` and the orders between
/// consecutive step counts.
pub fn shooting_study(spec: &OperatorSpec, lambda: f64, steps: &[usize]) -> crate::Result<ShootingStudy> {
    let problem = DeficiencyProblem::new(lambda, Branch::Plus)?;
    let mu = principal_root(deficiency::mu_squared(&problem, &spec.constants))?;
    let exact = exact_terminal(mu, spec.v_c());
    let errors = steps
        .iter()
        .map(|&n| Ok((shoot(mu, spec.v_c(), n)? - exact).norm() / exact.norm()))
        .collect::<crate::Result<Vec<f64>>>()?;
    let orders = steps
        .windows(2)
        .zip(errors.windows(2))
        .map(|(s, e)| (e[0] / e[1]).ln() / (s[1] as f64 / s[0] as f64).ln())
        .collect();
    Ok(ShootingStudy {
        lambda,
        branch: Branch::Plus.as_str(),
        steps: steps.to_vec(),
        relative_errors: errors,
        observed_orders: orders,
    })
}

pub fn deficiency(config: &RunConfig) -> Outcome<DeficiencyPayload> {
    let spec = config.operator();
    let v_c = spec.v_c();
    let on_grid = sweep(&spec, &config.lambda_grid, DEFAULT_SHOOTING_STEPS)?;
    let (grid_plus, grid_minus) = index_total(&on_grid);

    let (lo, hi) = SWEEP_RANGE;
    let dense = sweep(&spec, &log_grid(lo, hi, SWEEP_POINTS), DEFAULT_SHOOTING_STEPS)?;
    let (sweep_plus, sweep_minus) = index_total(&dense);
    let (min_lambda, min_abs) = min_sinh(&dense).expect("sweep is not empty");

    let at_pi = analyze(&DeficiencyProblem::new(PI, Branch::Plus)?, &spec, DEFAULT_SHOOTING_STEPS)?;
    let r = spec.constants.c() / spec.constants.hbar();
    let mu = (Complex64::new(-1.0, 1.0) * r * r).sqrt();
    let exponential = (-2.0 * mu * v_c).exp() - (2.0 * mu * v_c).exp();
    let anchor_defect = (at_pi.determinant - exponential).norm() / exponential.norm().max(1.0);

    let study = shooting_study(&spec, SHOOTING_STUDY_LAMBDA, &SHOOTING_STUDY_STEPS)?;

    let mut checks = vec![
        Check::at_most("grid_n_plus_total", grid_plus as f64, 0.0),
        Check::at_most("grid_n_minus_total", grid_minus as f64, 0.0),
        Check::at_most("sweep_n_plus_total", sweep_plus as f64, 0.0),
        Check::at_most("sweep_n_minus_total", sweep_minus as f64, 0.0),
        Check::at_least("sweep_min_abs_sinh", min_abs, MIN_SINH_FLOOR),
        Check::at_most("determinant_at_pi_vs_exponential_form", anchor_defect, IDENTITY_TOL),
    ];
    let decreasing = study.relative_errors.windows(2).all(|e| e[1] < e[0]);
    checks.push(Check::at_least("shooting_errors_decreasing", f64::from(u8::from(decreasing)), 1.0));
    // the order is asymptotic; with larger c^2/hbar the coarse step is not yet small against 1/|mu|
    if config.is_reference_operator() {
        for (i, &order) in study.observed_orders.iter().enumerate() {
            checks.push(Check::near(format!("shooting_order_{}", i + 1), order, 4.0, 0.2));
        }
    }

    let payload = DeficiencyPayload {
        indices: on_grid
            .iter()
            .map(|r| IndexRow {
                lambda: r.plus.lambda,
                n_plus: r.n_plus,
                n_minus: r.n_minus,
            })
            .collect(),
        branches: on_grid
            .iter()
            .flat_map(|r| [BranchRow::from(&r.plus), BranchRow::from(&r.minus)])
            .collect(),
        sweep: SweepSummary {
            lo,
            hi,
            points: SWEEP_POINTS,
            shooting_steps: DEFAULT_SHOOTING_STEPS,
            n_plus_total: sweep_plus,
            n_minus_total: sweep_minus,
            min_abs_sinh: min_abs,
            min_abs_sinh_lambda: min_lambda,
        },
        determinant_anchor: DeterminantAnchor {
            lambda: PI,
            mu: at_pi.mu.into(),
            determinant: at_pi.determinant.into(),
            exponential_form: exponential.into(),
        },
        shooting_study: study,
    };
    Ok((payload, checks))
}

// ---------------------------------------------------------------- spectrum

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenRow {
    pub n: usize,
    pub eigenvalue_numeric: f64,
    pub eigenvalue_analytic: f64,
    pub abs_error: f64,
    pub relative_error: f64,
    pub node_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumPayload {
    pub n_interior: usize,
    pub h: f64,
    pub method: String,
    pub eigenvalues: Vec<EigenRow>,
    pub residuals: Vec<f64>,
    pub gram_defect: f64,
    pub min_relative_gap: f64,
    pub quadratic_fit_slope: f64,
    pub quadratic_fit_r_squared: f64,
}

impl Payload for SpectrumPayload {
    fn table(&self, _: &[Check]) -> Table {
        let mut t = Table::new(vec!["n", "eigenvalue_numeric", "eigenvalue_analytic", "abs_error", "node_count"]);
        for r in &self.eigenvalues {
            t.push(vec![
                r.n.to_string(),
                sig17(r.eigenvalue_numeric),
                sig17(r.eigenvalue_analytic),
                sig17(r.abs_error),
                r.node_count.to_string(),
            ]);
        }
        t
    }
}

/// Indices compared against the analytic spectrum to 1e-3 relative.
pub const ANALYTIC_AGREEMENT_INDICES: usize = 5;
pub const ANALYTIC_AGREEMENT_TOL: f64 = 1e-3;
/// Eigenvectors whose sign changes are counted.
pub const NODE_COUNT_INDICES: usize = 10;
/// Analytic eigenvalues used for the quadratic fit.
pub const QUADRATIC_FIT_INDICES: usize = 20;

pub fn spectrum(config: &RunConfig) -> Outcome<SpectrumPayload> {
    let spec = config.operator();
    let decomposition = compute_spectrum(&spec, config.n_interior, config.k_eigs)?;
    let h = decomposition.grid.h();
    let nodes = decomposition.node_counts();
    let rows = decomposition
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &numeric)| {
            let analytic = analytic_eigenvalue(i + 1, &spec)?;
            Ok(EigenRow {
                n: i + 1,
                eigenvalue_numeric: numeric,
                eigenvalue_analytic: analytic,
                abs_error: (numeric - analytic).abs(),
                relative_error: relative(numeric, analytic),
                node_count: nodes[i],
            })
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let fit = quadratic_fit(&spec, QUADRATIC_FIT_INDICES)?;

    // 0 <= lambda_n^h - C_n <= pi r k_n^4 h^2 / 12, from x^2 - x^4/3 <= sin^2 x <= x^2
    let bracket_violation = rows
        .iter()
        .map(|r| {
            let k = r.n as f64 * PI / (2.0 * spec.v_c());
            let upper = PI * spec.coupling() * k.powi(4) * h * h / 12.0;
            let slack = 1e-10 * r.eigenvalue_analytic.abs().max(1.0);
            let gap = r.eigenvalue_numeric - r.eigenvalue_analytic;
            (-gap - slack).max(gap - upper - slack).max(0.0)
        })
        .fold(0.0, f64::max);
    let worst_relative = rows
        .iter()
        .take(ANALYTIC_AGREEMENT_INDICES)
        .map(|r| r.relative_error)
        .fold(0.0, f64::max);
    let node_mismatches = nodes
        .iter()
        .take(NODE_COUNT_INDICES)
        .enumerate()
        .filter(|&(i, &c)| c != i)
        .count();
    let strictly_decreasing = decomposition.eigenvalues.windows(2).all(|w| w[0] > w[1]);

    let mut checks = vec![
        Check::at_most("analytic_relative_error_top5", worst_relative, ANALYTIC_AGREEMENT_TOL),
        Check::at_most("discretisation_bracket_violation", bracket_violation, 0.0),
        Check::at_most("max_eigenvalue_minus_pi", decomposition.max_eigenvalue() - PI, -f64::EPSILON),
        Check::at_least("strictly_decreasing", f64::from(u8::from(strictly_decreasing)), 1.0),
        Check::at_least("min_relative_gap", decomposition.min_relative_gap(), SIMPLICITY_TOL),
        Check::at_most("node_count_mismatches", node_mismatches as f64, 0.0),
        Check::at_most("gram_defect", decomposition.gram_defect(), ORTHOGONALITY_TOL),
        Check::at_most("max_scaled_residual", decomposition.max_scaled_residual(), RESIDUAL_TOL),
        Check::at_least("quadratic_fit_r_squared", fit.r_squared, 1.0 - 1e-12),
        Check::at_most("quadratic_fit_slope", fit.slope, 0.0),
    ];
    if config.is_reference_operator() {
        checks.push(Check::near("top_eigenvalue_reference", rows[0].eigenvalue_numeric, -8.2295, 1e-2));
    }
    let payload = SpectrumPayload {
        n_interior: config.n_interior,
        h,
        method: decomposition.method.clone(),
        eigenvalues: rows,
        residuals: decomposition.residuals.clone(),
        gram_defect: decomposition.gram_defect(),
        min_relative_gap: decomposition.min_relative_gap(),
        quadratic_fit_slope: fit.slope,
        quadratic_fit_r_squared: fit.r_squared,
    };
    Ok((payload, checks))
}

// ---------------------------------------------------------------- convergence

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRowOut {
    pub n_interior: usize,
    pub h: f64,
    pub eigenvalue: f64,
    pub error: f64,
    pub observed_order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergencePayload {
    pub index: usize,
    pub analytic: f64,
    pub rows: Vec<ConvergenceRowOut>,
    pub richardson: f64,
    pub richardson_relative_error: f64,
}

impl Payload for ConvergencePayload {
    fn table(&self, _: &[Check]) -> Table {
        let mut t = Table::new(vec!["n_interior", "h", "eigenvalue", "error", "observed_order"]);
        for r in &self.rows {
            t.push(vec![
                r.n_interior.to_string(),
                sig17(r.h),
                sig17(r.eigenvalue),
                sig17(r.error),
                r.observed_order.map(sig17).unwrap_or_default(),
            ]);
        }
        t
    }
}

/// `N/8, N/4, N/2, N` for the configured `N`.
pub fn convergence_sizes(n_interior: usize) -> Result<Vec<usize>, ConfigError> {
    if n_interior < 8 {
        return Err(ConfigError::new(
            "grid",
            format!("the convergence study needs at least 8 interior points, got {n_interior}"),
        ));
    }
    Ok(vec![n_interior / 8, n_interior / 4, n_interior / 2, n_interior])
}

pub fn convergence(config: &RunConfig) -> Outcome<ConvergencePayload> {
    let spec = config.operator();
    let sizes = convergence_sizes(config.n_interior)?;
    let table = convergence_study(&spec, &sizes, 1)?;
    let mut checks: Vec<Check> = table
        .orders()
        .iter()
        .enumerate()
        .map(|(i, &order)| Check::near(format!("observed_order_{}", i + 1), order, 2.0, 0.1))
        .collect();
    checks.push(Check::at_most("richardson_relative_error", table.richardson_relative_error(), 1e-6));
    let min_error = table.rows.iter().map(|r| r.error).fold(f64::INFINITY, f64::min);
    checks.push(Check::at_least("min_signed_error", min_error, 0.0));
    let payload = ConvergencePayload {
        index: table.index,
        analytic: table.analytic,
        rows: table
            .rows
            .iter()
            .map(|r| ConvergenceRowOut {
                n_interior: r.n_interior,
                h: r.h,
                eigenvalue: r.eigenvalue,
                error: r.error,
                observed_order: r.observed_order,
            })
            .collect(),
        richardson: table.richardson,
        richardson_relative_error: table.richardson_relative_error(),
    };
    Ok((payload, checks))
}

// ---------------------------------------------------------------- exactness

/// Bisection against the closed-form matrix spectrum and, for tiny
/// matrices, against the roots of the characteristic polynomial.
pub fn exactness(spec: &OperatorSpec) -> Result<Vec<Check>, SuiteError> {
    let mut checks = Vec::new();
    for n in EXACTNESS_GRIDS {
        let matrix = discretize(spec, &build_grid(&spec.domain, n)?)?;
        let mut worst = 0.0f64;
        for k in 1..=EXACTNESS_INDICES.min(n) {
            let bisected = bisect_descending(&matrix, k, BISECTION_TOL)?;
            worst = worst.max((bisected - matrix.closed_form_eigenvalue(k)?).abs());
        }
        checks.push(Check::at_most(format!("closed_form_max_abs_error_n{n}"), worst, EXACTNESS_TOL));
    }
    let mut worst = 0.0f64;
    for n in 1..=BRUTE_FORCE_MAX {
        let matrix = discretize(spec, &build_grid(&spec.domain, n)?)?;
        let roots = characteristic_roots(&vec![matrix.diag(); n], &vec![matrix.off(); n - 1]);
        for (k, root) in roots.iter().enumerate() {
            worst = worst.max((bisect_eigenvalue(&matrix, k + 1, BISECTION_TOL)? - root).abs());
        }
    }
    checks.push(Check::at_most("characteristic_roots_max_abs_error", worst, EXACTNESS_TOL));
    Ok(checks)
}

// ---------------------------------------------------------------- verify

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub name: &'static str,
    pub passed: bool,
    pub checks: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyPayload {
    pub suites: Vec<SuiteSummary>,
}

impl Payload for VerifyPayload {
    fn table(&self, checks: &[Check]) -> Table {
        checks_table(checks)
    }
}

pub fn verify(config: &RunConfig) -> Outcome<VerifyPayload> {
    let spec = config.operator();
    let suites: Vec<(&'static str, Vec<Check>)> = vec![
        ("info", info(config)?.1),
        ("symmetry", symmetry(config)?.1),
        ("deficiency", deficiency(config)?.1),
        ("spectrum", spectrum(config)?.1),
        ("convergence", convergence(config)?.1),
        ("exactness", exactness(&spec)?),
    ];
    let summaries = suites
        .iter()
        .map(|(name, checks)| SuiteSummary {
            name,
            passed: checks.iter().all(|c| c.passed),
            checks: checks.len(),
            failed: checks.iter().filter(|c| !c.passed).count(),
        })
        .collect();
    let checks = suites
        .into_iter()
        .flat_map(|(name, checks)| checks.into_iter().map(move |c| c.prefixed(name)))
        .collect();
    Ok((VerifyPayload { suites: summaries }, checks))
}
