//! Deficiency indices of the Dirichlet operator.
//!
//! A solution of `C psi = +-i lambda psi` satisfies `psi'' = mu^2 psi` with
//! `mu^2 = (c^2/hbar^2)(+-i lambda/pi - 1)`. The general solution
//! `A e^{mu v} + B e^{-mu v}` meets both Dirichlet conditions only if the
//! coefficient determinant `-2 sinh(2 mu v_c)` vanishes. The same question is
//! answered a second way by integrating the ODE from `-v_c` with
//! `psi(-v_c) = 0, psi'(-v_c) = 1` and looking at `psi(v_c)`; the two are tied
//! by `det = -2 mu psi(v_c)`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::operator::{OperatorSpec, PhysicalConstants};

/// Scale-relative threshold below which the boundary determinant counts as zero.
pub const DETERMINANT_THRESHOLD: f64 = 1e-8;
/// Fewest RK4 steps accepted by [`shoot_deficiency`].
pub const MIN_SHOOTING_STEPS: usize = 100;
/// Steps used by [`deficiency_indices`].
pub const DEFAULT_SHOOTING_STEPS: usize = 10_000;
/// Largest relative gap between the shooting terminal value and `sinh(2 mu v_c)/mu`
/// before the two paths are treated as inconsistent.
pub const SHOOTING_AGREEMENT_TOL: f64 = 1e-6;

/// Which deficiency space: `ker(C* - i lambda)` or `ker(C* + i lambda)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A spectral parameter `lambda > 0` and a branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeficiencyProblem {
    lambda: f64,
    branch: Branch,
}

impl DeficiencyProblem {
    pub fn new(lambda: f64, branch: Branch) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(invalid("lambda", format!("must be a positive real, got {lambda}")));
        }
        Ok(Self { lambda, branch })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }
}

/// `(c^2/hbar^2)(s i lambda / pi - 1)`, `s = +-1`.
pub fn mu_squared(problem: &DeficiencyProblem, constants: &PhysicalConstants) -> Complex64 {
    let scale = 1.0 / constants.coupling();
    Complex64::new(-scale, problem.branch.sign() * scale * problem.lambda / PI)
}

/// Square root with `Re >= 0`, and `Im > 0` when `Re = 0`.
///
/// Written so that `principal_root(z.conj()) == principal_root(z).conj()`
/// holds bit for bit whenever `Im z != 0`.
pub fn principal_root(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(invalid("z", format!("must be finite, got {z}")));
    }
    if z.re == 0.0 && z.im == 0.0 {
        return Err(invalid("z", "zero has no distinguished square root"));
    }
    let t = ((z.re.hypot(z.im) + z.re.abs()) / 2.0).sqrt();
    let root = if z.re >= 0.0 {
        Complex64::new(t, z.im / (2.0 * t))
    } else {
        let im = if z.im >= 0.0 { t } else { -t };
        Complex64::new(z.im.abs() / (2.0 * t), im)
    };
    Ok(root)
}

/// `-2 sinh(2 mu v_c)`, the determinant of the Dirichlet system for `(A, B)`.
pub fn boundary_determinant(mu: Complex64, v_c: f64) -> Complex64 {
    -2.0 * (2.0 * v_c * mu).sinh()
}

/// The threshold `delta * max(1, e^{2 |Re mu| v_c})` used for zero tests.
pub fn determinant_scale(mu: Complex64, v_c: f64) -> f64 {
    (2.0 * mu.re.abs() * v_c).exp().max(1.0)
}

/// Integrates `psi'' = mu^2 psi` across `[-v_c, v_c]` with classical RK4,
/// starting from `psi = 0`, `psi' = 1`, and returns `psi(v_c)`.
pub fn shoot(mu: Complex64, v_c: f64, steps: usize) -> Result<Complex64> {
    if steps < MIN_SHOOTING_STEPS {
        return Err(invalid(
            "steps",
            format!("need at least {MIN_SHOOTING_STEPS} RK4 steps, got {steps}"),
        ));
    }
    let mu2 = mu * mu;
    let h = 2.0 * v_c / steps as f64;
    let half = 0.5 * h;
    let rhs = |y: Complex64, p: Complex64| (p, mu2 * y);
    let (mut y, mut p) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    for _ in 0..steps {
        let (k1y, k1p) = rhs(y, p);
        let (k2y, k2p) = rhs(y + half * k1y, p + half * k1p);
        let (k3y, k3p) = rhs(y + half * k2y, p + half * k2p);
        let (k4y, k4p) = rhs(y + h * k3y, p + h * k3p);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    }
    Ok(y)
}

/// Shooting terminal value `psi(v_c)` for the problem's `mu`.
pub fn shoot_deficiency(problem: &DeficiencyProblem, spec: &OperatorSpec, steps: usize) -> Result<Complex64> {
    let mu = principal_root(mu_squared(problem, &spec.constants))?;
    shoot(mu, spec.v_c(), steps)
}

/// Exact terminal value of the shooting solution `sinh(mu (v + v_c)) / mu`.
pub fn exact_terminal(mu: Complex64, v_c: f64) -> Complex64 {
    (2.0 * v_c * mu).sinh() / mu
}

/// Outcome of one branch at one `lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeficiencyReport {
    pub lambda: f64,
    pub branch: Branch,
    pub mu: Complex64,
    pub mu_squared: Complex64,
    pub determinant: Complex64,
    /// `delta * max(1, e^{2 |Re mu| v_c})`.
    pub threshold: f64,
    pub shooting_terminal: Complex64,
    pub shooting_steps: usize,
    /// `|shooting_terminal - sinh(2 mu v_c)/mu| / |sinh(2 mu v_c)/mu|`.
    pub shooting_error: f64,
    /// Dimension of the Dirichlet solution space from the determinant.
    pub determinant_index: usize,
    /// Same, judged from `-2 mu psi(v_c)`.
    pub shooting_index: usize,
}

impl DeficiencyReport {
    pub fn index(&self) -> usize {
        self.determinant_index
    }

    /// `|mu^2 - mu_squared| / |mu_squared|`.
    pub fn root_defect(&self) -> f64 {
        (self.mu * self.mu - self.mu_squared).norm() / self.mu_squared.norm()
    }
}

/// Both verdicts for an explicit `mu`. Exposed so degenerate `mu` (purely
/// imaginary, on the sine lattice) can be fed in directly.
pub fn classify(
    lambda: f64,
    branch: Branch,
    mu: Complex64,
    v_c: f64,
    steps: usize,
) -> Result<DeficiencyReport> {
    let determinant = boundary_determinant(mu, v_c);
    let threshold = DETERMINANT_THRESHOLD * determinant_scale(mu, v_c);
    let terminal = shoot(mu, v_c, steps)?;
    let exact = exact_terminal(mu, v_c);
    let shooting_error = if exact.norm() > 0.0 {
        (terminal - exact).norm() / exact.norm()
    } else {
        (terminal - exact).norm()
    };
    let determinant_index = usize::from(determinant.norm() <= threshold);
    let shooting_index = usize::from((-2.0 * mu * terminal).norm() <= threshold);
    Ok(DeficiencyReport {
        lambda,
        branch,
        mu,
        mu_squared: mu * mu,
        determinant,
        threshold,
        shooting_terminal: terminal,
        shooting_steps: steps,
        shooting_error,
        determinant_index,
        shooting_index,
    })
}

/// One branch: `mu` from the problem, then [`classify`].
pub fn analyze(problem: &DeficiencyProblem, spec: &OperatorSpec, steps: usize) -> Result<DeficiencyReport> {
    let mu_sq = mu_squared(problem, &spec.constants);
    let mu = principal_root(mu_sq)?;
    let mut report = classify(problem.lambda, problem.branch, mu, spec.v_c(), steps)?;
    report.mu_squared = mu_sq;
    Ok(report)
}

/// `(n_plus, n_minus)` at one `lambda`, with the per-branch reports.
#[derive(Debug, Clone, PartialEq)]
pub struct DeficiencyIndices {
    pub n_plus: usize,
    pub n_minus: usize,
    pub plus: DeficiencyReport,
    pub minus: DeficiencyReport,
}

fn consistent(report: DeficiencyReport) -> Result<DeficiencyReport> {
    if report.determinant_index != report.shooting_index {
        return Err(Error::Inconsistent(format!(
            "lambda = {}, branch {}: |det| = {:e}, |-2 mu psi(v_c)| = {:e}, threshold {:e}",
            report.lambda,
            report.branch,
            report.determinant.norm(),
            (-2.0 * report.mu * report.shooting_terminal).norm(),
            report.threshold
        )));
    }
    if report.shooting_error.is_nan() || report.shooting_error > SHOOTING_AGREEMENT_TOL {
        return Err(Error::Inconsistent(format!(
            "lambda = {}, branch {}: shooting misses sinh(2 mu v_c)/mu by {:e} (relative)",
            report.lambda, report.branch, report.shooting_error
        )));
    }
    Ok(report)
}

/// Deficiency indices at `lambda` by the determinant route, confirmed by shooting.
///
/// Disagreement between the two routes is a numerical fault and comes back
/// as [`Error::Inconsistent`].
pub fn deficiency_indices(spec: &OperatorSpec, lambda: f64) -> Result<DeficiencyIndices> {
    deficiency_indices_with_steps(spec, lambda, DEFAULT_SHOOTING_STEPS)
}

pub fn deficiency_indices_with_steps(
    spec: &OperatorSpec,
    lambda: f64,
    steps: usize,
) -> Result<DeficiencyIndices> {
    let plus = consistent(analyze(&DeficiencyProblem::new(lambda, Branch::Plus)?, spec, steps)?)?;
    let minus = consistent(analyze(&DeficiencyProblem::new(lambda, Branch::Minus)?, spec, steps)?)?;
    Ok(DeficiencyIndices {
        n_plus: plus.index(),
        n_minus: minus.index(),
        plus,
        minus,
    })
}

/// Indices over a grid of `lambda`, evaluated in parallel, returned sorted
/// by `lambda`.
pub fn sweep(spec: &OperatorSpec, lambdas: &[f64], steps: usize) -> Result<Vec<DeficiencyIndices>> {
    let mut sorted = lambdas.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted
        .par_iter()
        .map(|&lambda| deficiency_indices_with_steps(spec, lambda, steps))
        .collect()
}

/// `count` values spaced evenly in `log10` over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && lo > 0.0 && hi > lo);
    let (a, b) = (lo.log10(), hi.log10());
    (0..count)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (count - 1) as f64))
        .collect()
}

/// Minimum of `|sinh(2 mu v_c)|` over a sweep, with the `lambda` where it occurs.
pub fn min_sinh(results: &[DeficiencyIndices]) -> Option<(f64, f64)> {
    results
        .iter()
        .flat_map(|r| [&r.plus, &r.minus])
        .map(|r| (r.lambda, r.determinant.norm() / 2.0))
        .min_by(|a, b| a.1.total_cmp(&b.1))
}
