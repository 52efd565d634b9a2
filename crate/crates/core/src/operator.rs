//! The deformation profile, the operator it generates, and its
//! finite-difference form on a uniform Dirichlet grid.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::function::TestFunction;

/// The scales `hbar` (action) and `c` (speed). Both strictly positive and finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    hbar: f64,
    c: f64,
}

impl PhysicalConstants {
    pub fn new(hbar: f64, c: f64) -> Result<Self> {
        check_positive("hbar", hbar)?;
        check_positive("c", c)?;
        Ok(Self { hbar, c })
    }

    /// `hbar = c = 1`.
    pub fn unit() -> Self {
        Self { hbar: 1.0, c: 1.0 }
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `hbar^2 / c^2`, the only combination the operator depends on.
    pub fn coupling(&self) -> f64 {
        let ratio = self.hbar / self.c;
        ratio * ratio
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::unit()
    }
}

fn check_positive(name: &'static str, x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(invalid(name, format!("must be finite, got {x}")));
    }
    if x <= 0.0 {
        return Err(invalid(name, format!("must be positive, got {x}")));
    }
    Ok(())
}

/// The symmetric interval `[-v_c, v_c]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalDomain {
    v_c: f64,
    canonical: bool,
}

impl IntervalDomain {
    /// The interval cut off where the deformation profile equals one.
    pub fn canonical(constants: &PhysicalConstants) -> Self {
        Self {
            v_c: critical_velocity(constants),
            canonical: true,
        }
    }

    /// An arbitrary half-width. Must lie in `(0, c)`.
    pub fn with_half_width(v_c: f64, constants: &PhysicalConstants) -> Result<Self> {
        check_positive("v_c", v_c)?;
        if v_c >= constants.c() {
            return Err(invalid(
                "v_c",
                format!("must be smaller than c = {}, got {v_c}", constants.c()),
            ));
        }
        Ok(Self {
            v_c,
            canonical: false,
        })
    }

    pub fn v_c(&self) -> f64 {
        self.v_c
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    pub fn length(&self) -> f64 {
        2.0 * self.v_c
    }

    pub fn contains(&self, v: f64) -> bool {
        v.abs() <= self.v_c
    }
}

/// One concrete operator instance: the constants plus the interval it acts on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorSpec {
    pub constants: PhysicalConstants,
    pub domain: IntervalDomain,
}

impl OperatorSpec {
    /// Operator on the canonical interval for the given constants.
    pub fn canonical(constants: PhysicalConstants) -> Self {
        Self {
            constants,
            domain: IntervalDomain::canonical(&constants),
        }
    }

    /// Operator on `[-v_c, v_c]` for a caller-chosen `v_c`.
    pub fn with_half_width(constants: PhysicalConstants, v_c: f64) -> Result<Self> {
        Ok(Self {
            constants,
            domain: IntervalDomain::with_half_width(v_c, &constants)?,
        })
    }

    pub fn v_c(&self) -> f64 {
        self.domain.v_c()
    }

    pub fn coupling(&self) -> f64 {
        self.constants.coupling()
    }
}

impl Default for OperatorSpec {
    fn default() -> Self {
        Self::canonical(PhysicalConstants::unit())
    }
}

/// `v_c = c * sqrt(1 - 1/pi)`, the positive root of `C(v) = 1`.
pub fn critical_velocity(constants: &PhysicalConstants) -> f64 {
    constants.c() * (1.0 - 1.0 / PI).sqrt()
}

/// The deformation profile `C(v) = pi (1 - v^2/c^2)`.
pub fn deformation_value(v: f64, constants: &PhysicalConstants) -> f64 {
    let x = v / constants.c();
    PI * (1.0 - x * x)
}

/// `pi * (f(v) + hbar^2/c^2 * f''(v))`.
pub fn apply_operator(f: &TestFunction, v: f64, spec: &OperatorSpec) -> Result<Complex64> {
    let second = f.second_derivative(v)?;
    Ok(PI * (f.value(v) + spec.coupling() * second))
}

/// The operator applied to `f`, as a value-only function (for inner products).
pub fn operator_image(f: &TestFunction, spec: &OperatorSpec) -> Result<TestFunction> {
    if !f.has_second_derivative() {
        // surface the error eagerly, not at the first quadrature node
        f.second_derivative(0.0)?;
    }
    let f = f.clone();
    let spec = *spec;
    let label = format!("C[{}]", f.label());
    Ok(TestFunction::new(label, move |v| {
        apply_operator(&f, v, &spec).expect("second derivative checked above")
    }))
}

/// Uniform grid of interior points; the endpoints `+-v_c` are excluded.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n_interior: usize,
    h: f64,
    v_c: f64,
    nodes: Vec<f64>,
}

impl Grid {
    pub fn n_interior(&self) -> usize {
        self.n_interior
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn v_c(&self) -> f64 {
        self.v_c
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Samples a real function at the nodes.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.nodes.iter().map(|&v| f(v)).collect()
    }
}

/// `h = 2 v_c / (n + 1)`, `nodes[j] = -v_c + (j + 1) h`.
pub fn build_grid(domain: &IntervalDomain, n_interior: usize) -> Result<Grid> {
    if n_interior == 0 {
        return Err(invalid("n_interior", "need at least one interior node"));
    }
    let v_c = domain.v_c();
    let h = 2.0 * v_c / (n_interior as f64 + 1.0);
    let nodes = (0..n_interior)
        .map(|j| -v_c + (j as f64 + 1.0) * h)
        .collect();
    Ok(Grid {
        n_interior,
        h,
        v_c,
        nodes,
    })
}

/// The central-difference matrix of the operator on a Dirichlet grid.
///
/// Constant diagonal `diag = pi (1 - 2 hbar^2 / (c^2 h^2))` and constant
/// off-diagonal `off = pi hbar^2 / (c^2 h^2)`. Because the stencil is
/// `ceiling * I - off * tridiag(-1, 2, -1)` with `ceiling = pi`, the solvers
/// work with `ceiling` and `off` separately and never form the cancelling
/// difference `diag + 2 off` in floating point.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricTridiagonal {
    diag: f64,
    off: f64,
    ceiling: f64,
    grid: Grid,
}

impl SymmetricTridiagonal {
    pub fn diag(&self) -> f64 {
        self.diag
    }

    pub fn off(&self) -> f64 {
        self.off
    }

    /// Upper Gershgorin bound `diag + 2 off`, held exactly.
    pub fn ceiling(&self) -> f64 {
        self.ceiling
    }

    pub fn n(&self) -> usize {
        self.grid.n_interior()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Gershgorin interval `[diag - 2|off|, diag + 2|off|]`.
    pub fn gershgorin(&self) -> (f64, f64) {
        (self.ceiling - 4.0 * self.off, self.ceiling)
    }

    /// Matrix-vector product with zero Dirichlet data outside the grid.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n(), "vector length must match the grid");
        let n = x.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 { x[i - 1] } else { 0.0 };
                let right = if i + 1 < n { x[i + 1] } else { 0.0 };
                self.diag * x[i] + self.off * (left + right)
            })
            .collect()
    }

    /// Closed-form `n`-th largest eigenvalue of this Toeplitz tridiagonal,
    /// `ceiling - 4 off sin^2(n pi / (2 (N + 1)))`. Its eigenvector is the
    /// sampled sine `sin(n pi (v + v_c) / (2 v_c))`.
    pub fn closed_form_eigenvalue(&self, n: usize) -> Result<f64> {
        if n == 0 || n > self.n() {
            return Err(crate::Error::IndexOutOfRange {
                index: n,
                max: self.n(),
            });
        }
        let s = (n as f64 * PI / (2.0 * (self.n() as f64 + 1.0))).sin();
        Ok(self.ceiling - 4.0 * self.off * s * s)
    }
}

/// Central second-difference discretisation of the operator on `grid`.
pub fn discretize(spec: &OperatorSpec, grid: &Grid) -> Result<SymmetricTridiagonal> {
    let expected = 2.0 * spec.v_c() / (grid.n_interior() as f64 + 1.0);
    if (grid.v_c() - spec.v_c()).abs() > 1e-12 * spec.v_c()
        || (grid.h() - expected).abs() > 1e-12 * expected
    {
        return Err(invalid(
            "grid",
            format!(
                "grid over [-{}, {}] does not match the operator interval [-{}, {}]",
                grid.v_c(),
                grid.v_c(),
                spec.v_c(),
                spec.v_c()
            ),
        ));
    }
    let h = grid.h();
    let off = PI * spec.coupling() / (h * h);
    Ok(SymmetricTridiagonal {
        diag: PI - 2.0 * off,
        off,
        ceiling: PI,
        grid: grid.clone(),
    })
}
