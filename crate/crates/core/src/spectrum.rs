//! The Dirichlet spectrum: closed form on the sine basis and numerically on
//! the finite-difference matrix.
//!
//! Eigenvalues are indexed from the top: `n = 1` is the largest. The operator
//! is bounded above by `pi`, and
//!
//! ```text
//! C_n = pi (1 - (hbar^2/c^2) (n pi / (2 v_c))^2),
//! phi_n(v) = sqrt(1/v_c) sin(n pi (v + v_c) / (2 v_c)).
//! ```

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::eigensolver::{bisect_descending, inverse_iteration_against, node_count, residual};
use crate::error::{invalid, Error, Result};
use crate::function::TestFunction;
use crate::operator::{build_grid, discretize, Grid, OperatorSpec, SymmetricTridiagonal};

/// Absolute bisection tolerance used by [`compute_spectrum`]. Bisection also
/// stops once the bracket cannot be split in floating point.
pub const BISECTION_TOL: f64 = 1e-14;
/// Consecutive eigenvalues must differ by more than this times `|lambda|`.
pub const SIMPLICITY_TOL: f64 = 1e-12;
/// Largest off-diagonal Gram entry tolerated between computed eigenvectors.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

fn check_index(n: usize) -> Result<()> {
    if n == 0 {
        return Err(invalid("n", "eigenvalue indices start at 1"));
    }
    Ok(())
}

/// `pi (1 - (hbar^2/c^2) (n pi / (2 v_c))^2)`.
pub fn analytic_eigenvalue(n: usize, spec: &OperatorSpec) -> Result<f64> {
    check_index(n)?;
    let k = n as f64 * PI / (2.0 * spec.v_c());
    Ok(PI * (1.0 - spec.coupling() * k * k))
}

/// Unit-norm `sqrt(1/v_c) sin(n pi (v + v_c) / (2 v_c))` with its derivatives.
pub fn analytic_eigenfunction(n: usize, spec: &OperatorSpec) -> Result<TestFunction> {
    check_index(n)?;
    let v_c = spec.v_c();
    let k = n as f64 * PI / (2.0 * v_c);
    let amplitude = (1.0 / v_c).sqrt();
    Ok(TestFunction::sine(amplitude.into(), k, k * v_c).relabel(format!("phi{n}")))
}

/// The closed-form spectrum of one operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticSpectrum {
    pub spec: OperatorSpec,
}

impl AnalyticSpectrum {
    pub fn new(spec: OperatorSpec) -> Self {
        Self { spec }
    }

    pub fn eigenvalue(&self, n: usize) -> Result<f64> {
        analytic_eigenvalue(n, &self.spec)
    }

    pub fn eigenfunction(&self, n: usize) -> Result<TestFunction> {
        analytic_eigenfunction(n, &self.spec)
    }

    /// `(pi - C_n) / n^2 = pi^3 hbar^2 / (4 c^2 v_c^2)`, the same for every `n`.
    pub fn quadratic_coefficient(&self) -> f64 {
        PI.powi(3) * self.spec.coupling() / (4.0 * self.spec.v_c() * self.spec.v_c())
    }
}

/// Least-squares line `C_n ~ slope * n^2 + intercept` over `n = 1..=n_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn quadratic_fit(spec: &OperatorSpec, n_max: usize) -> Result<QuadraticFit> {
    if n_max < 3 {
        return Err(invalid("n_max", "need at least three eigenvalues to fit"));
    }
    let points = (1..=n_max)
        .map(|n| Ok(((n * n) as f64, analytic_eigenvalue(n, spec)?)))
        .collect::<Result<Vec<_>>>()?;
    let m = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - (slope * p.0 + intercept)).powi(2))
        .sum();
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    Ok(QuadraticFit {
        slope,
        intercept,
        r_squared: 1.0 - ss_res / ss_tot,
    })
}

/// Top-`k` eigenpairs of the discretised operator, descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    pub grid: Grid,
    /// `||A x_i - lambda_i x_i||`.
    pub residuals: Vec<f64>,
    pub method: String,
}

impl SpectralDecomposition {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Every gap `lambda_i - lambda_{i+1}` exceeds `1e-12 |lambda_i|`.
    pub fn is_simple(&self) -> bool {
        self.eigenvalues
            .windows(2)
            .all(|w| w[0] - w[1] > SIMPLICITY_TOL * w[0].abs().max(w[1].abs()))
    }

    /// Smallest relative gap between consecutive eigenvalues.
    pub fn min_relative_gap(&self) -> f64 {
        self.eigenvalues
            .windows(2)
            .map(|w| (w[0] - w[1]) / w[0].abs().max(w[1].abs()))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max |<x_i, x_j> - delta_ij|`.
    pub fn gram_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.eigenvectors.iter().enumerate() {
            for (j, b) in self.eigenvectors.iter().enumerate().skip(i) {
                let g: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }

    /// `max_i residual_i / (|lambda_i| + 1)`.
    pub fn max_scaled_residual(&self) -> f64 {
        self.residuals
            .iter()
            .zip(&self.eigenvalues)
            .map(|(r, l)| r / (l.abs() + 1.0))
            .fold(0.0, f64::max)
    }

    pub fn node_counts(&self) -> Vec<usize> {
        self.eigenvectors.iter().map(|x| node_count(x)).collect()
    }
}

/// Eigenpairs `1..=k` (descending) of the Dirichlet matrix with
/// `n_interior` nodes.
///
/// Eigenvalues come from Sturm bisection, independently and in parallel.
/// Eigenvectors come from inverse iteration at the bisected eigenvalue, in
/// order, each iterate orthogonalised against the vectors before it.
pub fn compute_spectrum(spec: &OperatorSpec, n_interior: usize, k: usize) -> Result<SpectralDecomposition> {
    if k == 0 || k > n_interior {
        return Err(Error::IndexOutOfRange {
            index: k,
            max: n_interior,
        });
    }
    let grid = build_grid(&spec.domain, n_interior)?;
    let matrix = discretize(spec, &grid)?;
    decompose(&matrix, k)
}

/// [`compute_spectrum`] for an already assembled matrix.
pub fn decompose(matrix: &SymmetricTridiagonal, k: usize) -> Result<SpectralDecomposition> {
    let eigenvalues = (1..=k)
        .into_par_iter()
        .map(|i| bisect_descending(matrix, i, BISECTION_TOL))
        .collect::<Result<Vec<f64>>>()?;
    let mut eigenvectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    for &lambda in &eigenvalues {
        let x = inverse_iteration_against(matrix, lambda, &eigenvectors)?;
        eigenvectors.push(x);
    }
    let residuals = eigenvalues
        .iter()
        .zip(&eigenvectors)
        .map(|(&l, x)| residual(matrix, l, x))
        .collect();
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        grid: matrix.grid().clone(),
        residuals,
        method: "sturm-bisection+inverse-iteration".to_string(),
    })
}

/// One grid of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n_interior: usize,
    pub h: f64,
    pub eigenvalue: f64,
    /// `eigenvalue - analytic`, signed.
    pub error: f64,
    /// `log(|e_prev| / |e|) / log(h_prev / h)`; absent on the first row.
    pub observed_order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub index: usize,
    pub analytic: f64,
    pub rows: Vec<ConvergenceRow>,
    /// Second-order Richardson extrapolation from the two finest grids.
    pub richardson: f64,
}

impl ConvergenceTable {
    pub fn richardson_relative_error(&self) -> f64 {
        ((self.richardson - self.analytic) / self.analytic).abs()
    }

    pub fn orders(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.observed_order).collect()
    }
}

/// Error of the `n`-th eigenvalue against the closed form across `grid_sizes`.
pub fn convergence_study(spec: &OperatorSpec, grid_sizes: &[usize], n: usize) -> Result<ConvergenceTable> {
    if grid_sizes.len() < 3 {
        return Err(invalid("grid_sizes", "need at least three grid sizes"));
    }
    if !grid_sizes.windows(2).all(|w| w[0] < w[1]) {
        return Err(invalid("grid_sizes", "grid sizes must be strictly increasing"));
    }
    if grid_sizes[0] < n {
        return Err(Error::IndexOutOfRange {
            index: n,
            max: grid_sizes[0],
        });
    }
    let analytic = analytic_eigenvalue(n, spec)?;
    let computed = grid_sizes
        .par_iter()
        .map(|&size| {
            let grid = build_grid(&spec.domain, size)?;
            let matrix = discretize(spec, &grid)?;
            Ok((size, grid.h(), bisect_descending(&matrix, n, BISECTION_TOL)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(computed.len());
    for (size, h, eigenvalue) in computed {
        let error = eigenvalue - analytic;
        let observed_order = rows
            .last()
            .map(|prev| (prev.error.abs() / error.abs()).ln() / (prev.h / h).ln());
        rows.push(ConvergenceRow {
            n_interior: size,
            h,
            eigenvalue,
            error,
            observed_order,
        });
    }
    let fine = rows[rows.len() - 1];
    let coarse = rows[rows.len() - 2];
    let ratio = (coarse.h / fine.h).powi(2);
    let richardson = fine.eigenvalue + (fine.eigenvalue - coarse.eigenvalue) / (ratio - 1.0);
    Ok(ConvergenceTable {
        index: n,
        analytic,
        rows,
        richardson,
    })
}
