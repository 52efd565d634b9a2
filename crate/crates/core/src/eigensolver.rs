//! Sturm-sequence bisection and inverse iteration for the discretised operator.
//!
//! The matrix is `A = ceiling * I - off * T` with `T = tridiag(-1, 2, -1)`.
//! Near the top of the spectrum the diagonal of `A` is huge compared with
//! the eigenvalues (`|diag| ~ 1e7` against `lambda ~ -8` at two thousand
//! nodes), so the textbook recurrence on `A - xI` loses about `eps * |diag|`
//! in absolute accuracy. Both routines therefore work on `T` with the
//! spectral parameter `w = (ceiling - x) / off`, and count with the
//! differential (stationary qd) form of the shifted `LDL^T` factorisation,
//! whose pivots keep the count accurate relative to `w` itself.

use crate::error::{invalid, Error, Result};
use crate::operator::SymmetricTridiagonal;

/// Residual target of [`inverse_iteration`]: `||Ax - lambda x|| <= tol * (|lambda| + 1)`.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Iteration cap of [`inverse_iteration`].
pub const MAX_INVERSE_ITERATIONS: usize = 100;
/// Relative magnitude below which an entry is ignored when counting sign changes.
pub const NODE_THRESHOLD: f64 = 1e-12;

const PIVOT_GUARD: f64 = f64::MIN_POSITIVE;

/// Number of eigenvalues of the general symmetric tridiagonal matrix
/// `(diag, off)` strictly below `x`, by the sign of the leading principal
/// minor ratios `q_i = (d_i - x) - e_{i-1}^2 / q_{i-1}`. A zero `q_i` is
/// replaced by a tiny negative value.
pub fn sturm_count_entries(diag: &[f64], off: &[f64], x: f64) -> usize {
    assert_eq!(off.len() + 1, diag.len().max(1), "off-diagonal must have n - 1 entries");
    let mut count = 0;
    let mut q = 1.0;
    for (i, &d) in diag.iter().enumerate() {
        let coupling = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] / q };
        q = (d - x) - coupling;
        if q == 0.0 {
            q = -PIVOT_GUARD;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Number of `w`-eigenvalues of `T = tridiag(-1, 2, -1)` (order `n`) that are `<= tau`.
///
/// `T = L D L^T` with `D_i = (i+1)/i`, `L_i = -i/(i+1)`; the pivots `D+_i`
/// of `L D L^T - tau I = L+ D+ L+^T` are the ratios of consecutive leading
/// principal minors of `T - tau I`, so their negative count is the Sturm
/// count.
fn laplacian_count_at_most(n: usize, tau: f64) -> usize {
    let mut count = 0;
    let mut s = -tau;
    for i in 1..=n {
        let d = (i as f64 + 1.0) / i as f64;
        let mut d_plus = s + d;
        if d_plus == 0.0 {
            d_plus = -PIVOT_GUARD;
        }
        if d_plus < 0.0 {
            count += 1;
        }
        if i < n {
            let l = -(i as f64) / (i as f64 + 1.0);
            let l_plus = d * l / d_plus;
            s = l_plus * l * s - tau;
        }
    }
    count
}

/// Number of eigenvalues of `matrix` strictly less than `x`.
pub fn sturm_count(matrix: &SymmetricTridiagonal, x: f64) -> usize {
    let n = matrix.n();
    if x.is_nan() {
        return 0;
    }
    let tau = (matrix.ceiling() - x) / matrix.off();
    // lambda < x  <=>  w > tau
    n - laplacian_count_at_most(n, tau)
}

/// The `k`-th smallest eigenvalue (1-based) to within `tol`, by bisection on
/// [`sturm_count`] inside the Gershgorin interval.
pub fn bisect_eigenvalue(matrix: &SymmetricTridiagonal, k: usize, tol: f64) -> Result<f64> {
    let n = matrix.n();
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange { index: k, max: n });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(invalid("tol", format!("must be positive, got {tol}")));
    }
    if n == 1 {
        return Ok(matrix.diag());
    }
    let (mut lo, mut hi) = matrix.gershgorin();
    // count(lo) < k <= count(hi)
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(matrix, mid) >= k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The `k`-th largest eigenvalue (1-based), i.e. index `k` in descending order.
pub fn bisect_descending(matrix: &SymmetricTridiagonal, k: usize, tol: f64) -> Result<f64> {
    let n = matrix.n();
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange { index: k, max: n });
    }
    bisect_eigenvalue(matrix, n + 1 - k, tol)
}

/// `T x` with each entry formed as a difference of neighbouring differences.
fn laplacian_apply(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let left = if i > 0 { x[i - 1] } else { 0.0 };
            let right = if i + 1 < n { x[i + 1] } else { 0.0 };
            (x[i] - left) - (right - x[i])
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `||A x - lambda x||`.
pub fn residual(matrix: &SymmetricTridiagonal, lambda: f64, x: &[f64]) -> f64 {
    let gap = matrix.ceiling() - lambda;
    let tx = laplacian_apply(x);
    x.iter()
        .zip(&tx)
        .map(|(xi, ti)| {
            let r = gap * xi - matrix.off() * ti;
            r * r
        })
        .sum::<f64>()
        .sqrt()
}

/// Rayleigh quotient `x^T A x / x^T x`.
pub fn rayleigh_quotient(matrix: &SymmetricTridiagonal, x: &[f64]) -> f64 {
    let w = dot(x, &laplacian_apply(x)) / dot(x, x);
    matrix.ceiling() - matrix.off() * w
}

/// Solves the constant tridiagonal system `(sub, diag, sup) y = rhs`, with
/// `sub == sup == -1`, by Gaussian elimination with partial pivoting.
fn solve_shifted_laplacian(diag: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    // row i after elimination: u0[i] y_i + u1[i] y_{i+1} + u2[i] y_{i+2} = b[i]
    let mut u0 = vec![0.0; n];
    let mut u1 = vec![0.0; n];
    let mut u2 = vec![0.0; n];
    let mut b = rhs.to_vec();
    // current pivot row, as coefficients on (y_i, y_{i+1}, y_{i+2})
    let (mut a0, mut a1, mut a2) = (diag, -1.0, 0.0);
    let guard = f64::EPSILON * (diag.abs() + 2.0);
    for i in 0..n {
        if i + 1 < n {
            // next row: -1 * y_i + diag * y_{i+1} - 1 * y_{i+2}
            let (c0, c1, c2): (f64, f64, f64) = (-1.0, diag, if i + 2 < n { -1.0 } else { 0.0 });
            if c0.abs() > a0.abs() {
                b.swap(i, i + 1);
                let m = a0 / c0;
                u0[i] = c0;
                u1[i] = c1;
                u2[i] = c2;
                b[i + 1] -= m * b[i];
                a0 = a1 - m * c1;
                a1 = a2 - m * c2;
            } else {
                if a0 == 0.0 {
                    a0 = guard;
                }
                let m = c0 / a0;
                u0[i] = a0;
                u1[i] = a1;
                u2[i] = a2;
                b[i + 1] -= m * b[i];
                a0 = c1 - m * a1;
                a1 = c2 - m * a2;
            }
            a2 = 0.0;
        } else {
            if a0 == 0.0 {
                a0 = guard;
            }
            u0[i] = a0;
            u1[i] = 0.0;
            u2[i] = 0.0;
        }
    }
    let mut y = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        if i + 1 < n {
            s -= u1[i] * y[i + 1];
        }
        if i + 2 < n {
            s -= u2[i] * y[i + 2];
        }
        y[i] = s / u0[i];
    }
    y
}

fn normalize_with_sign(y: &mut [f64]) {
    let nrm = norm2(y);
    if nrm > 0.0 && nrm.is_finite() {
        y.iter_mut().for_each(|v| *v /= nrm);
    }
    let peak = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if let Some(first) = y.iter().find(|v| v.abs() > NODE_THRESHOLD * peak) {
        if *first < 0.0 {
            y.iter_mut().for_each(|v| *v = -*v);
        }
    }
}

/// Unit eigenvector for the eigenvalue nearest `shift`.
///
/// Starts from the normalised all-ones vector, solves `(A - shift I) y = x`
/// and renormalises until `||Ax - rho x|| <= 1e-9 (|rho| + 1)` with `rho`
/// the Rayleigh quotient. The first non-negligible component is positive.
pub fn inverse_iteration(matrix: &SymmetricTridiagonal, shift: f64) -> Result<Vec<f64>> {
    inverse_iteration_against(matrix, shift, &[])
}

/// [`inverse_iteration`] with each iterate orthogonalised against `locked`
/// (unit vectors already computed for other eigenvalues).
pub fn inverse_iteration_against(
    matrix: &SymmetricTridiagonal,
    shift: f64,
    locked: &[Vec<f64>],
) -> Result<Vec<f64>> {
    let n = matrix.n();
    let omega = (matrix.ceiling() - shift) / matrix.off();
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut last = f64::INFINITY;
    for _ in 0..MAX_INVERSE_ITERATIONS {
        // A - shift I = -off (T - omega I)
        let mut y = solve_shifted_laplacian(2.0 - omega, &x);
        for q in locked {
            let p = dot(&y, q);
            y.iter_mut().zip(q).for_each(|(yi, qi)| *yi -= p * qi);
        }
        normalize_with_sign(&mut y);
        x = y;
        let rho = rayleigh_quotient(matrix, &x);
        last = residual(matrix, rho, &x);
        if last <= RESIDUAL_TOL * (rho.abs() + 1.0) {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_INVERSE_ITERATIONS,
        residual: last,
    })
}

/// Strict sign changes, skipping entries with `|x_i| <= 1e-12 max|x|`.
pub fn node_count(vector: &[f64]) -> usize {
    let peak = vector.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut previous: Option<bool> = None;
    let mut changes = 0;
    for &v in vector {
        if v.abs() <= NODE_THRESHOLD * peak {
            continue;
        }
        let positive = v > 0.0;
        if previous.is_some_and(|p| p != positive) {
            changes += 1;
        }
        previous = Some(positive);
    }
    changes
}

/// `det(A - xI)` and its derivative for the symmetric tridiagonal `(diag, off)`,
/// by the three-term determinant recurrence.
pub fn characteristic_value(diag: &[f64], off: &[f64], x: f64) -> (f64, f64) {
    let (mut p_prev, mut p) = (0.0, 1.0);
    let (mut dp_prev, mut dp) = (0.0, 0.0);
    for (i, &d) in diag.iter().enumerate() {
        let e2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        let next = (d - x) * p - e2 * p_prev;
        let dnext = -p + (d - x) * dp - e2 * dp_prev;
        (p_prev, p) = (p, next);
        (dp_prev, dp) = (dp, dnext);
    }
    (p, dp)
}

/// Coefficients (constant term first) of `det(A - xI)`.
pub fn characteristic_polynomial(diag: &[f64], off: &[f64]) -> Vec<f64> {
    assert_eq!(off.len() + 1, diag.len().max(1), "off-diagonal must have n - 1 entries");
    let mut prev = vec![0.0];
    let mut cur = vec![1.0];
    for (i, &d) in diag.iter().enumerate() {
        let e2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        let mut next = vec![0.0; cur.len() + 1];
        for (j, &c) in cur.iter().enumerate() {
            next[j] += d * c;
            next[j + 1] -= c;
        }
        for (j, &c) in prev.iter().enumerate() {
            next[j] -= e2 * c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// Eigenvalues of a small symmetric tridiagonal matrix as roots of its
/// characteristic polynomial: Durand-Kerner on the coefficients, then Newton
/// on the determinant recurrence. Ascending. Meant as an independent check
/// of the bisection for a handful of rows, not as a solver.
pub fn characteristic_roots(diag: &[f64], off: &[f64]) -> Vec<f64> {
    use num_complex::Complex64;
    let coefficients = characteristic_polynomial(diag, off);
    let n = coefficients.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = coefficients[n];
    let monic: Vec<f64> = coefficients.iter().map(|c| c / lead).collect();
    let radius = 1.0 + monic[..n].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let eval = |z: Complex64| monic.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * radius).collect();
    for _ in 0..1000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let denom = (0..n)
                .filter(|&j| j != i)
                .fold(Complex64::new(1.0, 0.0), |acc, j| acc * (roots[i] - roots[j]));
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            moved = moved.max(step.norm() / roots[i].norm().max(1.0));
        }
        if moved < 1e-14 {
            break;
        }
    }
    let mut real: Vec<f64> = roots
        .iter()
        .map(|z| {
            let mut x = z.re;
            for _ in 0..50 {
                let (p, dp) = characteristic_value(diag, off, x);
                if dp == 0.0 {
                    break;
                }
                let step = p / dp;
                x -= step;
                if step.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            x
        })
        .collect();
    real.sort_by(f64::total_cmp);
    real
}
