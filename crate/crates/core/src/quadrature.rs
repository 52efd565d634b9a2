//! Composite Gauss-Legendre quadrature.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::operator::IntervalDomain;

pub const DEFAULT_POINTS_PER_PANEL: usize = 5;
pub const DEFAULT_PANELS: usize = 64;

/// Nodes and weights of a quadrature on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    order: usize,
    lo: f64,
    hi: f64,
    panels: usize,
    points_per_panel: usize,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, ascending.
///
/// Newton iteration on `P_n` from the Chebyshev initial guess; weights
/// `2 / ((1 - x^2) P_n'(x)^2)`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let n = n as f64;
    let dp = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

impl QuadratureRule {
    /// `panels` equal panels on `[lo, hi]`, `points` Gauss points each.
    pub fn composite(lo: f64, hi: f64, panels: usize, points: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(invalid("interval", format!("[{lo}, {hi}] is not a proper interval")));
        }
        if panels == 0 || points == 0 {
            return Err(invalid("panels", "need at least one panel and one point"));
        }
        let (x, w) = gauss_legendre(points);
        let width = (hi - lo) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * points);
        let mut weights = Vec::with_capacity(panels * points);
        for p in 0..panels {
            let a = lo + p as f64 * width;
            let mid = a + 0.5 * width;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + 0.5 * width * xi);
                weights.push(0.5 * width * wi);
            }
        }
        Ok(Self {
            nodes,
            weights,
            order: 2 * points - 1,
            lo,
            hi,
            panels,
            points_per_panel: points,
        })
    }

    /// The default rule (5 points, 64 panels) on `[-v_c, v_c]`.
    pub fn for_domain(domain: &IntervalDomain) -> Self {
        Self::composite(-domain.v_c(), domain.v_c(), DEFAULT_PANELS, DEFAULT_POINTS_PER_PANEL)
            .expect("canonical domain is a proper interval")
    }

    /// Same interval and points per panel, twice the panels.
    pub fn refined(&self) -> Self {
        Self::composite(self.lo, self.hi, 2 * self.panels, self.points_per_panel)
            .expect("refinement of a valid rule")
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Highest polynomial degree integrated exactly.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Errors unless the rule covers exactly `[-v_c, v_c]`.
    pub fn check_spans(&self, domain: &IntervalDomain) -> Result<()> {
        let v_c = domain.v_c();
        let tol = 1e-12 * v_c;
        if (self.lo + v_c).abs() > tol || (self.hi - v_c).abs() > tol {
            return Err(Error::IntervalMismatch {
                rule_lo: self.lo,
                rule_hi: self.hi,
                lo: -v_c,
                hi: v_c,
            });
        }
        Ok(())
    }

    pub fn integrate(&self, f: impl Fn(f64) -> Complex64) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn integrate_real(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn five_point_rule_matches_tabulated_values() {
        let (x, w) = gauss_legendre(5);
        let x2 = (5.0 - 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
        let x3 = (5.0 + 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
        assert_relative_eq!(x[3], x2, epsilon = 1e-15);
        assert_relative_eq!(x[4], x3, epsilon = 1e-15);
        assert_eq!(x[2], 0.0);
        assert_relative_eq!(w[2], 128.0 / 225.0, epsilon = 1e-15);
        assert_relative_eq!(w[4], (322.0 - 13.0 * 70.0f64.sqrt()) / 900.0, epsilon = 1e-14);
    }

    #[test]
    fn exact_for_polynomials_up_to_order() {
        for n in 1..=12 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..=(2 * n - 1) {
                let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-14, "n={n} deg={deg} q={q}");
            }
        }
    }

    #[test]
    fn composite_weights_sum_to_length() {
        let r = QuadratureRule::composite(-0.8256, 0.8256, 64, 5).unwrap();
        let sum: f64 = r.weights().iter().sum();
        assert_relative_eq!(sum, 2.0 * 0.8256, max_relative = 1e-12);
        assert_eq!(r.nodes().len(), r.weights().len());
        assert_eq!(r.order(), 9);
        assert!(r.nodes().windows(2).all(|p| p[0] < p[1]));
        assert!(r.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn smooth_integral_converges() {
        let r = QuadratureRule::composite(0.0, PI, 8, 5).unwrap();
        assert_relative_eq!(r.integrate_real(f64::sin), 2.0, epsilon = 1e-12);
        assert_relative_eq!(r.refined().integrate_real(f64::sin), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(QuadratureRule::composite(1.0, 1.0, 4, 5).is_err());
        assert!(QuadratureRule::composite(0.0, 1.0, 0, 5).is_err());
    }
}
