//! Smooth complex-valued functions with caller-supplied derivatives.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

type Map = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// A complex function on the real line together with (optionally) its first
/// and second derivatives.
///
/// Derivatives are analytic, supplied by whoever builds the function. Cloning
/// is cheap: the closures are reference counted.
#[derive(Clone)]
pub struct TestFunction {
    label: String,
    value: Map,
    first: Option<Map>,
    second: Option<Map>,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("label", &self.label)
            .field("first", &self.first.is_some())
            .field("second", &self.second.is_some())
            .finish()
    }
}

impl TestFunction {
    /// A function with no derivative information yet.
    pub fn new<F>(label: impl Into<String>, value: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            value: Arc::new(value),
            first: None,
            second: None,
        }
    }

    /// Full constructor: value, first and second derivative.
    pub fn smooth<F, G, H>(label: impl Into<String>, value: F, first: G, second: H) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
        G: Fn(f64) -> Complex64 + Send + Sync + 'static,
        H: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self::new(label, value)
            .with_first_derivative(first)
            .with_second_derivative(second)
    }

    pub fn with_first_derivative<G>(mut self, first: G) -> Self
    where
        G: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        self.first = Some(Arc::new(first));
        self
    }

    pub fn with_second_derivative<H>(mut self, second: H) -> Self
    where
        H: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        self.second = Some(Arc::new(second));
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self, v: f64) -> Complex64 {
        (self.value)(v)
    }

    pub fn has_first_derivative(&self) -> bool {
        self.first.is_some()
    }

    pub fn has_second_derivative(&self) -> bool {
        self.second.is_some()
    }

    pub fn first_derivative(&self, v: f64) -> Result<Complex64> {
        self.first
            .as_ref()
            .map(|d| d(v))
            .ok_or_else(|| self.missing("first"))
    }

    pub fn second_derivative(&self, v: f64) -> Result<Complex64> {
        self.second
            .as_ref()
            .map(|d| d(v))
            .ok_or_else(|| self.missing("second"))
    }

    fn missing(&self, which: &'static str) -> Error {
        Error::MissingDerivative {
            label: self.label.clone(),
            which,
        }
    }

    /// Pointwise `alpha * self + beta * other`. A derivative is kept only if
    /// both operands carry it.
    pub fn linear_combination(&self, alpha: Complex64, other: &Self, beta: Complex64) -> Self {
        fn combine(a: &Map, alpha: Complex64, b: &Map, beta: Complex64) -> Map {
            let (a, b) = (Arc::clone(a), Arc::clone(b));
            Arc::new(move |v| alpha * a(v) + beta * b(v))
        }
        let pair = |x: &Option<Map>, y: &Option<Map>| match (x, y) {
            (Some(x), Some(y)) => Some(combine(x, alpha, y, beta)),
            _ => None,
        };
        Self {
            label: format!("({alpha})*{} + ({beta})*{}", self.label, other.label),
            value: combine(&self.value, alpha, &other.value, beta),
            first: pair(&self.first, &other.first),
            second: pair(&self.second, &other.second),
        }
    }

    /// Pointwise product, with derivatives from the Leibniz rule.
    pub fn product(&self, other: &Self) -> Self {
        let label = format!("{}*{}", self.label, other.label);
        let (f, g) = (Arc::clone(&self.value), Arc::clone(&other.value));
        let value: Map = {
            let (f, g) = (Arc::clone(&f), Arc::clone(&g));
            Arc::new(move |v| f(v) * g(v))
        };
        let first = match (&self.first, &other.first) {
            (Some(f1), Some(g1)) => {
                let (f, g, f1, g1) = (Arc::clone(&f), Arc::clone(&g), Arc::clone(f1), Arc::clone(g1));
                Some(Arc::new(move |v: f64| f1(v) * g(v) + f(v) * g1(v)) as Map)
            }
            _ => None,
        };
        let second = match (&self.first, &other.first, &self.second, &other.second) {
            (Some(f1), Some(g1), Some(f2), Some(g2)) => {
                let (f, g) = (Arc::clone(&f), Arc::clone(&g));
                let (f1, g1, f2, g2) = (Arc::clone(f1), Arc::clone(g1), Arc::clone(f2), Arc::clone(g2));
                Some(Arc::new(move |v: f64| {
                    f2(v) * g(v) + 2.0 * f1(v) * g1(v) + f(v) * g2(v)
                }) as Map)
            }
            _ => None,
        };
        Self {
            label,
            value,
            first,
            second,
        }
    }

    /// `f(v) = a` everywhere.
    pub fn constant(a: Complex64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self::smooth(format!("{a}"), move |_| a, move |_| zero, move |_| zero)
    }

    /// Real polynomial (complex coefficients allowed), lowest degree first.
    pub fn polynomial(coefficients: Vec<Complex64>) -> Self {
        let label = format!("poly(deg {})", coefficients.len().saturating_sub(1));
        let c0 = Arc::new(coefficients);
        let d1: Arc<Vec<Complex64>> = Arc::new(
            c0.iter()
                .enumerate()
                .skip(1)
                .map(|(k, a)| a * k as f64)
                .collect(),
        );
        let d2: Arc<Vec<Complex64>> = Arc::new(
            d1.iter()
                .enumerate()
                .skip(1)
                .map(|(k, a)| a * k as f64)
                .collect(),
        );
        Self::smooth(
            label,
            move |v| horner(&c0, v),
            move |v| horner(&d1, v),
            move |v| horner(&d2, v),
        )
    }

    /// `amplitude * sin(k v + phase)`.
    pub fn sine(amplitude: Complex64, k: f64, phase: f64) -> Self {
        Self::smooth(
            format!("{amplitude}*sin({k}v+{phase})"),
            move |v| amplitude * (k * v + phase).sin(),
            move |v| amplitude * k * (k * v + phase).cos(),
            move |v| -amplitude * k * k * (k * v + phase).sin(),
        )
    }

    /// `amplitude * exp(i k v)`.
    pub fn plane_wave(amplitude: Complex64, k: f64) -> Self {
        let i = Complex64::new(0.0, 1.0);
        Self::smooth(
            format!("{amplitude}*exp(i{k}v)"),
            move |v| amplitude * (i * k * v).exp(),
            move |v| amplitude * i * k * (i * k * v).exp(),
            move |v| -amplitude * k * k * (i * k * v).exp(),
        )
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

fn horner(coefficients: &[Complex64], v: f64) -> Complex64 {
    coefficients
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, a| acc * v + a)
}
