//! Coordinate charts, evaluable fields and finite-difference Cartan calculus.
//!
//! Fields are plain closures of the chart coordinates. Vector fields return
//! components in the coordinate basis `∂/∂xᵢ`, one-forms in `dxᵢ`. Every
//! derivative is a second-order central difference; the caller picks the step.

use std::fmt;
use std::ops::{Mul, Sub};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};

/// Default step for first-derivative quantities.
pub const DEFAULT_STEP: f64 = 1e-4;
/// Default step for curvature (nested differences).
pub const CURVATURE_STEP: f64 = 1e-3;

/// A coordinate box.
#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    pub dim: usize,
    pub bounds: Vec<(f64, f64)>,
    pub label: String,
}

impl Chart {
    pub fn new(label: impl Into<String>, bounds: Vec<(f64, f64)>) -> Result<Self> {
        let label = label.into();
        if bounds.is_empty() {
            return Err(GeomError::Config(format!("chart `{label}` has no coordinates")));
        }
        if let Some((lo, hi)) = bounds.iter().find(|(lo, hi)| !(lo < hi)) {
            return Err(GeomError::Config(format!(
                "chart `{label}` has an empty interval [{lo}, {hi}]"
            )));
        }
        Ok(Self {
            dim: bounds.len(),
            bounds,
            label,
        })
    }

    pub fn cube(label: impl Into<String>, dim: usize, lo: f64, hi: f64) -> Self {
        Self::new(label, vec![(lo, hi); dim]).expect("valid cube")
    }

    /// Fails with `OutOfChart` unless every coordinate keeps `margin` from the boundary.
    pub fn check(&self, p: &[f64], margin: f64) -> Result<()> {
        if p.len() != self.dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim,
                found: p.len(),
            });
        }
        let inside = p
            .iter()
            .zip(&self.bounds)
            .all(|(x, (lo, hi))| *x >= lo + margin && *x <= hi - margin);
        if inside {
            Ok(())
        } else {
            Err(GeomError::OutOfChart {
                chart: self.label.clone(),
                point: p.to_vec(),
                margin,
            })
        }
    }

    /// Low-discrepancy (Halton) interior points keeping `margin` from the boundary.
    pub fn halton_points(&self, count: usize, margin: f64) -> Vec<Vec<f64>> {
        (1..=count)
            .map(|k| {
                self.bounds
                    .iter()
                    .enumerate()
                    .map(|(axis, (lo, hi))| {
                        let t = radical_inverse(k as u64, PRIMES[axis % PRIMES.len()]);
                        (lo + margin) + t * ((hi - margin) - (lo + margin))
                    })
                    .collect()
            })
            .collect()
    }

    pub fn center(&self) -> Vec<f64> {
        self.bounds.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect()
    }
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut k: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while k > 0 {
        out += (k % base) as f64 * inv;
        k /= base;
        inv /= base as f64;
    }
    out
}

type VecFn = dyn Fn(&[f64]) -> DVector<f64> + Send + Sync;
type MatFn = dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync;
type ScalarFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// Vector field in coordinate components.
#[derive(Clone)]
pub struct VectorField(Arc<VecFn>);

/// One-form field in coordinate components.
#[derive(Clone)]
pub struct OneFormField(Arc<VecFn>);

#[derive(Clone)]
pub struct ScalarField(Arc<ScalarFn>);

/// A matrix-valued field: frames, endomorphism fields, structures on `T ⊕ T*`.
#[derive(Clone)]
pub struct MatrixField(Arc<MatFn>);

macro_rules! vector_like {
    ($name:ident) => {
        impl $name {
            pub fn new(f: impl Fn(&[f64]) -> DVector<f64> + Send + Sync + 'static) -> Self {
                Self(Arc::new(f))
            }

            pub fn constant(v: DVector<f64>) -> Self {
                Self::new(move |_| v.clone())
            }

            /// The `i`-th coordinate basis element.
            pub fn basis(dim: usize, i: usize) -> Self {
                Self::constant(DVector::from_fn(dim, |k, _| if k == i { 1.0 } else { 0.0 }))
            }

            /// Evaluation without a chart check (covering-space evaluation).
            pub fn eval_raw(&self, p: &[f64]) -> DVector<f64> {
                (self.0)(p)
            }

            pub fn eval(&self, chart: &Chart, p: &[f64]) -> Result<DVector<f64>> {
                chart.check(p, 0.0)?;
                Ok(self.eval_raw(p))
            }

            /// Pointwise product with a scalar field.
            pub fn scaled(&self, s: &ScalarField) -> Self {
                let (f, s) = (self.clone(), s.clone());
                Self::new(move |p| f.eval_raw(p) * s.eval_raw(p))
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(stringify!($name))
            }
        }
    };
}

vector_like!(VectorField);
vector_like!(OneFormField);

impl ScalarField {
    pub fn new(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c)
    }

    pub fn eval_raw(&self, p: &[f64]) -> f64 {
        (self.0)(p)
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ScalarField")
    }
}

impl MatrixField {
    pub fn new(f: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn constant(m: DMatrix<f64>) -> Self {
        Self::new(move |_| m.clone())
    }

    pub fn eval_raw(&self, p: &[f64]) -> DMatrix<f64> {
        (self.0)(p)
    }

    pub fn eval(&self, chart: &Chart, p: &[f64]) -> Result<DMatrix<f64>> {
        chart.check(p, 0.0)?;
        Ok(self.eval_raw(p))
    }
}

impl fmt::Debug for MatrixField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("MatrixField")
    }
}

/// Evaluate a vector field with the chart check.
pub fn eval_field(chart: &Chart, field: &VectorField, p: &[f64]) -> Result<DVector<f64>> {
    field.eval(chart, p)
}

/// Central difference `(f(p + h eₐ) − f(p − h eₐ)) / 2h`.
pub fn partial<T, F>(f: F, p: &[f64], axis: usize, h: f64) -> T
where
    F: Fn(&[f64]) -> T,
    T: Sub<Output = T> + Mul<f64, Output = T>,
{
    let mut q = p.to_vec();
    q[axis] = p[axis] + h;
    let plus = f(&q);
    q[axis] = p[axis] - h;
    let minus = f(&q);
    (plus - minus) * (0.5 / h)
}

/// All coordinate partials of a vector-valued map: column `a` is `∂ₐ f`.
pub fn jacobian<F>(f: F, p: &[f64], h: f64) -> DMatrix<f64>
where
    F: Fn(&[f64]) -> DVector<f64>,
{
    let cols: Vec<DVector<f64>> = (0..p.len()).map(|a| partial(&f, p, a, h)).collect();
    DMatrix::from_columns(&cols)
}

/// `[X, Y]ᵏ = Xⁱ ∂ᵢYᵏ − Yⁱ ∂ᵢXᵏ` by central differences.
pub fn lie_bracket(
    chart: &Chart,
    x: &VectorField,
    y: &VectorField,
    p: &[f64],
    h: f64,
) -> Result<DVector<f64>> {
    chart.check(p, 2.0 * h)?;
    let dx = jacobian(|q| x.eval_raw(q), p, h);
    let dy = jacobian(|q| y.eval_raw(q), p, h);
    Ok(&dy * x.eval_raw(p) - &dx * y.eval_raw(p))
}

/// `(dξ)ᵢⱼ = ∂ᵢξⱼ − ∂ⱼξᵢ`.
pub fn d_oneform(chart: &Chart, xi: &OneFormField, p: &[f64], h: f64) -> Result<DMatrix<f64>> {
    chart.check(p, 2.0 * h)?;
    // jac[(j, i)] = ∂ᵢ ξⱼ
    let jac = jacobian(|q| xi.eval_raw(q), p, h);
    Ok(jac.transpose() - jac)
}

/// Exterior derivative of a function as a covector.
pub fn d_scalar(chart: &Chart, f: &ScalarField, p: &[f64], h: f64) -> Result<DVector<f64>> {
    chart.check(p, 2.0 * h)?;
    Ok(DVector::from_fn(p.len(), |a, _| partial(|q| f.eval_raw(q), p, a, h)))
}

/// Interior product of a vector with a 2-form matrix: `(i_X ω)ⱼ = Xⁱ ωᵢⱼ`.
pub fn interior(x: &DVector<f64>, omega: &DMatrix<f64>) -> DVector<f64> {
    omega.transpose() * x
}

/// `ℒ_X η = i_X dη + d(i_X η)` (Cartan).
pub fn lie_derivative_oneform(
    chart: &Chart,
    x: &VectorField,
    eta: &OneFormField,
    p: &[f64],
    h: f64,
) -> Result<DVector<f64>> {
    let d_eta = d_oneform(chart, eta, p, h)?;
    let contraction = {
        let (x, eta) = (x.clone(), eta.clone());
        ScalarField::new(move |q| x.eval_raw(q).dot(&eta.eval_raw(q)))
    };
    Ok(interior(&x.eval_raw(p), &d_eta) + d_scalar(chart, &contraction, p, h)?)
}

/// How the metric relates to the frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameMetric {
    /// The frame is orthonormal for the Euclidean coordinate metric.
    EuclideanOrthonormal,
    /// The metric is defined as the one making the frame orthonormal.
    Declared,
}

/// An orthonormal frame `(θ₁, …, θ_dim)` on a chart.
///
/// `coeffs(p)` has the coordinate components of `θᵢ` in column `i`.
#[derive(Clone, Debug)]
pub struct FrameField {
    pub chart: Chart,
    pub coeffs: MatrixField,
    pub metric: FrameMetric,
}

impl FrameField {
    pub fn new(chart: Chart, coeffs: MatrixField, metric: FrameMetric) -> Self {
        Self {
            chart,
            coeffs,
            metric,
        }
    }

    pub fn dim(&self) -> usize {
        self.chart.dim
    }

    /// Constant coordinate frame `θᵢ = ∂ᵢ`.
    pub fn coordinate(chart: Chart) -> Self {
        let n = chart.dim;
        Self::new(
            chart,
            MatrixField::constant(DMatrix::identity(n, n)),
            FrameMetric::EuclideanOrthonormal,
        )
    }

    pub fn eval(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        self.coeffs.eval(&self.chart, p)
    }

    pub fn eval_raw(&self, p: &[f64]) -> DMatrix<f64> {
        self.coeffs.eval_raw(p)
    }

    pub fn theta(&self, i: usize) -> VectorField {
        let c = self.coeffs.clone();
        VectorField::new(move |p| c.eval_raw(p).column(i).into_owned())
    }

    /// Frame matrix and its inverse; aborts on a degenerate frame.
    pub fn eval_with_inverse(&self, p: &[f64]) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let m = self.eval(p)?;
        let gram_det = (m.transpose() * &m).determinant();
        if !(gram_det.abs() >= 1e-6) {
            return Err(GeomError::FrameDegenerate {
                point: p.to_vec(),
                det: gram_det,
            });
        }
        let inv = m.clone().try_inverse().ok_or(GeomError::FrameDegenerate {
            point: p.to_vec(),
            det: gram_det,
        })?;
        Ok((m, inv))
    }

    /// Coordinate components of the metric making the frame orthonormal,
    /// `g = M⁻ᵀ M⁻¹`.
    pub fn metric_coords(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let (_, inv) = self.eval_with_inverse(p)?;
        Ok(inv.transpose() * inv)
    }

    /// `Mᵀ M`: the Gram matrix for the Euclidean coordinate metric.
    pub fn euclidean_gram(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let m = self.eval(p)?;
        Ok(m.transpose() * m)
    }

    /// Coordinate partials of the frame matrix, `∂ₐ M` for every axis `a`.
    pub fn derivatives(&self, p: &[f64], h: f64) -> Vec<DMatrix<f64>> {
        (0..self.dim())
            .map(|a| partial(|q| self.eval_raw(q), p, a, h))
            .collect()
    }
}
