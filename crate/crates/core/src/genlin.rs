//! Linear algebra and calculus on the generalized tangent bundle `T ⊕ T*`.
//!
//! Generalized vectors are stored in the frame/coframe basis
//! `(θ₁, …, θ_d, θ₁*, …, θ_d*)`. Structures acting on them are `2d×2d`
//! matrices in the same basis, with the vector block first.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use nalgebra::{Complex, DMatrix, DVector};

use crate::chartfield::{
    lie_bracket, lie_derivative_oneform, partial, d_scalar, FrameField, MatrixField,
    OneFormField, ScalarField, VectorField,
};
use crate::error::{GeomError, Result};
use crate::linalg::{blocks2, max_abs};

/// Relative singular-value cutoff used by [`gacs_type`].
pub const RANK_TOL: f64 = 1e-8;
/// Eigenvalue tolerance `|λ ∓ i|` used by [`gacs_type`].
pub const EIGEN_TOL: f64 = 1e-8;

/// `X + ξ` at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct GenVector {
    pub vec: DVector<f64>,
    pub form: DVector<f64>,
}

impl GenVector {
    pub fn new(vec: DVector<f64>, form: DVector<f64>) -> Self {
        assert_eq!(vec.len(), form.len(), "vector and form parts differ in length");
        Self { vec, form }
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(DVector::zeros(dim), DVector::zeros(dim))
    }

    pub fn dim(&self) -> usize {
        self.vec.len()
    }

    /// Stacked `(vec, form)` column of length `2d`.
    pub fn stacked(&self) -> DVector<f64> {
        let d = self.dim();
        DVector::from_fn(2 * d, |k, _| if k < d { self.vec[k] } else { self.form[k - d] })
    }

    pub fn from_stacked(v: &DVector<f64>) -> Self {
        let d = v.len() / 2;
        Self::new(v.rows(0, d).into_owned(), v.rows(d, d).into_owned())
    }

    /// Frame vector `θᵢ`.
    pub fn frame_vector(dim: usize, i: usize) -> Self {
        let mut g = Self::zero(dim);
        g.vec[i] = 1.0;
        g
    }

    /// Coframe form `θᵢ*`.
    pub fn frame_form(dim: usize, i: usize) -> Self {
        let mut g = Self::zero(dim);
        g.form[i] = 1.0;
        g
    }

    /// The vector part `→𝒳`.
    pub fn vector_part(&self) -> &DVector<f64> {
        &self.vec
    }

    pub fn norm(&self) -> f64 {
        (self.vec.norm_squared() + self.form.norm_squared()).sqrt()
    }
}

impl Add for GenVector {
    type Output = GenVector;
    fn add(self, rhs: Self) -> Self {
        GenVector::new(self.vec + rhs.vec, self.form + rhs.form)
    }
}

impl Sub for GenVector {
    type Output = GenVector;
    fn sub(self, rhs: Self) -> Self {
        GenVector::new(self.vec - rhs.vec, self.form - rhs.form)
    }
}

impl Neg for GenVector {
    type Output = GenVector;
    fn neg(self) -> Self {
        GenVector::new(-self.vec, -self.form)
    }
}

impl Mul<f64> for GenVector {
    type Output = GenVector;
    fn mul(self, s: f64) -> Self {
        GenVector::new(self.vec * s, self.form * s)
    }
}

/// `⟨X+ξ, Y+η⟩ = ½(ξ(Y) + η(X))`.
pub fn pairing(a: &GenVector, b: &GenVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(GeomError::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(0.5 * (a.form.dot(&b.vec) + b.form.dot(&a.vec)))
}

/// The split-signature pairing as a matrix, `η = ½[[0, I], [I, 0]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PseudoMetric {
    pub dim: usize,
}

impl PseudoMetric {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let z = DMatrix::zeros(self.dim, self.dim);
        let h = DMatrix::identity(self.dim, self.dim) * 0.5;
        blocks2(&z, &h, &h, &z)
    }

    /// Numbers of positive and negative eigenvalues.
    pub fn signature(&self) -> (usize, usize) {
        let eig = self.matrix().symmetric_eigen();
        let pos = eig.eigenvalues.iter().filter(|x| **x > 0.0).count();
        let neg = eig.eigenvalues.iter().filter(|x| **x < 0.0).count();
        (pos, neg)
    }
}

/// A section of `T ⊕ T*` given by frame coefficients.
#[derive(Clone)]
pub struct GenSection(Arc<dyn Fn(&[f64]) -> GenVector + Send + Sync>);

impl GenSection {
    pub fn new(f: impl Fn(&[f64]) -> GenVector + Send + Sync + 'static) -> Self {
        Self(Arc::new(f))
    }

    pub fn constant(v: GenVector) -> Self {
        Self::new(move |_| v.clone())
    }

    pub fn eval(&self, p: &[f64]) -> GenVector {
        (self.0)(p)
    }

    /// Pointwise product with a function.
    pub fn scaled(&self, f: &ScalarField) -> Self {
        let (s, f) = (self.clone(), f.clone());
        Self::new(move |p| s.eval(p) * f.eval_raw(p))
    }

    /// Apply a pointwise matrix field (a structure on `T ⊕ T*`).
    pub fn mapped(&self, m: &MatrixField) -> Self {
        let (s, m) = (self.clone(), m.clone());
        Self::new(move |p| GenVector::from_stacked(&(m.eval_raw(p) * s.eval(p).stacked())))
    }
}

impl fmt::Debug for GenSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("GenSection")
    }
}

/// A generalized almost complex structure as a matrix field in the
/// frame/coframe basis.
#[derive(Clone, Debug)]
pub struct Gacs {
    pub label: String,
    pub field: MatrixField,
}

impl Gacs {
    pub fn new(label: impl Into<String>, field: MatrixField) -> Self {
        Self {
            label: label.into(),
            field,
        }
    }

    pub fn at(&self, p: &[f64]) -> DMatrix<f64> {
        self.field.eval_raw(p)
    }

    /// `𝒥_J = diag(J, −J*)` for an almost complex structure `J` (frame matrix).
    pub fn from_complex(label: impl Into<String>, j: MatrixField) -> Self {
        Self::new(
            label,
            MatrixField::new(move |p| {
                let j = j.eval_raw(p);
                let z = DMatrix::zeros(j.nrows(), j.ncols());
                blocks2(&j, &z, &z, &(-j.transpose()))
            }),
        )
    }

    /// `𝒥_w = [[0, −w⁻¹], [w, 0]]` where `w` acts as `X ↦ i_X w`.
    ///
    /// `omega(p)[(i, j)] = w(θᵢ, θⱼ)`; it must be antisymmetric and invertible.
    pub fn from_symplectic(label: impl Into<String>, omega: MatrixField) -> Self {
        Self::new(
            label,
            MatrixField::new(move |p| {
                let w = omega.eval_raw(p).transpose();
                let winv = w.clone().try_inverse().expect("symplectic form must be nondegenerate");
                let z = DMatrix::zeros(w.nrows(), w.ncols());
                blocks2(&z, &(-winv), &w, &z)
            }),
        )
    }

    /// `(‖J² + Id‖∞, ‖Jᵀ η J − η‖∞)` at `p`.
    pub fn invariant_residuals(&self, p: &[f64]) -> (f64, f64) {
        let j = self.at(p);
        structure_residuals(&j)
    }

    pub fn apply(&self, a: &GenSection) -> GenSection {
        a.mapped(&self.field)
    }
}

/// `(‖J² + Id‖∞, ‖Jᵀ η J − η‖∞)` for a single matrix.
pub fn structure_residuals(j: &DMatrix<f64>) -> (f64, f64) {
    let n = j.nrows();
    let eta = PseudoMetric::new(n / 2).matrix();
    let sq = j * j + DMatrix::identity(n, n);
    let orth = j.transpose() * &eta * j - eta;
    (max_abs(&sq), max_abs(&orth))
}

/// Coordinate-basis vector field of the vector part of a section.
fn coord_vector(frame: &FrameField, a: &GenSection) -> VectorField {
    let (frame, a) = (frame.clone(), a.clone());
    VectorField::new(move |q| frame.eval_raw(q) * a.eval(q).vec)
}

/// Coordinate-basis one-form of the form part: `ξ_coord = M⁻ᵀ ξ_frame`.
fn coord_form(frame: &FrameField, a: &GenSection) -> OneFormField {
    let (frame, a) = (frame.clone(), a.clone());
    OneFormField::new(move |q| {
        let m = frame.eval_raw(q);
        let minv = m.try_inverse().expect("frame must be invertible");
        minv.transpose() * a.eval(q).form
    })
}

/// The Courant bracket
/// `[X+ξ, Y+η] = [X,Y] + ℒ_Xη − ℒ_Yξ − ½ d(i_Xη − i_Yξ)` at `p`.
///
/// Sections are frame coefficients; the bracket is evaluated in the
/// coordinate basis and returned in frame coefficients.
pub fn courant_bracket(
    frame: &FrameField,
    a: &GenSection,
    b: &GenSection,
    p: &[f64],
    h: f64,
) -> Result<GenVector> {
    let chart = &frame.chart;
    let (m, minv) = frame.eval_with_inverse(p)?;
    let (x, xi) = (coord_vector(frame, a), coord_form(frame, a));
    let (y, eta) = (coord_vector(frame, b), coord_form(frame, b));

    let vec = lie_bracket(chart, &x, &y, p, h)?;
    let cross = {
        let (x, xi, y, eta) = (x.clone(), xi.clone(), y.clone(), eta.clone());
        ScalarField::new(move |q| eta.eval_raw(q).dot(&x.eval_raw(q)) - xi.eval_raw(q).dot(&y.eval_raw(q)))
    };
    let form = lie_derivative_oneform(chart, &x, &eta, p, h)?
        - lie_derivative_oneform(chart, &y, &xi, p, h)?
        - d_scalar(chart, &cross, p, h)? * 0.5;

    Ok(GenVector::new(&minv * vec, m.transpose() * form))
}

/// `𝒩(𝒳,𝒴) = [𝒥𝒳,𝒥𝒴] − 𝒥[𝒥𝒳,𝒴] − 𝒥[𝒳,𝒥𝒴] − [𝒳,𝒴]` at `p`.
pub fn gen_nijenhuis(
    frame: &FrameField,
    j: &Gacs,
    a: &GenSection,
    b: &GenSection,
    p: &[f64],
    h: f64,
) -> Result<GenVector> {
    let (ja, jb) = (j.apply(a), j.apply(b));
    let jp = j.at(p);
    let apply = |v: GenVector| GenVector::from_stacked(&(&jp * v.stacked()));
    let t1 = courant_bracket(frame, &ja, &jb, p, h)?;
    let t2 = apply(courant_bracket(frame, &ja, b, p, h)?);
    let t3 = apply(courant_bracket(frame, a, &jb, p, h)?);
    let t4 = courant_bracket(frame, a, b, p, h)?;
    Ok(t1 - t2 - t3 - t4)
}

/// Outcome of a type computation, with the distance of the decision from
/// the rank threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct TypeReport {
    pub ty: usize,
    /// Smallest singular value counted as nonzero (relative to the largest).
    pub smallest_kept: f64,
    /// Largest singular value counted as zero (relative), 0 if none.
    pub largest_dropped: f64,
}

impl TypeReport {
    /// `log10` distance of the nearer singular value from the cutoff.
    pub fn margin_decades(&self) -> f64 {
        let kept = (self.smallest_kept / RANK_TOL).log10();
        if self.largest_dropped > 0.0 {
            kept.min((RANK_TOL / self.largest_dropped).log10())
        } else {
            kept
        }
    }
}

fn complex_rank(m: DMatrix<Complex<f64>>) -> (usize, f64, f64) {
    let sv = m.svd(false, false).singular_values;
    let largest = sv.iter().cloned().fold(0.0_f64, f64::max);
    if largest == 0.0 {
        return (0, 0.0, 0.0);
    }
    let mut rank = 0;
    let mut smallest_kept = f64::INFINITY;
    let mut largest_dropped = 0.0_f64;
    for s in sv.iter().map(|s| s / largest) {
        if s > RANK_TOL {
            rank += 1;
            smallest_kept = smallest_kept.min(s);
        } else {
            largest_dropped = largest_dropped.max(s);
        }
    }
    (rank, smallest_kept, largest_dropped)
}

/// Type of a generalized almost complex structure at a point: the
/// codimension of `pr₁(E)` in `T ⊗ ℂ`, `E` the `+i` eigenspace.
///
/// `E` is the column space of `Id − iJ`; its dimension must equal `d`.
pub fn gacs_type(j: &DMatrix<f64>) -> Result<TypeReport> {
    let n = j.nrows();
    if n % 2 != 0 || j.ncols() != n {
        return Err(GeomError::DimensionMismatch {
            expected: n + n % 2,
            found: n,
        });
    }
    let d = n / 2;
    let eigen = j.complex_eigenvalues();
    let near_i = eigen.iter().filter(|l| (*l - Complex::new(0.0, 1.0)).norm() <= EIGEN_TOL).count();
    let near_minus_i = eigen
        .iter()
        .filter(|l| (*l - Complex::new(0.0, -1.0)).norm() <= EIGEN_TOL)
        .count();
    if near_i != d || near_minus_i != d {
        return Err(GeomError::DegenerateEigenspace(format!(
            "expected {d} eigenvalues at ±i, found {near_i} at +i and {near_minus_i} at -i"
        )));
    }
    let proj = DMatrix::from_fn(n, n, |r, c| {
        let id = if r == c { 1.0 } else { 0.0 };
        Complex::new(id, -j[(r, c)])
    });
    let (full_rank, _, _) = complex_rank(proj.clone());
    if full_rank != d {
        return Err(GeomError::DegenerateEigenspace(format!(
            "+i eigenspace has dimension {full_rank}, expected {d}"
        )));
    }
    let top = proj.rows(0, d).into_owned();
    let (rank, smallest_kept, largest_dropped) = complex_rank(top);
    Ok(TypeReport {
        ty: d - rank,
        smallest_kept,
        largest_dropped,
    })
}

/// `e^B : X + ξ ↦ X + ξ + i_X B` as a `2d×2d` matrix;
/// `b[(i, j)] = B(θᵢ, θⱼ)`.
pub fn exp_b(b: &DMatrix<f64>) -> DMatrix<f64> {
    let d = b.nrows();
    let id = DMatrix::identity(d, d);
    blocks2(&id, &DMatrix::zeros(d, d), &b.transpose(), &id)
}

/// The B-transform `e^{−B} 𝒥 e^{B}`.
pub fn b_transform(j: &Gacs, b: &MatrixField) -> Gacs {
    let (jf, b) = (j.field.clone(), b.clone());
    Gacs::new(
        format!("{} (B-transformed)", j.label),
        MatrixField::new(move |p| {
            let bp = b.eval_raw(p);
            exp_b(&(-&bp)) * jf.eval_raw(p) * exp_b(&bp)
        }),
    )
}

/// A connection on `T` expressed in an orthonormal frame, extended to
/// `T ⊕ T*` by `∇_𝒳 = ∇_{→𝒳}` and acting on forms by duality.
pub trait TangentConnection {
    fn frame(&self) -> &FrameField;

    /// Matrices `Γᵢ` with `∇_{θᵢ} θⱼ = Σₖ Γᵢ[(k, j)] θₖ`.
    fn connection_matrices(&self, p: &[f64], h: f64) -> Result<Vec<DMatrix<f64>>>;
}

/// Directional derivative of frame coefficients along `θᵢ`.
fn frame_directional<F>(frame: &FrameField, f: F, p: &[f64], i: usize, h: f64) -> DVector<f64>
where
    F: Fn(&[f64]) -> DVector<f64>,
{
    let m = frame.eval_raw(p);
    let mut out = DVector::zeros(f(p).len());
    for a in 0..frame.dim() {
        let w = m[(a, i)];
        if w != 0.0 {
            out += partial(&f, p, a, h) * w;
        }
    }
    out
}

/// `∇_𝒳 𝒴` at `p` for the extension of a tangent connection.
pub fn gen_covariant(
    conn: &dyn TangentConnection,
    gamma: &[DMatrix<f64>],
    x: &GenVector,
    y: &GenSection,
    p: &[f64],
    h: f64,
) -> GenVector {
    let frame = conn.frame();
    let d = frame.dim();
    let y0 = y.eval(p);
    let mut out = GenVector::zero(d);
    for i in 0..d {
        let w = x.vec[i];
        if w == 0.0 {
            continue;
        }
        let dy = frame_directional(frame, |q| y.eval(q).stacked(), p, i, h);
        let dy = GenVector::from_stacked(&dy);
        let vec = dy.vec + &gamma[i] * &y0.vec;
        let form = dy.form - gamma[i].transpose() * &y0.form;
        out = out + GenVector::new(vec, form) * w;
    }
    out
}

/// Generalized torsion
/// `𝒯(𝒳₁,𝒳₂,𝒳₃) = ⟨∇₁𝒳₂ − ∇₂𝒳₁ − [𝒳₁,𝒳₂], 𝒳₃⟩ + ½(⟨∇₃𝒳₁,𝒳₂⟩ − ⟨∇₃𝒳₂,𝒳₁⟩)`.
pub fn gen_torsion(
    conn: &dyn TangentConnection,
    x1: &GenSection,
    x2: &GenSection,
    x3: &GenSection,
    p: &[f64],
    h: f64,
) -> Result<f64> {
    let frame = conn.frame();
    frame.chart.check(p, 2.0 * h)?;
    let gamma = conn.connection_matrices(p, h)?;
    let (v1, v2, v3) = (x1.eval(p), x2.eval(p), x3.eval(p));
    let n12 = gen_covariant(conn, &gamma, &v1, x2, p, h);
    let n21 = gen_covariant(conn, &gamma, &v2, x1, p, h);
    let br = courant_bracket(frame, x1, x2, p, h)?;
    let n31 = gen_covariant(conn, &gamma, &v3, x1, p, h);
    let n32 = gen_covariant(conn, &gamma, &v3, x2, p, h);
    Ok(pairing(&(n12 - n21 - br), &v3)? + 0.5 * (pairing(&n31, &v2)? - pairing(&n32, &v1)?))
}

/// The `4d` generalized frame sections `θ₁, …, θ_d, θ₁*, …, θ_d*`.
pub fn frame_sections(dim: usize) -> Vec<GenSection> {
    (0..dim)
        .map(|i| GenSection::constant(GenVector::frame_vector(dim, i)))
        .chain((0..dim).map(|i| GenSection::constant(GenVector::frame_form(dim, i))))
        .collect()
}
