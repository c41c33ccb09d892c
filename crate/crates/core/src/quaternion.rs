//! Quaternionic linear structures.
//!
//! Endomorphisms are matrices in the orthonormal frame basis, with the
//! image of `θⱼ` in column `j`. A bivector `θₐ ∧ θ_b` is identified with the
//! skew endomorphism sending `θₐ ↦ θ_b` and `θ_b ↦ −θₐ`.

use nalgebra::{DMatrix, Matrix3, Rotation3, Unit, Vector3};

use crate::chartfield::FrameField;
use crate::connection::Christoffel;
use crate::error::{GeomError, Result};
use crate::genlin::structure_residuals;
use crate::linalg::{block_diag, blocks2, commutator, frob, frob_inner, max_abs};

/// Tolerance for accepting a 3×3 matrix as a rotation.
pub const ISO_TOL: f64 = 1e-10;

/// `θₐ ∧ θ_b` as a skew endomorphism of a `dim`-dimensional space.
pub fn wedge_endo(dim: usize, a: usize, b: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, dim);
    m[(b, a)] += 1.0;
    m[(a, b)] -= 1.0;
    m
}

/// Quaternion-relation defect of `(I, J, K)`:
/// max of `‖I²+Id‖, ‖J²+Id‖, ‖K²+Id‖, ‖IJ−K‖`.
pub fn relation_defect(t: [&DMatrix<f64>; 3]) -> f64 {
    let n = t[0].nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let squares = t.iter().map(|m| max_abs(&(*m * *m + &id))).fold(0.0, f64::max);
    squares.max(max_abs(&(t[0] * t[1] - t[2])))
}

/// A quaternionic triple `(I, J, K)` of constant frame-basis matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct Triple {
    pub label: String,
    pub m: [DMatrix<f64>; 3],
}

impl Triple {
    pub fn new(label: impl Into<String>, m: [DMatrix<f64>; 3]) -> Self {
        Self { label: label.into(), m }
    }

    pub fn dim(&self) -> usize {
        self.m[0].nrows()
    }

    pub fn defect(&self) -> f64 {
        relation_defect([&self.m[0], &self.m[1], &self.m[2]])
    }

    /// `aI + bJ + cK`.
    pub fn combine(&self, abc: &[f64; 3]) -> DMatrix<f64> {
        &self.m[0] * abc[0] + &self.m[1] * abc[1] + &self.m[2] * abc[2]
    }

    /// Coordinates of the orthogonal projection of `u` onto the span.
    pub fn coords(&self, u: &DMatrix<f64>) -> [f64; 3] {
        let norm2 = |m: &DMatrix<f64>| frob_inner(m, m);
        [0, 1, 2].map(|k| frob_inner(&self.m[k], u) / norm2(&self.m[k]))
    }

    /// Distance of `u` from the span.
    pub fn off_span(&self, u: &DMatrix<f64>) -> f64 {
        frob(&(u - self.combine(&self.coords(u))))
    }

    /// Block-diagonal product triple `(I₁⊕I₂, J₁⊕J₂, K₁⊕K₂)`.
    pub fn product(a: &Triple, b: &Triple) -> Triple {
        Triple::new(
            format!("{}{}", a.label, b.label),
            [0, 1, 2].map(|k| block_diag(&a.m[k], &b.m[k])),
        )
    }

    /// The triple conjugated by an orthogonal change of frame `O`
    /// (columns of `O` are the new frame vectors).
    pub fn in_frame(&self, o: &DMatrix<f64>) -> Triple {
        Triple::new(self.label.clone(), self.m.clone().map(|m| o.transpose() * m * o))
    }
}

/// `Λ⁺` and `Λ⁻` bases of a 4-dimensional oriented orthonormal frame:
///
/// ```text
/// I⁺ = θ₁∧θ₂ + θ₃∧θ₄   J⁺ = θ₁∧θ₃ − θ₂∧θ₄   K⁺ = θ₁∧θ₄ + θ₂∧θ₃
/// I⁻ = θ₁∧θ₂ − θ₃∧θ₄   J⁻ = θ₁∧θ₃ + θ₂∧θ₄   K⁻ = −θ₁∧θ₄ + θ₂∧θ₃
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaBases {
    pub plus: [DMatrix<f64>; 3],
    pub minus: [DMatrix<f64>; 3],
}

impl LambdaBases {
    pub fn standard() -> Self {
        let w = |a, b| wedge_endo(4, a, b);
        Self {
            plus: [w(0, 1) + w(2, 3), w(0, 2) - w(1, 3), w(0, 3) + w(1, 2)],
            minus: [w(0, 1) - w(2, 3), w(0, 2) + w(1, 3), -w(0, 3) + w(1, 2)],
        }
    }

    /// `(I⁺, J⁺, K⁺, I⁻, J⁻, K⁻)`.
    pub fn all(&self) -> [&DMatrix<f64>; 6] {
        [
            &self.plus[0],
            &self.plus[1],
            &self.plus[2],
            &self.minus[0],
            &self.minus[1],
            &self.minus[2],
        ]
    }

    pub fn plus_triple(&self) -> Triple {
        Triple::new("lambda+", self.plus.clone())
    }

    pub fn minus_triple(&self) -> Triple {
        Triple::new("lambda-", self.minus.clone())
    }
}

/// The `Λ±` bases attached to a 4-dimensional frame.
pub fn lambda_bases(frame: &FrameField) -> Result<LambdaBases> {
    if frame.dim() != 4 {
        return Err(GeomError::DimensionError {
            required: "4".into(),
            found: frame.dim(),
        });
    }
    Ok(LambdaBases::standard())
}

/// An algebra isomorphism `f: D⁻ → D⁺` as a rotation taking
/// `D⁻`-coordinates to `D⁺`-coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraIso {
    pub f: Matrix3<f64>,
}

impl AlgebraIso {
    pub fn new(f: Matrix3<f64>) -> Result<Self> {
        let orth_defect = (f.transpose() * f - Matrix3::identity()).amax();
        let det = f.determinant();
        if orth_defect > ISO_TOL || det <= 0.0 {
            return Err(GeomError::NotAlgebraIso { orth_defect, det });
        }
        Ok(Self { f })
    }

    pub fn identity() -> Self {
        Self { f: Matrix3::identity() }
    }

    /// Rotation by `angle` about `axis` (coordinates in the `(I, J, K)` basis).
    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Result<Self> {
        let v = Vector3::from(axis);
        if v.norm() == 0.0 {
            return Err(GeomError::Config("rotation axis must be nonzero".into()));
        }
        let r = Rotation3::from_axis_angle(&Unit::new_normalize(v), angle);
        Ok(Self { f: r.into_inner() })
    }

    pub fn from_rows(rows: [[f64; 3]; 3]) -> Result<Self> {
        Self::new(Matrix3::from_fn(|r, c| rows[r][c]))
    }

    pub fn compose(&self, other: &AlgebraIso) -> AlgebraIso {
        AlgebraIso { f: self.f * other.f }
    }

    pub fn apply(&self, abc: &[f64; 3]) -> [f64; 3] {
        let v = self.f * Vector3::from(*abc);
        [v[0], v[1], v[2]]
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        (self.f - Matrix3::identity()).amax() <= tol
    }

    pub fn as_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(3, 3, |r, c| self.f[(r, c)])
    }
}

/// Rotation by `theta` about `axis`; with the `I` axis this is
/// `[[1,0,0],[0,cos θ,−sin θ],[0,sin θ,cos θ]]`.
pub fn f_theta(axis: [f64; 3], theta: f64) -> Result<AlgebraIso> {
    AlgebraIso::from_axis_angle(axis, theta)
}

/// A pair of quaternionic structures with an isomorphism between them.
#[derive(Clone, Debug, PartialEq)]
pub struct QuatStructure {
    pub dplus: Triple,
    pub dminus: Triple,
    pub f: AlgebraIso,
}

impl QuatStructure {
    pub fn new(dplus: Triple, dminus: Triple, f: AlgebraIso) -> Result<Self> {
        if dplus.dim() != dminus.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: dplus.dim(),
                found: dminus.dim(),
            });
        }
        if dplus.dim() % 4 != 0 {
            return Err(GeomError::DimensionError {
                required: "a multiple of 4".into(),
                found: dplus.dim(),
            });
        }
        for t in [&dplus, &dminus] {
            if t.defect() > 1e-10 {
                return Err(GeomError::Config(format!(
                    "triple `{}` violates the quaternion relations ({:e})",
                    t.label,
                    t.defect()
                )));
            }
        }
        Ok(Self { dplus, dminus, f })
    }

    pub fn dim(&self) -> usize {
        self.dplus.dim()
    }

    /// Quaternionic dimension `n` (the manifold has dimension `4n`).
    pub fn n(&self) -> usize {
        self.dim() / 4
    }

    /// `f(u⁻)` for `u⁻` with `D⁻`-coordinates `abc`.
    pub fn f_of(&self, abc: &[f64; 3]) -> DMatrix<f64> {
        self.dplus.combine(&self.f.apply(abc))
    }
}

/// An element of `𝒟_f`.
#[derive(Clone, Debug, PartialEq)]
pub struct GenQuatElement {
    pub abc: [f64; 3],
    pub uplus: DMatrix<f64>,
    pub uminus: DMatrix<f64>,
    /// The element on `T ⊕ T*` in the frame/coframe basis.
    pub matrix: DMatrix<f64>,
}

impl GenQuatElement {
    /// `diag(u⁺, u⁻)` in the `C⁺ ⊕ C⁻` basis.
    pub fn split_matrix(&self) -> DMatrix<f64> {
        block_diag(&self.uplus, &self.uminus)
    }

    /// `(‖u²+Id‖∞, ‖uᵀηu−η‖∞)`.
    pub fn residuals(&self) -> (f64, f64) {
        structure_residuals(&self.matrix)
    }
}

/// Change of basis from `(θ+θ*, θ−θ*)` to `(θ, θ*)`: `P = [[I, I], [I, −I]]`,
/// with `P⁻¹ = P/2`.
pub fn cplus_cminus_split(dim: usize) -> DMatrix<f64> {
    let id = DMatrix::identity(dim, dim);
    blocks2(&id, &id, &id, &(-&id))
}

/// Assemble `u ∈ 𝒟_f` from `u⁻ = aI⁻ + bJ⁻ + cK⁻` and `u⁺ = f(u⁻)`.
pub fn assemble_df(q: &QuatStructure, abc: [f64; 3]) -> GenQuatElement {
    let uminus = q.dminus.combine(&abc);
    let uplus = q.f_of(&abc);
    let sum = (&uplus + &uminus) * 0.5;
    let diff = (&uplus - &uminus) * 0.5;
    let matrix = blocks2(&sum, &diff, &diff, &sum);
    GenQuatElement {
        abc,
        uplus,
        uminus,
        matrix,
    }
}

/// Parallelism of `𝒟_f` for the Levi-Civita connection at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Prop3Report {
    /// `maxᵢ (Σₖ ‖∇ᵢ f(u⁻ₖ) − f(∇ᵢ u⁻ₖ)‖²)^{1/2}`.
    pub commute: f64,
    /// Distance of `∇ᵢ D⁺ₖ` from `D⁺` (same reduction).
    pub stab_plus: f64,
    pub stab_minus: f64,
}

impl Prop3Report {
    pub fn worst(&self) -> f64 {
        self.commute.max(self.stab_plus).max(self.stab_minus)
    }
}

/// Compare `∇f(u⁻)` with `f(∇u⁻)` along every frame direction.
pub fn prop3_residual(q: &QuatStructure, chr: &Christoffel) -> Prop3Report {
    let mut rep = Prop3Report {
        commute: 0.0,
        stab_plus: 0.0,
        stab_minus: 0.0,
    };
    let basis = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for g in &chr.gamma {
        let (mut comm, mut sp, mut sm) = (0.0, 0.0, 0.0);
        for (k, e) in basis.iter().enumerate() {
            let nabla_minus = commutator(g, &q.dminus.m[k]);
            let nabla_f = commutator(g, &q.f_of(e));
            let f_nabla = q.f_of(&q.dminus.coords(&nabla_minus));
            comm += (nabla_f - f_nabla).norm_squared();
            sm += q.dminus.off_span(&nabla_minus).powi(2);
            sp += q.dplus.off_span(&commutator(g, &q.dplus.m[k])).powi(2);
        }
        rep.commute = rep.commute.max(comm.sqrt());
        rep.stab_plus = rep.stab_plus.max(sp.sqrt());
        rep.stab_minus = rep.stab_minus.max(sm.sqrt());
    }
    rep
}

/// Closed-form `∇_{θᵢ}` of `(I⁺, J⁺, K⁺, I⁻, J⁻, K⁻)` from the
/// Christoffel symbols, in dimension 4.
pub fn lemma4_nabla(chr: &Christoffel, i: usize) -> Result<[DMatrix<f64>; 6]> {
    if chr.dim() != 4 {
        return Err(GeomError::DimensionError {
            required: "4".into(),
            found: chr.dim(),
        });
    }
    // one-based Γᵏᵢⱼ
    let g = |k: usize, j: usize| chr.get(k - 1, i, j - 1);
    let lb = LambdaBases::standard();
    let [ip, jp, kp] = &lb.plus;
    let [im, jm, km] = &lb.minus;
    Ok([
        jp * (g(4, 1) + g(3, 2)) + kp * (-g(3, 1) + g(4, 2)),
        ip * (g(2, 3) - g(4, 1)) + kp * (g(4, 3) + g(2, 1)),
        ip * (g(2, 4) + g(3, 1)) + jp * (g(3, 4) - g(2, 1)),
        jm * (-g(4, 1) + g(3, 2)) + km * (-g(3, 1) - g(4, 2)),
        im * (g(2, 3) + g(4, 1)) + km * (-g(4, 3) + g(2, 1)),
        im * (-g(2, 4) + g(3, 1)) + jm * (-g(3, 4) - g(2, 1)),
    ])
}

/// Result of adapting a frame to a generalized hypercomplex triple.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptedFrame {
    /// Orthogonal matrix whose columns are the new frame vectors.
    pub rotation: DMatrix<f64>,
    /// `max ‖X± − 𝒳±‖∞` over the six matrices in the new frame.
    pub residual: f64,
}

fn rotate_pair(o: &mut DMatrix<f64>, a: usize, b: usize, angle: f64) {
    let (c, s) = (angle.cos(), angle.sin());
    let (va, vb) = (o.column(a).into_owned(), o.column(b).into_owned());
    o.set_column(a, &(&va * c + &vb * s));
    o.set_column(b, &(&vb * c - &va * s));
}

/// Find an orthonormal frame in which `(𝓘±, 𝒥±, 𝒦±)` become the standard
/// `(I±, J±, K±)`.
///
/// `plus` and `minus` are the `C±` parts of a generalized hypercomplex
/// triple, expressed in the current frame.
pub fn adapt_frame(plus: &Triple, minus: &Triple) -> Result<AdaptedFrame> {
    if plus.dim() != 4 || minus.dim() != 4 {
        return Err(GeomError::DimensionError {
            required: "4".into(),
            found: plus.dim(),
        });
    }
    let prod = &plus.m[0] * &minus.m[0];
    let sym = (&prod + prod.transpose()) * 0.5;
    let eig = sym.clone().symmetric_eigen();
    let mut neg = Vec::new();
    let mut pos = Vec::new();
    for (k, l) in eig.eigenvalues.iter().enumerate() {
        if (l + 1.0).abs() < 1e-8 {
            neg.push(k);
        } else if (l - 1.0).abs() < 1e-8 {
            pos.push(k);
        }
    }
    if neg.len() != 2 || pos.len() != 2 || max_abs(&(&prod - &sym)) > 1e-8 {
        return Err(GeomError::DegenerateEigenspace(format!(
            "I+I- must have eigenvalues -1 and +1 with multiplicity 2, got {:?}",
            eig.eigenvalues.as_slice()
        )));
    }
    let t1 = eig.eigenvectors.column(neg[0]).normalize();
    let t2 = &plus.m[0] * &t1;
    let t3 = eig.eigenvectors.column(pos[0]).normalize();
    let t4 = &plus.m[0] * &t3;
    let mut o = DMatrix::from_columns(&[t1, t2, t3, t4]);

    // In this frame 𝒥⁺ = cos β J⁺ + sin β K⁺ and 𝒥⁻ = cos γ J⁻ + sin γ K⁻.
    // Rotating θ₁θ₂ by φ and θ₃θ₄ by ψ turns J⁺ by φ+ψ and J⁻ by φ−ψ.
    let lb = LambdaBases::standard();
    let jp = plus.in_frame(&o).m[1].clone();
    let jm = minus.in_frame(&o).m[1].clone();
    let beta = frob_inner(&lb.plus[2], &jp).atan2(frob_inner(&lb.plus[1], &jp));
    let gamma = frob_inner(&lb.minus[2], &jm).atan2(frob_inner(&lb.minus[1], &jm));
    rotate_pair(&mut o, 0, 1, 0.5 * (beta + gamma));
    rotate_pair(&mut o, 2, 3, 0.5 * (beta - gamma));

    let (p, m) = (plus.in_frame(&o), minus.in_frame(&o));
    let residual = (0..3)
        .map(|k| max_abs(&(&p.m[k] - &lb.plus[k])).max(max_abs(&(&m.m[k] - &lb.minus[k]))))
        .fold(0.0, f64::max);
    Ok(AdaptedFrame { rotation: o, residual })
}

/// The `C±` parts `(f(I⁻), f(J⁻), f(K⁻))` and `(I⁻, J⁻, K⁻)` of the
/// generalized hypercomplex triple generating `𝒟_f`.
pub fn generating_triples(q: &QuatStructure) -> (Triple, Triple) {
    let e = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let plus = Triple::new("f(D-)", e.map(|v| q.f_of(&v)));
    (plus, q.dminus.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::block;
    use nalgebra::DVector;
    use std::f64::consts::PI;

    fn twisted_structure() -> QuatStructure {
        let lb = LambdaBases::standard();
        QuatStructure::new(
            lb.plus_triple(),
            lb.plus_triple(),
            AlgebraIso::from_rows([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn i_plus_action() {
        let i = &LambdaBases::standard().plus[0];
        let col = |j: usize| i.column(j).iter().cloned().collect::<Vec<_>>();
        assert_eq!(col(0), vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(col(1), vec![-1.0, 0.0, 0.0, 0.0]);
        assert_eq!(col(2), vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(col(3), vec![0.0, 0.0, -1.0, 0.0]);
    }

    #[test]
    fn lambda_relations() {
        let lb = LambdaBases::standard();
        assert_eq!(lb.plus_triple().defect(), 0.0);
        assert_eq!(lb.minus_triple().defect(), 0.0);
        for t in [&lb.plus, &lb.minus] {
            assert_eq!(&t[1] * &t[2], t[0]);
            assert_eq!(&t[2] * &t[0], t[1]);
        }
        for p in &lb.plus {
            for m in &lb.minus {
                assert_eq!(max_abs(&commutator(p, m)), 0.0);
            }
        }
    }

    #[test]
    fn f_theta_values() {
        assert!((f_theta([1.0, 0.0, 0.0], 0.0).unwrap().f - Matrix3::identity()).amax() < 1e-15);
        let pi = f_theta([1.0, 0.0, 0.0], PI).unwrap().f;
        assert!((pi - Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, -1.0))).amax() < 1e-15);
        let half = f_theta([1.0, 0.0, 0.0], PI / 2.0).unwrap();
        // (I, J, K) ↦ (I, K, −J)
        let img = |v: [f64; 3]| half.apply(&v).map(|x| (x * 1e12).round() / 1e12);
        assert_eq!(img([1.0, 0.0, 0.0]), [1.0, 0.0, 0.0]);
        assert_eq!(img([0.0, 1.0, 0.0]), [0.0, 0.0, 1.0]);
        assert_eq!(img([0.0, 0.0, 1.0]), [0.0, -1.0, 0.0]);
    }

    #[test]
    fn reflections_rejected() {
        let r = AlgebraIso::from_rows([[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!(matches!(r, Err(GeomError::NotAlgebraIso { .. })));
    }

    #[test]
    fn twisted_torus_blocks() {
        let q = twisted_structure();
        let lb = LambdaBases::standard();
        let (i, j, k) = (&lb.plus[0], &lb.plus[1], &lb.plus[2]);
        let z = DMatrix::zeros(4, 4);
        let at_i = assemble_df(&q, [1.0, 0.0, 0.0]);
        assert_eq!(at_i.matrix, blocks2(i, &z, &z, i));
        // the displayed family [[aI, bJ+cK],[bJ+cK, aI]] at (a, −b, −c)
        let (a, b, c) = (0.3, -0.4, 0.5);
        let u = assemble_df(&q, [a, b, c]);
        let off = j * (-b) + k * (-c);
        assert!(max_abs(&(u.matrix - blocks2(&(i * a), &off, &off, &(i * a)))) < 1e-15);
        let at_j = assemble_df(&q, [0.0, 1.0, 0.0]);
        assert_eq!(block(&at_j.matrix, 0, 0), z);
        assert_eq!(block(&at_j.matrix, 1, 1), z);
    }

    #[test]
    fn split_conjugation() {
        let p = cplus_cminus_split(4);
        let lb = LambdaBases::standard();
        let (up, um) = (&lb.plus[1], &lb.minus[2]);
        let g = &p * block_diag(up, um) * (&p * 0.5);
        assert_eq!(block(&g, 0, 0), (up + um) * 0.5);
        let big_g = blocks2(
            &DMatrix::zeros(4, 4),
            &DMatrix::identity(4, 4),
            &DMatrix::identity(4, 4),
            &DMatrix::zeros(4, 4),
        );
        let d = &p * 0.5 * &big_g * &p;
        assert_eq!(d, block_diag(&DMatrix::identity(4, 4), &(-DMatrix::identity(4, 4))));
    }

    #[test]
    fn identity_f_collapses_to_classical() {
        let lb = LambdaBases::standard();
        let q = QuatStructure::new(lb.plus_triple(), lb.plus_triple(), AlgebraIso::identity()).unwrap();
        let u = assemble_df(&q, [0.6, 0.0, 0.8]);
        let z = DMatrix::zeros(4, 4);
        assert!(max_abs(&(u.matrix.clone() - blocks2(&u.uminus, &z, &z, &u.uminus))) < 1e-15);
        let (sq, orth) = u.residuals();
        assert!(sq < 1e-12 && orth < 1e-12);
    }

    #[test]
    fn adapt_frame_round_trip() {
        let lb = LambdaBases::standard();
        let q = QuatStructure::new(
            lb.plus_triple(),
            lb.minus_triple(),
            f_theta([0.3, -1.0, 0.5], 1.1).unwrap(),
        )
        .unwrap();
        let (plus, minus) = generating_triples(&q);
        let a = adapt_frame(&plus, &minus).unwrap();
        assert!(a.residual < 1e-9, "{}", a.residual);
        let o = &a.rotation;
        assert!(max_abs(&(o.transpose() * o - DMatrix::identity(4, 4))) < 1e-12);
    }

    #[test]
    fn adapt_frame_needs_mixed_types() {
        let q = twisted_structure();
        let (plus, minus) = generating_triples(&q);
        assert!(matches!(adapt_frame(&plus, &minus), Err(GeomError::DegenerateEigenspace(_))));
    }

    #[test]
    fn flat_prop3_vanishes() {
        let chr = Christoffel {
            gamma: vec![DMatrix::zeros(4, 4); 4],
            c: vec![vec![DVector::zeros(4); 4]; 4],
        };
        assert_eq!(prop3_residual(&twisted_structure(), &chr).worst(), 0.0);
    }
}
