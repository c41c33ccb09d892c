//! Levi-Civita connection of an orthonormal frame, covariant derivatives of
//! endomorphism fields, curvature on `Λ²` and the 4-dimensional blocks.
//!
//! Curvature sign: `R(X,Y) = [∇_Y, ∇_X] + ∇_{[X,Y]}`, the negative of the
//! usual `∇_X∇_Y − ∇_Y∇_X − ∇_{[X,Y]}`. With this sign the `Λ²` operator of the
//! unit round sphere is `+Id`.

use nalgebra::{DMatrix, DVector};

use crate::chartfield::{partial, FrameField, MatrixField, DEFAULT_STEP};
use crate::error::{GeomError, Result};
use crate::genlin::TangentConnection;
use crate::linalg::{commutator, frob, frob_inner, max_abs};
use crate::quaternion::LambdaBases;

/// Christoffel symbols and structure constants of a frame at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel {
    /// `gamma[i][(k, j)] = Γᵏᵢⱼ`, i.e. `∇_{θᵢ} θⱼ = Σₖ Γᵏᵢⱼ θₖ`.
    pub gamma: Vec<DMatrix<f64>>,
    /// `c[i][j][k] = cᵏᵢⱼ` with `[θᵢ, θⱼ] = Σₖ cᵏᵢⱼ θₖ`.
    pub c: Vec<Vec<DVector<f64>>>,
}

impl Christoffel {
    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    /// `Γᵏᵢⱼ`.
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.gamma[i][(k, j)]
    }

    /// `max |Γᵏᵢⱼ + Γʲᵢₖ|`.
    pub fn metric_defect(&self) -> f64 {
        self.gamma
            .iter()
            .map(|g| max_abs(&(g + g.transpose())))
            .fold(0.0, f64::max)
    }

    /// `max |∇_{θᵢ}θⱼ − ∇_{θⱼ}θᵢ − [θᵢ,θⱼ]|`.
    pub fn torsion_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in 0..d {
                let t = self.gamma[i].column(j) - self.gamma[j].column(i) - &self.c[i][j];
                worst = worst.max(t.amax());
            }
        }
        worst
    }
}

/// Frame components of all brackets `[θᵢ, θⱼ]` at `p`.
pub fn structure_constants(frame: &FrameField, p: &[f64], h: f64) -> Result<Vec<Vec<DVector<f64>>>> {
    frame.chart.check(p, 2.0 * h)?;
    let (m, minv) = frame.eval_with_inverse(p)?;
    let d = frame.dim();
    let dm = frame.derivatives(p, h);
    // along[i] has column j equal to θᵢ applied to the coordinate components of θⱼ
    let along: Vec<DMatrix<f64>> = (0..d)
        .map(|i| {
            let mut acc = DMatrix::zeros(d, d);
            for (a, da) in dm.iter().enumerate() {
                acc += da * m[(a, i)];
            }
            acc
        })
        .collect();
    Ok((0..d)
        .map(|i| {
            (0..d)
                .map(|j| &minv * (along[i].column(j) - along[j].column(i)))
                .collect()
        })
        .collect())
}

/// Koszul formula in an orthonormal frame:
/// `Γᵏᵢⱼ = ½(cᵏᵢⱼ − cⁱⱼₖ + cʲₖᵢ)`.
pub fn christoffel(frame: &FrameField, p: &[f64], h: f64) -> Result<Christoffel> {
    let c = structure_constants(frame, p, h)?;
    let d = frame.dim();
    let gamma = (0..d)
        .map(|i| DMatrix::from_fn(d, d, |k, j| 0.5 * (c[i][j][k] - c[j][k][i] + c[k][i][j])))
        .collect();
    Ok(Christoffel { gamma, c })
}

/// Directional derivative `θᵢ(ψ)` of a matrix field.
pub fn directional(frame: &FrameField, psi: &MatrixField, i: usize, p: &[f64], h: f64) -> DMatrix<f64> {
    let m = frame.eval_raw(p);
    let n = psi.eval_raw(p).nrows();
    let mut out = DMatrix::zeros(n, n);
    for a in 0..frame.dim() {
        let w = m[(a, i)];
        if w != 0.0 {
            out += partial(|q| psi.eval_raw(q), p, a, h) * w;
        }
    }
    out
}

/// `∇_{θᵢ} ψ = θᵢ(ψ) + [Γᵢ, ψ]` for an endomorphism field in the frame basis.
pub fn nabla_endo(
    frame: &FrameField,
    chr: &Christoffel,
    psi: &MatrixField,
    i: usize,
    p: &[f64],
    h: f64,
) -> Result<DMatrix<f64>> {
    frame.chart.check(p, h)?;
    Ok(directional(frame, psi, i, p, h) + commutator(&chr.gamma[i], &psi.eval_raw(p)))
}

/// Skew endomorphism of `X ∧ Y`: `Z ↦ g(X,Z)Y − g(Y,Z)X`.
pub fn bivector(x: &DVector<f64>, y: &DVector<f64>) -> DMatrix<f64> {
    y * x.transpose() - x * y.transpose()
}

/// The curvature at a point, in the frame basis.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureOperator {
    /// `r[i][j] = R(θᵢ, θⱼ)`.
    pub r: Vec<Vec<DMatrix<f64>>>,
}

impl CurvatureOperator {
    pub fn dim(&self) -> usize {
        self.r.len()
    }

    pub fn r(&self, i: usize, j: usize) -> &DMatrix<f64> {
        &self.r[i][j]
    }

    /// `R(u) = Σ_{c<d} u[(d, c)] R(θ_c, θ_d)` for a skew endomorphism `u`.
    pub fn apply_skew(&self, u: &DMatrix<f64>) -> DMatrix<f64> {
        let d = self.dim();
        let mut out = DMatrix::zeros(d, d);
        for c in 0..d {
            for e in c + 1..d {
                let w = u[(e, c)];
                if w != 0.0 {
                    out += &self.r[c][e] * w;
                }
            }
        }
        out
    }

    /// `R(X ∧ Y)`.
    pub fn apply_bivector(&self, x: &DVector<f64>, y: &DVector<f64>) -> DMatrix<f64> {
        self.apply_skew(&bivector(x, y))
    }

    /// Pairs `(a, b)`, `a < b`, ordering the `Λ²` basis `θₐ ∧ θ_b`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let d = self.dim();
        (0..d).flat_map(|a| (a + 1..d).map(move |b| (a, b))).collect()
    }

    /// `Op[(ab),(cd)] = g(R(θ_c,θ_d)θₐ, θ_b)`.
    pub fn lambda2_matrix(&self) -> DMatrix<f64> {
        let pairs = self.pairs();
        let n = pairs.len();
        DMatrix::from_fn(n, n, |r, c| {
            let (a, b) = pairs[r];
            let (cc, dd) = pairs[c];
            self.r[cc][dd][(b, a)]
        })
    }

    /// Scalar curvature `s = 2 tr(Op)`.
    pub fn scalar_curvature(&self) -> f64 {
        2.0 * self.lambda2_matrix().trace()
    }

    /// Ricci tensor `Ric(θₐ, θ_b) = Σ_c g(R(θ_c, θₐ)θ_b, θ_c)` up to the sign
    /// fixed so that the unit sphere has positive Ricci.
    pub fn ricci(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |a, b| (0..d).map(|c| self.r[c][a][(b, c)]).sum::<f64>())
    }

    pub fn symmetry_defect(&self) -> f64 {
        let m = self.lambda2_matrix();
        max_abs(&(&m - m.transpose()))
    }

    pub fn skew_defect(&self) -> f64 {
        self.r
            .iter()
            .flatten()
            .map(|m| max_abs(&(m + m.transpose())))
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.r.iter().flatten().map(max_abs).fold(0.0, f64::max)
    }
}

/// Curvature at `p` by central differences of Christoffel symbols, which
/// are themselves taken with step `min(h, DEFAULT_STEP)`.
pub fn curvature(frame: &FrameField, p: &[f64], h: f64) -> Result<CurvatureOperator> {
    frame.chart.check(p, 3.0 * h)?;
    let d = frame.dim();
    let inner = DEFAULT_STEP.min(h);
    let chr = christoffel(frame, p, inner)?;
    let m = frame.eval_raw(p);
    let mut dgam: Vec<Vec<DMatrix<f64>>> = Vec::with_capacity(d);
    let mut q = p.to_vec();
    for a in 0..d {
        q[a] = p[a] + h;
        let plus = christoffel(frame, &q, inner)?;
        q[a] = p[a] - h;
        let minus = christoffel(frame, &q, inner)?;
        q[a] = p[a];
        dgam.push(
            plus.gamma
                .iter()
                .zip(&minus.gamma)
                .map(|(x, y)| (x - y) * (0.5 / h))
                .collect(),
        );
    }
    // theta_gamma[i][j] = θᵢ(Γⱼ)
    let theta_gamma = |i: usize, j: usize| {
        let mut acc = DMatrix::zeros(d, d);
        for (a, row) in dgam.iter().enumerate() {
            acc += &row[j] * m[(a, i)];
        }
        acc
    };
    let mut r = vec![vec![DMatrix::zeros(d, d); d]; d];
    for i in 0..d {
        for j in i + 1..d {
            let mut std = theta_gamma(i, j) - theta_gamma(j, i) + commutator(&chr.gamma[i], &chr.gamma[j]);
            for k in 0..d {
                std -= &chr.gamma[k] * chr.c[i][j][k];
            }
            r[j][i] = std.clone();
            r[i][j] = -std;
        }
    }
    Ok(CurvatureOperator { r })
}

/// Blocks of the `Λ² = Λ⁺ ⊕ Λ⁻` curvature operator in dimension 4:
/// `[[W⁺ + s/12, B], [B*, W⁻ + s/12]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dim4Blocks {
    pub w_plus: DMatrix<f64>,
    pub w_minus: DMatrix<f64>,
    pub s: f64,
    /// Maps `Λ⁻` coordinates to `Λ⁺` coordinates.
    pub b: DMatrix<f64>,
    pub b_star: DMatrix<f64>,
}

impl Dim4Blocks {
    pub fn reassemble(&self) -> DMatrix<f64> {
        let id = DMatrix::identity(3, 3) * (self.s / 12.0);
        crate::linalg::blocks2(&(&self.w_plus + &id), &self.b, &self.b_star, &(&self.w_minus + &id))
    }

    pub fn w_plus_norm(&self) -> f64 {
        frob(&self.w_plus)
    }

    pub fn w_minus_norm(&self) -> f64 {
        frob(&self.w_minus)
    }

    pub fn b_norm(&self) -> f64 {
        frob(&self.b)
    }
}

/// The `Λ²` operator in the orthonormal basis `{I±, J±, K±}/√2`.
pub fn lambda2_in_bases(r: &CurvatureOperator, bases: &LambdaBases) -> DMatrix<f64> {
    let unit: Vec<DMatrix<f64>> = bases
        .all()
        .iter()
        .map(|m| *m * std::f64::consts::FRAC_1_SQRT_2)
        .collect();
    DMatrix::from_fn(6, 6, |a, b| 0.5 * frob_inner(&unit[a], &r.apply_skew(&unit[b])))
}

pub fn blocks_dim4(r: &CurvatureOperator, bases: &LambdaBases) -> Result<Dim4Blocks> {
    if r.dim() != 4 {
        return Err(GeomError::DimensionError {
            required: "4".into(),
            found: r.dim(),
        });
    }
    let op = lambda2_in_bases(r, bases);
    let a = op.view((0, 0), (3, 3)).into_owned();
    let b = op.view((0, 3), (3, 3)).into_owned();
    let bs = op.view((3, 0), (3, 3)).into_owned();
    let dm = op.view((3, 3), (3, 3)).into_owned();
    let s = 2.0 * op.trace();
    let id = DMatrix::identity(3, 3) * (s / 12.0);
    Ok(Dim4Blocks {
        w_plus: a - &id,
        w_minus: dm - &id,
        s,
        b,
        b_star: bs,
    })
}

/// `‖[I, R(X,Y)] + c g(KX,Y) J − c g(JX,Y) K‖`, `c = s / (2n(n+2))`.
pub fn lemma1_residual(
    r: &CurvatureOperator,
    triple: [&DMatrix<f64>; 3],
    s: f64,
    n: usize,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> f64 {
    let [i, j, k] = triple;
    let c = s / (2.0 * (n * (n + 2)) as f64);
    let rxy = r.apply_bivector(x, y);
    let gk = y.dot(&(k * x));
    let gj = y.dot(&(j * x));
    frob(&(commutator(i, &rxy) + j * (c * gk) - k * (c * gj)))
}

/// Levi-Civita connection of a frame.
#[derive(Clone, Debug)]
pub struct LeviCivita {
    pub frame: FrameField,
}

impl LeviCivita {
    pub fn new(frame: FrameField) -> Self {
        Self { frame }
    }
}

impl TangentConnection for LeviCivita {
    fn frame(&self) -> &FrameField {
        &self.frame
    }

    fn connection_matrices(&self, p: &[f64], h: f64) -> Result<Vec<DMatrix<f64>>> {
        Ok(christoffel(&self.frame, p, h)?.gamma)
    }
}

/// Levi-Civita plus a constant tensor, `∇′_{θᵢ}θⱼ = ∇_{θᵢ}θⱼ + Σₖ Aᵏᵢⱼ θₖ`.
#[derive(Clone, Debug)]
pub struct PerturbedConnection {
    pub base: LeviCivita,
    /// `extra[i][(k, j)] = Aᵏᵢⱼ`.
    pub extra: Vec<DMatrix<f64>>,
}

impl PerturbedConnection {
    /// The cross-product perturbation `∇′_X Y = ∇_X Y + ε X × Y` on the
    /// first three frame directions.
    pub fn cross_product(frame: FrameField, eps: f64) -> Self {
        let d = frame.dim();
        let mut extra = vec![DMatrix::zeros(d, d); d];
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            extra[i][(k, j)] = eps;
            extra[j][(k, i)] = -eps;
        }
        Self {
            base: LeviCivita::new(frame),
            extra,
        }
    }
}

impl TangentConnection for PerturbedConnection {
    fn frame(&self) -> &FrameField {
        &self.base.frame
    }

    fn connection_matrices(&self, p: &[f64], h: f64) -> Result<Vec<DMatrix<f64>>> {
        let g = self.base.connection_matrices(p, h)?;
        Ok(g.iter().zip(&self.extra).map(|(a, b)| a + b).collect())
    }
}
