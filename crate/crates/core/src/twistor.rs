//! Integrability of the twistor structure: the obstruction tensors
//! `G₁, G₂, G₃`, the `(1,0)`-curvature residual, twistor types and the
//! verdict classifier.

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::connection::{bivector, CurvatureOperator, Dim4Blocks};
use crate::error::{GeomError, Result};
use crate::genlin::gacs_type;
use crate::linalg::{block_diag, commutator, frob};
use crate::quaternion::{AlgebraIso, GenQuatElement};

/// Residuals at or below this value vanish.
pub const VANISH: f64 = 1e-4;
/// Residuals at or above this value are nonzero.
pub const NONZERO: f64 = 1e-2;

/// `[u, R(X∧Y − uX∧vY) + u R(uX∧Y + X∧vY)]`.
fn obstruction(
    r: &CurvatureOperator,
    u: &DMatrix<f64>,
    v: &DMatrix<f64>,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> DMatrix<f64> {
    let (ux, vy) = (u * x, v * y);
    let first = r.apply_skew(&(bivector(x, y) - bivector(&ux, &vy)));
    let second = r.apply_skew(&(bivector(&ux, y) + bivector(x, &vy)));
    commutator(u, &(first + u * second))
}

/// `(G₁(X,Y,u⁺), G₂(X,Y,u⁺), G₃(X,Y,u⁻))`.
pub fn g_tensors(
    r: &CurvatureOperator,
    uplus: &DMatrix<f64>,
    uminus: &DMatrix<f64>,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> [DMatrix<f64>; 3] {
    [
        obstruction(r, uplus, uplus, x, y),
        obstruction(r, uplus, uminus, x, y),
        obstruction(r, uminus, uminus, x, y),
    ]
}

/// `ℛ(𝒳,𝒴) = diag(R(→𝒳,→𝒴), R(→𝒳,→𝒴))` for `C±` coordinate vectors.
fn gen_curvature(r: &CurvatureOperator, x: &DVector<f64>, y: &DVector<f64>) -> DMatrix<f64> {
    let d = x.len() / 2;
    let vx = x.rows(0, d) + x.rows(d, d);
    let vy = y.rows(0, d) + y.rows(d, d);
    let m = r.apply_bivector(&vx, &vy);
    block_diag(&m, &m)
}

/// The generalized obstruction
/// `[u, ℛ(𝒳∧𝒴 − u𝒳∧u𝒴) + uℛ(u𝒳∧𝒴 + 𝒳∧u𝒴)]` in the `C⁺ ⊕ C⁻` basis.
///
/// `x`, `y` are `C±` coordinates of length `2·dim`.
pub fn theorem1_tensor(
    r: &CurvatureOperator,
    u: &GenQuatElement,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> DMatrix<f64> {
    let um = u.split_matrix();
    let (ux, uy) = (&um * x, &um * y);
    let a = gen_curvature(r, x, y) - gen_curvature(r, &ux, &uy);
    let b = gen_curvature(r, &ux, y) + gen_curvature(r, x, &uy);
    commutator(&um, &(a + &um * b))
}

fn complexify(m: &DMatrix<f64>, im: &DMatrix<f64>) -> DMatrix<Complex<f64>> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| Complex::new(m[(r, c)], im[(r, c)]))
}

/// Norm over all `𝒵` of the `(0,1)` part of `8ℛ(𝒳^{1,0}, 𝒴^{1,0})𝒵^{1,0}`,
/// with `𝒳^{1,0} = (𝒳 − iu𝒳)/2`.
pub fn theorem1bis_residual(
    r: &CurvatureOperator,
    u: &GenQuatElement,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> f64 {
    let um = u.split_matrix();
    let n = um.nrows();
    // 𝒳^{1,0} = a + ib, 𝒴^{1,0} = c + id
    let (a, b) = (x * 0.5, (&um * x) * -0.5);
    let (c, d) = (y * 0.5, (&um * y) * -0.5);
    let re = gen_curvature(r, &a, &c) - gen_curvature(r, &b, &d);
    let im = gen_curvature(r, &a, &d) + gen_curvature(r, &b, &c);
    let curv = complexify(&re, &im);
    let id = DMatrix::<f64>::identity(n, n);
    let to10 = complexify(&(&id * 0.5), &(&um * -0.5));
    let to01 = complexify(&(&id * 0.5), &(&um * 0.5));
    let l = to01 * curv * to10 * Complex::new(8.0, 0.0);
    l.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Type of the twistor structure at `(m, u)`: the type of `u` plus one.
pub fn twistor_type(u: &GenQuatElement) -> Result<usize> {
    Ok(gacs_type(&u.matrix)?.ty + 1)
}

/// The six poles `±e₁, ±e₂, ±e₃` followed by a Fibonacci lattice of `count`
/// points on the unit sphere.
pub fn sphere_samples(count: usize) -> Vec<[f64; 3]> {
    let mut out = vec![
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ];
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    for k in 0..count {
        let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
        let rho = (1.0 - z * z).sqrt();
        let phi = golden * k as f64;
        out.push([rho * phi.cos(), rho * phi.sin(), z]);
    }
    out
}

/// All frame pairs `(θᵢ, θⱼ)`, `i < j`, as vectors.
pub fn frame_pairs(dim: usize) -> Vec<(DVector<f64>, DVector<f64>)> {
    let e = |i: usize| DVector::from_fn(dim, |k, _| if k == i { 1.0 } else { 0.0 });
    (0..dim)
        .flat_map(|i| (i + 1..dim).map(move |j| (i, j)))
        .map(|(i, j)| (e(i), e(j)))
        .collect()
}

/// `count` pairs of random unit vectors.
pub fn random_pairs<R: Rng>(dim: usize, count: usize, rng: &mut R) -> Vec<(DVector<f64>, DVector<f64>)> {
    let mut unit = || {
        let v = DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0));
        v.normalize()
    };
    (0..count).map(|_| (unit(), unit())).collect()
}

/// How `D⁺` and `D⁻` sit in `Λ²` (dimension 4) or whether `n > 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Layout {
    /// `D⁺ = D⁻ = Λ⁺`.
    SameSelfDual,
    /// `D⁺ = D⁻ = Λ⁻`.
    SameAntiSelfDual,
    /// `D⁺ = Λ⁺`, `D⁻ = Λ⁻`.
    PlusMinus,
    /// `D⁺ = Λ⁻`, `D⁻ = Λ⁺`.
    MinusPlus,
    /// Dimension `4n` with `n > 1`.
    HigherDim,
}

/// Consistency diagnostics for curvature against `f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prop567 {
    pub f_is_identity: bool,
    pub s: f64,
    /// `f = Id` or `s = 0`.
    pub identity_or_flat: bool,
    /// `‖B − (s/12)F‖`, when `D± = Λ±`.
    pub prop7_residual: Option<f64>,
    pub b_norm: Option<f64>,
}

pub fn prop567_checks(blocks: Option<&Dim4Blocks>, s: f64, f: &AlgebraIso, layout: Layout) -> Prop567 {
    let f_is_identity = f.is_identity(1e-10);
    let s_vanishes = s.abs() <= VANISH;
    let prop7 = match (blocks, layout) {
        (Some(b), Layout::PlusMinus) => Some(frob(&(&b.b - f.as_dmatrix() * (b.s / 12.0)))),
        _ => None,
    };
    Prop567 {
        f_is_identity,
        s,
        identity_or_flat: f_is_identity || s_vanishes,
        prop7_residual: prop7,
        b_norm: blocks.map(|b| b.b_norm()),
    }
}

/// Whether a residual vanishes (`Ok(true)`), is nonzero (`Ok(false)`), or
/// falls between the thresholds.
pub fn classify_residual(quantity: &str, value: f64) -> Result<bool> {
    if value <= VANISH {
        Ok(true)
    } else if value >= NONZERO {
        Ok(false)
    } else {
        Err(GeomError::InconclusiveThresholds {
            quantity: quantity.into(),
            value,
            vanish: VANISH,
            nonzero: NONZERO,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// `D⁺ = D⁻ = Λ⁺` and `R|Λ⁺ = 0`.
    Thm3a,
    /// `D⁺ = D⁻ = Λ⁺`, `f = Id` and `W⁺ = 0`.
    Thm3b,
    /// `D± = Λ±` and `W± = 0`.
    Thm4,
    /// `n > 1`.
    Thm2,
    NonIntegrable,
    /// `𝒟_f` is not parallel; no theorem applies.
    NonApplicable,
    Inconclusive,
}

/// Inputs of the classifier, all measured maxima over the samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyInput {
    pub n: usize,
    pub layout: Layout,
    pub prop3: f64,
    pub g_max: f64,
    pub f_is_identity: bool,
    /// `‖R|Λ⁺‖` and `‖R|Λ⁻‖` (dimension 4 only).
    pub r_plus: Option<f64>,
    pub r_minus: Option<f64>,
    pub w_plus: Option<f64>,
    pub w_minus: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub classification: Classification,
    pub predicted_integrable: Option<bool>,
    pub measured_integrable: Option<bool>,
    pub agree: bool,
    pub g_max: f64,
    pub note: String,
}

fn need(q: &str, v: Option<f64>) -> Result<bool> {
    match v {
        Some(v) => classify_residual(q, v),
        None => Err(GeomError::Config(format!("{q} is required for this layout"))),
    }
}

fn predict(input: &ClassifyInput) -> Result<(Classification, Option<bool>)> {
    if !classify_residual("prop3", input.prop3)? {
        return Ok((Classification::NonApplicable, None));
    }
    if input.n > 1 {
        return Ok((Classification::Thm2, Some(true)));
    }
    let (r_same, w_same) = match input.layout {
        Layout::SameSelfDual => (input.r_plus, input.w_plus),
        Layout::SameAntiSelfDual => (input.r_minus, input.w_minus),
        Layout::PlusMinus | Layout::MinusPlus => {
            let lcf = need("W+", input.w_plus)? & need("W-", input.w_minus)?;
            return Ok(if lcf {
                (Classification::Thm4, Some(true))
            } else {
                (Classification::NonIntegrable, Some(false))
            });
        }
        Layout::HigherDim => {
            return Err(GeomError::Config("higher-dimensional layout with n = 1".into()));
        }
    };
    if need("R restricted to D", r_same)? {
        return Ok((Classification::Thm3a, Some(true)));
    }
    if input.f_is_identity && need("W on D", w_same)? {
        return Ok((Classification::Thm3b, Some(true)));
    }
    Ok((Classification::NonIntegrable, Some(false)))
}

/// Match the measured residuals against the theorem hypotheses.
pub fn classify(input: &ClassifyInput) -> Verdict {
    let measured = classify_residual("max G", input.g_max);
    let (classification, predicted, note) = match predict(input) {
        Ok((c, p)) => (c, p, String::new()),
        Err(e) => (Classification::Inconclusive, None, e.to_string()),
    };
    let (measured, note) = match measured {
        Ok(m) => (Some(m), note),
        Err(e) if note.is_empty() => (None, e.to_string()),
        Err(_) => (None, note),
    };
    let classification = match (classification, measured) {
        (Classification::NonApplicable, _) => Classification::NonApplicable,
        (_, None) => Classification::Inconclusive,
        (c, _) => c,
    };
    let agree = match (predicted, measured) {
        (Some(p), Some(m)) => p == m,
        _ => classification == Classification::NonApplicable,
    };
    Verdict {
        classification,
        predicted_integrable: predicted,
        measured_integrable: measured,
        agree,
        g_max: input.g_max,
        note,
    }
}
