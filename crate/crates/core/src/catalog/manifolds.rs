//! Concrete charts and orthonormal frames.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chartfield::{Chart, FrameField, FrameMetric, MatrixField, ScalarField};
use crate::error::{GeomError, Result};
use crate::genlin::{b_transform, Gacs};
use crate::quaternion::{LambdaBases, Triple};

/// Flat torus `[0,1]^dim` with the coordinate frame.
pub fn make_flat_torus(dim: usize) -> Result<FrameField> {
    if dim != 4 && dim != 8 {
        return Err(GeomError::DimensionError {
            required: "4 or 8".into(),
            found: dim,
        });
    }
    Ok(FrameField::coordinate(Chart::cube(format!("T{dim}"), dim, 0.0, 1.0)))
}

/// An affine map `x ↦ Ax + b` of the real coordinates `(x₁, y₁, x₂, y₂)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Affine {
    pub label: String,
    pub linear: DMatrix<f64>,
    pub shift: DVector<f64>,
}

impl Affine {
    /// `(z₁, z₂) ↦ (z₁ + t, λz₂ + e)` with complex `t = (t.0, t.1)`,
    /// `λ = e^{iα}` and `e = (e.0, e.1)`.
    fn complex(label: &str, t: (f64, f64), alpha: f64, e: (f64, f64)) -> Self {
        let (c, s) = (alpha.cos(), alpha.sin());
        #[rustfmt::skip]
        let linear = DMatrix::from_row_slice(4, 4, &[
            1.0, 0.0, 0.0, 0.0,
            0.0, 1.0, 0.0, 0.0,
            0.0, 0.0, c, -s,
            0.0, 0.0, s, c,
        ]);
        Self {
            label: label.into(),
            linear,
            shift: DVector::from_vec(vec![t.0, t.1, e.0, e.1]),
        }
    }

    pub fn apply(&self, p: &[f64]) -> Vec<f64> {
        (&self.linear * DVector::from_column_slice(p) + &self.shift)
            .iter()
            .cloned()
            .collect()
    }
}

/// A hyperelliptic surface model: the flat chart with its rotating frame and
/// the deck generators of the quotient.
#[derive(Clone, Debug)]
pub struct Hyperelliptic {
    pub kind: u32,
    pub frame: FrameField,
    pub generators: Vec<Affine>,
    /// Lattice of the second torus, as a label.
    pub lattice: &'static str,
}

/// `θ₁ = R_{2πx₁}(e₃)`, `θ₂ = R_{2πx₁}(e₄)`, `θ₃ = e₁`, `θ₄ = e₂` on
/// coordinates `(x₁, y₁, x₂, y₂)`.
pub fn hyperelliptic_frame() -> FrameField {
    FrameField::new(
        Chart::cube("hyperelliptic", 4, 0.0, 1.0),
        MatrixField::new(|p| {
            let (c, s) = ((2.0 * PI * p[0]).cos(), (2.0 * PI * p[0]).sin());
            #[rustfmt::skip]
            let m = DMatrix::from_row_slice(4, 4, &[
                0.0, 0.0, 1.0, 0.0,
                0.0, 0.0, 0.0, 1.0,
                c, -s, 0.0, 0.0,
                s, c, 0.0, 0.0,
            ]);
            m
        }),
        FrameMetric::EuclideanOrthonormal,
    )
}

pub fn make_hyperelliptic(kind: u32) -> Result<Hyperelliptic> {
    let third = 2.0 * PI / 3.0;
    let sq3 = 3f64.sqrt();
    let (g1, g2, lattice) = match kind {
        1 => (Affine::complex("g1", (0.5, 0.0), PI, (0.0, 0.0)), None, "Z+iZ"),
        2 => (
            Affine::complex("g1", (0.5, 0.0), PI, (0.0, 0.0)),
            Some(Affine::complex("g2", (0.0, 0.5), 0.0, (0.5, 0.0))),
            "Z+iZ",
        ),
        3 => (Affine::complex("g1", (1.0 / 3.0, 0.0), third, (0.0, 0.0)), None, "Z+jZ"),
        4 => (
            Affine::complex("g1", (1.0 / 3.0, 0.0), third, (0.0, 0.0)),
            // e₁ = (1 − j)/3 is fixed by multiplication by j modulo Z + jZ
            Some(Affine::complex("g2", (0.0, 1.0 / 3.0), 0.0, (0.5, -sq3 / 6.0))),
            "Z+jZ",
        ),
        5 => (Affine::complex("g1", (0.25, 0.0), PI / 2.0, (0.0, 0.0)), None, "Z+iZ"),
        6 => (
            Affine::complex("g1", (0.25, 0.0), PI / 2.0, (0.0, 0.0)),
            Some(Affine::complex("g2", (0.0, 0.5), 0.0, (0.5, 0.5))),
            "Z+iZ",
        ),
        7 => (Affine::complex("g1", (-1.0 / 6.0, 0.0), -PI / 3.0, (0.0, 0.0)), None, "Z+jZ"),
        other => return Err(GeomError::BadType(other)),
    };
    let mut generators = vec![g1];
    generators.extend(g2);
    Ok(Hyperelliptic {
        kind,
        frame: hyperelliptic_frame(),
        generators,
        lattice,
    })
}

/// `max |θᵢ(g·x) − dg θᵢ(x)|` over generators and points.
pub fn deck_equivariance(h: &Hyperelliptic, points: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0_f64;
    for g in &h.generators {
        for p in points {
            let moved = h.frame.eval_raw(&g.apply(p));
            let pushed = &g.linear * h.frame.eval_raw(p);
            worst = worst.max((moved - pushed).amax());
        }
    }
    worst
}

/// Hyperspherical point `q(χ, ϑ, φ)` of the unit 3-sphere and its partials.
fn s3_point(p: &[f64]) -> ([f64; 4], [[f64; 4]; 3]) {
    let (chi, th, ph) = (p[0], p[1], p[2]);
    let (sc, cc) = chi.sin_cos();
    let (st, ct) = th.sin_cos();
    let (sp, cp) = ph.sin_cos();
    let q = [cc, sc * ct, sc * st * cp, sc * st * sp];
    let d_chi = [-sc, cc * ct, cc * st * cp, cc * st * sp];
    let d_th = [0.0, -sc * st, sc * ct * cp, sc * ct * sp];
    let d_ph = [0.0, 0.0, -sc * st * sp, sc * st * cp];
    (q, [d_chi, d_th, d_ph])
}

/// Quaternion product `a·b` with components `(w, x, y, z)`.
fn qmul(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

/// `S³ × S¹` (sign +1) or `H³ × S¹` (sign −1), unit curvature, with the flat
/// circle direction as `θ₄`.
///
/// On `S³` the frame is left-invariant, `θₖ = q·eₖ`, so `[θᵢ, θⱼ] = 2εᵢⱼₖθₖ`.
/// On `H³` (upper half space) it is `z∂ₓ, z∂ᵧ, z∂_z`.
pub fn make_s1_x_space_form(sign: i32) -> Result<FrameField> {
    match sign {
        1 => {
            let lo = 0.4;
            let hi = PI - 0.4;
            let chart = Chart::new("S3xS1", vec![(lo, hi), (lo, hi), (0.0, 2.0 * PI), (0.0, 1.0)])?;
            Ok(FrameField::new(
                chart,
                MatrixField::new(|p| {
                    let (q, d) = s3_point(p);
                    let mut m = DMatrix::zeros(4, 4);
                    for (k, e) in [[0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]]
                        .into_iter()
                        .enumerate()
                    {
                        let v = qmul(q, e);
                        for (a, da) in d.iter().enumerate() {
                            let n2: f64 = da.iter().map(|x| x * x).sum();
                            let dot: f64 = da.iter().zip(&v).map(|(x, y)| x * y).sum();
                            m[(a, k)] = dot / n2;
                        }
                    }
                    m[(3, 3)] = 1.0;
                    m
                }),
                FrameMetric::Declared,
            ))
        }
        -1 => {
            let chart = Chart::new("H3xS1", vec![(-1.0, 1.0), (-1.0, 1.0), (0.5, 2.0), (0.0, 1.0)])?;
            Ok(FrameField::new(
                chart,
                MatrixField::new(|p| {
                    let z = p[2];
                    DMatrix::from_diagonal(&DVector::from_vec(vec![z, z, z, 1.0]))
                }),
                FrameMetric::Declared,
            ))
        }
        other => Err(GeomError::Config(format!("curvature sign must be +1 or -1, got {other}"))),
    }
}

/// Conformally flat metric `λ²δ` with frame `θᵢ = λ⁻¹∂ᵢ`.
///
/// `λ` is checked for positivity at the chart corners and 64 interior points.
pub fn make_conformally_flat(chart: Chart, factor: ScalarField) -> Result<FrameField> {
    let mut probes = chart.halton_points(64, 0.0);
    let dim = chart.dim;
    for mask in 0..(1usize << dim) {
        probes.push(
            (0..dim)
                .map(|k| if mask >> k & 1 == 1 { chart.bounds[k].1 } else { chart.bounds[k].0 })
                .collect(),
        );
    }
    let min = probes
        .iter()
        .map(|p| factor.eval_raw(p))
        .fold(f64::INFINITY, f64::min);
    if !(min > 0.0) {
        return Err(GeomError::NonPositiveFactor(min));
    }
    Ok(FrameField::new(
        chart,
        MatrixField::new(move |p| {
            let l = factor.eval_raw(p);
            DMatrix::identity(p.len(), p.len()) / l
        }),
        FrameMetric::Declared,
    ))
}

/// Named conformal factors on `[−1,1]⁴`.
pub fn conformal_preset(id: &str) -> Result<FrameField> {
    let chart = Chart::cube(format!("conformal-{id}"), 4, -1.0, 1.0);
    let factor = match id {
        "round-s4" => ScalarField::new(|p| 2.0 / (1.0 + p.iter().map(|x| x * x).sum::<f64>())),
        "exp-x1" => ScalarField::new(|p| p[0].exp()),
        "one" => ScalarField::constant(1.0),
        other => return Err(GeomError::Config(format!("unknown conformal factor `{other}`"))),
    };
    make_conformally_flat(chart, factor)
}

/// `S²(1) × T²` with frame `∂_α, (1/sin α)∂_β, ∂ₓ, ∂ᵧ`.
pub fn make_s2_x_t2() -> FrameField {
    let chart = Chart::new(
        "S2xT2",
        vec![(0.3, PI - 0.3), (0.0, 2.0 * PI), (0.0, 1.0), (0.0, 1.0)],
    )
    .expect("valid bounds");
    FrameField::new(
        chart,
        MatrixField::new(|p| DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0 / p[0].sin(), 1.0, 1.0]))),
        FrameMetric::Declared,
    )
}

/// A smooth orthonormal frame on `[0,1]⁴`: Gram–Schmidt applied to
/// `Id + ε A(x)` with random trigonometric entries.
pub fn make_random_frame(seed: u64, eps: f64) -> FrameField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let waves: Vec<([f64; 4], f64)> = (0..16)
        .map(|_| {
            let k = [0; 4].map(|_| rng.gen_range(-3.0..3.0));
            (k, rng.gen_range(0.0..2.0 * PI))
        })
        .collect();
    FrameField::new(
        Chart::cube(format!("random-{seed}"), 4, 0.0, 1.0),
        MatrixField::new(move |p| {
            let a = DMatrix::from_fn(4, 4, |r, c| {
                let (k, phase) = &waves[4 * r + c];
                let arg: f64 = k.iter().zip(p).map(|(k, x)| k * x).sum::<f64>() + phase;
                arg.sin()
            });
            gram_schmidt(DMatrix::identity(4, 4) + a * eps)
        }),
        FrameMetric::EuclideanOrthonormal,
    )
}

fn gram_schmidt(m: DMatrix<f64>) -> DMatrix<f64> {
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(m.ncols());
    for j in 0..m.ncols() {
        let mut v = m.column(j).into_owned();
        for c in &cols {
            v -= c * c.dot(&v);
        }
        cols.push(v.normalize());
    }
    DMatrix::from_columns(&cols)
}

/// Named constant triples: `lambda+`, `lambda-` in dimension 4 and their
/// block products such as `lambda+lambda-` in dimension 8.
pub fn triple(id: &str) -> Result<Triple> {
    let lb = LambdaBases::standard();
    let single = |s: &str| match s {
        "lambda+" => Some(lb.plus_triple()),
        "lambda-" => Some(lb.minus_triple()),
        _ => None,
    };
    if let Some(t) = single(id) {
        return Ok(t);
    }
    for split in ["lambda+", "lambda-"] {
        if let Some(rest) = id.strip_prefix(split) {
            if let (Some(a), Some(b)) = (single(split), single(rest)) {
                return Ok(Triple::product(&a, &b));
            }
        }
    }
    Err(GeomError::Config(format!("unknown triple `{id}`")))
}

/// `J₀θ₁ = θ₂`, `J₀θ₃ = θ₄` on `dim` directions.
pub fn standard_complex(dim: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(dim, dim);
    for k in 0..dim / 2 {
        j[(2 * k + 1, 2 * k)] = 1.0;
        j[(2 * k, 2 * k + 1)] = -1.0;
    }
    j
}

/// `e^{x₃} dx₁∧dx₂ + dx₃∧dx₄`, nondegenerate and not closed.
pub fn nonclosed_symplectic() -> Gacs {
    Gacs::from_symplectic(
        "symplectic-nonclosed-T4",
        MatrixField::new(|p| {
            let mut w = DMatrix::zeros(4, 4);
            w[(0, 1)] = p[2].exp();
            w[(1, 0)] = -p[2].exp();
            w[(2, 3)] = 1.0;
            w[(3, 2)] = -1.0;
            w
        }),
    )
}

/// Generalized almost complex structures on the flat `T⁴` chart, each with
/// its expected type.
pub fn builtin_gacs() -> Vec<(Gacs, usize)> {
    let j0 = standard_complex(4);
    let varying = {
        let j0 = j0.clone();
        MatrixField::new(move |p| {
            let (s, c) = (2.0 * PI * p[0]).sin_cos();
            let mut r = DMatrix::identity(4, 4);
            r[(0, 0)] = c;
            r[(2, 2)] = c;
            r[(2, 0)] = s;
            r[(0, 2)] = -s;
            &r * &j0 * r.transpose()
        })
    };
    let b = MatrixField::new(|p| {
        let mut b = DMatrix::zeros(4, 4);
        let (u, v) = (p[2], (2.0 * PI * p[0]).sin());
        b[(0, 1)] = u;
        b[(1, 0)] = -u;
        b[(2, 3)] = v;
        b[(3, 2)] = -v;
        b[(0, 3)] = 0.5 * p[1];
        b[(3, 0)] = -0.5 * p[1];
        b
    });
    let complex = Gacs::from_complex("complex-T4", MatrixField::constant(j0.clone()));
    let complex_varying = Gacs::from_complex("complex-varying-T4", varying);
    let symplectic = Gacs::from_symplectic("symplectic-T4", MatrixField::constant(j0.transpose()));
    vec![
        (b_transform(&complex_varying, &b), 2),
        (b_transform(&symplectic, &b), 0),
        (complex, 2),
        (complex_varying, 2),
        (symplectic, 0),
        (nonclosed_symplectic(), 0),
    ]
}
