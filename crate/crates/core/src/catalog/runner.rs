//! Scenario execution.
//!
//! Points are evaluated in parallel and merged in sample order, so reports do
//! not depend on the thread count.

use std::collections::BTreeMap;
use std::time::Instant;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::catalog::manifolds::{deck_equivariance, Hyperelliptic};
use crate::catalog::report::{CheckResult, Conventions, Expect, ScenarioReport, Witness};
use crate::catalog::scenario::{CheckId, Scenario};
use crate::chartfield::{FrameField, MatrixField, DEFAULT_STEP};
use crate::connection::{blocks_dim4, christoffel, curvature, lambda2_in_bases, nabla_endo, LeviCivita};
use crate::error::{GeomError, Result};
use crate::genlin::{frame_sections, gacs_type, gen_torsion};
use crate::linalg::{frob, max_abs};
use crate::quaternion::{assemble_df, lambda_bases, lemma4_nabla, prop3_residual, GenQuatElement, QuatStructure};
use crate::twistor::{
    classify, frame_pairs, g_tensors, prop567_checks, random_pairs, sphere_samples, theorem1bis_residual,
    twistor_type, ClassifyInput, Layout, NONZERO, VANISH,
};

/// Random vector pairs added to the frame pairs at every point.
pub const RANDOM_PAIRS: usize = 10;
/// Relative tolerance of `B = (s/12)F`.
pub const PROP7_TOL: f64 = 2e-3;

/// Default threshold of an entry in `Vanish` mode.
pub fn default_threshold(name: &str) -> f64 {
    match name {
        "structure" | "deck" => 1e-10,
        "lemma4" => 1e-5,
        "torsion" => 1e-6,
        "prop7" => PROP7_TOL,
        "twistor-type" => 0.0,
        _ => VANISH,
    }
}

fn default_mode(name: &str) -> Expect {
    match name {
        "weyl-plus" | "weyl-minus" | "scalar" | "b-block" | "r-lambda-plus" | "r-lambda-minus" => Expect::Diagnostic,
        _ => Expect::Vanish,
    }
}

/// Report entries produced by a check.
pub fn entries(check: CheckId, layout: Layout) -> Vec<&'static str> {
    match check {
        CheckId::Structure => vec!["structure"],
        CheckId::Prop3 => vec!["prop3"],
        CheckId::GTensors => vec!["g1", "g2", "g3"],
        CheckId::Theorem1bis => vec!["theorem1bis"],
        CheckId::Blocks => vec!["weyl-plus", "weyl-minus", "scalar", "b-block", "r-lambda-plus", "r-lambda-minus"],
        CheckId::Prop567 if layout == Layout::PlusMinus => vec!["prop56", "prop7"],
        CheckId::Prop567 => vec!["prop56"],
        CheckId::TwistorType => vec!["twistor-type"],
        CheckId::Deck => vec!["deck"],
        CheckId::Lemma4 => vec!["lemma4"],
        CheckId::Torsion => vec!["torsion"],
    }
}

#[derive(Clone, Debug, Default)]
struct Track {
    value: f64,
    witness: Option<Witness>,
}

impl Track {
    /// Keep the first maximum; NaN counts as infinite.
    fn offer(&mut self, v: f64, w: impl FnOnce() -> Witness) {
        let v = if v.is_nan() { f64::INFINITY } else { v };
        if self.witness.is_none() || v > self.value {
            self.value = v;
            self.witness = Some(w());
        }
    }
}

type Tracks = BTreeMap<&'static str, Track>;

struct Ctx<'a> {
    frame: &'a FrameField,
    q: &'a QuatStructure,
    layout: Layout,
    hyper: Option<&'a Hyperelliptic>,
    checks: &'a [CheckId],
    elements: Vec<([f64; 3], GenQuatElement)>,
    gen_pairs: Vec<(DVector<f64>, DVector<f64>)>,
    h: f64,
    seed: u64,
}

impl Ctx<'_> {
    fn wants(&self, c: CheckId) -> bool {
        self.checks.contains(&c)
    }
}

fn pair_label(k: usize, dim: usize) -> String {
    let fp = dim * (dim - 1) / 2;
    if k < fp {
        let mut n = k;
        for i in 0..dim {
            let row = dim - 1 - i;
            if n < row {
                return format!("theta{},theta{}", i + 1, i + 2 + n);
            }
            n -= row;
        }
    }
    format!("random{}", k - fp)
}

fn gen_pair_label(k: usize, dim: usize) -> String {
    // C± coordinates: e_a = θa + θa*, e_{d+a} = θa − θa*
    let name = |a: usize| {
        if a < dim {
            format!("c+{}", a + 1)
        } else {
            format!("c-{}", a - dim + 1)
        }
    };
    let mut n = k;
    for i in 0..2 * dim {
        let row = 2 * dim - 1 - i;
        if n < row {
            return format!("{},{}", name(i), name(i + 1 + n));
        }
        n -= row;
    }
    String::new()
}

struct PointOutcome {
    tracks: Tracks,
    scalar: Option<f64>,
}

fn eval_point(ctx: &Ctx, idx: usize, p: &[f64]) -> Result<PointOutcome> {
    let frame = ctx.frame;
    let d = frame.dim();
    let mut t = Tracks::new();
    let at = |sphere: Option<[f64; 3]>, pair: Option<String>| Witness {
        point: p.to_vec(),
        sphere,
        pair,
    };

    let chr = christoffel(frame, p, DEFAULT_STEP)?;
    let rep = prop3_residual(ctx.q, &chr);
    t.entry("prop3").or_default().offer(rep.worst(), || at(None, None));

    let bases = lambda_bases(frame).ok();
    if ctx.wants(CheckId::Lemma4) {
        let bases = bases.as_ref().ok_or(GeomError::DimensionError {
            required: "4".into(),
            found: d,
        })?;
        let track = t.entry("lemma4").or_default();
        for i in 0..d {
            let closed = lemma4_nabla(&chr, i)?;
            for (k, m) in bases.all().iter().enumerate() {
                let fd = nabla_endo(frame, &chr, &MatrixField::constant((*m).clone()), i, p, DEFAULT_STEP)?;
                track.offer(max_abs(&(&closed[k] - fd)), || at(None, Some(format!("theta{}", i + 1))));
            }
        }
    }

    if ctx.wants(CheckId::Deck) {
        if let Some(hy) = ctx.hyper {
            let v = deck_equivariance(hy, &[p.to_vec()]);
            t.entry("deck").or_default().offer(v, || at(None, None));
        }
    }

    if ctx.wants(CheckId::Torsion) {
        let conn = LeviCivita::new(frame.clone());
        let sections = frame_sections(d);
        let track = t.entry("torsion").or_default();
        for (a, x1) in sections.iter().enumerate() {
            for (b, x2) in sections.iter().enumerate() {
                for (c, x3) in sections.iter().enumerate() {
                    let v = gen_torsion(&conn, x1, x2, x3, p, DEFAULT_STEP)?.abs();
                    track.offer(v, || at(None, Some(format!("{a},{b},{c}"))));
                }
            }
        }
    }

    let r = curvature(frame, p, ctx.h)?;
    let mut s = r.scalar_curvature();
    let mut blocks = None;
    if let Some(bases) = &bases {
        let bl = blocks_dim4(&r, bases)?;
        let op = lambda2_in_bases(&r, bases);
        s = bl.s;
        let r_plus = frob(&op.columns(0, 3).into_owned());
        let r_minus = frob(&op.columns(3, 3).into_owned());
        for (name, v) in [
            ("weyl-plus", bl.w_plus_norm()),
            ("weyl-minus", bl.w_minus_norm()),
            ("scalar", s.abs()),
            ("b-block", bl.b_norm()),
            ("r-lambda-plus", r_plus),
            ("r-lambda-minus", r_minus),
        ] {
            t.entry(name).or_default().offer(v, || at(None, None));
        }
        blocks = Some(bl);
    }

    if ctx.wants(CheckId::Prop567) {
        let pr = prop567_checks(blocks.as_ref(), s, &ctx.q.f, ctx.layout);
        let p56 = if pr.f_is_identity { 0.0 } else { s.abs() };
        t.entry("prop56").or_default().offer(p56, || at(None, None));
        if let (Some(res), Some(bn)) = (pr.prop7_residual, pr.b_norm) {
            let rel = if bn >= NONZERO { res / bn } else { res };
            t.entry("prop7").or_default().offer(rel, || at(None, None));
        }
    }

    if ctx.wants(CheckId::GTensors) {
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ idx as u64);
        let mut pairs = frame_pairs(d);
        pairs.extend(random_pairs(d, RANDOM_PAIRS, &mut rng));
        for (abc, u) in &ctx.elements {
            for (k, (x, y)) in pairs.iter().enumerate() {
                let g = g_tensors(&r, &u.uplus, &u.uminus, x, y);
                for (name, m) in ["g1", "g2", "g3"].iter().zip(&g) {
                    t.entry(name).or_default().offer(frob(m), || at(Some(*abc), Some(pair_label(k, d))));
                }
            }
        }
    }

    if ctx.wants(CheckId::Theorem1bis) {
        let track = t.entry("theorem1bis").or_default();
        for (abc, u) in &ctx.elements {
            for (k, (x, y)) in ctx.gen_pairs.iter().enumerate() {
                let v = theorem1bis_residual(&r, u, x, y);
                track.offer(v, || at(Some(*abc), Some(gen_pair_label(k, d))));
            }
        }
    }

    Ok(PointOutcome {
        tracks: t,
        scalar: Some(s),
    })
}

/// Run a scenario and build its report.
pub fn run_scenario(scenario: &Scenario) -> Result<ScenarioReport> {
    let start = Instant::now();
    scenario.validate()?;
    let manifold = scenario.manifold.build()?;
    let frame = &manifold.frame;
    let d = frame.dim();
    let q = scenario.structure.build(d)?;
    let layout = scenario.structure.layout()?;
    let sampling = &scenario.sampling;
    let elements: Vec<_> = sphere_samples(sampling.sphere)
        .into_iter()
        .map(|abc| (abc, assemble_df(&q, abc)))
        .collect();

    let names: Vec<&'static str> = scenario.checks.iter().flat_map(|c| entries(*c, layout)).collect();
    if let Some(e) = &scenario.expect {
        for n in e.nonzero.iter().chain(&e.diagnostic) {
            if !names.contains(&n.as_str()) {
                return Err(GeomError::Config(format!("expectation names unknown entry `{n}`")));
            }
        }
    }

    let ctx = Ctx {
        frame,
        q: &q,
        layout,
        hyper: manifold.hyperelliptic.as_ref(),
        checks: &scenario.checks,
        gen_pairs: frame_pairs(2 * d),
        elements,
        h: sampling.h,
        seed: sampling.seed,
    };

    let points = frame.chart.halton_points(sampling.points, 5.0 * sampling.h);
    let outcomes: Vec<Result<PointOutcome>> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| eval_point(&ctx, i, p))
        .collect();

    let mut tracks = Tracks::new();
    let mut errors = Vec::new();
    let (mut s_min, mut s_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(o) => {
                for (name, tr) in o.tracks {
                    let w = tr.witness.clone();
                    tracks.entry(name).or_default().offer(tr.value, || w.expect("offered tracks carry witnesses"));
                }
                if let Some(s) = o.scalar {
                    s_min = s_min.min(s);
                    s_max = s_max.max(s);
                }
            }
            Err(e) => errors.push(format!("point {i} {:?}: {e}", points[i])),
        }
    }

    // Structure and twistor types are pointwise constants in the frame basis.
    let mut structure = Track::default();
    for (abc, u) in &ctx.elements {
        let (sq, orth) = u.residuals();
        structure.offer(sq.max(orth), || Witness {
            point: vec![],
            sphere: Some(*abc),
            pair: None,
        });
    }
    let defect = q.dplus.defect().max(q.dminus.defect());
    if defect > structure.value {
        structure.value = defect;
    }
    tracks.insert("structure", structure);

    let rule = scenario.expect.as_ref().and_then(|e| e.twistor_types);
    let mut type_hist = BTreeMap::<usize, usize>::new();
    let mut mismatch = Track::default();
    let mut mismatches = 0usize;
    let mut type_margin = f64::INFINITY;
    let mut type_error = None;
    if scenario.checks.contains(&CheckId::TwistorType) {
        for (k, (abc, u)) in ctx.elements.iter().enumerate() {
            match (twistor_type(u), gacs_type(&u.matrix)) {
                (Ok(ty), Ok(rep)) => {
                    *type_hist.entry(ty).or_default() += 1;
                    type_margin = type_margin.min(rep.margin_decades());
                    if let Some(rule) = rule {
                        let want = if k < 2 { rule.at_i_poles } else { rule.elsewhere };
                        if ty != want {
                            mismatches += 1;
                            if mismatch.witness.is_none() {
                                mismatch.witness = Some(Witness {
                                    point: vec![],
                                    sphere: Some(*abc),
                                    pair: Some(format!("type {ty}, expected {want}")),
                                });
                            }
                        }
                    }
                }
                (Err(e), _) | (_, Err(e)) => {
                    type_error.get_or_insert_with(|| format!("sphere sample {abc:?}: {e}"));
                }
            }
        }
        mismatch.value = mismatches as f64;
        tracks.insert("twistor-type", mismatch);
    }

    let expectation = scenario.expect.as_ref();
    let mut checks = Vec::new();
    for name in &names {
        let tr = tracks.get(name).cloned().unwrap_or(Track {
            value: f64::NAN,
            witness: None,
        });
        let mut mode = default_mode(name);
        let mut threshold = default_threshold(name);
        if *name == "twistor-type" && rule.is_none() {
            mode = Expect::Diagnostic;
        }
        if let Some(e) = expectation {
            if e.nonzero.iter().any(|n| n == name) {
                mode = Expect::Nonzero;
                threshold = NONZERO;
            }
            if e.diagnostic.iter().any(|n| n == name) {
                mode = Expect::Diagnostic;
            }
        }
        let mut c = CheckResult::new(name, tr.value, tr.witness, threshold, mode);
        match *name {
            "scalar" => c.detail = Some(json!({"min": s_min, "max": s_max})),
            "twistor-type" => {
                c.detail = Some(json!({
                    "histogram": type_hist.iter().map(|(k, v)| (k.to_string(), *v)).collect::<BTreeMap<_, _>>(),
                    "rank_margin_decades": type_margin,
                }));
                c.error = type_error.clone();
            }
            _ => {}
        }
        let pointwise = !matches!(*name, "structure" | "twistor-type");
        if pointwise && !errors.is_empty() {
            c.error = Some(errors.join("; "));
        }
        c.decide();
        checks.push(c);
    }

    let value = |n: &str| tracks.get(n).map(|t| t.value);
    let verdict = if scenario.checks.contains(&CheckId::GTensors) && errors.is_empty() {
        let g_max = ["g1", "g2", "g3"]
            .iter()
            .filter_map(|n| value(n))
            .fold(0.0_f64, f64::max);
        Some(classify(&ClassifyInput {
            n: d / 4,
            layout,
            prop3: value("prop3").unwrap_or(f64::NAN),
            g_max,
            f_is_identity: q.f.is_identity(1e-10),
            r_plus: value("r-lambda-plus"),
            r_minus: value("r-lambda-minus"),
            w_plus: value("weyl-plus"),
            w_minus: value("weyl-minus"),
        }))
    } else {
        None
    };

    let expected_verdict = expectation.map(|e| e.verdict);
    let verdict_ok = match (&verdict, expected_verdict) {
        (Some(v), Some(want)) => v.classification == want && v.agree,
        (Some(v), None) => v.agree,
        (None, Some(_)) => false,
        (None, None) => true,
    };
    let pass = verdict_ok && checks.iter().all(|c| c.pass);

    Ok(ScenarioReport {
        scenario: scenario.clone(),
        conventions: Conventions::new(sampling.h),
        checks,
        verdict,
        expected_verdict,
        pass,
        seed: sampling.seed,
        h: sampling.h,
        engine_version: crate::ENGINE_VERSION.into(),
        runtime_ms: start.elapsed().as_millis() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_labels() {
        assert_eq!(pair_label(0, 4), "theta1,theta2");
        assert_eq!(pair_label(5, 4), "theta3,theta4");
        assert_eq!(pair_label(6, 4), "random0");
        assert_eq!(gen_pair_label(0, 2), "c+1,c+2");
        assert_eq!(gen_pair_label(5, 2), "c-1,c-2");
    }
}
