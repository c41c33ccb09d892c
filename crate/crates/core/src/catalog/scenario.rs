//! Scenario configuration and the builtin golden scenarios.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::catalog::manifolds::{self, Hyperelliptic};
use crate::chartfield::FrameField;
use crate::error::{GeomError, Result};
use crate::quaternion::{f_theta, AlgebraIso, QuatStructure};
use crate::twistor::{Classification, Layout};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    pub manifold: ManifoldSpec,
    pub structure: StructureSpec,
    pub checks: Vec<CheckId>,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expectation>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldSpec {
    pub id: String,
    #[serde(default = "empty_object")]
    pub params: Value,
}

fn empty_object() -> Value {
    json!({})
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureSpec {
    pub dplus: String,
    pub dminus: String,
    pub f: FSpec,
}

/// The isomorphism `f`: `"identity"`, a raw matrix, an axis and angle, or an
/// angle about the `I` axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FSpec {
    Named(String),
    Matrix {
        matrix: [[f64; 3]; 3],
    },
    AxisAngle {
        axis: [f64; 3],
        angle: f64,
    },
    Theta {
        theta: f64,
    },
}

impl FSpec {
    pub fn build(&self) -> Result<AlgebraIso> {
        match self {
            FSpec::Named(s) if s == "identity" => Ok(AlgebraIso::identity()),
            FSpec::Named(s) => Err(GeomError::Config(format!("unknown isomorphism `{s}`"))),
            FSpec::Matrix { matrix } => AlgebraIso::from_rows(*matrix),
            FSpec::AxisAngle { axis, angle } => AlgebraIso::from_axis_angle(*axis, *angle),
            FSpec::Theta { theta } => f_theta([1.0, 0.0, 0.0], *theta),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckId {
    /// `u² = −Id` and `η`-orthogonality of `𝒟_f` on the sphere samples.
    Structure,
    Prop3,
    GTensors,
    Theorem1bis,
    /// `W±`, `s`, `B` and `R|Λ±` (dimension 4).
    Blocks,
    Prop567,
    TwistorType,
    /// Deck-group equivariance of the hyperelliptic frame.
    Deck,
    /// Closed-form covariant derivatives of `Λ±` against finite differences.
    Lemma4,
    /// Generalized torsion of the Levi-Civita extension.
    Torsion,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_sphere")]
    pub sphere: usize,
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_points() -> usize {
    25
}
fn default_sphere() -> usize {
    50
}
fn default_h() -> f64 {
    crate::chartfield::CURVATURE_STEP
}

impl Default for Sampling {
    fn default() -> Self {
        Self {
            points: default_points(),
            sphere: default_sphere(),
            h: default_h(),
            seed: 0,
        }
    }
}

/// Expected outcome of a scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub verdict: Classification,
    /// Report entries expected to be nonzero.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nonzero: Vec<String>,
    /// Report entries reported without a pass/fail decision.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostic: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twistor_types: Option<TypeRule>,
}

/// Twistor types at the poles `±(1,0,0)` and at every other sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeRule {
    pub at_i_poles: usize,
    pub elsewhere: usize,
}

/// A resolved manifold.
#[derive(Clone, Debug)]
pub struct Manifold {
    pub frame: FrameField,
    pub hyperelliptic: Option<Hyperelliptic>,
}

fn params<T: for<'de> Deserialize<'de>>(id: &str, v: &Value) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| GeomError::Config(format!("parameters of `{id}`: {e}")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TorusParams {
    dim: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HyperellipticParams {
    #[serde(rename = "type")]
    kind: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceFormParams {
    sign: i32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConformalParams {
    factor: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NoParams {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RandomParams {
    seed: u64,
    eps: f64,
}

/// Manifold constructor ids accepted in scenario files.
pub const MANIFOLD_IDS: [&str; 6] = [
    "flat-torus",
    "hyperelliptic",
    "s1-x-space-form",
    "conformally-flat",
    "s2-x-t2",
    "random-frame",
];

impl ManifoldSpec {
    pub fn build(&self) -> Result<Manifold> {
        let plain = |frame| Manifold {
            frame,
            hyperelliptic: None,
        };
        let id = self.id.as_str();
        match id {
            "flat-torus" => Ok(plain(manifolds::make_flat_torus(params::<TorusParams>(id, &self.params)?.dim)?)),
            "hyperelliptic" => {
                let h = manifolds::make_hyperelliptic(params::<HyperellipticParams>(id, &self.params)?.kind)?;
                Ok(Manifold {
                    frame: h.frame.clone(),
                    hyperelliptic: Some(h),
                })
            }
            "s1-x-space-form" => Ok(plain(manifolds::make_s1_x_space_form(
                params::<SpaceFormParams>(id, &self.params)?.sign,
            )?)),
            "conformally-flat" => Ok(plain(manifolds::conformal_preset(
                &params::<ConformalParams>(id, &self.params)?.factor,
            )?)),
            "s2-x-t2" => {
                params::<NoParams>(id, &self.params)?;
                Ok(plain(manifolds::make_s2_x_t2()))
            }
            "random-frame" => {
                let p = params::<RandomParams>(id, &self.params)?;
                Ok(plain(manifolds::make_random_frame(p.seed, p.eps)))
            }
            other => Err(GeomError::Config(format!(
                "unknown manifold `{other}`; expected one of {MANIFOLD_IDS:?}"
            ))),
        }
    }
}

impl StructureSpec {
    pub fn build(&self, dim: usize) -> Result<QuatStructure> {
        let q = QuatStructure::new(
            manifolds::triple(&self.dplus)?,
            manifolds::triple(&self.dminus)?,
            self.f.build()?,
        )?;
        if q.dim() != dim {
            return Err(GeomError::DimensionMismatch {
                expected: dim,
                found: q.dim(),
            });
        }
        Ok(q)
    }

    pub fn layout(&self) -> Result<Layout> {
        match (self.dplus.as_str(), self.dminus.as_str()) {
            ("lambda+", "lambda+") => Ok(Layout::SameSelfDual),
            ("lambda-", "lambda-") => Ok(Layout::SameAntiSelfDual),
            ("lambda+", "lambda-") => Ok(Layout::PlusMinus),
            ("lambda-", "lambda+") => Ok(Layout::MinusPlus),
            (a, b) if a.len() > 7 && b.len() > 7 => Ok(Layout::HigherDim),
            (a, b) => Err(GeomError::Config(format!("unsupported pair of triples `{a}`, `{b}`"))),
        }
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| GeomError::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.manifold.build()?;
        self.structure.build(m.frame.dim())?;
        self.structure.layout()?;
        let s = &self.sampling;
        if s.points == 0 || !(s.h > 0.0 && s.h < 0.1) {
            return Err(GeomError::Config("sampling needs points > 0 and 0 < h < 0.1".into()));
        }
        if self.checks.contains(&CheckId::Deck) && m.hyperelliptic.is_none() {
            return Err(GeomError::Config("the deck check needs a hyperelliptic manifold".into()));
        }
        if m.frame.dim() != 4 {
            for c in [CheckId::Blocks, CheckId::Lemma4] {
                if self.checks.contains(&c) {
                    return Err(GeomError::DimensionError {
                        required: "4".into(),
                        found: m.frame.dim(),
                    });
                }
            }
        }
        Ok(())
    }
}

fn scenario(
    name: &str,
    manifold: Value,
    dplus: &str,
    dminus: &str,
    f: FSpec,
    checks: &[CheckId],
    expect: Expectation,
) -> Scenario {
    let manifold: ManifoldSpec = serde_json::from_value(manifold).expect("builtin manifold spec");
    Scenario {
        name: name.into(),
        manifold,
        structure: StructureSpec {
            dplus: dplus.into(),
            dminus: dminus.into(),
            f,
        },
        checks: checks.to_vec(),
        sampling: Sampling::default(),
        expect: Some(expect),
    }
}

fn expect(verdict: Classification) -> Expectation {
    Expectation {
        verdict,
        nonzero: vec![],
        diagnostic: vec![],
        twistor_types: None,
    }
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// Angles used for the hyperelliptic family, with their name suffixes.
pub const HYPERELLIPTIC_ANGLES: [(&str, f64); 4] = [("0", 0.0), ("0.7", 0.7), ("pi2", PI / 2.0), ("pi", PI)];

/// The golden suite.
pub fn builtin_scenarios() -> Vec<Scenario> {
    use CheckId::*;
    let mut out = Vec::new();

    out.push(scenario(
        "example2-twisted-T4",
        json!({"id": "flat-torus", "params": {"dim": 4}}),
        "lambda+",
        "lambda+",
        FSpec::Matrix {
            matrix: [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]],
        },
        &[Structure, Prop3, GTensors, Theorem1bis, Blocks, Prop567, TwistorType, Torsion],
        Expectation {
            twistor_types: Some(TypeRule {
                at_i_poles: 3,
                elsewhere: 1,
            }),
            ..expect(Classification::Thm3a)
        },
    ));

    for kind in 1..=7 {
        for (label, theta) in HYPERELLIPTIC_ANGLES {
            let mut checks = vec![Deck, Structure, Prop3, Lemma4, GTensors, Theorem1bis, Blocks, Prop567];
            if kind == 1 {
                checks.push(Torsion);
            }
            out.push(scenario(
                &format!("hyperelliptic-{kind}-ftheta-{label}"),
                json!({"id": "hyperelliptic", "params": {"type": kind}}),
                "lambda+",
                "lambda-",
                FSpec::Theta { theta },
                &checks,
                expect(Classification::Thm4),
            ));
        }
    }

    let ex6 = [Structure, Prop3, Lemma4, GTensors, Theorem1bis, Blocks, Prop567, TwistorType, Torsion];
    let constant_two = Some(TypeRule {
        at_i_poles: 2,
        elsewhere: 2,
    });
    out.push(scenario(
        "s1xs3-example6",
        json!({"id": "s1-x-space-form", "params": {"sign": 1}}),
        "lambda+",
        "lambda-",
        FSpec::Named("identity".into()),
        &ex6,
        Expectation {
            nonzero: strings(&["b-block"]),
            twistor_types: constant_two,
            ..expect(Classification::Thm4)
        },
    ));
    out.push(scenario(
        "s1xh3-example6",
        json!({"id": "s1-x-space-form", "params": {"sign": -1}}),
        "lambda+",
        "lambda-",
        FSpec::Named("identity".into()),
        &ex6[..8],
        Expectation {
            nonzero: strings(&["b-block"]),
            twistor_types: constant_two,
            ..expect(Classification::Thm4)
        },
    ));
    out.push(scenario(
        "s1xs3-classical",
        json!({"id": "s1-x-space-form", "params": {"sign": 1}}),
        "lambda+",
        "lambda+",
        FSpec::Named("identity".into()),
        &[Structure, Prop3, GTensors, Theorem1bis, Blocks],
        expect(Classification::Thm3b),
    ));
    out.push(scenario(
        "round-s4-classical",
        json!({"id": "conformally-flat", "params": {"factor": "round-s4"}}),
        "lambda+",
        "lambda+",
        FSpec::Named("identity".into()),
        &[Structure, Prop3, Lemma4, GTensors, Theorem1bis, Blocks],
        expect(Classification::Thm3b),
    ));
    out.push(scenario(
        "round-s4-ftheta-pi2",
        json!({"id": "conformally-flat", "params": {"factor": "round-s4"}}),
        "lambda+",
        "lambda+",
        FSpec::Theta { theta: PI / 2.0 },
        &[Structure, Prop3, GTensors, Theorem1bis, Blocks],
        Expectation {
            nonzero: strings(&["prop3"]),
            diagnostic: strings(&["g1", "g2", "g3", "theorem1bis"]),
            ..expect(Classification::NonApplicable)
        },
    ));
    out.push(scenario(
        "s2xt2-negative",
        json!({"id": "s2-x-t2"}),
        "lambda+",
        "lambda+",
        FSpec::Named("identity".into()),
        &[Structure, Prop3, Lemma4, GTensors, Theorem1bis, Blocks],
        Expectation {
            nonzero: strings(&["g1", "g2", "g3", "theorem1bis", "weyl-plus"]),
            ..expect(Classification::NonIntegrable)
        },
    ));
    out.push(scenario(
        "flat-T8-product",
        json!({"id": "flat-torus", "params": {"dim": 8}}),
        "lambda+lambda-",
        "lambda-lambda+",
        FSpec::AxisAngle {
            axis: [1.0, 2.0, 3.0],
            angle: 0.9,
        },
        &[Structure, Prop3, GTensors, Theorem1bis, TwistorType],
        expect(Classification::Thm2),
    ));
    out
}

pub fn builtin(name: &str) -> Option<Scenario> {
    builtin_scenarios().into_iter().find(|s| s.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_validate() {
        let all = builtin_scenarios();
        assert_eq!(all.len(), 1 + 28 + 7);
        for s in &all {
            s.validate().unwrap_or_else(|e| panic!("{}: {e}", s.name));
        }
        assert!(builtin("hyperelliptic-3-ftheta-0.7").is_some());
    }

    #[test]
    fn json_round_trip() {
        let s = builtin("example2-twisted-T4").unwrap();
        let text = serde_json::to_string_pretty(&s).unwrap();
        assert_eq!(Scenario::from_json(&text).unwrap(), s);
    }

    #[test]
    fn unknown_fields_rejected() {
        let bad = r#"{"manifold": {"id": "s2-x-t2"}, "structure": {"dplus": "lambda+", "dminus": "lambda+", "f": "identity"},
                      "checks": ["prop3"], "colour": 3}"#;
        assert!(matches!(Scenario::from_json(bad), Err(GeomError::Config(_))));
        let bad_param = r#"{"manifold": {"id": "s2-x-t2", "params": {"radius": 2}}, "structure": {"dplus": "lambda+", "dminus": "lambda+", "f": "identity"},
                      "checks": ["prop3"]}"#;
        assert!(matches!(Scenario::from_json(bad_param), Err(GeomError::Config(_))));
    }

    #[test]
    fn f_specs() {
        let s: FSpec = serde_json::from_str(r#"{"axis": [0, 0, 1], "angle": 1.0}"#).unwrap();
        assert!(s.build().is_ok());
        let s: FSpec = serde_json::from_str(r#"{"theta": 3.141592653589793}"#).unwrap();
        assert!(!s.build().unwrap().is_identity(1e-6));
        let refl: FSpec = serde_json::from_str(r#"{"matrix": [[1,0,0],[0,1,0],[0,0,-1]]}"#).unwrap();
        assert!(matches!(refl.build(), Err(GeomError::NotAlgebraIso { .. })));
        let named: FSpec = serde_json::from_str(r#""rotation""#).unwrap();
        assert!(named.build().is_err());
    }
}
