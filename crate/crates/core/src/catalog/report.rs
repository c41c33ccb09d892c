//! Scenario reports.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::catalog::scenario::Scenario;
use crate::twistor::{Classification, Verdict};

/// How a report entry is judged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expect {
    /// Pass iff `max_residual ≤ threshold`.
    Vanish,
    /// Pass iff `max_residual ≥ threshold`.
    Nonzero,
    /// Reported only.
    Diagnostic,
}

/// Where the maximum was attained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub point: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sphere: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub max_residual: f64,
    pub witness: Option<Witness>,
    pub threshold: f64,
    pub expect: Expect,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckResult {
    pub fn new(name: &str, max_residual: f64, witness: Option<Witness>, threshold: f64, expect: Expect) -> Self {
        let mut c = Self {
            name: name.into(),
            max_residual,
            witness,
            threshold,
            expect,
            pass: false,
            detail: None,
            error: None,
        };
        c.decide();
        c
    }

    /// Recompute `pass` from the residual, threshold and mode.
    pub fn decide(&mut self) {
        self.pass = self.error.is_none()
            && match self.expect {
                Expect::Vanish => self.max_residual <= self.threshold,
                Expect::Nonzero => self.max_residual >= self.threshold,
                Expect::Diagnostic => !self.max_residual.is_nan(),
            };
    }
}

/// Conventions every report records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub curvature: String,
    pub lambda_bases: String,
    pub endomorphisms: String,
    pub cplus_cminus: String,
    pub differences: String,
}

impl Conventions {
    pub fn new(h: f64) -> Self {
        Self {
            curvature: "R(X,Y) = [∇_Y, ∇_X] + ∇_[X,Y]; the unit round sphere has Λ² operator +Id and s = 4n(4n-1)"
                .into(),
            lambda_bases: "I+ = θ1∧θ2 + θ3∧θ4, J+ = θ1∧θ3 − θ2∧θ4, K+ = θ1∧θ4 + θ2∧θ3; \
                           I− = θ1∧θ2 − θ3∧θ4, J− = θ1∧θ3 + θ2∧θ4, K− = −θ1∧θ4 + θ2∧θ3 (adopted as the orientation)"
                .into(),
            endomorphisms: "frame basis, column j is the image of θj; θa∧θb sends θa to θb and θb to −θa".into(),
            cplus_cminus: "C± spanned by θi ± θi*; u = diag(f(u−), u−) in C+ ⊕ C−".into(),
            differences: format!("central differences, first derivatives h = {:e}, curvature h = {h:e}", crate::chartfield::DEFAULT_STEP),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: Scenario,
    pub conventions: Conventions,
    pub checks: Vec<CheckResult>,
    pub verdict: Option<Verdict>,
    pub expected_verdict: Option<Classification>,
    pub pass: bool,
    pub seed: u64,
    pub h: f64,
    pub engine_version: String,
    pub runtime_ms: u64,
}

impl ScenarioReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// `0` pass, `1` check failure, `3` inconclusive verdict.
    pub fn exit_code(&self) -> i32 {
        match &self.verdict {
            Some(v) if v.classification == Classification::Inconclusive => 3,
            _ if self.pass => 0,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// One line per check, without timing, for the suite listing.
    pub fn summary(&self) -> String {
        let mut out = format!(
            "{} [{}] verdict={}\n",
            self.scenario.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.verdict
                .as_ref()
                .map(|v| format!("{:?}", v.classification))
                .unwrap_or_else(|| "none".into()),
        );
        for c in &self.checks {
            out.push_str(&format!(
                "  {:<16} {:>24e} {:?} {:e} {}\n",
                c.name,
                c.max_residual,
                c.expect,
                c.threshold,
                if c.pass { "ok" } else { "FAIL" }
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::scenario::builtin;

    fn report(classification: Classification, pass: bool) -> ScenarioReport {
        ScenarioReport {
            scenario: builtin("s2xt2-negative").unwrap(),
            conventions: Conventions::new(1e-3),
            checks: vec![],
            verdict: Some(Verdict {
                classification,
                predicted_integrable: None,
                measured_integrable: None,
                agree: false,
                g_max: 1e-3,
                note: String::new(),
            }),
            expected_verdict: None,
            pass,
            seed: 0,
            h: 1e-3,
            engine_version: String::new(),
            runtime_ms: 0,
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(report(Classification::Thm4, true).exit_code(), 0);
        assert_eq!(report(Classification::Thm4, false).exit_code(), 1);
        assert_eq!(report(Classification::Inconclusive, false).exit_code(), 3);
    }

    #[test]
    fn modes() {
        assert!(CheckResult::new("g1", 5e-5, None, 1e-4, Expect::Vanish).pass);
        assert!(!CheckResult::new("g1", 5e-3, None, 1e-2, Expect::Nonzero).pass);
        assert!(!CheckResult::new("g1", f64::NAN, None, 1e-2, Expect::Diagnostic).pass);
    }
}
