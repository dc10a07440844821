//! The six test smell detectors and their per-project summary.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::model::{FixtureInfo, TestClassInfo, TestMethodInfo};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SmellKind {
    AR,
    GF,
    SE,
    ET,
    LT,
    MG,
}

impl SmellKind {
    pub const ALL: [SmellKind; 6] = [SmellKind::AR, SmellKind::GF, SmellKind::SE, SmellKind::ET, SmellKind::LT, SmellKind::MG];

    pub fn name(self) -> &'static str {
        match self {
            SmellKind::AR => "Assertion Roulette",
            SmellKind::GF => "General Fixture",
            SmellKind::SE => "Sensitive Equality",
            SmellKind::ET => "Eager Test",
            SmellKind::LT => "Lazy Test",
            SmellKind::MG => "Mystery Guest",
        }
    }
}

impl fmt::Display for SmellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Confidence {
    Definite,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Evidence {
    pub line: u32,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SmellFinding {
    pub kind: SmellKind,
    /// Test method id, or test class id for GF.
    pub subject: String,
    pub evidence: Vec<Evidence>,
    pub confidence: Confidence,
    /// Test methods carrying this smell.
    pub tests: Vec<String>,
}

fn method_finding(kind: SmellKind, t: &TestMethodInfo, evidence: Vec<Evidence>, confidence: Confidence) -> SmellFinding {
    SmellFinding { kind, subject: t.id.clone(), evidence, confidence, tests: vec![t.id.clone()] }
}

pub fn detect_assertion_roulette(t: &TestMethodInfo) -> Option<SmellFinding> {
    if t.assertions.len() < 2 {
        return None;
    }
    let evidence: Vec<Evidence> = t
        .assertions
        .iter()
        .filter(|a| !a.has_message)
        .map(|a| Evidence { line: a.line, text: format!("`{}` has no failure message", a.api_name) })
        .collect();
    (!evidence.is_empty()).then(|| method_finding(SmellKind::AR, t, evidence, Confidence::Definite))
}

pub fn detect_general_fixture(class: &TestClassInfo) -> Option<SmellFinding> {
    let mut evidence = Vec::new();
    let mut tests = BTreeSet::new();
    for field in &class.fixture.assigned_fields {
        let line = class.fixture.assignment_lines.get(field).copied().unwrap_or(0);
        for t in &class.tests {
            if !t.fixture_fields_read.contains(field) {
                evidence.push(Evidence { line, text: format!("field `{field}` is not used by `{}`", t.name) });
                tests.insert(t.id.clone());
            }
        }
    }
    (!evidence.is_empty()).then(|| SmellFinding {
        kind: SmellKind::GF,
        subject: class.id.clone(),
        evidence,
        confidence: Confidence::Definite,
        tests: tests.into_iter().collect(),
    })
}

pub fn detect_sensitive_equality(t: &TestMethodInfo) -> Option<SmellFinding> {
    let evidence: Vec<Evidence> = t
        .assertions
        .iter()
        .filter(|a| a.compares_text_representation)
        .map(|a| Evidence { line: a.line, text: format!("`{}` compares ToString() output", a.api_name) })
        .collect();
    (!evidence.is_empty()).then(|| method_finding(SmellKind::SE, t, evidence, Confidence::Definite))
}

pub fn detect_eager_test(t: &TestMethodInfo, config: &Config) -> Option<SmellFinding> {
    let calls: Vec<_> = t
        .production_calls
        .iter()
        .filter(|c| !config.eager_requires_assertion || c.flows_to_assertion)
        .collect();
    if calls.len() < 2 {
        return None;
    }
    let confidence = if calls.iter().any(|c| c.ambiguous) { Confidence::Heuristic } else { Confidence::Definite };
    let evidence = calls
        .iter()
        .map(|c| Evidence { line: c.line, text: format!("calls production method `{}`", c.identity) })
        .collect();
    Some(method_finding(SmellKind::ET, t, evidence, confidence))
}

/// One finding per test sharing a production method with another test of
/// the same class.
pub fn detect_lazy_test(class: &TestClassInfo) -> Vec<SmellFinding> {
    let mut out = Vec::new();
    for t in &class.tests {
        let mut evidence = Vec::new();
        let mut ambiguous = false;
        for peer in &class.tests {
            if peer.id == t.id {
                continue;
            }
            for c in &t.production_calls {
                if let Some(p) = peer.production_calls.iter().find(|p| p.identity == c.identity) {
                    ambiguous |= c.ambiguous || p.ambiguous;
                    evidence.push(Evidence {
                        line: c.line,
                        text: format!("`{}` is also tested by `{}`", c.identity, peer.name),
                    });
                }
            }
        }
        if !evidence.is_empty() {
            let confidence = if ambiguous { Confidence::Heuristic } else { Confidence::Definite };
            out.push(method_finding(SmellKind::LT, t, evidence, confidence));
        }
    }
    out
}

pub fn detect_mystery_guest(t: &TestMethodInfo, fixture: &FixtureInfo) -> Option<SmellFinding> {
    let unmanaged: Vec<_> = t
        .resource_signals
        .iter()
        .filter(|s| !s.in_memory && !fixture.mocked_fields.contains(&s.subject) && !t.mocked_locals.contains(&s.subject))
        .collect();
    if unmanaged.is_empty() {
        return None;
    }
    let literal_only = unmanaged.iter().all(|s| s.source == crate::model::SignalSource::Literal);
    let evidence = unmanaged
        .iter()
        .map(|s| Evidence { line: s.line, text: format!("{} resource via `{}`", s.pattern, s.text) })
        .collect();
    let confidence = if literal_only { Confidence::Heuristic } else { Confidence::Definite };
    Some(method_finding(SmellKind::MG, t, evidence, confidence))
}

/// All findings of one test class: per test AR, SE, ET, LT, MG in order,
/// then the class-level GF finding.
pub fn detect_class(class: &TestClassInfo, config: &Config) -> Vec<SmellFinding> {
    let mut lazy: BTreeMap<String, SmellFinding> =
        detect_lazy_test(class).into_iter().map(|f| (f.subject.clone(), f)).collect();
    let mut out = Vec::new();
    for t in &class.tests {
        out.extend(detect_assertion_roulette(t));
        out.extend(detect_sensitive_equality(t));
        out.extend(detect_eager_test(t, config));
        out.extend(lazy.remove(&t.id));
        out.extend(detect_mystery_guest(t, &class.fixture));
    }
    out.extend(detect_general_fixture(class));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SmellSummary {
    pub test_count: usize,
    /// Findings per kind; a GF finding covers a whole class.
    pub findings: BTreeMap<SmellKind, usize>,
    /// Tests carrying each kind.
    pub tests_per_kind: BTreeMap<SmellKind, usize>,
    pub smelly_tests: usize,
    pub smelly_test_fraction: f64,
    /// Present when there are no tests to measure.
    pub marker: Option<String>,
}

pub const NO_TESTS: &str = "no tests";

pub fn smell_summary(test_count: usize, findings: &[SmellFinding]) -> SmellSummary {
    let mut counts: BTreeMap<SmellKind, usize> = SmellKind::ALL.iter().map(|k| (*k, 0)).collect();
    let mut per_kind: BTreeMap<SmellKind, BTreeSet<&str>> = SmellKind::ALL.iter().map(|k| (*k, BTreeSet::new())).collect();
    let mut smelly = BTreeSet::new();
    for f in findings {
        *counts.entry(f.kind).or_default() += 1;
        for t in &f.tests {
            per_kind.entry(f.kind).or_default().insert(t);
            smelly.insert(t.as_str());
        }
    }
    SmellSummary {
        test_count,
        findings: counts,
        tests_per_kind: per_kind.into_iter().map(|(k, s)| (k, s.len())).collect(),
        smelly_tests: smelly.len(),
        smelly_test_fraction: if test_count == 0 { 0.0 } else { smelly.len() as f64 / test_count as f64 },
        marker: (test_count == 0).then(|| NO_TESTS.to_string()),
    }
}
