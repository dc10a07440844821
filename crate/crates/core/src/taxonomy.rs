//! Signal-rule classification of tests into the VR test taxonomy.
//!
//! A signal is `kind:value`; signals joined by `&` must all match.
//! Kinds: `id` (engine identifier seen), `call` (member name, or
//! `Receiver.Member`), `callkw` (keyword in an invoked member name), `name`
//! (keyword in the test method name), `file` (keyword in the file stem),
//! `lit` (exact string literal), `type` (keyword in a referenced type name)
//! and `pattern` (a structural body pattern).

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::model::TestMethodInfo;
use crate::text::keyword_match;

pub const RULES_DATA: &str = include_str!("../data/taxonomy_rules.json");

pub const FALLBACK_CATEGORY: &str = "AppLogic";

/// Categories marked VR-specific; subcategories inherit from their parent.
pub const VR_SPECIFIC: &[&str] = &[
    "Audio",
    "Physics",
    "GUI",
    "Animation",
    "Graphics/Camera",
    "Graphics/Rendering",
    "Data/PlayerPref",
    "Data/ConcurrentAccess",
];

pub const PATTERNS: &[&str] = &["position-compare-across-wait"];

const KINDS: &[&str] = &["id", "call", "callkw", "name", "file", "lit", "type", "pattern"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TaxonomyRule {
    /// `Main` or `Main/Sub`.
    pub category: String,
    #[serde(default)]
    pub vr_specific: bool,
    #[serde(default)]
    pub priority: i32,
    pub signals: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RuleTable {
    pub version: u32,
    pub rules: Vec<TaxonomyRule>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OverrideMode {
    /// Merge signals into same-named categories and append new ones.
    Extend,
    Replace,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RuleOverride {
    pub mode: OverrideMode,
    pub rules: Vec<TaxonomyRule>,
}

impl RuleOverride {
    pub fn validate(&self) -> Result<(), String> {
        validate_rules(&self.rules)
    }
}

pub fn validate_rules(rules: &[TaxonomyRule]) -> Result<(), String> {
    let mut seen = BTreeSet::new();
    for r in rules {
        if r.category.is_empty() || r.category.split('/').any(str::is_empty) {
            return Err(format!("taxonomy rule has an invalid category `{}`", r.category));
        }
        if !seen.insert(r.category.as_str()) {
            return Err(format!("taxonomy category `{}` appears twice", r.category));
        }
        for s in &r.signals {
            validate_signal(s).map_err(|e| format!("taxonomy rule `{}`: {e}", r.category))?;
        }
    }
    Ok(())
}

fn validate_signal(signal: &str) -> Result<(), String> {
    for part in signal.split('&') {
        let Some((kind, value)) = part.split_once(':') else {
            return Err(format!("signal `{part}` has no `kind:` prefix"));
        };
        if !KINDS.contains(&kind) {
            return Err(format!("signal `{part}` has unknown kind `{kind}`"));
        }
        if value.is_empty() {
            return Err(format!("signal `{part}` is empty"));
        }
        if kind == "pattern" && !PATTERNS.contains(&value) {
            return Err(format!("unknown pattern `{value}`"));
        }
    }
    Ok(())
}

impl RuleTable {
    pub fn shipped() -> Self {
        serde_json::from_str(RULES_DATA).expect("shipped taxonomy rules are valid")
    }

    /// Shipped table with an optional user override applied, sorted by
    /// priority then category.
    pub fn with_override(over: Option<&RuleOverride>) -> Self {
        let mut table = Self::shipped();
        if let Some(o) = over {
            match o.mode {
                OverrideMode::Replace => table.rules = o.rules.clone(),
                OverrideMode::Extend => {
                    for r in &o.rules {
                        match table.rules.iter_mut().find(|t| t.category == r.category) {
                            Some(existing) => {
                                for s in &r.signals {
                                    if !existing.signals.contains(s) {
                                        existing.signals.push(s.clone());
                                    }
                                }
                            }
                            None => table.rules.push(r.clone()),
                        }
                    }
                }
            }
        }
        table.rules.sort_by(|a, b| (a.priority, &a.category).cmp(&(b.priority, &b.category)));
        table
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelConfidence {
    Rule,
    Fallback,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TaxonomyLabel {
    pub category: String,
    pub vr_specific: bool,
    pub matched_signals: Vec<String>,
    pub confidence: LabelConfidence,
}

pub fn is_vr_specific(category: &str) -> bool {
    let main = category.split('/').next().unwrap_or(category);
    VR_SPECIFIC.contains(&category) || VR_SPECIFIC.contains(&main)
}

fn signal_matches(part: &str, t: &TestMethodInfo) -> bool {
    let Some((kind, value)) = part.split_once(':') else {
        return false;
    };
    match kind {
        "id" => t.api_signals.contains(value),
        "call" if value.contains('.') => t.invoked_apis.contains(value),
        "call" => t.invoked_members.contains(value),
        "callkw" => t.invoked_members.iter().any(|m| keyword_match(m, value)),
        "name" => keyword_match(&t.name, value),
        "file" => {
            let stem = Path::new(&t.file).file_stem().and_then(|s| s.to_str()).unwrap_or("");
            keyword_match(stem, value)
        }
        "lit" => t.string_literals.iter().any(|l| l == value),
        "type" => t.type_names.iter().any(|n| keyword_match(n, value)),
        "pattern" => value == "position-compare-across-wait" && t.position_compare_across_wait,
        _ => false,
    }
}

pub fn classify_test(t: &TestMethodInfo, rules: &RuleTable) -> Vec<TaxonomyLabel> {
    let mut labels: Vec<TaxonomyLabel> = rules
        .rules
        .iter()
        .filter_map(|r| {
            let matched: Vec<String> = r
                .signals
                .iter()
                .filter(|s| s.split('&').all(|p| signal_matches(p, t)))
                .cloned()
                .collect();
            (!matched.is_empty()).then(|| TaxonomyLabel {
                category: r.category.clone(),
                vr_specific: r.vr_specific,
                matched_signals: matched,
                confidence: LabelConfidence::Rule,
            })
        })
        .collect();
    if labels.is_empty() {
        labels.push(TaxonomyLabel {
            category: FALLBACK_CATEGORY.into(),
            vr_specific: false,
            matched_signals: Vec::new(),
            confidence: LabelConfidence::Fallback,
        });
    }
    labels
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TaxonomySummary {
    pub test_count: usize,
    /// Tests per category; main categories count tests with any of their
    /// subcategories once.
    pub counts: BTreeMap<String, usize>,
    pub vr_specific_tests: usize,
    pub vr_specific_share: f64,
}

pub fn taxonomy_summary<'a>(labels: impl IntoIterator<Item = &'a [TaxonomyLabel]>) -> TaxonomySummary {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let (mut tests, mut vr) = (0, 0);
    for per_test in labels {
        tests += 1;
        let mut cats: BTreeSet<&str> = BTreeSet::new();
        for l in per_test {
            cats.insert(&l.category);
            if let Some((main, _)) = l.category.split_once('/') {
                cats.insert(main);
            }
        }
        for c in cats {
            *counts.entry(c.to_string()).or_default() += 1;
        }
        if per_test.iter().any(|l| l.vr_specific) {
            vr += 1;
        }
    }
    TaxonomySummary {
        test_count: tests,
        counts,
        vr_specific_tests: vr,
        vr_specific_share: if tests == 0 { 0.0 } else { vr as f64 / tests as f64 },
    }
}
