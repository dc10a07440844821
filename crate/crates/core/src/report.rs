//! Report schema and the JSON, CSV and markdown renderers.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diag::Diagnostic;
use crate::metrics::{median, MetricsReport, Ratio};
use crate::smells::{SmellFinding, SmellKind, SmellSummary};
use crate::taxonomy::{TaxonomyLabel, TaxonomySummary};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TestEntry {
    pub id: String,
    pub name: String,
    pub class_name: String,
    pub file: String,
    pub line: u32,
    pub body_loc: u32,
    pub assertion_count: usize,
    pub density: Option<f64>,
    pub production_calls: Vec<String>,
    pub smells: Vec<SmellKind>,
    pub labels: Vec<TaxonomyLabel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProjectReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub timestamp: String,
    pub project: String,
    pub unity_version: Option<String>,
    pub metrics: MetricsReport,
    pub findings: Vec<SmellFinding>,
    pub smell_summary: SmellSummary,
    pub taxonomy: TaxonomySummary,
    pub tests: Vec<TestEntry>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ProjectReport {
    pub fn has_tests(&self) -> bool {
        self.metrics.test_method_count > 0
    }

    pub fn test(&self, name: &str) -> Option<&TestEntry> {
        self.tests.iter().find(|t| t.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CorpusEntry {
    /// The line of the list file: a local path or a git URL.
    pub source: String,
    pub status: EntryStatus,
    pub reason: Option<String>,
    pub report: Option<ProjectReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CorpusAggregates {
    pub entries: usize,
    pub scanned: usize,
    pub failed: usize,
    pub projects_with_tests: usize,
    /// Over scanned projects.
    pub fraction_with_tests: f64,
    /// Mean over projects with tests of the share of tests carrying each smell.
    pub smell_average_fractions: BTreeMap<SmellKind, f64>,
    pub smelly_fraction_average: f64,
    pub method_ratio_median: Option<f64>,
    pub class_ratio_median: Option<f64>,
    pub density_median: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CorpusReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub timestamp: String,
    pub entries: Vec<CorpusEntry>,
    pub aggregates: CorpusAggregates,
}

impl CorpusReport {
    pub fn new(entries: Vec<CorpusEntry>, timestamp: String) -> Self {
        let aggregates = corpus_aggregates(&entries);
        CorpusReport {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION.into(),
            timestamp,
            entries,
            aggregates,
        }
    }
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

pub fn corpus_aggregates(entries: &[CorpusEntry]) -> CorpusAggregates {
    let reports: Vec<&ProjectReport> = entries.iter().filter_map(|e| e.report.as_ref()).collect();
    let tested: Vec<&ProjectReport> = reports.iter().copied().filter(|r| r.has_tests()).collect();
    let fraction = |r: &ProjectReport, k: SmellKind| {
        let n = r.smell_summary.test_count;
        let hit = r.smell_summary.tests_per_kind.get(&k).copied().unwrap_or(0);
        if n == 0 { 0.0 } else { hit as f64 / n as f64 }
    };
    let smell_average_fractions = SmellKind::ALL
        .iter()
        .map(|&k| (k, mean(&tested.iter().map(|r| fraction(r, k)).collect::<Vec<_>>())))
        .collect();
    let defined = |f: fn(&ProjectReport) -> &Ratio| -> Vec<f64> {
        tested.iter().filter_map(|r| f(r).value()).collect()
    };
    CorpusAggregates {
        entries: entries.len(),
        scanned: reports.len(),
        failed: entries.len() - reports.len(),
        projects_with_tests: tested.len(),
        fraction_with_tests: if reports.is_empty() { 0.0 } else { tested.len() as f64 / reports.len() as f64 },
        smell_average_fractions,
        smelly_fraction_average: mean(&tested.iter().map(|r| r.smell_summary.smelly_test_fraction).collect::<Vec<_>>()),
        method_ratio_median: median(&defined(|r| &r.metrics.method_ratio)),
        class_ratio_median: median(&defined(|r| &r.metrics.class_ratio)),
        density_median: median(&tested.iter().map(|r| r.metrics.project_density).collect::<Vec<_>>()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Markdown,
}

#[derive(Debug, thiserror::Error)]
#[error("unknown report format `{0}` (expected json, csv or markdown)")]
pub struct UnknownFormat(pub String);

impl FromStr for Format {
    type Err = UnknownFormat;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "markdown" | "md" => Ok(Format::Markdown),
            _ => Err(UnknownFormat(s.to_string())),
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn emit_report(report: &ProjectReport, format: Format) -> Vec<u8> {
    match format {
        Format::Json => to_json(report).into_bytes(),
        Format::Csv => csv_rows(&[report]),
        Format::Markdown => markdown(report).into_bytes(),
    }
}

pub fn emit_corpus(report: &CorpusReport, format: Format) -> Vec<u8> {
    match format {
        Format::Json => to_json(report).into_bytes(),
        Format::Csv => csv_rows(&report.entries.iter().filter_map(|e| e.report.as_ref()).collect::<Vec<_>>()),
        Format::Markdown => corpus_markdown(report).into_bytes(),
    }
}

fn ratio_text(r: &Ratio) -> String {
    match r {
        Ratio::Defined { value } => value.to_string(),
        Ratio::Undefined { reason } => reason.clone(),
    }
}

/// Long format: one row per (project, metric) and one per finding.
fn csv_rows(reports: &[&ProjectReport]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["project", "record", "metric", "value", "kind", "subject", "line", "confidence", "evidence"])
        .expect("in-memory csv");
    for r in reports {
        let m = &r.metrics;
        let mut metrics: Vec<(&str, String)> = vec![
            ("testMethodCount", m.test_method_count.to_string()),
            ("funcMethodCount", m.func_method_count.to_string()),
            ("testClassCount", m.test_class_count.to_string()),
            ("funcClassCount", m.func_class_count.to_string()),
            ("methodRatio", ratio_text(&m.method_ratio)),
            ("classRatio", ratio_text(&m.class_ratio)),
            ("projectDensity", m.project_density.to_string()),
            ("medianDensity", m.median_density.map(|d| d.to_string()).unwrap_or_default()),
            ("coverage", m.coverage.as_ref().map(|c| ratio_text(&c.percentage)).unwrap_or_default()),
            ("smellyTestFraction", r.smell_summary.smelly_test_fraction.to_string()),
            ("vrSpecificShare", r.taxonomy.vr_specific_share.to_string()),
        ];
        for (k, n) in &r.smell_summary.findings {
            metrics.push((smell_metric(*k), n.to_string()));
        }
        for (name, value) in metrics {
            w.write_record([r.project.as_str(), "metric", name, &value, "", "", "", "", ""])
                .expect("in-memory csv");
        }
        for f in &r.findings {
            let line = f.evidence.first().map(|e| e.line.to_string()).unwrap_or_default();
            let evidence = f.evidence.iter().map(|e| e.text.as_str()).collect::<Vec<_>>().join("; ");
            let conf = format!("{:?}", f.confidence).to_lowercase();
            w.write_record([r.project.as_str(), "finding", "", "", &f.kind.to_string(), &f.subject, &line, &conf, &evidence])
                .expect("in-memory csv");
        }
    }
    w.into_inner().expect("in-memory csv")
}

fn smell_metric(k: SmellKind) -> &'static str {
    match k {
        SmellKind::AR => "findings.AR",
        SmellKind::GF => "findings.GF",
        SmellKind::SE => "findings.SE",
        SmellKind::ET => "findings.ET",
        SmellKind::LT => "findings.LT",
        SmellKind::MG => "findings.MG",
    }
}

fn pct(x: f64) -> String {
    format!("{:.2}%", x * 100.0)
}

fn ratio_md(r: &Ratio) -> String {
    match r {
        Ratio::Defined { value } => format!("{value:.4}"),
        Ratio::Undefined { reason } => format!("_{reason}_"),
    }
}

pub fn markdown(r: &ProjectReport) -> String {
    let m = &r.metrics;
    let mut s = String::new();
    let _ = writeln!(s, "# vrtestlint report: {}\n", r.project);
    let _ = writeln!(s, "Unity version: {}\n", r.unity_version.as_deref().unwrap_or("unknown"));
    let _ = writeln!(s, "## Metrics\n\n| metric | value |\n|---|---|");
    let _ = writeln!(s, "| test methods | {} |", m.test_method_count);
    let _ = writeln!(s, "| functional methods | {} |", m.func_method_count);
    let _ = writeln!(s, "| test classes | {} |", m.test_class_count);
    let _ = writeln!(s, "| functional classes | {} |", m.func_class_count);
    let _ = writeln!(s, "| method ratio | {} |", ratio_md(&m.method_ratio));
    let _ = writeln!(s, "| class ratio | {} |", ratio_md(&m.class_ratio));
    let _ = writeln!(s, "| assertion density | {:.4} |", m.project_density);
    if let Some(d) = m.median_density {
        let _ = writeln!(s, "| median test density | {d:.4} |");
    }
    if let Some(c) = &m.coverage {
        let cov = c.percentage.value().map(pct).unwrap_or_else(|| ratio_md(&c.percentage));
        let _ = writeln!(s, "| coverage | {cov} ({}/{}) |", c.covered_lines, c.coverable_lines);
    }
    let sm = &r.smell_summary;
    let _ = writeln!(s, "\n## Test smells\n\n| smell | findings | tests | share of tests |\n|---|---|---|---|");
    for k in SmellKind::ALL {
        let tests = sm.tests_per_kind.get(&k).copied().unwrap_or(0);
        let share = if sm.test_count == 0 { 0.0 } else { tests as f64 / sm.test_count as f64 };
        let _ = writeln!(s, "| {} ({k}) | {} | {tests} | {} |", k.name(), sm.findings.get(&k).copied().unwrap_or(0), pct(share));
    }
    let _ = writeln!(s, "\nTests with at least one smell: {} of {} ({})", sm.smelly_tests, sm.test_count, pct(sm.smelly_test_fraction));
    if let Some(marker) = &sm.marker {
        let _ = writeln!(s, "\n_{marker}_");
    }
    if !r.findings.is_empty() {
        let _ = writeln!(s, "\n### Findings\n");
        for f in &r.findings {
            let first = f.evidence.first().map(|e| format!(" line {}: {}", e.line, e.text)).unwrap_or_default();
            let _ = writeln!(s, "- **{}** `{}`{first}", f.kind, f.subject);
        }
    }
    let _ = writeln!(s, "\n## Test taxonomy\n\n| category | tests |\n|---|---|");
    for (c, n) in &r.taxonomy.counts {
        let _ = writeln!(s, "| {c} | {n} |");
    }
    let _ = writeln!(s, "\nVR-specific share: {}", pct(r.taxonomy.vr_specific_share));
    if !r.diagnostics.is_empty() {
        let _ = writeln!(s, "\n## Diagnostics\n");
        for d in &r.diagnostics {
            let _ = writeln!(s, "- {d}");
        }
    }
    s
}

fn corpus_markdown(c: &CorpusReport) -> String {
    let a = &c.aggregates;
    let mut s = String::new();
    let _ = writeln!(s, "# vrtestlint corpus report\n");
    let _ = writeln!(s, "| entries | scanned | failed | with tests | share with tests |\n|---|---|---|---|---|");
    let _ = writeln!(s, "| {} | {} | {} | {} | {} |", a.entries, a.scanned, a.failed, a.projects_with_tests, pct(a.fraction_with_tests));
    let _ = writeln!(s, "\n## Average share of tests per smell\n\n| smell | average |\n|---|---|");
    for (k, v) in &a.smell_average_fractions {
        let _ = writeln!(s, "| {} ({k}) | {} |", k.name(), pct(*v));
    }
    let _ = writeln!(s, "\n## Projects\n\n| project | status | test methods | method ratio | density | smelly tests |\n|---|---|---|---|---|---|");
    for e in &c.entries {
        match &e.report {
            Some(r) => {
                let _ = writeln!(
                    s,
                    "| {} | ok | {} | {} | {:.4} | {} |",
                    e.source,
                    r.metrics.test_method_count,
                    ratio_md(&r.metrics.method_ratio),
                    r.metrics.project_density,
                    pct(r.smell_summary.smelly_test_fraction)
                );
            }
            None => {
                let _ = writeln!(s, "| {} | failed: {} | | | | |", e.source, e.reason.as_deref().unwrap_or("unknown"));
            }
        }
    }
    s
}
