//! Test prevalence and effectiveness metrics.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use serde::{Deserialize, Serialize};

use crate::diag::Diagnostic;
use crate::model::TestClassInfo;
use crate::scanner::ProjectInventory;

pub const UNDEFINED_RATIO: &str = "undefined ratio";
pub const NO_COVERABLE_CODE: &str = "no coverable code";

/// A ratio that may be undefined (division by zero with a non-zero numerator
/// or nothing to measure). Never infinite or NaN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "camelCase")]
pub enum Ratio {
    Defined { value: f64 },
    Undefined { reason: String },
}

impl Ratio {
    /// `num / den`; `0/0` is 0, `n/0` is undefined.
    pub fn of(num: u64, den: u64) -> Self {
        match (num, den) {
            (0, 0) => Ratio::Defined { value: 0.0 },
            (_, 0) => Ratio::Undefined { reason: UNDEFINED_RATIO.into() },
            _ => Ratio::Defined { value: num as f64 / den as f64 },
        }
    }

    pub fn undefined(reason: &str) -> Self {
        Ratio::Undefined { reason: reason.into() }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Ratio::Defined { value } => Some(*value),
            Ratio::Undefined { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CoverageSummary {
    pub coverable_lines: u64,
    pub covered_lines: u64,
    pub percentage: Ratio,
}

impl CoverageSummary {
    pub fn new(covered: u64, coverable: u64) -> Result<Self, CoverageError> {
        if covered > coverable {
            return Err(CoverageError::Inconsistent { covered, coverable });
        }
        let percentage = if coverable == 0 {
            Ratio::undefined(NO_COVERABLE_CODE)
        } else {
            Ratio::of(covered, coverable)
        };
        Ok(CoverageSummary { coverable_lines: coverable, covered_lines: covered, percentage })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MetricsReport {
    pub test_method_count: usize,
    pub func_method_count: usize,
    pub test_class_count: usize,
    pub func_class_count: usize,
    pub method_ratio: Ratio,
    pub class_ratio: Ratio,
    pub total_assertions: u64,
    pub total_test_loc: u64,
    pub per_test_density: BTreeMap<String, f64>,
    pub project_density: f64,
    pub median_density: Option<f64>,
    pub coverage: Option<CoverageSummary>,
}

pub fn compute_method_ratio(inv: &ProjectInventory) -> Ratio {
    Ratio::of(inv.test_method_count as u64, inv.func_method_count as u64)
}

pub fn compute_class_ratio(inv: &ProjectInventory) -> Ratio {
    Ratio::of(inv.test_class_count as u64, inv.func_class_count as u64)
}

/// Assertions per body line; `None` for a body without code lines.
pub fn compute_assertion_density(assertions: usize, body_loc: u32) -> Option<f64> {
    (body_loc > 0).then(|| assertions as f64 / body_loc as f64)
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / 2.0 })
}

pub fn compute_metrics(
    inv: &ProjectInventory,
    classes: &[TestClassInfo],
    coverage: Option<CoverageSummary>,
    diags: &mut Vec<Diagnostic>,
) -> MetricsReport {
    let mut per_test = BTreeMap::new();
    let (mut assertions, mut loc) = (0u64, 0u64);
    for t in classes.iter().flat_map(|c| &c.tests) {
        match compute_assertion_density(t.assertions.len(), t.body_loc) {
            Some(d) => {
                per_test.insert(t.id.clone(), d);
                assertions += t.assertions.len() as u64;
                loc += t.body_loc as u64;
            }
            None => diags.push(
                Diagnostic::warning(format!("test `{}` has no body lines; density skipped", t.name))
                    .in_file(&t.file)
                    .at_line(t.line),
            ),
        }
    }
    let densities: Vec<f64> = per_test.values().copied().collect();
    MetricsReport {
        test_method_count: inv.test_method_count,
        func_method_count: inv.func_method_count,
        test_class_count: inv.test_class_count,
        func_class_count: inv.func_class_count,
        method_ratio: compute_method_ratio(inv),
        class_ratio: compute_class_ratio(inv),
        total_assertions: assertions,
        total_test_loc: loc,
        project_density: if loc == 0 { 0.0 } else { assertions as f64 / loc as f64 },
        median_density: median(&densities),
        per_test_density: per_test,
        coverage,
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CoverageError {
    #[error("cannot read coverage report {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed coverage report at element <{element}>: {message}")]
    Malformed { element: String, message: String },
    #[error("covered count {covered} exceeds coverable count {coverable}")]
    Inconsistent { covered: u64, coverable: u64 },
}

fn malformed(element: &str, message: impl Into<String>) -> CoverageError {
    CoverageError::Malformed { element: element.to_string(), message: message.into() }
}

/// Read an OpenCover XML report or a `covered,coverable` CSV file, chosen by
/// content: anything starting with `<` is XML.
pub fn ingest_coverage_report(path: &Path) -> Result<CoverageSummary, CoverageError> {
    let text = std::fs::read_to_string(path).map_err(|source| CoverageError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let trimmed = text.trim_start_matches('\u{feff}').trim_start();
    if trimmed.starts_with('<') {
        parse_opencover(trimmed)
    } else {
        parse_coverage_csv(trimmed)
    }
}

pub fn compute_coverage_percentage(summary: &CoverageSummary) -> Ratio {
    summary.percentage.clone()
}

/// Sums the per-module `<Summary>` points; falls back to the session summary
/// when no module carries one.
pub fn parse_opencover(xml: &str) -> Result<CoverageSummary, CoverageError> {
    let mut reader = Reader::from_str(xml);
    let mut stack: Vec<String> = Vec::new();
    let mut modules = (0u64, 0u64, 0usize);
    let mut session: Option<(u64, u64)> = None;
    let mut saw_root = false;
    loop {
        let event = reader.read_event().map_err(|e| {
            malformed(stack.last().map(String::as_str).unwrap_or("document"), e.to_string())
        })?;
        match event {
            Event::Start(e) => {
                let name = element_name(&e);
                visit(&e, &name, &stack, &mut modules, &mut session)?;
                saw_root = true;
                stack.push(name);
            }
            Event::Empty(e) => {
                let name = element_name(&e);
                visit(&e, &name, &stack, &mut modules, &mut session)?;
                saw_root = true;
            }
            Event::End(_) => {
                stack.pop();
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if let Some(open) = stack.last() {
        return Err(malformed(open, "element is not closed"));
    }
    if !saw_root {
        return Err(malformed("document", "no elements"));
    }
    let (visited, total) = if modules.2 > 0 {
        (modules.0, modules.1)
    } else {
        session.ok_or_else(|| malformed("CoverageSession", "no <Summary> with sequence point counts"))?
    };
    CoverageSummary::new(visited, total)
}

fn element_name(e: &BytesStart<'_>) -> String {
    String::from_utf8_lossy(e.local_name().as_ref()).into_owned()
}

fn visit(
    e: &BytesStart<'_>,
    name: &str,
    stack: &[String],
    modules: &mut (u64, u64, usize),
    session: &mut Option<(u64, u64)>,
) -> Result<(), CoverageError> {
    if name != "Summary" {
        return Ok(());
    }
    let parent = stack.last().map(String::as_str);
    if !matches!(parent, Some("Module" | "CoverageSession")) {
        return Ok(());
    }
    let mut visited = None;
    let mut total = None;
    for attr in e.attributes() {
        let attr = attr.map_err(|err| malformed(name, err.to_string()))?;
        let key = String::from_utf8_lossy(attr.key.local_name().as_ref()).into_owned();
        if key != "visitedSequencePoints" && key != "numSequencePoints" {
            continue;
        }
        let value = attr.unescape_value().map_err(|err| malformed(name, err.to_string()))?;
        let n: u64 = value
            .trim()
            .parse()
            .map_err(|_| malformed(name, format!("{key}=\"{value}\" is not a count")))?;
        if key == "visitedSequencePoints" {
            visited = Some(n);
        } else {
            total = Some(n);
        }
    }
    let (Some(v), Some(t)) = (visited, total) else {
        return Err(malformed(name, "missing visitedSequencePoints or numSequencePoints"));
    };
    if parent == Some("Module") {
        modules.0 += v;
        modules.1 += t;
        modules.2 += 1;
    } else {
        *session = Some((v, t));
    }
    Ok(())
}

/// Rows of `covered,coverable`, summed; a non-numeric first row is a header.
pub fn parse_coverage_csv(text: &str) -> Result<CoverageSummary, CoverageError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let (mut covered, mut coverable, mut rows) = (0u64, 0u64, 0usize);
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| malformed("csv", e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Option<(u64, u64)> = match (record.get(0), record.get(1), record.len()) {
            (Some(a), Some(b), 2) => a.parse().ok().zip(b.parse().ok()),
            _ => None,
        };
        match parsed {
            Some((a, b)) => {
                covered += a;
                coverable += b;
                rows += 1;
            }
            None if i == 0 => continue,
            None => return Err(malformed("csv", format!("row {} is not `covered,coverable`", i + 1))),
        }
    }
    if rows == 0 {
        return Err(malformed("csv", "no `covered,coverable` rows"));
    }
    CoverageSummary::new(covered, coverable)
}
