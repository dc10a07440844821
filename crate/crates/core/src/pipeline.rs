//! scan, model, metrics, smells, taxonomy: one project or a corpus.

use std::path::{Path, PathBuf};
use std::process::Command;

use rayon::prelude::*;

use crate::config::Config;
use crate::diag::Diagnostic;
use crate::metrics::{compute_assertion_density, compute_metrics, ingest_coverage_report, CoverageError, CoverageSummary};
use crate::model::{discover_tests, ArityTable, TestClassInfo};
use crate::report::{CorpusEntry, CorpusReport, EntryStatus, ProjectReport, TestEntry, SCHEMA_VERSION, TOOL_VERSION};
use crate::scanner::{build_production_index, scan_project, ProjectInventory, ScanError};
use crate::smells::{detect_class, smell_summary};
use crate::taxonomy::{classify_test, taxonomy_summary, RuleTable};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Scan(#[from] ScanError),
    #[error(transparent)]
    Coverage(#[from] CoverageError),
}

pub fn timestamp_now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

pub fn analyze_project(
    root: &Path,
    config: &Config,
    coverage_report: Option<&Path>,
) -> Result<ProjectReport, PipelineError> {
    let inv = scan_project(root, config)?;
    let coverage = coverage_report.map(ingest_coverage_report).transpose()?;
    Ok(analyze_inventory(&inv, config, coverage, &root.display().to_string()))
}

pub fn test_classes(inv: &ProjectInventory, config: &Config) -> Vec<TestClassInfo> {
    let index = build_production_index(inv);
    let arity = ArityTable::for_config(config);
    let units: Vec<_> = inv.test_units().collect();
    units
        .par_iter()
        .map(|u| discover_tests(u, &index, config, &arity))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

pub fn analyze_inventory(
    inv: &ProjectInventory,
    config: &Config,
    coverage: Option<CoverageSummary>,
    project: &str,
) -> ProjectReport {
    let classes = test_classes(inv, config);
    let rules = RuleTable::with_override(config.taxonomy_rules.as_ref());
    let mut diagnostics: Vec<Diagnostic> = inv.diagnostics.clone();
    diagnostics.extend(inv.source_units.iter().flat_map(|u| u.diagnostics.iter().cloned()));
    diagnostics.extend(classes.iter().flat_map(|c| c.diagnostics.iter().cloned()));
    let metrics = compute_metrics(inv, &classes, coverage, &mut diagnostics);

    let findings: Vec<_> = classes.par_iter().flat_map_iter(|c| detect_class(c, config)).collect();
    let test_count: usize = classes.iter().map(|c| c.tests.len()).sum();
    let summary = smell_summary(test_count, &findings);

    let tests: Vec<TestEntry> = classes
        .iter()
        .flat_map(|c| &c.tests)
        .map(|t| TestEntry {
            id: t.id.clone(),
            name: t.name.clone(),
            class_name: t.class_name.clone(),
            file: t.file.clone(),
            line: t.line,
            body_loc: t.body_loc,
            assertion_count: t.assertions.len(),
            density: compute_assertion_density(t.assertions.len(), t.body_loc),
            production_calls: t.production_calls.iter().map(|c| c.identity.clone()).collect(),
            smells: {
                let mut k: Vec<_> = findings.iter().filter(|f| f.tests.contains(&t.id)).map(|f| f.kind).collect();
                k.sort();
                k.dedup();
                k
            },
            labels: classify_test(t, &rules),
        })
        .collect();
    let taxonomy = taxonomy_summary(tests.iter().map(|t| t.labels.as_slice()));
    diagnostics.sort();
    diagnostics.dedup();
    ProjectReport {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.into(),
        timestamp: timestamp_now(),
        project: project.to_string(),
        unity_version: inv.unity_version.clone(),
        metrics,
        findings,
        smell_summary: summary,
        taxonomy,
        tests,
        diagnostics,
    }
}

/// Non-empty, non-comment lines of a corpus list file.
pub fn read_list(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

pub fn is_git_url(entry: &str) -> bool {
    entry.contains("://") || entry.starts_with("git@") || entry.ends_with(".git")
}

fn clone_dir(entry: &str) -> PathBuf {
    let name: String = entry
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect();
    std::env::temp_dir()
        .join(format!("vrtestlint-clones-{}", std::process::id()))
        .join(name)
}

fn clone(url: &str) -> Result<PathBuf, String> {
    let dest = clone_dir(url);
    if dest.exists() {
        std::fs::remove_dir_all(&dest).map_err(|e| format!("cannot clear {}: {e}", dest.display()))?;
    }
    let out = Command::new("git")
        .args(["clone", "--depth", "1", "--quiet", url])
        .arg(&dest)
        .env("GIT_TERMINAL_PROMPT", "0")
        .output()
        .map_err(|e| format!("cannot run git: {e}"))?;
    if !out.status.success() {
        return Err(format!("git clone failed: {}", String::from_utf8_lossy(&out.stderr).trim()));
    }
    Ok(dest)
}

/// Scan one list entry. Relative paths resolve against `base`.
pub fn scan_entry(entry: &str, base: &Path, config: &Config) -> CorpusEntry {
    let failed = |reason: String| CorpusEntry {
        source: entry.to_string(),
        status: EntryStatus::Failed,
        reason: Some(reason),
        report: None,
    };
    let (root, cloned) = if is_git_url(entry) {
        match clone(entry) {
            Ok(p) => (p, true),
            Err(e) => return failed(e),
        }
    } else {
        let p = Path::new(entry);
        (if p.is_absolute() { p.to_path_buf() } else { base.join(p) }, false)
    };
    let result = scan_project(&root, config);
    if cloned {
        let _ = std::fs::remove_dir_all(&root);
    }
    match result {
        Ok(inv) => CorpusEntry {
            source: entry.to_string(),
            status: EntryStatus::Ok,
            reason: None,
            report: Some(analyze_inventory(&inv, config, None, entry)),
        },
        Err(e) => failed(e.to_string()),
    }
}

/// Scan every entry, reusing successful entries of `previous` (resume).
pub fn run_corpus(entries: &[String], base: &Path, config: &Config, previous: Option<&CorpusReport>) -> CorpusReport {
    let scanned: Vec<CorpusEntry> = entries
        .par_iter()
        .map(|e| {
            let done = previous.and_then(|p| {
                p.entries.iter().find(|x| &x.source == e && x.status == EntryStatus::Ok)
            });
            match done {
                Some(d) => d.clone(),
                None => scan_entry(e, base, config),
            }
        })
        .collect();
    CorpusReport::new(scanned, timestamp_now())
}
