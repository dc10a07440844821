//! Repository walk, test/functional partition and the production-method index.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::config::Config;
use crate::csharp::{parse_source, MethodKind, SyntaxUnit, TypeDecl, TypeKind};
use crate::diag::Diagnostic;

#[derive(Debug, thiserror::Error)]
pub enum ScanError {
    #[error("project root {0} does not exist or is not a directory")]
    RootMissing(PathBuf),
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FileClass {
    Test,
    Functional,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectInventory {
    pub root: PathBuf,
    pub unity_version: Option<String>,
    /// Sorted by relative path.
    pub source_units: Vec<SyntaxUnit>,
    pub classes: Vec<FileClass>,
    pub func_class_count: usize,
    pub func_method_count: usize,
    pub test_class_count: usize,
    pub test_method_count: usize,
    pub diagnostics: Vec<Diagnostic>,
}

impl ProjectInventory {
    pub fn test_units(&self) -> impl Iterator<Item = &SyntaxUnit> {
        self.units_of(FileClass::Test)
    }

    pub fn functional_units(&self) -> impl Iterator<Item = &SyntaxUnit> {
        self.units_of(FileClass::Functional)
    }

    fn units_of(&self, class: FileClass) -> impl Iterator<Item = &SyntaxUnit> {
        self.source_units
            .iter()
            .zip(&self.classes)
            .filter(move |(_, c)| **c == class)
            .map(|(u, _)| u)
    }

    /// Build an inventory from already parsed units.
    pub fn from_units(root: PathBuf, mut units: Vec<SyntaxUnit>, config: &Config) -> Self {
        units.sort_by(|a, b| a.path.cmp(&b.path));
        let classes: Vec<FileClass> = units.iter().map(|u| classify_file(u, config)).collect();
        let mut inv = ProjectInventory {
            root,
            unity_version: None,
            source_units: units,
            classes,
            func_class_count: 0,
            func_method_count: 0,
            test_class_count: 0,
            test_method_count: 0,
            diagnostics: Vec::new(),
        };
        let counts = Counts::of(&inv, config);
        inv.func_class_count = counts.func_classes;
        inv.func_method_count = counts.func_methods;
        inv.test_class_count = counts.test_classes;
        inv.test_method_count = counts.test_methods;
        for (unit, class) in inv.source_units.iter().zip(&inv.classes) {
            let has_setup = unit
                .all_types()
                .iter()
                .any(|t| t.methods.iter().any(|m| m.has_attribute(&config.setup_attributes)));
            if *class == FileClass::Functional && has_setup {
                inv.diagnostics.push(
                    Diagnostic::info("fixture-only file: setup methods without tests").in_file(&unit.path),
                );
            }
        }
        inv
    }
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct Counts {
    pub func_classes: usize,
    pub func_methods: usize,
    pub test_classes: usize,
    pub test_methods: usize,
}

impl Counts {
    pub fn of(inv: &ProjectInventory, config: &Config) -> Self {
        let mut c = Counts::default();
        for unit in inv.functional_units() {
            for t in unit.all_types() {
                if matches!(t.kind, TypeKind::Class | TypeKind::Struct) {
                    c.func_classes += 1;
                }
                c.func_methods += t.methods.iter().filter(|m| m.has_body).count();
            }
        }
        for unit in inv.test_units() {
            for t in unit.all_types() {
                let tests = test_method_count(t, config);
                c.test_methods += tests;
                if tests > 0 || t.has_attribute(&config.fixture_attributes) {
                    c.test_classes += 1;
                }
            }
        }
        c
    }
}

fn test_method_count(t: &TypeDecl, config: &Config) -> usize {
    t.methods
        .iter()
        .filter(|m| m.has_attribute(&config.test_attributes))
        .count()
}

pub fn classify_file(unit: &SyntaxUnit, config: &Config) -> FileClass {
    let is_test = unit.all_types().iter().any(|t| {
        t.has_attribute(&config.fixture_attributes) || test_method_count(t, config) > 0
    });
    if is_test {
        FileClass::Test
    } else {
        FileClass::Functional
    }
}

/// Walk `root`, parse every C# file outside excluded directories and build
/// the inventory. Files are parsed in parallel on the current rayon pool.
pub fn scan_project(root: &Path, config: &Config) -> Result<ProjectInventory, ScanError> {
    if !root.is_dir() {
        return Err(ScanError::RootMissing(root.to_path_buf()));
    }
    let globs = config.exclude_matcher()?;
    let mut diagnostics = Vec::new();
    let mut files = Vec::new();
    let walker = WalkDir::new(root)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(|e| {
            e.depth() == 0
                || !e.file_type().is_dir()
                || !config.is_excluded_dir(&e.file_name().to_string_lossy())
        });
    for entry in walker {
        let entry = match entry {
            Ok(e) => e,
            Err(err) => {
                diagnostics.push(Diagnostic::warning(format!("unreadable path skipped: {err}")));
                continue;
            }
        };
        if !entry.file_type().is_file() {
            continue;
        }
        let is_cs = entry
            .path()
            .extension()
            .is_some_and(|x| x.eq_ignore_ascii_case("cs"));
        if !is_cs {
            continue;
        }
        let rel = relative_path(root, entry.path());
        if globs.is_match(&rel) {
            continue;
        }
        files.push((entry.into_path(), rel));
    }

    let parsed: Vec<Result<SyntaxUnit, Diagnostic>> = files
        .par_iter()
        .map(|(path, rel)| match fs::read(path) {
            Ok(bytes) => Ok(parse_source(&bytes, rel)),
            Err(e) => Err(Diagnostic::warning(format!("unreadable file skipped: {e}")).in_file(rel)),
        })
        .collect();
    let mut units = Vec::with_capacity(parsed.len());
    for p in parsed {
        match p {
            Ok(u) => units.push(u),
            Err(d) => diagnostics.push(d),
        }
    }

    let mut inv = ProjectInventory::from_units(root.to_path_buf(), units, config);
    let (version, version_diag) = detect_unity_version(root);
    inv.unity_version = version;
    diagnostics.extend(version_diag);
    diagnostics.append(&mut inv.diagnostics);
    inv.diagnostics = diagnostics;
    Ok(inv)
}

/// Relative path with forward slashes.
pub fn relative_path(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

const VERSION_FILE: &str = "ProjectSettings/ProjectVersion.txt";

/// Editor version from `ProjectSettings/ProjectVersion.txt` at the root or,
/// failing that, in the shallowest subdirectory that has one.
pub fn detect_unity_version(root: &Path) -> (Option<String>, Option<Diagnostic>) {
    let direct = root.join(VERSION_FILE);
    let file = if direct.is_file() {
        Some(direct)
    } else {
        WalkDir::new(root)
            .max_depth(4)
            .sort_by_file_name()
            .into_iter()
            .filter_entry(|e| e.depth() == 0 || !e.file_name().to_string_lossy().starts_with('.'))
            .filter_map(Result::ok)
            .filter(|e| e.file_type().is_file() && e.file_name() == "ProjectVersion.txt")
            .filter(|e| e.path().parent().is_some_and(|p| p.ends_with("ProjectSettings")))
            .min_by_key(|e| e.depth())
            .map(|e| e.into_path())
    };
    let Some(file) = file else {
        return (None, None);
    };
    let rel = relative_path(root, &file);
    match fs::read_to_string(&file) {
        Ok(text) => match parse_project_version(&text) {
            Some(v) => (Some(v), None),
            None => (
                None,
                Some(Diagnostic::warning("malformed ProjectVersion.txt: no m_EditorVersion").in_file(rel)),
            ),
        },
        Err(e) => (
            None,
            Some(Diagnostic::warning(format!("unreadable ProjectVersion.txt: {e}")).in_file(rel)),
        ),
    }
}

pub fn parse_project_version(text: &str) -> Option<String> {
    text.lines().find_map(|line| {
        let value = line.trim_start().strip_prefix("m_EditorVersion:")?.trim();
        (!value.is_empty()).then(|| value.to_string())
    })
}

/// Generation bucket: `2019.4.1f1` -> `2019`, `5.6.3p1` -> `5`.
pub fn unity_major(version: &str) -> Option<String> {
    let major = version.split('.').next()?;
    (!major.is_empty() && major.bytes().all(|b| b.is_ascii_digit())).then(|| major.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MethodSite {
    pub type_name: String,
    pub method: String,
    pub kind: MethodKind,
    pub conversion_target: Option<String>,
    /// Simple type names of the parameters.
    pub parameter_types: Vec<String>,
    pub path: String,
    pub line: u32,
}

impl MethodSite {
    pub fn identity(&self) -> String {
        match (&self.kind, &self.conversion_target) {
            (MethodKind::Conversion, Some(t)) => format!("{}.{}({})", self.type_name, self.method, t),
            _ => format!("{}.{}", self.type_name, self.method),
        }
    }
}

/// Methods with bodies declared in functional units, keyed by simple and
/// type-qualified name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProductionIndex {
    sites: Vec<MethodSite>,
    by_name: BTreeMap<String, Vec<usize>>,
    by_qualified: BTreeMap<String, Vec<usize>>,
    conversions: BTreeMap<String, Vec<usize>>,
    types: BTreeSet<String>,
}

pub fn build_production_index(inv: &ProjectInventory) -> ProductionIndex {
    let mut index = ProductionIndex::default();
    for unit in inv.functional_units() {
        for t in unit.all_types() {
            index.types.insert(t.name.clone());
            for m in t.methods.iter().filter(|m| m.has_body) {
                let id = index.sites.len();
                index.sites.push(MethodSite {
                    type_name: t.name.clone(),
                    method: m.name.clone(),
                    kind: m.kind,
                    conversion_target: m.conversion_target.clone(),
                    parameter_types: m.parameters.iter().map(|p| simple_type_name(&p.type_name)).collect(),
                    path: unit.path.clone(),
                    line: m.span.start,
                });
                index.by_name.entry(m.name.clone()).or_default().push(id);
                index
                    .by_qualified
                    .entry(format!("{}.{}", t.name, m.name))
                    .or_default()
                    .push(id);
                if let Some(target) = &m.conversion_target {
                    index.conversions.entry(simple_type_name(target)).or_default().push(id);
                }
            }
        }
    }
    index
}

impl ProductionIndex {
    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn site(&self, id: usize) -> &MethodSite {
        &self.sites[id]
    }

    pub fn sites(&self) -> &[MethodSite] {
        &self.sites
    }

    pub fn lookup(&self, name: &str) -> &[usize] {
        self.by_name.get(name).map_or(&[], Vec::as_slice)
    }

    pub fn lookup_qualified(&self, type_name: &str, method: &str) -> &[usize] {
        self.by_qualified
            .get(&format!("{type_name}.{method}"))
            .map_or(&[], Vec::as_slice)
    }

    pub fn is_production_type(&self, name: &str) -> bool {
        self.types.contains(name)
    }

    /// User-defined conversions whose target type has this simple name.
    pub fn conversions_to(&self, target: &str) -> &[usize] {
        self.conversions
            .get(&simple_type_name(target))
            .map_or(&[], Vec::as_slice)
    }
}

/// `System.Collections.Generic.List<int>?` -> `List`.
pub fn simple_type_name(text: &str) -> String {
    let base = text.split('<').next().unwrap_or(text);
    let base = base.trim().trim_end_matches(['?', '*', ']', '[']);
    base.rsplit(['.', ':']).next().unwrap_or(base).trim().to_string()
}
