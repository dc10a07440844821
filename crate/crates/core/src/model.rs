//! Test-level facts: discovered tests, fixtures, assertions, production calls
//! and resource/API signals.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::csharp::{
    ArgumentKind, ByteSpan, InvocationExpr, MethodDecl, MethodKind, Statement, StatementKind,
    SyntaxUnit, TypeDecl,
};
use crate::diag::Diagnostic;
use crate::scanner::{simple_type_name, ProductionIndex};
use crate::text::{keyword_match, mentions_identifier};

pub const ARITY_DATA: &str = include_str!("../data/assert_arity.json");

const OBJECT_MEMBERS: &[&str] = &["ToString", "Equals", "GetHashCode", "GetType", "ReferenceEquals"];

/// NUnit constraint entry points: `Assert.That(x, Is.EqualTo(1))`.
const CONSTRAINT_HEADS: &[&str] = &["Is.", "Has.", "Does.", "Throws.", "Contains.", "Iz.", "Not."];

const WAIT_TYPES: &[&str] = &["WaitForSeconds", "WaitForSecondsRealtime", "WaitForFixedUpdate", "WaitForEndOfFrame", "WaitUntil", "WaitWhile"];

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct ArityFile {
    version: u32,
    minimum_arity: BTreeMap<String, usize>,
    tolerance_forms: Vec<String>,
}

/// Minimum non-message argument count per assertion form. Generic forms are
/// keyed with a `<>` suffix, e.g. `Assert.Throws<>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArityTable {
    pub version: u32,
    min: BTreeMap<String, usize>,
    /// Forms whose optional trailing argument may be a numeric tolerance.
    tolerance: BTreeSet<String>,
}

impl ArityTable {
    pub fn shipped() -> Self {
        let file: ArityFile = serde_json::from_str(ARITY_DATA).expect("shipped arity table is valid");
        ArityTable {
            version: file.version,
            min: file.minimum_arity,
            tolerance: file.tolerance_forms.into_iter().collect(),
        }
    }

    pub fn for_config(config: &Config) -> Self {
        let mut table = Self::shipped();
        for (k, v) in &config.arity_overrides {
            table.min.insert(k.clone(), *v);
        }
        table
    }

    pub fn min_arity(&self, key: &str) -> Option<usize> {
        self.min.get(key).copied()
    }

    pub fn len(&self) -> usize {
        self.min.len()
    }

    pub fn is_empty(&self) -> bool {
        self.min.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AssertionInfo {
    pub api_name: String,
    pub argument_count: usize,
    pub has_message: bool,
    pub line: u32,
    pub compares_text_representation: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProductionCall {
    /// `Type.Member`, `*.Member` when several types declare it, or
    /// `Type.op_Implicit(Target)` for an implicit conversion.
    pub identity: String,
    pub member: String,
    pub ambiguous: bool,
    pub line: u32,
    /// Called inside an assertion or feeding a value an assertion reads.
    pub flows_to_assertion: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignalSource {
    Receiver,
    DeclaredType,
    Creation,
    Literal,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResourceSignal {
    pub pattern: String,
    pub source: SignalSource,
    /// Variable or receiver the resource is accessed through; empty if none.
    pub subject: String,
    pub text: String,
    pub line: u32,
    /// Constructed with an in-memory argument such as `:memory:`.
    pub in_memory: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FixtureInfo {
    pub setup_methods: Vec<String>,
    pub teardown_methods: Vec<String>,
    pub assigned_fields: BTreeSet<String>,
    /// First setup line assigning each field.
    pub assignment_lines: BTreeMap<String, u32>,
    /// Fields holding a mock or in-memory resource.
    pub mocked_fields: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TestMethodInfo {
    pub id: String,
    pub name: String,
    pub class_name: String,
    pub file: String,
    pub attributes: Vec<String>,
    pub line: u32,
    pub body_loc: u32,
    pub assertions: Vec<AssertionInfo>,
    pub production_calls: Vec<ProductionCall>,
    pub resource_signals: Vec<ResourceSignal>,
    pub fixture_fields_read: BTreeSet<String>,
    pub api_signals: BTreeSet<String>,
    pub invoked_members: BTreeSet<String>,
    /// `Receiver.Member` for every qualified invocation.
    pub invoked_apis: BTreeSet<String>,
    pub type_names: BTreeSet<String>,
    pub string_literals: Vec<String>,
    pub mocked_locals: BTreeSet<String>,
    /// A position captured before a wait is compared after it, with no
    /// direct position assignment in the body.
    pub position_compare_across_wait: bool,
    /// Explicit invocations plus implicit conversion sites.
    pub invocation_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TestClassInfo {
    pub id: String,
    pub name: String,
    pub file: String,
    pub fixture: FixtureInfo,
    pub tests: Vec<TestMethodInfo>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Test classes of one unit: every type with at least one test method.
pub fn discover_tests(
    unit: &SyntaxUnit,
    index: &ProductionIndex,
    config: &Config,
    arity: &ArityTable,
) -> Vec<TestClassInfo> {
    let mut out = Vec::new();
    walk_types(&unit.declarations, "", &mut |path, t| {
        if let Some(class) = test_class(unit, path, t, index, config, arity) {
            out.push(class);
        }
    });
    out
}

fn walk_types(decls: &[TypeDecl], prefix: &str, f: &mut dyn FnMut(&str, &TypeDecl)) {
    for t in decls {
        let path = if prefix.is_empty() { t.name.clone() } else { format!("{prefix}.{}", t.name) };
        f(&path, t);
        walk_types(&t.nested, &path, f);
    }
}

fn test_class(
    unit: &SyntaxUnit,
    class_path: &str,
    t: &TypeDecl,
    index: &ProductionIndex,
    config: &Config,
    arity: &ArityTable,
) -> Option<TestClassInfo> {
    let test_methods: Vec<&MethodDecl> = t
        .methods
        .iter()
        .filter(|m| m.has_attribute(&config.test_attributes))
        .collect();
    if test_methods.is_empty() {
        return None;
    }
    let mut diagnostics = Vec::new();
    let fixture = build_fixture(t, config, &unit.path, &mut diagnostics);
    for base in &t.base_types {
        let name = simple_type_name(base);
        let interface_like = name.len() > 1
            && name.starts_with('I')
            && name[1..].starts_with(|c: char| c.is_ascii_uppercase());
        if !interface_like && !config.is_engine_api(&name) {
            diagnostics.push(
                Diagnostic::info(format!(
                    "fixtures inherited from `{name}` by `{class_path}` are not resolved"
                ))
                .in_file(&unit.path),
            );
        }
    }
    let tests = test_methods
        .into_iter()
        .map(|m| build_test(unit, class_path, t, m, index, config, arity))
        .collect();
    Some(TestClassInfo {
        id: format!("{}::{}", unit.path, class_path),
        name: class_path.to_string(),
        file: unit.path.clone(),
        fixture,
        tests,
        diagnostics,
    })
}

fn build_fixture(t: &TypeDecl, config: &Config, path: &str, diags: &mut Vec<Diagnostic>) -> FixtureInfo {
    let mut fx = FixtureInfo::default();
    for f in &t.fields {
        let init_mock = f.initializer.as_deref().is_some_and(|i| is_mock_value(i, config));
        if init_mock || is_mock_type(&f.type_name) {
            fx.mocked_fields.insert(f.name.clone());
        }
    }
    for m in &t.methods {
        if m.has_attribute(&config.teardown_attributes) {
            fx.teardown_methods.push(m.name.clone());
        }
        if !m.has_attribute(&config.setup_attributes) {
            continue;
        }
        fx.setup_methods.push(m.name.clone());
        for s in &m.statements {
            for a in &s.assignments {
                if !ASSIGNING.contains(&a.operator.as_str()) {
                    continue;
                }
                match a.simple_target() {
                    Some(name) if t.field(name).is_some() => {
                        fx.assigned_fields.insert(name.to_string());
                        fx.assignment_lines.entry(name.to_string()).or_insert(a.line);
                        if is_mock_value(&a.value, config) {
                            fx.mocked_fields.insert(name.to_string());
                        }
                    }
                    _ => diags.push(
                        Diagnostic::info(format!(
                            "setup `{}` assigns `{}`, which is not a declared field",
                            m.name, a.target
                        ))
                        .in_file(path)
                        .at_line(a.line),
                    ),
                }
            }
        }
    }
    fx
}

/// Operators that (re)initialize their target.
const ASSIGNING: &[&str] = &["=", "??="];

/// Whether an initializer expression produces a mock or in-memory resource.
pub fn is_mock_value(text: &str, config: &Config) -> bool {
    let compact: String = text.split_whitespace().collect::<Vec<_>>().join(" ");
    config.mock_apis.iter().any(|api| match api.strip_prefix("new ") {
        Some(ty) => mentions_identifier(&compact, ty) && compact.contains(&format!("new {ty}")),
        None => compact.contains(api.as_str()),
    }) || config.in_memory_patterns.iter().any(|p| compact.contains(p.as_str()))
}

fn is_mock_type(type_name: &str) -> bool {
    let t = type_name.trim();
    t.starts_with("Mock<") || t.contains(".Mock<")
}

/// Key into the arity table and display name, if `inv` is an assertion.
pub fn assertion_api(inv: &InvocationExpr, config: &Config) -> Option<(String, String)> {
    let chain = &inv.receiver_chain;
    if chain.len() < 2 {
        return None;
    }
    let class = &chain[chain.len() - 2];
    let member = inv.member();
    // a grouping block, its inner assertions are counted individually
    if !config.is_assertion_head(class) || member == "Multiple" {
        return None;
    }
    let api = format!("{class}.{member}");
    let key = if inv.generic { format!("{api}<>") } else { api.clone() };
    Some((api, key))
}

pub fn extract_assertions(method: &MethodDecl, arity: &ArityTable, config: &Config) -> Vec<AssertionInfo> {
    method
        .invocations()
        .filter_map(|inv| assertion_info(inv, arity, config))
        .collect()
}

fn assertion_info(inv: &InvocationExpr, arity: &ArityTable, config: &Config) -> Option<AssertionInfo> {
    let (api, key) = assertion_api(inv, config)?;
    let kinds = &inv.argument_kinds;
    let has_message = match arity.min_arity(&key) {
        Some(min) if inv.argument_count > min => {
            kinds[min..].iter().any(|k| k.is_string())
                || (kinds[min] == ArgumentKind::Other
                    && !arity.tolerance.contains(&api)
                    && looks_like_message(&inv.arguments[min]))
        }
        Some(_) => false,
        None => kinds.last().is_some_and(|k| k.is_string()),
    };
    Some(AssertionInfo {
        api_name: api,
        argument_count: inv.argument_count,
        has_message,
        line: inv.line,
        compares_text_representation: inv.calls_in_arguments.iter().any(|c| c == "ToString"),
    })
}

fn looks_like_message(arg: &str) -> bool {
    let a = arg.trim();
    let numeric = a
        .trim_start_matches('-')
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_digit() || c == '.');
    !(numeric
        || matches!(a, "null" | "true" | "false" | "default")
        || CONSTRAINT_HEADS.iter().any(|h| a.starts_with(h)))
}

/// Facts derived from a test body by [`extract_invocations`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InvocationFacts {
    pub production_calls: Vec<ProductionCall>,
    pub resource_signals: Vec<ResourceSignal>,
    pub api_signals: BTreeSet<String>,
    pub invoked_members: BTreeSet<String>,
    pub invoked_apis: BTreeSet<String>,
    pub type_names: BTreeSet<String>,
    pub mocked_locals: BTreeSet<String>,
    pub fixture_fields_read: BTreeSet<String>,
    pub implicit_conversions: usize,
}

/// Variables visible in a test body with their declared simple type
/// (`None` when implicitly typed and not inferable).
struct Scope<'a> {
    class: &'a TypeDecl,
    vars: BTreeMap<String, Option<String>>,
}

impl Scope<'_> {
    fn var_type(&self, name: &str) -> Option<Option<String>> {
        if let Some(t) = self.vars.get(name) {
            return Some(t.clone());
        }
        self.class.field(name).map(|f| Some(simple_type_name(&f.type_name)))
    }
}

fn local_type(type_name: &str, initializer: Option<&str>) -> Option<String> {
    if type_name != "var" {
        return Some(simple_type_name(type_name));
    }
    let init = initializer?.trim();
    let rest = init.strip_prefix("new ")?.trim_start();
    let end = rest.find(['(', '{', '<', '[']).unwrap_or(rest.len());
    let ty = simple_type_name(rest[..end].trim());
    (!ty.is_empty()).then_some(ty)
}

pub fn extract_invocations(
    method: &MethodDecl,
    class: &TypeDecl,
    index: &ProductionIndex,
    config: &Config,
) -> InvocationFacts {
    let mut scope = Scope { class, vars: BTreeMap::new() };
    for p in &method.parameters {
        scope.vars.insert(p.name.clone(), Some(simple_type_name(&p.type_name)));
    }
    for s in &method.statements {
        for l in &s.locals {
            scope
                .vars
                .entry(l.name.clone())
                .or_insert_with(|| local_type(&l.type_name, l.initializer.as_deref()));
        }
    }
    let own: BTreeSet<&str> = class.methods.iter().map(|m| m.name.as_str()).collect();
    let assertions: Vec<&InvocationExpr> = method
        .invocations()
        .filter(|i| assertion_api(i, config).is_some())
        .collect();
    let assertion_spans: Vec<ByteSpan> = assertions.iter().map(|a| a.span).collect();

    let mut facts = InvocationFacts { fixture_fields_read: fixture_reads(method, class), ..Default::default() };
    let mut calls: BTreeMap<String, ProductionCall> = BTreeMap::new();
    let mut add_call = |c: ProductionCall| {
        calls
            .entry(c.identity.clone())
            .and_modify(|e| {
                e.flows_to_assertion |= c.flows_to_assertion;
                e.line = e.line.min(c.line);
            })
            .or_insert(c);
    };

    for s in &method.statements {
        let feeds_assertion = statement_feeds_assertion(s, &assertions);
        for inv in &s.invocations {
            facts.invoked_members.insert(inv.member().to_string());
            if let [.., recv, member] = inv.receiver_chain.as_slice() {
                facts.invoked_apis.insert(format!("{recv}.{member}"));
            }
            if assertion_api(inv, config).is_some() {
                continue;
            }
            if let Some((identity, ambiguous)) = resolve_call(inv, &scope, &own, index, config) {
                let inside = assertion_spans.iter().any(|sp| sp.contains(&inv.span));
                add_call(ProductionCall {
                    identity,
                    member: inv.member().to_string(),
                    ambiguous,
                    line: inv.line,
                    flows_to_assertion: inside || feeds_assertion,
                });
            }
        }
        if s.kind == StatementKind::LocalDeclaration {
            for l in &s.locals {
                if let Some((identity, ambiguous)) = implicit_conversion(l, &scope, index) {
                    facts.implicit_conversions += 1;
                    let flows = assertions.iter().any(|a| mentions_identifier(&a.raw_text, &l.name));
                    add_call(ProductionCall {
                        identity,
                        member: "op_Implicit".into(),
                        ambiguous,
                        line: l.line,
                        flows_to_assertion: flows,
                    });
                }
            }
        }
    }
    let mut production: Vec<ProductionCall> = calls.into_values().collect();
    production.sort_by(|a, b| (a.line, &a.identity).cmp(&(b.line, &b.identity)));
    facts.production_calls = production;

    collect_types_and_signals(method, class, &scope, &mut facts, config);
    facts
}

fn statement_feeds_assertion(s: &Statement, assertions: &[&InvocationExpr]) -> bool {
    let names: Vec<&str> = s
        .locals
        .iter()
        .map(|l| l.name.as_str())
        .chain(s.assignments.iter().filter_map(|a| a.simple_target()))
        .collect();
    names.iter().any(|n| {
        assertions
            .iter()
            .any(|a| a.span.start >= s.span.end && mentions_identifier(&a.raw_text, n))
    })
}

/// Production identity for one invocation, with an ambiguity flag.
fn resolve_call(
    inv: &InvocationExpr,
    scope: &Scope<'_>,
    own: &BTreeSet<&str>,
    index: &ProductionIndex,
    config: &Config,
) -> Option<(String, bool)> {
    let member = inv.member();
    if OBJECT_MEMBERS.contains(&member) {
        return None;
    }
    // engine member names only exclude calls whose receiver type is unknown
    let engine_member = config.is_engine_api(member);
    let chain = &inv.receiver_chain;
    let unqualified = chain.len() == 1 || (chain.len() == 2 && matches!(chain[0].as_str(), "this" | "base"));
    if unqualified {
        if own.contains(member) || engine_member {
            return None;
        }
        return simple_lookup(member, index);
    }
    let recv = chain[chain.len() - 2].as_str();
    if config.is_engine_api(recv) || config.is_assertion_head(recv) {
        return None;
    }
    let recv_type = if chain.len() == 2 {
        match scope.var_type(recv) {
            Some(t) => t,
            None if recv.starts_with(|c: char| c.is_uppercase()) => Some(recv.to_string()),
            None => None,
        }
    } else {
        None
    };
    match recv_type {
        Some(ty) => {
            let hits: Vec<usize> = index
                .lookup_qualified(&ty, member)
                .iter()
                .copied()
                .filter(|&i| index.site(i).kind == MethodKind::Method)
                .collect();
            if !hits.is_empty() {
                Some((format!("{ty}.{member}"), false))
            } else if index.is_production_type(&ty) && !engine_member {
                simple_lookup(member, index)
            } else {
                None
            }
        }
        None if engine_member => None,
        None => simple_lookup(member, index),
    }
}

fn simple_lookup(member: &str, index: &ProductionIndex) -> Option<(String, bool)> {
    let types: BTreeSet<&str> = index
        .lookup(member)
        .iter()
        .map(|&i| index.site(i))
        .filter(|s| s.kind == MethodKind::Method)
        .map(|s| s.type_name.as_str())
        .collect();
    match types.len() {
        0 => None,
        1 => Some((format!("{}.{member}", types.into_iter().next().unwrap()), false)),
        _ => Some((format!("*.{member}"), true)),
    }
}

/// `T x = y;` where a production type declares an implicit conversion to `T`.
fn implicit_conversion(
    local: &crate::csharp::LocalVar,
    scope: &Scope<'_>,
    index: &ProductionIndex,
) -> Option<(String, bool)> {
    if local.type_name == "var" {
        return None;
    }
    let init = local.initializer.as_deref()?.trim();
    let plain = !init.is_empty()
        && init.starts_with(|c: char| c.is_alphabetic() || c == '_')
        && init.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '.')
        && !matches!(init, "null" | "true" | "false" | "default");
    if !plain {
        return None;
    }
    let target = simple_type_name(&local.type_name);
    let source_type = if init.contains('.') { None } else { scope.var_type(init).flatten() };
    if source_type.as_deref() == Some(target.as_str()) {
        return None;
    }
    let sites: BTreeSet<&str> = index
        .conversions_to(&target)
        .iter()
        .map(|&i| index.site(i))
        .filter(|s| s.kind == MethodKind::Conversion && s.method == "op_Implicit")
        .filter(|s| match &source_type {
            Some(src) => s.parameter_types.first() == Some(src) || s.type_name == *src,
            None => true,
        })
        .map(|s| s.type_name.as_str())
        .collect();
    match sites.len() {
        0 => None,
        1 => Some((format!("{}.op_Implicit({target})", sites.into_iter().next().unwrap()), false)),
        _ => Some((format!("*.op_Implicit({target})"), true)),
    }
}

/// Unqualified (or `this.`) identifiers naming a field, excluding names
/// shadowed by a parameter or an earlier local declaration.
fn fixture_reads(method: &MethodDecl, class: &TypeDecl) -> BTreeSet<String> {
    let mut shadowed: BTreeSet<&str> = method.parameters.iter().map(|p| p.name.as_str()).collect();
    let mut reads = BTreeSet::new();
    for s in &method.statements {
        let declared_here: BTreeSet<&str> = s.locals.iter().map(|l| l.name.as_str()).collect();
        for id in &s.identifiers {
            if id.qualified || shadowed.contains(id.name.as_str()) || declared_here.contains(id.name.as_str()) {
                continue;
            }
            if class.field(&id.name).is_some() {
                reads.insert(id.name.clone());
            }
        }
        shadowed.extend(declared_here);
    }
    reads
}

fn collect_types_and_signals(
    method: &MethodDecl,
    class: &TypeDecl,
    scope: &Scope<'_>,
    facts: &mut InvocationFacts,
    config: &Config,
) {
    let pattern_of = |name: &str| {
        config
            .resource_patterns
            .iter()
            .find(|p| keyword_match(name, p))
            .cloned()
    };
    let mut signals = BTreeSet::new();
    for p in &method.parameters {
        facts.type_names.insert(simple_type_name(&p.type_name));
    }
    for field in &facts.fixture_fields_read {
        let Some(f) = class.field(field) else { continue };
        let ty = simple_type_name(&f.type_name);
        if let Some(p) = pattern_of(&ty) {
            signals.insert(ResourceSignal {
                pattern: p,
                source: SignalSource::DeclaredType,
                subject: field.clone(),
                text: f.type_name.clone(),
                line: f.line,
                in_memory: false,
            });
        }
        if config.is_engine_api(&ty) {
            facts.api_signals.insert(ty.clone());
        }
        facts.type_names.insert(ty);
    }
    for s in &method.statements {
        for id in &s.identifiers {
            if config.is_engine_api(&id.name) {
                facts.api_signals.insert(id.name.clone());
            }
        }
        for l in &s.locals {
            let mocked = l.initializer.as_deref().is_some_and(|i| is_mock_value(i, config))
                || is_mock_type(&l.type_name);
            if mocked {
                facts.mocked_locals.insert(l.name.clone());
            }
            if let Some(ty) = local_type(&l.type_name, l.initializer.as_deref()) {
                if l.type_name != "var" {
                    if let Some(p) = pattern_of(&ty) {
                        signals.insert(ResourceSignal {
                            pattern: p,
                            source: SignalSource::DeclaredType,
                            subject: l.name.clone(),
                            text: l.type_name.clone(),
                            line: l.line,
                            in_memory: false,
                        });
                    }
                }
                if config.is_engine_api(&ty) {
                    facts.api_signals.insert(ty.clone());
                }
                facts.type_names.insert(ty);
            }
        }
        for a in &s.assignments {
            if let Some(t) = a.simple_target() {
                if is_mock_value(&a.value, config) {
                    facts.mocked_locals.insert(t.to_string());
                }
            }
        }
        let assigned_name = match (s.locals.as_slice(), s.assignments.as_slice()) {
            ([l], _) => Some(l.name.clone()),
            ([], [a]) => a.simple_target().map(str::to_string),
            _ => None,
        };
        for c in &s.creations {
            facts.type_names.insert(c.type_name.clone());
            if let Some(p) = pattern_of(&c.type_name) {
                signals.insert(ResourceSignal {
                    pattern: p,
                    source: SignalSource::Creation,
                    subject: assigned_name.clone().unwrap_or_else(|| c.type_name.clone()),
                    text: format!("new {}({})", c.type_text, c.arguments_text),
                    line: c.line,
                    in_memory: config.in_memory_patterns.iter().any(|m| c.arguments_text.contains(m.as_str())),
                });
            }
        }
        for inv in &s.invocations {
            let chain = &inv.receiver_chain;
            let head = chain[0].as_str();
            for seg in &chain[..chain.len() - 1] {
                if let Some(p) = pattern_of(seg) {
                    signals.insert(ResourceSignal {
                        pattern: p,
                        source: SignalSource::Receiver,
                        subject: head.to_string(),
                        text: inv.api_name(),
                        line: inv.line,
                        in_memory: false,
                    });
                }
            }
            if chain.len() >= 2 && !facts.fixture_fields_read.contains(head) {
                if let Some(Some(ty)) = scope.var_type(head) {
                    if let Some(p) = pattern_of(&ty) {
                        signals.insert(ResourceSignal {
                            pattern: p,
                            source: SignalSource::DeclaredType,
                            subject: head.to_string(),
                            text: ty,
                            line: inv.line,
                            in_memory: false,
                        });
                    }
                }
            }
        }
        for lit in &s.string_literals {
            if !(is_url_like(lit) || is_path_like(lit)) {
                continue;
            }
            let quoted_in = |inv: &&InvocationExpr| inv.arguments.iter().any(|a| a.contains(lit.as_str()));
            let subject = s
                .invocations
                .iter()
                .rev()
                .find(quoted_in)
                .map(|inv| {
                    if inv.receiver_chain.len() >= 2 {
                        inv.receiver_chain[0].clone()
                    } else {
                        String::new()
                    }
                })
                .or_else(|| assigned_name.clone())
                .unwrap_or_default();
            signals.insert(ResourceSignal {
                pattern: if is_url_like(lit) { "url".into() } else { "path".into() },
                source: SignalSource::Literal,
                subject,
                text: lit.clone(),
                line: s.line,
                in_memory: config.in_memory_patterns.iter().any(|m| lit.contains(m.as_str())),
            });
        }
    }
    facts.resource_signals = signals.into_iter().collect();
    facts.resource_signals.sort_by(|a, b| (a.line, &a.pattern, &a.subject).cmp(&(b.line, &b.pattern, &b.subject)));
}

pub fn is_url_like(s: &str) -> bool {
    let lower = s.to_ascii_lowercase();
    ["http://", "https://", "ftp://", "file://", "ws://", "wss://"]
        .iter()
        .any(|p| lower.starts_with(p))
}

const FILE_EXTENSIONS: &[&str] = &[
    "txt", "json", "xml", "csv", "db", "sqlite", "sqlite3", "png", "jpg", "jpeg", "asset", "bytes",
    "dat", "cfg", "ini", "log", "yaml", "yml", "wav", "mp3", "ogg", "prefab", "unity", "bin",
];

pub fn is_path_like(s: &str) -> bool {
    if s.is_empty() || s.chars().any(char::is_whitespace) || s.contains(['{', '}']) {
        return false;
    }
    let b = s.as_bytes();
    if b.len() >= 3 && b[0].is_ascii_alphabetic() && b[1] == b':' && (b[2] == b'\\' || b[2] == b'/') {
        return true;
    }
    let has_ext = s
        .rsplit_once('.')
        .is_some_and(|(stem, ext)| !stem.is_empty() && FILE_EXTENSIONS.contains(&ext.to_ascii_lowercase().as_str()));
    let has_sep = s.contains('/') || s.contains('\\');
    has_ext || (has_sep && s.split(['/', '\\']).filter(|p| !p.is_empty()).count() >= 2)
}

#[allow(clippy::too_many_arguments)]
fn build_test(
    unit: &SyntaxUnit,
    class_path: &str,
    class: &TypeDecl,
    m: &MethodDecl,
    index: &ProductionIndex,
    config: &Config,
    arity: &ArityTable,
) -> TestMethodInfo {
    let assertions = extract_assertions(m, arity, config);
    let facts = extract_invocations(m, class, index, config);
    let explicit = m.invocations().count();
    TestMethodInfo {
        id: format!("{}::{}.{}", unit.path, class_path, m.name),
        name: m.name.clone(),
        class_name: class_path.to_string(),
        file: unit.path.clone(),
        attributes: m.attributes.iter().map(|a| a.name.clone()).collect(),
        line: m.span.start,
        body_loc: m.body_loc,
        position_compare_across_wait: position_compare_across_wait(m, config),
        assertions,
        production_calls: facts.production_calls,
        resource_signals: facts.resource_signals,
        fixture_fields_read: facts.fixture_fields_read,
        api_signals: facts.api_signals,
        invoked_members: facts.invoked_members,
        invoked_apis: facts.invoked_apis,
        type_names: facts.type_names,
        string_literals: m.statements.iter().flat_map(|s| s.string_literals.iter().cloned()).collect(),
        mocked_locals: facts.mocked_locals,
        invocation_count: explicit + facts.implicit_conversions,
    }
}

fn is_position_read(text: &str) -> bool {
    text.contains(".position") || text.contains(".localPosition")
}

fn position_compare_across_wait(m: &MethodDecl, config: &Config) -> bool {
    let is_wait = |s: &Statement| {
        s.kind == StatementKind::Yield
            && (s.creations.iter().any(|c| WAIT_TYPES.contains(&c.type_name.as_str()))
                || s.raw_text.split_whitespace().collect::<Vec<_>>() == ["yield", "return", "null"])
    };
    let Some(wait) = m.statements.iter().position(is_wait) else {
        return false;
    };
    let direct_assignment = m.statements.iter().any(|s| {
        s.assignments
            .iter()
            .any(|a| a.target.ends_with(".position") || a.target.ends_with(".localPosition"))
    });
    if direct_assignment {
        return false;
    }
    let captured: Vec<&str> = m.statements[..wait]
        .iter()
        .flat_map(|s| &s.locals)
        .filter(|l| l.initializer.as_deref().is_some_and(is_position_read))
        .map(|l| l.name.as_str())
        .collect();
    m.statements[wait + 1..]
        .iter()
        .flat_map(|s| &s.invocations)
        .filter(|inv| assertion_api(inv, config).is_some())
        .any(|inv| {
            let mentions_capture = inv
                .arguments
                .iter()
                .any(|a| captured.iter().any(|c| mentions_identifier(a, c)));
            mentions_capture && inv.arguments.iter().any(|a| is_position_read(a))
        })
}
