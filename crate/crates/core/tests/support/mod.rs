//! Source generators with manifests, and brute-force reference detectors.
#![allow(dead_code)]

pub mod criteria;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use vrtestlint::config::Config;
use vrtestlint::csharp::parse_str;
use vrtestlint::model::TestClassInfo;
use vrtestlint::pipeline::test_classes;
use vrtestlint::scanner::ProjectInventory;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture_dir(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn write_files(root: &Path, files: &[(String, String)]) {
    for (rel, text) in files {
        let p = root.join(rel);
        std::fs::create_dir_all(p.parent().unwrap()).unwrap();
        std::fs::write(p, text).unwrap();
    }
}

pub fn inventory(files: &[(String, String)], config: &Config) -> ProjectInventory {
    let units = files.iter().map(|(p, s)| parse_str(s, p)).collect();
    ProjectInventory::from_units(PathBuf::from("."), units, config)
}

pub fn classes_of(files: &[(String, String)], config: &Config) -> Vec<TestClassInfo> {
    test_classes(&inventory(files, config), config)
}

// ---------------------------------------------------------------- counts

/// Expected project-level counts of a generated tree.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CountManifest {
    pub func_classes: usize,
    pub func_methods: usize,
    pub test_classes: usize,
    pub test_methods: usize,
    /// Per test method name: (assertions, body lines).
    pub tests: BTreeMap<String, (usize, u32)>,
}

/// A test method whose body spans exactly `loc` code lines (signature and
/// braces included) with `assertions` assertion statements.
pub fn sized_test(name: &str, loc: u32, assertions: usize) -> String {
    assert!(loc as usize >= 3 + assertions);
    let mut s = format!("    [Test]\n    public void {name}()\n    {{\n");
    let filler = loc as usize - 3 - assertions;
    for i in 0..filler {
        let _ = writeln!(s, "        int v{i} = {i};");
        if i % 3 == 0 {
            s.push_str("        // note\n\n");
        }
    }
    for i in 0..assertions {
        let _ = writeln!(s, "        Assert.AreEqual({i}, {i});");
    }
    s.push_str("    }\n");
    s
}

fn production_class(name: &str, methods: usize, with_property: bool) -> String {
    let mut s = format!("public class {name}\n{{\n    private int state;\n");
    if with_property {
        s.push_str("    public int Value { get; set; }\n");
    }
    let _ = writeln!(s, "    public class {name}Part {{ }}");
    for m in 0..methods {
        let _ = writeln!(s, "    public int M{m}(int x)\n    {{\n        state += x;\n        return state * {m};\n    }}");
    }
    s.push_str("}\n");
    s
}

/// Random tree with known class/method counts. Nested helper classes count
/// as functional classes without methods.
pub fn counts_project(r: &mut ChaCha8Rng) -> (Vec<(String, String)>, CountManifest) {
    let mut files = Vec::new();
    let mut m = CountManifest::default();
    for c in 0..r.gen_range(0..6) {
        let methods = r.gen_range(0..5);
        files.push((format!("Assets/Scripts/Prod{c}.cs"), production_class(&format!("Prod{c}"), methods, r.gen_bool(0.5))));
        m.func_classes += 2;
        m.func_methods += methods;
    }
    if r.gen_bool(0.3) {
        files.push(("Assets/Scripts/IShape.cs".into(), "public interface IShape { int Area(); }\n".into()));
    }
    for c in 0..r.gen_range(0..4) {
        let mut s = format!("using NUnit.Framework;\n\npublic class Suite{c}Tests\n{{\n");
        let n = r.gen_range(1..5);
        for t in 0..n {
            let name = format!("Case{c}_{t}");
            let loc = r.gen_range(6..20);
            let asserts = r.gen_range(0..3);
            s.push_str(&sized_test(&name, loc, asserts));
            m.tests.insert(name, (asserts, loc));
        }
        s.push_str("    private int Helper() { return 1; }\n}\n");
        files.push((format!("Assets/Tests/Suite{c}Tests.cs"), s));
        m.test_classes += 1;
        m.test_methods += n;
    }
    (files, m)
}

/// The formula project: 12 functional methods in 4 classes, 1 test class
/// with 3 tests, `Dense` being 12 lines long with 2 assertions.
pub fn formula_project() -> (Vec<(String, String)>, CountManifest) {
    let mut files = Vec::new();
    for c in 0..4 {
        let mut s = format!("public class Service{c}\n{{\n");
        for k in 0..3 {
            let _ = writeln!(s, "    public int Op{k}(int x)\n    {{\n        return x + {k};\n    }}");
        }
        s.push_str("    public int Total { get; set; }\n}\n");
        files.push((format!("Assets/Scripts/Service{c}.cs"), s));
    }
    let mut t = String::from("using NUnit.Framework;\n\npublic class ServiceTests\n{\n");
    t.push_str(&sized_test("Dense", 12, 2));
    t.push_str(&sized_test("Small", 4, 1));
    t.push_str(&sized_test("Empty", 5, 0));
    t.push_str("}\n");
    files.push(("Assets/Tests/ServiceTests.cs".into(), t));
    let m = CountManifest {
        func_classes: 4,
        func_methods: 12,
        test_classes: 1,
        test_methods: 3,
        tests: [("Dense".to_string(), (2, 12)), ("Small".to_string(), (1, 4)), ("Empty".to_string(), (0, 5))].into(),
    };
    (files, m)
}

// ---------------------------------------------------------------- smells

#[derive(Debug, Clone, PartialEq)]
pub enum FieldKind {
    Prod(usize),
    Plain,
    /// `IFileReader` mock, created inline or in setup.
    MockReader { inline: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldPlan {
    pub name: String,
    pub kind: FieldKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    StaticCall { class: usize, method: usize },
    FieldCall { field: usize, method: usize },
    ReadField { field: usize },
    Assert { message: bool, to_string: bool, call: Option<(usize, usize)> },
    Helper,
    Engine,
    FileRead,
    MockRead { field: usize },
    InMemoryDb,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestPlan {
    pub name: String,
    pub stmts: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassPlan {
    pub name: String,
    /// Production classes: method names (shared names across classes allowed).
    pub prod: Vec<Vec<String>>,
    pub fields: Vec<FieldPlan>,
    pub setup_assigned: Vec<usize>,
    pub tests: Vec<TestPlan>,
}

const METHOD_NAMES: &[&str] = &["Update", "Compute", "Load", "Save", "Reset", "Apply", "Tick", "Merge"];

impl ClassPlan {
    pub fn prod_name(&self, c: usize) -> String {
        format!("{}Prod{c}", self.name)
    }

    fn invocations(s: &Stmt) -> usize {
        match s {
            Stmt::StaticCall { .. } | Stmt::FieldCall { .. } | Stmt::Helper | Stmt::Engine | Stmt::FileRead | Stmt::MockRead { .. } => 1,
            Stmt::InMemoryDb => 1,
            Stmt::Assert { to_string, call, .. } => 1 + call.is_some() as usize + 2 * *to_string as usize,
            Stmt::ReadField { .. } => 0,
        }
    }

    pub fn random(r: &mut ChaCha8Rng, name: &str) -> Self {
        let prod: Vec<Vec<String>> = (0..r.gen_range(1..4))
            .map(|_| {
                let n = r.gen_range(1..4);
                let mut names: Vec<String> = METHOD_NAMES.choose_multiple(r, n).map(|s| s.to_string()).collect();
                names.sort();
                names
            })
            .collect();
        let mut fields = Vec::new();
        for i in 0..r.gen_range(0..4) {
            let kind = match r.gen_range(0..3) {
                0 => FieldKind::Prod(r.gen_range(0..prod.len())),
                1 => FieldKind::Plain,
                _ => FieldKind::Prod(r.gen_range(0..prod.len())),
            };
            fields.push(FieldPlan { name: format!("f{i}"), kind });
        }
        if r.gen_bool(0.3) {
            let n = fields.len();
            fields.push(FieldPlan { name: format!("reader{n}"), kind: FieldKind::MockReader { inline: r.gen_bool(0.5) } });
        }
        let setup_assigned: Vec<usize> = (0..fields.len())
            .filter(|&i| match fields[i].kind {
                FieldKind::MockReader { inline } => !inline,
                _ => r.gen_bool(0.6),
            })
            .collect();
        let prod_fields: Vec<usize> = (0..fields.len()).filter(|&i| matches!(fields[i].kind, FieldKind::Prod(_))).collect();
        let plain_fields: Vec<usize> = (0..fields.len()).filter(|&i| fields[i].kind == FieldKind::Plain).collect();
        let mock_fields: Vec<usize> = (0..fields.len()).filter(|&i| matches!(fields[i].kind, FieldKind::MockReader { .. })).collect();
        let mut tests = Vec::new();
        for t in 0..r.gen_range(1..=6) {
            let mut stmts = Vec::new();
            let mut budget = 8usize;
            for _ in 0..r.gen_range(0..7) {
                let s = match r.gen_range(0..10) {
                    0 | 1 => {
                        let class = r.gen_range(0..prod.len());
                        Stmt::StaticCall { class, method: r.gen_range(0..prod[class].len()) }
                    }
                    2 if !prod_fields.is_empty() => {
                        let field = *prod_fields.choose(r).unwrap();
                        let FieldKind::Prod(c) = fields[field].kind else { unreachable!() };
                        Stmt::FieldCall { field, method: r.gen_range(0..prod[c].len()) }
                    }
                    3 if !plain_fields.is_empty() => Stmt::ReadField { field: *plain_fields.choose(r).unwrap() },
                    4 | 5 => {
                        let call = r.gen_bool(0.3).then(|| {
                            let c = r.gen_range(0..prod.len());
                            (c, r.gen_range(0..prod[c].len()))
                        });
                        Stmt::Assert { message: r.gen_bool(0.5), to_string: r.gen_bool(0.15), call }
                    }
                    6 => Stmt::Helper,
                    7 => Stmt::Engine,
                    8 => match r.gen_range(0..3) {
                        0 => Stmt::FileRead,
                        1 => Stmt::InMemoryDb,
                        _ => match mock_fields.first() {
                            Some(&field) => Stmt::MockRead { field },
                            None => Stmt::FileRead,
                        },
                    },
                    _ => continue,
                };
                let cost = Self::invocations(&s);
                if cost > budget {
                    break;
                }
                budget -= cost;
                stmts.push(s);
            }
            tests.push(TestPlan { name: format!("Case{t}"), stmts });
        }
        ClassPlan { name: name.to_string(), prod, fields, setup_assigned, tests }
    }

    fn field_type(&self, f: &FieldPlan) -> String {
        match f.kind {
            FieldKind::Prod(c) => self.prod_name(c),
            FieldKind::Plain => "int".into(),
            FieldKind::MockReader { .. } => "IFileReader".into(),
        }
    }

    fn field_value(&self, f: &FieldPlan) -> String {
        match f.kind {
            FieldKind::Prod(c) => format!("new {}()", self.prod_name(c)),
            FieldKind::Plain => "3".into(),
            FieldKind::MockReader { .. } => "Substitute.For<IFileReader>()".into(),
        }
    }

    pub fn production_source(&self) -> String {
        let mut s = String::new();
        for (c, methods) in self.prod.iter().enumerate() {
            let _ = writeln!(s, "public class {}\n{{", self.prod_name(c));
            for m in methods {
                let _ = writeln!(s, "    public int {m}(int x = 0)\n    {{\n        return x + 1;\n    }}");
            }
            s.push_str("}\n\n");
        }
        s
    }

    fn stmt_source(&self, s: &Stmt) -> String {
        match s {
            Stmt::StaticCall { class, method } => format!("{}.{}(1);", self.prod_name(*class), self.prod[*class][*method]),
            Stmt::FieldCall { field, method } => {
                let f = &self.fields[*field];
                let FieldKind::Prod(c) = f.kind else { unreachable!() };
                format!("{}.{}(2);", f.name, self.prod[c][*method])
            }
            Stmt::ReadField { field } => format!("int copy{field} = {} + 1;", self.fields[*field].name),
            Stmt::Assert { message, to_string, call } => {
                let actual = match call {
                    Some((c, m)) => format!("{}.{}(0)", self.prod_name(*c), self.prod[*c][*m]),
                    None => "41 + 1".into(),
                };
                let (a, b) = if *to_string {
                    ("expected.ToString()".to_string(), format!("({actual}).ToString()"))
                } else {
                    ("42".to_string(), actual)
                };
                if *message {
                    format!("Assert.AreEqual({a}, {b}, \"value differs\");")
                } else {
                    format!("Assert.AreEqual({a}, {b});")
                }
            }
            Stmt::Helper => "Helper();".into(),
            Stmt::Engine => "Debug.Log(\"step\");".into(),
            Stmt::FileRead => "var text = File.ReadAllText(\"data/level.json\");".into(),
            Stmt::MockRead { field } => format!("{}.Read(\"data/level.json\");", self.fields[*field].name),
            Stmt::InMemoryDb => "using (var conn = new SqliteConnection(\"Data Source=:memory:\")) { }".into(),
        }
    }

    pub fn test_source(&self) -> String {
        let mut s = String::from("using System.IO;\nusing NSubstitute;\nusing NUnit.Framework;\nusing UnityEngine;\n\n");
        let _ = writeln!(s, "public class {}\n{{\n    private object expected = 42;", self.name);
        for f in &self.fields {
            match f.kind {
                FieldKind::MockReader { inline: true } => {
                    let _ = writeln!(s, "    private IFileReader {} = {};", f.name, self.field_value(f));
                }
                _ => {
                    let _ = writeln!(s, "    private {} {};", self.field_type(f), f.name);
                }
            }
        }
        if !self.setup_assigned.is_empty() {
            s.push_str("\n    [SetUp]\n    public void Init()\n    {\n");
            for &i in &self.setup_assigned {
                let f = &self.fields[i];
                let _ = writeln!(s, "        {} = {};", f.name, self.field_value(f));
            }
            s.push_str("    }\n");
        }
        for t in &self.tests {
            let _ = writeln!(s, "\n    [Test]\n    public void {}()\n    {{", t.name);
            for st in &t.stmts {
                let _ = writeln!(s, "        {}", self.stmt_source(st));
            }
            s.push_str("    }\n");
        }
        s.push_str("\n    private void Helper()\n    {\n    }\n}\n");
        s
    }

    pub fn files(&self) -> Vec<(String, String)> {
        vec![
            (format!("Assets/Scripts/{}Prod.cs", self.name), self.production_source()),
            (format!("Assets/Tests/{}.cs", self.name), self.test_source()),
        ]
    }

    // ------------------------------------------------------- plan facts

    pub fn identities(&self, t: &TestPlan) -> BTreeSet<String> {
        let mut ids = BTreeSet::new();
        for s in &t.stmts {
            match s {
                Stmt::StaticCall { class, method } | Stmt::Assert { call: Some((class, method)), .. } => {
                    ids.insert(format!("{}.{}", self.prod_name(*class), self.prod[*class][*method]));
                }
                Stmt::FieldCall { field, method } => {
                    let FieldKind::Prod(c) = self.fields[*field].kind else { unreachable!() };
                    ids.insert(format!("{}.{}", self.prod_name(c), self.prod[c][*method]));
                }
                _ => {}
            }
        }
        ids
    }

    pub fn reads(&self, t: &TestPlan) -> BTreeSet<usize> {
        t.stmts
            .iter()
            .filter_map(|s| match s {
                Stmt::FieldCall { field, .. } | Stmt::ReadField { field } | Stmt::MockRead { field } => Some(*field),
                _ => None,
            })
            .collect()
    }

    pub fn assertions(t: &TestPlan) -> Vec<(bool, bool)> {
        t.stmts
            .iter()
            .filter_map(|s| match s {
                Stmt::Assert { message, to_string, .. } => Some((*message, *to_string)),
                _ => None,
            })
            .collect()
    }
}

/// Expected findings: (kind, test name) for method smells, and the
/// (field, test) pairs of GF.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Expected {
    pub method_smells: BTreeSet<(String, String)>,
    pub gf_pairs: BTreeSet<(String, String)>,
    pub et_sizes: BTreeMap<String, usize>,
}

/// Brute-force smell reference computed from the plan alone.
pub fn reference_smells(plan: &ClassPlan) -> Expected {
    let mut e = Expected::default();
    for t in &plan.tests {
        let asserts = ClassPlan::assertions(t);
        let mut unmessaged = 0;
        for a in &asserts {
            if !a.0 {
                unmessaged += 1;
            }
        }
        if asserts.len() > 1 && unmessaged > 0 {
            e.method_smells.insert(("AR".into(), t.name.clone()));
        }
        for a in &asserts {
            if a.1 {
                e.method_smells.insert(("SE".into(), t.name.clone()));
            }
        }
        let ids = plan.identities(t);
        if ids.len() > 1 {
            e.method_smells.insert(("ET".into(), t.name.clone()));
            e.et_sizes.insert(t.name.clone(), ids.len());
        }
        for s in &t.stmts {
            if *s == Stmt::FileRead {
                e.method_smells.insert(("MG".into(), t.name.clone()));
            }
        }
    }
    for (i, a) in plan.tests.iter().enumerate() {
        for (j, b) in plan.tests.iter().enumerate() {
            if i == j {
                continue;
            }
            for x in plan.identities(a) {
                for y in plan.identities(b) {
                    if x == y {
                        e.method_smells.insert(("LT".into(), a.name.clone()));
                    }
                }
            }
        }
    }
    for &f in &plan.setup_assigned {
        for t in &plan.tests {
            if !plan.reads(t).contains(&f) {
                e.gf_pairs.insert((plan.fields[f].name.clone(), t.name.clone()));
            }
        }
    }
    e
}

// ---------------------------------------------------------------- large trees

/// Deterministic tree of at least `min_lines` code lines.
pub fn large_tree(seed: u64, min_lines: usize) -> Vec<(String, String)> {
    let code = |t: &str| vrtestlint::csharp::count_loc_str(t).code_lines as usize;
    let mut r = rng(seed);
    let mut files = Vec::new();
    let mut lines = 0;
    let mut i = 0;
    while lines < min_lines {
        let plan = ClassPlan::random(&mut r, &format!("Module{i}Tests"));
        for (path, text) in plan.files() {
            lines += code(&text);
            files.push((path, text));
        }
        let mut s = format!("namespace Game.Module{i}\n{{\n    public class Worker{i}\n    {{\n        private int total;\n");
        for m in 0..40 {
            let _ = writeln!(
                s,
                "        public int Step{m}(int x)\n        {{\n            if (x > {m})\n            {{\n                total += x;\n            }}\n            else\n            {{\n                total -= {m};\n            }}\n            return total;\n        }}"
            );
        }
        s.push_str("    }\n}\n");
        lines += code(&s);
        files.push((format!("Assets/Scripts/Module{i}/Worker{i}.cs"), s));
        i += 1;
    }
    files
}

// ---------------------------------------------------------------- mutation

const SNIPPETS: &[&[u8]] = &[b"{", b"}", b"(", b")", b"\"", b"'", b"/*", b"*/", b"//", b"@\"", b"$\"", b"#if X\n", b"\\", b"<", b">", b";", b"\n", b"\xff", b"\xe2\x82"];

/// Random byte-level mutation: flips, inserts, deletions and snippet splices.
pub fn mutate(r: &mut ChaCha8Rng, src: &[u8]) -> Vec<u8> {
    let mut out = src.to_vec();
    for _ in 0..r.gen_range(1..5) {
        let at = if out.is_empty() { 0 } else { r.gen_range(0..out.len()) };
        match r.gen_range(0..5) {
            0 if !out.is_empty() => out[at] = r.gen(),
            1 => out.insert(at, r.gen_range(0x20..0x7f)),
            2 if !out.is_empty() => {
                let end = (at + r.gen_range(1..16)).min(out.len());
                out.drain(at..end);
            }
            3 => {
                let s = SNIPPETS.choose(r).unwrap();
                out.splice(at..at, s.iter().copied());
            }
            _ => {
                if out.len() > 2 {
                    let a = r.gen_range(0..out.len());
                    let b = (a + r.gen_range(1..64)).min(out.len());
                    let chunk: Vec<u8> = out[a..b].to_vec();
                    let to = r.gen_range(0..out.len());
                    out.splice(to..to, chunk);
                }
            }
        }
    }
    out
}

pub fn cs_files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = walkdir::WalkDir::new(dir)
        .into_iter()
        .filter_map(Result::ok)
        .filter(|e| e.path().extension().is_some_and(|x| x == "cs"))
        .map(|e| e.into_path())
        .collect();
    v.sort();
    v
}

/// Findings of the real pipeline, in the shape of [`Expected`].
pub fn observed_smells(plan: &ClassPlan, config: &Config) -> Expected {
    use vrtestlint::smells::{detect_class, SmellKind};
    let classes = classes_of(&plan.files(), config);
    let mut e = Expected::default();
    for class in &classes {
        for f in detect_class(class, config) {
            if f.kind == SmellKind::GF {
                for ev in &f.evidence {
                    let parts: Vec<&str> = ev.text.split('`').collect();
                    e.gf_pairs.insert((parts[1].to_string(), parts[3].to_string()));
                }
                continue;
            }
            let t = class.tests.iter().find(|t| t.id == f.subject).expect("finding names a test");
            e.method_smells.insert((format!("{:?}", f.kind), t.name.clone()));
            if f.kind == SmellKind::ET {
                e.et_sizes.insert(t.name.clone(), f.evidence.len());
            }
        }
    }
    e
}
