//! Acceptance criteria. Each check returns a short detail line or the reason
//! it failed.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;

use vrtestlint::config::Config;
use vrtestlint::csharp::{parse_source, tokenize_str};
use vrtestlint::diag::Severity;
use vrtestlint::metrics::{compute_coverage_percentage, ingest_coverage_report};
use vrtestlint::pipeline::analyze_project;
use vrtestlint::report::{to_json, ProjectReport};
use vrtestlint::smells::SmellKind;

use super::*;

pub type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn scan(dir: &Path) -> Result<ProjectReport, String> {
    analyze_project(dir, &Config::default(), None).map_err(|e| e.to_string())
}

fn labels(r: &ProjectReport, test: &str) -> Vec<String> {
    r.test(test).map(|t| t.labels.iter().map(|l| l.category.clone()).collect()).unwrap_or_default()
}

fn findings_of<'a>(r: &'a ProjectReport, test: &str) -> Vec<&'a vrtestlint::smells::SmellFinding> {
    let Some(t) = r.test(test) else { return Vec::new() };
    r.findings.iter().filter(|f| f.tests.contains(&t.id)).collect()
}

pub fn golden_listings() -> Outcome {
    let start = Instant::now();
    let r = scan(&fixture_dir("vr-corpus"))?;
    let elapsed = start.elapsed();

    let l1: Vec<_> = findings_of(&r, "TestListFeedback").iter().map(|f| f.kind).collect();
    ensure!(l1 == [SmellKind::AR], "Listing 1 findings {l1:?}, expected [AR]");

    let gf: Vec<_> = r.findings.iter().filter(|f| f.kind == SmellKind::GF).collect();
    ensure!(
        gf.len() == 1 && gf[0].subject.ends_with("::VimeoRecorderTest") && gf[0].evidence.iter().all(|e| e.text.contains("`obj`")),
        "Listing 2 GF findings {gf:?}"
    );

    let l3: Vec<_> = findings_of(&r, "CoordinateSystemsTest").into_iter().filter(|f| f.kind == SmellKind::ET).collect();
    let ids = r.test("CoordinateSystemsTest").map(|t| t.production_calls.len()).unwrap_or(0);
    ensure!(l3.len() == 1 && l3[0].evidence.len() == 2 && ids == 2, "Listing 3 ET {l3:?} with {ids} identities");

    let l4: Vec<_> = findings_of(&r, "VerifyTilesFromConcurrentInsert").into_iter().filter(|f| f.kind == SmellKind::MG).collect();
    ensure!(
        l4.len() == 1 && l4[0].evidence.iter().any(|e| e.text.contains("Sqlite")),
        "Listing 4 MG {l4:?}"
    );

    for (test, want) in [
        ("CollidingWithTeleporterMovesPlayer", "Physics/Colliding"),
        ("ResetPositionsWork", "Animation"),
        ("ShouldReadGameManagerSettingsCorrectly", "Graphics/Camera"),
    ] {
        let got = labels(&r, test);
        ensure!(got == [want], "{test} labelled {got:?}, expected [{want}]");
    }

    let stray = r.findings.iter().filter(|f| matches!(f.kind, SmellKind::SE | SmellKind::LT)).count();
    ensure!(stray == 0, "{stray} SE/LT findings on the listings");
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("8 listings, {} findings, {elapsed:.2?}", r.findings.len()))
}

pub fn stubs() -> Outcome {
    let r = scan(&fixture_dir("stubs"))?;
    let se: Vec<_> = findings_of(&r, "CreatedItemMatchesExpected").iter().map(|f| f.kind).collect();
    ensure!(se == [SmellKind::SE], "SE stub findings {se:?}");
    for lt in ["AwardAddsPoints", "AwardAccumulates"] {
        let got: Vec<_> = findings_of(&r, lt).iter().map(|f| f.kind).collect();
        ensure!(got == [SmellKind::LT], "LT stub {lt} findings {got:?}");
    }
    ensure!(r.findings.len() == 3, "expected 3 findings in total, got {:?}", r.findings);
    Ok("1 SE, 2 LT, no other findings".into())
}

pub fn formula() -> Outcome {
    let (files, manifest) = formula_project();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    write_files(dir.path(), &files);
    let r = scan(dir.path())?;
    let m = &r.metrics;
    let counts = (m.func_method_count, m.test_method_count, m.func_class_count, m.test_class_count);
    let want = (manifest.func_methods, manifest.test_methods, manifest.func_classes, manifest.test_classes);
    ensure!(counts == want, "counts {counts:?}, manifest {want:?}");
    let method = m.method_ratio.value().ok_or("method ratio undefined")?;
    let class = m.class_ratio.value().ok_or("class ratio undefined")?;
    ensure!(method == 0.25 && class == 0.25, "ratios {method} / {class}");
    let dense = r.test("Dense").ok_or("no Dense test")?;
    let d = dense.density.ok_or("Dense has no density")?;
    ensure!(dense.body_loc == 12 && dense.assertion_count == 2, "Dense loc {} asserts {}", dense.body_loc, dense.assertion_count);
    ensure!((d - 2.0 / 12.0).abs() <= 1e-9 && format!("{d:.4}") == "0.1667", "density {d}");

    let cov = ingest_coverage_report(&fixture_dir("coverage").join("opencover-312-of-999.xml")).map_err(|e| e.to_string())?;
    let pct = compute_coverage_percentage(&cov).value().ok_or("coverage undefined")? * 100.0;
    ensure!((pct - 31.23).abs() <= 0.01, "coverage {pct}");
    Ok(format!("ratios 0.25/0.25, density {d:.4}, coverage {pct:.2}%"))
}

pub fn oracle_equivalence() -> Outcome {
    let config = Config::default();
    let mut r = rng(0x5eed_0acc);
    let mut smelly = 0;
    for i in 0..1000 {
        let plan = ClassPlan::random(&mut r, &format!("Gen{i}Tests"));
        let expected = reference_smells(&plan);
        let observed = observed_smells(&plan, &config);
        ensure!(observed == expected, "instance {i}: pipeline {observed:?} vs reference {expected:?}");
        smelly += (!expected.method_smells.is_empty() || !expected.gf_pairs.is_empty()) as usize;
    }
    Ok(format!("1000/1000 instances agree ({smelly} with smells)"))
}

pub fn parser_robustness() -> Outcome {
    let mut sources = Vec::new();
    for name in ["vr-corpus", "stubs"] {
        for p in cs_files(&fixture_dir(name)) {
            sources.push(std::fs::read(&p).map_err(|e| e.to_string())?);
        }
    }
    let mut r = rng(0xf022);
    let mut invalid = 0;
    for i in 0..10_000 {
        let src = sources[r.gen_range(0..sources.len())].clone();
        let mutated = mutate(&mut r, &src);
        let unit = std::panic::catch_unwind(|| parse_source(&mutated, "Fuzz.cs"))
            .map_err(|_| format!("mutation {i} panicked"))?;
        match std::str::from_utf8(&mutated) {
            Ok(text) => {
                let joined: String = tokenize_str(text).tokens.iter().map(|t| t.text).collect();
                ensure!(joined == text, "mutation {i} breaks the token round trip");
            }
            Err(_) => {
                invalid += 1;
                ensure!(
                    unit.diagnostics.iter().any(|d| d.severity == Severity::Error),
                    "mutation {i}: invalid UTF-8 without an error diagnostic"
                );
            }
        }
    }
    let files = cs_files(&Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/snapshots/unitask"));
    ensure!(!files.is_empty(), "UniTask snapshot missing");
    let mut clean = 0;
    for p in &files {
        let bytes = std::fs::read(p).map_err(|e| e.to_string())?;
        clean += !parse_source(&bytes, &p.display().to_string()).has_fatal_diagnostics() as usize;
    }
    let share = clean as f64 / files.len() as f64;
    ensure!(share >= 0.95, "UniTask: {clean}/{} files parse cleanly", files.len());
    Ok(format!("10000 mutations ({invalid} non-UTF-8), UniTask {clean}/{} clean", files.len()))
}

pub fn determinism_and_performance() -> Outcome {
    let files = large_tree(42, 100_000);
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    write_files(dir.path(), &files);
    let mut outputs = Vec::new();
    let mut slowest = Duration::ZERO;
    for _ in 0..2 {
        let start = Instant::now();
        let mut r = scan(dir.path())?;
        slowest = slowest.max(start.elapsed());
        r.timestamp.clear();
        outputs.push(to_json(&r));
    }
    let loc: u32 = files.iter().map(|(_, s)| vrtestlint::csharp::count_loc_str(s).code_lines).sum();
    ensure!(outputs[0] == outputs[1], "JSON differs between runs");
    ensure!(slowest < Duration::from_secs(30), "slowest scan took {slowest:?}");
    Ok(format!("{loc} code lines in {} files, identical JSON, slowest scan {slowest:.2?}", files.len()))
}

fn run_cli(args: &[&str]) -> Result<i32, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_vrtestlint"))
        .args(args)
        .env_remove(vrtestlint::config::CONFIG_ENV)
        .output()
        .map_err(|e| e.to_string())?;
    out.status.code().ok_or_else(|| "killed by a signal".to_string())
}

pub fn cli_contract() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let json = tmp.path().join("out.json");
    let fixture = fixture_dir("vr-corpus");
    let code = run_cli(&["scan", fixture.to_str().unwrap(), "--json", json.to_str().unwrap()])?;
    ensure!(code == 0, "scan of fixture exited {code}");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let tests = v["metrics"]["testMethodCount"].as_u64().unwrap_or(0);
    ensure!(tests > 0, "testMethodCount {tests}");

    let empty = tmp.path().join("empty");
    std::fs::create_dir(&empty).map_err(|e| e.to_string())?;
    let code = run_cli(&["scan", empty.to_str().unwrap(), "--fail-under-method-ratio", "0.1"])?;
    ensure!(code == 2, "empty project with threshold exited {code}");

    let missing = tmp.path().join("no-such-dir");
    let code = run_cli(&["scan", missing.to_str().unwrap()])?;
    ensure!(code == 1, "missing root exited {code}");

    let code = run_cli(&["scan", fixture.to_str().unwrap(), "--no-such-flag"])?;
    ensure!(code == 64, "unknown flag exited {code}");
    Ok("0 fixture, 2 threshold, 1 missing root, 64 usage".into())
}
