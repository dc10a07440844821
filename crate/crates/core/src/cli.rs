//! Command-line interface and exit-code contract.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{Config, CONFIG_ENV};
use crate::metrics::Ratio;
use crate::pipeline::{analyze_project, read_list, run_corpus, PipelineError};
use crate::report::{emit_corpus, emit_report, CorpusReport, Format, ProjectReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SCAN_ERROR: i32 = 1;
pub const EXIT_THRESHOLD: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "vrtestlint", version, about = "Test prevalence, assertion density, test smells and VR test taxonomy for Unity C# projects")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze one project directory.
    Scan {
        path: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
        /// OpenCover XML or `covered,coverable` CSV coverage report.
        #[arg(long, value_name = "PATH")]
        coverage_report: Option<PathBuf>,
    },
    /// Analyze every project listed in a file (local paths or git URLs).
    Corpus {
        list_file: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
        /// Reuse successful entries of the existing --json report.
        #[arg(long, requires = "json")]
        resume: bool,
    },
}

#[derive(Debug, Args)]
pub struct CommonOpts {
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Directory receiving `vrtestlint.csv`.
    #[arg(long, value_name = "DIR")]
    pub csv: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub markdown: Option<PathBuf>,
    #[arg(long, value_name = "PATH", env = CONFIG_ENV)]
    pub config: Option<PathBuf>,
    /// Report printed to stdout when no output file is requested.
    #[arg(long, default_value = "markdown", value_parser = parse_format)]
    pub format: Format,
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: Option<u16>,
    #[arg(long, value_name = "RATIO")]
    pub fail_under_method_ratio: Option<f64>,
    #[arg(long, value_name = "RATIO")]
    pub fail_under_density: Option<f64>,
    #[arg(long, value_name = "RATIO")]
    pub max_smelly_fraction: Option<f64>,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: crate::report::UnknownFormat| e.to_string())
}

pub fn main_exit() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let opts = match &cli.command {
        Command::Scan { opts, .. } | Command::Corpus { opts, .. } => opts,
    };
    for (flag, v) in [
        ("--fail-under-method-ratio", opts.fail_under_method_ratio),
        ("--fail-under-density", opts.fail_under_density),
        ("--max-smelly-fraction", opts.max_smelly_fraction),
    ] {
        if v.is_some_and(|x| !x.is_finite() || x < 0.0) {
            let _ = writeln!(err, "error: {flag} must be a non-negative number");
            return EXIT_USAGE;
        }
    }
    let config = match Config::resolve(opts.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.map(usize::from).unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker pool: {e}");
            return EXIT_SCAN_ERROR;
        }
    };
    match &cli.command {
        Command::Scan { path, opts, coverage_report } => {
            scan(&pool, path, opts, coverage_report.as_deref(), &config, out, err)
        }
        Command::Corpus { list_file, opts, resume } => corpus(&pool, list_file, opts, *resume, &config, out, err),
    }
}

fn scan(
    pool: &rayon::ThreadPool,
    path: &Path,
    opts: &CommonOpts,
    coverage: Option<&Path>,
    config: &Config,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let report = match pool.install(|| analyze_project(path, config, coverage)) {
        Ok(r) => r,
        Err(e @ (PipelineError::Scan(_) | PipelineError::Coverage(_))) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_SCAN_ERROR;
        }
    };
    let outputs = [
        (opts.json.clone(), Format::Json),
        (opts.csv.as_ref().map(|d| d.join("vrtestlint.csv")), Format::Csv),
        (opts.markdown.clone(), Format::Markdown),
    ];
    if let Err(code) = write_outputs(&outputs, |f| emit_report(&report, f), opts.format, out, err) {
        return code;
    }
    let violations = threshold_violations(&report, opts);
    report_violations(&violations, err)
}

fn corpus(
    pool: &rayon::ThreadPool,
    list: &Path,
    opts: &CommonOpts,
    resume: bool,
    config: &Config,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let text = match std::fs::read_to_string(list) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: cannot read list file {}: {e}", list.display());
            return EXIT_SCAN_ERROR;
        }
    };
    let previous: Option<CorpusReport> = if resume {
        let path = opts.json.as_ref().expect("clap enforces --json with --resume");
        match std::fs::read_to_string(path) {
            Ok(t) => match serde_json::from_str(&t) {
                Ok(r) => Some(r),
                Err(e) => {
                    let _ = writeln!(err, "error: cannot resume from {}: {e}", path.display());
                    return EXIT_SCAN_ERROR;
                }
            },
            Err(_) => None,
        }
    } else {
        None
    };
    let base = list.parent().unwrap_or(Path::new("."));
    let report = pool.install(|| run_corpus(&read_list(&text), base, config, previous.as_ref()));
    for e in report.entries.iter().filter(|e| e.report.is_none()) {
        let _ = writeln!(err, "warning: {}: {}", e.source, e.reason.as_deref().unwrap_or("failed"));
    }
    let outputs = [
        (opts.json.clone(), Format::Json),
        (opts.csv.as_ref().map(|d| d.join("vrtestlint.csv")), Format::Csv),
        (opts.markdown.clone(), Format::Markdown),
    ];
    if let Err(code) = write_outputs(&outputs, |f| emit_corpus(&report, f), opts.format, out, err) {
        return code;
    }
    let violations: Vec<String> = report
        .entries
        .iter()
        .filter_map(|e| e.report.as_ref())
        .flat_map(|r| threshold_violations(r, opts).into_iter().map(move |v| format!("{}: {v}", r.project)))
        .collect();
    report_violations(&violations, err)
}

fn write_outputs(
    outputs: &[(Option<PathBuf>, Format)],
    render: impl Fn(Format) -> Vec<u8>,
    stdout_format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), i32> {
    let mut wrote = false;
    for (path, format) in outputs {
        let Some(path) = path else { continue };
        wrote = true;
        let result = path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .map_or(Ok(()), std::fs::create_dir_all)
            .and_then(|_| std::fs::write(path, render(*format)));
        if let Err(e) = result {
            let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
            return Err(EXIT_SCAN_ERROR);
        }
    }
    if !wrote {
        let _ = out.write_all(&render(stdout_format));
    }
    Ok(())
}

/// Undefined ratios (tests without functional code) do not violate a
/// lower bound.
pub fn threshold_violations(r: &ProjectReport, opts: &CommonOpts) -> Vec<String> {
    let mut v = Vec::new();
    if let (Some(min), Ratio::Defined { value }) = (opts.fail_under_method_ratio, &r.metrics.method_ratio) {
        if *value < min {
            v.push(format!("method ratio {value:.4} is below {min}"));
        }
    }
    if let Some(min) = opts.fail_under_density {
        if r.metrics.project_density < min {
            v.push(format!("assertion density {:.4} is below {min}", r.metrics.project_density));
        }
    }
    if let Some(max) = opts.max_smelly_fraction {
        if r.smell_summary.smelly_test_fraction > max {
            v.push(format!("smelly test fraction {:.4} exceeds {max}", r.smell_summary.smelly_test_fraction));
        }
    }
    v
}

fn report_violations(violations: &[String], err: &mut dyn Write) -> i32 {
    for v in violations {
        let _ = writeln!(err, "threshold violated: {v}");
    }
    if violations.is_empty() {
        EXIT_OK
    } else {
        EXIT_THRESHOLD
    }
}
