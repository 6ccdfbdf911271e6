//! The `kannan` command line: gallery, check, iterate, census, counterexample.
//!
//! Exit codes: 0 success, 1 verdict differs from `--expect` (or a gallery
//! item is not as expected), 2 bad configuration, 3 membership or closure
//! error, 4 theorem contradiction.

mod input;
pub mod render;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use kannan_core::completeness::{
    build_reciprocal_witness, construct_counterexample_map, fixed_point_scan, verify_counterexample_with,
};
use kannan_core::condition::{evaluate_condition_with, Verdict};
use kannan_core::oracle::{enumerate_census_with, random_finite_space_with, Generator};
use kannan_core::picard::{run_picard, DEFAULT_HORIZON};
use kannan_core::{run_gallery, ConditionKind, Error, GalleryOptions, Parallelism};
use serde::Serialize;
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_EXPECTATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_MEMBERSHIP: i32 = 3;
pub const EXIT_DEFECT: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_CONFIG,
            CliError::Core(e) if e.is_membership() => EXIT_MEMBERSHIP,
            CliError::Core(Error::TheoremContradiction(_)) => EXIT_DEFECT,
            CliError::Core(_) => EXIT_CONFIG,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "kannan", version, about = "Exact checks of Kannan-type conditions and fixed point behaviour")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Exit 1 unless the main verdict matches.
    #[arg(long, global = true, value_enum)]
    expect: Option<Expect>,
    /// Run pair and census loops on the rayon pool; output is unchanged.
    #[arg(long, global = true)]
    parallel: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Expect {
    Holds,
    Violated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GeneratorArg {
    UnitBand,
    Line,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every worked example and compare with the expected verdicts.
    Gallery {
        #[arg(long, default_value_t = 1000)]
        gornicki_n: u64,
        #[arg(long, default_value_t = 200)]
        prefix: u64,
        #[arg(long, default_value_t = 200)]
        sample_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Replacement space for the piecewise drop example.
        #[arg(long)]
        space: Option<String>,
    },
    /// Evaluate a condition for a map on a set of pairs.
    Check {
        #[arg(long)]
        space: String,
        #[arg(long)]
        map: String,
        #[arg(long)]
        condition: String,
        /// `exhaustive`, `sample:N`, a JSON array of points or of [x, y] pairs.
        #[arg(long, default_value = "exhaustive")]
        pairs: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Picard iteration with diagnostics; `--format csv` gives the trace.
    Iterate {
        #[arg(long)]
        space: String,
        #[arg(long)]
        map: String,
        #[arg(long)]
        start: String,
        #[arg(long, default_value_t = DEFAULT_HORIZON)]
        horizon: usize,
    },
    /// Classify every self-map of a finite space.
    Census {
        /// Size of a random space; ignored when --space is given.
        #[arg(long, default_value_t = 3)]
        size: usize,
        #[arg(long)]
        space: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = GeneratorArg::UnitBand)]
        generator: GeneratorArg,
        /// Extra condition columns; repeatable.
        #[arg(long)]
        condition: Vec<String>,
    },
    /// Build the fixed point free map on the reciprocal set and verify it.
    Counterexample {
        #[arg(long, default_value_t = 200)]
        prefix: u64,
        /// Fixed point scan limit; defaults to the prefix.
        #[arg(long)]
        scan: Option<u64>,
    },
}

/// Everything a command produced before formatting.
struct Produced {
    config: Value,
    result: Value,
    csv: String,
    /// Main verdict for `--expect`.
    holds: bool,
    /// Nonzero status independent of `--expect`, with a message.
    failure: Option<(i32, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the command line `args` (program name first) without touching the
/// process: output is returned, or written to `--out`.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: text }
            } else {
                Outcome { code, stdout: text, stderr: String::new() }
            };
        }
    };
    match execute(&cli) {
        Ok(o) => o,
        Err(e) => Outcome { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let parallelism = if cli.parallel { Parallelism::Parallel } else { Parallelism::Serial };
    let mut p = match &cli.command {
        Command::Gallery { gornicki_n, prefix, sample_size, seed, space } => {
            gallery(*gornicki_n, *prefix, *sample_size, *seed, space.as_deref(), parallelism)?
        }
        Command::Check { space, map, condition, pairs, seed } => check(space, map, condition, pairs, *seed, parallelism)?,
        Command::Iterate { space, map, start, horizon } => iterate(space, map, start, *horizon)?,
        Command::Census { size, space, seed, generator, condition } => {
            census(*size, space.as_deref(), *seed, *generator, condition, parallelism)?
        }
        Command::Counterexample { prefix, scan } => counterexample(*prefix, scan.unwrap_or(*prefix), parallelism)?,
    };
    if let Value::Object(m) = &mut p.config {
        m.insert("format".into(), json!(cli.format));
        m.insert("expect".into(), json!(cli.expect));
    }
    let text = match cli.format {
        Format::Json => render::json_document(&p.config, &p.result),
        Format::Csv => render::csv_document(&p.config, &p.csv),
        Format::Human => render::human_document(&p.config, &p.result),
    };
    let mut stderr = String::new();
    let mut code = EXIT_OK;
    if let Some((c, msg)) = &p.failure {
        code = *c;
        let _ = writeln!(stderr, "{msg}");
    }
    if let Some(exp) = cli.expect {
        let got = if p.holds { Expect::Holds } else { Expect::Violated };
        if got != exp && code == EXIT_OK {
            code = EXIT_EXPECTATION;
            let _ = writeln!(stderr, "expected {exp:?}, got {got:?}");
        }
    }
    let stdout = match &cli.out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| CliError::Usage(format!("--out {}: {e}", path.display())))?;
            String::new()
        }
        None => text,
    };
    Ok(Outcome { code, stdout, stderr })
}

fn value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn base_config(command: &str) -> Value {
    json!({ "tool": "kannan", "version": env!("CARGO_PKG_VERSION"), "command": command })
}

fn extend(config: &mut Value, extra: Value) {
    if let (Value::Object(m), Value::Object(e)) = (config, extra) {
        m.extend(e);
    }
}

fn gallery(
    gornicki_n: u64,
    prefix: u64,
    sample_size: usize,
    seed: u64,
    space: Option<&str>,
    parallelism: Parallelism,
) -> Result<Produced, CliError> {
    let split_space = space.map(input::load_space).transpose()?;
    let mut config = base_config("gallery");
    extend(
        &mut config,
        json!({
            "gornicki_n": gornicki_n,
            "prefix": prefix,
            "sample_size": sample_size,
            "seed": seed,
            "space": split_space.as_ref().map(|(_, s)| value(s)),
        }),
    );
    let opts = GalleryOptions {
        gornicki_n,
        prefix,
        sample_size,
        seed,
        split_space: split_space.map(|(s, _)| s),
        parallelism,
    };
    let report = run_gallery(&opts)?;
    let mut csv = String::from("section,as_expected\n");
    for s in &report.sections {
        let _ = writeln!(csv, "{},{}", s.name, s.as_expected);
    }
    let failure = report
        .first_failure()
        .map(|name| (EXIT_EXPECTATION, format!("gallery item {name} is not as expected")));
    Ok(Produced { config, result: value(&report), csv, holds: report.all_as_expected(), failure })
}

fn check(
    space_arg: &str,
    map_arg: &str,
    cond_arg: &str,
    pairs_arg: &str,
    seed: u64,
    parallelism: Parallelism,
) -> Result<Produced, CliError> {
    let (space, space_spec) = input::load_space(space_arg)?;
    let (map, map_spec) = input::load_map(map_arg, &space)?;
    let (cond, cond_spec) = input::load_condition(cond_arg, &space)?;
    let (pairs, pairs_value) = input::load_pairs(pairs_arg, &space, seed)?;
    let mut config = base_config("check");
    extend(
        &mut config,
        json!({
            "space": value(&space_spec),
            "map": value(&map_spec),
            "condition": value(&cond_spec),
            "pairs": pairs_value,
            "seed": seed,
        }),
    );
    let report = evaluate_condition_with(&cond, &space, &map, &pairs, parallelism)?;
    let mut csv = String::from("condition,pairs_checked,domain_exhausted,verdict,x,y,lhs,rhs\n");
    let _ = write!(csv, "{},{},{},", report.condition.name(), report.pairs_checked, report.domain_exhausted);
    match &report.verdict {
        Verdict::Holds => csv.push_str("holds,,,,\n"),
        Verdict::Violated(v) => {
            let _ = writeln!(csv, "violated,{},{},{},{}", v.x, v.y, v.lhs, v.rhs);
        }
    }
    Ok(Produced { config, result: value(&report), csv, holds: report.holds(), failure: None })
}

fn iterate(space_arg: &str, map_arg: &str, start: &str, horizon: usize) -> Result<Produced, CliError> {
    let (space, space_spec) = input::load_space(space_arg)?;
    let (map, map_spec) = input::load_map(map_arg, &space)?;
    let x0 = space.parse_point(start)?;
    let mut config = base_config("iterate");
    extend(
        &mut config,
        json!({ "space": value(&space_spec), "map": value(&map_spec), "start": x0.to_string(), "horizon": horizon }),
    );
    let run = run_picard(&space, &map, &x0, horizon)?;
    let holds = run.gap_monotone && run.pairwise_bound_ok;
    Ok(Produced { config, csv: run.trace_csv(), result: value(&run), holds, failure: None })
}

fn census(
    size: usize,
    space_arg: Option<&str>,
    seed: u64,
    generator: GeneratorArg,
    conditions: &[String],
    parallelism: Parallelism,
) -> Result<Produced, CliError> {
    let generator = match generator {
        GeneratorArg::UnitBand => Generator::UnitBand,
        GeneratorArg::Line => Generator::Line,
    };
    let (space, source) = match space_arg {
        Some(a) => {
            let (s, spec) = input::load_space(a)?;
            (s, json!({ "space": value(&spec) }))
        }
        None => (
            random_finite_space_with(size, seed, generator)?,
            json!({ "size": size, "seed": seed, "generator": value(&generator) }),
        ),
    };
    let mut kinds: Vec<ConditionKind> = Vec::with_capacity(conditions.len());
    let mut specs = Vec::with_capacity(conditions.len());
    for c in conditions {
        let (k, s) = input::load_condition(c, &space)?;
        kinds.push(k);
        specs.push(value(&s));
    }
    let mut config = base_config("census");
    extend(&mut config, source);
    extend(&mut config, json!({ "conditions": specs }));
    let census = enumerate_census_with(&space, &kinds, parallelism)?;
    let metric = space.as_finite().map(|f| {
        json!({ "labels": f.labels().iter().map(|l| l.to_string()).collect::<Vec<_>>(), "d": value(&f.matrix()) })
    });
    let failure = (!census.defects.is_empty()).then(|| {
        (EXIT_DEFECT, format!("DEFECT: {} census rows contradict a fixed point theorem; first: {}", census.defects.len(), census.defects[0]))
    });
    Ok(Produced {
        config,
        csv: census.to_csv(),
        holds: census.defects.is_empty(),
        result: json!({ "metric": metric, "census": value(&census) }),
        failure,
    })
}

fn counterexample(prefix: u64, scan: u64, parallelism: Parallelism) -> Result<Produced, CliError> {
    let mut config = base_config("counterexample");
    extend(&mut config, json!({ "witness": "reciprocal", "prefix": prefix, "scan": scan }));
    let w = build_reciprocal_witness();
    let cm = construct_counterexample_map(&w)?;
    let report = verify_counterexample_with(&cm, prefix, parallelism)?;
    let fixed = fixed_point_scan(&cm, scan)?;
    let mut csv = String::from("n,term,branch,target_index,image\n");
    for (i, e) in report.construction.iter().enumerate() {
        let n = i as u64 + 1;
        let branch = value(&e.branch);
        let _ = writeln!(
            csv,
            "{n},{},{},{},{}",
            w.term(n),
            branch.as_str().unwrap_or_default(),
            e.target_index,
            w.term(e.target_index)
        );
    }
    let holds = report.as_expected() && fixed.is_empty();
    let failure = (!holds).then(|| (EXIT_EXPECTATION, "construction did not verify on the prefix".to_string()));
    Ok(Produced {
        config,
        csv,
        result: json!({ "verification": value(&report), "fixed_point_scan": { "limit": scan, "fixed_indices": fixed } }),
        holds,
        failure,
    })
}
