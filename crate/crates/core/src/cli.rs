//! Command-line surface: construct, analyze, verify, search, sample.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage, parse or I/O error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::bfn1;
use crate::calculus::build_profile_with;
use crate::cube::{SubsetMask, TruthTable};
use crate::entropy::{entropy_report, junta_set, EntropyReport, JuntaSet};
use crate::error::{Error, Result};
use crate::families::{compose, iterate_compose, make_example_h, FamilySpec, RealDistribution};
use crate::calculus::InfluenceProfile;
use crate::spectrum::{transform, Spectrum};
use crate::verify::search::{tightness_search, Leaderboard, Objective, Strategy};
use crate::verify::sweep::{sweep, Generator};
use crate::verify::{run_checks, select_checks, CheckParams, CheckReport, Subject};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "boolcube", version, about = "Exact Fourier analysis of Boolean functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a function and write it as BFN1.
    Construct(ConstructArgs),
    /// Spectrum, influences, entropy and junta set of one function.
    Analyze(AnalyzeArgs),
    /// Run checks on one function or a population.
    Verify(VerifyArgs),
    /// Leaderboard of functions maximizing an observed constant.
    Search(SearchArgs),
    /// Draw from the spectral sample distribution.
    Sample(SampleArgs),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Seed for every random choice.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit JSON instead of the default text or CSV.
    #[arg(long)]
    json: bool,
    /// Write the main output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps and searches (0 = all cores).
    #[arg(long, default_value_t = 0)]
    parallel: usize,
}

#[derive(Args, Debug, Clone, Default)]
struct FamilyArgs {
    /// and, or, parity, dictator, majority, tribes, example-h, compose, iterate, random.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n: Option<u32>,
    /// Dictator coordinate (1-based).
    #[arg(long)]
    k: Option<u32>,
    /// Parity set as comma-separated 1-based coordinates (default: all).
    #[arg(long)]
    set: Option<String>,
    /// Tribe width.
    #[arg(long)]
    m: Option<u32>,
    /// Number of tribes (default: the largest count keeping P(f = 1) >= 1/2).
    #[arg(long)]
    tribes: Option<u32>,
    /// Outer function file for `compose`.
    #[arg(long)]
    outer: Option<PathBuf>,
    /// Inner function file for `compose`.
    #[arg(long)]
    inner: Option<PathBuf>,
    /// Base function file for `iterate` (default: example-h).
    #[arg(long)]
    base: Option<PathBuf>,
    /// Iteration depth for `iterate`.
    #[arg(long)]
    depth: Option<u32>,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// BFN1 input file.
    #[arg(long, conflicts_with = "family")]
    file: Option<PathBuf>,
    #[command(flatten)]
    family: FamilyArgs,
    /// Junta parameter.
    #[arg(long, default_value_t = 0.25)]
    eps: f64,
    /// Also run these checks (`all`, `identities` or a comma list).
    #[arg(long)]
    checks: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Check one or more BFN1 files.
    #[arg(long, num_args = 1.., conflicts_with_all = ["exhaustive", "random", "random_real", "family"])]
    file: Vec<PathBuf>,
    /// Every function on N <= 4 variables.
    #[arg(long, value_name = "N", conflicts_with_all = ["random", "random_real", "family"])]
    exhaustive: Option<u32>,
    /// Uniform random Boolean functions on N variables.
    #[arg(long, value_name = "N", conflicts_with_all = ["random_real", "family"])]
    random: Option<u32>,
    /// Random real-valued functions on N variables (only `hyper` applies).
    #[arg(long, value_name = "N", conflicts_with = "family")]
    random_real: Option<u32>,
    /// Distribution for --random-real: uniform or normal.
    #[arg(long, default_value = "uniform")]
    dist: String,
    /// Population size for --random and --random-real.
    #[arg(long, default_value_t = 100)]
    count: u64,
    #[command(flatten)]
    family: FamilyArgs,
    /// `all`, `identities` or a comma-separated list of check ids.
    #[arg(long, default_value = "all")]
    checks: String,
    /// Comma-separated eps values in (0, 1/2).
    #[arg(long)]
    eps_grid: Option<String>,
    /// Comma-separated noise rates in [0, 1].
    #[arg(long)]
    rho_grid: Option<String>,
    /// Comma-separated junta eps values.
    #[arg(long)]
    friedgut_eps: Option<String>,
    /// Assertion limit on an observed constant, `id=value` (repeatable).
    #[arg(long = "limit", value_name = "ID=VALUE")]
    limits: Vec<String>,
    /// Inner function for compose-degree (default: example-h).
    #[arg(long)]
    compose_partner: Option<PathBuf>,
    /// Draws for the spectral-sample check.
    #[arg(long, default_value_t = 2000)]
    sample_count: usize,
    /// Also write one CSV row per function per check here.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct SearchArgs {
    /// fei-ratio, kkl-edge-constant or fmei-degree-constant.
    #[arg(long)]
    objective: String,
    /// Enumerate every function on N <= 4 variables.
    #[arg(long, value_name = "N", conflicts_with_all = ["random", "compose_greedy"])]
    exhaustive: Option<u32>,
    /// Random functions on N variables.
    #[arg(long, value_name = "N", conflicts_with = "compose_greedy")]
    random: Option<u32>,
    /// Grow candidates by composition from seed functions.
    #[arg(long)]
    compose_greedy: bool,
    /// Seed function files for --compose-greedy (default: example-h).
    #[arg(long = "seed-file")]
    seed_files: Vec<PathBuf>,
    #[arg(long, default_value_t = 2)]
    depth: u32,
    #[arg(long, default_value_t = 8)]
    width: usize,
    #[arg(long, default_value_t = 16)]
    max_dim: u32,
    /// Maximum number of candidates evaluated.
    #[arg(long, default_value_t = 100_000)]
    budget: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long, conflicts_with = "family")]
    file: Option<PathBuf>,
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[command(flatten)]
    common: Common,
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let parallel = match &cli.command {
        Command::Construct(a) => a.common.parallel,
        Command::Analyze(a) => a.common.parallel,
        Command::Verify(a) => a.common.parallel,
        Command::Search(a) => a.common.parallel,
        Command::Sample(a) => a.common.parallel,
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(parallel).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    match pool.install(|| dispatch(cli.command, stdout, stderr)) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Construct(a) => construct(a, stdout, stderr),
        Command::Analyze(a) => analyze(a, stdout),
        Command::Verify(a) => verify(a, stdout, stderr),
        Command::Search(a) => search(a, stdout),
        Command::Sample(a) => sample(a, stdout),
    }
}

fn read_table(path: &Path) -> Result<TruthTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    bfn1::parse(&text)
}

fn emit(common: &Common, stdout: &mut dyn Write, text: &str) -> Result<()> {
    match &common.out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => Ok(stdout.write_all(text.as_bytes())?),
    }
}

fn parse_set(text: &str) -> Result<SubsetMask> {
    let elems = parse_list::<u32>(text)?;
    if elems.iter().any(|&e| e == 0 || e > 32) {
        return Err(Error::Parse(format!("set elements are 1-based coordinates: `{text}`")));
    }
    Ok(SubsetMask::from_elements(&elems))
}

fn parse_list<T: std::str::FromStr>(text: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|_| Error::Parse(format!("bad list entry `{s}`"))))
        .collect()
}

fn need<T>(v: Option<T>, flag: &str, family: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidParam(format!("family `{family}` needs --{flag}")))
}

/// Builds the function named by the family flags; returns it with a label.
fn build_family(a: &FamilyArgs, seed: u64) -> Result<(String, TruthTable)> {
    let family = a.family.as_deref().ok_or_else(|| Error::InvalidParam("no input: give --file or --family".into()))?;
    let spec = match family {
        "and" => FamilySpec::And(need(a.n, "n", family)?),
        "or" => FamilySpec::Or(need(a.n, "n", family)?),
        "parity" => {
            let n = need(a.n, "n", family)?;
            let set = match &a.set {
                Some(s) => parse_set(s)?,
                None => SubsetMask::full(n),
            };
            FamilySpec::Parity { n, set }
        }
        "dictator" => FamilySpec::Dictator { n: need(a.n, "n", family)?, k: need(a.k, "k", family)? },
        "majority" => FamilySpec::Majority(need(a.n, "n", family)?),
        "tribes" => FamilySpec::Tribes { m: need(a.m, "m", family)?, count: a.tribes },
        "example-h" => FamilySpec::ExampleH,
        "random" => FamilySpec::Random { n: need(a.n, "n", family)?, seed },
        "compose" => {
            let outer = need(a.outer.as_ref(), "outer", family)?;
            let inner = need(a.inner.as_ref(), "inner", family)?;
            let f = compose(&read_table(outer)?, &read_table(inner)?)?;
            return Ok((format!("compose outer={} inner={}", outer.display(), inner.display()), f));
        }
        "iterate" => {
            let depth = need(a.depth, "depth", family)?;
            let (label, base) = match &a.base {
                Some(p) => (p.display().to_string(), read_table(p)?),
                None => ("example-h".to_string(), make_example_h()),
            };
            return Ok((format!("iterate base={label} depth={depth}"), iterate_compose(&base, depth)?));
        }
        other => return Err(Error::InvalidParam(format!("unknown family `{other}`"))),
    };
    Ok((spec.describe(), spec.build()?))
}

fn input(file: &Option<PathBuf>, family: &FamilyArgs, seed: u64) -> Result<(String, TruthTable)> {
    match file {
        Some(p) => Ok((p.display().to_string(), read_table(p)?)),
        None => build_family(family, seed),
    }
}

pub fn digest(f: &TruthTable) -> String {
    hex::encode(Sha256::digest(bfn1::serialize(f).as_bytes()))
}

#[derive(Serialize)]
struct ConstructSummary<'a> {
    source: &'a str,
    n: u32,
    sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<String>,
}

fn construct(a: ConstructArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let (source, f) = build_family(&a.family, a.common.seed)?;
    let summary = ConstructSummary {
        source: &source,
        n: f.n(),
        sha256: digest(&f),
        path: a.common.out.as_ref().map(|p| p.display().to_string()),
    };
    let line = if a.common.json {
        serde_json::to_string(&summary).expect("serializable") + "\n"
    } else {
        format!("n={} sha256={}\n", summary.n, summary.sha256)
    };
    match &a.common.out {
        Some(p) => {
            std::fs::write(p, bfn1::serialize(&f)).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            stdout.write_all(line.as_bytes())?;
        }
        None => {
            stdout.write_all(bfn1::serialize(&f).as_bytes())?;
            stderr.write_all(line.as_bytes())?;
        }
    }
    Ok(EXIT_OK)
}

/// Everything `analyze` reports about one function.
#[derive(Debug, Serialize)]
pub struct AnalysisBundle {
    pub schema: &'static str,
    pub source: String,
    pub n: u32,
    pub bfn1: String,
    pub sha256: String,
    pub degree: u32,
    pub spectrum: Spectrum,
    pub influence: InfluenceProfile,
    pub entropy: EntropyReport,
    /// Absent for constant functions.
    pub junta: Option<JuntaSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<CheckReport>>,
}

pub fn analysis_bundle(source: &str, f: &TruthTable, eps: f64, checks: Option<&str>) -> Result<AnalysisBundle> {
    let spectrum = transform(f);
    let influence = build_profile_with(f, &spectrum)?;
    let entropy = entropy_report(&spectrum, &influence)?;
    let junta = match junta_set(&spectrum, &influence, eps) {
        Ok(j) => Some(j),
        Err(Error::ConstantFunction(_)) => None,
        Err(e) => return Err(e),
    };
    let checks = match checks {
        Some(sel) => {
            let selected = select_checks(sel)?;
            let subject = Subject::boolean(f.clone())?;
            Some(run_checks(&selected, &subject, &CheckParams::default()))
        }
        None => None,
    };
    Ok(AnalysisBundle {
        schema: "analysis-v1",
        source: source.to_string(),
        n: f.n(),
        bfn1: bfn1::serialize(f),
        sha256: digest(f),
        degree: spectrum.degree(),
        spectrum,
        influence,
        entropy,
        junta,
        checks,
    })
}

fn analyze(a: AnalyzeArgs, stdout: &mut dyn Write) -> Result<i32> {
    let (source, f) = input(&a.file, &a.family, a.common.seed)?;
    let bundle = analysis_bundle(&source, &f, a.eps, a.checks.as_deref())?;
    let failed = bundle.checks.as_ref().is_some_and(|c| c.iter().any(|r| r.status.is_fail()));
    let text = if a.common.json {
        serde_json::to_string_pretty(&bundle).expect("serializable") + "\n"
    } else {
        analysis_text(&bundle)
    };
    emit(&a.common, stdout, &text)?;
    Ok(if failed { EXIT_CHECK_FAILED } else { EXIT_OK })
}

fn analysis_text(b: &AnalysisBundle) -> String {
    use crate::render::dec12;
    let mut s = String::new();
    let e = &b.entropy;
    s += &format!("source: {}\nn: {}\nsha256: {}\ndegree: {}\n", b.source, b.n, b.sha256, b.degree);
    s += &format!("total influence: {} ({})\n", b.influence.total, dec12(b.influence.total.to_f64()));
    s += &format!("E|S|^2: {}\n", b.influence.second_moment);
    s += &format!("entropy (bits): {}\n", dec12(e.ent_bits));
    s += &format!("max |coefficient|: {} at {}\n", dec12(e.max_coef), SubsetMask(e.argmax_mask).to_set_string());
    if let Some(r) = e.fei_ratio {
        s += &format!("Ent / I: {}\n", dec12(r));
    }
    if let Some(j) = &b.junta {
        s += &format!("junta (eps={}): J={} degree cap={} leaked={}\n", j.eps, j.junta.to_set_string(), j.degree_cap, j.leaked_weight);
    }
    for (k, ik) in b.influence.per_bit.iter().enumerate() {
        s += &format!("I_{}: {}\n", k + 1, ik);
    }
    if let Some(checks) = &b.checks {
        for r in checks {
            s += &format!("check {}: {}", r.id, r.status.label());
            if let Some(reason) = &r.reason {
                s += &format!(" ({reason})");
            }
            s.push('\n');
        }
    }
    s
}

#[derive(Serialize)]
struct FunctionReport {
    schema: &'static str,
    source: String,
    n: u32,
    results: Vec<CheckReport>,
}

fn verify_params(a: &VerifyArgs) -> Result<CheckParams> {
    let mut p = CheckParams { sample_seed: a.common.seed, sample_count: a.sample_count, ..CheckParams::default() };
    if let Some(g) = &a.eps_grid {
        p.eps_grid = parse_list(g)?;
    }
    if let Some(g) = &a.rho_grid {
        p.rho_grid = parse_list(g)?;
    }
    if let Some(g) = &a.friedgut_eps {
        p.friedgut_eps = parse_list(g)?;
    }
    for l in &a.limits {
        let (id, v) = l.split_once('=').ok_or_else(|| Error::Parse(format!("limit `{l}` is not id=value")))?;
        let v: f64 = v.trim().parse().map_err(|_| Error::Parse(format!("limit `{l}` has a bad value")))?;
        p.limits.insert(id.trim().to_string(), v);
    }
    if let Some(path) = &a.compose_partner {
        p.compose_partner = read_table(path)?;
    }
    p.validate()?;
    Ok(p)
}

fn verify(a: VerifyArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let checks = select_checks(&a.checks)?;
    let params = verify_params(&a)?;

    if a.file.len() == 1 {
        let f = read_table(&a.file[0])?;
        let reports = match Subject::boolean(f.clone()) {
            Ok(s) => run_checks(&checks, &s, &params),
            Err(e) => crate::verify::failed_subject(&checks, &f, &e),
        };
        let failed = reports.iter().any(|r| r.status.is_fail());
        let report = FunctionReport { schema: "report-v1", source: a.file[0].display().to_string(), n: f.n(), results: reports };
        emit(&a.common, stdout, &(serde_json::to_string_pretty(&report).expect("serializable") + "\n"))?;
        return Ok(if failed { EXIT_CHECK_FAILED } else { EXIT_OK });
    }

    let generator = if !a.file.is_empty() {
        Generator::Tables(
            a.file.iter().map(|p| Ok((p.display().to_string(), read_table(p)?))).collect::<Result<Vec<_>>>()?,
        )
    } else if let Some(n) = a.exhaustive {
        Generator::Exhaustive(n)
    } else if let Some(n) = a.random {
        Generator::Random { n, count: a.count, seed: a.common.seed }
    } else if let Some(n) = a.random_real {
        Generator::RandomReal { n, count: a.count, seed: a.common.seed, dist: a.dist.parse::<RealDistribution>()? }
    } else if a.family.family.is_some() {
        let (label, f) = build_family(&a.family, a.common.seed)?;
        Generator::Tables(vec![(label, f)])
    } else {
        return Err(Error::InvalidParam("no population: give --file, --exhaustive, --random, --random-real or --family".into()));
    };

    let report = match &a.csv {
        Some(path) => {
            let mut file = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            sweep(&checks, &generator, &params, Some(&mut file))?
        }
        None => sweep(&checks, &generator, &params, None)?,
    };
    emit(&a.common, stdout, &(report.to_json() + "\n"))?;
    if report.failed() {
        let _ = writeln!(stderr, "check failures: {}", report.checks.iter().filter(|(_, s)| s.fail > 0).map(|(id, _)| id.as_str()).collect::<Vec<_>>().join(", "));
        return Ok(EXIT_CHECK_FAILED);
    }
    Ok(EXIT_OK)
}

fn search(a: SearchArgs, stdout: &mut dyn Write) -> Result<i32> {
    let objective: Objective = a.objective.parse()?;
    let strategy = if let Some(n) = a.exhaustive {
        Strategy::Exhaustive { n }
    } else if let Some(n) = a.random {
        Strategy::Random { n, seed: a.common.seed }
    } else if a.compose_greedy {
        let seeds = if a.seed_files.is_empty() {
            vec![make_example_h()]
        } else {
            a.seed_files.iter().map(|p| read_table(p)).collect::<Result<Vec<_>>>()?
        };
        Strategy::ComposeGreedy { seeds, depth: a.depth, width: a.width, max_dim: a.max_dim }
    } else {
        return Err(Error::InvalidParam("choose --exhaustive, --random or --compose-greedy".into()));
    };
    let lb: Leaderboard = tightness_search(objective, &strategy, a.budget)?;
    let text = if a.common.json { serde_json::to_string_pretty(&lb).expect("serializable") + "\n" } else { lb.to_csv()? };
    emit(&a.common, stdout, &text)?;
    Ok(EXIT_OK)
}

fn sample(a: SampleArgs, stdout: &mut dyn Write) -> Result<i32> {
    let (_, f) = input(&a.file, &a.family, a.common.seed)?;
    let dist = transform(&f).sample_distribution()?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["index", "mask", "set"]).map_err(io)?;
    for (i, s) in dist.draw(a.common.seed, a.count).into_iter().enumerate() {
        w.write_record([i.to_string(), s.0.to_string(), s.to_set_string()]).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    emit(&a.common, stdout, &String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))?)?;
    Ok(EXIT_OK)
}
