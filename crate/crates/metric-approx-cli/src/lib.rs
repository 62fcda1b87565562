//! The `mapx` command-line tool: builds, verifies and profiles metric approximation certificates.

pub mod config;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use config::{merge_config, parse_positive, parse_tolerance, ConfigError, NRange, DEFAULT_DIM_CAP, DEFAULT_ORACLE_BUDGET};
use metric_approx::certify::{verify_d_with, ApproxCertificate, DEFAULT_WORD_CAP};
use metric_approx::construct::{
    amplify_projective, from_quotient, induce_finite_index, wreath_by_rf, wreath_sofic, Built, DEFAULT_MATERIALIZE_CAP,
};
use metric_approx::error::Error as LibError;
use metric_approx::groups::{ball_with_cap, Group, Quotient, SubgroupPair, DEFAULT_BALL_CAP};
use metric_approx::profiles::{
    folner_search, full_rf_growth, growth_curve, inequality_audit, le_f_growth, least_quotient, ra_profile, round_trip,
    sofic_exact_oracle, upper_curve, weakly_sofic_exact_z, AuditInput, Builder, FolnerStrategy, ProfileCurve, ProfileKind,
    QuotientFamily, RaEntry,
};
use metric_approx::targets::{Dimension, Family, DEFAULT_MARGIN};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_VERIFY: u8 = 2;
pub const EXIT_CAP: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "mapx", version, about = "Metric approximations of finitely generated groups", args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Flat `key = value` file of flags; explicit flags win.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Size of the worker pool; defaults to the number of cores.
    #[arg(long, value_parser = parse_positive)]
    pub workers: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_BALL_CAP as u64, value_parser = parse_positive)]
    pub ball_cap: u64,
    #[arg(long, default_value_t = DEFAULT_WORD_CAP as u64, value_parser = parse_positive)]
    pub word_cap: u64,
    #[arg(long, default_value_t = DEFAULT_ORACLE_BUDGET, value_parser = parse_positive)]
    pub oracle_budget: u64,
    /// Largest materialized target dimension.
    #[arg(long, default_value_t = DEFAULT_DIM_CAP, value_parser = parse_positive)]
    pub dim_cap: u64,
    /// Floating-point margin for Hilbert-Schmidt comparisons.
    #[arg(long, default_value_t = DEFAULT_MARGIN, value_parser = parse_tolerance)]
    pub tolerance: f64,
    /// With `false`, reports also carry wall-clock timings.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub deterministic: bool,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct Search {
    /// Følner strategy: exhaustive, balls or boxes.
    #[arg(long)]
    pub strategy: Option<String>,
    #[arg(long, default_value_t = 6)]
    pub r_max: usize,
    #[arg(long, default_value_t = 8)]
    pub size_max: usize,
    #[arg(long, default_value_t = 1 << 20)]
    pub side_max: u64,
    /// Largest quotient index tried by residual finiteness searches.
    #[arg(long, default_value_t = 1 << 20, value_parser = parse_positive)]
    pub max_index: u64,
    /// LEF catalog: cyclic groups of order up to this bound.
    #[arg(long, default_value_t = 16, value_parser = parse_positive)]
    pub catalog_max: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print B(n) as a JSON array of normal forms.
    Ball {
        #[arg(long)]
        group: String,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Build a certificate and write it as JSON.
    Construct {
        #[arg(long)]
        method: String,
        #[arg(long, default_value = "Z")]
        group: String,
        #[arg(long, default_value = "sofic")]
        family: String,
        #[arg(long)]
        n: usize,
        /// Index of the subgroup for `induce`.
        #[arg(long, default_value_t = 2)]
        index: i64,
        /// Order of the cyclic quotient amplified by `amplify`.
        #[arg(long, default_value_t = 641)]
        modulus: i64,
        #[command(flatten)]
        common: Common,
    },
    /// Verify a certificate file and print the report.
    Verify {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Swap the targets of two distinct assignments, chosen by the seed.
    Mutate {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Profile curve as CSV with columns n,lower,exact,upper,provenance.
    Profile {
        #[arg(long)]
        group: String,
        /// A target family (sof, hyp, lin, fin, ...) or growth, folner, rf, lef, ra.
        #[arg(long)]
        family: String,
        #[arg(long, value_parser = NRange::parse)]
        n: NRange,
        #[arg(long, value_delimiter = ',')]
        methods: Vec<String>,
        #[command(flatten)]
        search: Search,
        #[command(flatten)]
        common: Common,
    },
    /// Følner function curve as CSV.
    Folner {
        #[arg(long)]
        group: String,
        #[arg(long, value_parser = NRange::parse)]
        n: NRange,
        #[command(flatten)]
        search: Search,
        #[command(flatten)]
        common: Common,
    },
    /// Full residual finiteness growth curve as CSV.
    Rfgrowth {
        #[arg(long)]
        group: String,
        #[arg(long, value_parser = NRange::parse)]
        n: NRange,
        #[command(flatten)]
        search: Search,
        #[command(flatten)]
        common: Common,
    },
    /// Check the inequalities between profile curves and word conversions of certificates.
    Audit {
        /// Default group for curves given without `@GROUP`.
        #[arg(long)]
        group: Option<String>,
        /// KIND[@GROUP]=PATH of a CSV written by `profile`.
        #[arg(long)]
        curve: Vec<String>,
        /// PATH[@M] of a certificate to convert at word radius M (default 1).
        #[arg(long)]
        round_trip: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Ball { common, .. }
            | Command::Construct { common, .. }
            | Command::Verify { common, .. }
            | Command::Mutate { common, .. }
            | Command::Profile { common, .. }
            | Command::Folner { common, .. }
            | Command::Rfgrowth { common, .. }
            | Command::Audit { common, .. } => common,
        }
    }
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn verification(message: impl Into<String>) -> Failure {
        Failure { code: EXIT_VERIFY, message: message.into() }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

pub fn exit_code(e: &anyhow::Error) -> u8 {
    if let Some(f) = e.downcast_ref::<Failure>() {
        return f.code;
    }
    if e.downcast_ref::<ConfigError>().is_some() {
        return EXIT_USAGE;
    }
    match e.chain().find_map(|c| c.downcast_ref::<LibError>()) {
        Some(LibError::Overflow { .. }) => EXIT_CAP,
        Some(LibError::VerificationFailed(_) | LibError::Upstream(_)) => EXIT_VERIFY,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
/// Artifacts go to `--out` or to `stdout`; diagnostics go to `stderr`.
pub fn main_with(args: Vec<String>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8 {
    let args = match merge_config(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(&cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            exit_code(&e)
        }
    }
}

fn emit(common: &Common, text: &str, stdout: &mut dyn Write) -> anyhow::Result<()> {
    match &common.out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => stdout.write_all(text.as_bytes()).context("writing output"),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn group(s: &str) -> anyhow::Result<Group> {
    Group::parse(s).with_context(|| format!("group `{s}`"))
}

fn read_certificate(p: &Path) -> anyhow::Result<ApproxCertificate> {
    let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| anyhow!(ConfigError(format!("{}: {e}", p.display()))))?;
    Ok(ApproxCertificate::from_json(&v)?)
}

fn check_dimension(d: Dimension, cap: u64) -> anyhow::Result<()> {
    match d {
        Dimension::Exact(k) if k > cap => {
            Err(anyhow!(LibError::Overflow { what: "target dimension", cap: cap as usize }))
        }
        _ => Ok(()),
    }
}

pub fn run(cmd: &Command, stdout: &mut dyn Write) -> anyhow::Result<u8> {
    let common = cmd.common();
    if let Some(w) = common.workers {
        // fails only when the pool was already set up, as in repeated in-process runs
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w as usize).build_global();
    }
    match cmd {
        Command::Ball { group: g, n, common } => {
            let g = group(g)?;
            let b = ball_with_cap(&g, *n, common.ball_cap as usize)?;
            let forms: Vec<String> = b.elements.iter().map(|x| g.normal_form(x)).collect();
            emit(common, &pretty(&json!(forms)), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Construct { method, group: g, family, n, index, modulus, common } => {
            let g = group(g)?;
            let family = Family::parse(family)?;
            let built = construct(method, &g, &family, *n, *index, *modulus)?;
            check_dimension(built.certificate.dimension, common.dim_cap)?;
            if !built.report.pass {
                return Err(Failure::verification(format!("{method} produced a failing certificate")).into());
            }
            emit(common, &pretty(&built.certificate.to_json()), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Verify { file, common } => {
            let c = read_certificate(file)?;
            check_dimension(c.dimension, common.dim_cap)?;
            let start = Instant::now();
            let rep = verify_d_with(&c, common.tolerance)?;
            let mut v = rep.to_json();
            v["group"] = json!(c.group.to_string());
            v["family"] = json!(c.family.to_string());
            v["n"] = json!(c.n);
            v["dimension"] = c.dimension.to_json();
            if !common.deterministic {
                v["elapsed_ms"] = json!(start.elapsed().as_millis() as u64);
            }
            let text = pretty(&v);
            stdout.write_all(text.as_bytes())?;
            if let Some(p) = &common.out {
                std::fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?;
            }
            Ok(if rep.pass { EXIT_OK } else { EXIT_VERIFY })
        }
        Command::Mutate { file, common } => {
            let c = read_certificate(file)?;
            let m = mutate(&c, common.seed)?;
            emit(common, &pretty(&m.to_json()), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Profile { group: g, family, n, methods, search, common } => {
            let g = group(g)?;
            let kind = ProfileKind::parse(family)?;
            let curve = profile(&g, &kind, n, methods, search, common)?;
            emit(common, &curve.to_csv(), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Folner { group: g, n, search, common } => {
            let curve = profile(&group(g)?, &ProfileKind::Folner, n, &[], search, common)?;
            emit(common, &curve.to_csv(), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Rfgrowth { group: g, n, search, common } => {
            let curve = profile(&group(g)?, &ProfileKind::FullRf, n, &[], search, common)?;
            emit(common, &curve.to_csv(), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Audit { group: g, curve, round_trip: trips, common } => {
            let default_group = g.as_deref().map(group).transpose()?;
            let mut input = AuditInput::default();
            for arg in curve {
                input.curves.push(read_curve(arg, default_group.as_ref())?);
            }
            for arg in trips {
                let (path, m) = match arg.rsplit_once('@') {
                    Some((p, m)) => (p, m.parse::<usize>().map_err(|_| anyhow!(ConfigError(format!("bad radius in {arg}"))))?),
                    None => (arg.as_str(), 1),
                };
                let c = read_certificate(Path::new(path))?;
                input.round_trips.push(round_trip(&c, m)?);
            }
            if input.curves.is_empty() && input.round_trips.is_empty() {
                bail!(ConfigError("audit needs at least one --curve or --round-trip".into()));
            }
            let report = inequality_audit(&input);
            emit(common, &pretty(&report.to_json()), stdout)?;
            Ok(if report.pass { EXIT_OK } else { EXIT_VERIFY })
        }
    }
}

fn read_curve(arg: &str, default_group: Option<&Group>) -> anyhow::Result<ProfileCurve> {
    let bad = || anyhow!(ConfigError(format!("--curve expects KIND[@GROUP]=PATH, got `{arg}`")));
    let (head, path) = arg.split_once('=').ok_or_else(bad)?;
    let (kind, g) = match head.split_once('@') {
        Some((k, g)) => (k, group(g)?),
        None => (head, default_group.cloned().ok_or_else(bad)?),
    };
    let kind = ProfileKind::parse(kind)?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    Ok(ProfileCurve::from_csv(g, kind, &text)?)
}

/// Least-dimension certificate among the default builders.
fn best(g: &Group, family: &Family, n: usize) -> anyhow::Result<Built> {
    let all = Builder::defaults();
    let mut out: Option<Built> = None;
    for b in &all {
        if let Some(built) = b.build(g, family, n, &all)? {
            if out.as_ref().is_none_or(|o| built.certificate.dimension.log2() < o.certificate.dimension.log2()) {
                out = Some(built);
            }
        }
    }
    out.ok_or_else(|| anyhow!(ConfigError(format!("no builder applies to {g} in family {family}"))))
}

fn least_top_quotient(top: &Group, radius: usize) -> anyhow::Result<Quotient> {
    let qf = QuotientFamily::for_group(top)?;
    least_quotient(top, radius, qf, 1 << 20)?
        .ok_or_else(|| anyhow!(LibError::Overflow { what: "quotient index", cap: 1 << 20 }))
}

pub fn construct(method: &str, g: &Group, family: &Family, n: usize, index: i64, modulus: i64) -> anyhow::Result<Built> {
    let usage = |m: String| anyhow!(ConfigError(m));
    if n == 0 {
        return Err(usage("--n must be at least 1".into()));
    }
    match method {
        "cyclic-z" | "quotient" | "folner" | "regular" | "product" => {
            let b = Builder::parse(method)?;
            b.build(g, family, n, &Builder::defaults())?
                .ok_or_else(|| usage(format!("method {method} gives no certificate for {g} in family {family} at n = {n} within its caps")))
        }
        "induce" => {
            let Group::FreeAbelian(d) = g else { return Err(usage(format!("induce needs Z^d, got {g}"))) };
            if index < 1 {
                return Err(usage("--index must be positive".into()));
            }
            let pair = SubgroupPair::Scaled { d: *d, m: index };
            let ch = best(&pair.subgroup(), family, n)?;
            Ok(induce_finite_index(&pair, &ch.certificate, n)?)
        }
        "wreath-rf" => {
            let Some((base, top)) = g.wreath_parts() else { return Err(usage(format!("wreath-rf needs a wreath product, got {g}"))) };
            let cg = best(&base, family, n)?;
            let q = least_top_quotient(&top, 4 * n)?;
            Ok(wreath_by_rf(&cg.certificate, &top, &q, n)?)
        }
        "wreath-sofic" => {
            let Some((base, top)) = g.wreath_parts() else { return Err(usage(format!("wreath-sofic needs a wreath product, got {g}"))) };
            let cg = best(&base, family, n)?;
            let ch = best(&top, family, 4 * n)?;
            let (built, rep) = wreath_sofic(&cg.certificate, &ch.certificate, n, DEFAULT_MATERIALIZE_CAP)?;
            if !(rep.bullets_pass && rep.thresholds_pass) {
                return Err(Failure::verification("wreath bullets or thresholds failed").into());
            }
            Ok(built)
        }
        "amplify" => {
            if *g != Group::z() {
                return Err(usage(format!("amplify is implemented for Z, got {g}")));
            }
            if modulus < 3 || modulus % 2 == 0 {
                return Err(usage("--modulus must be odd and at least 3".into()));
            }
            let base = from_quotient(g, &Quotient::cyclic(modulus), (modulus as usize - 1) / 2, Family::Hyp)?;
            Ok(amplify_projective(&base.certificate, n)?)
        }
        other => Err(usage(format!(
            "unknown method {other}; expected cyclic-z, quotient, folner, regular, product, induce, wreath-rf, wreath-sofic or amplify"
        ))),
    }
}

/// Swaps the targets of two assignments with different targets.
pub fn mutate(c: &ApproxCertificate, seed: u64) -> anyhow::Result<ApproxCertificate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    for i in 0..c.targets.len() {
        for j in i + 1..c.targets.len() {
            if c.targets[i] != c.targets[j] {
                pairs.push((i, j));
            }
        }
    }
    let &(i, j) = pairs.choose(&mut rng).ok_or_else(|| anyhow!(ConfigError("no two distinct targets to swap".into())))?;
    let mut targets = c.targets.clone();
    targets.swap(i, j);
    let mut m = ApproxCertificate::from_parts(c.group.clone(), c.family.clone(), c.epsilon, c.n, c.dimension, c.elements.clone(), targets);
    m.provenance = c.provenance.clone();
    Ok(m)
}

fn strategy(search: &Search, g: &Group, common: &Common) -> anyhow::Result<FolnerStrategy> {
    let name = search.strategy.clone().unwrap_or_else(|| {
        if matches!(g, Group::FreeAbelian(_)) { "boxes" } else { "balls" }.to_string()
    });
    Ok(match name.as_str() {
        "exhaustive" => FolnerStrategy::Exhaustive { r_max: search.r_max, size_max: search.size_max, budget: common.oracle_budget },
        "balls" => FolnerStrategy::Balls { r_max: search.r_max },
        "boxes" => FolnerStrategy::Boxes { side_max: search.side_max, materialize_cap: common.ball_cap as usize },
        other => bail!(ConfigError(format!("unknown Følner strategy {other}"))),
    })
}

pub fn profile(g: &Group, kind: &ProfileKind, ns: &NRange, methods: &[String], search: &Search, common: &Common) -> anyhow::Result<ProfileCurve> {
    if ns.0.first() == Some(&0) {
        bail!(ConfigError("profile radii start at 1".into()));
    }
    let ns = &ns.0;
    let mut curve = ProfileCurve::new(g.clone(), kind.clone());
    match kind {
        ProfileKind::Metric(family) => {
            let mut builders = Vec::new();
            let (mut oracle, mut exact_z) = (false, false);
            let names: Vec<String> = if methods.is_empty() {
                Builder::defaults().iter().map(|b| b.name().to_string()).collect()
            } else {
                methods.to_vec()
            };
            for m in &names {
                match m.as_str() {
                    "oracle" => oracle = true,
                    "exact-z" => exact_z = true,
                    other => builders.push(Builder::parse(other)?),
                }
            }
            curve = upper_curve(g, family, ns, &builders)?;
            for &n in ns {
                if oracle && *family == Family::Sofic {
                    let k_max = metric_approx::profiles::ORACLE_MAX_DEGREE.min(common.dim_cap as usize);
                    for p in sofic_exact_oracle(g, n, k_max, common.oracle_budget)?.points() {
                        curve.push(p);
                    }
                }
                if exact_z && *family == Family::Fin && *g == Group::z() {
                    curve.push(weakly_sofic_exact_z(n)?);
                }
            }
        }
        ProfileKind::Growth => curve = growth_curve(g, ns)?,
        ProfileKind::Folner => {
            let s = strategy(search, g, common)?;
            for &n in ns {
                curve.push(folner_search(g, n, &s)?.point());
            }
        }
        ProfileKind::FullRf => {
            let qf = QuotientFamily::for_group(g)?;
            for &n in ns {
                curve.push(full_rf_growth(g, n, qf, search.max_index)?);
            }
        }
        ProfileKind::LeF => {
            let catalog: Vec<Group> = (1..=search.catalog_max).map(Group::FiniteCyclic).collect();
            for &n in ns {
                for p in le_f_growth(g, n, &catalog, common.oracle_budget)?.points() {
                    curve.push(p);
                }
            }
        }
        ProfileKind::Ra => {
            let catalog = [RaEntry::identity(g, strategy(search, g, common)?)];
            for &n in ns {
                curve.push(ra_profile(g, n, &catalog)?);
            }
        }
    }
    Ok(curve)
}
