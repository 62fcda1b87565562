//! Flat `key = value` run configuration. Keys are the long flag names of the subcommands;
//! values given on the command line win over the file.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

pub const DEFAULT_ORACLE_BUDGET: u64 = 5_000_000;
pub const DEFAULT_DIM_CAP: u64 = 1 << 24;
pub const MAX_TOLERANCE: f64 = 1e-3;

const COMMANDS: [&str; 8] = ["ball", "construct", "verify", "mutate", "profile", "folner", "rfgrowth", "audit"];

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

/// Inclusive range of radii, written `a..b`, `a..=b`, `a,b,c` or a single number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NRange(pub Vec<usize>);

impl NRange {
    pub fn parse(s: &str) -> Result<NRange, ConfigError> {
        let s = s.trim();
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| ConfigError(format!("bad radius `{t}` in `{s}`")));
        let v: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return err(format!("empty range {s}"));
            }
            (a..=b).collect()
        } else {
            s.split(',').map(num).collect::<Result<_, _>>()?
        };
        let mut v = v;
        v.sort_unstable();
        v.dedup();
        if v.is_empty() {
            return err("empty range");
        }
        Ok(NRange(v))
    }
}

impl fmt::Display for NRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = &self.0;
        let contiguous = v.windows(2).all(|w| w[1] == w[0] + 1);
        if v.len() > 1 && contiguous {
            write!(f, "{}..{}", v[0], v[v.len() - 1])
        } else {
            let parts: Vec<String> = v.iter().map(usize::to_string).collect();
            f.write_str(&parts.join(","))
        }
    }
}

pub fn parse_tolerance(s: &str) -> Result<f64, ConfigError> {
    let t: f64 = s.trim().parse().map_err(|_| ConfigError(format!("bad tolerance {s}")))?;
    if !(t > 0.0 && t <= MAX_TOLERANCE) {
        return err(format!("tolerance {t} outside (0, {MAX_TOLERANCE}]"));
    }
    Ok(t)
}

pub fn parse_positive(s: &str) -> Result<u64, ConfigError> {
    match s.trim().parse::<u64>() {
        Ok(0) => err("caps must be positive"),
        Ok(v) => Ok(v),
        Err(_) => err(format!("bad number {s}")),
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub command: Option<String>,
    pub group: Option<String>,
    pub family: Option<String>,
    pub n: Option<NRange>,
    pub methods: Vec<String>,
    pub ball_cap: Option<u64>,
    pub word_cap: Option<u64>,
    pub oracle_budget: Option<u64>,
    pub dim_cap: Option<u64>,
    pub tolerance: Option<f64>,
    pub out: Option<PathBuf>,
    pub deterministic: Option<bool>,
    pub seed: Option<u64>,
    pub workers: Option<u64>,
    /// Subcommand-specific flags such as `strategy` or `max-index`, passed through verbatim.
    pub extra: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn from_kv(text: &str) -> Result<RunConfig, ConfigError> {
        let mut c = RunConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return err(format!("line {}: expected key = value", i + 1));
            };
            let key = k.trim().replace('_', "-");
            let v = v.trim();
            c.set(&key, v).map_err(|e| ConfigError(format!("line {}: {e}", i + 1)))?;
        }
        c.validate()?;
        Ok(c)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<(), ConfigError> {
        let dup = |set: bool| if set { err(format!("duplicate key {key}")) } else { Ok(()) };
        match key {
            "command" => {
                dup(self.command.is_some())?;
                if !COMMANDS.contains(&v) {
                    return err(format!("unknown command {v}"));
                }
                self.command = Some(v.into());
            }
            "group" => {
                dup(self.group.is_some())?;
                self.group = Some(v.into());
            }
            "family" => {
                dup(self.family.is_some())?;
                self.family = Some(v.into());
            }
            "n" => {
                dup(self.n.is_some())?;
                self.n = Some(NRange::parse(v)?);
            }
            "methods" => {
                dup(!self.methods.is_empty())?;
                self.methods = v.split(',').map(|m| m.trim().to_string()).filter(|m| !m.is_empty()).collect();
            }
            "ball-cap" => self.ball_cap = Some(parse_positive(v)?),
            "word-cap" => self.word_cap = Some(parse_positive(v)?),
            "oracle-budget" => self.oracle_budget = Some(parse_positive(v)?),
            "dim-cap" => self.dim_cap = Some(parse_positive(v)?),
            "workers" => self.workers = Some(parse_positive(v)?),
            "tolerance" => self.tolerance = Some(parse_tolerance(v)?),
            "seed" => self.seed = Some(v.parse().map_err(|_| ConfigError(format!("bad seed {v}")))?),
            "deterministic" => self.deterministic = Some(v.parse().map_err(|_| ConfigError(format!("bad boolean {v}")))?),
            "out" => self.out = Some(PathBuf::from(v)),
            "config" => return err("config files cannot include other config files"),
            _ => {
                if key.is_empty() || !key.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '-') {
                    return err(format!("bad key {key}"));
                }
                if self.extra.insert(key.to_string(), v.to_string()).is_some() {
                    return err(format!("duplicate key {key}"));
                }
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, cap) in [
            ("ball-cap", self.ball_cap),
            ("word-cap", self.word_cap),
            ("oracle-budget", self.oracle_budget),
            ("dim-cap", self.dim_cap),
            ("workers", self.workers),
        ] {
            if cap == Some(0) {
                return err(format!("{name} must be positive"));
            }
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t <= MAX_TOLERANCE) {
                return err(format!("tolerance {t} outside (0, {MAX_TOLERANCE}]"));
            }
        }
        Ok(())
    }

    fn pairs(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = Vec::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                out.push((k.to_string(), v));
            }
        };
        put("group", self.group.clone());
        put("family", self.family.clone());
        put("n", self.n.as_ref().map(NRange::to_string));
        put("methods", (!self.methods.is_empty()).then(|| self.methods.join(",")));
        put("ball-cap", self.ball_cap.map(|v| v.to_string()));
        put("word-cap", self.word_cap.map(|v| v.to_string()));
        put("oracle-budget", self.oracle_budget.map(|v| v.to_string()));
        put("dim-cap", self.dim_cap.map(|v| v.to_string()));
        put("tolerance", self.tolerance.map(|v| v.to_string()));
        put("out", self.out.as_ref().map(|p| p.display().to_string()));
        put("deterministic", self.deterministic.map(|v| v.to_string()));
        put("seed", self.seed.map(|v| v.to_string()));
        put("workers", self.workers.map(|v| v.to_string()));
        for (k, v) in &self.extra {
            out.push((k.clone(), v.clone()));
        }
        out
    }

    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        if let Some(c) = &self.command {
            s.push_str(&format!("command = {c}\n"));
        }
        for (k, v) in self.pairs() {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }

    /// Command-line flags equivalent to the file, without the subcommand.
    pub fn to_args(&self) -> Vec<String> {
        self.pairs().into_iter().flat_map(|(k, v)| [format!("--{k}"), v]).collect()
    }
}

/// Splices the flags of any `--config FILE` into the argument list right after the subcommand,
/// ahead of the explicit flags so that those override the file. A `command` key supplies the
/// subcommand when the command line has none.
pub fn merge_config(args: Vec<String>) -> Result<Vec<String>, ConfigError> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    let program = it.next().unwrap_or_else(|| "mapx".into());
    while let Some(a) = it.next() {
        if a == "--config" {
            let Some(p) = it.next() else { return err("--config needs a path") };
            if path.replace(p).is_some() {
                return err("--config given twice");
            }
        } else if let Some(p) = a.strip_prefix("--config=") {
            if path.replace(p.to_string()).is_some() {
                return err("--config given twice");
            }
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else {
        let mut out = vec![program];
        out.extend(rest);
        return Ok(out);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| ConfigError(format!("reading {path}: {e}")))?;
    let cfg = RunConfig::from_kv(&text)?;
    let pos = rest.iter().position(|a| COMMANDS.contains(&a.as_str()));
    let mut out = vec![program];
    match (pos, &cfg.command) {
        (Some(i), Some(c)) if rest[i] != *c => return err(format!("config is for `{c}`, command line runs `{}`", rest[i])),
        (Some(i), _) => {
            out.extend(rest[..=i].iter().cloned());
            out.extend(cfg.to_args());
            out.extend(rest[i + 1..].iter().cloned());
        }
        (None, Some(c)) => {
            out.push(c.clone());
            out.extend(cfg.to_args());
            out.extend(rest);
        }
        (None, None) => return err("no subcommand on the command line or in the config file"),
    }
    Ok(out)
}
