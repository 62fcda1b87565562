//! Profile estimates: exact values at tiny radii, upper curves from builders, lower bounds,
//! Følner and residual finiteness searches, and an auditor for the known inequalities.

mod audit;
mod curves;
mod folner;
mod oracle;
mod rf;

pub use audit::{inequality_audit, round_trip, AuditInput, AuditReport, Check, RoundTrip};
pub use curves::{growth_curve, injectivity_lower, upper_curve, Builder};
pub use folner::{folner_bound_nilpotent, folner_search, ra_profile, FolnerSearch, FolnerStrategy, RaEntry};
pub use oracle::{le_f_growth, sofic_exact_oracle, weakly_sofic_exact_z, OracleOutcome, Refutation, ORACLE_MAX_DEGREE};
pub use rf::{full_rf_growth, least_quotient, QuotientFamily};

use crate::error::{Error, Result};
use crate::groups::Group;
use crate::targets::{Dimension, Family};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;

/// Which function of n a curve records.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ProfileKind {
    /// Least dimension of an approximation into the family.
    Metric(Family),
    /// |B(n)|.
    Growth,
    Folner,
    FullRf,
    LeF,
    Ra,
}

impl ProfileKind {
    pub fn parse(s: &str) -> Result<ProfileKind> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "growth" | "beta" => ProfileKind::Growth,
            "folner" | "fol" => ProfileKind::Folner,
            "rf" | "phi" | "fullrf" => ProfileKind::FullRf,
            "lef" => ProfileKind::LeF,
            "ra" => ProfileKind::Ra,
            other => ProfileKind::Metric(Family::parse(other)?),
        })
    }
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileKind::Metric(fam) => write!(f, "{fam}"),
            ProfileKind::Growth => write!(f, "growth"),
            ProfileKind::Folner => write!(f, "folner"),
            ProfileKind::FullRf => write!(f, "rf"),
            ProfileKind::LeF => write!(f, "lef"),
            ProfileKind::Ra => write!(f, "ra"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointValue {
    Finite(u64),
    /// A dimension too large to write out, such as a tensor power.
    Symbolic(Dimension),
    /// No approximation exists in the searched space (min of the empty set).
    Infinite,
    Unknown,
}

impl PointValue {
    pub fn from_dimension(d: Dimension) -> PointValue {
        match d {
            Dimension::Exact(k) => PointValue::Finite(k),
            Dimension::Power { .. } => match d.as_exact() {
                Some(k) => PointValue::Finite(k),
                None => PointValue::Symbolic(d),
            },
        }
    }

    pub fn as_u64(&self) -> Option<u64> {
        match self {
            PointValue::Finite(k) => Some(*k),
            _ => None,
        }
    }

    /// log2 of the value, for comparisons that may involve symbolic sizes.
    pub fn log2(&self) -> Option<f64> {
        match self {
            PointValue::Finite(k) => Some((*k as f64).log2()),
            PointValue::Symbolic(d) => Some(d.log2()),
            PointValue::Infinite => Some(f64::INFINITY),
            PointValue::Unknown => None,
        }
    }

    fn cmp_le(&self, o: &PointValue) -> Option<bool> {
        match (self, o) {
            (PointValue::Finite(a), PointValue::Finite(b)) => Some(a <= b),
            (PointValue::Unknown, _) | (_, PointValue::Unknown) => None,
            (PointValue::Infinite, PointValue::Infinite) => Some(true),
            _ => Some(self.log2()? <= o.log2()? + 1e-9),
        }
    }
}

impl fmt::Display for PointValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointValue::Finite(k) => write!(f, "{k}"),
            PointValue::Symbolic(d) => write!(f, "{d}"),
            PointValue::Infinite => write!(f, "inf"),
            PointValue::Unknown => write!(f, "unknown"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    Exact { argument: String },
    /// Upper bound realised by a builder.
    Upper { builder: String },
    Lower { argument: String },
}

impl Provenance {
    pub fn exact(s: &str) -> Provenance {
        Provenance::Exact { argument: s.into() }
    }

    pub fn upper(s: &str) -> Provenance {
        Provenance::Upper { builder: s.into() }
    }

    pub fn lower(s: &str) -> Provenance {
        Provenance::Lower { argument: s.into() }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Exact { argument } => write!(f, "exact({argument})"),
            Provenance::Upper { builder } => write!(f, "upper({builder})"),
            Provenance::Lower { argument } => write!(f, "lower({argument})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfilePoint {
    pub n: usize,
    pub value: PointValue,
    pub provenance: Provenance,
    /// Trace of the certificate or witness behind an upper bound.
    pub certificate: Option<Value>,
}

impl ProfilePoint {
    pub fn new(n: usize, value: PointValue, provenance: Provenance) -> ProfilePoint {
        ProfilePoint { n, value, provenance, certificate: None }
    }

    pub fn with_certificate(mut self, v: Value) -> ProfilePoint {
        self.certificate = Some(v);
        self
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.provenance, Provenance::Exact { .. }) && self.value != PointValue::Unknown
    }

    pub fn is_lower(&self) -> bool {
        matches!(self.provenance, Provenance::Lower { .. })
    }

    pub fn is_upper(&self) -> bool {
        matches!(self.provenance, Provenance::Upper { .. })
    }
}

/// Merged bounds at one radius.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub n: usize,
    pub lower: Option<PointValue>,
    pub exact: Option<PointValue>,
    pub upper: Option<PointValue>,
    pub provenance: Vec<String>,
}

/// Least-squares slope of log(value) against log(n).
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub n_min: usize,
    pub n_max: usize,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileCurve {
    pub group: Group,
    pub kind: ProfileKind,
    pub points: Vec<ProfilePoint>,
    pub slope: Option<SlopeFit>,
}

fn better_lower(a: Option<PointValue>, b: PointValue) -> Option<PointValue> {
    match a {
        Some(x) if x.cmp_le(&b) != Some(true) => Some(x),
        _ => Some(b),
    }
}

fn better_upper(a: Option<PointValue>, b: PointValue) -> Option<PointValue> {
    match a {
        Some(x) if x.cmp_le(&b) == Some(true) => Some(x),
        _ => Some(b),
    }
}

impl ProfileCurve {
    pub fn new(group: Group, kind: ProfileKind) -> ProfileCurve {
        ProfileCurve { group, kind, points: vec![], slope: None }
    }

    pub fn push(&mut self, p: ProfilePoint) {
        self.points.push(p);
    }

    /// Bounds per radius. Profiles are nondecreasing in n, so a lower bound at n also holds at
    /// every larger radius and an upper bound at n at every smaller one.
    pub fn rows(&self) -> Vec<Row> {
        let mut by_n: BTreeMap<usize, Row> = BTreeMap::new();
        for p in &self.points {
            let r = by_n.entry(p.n).or_insert_with(|| Row { n: p.n, lower: None, exact: None, upper: None, provenance: vec![] });
            if p.value == PointValue::Unknown {
                continue;
            }
            match &p.provenance {
                Provenance::Exact { .. } => {
                    r.exact = Some(p.value);
                    r.lower = better_lower(r.lower, p.value);
                    r.upper = better_upper(r.upper, p.value);
                }
                Provenance::Lower { .. } => r.lower = better_lower(r.lower, p.value),
                Provenance::Upper { .. } => r.upper = better_upper(r.upper, p.value),
            }
            let tag = p.provenance.to_string();
            if !r.provenance.contains(&tag) {
                r.provenance.push(tag);
            }
        }
        let mut rows: Vec<Row> = by_n.into_values().collect();
        for i in 1..rows.len() {
            if let Some(l) = rows[i - 1].lower {
                rows[i].lower = better_lower(rows[i].lower, l);
            }
        }
        for i in (0..rows.len().saturating_sub(1)).rev() {
            if let Some(u) = rows[i + 1].upper {
                rows[i].upper = better_upper(rows[i].upper, u);
            }
        }
        for r in &mut rows {
            if r.exact.is_none() && r.lower.is_some() && r.lower == r.upper {
                r.exact = r.lower;
            }
        }
        rows
    }

    /// Best upper bound valid at n: the least upper bound recorded at any radius >= n.
    pub fn upper_at(&self, n: usize) -> Option<PointValue> {
        self.rows().into_iter().find(|r| r.n >= n && r.upper.is_some()).and_then(|r| r.upper)
    }

    /// Best lower bound valid at n: the largest lower bound recorded at any radius <= n.
    pub fn lower_at(&self, n: usize) -> Option<PointValue> {
        self.rows().into_iter().filter(|r| r.n <= n).filter_map(|r| r.lower).next_back()
    }

    pub fn row(&self, n: usize) -> Option<Row> {
        self.rows().into_iter().find(|r| r.n == n)
    }

    /// Exact values sit between the bounds at the same radius and are nondecreasing; returns
    /// a description of every violation.
    pub fn check(&self) -> Vec<String> {
        let mut out = Vec::new();
        for r in self.rows() {
            if let (Some(l), Some(u)) = (r.lower, r.upper) {
                if l.cmp_le(&u) == Some(false) {
                    out.push(format!("n = {}: lower {l} exceeds upper {u}", r.n));
                }
            }
        }
        let exact: Vec<&ProfilePoint> = self.points.iter().filter(|p| p.is_exact()).collect();
        for a in &exact {
            for b in &exact {
                if a.n < b.n && a.value.cmp_le(&b.value) == Some(false) {
                    out.push(format!("exact values decrease from n = {} to n = {}", a.n, b.n));
                }
            }
        }
        out
    }

    /// Fits the slope over [n_min, n_max] using the exact value where present, else the upper bound.
    pub fn fit_slope(&mut self, n_min: usize, n_max: usize) -> Result<SlopeFit> {
        let pts: Vec<(f64, f64)> = self
            .rows()
            .into_iter()
            .filter(|r| r.n >= n_min.max(1) && r.n <= n_max)
            .filter_map(|r| {
                let v = r.exact.or(r.upper)?;
                Some(((r.n as f64).ln(), v.log2()? * std::f64::consts::LN_2))
            })
            .filter(|(_, y)| y.is_finite())
            .collect();
        let fit = SlopeFit { slope: least_squares_slope(&pts)?, n_min, n_max, points: pts.len() };
        self.slope = Some(fit.clone());
        Ok(fit)
    }

    /// CSV with columns n, lower, exact, upper, provenance.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,lower,exact,upper,provenance\n");
        let cell = |v: Option<PointValue>| v.map_or(String::new(), |v| v.to_string());
        for r in self.rows() {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                r.n,
                cell(r.lower),
                cell(r.exact),
                cell(r.upper),
                r.provenance.join(";")
            ));
        }
        s
    }

    /// Reads the CSV written by [`ProfileCurve::to_csv`]. Symbolic sizes are read back as
    /// unknown, which the audit skips.
    pub fn from_csv(group: Group, kind: ProfileKind, text: &str) -> Result<ProfileCurve> {
        let mut c = ProfileCurve::new(group, kind);
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next() {
            Some(h) if h.trim() == "n,lower,exact,upper,provenance" => {}
            _ => return Err(Error::Invalid("expected the header n,lower,exact,upper,provenance".into())),
        }
        for (i, line) in lines.enumerate() {
            let f: Vec<&str> = line.splitn(5, ',').collect();
            if f.len() != 5 {
                return Err(Error::Invalid(format!("line {}: expected 5 fields", i + 2)));
            }
            let n: usize = f[0].trim().parse().map_err(|_| Error::Invalid(format!("line {}: bad n", i + 2)))?;
            let parse = |s: &str| -> Option<PointValue> {
                match s.trim() {
                    "" => None,
                    "inf" => Some(PointValue::Infinite),
                    t => Some(t.parse().map(PointValue::Finite).unwrap_or(PointValue::Unknown)),
                }
            };
            let tag = f[4].trim();
            if let Some(v) = parse(f[2]) {
                c.push(ProfilePoint::new(n, v, Provenance::exact(tag)));
            } else {
                if let Some(v) = parse(f[1]) {
                    c.push(ProfilePoint::new(n, v, Provenance::lower(tag)));
                }
                if let Some(v) = parse(f[3]) {
                    c.push(ProfilePoint::new(n, v, Provenance::upper(tag)));
                }
            }
        }
        Ok(c)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "group": self.group.to_string(),
            "kind": self.kind.to_string(),
            "points": self.points.iter().map(|p| json!({
                "n": p.n,
                "value": p.value.to_string(),
                "provenance": p.provenance.to_string(),
                "certificate": p.certificate,
            })).collect::<Vec<_>>(),
            "slope": self.slope.as_ref().map(|s| json!({ "slope": s.slope, "n_min": s.n_min, "n_max": s.n_max })),
        })
    }
}

pub fn least_squares_slope(pts: &[(f64, f64)]) -> Result<f64> {
    if pts.len() < 2 {
        return Err(Error::Invalid(format!("slope fit needs two points, got {}", pts.len())));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Invalid("slope fit needs two distinct radii".into()));
    }
    Ok(sxy / sxx)
}
