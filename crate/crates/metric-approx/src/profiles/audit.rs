use super::{PointValue, ProfileCurve, ProfileKind};
use crate::certify::{d_from_w, verify_r, verify_w, w_from_d, ApproxCertificate, DEFAULT_WORD_CAP};
use crate::error::{Error, Result};
use crate::groups::Group;
use crate::targets::Family;
use serde_json::{json, Value};

/// Results of the W/D/R conversions on one certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundTrip {
    pub group: Group,
    pub m: usize,
    pub dimension: u64,
    /// The generator images of a certificate passing at 3m^2 pass the word check at m.
    pub w_from_d: bool,
    /// Whether the same homomorphism passes the word check at 3m, which the converse needs.
    pub w_at_3m: bool,
    /// The certificate rebuilt from words passes at m with the same dimension (when `w_at_3m`).
    pub d_from_w: Option<bool>,
    /// The relator check at m, when the group has a known presentation.
    pub r_from_w: Option<bool>,
}

/// Runs the conversions on a certificate verified at radius at least 3m^2.
pub fn round_trip(c: &ApproxCertificate, m: usize) -> Result<RoundTrip> {
    let dimension = c.dimension.as_exact().ok_or_else(|| Error::Unsupported("symbolic dimension".into()))?;
    let (h, rep) = w_from_d(c, m)?;
    let w_ok = rep.pass && h.dimension == c.dimension;
    let w3 = verify_w(&h, 3 * m, DEFAULT_WORD_CAP)?.pass;
    let d_from = if w3 {
        let (back, rep) = d_from_w(&h, m)?;
        Some(rep.pass && back.dimension == c.dimension)
    } else {
        None
    };
    let r = match h.relators {
        Some(_) => Some(verify_r(&h, m, DEFAULT_WORD_CAP)?.pass),
        None => None,
    };
    Ok(RoundTrip { group: c.group.clone(), m, dimension, w_from_d: w_ok, w_at_3m: w3, d_from_w: d_from, r_from_w: r })
}

#[derive(Clone, Debug, Default)]
pub struct AuditInput {
    pub curves: Vec<ProfileCurve>,
    pub round_trips: Vec<RoundTrip>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub relation: String,
    pub group: String,
    pub n: usize,
    pub lhs: String,
    pub rhs: String,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditReport {
    pub checks: Vec<Check>,
    pub violations: usize,
    pub pass: bool,
}

impl AuditReport {
    pub fn to_json(&self) -> Value {
        json!({
            "pass": self.pass,
            "checked": self.checks.len(),
            "violations": self.checks.iter().filter(|c| !c.ok).map(|c| json!({
                "relation": c.relation, "group": c.group, "n": c.n, "lhs": c.lhs, "rhs": c.rhs,
            })).collect::<Vec<_>>(),
        })
    }
}

fn find<'a>(curves: &'a [ProfileCurve], g: &Group, pred: impl Fn(&ProfileKind) -> bool) -> Option<&'a ProfileCurve> {
    curves.iter().find(|c| c.group == *g && pred(&c.kind))
}

fn le(a: PointValue, b: PointValue) -> Option<bool> {
    a.cmp_le(&b)
}

fn show(v: Option<PointValue>) -> String {
    v.map_or("-".into(), |v| v.to_string())
}

// k!, or None once it no longer fits
fn factorial(k: u64) -> Option<u64> {
    (1..=k).try_fold(1u64, |acc, i| acc.checked_mul(i))
}

struct Ctx<'a> {
    group: String,
    checks: &'a mut Vec<Check>,
}

impl Ctx<'_> {
    fn push(&mut self, relation: &str, n: usize, lhs: Option<PointValue>, rhs: Option<PointValue>, ok: bool) {
        self.checks.push(Check { relation: relation.into(), group: self.group.clone(), n, lhs: show(lhs), rhs: show(rhs), ok });
    }

    /// A(n) <= B(map(n)). A lower bound for A above an upper bound for B contradicts the
    /// inequality outright; with `transfer` set the upper bounds are compared too, since A's
    /// builders include the construction that proves the inequality from B's certificates.
    fn compare(&mut self, relation: &str, a: &ProfileCurve, b: &ProfileCurve, map: impl Fn(usize) -> usize, transfer: bool) {
        for ra in a.rows() {
            let ub = b.upper_at(map(ra.n));
            if let (Some(l), Some(u)) = (ra.lower, ub) {
                if let Some(ok) = le(l, u) {
                    self.push(&format!("{relation} [lower vs upper]"), ra.n, Some(l), Some(u), ok);
                }
            }
            if transfer {
                if let (Some(ua), Some(u)) = (ra.upper, ub) {
                    if let Some(ok) = le(ua, u) {
                        self.push(&format!("{relation} [upper vs upper]"), ra.n, Some(ua), Some(u), ok);
                    }
                }
            }
        }
    }
}

/// Checks the inequality web on every group that has the relevant curves:
/// growth <= fin, fin(n) <= rf(2n), lin <= sof, hyp(n) <= sof(2n^2), sof(n) <= folner(2n),
/// fin <= sof!, and the W/D/R conversions on the round trips.
pub fn inequality_audit(input: &AuditInput) -> AuditReport {
    let mut checks = Vec::new();
    let mut groups: Vec<Group> = Vec::new();
    for c in &input.curves {
        if !groups.contains(&c.group) {
            groups.push(c.group.clone());
        }
    }
    for g in &groups {
        let cv = &input.curves;
        let growth = find(cv, g, |k| *k == ProfileKind::Growth);
        let fin = find(cv, g, |k| *k == ProfileKind::Metric(Family::Fin));
        let sof = find(cv, g, |k| *k == ProfileKind::Metric(Family::Sofic));
        let lin = find(cv, g, |k| matches!(k, ProfileKind::Metric(Family::Lin(_))));
        let hyp = find(cv, g, |k| *k == ProfileKind::Metric(Family::Hyp));
        let fol = find(cv, g, |k| *k == ProfileKind::Folner);
        let rf = find(cv, g, |k| *k == ProfileKind::FullRf);
        let mut ctx = Ctx { group: g.to_string(), checks: &mut checks };
        for c in cv.iter().filter(|c| c.group == *g) {
            for v in c.check() {
                ctx.push(&format!("{} curve consistency: {v}", c.kind), 0, None, None, false);
            }
        }
        if let (Some(b), Some(f)) = (growth, fin) {
            ctx.compare("growth <= fin", b, f, |n| n, true);
        }
        if let (Some(b), Some(r)) = (growth, rf) {
            ctx.compare("growth(n) <= rf(2n)", b, r, |n| 2 * n, true);
        }
        if let (Some(f), Some(r)) = (fin, rf) {
            ctx.compare("fin(n) <= rf(2n)", f, r, |n| 2 * n, true);
        }
        if let (Some(l), Some(s)) = (lin, sof) {
            ctx.compare("lin <= sof", l, s, |n| n, true);
        }
        if let (Some(h), Some(s)) = (hyp, sof) {
            ctx.compare("hyp(n) <= sof(2n^2)", h, s, |n| 2 * n * n, true);
        }
        if let (Some(s), Some(f)) = (sof, fol) {
            ctx.compare("sof(n) <= folner(2n)", s, f, |n| 2 * n, false);
        }
        if let (Some(f), Some(s)) = (fin, sof) {
            let srows = s.rows();
            for rf in f.rows() {
                let Some(rs) = srows.iter().find(|r| r.n == rf.n) else { continue };
                let Some(PointValue::Finite(k)) = rs.upper else { continue };
                let bound = factorial(k).map(PointValue::Finite);
                if let Some(l) = rf.lower {
                    let ok = bound.is_none_or(|b| le(l, b) != Some(false));
                    ctx.push("fin <= sof! [lower vs upper]", rf.n, Some(l), bound, ok);
                }
            }
        }
    }
    for t in &input.round_trips {
        let mut ctx = Ctx { group: t.group.to_string(), checks: &mut checks };
        let dim = Some(PointValue::Finite(t.dimension));
        ctx.push("W(m) <= D(3m^2)", t.m, dim, dim, t.w_from_d);
        if let Some(ok) = t.d_from_w {
            ctx.push("D(m) <= W(3m)", t.m, dim, dim, ok);
        }
        if let Some(ok) = t.r_from_w {
            ctx.push("R(m) <= W(m)", t.m, dim, dim, ok || !t.w_from_d);
        }
    }
    let violations = checks.iter().filter(|c| !c.ok).count();
    AuditReport { checks, violations, pass: violations == 0 }
}
