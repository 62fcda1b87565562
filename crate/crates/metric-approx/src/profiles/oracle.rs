use super::{PointValue, ProfilePoint, Provenance};
use crate::certify::{verify_d, ApproxCertificate, Trace};
use crate::construct::from_quotient;
use crate::error::{Error, Result};
use crate::groups::{ball, Ball, Group, Quotient};
use crate::targets::{Dimension, Family, FiniteElem, FiniteMetricGroup, Perm, Target};
use serde_json::json;
use std::sync::Arc;

/// Largest ball the backtracking searches accept.
pub const ORACLE_BALL_CAP: usize = 64;
/// Largest degree the sofic oracle enumerates (8! permutations per ball element).
pub const ORACLE_MAX_DEGREE: usize = 8;

/// A degree ruled out by exhausting the search space.
#[derive(Clone, Debug, PartialEq)]
pub struct Refutation {
    pub k: usize,
    pub nodes: u64,
}

#[derive(Clone, Debug)]
pub struct OracleOutcome {
    pub point: ProfilePoint,
    pub lower: u64,
    pub upper: Option<u64>,
    pub refuted: Vec<Refutation>,
    pub witness: Option<ApproxCertificate>,
    pub nodes: u64,
}

impl OracleOutcome {
    /// The outcome as curve points: the exact value, or whatever bounds were established.
    pub fn points(&self) -> Vec<ProfilePoint> {
        if self.point.is_exact() {
            return vec![self.point.clone()];
        }
        let n = self.point.n;
        let mut out = vec![ProfilePoint::new(n, PointValue::Finite(self.lower), Provenance::lower("search"))];
        if let Some(u) = self.upper {
            out.push(ProfilePoint::new(n, PointValue::Finite(u), Provenance::upper("search witness")));
        }
        out
    }
}

fn products(b: &Ball, g: &Group) -> Vec<Vec<Option<usize>>> {
    b.elements.iter().map(|x| b.elements.iter().map(|y| b.index_of(&g.mul(x, y))).collect()).collect()
}

// Constraints (i, j, ij) whose largest index is p, so they can be checked right after p is assigned.
fn constraints_by_last(mul: &[Vec<Option<usize>>]) -> Vec<Vec<(usize, usize, usize)>> {
    let m = mul.len();
    let mut out = vec![Vec::new(); m];
    for i in 0..m {
        for j in 0..m {
            if let Some(k) = mul[i][j] {
                out[i.max(j).max(k)].push((i, j, k));
            }
        }
    }
    out
}

fn all_perms(k: usize) -> Vec<Vec<u8>> {
    fn rec(k: usize, cur: &mut Vec<u8>, used: &mut Vec<bool>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in 0..k {
            if !used[v] {
                used[v] = true;
                cur.push(v as u8);
                rec(k, cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(k, &mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

// One permutation per cycle type: cycles of nonincreasing length on consecutive points.
fn class_representatives(k: usize) -> Vec<Vec<u8>> {
    fn partitions(n: usize, max: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for first in (1..=n.min(max)).rev() {
            for mut rest in partitions(n - first, first) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }
    partitions(k, k)
        .into_iter()
        .map(|p| {
            let mut img = Vec::with_capacity(k);
            let mut start = 0;
            for len in p {
                for i in 0..len {
                    img.push((start + (i + 1) % len) as u8);
                }
                start += len;
            }
            img
        })
        .collect()
}

struct SoficSearch<'a> {
    k: usize,
    n: usize,
    perms: &'a [Vec<u8>],
    reps: &'a [usize],
    m: usize,
    checks: &'a [Vec<(usize, usize, usize)>],
    assigned: Vec<usize>,
    nodes: u64,
    budget: u64,
}

enum Search {
    Found,
    Exhausted,
    OutOfBudget,
}

impl SoficSearch<'_> {
    fn disagree(a: &[u8], b: &[u8]) -> usize {
        a.iter().zip(b).filter(|(x, y)| x != y).count()
    }

    fn composed(a: &[u8], b: &[u8], c: &[u8]) -> usize {
        b.iter().zip(c).filter(|(&y, &z)| a[y as usize] != z).count()
    }

    fn admissible(&self, p: usize) -> bool {
        let (k, n) = (self.k, self.n);
        let cur = &self.perms[self.assigned[p]];
        // separation s / k > 1 - 1/n, defect d / k < 1/n
        for q in 0..p {
            let s = Self::disagree(cur, &self.perms[self.assigned[q]]);
            if s * n <= k * (n - 1) {
                return false;
            }
        }
        self.checks[p].iter().all(|&(i, j, ij)| {
            let d = Self::composed(&self.perms[self.assigned[i]], &self.perms[self.assigned[j]], &self.perms[self.assigned[ij]]);
            d * n < k
        })
    }

    fn run(&mut self, p: usize, all_identity: bool) -> Search {
        if p == self.m {
            return Search::Found;
        }
        // while every earlier image is the identity, conjugating the whole map lets the next
        // image be a cycle-type representative
        let candidates: Vec<usize> = if all_identity { self.reps.to_vec() } else { (0..self.perms.len()).collect() };
        for c in candidates {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Search::OutOfBudget;
            }
            self.assigned[p] = c;
            if self.admissible(p) {
                match self.run(p + 1, all_identity && c == 0) {
                    Search::Exhausted => {}
                    other => return other,
                }
            }
        }
        Search::Exhausted
    }
}

/// Least k <= k_max with an (n, 1)-approximation of G into Sym(k), found by backtracking over
/// all assignments of the ball. Every smaller degree is refuted exhaustively.
pub fn sofic_exact_oracle(g: &Group, n: usize, k_max: usize, budget: u64) -> Result<OracleOutcome> {
    if n == 0 || k_max == 0 {
        return Err(Error::Invalid("the oracle needs n >= 1 and k_max >= 1".into()));
    }
    let b = ball(g, n)?;
    let unknown = |lower: u64, refuted: Vec<Refutation>, nodes: u64| OracleOutcome {
        point: ProfilePoint::new(n, PointValue::Unknown, Provenance::lower("search")),
        lower,
        upper: None,
        refuted,
        witness: None,
        nodes,
    };
    if b.len() > ORACLE_BALL_CAP {
        return Ok(unknown(1, vec![], 0));
    }
    let mul = products(&b, g);
    let checks = constraints_by_last(&mul);
    let mut refuted = Vec::new();
    let mut total = 0u64;
    for k in 1..=k_max.min(ORACLE_MAX_DEGREE) {
        let perms = all_perms(k);
        let reps: Vec<usize> = class_representatives(k).iter().map(|r| perms.iter().position(|p| p == r).unwrap()).collect();
        let mut s = SoficSearch {
            k,
            n,
            perms: &perms,
            reps: &reps,
            m: b.len(),
            checks: &checks,
            assigned: vec![0; b.len()],
            nodes: 0,
            budget: budget.saturating_sub(total),
        };
        let result = s.run(0, true);
        total += s.nodes;
        match result {
            Search::Exhausted => refuted.push(Refutation { k, nodes: s.nodes }),
            Search::OutOfBudget => return Ok(unknown(k as u64, refuted, total)),
            Search::Found => {
                let targets: Vec<Target> =
                    s.assigned.iter().map(|&i| Target::Perm(Perm(perms[i].iter().map(|&x| x as u32).collect()))).collect();
                let c = ApproxCertificate::from_parts(
                    g.clone(),
                    Family::Sofic,
                    Family::Sofic.default_epsilon(),
                    n,
                    Dimension::Exact(k as u64),
                    b.elements.clone(),
                    targets,
                )
                .with_trace(Trace::new("sofic-oracle", json!({ "refuted": refuted.len(), "nodes": total }), n, Dimension::Exact(k as u64)));
                if !verify_d(&c)?.pass {
                    return Err(Error::VerificationFailed(format!("oracle witness at k = {k} does not verify")));
                }
                let point = ProfilePoint::new(n, PointValue::Finite(k as u64), Provenance::exact("exhaustive search"))
                    .with_certificate(serde_json::to_value(c.provenance.as_ref()).expect("serializable"));
                return Ok(OracleOutcome {
                    point,
                    lower: k as u64,
                    upper: Some(k as u64),
                    refuted,
                    witness: Some(c),
                    nodes: total,
                });
            }
        }
    }
    let lower = k_max.min(ORACLE_MAX_DEGREE) as u64 + 1;
    Ok(unknown(lower, refuted, total))
}

/// The weakly sofic profile of Z: |B(n)| = 2n+1 below (images of the ball are distinct) and the
/// cyclic quotient of order 2n+1 above.
pub fn weakly_sofic_exact_z(n: usize) -> Result<ProfilePoint> {
    if n == 0 {
        return Ok(ProfilePoint::new(0, PointValue::Finite(1), Provenance::exact("trivial ball")));
    }
    let z = Group::z();
    let lower = ball(&z, n)?.len() as u64;
    let built = from_quotient(&z, &Quotient::cyclic(2 * n as i64 + 1), n, Family::Fin)?;
    let upper = built.certificate.dimension.as_exact().unwrap_or(u64::MAX);
    if lower != upper {
        return Err(Error::VerificationFailed(format!("bounds {lower} and {upper} do not meet at n = {n}")));
    }
    Ok(ProfilePoint::new(n, PointValue::Finite(lower), Provenance::exact("ball cardinality meets cyclic quotient"))
        .with_certificate(json!({
            "lower": lower,
            "upper": serde_json::to_value(built.certificate.provenance.as_ref()).expect("serializable"),
        })))
}

struct LefSearch<'a> {
    q: &'a FiniteMetricGroup,
    m: usize,
    checks: &'a [Vec<(usize, usize, usize)>],
    assigned: Vec<u32>,
    used: Vec<bool>,
    nodes: u64,
    budget: u64,
}

impl LefSearch<'_> {
    fn run(&mut self, p: usize) -> Search {
        if p == self.m {
            return Search::Found;
        }
        let order = self.q.order() as u32;
        // the identity is idempotent, so it must go to the identity
        let range: Vec<u32> = if p == 0 { vec![self.q.identity] } else { (0..order).collect() };
        for v in range {
            if self.used[v as usize] {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Search::OutOfBudget;
            }
            self.assigned[p] = v;
            let ok = self.checks[p]
                .iter()
                .all(|&(i, j, ij)| self.q.mul(self.assigned[i], self.assigned[j]) == self.assigned[ij]);
            if ok {
                self.used[v as usize] = true;
                let r = self.run(p + 1);
                self.used[v as usize] = false;
                match r {
                    Search::Exhausted => {}
                    other => return other,
                }
            }
        }
        Search::Exhausted
    }
}

/// Least order of a catalog group receiving an injective map of B(n) that is multiplicative
/// on the ball. Exact when it meets |B(n)|, otherwise an upper bound relative to the catalog.
pub fn le_f_growth(g: &Group, n: usize, catalog: &[Group], budget: u64) -> Result<OracleOutcome> {
    if n == 0 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    let b = ball(g, n)?;
    let beta = b.len() as u64;
    let mut entries: Vec<(u64, &Group)> = Vec::new();
    for q in catalog {
        let order = q.order().ok_or_else(|| Error::Invalid(format!("catalog group {q} is infinite")))?;
        entries.push((order, q));
    }
    entries.sort_by_key(|e| e.0);
    let unknown = |nodes: u64| OracleOutcome {
        point: ProfilePoint::new(n, PointValue::Unknown, Provenance::upper("catalog")),
        lower: beta,
        upper: None,
        refuted: vec![],
        witness: None,
        nodes,
    };
    if b.len() > ORACLE_BALL_CAP * 16 {
        return Ok(unknown(0));
    }
    let mul = products(&b, g);
    let checks = constraints_by_last(&mul);
    let mut refuted = Vec::new();
    let mut total = 0u64;
    for (order, q) in entries {
        if order < beta {
            refuted.push(Refutation { k: order as usize, nodes: 0 });
            continue;
        }
        let (fg, _) = FiniteMetricGroup::trivial_metric(q)?;
        let (r, nodes, assigned) = {
            let mut s = LefSearch {
                q: &fg,
                m: b.len(),
                checks: &checks,
                assigned: vec![0; b.len()],
                used: vec![false; fg.order()],
                nodes: 0,
                budget: budget.saturating_sub(total),
            };
            let r = s.run(0);
            (r, s.nodes, s.assigned)
        };
        total += nodes;
        match r {
            Search::Exhausted => refuted.push(Refutation { k: order as usize, nodes }),
            Search::OutOfBudget => return Ok(OracleOutcome { refuted, ..unknown(total) }),
            Search::Found => {
                let fg = Arc::new(fg);
                let targets = assigned.iter().map(|&i| Target::Finite(FiniteElem { group: fg.clone(), idx: i })).collect();
                let c = ApproxCertificate::from_parts(
                    g.clone(),
                    Family::Trivial,
                    Family::Trivial.default_epsilon(),
                    n,
                    Dimension::Exact(order),
                    b.elements.clone(),
                    targets,
                )
                .with_trace(Trace::new("le-f", json!({ "catalog_group": q.to_string() }), n, Dimension::Exact(order)));
                if !verify_d(&c)?.pass {
                    return Err(Error::VerificationFailed(format!("ball monomorphism into {q} does not verify")));
                }
                let prov = if order == beta { Provenance::exact("meets ball cardinality") } else { Provenance::upper("catalog") };
                let point = ProfilePoint::new(n, PointValue::Finite(order), prov)
                    .with_certificate(serde_json::to_value(c.provenance.as_ref()).expect("serializable"));
                return Ok(OracleOutcome { point, lower: beta, upper: Some(order), refuted, witness: Some(c), nodes: total });
            }
        }
    }
    Ok(OracleOutcome { refuted, ..unknown(total) })
}
