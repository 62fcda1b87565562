use super::ApproxCertificate;
use crate::error::{Error, Result};
use crate::groups::{ball, Ball, Elem, Group};
use crate::targets::{Dist, Target, DEFAULT_MARGIN};
use std::collections::{HashMap, HashSet, VecDeque};

/// Finite directed graph with edges labelled by the symmetric generating set S.
/// `edges[v][s]` is the endpoint of the edge leaving v with label S[s], if any.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphCertificate {
    pub edges: Vec<Vec<Option<u32>>>,
    pub n: usize,
    pub delta: Dist,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphReport {
    pub good: usize,
    pub vertices: usize,
    pub good_fraction: f64,
    pub pass: bool,
    /// First vertex whose neighbourhood is not a copy of the ball.
    pub first_bad: Option<usize>,
}

/// The Schreier graph of the permutation images of S: the edge labelled s leaves i towards
/// pi(s)^-1(i), so that i -> pi(g)^-1(i) follows the Cayley graph.
pub fn graph_from_sofic(c: &ApproxCertificate, delta: Dist) -> Result<GraphCertificate> {
    let gens = c.group.generators();
    let mut perms = Vec::new();
    for s in &gens {
        match c.get(s) {
            Some(Target::Perm(p)) => perms.push(p.inverse()),
            Some(t) => return Err(Error::FamilyMismatch(format!("graph from a {} target", t.kind()))),
            None => return Err(Error::MissingAssignment(c.group.normal_form(s))),
        }
    }
    let k = perms[0].degree();
    let edges = (0..k).map(|i| perms.iter().map(|p| Some(p.apply(i) as u32)).collect()).collect();
    Ok(GraphCertificate { edges, n: c.n, delta })
}

/// Fraction of vertices whose radius-n neighbourhood is a labelled copy of B(n); passes when it
/// is at least 1 - delta.
pub fn verify_graph(gc: &GraphCertificate, g: &Group) -> Result<GraphReport> {
    let gens = g.generators();
    if gc.edges.iter().any(|e| e.len() != gens.len()) {
        return Err(Error::Invalid(format!("every vertex needs {} label slots", gens.len())));
    }
    let nv = gc.edges.len();
    if gc.edges.iter().flatten().flatten().any(|&w| w as usize >= nv) {
        return Err(Error::Invalid("edge endpoint out of range".into()));
    }
    let b = ball(g, gc.n)?;
    let mut good = 0;
    let mut first_bad = None;
    for v in 0..nv {
        if ball_matches(gc, g, &gens, &b, v) {
            good += 1;
        } else if first_bad.is_none() {
            first_bad = Some(v);
        }
    }
    let frac = if nv == 0 { Dist::zero() } else { Dist::ratio(good as i64, nv as i64) };
    let pass = Dist::one().sub(gc.delta).le(&frac, DEFAULT_MARGIN);
    Ok(GraphReport { good, vertices: nv, good_fraction: frac.value(), pass, first_bad })
}

fn ball_matches(gc: &GraphCertificate, g: &Group, gens: &[Elem], b: &Ball, v: usize) -> bool {
    // f: B(n) -> vertices, grown along the ball order (which is sorted by length)
    let mut f: HashMap<usize, u32> = HashMap::new();
    f.insert(0, v as u32);
    for (i, x) in b.elements.iter().enumerate() {
        let Some(&u) = f.get(&i) else { return false };
        for (si, s) in gens.iter().enumerate() {
            if let Some(j) = b.index_of(&g.mul(x, s)) {
                let Some(w) = gc.edges[u as usize][si] else { return false };
                match f.get(&j) {
                    Some(&fw) if fw != w => return false,
                    Some(_) => {}
                    None => {
                        f.insert(j, w);
                    }
                }
            }
        }
    }
    let image: HashSet<u32> = f.values().copied().collect();
    if image.len() != b.len() {
        return false;
    }
    // radius-n ball around v along outgoing edges
    let mut dist: HashMap<u32, usize> = HashMap::new();
    dist.insert(v as u32, 0);
    let mut queue = VecDeque::from([v as u32]);
    while let Some(u) = queue.pop_front() {
        let du = dist[&u];
        if du == gc.n {
            continue;
        }
        for w in gc.edges[u as usize].iter().flatten() {
            if !dist.contains_key(w) {
                dist.insert(*w, du + 1);
                queue.push_back(*w);
            }
        }
    }
    if dist.len() != image.len() || dist.keys().any(|u| !image.contains(u)) {
        return false;
    }
    // no extra edges inside the neighbourhood
    let inv: HashMap<u32, usize> = f.iter().map(|(&i, &u)| (u, i)).collect();
    for (&u, &i) in &inv {
        for (si, w) in gc.edges[u as usize].iter().enumerate() {
            if let Some(w) = w {
                if image.contains(w) {
                    let y = g.mul(&b.elements[i], &gens[si]);
                    if b.index_of(&y).map(|j| f[&j]) != Some(*w) {
                        return false;
                    }
                }
            }
        }
    }
    true
}
