use super::{PointValue, ProfilePoint, Provenance};
use crate::construct::{boundary_sum, FolnerWitness};
use crate::error::{Error, Result};
use crate::groups::{ball, geodesic_words, Elem, Group};
use serde_json::json;
use std::collections::HashSet;

#[derive(Clone, Debug, PartialEq)]
pub enum FolnerStrategy {
    /// Every subset of B(r_max) containing the identity with at most `size_max` elements,
    /// visiting at most `budget` subsets.
    Exhaustive { r_max: usize, size_max: usize, budget: u64 },
    /// A = B(r) for r = 0, 1, .., r_max.
    Balls { r_max: usize },
    /// Boxes [0, L)^d in Z^d with L <= side_max; a witness is built only up to `materialize_cap` elements.
    Boxes { side_max: u64, materialize_cap: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct FolnerSearch {
    pub n: usize,
    /// Size of the best set found.
    pub size: Option<u64>,
    pub witness: Option<FolnerWitness>,
    /// Whether `size` is the Følner function itself rather than an upper bound.
    pub exact: bool,
    /// Sizes below this were ruled out, when the search certifies it.
    pub lower: Option<u64>,
    pub visited: u64,
}

impl FolnerSearch {
    pub fn point(&self) -> ProfilePoint {
        match self.size {
            Some(s) if self.exact => ProfilePoint::new(self.n, PointValue::Finite(s), Provenance::exact("exhaustive Følner search")),
            Some(s) => ProfilePoint::new(self.n, PointValue::Finite(s), Provenance::upper("Følner set")),
            None => ProfilePoint::new(self.n, PointValue::Unknown, Provenance::upper("Følner search")),
        }
    }
}

// n * sum_g |gA △ A| <= |A|
fn satisfies(sum: i64, size: usize, n: usize) -> bool {
    sum * n as i64 <= size as i64
}

/// Searches for a small Følner set for B(n) with the given strategy.
pub fn folner_search(g: &Group, n: usize, strategy: &FolnerStrategy) -> Result<FolnerSearch> {
    if n == 0 {
        return Err(Error::Invalid("the Følner condition needs n >= 1".into()));
    }
    match strategy {
        FolnerStrategy::Exhaustive { r_max, size_max, budget } => exhaustive(g, n, *r_max, *size_max, *budget),
        FolnerStrategy::Balls { r_max } => {
            let mut visited = 0;
            for r in 0..=*r_max {
                visited += 1;
                let set = ball(g, r)?.elements;
                if satisfies(boundary_sum(g, n, &set)?, set.len(), n) {
                    let w = FolnerWitness::new(g.clone(), n, set, None)?;
                    return Ok(FolnerSearch { n, size: Some(w.size() as u64), witness: Some(w), exact: false, lower: None, visited });
                }
            }
            Ok(FolnerSearch { n, size: None, witness: None, exact: false, lower: None, visited })
        }
        FolnerStrategy::Boxes { side_max, materialize_cap } => boxes(g, n, *side_max, *materialize_cap),
    }
}

// Sets are normalised by a right translation so that they contain e (right translation does not
// change |gA △ A|); in Z^d the normalised set has e as its least element.
fn exhaustive(g: &Group, n: usize, r_max: usize, size_max: usize, budget: u64) -> Result<FolnerSearch> {
    let b = ball(g, r_max)?;
    let e = g.identity();
    let abelian = matches!(g, Group::FreeAbelian(_));
    let cand: Vec<Elem> = b.elements.iter().filter(|x| **x != e && (!abelian || **x > e)).cloned().collect();
    let gens = ball(g, n)?.elements;
    let mut visited = 0u64;
    for size in 1..=size_max.min(cand.len() + 1) {
        // lexicographic combinations of size - 1 candidates
        let r = size - 1;
        let mut idx: Vec<usize> = (0..r).collect();
        loop {
            visited += 1;
            if visited > budget {
                let lower = window_is_sufficient(g, n, r_max, size - 1).then_some(size as u64);
                return Ok(FolnerSearch { n, size: None, witness: None, exact: false, lower, visited });
            }
            let mut set: Vec<Elem> = idx.iter().map(|&i| cand[i].clone()).collect();
            set.push(e.clone());
            let members: HashSet<&Elem> = set.iter().collect();
            let mut sum = 0i64;
            for x in &gens {
                sum += 2 * set.iter().filter(|a| !members.contains(&g.mul(x, a))).count() as i64;
                if !satisfies(sum, size, n) {
                    break;
                }
            }
            if satisfies(sum, size, n) {
                let w = FolnerWitness::new(g.clone(), n, set, None)?;
                let exact = window_is_sufficient(g, n, r_max, size);
                let lower = exact.then_some(size as u64);
                return Ok(FolnerSearch { n, size: Some(size as u64), witness: Some(w), exact, lower, visited });
            }
            // advance the combination
            let mut i = r;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if idx[i] < cand.len() - r + i {
                    idx[i] += 1;
                    for j in i + 1..r {
                        idx[j] = idx[j - 1] + 1;
                    }
                    i = usize::MAX;
                    break;
                }
            }
            if i != usize::MAX {
                break;
            }
        }
    }
    let lower = if window_is_sufficient(g, n, r_max, size_max) { Some(size_max as u64 + 1) } else { None };
    Ok(FolnerSearch { n, size: None, witness: None, exact: false, lower, visited })
}

// In Z, split a set at gaps longer than n: the pieces contribute independently to the boundary
// sum, so a minimal set can be taken with gaps at most n and spans at most (s - 1)(n + 1).
// A finite group is covered once the window is the whole group.
fn window_is_sufficient(g: &Group, n: usize, r_max: usize, size: usize) -> bool {
    match g {
        Group::FreeAbelian(1) => r_max >= (size.saturating_sub(1)) * (n + 1),
        _ => match (g.order(), ball(g, r_max)) {
            (Some(order), Ok(b)) => b.len() as u64 == order,
            _ => false,
        },
    }
}

fn boxes(g: &Group, n: usize, side_max: u64, cap: usize) -> Result<FolnerSearch> {
    let Group::FreeAbelian(d) = g else {
        return Err(Error::Unsupported(format!("box Følner sets in {g}")));
    };
    let d = *d;
    let gens = ball(g, n)?.elements;
    // |gA △ A| = 2 (L^d - prod (L - |g_i|)) for the box A = [0, L)^d
    let sum_for = |l: u64| -> Option<u128> {
        let mut total = 0u128;
        let vol = (l as u128).checked_pow(d as u32)?;
        for x in &gens {
            let Elem::Int(v) = x else { return None };
            let mut inter = 1u128;
            for &c in v {
                inter = inter.checked_mul(l.saturating_sub(c.unsigned_abs()) as u128)?;
            }
            total = total.checked_add(2 * (vol - inter))?;
        }
        Some(total)
    };
    let mut visited = 0;
    for l in 1..=side_max {
        visited += 1;
        let Some(sum) = sum_for(l) else { break };
        let vol = (l as u128).pow(d as u32);
        if sum * n as u128 <= vol {
            let size = u64::try_from(vol).map_err(|_| Error::Overflow { what: "box volume", cap: usize::MAX })?;
            let witness = if (size as usize) <= cap {
                let set = box_elements(d, l);
                let w = FolnerWitness::new(g.clone(), n, set, None)?;
                if !w.is_valid()? {
                    return Err(Error::VerificationFailed(format!("box of side {l} fails the Følner check at n = {n}")));
                }
                Some(w)
            } else {
                None
            };
            return Ok(FolnerSearch { n, size: Some(size), witness, exact: false, lower: None, visited });
        }
    }
    Ok(FolnerSearch { n, size: None, witness: None, exact: false, lower: None, visited })
}

fn box_elements(d: usize, l: u64) -> Vec<Elem> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out.into_iter().flat_map(|v: Vec<i64>| (0..l as i64).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out.into_iter().map(Elem::Int).collect()
}

/// The closed-form Følner bound 2^(dn+4) n^(d+1) for a nilpotent group of growth degree d.
pub fn folner_bound_nilpotent(d: u32, n: u32) -> Result<u128> {
    if n == 0 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    let overflow = || Error::Overflow { what: "nilpotent Følner bound", cap: 127 };
    let e = d.checked_mul(n).and_then(|x| x.checked_add(4)).ok_or_else(overflow)?;
    let p = 2u128.checked_pow(e).ok_or_else(overflow)?;
    p.checked_mul((n as u128).checked_pow(d + 1).ok_or_else(overflow)?).ok_or_else(overflow)
}

/// An amenable quotient Q of G, with the images of G's free generators and a Følner strategy for Q.
#[derive(Clone, Debug)]
pub struct RaEntry {
    pub quotient: Group,
    pub generator_images: Vec<Elem>,
    pub strategy: FolnerStrategy,
}

impl RaEntry {
    /// G itself as its own quotient.
    pub fn identity(g: &Group, strategy: FolnerStrategy) -> RaEntry {
        RaEntry { quotient: g.clone(), generator_images: g.free_generators(), strategy }
    }
}

fn is_known_amenable(g: &Group) -> bool {
    match g {
        Group::FreeAbelian(_) | Group::Heisenberg(_) | Group::FiniteCyclic(_) | Group::FiniteSym(_) => true,
        Group::Free(r) => *r <= 1,
        Group::DirectProduct(a, b) | Group::WreathFiniteTop { base: a, top: b } => is_known_amenable(a) && is_known_amenable(b),
        Group::Lamplighter(b) => is_known_amenable(b),
    }
}

/// Least Følner value over catalog quotients into which B(n) embeds; infinite when none does.
pub fn ra_profile(g: &Group, n: usize, catalog: &[RaEntry]) -> Result<ProfilePoint> {
    if n == 0 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    let b = ball(g, n)?;
    let words = geodesic_words(g, &b);
    let mut best: Option<(u64, bool, String)> = None;
    let mut all_exact = true;
    let mut embedded = false;
    for entry in catalog {
        let q = &entry.quotient;
        if !is_known_amenable(q) {
            return Err(Error::Invalid(format!("{q} is not known to be amenable")));
        }
        if entry.generator_images.len() != g.free_generators().len() {
            return Err(Error::Invalid(format!("{q}: expected {} generator images", g.free_generators().len())));
        }
        let image = |w: &[i32]| {
            w.iter().fold(q.identity(), |acc, &l| {
                let x = &entry.generator_images[l.unsigned_abs() as usize - 1];
                q.mul(&acc, &if l > 0 { x.clone() } else { q.inverse(x) })
            })
        };
        let imgs: Vec<Elem> = b.elements.iter().map(|x| image(&words[x])).collect();
        let distinct: HashSet<&Elem> = imgs.iter().collect();
        if distinct.len() != imgs.len() {
            continue;
        }
        // the images must respect products inside the ball
        for (i, x) in b.elements.iter().enumerate() {
            for (j, y) in b.elements.iter().enumerate() {
                if let Some(k) = b.index_of(&g.mul(x, y)) {
                    if q.mul(&imgs[i], &imgs[j]) != imgs[k] {
                        return Err(Error::Invalid(format!("generator images do not define a homomorphism onto {q}")));
                    }
                }
            }
        }
        embedded = true;
        let s = folner_search(q, n, &entry.strategy)?;
        match s.size {
            Some(size) => {
                all_exact &= s.exact;
                if best.as_ref().is_none_or(|b| size < b.0) {
                    best = Some((size, s.exact, q.to_string()));
                }
            }
            None => all_exact = false,
        }
    }
    Ok(match best {
        None if !embedded => ProfilePoint::new(n, PointValue::Infinite, Provenance::exact("no catalog quotient embeds the ball")),
        None => ProfilePoint::new(n, PointValue::Unknown, Provenance::upper("catalog")),
        Some((size, _, q)) => {
            let prov = if all_exact { Provenance::exact("catalog minimum") } else { Provenance::upper("catalog") };
            ProfilePoint::new(n, PointValue::Finite(size), prov).with_certificate(json!({ "quotient": q }))
        }
    })
}
