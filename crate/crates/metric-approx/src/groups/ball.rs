use super::{Elem, Group};
use crate::error::{Error, Result};
use std::collections::HashMap;

pub const DEFAULT_BALL_CAP: usize = 1_000_000;

/// Word-metric ball around the identity, sorted by (length, normal form).
#[derive(Clone, Debug)]
pub struct Ball {
    pub radius: usize,
    pub elements: Vec<Elem>,
    pub lengths: Vec<usize>,
    index: HashMap<Elem, usize>,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, g: &Elem) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn contains(&self, g: &Elem) -> bool {
        self.index.contains_key(g)
    }

    pub fn length(&self, g: &Elem) -> Option<usize> {
        self.index_of(g).map(|i| self.lengths[i])
    }

    /// Sub-ball of smaller radius, reusing the canonical order.
    pub fn restrict(&self, radius: usize) -> Ball {
        let cut = self.lengths.partition_point(|&l| l <= radius);
        from_sorted(radius, self.elements[..cut].to_vec(), self.lengths[..cut].to_vec())
    }
}

fn from_sorted(radius: usize, elements: Vec<Elem>, lengths: Vec<usize>) -> Ball {
    let index = elements.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
    Ball { radius, elements, lengths, index }
}

pub fn ball(g: &Group, n: usize) -> Result<Ball> {
    ball_with_cap(g, n, DEFAULT_BALL_CAP)
}

pub fn ball_with_cap(g: &Group, n: usize, cap: usize) -> Result<Ball> {
    let gens = g.generators();
    let mut seen: HashMap<Elem, usize> = HashMap::new();
    let e = g.identity();
    seen.insert(e.clone(), 0);
    let mut frontier = vec![e];
    for r in 1..=n {
        let mut next = Vec::new();
        for x in &frontier {
            for s in &gens {
                let y = g.mul(x, s);
                if !seen.contains_key(&y) {
                    seen.insert(y.clone(), r);
                    next.push(y);
                    if seen.len() > cap {
                        return Err(Error::Overflow { what: "ball size", cap });
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    let mut all: Vec<(usize, Elem)> = seen.into_iter().map(|(x, l)| (l, x)).collect();
    all.sort();
    let (lengths, elements) = all.into_iter().unzip();
    Ok(from_sorted(n, elements, lengths))
}

/// Every element reachable from the identity; only meaningful for finite groups.
pub(crate) fn closure(g: &Group, cap: usize) -> Result<Vec<Elem>> {
    let b = ball_with_cap(g, usize::MAX, cap)?;
    Ok(b.elements)
}

/// Growth function: the cardinality of the ball of radius n.
pub fn growth(g: &Group, n: usize) -> Result<usize> {
    Ok(ball(g, n)?.len())
}

fn letter_key(x: i32) -> (u32, bool) {
    (x.unsigned_abs(), x < 0)
}

fn word_less(a: &[i32], b: &[i32]) -> bool {
    a.iter().map(|&x| letter_key(x)).lt(b.iter().map(|&x| letter_key(x)))
}

/// Geodesic words over X for every element of the ball: the lexicographically least geodesic
/// for the smaller of g, g^-1, and its formal inverse for the other.
pub fn geodesic_words(g: &Group, b: &Ball) -> HashMap<Elem, Vec<i32>> {
    let r = g.free_generators().len() as i32;
    let letters: Vec<(i32, Elem)> = (1..=r).flat_map(|i| [i, -i]).map(|x| (x, g.letter(x))).collect();
    let mut best: HashMap<Elem, Vec<i32>> = HashMap::new();
    best.insert(g.identity(), vec![]);
    for (i, x) in b.elements.iter().enumerate() {
        let len = b.lengths[i];
        if len == 0 {
            continue;
        }
        let mut cand: Option<Vec<i32>> = None;
        for (l, s) in &letters {
            // predecessor y with y * s = x
            let y = g.mul(x, &g.inverse(s));
            if b.length(&y) == Some(len - 1) {
                let mut w = best[&y].clone();
                w.push(*l);
                if cand.as_ref().is_none_or(|c| word_less(&w, c)) {
                    cand = Some(w);
                }
            }
        }
        best.insert(x.clone(), cand.expect("ball element without predecessor"));
    }
    let mut out = HashMap::new();
    for x in &b.elements {
        let xi = g.inverse(x);
        let w = if *x <= xi {
            best[x].clone()
        } else {
            best[&xi].iter().rev().map(|l| -l).collect()
        };
        out.insert(x.clone(), w);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_balls() {
        let z = Group::z();
        let b = ball(&z, 2).unwrap();
        assert_eq!(b.len(), 5);
        assert_eq!(b.elements[0], Elem::Int(vec![0]));
        assert_eq!(ball(&Group::FreeAbelian(2), 1).unwrap().len(), 5);
        assert_eq!(growth(&Group::FreeAbelian(2), 3).unwrap(), 25);
    }

    #[test]
    fn heisenberg_ball_two() {
        let h = Group::Heisenberg(1);
        let b = ball(&h, 2).unwrap();
        // 1 + 4 + 12: the twelve products of two non-inverse generators are pairwise distinct
        assert_eq!(b.len(), 17);
        assert!(!b.contains(&Elem::Heis { a: vec![0], b: vec![0], c: 1 }));
        assert_eq!(ball(&h, 4).unwrap().length(&Elem::Heis { a: vec![0], b: vec![0], c: 1 }), Some(4));
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(ball_with_cap(&Group::Free(2), 5, 100), Err(Error::Overflow { .. })));
    }

    #[test]
    fn geodesics_are_geodesic_and_paired() {
        for g in [Group::FreeAbelian(2), Group::Heisenberg(1), Group::Free(2)] {
            let b = ball(&g, 3).unwrap();
            let w = geodesic_words(&g, &b);
            for (i, x) in b.elements.iter().enumerate() {
                assert_eq!(w[x].len(), b.lengths[i]);
                assert_eq!(&g.eval_word(&w[x]), x);
                let inv: Vec<i32> = w[x].iter().rev().map(|l| -l).collect();
                assert_eq!(w[&g.inverse(x)], inv);
            }
        }
    }

    #[test]
    fn finite_closure() {
        assert_eq!(Group::FiniteSym(4).elements().unwrap().len(), 24);
        let w = Group::WreathFiniteTop { base: Box::new(Group::FiniteCyclic(2)), top: Box::new(Group::FiniteCyclic(3)) };
        assert_eq!(w.elements().unwrap().len(), 24);
    }
}
