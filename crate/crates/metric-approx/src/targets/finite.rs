use crate::error::{Error, Result};
use crate::groups::{Elem, Group};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Above this order bi-invariance is checked on a random sample instead of exhaustively.
pub const EXHAUSTIVE_ORDER: usize = 64;

/// A finite group given by its multiplication table together with a bi-invariant distance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteMetricGroup {
    pub table: Vec<Vec<u32>>,
    pub dist: Vec<Vec<f64>>,
    pub identity: u32,
    #[serde(skip)]
    inverses: Vec<u32>,
}

impl FiniteMetricGroup {
    pub fn new(table: Vec<Vec<u32>>, dist: Vec<Vec<f64>>, identity: u32) -> Result<FiniteMetricGroup> {
        let mut g = FiniteMetricGroup { table, dist, identity, inverses: vec![] };
        g.validate()?;
        Ok(g)
    }

    /// Recomputes cached data and checks the group axioms, the metric axioms and bi-invariance.
    pub fn validate(&mut self) -> Result<()> {
        let m = self.table.len();
        let bad = |s: &str| Err(Error::Invalid(format!("finite metric group: {s}")));
        if m == 0 || self.identity as usize >= m {
            return bad("empty table or identity out of range");
        }
        if self.table.iter().any(|r| r.len() != m || r.iter().any(|&x| x as usize >= m)) {
            return bad("table is not square");
        }
        if self.dist.len() != m || self.dist.iter().any(|r| r.len() != m) {
            return bad("distance matrix has the wrong shape");
        }
        let e = self.identity as usize;
        for a in 0..m {
            if self.table[e][a] as usize != a || self.table[a][e] as usize != a {
                return bad("identity law fails");
            }
        }
        let mut inverses = vec![u32::MAX; m];
        for a in 0..m {
            match (0..m).find(|&b| self.table[a][b] as usize == e) {
                Some(b) if self.table[b][a] as usize == e => inverses[a] = b as u32,
                _ => return bad("missing inverse"),
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(m as u64);
        let triples: Box<dyn Iterator<Item = (usize, usize, usize)>> = if m <= EXHAUSTIVE_ORDER {
            Box::new((0..m).flat_map(move |a| (0..m).flat_map(move |b| (0..m).map(move |c| (a, b, c)))))
        } else {
            Box::new((0..20_000).map(move |_| (rng.gen_range(0..m), rng.gen_range(0..m), rng.gen_range(0..m))))
        };
        for (a, b, c) in triples {
            let t = &self.table;
            if t[t[a][b] as usize][c] != t[a][t[b][c] as usize] {
                return bad("not associative");
            }
            let d = &self.dist;
            if !(0.0..=1.0).contains(&d[a][b]) || (d[a][b] - d[b][a]).abs() > 1e-12 {
                return bad("distance out of range or not symmetric");
            }
            if (d[a][b] == 0.0) != (a == b) {
                return bad("distance does not separate points");
            }
            if d[a][c] > d[a][b] + d[b][c] + 1e-12 {
                return bad("triangle inequality fails");
            }
            // d(ga, gb) = d(a, b) = d(ag, bg)
            let (ca, cb) = (t[c][a] as usize, t[c][b] as usize);
            let (ac, bc) = (t[a][c] as usize, t[b][c] as usize);
            if (d[ca][cb] - d[a][b]).abs() > 1e-12 || (d[ac][bc] - d[a][b]).abs() > 1e-12 {
                return bad("distance is not bi-invariant");
            }
        }
        self.inverses = inverses;
        Ok(())
    }

    /// The table of a finite catalog group with the trivial {0,1} metric, elements in sorted order.
    pub fn trivial_metric(g: &Group) -> Result<(FiniteMetricGroup, Vec<Elem>)> {
        let mut els = g.elements()?;
        els.sort();
        let pos: std::collections::HashMap<&Elem, u32> = els.iter().enumerate().map(|(i, x)| (x, i as u32)).collect();
        let index = |x: &Elem| pos[x];
        let table: Vec<Vec<u32>> = els.iter().map(|a| els.iter().map(|b| index(&g.mul(a, b))).collect()).collect();
        let m = els.len();
        let dist = (0..m).map(|i| (0..m).map(|j| if i == j { 0.0 } else { 1.0 }).collect()).collect();
        let fg = FiniteMetricGroup::new(table, dist, index(&g.identity()))?;
        Ok((fg, els))
    }

    pub fn cyclic(m: u64) -> FiniteMetricGroup {
        FiniteMetricGroup::trivial_metric(&Group::FiniteCyclic(m)).expect("cyclic groups are finite").0
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize][b as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inverses[a as usize]
    }

    pub fn d(&self, a: u32, b: u32) -> f64 {
        self.dist[a as usize][b as usize]
    }

    /// Whether d([a,b], e) <= c * d(a,e) * d(b,e) for all a, b, with [a,b] = a b a^-1 b^-1.
    pub fn is_cc(&self, c: f64) -> bool {
        let m = self.order() as u32;
        let e = self.identity;
        (0..m).all(|a| {
            (0..m).all(|b| {
                let comm = self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)));
                self.d(comm, e) <= c * self.d(a, e) * self.d(b, e) + 1e-12
            })
        })
    }
}
