use super::{Ball, Elem, Group, SubgroupPair};
use crate::error::{Error, Result};

/// A normal subgroup of finite index, described so that the quotient map is computable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Quotient {
    /// Sublattice of Z^d given by an upper triangular Hermite basis (rows are basis vectors,
    /// positive diagonal, entries above each pivot reduced modulo it).
    Lattice { hnf: Vec<Vec<i64>> },
    /// Kernel of reduction mod m of all Heisenberg coordinates.
    Congruence { l: usize, m: u64 },
    /// A finite-index subgroup pair; a quotient only when the subgroup is normal.
    Index(SubgroupPair),
}

fn modp(a: i64, m: i64) -> i64 {
    a.rem_euclid(m)
}

impl Quotient {
    pub fn cyclic(m: i64) -> Quotient {
        Quotient::Lattice { hnf: vec![vec![m]] }
    }

    pub fn scalar_lattice(d: usize, m: i64) -> Quotient {
        Quotient::Lattice {
            hnf: (0..d).map(|i| (0..d).map(|j| if i == j { m } else { 0 }).collect()).collect(),
        }
    }

    pub fn parent(&self) -> Group {
        match self {
            Quotient::Lattice { hnf } => Group::FreeAbelian(hnf.len()),
            Quotient::Congruence { l, .. } => Group::Heisenberg(*l),
            Quotient::Index(p) => p.parent(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Quotient::Lattice { hnf } => {
                let d = hnf.len();
                for (i, row) in hnf.iter().enumerate() {
                    if row.len() != d || row[i] <= 0 || row[..i].iter().any(|&x| x != 0) {
                        return Err(Error::Invalid("lattice basis is not in Hermite form".into()));
                    }
                    for (k, r) in hnf.iter().enumerate().take(i) {
                        if r[i] < 0 || r[i] >= row[i] {
                            return Err(Error::Invalid(format!("entry ({k},{i}) not reduced")));
                        }
                    }
                }
                Ok(())
            }
            Quotient::Congruence { m, .. } if *m == 0 => Err(Error::Invalid("modulus 0".into())),
            Quotient::Congruence { .. } => Ok(()),
            Quotient::Index(p) => {
                if p.is_normal() && p.index().is_some() {
                    Ok(())
                } else {
                    Err(Error::Invalid(format!("{p:?} does not describe a normal subgroup of finite index")))
                }
            }
        }
    }

    pub fn index(&self) -> u64 {
        match self {
            Quotient::Lattice { hnf } => hnf.iter().enumerate().map(|(i, r)| r[i] as u64).product(),
            Quotient::Congruence { l, m } => m.pow(2 * *l as u32 + 1),
            Quotient::Index(p) => p.index().unwrap_or(0),
        }
    }

    /// Canonical image of g in the quotient, itself an element of the parent group.
    pub fn map(&self, g: &Elem) -> Result<Elem> {
        self.validate()?;
        if !self.parent().contains(g) {
            return Err(Error::KindMismatch(format!("element is not in {}", self.parent())));
        }
        Ok(self.map_unchecked(g))
    }

    pub(crate) fn map_unchecked(&self, g: &Elem) -> Elem {
        match (self, g) {
            (Quotient::Lattice { hnf }, Elem::Int(v)) => {
                let mut v = v.clone();
                for (i, row) in hnf.iter().enumerate() {
                    let q = v[i].div_euclid(row[i]);
                    if q != 0 {
                        for (x, r) in v.iter_mut().zip(row) {
                            *x -= q * r;
                        }
                    }
                }
                Elem::Int(v)
            }
            (Quotient::Congruence { m, .. }, Elem::Heis { a, b, c }) => {
                let m = *m as i64;
                Elem::Heis {
                    a: a.iter().map(|&x| modp(x, m)).collect(),
                    b: b.iter().map(|&x| modp(x, m)).collect(),
                    c: modp(*c, m),
                }
            }
            (Quotient::Index(p), g) => p.coset_rep(g),
            _ => panic!("element does not belong to the parent group"),
        }
    }

    /// Product in the quotient of two canonical images.
    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        self.map_unchecked(&self.parent().mul(a, b))
    }

    pub fn inverse(&self, a: &Elem) -> Elem {
        self.map_unchecked(&self.parent().inverse(a))
    }

    /// All canonical images, in sorted order.
    pub fn elements(&self) -> Vec<Elem> {
        let mut out = match self {
            Quotient::Lattice { hnf } => {
                let d = hnf.len();
                let mut out = vec![vec![]];
                for i in 0..d {
                    let mut next = Vec::new();
                    for v in &out {
                        for x in 0..hnf[i][i] {
                            let mut w: Vec<i64> = v.clone();
                            w.push(x);
                            next.push(w);
                        }
                    }
                    out = next;
                }
                out.into_iter().map(Elem::Int).collect()
            }
            Quotient::Congruence { l, m } => {
                let m = *m as i64;
                let k = 2 * l + 1;
                let total = (m as u64).pow(k as u32);
                (0..total)
                    .map(|mut t| {
                        let mut x = Vec::with_capacity(k);
                        for _ in 0..k {
                            x.push((t % m as u64) as i64);
                            t /= m as u64;
                        }
                        Elem::Heis { a: x[..*l].to_vec(), b: x[*l..2 * l].to_vec(), c: x[2 * l] }
                    })
                    .collect()
            }
            Quotient::Index(p) => p.coset_reps(),
        };
        out.sort();
        out
    }

    /// First nontrivial ball element in the kernel, if any.
    pub fn kernel_witness(&self, b: &Ball) -> Option<Elem> {
        let e = self.parent().identity();
        let me = self.map_unchecked(&e);
        b.elements.iter().find(|g| **g != e && self.map_unchecked(g) == me).cloned()
    }

    pub fn avoids(&self, b: &Ball) -> bool {
        self.kernel_witness(b).is_none()
    }
}

/// All sublattices of Z^d of the given index, as Hermite bases.
pub fn enumerate_hnf(d: usize, index: u64) -> Vec<Quotient> {
    fn diagonals(d: usize, n: u64) -> Vec<Vec<u64>> {
        if d == 0 {
            return if n == 1 { vec![vec![]] } else { vec![] };
        }
        let mut out = Vec::new();
        for a in 1..=n {
            if n.is_multiple_of(a) {
                for mut rest in diagonals(d - 1, n / a) {
                    rest.insert(0, a);
                    out.push(rest);
                }
            }
        }
        out
    }
    let mut out = Vec::new();
    for diag in diagonals(d, index) {
        // free entries: (i, j) with i < j, ranging over [0, diag[j])
        let slots: Vec<(usize, usize)> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
        let mut counter = vec![0i64; slots.len()];
        loop {
            let mut hnf = vec![vec![0i64; d]; d];
            for i in 0..d {
                hnf[i][i] = diag[i] as i64;
            }
            for (s, &(i, j)) in slots.iter().enumerate() {
                hnf[i][j] = counter[s];
            }
            out.push(Quotient::Lattice { hnf });
            let mut s = 0;
            loop {
                if s == slots.len() {
                    break;
                }
                counter[s] += 1;
                if counter[s] < diag[slots[s].1] as i64 {
                    break;
                }
                counter[s] = 0;
                s += 1;
            }
            if s == slots.len() {
                break;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::ball;

    #[test]
    fn lattice_examples() {
        assert_eq!(Quotient::cyclic(5).map(&Elem::Int(vec![7])).unwrap(), Elem::Int(vec![2]));
        let q = Quotient::Lattice { hnf: vec![vec![2, 0], vec![0, 3]] };
        assert_eq!(q.map(&Elem::Int(vec![3, 4])).unwrap(), Elem::Int(vec![1, 1]));
        assert_eq!(q.elements().len(), 6);
    }

    #[test]
    fn hnf_counts_match_divisor_sums() {
        // number of index-N sublattices of Z^2 is sigma(N)
        for n in 1..=20u64 {
            let sigma: u64 = (1..=n).filter(|a| n % a == 0).sum();
            assert_eq!(enumerate_hnf(2, n).len() as u64, sigma);
        }
        assert_eq!(enumerate_hnf(3, 2).len(), 7);
    }

    #[test]
    fn heisenberg_congruence_is_a_homomorphism() {
        let h = Group::Heisenberg(1);
        let q = Quotient::Congruence { l: 1, m: 2 };
        let b = ball(&h, 3).unwrap();
        for x in b.elements.iter().step_by(3) {
            for y in b.elements.iter().step_by(5) {
                assert_eq!(q.map(&h.mul(x, y)).unwrap(), q.mul(&q.map(x).unwrap(), &q.map(y).unwrap()));
            }
        }
        assert_eq!(q.elements().len(), 8);
    }

    #[test]
    fn invalid_descriptors() {
        assert!(Quotient::Lattice { hnf: vec![vec![2, 5], vec![0, 3]] }.map(&Elem::Int(vec![0, 0])).is_err());
        assert!(Quotient::Index(SubgroupPair::Axis { d: 2, axis: 0 }).map(&Elem::Int(vec![0, 0])).is_err());
    }
}
