use super::{ball, Elem, Group};
use crate::error::{Error, Result};

/// Subgroup H of a catalog group G together with an isomorphism to a catalog group,
/// membership and (for finite index) coset data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubgroupPair {
    /// m Z^d inside Z^d, identified with Z^d via division by m.
    Scaled { d: usize, m: i64 },
    /// The coordinate axis Z e_axis inside Z^d, identified with Z.
    Axis { d: usize, axis: usize },
    /// The centre of the Heisenberg group H_1, identified with Z.
    HeisenbergCenter,
}

impl SubgroupPair {
    pub fn parent(&self) -> Group {
        match self {
            SubgroupPair::Scaled { d, .. } | SubgroupPair::Axis { d, .. } => Group::FreeAbelian(*d),
            SubgroupPair::HeisenbergCenter => Group::Heisenberg(1),
        }
    }

    /// The catalog group H is identified with.
    pub fn subgroup(&self) -> Group {
        match self {
            SubgroupPair::Scaled { d, .. } => Group::FreeAbelian(*d),
            _ => Group::z(),
        }
    }

    pub fn is_normal(&self) -> bool {
        true
    }

    pub fn index(&self) -> Option<u64> {
        match self {
            SubgroupPair::Scaled { d, m } => Some((*m as u64).pow(*d as u32)),
            _ => None,
        }
    }

    pub fn contains(&self, g: &Elem) -> bool {
        match (self, g) {
            (SubgroupPair::Scaled { m, .. }, Elem::Int(v)) => v.iter().all(|x| x % m == 0),
            (SubgroupPair::Axis { axis, .. }, Elem::Int(v)) => {
                v.iter().enumerate().all(|(i, x)| i == *axis || *x == 0)
            }
            (SubgroupPair::HeisenbergCenter, Elem::Heis { a, b, .. }) => {
                a.iter().chain(b).all(|&x| x == 0)
            }
            _ => false,
        }
    }

    /// Image in G of an element of the catalog group H.
    pub fn embed(&self, h: &Elem) -> Elem {
        match (self, h) {
            (SubgroupPair::Scaled { m, .. }, Elem::Int(v)) => Elem::Int(v.iter().map(|x| x * m).collect()),
            (SubgroupPair::Axis { d, axis }, Elem::Int(v)) => {
                let mut w = vec![0; *d];
                w[*axis] = v[0];
                Elem::Int(w)
            }
            (SubgroupPair::HeisenbergCenter, Elem::Int(v)) => Elem::Heis { a: vec![0], b: vec![0], c: v[0] },
            _ => panic!("not an element of the subgroup"),
        }
    }

    /// Preimage in H of a member g of the subgroup.
    pub fn restrict(&self, g: &Elem) -> Result<Elem> {
        if !self.contains(g) {
            return Err(Error::Invalid(format!("{g:?} is not in the subgroup")));
        }
        Ok(match (self, g) {
            (SubgroupPair::Scaled { m, .. }, Elem::Int(v)) => Elem::Int(v.iter().map(|x| x / m).collect()),
            (SubgroupPair::Axis { axis, .. }, Elem::Int(v)) => Elem::Int(vec![v[*axis]]),
            (SubgroupPair::HeisenbergCenter, Elem::Heis { c, .. }) => Elem::Int(vec![*c]),
            _ => unreachable!(),
        })
    }

    /// Coset representatives g_1, ..., g_l in sorted order (finite index only).
    pub fn coset_reps(&self) -> Vec<Elem> {
        match self {
            SubgroupPair::Scaled { d, m } => {
                let q = super::Quotient::scalar_lattice(*d, *m);
                q.elements()
            }
            _ => vec![],
        }
    }

    /// The representative of the coset gH.
    pub fn coset_rep(&self, g: &Elem) -> Elem {
        match (self, g) {
            (SubgroupPair::Scaled { m, .. }, Elem::Int(v)) => Elem::Int(v.iter().map(|x| x.rem_euclid(*m)).collect()),
            _ => panic!("coset representatives only exist for finite index"),
        }
    }

    /// Writes g = g_i h with g_i a coset representative and h in H, returning (i, h) with h in
    /// the catalog group of H.
    pub fn factor(&self, g: &Elem) -> Result<(usize, Elem)> {
        let reps = self.coset_reps();
        if reps.is_empty() {
            return Err(Error::Unsupported("factorization needs a finite-index subgroup".into()));
        }
        let r = self.coset_rep(g);
        let i = reps.binary_search(&r).map_err(|_| Error::Invalid("coset representative missing".into()))?;
        let pg = self.parent();
        let h = pg.mul(&pg.inverse(&reps[i]), g);
        Ok((i, self.restrict(&h)?))
    }
}

/// Smallest k >= n such that every element of H in the G-ball of radius n has H-length at most k.
pub fn distortion(pair: &SubgroupPair, n: usize) -> Result<usize> {
    let g = pair.parent();
    let h = pair.subgroup();
    let bg = ball(&g, n)?;
    let mut k = n;
    for x in bg.elements.iter().filter(|x| pair.contains(x)) {
        let y = pair.restrict(x)?;
        // H is a free abelian group in every supported pair: word length is the l1 norm
        let len = match &y {
            Elem::Int(v) => v.iter().map(|c| c.unsigned_abs() as usize).sum(),
            _ => unreachable!(),
        };
        debug_assert!(h.contains(&y));
        k = k.max(len);
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distortion_examples() {
        assert_eq!(distortion(&SubgroupPair::Scaled { d: 1, m: 2 }, 4).unwrap(), 4);
        for n in 1..6 {
            assert_eq!(distortion(&SubgroupPair::Axis { d: 2, axis: 0 }, n).unwrap(), n);
        }
        // central elements of B(n) have |c| at most 4, 16, 25 for n = 8, 16, 20
        assert_eq!(distortion(&SubgroupPair::HeisenbergCenter, 8).unwrap(), 8);
        assert_eq!(distortion(&SubgroupPair::HeisenbergCenter, 16).unwrap(), 16);
        assert_eq!(distortion(&SubgroupPair::HeisenbergCenter, 20).unwrap(), 25);
    }

    #[test]
    fn factorization_recovers_element() {
        let p = SubgroupPair::Scaled { d: 2, m: 3 };
        let g = p.parent();
        for x in ball(&g, 4).unwrap().elements {
            let (i, h) = p.factor(&x).unwrap();
            assert_eq!(g.mul(&p.coset_reps()[i], &p.embed(&h)), x);
        }
    }
}
