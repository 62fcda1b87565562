use super::{accept, Built};
use crate::certify::{ApproxCertificate, Trace};
use crate::error::{Error, Result};
use crate::groups::{ball, Elem, Group};
use crate::targets::{Dimension, Family, Perm, Target};
use num_rational::Ratio;
use serde_json::json;
use std::collections::{HashMap, HashSet};

/// A finite set A with its Følner defect (sum over g in B(n) of |gA △ A|) / |A|.
#[derive(Clone, Debug, PartialEq)]
pub struct FolnerWitness {
    pub group: Group,
    pub n: usize,
    /// Sorted, without repetitions.
    pub set: Vec<Elem>,
    pub defect: Ratio<i64>,
    /// For the controlled variant: A lies in B(k) and |A| <= k.
    pub radius_bound: Option<usize>,
}

/// Sum over g in B(n) of |gA △ A|.
pub fn boundary_sum(group: &Group, n: usize, set: &[Elem]) -> Result<i64> {
    let b = ball(group, n)?;
    let members: HashSet<&Elem> = set.iter().collect();
    let mut total = 0i64;
    for g in &b.elements {
        let inside = set.iter().filter(|a| members.contains(&group.mul(g, a))).count();
        total += 2 * (set.len() - inside) as i64;
    }
    Ok(total)
}

impl FolnerWitness {
    pub fn new(group: Group, n: usize, set: Vec<Elem>, radius_bound: Option<usize>) -> Result<FolnerWitness> {
        if n == 0 {
            return Err(Error::Invalid("the Følner condition needs n >= 1".into()));
        }
        let mut set = set;
        set.sort();
        set.dedup();
        if set.is_empty() {
            return Err(Error::Invalid("empty Følner set".into()));
        }
        if let Some(x) = set.iter().find(|x| !group.contains(x)) {
            return Err(Error::KindMismatch(format!("{x:?} is not in {group}")));
        }
        let defect = Ratio::new(boundary_sum(&group, n, &set)?, set.len() as i64);
        Ok(FolnerWitness { group, n, set, defect, radius_bound })
    }

    pub fn size(&self) -> usize {
        self.set.len()
    }

    /// Defect at most 1/n, and for the controlled variant A inside B(k) with |A| <= k.
    pub fn is_valid(&self) -> Result<bool> {
        if self.defect > Ratio::new(1, self.n as i64) {
            return Ok(false);
        }
        if let Some(k) = self.radius_bound {
            if self.set.len() > k {
                return Ok(false);
            }
            let b = ball(&self.group, k)?;
            return Ok(self.set.iter().all(|x| b.contains(x)));
        }
        Ok(true)
    }

    /// Permutation of A agreeing with left translation by g on A ∩ g^-1 A, completed by matching
    /// the leftover points in sorted order.
    pub fn translation(&self, g: &Elem, index: &HashMap<&Elem, u32>) -> Perm {
        let k = self.set.len();
        let mut img = vec![u32::MAX; k];
        let mut hit = vec![false; k];
        for (i, a) in self.set.iter().enumerate() {
            if let Some(&j) = index.get(&self.group.mul(g, a)) {
                img[i] = j;
                hit[j as usize] = true;
            }
        }
        let mut free = (0..k).filter(|&j| !hit[j]);
        for x in img.iter_mut().filter(|x| **x == u32::MAX) {
            *x = free.next().expect("as many free targets as free sources") as u32;
        }
        Perm(img)
    }
}

/// Sofic certificate of dimension |A| from a Følner witness. The usual hypothesis is a witness at
/// radius 2n; a witness at a smaller radius is accepted and the verifier decides.
pub fn folner_to_sofic(w: &FolnerWitness, n: usize) -> Result<Built> {
    if n == 0 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    if !w.is_valid()? {
        return Err(Error::Invalid(format!("Følner defect {} exceeds 1/{}", w.defect, w.n)));
    }
    let index: HashMap<&Elem, u32> = w.set.iter().enumerate().map(|(i, a)| (a, i as u32)).collect();
    let c = ApproxCertificate::build(w.group.clone(), Family::Sofic, n, |g| Ok(Target::Perm(w.translation(g, &index))))?;
    let params = json!({
        "witness_n": w.n,
        "size": w.size(),
        "defect": w.defect.to_string(),
        "theorem_radius_met": w.n >= 2 * n,
    });
    accept(c.with_trace(Trace::new("folner-to-sofic", params, n, Dimension::Exact(w.size() as u64))))
}
