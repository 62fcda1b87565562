use super::folner::FolnerWitness;
use super::{accept, Built};
use crate::certify::{ApproxCertificate, Trace};
use crate::error::{Error, Result};
use crate::groups::{Elem, Group, SubgroupPair};
use crate::targets::{Dimension, Family, PermWreathElem, Target};
use serde_json::json;
use std::collections::HashMap;

/// A normal subgroup N with amenable quotient, the quotient map and a set-theoretic section.
#[derive(Clone, Debug, PartialEq)]
pub struct AmenableQuotient {
    pub pair: SubgroupPair,
}

impl AmenableQuotient {
    pub fn new(pair: SubgroupPair) -> Result<AmenableQuotient> {
        match pair {
            SubgroupPair::Axis { d, .. } if d >= 2 => Ok(AmenableQuotient { pair }),
            SubgroupPair::HeisenbergCenter => Ok(AmenableQuotient { pair }),
            other => Err(Error::Unsupported(format!("no quotient model for {other:?}"))),
        }
    }

    /// G/N as a catalog group.
    pub fn quotient(&self) -> Group {
        match &self.pair {
            SubgroupPair::Axis { d, .. } => Group::FreeAbelian(d - 1),
            _ => Group::FreeAbelian(2),
        }
    }

    pub fn project(&self, g: &Elem) -> Elem {
        match (&self.pair, g) {
            (SubgroupPair::Axis { axis, .. }, Elem::Int(v)) => {
                Elem::Int(v.iter().enumerate().filter(|(i, _)| i != axis).map(|(_, x)| *x).collect())
            }
            (SubgroupPair::HeisenbergCenter, Elem::Heis { a, b, .. }) => Elem::Int(vec![a[0], b[0]]),
            _ => panic!("element does not belong to the parent group"),
        }
    }

    pub fn section(&self, q: &Elem) -> Elem {
        match (&self.pair, q) {
            (SubgroupPair::Axis { axis, .. }, Elem::Int(v)) => {
                let mut w = v.clone();
                w.insert(*axis, 0);
                Elem::Int(w)
            }
            (SubgroupPair::HeisenbergCenter, Elem::Int(v)) => Elem::Heis { a: vec![v[0]], b: vec![v[1]], c: 0 },
            _ => panic!("element does not belong to the quotient"),
        }
    }
}

/// Certificate of G into Sym(A) ⋉ G_k^A from a certificate of N and a controlled Følner witness
/// A of G/N: g acts on A by the completed translation phi_g by its image, and the bell at a is
/// the image of sigma(phi_g(a))^-1 g sigma(a) when that lies in N.
pub fn extend_by_amenable(cn: &ApproxCertificate, q: &AmenableQuotient, w: &FolnerWitness, n: usize) -> Result<Built> {
    if n == 0 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    let pair = &q.pair;
    if cn.group != pair.subgroup() {
        return Err(Error::Invalid(format!("certificate is for {}, N is {}", cn.group, pair.subgroup())));
    }
    if w.group != q.quotient() {
        return Err(Error::Invalid(format!("witness is for {}, quotient is {}", w.group, q.quotient())));
    }
    let k = match w.radius_bound {
        Some(k) => k,
        None => return Err(Error::Invalid("a controlled Følner witness is required".into())),
    };
    if !w.is_valid()? {
        return Err(Error::Invalid(format!("Følner defect {} exceeds 1/{}", w.defect, w.n)));
    }
    if let Some(a) = w.set.iter().find(|a| q.project(&q.section(a)) != **a) {
        return Err(Error::Invalid(format!("section is not a right inverse at {a:?}")));
    }
    let parent = pair.parent();
    let index: HashMap<&Elem, u32> = w.set.iter().enumerate().map(|(i, a)| (a, i as u32)).collect();
    let sections: Vec<Elem> = w.set.iter().map(|a| q.section(a)).collect();
    let section_inv: Vec<Elem> = sections.iter().map(|s| parent.inverse(s)).collect();
    let e_n = cn.targets[0].identity_like();
    let c = ApproxCertificate::build(parent.clone(), Family::PermWreath(Box::new(cn.family.clone())), n, |g| {
        let phi = w.translation(&q.project(g), &index);
        let bell = (0..w.size())
            .map(|i| {
                let x = parent.mul(&parent.mul(&section_inv[phi.apply(i)], g), &sections[i]);
                if pair.contains(&x) {
                    Ok(cn.image(&pair.restrict(&x)?))
                } else {
                    Ok(e_n.clone())
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Target::PermWreath(PermWreathElem { sigma: phi, bell }))
    })?;
    let params = json!({
        "witness_n": w.n,
        "folner_value": k,
        "size": w.size(),
        "input_n": cn.n,
        "theorem_witness_radius_met": w.n >= 10 * n,
        "theorem_input_radius_met": cn.n >= 20 * k,
    });
    let inputs = cn.provenance.iter().cloned().collect();
    let expected = Dimension::Exact(w.size() as u64 * cn.dimension.as_exact().unwrap_or(0));
    accept(c.with_trace(Trace::new("extend-by-amenable", params, n, expected).with_inputs(inputs)))
}
