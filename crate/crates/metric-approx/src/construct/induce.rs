use super::basic::perm_in_family;
use super::{accept, Built};
use crate::certify::{ApproxCertificate, Trace};
use crate::error::{Error, Result};
use crate::groups::{Elem, SubgroupPair};
use crate::targets::{block_sum, Dimension, Family, Perm};
use serde_json::json;

/// Action of g on the cosets G/H: g g_i = g_{alpha(i)} h_i with h_i in H.
#[derive(Clone, Debug, PartialEq)]
pub struct CosetAction {
    pub alpha: Perm,
    /// h_{g,i}, as elements of the catalog group of H.
    pub cocycle: Vec<Elem>,
}

pub fn coset_action(pair: &SubgroupPair, g: &Elem) -> Result<CosetAction> {
    let parent = pair.parent();
    let reps = pair.coset_reps();
    if reps.is_empty() {
        return Err(Error::Unsupported("coset action needs a finite-index subgroup".into()));
    }
    let mut alpha = Vec::with_capacity(reps.len());
    let mut cocycle = Vec::with_capacity(reps.len());
    for gi in &reps {
        let (j, h) = pair.factor(&parent.mul(g, gi))?;
        alpha.push(j as u32);
        cocycle.push(h);
    }
    let alpha = Perm::from_images(alpha).ok_or_else(|| Error::Invalid("coset map is not a bijection".into()))?;
    Ok(CosetAction { alpha, cocycle })
}

/// Induces a certificate of a finite-index subgroup H to G: the image of g sends block i to
/// block alpha_g(i) through the image of h_{g,i}.
pub fn induce_finite_index(pair: &SubgroupPair, ch: &ApproxCertificate, n: usize) -> Result<Built> {
    if n == 0 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    if ch.group != pair.subgroup() {
        return Err(Error::Invalid(format!("certificate is for {}, subgroup is {}", ch.group, pair.subgroup())));
    }
    let family = match &ch.family {
        f @ (Family::Sofic | Family::Hyp | Family::Lin(_)) => f.clone(),
        other => return Err(Error::FamilyMismatch(format!("induction into the {other} family"))),
    };
    let m = ch.dimension.as_exact().ok_or(Error::Unsupported("symbolic input dimension".into()))? as usize;
    let l = pair.coset_reps().len();
    let c = ApproxCertificate::build(pair.parent(), family.clone(), n, |g| {
        let act = coset_action(pair, g)?;
        let mut diag = ch.image(&act.cocycle[0]);
        for h in &act.cocycle[1..] {
            diag = block_sum(&diag, &ch.image(h))?;
        }
        let blocks = Perm(
            (0..l * m).map(|x| (act.alpha.apply(x / m) * m + x % m) as u32).collect(),
        );
        perm_in_family(blocks, &family)?.mul(&diag)
    })?;
    let params = json!({ "index": l, "subgroup": format!("{pair:?}"), "input_n": ch.n });
    let inputs = ch.provenance.iter().cloned().collect();
    accept(c.with_trace(Trace::new("induce", params, n, Dimension::Exact((l * m) as u64)).with_inputs(inputs)))
}
