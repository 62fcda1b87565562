use super::{accept, require_input, Built};
use crate::certify::{ApproxCertificate, Trace};
use crate::error::{Error, Result};
use crate::groups::{ball, Elem, Group, Quotient};
use crate::targets::{
    perm_to_rank, perm_to_unitary, Dimension, Family, FieldKind, FiniteElem, FiniteMetricGroup, Perm, Target,
};
use serde_json::json;
use std::collections::HashMap;
use std::sync::Arc;

/// Translation action of Z on Z/(2n+1): j maps to the shift by j.
pub fn cyclic_z(n: usize) -> Result<Built> {
    if n == 0 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    let k = 2 * n + 1;
    let c = ApproxCertificate::build(Group::z(), Family::Sofic, n, |g| match g {
        Elem::Int(v) => Ok(Target::Perm(Perm::shift(k, v[0]))),
        _ => unreachable!(),
    })?
    .with_trace(Trace::new("cyclic-z", json!({ "n": n }), n, Dimension::Exact(k as u64)));
    accept(c)
}

// Left-regular action of a finite group given by its sorted element list and product.
struct Regular {
    elems: Vec<Elem>,
    index: HashMap<Elem, u32>,
    table: Option<Arc<FiniteMetricGroup>>,
}

impl Regular {
    fn new(elems: Vec<Elem>, mul: &dyn Fn(&Elem, &Elem) -> Elem, identity: &Elem, family: &Family) -> Result<Regular> {
        let index: HashMap<Elem, u32> = elems.iter().enumerate().map(|(i, x)| (x.clone(), i as u32)).collect();
        let table = if matches!(family, Family::Fin | Family::Trivial) {
            let m = elems.len();
            let t: Vec<Vec<u32>> = elems.iter().map(|a| elems.iter().map(|b| index[&mul(a, b)]).collect()).collect();
            let dist = (0..m).map(|i| (0..m).map(|j| if i == j { 0.0 } else { 1.0 }).collect()).collect();
            Some(Arc::new(FiniteMetricGroup::new(t, dist, index[identity])?))
        } else {
            None
        };
        Ok(Regular { elems, index, table })
    }

    fn target(&self, x: &Elem, mul: &dyn Fn(&Elem, &Elem) -> Elem, family: &Family) -> Result<Target> {
        if let Some(t) = &self.table {
            return Ok(Target::Finite(FiniteElem { group: t.clone(), idx: self.index[x] }));
        }
        let p = Perm(self.elems.iter().map(|y| self.index[&mul(x, y)]).collect());
        perm_in_family(p, family)
    }
}

pub(crate) fn perm_in_family(p: Perm, family: &Family) -> Result<Target> {
    Ok(match family {
        Family::Sofic => Target::Perm(p),
        Family::Hyp | Family::HypProjective => Target::Unitary(perm_to_unitary(&p)),
        Family::Lin(f) | Family::LinProjective(f) => Target::Rank(perm_to_rank(&p, *f)),
        other => return Err(Error::FamilyMismatch(format!("no permutation model in the {other} family"))),
    })
}

/// Left-regular representation of G/N, composed with the quotient map. The kernel must avoid
/// B(2n) so that the composite is injective on B(n).
pub fn from_quotient(g: &Group, q: &Quotient, n: usize, family: Family) -> Result<Built> {
    if n == 0 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    q.validate()?;
    if q.parent() != *g {
        return Err(Error::Invalid(format!("quotient of {} used for {g}", q.parent())));
    }
    let b2 = ball(g, 2 * n)?;
    if let Some(w) = q.kernel_witness(&b2) {
        return Err(Error::KernelMeetsBall(g.normal_form(&w)));
    }
    let mul = |a: &Elem, b: &Elem| q.mul(a, b);
    let reg = Regular::new(q.elements(), &mul, &q.map(&g.identity())?, &family)?;
    let c = ApproxCertificate::build(g.clone(), family.clone(), n, |x| reg.target(&q.map(x)?, &mul, &family))?;
    let dim = c.dimension;
    let c = c.with_trace(Trace::new("from-quotient", json!({ "index": q.index(), "quotient": format!("{q:?}") }), n, dim));
    accept(c)
}

/// Left-regular representation of a finite catalog group, exact on every ball.
pub fn regular_representation(g: &Group, n: usize, family: Family) -> Result<Built> {
    if !g.is_finite() {
        return Err(Error::Invalid(format!("{g} is infinite")));
    }
    let mut els = g.elements()?;
    els.sort();
    let mul = |a: &Elem, b: &Elem| g.mul(a, b);
    let reg = Regular::new(els, &mul, &g.identity(), &family)?;
    let c = ApproxCertificate::build(g.clone(), family.clone(), n, |x| reg.target(x, &mul, &family))?;
    let dim = c.dimension;
    accept(c.with_trace(Trace::new("regular", json!({ "order": reg.elems.len() }), n, dim)))
}

/// Permutation matrices of a sofic certificate passing at 2n^2, restricted to B(n).
pub fn perm_to_hyp(c: &ApproxCertificate, n: usize) -> Result<Built> {
    from_perm_certificate(c, n, 2 * n * n, Family::Hyp, "perm-to-hyp")
}

/// Permutation matrices over a field of a sofic certificate passing at n.
pub fn perm_to_lin(c: &ApproxCertificate, n: usize, field: FieldKind) -> Result<Built> {
    from_perm_certificate(c, n, n, Family::Lin(field), "perm-to-lin")
}

fn from_perm_certificate(c: &ApproxCertificate, n: usize, need: usize, family: Family, name: &str) -> Result<Built> {
    if n == 0 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    if c.family != Family::Sofic {
        return Err(Error::FamilyMismatch(format!("{name} needs a sofic certificate, got {}", c.family)));
    }
    require_input(c, need, "sofic input")?;
    let r = c.restrict(n)?;
    let out = r.map_targets(family.clone(), |t| match t {
        Target::Perm(p) => perm_in_family(p.clone(), &family),
        other => Err(Error::KindMismatch(format!("{} target in a sofic certificate", other.kind()))),
    })?;
    let dim = out.dimension;
    let inputs = c.provenance.iter().cloned().collect();
    accept(out.with_trace(Trace::new(name, json!({ "input_n": c.n }), n, dim).with_inputs(inputs)))
}

/// Product action of two certificates of the same family on G x H, at the smaller radius.
pub fn direct_product(cg: &ApproxCertificate, ch: &ApproxCertificate) -> Result<Built> {
    if cg.family != ch.family {
        return Err(Error::FamilyMismatch(format!("{} and {}", cg.family, ch.family)));
    }
    let n = cg.n.min(ch.n);
    let group = Group::product(cg.group.clone(), ch.group.clone());
    let c = ApproxCertificate::build(group, cg.family.clone(), n, |g| {
        let Elem::Pair(x, y) = g else { unreachable!() };
        let (a, b) = (cg.image(x), ch.image(y));
        Ok(match (&a, &b) {
            (Target::Perm(p), Target::Perm(q)) => Target::Perm(p.product_action(q)),
            (Target::Unitary(p), Target::Unitary(q)) => Target::Unitary(p.kron(q)),
            (Target::Rank(p), Target::Rank(q)) => Target::Rank(p.kron(q)?),
            _ => return Err(Error::Unsupported(format!("direct product of {} targets", a.kind()))),
        })
    })?;
    let dim = c.dimension;
    let inputs = cg.provenance.iter().chain(ch.provenance.iter()).cloned().collect();
    accept(c.with_trace(Trace::new("direct-product", json!({ "n_g": cg.n, "n_h": ch.n }), n, dim).with_inputs(inputs)))
}
