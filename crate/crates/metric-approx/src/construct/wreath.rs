use super::basic::perm_in_family;
use super::{accept, Built};
use crate::certify::{ApproxCertificate, Trace};
use crate::error::{Error, Result};
use crate::groups::{ball, Ball, Elem, Group, Quotient};
use crate::targets::{block_sum, kron, Dimension, Dist, Family, FiniteMetricGroup, Perm, Target, WreathElem, DEFAULT_MARGIN};
use serde_json::json;
use std::collections::HashMap;
use std::sync::Arc;

/// Largest matrix dimension built by `wreath_sofic` for unitary and rank targets.
pub const DEFAULT_MATERIALIZE_CAP: usize = 1024;
const PERM_CAP: usize = 1 << 20;

fn wreath_group(base: &Group, top: &Group) -> Result<Group> {
    if top.is_finite() {
        Ok(Group::WreathFiniteTop { base: Box::new(base.clone()), top: Box::new(top.clone()) })
    } else if *top == Group::z() {
        Ok(Group::lamplighter(base.clone()))
    } else {
        Err(Error::Unsupported(format!("wreath products with top group {top}")))
    }
}

fn split(g: &Elem) -> (&[(Elem, Elem)], &Elem) {
    match g {
        Elem::Wreath { support, top } => (support, top),
        _ => unreachable!("wreath element expected"),
    }
}

/// Certificate for G ≀ H into G_k ≀ H/N. The kernel N must avoid B_H(4n); a base function b is
/// sent to the function on cosets that reads b at the unique point of B_H(n) in each coset.
pub fn wreath_by_rf(cg: &ApproxCertificate, h: &Group, q: &Quotient, n: usize) -> Result<Built> {
    if n == 0 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    q.validate()?;
    if q.parent() != *h {
        return Err(Error::Invalid(format!("quotient of {} used for {h}", q.parent())));
    }
    let b4 = ball(h, 4 * n)?;
    if let Some(w) = q.kernel_witness(&b4) {
        return Err(Error::KernelMeetsBall(h.normal_form(&w)));
    }
    let group = wreath_group(&cg.group, h)?;
    let cosets = q.elements();
    let pos: HashMap<&Elem, u32> = cosets.iter().enumerate().map(|(i, x)| (x, i as u32)).collect();
    let table: Vec<Vec<u32>> = cosets.iter().map(|a| cosets.iter().map(|b| pos[&q.mul(a, b)]).collect()).collect();
    let m = cosets.len();
    let dist = (0..m).map(|i| (0..m).map(|j| if i == j { 0.0 } else { 1.0 }).collect()).collect();
    let top_group = Arc::new(FiniteMetricGroup::new(table, dist, pos[&q.map(&h.identity())?])?);
    let e_g = cg.targets[0].identity_like();
    let c = ApproxCertificate::build(group, Family::Wreath(Box::new(cg.family.clone())), n, |g| {
        let (support, top) = split(g);
        let mut base = vec![e_g.clone(); m];
        for (k, v) in support {
            // k lies in B_H(n), and distinct points of B_H(n) lie in distinct cosets
            base[pos[&q.map(k)?] as usize] = cg.image(v);
        }
        Ok(Target::Wreath(WreathElem { top_group: top_group.clone(), base, top: pos[&q.map(top)?] }))
    })?;
    let dim = c.dimension;
    let params = json!({ "index": m, "base_dimension": cg.dimension.to_json(), "input_n": cg.n });
    let inputs = cg.provenance.iter().cloned().collect();
    accept(c.with_trace(Trace::new("wreath-by-rf", params, n, dim).with_inputs(inputs)))
}

/// Measured quantities of the wreath lemma for one output of [`wreath_sofic`].
#[derive(Clone, Debug, PartialEq)]
pub struct WreathSoficReport {
    /// Worst input defect or loss of separation on the radius-4n balls.
    pub epsilon: Dist,
    /// max d(Psi(xy,1), Psi(x,1)Psi(y,1)) over base functions supported in B_H(n) with values in B_G(n).
    pub eps1: Dist,
    /// max d(Psi(1,x)Psi(1,y), Psi(1,xy)) over x, y in B_H(n).
    pub eps0: Dist,
    /// max d(Psi(x,1)Psi(1,y), Psi(y^-1 x y, y)).
    pub shift_defect: Dist,
    /// max d(Psi(1,y)Psi(x,1), Psi(x,y)) where (x,y) stands for y x.
    pub split_defect: Dist,
    /// Defect allowed by the input defects for the first two bullets.
    pub eps1_allowance: Dist,
    pub eps0_allowance: Dist,
    pub multiplicativity_threshold: Dist,
    pub injectivity_threshold: Dist,
    pub defect: Dist,
    pub separation: Option<Dist>,
    pub bullets_pass: bool,
    pub thresholds_pass: bool,
}

struct Psi<'a> {
    cg: &'a ApproxCertificate,
    ch: &'a ApproxCertificate,
    family: Family,
    /// |A|, |B|.
    a: usize,
    b: usize,
    /// sigma(h) for the support points in use, cached by element.
    sigma_cache: HashMap<Elem, Perm>,
}

impl<'a> Psi<'a> {
    fn sigma(&mut self, h: &Elem) -> Result<Perm> {
        if let Some(p) = self.sigma_cache.get(h) {
            return Ok(p.clone());
        }
        let p = match self.ch.image(h) {
            Target::Perm(p) => p,
            Target::Unitary(u) => u.as_perm().cloned().ok_or(Error::Unsupported("top images must be permutation matrices".into()))?,
            Target::Rank(r) => rank_as_perm(&r)?,
            other => return Err(Error::KindMismatch(format!("{} top image", other.kind()))),
        };
        self.sigma_cache.insert(h.clone(), p.clone());
        Ok(p)
    }

    /// Theta(pi, tau) with pi given per (b, beta): the point ((a_beta), b) goes to
    /// ((pi_{b,beta}(a_beta)), tau(b)).
    fn theta(&self, pi: &[Vec<Target>], tau: &Perm) -> Result<Target> {
        let mut diag: Option<Target> = None;
        for row in pi.iter() {
            // coordinate beta = 0 is the least significant digit
            let mut block = row[self.b - 1].clone();
            for t in row[..self.b - 1].iter().rev() {
                block = kron(&block, t)?;
            }
            diag = Some(match diag {
                None => block,
                Some(d) => block_sum(&d, &block)?,
            });
        }
        let inner = self.a.pow(self.b as u32);
        let blocks = Perm((0..self.b * inner).map(|x| (tau.apply(x / inner) * inner + x % inner) as u32).collect());
        perm_in_family(blocks, &self.family)?.mul(&diag.expect("B is nonempty"))
    }

    /// pi^x_{b,beta} = product over h in supp x with sigma(h)(beta) = b of theta(x(h)).
    fn base(&mut self, support: &[(Elem, Elem)]) -> Result<Target> {
        let e = self.cg.targets[0].identity_like();
        let mut pi = vec![vec![e; self.b]; self.b];
        for (h, v) in support {
            let s = self.sigma(h)?;
            let t = self.cg.image(v);
            for beta in 0..self.b {
                let bb = s.apply(beta);
                pi[bb][beta] = pi[bb][beta].mul(&t)?;
            }
        }
        self.theta(&pi, &Perm::identity(self.b))
    }

    fn top(&mut self, y: &Elem) -> Result<Target> {
        let e = self.cg.targets[0].identity_like();
        let pi = vec![vec![e; self.b]; self.b];
        let s = self.sigma(y)?;
        self.theta(&pi, &s)
    }

    /// Psi of b t, computed as Psi(b, 1) Psi(1, t).
    fn at(&mut self, g: &Elem) -> Result<Target> {
        let (support, top) = split(g);
        self.base(support)?.mul(&self.top(top)?)
    }
}

fn rank_as_perm(r: &crate::targets::RankMatrix) -> Result<Perm> {
    use crate::targets::RankMatrix;
    let k = r.dim();
    let mut img = vec![u32::MAX; k];
    let is_one_zero = |i: usize, j: usize| -> Option<bool> {
        match r {
            RankMatrix::Fp { rows, .. } => match rows[i][j] {
                0 => Some(false),
                1 => Some(true),
                _ => None,
            },
            RankMatrix::Q { rows } => {
                let x = &rows[i][j];
                if *x == num_rational::BigRational::from_integer(0.into()) {
                    Some(false)
                } else if *x == num_rational::BigRational::from_integer(1.into()) {
                    Some(true)
                } else {
                    None
                }
            }
        }
    };
    for j in 0..k {
        for i in 0..k {
            match is_one_zero(i, j) {
                Some(true) if img[j] == u32::MAX => img[j] = i as u32,
                Some(false) => {}
                _ => return Err(Error::Unsupported("top images must be permutation matrices".into())),
            }
        }
    }
    Perm::from_images(img).ok_or(Error::Unsupported("top images must be permutation matrices".into()))
}

// Largest defect and smallest separation of a map on a ball, over pairs whose product stays in it.
fn ball_quality(c: &ApproxCertificate, b: &Ball) -> Result<(Dist, Dist)> {
    let g = &c.group;
    let t: Vec<Target> = b.elements.iter().map(|x| c.image(x)).collect();
    let mut defect = Dist::zero();
    let mut sep = Dist::one();
    for (i, x) in b.elements.iter().enumerate() {
        for (j, y) in b.elements.iter().enumerate() {
            if let Some(k) = b.index_of(&g.mul(x, y)) {
                defect = defect.max(c.family.distance(&t[i].mul(&t[j])?, &t[k])?);
            }
            if j > i {
                sep = sep.min(c.family.distance(&t[i], &t[j])?);
            }
        }
    }
    Ok((defect, sep))
}

// Largest d(pi(x)pi(y), pi(xy)) over all x, y in the ball, with pi the identity outside it.
fn all_pairs_defect(c: &ApproxCertificate, b: &Ball) -> Result<Dist> {
    let g = &c.group;
    let mut defect = Dist::zero();
    for x in &b.elements {
        for y in &b.elements {
            defect = defect.max(c.family.distance(&c.image(x).mul(&c.image(y))?, &c.image(&g.mul(x, y)))?);
        }
    }
    Ok(defect)
}

fn base_functions(support: &[Elem], values: &[Elem], base: &Group, cap: usize) -> Result<Vec<Vec<(Elem, Elem)>>> {
    let total = values.len().checked_pow(support.len() as u32).unwrap_or(usize::MAX);
    if total > cap {
        return Err(Error::Overflow { what: "base function enumeration", cap });
    }
    let mut out = Vec::with_capacity(total);
    for mut code in 0..total {
        let mut f = Vec::new();
        for h in support {
            let v = &values[code % values.len()];
            code /= values.len();
            if !base.is_identity(v) {
                f.push((h.clone(), v.clone()));
            }
        }
        f.sort();
        out.push(f);
    }
    Ok(out)
}

/// Certificate of G ≀ H into Sym(A^B x B) (or the unitary and linear analogues) from certificates
/// of G into Sym(A) and H into Sym(B), with the measured quantities of the wreath lemma.
pub fn wreath_sofic(cg: &ApproxCertificate, ch: &ApproxCertificate, n: usize, cap: usize) -> Result<(Built, WreathSoficReport)> {
    if n == 0 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    let family = match (&cg.family, &ch.family) {
        (f @ (Family::Sofic | Family::Hyp | Family::Lin(_)), h) if f == h => f.clone(),
        (f, h) => return Err(Error::FamilyMismatch(format!("{f} and {h}"))),
    };
    let as_usize = |d: Dimension| d.as_exact().map(|x| x as usize).ok_or(Error::Unsupported("symbolic dimension".into()));
    let (a, bsize) = (as_usize(cg.dimension)?, as_usize(ch.dimension)?);
    let dim = a.checked_pow(bsize as u32).and_then(|x| x.checked_mul(bsize)).unwrap_or(usize::MAX);
    let limit = if family == Family::Sofic { PERM_CAP } else { cap };
    if dim > limit {
        return Err(Error::Overflow { what: "wreath target dimension", cap: limit });
    }
    let group = wreath_group(&cg.group, &ch.group)?;
    let mut psi = Psi { cg, ch, family: family.clone(), a, b: bsize, sigma_cache: HashMap::new() };
    let c = ApproxCertificate::build(group.clone(), family.clone(), n, |g| psi.at(g))?;
    let params = json!({ "base_dimension": a, "top_dimension": bsize, "input_n": [cg.n, ch.n] });
    let inputs = cg.provenance.iter().chain(ch.provenance.iter()).cloned().collect();
    let c = c.with_trace(Trace::new("wreath-sofic", params, n, Dimension::Exact(dim as u64)).with_inputs(inputs));

    // input quality on the radius-4n balls, and the products the first two bullets use
    let (gb4, hb4) = (ball(&cg.group, 4 * n)?, ball(&ch.group, 4 * n)?);
    let (dg4, sg4) = ball_quality(cg, &gb4)?;
    let (dh4, sh4) = ball_quality(ch, &hb4)?;
    let epsilon = dg4.max(dh4).max(Dist::one().sub(sg4)).max(Dist::one().sub(sh4));
    let (gb, hb) = (gb4.restrict(n), hb4.restrict(n));
    let dg = all_pairs_defect(cg, &gb)?;
    let dh = all_pairs_defect(ch, &hb)?;

    let (base_g, top_h) = (&cg.group, &ch.group);
    let funcs = base_functions(&hb.elements, &gb.elements, base_g, 4096)?;
    let fam = &family;
    let pointwise = |x: &[(Elem, Elem)], y: &[(Elem, Elem)]| -> Vec<(Elem, Elem)> {
        let mut m: std::collections::BTreeMap<Elem, Elem> = x.iter().cloned().collect();
        for (h, v) in y {
            let nv = match m.get(h) {
                Some(u) => base_g.mul(u, v),
                None => v.clone(),
            };
            if base_g.is_identity(&nv) {
                m.remove(h);
            } else {
                m.insert(h.clone(), nv);
            }
        }
        m.into_iter().collect()
    };
    let shift = |x: &[(Elem, Elem)], y: &Elem| -> Vec<(Elem, Elem)> {
        // (y^-1 x y)(h) = x(y h)
        let yi = top_h.inverse(y);
        let mut f: Vec<(Elem, Elem)> = x.iter().map(|(h, v)| (top_h.mul(&yi, h), v.clone())).collect();
        f.sort();
        f
    };
    let conj = |x: &[(Elem, Elem)], y: &Elem| -> Vec<(Elem, Elem)> {
        // (y x y^-1)(h) = x(y^-1 h)
        let mut f: Vec<(Elem, Elem)> = x.iter().map(|(h, v)| (top_h.mul(y, h), v.clone())).collect();
        f.sort();
        f
    };
    let base_images: Vec<Target> = funcs.iter().map(|f| psi.base(f)).collect::<Result<_>>()?;
    let mut eps1 = Dist::zero();
    for (i, x) in funcs.iter().enumerate() {
        for (j, y) in funcs.iter().enumerate() {
            let d = fam.distance(&psi.base(&pointwise(x, y))?, &base_images[i].mul(&base_images[j])?)?;
            eps1 = eps1.max(d);
        }
    }
    let top_images: Vec<Target> = hb.elements.iter().map(|y| psi.top(y)).collect::<Result<_>>()?;
    let mut eps0 = Dist::zero();
    for (i, x) in hb.elements.iter().enumerate() {
        for (j, y) in hb.elements.iter().enumerate() {
            let d = fam.distance(&top_images[i].mul(&top_images[j])?, &psi.top(&top_h.mul(x, y))?)?;
            eps0 = eps0.max(d);
        }
    }
    let mut shift_defect = Dist::zero();
    let mut split_defect = Dist::zero();
    for (i, x) in funcs.iter().enumerate() {
        for (j, y) in hb.elements.iter().enumerate() {
            // Psi(x,1) Psi(1,y) against Psi(1,y) Psi(y^-1 x y, 1)
            let lhs = base_images[i].mul(&top_images[j])?;
            let rhs = top_images[j].mul(&psi.base(&shift(x, y))?)?;
            shift_defect = shift_defect.max(fam.distance(&lhs, &rhs)?);
            // Psi(1,y) Psi(x,1) against Psi of the group element y x = (y x y^-1) y
            let lhs = top_images[j].mul(&base_images[i])?;
            let rhs = psi.base(&conj(x, y))?.mul(&top_images[j])?;
            split_defect = split_defect.max(fam.distance(&lhs, &rhs)?);
        }
    }
    let b_count = |r: &Ball| Dist::ratio((r.len() * r.len()) as i64, 1);
    let multiplicativity_threshold = Dist::ratio(48, 1).mul(b_count(&hb4)).mul(epsilon);
    let injectivity_threshold = Dist::one().sub(Dist::ratio(48, 1).mul(b_count(&hb)).mul(epsilon));
    let eps1_allowance = Dist::ratio(hb.len() as i64, 1).mul(dg);
    let eps0_allowance = dh;
    let built = accept(c)?;
    let rep = &built.report;
    let bullets_pass = eps1.le(&eps1_allowance, DEFAULT_MARGIN)
        && eps0.le(&eps0_allowance, DEFAULT_MARGIN)
        && shift_defect.le(&Dist::zero(), DEFAULT_MARGIN)
        && split_defect.le(&Dist::zero(), DEFAULT_MARGIN);
    let thresholds_pass = rep.defect.le(&multiplicativity_threshold, DEFAULT_MARGIN)
        && rep.separation.is_none_or(|s| injectivity_threshold.le(&s, DEFAULT_MARGIN));
    let report = WreathSoficReport {
        epsilon,
        eps1,
        eps0,
        shift_defect,
        split_defect,
        eps1_allowance,
        eps0_allowance,
        multiplicativity_threshold,
        injectivity_threshold,
        defect: rep.defect,
        separation: rep.separation,
        bullets_pass,
        thresholds_pass,
    };
    Ok((built, report))
}
