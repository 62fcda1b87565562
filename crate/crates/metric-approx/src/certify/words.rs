use super::{verify_d, ApproxCertificate, Report, Trace};
use crate::error::{Error, Result};
use crate::groups::{ball, geodesic_words, Elem, Group};
use crate::targets::{Dimension, Dist, Family, Target, DEFAULT_MARGIN};
use serde_json::json;

pub const DEFAULT_WORD_CAP: usize = 1_000_000;

/// A homomorphism from the free group on X, given by the images of the generators.
#[derive(Clone, Debug)]
pub struct HomCertificate {
    pub group: Group,
    pub family: Family,
    pub epsilon: Dist,
    pub dimension: Dimension,
    /// Images of the free generators, in the order of `Group::free_generators`.
    pub images: Vec<Target>,
    pub relators: Option<Vec<Vec<i32>>>,
}

impl HomCertificate {
    pub fn new(group: Group, family: Family, images: Vec<Target>) -> Result<HomCertificate> {
        let r = group.free_generators().len();
        if images.len() != r || r == 0 {
            return Err(Error::Invalid(format!("expected {r} generator images, got {}", images.len())));
        }
        let dimension = images[0].dimension()?;
        let epsilon = family.default_epsilon();
        let relators = group.relators();
        Ok(HomCertificate { group, family, epsilon, dimension, images, relators })
    }

    fn inverses(&self) -> Result<Vec<Target>> {
        self.images.iter().map(Target::inverse).collect()
    }

    fn letter_image<'a>(&'a self, inv: &'a [Target], l: i32) -> &'a Target {
        if l > 0 {
            &self.images[l as usize - 1]
        } else {
            &inv[(-l) as usize - 1]
        }
    }

    /// phi(w) for a word over the letters +-1, ..., +-r.
    pub fn eval(&self, w: &[i32]) -> Result<Target> {
        let inv = self.inverses()?;
        let mut t = self.images[0].identity_like();
        for &l in w {
            t = t.mul(self.letter_image(&inv, l))?;
        }
        Ok(t)
    }
}

fn word_string(w: &[i32]) -> String {
    json!(w).to_string()
}

struct Sweep {
    defect: Option<(Dist, Vec<i32>)>,
    separation: Option<(Dist, Vec<i32>)>,
    trivial: usize,
    nontrivial: usize,
}

// Visits every reduced word of length <= n, recording trivial-word defects only when
// `trivial_defects` is set.
fn sweep(h: &HomCertificate, n: usize, cap: usize, trivial_defects: bool) -> Result<Sweep> {
    let g = &h.group;
    let inv = h.inverses()?;
    let r = h.images.len() as i32;
    let e_t = h.images[0].identity_like();
    let mut out = Sweep { defect: None, separation: None, trivial: 0, nontrivial: 0 };
    let mut word: Vec<i32> = Vec::new();
    let mut visited = 0usize;
    // explicit stack of (group element, image) per prefix length
    fn rec(
        h: &HomCertificate,
        g: &Group,
        inv: &[Target],
        r: i32,
        e_t: &Target,
        n: usize,
        cap: usize,
        trivial_defects: bool,
        word: &mut Vec<i32>,
        x: &Elem,
        t: &Target,
        visited: &mut usize,
        out: &mut Sweep,
    ) -> Result<()> {
        *visited += 1;
        if *visited > cap {
            return Err(Error::Overflow { what: "word enumeration", cap });
        }
        let d = h.family.distance(t, e_t)?;
        if g.is_identity(x) {
            out.trivial += 1;
            if trivial_defects && out.defect.as_ref().is_none_or(|(b, _)| d.cmp_value(b).is_gt()) {
                out.defect = Some((d, word.clone()));
            }
        } else {
            out.nontrivial += 1;
            if out.separation.as_ref().is_none_or(|(b, _)| d.cmp_value(b).is_lt()) {
                out.separation = Some((d, word.clone()));
            }
        }
        if word.len() == n {
            return Ok(());
        }
        for l in (1..=r).flat_map(|i| [i, -i]) {
            if word.last() == Some(&-l) {
                continue;
            }
            let y = g.mul(x, &g.letter(l));
            let s = t.mul(h.letter_image(inv, l))?;
            word.push(l);
            rec(h, g, inv, r, e_t, n, cap, trivial_defects, word, &y, &s, visited, out)?;
            word.pop();
        }
        Ok(())
    }
    rec(h, g, &inv, r, &e_t, n, cap, trivial_defects, &mut word, &g.identity(), &e_t, &mut visited, &mut out)?;
    Ok(out)
}

fn report(h: &HomCertificate, n: usize, defect: Option<(Dist, Vec<i32>)>, checked_defect: usize, s: Sweep) -> Report {
    let inv_n = Dist::ratio(1, n.max(1) as i64);
    let (dval, dwit) = defect.map_or((Dist::zero(), vec![]), |(d, w)| (d, vec![word_string(&w)]));
    Report {
        pass: false,
        defect: dval,
        defect_witness: dwit,
        separation: s.separation.as_ref().map(|x| x.0),
        separation_witness: s.separation.as_ref().map_or(vec![], |(_, w)| vec![word_string(w)]),
        defect_threshold: inv_n,
        // nontrivial words are required to clear epsilon - 1/n
        separation_threshold: h.epsilon.sub(inv_n),
        margin: DEFAULT_MARGIN,
        checked_defect,
        checked_separation: s.nontrivial,
    }
    .finish()
}

/// Reduced words of length <= n: trivial ones must map within 1/n of the identity, nontrivial
/// ones farther than epsilon - 1/n.
pub fn verify_w(h: &HomCertificate, n: usize, cap: usize) -> Result<Report> {
    if n == 0 {
        return Err(Error::Invalid("verification radius must be at least 1".into()));
    }
    let mut s = sweep(h, n, cap, true)?;
    let defect = s.defect.take();
    let trivial = s.trivial;
    Ok(report(h, n, defect, trivial, s))
}

/// Relators of length <= n (and their inverses) must map within 1/n of the identity; nontrivial
/// words of length <= n are separated as in [`verify_w`].
pub fn verify_r(h: &HomCertificate, n: usize, cap: usize) -> Result<Report> {
    if n == 0 {
        return Err(Error::Invalid("verification radius must be at least 1".into()));
    }
    let rels = h.relators.as_ref().ok_or_else(|| Error::Invalid("no relator list".into()))?;
    let e_t = h.images[0].identity_like();
    let mut defect: Option<(Dist, Vec<i32>)> = None;
    let mut count = 0;
    for r in rels.iter().filter(|r| r.len() <= n) {
        let ri: Vec<i32> = r.iter().rev().map(|l| -l).collect();
        for w in [r.clone(), ri] {
            let d = h.family.distance(&h.eval(&w)?, &e_t)?;
            count += 1;
            if defect.as_ref().is_none_or(|(b, _)| d.cmp_value(b).is_gt()) {
                defect = Some((d, w));
            }
        }
    }
    let s = sweep(h, n, cap, false)?;
    Ok(report(h, n, defect, count, s))
}

/// Restricts a certificate verified at 3m^2 to the generators and checks the resulting
/// homomorphism at m.
pub fn w_from_d(c: &ApproxCertificate, m: usize) -> Result<(HomCertificate, Report)> {
    if m == 0 || c.n < 3 * m * m {
        return Err(Error::Invalid(format!("need a certificate at radius {} for m = {m}", 3 * m * m)));
    }
    let up = verify_d(c)?;
    if !up.pass {
        return Err(Error::Upstream(format!("certificate fails at n = {}", c.n)));
    }
    let images = c
        .group
        .free_generators()
        .iter()
        .map(|x| c.get(x).cloned().ok_or_else(|| Error::MissingAssignment(c.group.normal_form(x))))
        .collect::<Result<Vec<_>>>()?;
    let mut h = HomCertificate::new(c.group.clone(), c.family.clone(), images)?;
    h.epsilon = c.epsilon;
    let rep = verify_w(&h, m, DEFAULT_WORD_CAP)?;
    Ok((h, rep))
}

/// Builds pi(g) = phi(w_g) on B(m) from geodesic words, given a homomorphism verified at 3m.
pub fn d_from_w(h: &HomCertificate, m: usize) -> Result<(ApproxCertificate, Report)> {
    if m == 0 {
        return Err(Error::Invalid("m must be at least 1".into()));
    }
    let up = verify_w(h, 3 * m, DEFAULT_WORD_CAP)?;
    if !up.pass {
        return Err(Error::Upstream(format!("homomorphism fails the word check at {}", 3 * m)));
    }
    let b = ball(&h.group, m)?;
    let words = geodesic_words(&h.group, &b);
    let mut c = ApproxCertificate::build(h.group.clone(), h.family.clone(), m, |g| h.eval(&words[g]))?.with_epsilon(h.epsilon);
    c.dimension = h.dimension;
    let c = c.with_trace(Trace::new("d-from-w", json!({ "m": m }), m, h.dimension));
    let rep = verify_d(&c)?;
    Ok((c, rep))
}
