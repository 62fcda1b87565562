use super::ApproxCertificate;
use crate::error::Result;
use crate::groups::{ball, Elem};
use crate::targets::{Dist, Target, DEFAULT_MARGIN};

#[derive(Clone, Debug)]
pub struct LemmaConfig {
    /// Radius of the symmetric set F; defaults to half the certificate radius.
    pub radius: Option<usize>,
    /// Longest tuple g_1, ..., g_L checked.
    pub max_len: usize,
    pub margin: f64,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        LemmaConfig { radius: None, max_len: 3, margin: DEFAULT_MARGIN }
    }
}

/// Worst observed value of one bound, relative to its allowance c * eps0.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCheck {
    pub name: &'static str,
    pub worst: Dist,
    pub allowance: Dist,
    pub instances: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LemmaReport {
    /// Largest multiplicativity defect over F x F.
    pub eps0: Dist,
    pub radius: usize,
    pub max_len: usize,
    pub bounds: Vec<BoundCheck>,
    pub pass: bool,
}

struct Acc {
    name: &'static str,
    factor: i64,
    worst: Dist,
    instances: usize,
}

impl Acc {
    fn new(name: &'static str) -> Acc {
        Acc { name, factor: 0, worst: Dist::zero(), instances: 0 }
    }

    fn record(&mut self, factor: i64, d: Dist, eps0: Dist) {
        self.instances += 1;
        // compare d / factor against eps0 by tracking the tightest allowance per instance
        let allowance = eps0.mul(Dist::ratio(factor, 1));
        let slack_new = allowance.sub(d);
        let slack_old = eps0.mul(Dist::ratio(self.factor, 1)).sub(self.worst);
        if self.instances == 1 || slack_new.cmp_value(&slack_old).is_lt() {
            self.worst = d;
            self.factor = factor;
        }
    }

    fn finish(self, eps0: Dist, margin: f64) -> BoundCheck {
        let allowance = eps0.mul(Dist::ratio(self.factor, 1));
        BoundCheck { name: self.name, worst: self.worst, allowance, instances: self.instances, pass: self.worst.le(&allowance, margin) }
    }
}

/// Measures eps0 = max d(pi(g)pi(h), pi(gh)) over F = B(r) and checks, on all tuples of
/// generators or identities g_1..g_L with L <= max_len, that
/// d(pi(e), e) <= eps0, d(pi(g^-1), pi(g)^-1) <= 2 eps0, and the product bounds
/// (L-1) eps0, 2L eps0, (3L-1) eps0.
pub fn lemma_consistency_suite(c: &ApproxCertificate, cfg: &LemmaConfig) -> Result<LemmaReport> {
    let g = &c.group;
    let radius = cfg.radius.unwrap_or(c.n / 2).min(c.n / 2);
    let f = ball(g, radius)?;
    let fam = &c.family;
    let pi = |x: &Elem| c.image(x);
    let fe: Vec<Target> = f.elements.iter().map(pi).collect();

    let mut eps0 = Dist::zero();
    for (i, x) in f.elements.iter().enumerate() {
        for (j, y) in f.elements.iter().enumerate() {
            let d = fam.distance(&fe[i].mul(&fe[j])?, &pi(&g.mul(x, y)))?;
            eps0 = eps0.max(d);
        }
    }

    let e_t = fe[0].identity_like();
    let mut b1 = Acc::new("identity");
    b1.record(1, fam.distance(&pi(&g.identity()), &e_t)?, eps0);
    let mut b2 = Acc::new("inverse");
    for (i, x) in f.elements.iter().enumerate() {
        b2.record(2, fam.distance(&pi(&g.inverse(x)), &fe[i].inverse()?)?, eps0);
    }

    let mut letters = vec![g.identity()];
    letters.extend(g.generators());
    let max_len = cfg.max_len.min(radius);
    let mut b3 = Acc::new("product");
    let mut b4 = Acc::new("signed product of images");
    let mut b5 = Acc::new("signed product");
    let mut tuple: Vec<usize> = Vec::new();
    for len in 1..=max_len {
        let total = letters.len().pow(len as u32);
        for code in 0..total {
            tuple.clear();
            let mut c0 = code;
            for _ in 0..len {
                tuple.push(c0 % letters.len());
                c0 /= letters.len();
            }
            let gs: Vec<&Elem> = tuple.iter().map(|&i| &letters[i]).collect();
            let images: Vec<Target> = gs.iter().map(|x| pi(x)).collect();
            // every signed prefix lies in F since each factor has length <= 1 and len <= radius
            if len > 1 {
                let prod = gs.iter().fold(g.identity(), |a, x| g.mul(&a, x));
                let mut t = e_t.clone();
                for im in &images {
                    t = t.mul(im)?;
                }
                b3.record(len as i64 - 1, fam.distance(&pi(&prod), &t)?, eps0);
            }
            for signs in 0..(1u32 << len) {
                let mut elem = g.identity();
                let mut of_signed = e_t.clone();
                let mut signed_images = e_t.clone();
                for (k, x) in gs.iter().enumerate() {
                    let neg = signs >> k & 1 == 1;
                    let xs = if neg { g.inverse(x) } else { (*x).clone() };
                    of_signed = of_signed.mul(&pi(&xs))?;
                    let im = if neg { images[k].inverse()? } else { images[k].clone() };
                    signed_images = signed_images.mul(&im)?;
                    elem = g.mul(&elem, &xs);
                }
                b4.record(2 * len as i64, fam.distance(&of_signed, &signed_images)?, eps0);
                b5.record(3 * len as i64 - 1, fam.distance(&pi(&elem), &signed_images)?, eps0);
            }
        }
    }

    let bounds: Vec<BoundCheck> = [b1, b2, b3, b4, b5]
        .into_iter()
        .filter(|a| a.instances > 0)
        .map(|a| a.finish(eps0, cfg.margin))
        .collect();
    let pass = bounds.iter().all(|b| b.pass);
    Ok(LemmaReport { eps0, radius, max_len, bounds, pass })
}
