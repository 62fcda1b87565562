use super::folner::{folner_search, FolnerStrategy};
use super::rf::{least_quotient, QuotientFamily};
use super::{PointValue, ProfileCurve, ProfileKind, ProfilePoint, Provenance};
use crate::construct::{cyclic_z, direct_product, folner_to_sofic, from_quotient, perm_to_hyp, perm_to_lin, regular_representation, Built};
use crate::error::{Error, Result};
use crate::groups::{ball, Group};
use crate::targets::Family;
use rayon::prelude::*;

/// A way of producing certificates at a given radius.
#[derive(Clone, Debug, PartialEq)]
pub enum Builder {
    /// Shifts on Z/(2n+1); for Z only. Hyperlinear and linear targets go through permutation matrices.
    CyclicZ,
    /// Regular representation of the least quotient whose kernel avoids B(2n).
    Quotient { max_index: u64 },
    /// Translation action on a box Følner set for B(2n), in Z^d.
    Folner { side_max: u64, materialize_cap: usize },
    /// Regular representation of a finite group.
    Regular,
    /// Product of the best certificates of the two factors of a direct product.
    Product,
}

impl Builder {
    pub fn name(&self) -> &'static str {
        match self {
            Builder::CyclicZ => "cyclic-z",
            Builder::Quotient { .. } => "quotient",
            Builder::Folner { .. } => "folner",
            Builder::Regular => "regular",
            Builder::Product => "product",
        }
    }

    pub fn parse(s: &str) -> Result<Builder> {
        Ok(match s.trim() {
            "cyclic-z" => Builder::CyclicZ,
            "quotient" => Builder::Quotient { max_index: 1 << 20 },
            "folner" => Builder::Folner { side_max: 1 << 20, materialize_cap: 20_000 },
            "regular" => Builder::Regular,
            "product" => Builder::Product,
            other => return Err(Error::Invalid(format!("unknown builder {other}"))),
        })
    }

    pub fn defaults() -> Vec<Builder> {
        ["cyclic-z", "quotient", "folner", "regular", "product"].iter().map(|s| Builder::parse(s).unwrap()).collect()
    }

    /// A verified certificate for B(n), or None when the builder does not apply.
    pub fn build(&self, g: &Group, family: &Family, n: usize, all: &[Builder]) -> Result<Option<Built>> {
        let skip = |e: Error| match e {
            Error::Overflow { .. } | Error::Unsupported(_) | Error::FamilyMismatch(_) => Ok(None),
            e => Err(e),
        };
        let r = match self {
            Builder::CyclicZ if *g == Group::z() => match family {
                Family::Sofic => cyclic_z(n).map(Some),
                Family::Fin => from_quotient(g, &crate::groups::Quotient::cyclic(2 * n as i64 + 1), n, Family::Fin).map(Some),
                Family::Hyp => cyclic_z(2 * n * n).and_then(|c| perm_to_hyp(&c.certificate, n)).map(Some),
                Family::Lin(f) => cyclic_z(n).and_then(|c| perm_to_lin(&c.certificate, n, *f)).map(Some),
                _ => Ok(None),
            },
            Builder::Quotient { max_index } => {
                let Ok(qf) = QuotientFamily::for_group(g) else { return Ok(None) };
                if family.is_projective() || matches!(family, Family::Wreath(_) | Family::PermWreath(_)) {
                    return Ok(None);
                }
                match least_quotient(g, 2 * n, qf, *max_index)? {
                    Some(q) => from_quotient(g, &q, n, family.clone()).map(Some),
                    None => Ok(None),
                }
            }
            Builder::Folner { side_max, materialize_cap } if *family == Family::Sofic && matches!(g, Group::FreeAbelian(_)) => {
                let s = folner_search(g, 2 * n, &FolnerStrategy::Boxes { side_max: *side_max, materialize_cap: *materialize_cap })?;
                match s.witness {
                    Some(w) => folner_to_sofic(&w, n).map(Some),
                    None => Ok(None),
                }
            }
            Builder::Regular if g.is_finite() => regular_representation(g, n, family.clone()).map(Some),
            Builder::Product => {
                let Group::DirectProduct(a, b) = g else { return Ok(None) };
                let ca = best(a, family, n, all)?;
                let cb = best(b, family, n, all)?;
                match (ca, cb) {
                    (Some((_, x)), Some((_, y))) => direct_product(&x.certificate, &y.certificate).map(Some),
                    _ => Ok(None),
                }
            }
            _ => Ok(None),
        };
        r.or_else(skip)
    }
}

fn best(g: &Group, family: &Family, n: usize, builders: &[Builder]) -> Result<Option<(&'static str, Built)>> {
    let mut out: Option<(&'static str, Built)> = None;
    for b in builders {
        if let Some(built) = b.build(g, family, n, builders)? {
            let better = out.as_ref().is_none_or(|(_, o)| built.certificate.dimension.log2() < o.certificate.dimension.log2());
            if better {
                out = Some((b.name(), built));
            }
        }
    }
    Ok(out)
}

/// Pointwise minimum over the builders of the certified dimension, with injectivity lower bounds
/// where the family has one.
pub fn upper_curve(g: &Group, family: &Family, ns: &[usize], builders: &[Builder]) -> Result<ProfileCurve> {
    let cells: Vec<Vec<ProfilePoint>> = ns
        .par_iter()
        .map(|&n| -> Result<Vec<ProfilePoint>> {
            let mut pts = Vec::new();
            if let Some(p) = injectivity_lower(g, family, n)? {
                pts.push(p);
            }
            if let Some((name, built)) = best(g, family, n, builders)? {
                let trace = serde_json::to_value(built.certificate.provenance.as_ref()).expect("serializable");
                pts.push(
                    ProfilePoint::new(n, PointValue::from_dimension(built.certificate.dimension), Provenance::upper(name))
                        .with_certificate(trace),
                );
            }
            Ok(pts)
        })
        .collect::<Result<_>>()?;
    let mut c = ProfileCurve::new(g.clone(), ProfileKind::Metric(family.clone()));
    for p in cells.into_iter().flatten() {
        c.push(p);
    }
    Ok(c)
}

/// Distinct ball elements need distinct images: |F| >= |B(n)| for finite targets and
/// k! >= |B(n)| in Sym(k).
pub fn injectivity_lower(g: &Group, family: &Family, n: usize) -> Result<Option<ProfilePoint>> {
    if n == 0 {
        return Ok(None);
    }
    let beta = ball(g, n)?.len() as u64;
    let v = match family {
        Family::Fin | Family::Trivial => beta,
        Family::Sofic => {
            let (mut k, mut f) = (1u64, 1u64);
            while f < beta {
                k += 1;
                f = f.saturating_mul(k);
            }
            k
        }
        _ => return Ok(None),
    };
    Ok(Some(ProfilePoint::new(n, PointValue::Finite(v), Provenance::lower("injectivity"))))
}

/// Exact ball sizes |B(n)|.
pub fn growth_curve(g: &Group, ns: &[usize]) -> Result<ProfileCurve> {
    let mut c = ProfileCurve::new(g.clone(), ProfileKind::Growth);
    for &n in ns {
        let v = ball(g, n)?.len() as u64;
        c.push(ProfilePoint::new(n, PointValue::Finite(v), Provenance::exact("ball enumeration")));
    }
    Ok(c)
}
