use super::{PointValue, ProfilePoint, Provenance};
use crate::error::{Error, Result};
use crate::groups::{ball, enumerate_hnf, Group, Quotient};
use serde_json::json;

/// Which normal subgroups of finite index the search ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuotientFamily {
    /// All sublattices of Z^d, which are all its finite-index subgroups.
    Lattices,
    /// Kernels of reduction mod m in the Heisenberg group.
    Congruence,
}

impl QuotientFamily {
    pub fn for_group(g: &Group) -> Result<QuotientFamily> {
        match g {
            Group::FreeAbelian(_) => Ok(QuotientFamily::Lattices),
            Group::Heisenberg(_) => Ok(QuotientFamily::Congruence),
            other => Err(Error::Unsupported(format!("no quotient enumeration for {other}"))),
        }
    }
}

/// Least-index quotient in the family whose kernel meets B(n) only in the identity, searching
/// indices up to `max_index`.
pub fn least_quotient(g: &Group, n: usize, family: QuotientFamily, max_index: u64) -> Result<Option<Quotient>> {
    let b = ball(g, n)?;
    match (family, g) {
        (QuotientFamily::Lattices, Group::FreeAbelian(d)) => {
            for index in 1..=max_index {
                for q in enumerate_hnf(*d, index) {
                    if q.avoids(&b) {
                        return Ok(Some(q));
                    }
                }
            }
            Ok(None)
        }
        (QuotientFamily::Congruence, Group::Heisenberg(l)) => {
            let mut m = 1u64;
            loop {
                let q = Quotient::Congruence { l: *l, m };
                if q.index() > max_index {
                    return Ok(None);
                }
                if q.avoids(&b) {
                    return Ok(Some(q));
                }
                m += 1;
            }
        }
        (f, g) => Err(Error::Unsupported(format!("{f:?} quotients of {g}"))),
    }
}

/// Full residual finiteness growth: exact for Z^d, an upper bound for the Heisenberg
/// congruence search, unknown when the index cap is reached.
pub fn full_rf_growth(g: &Group, n: usize, family: QuotientFamily, max_index: u64) -> Result<ProfilePoint> {
    let found = least_quotient(g, n, family, max_index)?;
    let Some(q) = found else {
        return Ok(ProfilePoint::new(n, PointValue::Unknown, Provenance::lower("index cap")));
    };
    let prov = match family {
        QuotientFamily::Lattices => Provenance::exact("sublattice enumeration"),
        QuotientFamily::Congruence => Provenance::upper("congruence quotient"),
    };
    Ok(ProfilePoint::new(n, PointValue::Finite(q.index()), prov).with_certificate(json!({ "quotient": format!("{q:?}") })))
}
