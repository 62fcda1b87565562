//! Certificate builders. Every builder verifies what it produces before returning it.

mod amplify;
mod basic;
mod extension;
mod folner;
mod induce;
mod wreath;

pub use amplify::{amplification_power, amplify_projective, AMPLIFICATION_MIN_N};
pub use basic::{cyclic_z, direct_product, from_quotient, perm_to_hyp, perm_to_lin, regular_representation};
pub use extension::{extend_by_amenable, AmenableQuotient};
pub use folner::{boundary_sum, folner_to_sofic, FolnerWitness};
pub use induce::{coset_action, induce_finite_index, CosetAction};
pub use wreath::{wreath_by_rf, wreath_sofic, WreathSoficReport, DEFAULT_MATERIALIZE_CAP};

use crate::certify::{verify_d, ApproxCertificate, Report};
use crate::error::{Error, Result};

/// A certificate together with the report that accepted it.
#[derive(Clone, Debug)]
pub struct Built {
    pub certificate: ApproxCertificate,
    pub report: Report,
}

pub(crate) fn accept(c: ApproxCertificate) -> Result<Built> {
    let report = verify_d(&c)?;
    if !report.pass {
        let builder = c.provenance.as_ref().map_or("builder", |t| t.builder.as_str()).to_string();
        return Err(Error::VerificationFailed(format!(
            "{builder} at n = {}: defect {} (witness {:?}), separation {:?} (witness {:?})",
            c.n,
            report.defect,
            report.defect_witness,
            report.separation.map(|s| s.to_string()),
            report.separation_witness
        )));
    }
    Ok(Built { certificate: c, report })
}

/// Requires an input certificate to pass at radius at least `need`.
pub(crate) fn require_input(c: &ApproxCertificate, need: usize, what: &str) -> Result<Report> {
    if c.n < need {
        return Err(Error::Upstream(format!("{what} is certified at n = {}, needs {need}", c.n)));
    }
    let r = verify_d(c)?;
    if !r.pass {
        return Err(Error::Upstream(format!("{what} fails verification at n = {}", c.n)));
    }
    Ok(r)
}
