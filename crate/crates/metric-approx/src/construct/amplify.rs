use super::{accept, require_input, Built};
use crate::certify::Trace;
use crate::error::{Error, Result};
use crate::targets::{Family, TensorPower, Target, Unitary};
use serde_json::json;

/// Smallest n for which the amplification estimate applies: ceil(1 / (4 sqrt 2 / 5 - 1)).
pub const AMPLIFICATION_MIN_N: usize = 8;

/// The tensor power l = ceil(log(1/delta) / log(5/4)) with delta = sqrt2/(20n) - 1/(200n^2).
pub fn amplification_power(n: usize) -> Result<u32> {
    if n < AMPLIFICATION_MIN_N {
        return Err(Error::Invalid(format!("amplification needs n >= {AMPLIFICATION_MIN_N}, got {n}")));
    }
    let nf = n as f64;
    let delta = std::f64::consts::SQRT_2 / (20.0 * nf) - 1.0 / (200.0 * nf * nf);
    Ok(((1.0 / delta).ln() / 1.25f64.ln()).ceil() as u32)
}

/// Projective certificate at n from a hyperlinear one passing at 40n: g maps to the l-th tensor
/// power of sigma(g) ⊕ I. Tensor powers stay implicit; distances come from trace powers.
pub fn amplify_projective(c: &crate::certify::ApproxCertificate, n: usize) -> Result<Built> {
    if c.family != Family::Hyp {
        return Err(Error::FamilyMismatch(format!("amplification needs a hyp certificate, got {}", c.family)));
    }
    let l = amplification_power(n)?;
    require_input(c, 40 * n, "hyperlinear input")?;
    let r = c.restrict(n)?;
    let out = r.map_targets(Family::HypProjective, |t| match t {
        Target::Unitary(u) => Ok(Target::Tensor(TensorPower::new(u.block_sum(&Unitary::identity(u.dim())), l))),
        other => Err(Error::KindMismatch(format!("{} target in a hyp certificate", other.kind()))),
    })?;
    let dim = out.dimension;
    let inputs = c.provenance.iter().cloned().collect();
    accept(out.with_trace(Trace::new("amplify", json!({ "power": l, "input_n": c.n }), n, dim).with_inputs(inputs)))
}
