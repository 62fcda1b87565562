use crate::error::{Error, Result};
use crate::targets::{Dist, Family, Target, DEFAULT_MARGIN};

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaReport {
    pub max_defect: Dist,
    /// Index of the relator attaining the maximum.
    pub worst: Option<usize>,
    pub pass: bool,
}

/// Evaluates each relator (a word over +-1..+-m) at the tuple and compares the largest distance
/// to the identity with delta, strictly.
pub fn check_delta_solution(family: &Family, relators: &[Vec<i32>], tuple: &[Target], delta: Dist) -> Result<DeltaReport> {
    let m = tuple.len();
    if m == 0 {
        return Err(Error::Invalid("empty tuple".into()));
    }
    if let Some(l) = relators.iter().flatten().find(|l| **l == 0 || l.unsigned_abs() as usize > m) {
        return Err(Error::Invalid(format!("letter {l} does not match arity {m}")));
    }
    let inv: Vec<Target> = tuple.iter().map(Target::inverse).collect::<Result<_>>()?;
    let e = tuple[0].identity_like();
    let mut max_defect = Dist::zero();
    let mut worst = None;
    for (ri, r) in relators.iter().enumerate() {
        let mut t = e.clone();
        for &l in r {
            let x = if l > 0 { &tuple[l as usize - 1] } else { &inv[(-l) as usize - 1] };
            t = t.mul(x)?;
        }
        let d = family.distance(&t, &e)?;
        if worst.is_none() || d.cmp_value(&max_defect).is_gt() {
            max_defect = d;
            worst = Some(ri);
        }
    }
    let pass = max_defect.lt(&delta, DEFAULT_MARGIN);
    Ok(DeltaReport { max_defect, worst, pass })
}
