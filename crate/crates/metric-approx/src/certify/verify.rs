use super::{ApproxCertificate, Report};
use crate::error::{Error, Result};
use crate::groups::ball;
use crate::groups::Ball;
use crate::targets::{Dimension, Dist, Family, Target, DEFAULT_MARGIN};
use rayon::prelude::*;
use std::cmp::Ordering;

type Worst = Option<(Dist, usize, usize)>;

// Larger value wins; on ties the earlier (i, j) is kept so the witness does not depend on scheduling.
fn keep_max(a: Worst, b: Worst) -> Worst {
    match (a, b) {
        (Some(x), Some(y)) => {
            if y.0.cmp_value(&x.0) == Ordering::Greater || (y.0.cmp_value(&x.0) == Ordering::Equal && (y.1, y.2) < (x.1, x.2)) {
                Some(y)
            } else {
                Some(x)
            }
        }
        (x, None) => x,
        (None, y) => y,
    }
}

fn keep_min(a: Worst, b: Worst) -> Worst {
    match (a, b) {
        (Some(x), Some(y)) => {
            if y.0.cmp_value(&x.0) == Ordering::Less || (y.0.cmp_value(&x.0) == Ordering::Equal && (y.1, y.2) < (x.1, x.2)) {
                Some(y)
            } else {
                Some(x)
            }
        }
        (x, None) => x,
        (None, y) => y,
    }
}

fn dim_usize(d: Dimension) -> usize {
    d.as_exact().map_or(usize::MAX, |k| k as usize)
}

/// Checks both approximation conditions on the ball of the certificate's radius.
pub fn verify_d(c: &ApproxCertificate) -> Result<Report> {
    verify_d_with(c, DEFAULT_MARGIN)
}

pub fn verify_d_with(c: &ApproxCertificate, margin: f64) -> Result<Report> {
    if c.n == 0 {
        return Err(Error::Invalid("verification radius must be at least 1".into()));
    }
    let g = &c.group;
    let b = ball(g, c.n)?;
    let t: Vec<&Target> = b
        .elements
        .iter()
        .map(|x| c.get(x).ok_or_else(|| Error::MissingAssignment(g.normal_form(x))))
        .collect::<Result<_>>()?;
    for x in &t {
        let d = x.dimension()?;
        if d != c.dimension {
            return Err(Error::DimensionMismatch(dim_usize(d), dim_usize(c.dimension)));
        }
    }
    let m = t.len();
    let fam = &c.family;
    let in_range = |x: &&Target| match x {
        Target::Perm(p) => p.0.iter().all(|&v| (v as usize) < p.0.len()),
        _ => false,
    };
    if matches!(fam, Family::Sofic) && t.iter().all(in_range) {
        let perms: Vec<&[u32]> = t.iter().map(|x| if let Target::Perm(p) = x { &p.0[..] } else { unreachable!() }).collect();
        return Ok(sofic_fast(c, &b, &perms, margin));
    }

    let rows: Vec<(Worst, usize)> = (0..m)
        .into_par_iter()
        .map(|i| -> Result<(Worst, usize)> {
            let mut worst: Worst = None;
            let mut count = 0;
            for j in 0..m {
                let gh = g.mul(&b.elements[i], &b.elements[j]);
                if let Some(k) = b.index_of(&gh) {
                    let d = fam.distance(&t[i].mul(t[j])?, t[k])?;
                    count += 1;
                    worst = keep_max(worst, Some((d, i, j)));
                }
            }
            Ok((worst, count))
        })
        .collect::<Result<_>>()?;
    let mut defect: Worst = None;
    let mut checked_defect = 0;
    for (w, n) in rows {
        defect = keep_max(defect, w);
        checked_defect += n;
    }

    let rows: Vec<Worst> = (0..m)
        .into_par_iter()
        .map(|i| -> Result<Worst> {
            let mut worst: Worst = None;
            for j in i + 1..m {
                worst = keep_min(worst, Some((fam.distance(t[i], t[j])?, i, j)));
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    let sep = rows.into_iter().fold(None, keep_min);

    let nf = |i: usize| g.normal_form(&b.elements[i]);
    let (dval, dwit) = match defect {
        Some((d, i, j)) => (d, vec![nf(i), nf(j), g.normal_form(&g.mul(&b.elements[i], &b.elements[j]))]),
        None => (Dist::zero(), vec![]),
    };
    let inv_n = Dist::ratio(1, c.n as i64);
    Ok(Report {
        pass: false,
        defect: dval,
        defect_witness: dwit,
        separation: sep.map(|s| s.0),
        separation_witness: sep.map_or(vec![], |(_, i, j)| vec![nf(i), nf(j)]),
        defect_threshold: inv_n,
        separation_threshold: c.epsilon.sub(inv_n),
        margin,
        checked_defect,
        checked_separation: m * (m - 1) / 2,
    }
    .finish())
}

// Counts positions where a(b(x)) != c(x). Every entry of b must be below a.len().
fn composed_disagreements(a: &[u32], b: &[u32], c: &[u32]) -> usize {
    debug_assert!(b.iter().all(|&x| (x as usize) < a.len()));
    #[cfg(target_arch = "x86_64")]
    {
        if a.len() < i32::MAX as usize && is_x86_feature_detected!("avx2") {
            // SAFETY: avx2 is available and the caller guarantees the entries of b index into a
            return unsafe { composed_disagreements_avx2(a, b, c) };
        }
    }
    let mut count = 0usize;
    for (&bx, &cx) in b.iter().zip(c) {
        // SAFETY: entries of b were checked to be in range by the caller
        let ax = unsafe { *a.get_unchecked(bx as usize) };
        count += (ax != cx) as usize;
    }
    count
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn composed_disagreements_avx2(a: &[u32], b: &[u32], c: &[u32]) -> usize {
    use std::arch::x86_64::*;
    let n = b.len().min(c.len());
    let mut equal = _mm256_setzero_si256();
    let mut x = 0;
    while x + 8 <= n {
        let idx = _mm256_loadu_si256(b.as_ptr().add(x) as *const __m256i);
        let ab = _mm256_i32gather_epi32::<4>(a.as_ptr() as *const i32, idx);
        let cv = _mm256_loadu_si256(c.as_ptr().add(x) as *const __m256i);
        // lanes that agree are -1
        equal = _mm256_sub_epi32(equal, _mm256_cmpeq_epi32(ab, cv));
        x += 8;
    }
    let mut lanes = [0u32; 8];
    _mm256_storeu_si256(lanes.as_mut_ptr() as *mut __m256i, equal);
    let mut same: usize = lanes.iter().map(|&v| v as usize).sum();
    for y in x..n {
        same += (a[b[y] as usize] == c[y]) as usize;
    }
    n - same
}

fn plain_disagreements(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x != y) as usize).sum()
}

// Same sweep for permutation targets, working on raw image arrays and integer counts.
fn sofic_fast(c: &ApproxCertificate, b: &Ball, perms: &[&[u32]], margin: f64) -> Report {
    let g = &c.group;
    let m = perms.len();
    let k = perms[0].len() as i64;
    let rows: Vec<(Option<(usize, usize, usize)>, usize)> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut worst: Option<(usize, usize, usize)> = None;
            let mut count = 0;
            for j in 0..m {
                if let Some(kk) = b.index_of(&g.mul(&b.elements[i], &b.elements[j])) {
                    count += 1;
                    let d = composed_disagreements(perms[i], perms[j], perms[kk]);
                    if worst.is_none_or(|w| d > w.0) {
                        worst = Some((d, i, j));
                    }
                }
            }
            (worst, count)
        })
        .collect();
    let mut defect: Option<(usize, usize, usize)> = None;
    let mut checked_defect = 0;
    for (w, n) in rows {
        checked_defect += n;
        if let Some(w) = w {
            if defect.is_none_or(|d| w.0 > d.0) {
                defect = Some(w);
            }
        }
    }
    let sep: Option<(usize, usize, usize)> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut best: Option<(usize, usize, usize)> = None;
            for j in i + 1..m {
                let d = plain_disagreements(perms[i], perms[j]);
                if best.is_none_or(|w| d < w.0) {
                    best = Some((d, i, j));
                }
            }
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .fold(None, |acc: Option<(usize, usize, usize)>, w| if acc.is_none_or(|a| w.0 < a.0) { Some(w) } else { acc });
    let nf = |i: usize| g.normal_form(&b.elements[i]);
    let (dval, dwit) = match defect {
        Some((d, i, j)) => (
            Dist::ratio(d as i64, k),
            vec![nf(i), nf(j), g.normal_form(&g.mul(&b.elements[i], &b.elements[j]))],
        ),
        None => (Dist::zero(), vec![]),
    };
    let inv_n = Dist::ratio(1, c.n as i64);
    Report {
        pass: false,
        defect: dval,
        defect_witness: dwit,
        separation: sep.map(|s| Dist::ratio(s.0 as i64, k)),
        separation_witness: sep.map_or(vec![], |(_, i, j)| vec![nf(i), nf(j)]),
        defect_threshold: inv_n,
        separation_threshold: c.epsilon.sub(inv_n),
        margin,
        checked_defect,
        checked_separation: m * (m - 1) / 2,
    }
    .finish()
}
