//! Exact linear algebra over prime fields and the rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt::Debug;

pub trait Field {
    type E: Clone + PartialEq + Debug;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn from_i64(&self, x: i64) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    /// Multiplicative inverse; panics on zero.
    fn inv(&self, a: &Self::E) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn neg(&self, a: &Self::E) -> Self::E {
        self.sub(&self.zero(), a)
    }
}

/// The prime field F_p.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp(pub u64);

impl Field for Fp {
    type E = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.0
    }
    fn from_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.0 as i64) as u64
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.0 as u128) as u64
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + self.0 as u128 - *b as u128) % self.0 as u128) as u64
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.0 as u128) as u64
    }
    fn inv(&self, a: &u64) -> u64 {
        assert!(*a != 0, "inverse of zero");
        // Fermat
        let mut base = *a;
        let mut e = self.0 - 2;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
}

/// The rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Q;

impl Field for Q {
    type E = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, x: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(x))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        assert!(!a.is_zero(), "inverse of zero");
        a.recip()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub type Mat<E> = Vec<Vec<E>>;

pub fn identity<F: Field>(f: &F, k: usize) -> Mat<F::E> {
    (0..k).map(|i| (0..k).map(|j| if i == j { f.one() } else { f.zero() }).collect()).collect()
}

pub fn mat_mul<F: Field>(f: &F, a: &Mat<F::E>, b: &Mat<F::E>) -> Mat<F::E> {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![f.zero(); m]; n];
    for i in 0..n {
        for (t, bt) in b.iter().enumerate() {
            if f.is_zero(&a[i][t]) {
                continue;
            }
            for j in 0..m {
                out[i][j] = f.add(&out[i][j], &f.mul(&a[i][t], &bt[j]));
            }
        }
    }
    out
}

pub fn mat_sub<F: Field>(f: &F, a: &Mat<F::E>, b: &Mat<F::E>) -> Mat<F::E> {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| f.sub(x, y)).collect()).collect()
}

/// Rank by Gaussian elimination.
pub fn rank<F: Field>(f: &F, mut m: Mat<F::E>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !f.is_zero(&m[i][c])) else { continue };
        m.swap(r, p);
        let inv = f.inv(&m[r][c]);
        for i in r + 1..rows {
            if f.is_zero(&m[i][c]) {
                continue;
            }
            let factor = f.mul(&m[i][c], &inv);
            for j in c..cols {
                let t = f.mul(&factor, &m[r][j]);
                m[i][j] = f.sub(&m[i][j], &t);
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Rank of a rational matrix: fraction-free elimination in i128, falling back to exact
/// rational elimination if an intermediate value overflows.
pub fn rank_q(m: &Mat<BigRational>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut ints: Vec<Vec<i128>> = Vec::with_capacity(rows);
    for row in m {
        let mut l = BigInt::one();
        for x in row {
            l = num_integer::Integer::lcm(&l, x.denom());
        }
        let mut out = Vec::with_capacity(cols);
        for x in row {
            let v = x.numer() * (&l / x.denom());
            match i128::try_from(v) {
                Ok(v) => out.push(v),
                Err(_) => return rank(&Q, m.clone()),
            }
        }
        ints.push(out);
    }
    match bareiss_rank(ints) {
        Some(r) => r,
        None => rank(&Q, m.clone()),
    }
}

fn bareiss_rank(mut m: Vec<Vec<i128>>) -> Option<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    let mut prev: i128 = 1;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = m[r][c].checked_mul(m[i][j])?.checked_sub(m[i][c].checked_mul(m[r][j])?)?;
                m[i][j] = v / prev;
            }
            m[i][c] = 0;
        }
        prev = m[r][c];
        r += 1;
        if r == rows {
            break;
        }
    }
    Some(r)
}

pub fn inverse<F: Field>(f: &F, m: &Mat<F::E>) -> Option<Mat<F::E>> {
    let k = m.len();
    let mut a: Mat<F::E> = m.clone();
    let mut b = identity(f, k);
    for c in 0..k {
        let p = (c..k).find(|&i| !f.is_zero(&a[i][c]))?;
        a.swap(c, p);
        b.swap(c, p);
        let inv = f.inv(&a[c][c]);
        for j in 0..k {
            a[c][j] = f.mul(&a[c][j], &inv);
            b[c][j] = f.mul(&b[c][j], &inv);
        }
        for i in 0..k {
            if i == c || f.is_zero(&a[i][c]) {
                continue;
            }
            let factor = a[i][c].clone();
            for j in 0..k {
                let t = f.mul(&factor, &a[c][j]);
                a[i][j] = f.sub(&a[i][j], &t);
                let t = f.mul(&factor, &b[c][j]);
                b[i][j] = f.sub(&b[i][j], &t);
            }
        }
    }
    Some(b)
}

// Polynomials are coefficient vectors, lowest degree first, without trailing zeros.

fn trim<F: Field>(f: &F, mut p: Vec<F::E>) -> Vec<F::E> {
    while p.last().is_some_and(|x| f.is_zero(x)) {
        p.pop();
    }
    p
}

fn poly_sub_scaled<F: Field>(f: &F, a: &[F::E], q: &[F::E], b: &[F::E]) -> Vec<F::E> {
    // a - q * b
    let mut out: Vec<F::E> = a.to_vec();
    let need = if q.is_empty() || b.is_empty() { 0 } else { q.len() + b.len() - 1 };
    if out.len() < need {
        out.resize(need, f.zero());
    }
    for (i, x) in q.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            let t = f.mul(x, y);
            out[i + j] = f.sub(&out[i + j], &t);
        }
    }
    trim(f, out)
}

fn poly_add<F: Field>(f: &F, a: &[F::E], b: &[F::E]) -> Vec<F::E> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => f.add(x, y),
            (Some(x), None) | (None, Some(x)) => x.clone(),
            (None, None) => unreachable!(),
        })
        .collect();
    trim(f, out)
}

fn poly_divrem<F: Field>(f: &F, a: &[F::E], b: &[F::E]) -> (Vec<F::E>, Vec<F::E>) {
    assert!(!b.is_empty(), "division by the zero polynomial");
    let mut r: Vec<F::E> = a.to_vec();
    if r.len() < b.len() {
        return (vec![], r);
    }
    let lead_inv = f.inv(b.last().unwrap());
    let mut q = vec![f.zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let coef = f.mul(r.last().unwrap(), &lead_inv);
        for (j, y) in b.iter().enumerate() {
            let t = f.mul(&coef, y);
            r[shift + j] = f.sub(&r[shift + j], &t);
        }
        q[shift] = coef;
        r.pop();
        r = trim(f, r);
    }
    (trim(f, q), r)
}

/// Number of non-constant invariant factors of xI - M, computed by a Smith normal form over K[x].
/// This equals the largest geometric multiplicity of an eigenvalue of M over the algebraic closure.
pub fn max_geometric_multiplicity<F: Field>(f: &F, m: &Mat<F::E>) -> usize {
    let k = m.len();
    let mut p: Vec<Vec<Vec<F::E>>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let mut poly = vec![f.neg(&m[i][j])];
                    if i == j {
                        poly.push(f.one());
                    }
                    trim(f, poly)
                })
                .collect()
        })
        .collect();
    let mut count = 0;
    for t in 0..k {
        loop {
            let mut best: Option<(usize, usize, usize)> = None;
            for (i, row) in p.iter().enumerate().skip(t) {
                for (j, e) in row.iter().enumerate().skip(t) {
                    if !e.is_empty() && best.is_none_or(|(d, _, _)| e.len() < d) {
                        best = Some((e.len(), i, j));
                    }
                }
            }
            let (_, bi, bj) = best.expect("xI - M is nonsingular");
            p.swap(t, bi);
            for row in p.iter_mut() {
                row.swap(t, bj);
            }
            let pivot = p[t][t].clone();
            let mut clean = true;
            for i in t + 1..k {
                if p[i][t].is_empty() {
                    continue;
                }
                let (q, r) = poly_divrem(f, &p[i][t], &pivot);
                for j in t..k {
                    let v = poly_sub_scaled(f, &p[i][j], &q, &p[t][j]);
                    p[i][j] = v;
                }
                if !r.is_empty() {
                    clean = false;
                }
            }
            for j in t + 1..k {
                if p[t][j].is_empty() {
                    continue;
                }
                let (q, r) = poly_divrem(f, &p[t][j], &pivot);
                for i in t..k {
                    let v = poly_sub_scaled(f, &p[i][j], &q, &p[i][t]);
                    p[i][j] = v;
                }
                if !r.is_empty() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let mut bad_row = None;
            'scan: for i in t + 1..k {
                for j in t + 1..k {
                    if !p[i][j].is_empty() && !poly_divrem(f, &p[i][j], &pivot).1.is_empty() {
                        bad_row = Some(i);
                        break 'scan;
                    }
                }
            }
            match bad_row {
                Some(i) => {
                    for j in t..k {
                        let v = poly_add(f, &p[t][j], &p[i][j]);
                        p[t][j] = v;
                    }
                }
                None => break,
            }
        }
        if p[t][t].len() >= 2 {
            count += 1;
        }
    }
    count
}

pub fn format_q(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let d: BigInt = b.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(a.trim().parse().ok()?, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

pub fn abs_q(x: &BigRational) -> BigRational {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp_mat(p: u64, rows: &[&[i64]]) -> Mat<u64> {
        let f = Fp(p);
        rows.iter().map(|r| r.iter().map(|&x| f.from_i64(x)).collect()).collect()
    }

    fn q_mat(rows: &[&[i64]]) -> Mat<BigRational> {
        rows.iter().map(|r| r.iter().map(|&x| Q.from_i64(x)).collect()).collect()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&Fp(2), fp_mat(2, &[&[1, 1], &[1, 1]])), 1);
        assert_eq!(rank(&Fp(3), fp_mat(3, &[&[1, 2], &[2, 1]])), 1);
        assert_eq!(rank(&Fp(5), fp_mat(5, &[&[1, 2], &[2, 1]])), 2);
        let m = q_mat(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        assert_eq!(rank_q(&m), 2);
        assert_eq!(rank(&Q, m), 2);
    }

    #[test]
    fn inverse_round_trip() {
        let f = Fp(7);
        let m = fp_mat(7, &[&[1, 2, 0], &[3, 1, 4], &[0, 5, 6]]);
        let inv = inverse(&f, &m).unwrap();
        assert_eq!(mat_mul(&f, &m, &inv), identity(&f, 3));
        assert!(inverse(&Q, &q_mat(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn geometric_multiplicity_examples() {
        // identity: one eigenvalue with multiplicity k
        assert_eq!(max_geometric_multiplicity(&Q, &identity(&Q, 4)), 4);
        // single Jordan block
        assert_eq!(max_geometric_multiplicity(&Q, &q_mat(&[&[2, 1, 0], &[0, 2, 1], &[0, 0, 2]])), 1);
        // diag(1,1,2): eigenvalue 1 twice
        assert_eq!(max_geometric_multiplicity(&Q, &q_mat(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 2]])), 2);
        // rotation by 90 degrees twice: eigenvalues +-i, each with multiplicity 2
        let r = q_mat(&[&[0, -1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, -1], &[0, 0, 1, 0]]);
        assert_eq!(max_geometric_multiplicity(&Q, &r), 2);
        // over F_2 the same matrix is the permutation (0 1)(2 3), eigenvalue 1 with multiplicity 2
        assert_eq!(max_geometric_multiplicity(&Fp(2), &fp_mat(2, &[&[0, 1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 1, 0]])), 2);
    }

    #[test]
    fn rational_strings() {
        let x = parse_q("-3/6").unwrap();
        assert_eq!(format_q(&x), "-1/2");
        assert!(parse_q("1/0").is_none());
        assert_eq!(format_q(&parse_q("4").unwrap()), "4");
    }
}
