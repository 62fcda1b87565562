use super::field::{self, Field, Fp, Mat, Q};
use super::perm::Perm;
use crate::error::{Error, Result};
use num_rational::{BigRational, Ratio};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Fp(u64),
    Q,
}

impl FieldKind {
    pub fn to_json(&self) -> Value {
        match self {
            FieldKind::Fp(p) => json!({ "Fp": p }),
            FieldKind::Q => json!("Q"),
        }
    }

    pub fn from_json(v: &Value) -> Result<FieldKind> {
        if v.as_str() == Some("Q") {
            return Ok(FieldKind::Q);
        }
        let p = v
            .get("Fp")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Invalid(format!("bad field tag {v}")))?;
        FieldKind::fp(p)
    }

    pub fn fp(p: u64) -> Result<FieldKind> {
        if p > u32::MAX as u64 || !field::is_prime(p) {
            return Err(Error::Invalid(format!("{p} is not a supported prime")));
        }
        Ok(FieldKind::Fp(p))
    }

    /// Parses "Q", "F2", "F_7" or a bare prime.
    pub fn parse(s: &str) -> Result<FieldKind> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("q") {
            return Ok(FieldKind::Q);
        }
        let digits = t.trim_start_matches(['F', 'f']).trim_start_matches('_');
        let p = digits.parse().map_err(|_| Error::Invalid(format!("unknown field {s}")))?;
        FieldKind::fp(p)
    }
}

impl std::fmt::Display for FieldKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FieldKind::Fp(p) => write!(f, "F{p}"),
            FieldKind::Q => write!(f, "Q"),
        }
    }
}

/// Invertible k x k matrix over F_p or Q.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RankMatrix {
    Fp { p: u64, rows: Mat<u64> },
    Q { rows: Mat<BigRational> },
}

impl RankMatrix {
    pub fn identity(field: FieldKind, k: usize) -> RankMatrix {
        match field {
            FieldKind::Fp(p) => RankMatrix::Fp { p, rows: field::identity(&Fp(p), k) },
            FieldKind::Q => RankMatrix::Q { rows: field::identity(&Q, k) },
        }
    }

    /// Permutation matrix with entry (i, j) = 1 iff sigma(j) = i.
    pub fn from_perm(sigma: &Perm, field: FieldKind) -> RankMatrix {
        let k = sigma.degree();
        let mut m = RankMatrix::zeros(field, k);
        for j in 0..k {
            m.set_one(sigma.apply(j), j);
        }
        m
    }

    fn zeros(field: FieldKind, k: usize) -> RankMatrix {
        match field {
            FieldKind::Fp(p) => RankMatrix::Fp { p, rows: vec![vec![0; k]; k] },
            FieldKind::Q => RankMatrix::Q { rows: vec![vec![Q.zero(); k]; k] },
        }
    }

    fn set_one(&mut self, i: usize, j: usize) {
        match self {
            RankMatrix::Fp { rows, .. } => rows[i][j] = 1,
            RankMatrix::Q { rows } => rows[i][j] = Q.one(),
        }
    }

    /// Builds a matrix from integer entries, rejecting singular input.
    pub fn from_i64(field: FieldKind, rows: &[Vec<i64>]) -> Result<RankMatrix> {
        let m = match field {
            FieldKind::Fp(p) => {
                let f = Fp(p);
                RankMatrix::Fp { p, rows: rows.iter().map(|r| r.iter().map(|&x| f.from_i64(x)).collect()).collect() }
            }
            FieldKind::Q => RankMatrix::Q { rows: rows.iter().map(|r| r.iter().map(|&x| Q.from_i64(x)).collect()).collect() },
        };
        m.check()?;
        Ok(m)
    }

    fn check(&self) -> Result<()> {
        let k = self.dim();
        let square = match self {
            RankMatrix::Fp { rows, .. } => rows.iter().all(|r| r.len() == k),
            RankMatrix::Q { rows } => rows.iter().all(|r| r.len() == k),
        };
        if !square {
            return Err(Error::Invalid("matrix is not square".into()));
        }
        if self.rank() != k {
            return Err(Error::Singular);
        }
        Ok(())
    }

    pub fn field(&self) -> FieldKind {
        match self {
            RankMatrix::Fp { p, .. } => FieldKind::Fp(*p),
            RankMatrix::Q { .. } => FieldKind::Q,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            RankMatrix::Fp { rows, .. } => rows.len(),
            RankMatrix::Q { rows } => rows.len(),
        }
    }

    fn rank(&self) -> usize {
        match self {
            RankMatrix::Fp { p, rows } => field::rank(&Fp(*p), rows.clone()),
            RankMatrix::Q { rows } => field::rank_q(rows),
        }
    }

    fn same(&self, other: &RankMatrix) -> Result<()> {
        if self.field() != other.field() {
            return Err(Error::FieldMismatch);
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(())
    }

    pub fn mul(&self, other: &RankMatrix) -> Result<RankMatrix> {
        self.same(other)?;
        Ok(match (self, other) {
            (RankMatrix::Fp { p, rows: a }, RankMatrix::Fp { rows: b, .. }) => {
                RankMatrix::Fp { p: *p, rows: field::mat_mul(&Fp(*p), a, b) }
            }
            (RankMatrix::Q { rows: a }, RankMatrix::Q { rows: b }) => RankMatrix::Q { rows: field::mat_mul(&Q, a, b) },
            _ => unreachable!(),
        })
    }

    pub fn inverse(&self) -> Result<RankMatrix> {
        match self {
            RankMatrix::Fp { p, rows } => {
                Ok(RankMatrix::Fp { p: *p, rows: field::inverse(&Fp(*p), rows).ok_or(Error::Singular)? })
            }
            RankMatrix::Q { rows } => Ok(RankMatrix::Q { rows: field::inverse(&Q, rows).ok_or(Error::Singular)? }),
        }
    }

    /// Multiplies by the scalar lambda (taken modulo p over F_p).
    pub fn scale(&self, lambda: i64) -> RankMatrix {
        match self {
            RankMatrix::Fp { p, rows } => {
                let f = Fp(*p);
                let l = f.from_i64(lambda);
                RankMatrix::Fp { p: *p, rows: rows.iter().map(|r| r.iter().map(|x| f.mul(x, &l)).collect()).collect() }
            }
            RankMatrix::Q { rows } => {
                let l = Q.from_i64(lambda);
                RankMatrix::Q { rows: rows.iter().map(|r| r.iter().map(|x| x * &l).collect()).collect() }
            }
        }
    }

    /// rank(a - b) / k.
    pub fn rank_distance(&self, other: &RankMatrix) -> Result<Ratio<i64>> {
        self.same(other)?;
        let k = self.dim();
        let r = match (self, other) {
            (RankMatrix::Fp { p, rows: a }, RankMatrix::Fp { rows: b, .. }) => {
                let f = Fp(*p);
                field::rank(&f, field::mat_sub(&f, a, b))
            }
            (RankMatrix::Q { rows: a }, RankMatrix::Q { rows: b }) => field::rank_q(&field::mat_sub(&Q, a, b)),
            _ => unreachable!(),
        };
        Ok(Ratio::new(r as i64, k.max(1) as i64))
    }

    /// min over scalars lambda in the algebraic closure of rank(a - lambda b) / k, which is
    /// (k - largest geometric multiplicity of an eigenvalue of b^-1 a) / k.
    pub fn projective_rank_distance(&self, other: &RankMatrix) -> Result<Ratio<i64>> {
        self.same(other)?;
        let k = self.dim();
        let m = other.inverse()?.mul(self)?;
        let g = match &m {
            RankMatrix::Fp { p, rows } => field::max_geometric_multiplicity(&Fp(*p), rows),
            RankMatrix::Q { rows } => field::max_geometric_multiplicity(&Q, rows),
        };
        Ok(Ratio::new((k - g) as i64, k.max(1) as i64))
    }

    pub fn block_sum(&self, other: &RankMatrix) -> Result<RankMatrix> {
        if self.field() != other.field() {
            return Err(Error::FieldMismatch);
        }
        fn sum<E: Clone>(a: &Mat<E>, b: &Mat<E>, zero: E) -> Mat<E> {
            let (m, q) = (a.len(), b.len());
            let mut out = vec![vec![zero; m + q]; m + q];
            for i in 0..m {
                out[i][..m].clone_from_slice(&a[i]);
            }
            for i in 0..q {
                out[m + i][m..].clone_from_slice(&b[i]);
            }
            out
        }
        Ok(match (self, other) {
            (RankMatrix::Fp { p, rows: a }, RankMatrix::Fp { rows: b, .. }) => RankMatrix::Fp { p: *p, rows: sum(a, b, 0) },
            (RankMatrix::Q { rows: a }, RankMatrix::Q { rows: b }) => RankMatrix::Q { rows: sum(a, b, Q.zero()) },
            _ => unreachable!(),
        })
    }

    /// Kronecker product, indexing pairs (i, j) as i * q + j.
    pub fn kron(&self, other: &RankMatrix) -> Result<RankMatrix> {
        if self.field() != other.field() {
            return Err(Error::FieldMismatch);
        }
        fn kr<F: Field>(f: &F, a: &Mat<F::E>, b: &Mat<F::E>) -> Mat<F::E> {
            let (m, q) = (a.len(), b.len());
            let mut out = vec![vec![f.zero(); m * q]; m * q];
            for i in 0..m {
                for j in 0..m {
                    for s in 0..q {
                        for t in 0..q {
                            out[i * q + s][j * q + t] = f.mul(&a[i][j], &b[s][t]);
                        }
                    }
                }
            }
            out
        }
        Ok(match (self, other) {
            (RankMatrix::Fp { p, rows: a }, RankMatrix::Fp { rows: b, .. }) => {
                RankMatrix::Fp { p: *p, rows: kr(&Fp(*p), a, b) }
            }
            (RankMatrix::Q { rows: a }, RankMatrix::Q { rows: b }) => RankMatrix::Q { rows: kr(&Q, a, b) },
            _ => unreachable!(),
        })
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<String> = match self {
            RankMatrix::Fp { rows, .. } => rows.iter().flatten().map(|x| x.to_string()).collect(),
            RankMatrix::Q { rows } => rows.iter().flatten().map(field::format_q).collect(),
        };
        json!({ "field": self.field().to_json(), "k": self.dim(), "entries": entries })
    }

    pub fn from_json(v: &Value) -> Result<RankMatrix> {
        let bad = || Error::Invalid(format!("bad rank matrix {v}"));
        let field = FieldKind::from_json(v.get("field").ok_or_else(bad)?)?;
        let entries: Vec<&str> = v
            .get("entries")
            .and_then(Value::as_array)
            .ok_or_else(bad)?
            .iter()
            .map(|e| e.as_str().ok_or_else(bad))
            .collect::<Result<_>>()?;
        let k = (entries.len() as f64).sqrt().round() as usize;
        if k * k != entries.len() || v.get("k").and_then(Value::as_u64).is_some_and(|x| x as usize != k) {
            return Err(bad());
        }
        let m = match field {
            FieldKind::Fp(p) => {
                let mut vals = Vec::with_capacity(k * k);
                for s in &entries {
                    let x: u64 = s.trim().parse().map_err(|_| bad())?;
                    if x >= p {
                        return Err(bad());
                    }
                    vals.push(x);
                }
                RankMatrix::Fp { p, rows: vals.chunks(k.max(1)).map(<[u64]>::to_vec).take(k).collect() }
            }
            FieldKind::Q => {
                let vals: Vec<BigRational> = entries.iter().map(|s| field::parse_q(s).ok_or_else(bad)).collect::<Result<_>>()?;
                RankMatrix::Q { rows: vals.chunks(k.max(1)).map(<[BigRational]>::to_vec).take(k).collect() }
            }
        };
        m.check()?;
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_distance_diag() {
        let a = RankMatrix::identity(FieldKind::Q, 2);
        let b = RankMatrix::from_i64(FieldKind::Q, &[vec![1, 0], vec![0, -1]]).unwrap();
        assert_eq!(a.rank_distance(&b).unwrap(), Ratio::new(1, 2));
    }

    #[test]
    fn projective_kills_scalars() {
        let a = RankMatrix::from_i64(FieldKind::Q, &[vec![1, 2], vec![3, 5]]).unwrap();
        assert_eq!(a.projective_rank_distance(&a.scale(-3)).unwrap(), Ratio::from_integer(0));
        let f = FieldKind::Fp(5);
        let a = RankMatrix::from_i64(f, &[vec![1, 2], vec![3, 0]]).unwrap();
        assert_eq!(a.projective_rank_distance(&a.scale(2)).unwrap(), Ratio::from_integer(0));
    }

    #[test]
    fn permutation_rank_is_degree_minus_cycles() {
        let s = Perm(vec![1, 2, 0, 4, 3, 5]);
        for f in [FieldKind::Q, FieldKind::Fp(2)] {
            let u = RankMatrix::from_perm(&s, f);
            let d = u.rank_distance(&RankMatrix::identity(f, 6)).unwrap();
            assert_eq!(d, Ratio::new(6 - s.cycles() as i64, 6));
        }
    }

    #[test]
    fn singular_rejected_and_json_round_trip() {
        assert_eq!(RankMatrix::from_i64(FieldKind::Q, &[vec![1, 2], vec![2, 4]]), Err(Error::Singular));
        let a = RankMatrix::from_i64(FieldKind::Fp(7), &[vec![1, 2], vec![3, 4]]).unwrap();
        assert_eq!(RankMatrix::from_json(&a.to_json()).unwrap(), a);
        let q = RankMatrix::Q { rows: vec![vec![field::parse_q("1/2").unwrap()]] };
        assert_eq!(RankMatrix::from_json(&q.to_json()).unwrap(), q);
    }
}
