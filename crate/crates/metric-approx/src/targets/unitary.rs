use super::perm::Perm;
use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::Rng;

pub const DEFAULT_UNITARY_TOL: f64 = 1e-9;
/// Largest dimension for which tensor powers are ever written out entry by entry.
pub const MATERIALIZE_CAP: usize = 1 << 10;

#[derive(Clone, Debug, PartialEq)]
enum Repr {
    Perm(Perm),
    Dense(Vec<Complex64>),
}

/// k x k unitary matrix. Permutation matrices are kept in compressed form.
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary {
    k: usize,
    repr: Repr,
    pub tol: f64,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl Unitary {
    pub fn identity(k: usize) -> Unitary {
        Unitary::from_perm(&Perm::identity(k))
    }

    /// Permutation matrix u_s with u_s e_j = e_{s(j)}.
    pub fn from_perm(p: &Perm) -> Unitary {
        Unitary { k: p.degree(), repr: Repr::Perm(p.clone()), tol: DEFAULT_UNITARY_TOL }
    }

    pub fn from_dense(k: usize, entries: Vec<Complex64>, tol: f64) -> Result<Unitary> {
        if entries.len() != k * k {
            return Err(Error::DimensionMismatch(entries.len(), k * k));
        }
        let u = Unitary { k, repr: Repr::Dense(entries), tol };
        let dev = u.deviation();
        if dev > tol {
            return Err(Error::NotUnitary(dev));
        }
        Ok(u)
    }

    /// Random unitary from Gram-Schmidt on complex Gaussian columns.
    pub fn random<R: Rng>(k: usize, rng: &mut R) -> Unitary {
        let mut gauss = || {
            let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
            let u2: f64 = rng.gen();
            (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
        };
        let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(k);
        while cols.len() < k {
            let mut v: Vec<Complex64> = (0..k).map(|_| Complex64::new(gauss(), gauss())).collect();
            for q in &cols {
                let dot: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= dot * y;
                }
            }
            let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-6 {
                cols.push(v.into_iter().map(|x| x / norm).collect());
            }
        }
        let mut e = vec![c(0.0); k * k];
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                e[i * k + j] = *x;
            }
        }
        Unitary { k, repr: Repr::Dense(e), tol: DEFAULT_UNITARY_TOL }
    }

    /// Diagonal matrix of phases exp(i theta_j).
    pub fn phases(thetas: &[f64]) -> Unitary {
        let k = thetas.len();
        let mut e = vec![c(0.0); k * k];
        for (j, t) in thetas.iter().enumerate() {
            e[j * k + j] = Complex64::from_polar(1.0, *t);
        }
        Unitary { k, repr: Repr::Dense(e), tol: DEFAULT_UNITARY_TOL }
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn as_perm(&self) -> Option<&Perm> {
        match &self.repr {
            Repr::Perm(p) => Some(p),
            Repr::Dense(_) => None,
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        match &self.repr {
            Repr::Perm(p) => c(if p.apply(j) == i { 1.0 } else { 0.0 }),
            Repr::Dense(e) => e[i * self.k + j],
        }
    }

    pub fn to_dense(&self) -> Vec<Complex64> {
        match &self.repr {
            Repr::Dense(e) => e.clone(),
            Repr::Perm(_) => (0..self.k * self.k).map(|t| self.entry(t / self.k, t % self.k)).collect(),
        }
    }

    /// max |(U*U - I)_ij|
    pub fn deviation(&self) -> f64 {
        if let Repr::Perm(_) = self.repr {
            return 0.0;
        }
        let p = self.adjoint().mul(self);
        let mut worst: f64 = 0.0;
        for i in 0..self.k {
            for j in 0..self.k {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((p.entry(i, j) - c(target)).norm());
            }
        }
        worst
    }

    pub fn mul(&self, other: &Unitary) -> Unitary {
        assert_eq!(self.k, other.k, "unitary size mismatch");
        let tol = self.tol.max(other.tol);
        let k = self.k;
        match (&self.repr, &other.repr) {
            (Repr::Perm(a), Repr::Perm(b)) => Unitary { k, repr: Repr::Perm(a.compose(b)), tol },
            (Repr::Perm(a), Repr::Dense(b)) => {
                // row j of b moves to row a(j)
                let mut e = vec![c(0.0); k * k];
                for j in 0..k {
                    let r = a.apply(j);
                    e[r * k..r * k + k].copy_from_slice(&b[j * k..j * k + k]);
                }
                Unitary { k, repr: Repr::Dense(e), tol }
            }
            (Repr::Dense(a), Repr::Perm(b)) => {
                // column j of the product is column b(j) of a
                let mut e = vec![c(0.0); k * k];
                for i in 0..k {
                    for j in 0..k {
                        e[i * k + j] = a[i * k + b.apply(j)];
                    }
                }
                Unitary { k, repr: Repr::Dense(e), tol }
            }
            (Repr::Dense(a), Repr::Dense(b)) => {
                let mut e = vec![c(0.0); k * k];
                for i in 0..k {
                    for t in 0..k {
                        let x = a[i * k + t];
                        if x == c(0.0) {
                            continue;
                        }
                        for j in 0..k {
                            e[i * k + j] += x * b[t * k + j];
                        }
                    }
                }
                Unitary { k, repr: Repr::Dense(e), tol }
            }
        }
    }

    pub fn adjoint(&self) -> Unitary {
        let k = self.k;
        match &self.repr {
            Repr::Perm(p) => Unitary { k, repr: Repr::Perm(p.inverse()), tol: self.tol },
            Repr::Dense(a) => {
                let mut e = vec![c(0.0); k * k];
                for i in 0..k {
                    for j in 0..k {
                        e[j * k + i] = a[i * k + j].conj();
                    }
                }
                Unitary { k, repr: Repr::Dense(e), tol: self.tol }
            }
        }
    }

    pub fn trace(&self) -> Complex64 {
        match &self.repr {
            Repr::Perm(p) => c(p.fixed_points() as f64),
            Repr::Dense(a) => (0..self.k).map(|i| a[i * self.k + i]).sum(),
        }
    }

    /// Normalized trace tr(u)/k.
    pub fn tau(&self) -> Complex64 {
        self.trace() / self.k as f64
    }

    /// tau(v* u) without forming the product.
    pub fn tau_against(&self, v: &Unitary) -> Complex64 {
        assert_eq!(self.k, v.k, "unitary size mismatch");
        let k = self.k;
        let s: Complex64 = match (&self.repr, &v.repr) {
            (Repr::Perm(a), Repr::Perm(b)) => c((0..k).filter(|&j| a.apply(j) == b.apply(j)).count() as f64),
            _ => {
                let mut s = c(0.0);
                for i in 0..k {
                    for j in 0..k {
                        s += v.entry(i, j).conj() * self.entry(i, j);
                    }
                }
                s
            }
        };
        s / k as f64
    }

    /// sqrt((1/k) tr((u-v)*(u-v)))
    pub fn hs(&self, v: &Unitary) -> f64 {
        assert_eq!(self.k, v.k, "unitary size mismatch");
        let k = self.k;
        match (&self.repr, &v.repr) {
            (Repr::Perm(a), Repr::Perm(b)) => (2.0 * a.disagreements(b) as f64 / k as f64).sqrt(),
            _ => {
                let mut s = 0.0;
                for i in 0..k {
                    for j in 0..k {
                        s += (self.entry(i, j) - v.entry(i, j)).norm_sqr();
                    }
                }
                (s / k as f64).sqrt()
            }
        }
    }

    /// sqrt(2 - 2 |tau(v* u)|), the infimum of the distance over unit scalars.
    pub fn hs_projective(&self, v: &Unitary) -> f64 {
        (2.0 - 2.0 * self.tau_against(v).norm()).max(0.0).sqrt()
    }

    pub fn block_sum(&self, other: &Unitary) -> Unitary {
        let tol = self.tol.max(other.tol);
        if let (Repr::Perm(a), Repr::Perm(b)) = (&self.repr, &other.repr) {
            return Unitary { k: self.k + other.k, repr: Repr::Perm(a.block_sum(b)), tol };
        }
        let n = self.k + other.k;
        let mut e = vec![c(0.0); n * n];
        for i in 0..self.k {
            for j in 0..self.k {
                e[i * n + j] = self.entry(i, j);
            }
        }
        for i in 0..other.k {
            for j in 0..other.k {
                e[(self.k + i) * n + self.k + j] = other.entry(i, j);
            }
        }
        Unitary { k: n, repr: Repr::Dense(e), tol }
    }

    /// Kronecker product, index (i, j) -> i * q + j.
    pub fn kron(&self, other: &Unitary) -> Unitary {
        let tol = self.tol.max(other.tol);
        if let (Repr::Perm(a), Repr::Perm(b)) = (&self.repr, &other.repr) {
            return Unitary { k: self.k * other.k, repr: Repr::Perm(a.product_action(b)), tol };
        }
        let (p, q) = (self.k, other.k);
        let n = p * q;
        let mut e = vec![c(0.0); n * n];
        for i1 in 0..p {
            for j1 in 0..p {
                let x = self.entry(i1, j1);
                if x == c(0.0) {
                    continue;
                }
                for i2 in 0..q {
                    for j2 in 0..q {
                        e[(i1 * q + i2) * n + j1 * q + j2] = x * other.entry(i2, j2);
                    }
                }
            }
        }
        Unitary { k: n, repr: Repr::Dense(e), tol }
    }

    pub fn scale(&self, lambda: Complex64) -> Unitary {
        let e = self.to_dense().into_iter().map(|x| x * lambda).collect();
        Unitary { k: self.k, repr: Repr::Dense(e), tol: self.tol }
    }
}

/// The tensor power A^{(x) l} of a base unitary, carried by the base alone.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorPower {
    pub base: Unitary,
    pub power: u32,
    pub base_trace: Complex64,
}

impl TensorPower {
    pub fn new(base: Unitary, power: u32) -> TensorPower {
        let base_trace = base.trace();
        TensorPower { base, power, base_trace }
    }

    /// Represented dimension as (base dimension, power).
    pub fn dim(&self) -> (usize, u32) {
        (self.base.dim(), self.power)
    }

    fn check(&self, other: &TensorPower) -> Result<()> {
        if self.power != other.power {
            return Err(Error::Invalid(format!("tensor powers {} and {} differ", self.power, other.power)));
        }
        if self.base.dim() != other.base.dim() {
            return Err(Error::DimensionMismatch(self.base.dim(), other.base.dim()));
        }
        Ok(())
    }

    pub fn mul(&self, other: &TensorPower) -> Result<TensorPower> {
        self.check(other)?;
        Ok(TensorPower::new(self.base.mul(&other.base), self.power))
    }

    pub fn inverse(&self) -> TensorPower {
        TensorPower::new(self.base.adjoint(), self.power)
    }

    /// Normalized trace of the represented matrix: tau(base)^l.
    pub fn tau(&self) -> Complex64 {
        (self.base_trace / self.base.dim() as f64).powu(self.power)
    }

    /// tau(B^{(x)l}* A^{(x)l}) = tau(B* A)^l.
    pub fn tau_against(&self, other: &TensorPower) -> Result<Complex64> {
        self.check(other)?;
        Ok(self.base.tau_against(&other.base).powu(self.power))
    }

    pub fn hs(&self, other: &TensorPower) -> Result<f64> {
        let t = self.tau_against(other)?;
        Ok((2.0 - 2.0 * t.re).max(0.0).sqrt())
    }

    pub fn hs_projective(&self, other: &TensorPower) -> Result<f64> {
        let t = self.tau_against(other)?;
        Ok((2.0 - 2.0 * t.norm()).max(0.0).sqrt())
    }

    /// Writes out the tensor power; refused above `MATERIALIZE_CAP`.
    pub fn materialize(&self) -> Result<Unitary> {
        let d = (self.base.dim() as u128).checked_pow(self.power);
        if d.is_none_or(|d| d > MATERIALIZE_CAP as u128) {
            return Err(Error::Overflow { what: "materialized tensor dimension", cap: MATERIALIZE_CAP });
        }
        let mut out = self.base.clone();
        for _ in 1..self.power {
            out = out.kron(&self.base);
        }
        Ok(out)
    }
}
