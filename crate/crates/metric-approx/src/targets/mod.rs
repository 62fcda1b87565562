//! Metric groups used as approximation targets.

pub mod field;
pub mod finite;
pub mod perm;
pub mod rank;
pub mod unitary;
pub mod wreath;

pub use finite::FiniteMetricGroup;
pub use perm::Perm;
pub use rank::{FieldKind, RankMatrix};
pub use unitary::{TensorPower, Unitary, DEFAULT_UNITARY_TOL};
pub use wreath::{PermWreathElem, WreathElem};

use crate::error::{Error, Result};
use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, ToPrimitive, Zero};
use serde_json::{json, Value};
use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

/// Margin used when a comparison involves a floating distance.
pub const DEFAULT_MARGIN: f64 = 1e-9;

/// A distance value: exact rational for Hamming, rank and {0,1} metrics, floating otherwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Dist {
    Exact(Ratio<i64>),
    Approx(f64),
}

impl Dist {
    pub fn zero() -> Dist {
        Dist::Exact(Ratio::zero())
    }

    pub fn one() -> Dist {
        Dist::Exact(Ratio::from_integer(1))
    }

    pub fn ratio(p: i64, q: i64) -> Dist {
        Dist::Exact(Ratio::new(p, q))
    }

    /// Exact when x is a dyadic rational with a modest denominator (0.25, 1, ...).
    pub fn from_f64(x: f64) -> Dist {
        for k in 0..=32 {
            let scaled = x * (1u64 << k) as f64;
            if scaled.is_finite() && scaled.fract() == 0.0 && scaled.abs() < (1u64 << 52) as f64 {
                return Dist::Exact(Ratio::new(scaled as i64, 1i64 << k));
            }
        }
        Dist::Approx(x)
    }

    pub fn value(&self) -> f64 {
        match self {
            Dist::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Dist::Approx(x) => *x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Dist::Exact(_))
    }

    fn combine(self, o: Dist, exact: impl Fn(Ratio<i64>, Ratio<i64>) -> Option<Ratio<i64>>, fl: impl Fn(f64, f64) -> f64) -> Dist {
        if let (Dist::Exact(a), Dist::Exact(b)) = (self, o) {
            if let Some(r) = exact(a, b) {
                return Dist::Exact(r);
            }
        }
        Dist::Approx(fl(self.value(), o.value()))
    }

    pub fn add(self, o: Dist) -> Dist {
        self.combine(o, |a, b| a.checked_add(&b), |a, b| a + b)
    }

    pub fn sub(self, o: Dist) -> Dist {
        self.combine(o, |a, b| a.checked_sub(&b), |a, b| a - b)
    }

    pub fn mul(self, o: Dist) -> Dist {
        self.combine(o, |a, b| a.checked_mul(&b), |a, b| a * b)
    }

    pub fn cmp_value(&self, o: &Dist) -> Ordering {
        match (self, o) {
            (Dist::Exact(a), Dist::Exact(b)) => a.cmp(b),
            _ => self.value().total_cmp(&o.value()),
        }
    }

    pub fn max(self, o: Dist) -> Dist {
        if o.cmp_value(&self) == Ordering::Greater {
            o
        } else {
            self
        }
    }

    pub fn min(self, o: Dist) -> Dist {
        if o.cmp_value(&self) == Ordering::Less {
            o
        } else {
            self
        }
    }

    /// Strict `self < o`, exact when both are exact and otherwise requiring a gap of `margin`.
    pub fn lt(&self, o: &Dist, margin: f64) -> bool {
        match (self, o) {
            (Dist::Exact(a), Dist::Exact(b)) => a < b,
            _ => self.value() + margin < o.value(),
        }
    }

    /// Strict `self > o` with the same conventions as [`Dist::lt`].
    pub fn gt(&self, o: &Dist, margin: f64) -> bool {
        match (self, o) {
            (Dist::Exact(a), Dist::Exact(b)) => a > b,
            _ => self.value() - margin > o.value(),
        }
    }

    /// `self <= o`, allowing `margin` of floating slack.
    pub fn le(&self, o: &Dist, margin: f64) -> bool {
        match (self, o) {
            (Dist::Exact(a), Dist::Exact(b)) => a <= b,
            _ => self.value() <= o.value() + margin,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Dist::Exact(r) => json!({ "value": self.value(), "exact": r.to_string() }),
            Dist::Approx(x) => json!({ "value": x }),
        }
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dist::Exact(r) => write!(f, "{r}"),
            Dist::Approx(x) => write!(f, "{x}"),
        }
    }
}

/// Size of the space a target element acts on. Tensor powers are kept symbolic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dimension {
    Exact(u64),
    Power { base: u64, power: u32 },
}

impl Dimension {
    pub fn as_exact(&self) -> Option<u64> {
        match self {
            Dimension::Exact(k) => Some(*k),
            Dimension::Power { base, power } => base.checked_pow(*power),
        }
    }

    pub fn log2(&self) -> f64 {
        match self {
            Dimension::Exact(k) => (*k as f64).log2(),
            Dimension::Power { base, power } => *power as f64 * (*base as f64).log2(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Dimension::Exact(k) => json!(k),
            Dimension::Power { base, power } => json!({ "base": base, "power": power }),
        }
    }

    pub fn from_json(v: &Value) -> Result<Dimension> {
        if let Some(k) = v.as_u64() {
            return Ok(Dimension::Exact(k));
        }
        let base = v.get("base").and_then(Value::as_u64);
        let power = v.get("power").and_then(Value::as_u64);
        match (base, power) {
            (Some(base), Some(power)) if power <= u32::MAX as u64 => Ok(Dimension::Power { base, power: power as u32 }),
            _ => Err(Error::Invalid(format!("bad dimension {v}"))),
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dimension::Exact(k) => write!(f, "{k}"),
            Dimension::Power { base, power } => write!(f, "{base}^{power}"),
        }
    }
}

/// Target family: which metric group the certificate lands in and which distance is used.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Sofic,
    Hyp,
    HypProjective,
    Lin(FieldKind),
    LinProjective(FieldKind),
    /// Finite groups with their table metric.
    Fin,
    /// Finite groups with the {0,1} metric.
    Trivial,
    /// G ≀ F for a finite F, with distances on G measured by the inner family.
    Wreath(Box<Family>),
    /// Sym(A) ⋉ G^A.
    PermWreath(Box<Family>),
}

impl Family {
    pub fn default_epsilon(&self) -> Dist {
        match self {
            Family::Sofic | Family::Fin | Family::Trivial | Family::Wreath(_) => Dist::one(),
            Family::Hyp | Family::HypProjective => Dist::Approx(std::f64::consts::SQRT_2),
            Family::Lin(_) => Dist::ratio(1, 4),
            Family::LinProjective(_) => Dist::ratio(1, 8),
            Family::PermWreath(inner) => inner.default_epsilon(),
        }
    }

    pub fn is_projective(&self) -> bool {
        matches!(self, Family::HypProjective | Family::LinProjective(_))
    }

    /// Distance between two targets of this family.
    pub fn distance(&self, a: &Target, b: &Target) -> Result<Dist> {
        let mismatch = || Error::KindMismatch(format!("{} and {} targets under the {self} family", a.kind(), b.kind()));
        match (self, a, b) {
            (Family::Sofic, Target::Perm(x), Target::Perm(y)) => {
                if x.degree() != y.degree() {
                    return Err(Error::DimensionMismatch(x.degree(), y.degree()));
                }
                Ok(Dist::Exact(x.ham(y)))
            }
            (Family::Hyp | Family::HypProjective, Target::Unitary(x), Target::Unitary(y)) => {
                if x.dim() != y.dim() {
                    return Err(Error::DimensionMismatch(x.dim(), y.dim()));
                }
                Ok(Dist::Approx(if self.is_projective() { x.hs_projective(y) } else { x.hs(y) }))
            }
            (Family::Hyp | Family::HypProjective, Target::Tensor(x), Target::Tensor(y)) => {
                Ok(Dist::Approx(if self.is_projective() { x.hs_projective(y)? } else { x.hs(y)? }))
            }
            (Family::Lin(f) | Family::LinProjective(f), Target::Rank(x), Target::Rank(y)) => {
                if x.field() != *f || y.field() != *f {
                    return Err(Error::FieldMismatch);
                }
                Ok(Dist::Exact(if self.is_projective() { x.projective_rank_distance(y)? } else { x.rank_distance(y)? }))
            }
            (Family::Fin | Family::Trivial, Target::Finite(x), Target::Finite(y)) => {
                if !Arc::ptr_eq(&x.group, &y.group) && x.group != y.group {
                    return Err(Error::KindMismatch("elements of different finite groups".into()));
                }
                if matches!(self, Family::Trivial) || x.idx == y.idx {
                    return Ok(if x.idx == y.idx { Dist::zero() } else { Dist::one() });
                }
                Ok(Dist::from_f64(x.group.d(x.idx, y.idx)))
            }
            (Family::Wreath(inner), Target::Wreath(x), Target::Wreath(y)) => {
                if !Arc::ptr_eq(&x.top_group, &y.top_group) && x.top_group != y.top_group {
                    return Err(Error::KindMismatch("wreath elements over different top groups".into()));
                }
                if x.top != y.top {
                    return Ok(Dist::one());
                }
                let mut d = Dist::zero();
                for (p, q) in x.base.iter().zip(&y.base) {
                    d = d.max(inner.distance(p, q)?);
                }
                Ok(d)
            }
            (Family::PermWreath(inner), Target::PermWreath(x), Target::PermWreath(y)) => {
                let m = x.sigma.degree();
                if m != y.sigma.degree() {
                    return Err(Error::DimensionMismatch(m, y.sigma.degree()));
                }
                let mut s = Dist::zero();
                for a in 0..m {
                    if x.sigma.apply(a) == y.sigma.apply(a) {
                        s = s.add(inner.distance(&x.bell[a], &y.bell[a])?);
                    }
                }
                Ok(s.mul(Dist::ratio(1, m.max(1) as i64)).add(Dist::Exact(x.sigma.ham(&y.sigma))))
            }
            _ => Err(mismatch()),
        }
    }

    pub fn parse(s: &str) -> Result<Family> {
        let t = s.trim().to_ascii_lowercase();
        let arg = |prefix: &str| -> Option<String> {
            t.strip_prefix(prefix)
                .and_then(|r| r.strip_prefix('(').and_then(|r| r.strip_suffix(')')).or_else(|| r.strip_prefix(':')))
                .map(str::to_string)
        };
        Ok(match t.as_str() {
            "sofic" | "sof" => Family::Sofic,
            "hyp" | "hyperlinear" => Family::Hyp,
            "hyp-projective" | "hypbar" => Family::HypProjective,
            "lin" => Family::Lin(FieldKind::Q),
            "lin-projective" => Family::LinProjective(FieldKind::Q),
            "fin" | "weakly-sofic" => Family::Fin,
            "trivial" => Family::Trivial,
            _ => {
                if let Some(a) = arg("lin-projective") {
                    Family::LinProjective(FieldKind::parse(&a)?)
                } else if let Some(a) = arg("lin") {
                    Family::Lin(FieldKind::parse(&a)?)
                } else if let Some(a) = arg("perm-wreath") {
                    Family::PermWreath(Box::new(Family::parse(&a)?))
                } else if let Some(a) = arg("wreath") {
                    Family::Wreath(Box::new(Family::parse(&a)?))
                } else {
                    return Err(Error::Invalid(format!("unknown family {s}")));
                }
            }
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Sofic => write!(f, "sofic"),
            Family::Hyp => write!(f, "hyp"),
            Family::HypProjective => write!(f, "hyp-projective"),
            Family::Lin(k) => write!(f, "lin({k})"),
            Family::LinProjective(k) => write!(f, "lin-projective({k})"),
            Family::Fin => write!(f, "fin"),
            Family::Trivial => write!(f, "trivial"),
            Family::Wreath(i) => write!(f, "wreath({i})"),
            Family::PermWreath(i) => write!(f, "perm-wreath({i})"),
        }
    }
}

/// Element of a finite table group.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteElem {
    pub group: Arc<FiniteMetricGroup>,
    pub idx: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    Perm(Perm),
    Unitary(Unitary),
    Rank(RankMatrix),
    Finite(FiniteElem),
    Tensor(TensorPower),
    Wreath(WreathElem),
    PermWreath(PermWreathElem),
}

impl Target {
    pub fn kind(&self) -> &'static str {
        match self {
            Target::Perm(_) => "permutation",
            Target::Unitary(_) => "unitary",
            Target::Rank(_) => "rank matrix",
            Target::Finite(_) => "finite group",
            Target::Tensor(_) => "tensor power",
            Target::Wreath(_) => "wreath",
            Target::PermWreath(_) => "permutation wreath",
        }
    }

    pub fn mul(&self, other: &Target) -> Result<Target> {
        Ok(match (self, other) {
            (Target::Perm(a), Target::Perm(b)) => {
                if a.degree() != b.degree() {
                    return Err(Error::DimensionMismatch(a.degree(), b.degree()));
                }
                Target::Perm(a.compose(b))
            }
            (Target::Unitary(a), Target::Unitary(b)) => {
                if a.dim() != b.dim() {
                    return Err(Error::DimensionMismatch(a.dim(), b.dim()));
                }
                Target::Unitary(a.mul(b))
            }
            (Target::Rank(a), Target::Rank(b)) => Target::Rank(a.mul(b)?),
            (Target::Finite(a), Target::Finite(b)) => {
                if !Arc::ptr_eq(&a.group, &b.group) && a.group != b.group {
                    return Err(Error::KindMismatch("elements of different finite groups".into()));
                }
                Target::Finite(FiniteElem { group: a.group.clone(), idx: a.group.mul(a.idx, b.idx) })
            }
            (Target::Tensor(a), Target::Tensor(b)) => Target::Tensor(a.mul(b)?),
            (Target::Wreath(a), Target::Wreath(b)) => Target::Wreath(a.mul(b)?),
            (Target::PermWreath(a), Target::PermWreath(b)) => Target::PermWreath(a.mul(b)?),
            _ => return Err(Error::KindMismatch(format!("cannot multiply {} by {}", self.kind(), other.kind()))),
        })
    }

    pub fn inverse(&self) -> Result<Target> {
        Ok(match self {
            Target::Perm(a) => Target::Perm(a.inverse()),
            Target::Unitary(a) => Target::Unitary(a.adjoint()),
            Target::Rank(a) => Target::Rank(a.inverse()?),
            Target::Finite(a) => Target::Finite(FiniteElem { group: a.group.clone(), idx: a.group.inv(a.idx) }),
            Target::Tensor(a) => Target::Tensor(a.inverse()),
            Target::Wreath(a) => Target::Wreath(a.inverse()?),
            Target::PermWreath(a) => Target::PermWreath(a.inverse()?),
        })
    }

    /// The identity of the group this element lives in.
    pub fn identity_like(&self) -> Target {
        match self {
            Target::Perm(a) => Target::Perm(Perm::identity(a.degree())),
            Target::Unitary(a) => Target::Unitary(Unitary::identity(a.dim())),
            Target::Rank(a) => Target::Rank(RankMatrix::identity(a.field(), a.dim())),
            Target::Finite(a) => Target::Finite(FiniteElem { group: a.group.clone(), idx: a.group.identity }),
            Target::Tensor(a) => Target::Tensor(TensorPower::new(Unitary::identity(a.base.dim()), a.power)),
            Target::Wreath(a) => {
                Target::Wreath(WreathElem::identity(a.top_group.clone(), &a.base[0].identity_like()))
            }
            Target::PermWreath(a) => {
                let e = a.bell.first().map(Target::identity_like).unwrap_or(Target::Perm(Perm::identity(1)));
                Target::PermWreath(PermWreathElem::identity(a.sigma.degree(), &e))
            }
        }
    }

    pub fn dimension(&self) -> Result<Dimension> {
        let k = |x: usize| Ok(Dimension::Exact(x as u64));
        match self {
            Target::Perm(a) => k(a.degree()),
            Target::Unitary(a) => k(a.dim()),
            Target::Rank(a) => k(a.dim()),
            Target::Finite(a) => k(a.group.order()),
            Target::Tensor(a) => Ok(Dimension::Power { base: a.base.dim() as u64, power: a.power }),
            Target::Wreath(a) => {
                // m * k^m for m = |F| and base dimension k
                let m = a.top_group.order() as u64;
                let inner = a.base[0].dimension()?.as_exact().ok_or(Error::Overflow { what: "dimension", cap: usize::MAX })?;
                inner
                    .checked_pow(m as u32)
                    .and_then(|x| x.checked_mul(m))
                    .map(Dimension::Exact)
                    .ok_or(Error::Overflow { what: "dimension", cap: usize::MAX })
            }
            Target::PermWreath(a) => {
                let inner = match a.bell.first() {
                    Some(t) => t.dimension()?.as_exact().ok_or(Error::Overflow { what: "dimension", cap: usize::MAX })?,
                    None => 1,
                };
                Ok(Dimension::Exact(a.sigma.degree() as u64 * inner))
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Target::Perm(p) => json!(p.0),
            Target::Unitary(u) => unitary_json(u),
            Target::Rank(r) => r.to_json(),
            Target::Finite(f) => json!({ "table": serde_json::to_value(&*f.group).expect("serializable"), "index": f.idx }),
            Target::Tensor(t) => json!({ "tensor": { "base": unitary_json(&t.base), "power": t.power } }),
            Target::Wreath(w) => json!({ "wreath": {
                "top_group": serde_json::to_value(&*w.top_group).expect("serializable"),
                "base": w.base.iter().map(Target::to_json).collect::<Vec<_>>(),
                "top": w.top,
            }}),
            Target::PermWreath(w) => json!({ "perm_wreath": {
                "sigma": w.sigma.0,
                "bell": w.bell.iter().map(Target::to_json).collect::<Vec<_>>(),
            }}),
        }
    }

    pub fn from_json(v: &Value) -> Result<Target> {
        let bad = |what: &str| Error::Invalid(format!("bad {what} encoding"));
        if v.is_array() {
            let images: Vec<u32> = serde_json::from_value(v.clone()).map_err(|_| bad("permutation"))?;
            return Perm::from_images(images).map(Target::Perm).ok_or_else(|| bad("permutation"));
        }
        let obj = v.as_object().ok_or_else(|| bad("target"))?;
        if obj.contains_key("field") {
            return Ok(Target::Rank(RankMatrix::from_json(v)?));
        }
        if obj.contains_key("index") {
            let group = table_from_json(&v["table"])?;
            let idx = v["index"].as_u64().filter(|&i| (i as usize) < group.order()).ok_or_else(|| bad("finite element"))?;
            return Ok(Target::Finite(FiniteElem { group: Arc::new(group), idx: idx as u32 }));
        }
        if let Some(t) = obj.get("tensor") {
            let power = t["power"].as_u64().filter(|&p| p >= 1 && p <= u32::MAX as u64).ok_or_else(|| bad("tensor"))?;
            return Ok(Target::Tensor(TensorPower::new(unitary_from_json(&t["base"])?, power as u32)));
        }
        if let Some(w) = obj.get("wreath") {
            let top_group = Arc::new(table_from_json(&w["top_group"])?);
            let base: Vec<Target> = w["base"].as_array().ok_or_else(|| bad("wreath"))?.iter().map(Target::from_json).collect::<Result<_>>()?;
            let top = w["top"].as_u64().filter(|&i| (i as usize) < top_group.order()).ok_or_else(|| bad("wreath"))?;
            if base.len() != top_group.order() {
                return Err(bad("wreath"));
            }
            return Ok(Target::Wreath(WreathElem { top_group, base, top: top as u32 }));
        }
        if let Some(w) = obj.get("perm_wreath") {
            let sigma = Target::from_json(&w["sigma"])?;
            let Target::Perm(sigma) = sigma else { return Err(bad("permutation wreath")) };
            let bell: Vec<Target> = w["bell"].as_array().ok_or_else(|| bad("permutation wreath"))?.iter().map(Target::from_json).collect::<Result<_>>()?;
            if bell.len() != sigma.degree() {
                return Err(bad("permutation wreath"));
            }
            return Ok(Target::PermWreath(PermWreathElem { sigma, bell }));
        }
        Ok(Target::Unitary(unitary_from_json(v)?))
    }
}

fn table_from_json(v: &Value) -> Result<FiniteMetricGroup> {
    let mut g: FiniteMetricGroup = serde_json::from_value(v.clone()).map_err(|e| Error::Invalid(format!("bad table: {e}")))?;
    g.validate()?;
    Ok(g)
}

fn unitary_json(u: &Unitary) -> Value {
    match u.as_perm() {
        Some(p) => json!({ "k": u.dim(), "perm": p.0, "tol": u.tol }),
        None => {
            let entries: Vec<[f64; 2]> = u.to_dense().iter().map(|z| [z.re, z.im]).collect();
            json!({ "k": u.dim(), "entries": entries, "tol": u.tol })
        }
    }
}

fn unitary_from_json(v: &Value) -> Result<Unitary> {
    let bad = || Error::Invalid(format!("bad unitary encoding {}", short(v)));
    let tol = v.get("tol").and_then(Value::as_f64).unwrap_or(DEFAULT_UNITARY_TOL);
    if let Some(p) = v.get("perm") {
        let images: Vec<u32> = serde_json::from_value(p.clone()).map_err(|_| bad())?;
        let mut u = Unitary::from_perm(&Perm::from_images(images).ok_or_else(bad)?);
        u.tol = tol;
        return Ok(u);
    }
    let k = v.get("k").and_then(Value::as_u64).ok_or_else(bad)? as usize;
    let entries: Vec<[f64; 2]> = serde_json::from_value(v.get("entries").ok_or_else(bad)?.clone()).map_err(|_| bad())?;
    if entries.len() != k * k {
        return Err(bad());
    }
    Unitary::from_dense(k, entries.into_iter().map(|[re, im]| Complex64::new(re, im)).collect(), tol)
}

fn short(v: &Value) -> String {
    let s = v.to_string();
    if s.len() > 80 {
        format!("{}...", &s[..80])
    } else {
        s
    }
}

/// Permutation-matrix image of a permutation.
pub fn perm_to_unitary(p: &Perm) -> Unitary {
    Unitary::from_perm(p)
}

pub fn perm_to_rank(p: &Perm, field: FieldKind) -> RankMatrix {
    RankMatrix::from_perm(p, field)
}

/// Normalized Hamming distance with a degree check.
pub fn ham_distance(a: &Perm, b: &Perm) -> Result<Ratio<i64>> {
    if a.degree() != b.degree() {
        return Err(Error::DimensionMismatch(a.degree(), b.degree()));
    }
    Ok(a.ham(b))
}

/// HS distance of two unitaries, checking sizes and unitarity.
pub fn hs_distance(a: &Unitary, b: &Unitary) -> Result<f64> {
    check_unitaries(a, b)?;
    Ok(a.hs(b))
}

pub fn projective_hs_distance(a: &Unitary, b: &Unitary) -> Result<f64> {
    check_unitaries(a, b)?;
    Ok(a.hs_projective(b))
}

fn check_unitaries(a: &Unitary, b: &Unitary) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    for u in [a, b] {
        let dev = u.deviation();
        if dev > u.tol {
            return Err(Error::NotUnitary(dev));
        }
    }
    Ok(())
}

/// Direct sum of two targets of the same kind.
pub fn block_sum(a: &Target, b: &Target) -> Result<Target> {
    Ok(match (a, b) {
        (Target::Perm(x), Target::Perm(y)) => Target::Perm(x.block_sum(y)),
        (Target::Unitary(x), Target::Unitary(y)) => Target::Unitary(x.block_sum(y)),
        (Target::Rank(x), Target::Rank(y)) => Target::Rank(x.block_sum(y)?),
        _ => return Err(Error::FamilyMismatch(format!("no direct sum of {} and {}", a.kind(), b.kind()))),
    })
}

/// Tensor product of two targets of the same kind; permutations act on pairs (i, j) as i * q + j.
pub fn kron(a: &Target, b: &Target) -> Result<Target> {
    Ok(match (a, b) {
        (Target::Perm(x), Target::Perm(y)) => Target::Perm(x.product_action(y)),
        (Target::Unitary(x), Target::Unitary(y)) => Target::Unitary(x.kron(y)),
        (Target::Rank(x), Target::Rank(y)) => Target::Rank(x.kron(y)?),
        _ => return Err(Error::FamilyMismatch(format!("no tensor product of {} and {}", a.kind(), b.kind()))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dist_comparisons() {
        let third = Dist::ratio(1, 3);
        assert!(!third.lt(&third, DEFAULT_MARGIN));
        assert!(Dist::Approx(0.3).lt(&third, DEFAULT_MARGIN));
        assert!(!Dist::Approx(1.0 / 3.0).lt(&third, DEFAULT_MARGIN));
        assert_eq!(Dist::from_f64(0.25), Dist::ratio(1, 4));
        assert!(!Dist::from_f64(0.1).is_exact());
        assert_eq!(Dist::one().sub(third), Dist::ratio(2, 3));
    }

    #[test]
    fn family_names_round_trip() {
        for f in [
            Family::Sofic,
            Family::Hyp,
            Family::HypProjective,
            Family::Lin(FieldKind::Fp(2)),
            Family::LinProjective(FieldKind::Q),
            Family::Fin,
            Family::Trivial,
            Family::Wreath(Box::new(Family::Sofic)),
            Family::PermWreath(Box::new(Family::Sofic)),
        ] {
            assert_eq!(Family::parse(&f.to_string()).unwrap(), f);
        }
    }

    #[test]
    fn target_json_round_trip() {
        let p = Perm(vec![2, 0, 1]);
        let ts = vec![
            Target::Perm(p.clone()),
            Target::Unitary(Unitary::from_perm(&p)),
            Target::Unitary(Unitary::phases(&[0.0, 1.0])),
            Target::Rank(RankMatrix::from_perm(&p, FieldKind::Fp(3))),
            Target::Finite(FiniteElem { group: Arc::new(FiniteMetricGroup::cyclic(4)), idx: 3 }),
            Target::Tensor(TensorPower::new(Unitary::from_perm(&p), 5)),
        ];
        for t in ts {
            let back = Target::from_json(&t.to_json()).unwrap();
            assert_eq!(back.to_json(), t.to_json());
        }
    }

    #[test]
    fn wreath_metric_is_one_off_the_top() {
        let f = Arc::new(FiniteMetricGroup::cyclic(2));
        let e = Target::Perm(Perm::identity(2));
        let x = WreathElem { top_group: f.clone(), base: vec![e.clone(), e.clone()], top: 1 };
        let fam = Family::Wreath(Box::new(Family::Sofic));
        let id = Target::Wreath(WreathElem::identity(f, &e));
        assert_eq!(fam.distance(&Target::Wreath(x), &id).unwrap(), Dist::one());
    }
}
