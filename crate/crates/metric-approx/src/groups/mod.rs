//! Catalog of finitely generated groups with canonical normal forms.

mod ball;
mod quotient;
mod subgroup;

pub use ball::{ball, ball_with_cap, geodesic_words, growth, Ball, DEFAULT_BALL_CAP};
pub use quotient::{enumerate_hnf, Quotient};
pub use subgroup::{distortion, SubgroupPair};

use crate::error::{Error, Result};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;

/// Normal form of a group element. The variant used depends on the group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elem {
    /// Integer vector in Z^d.
    Int(Vec<i64>),
    /// Freely reduced word; letter `i` is generator `|i|-1` with sign as exponent.
    Word(Vec<i32>),
    /// Heisenberg element: row vector a, column vector b, corner c.
    Heis { a: Vec<i64>, b: Vec<i64>, c: i64 },
    /// Residue in Z/m.
    Res(u64),
    /// Permutation as an image array.
    Perm(Vec<u32>),
    Pair(Box<Elem>, Box<Elem>),
    /// Finitely supported function (sorted by position) together with the top element.
    Wreath { support: Vec<(Elem, Elem)>, top: Box<Elem> },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Group {
    FreeAbelian(usize),
    Free(usize),
    /// Heisenberg group of dimension 2l+1, modelled by (l+2)x(l+2) upper unitriangular matrices.
    Heisenberg(usize),
    FiniteCyclic(u64),
    FiniteSym(usize),
    DirectProduct(Box<Group>, Box<Group>),
    WreathFiniteTop { base: Box<Group>, top: Box<Group> },
    /// base wr Z.
    Lamplighter(Box<Group>),
}

fn perm_compose(a: &[u32], b: &[u32]) -> Vec<u32> {
    b.iter().map(|&i| a[i as usize]).collect()
}

fn perm_inverse(a: &[u32]) -> Vec<u32> {
    let mut out = vec![0u32; a.len()];
    for (i, &j) in a.iter().enumerate() {
        out[j as usize] = i as u32;
    }
    out
}

fn reduce_word(mut w: Vec<i32>) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(w.len());
    for x in w.drain(..) {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

impl Group {
    pub fn z() -> Group {
        Group::FreeAbelian(1)
    }

    pub fn product(a: Group, b: Group) -> Group {
        Group::DirectProduct(Box::new(a), Box::new(b))
    }

    pub fn lamplighter(base: Group) -> Group {
        Group::Lamplighter(Box::new(base))
    }

    /// Base and top of a wreath product, if this is one.
    pub fn wreath_parts(&self) -> Option<(Group, Group)> {
        match self {
            Group::WreathFiniteTop { base, top } => Some(((**base).clone(), (**top).clone())),
            Group::Lamplighter(base) => Some(((**base).clone(), Group::z())),
            _ => None,
        }
    }

    pub fn identity(&self) -> Elem {
        match self {
            Group::FreeAbelian(d) => Elem::Int(vec![0; *d]),
            Group::Free(_) => Elem::Word(vec![]),
            Group::Heisenberg(l) => Elem::Heis { a: vec![0; *l], b: vec![0; *l], c: 0 },
            Group::FiniteCyclic(_) => Elem::Res(0),
            Group::FiniteSym(k) => Elem::Perm((0..*k as u32).collect()),
            Group::DirectProduct(g, h) => Elem::Pair(Box::new(g.identity()), Box::new(h.identity())),
            Group::WreathFiniteTop { .. } | Group::Lamplighter(_) => {
                let (_, top) = self.wreath_parts().unwrap();
                Elem::Wreath { support: vec![], top: Box::new(top.identity()) }
            }
        }
    }

    pub fn is_identity(&self, g: &Elem) -> bool {
        *g == self.identity()
    }

    /// Checks that `g` is a normal form for this group.
    pub fn contains(&self, g: &Elem) -> bool {
        match (self, g) {
            (Group::FreeAbelian(d), Elem::Int(v)) => v.len() == *d,
            (Group::Free(r), Elem::Word(w)) => {
                w.iter().all(|&x| x != 0 && x.unsigned_abs() as usize <= *r)
                    && w.windows(2).all(|p| p[0] != -p[1])
            }
            (Group::Heisenberg(l), Elem::Heis { a, b, .. }) => a.len() == *l && b.len() == *l,
            (Group::FiniteCyclic(m), Elem::Res(r)) => r < m,
            (Group::FiniteSym(k), Elem::Perm(p)) => {
                if p.len() != *k {
                    return false;
                }
                let mut seen = vec![false; *k];
                for &i in p {
                    if i as usize >= *k || seen[i as usize] {
                        return false;
                    }
                    seen[i as usize] = true;
                }
                true
            }
            (Group::DirectProduct(a, b), Elem::Pair(x, y)) => a.contains(x) && b.contains(y),
            (Group::WreathFiniteTop { .. } | Group::Lamplighter(_), Elem::Wreath { support, top: t }) => {
                let (base, top) = self.wreath_parts().unwrap();
                top.contains(t)
                    && support.windows(2).all(|p| p[0].0 < p[1].0)
                    && support
                        .iter()
                        .all(|(p, v)| top.contains(p) && base.contains(v) && !base.is_identity(v))
            }
            _ => false,
        }
    }

    fn check(&self, g: &Elem) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(Error::KindMismatch(format!("element is not in {self}")))
        }
    }

    /// Product of two elements, returning an error if either is not in the group.
    pub fn multiply(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    /// Product without membership checks. Panics on a kind mismatch.
    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match (self, a, b) {
            (Group::FreeAbelian(_), Elem::Int(x), Elem::Int(y)) => {
                Elem::Int(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            (Group::Free(_), Elem::Word(x), Elem::Word(y)) => {
                let mut w = x.clone();
                w.extend_from_slice(y);
                Elem::Word(reduce_word(w))
            }
            (Group::Heisenberg(_), Elem::Heis { a: a1, b: b1, c: c1 }, Elem::Heis { a: a2, b: b2, c: c2 }) => {
                let dot: i64 = a1.iter().zip(b2).map(|(p, q)| p * q).sum();
                Elem::Heis {
                    a: a1.iter().zip(a2).map(|(p, q)| p + q).collect(),
                    b: b1.iter().zip(b2).map(|(p, q)| p + q).collect(),
                    c: c1 + c2 + dot,
                }
            }
            (Group::FiniteCyclic(m), Elem::Res(x), Elem::Res(y)) => Elem::Res((x + y) % m),
            (Group::FiniteSym(_), Elem::Perm(x), Elem::Perm(y)) => Elem::Perm(perm_compose(x, y)),
            (Group::DirectProduct(g, h), Elem::Pair(x1, y1), Elem::Pair(x2, y2)) => {
                Elem::Pair(Box::new(g.mul(x1, x2)), Box::new(h.mul(y1, y2)))
            }
            (
                Group::WreathFiniteTop { .. } | Group::Lamplighter(_),
                Elem::Wreath { support: s1, top: t1 },
                Elem::Wreath { support: s2, top: t2 },
            ) => {
                let (base, top) = self.wreath_parts().unwrap();
                let mut f: BTreeMap<Elem, Elem> = s1.iter().cloned().collect();
                for (p, v) in s2 {
                    let q = top.mul(t1, p);
                    let nv = match f.get(&q) {
                        Some(u) => base.mul(u, v),
                        None => v.clone(),
                    };
                    if base.is_identity(&nv) {
                        f.remove(&q);
                    } else {
                        f.insert(q, nv);
                    }
                }
                Elem::Wreath { support: f.into_iter().collect(), top: Box::new(top.mul(t1, t2)) }
            }
            _ => panic!("element kind does not match group {self}"),
        }
    }

    pub fn inverse(&self, g: &Elem) -> Elem {
        match (self, g) {
            (Group::FreeAbelian(_), Elem::Int(x)) => Elem::Int(x.iter().map(|v| -v).collect()),
            (Group::Free(_), Elem::Word(w)) => Elem::Word(w.iter().rev().map(|x| -x).collect()),
            (Group::Heisenberg(_), Elem::Heis { a, b, c }) => {
                let dot: i64 = a.iter().zip(b).map(|(p, q)| p * q).sum();
                Elem::Heis {
                    a: a.iter().map(|v| -v).collect(),
                    b: b.iter().map(|v| -v).collect(),
                    c: dot - c,
                }
            }
            (Group::FiniteCyclic(m), Elem::Res(x)) => Elem::Res((m - x) % m),
            (Group::FiniteSym(_), Elem::Perm(p)) => Elem::Perm(perm_inverse(p)),
            (Group::DirectProduct(g, h), Elem::Pair(x, y)) => {
                Elem::Pair(Box::new(g.inverse(x)), Box::new(h.inverse(y)))
            }
            (Group::WreathFiniteTop { .. } | Group::Lamplighter(_), Elem::Wreath { support, top: t }) => {
                let (base, top) = self.wreath_parts().unwrap();
                let ti = top.inverse(t);
                let mut f: Vec<(Elem, Elem)> =
                    support.iter().map(|(p, v)| (top.mul(&ti, p), base.inverse(v))).collect();
                f.sort();
                Elem::Wreath { support: f, top: Box::new(ti) }
            }
            _ => panic!("element kind does not match group {self}"),
        }
    }

    /// The generators X; the symmetric generating set is X together with inverses.
    pub fn free_generators(&self) -> Vec<Elem> {
        match self {
            Group::FreeAbelian(d) => (0..*d)
                .map(|i| {
                    let mut v = vec![0; *d];
                    v[i] = 1;
                    Elem::Int(v)
                })
                .collect(),
            Group::Free(r) => (1..=*r as i32).map(|i| Elem::Word(vec![i])).collect(),
            Group::Heisenberg(l) => {
                let mut out = Vec::new();
                for i in 0..*l {
                    let mut a = vec![0; *l];
                    a[i] = 1;
                    out.push(Elem::Heis { a, b: vec![0; *l], c: 0 });
                }
                for i in 0..*l {
                    let mut b = vec![0; *l];
                    b[i] = 1;
                    out.push(Elem::Heis { a: vec![0; *l], b, c: 0 });
                }
                out
            }
            Group::FiniteCyclic(m) => {
                if *m > 1 {
                    vec![Elem::Res(1)]
                } else {
                    vec![]
                }
            }
            Group::FiniteSym(k) => {
                let mut out = Vec::new();
                if *k >= 2 {
                    let mut t: Vec<u32> = (0..*k as u32).collect();
                    t.swap(0, 1);
                    out.push(Elem::Perm(t));
                }
                if *k >= 3 {
                    out.push(Elem::Perm((0..*k as u32).map(|i| (i + 1) % *k as u32).collect()));
                }
                out
            }
            Group::DirectProduct(g, h) => {
                let mut out: Vec<Elem> = g
                    .free_generators()
                    .into_iter()
                    .map(|x| Elem::Pair(Box::new(x), Box::new(h.identity())))
                    .collect();
                out.extend(
                    h.free_generators()
                        .into_iter()
                        .map(|y| Elem::Pair(Box::new(g.identity()), Box::new(y))),
                );
                out
            }
            Group::WreathFiniteTop { .. } | Group::Lamplighter(_) => {
                let (base, top) = self.wreath_parts().unwrap();
                let mut out: Vec<Elem> = base
                    .free_generators()
                    .into_iter()
                    .map(|b| Elem::Wreath { support: vec![(top.identity(), b)], top: Box::new(top.identity()) })
                    .collect();
                out.extend(
                    top.free_generators()
                        .into_iter()
                        .map(|t| Elem::Wreath { support: vec![], top: Box::new(t) }),
                );
                out
            }
        }
    }

    /// Symmetric generating set S = X and X^-1, duplicates removed, order preserved.
    pub fn generators(&self) -> Vec<Elem> {
        let mut out: Vec<Elem> = Vec::new();
        for x in self.free_generators() {
            let xi = self.inverse(&x);
            if !out.contains(&x) {
                out.push(x);
            }
            if !out.contains(&xi) {
                out.push(xi);
            }
        }
        out
    }

    /// Image of a letter (signed, 1-based generator index) of the free group on X.
    pub fn letter(&self, x: i32) -> Elem {
        let g = self.free_generators()[x.unsigned_abs() as usize - 1].clone();
        if x > 0 {
            g
        } else {
            self.inverse(&g)
        }
    }

    /// Evaluates a word over X in the group.
    pub fn eval_word(&self, w: &[i32]) -> Elem {
        let gens = self.free_generators();
        let inv: Vec<Elem> = gens.iter().map(|g| self.inverse(g)).collect();
        let mut acc = self.identity();
        for &x in w {
            let i = x.unsigned_abs() as usize - 1;
            acc = self.mul(&acc, if x > 0 { &gens[i] } else { &inv[i] });
        }
        acc
    }

    /// Relators of the standard presentation on X, when one is known.
    pub fn relators(&self) -> Option<Vec<Vec<i32>>> {
        let comm = |x: i32, y: i32| vec![x, y, -x, -y];
        match self {
            Group::FreeAbelian(d) => {
                let mut r = Vec::new();
                for i in 1..=*d as i32 {
                    for j in i + 1..=*d as i32 {
                        r.push(comm(i, j));
                    }
                }
                Some(r)
            }
            Group::Free(_) => Some(vec![]),
            Group::Heisenberg(l) => {
                let l = *l as i32;
                let mut r = Vec::new();
                for i in 1..=l {
                    for j in 1..=l {
                        let z = comm(i, l + j);
                        if i == j {
                            for k in 1..=2 * l {
                                let mut w = z.clone();
                                w.push(k);
                                w.extend(z.iter().rev().map(|x| -x));
                                w.push(-k);
                                r.push(w);
                            }
                        } else {
                            r.push(z);
                        }
                    }
                    for j in i + 1..=l {
                        r.push(comm(i, j));
                        r.push(comm(l + i, l + j));
                    }
                }
                for i in 2..=l {
                    let mut w = comm(i, l + i);
                    w.extend(comm(1, l + 1).iter().rev().map(|x| -x));
                    r.push(w);
                }
                Some(r)
            }
            Group::FiniteCyclic(m) => Some(if *m > 1 { vec![vec![1; *m as usize]] } else { vec![] }),
            _ => None,
        }
    }

    /// Group order for finite groups.
    pub fn order(&self) -> Option<u64> {
        match self {
            Group::FiniteCyclic(m) => Some(*m),
            Group::FiniteSym(k) => Some((1..=*k as u64).product()),
            Group::DirectProduct(a, b) => Some(a.order()? * b.order()?),
            Group::WreathFiniteTop { base, top } => {
                let t = top.order()?;
                Some(base.order()?.checked_pow(t as u32)? * t)
            }
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.order().is_some()
    }

    /// All elements of a finite group in canonical order.
    pub fn elements(&self) -> Result<Vec<Elem>> {
        let m = self.order().ok_or_else(|| Error::Unsupported(format!("{self} is infinite")))?;
        if m > DEFAULT_BALL_CAP as u64 {
            return Err(Error::Overflow { what: "group order", cap: DEFAULT_BALL_CAP });
        }
        let b = ball::closure(self, DEFAULT_BALL_CAP)?;
        Ok(b)
    }

    /// JSON encoding of an element, used as its normal-form string.
    pub fn encode(&self, g: &Elem) -> Value {
        match (self, g) {
            (Group::FreeAbelian(1), Elem::Int(v)) => json!(v[0]),
            (_, Elem::Int(v)) => json!(v),
            (_, Elem::Word(w)) => json!(w),
            (_, Elem::Heis { a, b, c }) => {
                let mut v = a.clone();
                v.extend(b);
                v.push(*c);
                json!(v)
            }
            (_, Elem::Res(r)) => json!(r),
            (_, Elem::Perm(p)) => json!(p),
            (Group::DirectProduct(a, b), Elem::Pair(x, y)) => json!([a.encode(x), b.encode(y)]),
            (_, Elem::Wreath { support, top: t }) => {
                let (base, top) = self.wreath_parts().expect("wreath element in non-wreath group");
                let s: Vec<Value> = support.iter().map(|(p, v)| json!([top.encode(p), base.encode(v)])).collect();
                json!([s, top.encode(t)])
            }
            _ => panic!("element kind does not match group {self}"),
        }
    }

    pub fn normal_form(&self, g: &Elem) -> String {
        self.encode(g).to_string()
    }

    pub fn decode(&self, v: &Value) -> Result<Elem> {
        let bad = || Error::Invalid(format!("cannot decode {v} as an element of {self}"));
        let ints = |v: &Value| -> Result<Vec<i64>> {
            v.as_array().ok_or_else(bad)?.iter().map(|x| x.as_i64().ok_or_else(bad)).collect()
        };
        let g = match self {
            Group::FreeAbelian(1) if v.is_i64() => Elem::Int(vec![v.as_i64().unwrap()]),
            Group::FreeAbelian(_) => Elem::Int(ints(v)?),
            Group::Free(_) => Elem::Word(ints(v)?.into_iter().map(|x| x as i32).collect()),
            Group::Heisenberg(l) => {
                let x = ints(v)?;
                if x.len() != 2 * l + 1 {
                    return Err(bad());
                }
                Elem::Heis { a: x[..*l].to_vec(), b: x[*l..2 * l].to_vec(), c: x[2 * l] }
            }
            Group::FiniteCyclic(_) => Elem::Res(v.as_u64().ok_or_else(bad)?),
            Group::FiniteSym(_) => Elem::Perm(ints(v)?.into_iter().map(|x| x as u32).collect()),
            Group::DirectProduct(a, b) => {
                let arr = v.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
                Elem::Pair(Box::new(a.decode(&arr[0])?), Box::new(b.decode(&arr[1])?))
            }
            Group::WreathFiniteTop { .. } | Group::Lamplighter(_) => {
                let (base, top) = self.wreath_parts().unwrap();
                let arr = v.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
                let mut support = Vec::new();
                for e in arr[0].as_array().ok_or_else(bad)? {
                    let pv = e.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
                    support.push((top.decode(&pv[0])?, base.decode(&pv[1])?));
                }
                Elem::Wreath { support, top: Box::new(top.decode(&arr[1])?) }
            }
        };
        self.check(&g)?;
        Ok(g)
    }

    pub fn parse_normal_form(&self, s: &str) -> Result<Elem> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::Invalid(format!("{s}: {e}")))?;
        self.decode(&v)
    }

    /// Descriptor of the form {"kind": ..., "params": ...}.
    pub fn to_json(&self) -> Value {
        match self {
            Group::FreeAbelian(d) => json!({"kind": "FreeAbelian", "params": {"d": d}}),
            Group::Free(r) => json!({"kind": "Free", "params": {"rank": r}}),
            Group::Heisenberg(l) => json!({"kind": "Heisenberg", "params": {"l": l}}),
            Group::FiniteCyclic(m) => json!({"kind": "FiniteCyclic", "params": {"m": m}}),
            Group::FiniteSym(k) => json!({"kind": "FiniteSym", "params": {"k": k}}),
            Group::DirectProduct(a, b) => {
                json!({"kind": "DirectProduct", "params": {"left": a.to_json(), "right": b.to_json()}})
            }
            Group::WreathFiniteTop { base, top } => {
                json!({"kind": "WreathFiniteTop", "params": {"base": base.to_json(), "top": top.to_json()}})
            }
            Group::Lamplighter(base) => json!({"kind": "Lamplighter", "params": {"base": base.to_json()}}),
        }
    }

    pub fn from_json(v: &Value) -> Result<Group> {
        let bad = |m: &str| Error::Invalid(format!("group descriptor {v}: {m}"));
        let kind = v.get("kind").and_then(Value::as_str).ok_or_else(|| bad("missing kind"))?;
        let p = v.get("params").cloned().unwrap_or(Value::Null);
        let num = |k: &str| p.get(k).and_then(Value::as_u64).ok_or_else(|| bad(k));
        let sub = |k: &str| -> Result<Box<Group>> {
            Ok(Box::new(Group::from_json(p.get(k).ok_or_else(|| bad(k))?)?))
        };
        let g = match kind {
            "FreeAbelian" => Group::FreeAbelian(num("d")? as usize),
            "Free" => Group::Free(num("rank")? as usize),
            "Heisenberg" => Group::Heisenberg(num("l")? as usize),
            "FiniteCyclic" => Group::FiniteCyclic(num("m")?),
            "FiniteSym" => Group::FiniteSym(num("k")? as usize),
            "DirectProduct" => Group::DirectProduct(sub("left")?, sub("right")?),
            "WreathFiniteTop" => Group::WreathFiniteTop { base: sub("base")?, top: sub("top")? },
            "Lamplighter" => Group::Lamplighter(sub("base")?),
            _ => return Err(bad("unknown kind")),
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        match self {
            Group::FiniteCyclic(0) => Err(Error::Invalid("cyclic group of order 0".into())),
            Group::Free(r) if *r > 26 => Err(Error::Invalid("free rank above 26".into())),
            Group::WreathFiniteTop { base, top } => {
                base.validate()?;
                top.validate()?;
                if top.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Invalid("wreath top must be finite".into()))
                }
            }
            Group::Lamplighter(base) => {
                base.validate()?;
                if base.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Invalid("lamplighter base must be finite".into()))
                }
            }
            Group::DirectProduct(a, b) => {
                a.validate()?;
                b.validate()
            }
            _ => Ok(()),
        }
    }

    /// Parses either a JSON descriptor or a short name such as `Z`, `Z^2`, `F_2`, `H_1`,
    /// `C_5`, `S_4`, `Z x C_2`, `C_2 wr Z`.
    pub fn parse(s: &str) -> Result<Group> {
        let s = s.trim();
        if s.starts_with('{') {
            let v: Value = serde_json::from_str(s).map_err(|e| Error::Invalid(e.to_string()))?;
            return Group::from_json(&v);
        }
        if let Some((a, b)) = s.split_once(" x ") {
            return Ok(Group::product(Group::parse(a)?, Group::parse(b)?));
        }
        if let Some((a, b)) = s.split_once(" wr ") {
            let base = Group::parse(a)?;
            let top = Group::parse(b)?;
            let g = if top == Group::z() {
                Group::Lamplighter(Box::new(base))
            } else {
                Group::WreathFiniteTop { base: Box::new(base), top: Box::new(top) }
            };
            g.validate()?;
            return Ok(g);
        }
        let bad = || Error::Invalid(format!("unknown group name {s}"));
        let arg = |rest: &str| -> Result<u64> {
            rest.trim_start_matches(['^', '_']).parse::<u64>().map_err(|_| bad())
        };
        let g = match s {
            "Z" => Group::z(),
            "H" | "Heisenberg" => Group::Heisenberg(1),
            _ if s.starts_with("Z") => Group::FreeAbelian(arg(&s[1..])? as usize),
            _ if s.starts_with("F") => Group::Free(arg(&s[1..])? as usize),
            _ if s.starts_with("H") => Group::Heisenberg(arg(&s[1..])? as usize),
            _ if s.starts_with("C") => Group::FiniteCyclic(arg(&s[1..])?),
            _ if s.starts_with("S") => Group::FiniteSym(arg(&s[1..])? as usize),
            _ => return Err(bad()),
        };
        g.validate()?;
        Ok(g)
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::FreeAbelian(1) => write!(f, "Z"),
            Group::FreeAbelian(d) => write!(f, "Z^{d}"),
            Group::Free(r) => write!(f, "F_{r}"),
            Group::Heisenberg(l) => write!(f, "H_{l}"),
            Group::FiniteCyclic(m) => write!(f, "C_{m}"),
            Group::FiniteSym(k) => write!(f, "S_{k}"),
            Group::DirectProduct(a, b) => write!(f, "({a} x {b})"),
            Group::WreathFiniteTop { base, top } => write!(f, "({base} wr {top})"),
            Group::Lamplighter(base) => write!(f, "({base} wr Z)"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heisenberg_example_product() {
        let h = Group::Heisenberg(1);
        let x = Elem::Heis { a: vec![1], b: vec![0], c: 0 };
        let y = Elem::Heis { a: vec![0], b: vec![1], c: 0 };
        assert_eq!(h.multiply(&x, &y).unwrap(), Elem::Heis { a: vec![1], b: vec![1], c: 1 });
        let z = h.eval_word(&[1, 2, -1, -2]);
        assert_eq!(z, Elem::Heis { a: vec![0], b: vec![0], c: 1 });
    }

    #[test]
    fn free_reduction() {
        let f = Group::Free(2);
        let x = Elem::Word(vec![1]);
        assert_eq!(f.multiply(&x, &f.inverse(&x)).unwrap(), Elem::Word(vec![]));
    }

    #[test]
    fn mismatch_is_an_error() {
        let z2 = Group::FreeAbelian(2);
        assert!(z2.multiply(&Elem::Int(vec![1]), &Elem::Int(vec![0, 1])).is_err());
        assert!(z2.multiply(&Elem::Res(1), &Elem::Int(vec![0, 1])).is_err());
    }

    #[test]
    fn lamplighter_shift() {
        let g = Group::lamplighter(Group::FiniteCyclic(2));
        let a = g.free_generators()[0].clone();
        let t = g.free_generators()[1].clone();
        let tat = g.mul(&g.mul(&t, &a), &g.inverse(&t));
        assert_eq!(tat, Elem::Wreath { support: vec![(Elem::Int(vec![1]), Elem::Res(1))], top: Box::new(Elem::Int(vec![0])) });
        assert_eq!(g.mul(&a, &a), g.identity());
    }

    #[test]
    fn descriptors_round_trip() {
        for s in ["Z", "Z^2", "F_2", "H_1", "C_5", "S_4", "Z x C_2", "C_2 wr Z", "C_2 wr C_3"] {
            let g = Group::parse(s).unwrap();
            assert_eq!(Group::from_json(&g.to_json()).unwrap(), g);
            assert_eq!(Group::parse(&g.to_json().to_string()).unwrap(), g);
        }
    }

    #[test]
    fn normal_forms_round_trip() {
        for g in [Group::Heisenberg(2), Group::parse("C_2 wr Z").unwrap(), Group::parse("Z x S_3").unwrap()] {
            for e in ball(&g, 2).unwrap().elements {
                assert_eq!(g.parse_normal_form(&g.normal_form(&e)).unwrap(), e);
            }
        }
    }

    #[test]
    fn relators_hold() {
        for g in [Group::FreeAbelian(3), Group::Heisenberg(1), Group::Heisenberg(2), Group::FiniteCyclic(6)] {
            for r in g.relators().unwrap() {
                assert!(g.is_identity(&g.eval_word(&r)), "{g} {r:?}");
            }
        }
    }
}
