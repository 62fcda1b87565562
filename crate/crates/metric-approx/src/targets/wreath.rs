use super::finite::FiniteMetricGroup;
use super::perm::Perm;
use super::Target;
use crate::error::{Error, Result};
use std::sync::Arc;

/// Element (b, x) of G ≀ F for a finite table group F: b is a function F -> G listed by table
/// index, x is an index of F.
#[derive(Clone, Debug, PartialEq)]
pub struct WreathElem {
    pub top_group: Arc<FiniteMetricGroup>,
    pub base: Vec<Target>,
    pub top: u32,
}

impl WreathElem {
    pub fn identity(top_group: Arc<FiniteMetricGroup>, base_identity: &Target) -> WreathElem {
        let base = vec![base_identity.clone(); top_group.order()];
        let top = top_group.identity;
        WreathElem { top_group, base, top }
    }

    fn same(&self, other: &WreathElem) -> Result<()> {
        if !Arc::ptr_eq(&self.top_group, &other.top_group) && self.top_group != other.top_group {
            return Err(Error::KindMismatch("wreath elements over different top groups".into()));
        }
        Ok(())
    }

    /// (b, x)(b', x') = (y -> b(y) b'(x^-1 y), x x').
    pub fn mul(&self, other: &WreathElem) -> Result<WreathElem> {
        self.same(other)?;
        let f = &self.top_group;
        let xi = f.inv(self.top);
        let base = (0..f.order() as u32)
            .map(|y| self.base[y as usize].mul(&other.base[f.mul(xi, y) as usize]))
            .collect::<Result<_>>()?;
        Ok(WreathElem { top_group: f.clone(), base, top: f.mul(self.top, other.top) })
    }

    /// (b, x)^-1 = (y -> b(x y)^-1, x^-1).
    pub fn inverse(&self) -> Result<WreathElem> {
        let f = &self.top_group;
        let base = (0..f.order() as u32)
            .map(|y| self.base[f.mul(self.top, y) as usize].inverse())
            .collect::<Result<_>>()?;
        Ok(WreathElem { top_group: f.clone(), base, top: f.inv(self.top) })
    }
}

/// Element (sigma, b) of Sym(A) ⋉ G^A, the bell b indexed by points of A.
#[derive(Clone, Debug, PartialEq)]
pub struct PermWreathElem {
    pub sigma: Perm,
    pub bell: Vec<Target>,
}

impl PermWreathElem {
    pub fn identity(points: usize, base_identity: &Target) -> PermWreathElem {
        PermWreathElem { sigma: Perm::identity(points), bell: vec![base_identity.clone(); points] }
    }

    /// (s1, b1)(s2, b2) = (s1 s2, a -> b1(s2(a)) b2(a)).
    pub fn mul(&self, other: &PermWreathElem) -> Result<PermWreathElem> {
        if self.sigma.degree() != other.sigma.degree() {
            return Err(Error::DimensionMismatch(self.sigma.degree(), other.sigma.degree()));
        }
        let bell = (0..self.sigma.degree())
            .map(|a| self.bell[other.sigma.apply(a)].mul(&other.bell[a]))
            .collect::<Result<_>>()?;
        Ok(PermWreathElem { sigma: self.sigma.compose(&other.sigma), bell })
    }

    /// (s, b)^-1 = (s^-1, a -> b(s^-1(a))^-1).
    pub fn inverse(&self) -> Result<PermWreathElem> {
        let si = self.sigma.inverse();
        let bell = (0..si.degree()).map(|a| self.bell[si.apply(a)].inverse()).collect::<Result<_>>()?;
        Ok(PermWreathElem { sigma: si, bell })
    }
}
