use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Permutation of {0, .., k-1} stored as its image array. Composition is left action:
/// `a.compose(b)` maps i to a(b(i)).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Perm(pub Vec<u32>);

impl Perm {
    pub fn identity(k: usize) -> Perm {
        Perm((0..k as u32).collect())
    }

    pub fn from_images(images: Vec<u32>) -> Option<Perm> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i as usize >= images.len() || seen[i as usize] {
                return None;
            }
            seen[i as usize] = true;
        }
        Some(Perm(images))
    }

    pub fn random<R: Rng>(k: usize, rng: &mut R) -> Perm {
        let mut v: Vec<u32> = (0..k as u32).collect();
        v.shuffle(rng);
        Perm(v)
    }

    /// Cyclic shift i -> i + s mod k.
    pub fn shift(k: usize, s: i64) -> Perm {
        let k64 = k as i64;
        Perm((0..k64).map(|i| (i + s).rem_euclid(k64) as u32).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut out = vec![0u32; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            out[j as usize] = i as u32;
        }
        Perm(out)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    pub fn fixed_points(&self) -> usize {
        self.0.iter().enumerate().filter(|(i, &j)| *i as u32 == j).count()
    }

    /// Number of cycles, fixed points included.
    pub fn cycles(&self) -> usize {
        let mut seen = vec![false; self.0.len()];
        let mut c = 0;
        for s in 0..self.0.len() {
            if !seen[s] {
                c += 1;
                let mut i = s;
                while !seen[i] {
                    seen[i] = true;
                    i = self.0[i] as usize;
                }
            }
        }
        c
    }

    pub fn disagreements(&self, other: &Perm) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }

    /// Normalized Hamming distance. Panics on degree mismatch; see `targets::ham_distance`.
    pub fn ham(&self, other: &Perm) -> Ratio<i64> {
        assert_eq!(self.degree(), other.degree());
        Ratio::new(self.disagreements(other) as i64, self.degree().max(1) as i64)
    }

    /// Direct sum acting on {0..k} followed by {k..k+q}.
    pub fn block_sum(&self, other: &Perm) -> Perm {
        let k = self.0.len() as u32;
        let mut v = self.0.clone();
        v.extend(other.0.iter().map(|&i| i + k));
        Perm(v)
    }

    /// Product action on pairs (i, j) encoded as i * q + j.
    pub fn product_action(&self, other: &Perm) -> Perm {
        let q = other.0.len() as u32;
        let mut v = Vec::with_capacity(self.0.len() * other.0.len());
        for &i in &self.0 {
            for &j in &other.0 {
                v.push(i * q + j);
            }
        }
        Perm(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn left_action_convention() {
        let s = Perm(vec![1, 0, 2]);
        let t = Perm(vec![2, 1, 0]);
        // (s t)(0) = s(t(0)) = s(2) = 2
        assert_eq!(s.compose(&t).apply(0), 2);
        assert!(s.compose(&s.inverse()).is_identity());
    }

    #[test]
    fn transposition_distance() {
        let t = Perm(vec![1, 0, 2, 3]);
        assert_eq!(t.ham(&Perm::identity(4)), Ratio::new(1, 2));
        assert_eq!(t.cycles(), 3);
    }

    #[test]
    fn product_action_is_multiplicative() {
        let a = Perm(vec![1, 2, 0]);
        let b = Perm(vec![1, 0]);
        let c = Perm(vec![2, 0, 1]);
        let d = Perm(vec![0, 1]);
        assert_eq!(
            a.product_action(&b).compose(&c.product_action(&d)),
            a.compose(&c).product_action(&b.compose(&d))
        );
    }
}
