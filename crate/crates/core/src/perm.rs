//! Permutations of `α = {0, …, α−1}`.
//!
//! Composition follows function notation: `tau.compose(&sigma)` is `τ∘σ`,
//! the map `x ↦ τ(σ(x))`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm {
            images: (0..degree).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            if x >= images.len() || std::mem::replace(&mut seen[x], true) {
                return Err(Error::InvalidParameter(format!(
                    "{images:?} is not a permutation"
                )));
            }
        }
        Ok(Perm { images })
    }

    /// The transposition `[i, j]`; the identity when `i = j`.
    pub fn transposition(degree: usize, i: usize, j: usize) -> Self {
        let mut images: Vec<usize> = (0..degree).collect();
        images.swap(i, j);
        Perm { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        Perm {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x] = i;
        }
        Perm { images }
    }

    /// The plus-normal form: `τ` if `τ(0) < τ(1)`, else `τ∘[0,1]`.
    pub fn plus(&self) -> Perm {
        if self.degree() < 2 || self.images[0] < self.images[1] {
            self.clone()
        } else {
            let mut images = self.images.clone();
            images.swap(0, 1);
            Perm { images }
        }
    }

    pub fn is_plus_normal(&self) -> bool {
        self.degree() < 2 || self.images[0] < self.images[1]
    }

    /// A word `[i₁,j₁], …, [iₘ,jₘ]` of adjacent transpositions whose
    /// composition `[i₁,j₁]∘…∘[iₘ,jₘ]` is `self`.
    ///
    /// Bubble-sorting the image list performs `τ∘s₁∘…∘sₘ = Id`, so the word is
    /// the swap sequence reversed.
    pub fn word(&self) -> Vec<(usize, usize)> {
        let mut images = self.images.clone();
        let mut swaps = Vec::new();
        let n = images.len();
        for pass in 0..n {
            for k in 0..n.saturating_sub(1 + pass) {
                if images[k] > images[k + 1] {
                    images.swap(k, k + 1);
                    swaps.push((k, k + 1));
                }
            }
        }
        swaps.reverse();
        swaps
    }

    pub fn from_word(degree: usize, word: &[(usize, usize)]) -> Perm {
        word.iter().fold(Perm::identity(degree), |acc, &(i, j)| {
            acc.compose(&Perm::transposition(degree, i, j))
        })
    }

    /// All permutations of the given degree, in lexicographic order of images.
    pub fn all(degree: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut images: Vec<usize> = (0..degree).collect();
        loop {
            out.push(Perm {
                images: images.clone(),
            });
            // next lexicographic permutation
            let Some(k) = (1..degree).rev().find(|&k| images[k - 1] < images[k]) else {
                break;
            };
            let pivot = k - 1;
            let swap_with = (k..degree)
                .rev()
                .find(|&l| images[l] > images[pivot])
                .unwrap();
            images.swap(pivot, swap_with);
            images[k..].reverse();
        }
        out
    }

    /// Permutations with `τ(0) < τ(1)`, in lexicographic order.
    pub fn all_plus(degree: usize) -> Vec<Perm> {
        Perm::all(degree)
            .into_iter()
            .filter(Perm::is_plus_normal)
            .collect()
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.images)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.images)
    }
}

impl TryFrom<Vec<usize>> for Perm {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Perm::from_images(v)
    }
}

impl From<Perm> for Vec<usize> {
    fn from(p: Perm) -> Self {
        p.images
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plus_normal_form() {
        assert!(Perm::transposition(3, 0, 1).plus().is_identity());
        assert!(Perm::identity(3).plus().is_identity());
        let tau = Perm::from_images(vec![2, 0, 1]).unwrap();
        assert_eq!(tau.plus().images(), &[0, 2, 1]);
    }

    #[test]
    fn words_compose_back() {
        assert!(Perm::identity(4).word().is_empty());
        assert_eq!(Perm::transposition(3, 0, 1).word(), vec![(0, 1)]);
        let cycle = Perm::from_images(vec![1, 2, 0]).unwrap();
        assert_eq!(cycle.word(), vec![(0, 1), (1, 2)]);
        for d in 1..=5 {
            for tau in Perm::all(d) {
                assert_eq!(Perm::from_word(d, &tau.word()), tau);
            }
        }
    }

    #[test]
    fn enumeration() {
        assert_eq!(Perm::all(3).len(), 6);
        assert_eq!(Perm::all(4).len(), 24);
        assert_eq!(Perm::all_plus(4).len(), 12);
        let all = Perm::all(4);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn group_laws() {
        let perms = Perm::all(4);
        for a in &perms {
            assert!(a.compose(&a.inverse()).is_identity());
            for b in perms.iter().step_by(5) {
                for c in perms.iter().step_by(7) {
                    assert_eq!(a.compose(b).compose(c), a.compose(&b.compose(c)));
                }
            }
        }
    }

    #[test]
    fn rejects_non_bijection() {
        assert!(Perm::from_images(vec![0, 0, 1]).is_err());
        assert!(Perm::from_images(vec![0, 3, 1]).is_err());
        assert!(serde_json::from_str::<Perm>("[1,1]").is_err());
    }
}
