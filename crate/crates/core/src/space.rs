//! The tuple space `U^α` and the concrete operations of the full polyadic
//! equality set algebra on it.
//!
//! Tuples are numbered in mixed radix with coordinate 0 most significant, so
//! tuple `s` has index `Σ s_l · n^(α−1−l)`.

use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::geometry::BinaryRelation;
use crate::perm::Perm;

/// A subset of `U^α`, as a set of tuple indices.
pub type Relation = BitSet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Space {
    n: usize,
    alpha: usize,
    strides: Vec<usize>,
    size: usize,
}

impl Space {
    pub fn new(n: usize, alpha: usize) -> Result<Self> {
        if n == 0 || alpha == 0 {
            return Err(Error::InvalidParameter("empty space".into()));
        }
        let size = n
            .checked_pow(alpha as u32)
            .filter(|&s| s <= u32::MAX as usize)
            .ok_or_else(|| Error::InvalidParameter(format!("{n}^{alpha} tuples is too many")))?;
        let strides = (0..alpha).map(|l| n.pow((alpha - 1 - l) as u32)).collect();
        Ok(Space {
            n,
            alpha,
            strides,
            size,
        })
    }

    pub fn base_size(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    /// Number of tuples, `n^α`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn stride(&self, coord: usize) -> usize {
        self.strides[coord]
    }

    #[inline]
    pub fn encode(&self, tuple: &[usize]) -> usize {
        tuple.iter().zip(&self.strides).map(|(&u, &s)| u * s).sum()
    }

    #[inline]
    pub fn coord(&self, idx: usize, l: usize) -> usize {
        idx / self.strides[l] % self.n
    }

    pub fn decode(&self, idx: usize) -> Vec<usize> {
        (0..self.alpha).map(|l| self.coord(idx, l)).collect()
    }

    pub fn empty(&self) -> Relation {
        BitSet::new(self.size)
    }

    pub fn unit(&self) -> Relation {
        BitSet::full(self.size)
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.alpha {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                alpha: self.alpha,
            })
        }
    }

    pub fn from_tuples<'a, I>(&self, tuples: I) -> Relation
    where
        I: IntoIterator<Item = &'a [usize]>,
    {
        BitSet::from_indices(self.size, tuples.into_iter().map(|t| self.encode(t)))
    }

    /// `{ s : s_0 s_1 ∈ rel, s_l ∈ tail[l-2] }`, the relation `rel × tail`.
    pub fn binary_times(&self, rel: &BinaryRelation, tail: &[Vec<usize>]) -> Relation {
        assert_eq!(tail.len() + 2, self.alpha);
        let mut out = self.empty();
        let mut tuple = vec![0; self.alpha];
        for (u, v) in rel.pairs() {
            tuple[0] = u;
            tuple[1] = v;
            self.fill_tail(&mut tuple, 2, tail, &mut out);
        }
        out
    }

    fn fill_tail(&self, tuple: &mut [usize], at: usize, tail: &[Vec<usize>], out: &mut Relation) {
        if at == self.alpha {
            out.insert(self.encode(tuple));
            return;
        }
        for &u in &tail[at - 2] {
            tuple[at] = u;
            self.fill_tail(tuple, at + 1, tail, out);
        }
    }

    /// `C_i(X)`: tuples agreeing off coordinate `i` with some member of `X`.
    pub fn cyl(&self, i: usize, x: &Relation) -> Result<Relation> {
        self.check_index(i)?;
        let stride = self.strides[i];
        let mut out = self.empty();
        for t in x.iter() {
            let base = t - self.coord(t, i) * stride;
            if out.contains(base) {
                continue;
            }
            for v in 0..self.n {
                out.insert(base + v * stride);
            }
        }
        Ok(out)
    }

    /// `D_ij`: tuples with equal `i`-th and `j`-th coordinates.
    pub fn diag(&self, i: usize, j: usize) -> Result<Relation> {
        self.check_index(i)?;
        self.check_index(j)?;
        Ok(BitSet::from_indices(
            self.size,
            (0..self.size).filter(|&t| self.coord(t, i) == self.coord(t, j)),
        ))
    }

    /// `S_τ(X) = { s : s∘τ ∈ X }`.
    pub fn s_tau(&self, tau: &Perm, x: &Relation) -> Result<Relation> {
        if tau.degree() != self.alpha {
            return Err(Error::InvalidParameter(format!(
                "permutation of degree {} on a space of dimension {}",
                tau.degree(),
                self.alpha
            )));
        }
        // t = s∘τ ∈ X, so s_{τ(l)} = t_l
        let target: Vec<usize> = (0..self.alpha)
            .map(|l| self.strides[tau.apply(l)])
            .collect();
        let mut out = self.empty();
        for t in x.iter() {
            let s: usize = (0..self.alpha).map(|l| self.coord(t, l) * target[l]).sum();
            out.insert(s);
        }
        Ok(out)
    }

    /// `P_ij(X)`: swap coordinates `i` and `j`.
    pub fn transp(&self, i: usize, j: usize, x: &Relation) -> Result<Relation> {
        self.check_index(i)?;
        self.check_index(j)?;
        self.s_tau(&Perm::transposition(self.alpha, i, j), x)
    }

    /// The space over a base of twice the size, in which `u + n` is the copy of `u`.
    pub fn doubled(&self) -> Result<Space> {
        Space::new(2 * self.n, self.alpha)
    }

    /// `F(X) = ⋃ { s'_0 × … × s'_{α−1} : s ∈ X }` where `u' = {u, u + n}`,
    /// as a relation of `target` (which must be [`Space::doubled`]).
    pub fn double_relation(&self, x: &Relation, target: &Space) -> Relation {
        assert_eq!(target.n, 2 * self.n);
        assert_eq!(target.alpha, self.alpha);
        let mut out = target.empty();
        let mut tuple = vec![0; self.alpha];
        for t in x.iter() {
            for mask in 0..1usize << self.alpha {
                for (l, slot) in tuple.iter_mut().enumerate() {
                    *slot = self.coord(t, l) + ((mask >> l) & 1) * self.n;
                }
                out.insert(target.encode(&tuple));
            }
        }
        out
    }

    /// Index of the tuple obtained by swapping coordinates `i`, `j` of tuple `t`.
    #[inline]
    pub fn swap_index(&self, t: usize, i: usize, j: usize) -> usize {
        let (a, b) = (self.coord(t, i), self.coord(t, j));
        t + b * self.strides[i] + a * self.strides[j] - a * self.strides[i] - b * self.strides[j]
    }
}

/// The base set `U = U_0 ∪ U_1 ∪ … ∪ U_{α−2}` with `|U_0| = p²` (the plane's
/// points) and `|U_k| = p − 1` for `k ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseSet {
    pub p: usize,
    pub alpha: usize,
    pub space: Space,
}

impl BaseSet {
    pub fn new(p: usize, alpha: usize) -> Result<Self> {
        if alpha < 3 {
            return Err(Error::InvalidParameter(format!(
                "dimension must be at least 3, got {alpha}"
            )));
        }
        if p < 3 {
            return Err(Error::InvalidParameter(format!("p must be >= 3, got {p}")));
        }
        let n = p * p + (alpha - 2) * (p - 1);
        Ok(BaseSet {
            p,
            alpha,
            space: Space::new(n, alpha)?,
        })
    }

    pub fn size(&self) -> usize {
        self.space.base_size()
    }

    pub fn block_count(&self) -> usize {
        self.alpha - 1
    }

    /// Elements of block `k` (`U_0` for `k = 0`).
    pub fn block(&self, k: usize) -> Vec<usize> {
        let p = self.p;
        if k == 0 {
            (0..p * p).collect()
        } else {
            let start = p * p + (k - 1) * (p - 1);
            (start..start + p - 1).collect()
        }
    }

    pub fn block_of(&self, u: usize) -> usize {
        let p2 = self.p * self.p;
        if u < p2 {
            0
        } else {
            1 + (u - p2) / (self.p - 1)
        }
    }

    /// The labeling `f` sending each `U_k` (`k ≥ 1`) bijectively onto `0..p−1`;
    /// on `U_0` it returns the point index.
    pub fn label(&self, u: usize) -> usize {
        let p2 = self.p * self.p;
        if u < p2 {
            u
        } else {
            (u - p2) % (self.p - 1)
        }
    }

    /// The blocks `U_1, …, U_{α−2}` whose product is `T`.
    pub fn tail_blocks(&self) -> Vec<Vec<usize>> {
        (1..self.alpha - 1).map(|k| self.block(k)).collect()
    }

    /// `rel × T` for a binary relation on `U_0`, lifted to indices of `U`.
    pub fn times_t(&self, rel: &BinaryRelation) -> Relation {
        let lifted = self.lift_binary(rel);
        self.space.binary_times(&lifted, &self.tail_blocks())
    }

    /// Re-embeds a relation on `U_0` (indices `0..p²`) into `U`.
    pub fn lift_binary(&self, rel: &BinaryRelation) -> BinaryRelation {
        BinaryRelation::from_pairs(self.size(), rel.pairs())
    }

    /// Elements of `T`, in lexicographic order.
    pub fn t_tuples(&self) -> Vec<Vec<usize>> {
        let blocks = self.tail_blocks();
        let mut out = vec![Vec::new()];
        for b in &blocks {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    b.iter().map(move |&u| {
                        let mut t = prefix.clone();
                        t.push(u);
                        t
                    })
                })
                .collect();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_decode() {
        let s = Space::new(3, 3).unwrap();
        assert_eq!(s.size(), 27);
        assert_eq!(s.encode(&[1, 2, 0]), 9 + 6);
        assert_eq!(s.decode(15), vec![1, 2, 0]);
        for t in 0..27 {
            assert_eq!(s.encode(&s.decode(t)), t);
            for i in 0..3 {
                for j in 0..3 {
                    let mut d = s.decode(t);
                    d.swap(i, j);
                    assert_eq!(s.swap_index(t, i, j), s.encode(&d));
                }
            }
        }
    }

    #[test]
    fn transposing_own_diagonal_is_identity() {
        let s = Space::new(3, 3).unwrap();
        let d01 = s.diag(0, 1).unwrap();
        assert_eq!(s.transp(0, 1, &d01).unwrap(), d01);
        assert_eq!(s.diag(1, 1).unwrap(), s.unit());
    }

    #[test]
    fn cylindrify_fills_fiber() {
        let s = Space::new(3, 3).unwrap();
        let x = s.from_tuples([&[0usize, 1, 2][..]]);
        let c = s.cyl(1, &x).unwrap();
        assert_eq!(c.count(), 3);
        for v in 0..3 {
            assert!(c.contains(s.encode(&[0, v, 2])));
        }
        assert!(matches!(s.cyl(3, &x), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn s_tau_matches_definition() {
        let s = Space::new(3, 3).unwrap();
        let x = s.from_tuples([&[0usize, 1, 2][..], &[2, 2, 1][..]]);
        for tau in Perm::all(3) {
            let got = s.s_tau(&tau, &x).unwrap();
            for t in 0..27 {
                let sv = s.decode(t);
                let composed: Vec<usize> = (0..3).map(|l| sv[tau.apply(l)]).collect();
                assert_eq!(got.contains(t), x.contains(s.encode(&composed)));
            }
        }
        assert_eq!(s.s_tau(&Perm::identity(3), &x).unwrap(), x);
    }

    #[test]
    fn base_blocks() {
        let b = BaseSet::new(3, 4).unwrap();
        assert_eq!(b.size(), 13);
        assert_eq!(b.block(1), vec![9, 10]);
        assert_eq!(b.block(2), vec![11, 12]);
        assert_eq!(b.block_of(12), 2);
        assert_eq!(b.label(12), 1);
        assert_eq!(b.t_tuples().len(), 4);
        assert!(BaseSet::new(3, 2).is_err());
    }
}
