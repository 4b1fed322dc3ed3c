//! Prime fields, the affine plane `AG(2,p)` and the parallel-class relations
//! `R_0, …, R_p` partitioning `U_0 × U_0 − Id`.
//!
//! Points `(a, b)` are numbered row-major, `a·p + b`. Class `i < p` holds the
//! lines of slope `i` (`b' − b = i·(a' − a)`), class `p` the vertical lines.

use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::report::{CheckRecord, CheckReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeField {
    p: u64,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 {
            return Err(Error::InvalidParameter(format!(
                "field order must be an odd prime >= 3, got {p}"
            )));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn order(&self) -> u64 {
        self.p
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.p - b % self.p) % self.p
    }

    pub fn neg(&self, a: u64) -> u64 {
        (self.p - a % self.p) % self.p
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a * b) % self.p
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        let a = a % self.p;
        if a == 0 {
            return None;
        }
        // a^(p-2) by square-and-multiply
        let (mut base, mut e, mut acc) = (a, self.p - 2, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        Some(acc)
    }
}

/// A binary relation on `0..n`, stored as an `n × n` bit matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinaryRelation {
    n: usize,
    bits: BitSet,
}

impl BinaryRelation {
    pub fn empty(n: usize) -> Self {
        BinaryRelation {
            n,
            bits: BitSet::new(n * n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_pairs(n, (0..n).map(|u| (u, u)))
    }

    pub fn full(n: usize) -> Self {
        BinaryRelation {
            n,
            bits: BitSet::full(n * n),
        }
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, usize)>>(n: usize, pairs: I) -> Self {
        let mut r = Self::empty(n);
        for (u, v) in pairs {
            r.insert(u, v);
        }
        r
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.bits.count()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.bits.contains(u * self.n + v)
    }

    pub fn insert(&mut self, u: usize, v: usize) {
        self.bits.insert(u * self.n + v);
    }

    pub fn remove(&mut self, u: usize, v: usize) {
        self.bits.remove(u * self.n + v);
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.bits.iter().map(move |i| (i / self.n, i % self.n))
    }

    pub fn union(&self, other: &Self) -> Self {
        BinaryRelation {
            n: self.n,
            bits: self.bits.union(&other.bits),
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        BinaryRelation {
            n: self.n,
            bits: self.bits.intersection(&other.bits),
        }
    }

    pub fn difference(&self, other: &Self) -> Self {
        BinaryRelation {
            n: self.n,
            bits: self.bits.difference(&other.bits),
        }
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.bits.is_disjoint(&other.bits)
    }

    pub fn converse(&self) -> Self {
        Self::from_pairs(self.n, self.pairs().map(|(u, v)| (v, u)))
    }

    /// Relational product: `(a, b)` such that `(a, c) ∈ self` and `(c, b) ∈ other`.
    pub fn then(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::empty(n);
        let succ: Vec<Vec<usize>> = (0..n)
            .map(|c| (0..n).filter(|&b| other.contains(c, b)).collect())
            .collect();
        for (a, c) in self.pairs() {
            for &b in &succ[c] {
                out.insert(a, b);
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs().all(|(u, v)| self.contains(v, u))
    }

    pub fn is_irreflexive(&self) -> bool {
        (0..self.n).all(|u| !self.contains(u, u))
    }

    pub fn domain(&self) -> BitSet {
        BitSet::from_indices(self.n, self.pairs().map(|(u, _)| u))
    }

    /// First pair violating transitivity, if any.
    pub fn transitivity_witness(&self) -> Option<(usize, usize, usize)> {
        for (a, b) in self.pairs() {
            for c in 0..self.n {
                if self.contains(b, c) && !self.contains(a, c) {
                    return Some((a, b, c));
                }
            }
        }
        None
    }

    /// Classes of the relation read as an equivalence on its field, in order of least element.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for u in 0..self.n {
            if seen[u] || !self.contains(u, u) && (0..self.n).all(|v| !self.contains(u, v)) {
                continue;
            }
            let class: Vec<usize> = (0..self.n)
                .filter(|&v| v == u || self.contains(u, v))
                .collect();
            for &v in &class {
                seen[v] = true;
            }
            out.push(class);
        }
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AffinePlane {
    pub field: PrimeField,
    /// `classes[i][j]` is line `L_{i,j}` as sorted point indices.
    pub classes: Vec<Vec<Vec<usize>>>,
}

impl AffinePlane {
    pub fn new(field: PrimeField) -> Self {
        let p = field.order();
        let idx = |a: u64, b: u64| (a * p + b) as usize;
        let mut classes = Vec::with_capacity(p as usize + 1);
        for slope in 0..p {
            let lines = (0..p)
                .map(|c| {
                    let mut line: Vec<usize> = (0..p)
                        .map(|a| idx(a, field.add(c, field.mul(slope, a))))
                        .collect();
                    line.sort_unstable();
                    line
                })
                .collect();
            classes.push(lines);
        }
        classes.push(
            (0..p)
                .map(|a| (0..p).map(|b| idx(a, b)).collect())
                .collect(),
        );
        AffinePlane { field, classes }
    }

    pub fn order(&self) -> usize {
        self.field.order() as usize
    }

    pub fn point_count(&self) -> usize {
        self.order() * self.order()
    }

    pub fn coords(&self, point: usize) -> (usize, usize) {
        (point / self.order(), point % self.order())
    }

    pub fn lines(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.classes.iter().flatten()
    }

    /// Checks the parallel-class structure and that two points span exactly one line.
    pub fn verify(&self) -> CheckReport {
        let p = self.order();
        let n = self.point_count();
        let mut report = CheckReport::new("plane").param("p", p);
        report.push(
            CheckRecord::new(
                "class_counts",
                self.classes.len() == p + 1
                    && self
                        .classes
                        .iter()
                        .all(|c| c.len() == p && c.iter().all(|l| l.len() == p)),
            )
            .with_detail([self.classes.len(), self.lines().count()]),
        );
        let mut bad_class = None;
        for (i, class) in self.classes.iter().enumerate() {
            let mut cover = BitSet::new(n);
            let mut total = 0;
            for line in class {
                for &pt in line {
                    cover.insert(pt);
                    total += 1;
                }
            }
            if !cover.is_full() || total != n {
                bad_class = Some(i);
                break;
            }
        }
        let mut r = CheckRecord::new("classes_partition_points", bad_class.is_none());
        if let Some(i) = bad_class {
            r = r.with_witness(i);
        }
        report.push(r);
        let mut on_lines = vec![0u32; n * n];
        for line in self.lines() {
            for &a in line {
                for &b in line {
                    if a != b {
                        on_lines[a * n + b] += 1;
                    }
                }
            }
        }
        let bad = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .find(|&(a, b)| a != b && on_lines[a * n + b] != 1);
        let mut r = CheckRecord::new("unique_line_through_two_points", bad.is_none())
            .with_detail(n * (n - 1));
        if let Some(w) = bad {
            r = r.with_witness(w);
        }
        report.push(r);
        report.finalize()
    }
}

/// The relations `R_0, …, R_p` (same-line-in-class-`i`, minus identity).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyndonRelations {
    pub rels: Vec<BinaryRelation>,
}

impl LyndonRelations {
    pub fn from_plane(plane: &AffinePlane) -> Self {
        let n = plane.point_count();
        let rels = plane
            .classes
            .iter()
            .map(|class| {
                let mut r = BinaryRelation::empty(n);
                for line in class {
                    for &a in line {
                        for &b in line {
                            if a != b {
                                r.insert(a, b);
                            }
                        }
                    }
                }
                r
            })
            .collect();
        LyndonRelations { rels }
    }

    pub fn points(&self) -> usize {
        self.rels.first().map_or(0, BinaryRelation::size)
    }

    /// `E_i = R_i ∪ Id`.
    pub fn equivalences(&self) -> Vec<BinaryRelation> {
        let id = BinaryRelation::identity(self.points());
        self.rels.iter().map(|r| r.union(&id)).collect()
    }

    /// Checks every defining identity; failures carry the first offending pair.
    pub fn verify(&self) -> CheckReport {
        let n = self.points();
        let k = self.rels.len();
        let mut report = CheckReport::new("verify_lyndon").param("relations", k);
        let id = BinaryRelation::identity(n);
        let diversity = BinaryRelation::full(n).difference(&id);

        let mut overlap = None;
        'outer: for i in 0..k {
            for j in i + 1..k {
                if let Some(pair) = self.rels[i].intersection(&self.rels[j]).pairs().next() {
                    overlap = Some((i, j, pair));
                    break 'outer;
                }
            }
        }
        let mut r = CheckRecord::new("pairwise_disjoint", overlap.is_none());
        if let Some(w) = overlap {
            r = r.with_witness(w);
        }
        report.push(r);

        let union = self
            .rels
            .iter()
            .fold(BinaryRelation::empty(n), |acc, r| acc.union(r));
        let missing = diversity.difference(&union).pairs().next();
        let extra = union.difference(&diversity).pairs().next();
        let mut r = CheckRecord::new("union_is_diversity", missing.is_none() && extra.is_none());
        if let Some(w) = missing.or(extra) {
            r = r.with_witness(w);
        }
        report.push(r);

        let bad_sym = self.rels.iter().enumerate().find_map(|(i, r)| {
            r.pairs()
                .find(|&(u, v)| !r.contains(v, u) || u == v)
                .map(|w| (i, w))
        });
        let mut r = CheckRecord::new("symmetric_irreflexive", bad_sym.is_none());
        if let Some(w) = bad_sym {
            r = r.with_witness(w);
        }
        report.push(r);

        let bad_eq = self
            .equivalences()
            .iter()
            .enumerate()
            .find_map(|(i, e)| e.transitivity_witness().map(|w| (i, w)));
        let mut r = CheckRecord::new("equivalences", bad_eq.is_none());
        if let Some(w) = bad_eq {
            r = r.with_witness(w);
        }
        report.push(r);

        let mut bad_comp = None;
        'comp: for i in 0..k {
            for j in 0..k {
                if i == j {
                    continue;
                }
                let want = diversity
                    .difference(&self.rels[i])
                    .difference(&self.rels[j]);
                let got = self.rels[i].then(&self.rels[j]);
                if got != want {
                    let w = want
                        .difference(&got)
                        .pairs()
                        .next()
                        .or_else(|| got.difference(&want).pairs().next());
                    bad_comp = Some((i, j, w));
                    break 'comp;
                }
            }
        }
        let mut r = CheckRecord::new("composition", bad_comp.is_none());
        if let Some(w) = bad_comp {
            r = r.with_witness(w);
        }
        report.push(r);

        let sizes: Vec<Vec<usize>> = self
            .equivalences()
            .iter()
            .map(|e| e.classes().iter().map(Vec::len).collect())
            .collect();
        let expected = k.saturating_sub(1);
        let bad_size = sizes.iter().enumerate().find_map(|(i, row)| {
            row.iter()
                .position(|&s| s != expected)
                .map(|c| serde_json::json!({"relation": i, "class": c, "size": row[c]}))
        });
        let mut r = CheckRecord::new("class_sizes", bad_size.is_none()).with_detail(&sizes);
        if let Some(w) = bad_size {
            r = r.with_witness(w);
        }
        report.push(r);
        report.finalize()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_arithmetic() {
        let f = PrimeField::new(5).unwrap();
        assert_eq!(f.mul(3, 4), 2);
        assert_eq!(f.inv(2), Some(3));
        assert_eq!(f.inv(0), None);
        assert_eq!(f.sub(1, 3), 3);
        assert_eq!(f.neg(0), 0);
        for a in 1..5 {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
    }

    #[test]
    fn field_rejects_composites_and_small() {
        assert!(matches!(PrimeField::new(9), Err(Error::NotPrime(9))));
        assert!(matches!(PrimeField::new(4), Err(Error::NotPrime(4))));
        assert!(matches!(
            PrimeField::new(2),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn plane_counts() {
        let plane = AffinePlane::new(PrimeField::new(3).unwrap());
        assert_eq!(plane.classes.len(), 4);
        assert_eq!(plane.lines().count(), 12);
        assert!(plane.lines().all(|l| l.len() == 3));
        assert!(plane.verify().passed());
        let plane5 = AffinePlane::new(PrimeField::new(5).unwrap());
        assert_eq!(plane5.classes.len(), 6);
        assert!(plane5.classes.iter().all(|c| c.len() == 5));
        assert!(plane5.verify().passed());
    }

    #[test]
    fn unique_line_check_counts_all_pairs() {
        let plane = AffinePlane::new(PrimeField::new(3).unwrap());
        let rep = plane.verify();
        let rec = rep.record("unique_line_through_two_points").unwrap();
        assert_eq!(rec.detail, Some(serde_json::json!(72)));
    }

    #[test]
    fn lyndon_sizes_p3() {
        let rels = LyndonRelations::from_plane(&AffinePlane::new(PrimeField::new(3).unwrap()));
        assert!(rels.rels.iter().all(|r| r.len() == 18));
        assert_eq!(rels.rels.iter().map(BinaryRelation::len).sum::<usize>(), 72);
        let id = BinaryRelation::identity(9);
        let div = BinaryRelation::full(9).difference(&id);
        let want = div.difference(&rels.rels[0]).difference(&rels.rels[1]);
        assert_eq!(rels.rels[0].then(&rels.rels[1]), want);
    }

    #[test]
    fn lyndon_p5_classes() {
        let rels = LyndonRelations::from_plane(&AffinePlane::new(PrimeField::new(5).unwrap()));
        for e in rels.equivalences() {
            assert!(e.classes().iter().all(|c| c.len() == 5));
        }
        assert!(rels.verify().passed());
    }

    #[test]
    fn verify_detects_corruption() {
        let mut rels = LyndonRelations::from_plane(&AffinePlane::new(PrimeField::new(3).unwrap()));
        assert!(rels.verify().passed());
        let (u, v) = rels.rels[0].pairs().next().unwrap();
        rels.rels[0].remove(u, v);
        rels.rels[0].remove(v, u);
        rels.rels[1].insert(u, v);
        rels.rels[1].insert(v, u);
        let rep = rels.verify();
        assert!(!rep.passed());
        let failed: Vec<_> = rep.failures().collect();
        assert!(failed.iter().all(|r| r.witness.is_some()));
        assert!(rep.record("equivalences").is_some_and(|r| !r.passed()));
    }

    #[test]
    fn symmetric_up_to_seven() {
        for p in [3, 5, 7] {
            let rels = LyndonRelations::from_plane(&AffinePlane::new(PrimeField::new(p).unwrap()));
            for r in &rels.rels {
                assert!(r.is_symmetric() && r.is_irreflexive());
            }
        }
    }
}
