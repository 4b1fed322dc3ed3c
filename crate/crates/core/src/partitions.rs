//! Partitions of `R_0 × T` and of `T`.
//!
//! Within each class-0 line `W` the vertices `w_0, …, w_{p−1}` are the line's
//! points in increasing index order. Tail tuples `t ∈ T` are numbered in
//! lexicographic order of their elements.

use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::geometry::AffinePlane;
use crate::perm::Perm;
use crate::report::{CheckRecord, CheckReport};
use crate::space::{BaseSet, Relation, Space};

/// The partition `T_0, …, T_{p−2}` of `T` by label sum modulo `p − 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPartition {
    pub p: usize,
    /// Elements of `T` in lexicographic order.
    pub tuples: Vec<Vec<usize>>,
    /// `part_of[t]` is the part containing `tuples[t]`.
    pub part_of: Vec<usize>,
    /// Candidate elements per tail coordinate.
    blocks: Vec<Vec<usize>>,
}

impl BlockPartition {
    pub fn count(&self) -> usize {
        self.p - 1
    }

    pub fn part(&self, i: usize) -> Vec<&[usize]> {
        self.tuples
            .iter()
            .zip(&self.part_of)
            .filter(|&(_, &k)| k == i)
            .map(|(t, _)| t.as_slice())
            .collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.count()];
        for &k in &self.part_of {
            sizes[k] += 1;
        }
        sizes
    }

    /// Checks that the parts cover `T` and that `T ⊆ C_j(T_i)` for every `i`, `j`.
    pub fn verify(&self) -> CheckReport {
        let mut report = CheckReport::new("block_partition").param("p", self.p);
        let sizes = self.sizes();
        report.push(
            CheckRecord::new("parts_nonempty", sizes.iter().all(|&s| s > 0)).with_detail(&sizes),
        );
        let index: std::collections::HashMap<&[usize], usize> = self
            .tuples
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_slice(), i))
            .collect();
        let mut witness = None;
        'outer: for part in 0..self.count() {
            for t in &self.tuples {
                for (j, block) in self.blocks.iter().enumerate() {
                    let hit = block.iter().any(|&a| {
                        let mut s = t.clone();
                        s[j] = a;
                        self.part_of[index[s.as_slice()]] == part
                    });
                    if !hit {
                        witness = Some((part, j, t.clone()));
                        break 'outer;
                    }
                }
            }
        }
        let mut rec = CheckRecord::new("cylinder_big", witness.is_none());
        if let Some(w) = witness {
            rec = rec.with_witness(w);
        }
        report.push(rec);
        report.finalize()
    }
}

pub fn block_partition(base: &BaseSet) -> BlockPartition {
    let modulus = base.p - 1;
    let tuples = base.t_tuples();
    let part_of = tuples
        .iter()
        .map(|t| t.iter().map(|&u| base.label(u)).sum::<usize>() % modulus)
        .collect();
    BlockPartition {
        p: base.p,
        tuples,
        part_of,
        blocks: base.tail_blocks(),
    }
}

/// Which perfect matchings pair the second component of the bipartite graph
/// in the `Q` construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchingScheme {
    /// `(S_{p'+i}, z_{p'+((i−k) mod p')})`: the second component is matched by
    /// the reflected shift, which makes `P_01(Q_k) = Q_{p−2−k}` hold for all `p`.
    #[default]
    Reflected,
    /// `(S_{p'+i}, z_{p'+((i+k) mod p')})`, the same shift as the first
    /// component. Agrees with `Reflected` for `p ≤ 5`.
    Shifted,
}

/// The three-dimensional system `S_0, …, S_{p−2}` partitioning `R_0 × U_1`,
/// described by the class of `(a, b, z_l)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QSystem {
    pub p: usize,
    pub scheme: MatchingScheme,
    /// `(line, position)` of each point among the class-0 lines.
    position: Vec<(usize, usize)>,
}

impl QSystem {
    pub fn new(plane: &AffinePlane, scheme: MatchingScheme) -> Self {
        let mut position = vec![(0, 0); plane.point_count()];
        for (j, line) in plane.classes[0].iter().enumerate() {
            for (k, &v) in line.iter().enumerate() {
                position[v] = (j, k);
            }
        }
        QSystem {
            p: plane.order(),
            scheme,
            position,
        }
    }

    fn half(&self) -> usize {
        (self.p - 1) / 2
    }

    /// The cyclic class `i` with `(v_k, v_{i+k+1}) ∈ S_i`, if `a ≠ b` share a class-0 line.
    pub fn cyclic_class(&self, a: usize, b: usize) -> Option<usize> {
        let (la, ka) = self.position[a];
        let (lb, kb) = self.position[b];
        (la == lb && ka != kb).then(|| (kb + 2 * self.p - ka - 1) % self.p)
    }

    /// The `k < p'` whose matching contains the edge `(S_i, z_l)` of the bipartite graph.
    fn edge_matching(&self, i: usize, l: usize) -> usize {
        let h = self.half();
        if i < h {
            (l + h - i) % h
        } else {
            let (i, l) = (i - h, l - h);
            match self.scheme {
                MatchingScheme::Shifted => (l + h - i) % h,
                MatchingScheme::Reflected => (i + h - l) % h,
            }
        }
    }

    /// The `k` with `(S_i, z_l) ∈ E_k`.
    pub fn matching(&self, i: usize, l: usize) -> usize {
        let h = self.half();
        if (i < h) == (l < h) {
            self.edge_matching(i, l)
        } else {
            self.p - 2 - self.edge_matching(i, self.p - 2 - l)
        }
    }

    /// The pairs `(i, l)` of `E_k`.
    pub fn matching_pairs(&self, k: usize) -> Vec<(usize, usize)> {
        let n = self.p - 1;
        (0..n)
            .flat_map(|i| (0..n).map(move |l| (i, l)))
            .filter(|&(i, l)| self.matching(i, l) == k)
            .collect()
    }

    /// The index `k` of the part containing `(a, b, z_l)`, if `(a, b) ∈ R_0`.
    pub fn class(&self, a: usize, b: usize, l: usize) -> Option<usize> {
        self.cyclic_class(a, b).map(|i| self.matching(i, l))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Q,
    K,
    HCylfree,
    HDiagfree,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Q => "Q",
            FamilyKind::K => "K",
            FamilyKind::HCylfree => "H_cylfree",
            FamilyKind::HDiagfree => "H_diagfree",
        }
    }
}

/// A partition of `R_0 × T` (or of its doubled image) into α-ary relations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationFamily {
    pub kind: FamilyKind,
    pub p: usize,
    pub alpha: usize,
    pub space: Space,
    pub parts: Vec<Relation>,
}

impl RelationFamily {
    pub fn union(&self) -> Relation {
        let mut out = self.space.empty();
        for part in &self.parts {
            out.union_with(part);
        }
        out
    }
}

/// Builds a family over `R_0 × T` from a classifier of `(a, b, t)`.
fn classify(
    base: &BaseSet,
    plane: &AffinePlane,
    count: usize,
    kind: FamilyKind,
    class: impl Fn(usize, usize, usize) -> usize,
    tails: &BlockPartition,
) -> RelationFamily {
    let space = &base.space;
    let mut parts = vec![space.empty(); count];
    let mut tuple = vec![0; base.alpha];
    for line in &plane.classes[0] {
        for &a in line {
            for &b in line {
                if a == b {
                    continue;
                }
                for (t, tail) in tails.tuples.iter().enumerate() {
                    tuple[0] = a;
                    tuple[1] = b;
                    tuple[2..].copy_from_slice(tail);
                    parts[class(a, b, t)].insert(space.encode(&tuple));
                }
            }
        }
    }
    RelationFamily {
        kind,
        p: base.p,
        alpha: base.alpha,
        space: space.clone(),
        parts,
    }
}

/// `Q_k` for `α = 3` with the given matching scheme.
pub fn build_q_alpha3(plane: &AffinePlane, scheme: MatchingScheme) -> Result<RelationFamily> {
    let base = BaseSet::new(plane.order(), 3)?;
    let tails = block_partition(&base);
    Ok(lift_q(&base, plane, &QSystem::new(plane, scheme), &tails))
}

/// `Q_k` over `U^α`: `(a, b, t) ∈ Q_k` iff `(a, b, z_i) ∈ S_k` where `t ∈ T_i`.
pub fn lift_q(
    base: &BaseSet,
    plane: &AffinePlane,
    system: &QSystem,
    tails: &BlockPartition,
) -> RelationFamily {
    classify(
        base,
        plane,
        base.p - 1,
        FamilyKind::Q,
        |a, b, t| system.class(a, b, tails.part_of[t]).expect("pair in R_0"),
        tails,
    )
}

/// The Walecki 1-factorisation of `K_m` (`m` even): class `i < m−1` is
/// `{ (w_{i+j}, w_{i−j}) : 1 ≤ j ≤ (m−2)/2 } ∪ { (w_{m−1}, w_i) }`, indices mod `m−1`.
pub fn walecki_coloring(m: usize) -> Result<Vec<Vec<(usize, usize)>>> {
    if m < 2 || m % 2 == 1 {
        return Err(Error::OddOrder(m));
    }
    let r = m - 1;
    Ok((0..r)
        .map(|i| {
            let mut class: Vec<(usize, usize)> = (1..=(m - 2) / 2)
                .map(|j| ((i + j) % r, (i + r - j) % r))
                .collect();
            class.push((m - 1, i));
            class
        })
        .collect())
}

/// `ρ_0, …, ρ_{p−3}` on `W = {w_0, …, w_{p−1}}` as a `p × p` table of class
/// indices (`usize::MAX` on the diagonal).
fn rho_table(p: usize) -> Result<Vec<Vec<usize>>> {
    let mut table = vec![vec![usize::MAX; p]; p];
    for (i, class) in walecki_coloring(p - 1)?.into_iter().enumerate() {
        for (u, v) in class {
            table[u][v] = i;
            table[v][u] = i;
        }
    }
    let extra = p - 1;
    for w in 0..p - 1 {
        let i = w.min(p - 3);
        table[extra][w] = i;
        table[w][extra] = i;
    }
    Ok(table)
}

/// The `p − 2` symmetric big parts `K_i = ⋃ { ρ_j × J_k : i ≡ j + k (mod p−2) }`.
pub fn build_k(
    base: &BaseSet,
    plane: &AffinePlane,
    tails: &BlockPartition,
) -> Result<RelationFamily> {
    let p = base.p;
    let rho = rho_table(p)?;
    let system = QSystem::new(plane, MatchingScheme::default());
    let j_of = |t: usize| tails.part_of[t].min(p - 3);
    Ok(classify(
        base,
        plane,
        p - 2,
        FamilyKind::K,
        |a, b, t| {
            let (x, y) = (system.position[a].1, system.position[b].1);
            (rho[x][y] + j_of(t)) % (p - 2)
        },
        tails,
    ))
}

/// `H_i = S_i × T` with `S_i = {(w_0, w_{i+1}), (w_{i+1}, w_0)}` for `i < p − 2`
/// and `S_{p−2}` the rest of `W × W − Id`.
pub fn build_h_cylfree(
    base: &BaseSet,
    plane: &AffinePlane,
    tails: &BlockPartition,
) -> RelationFamily {
    let p = base.p;
    let system = QSystem::new(plane, MatchingScheme::default());
    classify(
        base,
        plane,
        p - 1,
        FamilyKind::HCylfree,
        |a, b, _| {
            let (x, y) = (system.position[a].1, system.position[b].1);
            match (x.min(y), x.max(y)) {
                (0, hi) if hi <= p - 2 => hi - 1,
                _ => p - 2,
            }
        },
        tails,
    )
}

/// How each doubled `K_i'` is split in two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DoublingSplit {
    /// By the parity of the number of coordinates taken from the copy. Both
    /// halves are big in every coordinate.
    #[default]
    Parity,
    /// By whether `s_0, s_1` lie on the same side. Big in coordinates 0 and 1
    /// only, so `C_i` for `i ≥ 2` separates the halves.
    PairSide,
}

/// The symmetric parts of `(R_0 × T)'` over the doubled base: `K_i = Q_i ∪ Q_{p−2−i}`
/// doubled and split in two by `split`, enumerated as `H_{2i} = K_i⁰`,
/// `H_{2i+1} = K_i¹`.
pub fn build_h_diagfree(q: &RelationFamily, split: DoublingSplit) -> Result<RelationFamily> {
    if q.kind != FamilyKind::Q {
        return Err(Error::InvalidParameter(format!(
            "expected a Q family, got {}",
            q.kind.name()
        )));
    }
    let p = q.p;
    let space = &q.space;
    let doubled = space.doubled()?;
    let n = space.base_size();
    let mut parts = vec![doubled.empty(); p - 1];
    let mut tuple = vec![0; q.alpha];
    for (k, part) in q.parts.iter().enumerate() {
        let pair = k.min(p - 2 - k);
        for t in part.iter() {
            for mask in 0..1usize << q.alpha {
                for (l, slot) in tuple.iter_mut().enumerate() {
                    *slot = space.coord(t, l) + ((mask >> l) & 1) * n;
                }
                let side = match split {
                    DoublingSplit::Parity => mask.count_ones() as usize & 1,
                    DoublingSplit::PairSide => (mask ^ (mask >> 1)) & 1,
                };
                parts[2 * pair + side].insert(doubled.encode(&tuple));
            }
        }
    }
    Ok(RelationFamily {
        kind: FamilyKind::HDiagfree,
        p,
        alpha: q.alpha,
        space: doubled,
        parts,
    })
}

/// `R_0 × T` over the base.
pub fn r0_times_t(base: &BaseSet, plane: &AffinePlane) -> Relation {
    let r0 = crate::geometry::LyndonRelations::from_plane(plane)
        .rels
        .swap_remove(0);
    base.times_t(&r0)
}

fn witness_tuple(space: &Space, a: &BitSet, b: &BitSet) -> Option<Vec<usize>> {
    a.iter()
        .find(|&t| !b.contains(t))
        .or_else(|| b.iter().find(|&t| !a.contains(t)))
        .map(|t| space.decode(t))
}

/// Checks the invariant list of the family's kind against `target = R_0 × T`
/// (or its doubled image).
pub fn verify_family(fam: &RelationFamily, target: &Relation) -> CheckReport {
    let space = &fam.space;
    let mut report = CheckReport::new("verify_family")
        .param("kind", fam.kind.name())
        .param("p", fam.p)
        .param("alpha", fam.alpha);
    let expected = match fam.kind {
        FamilyKind::K => fam.p - 2,
        _ => fam.p - 1,
    };
    report.push(
        CheckRecord::new("part_count", fam.parts.len() == expected)
            .with_detail(serde_json::json!({"expected": expected, "actual": fam.parts.len()})),
    );

    let mut seen = space.empty();
    let mut overlap = None;
    for (k, part) in fam.parts.iter().enumerate() {
        if overlap.is_none() {
            if let Some(t) = part.intersection(&seen).first() {
                overlap = Some(serde_json::json!({"part": k, "tuple": space.decode(t)}));
            }
        }
        seen.union_with(part);
    }
    let mut rec = CheckRecord::new("disjoint", overlap.is_none());
    if let Some(w) = overlap {
        rec = rec.with_witness(w);
    }
    report.push(rec);
    let mut rec = CheckRecord::new("covers_target", &seen == target);
    if let Some(w) = witness_tuple(space, &seen, target) {
        rec = rec.with_witness(w);
    }
    report.push(rec);
    let nonempty = fam.parts.iter().position(BitSet::is_empty);
    report.push(
        CheckRecord::new("nonempty", nonempty.is_none())
            .with_detail(fam.parts.iter().map(BitSet::count).collect::<Vec<_>>()),
    );

    if matches!(
        fam.kind,
        FamilyKind::Q | FamilyKind::K | FamilyKind::HDiagfree
    ) {
        let targets: Vec<Relation> = (0..fam.alpha)
            .map(|i| space.cyl(i, target).expect("index in range"))
            .collect();
        let failure = crate::par::find_first(fam.parts.len() * fam.alpha, |idx| {
            let (k, i) = (idx / fam.alpha, idx % fam.alpha);
            let got = space.cyl(i, &fam.parts[k]).expect("index in range");
            witness_tuple(space, &got, &targets[i])
                .map(|t| serde_json::json!({"part": k, "coord": i, "tuple": t}))
        });
        let mut rec = CheckRecord::new("big", failure.is_none());
        if let Some(w) = failure {
            rec = rec.with_witness(w);
        }
        report.push(rec);
    }

    let swap = Perm::transposition(fam.alpha, 0, 1);
    let mut failure = None;
    for (k, part) in fam.parts.iter().enumerate() {
        let image = space.s_tau(&swap, part).expect("degree matches");
        let partner = match fam.kind {
            FamilyKind::Q => fam.p - 2 - k,
            _ => k,
        };
        let Some(expect) = fam.parts.get(partner) else {
            failure = Some(serde_json::json!({"part": k, "missing_partner": partner}));
            break;
        };
        if let Some(t) = witness_tuple(space, &image, expect) {
            failure = Some(serde_json::json!({"part": k, "partner": partner, "tuple": t}));
            break;
        }
    }
    let name = match fam.kind {
        FamilyKind::Q => "transposition_pairs",
        _ => "symmetric",
    };
    let mut rec = CheckRecord::new(name, failure.is_none());
    if let Some(w) = failure {
        rec = rec.with_witness(w);
    }
    report.push(rec);
    report.finalize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PrimeField;

    fn plane(p: u64) -> AffinePlane {
        AffinePlane::new(PrimeField::new(p).unwrap())
    }

    fn unordered(classes: &[Vec<(usize, usize)>]) -> Vec<Vec<(usize, usize)>> {
        classes
            .iter()
            .map(|c| {
                let mut c: Vec<_> = c.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
                c.sort_unstable();
                c
            })
            .collect()
    }

    #[test]
    fn walecki_small_orders() {
        assert_eq!(walecki_coloring(2).unwrap(), vec![vec![(1, 0)]]);
        assert_eq!(
            unordered(&walecki_coloring(4).unwrap()),
            vec![
                vec![(0, 3), (1, 2)],
                vec![(0, 2), (1, 3)],
                vec![(0, 1), (2, 3)]
            ]
        );
        assert!(matches!(walecki_coloring(5), Err(Error::OddOrder(5))));
    }

    #[test]
    fn walecki_is_one_factorisation() {
        for m in (2..=12).step_by(2) {
            let classes = walecki_coloring(m).unwrap();
            assert_eq!(classes.len(), m - 1);
            let mut all = Vec::new();
            for c in unordered(&classes) {
                let mut verts: Vec<usize> = c.iter().flat_map(|&(a, b)| [a, b]).collect();
                verts.sort_unstable();
                verts.dedup();
                assert_eq!(verts.len(), m, "class is not a perfect matching");
                all.extend(c);
            }
            all.sort_unstable();
            all.dedup();
            assert_eq!(all.len(), m * (m - 1) / 2);
        }
    }

    #[test]
    fn block_partition_shapes() {
        let b3 = BaseSet::new(3, 3).unwrap();
        let t = block_partition(&b3);
        assert_eq!(t.part(0), vec![&[9usize][..]]);
        assert_eq!(t.part(1), vec![&[10usize][..]]);
        let b4 = BaseSet::new(3, 4).unwrap();
        let t = block_partition(&b4);
        assert_eq!(t.sizes(), vec![2, 2]);
        assert!(t.verify().passed());
        let b = BaseSet::new(5, 4).unwrap();
        assert!(block_partition(&b).verify().passed());
    }

    #[test]
    fn q_matchings_at_three() {
        let sys = QSystem::new(&plane(3), MatchingScheme::default());
        assert_eq!(sys.matching_pairs(0), vec![(0, 0), (1, 1)]);
        assert_eq!(sys.matching_pairs(1), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn matchings_are_perfect() {
        for p in [3u64, 5, 7, 11] {
            for scheme in [MatchingScheme::Reflected, MatchingScheme::Shifted] {
                let sys = QSystem::new(&plane(p), scheme);
                let n = p as usize - 1;
                for k in 0..n {
                    let pairs = sys.matching_pairs(k);
                    assert_eq!(pairs.len(), n);
                    let mut ls: Vec<_> = pairs.iter().map(|&(_, l)| l).collect();
                    ls.sort_unstable();
                    ls.dedup();
                    assert_eq!(ls.len(), n);
                }
            }
        }
    }

    #[test]
    fn q_family_at_three() {
        let pl = plane(3);
        let q = build_q_alpha3(&pl, MatchingScheme::default()).unwrap();
        assert_eq!(q.parts[0].count(), 18);
        assert_eq!(q.parts[1].count(), 18);
        let base = BaseSet::new(3, 3).unwrap();
        let target = r0_times_t(&base, &pl);
        assert_eq!(target.count(), 36);
        assert_eq!(q.union(), target);
        let swap = Perm::transposition(3, 0, 1);
        assert_eq!(q.space.s_tau(&swap, &q.parts[0]).unwrap(), q.parts[1]);
        assert!(verify_family(&q, &target).passed());
    }

    #[test]
    fn schemes_agree_up_to_five_and_split_at_seven() {
        for p in [3u64, 5] {
            let pl = plane(p);
            assert_eq!(
                build_q_alpha3(&pl, MatchingScheme::Reflected)
                    .unwrap()
                    .parts,
                build_q_alpha3(&pl, MatchingScheme::Shifted).unwrap().parts
            );
        }
        let pl = plane(7);
        let base = BaseSet::new(7, 3).unwrap();
        let target = r0_times_t(&base, &pl);
        let shifted = build_q_alpha3(&pl, MatchingScheme::Shifted).unwrap();
        let report = verify_family(&shifted, &target);
        assert!(!report.record("transposition_pairs").unwrap().passed());
        assert!(report.record("big").unwrap().passed());
        let reflected = build_q_alpha3(&pl, MatchingScheme::Reflected).unwrap();
        assert!(verify_family(&reflected, &target).passed());
    }

    #[test]
    fn moving_a_triple_breaks_the_family() {
        let pl = plane(3);
        let base = BaseSet::new(3, 3).unwrap();
        let target = r0_times_t(&base, &pl);
        let mut q = build_q_alpha3(&pl, MatchingScheme::default()).unwrap();
        let t = q.parts[0].first().unwrap();
        q.parts[0].remove(t);
        q.parts[1].insert(t);
        let report = verify_family(&q, &target);
        assert!(!report.passed());
        assert!(report.failures().all(|r| r.witness.is_some()));
    }

    #[test]
    fn k_family() {
        let pl = plane(3);
        let base = BaseSet::new(3, 3).unwrap();
        let k = build_k(&base, &pl, &block_partition(&base)).unwrap();
        assert_eq!(k.parts.len(), 1);
        assert_eq!(k.parts[0], r0_times_t(&base, &pl));
        let pl = plane(5);
        let base = BaseSet::new(5, 3).unwrap();
        let k = build_k(&base, &pl, &block_partition(&base)).unwrap();
        assert!(verify_family(&k, &r0_times_t(&base, &pl)).passed());
    }

    #[test]
    fn rho_partitions_pairs() {
        for p in [3, 5, 7] {
            let rho = rho_table(p).unwrap();
            for x in 0..p {
                let mut seen: Vec<usize> = (0..p).filter(|&y| y != x).map(|y| rho[x][y]).collect();
                seen.sort_unstable();
                seen.dedup();
                assert_eq!(seen.len(), p - 2, "every ρ_i has full domain");
            }
        }
    }

    #[test]
    fn h_cylfree_blocks() {
        let pl = plane(3);
        let base = BaseSet::new(3, 3).unwrap();
        let h = build_h_cylfree(&base, &pl, &block_partition(&base));
        // per block: 2 pairs in S_0 and 4 in S_1, times |T| = 2, times 3 blocks
        assert_eq!(h.parts[0].count(), 12);
        assert_eq!(h.parts[1].count(), 24);
        let report = verify_family(&h, &r0_times_t(&base, &pl));
        assert!(report.passed(), "{}", report.to_json());
    }

    #[test]
    fn h_diagfree_doubles() {
        let pl = plane(3);
        let base = BaseSet::new(3, 3).unwrap();
        let q = build_q_alpha3(&pl, MatchingScheme::default()).unwrap();
        let h = build_h_diagfree(&q, DoublingSplit::Parity).unwrap();
        assert_eq!(h.space.base_size(), 22);
        assert_eq!(h.parts.len(), 2);
        let target = base
            .space
            .double_relation(&r0_times_t(&base, &pl), &h.space);
        let report = verify_family(&h, &target);
        assert!(report.passed(), "{}", report.to_json());

        let side = build_h_diagfree(&q, DoublingSplit::PairSide).unwrap();
        let report = verify_family(&side, &target);
        let big = report.record("big").unwrap();
        assert!(!big.passed());
        assert_eq!(big.witness.as_ref().unwrap()["coord"], 2);
        assert!(report.record("symmetric").unwrap().passed());
    }
}
