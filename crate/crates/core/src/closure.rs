//! Generated subalgebras of the full set algebra over `U^α`, and their atoms.
//!
//! A finite subalgebra is determined by its atoms, which partition `U^α`. The
//! generated subalgebra's atom partition is the coarsest partition that
//! refines every generator (and every `D_ij`) and is stable:
//!
//! * tuples in one block see the same set of blocks along each `i`-fiber, so
//!   `C_i` of a block is a union of blocks;
//! * tuples in one block are sent by each coordinate swap into one block.
//!
//! It is computed by iterated signature refinement, which touches each tuple a
//! bounded number of times per round instead of enumerating `2^#atoms` elements.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{AtomAlgebra, AtomLabel, AtomSet};
use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::par;
use crate::report::{CheckRecord, CheckReport};
use crate::space::{Relation, Space};

/// Which non-Boolean operations a family is closed under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub cyl: bool,
    pub diag: bool,
    pub transp: bool,
}

impl Signature {
    pub const FULL: Signature = Signature {
        cyl: true,
        diag: true,
        transp: true,
    };
    pub const BOOLEAN: Signature = Signature {
        cyl: false,
        diag: false,
        transp: false,
    };
}

impl Default for Signature {
    fn default() -> Self {
        Signature::FULL
    }
}

/// Interns keys to dense ids in order of first appearance.
struct Interner<K> {
    ids: HashMap<K, u32>,
}

impl<K: std::hash::Hash + Eq> Interner<K> {
    fn new() -> Self {
        Interner {
            ids: HashMap::new(),
        }
    }

    fn id(&mut self, key: K) -> u32 {
        let next = self.ids.len() as u32;
        *self.ids.entry(key).or_insert(next)
    }

    fn len(&self) -> usize {
        self.ids.len()
    }
}

fn intern_all<K: std::hash::Hash + Eq>(keys: Vec<K>) -> (Vec<u32>, usize) {
    let mut interner = Interner::new();
    let ids = keys.into_iter().map(|k| interner.id(k)).collect();
    (ids, interner.len())
}

/// The subalgebra generated by `gens`, given by its atom partition.
#[derive(Debug, Clone)]
pub struct ClosedFamily {
    pub space: Space,
    pub signature: Signature,
    pub generators: Vec<Relation>,
    atom_of: Vec<u32>,
    atoms: Vec<Relation>,
}

impl ClosedFamily {
    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[Relation] {
        &self.atoms
    }

    pub fn into_atoms(self) -> Vec<Relation> {
        self.atoms
    }

    /// The atom containing tuple `t`.
    pub fn atom_of(&self, t: usize) -> usize {
        self.atom_of[t] as usize
    }

    /// `log₂` of the number of elements.
    pub fn element_bits(&self) -> usize {
        self.atoms.len()
    }

    /// The atoms below `rel` if it is an element, `None` otherwise.
    pub fn decompose(&self, rel: &Relation) -> Option<AtomSet> {
        decompose(&self.atoms, &self.atom_of, rel)
    }

    pub fn contains(&self, rel: &Relation) -> bool {
        self.decompose(rel).is_some()
    }

    pub fn compose(&self, x: &AtomSet) -> Relation {
        compose(&self.space, &self.atoms, x)
    }

    /// Every element, if there are at most `limit` of them.
    pub fn elements(&self, limit: usize) -> Result<Vec<Relation>> {
        let k = self.atoms.len();
        if k >= usize::BITS as usize || 1usize << k > limit {
            return Err(Error::BudgetExceeded {
                what: "subalgebra elements".into(),
                limit,
            });
        }
        Ok((0..1usize << k)
            .map(|mask| {
                let x = BitSet::from_indices(k, (0..k).filter(|b| mask >> b & 1 == 1));
                self.compose(&x)
            })
            .collect())
    }
}

fn decompose(atoms: &[Relation], atom_of: &[u32], rel: &Relation) -> Option<AtomSet> {
    let mut below = BitSet::new(atoms.len());
    let mut covered = 0;
    for t in rel.iter() {
        let a = atom_of[t] as usize;
        if below.insert(a) {
            covered += atoms[a].count();
        }
    }
    (covered == rel.count()).then_some(below)
}

fn compose(space: &Space, atoms: &[Relation], x: &AtomSet) -> Relation {
    let mut out = space.empty();
    for a in x.iter() {
        out.union_with(&atoms[a]);
    }
    out
}

/// Tuples with coordinate `i` zeroed, one per `i`-fiber.
fn fiber_bases(space: &Space, i: usize) -> Vec<usize> {
    (0..space.size())
        .filter(|&t| space.coord(t, i) == 0)
        .collect()
}

fn fiber_members(space: &Space, i: usize, base: usize) -> impl Iterator<Item = usize> {
    let stride = space.stride(i);
    (0..space.base_size()).map(move |v| base + v * stride)
}

/// Computes the atoms of the subalgebra generated by `gens` under `signature`.
///
/// Atoms are numbered by their first tuple. Fails with `BudgetExceeded` when the
/// atom count exceeds `budget`.
pub fn generate_subalgebra(
    space: &Space,
    gens: &[Relation],
    signature: Signature,
    budget: usize,
) -> Result<ClosedFamily> {
    for g in gens {
        if g.len() != space.size() {
            return Err(Error::InvalidParameter(
                "generator over a different space".into(),
            ));
        }
    }
    let alpha = space.alpha();
    let mut consts: Vec<Relation> = gens.to_vec();
    if signature.diag {
        for i in 0..alpha {
            for j in i + 1..alpha {
                consts.push(space.diag(i, j)?);
            }
        }
    }
    let initial = par::map_range(space.size(), |t| {
        consts.iter().map(|c| c.contains(t)).collect::<Vec<bool>>()
    });
    let (mut colour, mut count) = intern_all(initial);
    let bases: Vec<Vec<usize>> = if signature.cyl {
        (0..alpha).map(|i| fiber_bases(space, i)).collect()
    } else {
        Vec::new()
    };
    let swaps: Vec<(usize, usize)> = if signature.transp {
        (0..alpha)
            .flat_map(|i| (i + 1..alpha).map(move |j| (i, j)))
            .collect()
    } else {
        Vec::new()
    };

    loop {
        if count > budget {
            return Err(Error::BudgetExceeded {
                what: "closure atoms".into(),
                limit: budget,
            });
        }
        // fiber_id[i][base] names the set of colours met along that fiber
        let mut fiber_id: Vec<Vec<u32>> = Vec::with_capacity(bases.len());
        for (i, bs) in bases.iter().enumerate() {
            let sets = par::map_slice(bs, |&b| {
                let mut s: Vec<u32> = fiber_members(space, i, b).map(|t| colour[t]).collect();
                s.sort_unstable();
                s.dedup();
                s
            });
            let (ids, _) = intern_all(sets);
            let mut by_base = vec![0u32; space.size()];
            for (&b, id) in bs.iter().zip(ids) {
                by_base[b] = id;
            }
            fiber_id.push(by_base);
        }
        let sigs = par::map_range(space.size(), |t| {
            let mut sig = Vec::with_capacity(1 + fiber_id.len() + swaps.len());
            sig.push(colour[t]);
            for (i, ids) in fiber_id.iter().enumerate() {
                sig.push(ids[t - space.coord(t, i) * space.stride(i)]);
            }
            for &(i, j) in &swaps {
                sig.push(colour[space.swap_index(t, i, j)]);
            }
            sig
        });
        let (next, next_count) = intern_all(sigs);
        colour = next;
        if next_count == count {
            break;
        }
        count = next_count;
    }

    let mut atoms = vec![space.empty(); count];
    for (t, &c) in colour.iter().enumerate() {
        atoms[c as usize].insert(t);
    }
    Ok(ClosedFamily {
        space: space.clone(),
        signature,
        generators: gens.to_vec(),
        atom_of: colour,
        atoms,
    })
}

/// Concrete atoms together with their operation tables.
#[derive(Debug, Clone)]
pub struct AtomTable {
    pub space: Space,
    pub atoms: Vec<Relation>,
    atom_of: Vec<u32>,
    pub algebra: AtomAlgebra,
}

impl AtomTable {
    /// Tabulates the operations in `signature` on a partition of `U^α`.
    ///
    /// Fails with `NotClosed` if some required operation maps an atom to a set
    /// that is not a union of atoms.
    pub fn from_atoms(
        space: &Space,
        atoms: Vec<Relation>,
        labels: Vec<AtomLabel>,
        signature: Signature,
    ) -> Result<AtomTable> {
        let n = atoms.len();
        assert_eq!(labels.len(), n, "one label per atom");
        let mut atom_of = vec![u32::MAX; space.size()];
        for (a, rel) in atoms.iter().enumerate() {
            if rel.is_empty() {
                return Err(Error::NotAnAtom(format!("atom {a} is empty")));
            }
            for t in rel.iter() {
                if atom_of[t] != u32::MAX {
                    return Err(Error::InvalidParameter(format!(
                        "atoms {} and {a} overlap at {:?}",
                        atom_of[t],
                        space.decode(t)
                    )));
                }
                atom_of[t] = a as u32;
            }
        }
        if let Some(t) = atom_of.iter().position(|&a| a == u32::MAX) {
            return Err(Error::InvalidParameter(format!(
                "atoms do not cover {:?}",
                space.decode(t)
            )));
        }
        let alpha = space.alpha();
        let cyl = if signature.cyl {
            Some(
                (0..alpha)
                    .map(|i| cyl_table(space, &atom_of, n, i))
                    .collect::<Result<Vec<_>>>()?,
            )
        } else {
            None
        };
        let diag = if signature.diag {
            let mut table = vec![vec![BitSet::new(n); alpha]; alpha];
            for i in 0..alpha {
                for j in 0..alpha {
                    let d = space.diag(i, j)?;
                    table[i][j] = decompose(&atoms, &atom_of, &d).ok_or(Error::NotClosed {
                        op: format!("d[{i},{j}]"),
                        atom: 0,
                    })?;
                }
            }
            Some(table)
        } else {
            None
        };
        let transp = if signature.transp {
            let mut table = vec![vec![(0..n).collect::<Vec<_>>(); alpha]; alpha];
            for i in 0..alpha {
                for j in 0..alpha {
                    if i != j {
                        table[i][j] = transp_row(space, &atoms, &atom_of, i, j)?;
                    }
                }
            }
            Some(table)
        } else {
            None
        };
        Ok(AtomTable {
            space: space.clone(),
            atoms,
            atom_of,
            algebra: AtomAlgebra {
                alpha,
                labels,
                cyl,
                diag,
                transp,
                transp_star: None,
            },
        })
    }

    pub fn from_family(fam: ClosedFamily) -> Result<AtomTable> {
        let labels = (0..fam.atom_count())
            .map(|id| AtomLabel::B { id })
            .collect();
        let space = fam.space.clone();
        let signature = fam.signature;
        AtomTable::from_atoms(&space, fam.into_atoms(), labels, signature)
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom_of(&self, t: usize) -> usize {
        self.atom_of[t] as usize
    }

    pub fn decompose(&self, rel: &Relation) -> Option<AtomSet> {
        decompose(&self.atoms, &self.atom_of, rel)
    }

    pub fn compose(&self, x: &AtomSet) -> Relation {
        compose(&self.space, &self.atoms, x)
    }

    /// The atom equal to `rel`, if any.
    pub fn atom_equal_to(&self, rel: &Relation) -> Option<usize> {
        let a = self.atom_of(rel.first()?);
        (self.atoms[a] == *rel).then_some(a)
    }

    /// Re-derives every table entry from the concrete operations.
    pub fn verify(&self) -> CheckReport {
        let space = &self.space;
        let alg = &self.algebra;
        let mut report = CheckReport::new("verify_atom_table")
            .param("atoms", self.atom_count())
            .param("alpha", space.alpha());
        let mut cover = space.empty();
        let mut disjoint = true;
        for a in &self.atoms {
            disjoint &= a.is_disjoint(&cover);
            cover.union_with(a);
        }
        report.push(CheckRecord::new("partition", disjoint && cover.is_full()));
        let n = self.atom_count();
        let alpha = space.alpha();
        if alg.cyl.is_some() {
            let bad = par::find_first(alpha * n, |idx| {
                let (i, a) = (idx / n, idx % n);
                let concrete = space.cyl(i, &self.atoms[a]).ok()?;
                let listed = self.compose(&alg.cyl(i, &alg.atom(a)).ok()?);
                (concrete != listed).then(|| serde_json::json!({"i": i, "atom": a}))
            });
            report.push(witnessed("cyl", bad));
        }
        if alg.diag.is_some() {
            let mut bad = None;
            'outer: for i in 0..alpha {
                for j in 0..alpha {
                    let listed = self.compose(&alg.diag(i, j).expect("table present"));
                    if listed != space.diag(i, j).expect("index in range") {
                        bad = Some(serde_json::json!({"i": i, "j": j}));
                        break 'outer;
                    }
                }
            }
            report.push(witnessed("diag", bad));
        }
        if let Some(table) = &alg.transp {
            let bad = par::find_first(alpha * alpha * n, |idx| {
                let a = idx % n;
                let (i, j) = (idx / n / alpha, idx / n % alpha);
                let concrete = space.transp(i, j, &self.atoms[a]).ok()?;
                (concrete != self.atoms[table[i][j][a]])
                    .then(|| serde_json::json!({"i": i, "j": j, "atom": a}))
            });
            report.push(witnessed("transp", bad));
        }
        report.finalize()
    }
}

fn witnessed(name: &str, bad: Option<serde_json::Value>) -> CheckRecord {
    match bad {
        None => CheckRecord::new(name, true),
        Some(w) => CheckRecord::new(name, false).with_witness(w),
    }
}

/// `cyl[a]` = atoms sharing an `i`-fiber with `a`; closed iff every fiber that
/// meets such an atom also meets `a`.
fn cyl_table(space: &Space, atom_of: &[u32], n: usize, i: usize) -> Result<Vec<AtomSet>> {
    let bases = fiber_bases(space, i);
    let fibers: Vec<Vec<u32>> = par::map_slice(&bases, |&b| {
        let mut s: Vec<u32> = fiber_members(space, i, b).map(|t| atom_of[t]).collect();
        s.sort_unstable();
        s.dedup();
        s
    });
    let mut fibers_with = vec![0u32; n];
    let mut together = vec![0u32; n * n];
    for f in &fibers {
        for &a in f {
            fibers_with[a as usize] += 1;
            for &b in f {
                together[a as usize * n + b as usize] += 1;
            }
        }
    }
    let mut table = vec![BitSet::new(n); n];
    for a in 0..n {
        for b in 0..n {
            let both = together[a * n + b];
            if both > 0 {
                if both != fibers_with[b] {
                    return Err(Error::NotClosed {
                        op: format!("c[{i}]"),
                        atom: a,
                    });
                }
                table[a].insert(b);
            }
        }
    }
    Ok(table)
}

fn transp_row(
    space: &Space,
    atoms: &[Relation],
    atom_of: &[u32],
    i: usize,
    j: usize,
) -> Result<Vec<usize>> {
    let rows = par::map_range(atoms.len(), |a| {
        let mut image = None;
        for t in atoms[a].iter() {
            let b = atom_of[space.swap_index(t, i, j)] as usize;
            match image {
                None => image = Some(b),
                Some(c) if c != b => return None,
                _ => {}
            }
        }
        image.filter(|&b| atoms[b].count() == atoms[a].count())
    });
    rows.into_iter()
        .enumerate()
        .map(|(a, b)| {
            b.ok_or(Error::NotClosed {
                op: format!("p[{i},{j}]"),
                atom: a,
            })
        })
        .collect()
}

/// `atoms_of` for a closed family: its atom partition with verified tables.
pub fn atoms_of(fam: ClosedFamily) -> Result<AtomTable> {
    AtomTable::from_family(fam)
}

/// The full set algebra `P(U^α)` as an atom table with singleton atoms.
pub fn full_set_algebra(space: &Space) -> Result<AtomTable> {
    let atoms = (0..space.size())
        .map(|t| BitSet::singleton(space.size(), t))
        .collect();
    let labels = (0..space.size())
        .map(|t| AtomLabel::Tuple {
            coords: space.decode(t),
        })
        .collect();
    AtomTable::from_atoms(space, atoms, labels, Signature::FULL)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_subalgebra_over_two_points() {
        let space = Space::new(2, 3).unwrap();
        let fam = generate_subalgebra(&space, &[], Signature::FULL, 1 << 10).unwrap();
        assert_eq!(fam.atom_count(), 4);
        let table = atoms_of(fam).unwrap();
        assert!(table.verify().passed());
        // equality patterns: all equal (2 tuples), and one coordinate differing (2 each)
        let mut sizes: Vec<_> = table.atoms.iter().map(BitSet::count).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 2, 2, 2]);
    }

    #[test]
    fn unit_generator_gives_diagonal_closure() {
        let space = Space::new(3, 3).unwrap();
        let fam = generate_subalgebra(&space, &[space.unit()], Signature::FULL, 1 << 10).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!(fam.contains(&space.diag(i, j).unwrap()));
            }
        }
        assert!(fam.contains(&space.empty()));
        assert_eq!(fam.elements(1 << 10).unwrap().len(), 1 << fam.atom_count());
    }

    #[test]
    fn closure_is_idempotent() {
        let space = Space::new(3, 3).unwrap();
        let g = space.from_tuples([&[0usize, 1, 2][..], &[1, 1, 0][..]]);
        let fam = generate_subalgebra(&space, &[g], Signature::FULL, 1 << 12).unwrap();
        let again = generate_subalgebra(&space, fam.atoms(), Signature::FULL, 1 << 12).unwrap();
        assert_eq!(fam.atoms(), again.atoms());
        let table = atoms_of(fam).unwrap();
        assert!(table.verify().passed(), "{}", table.verify().to_json());
    }

    #[test]
    fn budget_is_enforced() {
        let space = Space::new(3, 3).unwrap();
        let g = space.from_tuples([&[0usize, 1, 2][..]]);
        let err = generate_subalgebra(&space, &[g], Signature::FULL, 3).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn boolean_signature_keeps_generators() {
        let space = Space::new(2, 2).unwrap();
        let g = space.from_tuples([&[0usize, 1][..]]);
        let fam =
            generate_subalgebra(&space, std::slice::from_ref(&g), Signature::BOOLEAN, 16).unwrap();
        assert_eq!(fam.atom_count(), 2);
        assert!(fam.contains(&g));
        assert!(!fam.contains(&space.diag(0, 1).unwrap()));
    }

    #[test]
    fn not_closed_partition_is_rejected() {
        let space = Space::new(2, 2).unwrap();
        let a = space.from_tuples([&[0usize, 1][..]]);
        let b = a.complement();
        let labels = vec![AtomLabel::B { id: 0 }, AtomLabel::B { id: 1 }];
        let err = AtomTable::from_atoms(&space, vec![a, b], labels, Signature::FULL).unwrap_err();
        assert!(matches!(err, Error::NotClosed { .. }));
    }

    #[test]
    fn full_set_algebra_tables() {
        let space = Space::new(2, 3).unwrap();
        let full = full_set_algebra(&space).unwrap();
        assert_eq!(full.atom_count(), 8);
        assert!(full.verify().passed());
    }
}
