//! The set algebra `A^s` and its modification `A_p` for given `p` and `α`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{build_ap, AtomAlgebra, AtomLabel, AtomSet};
use crate::closure::{generate_subalgebra, AtomTable, Signature};
use crate::error::{Error, Result};
use crate::geometry::{AffinePlane, LyndonRelations, PrimeField};
use crate::partitions::{
    block_partition, lift_q, BlockPartition, MatchingScheme, QSystem, RelationFamily,
};
use crate::perm::Perm;
use crate::report::{CheckRecord, CheckReport};
use crate::space::{BaseSet, Relation};

#[derive(Debug, Clone)]
pub struct PolyadicModel {
    pub p: usize,
    pub alpha: usize,
    pub plane: AffinePlane,
    pub lyndon: LyndonRelations,
    pub base: BaseSet,
    pub tails: BlockPartition,
    pub q: RelationFamily,
    /// Concrete atoms of `A^s` with labelled set-theoretic tables.
    pub table: AtomTable,
    /// `A_p`: the same tables with the modified transpositions.
    pub ap: AtomAlgebra,
}

/// Summary counts, as printed by the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelSummary {
    pub p: usize,
    pub alpha: usize,
    pub base_size: usize,
    pub tuples: usize,
    pub atoms: usize,
    pub q_atoms: usize,
    pub b_atoms: usize,
}

impl PolyadicModel {
    pub fn build(p: usize, alpha: usize, budget: usize) -> Result<Self> {
        Self::build_with(p, alpha, MatchingScheme::default(), budget)
    }

    pub fn build_with(
        p: usize,
        alpha: usize,
        scheme: MatchingScheme,
        budget: usize,
    ) -> Result<Self> {
        let field = PrimeField::new(p as u64)?;
        let plane = AffinePlane::new(field);
        let lyndon = LyndonRelations::from_plane(&plane);
        let base = BaseSet::new(p, alpha)?;
        let tails = block_partition(&base);
        let q = lift_q(&base, &plane, &QSystem::new(&plane, scheme), &tails);

        let mut gens = q.parts.clone();
        gens.extend(lyndon.rels[1..].iter().map(|r| base.times_t(r)));
        let fam = generate_subalgebra(&base.space, &gens, Signature::FULL, budget)?;
        let mut table = AtomTable::from_family(fam)?;
        label_atoms(&mut table, &q)?;
        let ap = build_ap(&table.algebra)?;
        Ok(PolyadicModel {
            p,
            alpha,
            plane,
            lyndon,
            base,
            tails,
            q,
            table,
            ap,
        })
    }

    /// The set algebra `A^s` (plain transpositions).
    pub fn set_algebra(&self) -> &AtomAlgebra {
        &self.table.algebra
    }

    pub fn summary(&self) -> ModelSummary {
        let q_atoms = self
            .ap
            .labels
            .iter()
            .filter(|l| matches!(l, AtomLabel::Q { .. }))
            .count();
        ModelSummary {
            p: self.p,
            alpha: self.alpha,
            base_size: self.base.size(),
            tuples: self.base.space.size(),
            atoms: self.ap.atom_count(),
            q_atoms,
            b_atoms: self.ap.atom_count() - q_atoms,
        }
    }

    /// The atom `S_{τ⁺} Q_k`.
    pub fn q_atom(&self, tau: &Perm, k: usize) -> Option<usize> {
        self.ap.find(&AtomLabel::Q {
            tau_plus: tau.plus(),
            k,
        })
    }

    /// `R_i × T`.
    pub fn r_times_t(&self, i: usize) -> Relation {
        self.base.times_t(&self.lyndon.rels[i])
    }

    /// The element equal to a concrete relation, if it belongs to `A`.
    pub fn element(&self, rel: &Relation) -> Option<AtomSet> {
        self.table.decompose(rel)
    }

    /// `c_2 ⋯ c_{α−1}(R_i × T) = R_i × U^{α−2}` as an element.
    pub fn r_cylinder(&self, i: usize) -> Result<AtomSet> {
        let mut x = self
            .element(&self.r_times_t(i))
            .ok_or_else(|| Error::NotAnAtom(format!("R_{i} x T is not an element")))?;
        for c in 2..self.alpha {
            x = self.ap.cyl(c, &x)?;
        }
        Ok(x)
    }

    /// `S_τ(Q_k)` computed on concrete relations.
    pub fn s_tau_q(&self, tau: &Perm, k: usize) -> Result<Relation> {
        self.base.space.s_tau(tau, &self.q.parts[k])
    }

    /// Checks that `S_τQ_k = S_σQ_j` only for `(σ, j) ∈ {(τ, k), (τ∘[0,1], p−2−k)}`.
    pub fn check_label_uniqueness(&self) -> Result<CheckRecord> {
        let perms = Perm::all(self.alpha);
        let swap = Perm::transposition(self.alpha, 0, 1);
        let mut seen: HashMap<Relation, (Perm, usize)> = HashMap::new();
        let mut clashes = 0usize;
        let mut witness = None;
        for tau in &perms {
            for k in 0..self.p - 1 {
                let rel = self.s_tau_q(tau, k)?;
                if let Some((sigma, j)) = seen.get(&rel) {
                    let allowed = (sigma == tau && *j == k)
                        || (*sigma == tau.compose(&swap) && *j == self.p - 2 - k);
                    if !allowed && witness.is_none() {
                        witness = Some(serde_json::json!({
                            "tau": tau, "k": k, "sigma": sigma, "j": j
                        }));
                    }
                    clashes += 1;
                } else {
                    seen.insert(rel, (tau.clone(), k));
                }
            }
        }
        let mut rec = CheckRecord::new("label_uniqueness", witness.is_none())
            .with_detail(serde_json::json!({"distinct": seen.len(), "coincidences": clashes}));
        if let Some(w) = witness {
            rec = rec.with_witness(w);
        }
        Ok(rec)
    }

    /// Compares the closure's atoms with `{S_τQ_k} ∪ At𝓑 − {S_τ(R_0×T)}`, where
    /// `𝓑` is generated by the `R_i × T`.
    pub fn check_atom_formula(&self, budget: usize) -> Result<CheckReport> {
        let space = &self.base.space;
        let mut report = CheckReport::new("atom_formula")
            .param("p", self.p)
            .param("alpha", self.alpha);
        let r_gens: Vec<Relation> = (0..=self.p).map(|i| self.r_times_t(i)).collect();
        let b = generate_subalgebra(space, &r_gens, Signature::FULL, budget)?;
        let r_atoms = r_gens
            .iter()
            .all(|r| b.decompose(r).is_some_and(|x| x.count() == 1));
        report.push(CheckRecord::new("r_relations_are_atoms_of_b", r_atoms));

        let perms = Perm::all(self.alpha);
        let r0t = &r_gens[0];
        let omitted: Vec<Relation> = perms
            .iter()
            .map(|tau| space.s_tau(tau, r0t))
            .collect::<Result<_>>()?;
        let mut formula: Vec<Relation> = b
            .atoms()
            .iter()
            .filter(|a| !omitted.contains(a))
            .cloned()
            .collect();
        for tau in &perms {
            for k in 0..self.p - 1 {
                formula.push(self.s_tau_q(tau, k)?);
            }
        }
        formula.sort();
        formula.dedup();
        let mut closure = self.table.atoms.clone();
        closure.sort();
        let missing = closure
            .iter()
            .filter(|a| formula.binary_search(a).is_err())
            .count();
        let extra = formula
            .iter()
            .filter(|a| closure.binary_search(a).is_err())
            .count();
        let mut rec = CheckRecord::new("closure_atoms_match_formula", closure == formula)
            .with_detail(serde_json::json!({
                "closure_atoms": closure.len(),
                "formula_atoms": formula.len(),
                "b_atoms": b.atom_count(),
                "only_in_closure": missing,
                "only_in_formula": extra,
            }));
        if let Some(a) = closure.iter().find(|a| formula.binary_search(a).is_err()) {
            rec = rec.with_witness(serde_json::json!({
                "size": a.count(),
                "first": space.decode(a.first().unwrap_or(0)),
            }));
        }
        report.push(rec);
        if self.alpha == 3 {
            report.push(self.check_pattern_atoms(&b.into_atoms()));
        }
        Ok(report.finalize())
    }

    /// For `α = 3`: the atoms of `𝓑` are the nonempty `a(t)`, where `t` assigns to
    /// each coordinate pair one of `R_i, Id_{U_0}, Id_{U_1}, Di_{U_1}, U_0×U_1, U_1×U_0`.
    fn check_pattern_atoms(&self, b_atoms: &[Relation]) -> CheckRecord {
        let space = &self.base.space;
        let p = self.p;
        let relation_of = |u: usize, v: usize| -> usize {
            match (self.base.block_of(u), self.base.block_of(v)) {
                (0, 0) if u == v => p + 1,
                (0, 0) => (0..=p)
                    .find(|&i| self.lyndon.rels[i].contains(u, v))
                    .expect("distinct points share a line"),
                (0, _) => p + 4,
                (_, 0) => p + 5,
                _ if u == v => p + 2,
                _ => p + 3,
            }
        };
        let mut classes: HashMap<[usize; 3], Relation> = HashMap::new();
        for t in 0..space.size() {
            let s = space.decode(t);
            let key = [
                relation_of(s[0], s[1]),
                relation_of(s[0], s[2]),
                relation_of(s[1], s[2]),
            ];
            classes
                .entry(key)
                .or_insert_with(|| space.empty())
                .insert(t);
        }
        let mut patterns: Vec<Relation> = classes.into_values().collect();
        patterns.sort();
        let mut atoms = b_atoms.to_vec();
        atoms.sort();
        CheckRecord::new("b_atoms_are_patterns", patterns == atoms)
            .with_detail(serde_json::json!({"patterns": patterns.len(), "b_atoms": atoms.len()}))
    }

    /// Checks the model's defining properties: tables against concrete operations,
    /// `Q_k` are atoms, `P*` fixes `Q_k`, and `P*` is an involutive bijection.
    pub fn verify(&self) -> Result<CheckReport> {
        let mut report = CheckReport::new("build")
            .param("p", self.p)
            .param("alpha", self.alpha);
        report.extend_prefixed("tables", self.table.verify());
        report.extend_prefixed("ap", self.ap.verify_transpositions());
        let id = Perm::identity(self.alpha);
        let q_atoms: Vec<Option<usize>> = (0..self.p - 1).map(|k| self.q_atom(&id, k)).collect();
        report.push(CheckRecord::new(
            "q_are_atoms",
            q_atoms.iter().all(Option::is_some),
        ));
        let fixed = q_atoms.iter().flatten().all(|&a| {
            self.ap
                .transp(0, 1, &self.ap.atom(a))
                .is_ok_and(|x| x == self.ap.atom(a))
        });
        report.push(CheckRecord::new("star_fixes_q", fixed));
        let plain = self
            .table
            .algebra
            .transp
            .as_ref()
            .expect("set algebra has P");
        let star = self.ap.transp_star.as_ref().expect("A_p has P*");
        let b_agree = (0..self.ap.atom_count())
            .filter(|&a| !matches!(self.ap.labels[a], AtomLabel::Q { .. }))
            .all(|a| {
                (0..self.alpha).all(|i| (0..self.alpha).all(|j| star[i][j][a] == plain[i][j][a]))
            });
        report.push(CheckRecord::new("star_agrees_off_q", b_agree));
        report.push(self.check_label_uniqueness()?);
        Ok(report.finalize())
    }
}

/// Gives each atom equal to some `S_{τ⁺}Q_k` its `Q` label and numbers the rest.
fn label_atoms(table: &mut AtomTable, q: &RelationFamily) -> Result<()> {
    let alpha = q.alpha;
    let mut labels: Vec<Option<AtomLabel>> = vec![None; table.atom_count()];
    for tau in Perm::all_plus(alpha) {
        for (k, part) in q.parts.iter().enumerate() {
            let rel = table.space.s_tau(&tau, part)?;
            let atom = table
                .atom_equal_to(&rel)
                .ok_or_else(|| Error::NotAnAtom(format!("S{tau}Q{k}")))?;
            if labels[atom].is_some() {
                return Err(Error::LabelAmbiguity { atom });
            }
            labels[atom] = Some(AtomLabel::Q {
                tau_plus: tau.clone(),
                k,
            });
        }
    }
    let mut next = 0;
    table.algebra.labels = labels
        .into_iter()
        .map(|l| {
            l.unwrap_or_else(|| {
                next += 1;
                AtomLabel::B { id: next - 1 }
            })
        })
        .collect();
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_BUDGET;

    #[test]
    fn a3_structure() {
        let m = PolyadicModel::build(3, 3, DEFAULT_BUDGET).unwrap();
        let s = m.summary();
        assert_eq!(s.base_size, 11);
        assert_eq!(s.tuples, 1331);
        assert_eq!(s.q_atoms, 3 * 2);
        let report = m.verify().unwrap();
        assert!(report.passed(), "{}", report.to_json());
    }

    #[test]
    fn star_examples() {
        let m = PolyadicModel::build(3, 3, DEFAULT_BUDGET).unwrap();
        let id = Perm::identity(3);
        let q0 = m.q_atom(&id, 0).unwrap();
        let q1 = m.q_atom(&id, 1).unwrap();
        let a = &m.ap;
        assert_eq!(a.transp(0, 1, &a.atom(q0)).unwrap(), a.atom(q0));
        assert_eq!(a.transp_plain(0, 1, &a.atom(q0)).unwrap(), a.atom(q1));
        let s12 = m.q_atom(&Perm::transposition(3, 1, 2), 0).unwrap();
        assert_eq!(a.transp(1, 2, &a.atom(q0)).unwrap(), a.atom(s12));
    }

    #[test]
    fn s_star_word_independent() {
        let m = PolyadicModel::build(3, 3, DEFAULT_BUDGET).unwrap();
        let a = &m.ap;
        let pairs = [(0, 1), (0, 2), (1, 2)];
        // every word of length ≤ 4 over the three transpositions
        let mut words: Vec<Vec<(usize, usize)>> = vec![vec![]];
        for _ in 0..4 {
            let next: Vec<_> = words
                .iter()
                .filter(|w| w.len() == words.last().unwrap().len())
                .flat_map(|w| {
                    pairs.iter().map(move |&t| {
                        let mut w = w.clone();
                        w.push(t);
                        w
                    })
                })
                .collect();
            words.extend(next);
        }
        for x in 0..a.atom_count() {
            let x = a.atom(x);
            for w in &words {
                let sigma = Perm::from_word(3, w);
                assert_eq!(a.s_word(w, &x).unwrap(), a.s_star(&sigma, &x).unwrap());
            }
        }
        for tau in Perm::all(3) {
            for sigma in Perm::all(3) {
                for k in 0..2 {
                    let q = a.atom(m.q_atom(&tau, k).unwrap());
                    let expect = m.q_atom(&sigma.compose(&tau.plus()), k).unwrap();
                    assert_eq!(a.s_star(&sigma, &q).unwrap(), a.atom(expect));
                }
            }
        }
    }

    #[test]
    fn atom_formula_p3() {
        let m = PolyadicModel::build(3, 3, DEFAULT_BUDGET).unwrap();
        let report = m.check_atom_formula(DEFAULT_BUDGET).unwrap();
        assert!(report.passed(), "{}", report.to_json());
    }

    #[test]
    fn distinguished_cylinders() {
        let m = PolyadicModel::build(3, 3, DEFAULT_BUDGET).unwrap();
        let x0 = m.r_cylinder(0).unwrap();
        let concrete = m.table.compose(&x0);
        let expect = m.base.space.cyl(2, &m.r_times_t(0)).unwrap();
        assert_eq!(concrete, expect);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            PolyadicModel::build(4, 3, DEFAULT_BUDGET),
            Err(Error::NotPrime(4))
        ));
        assert!(PolyadicModel::build(3, 2, DEFAULT_BUDGET).is_err());
        assert!(matches!(
            PolyadicModel::build(3, 3, 5),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
