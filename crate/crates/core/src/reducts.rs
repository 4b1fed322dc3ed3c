//! Set-algebra representations related to `A_p`: the merged subalgebra `C ≅ D`,
//! the representations of the cylindrification-free and diagonal-free reducts,
//! and the certificate that `A_p` itself differs from `A^s` only in `P*`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::algebra::{verify_iso, AtomAlgebra, AtomLabel, AtomSet, IsoWitness, Op};
use crate::bits::BitSet;
use crate::closure::{AtomTable, Signature};
use crate::error::{Error, Result};
use crate::eval::random_element;
use crate::model::PolyadicModel;
use crate::partitions::{
    build_h_cylfree, build_h_diagfree, build_k, DoublingSplit, RelationFamily,
};
use crate::perm::Perm;
use crate::report::{CheckRecord, CheckReport};
use crate::space::{Relation, Space};

/// Elements drawn for the elementwise spot check of an atom map.
pub const SPOT_SAMPLES: usize = 1000;
pub const SPOT_SEED: u64 = 7;

/// A set algebra whose atoms are indexed like the source algebra, so the
/// representing map is the identity on atom indices.
#[derive(Debug, Clone)]
pub struct Representation {
    pub table: AtomTable,
    pub iso: IsoWitness,
    /// Evidence that the map does not preserve the excluded operation.
    pub sanity: CheckRecord,
}

#[derive(Debug, Clone)]
pub struct Merge {
    /// Indices of `Q` merged into each class `Q'_c`.
    pub classes: Vec<Vec<usize>>,
    pub c: AtomAlgebra,
    pub d: AtomTable,
    pub iso: IsoWitness,
}

/// The classes `Q'` obtained by merging `Q_k` with `Q_m`.
pub fn merge_classes(p: usize, k: usize, m: usize) -> Result<Vec<Vec<usize>>> {
    if k == m || k >= p - 1 || m >= p - 1 {
        return Err(Error::InvalidParameter(format!(
            "need distinct k, m < {}, got k = {k}, m = {m}",
            p - 1
        )));
    }
    if m != p - 2 - k {
        return Err(Error::UnsupportedCase(format!(
            "merging Q_{k} with Q_{m} leaves {} classes; only m = p-2-k is implemented",
            p - 3
        )));
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for q in 0..p - 1 {
        if q == m {
            continue;
        }
        classes.push(if q == k {
            vec![k.min(m), k.max(m)]
        } else {
            vec![q]
        });
    }
    classes.sort();
    Ok(classes)
}

/// The algebra on `groups` of atoms of `alg`, each group becoming one atom.
///
/// Fails with `NotClosed` when some operation does not respect the grouping.
pub fn quotient(
    alg: &AtomAlgebra,
    groups: &[Vec<usize>],
    labels: Vec<AtomLabel>,
) -> Result<AtomAlgebra> {
    let n = groups.len();
    assert_eq!(labels.len(), n, "one label per group");
    let mut class_of = vec![usize::MAX; alg.atom_count()];
    for (g, members) in groups.iter().enumerate() {
        for &a in members {
            if class_of[a] != usize::MAX {
                return Err(Error::InvalidParameter(format!(
                    "atom {a} is in two groups"
                )));
            }
            class_of[a] = g;
        }
    }
    if let Some(a) = class_of.iter().position(|&g| g == usize::MAX) {
        return Err(Error::InvalidParameter(format!("atom {a} is in no group")));
    }
    let lift = |g: usize| BitSet::from_indices(alg.atom_count(), groups[g].iter().copied());
    // Maps an element to the groups it covers, provided it covers whole groups.
    let project = |x: &AtomSet| -> Option<AtomSet> {
        let out = BitSet::from_indices(n, x.iter().map(|a| class_of[a]));
        out.iter()
            .all(|g| groups[g].iter().all(|&a| x.contains(a)))
            .then_some(out)
    };
    let not_closed = |op: String, atom: usize| Error::NotClosed { op, atom };
    let alpha = alg.alpha;

    let cyl = if alg.has(Op::Cyl) {
        let mut table = vec![Vec::with_capacity(n); alpha];
        for (i, row) in table.iter_mut().enumerate() {
            for g in 0..n {
                let image = alg.cyl(i, &lift(g))?;
                row.push(project(&image).ok_or_else(|| not_closed(format!("c[{i}]"), g))?);
            }
        }
        Some(table)
    } else {
        None
    };
    let diag = if alg.has(Op::Diag) {
        let mut table = vec![Vec::with_capacity(alpha); alpha];
        for (i, row) in table.iter_mut().enumerate() {
            for j in 0..alpha {
                let d = alg.diag(i, j)?;
                row.push(project(&d).ok_or_else(|| not_closed(format!("d[{i},{j}]"), 0))?);
            }
        }
        Some(table)
    } else {
        None
    };
    let transp = if alg.has(Op::Transp) {
        let mut table = vec![vec![Vec::with_capacity(n); alpha]; alpha];
        for i in 0..alpha {
            for j in 0..alpha {
                for g in 0..n {
                    let image = project(&alg.transp(i, j, &lift(g))?)
                        .filter(|x| x.count() == 1)
                        .ok_or_else(|| not_closed(format!("p[{i},{j}]"), g))?;
                    table[i][j].push(image.first().expect("one group"));
                }
            }
        }
        Some(table)
    } else {
        None
    };
    Ok(AtomAlgebra {
        alpha,
        labels,
        cyl,
        diag,
        // the source's own transposition, which is P* for A_p
        transp: None,
        transp_star: transp,
    })
}

fn part_label(family: &str, tau_plus: &Perm, k: usize) -> AtomLabel {
    AtomLabel::Part {
        family: family.into(),
        tau_plus: tau_plus.clone(),
        k,
    }
}

/// `C ≅ D` for the merge of `Q_k` with `Q_m`: `C` is the subalgebra of `A_p` of
/// elements not separating `S*_σQ_k` from `S*_σQ_m`, `D` the set algebra on
/// `{S_τK_i} ∪ At𝓑 − {S_τ(R_0 × T)}` and `h(S_{τ⁺}Q'_c) = S_{τ⁺}K_c`.
pub fn merge_construction(model: &PolyadicModel, k: usize, m: usize) -> Result<Merge> {
    let classes = merge_classes(model.p, k, m)?;
    let class_of_q = |q: usize| {
        classes
            .iter()
            .position(|c| c.contains(&q))
            .expect("q in a class")
    };
    let ap = &model.ap;
    let space = &model.base.space;
    let kfam = build_k(&model.base, &model.plane, &model.tails)?;

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut c_labels = Vec::new();
    let mut d_labels = Vec::new();
    let mut d_atoms = Vec::new();
    for (a, label) in ap.labels.iter().enumerate() {
        match label {
            AtomLabel::Q { tau_plus, k: q } => {
                let c = class_of_q(*q);
                if classes[c][0] != *q {
                    continue;
                }
                let members = classes[c]
                    .iter()
                    .map(|&q| {
                        model
                            .q_atom(tau_plus, q)
                            .ok_or_else(|| Error::NotAnAtom(format!("S{tau_plus}Q{q}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                groups.push(members);
                c_labels.push(part_label("Q'", tau_plus, c));
                d_labels.push(part_label("K", tau_plus, c));
                d_atoms.push(space.s_tau(tau_plus, &kfam.parts[c])?);
            }
            _ => {
                groups.push(vec![a]);
                c_labels.push(label.clone());
                d_labels.push(label.clone());
                d_atoms.push(model.table.atoms[a].clone());
            }
        }
    }
    let c = quotient(ap, &groups, c_labels)?;
    let d = AtomTable::from_atoms(space, d_atoms, d_labels, Signature::FULL)?;
    let identity: Vec<usize> = (0..c.atom_count()).collect();
    let iso = verify_iso(&identity, &c, &d.algebra, &Op::ALL);
    Ok(Merge { classes, c, d, iso })
}

/// Atoms of `A_p` realised concretely, with `S_{τ⁺}Q_k ↦ S_{τ⁺}H_k` and other
/// atoms mapped by `other`.
fn realise(
    model: &PolyadicModel,
    space: &Space,
    h: &RelationFamily,
    other: impl Fn(&Relation) -> Relation,
) -> Result<(Vec<Relation>, Vec<AtomLabel>)> {
    let mut atoms = Vec::with_capacity(model.ap.atom_count());
    let mut labels = Vec::with_capacity(model.ap.atom_count());
    for (a, label) in model.ap.labels.iter().enumerate() {
        match label {
            AtomLabel::Q { tau_plus, k } => {
                atoms.push(space.s_tau(tau_plus, &h.parts[*k])?);
                labels.push(part_label("H", tau_plus, *k));
            }
            _ => {
                atoms.push(other(&model.table.atoms[a]));
                labels.push(label.clone());
            }
        }
    }
    Ok((atoms, labels))
}

/// The cylindrification-free reduct of `A_p` as a set algebra over `U`, via the
/// symmetric `H_k`.
pub fn reduct_rep_cylfree(model: &PolyadicModel) -> Result<Representation> {
    let space = &model.base.space;
    let h = build_h_cylfree(&model.base, &model.plane, &model.tails);
    let (atoms, labels) = realise(model, space, &h, Relation::clone)?;
    let signature = Signature {
        cyl: false,
        ..Signature::FULL
    };
    let table = AtomTable::from_atoms(space, atoms, labels, signature)?;
    let identity: Vec<usize> = (0..table.atom_count()).collect();
    let ops = [Op::Boolean, Op::Diag, Op::Transp];
    let iso = verify_iso(&identity, &model.ap.reduct(&ops), &table.algebra, &ops);

    let ap = &model.ap;
    let mismatch = (0..model.alpha)
        .flat_map(|i| (0..ap.atom_count()).map(move |a| (i, a)))
        .find_map(|(i, a)| {
            let expected = table.compose(&ap.cyl(i, &ap.atom(a)).ok()?);
            let actual = space.cyl(i, &table.atoms[a]).ok()?;
            (expected != actual)
                .then(|| json!({"i": i, "atom": a, "label": ap.labels[a].to_string()}))
        });
    let sanity = excluded_record("cyl_not_preserved", mismatch);
    Ok(Representation { table, iso, sanity })
}

/// The diagonal-free reduct of `A_p` as a set algebra over the doubled base,
/// via the doubling `a ↦ a′` and the symmetric big halves of `(R_0 × T)′`.
pub fn reduct_rep_diagfree(model: &PolyadicModel, split: DoublingSplit) -> Result<Representation> {
    let base_space = &model.base.space;
    let space = base_space.doubled()?;
    let h = build_h_diagfree(&model.q, split)?;
    let (atoms, labels) = realise(model, &space, &h, |rel| {
        base_space.double_relation(rel, &space)
    })?;
    let signature = Signature {
        diag: false,
        ..Signature::FULL
    };
    let table = AtomTable::from_atoms(&space, atoms, labels, signature)?;
    let identity: Vec<usize> = (0..table.atom_count()).collect();
    let ops = [Op::Boolean, Op::Cyl, Op::Transp];
    let iso = verify_iso(&identity, &model.ap.reduct(&ops), &table.algebra, &ops);

    // h(D_01) = F(D_01) against D'_01, with the tuple <u, f(u), u, …, u> for u = 0
    let n = base_space.base_size();
    let image = table.compose(&model.ap.diag(0, 1)?);
    let target = space.diag(0, 1)?;
    let mut tuple = vec![0; model.alpha];
    tuple[1] = n;
    let probe = space.encode(&tuple);
    let separated = image.contains(probe) && !target.contains(probe);
    let extra = image.difference(&target).count();
    let sanity = excluded_record(
        "diag_not_preserved",
        separated.then(|| json!({"tuple": tuple, "in_image_not_diagonal": extra})),
    );
    Ok(Representation { table, iso, sanity })
}

fn excluded_record(name: &str, witness: Option<serde_json::Value>) -> CheckRecord {
    match witness {
        Some(w) => CheckRecord::new(name, true).with_witness(w),
        None => CheckRecord::new(name, false),
    }
}

/// Checks `h(op x) = op h(x)` on random elements, for the operations in `ops`.
pub fn spot_check(
    map: &[usize],
    src: &AtomAlgebra,
    dst: &AtomAlgebra,
    ops: &[Op],
    seed: u64,
    samples: usize,
) -> CheckRecord {
    let n = dst.atom_count();
    let image = |x: &AtomSet| BitSet::from_indices(n, x.iter().map(|a| map[a]));
    let alpha = src.alpha;
    let failure = crate::par::find_first(samples, |idx| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(idx as u64);
        let x = random_element(src, &mut rng);
        let y = random_element(src, &mut rng);
        let hx = image(&x);
        let mut bad: Option<String> = None;
        if ops.contains(&Op::Boolean)
            && (image(&x.union(&y)) != hx.union(&image(&y))
                || image(&x.complement()) != hx.complement())
        {
            bad = Some("boolean".into());
        }
        for i in 0..alpha {
            if bad.is_some() {
                break;
            }
            if ops.contains(&Op::Cyl)
                && src.cyl(i, &x).map(|v| image(&v)).ok() != dst.cyl(i, &hx).ok()
            {
                bad = Some(format!("c[{i}]"));
            }
            for j in 0..alpha {
                if bad.is_none()
                    && ops.contains(&Op::Transp)
                    && src.transp(i, j, &x).map(|v| image(&v)).ok() != dst.transp(i, j, &hx).ok()
                {
                    bad = Some(format!("p[{i},{j}]"));
                }
            }
        }
        bad.map(|op| json!({"sample": idx, "op": op}))
    });
    let rec = CheckRecord::new("spot_check", failure.is_none())
        .with_detail(json!({"seed": seed, "samples": samples}));
    match failure {
        Some(w) => rec.with_witness(w),
        None => rec,
    }
}

/// `A_p` and `A^s` agree on `+, −, C_i, D_ij` while the identity on atoms fails
/// to commute with the transpositions at some `Q` atom.
pub fn certificate(model: &PolyadicModel) -> CheckReport {
    let mut report = CheckReport::new("certificate")
        .param("p", model.p)
        .param("alpha", model.alpha);
    report.extend_prefixed(
        "tables",
        crate::algebra::same_cylindric_tables(&model.ap, model.set_algebra()),
    );
    let identity: Vec<usize> = (0..model.ap.atom_count()).collect();
    let iso = verify_iso(&identity, &model.ap, model.set_algebra(), &[Op::Transp]);
    let failure = iso
        .report
        .record("transp")
        .filter(|r| !r.passed())
        .and_then(|r| r.witness.clone());
    let at_q = failure
        .as_ref()
        .and_then(|w| w["atom"].as_u64())
        .is_some_and(|a| matches!(model.ap.labels[a as usize], AtomLabel::Q { .. }));
    let mut rec = CheckRecord::new("transp_differs_at_q_atom", at_q);
    if let Some(w) = failure {
        rec = rec.with_witness(w);
    }
    report.push(rec);
    report.finalize()
}

/// Both reduct representations, the certificate and, when `merge` is given, the
/// merge construction, as one report.
pub fn reducts_report(model: &PolyadicModel, merge: Option<(usize, usize)>) -> Result<CheckReport> {
    let mut report = CheckReport::new("reducts")
        .param("p", model.p)
        .param("alpha", model.alpha);
    let identity: Vec<usize> = (0..model.ap.atom_count()).collect();

    let cylfree = reduct_rep_cylfree(model)?;
    let ops = [Op::Boolean, Op::Diag, Op::Transp];
    report.extend_prefixed("cylfree", cylfree.iso.report.clone());
    report.push(rename(cylfree.sanity, "cylfree"));
    report.push(rename(
        spot_check(
            &identity,
            &model.ap,
            &cylfree.table.algebra,
            &ops,
            SPOT_SEED,
            SPOT_SAMPLES,
        ),
        "cylfree",
    ));

    let diagfree = reduct_rep_diagfree(model, DoublingSplit::default())?;
    let ops = [Op::Boolean, Op::Cyl, Op::Transp];
    report.set_param("doubled_base_size", diagfree.table.space.base_size());
    report.extend_prefixed("diagfree", diagfree.iso.report.clone());
    report.push(rename(diagfree.sanity, "diagfree"));
    report.push(rename(
        spot_check(
            &identity,
            &model.ap,
            &diagfree.table.algebra,
            &ops,
            SPOT_SEED,
            SPOT_SAMPLES,
        ),
        "diagfree",
    ));

    if let Some((k, m)) = merge {
        let merged = merge_construction(model, k, m)?;
        report.set_param("merge", json!({"k": k, "m": m, "classes": merged.classes}));
        report.extend_prefixed("merge", merged.iso.report.clone());
        let identity: Vec<usize> = (0..merged.c.atom_count()).collect();
        report.push(rename(
            spot_check(
                &identity,
                &merged.c,
                &merged.d.algebra,
                &Op::ALL,
                SPOT_SEED,
                SPOT_SAMPLES,
            ),
            "merge",
        ));
    }
    report.extend_prefixed("certificate", certificate(model));
    Ok(report.finalize())
}

fn rename(mut rec: CheckRecord, prefix: &str) -> CheckRecord {
    rec.name = format!("{prefix}/{}", rec.name);
    rec
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_BUDGET;

    #[test]
    fn merge_class_arithmetic() {
        assert_eq!(
            merge_classes(5, 0, 3).unwrap(),
            vec![vec![0, 3], vec![1], vec![2]]
        );
        assert_eq!(
            merge_classes(5, 2, 1).unwrap(),
            vec![vec![0], vec![1, 2], vec![3]]
        );
        assert!(matches!(
            merge_classes(5, 0, 1),
            Err(Error::UnsupportedCase(_))
        ));
        assert!(matches!(
            merge_classes(5, 1, 1),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            merge_classes(5, 0, 4),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn quotient_rejects_separating_groups() {
        let m = PolyadicModel::build(3, 3, DEFAULT_BUDGET).unwrap();
        let n = m.ap.atom_count();
        // merging Q_0 with a B atom is not respected by the transpositions
        let q0 = m.q_atom(&Perm::identity(3), 0).unwrap();
        let b = (0..n)
            .find(|&a| matches!(m.ap.labels[a], AtomLabel::B { .. }))
            .unwrap();
        let mut groups = vec![vec![q0.min(b), q0.max(b)]];
        groups.extend((0..n).filter(|&a| a != q0 && a != b).map(|a| vec![a]));
        let labels = (0..groups.len()).map(|id| AtomLabel::B { id }).collect();
        assert!(matches!(
            quotient(&m.ap, &groups, labels),
            Err(Error::NotClosed { .. })
        ));
    }

    #[test]
    fn trivial_quotient_is_the_algebra() {
        let m = PolyadicModel::build(3, 3, DEFAULT_BUDGET).unwrap();
        let groups: Vec<Vec<usize>> = (0..m.ap.atom_count()).map(|a| vec![a]).collect();
        let q = quotient(&m.ap, &groups, m.ap.labels.clone()).unwrap();
        assert_eq!(q.cyl, m.ap.cyl);
        assert_eq!(q.diag, m.ap.diag);
        assert_eq!(q.transp_star, m.ap.transp_star);
    }

    #[test]
    fn cylfree_p3() {
        let m = PolyadicModel::build(3, 3, DEFAULT_BUDGET).unwrap();
        let rep = reduct_rep_cylfree(&m).unwrap();
        assert!(rep.iso.passed(), "{}", rep.iso.report.to_json());
        assert!(rep.sanity.passed());
        let id = Perm::identity(3);
        for k in 0..2 {
            let a = m.q_atom(&id, k).unwrap();
            let hk = &rep.table.atoms[a];
            assert_eq!(&m.base.space.transp(0, 1, hk).unwrap(), hk);
        }
    }

    #[test]
    fn diagfree_p3() {
        let m = PolyadicModel::build(3, 3, DEFAULT_BUDGET).unwrap();
        let rep = reduct_rep_diagfree(&m, DoublingSplit::Parity).unwrap();
        assert_eq!(rep.table.space.base_size(), 22);
        assert!(rep.iso.passed(), "{}", rep.iso.report.to_json());
        assert!(rep.sanity.passed());
    }

    #[test]
    fn diagfree_pair_side_split_breaks_cylindrifications() {
        let m = PolyadicModel::build(3, 3, DEFAULT_BUDGET).unwrap();
        match reduct_rep_diagfree(&m, DoublingSplit::PairSide) {
            Ok(rep) => assert!(!rep.iso.report.record("cyl").unwrap().passed()),
            Err(e) => assert!(matches!(e, Error::NotClosed { .. })),
        }
    }

    #[test]
    fn certificate_p3() {
        let m = PolyadicModel::build(3, 3, DEFAULT_BUDGET).unwrap();
        let rep = certificate(&m);
        assert!(rep.passed(), "{}", rep.to_json());
    }

    #[test]
    fn spot_check_catches_a_wrong_map() {
        let m = PolyadicModel::build(3, 3, DEFAULT_BUDGET).unwrap();
        let identity: Vec<usize> = (0..m.ap.atom_count()).collect();
        let ok = spot_check(&identity, &m.ap, &m.ap, &Op::ALL, 1, 50);
        assert!(ok.passed());
        let bad = spot_check(&identity, &m.ap, m.set_algebra(), &[Op::Transp], 1, 50);
        assert!(!bad.passed());
    }
}
