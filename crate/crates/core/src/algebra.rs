//! Finite polyadic-type algebras presented by atom action tables.
//!
//! Elements are sets of atoms. Every extra-Boolean operation is stored by its
//! action on atoms and extended additively, so each one is a join-preserving
//! map by construction.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::report::{CheckRecord, CheckReport};

/// An element of an atom algebra: the set of atoms below it.
pub type AtomSet = BitSet;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum AtomLabel {
    /// `S_{τ⁺} Q_k`.
    Q {
        #[serde(rename = "tauPlus")]
        tau_plus: Perm,
        k: usize,
    },
    /// An atom not of the form `S_τ Q_k`.
    B { id: usize },
    /// `S_{τ⁺} X_k` for a part `X_k` of another family (merged `Q'`, `K`, `H`).
    Part {
        family: String,
        #[serde(rename = "tauPlus")]
        tau_plus: Perm,
        k: usize,
    },
    /// A single tuple, for full set algebras.
    Tuple { coords: Vec<usize> },
}

impl fmt::Display for AtomLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomLabel::Q { tau_plus, k } => write!(f, "S{tau_plus}Q{k}"),
            AtomLabel::B { id } => write!(f, "B{id}"),
            AtomLabel::Part {
                family,
                tau_plus,
                k,
            } => write!(f, "S{tau_plus}{family}{k}"),
            AtomLabel::Tuple { coords } => write!(f, "{coords:?}"),
        }
    }
}

/// An operation symbol of the polyadic signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Op {
    Boolean,
    Cyl,
    Diag,
    Transp,
}

impl Op {
    pub const ALL: [Op; 4] = [Op::Boolean, Op::Cyl, Op::Diag, Op::Transp];

    pub fn name(self) -> &'static str {
        match self {
            Op::Boolean => "boolean",
            Op::Cyl => "cyl",
            Op::Diag => "diag",
            Op::Transp => "transp",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomAlgebra {
    pub alpha: usize,
    pub labels: Vec<AtomLabel>,
    /// `cyl[i][a]`: atoms below `C_i(a)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cyl: Option<Vec<Vec<AtomSet>>>,
    /// `diag[i][j]`: atoms below `D_ij`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diag: Option<Vec<Vec<AtomSet>>>,
    /// `transp[i][j][a]`: the atom `P_ij(a)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transp: Option<Vec<Vec<Vec<usize>>>>,
    /// The modified action `P*_ij`; when present it is the algebra's transposition.
    #[serde(
        default,
        rename = "transpStar",
        skip_serializing_if = "Option::is_none"
    )]
    pub transp_star: Option<Vec<Vec<Vec<usize>>>>,
}

impl AtomAlgebra {
    pub fn atom_count(&self) -> usize {
        self.labels.len()
    }

    pub fn zero(&self) -> AtomSet {
        BitSet::new(self.atom_count())
    }

    pub fn one(&self) -> AtomSet {
        BitSet::full(self.atom_count())
    }

    pub fn atom(&self, a: usize) -> AtomSet {
        BitSet::singleton(self.atom_count(), a)
    }

    pub fn has(&self, op: Op) -> bool {
        match op {
            Op::Boolean => true,
            Op::Cyl => self.cyl.is_some(),
            Op::Diag => self.diag.is_some(),
            Op::Transp => self.transp.is_some() || self.transp_star.is_some(),
        }
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.alpha {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                alpha: self.alpha,
            })
        }
    }

    fn unavailable(op: &str) -> Error {
        Error::OperationUnavailable(op.to_string())
    }

    pub fn cyl(&self, i: usize, x: &AtomSet) -> Result<AtomSet> {
        self.check_index(i)?;
        let table = self.cyl.as_ref().ok_or_else(|| Self::unavailable("cyl"))?;
        let mut out = self.zero();
        for a in x.iter() {
            out.union_with(&table[i][a]);
        }
        Ok(out)
    }

    pub fn diag(&self, i: usize, j: usize) -> Result<AtomSet> {
        self.check_index(i)?;
        self.check_index(j)?;
        let table = self
            .diag
            .as_ref()
            .ok_or_else(|| Self::unavailable("diag"))?;
        Ok(table[i][j].clone())
    }

    /// The algebra's transposition table: `P*` when present, else `P`.
    pub fn transp_table(&self) -> Option<&Vec<Vec<Vec<usize>>>> {
        self.transp_star.as_ref().or(self.transp.as_ref())
    }

    fn apply_table(&self, table: &[Vec<Vec<usize>>], i: usize, j: usize, x: &AtomSet) -> AtomSet {
        let mut out = self.zero();
        for a in x.iter() {
            out.insert(table[i][j][a]);
        }
        out
    }

    /// The algebra's transposition `p_ij` (`P*_ij` when the modified table is present).
    pub fn transp(&self, i: usize, j: usize, x: &AtomSet) -> Result<AtomSet> {
        self.check_index(i)?;
        self.check_index(j)?;
        let table = self
            .transp_table()
            .ok_or_else(|| Self::unavailable("transp"))?;
        Ok(self.apply_table(table, i, j, x))
    }

    /// The unmodified set-theoretic `P_ij`.
    pub fn transp_plain(&self, i: usize, j: usize, x: &AtomSet) -> Result<AtomSet> {
        self.check_index(i)?;
        self.check_index(j)?;
        let table = self
            .transp
            .as_ref()
            .ok_or_else(|| Self::unavailable("transp"))?;
        Ok(self.apply_table(table, i, j, x))
    }

    /// `S*_σ x = p_{i₁j₁} ⋯ p_{iₘjₘ} x` along the given word (rightmost first).
    pub fn s_word(&self, word: &[(usize, usize)], x: &AtomSet) -> Result<AtomSet> {
        word.iter()
            .rev()
            .try_fold(x.clone(), |acc, &(i, j)| self.transp(i, j, &acc))
    }

    /// `S*_σ x` along the canonical word of `σ`.
    pub fn s_star(&self, sigma: &Perm, x: &AtomSet) -> Result<AtomSet> {
        if sigma.degree() != self.alpha {
            return Err(Error::InvalidParameter(format!(
                "permutation of degree {} in dimension {}",
                sigma.degree(),
                self.alpha
            )));
        }
        self.s_word(&sigma.word(), x)
    }

    pub fn label_index(&self) -> HashMap<&AtomLabel, usize> {
        self.labels
            .iter()
            .enumerate()
            .map(|(a, l)| (l, a))
            .collect()
    }

    pub fn find(&self, label: &AtomLabel) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Copies the algebra with only the listed operations kept.
    pub fn reduct(&self, ops: &[Op]) -> AtomAlgebra {
        AtomAlgebra {
            alpha: self.alpha,
            labels: self.labels.clone(),
            cyl: self.cyl.clone().filter(|_| ops.contains(&Op::Cyl)),
            diag: self.diag.clone().filter(|_| ops.contains(&Op::Diag)),
            transp: self.transp.clone().filter(|_| ops.contains(&Op::Transp)),
            transp_star: self
                .transp_star
                .clone()
                .filter(|_| ops.contains(&Op::Transp)),
        }
    }

    /// Checks that every transposition table is an involutive bijection, `P_ii = Id`
    /// and `P_ij = P_ji`.
    pub fn verify_transpositions(&self) -> CheckReport {
        let mut report = CheckReport::new("verify_transpositions").param("alpha", self.alpha);
        let tables = [("transp", &self.transp), ("transpStar", &self.transp_star)];
        for (name, table) in tables {
            let Some(table) = table else { continue };
            let mut witness = None;
            'outer: for i in 0..self.alpha {
                for j in 0..self.alpha {
                    let row = &table[i][j];
                    for a in 0..self.atom_count() {
                        let ok =
                            row[row[a]] == a && row[a] == table[j][i][a] && (i != j || row[a] == a);
                        if !ok {
                            witness = Some(serde_json::json!({"i": i, "j": j, "atom": a}));
                            break 'outer;
                        }
                    }
                }
            }
            let mut rec = CheckRecord::new(format!("{name}_involution"), witness.is_none());
            if let Some(w) = witness {
                rec = rec.with_witness(w);
            }
            report.push(rec);
        }
        report.finalize()
    }
}

/// Builds `A_p` from the labelled table of `A^s`:
/// `P*_ij(S_{τ⁺}Q_k) = S_{([i,j]∘τ⁺)⁺}Q_k`, and `P*_ij = P_ij` on other atoms.
pub fn build_ap(set_algebra: &AtomAlgebra) -> Result<AtomAlgebra> {
    let alpha = set_algebra.alpha;
    let transp = set_algebra
        .transp
        .as_ref()
        .ok_or_else(|| Error::OperationUnavailable("transp".into()))?;
    let index = set_algebra.label_index();
    if index.len() != set_algebra.atom_count() {
        let dup = set_algebra
            .labels
            .iter()
            .enumerate()
            .find(|(a, l)| index[l] != *a)
            .map_or(0, |(a, _)| a);
        return Err(Error::LabelAmbiguity { atom: dup });
    }
    let mut star = transp.clone();
    for (a, label) in set_algebra.labels.iter().enumerate() {
        let AtomLabel::Q { tau_plus, k } = label else {
            continue;
        };
        for i in 0..alpha {
            for j in 0..alpha {
                let target = AtomLabel::Q {
                    tau_plus: Perm::transposition(alpha, i, j).compose(tau_plus).plus(),
                    k: *k,
                };
                star[i][j][a] = *index
                    .get(&target)
                    .ok_or_else(|| Error::NotAnAtom(target.to_string()))?;
            }
        }
    }
    Ok(AtomAlgebra {
        transp_star: Some(star),
        ..set_algebra.clone()
    })
}

/// An atom map `h: src → dst` with its verification report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IsoWitness {
    pub map: Vec<usize>,
    pub ops: Vec<Op>,
    pub report: CheckReport,
}

impl IsoWitness {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }

    pub fn image(&self, x: &AtomSet, dst_atoms: usize) -> AtomSet {
        BitSet::from_indices(dst_atoms, x.iter().map(|a| self.map[a]))
    }
}

fn image(map: &[usize], x: &AtomSet, n: usize) -> AtomSet {
    BitSet::from_indices(n, x.iter().map(|a| map[a]))
}

/// Checks that `h` is a bijection on atoms commuting with every operation in `ops`.
///
/// Each algebra contributes its own transposition (`P*` where present), so
/// `h(P*_ij a) = P_ij h(a)` is what gets checked between a modified and a set algebra.
pub fn verify_iso(map: &[usize], src: &AtomAlgebra, dst: &AtomAlgebra, ops: &[Op]) -> IsoWitness {
    let mut report = CheckReport::new("verify_iso")
        .param("src_atoms", src.atom_count())
        .param("dst_atoms", dst.atom_count())
        .param("ops", ops.iter().map(|o| o.name()).collect::<Vec<_>>());
    let n = dst.atom_count();
    let mut hit = vec![false; n];
    let total = map.len() == src.atom_count() && map.iter().all(|&b| b < n);
    let bijective =
        total && map.len() == n && map.iter().all(|&b| !std::mem::replace(&mut hit[b], true));
    report.push(
        CheckRecord::new("bijection", bijective)
            .with_detail(serde_json::json!({"src": src.atom_count(), "dst": n})),
    );
    if !total {
        return IsoWitness {
            map: map.to_vec(),
            ops: ops.to_vec(),
            report: report.finalize(),
        };
    }
    let alpha = src.alpha;
    let fail = |op: &str, atom: usize, detail: serde_json::Value| serde_json::json!({"op": op, "atom": atom, "label": src.labels[atom].to_string(), "at": detail});

    if ops.contains(&Op::Cyl) {
        let result = check_available(src, dst, Op::Cyl).map(|()| {
            crate::par::find_first(alpha * src.atom_count(), |idx| {
                let (i, a) = (idx / src.atom_count(), idx % src.atom_count());
                let lhs = image(map, &src.cyl(i, &src.atom(a)).ok()?, n);
                let rhs = dst.cyl(i, &dst.atom(map[a])).ok()?;
                (lhs != rhs).then(|| fail("cyl", a, serde_json::json!({"i": i})))
            })
        });
        report.push(op_record("cyl", result));
    }
    if ops.contains(&Op::Diag) {
        let result = check_available(src, dst, Op::Diag).map(|()| {
            (0..alpha)
                .flat_map(|i| (0..alpha).map(move |j| (i, j)))
                .find(|&(i, j)| image(map, &src.diag(i, j).unwrap(), n) != dst.diag(i, j).unwrap())
                .map(|(i, j)| serde_json::json!({"op": "diag", "i": i, "j": j}))
        });
        report.push(op_record("diag", result));
    }
    if ops.contains(&Op::Transp) {
        let result = check_available(src, dst, Op::Transp).map(|()| {
            let (ts, td) = (src.transp_table().unwrap(), dst.transp_table().unwrap());
            crate::par::find_first(alpha * alpha * src.atom_count(), |idx| {
                let a = idx % src.atom_count();
                let (i, j) = (
                    idx / src.atom_count() / alpha,
                    idx / src.atom_count() % alpha,
                );
                (map[ts[i][j][a]] != td[i][j][map[a]])
                    .then(|| fail("transp", a, serde_json::json!({"i": i, "j": j})))
            })
        });
        report.push(op_record("transp", result));
    }
    IsoWitness {
        map: map.to_vec(),
        ops: ops.to_vec(),
        report: report.finalize(),
    }
}

fn check_available(src: &AtomAlgebra, dst: &AtomAlgebra, op: Op) -> Result<()> {
    if src.has(op) && dst.has(op) {
        Ok(())
    } else {
        Err(Error::OperationUnavailable(op.name().into()))
    }
}

fn op_record(name: &str, result: Result<Option<serde_json::Value>>) -> CheckRecord {
    match result {
        Ok(None) => CheckRecord::new(name, true),
        Ok(Some(w)) => CheckRecord::new(name, false).with_witness(w),
        Err(e) => CheckRecord::new(name, false).with_witness(e.to_string()),
    }
}

/// Whether the transposition-free operation tables of two algebras coincide.
pub fn same_cylindric_tables(a: &AtomAlgebra, b: &AtomAlgebra) -> CheckReport {
    let mut report = CheckReport::new("cylindric_reduct_tables");
    report.push(CheckRecord::new(
        "atom_count",
        a.atom_count() == b.atom_count(),
    ));
    report.push(CheckRecord::new("cyl", a.cyl == b.cyl));
    report.push(CheckRecord::new("diag", a.diag == b.diag));
    report.finalize()
}
