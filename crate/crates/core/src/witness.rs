//! The witness equations `E_p`, `e_p` and the search behind `E_q^0`.
//!
//! Variables: `x_i = x[i]` for `i ≤ p` and `y_k = x[p+1+k]` for `k < p − 1`.

use serde::Serialize;
use serde_json::json;

use crate::algebra::{AtomAlgebra, AtomSet};
use crate::error::{Error, Result};
use crate::eval::{eval, Evaluation};
use crate::geometry::PrimeField;
use crate::model::PolyadicModel;
use crate::report::{CheckRecord, CheckReport};
use crate::term::{Equation, Term};

fn x(i: usize) -> Term {
    Term::var(i)
}

fn y(p: usize, k: usize) -> Term {
    Term::var(p + 1 + k)
}

fn check_params(p: usize, alpha: usize) -> Result<()> {
    if p.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("{p} is not odd")));
    }
    PrimeField::new(p as u64)?;
    if alpha < 3 {
        return Err(Error::InvalidParameter(format!(
            "dimension must be at least 3, got {alpha}"
        )));
    }
    Ok(())
}

/// The part of `E_p` that mentions only `x_0, …, x_p`.
fn x_equations(p: usize, alpha: usize) -> Vec<Equation> {
    let tag = |name: &str, idx: &[usize]| {
        let list: Vec<String> = idx.iter().map(usize::to_string).collect();
        format!("E{p}/{name}[{}]", list.join(","))
    };
    let mut out = vec![Equation::new(
        tag("x_sum", &[]),
        Term::sum((0..=p).map(x)),
        x(0).cyl(1).and(x(0).cyl(0)).minus(Term::diag(0, 1)),
    )];
    for i in 0..=p {
        for j in i + 1..=p {
            out.push(Equation::new(
                tag("x_disjoint", &[i, j]),
                x(i).and(x(j)),
                Term::Zero,
            ));
        }
        out.push(Equation::new(
            tag("x_binary", &[i]),
            x(i),
            x(i).cyls(2..alpha),
        ));
        out.push(Equation::new(
            tag("x_symmetric", &[i]),
            x(i),
            x(i).converse(),
        ));
        out.push(Equation::le(
            tag("x_transitive", &[i]),
            x(i).relprod(x(i)),
            x(i).or(Term::diag(0, 1)),
        ));
        if i > 0 {
            out.push(Equation::new(
                tag("x_domain", &[i]),
                x(i).cyl(1),
                x(0).cyl(1),
            ));
        }
        out.push(Equation::new(
            tag("x_nonzero", &[i]),
            x(i).cyl(1).cyl(0),
            Term::One,
        ));
    }
    for i in 0..=p {
        for j in (0..=p).filter(|&j| j != i) {
            out.push(Equation::new(
                tag("x_compose", &[i, j]),
                x(i).relprod(x(j)),
                Term::sum((0..=p).filter(|&k| k != i && k != j).map(x)),
            ));
        }
    }
    out
}

fn y_equations(p: usize, alpha: usize) -> Vec<Equation> {
    let tag = |name: &str, idx: &[usize]| {
        let list: Vec<String> = idx.iter().map(usize::to_string).collect();
        format!("E{p}/{name}[{}]", list.join(","))
    };
    let mut out = vec![Equation::new(
        tag("y_domain", &[]),
        y(p, 0).cyls(1..alpha),
        x(0).cyl(1),
    )];
    for i in 0..p - 1 {
        out.push(Equation::le(tag("y_below", &[i]), y(p, i), x(0)));
        for j in i + 1..p - 1 {
            out.push(Equation::new(
                tag("y_disjoint", &[i, j]),
                y(p, i).and(y(p, j)),
                Term::Zero,
            ));
        }
        if i > 0 {
            out.push(Equation::new(
                tag("y_big0", &[i]),
                y(p, i).cyl(0),
                y(p, 0).cyl(0),
            ));
            out.push(Equation::new(
                tag("y_big1", &[i]),
                y(p, i).cyl(1),
                y(p, 0).cyl(1),
            ));
        }
    }
    out.push(Equation::new(
        tag("y_symmetric", &[]),
        y(p, 0).transp(0, 1),
        y(p, 0),
    ));
    out
}

/// `E_p`, with `≤` as `a + b = b` and converse and relative product lowered.
pub fn gen_ep_set(p: usize, alpha: usize) -> Result<Vec<Equation>> {
    check_params(p, alpha)?;
    let mut out = x_equations(p, alpha);
    out.extend(y_equations(p, alpha));
    Ok(out)
}

/// `E_q^0`: the members of `E_q` over `x_0, …, x_q` only.
pub fn gen_eq0(q: usize, alpha: usize) -> Result<Vec<Equation>> {
    check_params(q, alpha)?;
    Ok(x_equations(q, alpha))
}

/// `e_p`: `Π −c_0⋯c_{α−1}(lhs ⊕ rhs) = 0` over the members of `E_p`.
pub fn gen_ep(p: usize, alpha: usize) -> Result<Equation> {
    let lhs = Term::product(
        gen_ep_set(p, alpha)?
            .into_iter()
            .map(|e| switching(e.lhs.xor(e.rhs), alpha).not()),
    );
    Ok(Equation::new(format!("e{p}"), lhs, Term::Zero))
}

/// `c_0 c_1 ⋯ c_{α−1} t`.
pub fn switching(t: Term, alpha: usize) -> Term {
    t.cyls(0..alpha)
}

pub fn variable_count(p: usize) -> usize {
    (p + 1) + (p - 1)
}

/// `x_i ↦ R_i × U^{α−2}`, `y_k ↦ Q_k`.
pub fn distinguished_eval(model: &PolyadicModel) -> Result<Evaluation> {
    let p = model.p;
    let mut env = Evaluation::new();
    for i in 0..=p {
        env.set(i, model.r_cylinder(i)?);
    }
    let id = crate::perm::Perm::identity(model.alpha);
    for k in 0..p - 1 {
        let a = model
            .q_atom(&id, k)
            .ok_or_else(|| Error::NotAnAtom(format!("Q{k}")))?;
        env.set(p + 1 + k, model.ap.atom(a));
    }
    Ok(env)
}

/// Whether `c_0⋯c_{α−1}a = 1` for every atom `a`, which makes the switching
/// term two-valued on the whole algebra.
pub fn switching_is_discriminator(alg: &AtomAlgebra) -> Result<Option<usize>> {
    for a in 0..alg.atom_count() {
        let mut v = alg.atom(a);
        for i in 0..alg.alpha {
            v = alg.cyl(i, &v)?;
        }
        if !v.is_full() {
            return Ok(Some(a));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    /// Atoms of the subalgebra `{a : c_2⋯c_{α−1}a = a}`.
    pub binary_atoms: usize,
    /// Binary atoms outside `d_01`, grouped into converse orbits.
    pub orbits: usize,
    pub nodes: usize,
    pub leaves: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Eq0Outcome {
    Sat {
        /// Values of `x_0, …, x_q`.
        classes: Vec<AtomSet>,
        stats: SearchStats,
    },
    Unsat {
        stats: SearchStats,
    },
}

impl Eq0Outcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, Eq0Outcome::Sat { .. })
    }

    pub fn stats(&self) -> &SearchStats {
        match self {
            Eq0Outcome::Sat { stats, .. } | Eq0Outcome::Unsat { stats } => stats,
        }
    }

    /// Whether the solution is `{R_i × U^{α−2} : i ≤ p}` up to the order of classes.
    pub fn recovers_lyndon(&self, model: &PolyadicModel) -> Result<bool> {
        let Eq0Outcome::Sat { classes, .. } = self else {
            return Ok(false);
        };
        let mut want = (0..=model.p)
            .map(|i| model.r_cylinder(i))
            .collect::<Result<Vec<_>>>()?;
        let mut got = classes.clone();
        want.sort();
        got.sort();
        Ok(want == got)
    }
}

/// The atoms of the binary part: the distinct values `c_2⋯c_{α−1}a` over atoms `a`.
pub fn binary_atoms(alg: &AtomAlgebra) -> Result<Vec<AtomSet>> {
    let mut out: Vec<AtomSet> = Vec::new();
    let mut covered = alg.zero();
    for a in 0..alg.atom_count() {
        if covered.contains(a) {
            continue;
        }
        let mut v = alg.atom(a);
        for i in 2..alg.alpha {
            v = alg.cyl(i, &v)?;
        }
        covered.union_with(&v);
        out.push(v);
    }
    Ok(out)
}

/// Backtracking search for `x_0, …, x_q` in `alg` satisfying `E_q^0`.
///
/// Each `x_i` is a union of converse orbits of binary atoms outside `d_01`.
/// Orbits are assigned in order to no class or to a class, a new class only
/// ever being the next unused one, and a branch is cut once the orbits left
/// cannot fill the empty classes. Leaves are checked against every member of
/// `E_q^0` by evaluation.
pub fn solve_eq0(alg: &AtomAlgebra, q: usize, budget: usize) -> Result<Eq0Outcome> {
    let equations = gen_eq0(q, alg.alpha)?;
    let d01 = alg.diag(0, 1)?;
    let binary = binary_atoms(alg)?;
    let candidates: Vec<&AtomSet> = binary.iter().filter(|b| b.is_disjoint(&d01)).collect();

    let mut orbits: Vec<AtomSet> = Vec::new();
    let mut seen = vec![false; candidates.len()];
    for (n, b) in candidates.iter().enumerate() {
        if seen[n] {
            continue;
        }
        let conv = eval(
            alg,
            &Term::var(0).converse(),
            &Evaluation::new().with(0, (*b).clone()),
        )?;
        let mut orbit = (*b).clone();
        for (m, c) in candidates.iter().enumerate() {
            if !seen[m] && c.is_subset(&conv) {
                seen[m] = true;
                orbit.union_with(c);
            }
        }
        seen[n] = true;
        orbits.push(orbit);
    }

    let mut search = Search {
        alg,
        equations: &equations,
        orbits: &orbits,
        classes: vec![alg.zero(); q + 1],
        used: 0,
        stats: SearchStats {
            binary_atoms: binary.len(),
            orbits: orbits.len(),
            ..SearchStats::default()
        },
        budget,
    };
    let found = search.descend(0)?;
    let stats = search.stats;
    Ok(match found {
        Some(classes) => Eq0Outcome::Sat { classes, stats },
        None => Eq0Outcome::Unsat { stats },
    })
}

struct Search<'a> {
    alg: &'a AtomAlgebra,
    equations: &'a [Equation],
    orbits: &'a [AtomSet],
    classes: Vec<AtomSet>,
    used: usize,
    stats: SearchStats,
    budget: usize,
}

impl Search<'_> {
    fn descend(&mut self, next: usize) -> Result<Option<Vec<AtomSet>>> {
        self.stats.nodes += 1;
        if self.stats.nodes > self.budget {
            return Err(Error::BudgetExceeded {
                what: "E_q^0 search nodes".into(),
                limit: self.budget,
            });
        }
        let k = self.classes.len();
        if self.orbits.len() - next < k - self.used {
            return Ok(None);
        }
        if next == self.orbits.len() {
            self.stats.leaves += 1;
            return self.leaf();
        }
        if let Some(found) = self.descend(next + 1)? {
            return Ok(Some(found));
        }
        for c in 0..(self.used + 1).min(k) {
            let fresh = c == self.used;
            self.classes[c].union_with(&self.orbits[next]);
            if fresh {
                self.used += 1;
            }
            let found = self.descend(next + 1)?;
            self.classes[c].difference_with(&self.orbits[next]);
            if fresh {
                self.used -= 1;
            }
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }

    fn leaf(&self) -> Result<Option<Vec<AtomSet>>> {
        let env: Evaluation = self.classes.iter().cloned().enumerate().collect();
        for eq in self.equations {
            if eval(self.alg, &eq.lhs, &env)? != eval(self.alg, &eq.rhs, &env)? {
                return Ok(None);
            }
        }
        Ok(Some(self.classes.clone()))
    }
}

/// The witness-equation checks for `A_p` against each `q` in `against`.
pub fn witness_report(
    model: &PolyadicModel,
    against: &[usize],
    budget: usize,
) -> Result<CheckReport> {
    let (p, alpha) = (model.p, model.alpha);
    let alg = &model.ap;
    let mut report = CheckReport::new("witness")
        .param("p", p)
        .param("alpha", alpha)
        .param("against", against);
    let env = distinguished_eval(model)?;
    let ep_set = gen_ep_set(p, alpha)?;

    report.timed(|| {
        let failed: Vec<&str> = ep_set
            .iter()
            .filter(|e| eval(alg, &e.lhs, &env).ok() != eval(alg, &e.rhs, &env).ok())
            .map(|e| e.origin.as_str())
            .collect();
        let rec = CheckRecord::new(format!("E{p}_distinguished"), failed.is_empty())
            .with_detail(json!({"equations": ep_set.len(), "variables": variable_count(p)}));
        if failed.is_empty() {
            rec
        } else {
            rec.with_witness(json!({"failed": failed, "evaluation": env.to_json()}))
        }
    });

    let set_env = env.clone();
    report.timed(|| {
        let ok = ep_set
            .iter()
            .find(|e| e.origin.ends_with("y_symmetric[]"))
            .map(|e| {
                eval(model.set_algebra(), &e.lhs, &set_env).ok()
                    != eval(model.set_algebra(), &e.rhs, &set_env).ok()
            });
        CheckRecord::new(format!("E{p}_fails_in_set_algebra"), ok == Some(true))
            .with_detail("P_01 moves Q_0 in the unmodified set algebra")
    });

    let ep = gen_ep(p, alpha)?;
    let lhs = eval(alg, &ep.lhs, &env)?;
    report.push(
        CheckRecord::new(format!("e{p}_refuted"), lhs.is_full())
            .with_detail(json!({"factors": ep_set.len(), "lhs_atoms": lhs.count()}))
            .with_witness(json!({"evaluation": "distinguished", "lhs": if lhs.is_full() { "1" } else { "not 1" }})),
    );

    let bad_atom = switching_is_discriminator(alg)?;
    let mut rec = CheckRecord::new("switching_term", bad_atom.is_none());
    if let Some(a) = bad_atom {
        rec = rec.with_witness(json!({"atom": a, "label": alg.labels[a].to_string()}));
    }
    report.push(rec);

    for &q in against {
        let start = std::time::Instant::now();
        let outcome = solve_eq0(alg, q, budget)?;
        let detail = json!({"q": q, "outcome": if outcome.is_sat() { "sat" } else { "unsat" }, "stats": outcome.stats()});
        let mut rec = if q == p {
            let recovers = outcome.recovers_lyndon(model)?;
            let rec = CheckRecord::new(format!("E{q}0_sat_recovers_lyndon"), recovers)
                .with_detail(detail);
            if recovers {
                rec
            } else {
                rec.with_witness(serde_json::to_value(&outcome)?)
            }
        } else {
            let rec =
                CheckRecord::new(format!("e{q}_valid"), !outcome.is_sat()).with_detail(detail);
            match &outcome {
                Eq0Outcome::Sat { classes, .. } => rec.with_witness(json!({
                    "classes": classes.iter().map(|c| c.iter().collect::<Vec<_>>()).collect::<Vec<_>>()
                })),
                Eq0Outcome::Unsat { .. } => rec,
            }
        };
        rec.millis = start.elapsed().as_millis() as u64;
        report.push(rec);
    }
    Ok(report.finalize())
}
