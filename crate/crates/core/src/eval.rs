//! Evaluating terms in atom algebras and checking equations.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::algebra::{AtomAlgebra, AtomSet};
use crate::error::{Error, Result};
use crate::report::{CheckRecord, CheckReport};
use crate::term::{Equation, Term};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SAMPLES: usize = 10_000;

/// An assignment of algebra elements to variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Evaluation {
    values: BTreeMap<usize, AtomSet>,
}

impl Evaluation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: usize, value: AtomSet) -> Self {
        self.values.insert(var, value);
        self
    }

    pub fn set(&mut self, var: usize, value: AtomSet) {
        self.values.insert(var, value);
    }

    pub fn get(&self, var: usize) -> Option<&AtomSet> {
        self.values.get(&var)
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.values.keys().copied()
    }

    /// `{"x[k]": [atoms…]}`, the witness form used in reports.
    pub fn to_json(&self) -> Value {
        self.values
            .iter()
            .map(|(k, v)| (format!("x[{k}]"), json!(v.iter().collect::<Vec<_>>())))
            .collect::<serde_json::Map<_, _>>()
            .into()
    }
}

impl FromIterator<(usize, AtomSet)> for Evaluation {
    fn from_iter<I: IntoIterator<Item = (usize, AtomSet)>>(iter: I) -> Self {
        Evaluation {
            values: iter.into_iter().collect(),
        }
    }
}

pub fn eval(alg: &AtomAlgebra, t: &Term, env: &Evaluation) -> Result<AtomSet> {
    Ok(match t {
        Term::Zero => alg.zero(),
        Term::One => alg.one(),
        Term::Var(k) => env.get(*k).cloned().ok_or(Error::UnboundVariable(*k))?,
        Term::Diag(i, j) => alg.diag(*i, *j)?,
        Term::Not(a) => eval(alg, a, env)?.complement(),
        Term::Or(a, b) => eval(alg, a, env)?.union(&eval(alg, b, env)?),
        Term::And(a, b) => {
            let left = eval(alg, a, env)?;
            if left.is_empty() {
                left
            } else {
                left.intersection(&eval(alg, b, env)?)
            }
        }
        Term::Cyl(i, a) => alg.cyl(*i, &eval(alg, a, env)?)?,
        Term::Transp(i, j, a) => alg.transp(*i, *j, &eval(alg, a, env)?)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CheckMode {
    /// Every assignment; refused when `(2^atoms)^vars` exceeds the budget.
    Exhaustive,
    /// Every assignment of `0` or an atom; sound for additive equations.
    AtomLevel,
    /// `samples` assignments of uniformly random atom subsets.
    Sampled { seed: u64, samples: usize },
    /// `AtomLevel` when applicable and within budget, then `Sampled`.
    Auto { seed: u64, samples: usize },
}

impl Default for CheckMode {
    fn default() -> Self {
        CheckMode::Auto {
            seed: DEFAULT_SEED,
            samples: DEFAULT_SAMPLES,
        }
    }
}

impl CheckMode {
    pub fn name(&self) -> &'static str {
        match self {
            CheckMode::Exhaustive => "exhaustive",
            CheckMode::AtomLevel => "atom_level",
            CheckMode::Sampled { .. } => "sampled",
            CheckMode::Auto { .. } => "auto",
        }
    }
}

fn counterexample(alg: &AtomAlgebra, eq: &Equation, env: &Evaluation) -> Result<Option<Value>> {
    let lhs = eval(alg, &eq.lhs, env)?;
    let rhs = eval(alg, &eq.rhs, env)?;
    Ok((lhs != rhs).then(|| {
        json!({
            "evaluation": env.to_json(),
            "lhs": lhs.iter().collect::<Vec<_>>(),
            "rhs": rhs.iter().collect::<Vec<_>>(),
        })
    }))
}

/// Decodes `index` as a digit string in base `radix`, one digit per variable.
fn assignment(
    vars: &[usize],
    index: usize,
    radix: usize,
    value: impl Fn(usize) -> AtomSet,
) -> Evaluation {
    let mut rest = index;
    vars.iter()
        .map(|&v| {
            let digit = rest % radix;
            rest /= radix;
            (v, value(digit))
        })
        .collect()
}

fn search_space(radix: usize, vars: usize, budget: usize, what: &str) -> Result<usize> {
    let mut total: usize = 1;
    for _ in 0..vars {
        total = total
            .checked_mul(radix)
            .filter(|&t| t <= budget)
            .ok_or_else(|| Error::BudgetExceeded {
                what: what.into(),
                limit: budget,
            })?;
    }
    if total > budget {
        return Err(Error::BudgetExceeded {
            what: what.into(),
            limit: budget,
        });
    }
    Ok(total)
}

fn first_failure(
    alg: &AtomAlgebra,
    eq: &Equation,
    total: usize,
    env_at: impl Fn(usize) -> Evaluation + Sync + Send,
) -> Result<Option<Value>> {
    crate::par::find_first(total, |idx| {
        counterexample(alg, eq, &env_at(idx)).transpose()
    })
    .transpose()
}

fn exhaustive(alg: &AtomAlgebra, eq: &Equation, budget: usize) -> Result<Option<Value>> {
    let n = alg.atom_count();
    let vars = eq.vars();
    let radix = 1usize
        .checked_shl(n as u32)
        .filter(|_| n < usize::BITS as usize)
        .ok_or_else(|| Error::BudgetExceeded {
            what: "exhaustive assignments".into(),
            limit: budget,
        })?;
    let total = search_space(radix, vars.len(), budget, "exhaustive assignments")?;
    first_failure(alg, eq, total, |idx| {
        assignment(&vars, idx, radix, |d| {
            crate::bits::BitSet::from_words(n, vec![d as u64])
        })
    })
}

fn atom_level(alg: &AtomAlgebra, eq: &Equation, budget: usize) -> Result<Option<Value>> {
    if !(eq.lhs.is_additive() && eq.rhs.is_additive()) {
        return Err(Error::ModeInapplicable(format!(
            "{}: not additive in every variable",
            eq.origin
        )));
    }
    let n = alg.atom_count();
    let vars = eq.vars();
    let total = search_space(n + 1, vars.len(), budget, "atom-level assignments")?;
    first_failure(alg, eq, total, |idx| {
        assignment(&vars, idx, n + 1, |d| {
            if d == 0 {
                alg.zero()
            } else {
                alg.atom(d - 1)
            }
        })
    })
}

/// Per-equation seed: the base seed mixed with a hash of the origin tag.
pub fn equation_seed(seed: u64, origin: &str) -> u64 {
    let digest = Sha256::digest(origin.as_bytes());
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    seed ^ u64::from_le_bytes(bytes)
}

pub fn random_element(alg: &AtomAlgebra, rng: &mut impl Rng) -> AtomSet {
    let n = alg.atom_count();
    let words = (0..n.div_ceil(64)).map(|_| rng.gen()).collect();
    crate::bits::BitSet::from_words(n, words)
}

fn sampled(alg: &AtomAlgebra, eq: &Equation, seed: u64, samples: usize) -> Result<Option<Value>> {
    let vars = eq.vars();
    let base = equation_seed(seed, &eq.origin);
    first_failure(alg, eq, samples, |idx| {
        let mut rng = ChaCha8Rng::seed_from_u64(base);
        rng.set_stream(idx as u64);
        vars.iter()
            .map(|&v| (v, random_element(alg, &mut rng)))
            .collect()
    })
    .map(|w| {
        w.map(|mut w| {
            w["seed"] = json!(seed);
            w
        })
    })
}

/// Checks one equation; the record is named by the equation's origin.
pub fn check(
    alg: &AtomAlgebra,
    eq: &Equation,
    mode: CheckMode,
    budget: usize,
) -> Result<CheckRecord> {
    eq.validate(alg.alpha)?;
    let (failure, methods) = match mode {
        CheckMode::Exhaustive => (exhaustive(alg, eq, budget)?, vec!["exhaustive"]),
        CheckMode::AtomLevel => (atom_level(alg, eq, budget)?, vec!["atom_level"]),
        CheckMode::Sampled { seed, samples } => (sampled(alg, eq, seed, samples)?, vec!["sampled"]),
        CheckMode::Auto { seed, samples } => match atom_level(alg, eq, budget) {
            Ok(Some(w)) => (Some(w), vec!["atom_level"]),
            Ok(None) => (
                sampled(alg, eq, seed, samples)?,
                vec!["atom_level", "sampled"],
            ),
            Err(Error::ModeInapplicable(_) | Error::BudgetExceeded { .. }) => {
                (sampled(alg, eq, seed, samples)?, vec!["sampled"])
            }
            Err(e) => return Err(e),
        },
    };
    let mut rec = CheckRecord::new(eq.origin.clone(), failure.is_none())
        .with_detail(json!({"equation": eq.to_string(), "methods": methods}));
    if let Some(w) = failure {
        rec = rec.with_witness(w);
    }
    Ok(rec)
}

/// Checks every equation; an equation whose check errors is a failed record
/// carrying the error message.
pub fn check_all(
    alg: &AtomAlgebra,
    eqs: &[Equation],
    mode: CheckMode,
    budget: usize,
) -> CheckReport {
    let mut report = CheckReport::new("check").param("atoms", alg.atom_count());
    report.set_param("mode", mode);
    report.set_param("equations", eqs.len());
    let records = crate::par::map_slice(eqs, |eq| {
        let start = std::time::Instant::now();
        let mut rec = check(alg, eq, mode, budget).unwrap_or_else(|e| {
            CheckRecord::new(eq.origin.clone(), false).with_witness(json!({"error": e.to_string()}))
        });
        rec.millis = start.elapsed().as_millis() as u64;
        rec
    });
    for rec in records {
        report.push(rec);
    }
    report.finalize()
}
