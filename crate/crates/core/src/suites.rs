//! Index-instantiated axiom suites.
//!
//! Origins are `P<n>[indices]` and `F<n>[indices]` (with a letter suffix where
//! one schema yields several equations), so report records sort by schema.

use crate::error::{Error, Result};
use crate::term::{Equation, Term};

fn tag(schema: &str, idx: &[usize]) -> String {
    let list: Vec<String> = idx.iter().map(usize::to_string).collect();
    format!("{schema}[{}]", list.join(","))
}

fn indices(alpha: usize, arity: usize) -> Vec<Vec<usize>> {
    (0..alpha.pow(arity as u32))
        .map(|mut n| {
            let mut v = vec![0; arity];
            for slot in v.iter_mut().rev() {
                *slot = n % alpha;
                n /= alpha;
            }
            v
        })
        .collect()
}

fn swap(i: usize, j: usize, k: usize) -> usize {
    if k == i {
        j
    } else if k == j {
        i
    } else {
        k
    }
}

fn check_alpha(alpha: usize) -> Result<()> {
    if alpha < 3 {
        return Err(Error::InvalidParameter(format!(
            "axiom suites need dimension at least 3, got {alpha}"
        )));
    }
    Ok(())
}

/// Every instance of the polyadic equations over indices `< alpha`.
pub fn suite_p(alpha: usize) -> Result<Vec<Equation>> {
    check_alpha(alpha)?;
    let (x, y) = (Term::var(0), Term::var(1));
    let mut out = Vec::new();
    for ij in indices(alpha, 2) {
        let (i, j) = (ij[0], ij[1]);
        let p = |t: Term| t.transp(i, j);
        out.push(Equation::new(
            tag("P1", &ij),
            p(x.clone().or(y.clone())),
            p(x.clone()).or(p(y.clone())),
        ));
        out.push(Equation::new(
            tag("P2", &ij),
            p(x.clone().not()),
            p(x.clone()).not(),
        ));
        for k in 0..alpha {
            out.push(Equation::new(
                tag("P3", &[i, j, k]),
                p(x.clone().cyl(k)),
                p(x.clone()).cyl(swap(i, j, k)),
            ));
        }
        for kl in indices(alpha, 2) {
            let (k, l) = (kl[0], kl[1]);
            out.push(Equation::new(
                tag("P4", &[i, j, k, l]),
                p(Term::diag(k, l)),
                Term::diag(swap(i, j, k), swap(i, j, l)),
            ));
            out.push(Equation::new(
                tag("P5", &[i, j, k, l]),
                p(x.clone().transp(k, l)),
                p(x.clone()).transp(swap(i, j, k), swap(i, j, l)),
            ));
        }
        out.push(Equation::new(tag("P6", &ij), p(p(x.clone())), x.clone()));
        out.push(Equation::new(
            tag("P8", &ij),
            p(x.clone().and(Term::diag(i, j))),
            x.clone().and(Term::diag(i, j)),
        ));
    }
    for i in 0..alpha {
        out.push(Equation::new(
            tag("P7", &[i]),
            x.clone().transp(i, i),
            x.clone(),
        ));
    }
    out.sort_by(|a, b| a.origin.cmp(&b.origin));
    Ok(out)
}

/// The Boolean part: Huntington's axioms plus the definitions of `·`, `1`, `0`.
fn boolean_axioms() -> Vec<Equation> {
    let (x, y, z) = (Term::var(0), Term::var(1), Term::var(2));
    vec![
        Equation::new("F0a", x.clone().or(y.clone()), y.clone().or(x.clone())),
        Equation::new(
            "F0b",
            x.clone().or(y.clone()).or(z.clone()),
            x.clone().or(y.clone().or(z)),
        ),
        Equation::new(
            "F0c",
            x.clone()
                .not()
                .or(y.clone())
                .not()
                .or(x.clone().not().or(y.clone().not()).not()),
            x.clone(),
        ),
        Equation::new(
            "F0d",
            x.clone().and(y.clone()),
            x.clone().not().or(y.not()).not(),
        ),
        Equation::new("F0e", Term::One, x.clone().or(x.clone().not())),
        Equation::new("F0f", Term::Zero, x.clone().or(x.not()).not()),
    ]
}

/// Every instance of the finitary axioms, with `s^i_j` lowered.
pub fn suite_f(alpha: usize) -> Result<Vec<Equation>> {
    check_alpha(alpha)?;
    let (x, y) = (Term::var(0), Term::var(1));
    let mut out = boolean_axioms();
    for i in 0..alpha {
        out.push(Equation::new(
            tag("F0g", &[i]),
            x.clone().subst(i, i),
            x.clone(),
        ));
        out.push(Equation::new(
            tag("F0h", &[i]),
            x.clone().transp(i, i),
            x.clone(),
        ));
        out.push(Equation::le(tag("F1", &[i]), x.clone(), x.clone().cyl(i)));
        out.push(Equation::new(
            tag("F2", &[i]),
            x.clone().or(y.clone()).cyl(i),
            x.clone().cyl(i).or(y.clone().cyl(i)),
        ));
    }
    for ij in indices(alpha, 2) {
        let (i, j) = (ij[0], ij[1]);
        let s = |t: Term| t.subst(i, j);
        let p = |t: Term| t.transp(i, j);
        out.push(Equation::new(
            tag("F0i", &ij),
            x.clone().transp(i, j),
            x.clone().transp(j, i),
        ));
        out.push(Equation::new(
            tag("F3", &ij),
            s(x.clone().cyl(i)),
            x.clone().cyl(i),
        ));
        if i != j {
            out.push(Equation::new(
                tag("F4", &ij),
                s(x.clone()).cyl(i),
                s(x.clone()),
            ));
        }
        for k in (0..alpha).filter(|&k| k != i && k != j) {
            out.push(Equation::new(
                tag("F5", &[i, j, k]),
                s(x.clone().cyl(k)),
                s(x.clone()).cyl(k),
            ));
        }
        out.push(Equation::new(
            tag("F6a", &ij),
            s(x.clone().not()),
            s(x.clone()).not(),
        ));
        out.push(Equation::new(
            tag("F6b", &ij),
            s(x.clone().or(y.clone())),
            s(x.clone()).or(s(y.clone())),
        ));
        out.push(Equation::new(
            tag("F6c", &ij),
            p(x.clone().not()),
            p(x.clone()).not(),
        ));
        out.push(Equation::new(
            tag("F6d", &ij),
            p(x.clone().or(y.clone())),
            p(x.clone()).or(p(y.clone())),
        ));
        out.push(Equation::new(tag("F7", &ij), p(p(x.clone())), x.clone()));
        for k in 0..alpha {
            if i != j && j != k && i != k {
                out.push(Equation::new(
                    tag("F8", &[i, j, k]),
                    p(x.clone().transp(i, k)),
                    x.clone().transp(i, j).transp(j, k),
                ));
            }
        }
        out.push(Equation::new(
            tag("F9", &ij),
            p(x.clone().subst(j, i)),
            s(x.clone()),
        ));
        out.push(Equation::new(
            tag("F10", &ij),
            s(Term::diag(i, j)),
            Term::One,
        ));
        out.push(Equation::le(
            tag("F11", &ij),
            x.clone().and(Term::diag(i, j)),
            s(x.clone()),
        ));
    }
    out.sort_by(|a, b| a.origin.cmp(&b.origin));
    Ok(out)
}

/// Reads equations from JSON (a list of strings or of `{origin, equation}`
/// objects) or from text with one equation per line; `#` starts a comment.
pub fn parse_equations(text: &str, alpha: usize) -> Result<Vec<Equation>> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        let items: Vec<serde_json::Value> = serde_json::from_str(trimmed)?;
        return items
            .iter()
            .enumerate()
            .map(|(n, item)| match item {
                serde_json::Value::String(s) => Equation::parse(s, alpha, format!("eq{n:04}")),
                other => {
                    let rec: crate::term::EquationRecord = serde_json::from_value(other.clone())?;
                    Equation::parse(&rec.equation, alpha, rec.origin)
                }
            })
            .collect();
    }
    text.lines()
        .enumerate()
        .filter_map(|(n, line)| {
            let line = line.split('#').next().unwrap_or("").trim();
            (!line.is_empty()).then(|| Equation::parse(line, alpha, format!("line{:04}", n + 1)))
        })
        .collect()
}
