//! Terms over `{0, 1, +, ·, −, c_i, d_ij, p_ij}` and equations between them.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! term  := sum
//! sum   := prod ("+" prod)*
//! prod  := unary ("*" unary)*
//! unary := "-" unary | "c[" nat "](" term ")" | "p[" nat "," nat "](" term ")"
//!        | "s[" nat "," nat "](" term ")" | atom
//! atom  := "0" | "1" | "d[" nat "," nat "]" | "x[" nat "]" | "x" | "y" | "z" | "(" term ")"
//! eq    := term "=" term | term "<=" term
//! ```
//!
//! `s[i,j](t)` is lowered to `c[i](d[i,j] * t)` (to `t` when `i = j`) and
//! `a <= b` to `a + b = b`. The bare names `x`, `y`, `z` abbreviate `x[0]`,
//! `x[1]`, `x[2]`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Perm;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Zero,
    One,
    Var(usize),
    Diag(usize, usize),
    Not(Box<Term>),
    Or(Box<Term>, Box<Term>),
    And(Box<Term>, Box<Term>),
    Cyl(usize, Box<Term>),
    Transp(usize, usize, Box<Term>),
}

impl Term {
    pub fn var(k: usize) -> Term {
        Term::Var(k)
    }

    pub fn diag(i: usize, j: usize) -> Term {
        Term::Diag(i, j)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Term {
        Term::Not(Box::new(self))
    }

    pub fn or(self, other: Term) -> Term {
        Term::Or(Box::new(self), Box::new(other))
    }

    pub fn and(self, other: Term) -> Term {
        Term::And(Box::new(self), Box::new(other))
    }

    pub fn cyl(self, i: usize) -> Term {
        Term::Cyl(i, Box::new(self))
    }

    pub fn transp(self, i: usize, j: usize) -> Term {
        Term::Transp(i, j, Box::new(self))
    }

    /// `c_{i_1} ⋯ c_{i_m} self`, innermost last.
    pub fn cyls(self, indices: impl IntoIterator<Item = usize>) -> Term {
        let indices: Vec<usize> = indices.into_iter().collect();
        indices.into_iter().rev().fold(self, Term::cyl)
    }

    /// `s^i_j t = c_i(d_ij · t)` for `i ≠ j`, `t` otherwise.
    pub fn subst(self, i: usize, j: usize) -> Term {
        if i == j {
            self
        } else {
            Term::diag(i, j).and(self).cyl(i)
        }
    }

    /// `₂s(0,1) t = s^2_0 s^0_1 s^1_2 t`, converse of a binary relation.
    pub fn converse(self) -> Term {
        self.subst(1, 2).subst(0, 1).subst(2, 0)
    }

    /// `x ; y = c_2(s^1_2 x · s^0_2 y)`.
    pub fn relprod(self, other: Term) -> Term {
        self.subst(1, 2).and(other.subst(0, 2)).cyl(2)
    }

    /// `self · −other`.
    pub fn minus(self, other: Term) -> Term {
        self.and(other.not())
    }

    /// `(self · −other) + (−self · other)`.
    pub fn xor(self, other: Term) -> Term {
        let (a, b) = (self.clone(), other.clone());
        a.minus(other).or(self.not().and(b))
    }

    /// Left-folded sum; `0` when empty.
    pub fn sum(terms: impl IntoIterator<Item = Term>) -> Term {
        terms.into_iter().reduce(Term::or).unwrap_or(Term::Zero)
    }

    /// Left-folded product; `1` when empty.
    pub fn product(terms: impl IntoIterator<Item = Term>) -> Term {
        terms.into_iter().reduce(Term::and).unwrap_or(Term::One)
    }

    /// Largest index used by `c`, `d` or `p`, if any.
    pub fn max_index(&self) -> Option<usize> {
        match self {
            Term::Zero | Term::One | Term::Var(_) => None,
            Term::Diag(i, j) => Some(*i.max(j)),
            Term::Not(t) => t.max_index(),
            Term::Or(a, b) | Term::And(a, b) => a.max_index().max(b.max_index()),
            Term::Cyl(i, t) => Some(*i).max(t.max_index()),
            Term::Transp(i, j, t) => Some(*i.max(j)).max(t.max_index()),
        }
    }

    pub fn validate(&self, alpha: usize) -> Result<()> {
        match self.max_index() {
            Some(i) if i >= alpha => Err(Error::IndexOutOfRange { index: i, alpha }),
            _ => Ok(()),
        }
    }

    /// Variables in order of first occurrence.
    pub fn vars(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<usize>) {
        match self {
            Term::Var(k) => {
                if !out.contains(k) {
                    out.push(*k);
                }
            }
            Term::Zero | Term::One | Term::Diag(..) => {}
            Term::Not(t) | Term::Cyl(_, t) | Term::Transp(_, _, t) => t.collect_vars(out),
            Term::Or(a, b) | Term::And(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn occurrences(&self, var: usize) -> usize {
        match self {
            Term::Var(k) => usize::from(*k == var),
            Term::Zero | Term::One | Term::Diag(..) => 0,
            Term::Not(t) | Term::Cyl(_, t) | Term::Transp(_, _, t) => t.occurrences(var),
            Term::Or(a, b) | Term::And(a, b) => a.occurrences(var) + b.occurrences(var),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.vars().is_empty()
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Zero | Term::One | Term::Var(_) | Term::Diag(..) => 1,
            Term::Not(t) | Term::Cyl(_, t) | Term::Transp(_, _, t) => 1 + t.size(),
            Term::Or(a, b) | Term::And(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Whether the term preserves nonempty joins in each variable separately.
    ///
    /// Holds when `−` is applied only to variable-free subterms and the two
    /// sides of every product share no variable; `+`, `c_i` and `p_ij` are
    /// unrestricted. Such a term is determined by its values at `0` and atoms.
    pub fn is_additive(&self) -> bool {
        match self {
            Term::Zero | Term::One | Term::Var(_) | Term::Diag(..) => true,
            Term::Not(t) => t.is_ground(),
            Term::Cyl(_, t) | Term::Transp(_, _, t) => t.is_additive(),
            Term::Or(a, b) => a.is_additive() && b.is_additive(),
            Term::And(a, b) => {
                let left = a.vars();
                a.is_additive() && b.is_additive() && b.vars().iter().all(|v| !left.contains(v))
            }
        }
    }

    /// Pushes every transposition down to the variables.
    ///
    /// Uses `p_ij(c_k x) = c_{τk} p_ij x`, `p_ij d_kl = d_{τk τl}`, Boolean
    /// commutation, and collapses each queue of transpositions above a variable
    /// to the canonical word of its composite permutation.
    pub fn normalize(&self, alpha: usize) -> Term {
        self.push(&Perm::identity(alpha))
    }

    fn push(&self, sigma: &Perm) -> Term {
        match self {
            Term::Zero => Term::Zero,
            Term::One => Term::One,
            Term::Var(k) => sigma
                .word()
                .into_iter()
                .rev()
                .fold(Term::Var(*k), |t, (i, j)| t.transp(i, j)),
            Term::Diag(k, l) => Term::Diag(sigma.apply(*k), sigma.apply(*l)),
            Term::Not(t) => t.push(sigma).not(),
            Term::Or(a, b) => a.push(sigma).or(b.push(sigma)),
            Term::And(a, b) => a.push(sigma).and(b.push(sigma)),
            Term::Cyl(k, t) => t.push(sigma).cyl(sigma.apply(*k)),
            Term::Transp(i, j, t) => {
                t.push(&sigma.compose(&Perm::transposition(sigma.degree(), *i, *j)))
            }
        }
    }

    pub fn parse(text: &str, alpha: usize) -> Result<Term> {
        let mut p = Parser::new(text);
        let t = p.term()?;
        p.expect_end()?;
        t.validate(alpha)?;
        Ok(t)
    }
}

/// Binding strength used by the printer: sum < product < prefix.
fn level(t: &Term) -> u8 {
    match t {
        Term::Or(..) => 0,
        Term::And(..) => 1,
        _ => 2,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, t: &Term, min: u8) -> fmt::Result {
    if level(t) < min {
        write!(f, "({t})")
    } else {
        write!(f, "{t}")
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Zero => write!(f, "0"),
            Term::One => write!(f, "1"),
            Term::Var(k) => write!(f, "x[{k}]"),
            Term::Diag(i, j) => write!(f, "d[{i},{j}]"),
            Term::Not(t) => {
                write!(f, "-")?;
                write_at(f, t, 2)
            }
            Term::Or(a, b) => {
                write_at(f, a, 0)?;
                write!(f, " + ")?;
                write_at(f, b, 1)
            }
            Term::And(a, b) => {
                write_at(f, a, 1)?;
                write!(f, " * ")?;
                write_at(f, b, 2)
            }
            Term::Cyl(i, t) => write!(f, "c[{i}]({t})"),
            Term::Transp(i, j, t) => write!(f, "p[{i},{j}]({t})"),
        }
    }
}

impl Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
    /// Suite name and instance, or witness id.
    pub origin: String,
}

impl Equation {
    pub fn new(origin: impl Into<String>, lhs: Term, rhs: Term) -> Self {
        Equation {
            lhs,
            rhs,
            origin: origin.into(),
        }
    }

    /// `a ≤ b`, stored as `a + b = b`.
    pub fn le(origin: impl Into<String>, a: Term, b: Term) -> Self {
        Equation::new(origin, a.or(b.clone()), b)
    }

    pub fn vars(&self) -> Vec<usize> {
        let mut v = self.lhs.vars();
        for k in self.rhs.vars() {
            if !v.contains(&k) {
                v.push(k);
            }
        }
        v
    }

    pub fn validate(&self, alpha: usize) -> Result<()> {
        self.lhs.validate(alpha)?;
        self.rhs.validate(alpha)
    }

    pub fn parse(text: &str, alpha: usize, origin: impl Into<String>) -> Result<Equation> {
        let mut p = Parser::new(text);
        let lhs = p.term()?;
        p.skip_ws();
        let eq = if p.eat("<=") {
            let rhs = p.term()?;
            Equation::le(origin, lhs, rhs)
        } else if p.eat("=") {
            let rhs = p.term()?;
            Equation::new(origin, lhs, rhs)
        } else {
            return Err(p.error("expected '=' or '<='"));
        };
        p.expect_end()?;
        eq.validate(alpha)?;
        Ok(eq)
    }

    pub fn normalize(&self, alpha: usize) -> Equation {
        Equation::new(
            self.origin.clone(),
            self.lhs.normalize(alpha),
            self.rhs.normalize(alpha),
        )
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

/// Serialized form: `{"origin": ..., "equation": "lhs = rhs"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquationRecord {
    pub origin: String,
    pub equation: String,
}

impl From<&Equation> for EquationRecord {
    fn from(e: &Equation) -> Self {
        EquationRecord {
            origin: e.origin.clone(),
            equation: e.to_string(),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    fn error(&self, msg: &str) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{token}'")))
        }
    }

    fn expect_end(&mut self) -> Result<()> {
        self.skip_ws();
        if self.rest().is_empty() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }

    fn nat(&mut self) -> Result<usize> {
        self.skip_ws();
        let digits = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if digits == 0 {
            return Err(self.error("expected a number"));
        }
        let n = self.rest()[..digits]
            .parse()
            .map_err(|_| self.error("number too large"))?;
        self.pos += digits;
        Ok(n)
    }

    fn index_pair(&mut self) -> Result<(usize, usize)> {
        let i = self.nat()?;
        self.expect(",")?;
        let j = self.nat()?;
        self.expect("]")?;
        Ok((i, j))
    }

    fn parenthesized(&mut self) -> Result<Term> {
        self.expect("(")?;
        let t = self.term()?;
        self.expect(")")?;
        Ok(t)
    }

    fn term(&mut self) -> Result<Term> {
        let mut t = self.prod()?;
        while self.eat("+") {
            t = t.or(self.prod()?);
        }
        Ok(t)
    }

    fn prod(&mut self) -> Result<Term> {
        let mut t = self.unary()?;
        while self.eat("*") {
            t = t.and(self.unary()?);
        }
        Ok(t)
    }

    fn unary(&mut self) -> Result<Term> {
        if self.eat("-") {
            return Ok(self.unary()?.not());
        }
        if self.eat("c[") {
            let i = self.nat()?;
            self.expect("]")?;
            return Ok(self.parenthesized()?.cyl(i));
        }
        if self.eat("p[") {
            let (i, j) = self.index_pair()?;
            return Ok(self.parenthesized()?.transp(i, j));
        }
        if self.eat("s[") {
            let (i, j) = self.index_pair()?;
            return Ok(self.parenthesized()?.subst(i, j));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Term> {
        match self.peek() {
            Some('(') => self.parenthesized(),
            Some('0') => {
                self.pos += 1;
                Ok(Term::Zero)
            }
            Some('1') => {
                self.pos += 1;
                Ok(Term::One)
            }
            Some('d') => {
                self.expect("d[")?;
                let (i, j) = self.index_pair()?;
                Ok(Term::Diag(i, j))
            }
            Some('x') => {
                self.pos += 1;
                if self.rest().starts_with('[') {
                    self.pos += 1;
                    let k = self.nat()?;
                    self.expect("]")?;
                    Ok(Term::Var(k))
                } else {
                    Ok(Term::Var(0))
                }
            }
            Some('y') => {
                self.pos += 1;
                Ok(Term::Var(1))
            }
            Some('z') => {
                self.pos += 1;
                Ok(Term::Var(2))
            }
            _ => Err(self.error("expected a term")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_instance_of_distributivity() {
        let e =
            Equation::parse("p[0,1](x[0] + x[1]) = p[0,1](x[0]) + p[0,1](x[1])", 3, "P1").unwrap();
        assert_eq!(e.lhs, Term::var(0).or(Term::var(1)).transp(0, 1));
        assert_eq!(e.vars(), vec![0, 1]);
    }

    #[test]
    fn lowers_substitution() {
        let t = Term::parse("s[0,1](x)", 3).unwrap();
        assert_eq!(t, Term::parse("c[0](d[0,1] * x)", 3).unwrap());
        assert_eq!(Term::parse("s[2,2](x)", 3).unwrap(), Term::var(0));
        let e = Equation::parse("x <= c[0](x)", 3, "F1").unwrap();
        assert_eq!(e.lhs, Term::var(0).or(Term::var(0).cyl(0)));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            Term::parse("c[7](x[0])", 3),
            Err(Error::IndexOutOfRange { index: 7, .. })
        ));
        assert!(matches!(
            Term::parse("c[0](x", 3),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(Term::parse("x + ", 3), Err(Error::Syntax { .. })));
        assert!(matches!(
            Term::parse("x y", 3),
            Err(Error::Syntax { pos: 2, .. })
        ));
        assert!(Equation::parse("x", 3, "").is_err());
    }

    #[test]
    fn printer_respects_precedence() {
        let t = Term::parse("(x + y) * -(z + x) + c[1](x * y) + x", 3).unwrap();
        assert_eq!(
            t.to_string(),
            "(x[0] + x[1]) * -(x[2] + x[0]) + c[1](x[0] * x[1]) + x[0]"
        );
        let right = Term::var(0).or(Term::var(1).or(Term::var(2)));
        assert_eq!(right.to_string(), "x[0] + (x[1] + x[2])");
        assert_eq!(Term::parse(&right.to_string(), 3).unwrap(), right);
    }

    #[test]
    fn normal_form_examples() {
        let n = |s: &str| Term::parse(s, 3).unwrap().normalize(3);
        assert_eq!(
            n("p[0,1](c[0](x))"),
            Term::parse("c[1](p[0,1](x))", 3).unwrap()
        );
        assert_eq!(n("p[0,1](d[0,2])"), Term::diag(1, 2));
        assert_eq!(n("p[0,1](p[0,1](x))"), Term::var(0));
        assert_eq!(n("p[1,2](p[0,1](x))"), n("p[1,2](p[0,1](p[2,2](x)))"));
    }

    #[test]
    fn additivity_classification() {
        let t = |s: &str| Term::parse(s, 3).unwrap();
        assert!(t("p[0,1](x + y)").is_additive());
        assert!(t("p[0,1](x * d[0,1])").is_additive());
        assert!(t("x + c[0](x)").is_additive());
        assert!(t("x * y").is_additive());
        assert!(t("c[0](x) + -d[0,1]").is_additive());
        assert!(!t("-x").is_additive());
        assert!(!t("x * c[0](x)").is_additive());
        assert!(!t("c[1](-(x + y))").is_additive());
    }

    fn arb_term(alpha: usize) -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            Just(Term::Zero),
            Just(Term::One),
            (0..3usize).prop_map(Term::Var),
            (0..alpha, 0..alpha).prop_map(|(i, j)| Term::Diag(i, j)),
        ];
        leaf.prop_recursive(5, 40, 2, move |inner| {
            prop_oneof![
                inner.clone().prop_map(Term::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.or(b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
                (0..alpha, inner.clone()).prop_map(|(i, t)| t.cyl(i)),
                (0..alpha, 0..alpha, inner).prop_map(|(i, j, t)| t.transp(i, j)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(t in arb_term(4)) {
            prop_assert_eq!(Term::parse(&t.to_string(), 4).unwrap(), t);
        }

        #[test]
        fn normal_form_has_no_inner_transpositions(t in arb_term(3)) {
            fn ok(t: &Term, under_p: bool) -> bool {
                match t {
                    Term::Transp(_, _, u) => ok(u, true),
                    Term::Var(_) => true,
                    _ if under_p => false,
                    Term::Not(u) | Term::Cyl(_, u) => ok(u, false),
                    Term::Or(a, b) | Term::And(a, b) => ok(a, false) && ok(b, false),
                    _ => true,
                }
            }
            let n = t.normalize(3);
            prop_assert!(ok(&n, false));
            prop_assert_eq!(n.normalize(3), n);
        }
    }
}
