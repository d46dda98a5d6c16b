//! First-order terms, formulas and sequents, substitutions, and inductive
//! definition sets.

mod parse;
mod print;

pub use parse::{parse_defs, parse_formula, parse_sequent, parse_sequent_reserved, parse_term, ParseError, ParseErrorKind};
pub(crate) use parse::{Parser, Tok};
pub use print::print_sequent;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

/// A variable name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Var {
        Var(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// Names of the form `_vN` are produced by [`FreshSupply`] only.
    pub fn is_reserved(&self) -> bool {
        is_reserved_name(&self.0)
    }
}

pub(crate) fn is_reserved_name(name: &str) -> bool {
    name.strip_prefix("_v").is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Var {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

/// A function or predicate symbol.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym(Arc<str>);

impl Sym {
    pub fn new(name: &str) -> Sym {
        Sym(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Sym {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

pub const ZERO: &str = "0";
pub const SUCC: &str = "s";

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Term {
    Var(Var),
    App(Sym, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Var::new(name))
    }

    pub fn zero() -> Term {
        Term::App(Sym::new(ZERO), Vec::new())
    }

    pub fn succ(t: Term) -> Term {
        Term::App(Sym::new(SUCC), vec![t])
    }

    /// `s^n(t)`.
    pub fn lift(self, n: u32) -> Term {
        (0..n).fold(self, |t, _| Term::succ(t))
    }

    pub fn numeral(n: u32) -> Term {
        Term::zero().lift(n)
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::App(..) => None,
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn has_var(&self, v: &Var) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::App(_, args) => args.iter().any(|a| a.has_var(v)),
        }
    }

    /// Depth of the term tree; for `s^n x` and `s^n 0` this is `n`.
    pub fn height(&self) -> u32 {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) if args.is_empty() => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::height).max().unwrap_or(0),
        }
    }

    pub fn subst(&self, theta: &Substitution) -> Term {
        match self {
            Term::Var(v) => theta.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.subst(theta)).collect()),
        }
    }

    pub fn collect_syms(&self, out: &mut BTreeMap<Sym, usize>) {
        if let Term::App(f, args) = self {
            out.entry(f.clone()).or_insert(args.len());
            args.iter().for_each(|a| a.collect_syms(out));
        }
    }
}

/// Base of a successor tower.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Base {
    Zero,
    Var(Var),
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Base::Zero => f.write_str(ZERO),
            Base::Var(v) => write!(f, "{v}"),
        }
    }
}

/// The view `s^height(base)` of a term built from `s`, `0` and variables.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Tower {
    pub base: Base,
    pub height: u32,
}

impl Tower {
    pub fn to_term(&self) -> Term {
        let b = match &self.base {
            Base::Zero => Term::zero(),
            Base::Var(v) => Term::Var(v.clone()),
        };
        b.lift(self.height)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("`{0}` is not of the form s^n(0) or s^n(x)")]
pub struct NonSuccessorTerm(pub Term);

pub fn decompose(t: &Term) -> Result<Tower, NonSuccessorTerm> {
    let mut height = 0;
    let mut cur = t;
    loop {
        match cur {
            Term::Var(v) => return Ok(Tower { base: Base::Var(v.clone()), height }),
            Term::App(f, args) if f.name() == ZERO && args.is_empty() => return Ok(Tower { base: Base::Zero, height }),
            Term::App(f, args) if f.name() == SUCC && args.len() == 1 => {
                height += 1;
                cur = &args[0];
            }
            _ => return Err(NonSuccessorTerm(t.clone())),
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Formula {
    Eq(Term, Term),
    Pred(Sym, Vec<Term>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Forall(Var, Box<Formula>),
    Exists(Var, Box<Formula>),
}

impl Formula {
    pub fn eq(l: Term, r: Term) -> Formula {
        Formula::Eq(l, r)
    }

    pub fn pred(p: &str, args: Vec<Term>) -> Formula {
        Formula::Pred(Sym::new(p), args)
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Eq(..) | Formula::Pred(..))
    }

    pub fn pred_name(&self) -> Option<&Sym> {
        match self {
            Formula::Pred(p, _) => Some(p),
            _ => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Formula::Pred(_, args) => args,
            _ => &[],
        }
    }

    pub fn collect_fv(&self, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Eq(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Formula::Pred(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            Formula::Not(a) => a.collect_fv(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.collect_fv(out);
                b.collect_fv(out);
            }
            Formula::Forall(x, body) | Formula::Exists(x, body) => {
                let mut inner = BTreeSet::new();
                body.collect_fv(&mut inner);
                inner.remove(x);
                out.extend(inner);
            }
        }
    }

    pub fn fv(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_fv(&mut out);
        out
    }

    /// Simultaneous substitution. Bound variables shadow the substitution;
    /// no renaming is performed.
    pub fn subst(&self, theta: &Substitution) -> Formula {
        if theta.is_empty() {
            return self.clone();
        }
        match self {
            Formula::Eq(l, r) => Formula::Eq(l.subst(theta), r.subst(theta)),
            Formula::Pred(p, args) => Formula::Pred(p.clone(), args.iter().map(|a| a.subst(theta)).collect()),
            Formula::Not(a) => Formula::Not(Box::new(a.subst(theta))),
            Formula::And(a, b) => Formula::And(Box::new(a.subst(theta)), Box::new(b.subst(theta))),
            Formula::Or(a, b) => Formula::Or(Box::new(a.subst(theta)), Box::new(b.subst(theta))),
            Formula::Imp(a, b) => Formula::Imp(Box::new(a.subst(theta)), Box::new(b.subst(theta))),
            Formula::Forall(x, body) => Formula::Forall(x.clone(), Box::new(body.subst(&theta.without(x)))),
            Formula::Exists(x, body) => Formula::Exists(x.clone(), Box::new(body.subst(&theta.without(x)))),
        }
    }

    /// Largest term height occurring in the formula.
    pub fn max_term_height(&self) -> u32 {
        match self {
            Formula::Eq(l, r) => l.height().max(r.height()),
            Formula::Pred(_, args) => args.iter().map(Term::height).max().unwrap_or(0),
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => a.max_term_height(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => a.max_term_height().max(b.max_term_height()),
        }
    }
}

pub fn apply_subst(phi: &Formula, theta: &Substitution) -> Formula {
    phi.subst(theta)
}

/// A finite map from variables to terms, applied simultaneously.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Substitution(BTreeMap<Var, Term>);

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn single(v: Var, t: Term) -> Substitution {
        let mut s = Substitution::new();
        s.insert(v, t);
        s
    }

    pub fn insert(&mut self, v: Var, t: Term) -> Option<Term> {
        self.0.insert(v, t)
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.0.get(v)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.0.iter()
    }

    pub fn without(&self, v: &Var) -> Substitution {
        let mut s = self.clone();
        s.0.remove(v);
        s
    }

    /// Drops bindings `x := x`.
    pub fn normalized(&self) -> Substitution {
        Substitution(self.0.iter().filter(|(v, t)| t.as_var() != Some(v)).map(|(v, t)| (v.clone(), t.clone())).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|(v, t)| t.as_var() == Some(v))
    }

    pub fn apply_sequent(&self, s: &Sequent) -> Sequent {
        Sequent { left: s.left.iter().map(|f| f.subst(self)).collect(), right: s.right.iter().map(|f| f.subst(self)).collect() }
    }
}

impl FromIterator<(Var, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Self {
        Substitution(iter.into_iter().collect())
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Sequent {
    pub left: BTreeSet<Formula>,
    pub right: BTreeSet<Formula>,
}

impl Sequent {
    pub fn new(left: impl IntoIterator<Item = Formula>, right: impl IntoIterator<Item = Formula>) -> Sequent {
        Sequent { left: left.into_iter().collect(), right: right.into_iter().collect() }
    }

    pub fn fv(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for f in self.left.iter().chain(&self.right) {
            f.collect_fv(&mut out);
        }
        out
    }

    pub fn max_term_height(&self) -> u32 {
        self.left.iter().chain(&self.right).map(Formula::max_term_height).max().unwrap_or(0)
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.left.iter().chain(&self.right)
    }
}

/// A production `ordinary, inductive => conclusion`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Production {
    pub name: String,
    pub pred: Sym,
    pub params: Vec<Var>,
    pub ordinary: Vec<Formula>,
    pub inductive: Vec<Formula>,
    pub conclusion: Vec<Term>,
}

impl Production {
    pub fn conclusion_atom(&self) -> Formula {
        Formula::Pred(self.pred.clone(), self.conclusion.clone())
    }

    pub fn premises(&self) -> impl Iterator<Item = &Formula> {
        self.ordinary.iter().chain(&self.inductive)
    }

    pub(crate) fn compute_params(conclusion: &[Term], premises: &[Formula]) -> Vec<Var> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let mut push = |t: &Term| {
            for v in ordered_vars(t) {
                if seen.insert(v.clone()) {
                    out.push(v);
                }
            }
        };
        conclusion.iter().for_each(&mut push);
        for p in premises {
            match p {
                Formula::Eq(l, r) => {
                    push(l);
                    push(r);
                }
                Formula::Pred(_, args) => args.iter().for_each(&mut push),
                _ => {}
            }
        }
        out
    }
}

fn ordered_vars(t: &Term) -> Vec<Var> {
    fn go(t: &Term, out: &mut Vec<Var>) {
        match t {
            Term::Var(v) => out.push(v.clone()),
            Term::App(_, args) => args.iter().for_each(|a| go(a, out)),
        }
    }
    let mut out = Vec::new();
    go(t, &mut out);
    out
}

/// An inductive definition set with its signature.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct IndDefSet {
    /// Inductive predicates in declaration order.
    pub inductive: Vec<(Sym, usize)>,
    pub productions: Vec<Production>,
    pub ordinary: BTreeMap<Sym, usize>,
    pub functions: BTreeMap<Sym, usize>,
}

impl IndDefSet {
    pub fn is_inductive(&self, p: &Sym) -> bool {
        self.inductive.iter().any(|(q, _)| q == p)
    }

    pub fn is_inductive_atom(&self, f: &Formula) -> bool {
        matches!(f, Formula::Pred(p, _) if self.is_inductive(p))
    }

    pub fn pred_arity(&self, p: &Sym) -> Option<usize> {
        self.inductive.iter().find(|(q, _)| q == p).map(|(_, n)| *n).or_else(|| self.ordinary.get(p).copied())
    }

    pub fn productions_of<'a>(&'a self, p: &'a Sym) -> impl Iterator<Item = &'a Production> + 'a {
        self.productions.iter().filter(move |r| &r.pred == p)
    }

    pub fn production(&self, p: &Sym, name: &str) -> Option<&Production> {
        self.productions.iter().find(|r| &r.pred == p && r.name == name)
    }

    /// Adds the predicates and productions of `other`; names already present
    /// are kept from `self`.
    pub fn merge(&mut self, other: &IndDefSet) {
        for (p, n) in &other.inductive {
            if !self.is_inductive(p) {
                self.inductive.push((p.clone(), *n));
                self.productions.extend(other.productions_of(p).cloned());
            }
        }
        for (p, n) in &other.ordinary {
            self.ordinary.entry(p.clone()).or_insert(*n);
        }
        for (f, n) in &other.functions {
            self.functions.entry(f.clone()).or_insert(*n);
        }
    }
}

/// Supply of fresh `_vN` variables, monotone in `N`.
#[derive(Clone, Debug, Default)]
pub struct FreshSupply {
    next: u64,
    avoid: BTreeSet<Var>,
}

impl FreshSupply {
    pub fn new() -> FreshSupply {
        FreshSupply::default()
    }

    /// A supply that never returns a member of `avoid`.
    pub fn avoiding(avoid: impl IntoIterator<Item = Var>) -> FreshSupply {
        FreshSupply { next: 0, avoid: avoid.into_iter().collect() }
    }

    pub fn starting_at(next: u64) -> FreshSupply {
        FreshSupply { next, avoid: BTreeSet::new() }
    }

    pub fn avoid(&mut self, vars: impl IntoIterator<Item = Var>) {
        self.avoid.extend(vars);
    }

    pub fn counter(&self) -> u64 {
        self.next
    }

    pub fn fresh(&mut self) -> Var {
        loop {
            let v = Var::new(&format!("_v{}", self.next));
            self.next += 1;
            if !self.avoid.contains(&v) {
                return v;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Term {
        parse_term(s, &IndDefSet::default()).unwrap()
    }

    #[test]
    fn decompose_towers() {
        assert_eq!(decompose(&t("s(s(0))")).unwrap(), Tower { base: Base::Zero, height: 2 });
        assert_eq!(decompose(&t("x")).unwrap(), Tower { base: Base::Var(Var::new("x")), height: 0 });
        let fx = Term::App(Sym::new("f"), vec![Term::var("x"), Term::var("y")]);
        assert!(decompose(&fx).is_err());
        assert!(decompose(&t("s(f(x))")).is_err());
    }

    #[test]
    fn tower_round_trip() {
        for s in ["0", "x", "s(x)", "s(s(s(0)))"] {
            assert_eq!(decompose(&t(s)).unwrap().to_term(), t(s));
        }
    }

    #[test]
    fn substitution_examples() {
        let defs = parse_defs(crate::fixtures::ADD_DEFS).unwrap();
        let f = |s: &str| parse_formula(s, &defs).unwrap();
        let th = Substitution::single(Var::new("x"), t("s(x1)"));
        assert_eq!(apply_subst(&f("Add1(x,y,z)"), &th), f("Add1(s(x1),y,z)"));
        let swap: Substitution = [(Var::new("x"), t("y")), (Var::new("y"), t("x"))].into_iter().collect();
        assert_eq!(apply_subst(&f("x = y"), &swap), f("y = x"));
        let th = Substitution::single(Var::new("y"), t("0"));
        assert_eq!(apply_subst(&f("Add2(x,s(y),z)"), &th), f("Add2(x,s(0),z)"));
    }

    #[test]
    fn subst_respects_binders() {
        let defs = IndDefSet::default();
        let phi = parse_formula("forall x. x = y", &defs).unwrap();
        let th: Substitution = [(Var::new("x"), t("0")), (Var::new("y"), t("x1"))].into_iter().collect();
        assert_eq!(phi.subst(&th), parse_formula("forall x. x = x1", &defs).unwrap());
    }

    #[test]
    fn fresh_supply_skips_avoided() {
        let mut f = FreshSupply::avoiding([Var::new("_v0"), Var::new("_v2")]);
        assert_eq!(f.fresh().name(), "_v1");
        assert_eq!(f.fresh().name(), "_v3");
    }

    #[test]
    fn params_follow_first_occurrence() {
        let defs = parse_defs(crate::fixtures::ADD_DEFS).unwrap();
        let r2 = defs.production(&Sym::new("Add2"), "R2").unwrap();
        let names: Vec<_> = r2.params.iter().map(|v| v.name().to_string()).collect();
        assert_eq!(names, ["x", "y", "z"]);
    }
}
