//! Reconstruction of full rule instances from the partial annotations used in
//! proof scripts.

use std::collections::BTreeSet;
use std::fmt;

use super::matching::{match_formula, match_into, match_sequent};
use super::rewrite::formula_patterns;
use super::{case_branch, check_instance, Connective, EqTemplate, Quantifier, RuleId, RuleInstance, RuleViolation, System};
use crate::syntax::{Formula, FreshSupply, IndDefSet, Sequent, Substitution, Sym, Term, Var};

/// A rule as written in a script: the rule name plus whatever annotations
/// the author supplied.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RuleSpec {
    Axiom,
    Weak,
    Cut(Formula),
    Subst(Option<Substitution>),
    Logical(Connective, Option<Formula>),
    Quant(Quantifier, Option<Formula>, Option<Term>),
    EqL(Option<Formula>),
    EqLa(Option<Formula>),
    EqR(Option<Term>),
    Intro(Sym, String, Option<Formula>),
    Case(Sym, Option<Formula>),
}

impl RuleSpec {
    /// The most explicit spec describing `inst`.
    pub fn of(inst: &RuleInstance) -> RuleSpec {
        match inst {
            RuleInstance::Axiom => RuleSpec::Axiom,
            RuleInstance::Weak { .. } => RuleSpec::Weak,
            RuleInstance::Cut { formula } => RuleSpec::Cut(formula.clone()),
            RuleInstance::Subst { theta, .. } => RuleSpec::Subst(Some(theta.clone())),
            RuleInstance::Logical { conn, principal, .. } => RuleSpec::Logical(*conn, Some(principal.clone())),
            RuleInstance::Quant { quant, principal, term, .. } => RuleSpec::Quant(*quant, Some(principal.clone()), Some(term.clone())),
            RuleInstance::EqL(t) => RuleSpec::EqL(Some(t.equation())),
            RuleInstance::EqLa(t) => RuleSpec::EqLa(Some(t.equation())),
            RuleInstance::EqR { term } => RuleSpec::EqR(Some(term.clone())),
            RuleInstance::Intro { pred, production, .. } => RuleSpec::Intro(pred.clone(), production.clone(), None),
            RuleInstance::Case { principal, .. } => {
                RuleSpec::Case(principal.pred_name().cloned().unwrap_or_else(|| Sym::new("?")), Some(principal.clone()))
            }
        }
    }

    pub fn id(&self) -> RuleId {
        match self {
            RuleSpec::Axiom => RuleId::Axiom,
            RuleSpec::Weak => RuleId::Weak,
            RuleSpec::Cut(_) => RuleId::Cut,
            RuleSpec::Subst(_) => RuleId::Subst,
            RuleSpec::Logical(c, _) => RuleId::Logical(*c),
            RuleSpec::Quant(q, ..) => RuleId::Quant(*q),
            RuleSpec::EqL(_) => RuleId::EqL,
            RuleSpec::EqLa(_) => RuleId::EqLa,
            RuleSpec::EqR(_) => RuleId::EqR,
            RuleSpec::Intro(p, r, _) => RuleId::RightIntro(p.clone(), r.clone()),
            RuleSpec::Case(p, _) => RuleId::Case(p.clone()),
        }
    }
}

impl fmt::Display for RuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleSpec::Axiom => f.write_str("axiom"),
            RuleSpec::Weak => f.write_str("weak"),
            RuleSpec::Cut(phi) => write!(f, "cut({phi})"),
            RuleSpec::Subst(None) => f.write_str("subst"),
            RuleSpec::Subst(Some(th)) => write!(f, "subst({th})"),
            RuleSpec::Logical(c, None) => f.write_str(c.keyword()),
            RuleSpec::Logical(c, Some(p)) => write!(f, "{}({p})", c.keyword()),
            RuleSpec::Quant(q, p, t) => {
                f.write_str(q.keyword())?;
                match (p, t) {
                    (Some(p), Some(t)) => write!(f, "({p}, {t})"),
                    (Some(p), None) => write!(f, "({p})"),
                    (None, Some(t)) => write!(f, "(_, {t})"),
                    (None, None) => Ok(()),
                }
            }
            RuleSpec::EqL(e) | RuleSpec::EqLa(e) => {
                f.write_str(if matches!(self, RuleSpec::EqL(_)) { "eql" } else { "eqla" })?;
                match e {
                    Some(e) => write!(f, "({e})"),
                    None => Ok(()),
                }
            }
            RuleSpec::EqR(None) => f.write_str("eqr"),
            RuleSpec::EqR(Some(t)) => write!(f, "eqr({t})"),
            RuleSpec::Intro(p, r, None) => write!(f, "intro({p}.{r})"),
            RuleSpec::Intro(p, r, Some(a)) => write!(f, "intro({p}.{r}, {a})"),
            RuleSpec::Case(p, None) => write!(f, "case({p})"),
            RuleSpec::Case(p, Some(a)) => write!(f, "case({p}, {a})"),
        }
    }
}

fn fail(rule: RuleId, reason: impl Into<String>) -> RuleViolation {
    RuleViolation::Elaboration { rule, reason: reason.into() }
}

fn single(premises: &[Sequent]) -> Result<Sequent, RuleViolation> {
    match premises {
        [p] => Ok(p.clone()),
        _ => Err(RuleViolation::PremiseCount { expected: 1, found: premises.len() }),
    }
}

/// Turns a script rule into a rule instance for the given conclusion and
/// premises. The result is the first candidate that checks; when none does,
/// the most plausible one is returned and checking reports the mismatch.
pub fn elaborate(
    system: System,
    defs: &IndDefSet,
    conclusion: &Sequent,
    spec: &RuleSpec,
    premises: &[Sequent],
) -> Result<RuleInstance, RuleViolation> {
    let id = spec.id();
    let candidates = candidates(defs, conclusion, spec, premises)?;
    if candidates.is_empty() {
        return Err(fail(id, "no formula of the conclusion fits the rule"));
    }
    for c in &candidates {
        if check_instance(system, defs, conclusion, c, premises).is_ok() {
            return Ok(c.clone());
        }
    }
    Ok(candidates.into_iter().next().expect("non-empty"))
}

fn principals<'a>(side: &'a BTreeSet<Formula>, given: &'a Option<Formula>, fits: impl Fn(&Formula) -> bool) -> Vec<Formula> {
    match given {
        Some(p) => vec![p.clone()],
        None => side.iter().filter(|f| fits(f)).cloned().collect(),
    }
}

fn candidates(defs: &IndDefSet, conclusion: &Sequent, spec: &RuleSpec, premises: &[Sequent]) -> Result<Vec<RuleInstance>, RuleViolation> {
    let id = spec.id();
    Ok(match spec {
        RuleSpec::Axiom => vec![RuleInstance::Axiom],
        RuleSpec::Weak => vec![RuleInstance::Weak { premise: single(premises)? }],
        RuleSpec::Cut(phi) => vec![RuleInstance::Cut { formula: phi.clone() }],
        RuleSpec::Subst(Some(theta)) => {
            vec![RuleInstance::Subst { theta: theta.clone(), premise: single(premises)? }]
        }
        RuleSpec::Subst(None) => {
            let premise = single(premises)?;
            let found = match_sequent(&premise, conclusion, true);
            let Some(theta) = found.into_iter().next() else {
                return Err(fail(id, "no substitution maps the premise onto the conclusion"));
            };
            vec![RuleInstance::Subst { theta: theta.normalized(), premise }]
        }
        RuleSpec::Logical(conn, given) => {
            let side = if conn.is_left() { &conclusion.left } else { &conclusion.right };
            let mut out = Vec::new();
            for p in principals(side, given, |f| conn.fits(f)) {
                for keep in [false, true] {
                    out.push(RuleInstance::Logical { conn: *conn, principal: p.clone(), keep });
                }
            }
            out
        }
        RuleSpec::Quant(q, given, term) => {
            let side = if q.is_left() { &conclusion.left } else { &conclusion.right };
            let mut out = Vec::new();
            for p in principals(side, given, |f| q.split(f).is_some()) {
                let Some((x, body)) = q.split(&p) else { continue };
                let terms = match term {
                    Some(t) => vec![t.clone()],
                    None => quant_terms(x, body, q.is_left(), premises),
                };
                for t in terms {
                    for keep in [false, true] {
                        out.push(RuleInstance::Quant { quant: *q, principal: p.clone(), term: t.clone(), keep });
                    }
                }
            }
            out
        }
        RuleSpec::EqL(given) | RuleSpec::EqLa(given) => {
            let keeps = matches!(spec, RuleSpec::EqLa(_));
            let premise = single(premises)?;
            let eqs = principals(&conclusion.left, given, |f| matches!(f, Formula::Eq(..)));
            eqs.iter()
                .filter_map(|e| match e {
                    Formula::Eq(t, u) => Some(infer_template(conclusion, &premise, t, u)),
                    _ => None,
                })
                .map(|tpl| if keeps { RuleInstance::EqLa(tpl) } else { RuleInstance::EqL(tpl) })
                .collect()
        }
        RuleSpec::EqR(Some(t)) => vec![RuleInstance::EqR { term: t.clone() }],
        RuleSpec::EqR(None) => conclusion
            .right
            .iter()
            .filter_map(|f| match f {
                Formula::Eq(a, b) if a == b => Some(RuleInstance::EqR { term: a.clone() }),
                _ => None,
            })
            .collect(),
        RuleSpec::Intro(pred, name, given) => {
            let prod = defs.production(pred, name).ok_or_else(|| RuleViolation::UnknownProduction(pred.clone(), name.clone()))?;
            let params: BTreeSet<Var> = prod.params.iter().cloned().collect();
            let pattern = prod.conclusion_atom();
            let prem_pats: Vec<Formula> = prod.premises().cloned().collect();
            let mut out = Vec::new();
            for p in principals(&conclusion.right, given, |f| f.pred_name() == Some(pred)) {
                let mut th = Substitution::new();
                if !match_formula(&pattern, &p, &params, &mut th) {
                    continue;
                }
                let th = extend_by_premises(&prem_pats, premises, &params, th);
                let inst: Substitution =
                    prod.params.iter().map(|v| (v.clone(), th.get(v).cloned().unwrap_or_else(|| Term::Var(v.clone())))).collect();
                for keep in [false, true] {
                    out.push(RuleInstance::Intro { pred: pred.clone(), production: name.clone(), inst: inst.clone(), keep });
                }
            }
            out
        }
        RuleSpec::Case(pred, given) => {
            let mut out = Vec::new();
            for p in principals(&conclusion.left, given, |f| f.pred_name() == Some(pred)) {
                for keep in [false, true] {
                    out.push(RuleInstance::Case { principal: p.clone(), fresh: case_fresh(defs, conclusion, &p, premises, keep), keep });
                }
            }
            out
        }
    })
}

fn quant_terms(x: &Var, body: &Formula, left: bool, premises: &[Sequent]) -> Vec<Term> {
    let Some(premise) = premises.first() else { return vec![Term::Var(x.clone())] };
    let side = if left { &premise.left } else { &premise.right };
    let vars: BTreeSet<Var> = [x.clone()].into_iter().collect();
    let mut out = Vec::new();
    for f in side {
        let mut th = Substitution::new();
        if match_formula(body, f, &vars, &mut th) {
            let t = th.get(x).cloned().unwrap_or_else(|| Term::Var(x.clone()));
            if !out.contains(&t) {
                out.push(t);
            }
        }
    }
    if out.is_empty() {
        out.push(Term::Var(x.clone()));
    }
    out
}

fn extend_by_premises(pats: &[Formula], premises: &[Sequent], params: &BTreeSet<Var>, th: Substitution) -> Substitution {
    fn go(pats: &[Formula], premises: &[Sequent], params: &BTreeSet<Var>, th: Substitution) -> Option<Substitution> {
        let (Some((p, rest)), Some((s, srest))) = (pats.split_first(), premises.split_first()) else {
            return Some(th);
        };
        for f in &s.right {
            let mut th2 = th.clone();
            if match_formula(p, f, params, &mut th2) {
                if let Some(done) = go(rest, srest, params, th2) {
                    return Some(done);
                }
            }
        }
        None
    }
    go(pats, premises, params, th.clone()).unwrap_or(th)
}

fn case_fresh(defs: &IndDefSet, conclusion: &Sequent, principal: &Formula, premises: &[Sequent], keep: bool) -> Vec<Vec<Var>> {
    let Some(pred) = principal.pred_name() else { return vec![] };
    let mut avoid = conclusion.fv();
    for p in premises {
        avoid.extend(p.fv());
    }
    let mut supply = FreshSupply::avoiding(avoid);
    let mut rest = conclusion.left.clone();
    if !keep {
        rest.remove(principal);
    }
    defs.productions_of(pred)
        .enumerate()
        .map(|(i, prod)| {
            let holes: Vec<Var> = prod.params.iter().map(|_| supply.fresh()).collect();
            let Some(premise) = premises.get(i) else { return holes };
            let branch = case_branch(prod, principal, &holes);
            let hole_set: BTreeSet<Var> = holes.iter().cloned().collect();
            let pats: Vec<&Formula> = branch.added.iter().collect();
            let targets: Vec<&Formula> = premise.left.iter().collect();
            for th in match_into(&pats, &targets, &hole_set, &Substitution::new()) {
                let Some(ys) = holes.iter().map(|h| th.get(h).and_then(Term::as_var).cloned()).collect::<Option<Vec<Var>>>() else {
                    continue;
                };
                let mut left = rest.clone();
                left.extend(branch.added.iter().map(|f| f.subst(&th)));
                if left == premise.left {
                    return ys;
                }
            }
            holes
        })
        .collect()
}

/// Equality template whose premise images are exactly the premise formulas
/// obtainable by swapping occurrences of `t` and `u`.
pub fn infer_template(conclusion: &Sequent, premise: &Sequent, t: &Term, u: &Term) -> EqTemplate {
    let mut avoid = conclusion.fv();
    avoid.extend(premise.fv());
    let mut supply = FreshSupply::avoiding(avoid);
    let (x, y) = (supply.fresh(), supply.fresh());
    let bw: Substitution = [(x.clone(), u.clone()), (y.clone(), t.clone())].into_iter().collect();
    let eq = Formula::Eq(t.clone(), u.clone());
    let side = |from: &BTreeSet<Formula>, to: &BTreeSet<Formula>, principal: Option<&Formula>| {
        let mut out = BTreeSet::new();
        for phi in from {
            let hits: Vec<Formula> = formula_patterns(phi, t, u, &x, &y).into_iter().filter(|p| to.contains(&p.subst(&bw))).collect();
            if hits.is_empty() {
                if Some(phi) != principal {
                    out.insert(phi.clone());
                }
            } else {
                out.extend(hits);
            }
        }
        out
    };
    let left = side(&conclusion.left, &premise.left, Some(&eq));
    let right = side(&conclusion.right, &premise.right, None);
    EqTemplate { lhs: t.clone(), rhs: u.clone(), x, y, left, right }
}

/// Template rewriting every occurrence of `from` (one side of the equation
/// `lhs = rhs`) into the other side, leaving the equation itself out.
pub fn directional_template(conclusion: &Sequent, lhs: &Term, rhs: &Term, forward: bool) -> EqTemplate {
    let mut supply = FreshSupply::avoiding(conclusion.fv());
    let (x, y) = (supply.fresh(), supply.fresh());
    let eq = Formula::Eq(lhs.clone(), rhs.clone());
    let (from, hole) = if forward { (lhs, &x) } else { (rhs, &y) };
    let abs = |f: &Formula| super::rewrite::abstract_all(f, from, hole);
    EqTemplate {
        lhs: lhs.clone(),
        rhs: rhs.clone(),
        x: x.clone(),
        y: y.clone(),
        left: conclusion.left.iter().filter(|f| **f != eq).map(abs).collect(),
        right: conclusion.right.iter().map(abs).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::ADD_DEFS;
    use crate::syntax::{parse_defs, parse_formula, parse_sequent};

    fn defs() -> IndDefSet {
        parse_defs(ADD_DEFS).unwrap()
    }

    fn sq(s: &str) -> Sequent {
        parse_sequent(s, &defs()).unwrap()
    }

    #[test]
    fn elaborates_equality_steps() {
        let d = defs();
        let concl = sq("x1 = 0, s(y1) = y2, z1 = y2 |- Add1(s(x1), y1, z1)");
        let prem = sq("s(y1) = y2, z1 = y2 |- Add1(s(0), y1, z1)");
        let spec = RuleSpec::EqL(Some(parse_formula("x1 = 0", &d).unwrap()));
        let inst = elaborate(System::Clkid, &d, &concl, &spec, std::slice::from_ref(&prem)).unwrap();
        assert_eq!(check_instance(System::Clkid, &d, &concl, &inst, std::slice::from_ref(&prem)), Ok(()));
        let unannotated = elaborate(System::Clkid, &d, &concl, &RuleSpec::EqL(None), std::slice::from_ref(&prem)).unwrap();
        assert_eq!(check_instance(System::Clkid, &d, &concl, &unannotated, &[prem]), Ok(()));

        let concl = sq("s(y1) = y2, Add1(x2, y2, z2) |- Add1(s(s(x2)), y1, s(z2))");
        let prem = sq("s(y1) = y2, Add1(x2, s(y1), z2) |- Add1(s(s(x2)), y1, s(z2))");
        let inst = elaborate(System::ClkidA, &d, &concl, &RuleSpec::EqLa(None), std::slice::from_ref(&prem)).unwrap();
        assert_eq!(check_instance(System::ClkidA, &d, &concl, &inst, &[prem]), Ok(()));
    }

    #[test]
    fn elaborates_case_intro_and_subst() {
        let d = defs();
        let concl = sq("Add2(x, y, z) |- Add1(x, y, z)");
        let prems = [sq("x = 0, y = y1, z = y1 |- Add1(x, y, z)"), sq("x = s(x1), y = y1, z = z1, Add2(x1, s(y1), z1) |- Add1(x, y, z)")];
        let inst = elaborate(System::Clkid, &d, &concl, &RuleSpec::Case(Sym::new("Add2"), None), &prems).unwrap();
        assert_eq!(check_instance(System::Clkid, &d, &concl, &inst, &prems), Ok(()));

        let concl = sq("Add2(a, b, c) |- Add1(s(a), b, s(c))");
        let prem = sq("Add2(a, b, c) |- Add1(a, b, c)");
        let inst = elaborate(System::Clkid, &d, &concl, &RuleSpec::Intro(Sym::new("Add1"), "R2".into(), None), std::slice::from_ref(&prem))
            .unwrap();
        assert_eq!(check_instance(System::Clkid, &d, &concl, &inst, &[prem]), Ok(()));

        let concl = sq("Add1(x2, s(y1), z2) |- Add1(s(x2), y1, z2)");
        let prem = sq("Add1(x1, s(y1), z1) |- Add1(s(x1), y1, z1)");
        let inst = elaborate(System::Clkid, &d, &concl, &RuleSpec::Subst(None), std::slice::from_ref(&prem)).unwrap();
        match &inst {
            RuleInstance::Subst { theta, .. } => assert_eq!(theta.to_string(), "x1 := x2, z1 := z2"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn directional_rewrite() {
        let d = defs();
        let concl = sq("x = s(x1), Add2(x1, s(y), z) |- Add1(x, y, z)");
        let tpl = directional_template(&concl, &Term::var("x"), &crate::syntax::parse_term("s(x1)", &d).unwrap(), true);
        let inst = RuleInstance::EqLa(tpl);
        let out = super::super::premises_of(System::ClkidA, &d, &concl, &inst).unwrap();
        assert_eq!(out, vec![sq("x = s(x1), Add2(x1, s(y), z) |- Add1(s(x1), y, z)")]);
    }
}
