//! Local rule checking for the cyclic systems with and without the
//! equality-keeping left rule.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::syntax::{Formula, FreshSupply, IndDefSet, Production, Sequent, Substitution, Sym, Term, Var};

mod infer;
pub mod matching;
pub mod rewrite;

pub use infer::{directional_template, elaborate, infer_template, RuleSpec};

/// Which left equality rule is available.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, Serialize, Default)]
pub enum System {
    /// Equality left rule consumes the equation.
    #[default]
    #[serde(rename = "clkid")]
    Clkid,
    /// Equality left rule keeps the equation.
    #[serde(rename = "clkid-a")]
    ClkidA,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown system `{0}` (expected clkid or clkid-a)")]
pub struct UnknownSystem(pub String);

impl std::str::FromStr for System {
    type Err = UnknownSystem;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "clkid" => Ok(System::Clkid),
            "clkid-a" => Ok(System::ClkidA),
            _ => Err(UnknownSystem(s.to_string())),
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            System::Clkid => "clkid",
            System::ClkidA => "clkid-a",
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, PartialOrd, Ord, Serialize)]
pub enum Connective {
    NotL,
    NotR,
    OrL,
    OrR,
    AndL,
    AndR,
    ImpL,
    ImpR,
}

impl Connective {
    pub const ALL: [Connective; 8] = [
        Connective::NotL,
        Connective::NotR,
        Connective::OrL,
        Connective::OrR,
        Connective::AndL,
        Connective::AndR,
        Connective::ImpL,
        Connective::ImpR,
    ];

    pub fn is_left(self) -> bool {
        matches!(self, Connective::NotL | Connective::OrL | Connective::AndL | Connective::ImpL)
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Connective::NotL => "notl",
            Connective::NotR => "notr",
            Connective::OrL => "orl",
            Connective::OrR => "orr",
            Connective::AndL => "andl",
            Connective::AndR => "andr",
            Connective::ImpL => "impl",
            Connective::ImpR => "impr",
        }
    }

    fn fits(self, f: &Formula) -> bool {
        matches!(
            (self, f),
            (Connective::NotL | Connective::NotR, Formula::Not(_))
                | (Connective::OrL | Connective::OrR, Formula::Or(..))
                | (Connective::AndL | Connective::AndR, Formula::And(..))
                | (Connective::ImpL | Connective::ImpR, Formula::Imp(..))
        )
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, PartialOrd, Ord, Serialize)]
pub enum Quantifier {
    AllL,
    AllR,
    ExL,
    ExR,
}

impl Quantifier {
    pub const ALL: [Quantifier; 4] = [Quantifier::AllL, Quantifier::AllR, Quantifier::ExL, Quantifier::ExR];

    pub fn is_left(self) -> bool {
        matches!(self, Quantifier::AllL | Quantifier::ExL)
    }

    /// Eigenvariable rules as opposed to witness rules.
    pub fn is_eigen(self) -> bool {
        matches!(self, Quantifier::AllR | Quantifier::ExL)
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::AllL => "alll",
            Quantifier::AllR => "allr",
            Quantifier::ExL => "exl",
            Quantifier::ExR => "exr",
        }
    }

    fn split(self, f: &Formula) -> Option<(&Var, &Formula)> {
        match (self, f) {
            (Quantifier::AllL | Quantifier::AllR, Formula::Forall(x, b)) => Some((x, b)),
            (Quantifier::ExL | Quantifier::ExR, Formula::Exists(x, b)) => Some((x, b)),
            _ => None,
        }
    }
}

/// Rule names without annotations.
#[derive(Clone, PartialEq, Eq, Debug, Hash, PartialOrd, Ord, Serialize)]
pub enum RuleId {
    Axiom,
    Weak,
    Cut,
    Subst,
    Logical(Connective),
    Quant(Quantifier),
    EqL,
    EqLa,
    EqR,
    RightIntro(Sym, String),
    Case(Sym),
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleId::Axiom => f.write_str("axiom"),
            RuleId::Weak => f.write_str("weak"),
            RuleId::Cut => f.write_str("cut"),
            RuleId::Subst => f.write_str("subst"),
            RuleId::Logical(c) => f.write_str(c.keyword()),
            RuleId::Quant(q) => f.write_str(q.keyword()),
            RuleId::EqL => f.write_str("eql"),
            RuleId::EqLa => f.write_str("eqla"),
            RuleId::EqR => f.write_str("eqr"),
            RuleId::RightIntro(p, r) => write!(f, "intro({p}.{r})"),
            RuleId::Case(p) => write!(f, "case({p})"),
        }
    }
}

/// Data for the left equality rules. The conclusion is
/// `left[x:=lhs, y:=rhs], lhs = rhs |- right[x:=lhs, y:=rhs]` and the premise
/// swaps the two bindings.
#[derive(Clone, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub struct EqTemplate {
    pub lhs: Term,
    pub rhs: Term,
    pub x: Var,
    pub y: Var,
    pub left: BTreeSet<Formula>,
    pub right: BTreeSet<Formula>,
}

impl EqTemplate {
    pub fn equation(&self) -> Formula {
        Formula::Eq(self.lhs.clone(), self.rhs.clone())
    }

    pub fn forward(&self) -> Substitution {
        [(self.x.clone(), self.lhs.clone()), (self.y.clone(), self.rhs.clone())].into_iter().collect()
    }

    pub fn backward(&self) -> Substitution {
        [(self.x.clone(), self.rhs.clone()), (self.y.clone(), self.lhs.clone())].into_iter().collect()
    }

    fn instantiate(&self, th: &Substitution) -> Sequent {
        Sequent::new(self.left.iter().map(|f| f.subst(th)), self.right.iter().map(|f| f.subst(th)))
    }

    /// Antecedent atoms of the premise that `tau` (a conclusion atom) may
    /// trace to.
    pub fn images_of(&self, tau: &Formula) -> Vec<Formula> {
        let (fw, bw) = (self.forward(), self.backward());
        let mut out: Vec<Formula> = self.left.iter().filter(|f| &f.subst(&fw) == tau).map(|f| f.subst(&bw)).collect();
        out.sort();
        out.dedup();
        out
    }
}

/// A fully annotated rule application.
#[derive(Clone, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub enum RuleInstance {
    Axiom,
    Weak {
        premise: Sequent,
    },
    Cut {
        formula: Formula,
    },
    Subst {
        theta: Substitution,
        premise: Sequent,
    },
    /// `keep` leaves the principal formula in the premise.
    Logical {
        conn: Connective,
        principal: Formula,
        keep: bool,
    },
    /// `term` is the witness, or the eigenvariable for `AllR`/`ExL`.
    Quant {
        quant: Quantifier,
        principal: Formula,
        term: Term,
        keep: bool,
    },
    EqL(EqTemplate),
    EqLa(EqTemplate),
    EqR {
        term: Term,
    },
    Intro {
        pred: Sym,
        production: String,
        inst: Substitution,
        keep: bool,
    },
    Case {
        principal: Formula,
        fresh: Vec<Vec<Var>>,
        keep: bool,
    },
}

impl RuleInstance {
    pub fn id(&self) -> RuleId {
        match self {
            RuleInstance::Axiom => RuleId::Axiom,
            RuleInstance::Weak { .. } => RuleId::Weak,
            RuleInstance::Cut { .. } => RuleId::Cut,
            RuleInstance::Subst { .. } => RuleId::Subst,
            RuleInstance::Logical { conn, .. } => RuleId::Logical(*conn),
            RuleInstance::Quant { quant, .. } => RuleId::Quant(*quant),
            RuleInstance::EqL(_) => RuleId::EqL,
            RuleInstance::EqLa(_) => RuleId::EqLa,
            RuleInstance::EqR { .. } => RuleId::EqR,
            RuleInstance::Intro { pred, production, .. } => RuleId::RightIntro(pred.clone(), production.clone()),
            RuleInstance::Case { principal, .. } => RuleId::Case(principal.pred_name().cloned().unwrap_or_else(|| Sym::new("?"))),
        }
    }

    pub fn is_cut(&self) -> bool {
        matches!(self, RuleInstance::Cut { .. })
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum RuleViolation {
    #[error("rule {rule} is not available in system {system}")]
    WrongSystem { rule: RuleId, system: System },
    #[error("axiom: antecedent and succedent share no formula")]
    AxiomDisjoint,
    #[error("weak: premise formula {0} is not in the conclusion")]
    NotWeakening(Formula),
    #[error("principal formula {0} is not in the conclusion")]
    PrincipalAbsent(Formula),
    #[error("principal formula {formula} does not fit rule {rule}")]
    WrongShape { rule: RuleId, formula: Formula },
    #[error("eigenvariable {0} occurs free in the conclusion")]
    EigenvariableNotFresh(Var),
    #[error("case: fresh variable {0} is reused")]
    FreshNotDistinct(Var),
    #[error("case: fresh variable {0} occurs free in the conclusion")]
    FreshNotFresh(Var),
    #[error("case: production {production} needs {expected} fresh variables, got {found}")]
    FreshArity { production: String, expected: usize, found: usize },
    #[error("case: {expected} productions but {found} fresh vectors")]
    CaseCount { expected: usize, found: usize },
    #[error("unknown inductive predicate {0}")]
    UnknownPredicate(Sym),
    #[error("unknown production {0}.{1}")]
    UnknownProduction(Sym, String),
    #[error("equality template: template variables coincide")]
    TemplateVars,
    #[error("equality template does not reproduce the conclusion (expected {expected})")]
    TemplateMismatch { expected: Sequent },
    #[error("eqr: {0} = {0} is not in the succedent")]
    ReflexivityAbsent(Term),
    #[error("expected {expected} premises, found {found}")]
    PremiseCount { expected: usize, found: usize },
    #[error("premise {index} should be `{expected}` but is `{found}`")]
    PremiseMismatch { index: usize, expected: Sequent, found: Sequent },
    #[error("subst: premise under the substitution gives `{expected}`")]
    SubstMismatch { expected: Sequent },
    #[error("cannot elaborate rule {rule}: {reason}")]
    Elaboration { rule: RuleId, reason: String },
}

/// One premise of a case split.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CaseBranch {
    pub production: String,
    pub fresh: Vec<Var>,
    /// Equations, ordinary atoms and inductive atoms added to the antecedent.
    pub added: Vec<Formula>,
    pub descendants: Vec<Formula>,
}

/// The branch for one production with given fresh variables.
pub fn case_branch(prod: &Production, principal: &Formula, fresh: &[Var]) -> CaseBranch {
    let th: Substitution = prod.params.iter().cloned().zip(fresh.iter().cloned().map(Term::Var)).collect();
    let mut added: Vec<Formula> =
        principal.args().iter().zip(&prod.conclusion).map(|(u, t)| Formula::Eq(u.clone(), t.subst(&th))).collect();
    added.extend(prod.ordinary.iter().map(|f| f.subst(&th)));
    let descendants: Vec<Formula> = prod.inductive.iter().map(|f| f.subst(&th)).collect();
    added.extend(descendants.iter().cloned());
    CaseBranch { production: prod.name.clone(), fresh: fresh.to_vec(), added, descendants }
}

/// All case distinctions of `principal` in `conclusion`, one per production in
/// definition order, drawing fresh variables from `supply`.
pub fn case_distinctions(
    defs: &IndDefSet,
    conclusion: &Sequent,
    principal: &Formula,
    supply: &mut FreshSupply,
) -> Result<Vec<CaseBranch>, RuleViolation> {
    let pred = principal.pred_name().filter(|p| defs.is_inductive(p));
    let Some(pred) = pred else {
        return Err(RuleViolation::UnknownPredicate(principal.pred_name().cloned().unwrap_or_else(|| Sym::new("="))));
    };
    supply.avoid(conclusion.fv());
    supply.avoid(principal.fv());
    Ok(defs
        .productions_of(pred)
        .map(|prod| {
            let fresh: Vec<Var> = prod.params.iter().map(|_| supply.fresh()).collect();
            case_branch(prod, principal, &fresh)
        })
        .collect())
}

fn side_without(side: &BTreeSet<Formula>, principal: &Formula, keep: bool) -> BTreeSet<Formula> {
    let mut s = side.clone();
    if !keep {
        s.remove(principal);
    }
    s
}

fn require(side: &BTreeSet<Formula>, f: &Formula) -> Result<(), RuleViolation> {
    if side.contains(f) {
        Ok(())
    } else {
        Err(RuleViolation::PrincipalAbsent(f.clone()))
    }
}

fn with(mut s: BTreeSet<Formula>, extra: impl IntoIterator<Item = Formula>) -> BTreeSet<Formula> {
    s.extend(extra);
    s
}

/// The premises the rule produces from the conclusion, in rule order.
pub fn premises_of(system: System, defs: &IndDefSet, conclusion: &Sequent, inst: &RuleInstance) -> Result<Vec<Sequent>, RuleViolation> {
    let (gamma, delta) = (&conclusion.left, &conclusion.right);
    match inst {
        RuleInstance::Axiom => {
            if gamma.intersection(delta).next().is_some() {
                Ok(vec![])
            } else {
                Err(RuleViolation::AxiomDisjoint)
            }
        }
        RuleInstance::Weak { premise } => {
            if let Some(f) = premise.left.difference(gamma).chain(premise.right.difference(delta)).next() {
                return Err(RuleViolation::NotWeakening(f.clone()));
            }
            Ok(vec![premise.clone()])
        }
        RuleInstance::Cut { formula } => Ok(vec![
            Sequent { left: gamma.clone(), right: with(delta.clone(), [formula.clone()]) },
            Sequent { left: with(gamma.clone(), [formula.clone()]), right: delta.clone() },
        ]),
        RuleInstance::Subst { theta, premise } => {
            let expected = theta.apply_sequent(premise);
            if &expected != conclusion {
                return Err(RuleViolation::SubstMismatch { expected });
            }
            Ok(vec![premise.clone()])
        }
        RuleInstance::Logical { conn, principal, keep } => {
            if !conn.fits(principal) {
                return Err(RuleViolation::WrongShape { rule: inst.id(), formula: principal.clone() });
            }
            let side = if conn.is_left() { gamma } else { delta };
            require(side, principal)?;
            let g = if conn.is_left() { side_without(gamma, principal, *keep) } else { gamma.clone() };
            let d = if conn.is_left() { delta.clone() } else { side_without(delta, principal, *keep) };
            let sq = |l: BTreeSet<Formula>, r: BTreeSet<Formula>| Sequent { left: l, right: r };
            Ok(match (conn, principal) {
                (Connective::NotL, Formula::Not(a)) => vec![sq(g, with(d, [(**a).clone()]))],
                (Connective::NotR, Formula::Not(a)) => vec![sq(with(g, [(**a).clone()]), d)],
                (Connective::OrL, Formula::Or(a, b)) => {
                    vec![sq(with(g.clone(), [(**a).clone()]), d.clone()), sq(with(g, [(**b).clone()]), d)]
                }
                (Connective::OrR, Formula::Or(a, b)) => vec![sq(g, with(d, [(**a).clone(), (**b).clone()]))],
                (Connective::AndL, Formula::And(a, b)) => vec![sq(with(g, [(**a).clone(), (**b).clone()]), d)],
                (Connective::AndR, Formula::And(a, b)) => {
                    vec![sq(g.clone(), with(d.clone(), [(**a).clone()])), sq(g, with(d, [(**b).clone()]))]
                }
                (Connective::ImpL, Formula::Imp(a, b)) => {
                    vec![sq(g.clone(), with(d.clone(), [(**a).clone()])), sq(with(g, [(**b).clone()]), d)]
                }
                (Connective::ImpR, Formula::Imp(a, b)) => vec![sq(with(g, [(**a).clone()]), with(d, [(**b).clone()]))],
                _ => unreachable!("shape checked above"),
            })
        }
        RuleInstance::Quant { quant, principal, term, keep } => {
            let Some((x, body)) = quant.split(principal) else {
                return Err(RuleViolation::WrongShape { rule: inst.id(), formula: principal.clone() });
            };
            let side = if quant.is_left() { gamma } else { delta };
            require(side, principal)?;
            if quant.is_eigen() {
                let y = term.as_var().ok_or_else(|| RuleViolation::Elaboration {
                    rule: inst.id(),
                    reason: format!("eigenvariable {term} is not a variable"),
                })?;
                if conclusion.fv().contains(y) {
                    return Err(RuleViolation::EigenvariableNotFresh(y.clone()));
                }
            }
            let body = body.subst(&Substitution::single(x.clone(), term.clone()));
            Ok(vec![if quant.is_left() {
                Sequent { left: with(side_without(gamma, principal, *keep), [body]), right: delta.clone() }
            } else {
                Sequent { left: gamma.clone(), right: with(side_without(delta, principal, *keep), [body]) }
            }])
        }
        RuleInstance::EqL(tpl) | RuleInstance::EqLa(tpl) => {
            let keeps = matches!(inst, RuleInstance::EqLa(_));
            match (system, keeps) {
                (System::Clkid, true) | (System::ClkidA, false) => return Err(RuleViolation::WrongSystem { rule: inst.id(), system }),
                _ => {}
            }
            if tpl.x == tpl.y {
                return Err(RuleViolation::TemplateVars);
            }
            let mut expected = tpl.instantiate(&tpl.forward());
            expected.left.insert(tpl.equation());
            if &expected != conclusion {
                return Err(RuleViolation::TemplateMismatch { expected });
            }
            let mut premise = tpl.instantiate(&tpl.backward());
            if keeps {
                premise.left.insert(tpl.equation());
            }
            Ok(vec![premise])
        }
        RuleInstance::EqR { term } => {
            if delta.contains(&Formula::Eq(term.clone(), term.clone())) {
                Ok(vec![])
            } else {
                Err(RuleViolation::ReflexivityAbsent(term.clone()))
            }
        }
        RuleInstance::Intro { pred, production, inst: th, keep } => {
            let prod =
                defs.production(pred, production).ok_or_else(|| RuleViolation::UnknownProduction(pred.clone(), production.clone()))?;
            let principal = prod.conclusion_atom().subst(th);
            require(delta, &principal)?;
            let d = side_without(delta, &principal, *keep);
            Ok(prod.premises().map(|p| Sequent { left: gamma.clone(), right: with(d.clone(), [p.subst(th)]) }).collect())
        }
        RuleInstance::Case { principal, fresh, keep } => {
            let pred = principal
                .pred_name()
                .filter(|p| defs.is_inductive(p))
                .ok_or_else(|| RuleViolation::UnknownPredicate(principal.pred_name().cloned().unwrap_or_else(|| Sym::new("="))))?;
            require(gamma, principal)?;
            let prods: Vec<&Production> = defs.productions_of(pred).collect();
            if prods.len() != fresh.len() {
                return Err(RuleViolation::CaseCount { expected: prods.len(), found: fresh.len() });
            }
            let fv = conclusion.fv();
            let rest = side_without(gamma, principal, *keep);
            let mut out = Vec::new();
            for (prod, ys) in prods.into_iter().zip(fresh) {
                if ys.len() != prod.params.len() {
                    return Err(RuleViolation::FreshArity { production: prod.name.clone(), expected: prod.params.len(), found: ys.len() });
                }
                let mut seen = BTreeSet::new();
                for y in ys {
                    if !seen.insert(y) {
                        return Err(RuleViolation::FreshNotDistinct(y.clone()));
                    }
                    if fv.contains(y) {
                        return Err(RuleViolation::FreshNotFresh(y.clone()));
                    }
                }
                let branch = case_branch(prod, principal, ys);
                out.push(Sequent { left: with(rest.clone(), branch.added), right: delta.clone() });
            }
            Ok(out)
        }
    }
}

/// Checks that `premises` are exactly what `inst` produces from `conclusion`.
pub fn check_instance(
    system: System,
    defs: &IndDefSet,
    conclusion: &Sequent,
    inst: &RuleInstance,
    premises: &[Sequent],
) -> Result<(), RuleViolation> {
    let expected = premises_of(system, defs, conclusion, inst)?;
    if expected.len() != premises.len() {
        return Err(RuleViolation::PremiseCount { expected: expected.len(), found: premises.len() });
    }
    for (index, (e, f)) in expected.into_iter().zip(premises).enumerate() {
        if &e != f {
            return Err(RuleViolation::PremiseMismatch { index, expected: e, found: f.clone() });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::ADD_DEFS;
    use crate::syntax::{parse_defs, parse_formula, parse_sequent, parse_sequent_reserved, parse_term};

    fn defs() -> IndDefSet {
        parse_defs(ADD_DEFS).unwrap()
    }

    fn sq(s: &str) -> Sequent {
        parse_sequent_reserved(s, &defs()).unwrap()
    }

    fn f(s: &str) -> Formula {
        parse_formula(s, &defs()).unwrap()
    }

    fn v(s: &str) -> Var {
        Var::new(s)
    }

    #[test]
    fn add1_r2_instance() {
        let d = defs();
        let concl = sq("Q0 = 0 |- Add2(a, b, c), Add1(s(a), b, s(c))");
        let prem = sq("Q0 = 0 |- Add2(a, b, c), Add1(a, b, c)");
        let inst = RuleInstance::Intro {
            pred: Sym::new("Add1"),
            production: "R2".into(),
            inst: [(v("x"), Term::var("a")), (v("y"), Term::var("b")), (v("z"), Term::var("c"))].into_iter().collect(),
            keep: false,
        };
        assert_eq!(check_instance(System::Clkid, &d, &concl, &inst, &[prem]), Ok(()));
    }

    #[test]
    fn case_add2_instance_and_freshness() {
        let d = defs();
        let concl = sq("Add2(a, b, c) |- Add1(a, b, c)");
        let prems = [sq("a = 0, b = y, c = y |- Add1(a, b, c)"), sq("a = s(x), b = y, c = z, Add2(x, s(y), z) |- Add1(a, b, c)")];
        let inst =
            RuleInstance::Case { principal: f("Add2(a, b, c)"), fresh: vec![vec![v("y")], vec![v("x"), v("y"), v("z")]], keep: false };
        assert_eq!(check_instance(System::Clkid, &d, &concl, &inst, &prems), Ok(()));

        let concl = sq("Add2(a, b, c), y = 0 |- Add1(a, b, c)");
        let prems: Vec<Sequent> =
            prems.iter().map(|p| Sequent { left: with(p.left.clone(), [f("y = 0")]), right: p.right.clone() }).collect();
        assert_eq!(check_instance(System::Clkid, &d, &concl, &inst, &prems), Err(RuleViolation::FreshNotFresh(v("y"))));
    }

    #[test]
    fn axiom_side_condition() {
        let d = defs();
        assert_eq!(premises_of(System::Clkid, &d, &sq("Add1(x,y,z) |- Add1(x,y,z)"), &RuleInstance::Axiom), Ok(vec![]));
        assert_eq!(
            premises_of(System::Clkid, &d, &sq("Add2(x,y,z) |- Add1(x,y,z)"), &RuleInstance::Axiom),
            Err(RuleViolation::AxiomDisjoint)
        );
    }

    #[test]
    fn add2_case_distinctions() {
        let d = defs();
        let concl = sq("Add2(a, b, c) |-");
        let mut supply = FreshSupply::new();
        let bs = case_distinctions(&d, &concl, &f("Add2(a, b, c)"), &mut supply).unwrap();
        assert_eq!(bs.len(), 2);
        let show = |fs: &[Formula]| fs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        assert_eq!(show(&bs[0].added), "a = 0, b = _v0, c = _v0");
        assert!(bs[0].descendants.is_empty());
        assert_eq!(show(&bs[1].added), "a = s(_v1), b = _v2, c = _v3, Add2(_v1, s(_v2), _v3)");
        assert_eq!(show(&bs[1].descendants), "Add2(_v1, s(_v2), _v3)");
    }

    #[test]
    fn add1_case_distinctions() {
        let d = defs();
        let mut supply = FreshSupply::new();
        let bs = case_distinctions(&d, &sq("Add1(a, b, c) |-"), &f("Add1(a, b, c)"), &mut supply).unwrap();
        let show = |fs: &[Formula]| fs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        assert_eq!(show(&bs[0].added), "a = 0, b = _v0, c = _v0");
        assert_eq!(show(&bs[1].added), "a = s(_v1), b = _v2, c = s(_v3), Add1(_v1, _v2, _v3)");
    }

    #[test]
    fn predicate_without_productions() {
        let d = parse_defs("inductive E(1) { }").unwrap();
        let mut supply = FreshSupply::new();
        let bs = case_distinctions(&d, &sq_in(&d, "E(x) |-"), &parse_formula("E(x)", &d).unwrap(), &mut supply).unwrap();
        assert!(bs.is_empty());
    }

    fn sq_in(d: &IndDefSet, s: &str) -> Sequent {
        parse_sequent(s, d).unwrap()
    }

    #[test]
    fn eqr_subst_cut() {
        let d = defs();
        let concl = sq("Add2(x,y,z) |- s(x) = s(x), Add1(x,y,z)");
        assert_eq!(premises_of(System::Clkid, &d, &concl, &RuleInstance::EqR { term: parse_term("s(x)", &d).unwrap() }), Ok(vec![]));

        let premise = sq("Add1(x,y,z) |- Add2(x,y,z)");
        let theta = Substitution::single(v("x"), parse_term("s(x2)", &d).unwrap());
        let concl = sq("Add1(s(x2),y,z) |- Add2(s(x2),y,z)");
        let inst = RuleInstance::Subst { theta, premise: premise.clone() };
        assert_eq!(premises_of(System::Clkid, &d, &concl, &inst), Ok(vec![premise]));

        let concl = sq("Add2(x,y,z) |- Add1(x,y,z)");
        let phi = f("Add1(x, s(y), z)");
        let out = premises_of(System::Clkid, &d, &concl, &RuleInstance::Cut { formula: phi }).unwrap();
        assert_eq!(out, vec![sq("Add2(x,y,z) |- Add1(x, s(y), z), Add1(x,y,z)"), sq("Add1(x, s(y), z), Add2(x,y,z) |- Add1(x,y,z)")]);
    }

    fn template() -> EqTemplate {
        EqTemplate {
            lhs: Term::var("a"),
            rhs: Term::zero(),
            x: v("X"),
            y: v("Y"),
            left: [f("Add2(X, b, c)")].into_iter().collect(),
            right: [f("Add1(X, b, c)")].into_iter().collect(),
        }
    }

    #[test]
    fn equality_rules_and_system_gate() {
        let d = defs();
        let concl = sq("a = 0, Add2(a, b, c) |- Add1(a, b, c)");
        let eql = RuleInstance::EqL(template());
        let eqla = RuleInstance::EqLa(template());
        assert_eq!(premises_of(System::Clkid, &d, &concl, &eql), Ok(vec![sq("Add2(0, b, c) |- Add1(0, b, c)")]));
        assert_eq!(premises_of(System::ClkidA, &d, &concl, &eqla), Ok(vec![sq("a = 0, Add2(0, b, c) |- Add1(0, b, c)")]));
        assert!(matches!(premises_of(System::ClkidA, &d, &concl, &eql), Err(RuleViolation::WrongSystem { .. })));
        assert!(matches!(premises_of(System::Clkid, &d, &concl, &eqla), Err(RuleViolation::WrongSystem { .. })));
        assert_eq!(template().images_of(&f("Add2(a, b, c)")), vec![f("Add2(0, b, c)")]);
    }

    #[test]
    fn weak_and_eigenvariables() {
        let d = defs();
        let concl = sq("Add2(x,y,z), x = 0 |- Add1(x,y,z)");
        let ok = RuleInstance::Weak { premise: sq("Add2(x,y,z) |- Add1(x,y,z)") };
        assert!(premises_of(System::Clkid, &d, &concl, &ok).is_ok());
        let bad = RuleInstance::Weak { premise: sq("Add2(x,y,z), y = 0 |- Add1(x,y,z)") };
        assert_eq!(premises_of(System::Clkid, &d, &concl, &bad), Err(RuleViolation::NotWeakening(f("y = 0"))));

        let concl = sq("Add2(x,y,z) |- forall w. Add1(w,y,z)");
        let inst = |t: &str| RuleInstance::Quant {
            quant: Quantifier::AllR,
            principal: f("forall w. Add1(w,y,z)"),
            term: Term::var(t),
            keep: false,
        };
        assert_eq!(premises_of(System::Clkid, &d, &concl, &inst("w")), Ok(vec![sq("Add2(x,y,z) |- Add1(w,y,z)")]));
        assert_eq!(premises_of(System::Clkid, &d, &concl, &inst("x")), Err(RuleViolation::EigenvariableNotFresh(v("x"))));
    }

    #[test]
    fn logical_rules() {
        let d = defs();
        let concl = sq("Add2(x,y,z) & x = 0 |- ~Add1(x,y,z) | Add1(y,x,z)");
        let andl = RuleInstance::Logical { conn: Connective::AndL, principal: f("Add2(x,y,z) & x = 0"), keep: false };
        assert_eq!(premises_of(System::Clkid, &d, &concl, &andl), Ok(vec![sq("Add2(x,y,z), x = 0 |- ~Add1(x,y,z) | Add1(y,x,z)")]));
        let orr = RuleInstance::Logical { conn: Connective::OrR, principal: f("~Add1(x,y,z) | Add1(y,x,z)"), keep: true };
        let out = premises_of(System::Clkid, &d, &concl, &orr).unwrap();
        assert_eq!(out[0].right.len(), 3);
        let wrong = RuleInstance::Logical { conn: Connective::AndR, principal: f("Add2(x,y,z) & x = 0"), keep: false };
        assert_eq!(premises_of(System::Clkid, &d, &concl, &wrong), Err(RuleViolation::PrincipalAbsent(f("Add2(x,y,z) & x = 0"))));
    }
}
