//! Bounded evaluation in the standard model: inductive predicates denote
//! least fixed points over the numerals.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::syntax::{decompose, Base, Formula, IndDefSet, Sequent, Sym, Term, Var};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("atom {0} is not ground over numerals")]
    NonGroundAtom(Formula),
    #[error("cannot evaluate {0}: only equality, inductive atoms and propositional connectives are interpreted")]
    UnsupportedFormula(Formula),
    #[error("cannot evaluate term {0}: only numerals built from 0 and s are interpreted")]
    UnsupportedTerm(Term),
}

type Assignment = BTreeMap<Var, u64>;

fn eval_term(t: &Term, env: &Assignment) -> Result<u64, SemanticsError> {
    let tower = decompose(t).map_err(|_| SemanticsError::UnsupportedTerm(t.clone()))?;
    let base = match &tower.base {
        Base::Zero => 0,
        Base::Var(v) => *env.get(v).ok_or_else(|| SemanticsError::UnsupportedTerm(t.clone()))?,
    };
    Ok(base + u64::from(tower.height))
}

/// Finite approximation of the least model: inductive facts whose arguments
/// are at most `universe`, after a number of rounds of applying every
/// production.
#[derive(Clone, Debug)]
pub struct Model {
    facts: BTreeMap<Sym, BTreeSet<Vec<u64>>>,
    universe: u64,
    /// Rounds actually applied before the fixed point or the round limit.
    pub rounds: usize,
}

impl Model {
    pub fn least(defs: &IndDefSet, universe: u64, max_rounds: usize) -> Result<Model, SemanticsError> {
        let mut m = Model { facts: BTreeMap::new(), universe, rounds: 0 };
        while m.rounds < max_rounds {
            let mut fresh = Vec::new();
            for prod in &defs.productions {
                if let Some(f) = prod.ordinary.first() {
                    return Err(SemanticsError::UnsupportedFormula(f.clone()));
                }
                let vars: Vec<Var> = prod.params.to_vec();
                for env in assignments(&vars, universe) {
                    let args: Vec<u64> = prod.conclusion.iter().map(|t| eval_term(t, &env)).collect::<Result<_, _>>()?;
                    if args.iter().any(|a| *a > universe) || m.contains(&prod.pred, &args) {
                        continue;
                    }
                    let mut ok = true;
                    for prem in &prod.inductive {
                        if !m.eval(defs, prem, &env)? {
                            ok = false;
                            break;
                        }
                    }
                    if ok {
                        fresh.push((prod.pred.clone(), args));
                    }
                }
            }
            m.rounds += 1;
            let before = m.size();
            for (p, args) in fresh {
                m.facts.entry(p).or_default().insert(args);
            }
            if m.size() == before {
                break;
            }
        }
        Ok(m)
    }

    pub fn universe(&self) -> u64 {
        self.universe
    }

    fn size(&self) -> usize {
        self.facts.values().map(BTreeSet::len).sum()
    }

    pub fn contains(&self, p: &Sym, args: &[u64]) -> bool {
        self.facts.get(p).is_some_and(|s| s.contains(args))
    }

    pub fn eval(&self, defs: &IndDefSet, f: &Formula, env: &Assignment) -> Result<bool, SemanticsError> {
        Ok(match f {
            Formula::Eq(a, b) => eval_term(a, env)? == eval_term(b, env)?,
            Formula::Pred(p, args) if defs.is_inductive(p) => {
                let vals: Vec<u64> = args.iter().map(|t| eval_term(t, env)).collect::<Result<_, _>>()?;
                self.contains(p, &vals)
            }
            Formula::Not(a) => !self.eval(defs, a, env)?,
            Formula::And(a, b) => self.eval(defs, a, env)? && self.eval(defs, b, env)?,
            Formula::Or(a, b) => self.eval(defs, a, env)? || self.eval(defs, b, env)?,
            Formula::Imp(a, b) => !self.eval(defs, a, env)? || self.eval(defs, b, env)?,
            _ => return Err(SemanticsError::UnsupportedFormula(f.clone())),
        })
    }
}

fn assignments(vars: &[Var], bound: u64) -> impl Iterator<Item = Assignment> + '_ {
    let total = (bound + 1).checked_pow(vars.len() as u32).unwrap_or(u64::MAX);
    (0..total).map(move |mut code| {
        let mut env = Assignment::new();
        for v in vars {
            env.insert(v.clone(), code % (bound + 1));
            code /= bound + 1;
        }
        env
    })
}

/// Whether a ground atom is derived within `iteration_bound` rounds, using
/// numerals up to its largest argument.
pub fn lfp_holds(defs: &IndDefSet, atom: &Formula, iteration_bound: usize) -> Result<bool, SemanticsError> {
    let Formula::Pred(p, args) = atom else { return Err(SemanticsError::UnsupportedFormula(atom.clone())) };
    if !defs.is_inductive(p) {
        return Err(SemanticsError::UnsupportedFormula(atom.clone()));
    }
    if !atom.fv().is_empty() {
        return Err(SemanticsError::NonGroundAtom(atom.clone()));
    }
    let vals: Vec<u64> = args
        .iter()
        .map(|t| eval_term(t, &Assignment::new()).map_err(|_| SemanticsError::NonGroundAtom(atom.clone())))
        .collect::<Result<_, _>>()?;
    let universe = vals.iter().copied().max().unwrap_or(0);
    Ok(Model::least(defs, universe, iteration_bound)?.contains(p, &vals))
}

/// Checks the sequent under every assignment of numerals up to `value_bound`
/// to its free variables.
pub fn sequent_valid(defs: &IndDefSet, seq: &Sequent, value_bound: u64) -> Result<bool, SemanticsError> {
    Ok(counterexample(defs, seq, value_bound)?.is_none())
}

/// The first falsifying assignment, if any.
pub fn counterexample(defs: &IndDefSet, seq: &Sequent, value_bound: u64) -> Result<Option<Assignment>, SemanticsError> {
    let universe = value_bound + u64::from(seq.max_term_height());
    let model = Model::least(defs, universe, universe as usize + 2)?;
    let vars: Vec<Var> = seq.fv().into_iter().collect();
    for env in assignments(&vars, value_bound) {
        let mut holds = true;
        for f in &seq.left {
            if !model.eval(defs, f, &env)? {
                holds = false;
                break;
            }
        }
        if !holds {
            continue;
        }
        let mut any = false;
        for f in &seq.right {
            if model.eval(defs, f, &env)? {
                any = true;
                break;
            }
        }
        if !any {
            return Ok(Some(env));
        }
    }
    Ok(None)
}
