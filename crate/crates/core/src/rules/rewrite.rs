//! Occurrence-level rewriting for the equality rules.

use crate::syntax::{Formula, Term, Var};

fn product<T: Clone>(choices: Vec<Vec<T>>) -> Vec<Vec<T>> {
    choices.into_iter().fold(vec![Vec::new()], |acc, opts| {
        acc.iter()
            .flat_map(|prefix| {
                opts.iter().map(move |o| {
                    let mut v = prefix.clone();
                    v.push(o.clone());
                    v
                })
            })
            .collect()
    })
}

/// Every pattern `F` with `F[x:=t, y:=u] = s`, obtained by abstracting some
/// occurrences of `t` by `x` and some occurrences of `u` by `y`.
pub fn term_patterns(s: &Term, t: &Term, u: &Term, x: &Var, y: &Var) -> Vec<Term> {
    let mut out = match s {
        Term::Var(_) => vec![s.clone()],
        Term::App(f, args) => {
            let per_arg = args.iter().map(|a| term_patterns(a, t, u, x, y)).collect();
            product(per_arg).into_iter().map(|args| Term::App(f.clone(), args)).collect()
        }
    };
    if t != u {
        if s == t {
            out.push(Term::Var(x.clone()));
        }
        if s == u {
            out.push(Term::Var(y.clone()));
        }
    }
    out
}

/// Formula version of [`term_patterns`]. Quantifiers binding a variable of
/// `t` or `u` are left untouched.
pub fn formula_patterns(f: &Formula, t: &Term, u: &Term, x: &Var, y: &Var) -> Vec<Formula> {
    let tp = |s: &Term| term_patterns(s, t, u, x, y);
    let fp = |g: &Formula| formula_patterns(g, t, u, x, y);
    match f {
        Formula::Eq(a, b) => product(vec![tp(a), tp(b)]).into_iter().map(|v| Formula::Eq(v[0].clone(), v[1].clone())).collect(),
        Formula::Pred(p, args) => product(args.iter().map(tp).collect()).into_iter().map(|a| Formula::Pred(p.clone(), a)).collect(),
        Formula::Not(a) => fp(a).into_iter().map(|a| Formula::Not(Box::new(a))).collect(),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => product(vec![fp(a), fp(b)])
            .into_iter()
            .map(|v| {
                let (l, r) = (Box::new(v[0].clone()), Box::new(v[1].clone()));
                match f {
                    Formula::And(..) => Formula::And(l, r),
                    Formula::Or(..) => Formula::Or(l, r),
                    _ => Formula::Imp(l, r),
                }
            })
            .collect(),
        Formula::Forall(z, body) | Formula::Exists(z, body) => {
            if t.has_var(z) || u.has_var(z) {
                return vec![f.clone()];
            }
            fp(body)
                .into_iter()
                .map(|b| match f {
                    Formula::Forall(..) => Formula::Forall(z.clone(), Box::new(b)),
                    _ => Formula::Exists(z.clone(), Box::new(b)),
                })
                .collect()
        }
    }
}

/// Replaces every outermost occurrence of `from` by `x`.
pub fn abstract_all(f: &Formula, from: &Term, x: &Var) -> Formula {
    fn term(s: &Term, from: &Term, x: &Var) -> Term {
        if s == from {
            return Term::Var(x.clone());
        }
        match s {
            Term::Var(_) => s.clone(),
            Term::App(g, args) => Term::App(g.clone(), args.iter().map(|a| term(a, from, x)).collect()),
        }
    }
    let bx = |g: &Formula| Box::new(abstract_all(g, from, x));
    match f {
        Formula::Eq(a, b) => Formula::Eq(term(a, from, x), term(b, from, x)),
        Formula::Pred(p, args) => Formula::Pred(p.clone(), args.iter().map(|a| term(a, from, x)).collect()),
        Formula::Not(a) => Formula::Not(bx(a)),
        Formula::And(a, b) => Formula::And(bx(a), bx(b)),
        Formula::Or(a, b) => Formula::Or(bx(a), bx(b)),
        Formula::Imp(a, b) => Formula::Imp(bx(a), bx(b)),
        Formula::Forall(z, _) | Formula::Exists(z, _) if from.has_var(z) => f.clone(),
        Formula::Forall(z, b) => Formula::Forall(z.clone(), bx(b)),
        Formula::Exists(z, b) => Formula::Exists(z.clone(), bx(b)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, IndDefSet, Substitution};

    #[test]
    fn patterns_cover_all_occurrence_choices() {
        let d = IndDefSet::default();
        let f = parse_formula("s(a) = a", &d).unwrap();
        let (t, u) = (Term::var("a"), Term::zero());
        let (x, y) = (Var::new("X"), Var::new("Y"));
        let pats = formula_patterns(&f, &t, &u, &x, &y);
        assert_eq!(pats.len(), 4);
        let fwd: Substitution = [(x.clone(), t.clone()), (y.clone(), u.clone())].into_iter().collect();
        assert!(pats.iter().all(|p| p.subst(&fwd) == f));
        let back: Substitution = [(x, u), (y, t)].into_iter().collect();
        let images: Vec<String> = pats.iter().map(|p| p.subst(&back).to_string()).collect();
        assert!(images.contains(&"s(0) = 0".to_string()));
        assert!(images.contains(&"s(a) = a".to_string()));
    }
}
