use std::collections::BTreeSet;

use crate::syntax::{Formula, Term, SUCC};

fn strip_succ(t: &Term) -> Option<&Term> {
    match t {
        Term::App(f, args) if f.name() == SUCC && args.len() == 1 => Some(&args[0]),
        _ => None,
    }
}

/// Searches for a chain `t1 = u0, ..., uk = t2` with `k <= max_steps` where
/// every step is an instance `s^n l = s^n r` (`n <= max_height`) of an
/// equation of `gamma` in either orientation. Works on terms directly and
/// shares nothing with [`super::OffsetGraph`].
pub fn chain_oracle(gamma: &[Formula], t1: &Term, t2: &Term, max_steps: usize, max_height: u32) -> bool {
    let eqs: Vec<(&Term, &Term)> = gamma
        .iter()
        .filter_map(|f| match f {
            Formula::Eq(l, r) => Some([(l, r), (r, l)]),
            _ => None,
        })
        .flatten()
        .collect();
    let mut seen: BTreeSet<Term> = BTreeSet::from([t1.clone()]);
    let mut frontier = vec![t1.clone()];
    for _ in 0..=max_steps {
        if frontier.iter().any(|u| u == t2) {
            return true;
        }
        let mut next = Vec::new();
        for u in &frontier {
            for &(l, r) in &eqs {
                let mut cur = u;
                for n in 0..=max_height {
                    if cur == l {
                        let v = r.clone().lift(n);
                        if seen.insert(v.clone()) {
                            next.push(v);
                        }
                    }
                    match strip_succ(cur) {
                        Some(inner) => cur = inner,
                        None => break,
                    }
                }
            }
        }
        if next.is_empty() {
            return false;
        }
        frontier = next;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_cases() {
        assert!(chain_oracle(&[], &Term::var("x"), &Term::var("x"), 0, 0));
        assert!(!chain_oracle(&[], &Term::var("x"), &Term::var("y"), 8, 8));
    }

    #[test]
    fn lifting_is_bounded() {
        let g = [Formula::Eq(Term::var("x"), Term::var("y"))];
        let a = Term::var("x").lift(3);
        let b = Term::var("y").lift(3);
        assert!(chain_oracle(&g, &a, &b, 1, 3));
        assert!(!chain_oracle(&g, &a, &b, 1, 2));
    }
}
