use std::fmt;

use super::{Formula, IndDefSet, Sequent, Substitution, Term};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(s, args) if args.is_empty() && s.name() == super::ZERO => f.write_str("0"),
            Term::App(s, args) => {
                write!(f, "{s}(")?;
                write_list(f, args)?;
                f.write_str(")")
            }
        }
    }
}

fn write_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: impl IntoIterator<Item = T>) -> fmt::Result {
    for (i, x) in items.into_iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

struct Operand<'a>(&'a Formula);

impl fmt::Display for Operand<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Formula::Eq(..) | Formula::Pred(..) | Formula::Not(..) => write!(f, "{}", self.0),
            other => write!(f, "({other})"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Eq(l, r) => write!(f, "{l} = {r}"),
            Formula::Pred(p, args) => {
                write!(f, "{p}(")?;
                write_list(f, args)?;
                f.write_str(")")
            }
            Formula::Not(a) => write!(f, "~{}", Operand(a)),
            Formula::And(a, b) => write!(f, "{} & {}", Operand(a), Operand(b)),
            Formula::Or(a, b) => write!(f, "{} | {}", Operand(a), Operand(b)),
            Formula::Imp(a, b) => write!(f, "{} -> {}", Operand(a), Operand(b)),
            Formula::Forall(x, b) => write!(f, "forall {x}. {b}"),
            Formula::Exists(x, b) => write!(f, "exists {x}. {b}"),
        }
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_list(f, &self.left)?;
        f.write_str(if self.left.is_empty() { "|-" } else { " |-" })?;
        if !self.right.is_empty() {
            f.write_str(" ")?;
            write_list(f, &self.right)?;
        }
        Ok(())
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_list(f, self.iter().map(|(v, t)| format!("{v} := {t}")))
    }
}

impl fmt::Display for IndDefSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (p, n)) in self.inductive.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            writeln!(f, "inductive {p}({n}) {{")?;
            for r in self.productions_of(p) {
                write!(f, "  rule {}: ", r.name)?;
                write_list(f, r.premises())?;
                if r.premises().next().is_some() {
                    f.write_str(" ")?;
                }
                writeln!(f, "=> {};", r.conclusion_atom())?;
            }
            writeln!(f, "}}")?;
        }
        Ok(())
    }
}

pub fn print_sequent(s: &Sequent) -> String {
    s.to_string()
}
