//! The small exhaustive family of equation sets used to cross-check the
//! congruence decisions against [`super::chain_oracle`].

use crate::syntax::{Formula, Term};

/// Bases of the family.
pub const BASES: [&str; 3] = ["0", "x", "y"];

/// Every tower over [`BASES`] with height at most `max_height`.
pub fn towers(max_height: u32) -> Vec<Term> {
    let mut out = Vec::new();
    for b in BASES {
        let base = if b == "0" { Term::zero() } else { Term::var(b) };
        for h in 0..=max_height {
            out.push(base.clone().lift(h));
        }
    }
    out
}

/// All sets of at most `max_eqs` equations between distinct towers of
/// height at most 2, each equation taken once up to orientation.
pub fn gammas(max_eqs: usize) -> Vec<Vec<Formula>> {
    let sides = towers(2);
    let mut eqs = Vec::new();
    for i in 0..sides.len() {
        for j in i + 1..sides.len() {
            eqs.push(Formula::Eq(sides[i].clone(), sides[j].clone()));
        }
    }
    let mut out = vec![Vec::new()];
    let mut layer: Vec<(usize, Vec<Formula>)> = vec![(0, Vec::new())];
    for _ in 0..max_eqs {
        let mut next = Vec::new();
        for (start, g) in &layer {
            for (k, e) in eqs.iter().enumerate().skip(*start) {
                let mut g2 = g.clone();
                g2.push(e.clone());
                next.push((k + 1, g2));
            }
        }
        out.extend(next.iter().map(|(_, g)| g.clone()));
        layer = next;
    }
    out
}
