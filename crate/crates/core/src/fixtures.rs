//! Bundled definition and proof files.

use crate::prooftree::script::Script;
use crate::prooftree::PreProof;
use crate::rules::System;
use crate::syntax::{parse_defs, IndDefSet};

pub const ADD_DEFS: &str = include_str!("../fixtures/add.defs");
pub const FIG1: &str = include_str!("../fixtures/fig1.cpf");
pub const FIG2: &str = include_str!("../fixtures/fig2.cpf");
pub const LOOP0: &str = include_str!("../fixtures/loop0.cpf");
pub const CROSS1: &str = include_str!("../fixtures/cross1.cpf");
pub const SWAP2: &str = include_str!("../fixtures/swap2.cpf");
pub const PLUS_ZERO: &str = include_str!("../fixtures/plus_zero.cpf");

/// Name, script text and checking system of every bundled proof.
pub const PROOFS: [(&str, &str, System); 6] = [
    ("fig1", FIG1, System::Clkid),
    ("fig2", FIG2, System::Clkid),
    ("loop0", LOOP0, System::Clkid),
    ("cross1", CROSS1, System::Clkid),
    ("swap2", SWAP2, System::Clkid),
    ("plus_zero", PLUS_ZERO, System::Clkid),
];

pub fn add_defs() -> IndDefSet {
    parse_defs(ADD_DEFS).expect("bundled definitions parse")
}

/// Parses and elaborates a bundled script; panics on malformed input.
pub fn load(text: &str, system: System) -> (PreProof, IndDefSet) {
    let script = Script::parse(text, &IndDefSet::default()).expect("bundled script parses");
    (script.to_preproof(system), script.defs)
}

pub fn system_of(name: &str) -> System {
    PROOFS.iter().find(|(n, ..)| *n == name).map_or(System::Clkid, |p| p.2)
}

fn named(name: &str) -> (PreProof, IndDefSet) {
    let (_, text, system) = PROOFS.iter().find(|(n, ..)| *n == name).expect("known fixture");
    load(text, *system)
}

pub fn fig1() -> (PreProof, IndDefSet) {
    named("fig1")
}

pub fn fig2() -> (PreProof, IndDefSet) {
    named("fig2")
}

pub fn loop0() -> (PreProof, IndDefSet) {
    named("loop0")
}

pub fn cross1() -> (PreProof, IndDefSet) {
    named("cross1")
}

pub fn swap2() -> (PreProof, IndDefSet) {
    named("swap2")
}

pub fn plus_zero() -> (PreProof, IndDefSet) {
    named("plus_zero")
}

pub fn all() -> Vec<(&'static str, PreProof, IndDefSet)> {
    PROOFS
        .iter()
        .map(|(n, text, system)| {
            let (p, d) = load(text, *system);
            (*n, p, d)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fixture_validates() {
        for (name, p, defs) in all() {
            assert_eq!(p.validate(system_of(name), &defs), Ok(()), "{name}");
        }
    }

    #[test]
    fn cycle_normality() {
        assert!(fig1().0.is_cycle_normal());
        assert!(fig2().0.is_cycle_normal());
        assert!(!cross1().0.is_cycle_normal());
    }

    #[test]
    fn fig2_has_one_cut() {
        let (p, _) = fig2();
        let cuts = p.tree.nodes.values().filter(|n| n.step.rule().is_some_and(|r| r.is_cut())).count();
        assert_eq!(cuts, 1);
        assert!(fig1().0.is_cut_free());
    }
}
