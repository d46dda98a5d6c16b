//! Kernel and analyses for cyclic sequent proofs over first-order logic with
//! inductive definitions.

pub mod congruence;
pub mod fixtures;
pub mod indexing;
pub mod normalize;
pub mod prooftree;
pub mod report;
pub mod rules;
pub mod search;
pub mod semantics;
pub mod syntax;
pub mod trace;
