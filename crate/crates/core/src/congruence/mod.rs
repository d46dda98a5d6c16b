//! Equality modulo a set of equations between successor towers.
//!
//! `t1 ≡ t2` is the smallest congruence containing the equations. `t1 ∼ t2`
//! holds when `s^n t1 ≡ s^m t2` for some `n, m`, which reduces to the bases
//! being connected by equations.

pub mod family;
mod oracle;

pub use oracle::chain_oracle;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::syntax::{decompose, Base, Formula, NonSuccessorTerm, Term, Tower};

#[derive(Clone, Debug, PartialEq, Eq)]
struct Edge {
    lhs: usize,
    lhs_height: u32,
    rhs: usize,
    rhs_height: u32,
}

/// Weighted union-find over tower bases.
///
/// The potential of a base is an integer `val` such that every equation
/// `s^p v = s^q w` satisfies `val(v) + p = val(w) + q` in a non-ambiguous
/// component.
#[derive(Clone, Debug)]
pub struct OffsetGraph {
    bases: Vec<Base>,
    index: BTreeMap<Base, usize>,
    parent: Vec<usize>,
    /// `val(x) - val(parent(x))`.
    pot: Vec<i64>,
    ambiguous: Vec<bool>,
    edges: Vec<Edge>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "delta", rename_all = "lowercase")]
pub enum DeltaSet {
    Unrelated,
    Unique(i64),
    Ambiguous,
}

/// Result of an exact `≡` query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EquivOutcome {
    pub holds: bool,
    /// Some state above the offset cap was discarded.
    pub cap_hit: bool,
}

impl OffsetGraph {
    pub fn build<'a>(gamma: impl IntoIterator<Item = &'a Formula>) -> Result<OffsetGraph, NonSuccessorTerm> {
        let mut g = OffsetGraph {
            bases: Vec::new(),
            index: BTreeMap::new(),
            parent: Vec::new(),
            pot: Vec::new(),
            ambiguous: Vec::new(),
            edges: Vec::new(),
        };
        for f in gamma {
            if let Formula::Eq(l, r) = f {
                let (tl, tr) = (decompose(l)?, decompose(r)?);
                let (a, b) = (g.intern(tl.base), g.intern(tr.base));
                g.edges.push(Edge { lhs: a, lhs_height: tl.height, rhs: b, rhs_height: tr.height });
                g.union(a, b, i64::from(tr.height) - i64::from(tl.height));
            }
        }
        Ok(g)
    }

    fn intern(&mut self, b: Base) -> usize {
        if let Some(&i) = self.index.get(&b) {
            return i;
        }
        let i = self.bases.len();
        self.bases.push(b.clone());
        self.index.insert(b, i);
        self.parent.push(i);
        self.pot.push(0);
        self.ambiguous.push(false);
        i
    }

    /// Root of `x` and `val(x) - val(root)`.
    fn find(&self, mut x: usize) -> (usize, i64) {
        let mut off = 0;
        while self.parent[x] != x {
            off += self.pot[x];
            x = self.parent[x];
        }
        (x, off)
    }

    /// Records `val(a) - val(b) = w`.
    fn union(&mut self, a: usize, b: usize, w: i64) {
        let (ra, oa) = self.find(a);
        let (rb, ob) = self.find(b);
        if ra == rb {
            if oa - ob != w {
                self.ambiguous[ra] = true;
            }
            return;
        }
        self.parent[ra] = rb;
        self.pot[ra] = w - oa + ob;
        self.ambiguous[rb] |= self.ambiguous[ra];
    }

    pub fn bases(&self) -> &[Base] {
        &self.bases
    }

    /// Components as sorted sets of bases.
    pub fn components(&self) -> BTreeSet<BTreeSet<Base>> {
        let mut by_root: BTreeMap<usize, BTreeSet<Base>> = BTreeMap::new();
        for (i, b) in self.bases.iter().enumerate() {
            by_root.entry(self.find(i).0).or_default().insert(b.clone());
        }
        by_root.into_values().collect()
    }

    pub fn is_ambiguous(&self, b: &Base) -> bool {
        self.index.get(b).is_some_and(|&i| self.ambiguous[self.find(i).0])
    }

    fn locate(&self, b: &Base) -> Option<(usize, i64)> {
        self.index.get(b).map(|&i| self.find(i))
    }

    fn related_towers(&self, a: &Tower, b: &Tower) -> bool {
        if a.base == b.base {
            return true;
        }
        match (self.locate(&a.base), self.locate(&b.base)) {
            (Some((ra, _)), Some((rb, _))) => ra == rb,
            _ => false,
        }
    }

    /// Decides `t1 ∼ t2`.
    pub fn related(&self, t1: &Term, t2: &Term) -> Result<bool, NonSuccessorTerm> {
        Ok(self.related_towers(&decompose(t1)?, &decompose(t2)?))
    }

    /// `{m - n : s^n t1 ≡ s^m t2}`.
    pub fn delta_set(&self, t1: &Term, t2: &Term) -> Result<DeltaSet, NonSuccessorTerm> {
        let (a, b) = (decompose(t1)?, decompose(t2)?);
        if !self.related_towers(&a, &b) {
            return Ok(DeltaSet::Unrelated);
        }
        let heights = i64::from(a.height) - i64::from(b.height);
        match (self.locate(&a.base), self.locate(&b.base)) {
            (Some((root, oa)), Some((_, ob))) => {
                if self.ambiguous[root] {
                    Ok(DeltaSet::Ambiguous)
                } else {
                    Ok(DeltaSet::Unique(oa - ob + heights))
                }
            }
            // Same base, absent from every equation.
            _ => Ok(DeltaSet::Unique(heights)),
        }
    }

    /// Decides `t1 ≡ t2`.
    pub fn equiv(&self, t1: &Term, t2: &Term) -> Result<bool, NonSuccessorTerm> {
        Ok(self.equiv_detailed(t1, t2)?.holds)
    }

    /// Breadth-first search over `(base, height)` states. An equation
    /// `s^p v = s^q w` rewrites `s^a v` to `s^(a-p+q) w` when `a >= p`.
    pub fn equiv_detailed(&self, t1: &Term, t2: &Term) -> Result<EquivOutcome, NonSuccessorTerm> {
        let (a, b) = (decompose(t1)?, decompose(t2)?);
        if a == b {
            return Ok(EquivOutcome { holds: true, cap_hit: false });
        }
        let (Some(&start), Some(&goal)) = (self.index.get(&a.base), self.index.get(&b.base)) else {
            return Ok(EquivOutcome { holds: false, cap_hit: false });
        };
        if self.find(start).0 != self.find(goal).0 {
            return Ok(EquivOutcome { holds: false, cap_hit: false });
        }
        let max_shift = self.edges.iter().map(|e| e.lhs_height.max(e.rhs_height)).max().unwrap_or(0);
        let cap = u64::from(a.height + b.height + max_shift) * (self.edges.len() + self.bases.len() + 1) as u64;
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        let mut cap_hit = false;
        seen.insert((start, u64::from(a.height)));
        queue.push_back((start, u64::from(a.height)));
        let target = (goal, u64::from(b.height));
        while let Some((v, h)) = queue.pop_front() {
            if (v, h) == target {
                return Ok(EquivOutcome { holds: true, cap_hit });
            }
            for e in &self.edges {
                for (from, p, to, q) in [(e.lhs, e.lhs_height, e.rhs, e.rhs_height), (e.rhs, e.rhs_height, e.lhs, e.lhs_height)] {
                    if from != v || h < u64::from(p) {
                        continue;
                    }
                    let next = (to, h - u64::from(p) + u64::from(q));
                    if next.1 > cap {
                        cap_hit = true;
                        continue;
                    }
                    if seen.insert(next) {
                        queue.push_back(next);
                    }
                }
            }
        }
        Ok(EquivOutcome { holds: false, cap_hit })
    }
}
