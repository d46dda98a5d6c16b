//! Traces of inductive antecedent atoms along derivations, and the global
//! trace condition.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::prooftree::{NodeAddr, PreProof};
use crate::rules::{case_branch, RuleInstance};
use crate::syntax::{Formula, IndDefSet, Sequent};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("atom {0} is not an inductive atom of the antecedent")]
    AtomAbsent(Formula),
    #[error("the pre-proof is not cycle-normal")]
    NotCycleNormal,
}

/// One step of a trace between a node and one of its premises, or between a
/// bud and its companion.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct TraceLink {
    pub from: (NodeAddr, String),
    pub to: (NodeAddr, String),
    pub progress: bool,
}

/// Inductive atoms of the antecedent, in set order.
pub fn inductive_atoms<'a>(defs: &'a IndDefSet, seq: &'a Sequent) -> impl Iterator<Item = &'a Formula> + 'a {
    seq.left.iter().filter(|f| defs.is_inductive_atom(f))
}

/// Successors of `tau` in premise `index` of the rule application
/// `conclusion` / `premise`, each flagged with whether it is a progress point.
pub fn trace_step(
    defs: &IndDefSet,
    conclusion: &Sequent,
    inst: &RuleInstance,
    index: usize,
    premise: &Sequent,
    tau: &Formula,
) -> Result<BTreeSet<(Formula, bool)>, TraceError> {
    if !defs.is_inductive_atom(tau) || !conclusion.left.contains(tau) {
        return Err(TraceError::AtomAbsent(tau.clone()));
    }
    let present = |f: &Formula| premise.left.contains(f) && defs.is_inductive_atom(f);
    let mut out = BTreeSet::new();
    match inst {
        RuleInstance::Subst { theta, .. } => {
            out.extend(premise.left.iter().filter(|f| present(f) && f.subst(theta) == *tau).map(|f| (f.clone(), false)));
        }
        RuleInstance::EqL(t) | RuleInstance::EqLa(t) => {
            out.extend(t.images_of(tau).into_iter().filter(|f| present(f)).map(|f| (f, false)));
        }
        RuleInstance::Case { principal, fresh, keep } if principal == tau => {
            let pred = principal.pred_name().expect("case on an atom");
            if let (Some(prod), Some(ys)) = (defs.productions_of(pred).nth(index), fresh.get(index)) {
                let branch = case_branch(prod, principal, ys);
                out.extend(branch.descendants.into_iter().filter(|f| present(f)).map(|f| (f, true)));
            }
            if *keep && present(tau) {
                out.insert((tau.clone(), false));
            }
        }
        _ => {
            if present(tau) {
                out.insert((tau.clone(), false));
            }
        }
    }
    Ok(out)
}

fn step_pairs(p: &PreProof, defs: &IndDefSet, node: &NodeAddr, child: u32) -> Vec<(Formula, Formula, bool)> {
    let n = &p.tree.nodes[node];
    let Some(inst) = n.step.rule() else { return Vec::new() };
    let Some(prem) = p.tree.get(&node.child(child)) else { return Vec::new() };
    let mut out = Vec::new();
    for tau in inductive_atoms(defs, &n.sequent) {
        for (succ, progress) in trace_step(defs, &n.sequent, inst, child as usize, &prem.sequent, tau).expect("atom present") {
            out.push((tau.clone(), succ, progress));
        }
    }
    out
}

/// Every trace link of the pre-proof: along tree edges and from each bud to
/// its companion.
pub fn trace_links(p: &PreProof, defs: &IndDefSet) -> Vec<TraceLink> {
    let mut out = Vec::new();
    for (addr, node) in &p.tree.nodes {
        if node.is_bud() {
            if let Some(c) = p.companions.get(addr) {
                for tau in inductive_atoms(defs, &node.sequent) {
                    let s = tau.to_string();
                    out.push(TraceLink { from: (addr.clone(), s.clone()), to: (c.clone(), s), progress: false });
                }
            }
            continue;
        }
        for (i, kid) in p.tree.children(addr).into_iter().enumerate() {
            for (a, b, progress) in step_pairs(p, defs, addr, i as u32) {
                out.push(TraceLink { from: (addr.clone(), a.to_string()), to: (kid.clone(), b.to_string()), progress });
            }
        }
    }
    out
}

/// Trace relation over a path segment: which atom at the start reaches which
/// atom at the end, and whether some connecting trace progresses.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Summary {
    pairs: BTreeMap<(Formula, Formula), bool>,
}

impl Summary {
    pub fn identity<'a>(atoms: impl IntoIterator<Item = &'a Formula>) -> Summary {
        Summary { pairs: atoms.into_iter().map(|a| ((a.clone(), a.clone()), false)).collect() }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Formula, Formula, bool)>) -> Summary {
        let mut s = Summary::default();
        for (a, b, p) in pairs {
            s.add(a, b, p);
        }
        s
    }

    fn add(&mut self, a: Formula, b: Formula, progress: bool) {
        let e = self.pairs.entry((a, b)).or_insert(false);
        *e |= progress;
    }

    pub fn get(&self, a: &Formula, b: &Formula) -> Option<bool> {
        self.pairs.get(&(a.clone(), b.clone())).copied()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Formula, &Formula, bool)> {
        self.pairs.iter().map(|((a, b), p)| (a, b, *p))
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Summary) -> Summary {
        let mut by_start: BTreeMap<&Formula, Vec<(&Formula, bool)>> = BTreeMap::new();
        for ((a, b), p) in &next.pairs {
            by_start.entry(a).or_default().push((b, *p));
        }
        let mut out = Summary::default();
        for ((a, b), p) in &self.pairs {
            for (c, q) in by_start.get(b).into_iter().flatten() {
                out.add(a.clone(), (*c).clone(), *p || *q);
            }
        }
        out
    }

    pub fn is_idempotent(&self) -> bool {
        self.then(self) == *self
    }

    pub fn has_progressing_loop(&self) -> bool {
        self.pairs.iter().any(|((a, b), p)| *p && a == b)
    }
}

/// The summary of a downward tree path `path[0], path[1], ...`, each entry a
/// child of the previous one.
pub fn path_summary(p: &PreProof, defs: &IndDefSet, path: &[NodeAddr]) -> Summary {
    let start = &p.tree.nodes[&path[0]].sequent;
    let mut acc = Summary::identity(inductive_atoms(defs, start));
    for w in path.windows(2) {
        let child = w[1].last().expect("child address");
        acc = acc.then(&Summary::from_pairs(step_pairs(p, defs, &w[0], child)));
    }
    acc
}

/// Nodes from `from` down to `to`, both included.
fn tree_path(from: &NodeAddr, to: &NodeAddr) -> Vec<NodeAddr> {
    (from.len()..=to.len()).map(|k| NodeAddr::from_slice(&to.steps()[..k])).collect()
}

/// The bud graph: an edge `b -> b'` whenever `b'` lies below the companion of
/// `b`; every infinite path of the unfolding eventually follows such edges.
struct BudGraph {
    buds: Vec<NodeAddr>,
    edges: Vec<Vec<(usize, Summary)>>,
}

impl BudGraph {
    fn new(p: &PreProof, defs: &IndDefSet) -> BudGraph {
        let buds: Vec<NodeAddr> = p.buds().filter(|b| p.companions.contains_key(*b)).cloned().collect();
        let edges = buds
            .iter()
            .map(|b| {
                let c = &p.companions[b];
                buds.iter()
                    .enumerate()
                    .filter(|(_, b2)| c.is_prefix_of(b2))
                    .map(|(j, b2)| (j, path_summary(p, defs, &tree_path(c, b2))))
                    .collect()
            })
            .collect();
        BudGraph { buds, edges }
    }

    /// Node addresses visited by a closed walk through the given buds.
    fn expand(&self, p: &PreProof, walk: &[usize]) -> Vec<NodeAddr> {
        let mut out = Vec::new();
        for w in walk.windows(2) {
            let c = &p.companions[&self.buds[w[0]]];
            out.extend(tree_path(c, &self.buds[w[1]]));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum GtcVerdict {
    Accepted,
    /// A cycle of the pre-proof, as the node addresses it passes through,
    /// along which no trace progresses infinitely often.
    Rejected {
        witness: Vec<NodeAddr>,
    },
}

impl GtcVerdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, GtcVerdict::Accepted)
    }
}

/// Decides the global trace condition for a cycle-normal pre-proof.
pub fn gtc_closure(p: &PreProof, defs: &IndDefSet) -> Result<GtcVerdict, TraceError> {
    if !p.is_cycle_normal() {
        return Err(TraceError::NotCycleNormal);
    }
    Ok(gtc_closure_any(p, defs).0)
}

/// The closure check without the cycle-normality precondition; also returns
/// the number of distinct summaries computed.
pub fn gtc_closure_any(p: &PreProof, defs: &IndDefSet) -> (GtcVerdict, usize) {
    let g = BudGraph::new(p, defs);
    let mut seen: BTreeMap<(usize, usize, Summary), Vec<usize>> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for (i, es) in g.edges.iter().enumerate() {
        for (j, s) in es {
            let key = (i, *j, s.clone());
            if !seen.contains_key(&key) {
                seen.insert(key.clone(), vec![i, *j]);
                queue.push_back(key);
            }
        }
    }
    let mut failure: Option<Vec<usize>> = None;
    while let Some(key) = queue.pop_front() {
        let walk = seen[&key].clone();
        let (a, b, s) = &key;
        if a == b && failure.is_none() && s.is_idempotent() && !s.has_progressing_loop() {
            failure = Some(walk.clone());
        }
        for (c, e) in &g.edges[*b] {
            let next = (*a, *c, s.then(e));
            if !seen.contains_key(&next) {
                let mut w = walk.clone();
                w.push(*c);
                seen.insert(next.clone(), w);
                queue.push_back(next);
            }
        }
    }
    let verdict = match failure {
        None => GtcVerdict::Accepted,
        Some(walk) => GtcVerdict::Rejected { witness: g.expand(p, &walk) },
    };
    (verdict, seen.len())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum OracleVerdict {
    Accepted,
    Rejected { witness: Vec<NodeAddr> },
    Inconclusive,
}

/// Bounded check: every closed walk of at most `bound` bud-to-bud segments
/// is repeated up to `bound` times looking for a trace that returns to its
/// starting atom with progress. A walk whose infinite repetition carries no
/// infinitely progressing trace at all rejects.
pub fn gtc_oracle(p: &PreProof, defs: &IndDefSet, bound: usize) -> OracleVerdict {
    let g = BudGraph::new(p, defs);
    let mut all_good = true;
    for walk in closed_walks(&g, bound) {
        let segs: Vec<Summary> =
            walk.windows(2).map(|w| g.edges[w[0]].iter().find(|(j, _)| *j == w[1]).map(|(_, s)| s.clone()).expect("edge")).collect();
        let once = segs.iter().skip(1).fold(segs[0].clone(), |acc, s| acc.then(s));
        let mut power = once.clone();
        let mut good = power.has_progressing_loop();
        for _ in 1..bound {
            if good {
                break;
            }
            power = power.then(&once);
            good = power.has_progressing_loop();
        }
        if good {
            continue;
        }
        if !repetition_progresses(&segs) {
            return OracleVerdict::Rejected { witness: g.expand(p, &walk) };
        }
        all_good = false;
    }
    if all_good {
        OracleVerdict::Accepted
    } else {
        OracleVerdict::Inconclusive
    }
}

/// Closed walks `b0 b1 ... bk = b0` with `1 <= k <= bound`, least bud first.
fn closed_walks(g: &BudGraph, bound: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for start in 0..g.buds.len() {
        let mut stack = vec![vec![start]];
        while let Some(walk) = stack.pop() {
            let last = *walk.last().expect("non-empty");
            for (j, _) in g.edges[last].iter().rev() {
                if *j == start {
                    let mut w = walk.clone();
                    w.push(start);
                    out.push(w);
                }
                if walk.len() < bound && *j > start {
                    let mut w = walk.clone();
                    w.push(*j);
                    stack.push(w);
                }
            }
        }
    }
    out.sort();
    out
}

/// Whether the periodic path given by the segments carries a trace that
/// progresses infinitely often: some cycle of the atom graph across segment
/// boundaries contains a progress edge.
fn repetition_progresses(segs: &[Summary]) -> bool {
    let mut ids: BTreeMap<(usize, &Formula), usize> = BTreeMap::new();
    let mut edges: Vec<(usize, usize, bool)> = Vec::new();
    let k = segs.len();
    fn id<'a>(ids: &mut BTreeMap<(usize, &'a Formula), usize>, key: (usize, &'a Formula)) -> usize {
        let n = ids.len();
        *ids.entry(key).or_insert(n)
    }
    for (i, s) in segs.iter().enumerate() {
        for (a, b, prog) in s.iter() {
            edges.push((id(&mut ids, (i, a)), id(&mut ids, ((i + 1) % k, b)), prog));
        }
    }
    let n = ids.len();
    let mut adj = vec![Vec::new(); n];
    for &(a, b, _) in &edges {
        adj[a].push(b);
    }
    let reach = |from: usize, to: usize| -> bool {
        let mut seen = vec![false; n];
        let mut stack = vec![from];
        while let Some(v) = stack.pop() {
            if v == to {
                return true;
            }
            if !std::mem::replace(&mut seen[v], true) {
                stack.extend(&adj[v]);
            }
        }
        false
    };
    edges.iter().any(|&(a, b, prog)| prog && reach(b, a))
}
