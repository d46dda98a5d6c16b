//! Finite derivation trees, buds and companions, and tree-unfolding.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::rules::{check_instance, RuleInstance, RuleSpec, RuleViolation, System};
use crate::syntax::{IndDefSet, Sequent};

pub mod script;

/// A node address: the root is the empty sequence and `σi` is the `i`-th
/// premise of `σ`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct NodeAddr(Vec<u32>);

impl NodeAddr {
    pub fn root() -> NodeAddr {
        NodeAddr(Vec::new())
    }

    pub fn from_slice(steps: &[u32]) -> NodeAddr {
        NodeAddr(steps.to_vec())
    }

    pub fn steps(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: u32) -> NodeAddr {
        let mut v = self.0.clone();
        v.push(i);
        NodeAddr(v)
    }

    pub fn parent(&self) -> Option<NodeAddr> {
        let (_, init) = self.0.split_last()?;
        Some(NodeAddr(init.to_vec()))
    }

    pub fn last(&self) -> Option<u32> {
        self.0.last().copied()
    }

    pub fn is_prefix_of(&self, other: &NodeAddr) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn is_proper_prefix_of(&self, other: &NodeAddr) -> bool {
        self.0.len() < other.0.len() && self.is_prefix_of(other)
    }

    pub fn concat(&self, suffix: &[u32]) -> NodeAddr {
        let mut v = self.0.clone();
        v.extend_from_slice(suffix);
        NodeAddr(v)
    }

    /// Proper prefixes from the root downwards.
    pub fn ancestors(&self) -> impl Iterator<Item = NodeAddr> + '_ {
        (0..self.0.len()).map(|k| NodeAddr(self.0[..k].to_vec()))
    }
}

impl fmt::Display for NodeAddr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        f.write_str(&parts.join("."))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("malformed node address `{0}` (expected dot-separated child indices, or `root`)")]
pub struct BadAddr(pub String);

/// Accepts `1.0.2`; the root is the empty string or `root`.
impl std::str::FromStr for NodeAddr {
    type Err = BadAddr;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().trim_matches('"');
        if s.is_empty() || s == "root" {
            return Ok(NodeAddr::root());
        }
        s.split('.').map(|p| p.parse().map_err(|_| BadAddr(s.to_string()))).collect::<Result<_, _>>().map(NodeAddr)
    }
}

impl Serialize for NodeAddr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// What justifies a node.
#[derive(Clone, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub enum Step {
    Rule(RuleInstance),
    Bud,
    /// A script rule that could not be turned into an instance.
    Failed(String, String),
}

impl Step {
    pub fn rule(&self) -> Option<&RuleInstance> {
        match self {
            Step::Rule(r) => Some(r),
            _ => None,
        }
    }

    pub fn failed(spec: &RuleSpec, err: &RuleViolation) -> Step {
        Step::Failed(spec.to_string(), err.to_string())
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub struct Node {
    pub sequent: Sequent,
    pub step: Step,
}

impl Node {
    pub fn is_bud(&self) -> bool {
        matches!(self.step, Step::Bud)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct DerivationTree {
    pub nodes: BTreeMap<NodeAddr, Node>,
}

impl DerivationTree {
    pub fn get(&self, a: &NodeAddr) -> Option<&Node> {
        self.nodes.get(a)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Children `σ0, σ1, ...` up to the first missing index.
    pub fn children(&self, a: &NodeAddr) -> Vec<NodeAddr> {
        (0..).map(|i| a.child(i)).take_while(|c| self.nodes.contains_key(c)).collect()
    }

    pub fn height(&self) -> usize {
        self.nodes.keys().map(NodeAddr::len).max().unwrap_or(0)
    }
}

/// A finite derivation tree with a companion for every bud.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct PreProof {
    pub tree: DerivationTree,
    pub companions: BTreeMap<NodeAddr, NodeAddr>,
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum ViolationKind {
    #[error("the tree has no root")]
    MissingRoot,
    #[error("parent node is missing")]
    NotPrefixClosed,
    #[error("an earlier sibling is missing")]
    NotSiblingClosed,
    #[error("a bud has children")]
    BudWithChildren,
    #[error("{0}")]
    Rule(RuleViolation),
    #[error("rule `{0}` could not be elaborated: {1}")]
    Elaboration(String, String),
    #[error("bud has no companion")]
    UnmappedBud,
    #[error("companion assigned to a node that is not a bud")]
    CompanionOfInner,
    #[error("companion {0:?} is not a node")]
    CompanionMissing(String),
    #[error("companion {0:?} is a bud")]
    CompanionIsBud(String),
    #[error("companion {0:?} has a different sequent")]
    CompanionSequentMismatch(String),
}

impl ViolationKind {
    pub fn tag(&self) -> &'static str {
        match self {
            ViolationKind::MissingRoot => "missing-root",
            ViolationKind::NotPrefixClosed => "prefix-closure",
            ViolationKind::NotSiblingClosed => "sibling-closure",
            ViolationKind::BudWithChildren => "bud-with-children",
            ViolationKind::Rule(_) => "rule",
            ViolationKind::Elaboration(..) => "elaboration",
            ViolationKind::UnmappedBud => "unmapped-bud",
            ViolationKind::CompanionOfInner => "companion-of-inner",
            ViolationKind::CompanionMissing(_) => "companion-missing",
            ViolationKind::CompanionIsBud(_) => "companion-is-bud",
            ViolationKind::CompanionSequentMismatch(_) => "companion-sequent-mismatch",
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Violation {
    pub addr: NodeAddr,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Heights are reported 1-based, matching path lengths from the root.
        write!(f, "node \"{}\" (height {}): {}", self.addr, self.addr.len() + 1, self.kind)
    }
}

impl PreProof {
    pub fn root(&self) -> Option<&Node> {
        self.tree.get(&NodeAddr::root())
    }

    pub fn buds(&self) -> impl Iterator<Item = &NodeAddr> {
        self.tree.nodes.iter().filter(|(_, n)| n.is_bud()).map(|(a, _)| a)
    }

    pub fn inner_count(&self) -> usize {
        self.tree.nodes.values().filter(|n| !n.is_bud()).count()
    }

    pub fn is_cut_free(&self) -> bool {
        !self.tree.nodes.values().any(|n| n.step.rule().is_some_and(RuleInstance::is_cut))
    }

    /// Checks tree shape, every rule instance and every companion; returns
    /// all violations in address order.
    pub fn validate(&self, system: System, defs: &IndDefSet) -> Result<(), Vec<Violation>> {
        let mut out = Vec::new();
        let mut push = |addr: &NodeAddr, kind| out.push(Violation { addr: addr.clone(), kind });
        if self.tree.get(&NodeAddr::root()).is_none() {
            push(&NodeAddr::root(), ViolationKind::MissingRoot);
        }
        for (addr, node) in &self.tree.nodes {
            if let Some(parent) = addr.parent() {
                if !self.tree.nodes.contains_key(&parent) {
                    push(addr, ViolationKind::NotPrefixClosed);
                }
                let i = addr.last().expect("non-root");
                if i > 0 && !self.tree.nodes.contains_key(&parent.child(i - 1)) {
                    push(addr, ViolationKind::NotSiblingClosed);
                }
            }
            let kids = self.tree.children(addr);
            match &node.step {
                Step::Bud => {
                    if self.tree.nodes.contains_key(&addr.child(0)) {
                        push(addr, ViolationKind::BudWithChildren);
                    }
                    match self.companions.get(addr) {
                        None => push(addr, ViolationKind::UnmappedBud),
                        Some(c) => match self.tree.get(c) {
                            None => push(addr, ViolationKind::CompanionMissing(c.to_string())),
                            Some(cn) if cn.is_bud() => push(addr, ViolationKind::CompanionIsBud(c.to_string())),
                            Some(cn) if cn.sequent != node.sequent => push(addr, ViolationKind::CompanionSequentMismatch(c.to_string())),
                            Some(_) => {}
                        },
                    }
                }
                Step::Rule(inst) => {
                    let premises: Vec<Sequent> = kids.iter().map(|k| self.tree.nodes[k].sequent.clone()).collect();
                    if let Err(e) = check_instance(system, defs, &node.sequent, inst, &premises) {
                        push(addr, ViolationKind::Rule(e));
                    }
                }
                Step::Failed(spec, why) => push(addr, ViolationKind::Elaboration(spec.clone(), why.clone())),
            }
        }
        for bud in self.companions.keys() {
            if !self.tree.get(bud).is_some_and(Node::is_bud) {
                push(bud, ViolationKind::CompanionOfInner);
            }
        }
        out.sort_by(|a, b| a.addr.cmp(&b.addr));
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    /// Every companion is a proper ancestor of its bud.
    pub fn is_cycle_normal(&self) -> bool {
        self.companions.iter().all(|(b, c)| c.is_proper_prefix_of(b))
    }

    /// The inner node of the finite tree whose entry the unfolding shows at
    /// `addr`, if `addr` is in the unfolding.
    pub fn resolve(&self, addr: &NodeAddr) -> Option<NodeAddr> {
        let mut cur = self.resolve_node(&NodeAddr::root())?;
        for &i in addr.steps() {
            cur = self.resolve_node(&cur.child(i))?;
        }
        Some(cur)
    }

    /// The inner node a tree address stands for once a bud is followed to
    /// its companion.
    pub fn resolve_node(&self, a: &NodeAddr) -> Option<NodeAddr> {
        let n = self.tree.get(a)?;
        if n.is_bud() {
            let c = self.companions.get(a)?;
            self.tree.get(c).filter(|cn| !cn.is_bud()).map(|_| c.clone())
        } else {
            Some(a.clone())
        }
    }

    /// The tree-unfolding restricted to addresses of length at most `depth`.
    pub fn unfold(&self, depth: usize) -> Unfolding {
        let mut entries = BTreeMap::new();
        let Some(root) = self.resolve_node(&NodeAddr::root()) else { return Unfolding { entries } };
        let mut frontier = vec![(NodeAddr::root(), root)];
        while let Some((addr, src)) = frontier.pop() {
            if addr.len() < depth {
                for (i, k) in self.tree.children(&src).into_iter().enumerate() {
                    if let Some(t) = self.resolve_node(&k) {
                        frontier.push((addr.child(i as u32), t));
                    }
                }
            }
            entries.insert(addr, src);
        }
        Unfolding { entries }
    }

    /// Root-to-leaf paths of the finite tree, leftmost first.
    pub fn paths(&self) -> Vec<Vec<NodeAddr>> {
        let mut out = Vec::new();
        let mut stack = vec![vec![NodeAddr::root()]];
        while let Some(path) = stack.pop() {
            let last = path.last().expect("non-empty").clone();
            if !self.tree.nodes.contains_key(&last) {
                continue;
            }
            let kids = self.tree.children(&last);
            if kids.is_empty() {
                out.push(path);
                continue;
            }
            for k in kids.into_iter().rev() {
                let mut p = path.clone();
                p.push(k);
                stack.push(p);
            }
        }
        out
    }

    pub fn companion_graph(&self) -> CompanionGraph {
        let nodes: Vec<NodeAddr> = self.tree.nodes.keys().cloned().collect();
        let index: BTreeMap<NodeAddr, usize> = nodes.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        let mut succ = vec![Vec::new(); nodes.len()];
        for (i, a) in nodes.iter().enumerate() {
            for k in self.tree.children(a) {
                succ[i].push(index[&k]);
            }
            if let Some(c) = self.companions.get(a).and_then(|c| index.get(c)) {
                succ[i].push(*c);
            }
        }
        CompanionGraph { nodes, succ }
    }
}

/// A finite prefix of the tree-unfolding: each address maps to the inner node
/// of the finite tree that supplies its entry.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Unfolding {
    pub entries: BTreeMap<NodeAddr, NodeAddr>,
}

impl Unfolding {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Node-for-node comparison of sequents and rules.
    pub fn same_as(&self, p: &PreProof, other: &Unfolding, q: &PreProof) -> bool {
        self.entries.len() == other.entries.len()
            && self.entries.iter().zip(&other.entries).all(|((a, s), (b, t))| a == b && p.tree.nodes[s] == q.tree.nodes[t])
    }
}

/// The finite tree plus bud-to-companion edges.
#[derive(Clone, Debug)]
pub struct CompanionGraph {
    pub nodes: Vec<NodeAddr>,
    pub succ: Vec<Vec<usize>>,
}

impl CompanionGraph {
    /// Elementary cycles, each listed from its least node.
    pub fn simple_cycles(&self) -> Vec<Vec<NodeAddr>> {
        let mut out = Vec::new();
        for start in 0..self.nodes.len() {
            let mut path = vec![start];
            let mut on_path = BTreeSet::from([start]);
            self.cycles_from(start, start, &mut path, &mut on_path, &mut out);
        }
        out
    }

    fn cycles_from(&self, start: usize, v: usize, path: &mut Vec<usize>, on: &mut BTreeSet<usize>, out: &mut Vec<Vec<NodeAddr>>) {
        for &w in &self.succ[v] {
            if w == start {
                out.push(path.iter().map(|&i| self.nodes[i].clone()).collect());
            } else if w > start && !on.contains(&w) {
                path.push(w);
                on.insert(w);
                self.cycles_from(start, w, path, on, out);
                on.remove(&w);
                path.pop();
            }
        }
    }

    pub fn is_acyclic(&self) -> bool {
        self.simple_cycles().is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn addresses_round_trip() {
        let a = NodeAddr::root().concat(&[1, 0, 12]);
        assert_eq!(a.to_string().parse(), Ok(a));
        assert_eq!("root".parse(), Ok(NodeAddr::root()));
        assert_eq!("".parse(), Ok(NodeAddr::root()));
        assert!("1..2".parse::<NodeAddr>().is_err());
        assert!("x".parse::<NodeAddr>().is_err());
    }

    #[test]
    fn addresses() {
        let a = NodeAddr::from_slice(&[0, 1]);
        assert_eq!(a.to_string(), "0.1");
        assert_eq!(NodeAddr::root().to_string(), "");
        assert!(NodeAddr::root().is_proper_prefix_of(&a));
        assert!(!a.is_proper_prefix_of(&a));
        assert_eq!(a.parent(), Some(NodeAddr::from_slice(&[0])));
        assert_eq!(a.ancestors().count(), 2);
    }

    #[test]
    fn loop0_unfolds_to_a_single_path() {
        let (p, _) = fixtures::loop0();
        let u = p.unfold(5);
        assert_eq!(u.len(), 6);
        let seqs: BTreeSet<&Sequent> = u.entries.values().map(|s| &p.tree.nodes[s].sequent).collect();
        assert_eq!(seqs.len(), 1);
        assert_eq!(u.entries.keys().map(NodeAddr::len).max(), Some(5));
        let cycles = p.companion_graph().simple_cycles();
        assert_eq!(cycles, vec![vec![NodeAddr::root(), NodeAddr::from_slice(&[0])]]);
    }

    #[test]
    fn fig1_graph_and_shape() {
        let (p, defs) = fixtures::fig1();
        assert_eq!(p.validate(System::Clkid, &defs), Ok(()));
        assert!(p.is_cycle_normal());
        assert_eq!(p.companion_graph().simple_cycles().len(), 1);
        let h = p.tree.height();
        let u = p.unfold(h);
        for (a, src) in &u.entries {
            if let Some(n) = p.tree.get(a).filter(|n| !n.is_bud()) {
                assert_eq!(n, &p.tree.nodes[src]);
            }
        }
    }

    #[test]
    fn fig1_shape_violations() {
        let (p, defs) = fixtures::fig1();
        let mut broken = p.clone();
        broken.tree.nodes.remove(&NodeAddr::from_slice(&[0]));
        let errs = broken.validate(System::Clkid, &defs).unwrap_err();
        assert!(errs.iter().any(|v| v.kind == ViolationKind::NotPrefixClosed && v.addr.steps() == [0, 0]));

        let mut broken = p.clone();
        let (bud, comp) = broken.companions.iter().next().map(|(b, c)| (b.clone(), c.clone())).unwrap();
        let node = broken.tree.nodes.get_mut(&comp).unwrap();
        let extra = crate::syntax::parse_formula("x1 = 0", &defs).unwrap();
        node.sequent.left.insert(extra);
        let errs = broken.validate(System::Clkid, &defs).unwrap_err();
        assert!(errs.iter().any(|v| v.addr == bud && matches!(v.kind, ViolationKind::CompanionSequentMismatch(_))));
    }

    #[test]
    fn acyclic_without_buds() {
        let (p, _) = fixtures::plus_zero();
        assert!(p.companion_graph().is_acyclic());
        assert_eq!(p.paths().len(), 1);
    }

    #[test]
    fn unfolding_is_prefix_monotone() {
        for (name, p, _) in fixtures::all() {
            let big = p.unfold(12);
            for d in 0..12 {
                let small = p.unfold(d);
                let restricted: BTreeMap<_, _> =
                    big.entries.iter().filter(|(a, _)| a.len() <= d).map(|(a, s)| (a.clone(), s.clone())).collect();
                assert_eq!(small.entries, restricted, "{name} at depth {d}");
            }
        }
    }

    #[test]
    fn fig2_unfolding_matches_the_recursive_definition() {
        let (p, _) = fixtures::fig2();
        let u = p.unfold(30);
        // Recompute each entry from the definition: walk the address, jumping
        // through buds.
        for (addr, src) in &u.entries {
            let mut cur = NodeAddr::root();
            for &i in addr.steps() {
                if let Some(c) = p.companions.get(&cur) {
                    cur = c.clone();
                }
                cur = cur.child(i);
            }
            if let Some(c) = p.companions.get(&cur) {
                cur = c.clone();
            }
            assert_eq!(&cur, src);
        }
        // Each pass round the root cycle starts another infinite branch, so
        // the width of a level grows linearly and the total quadratically.
        let width = |d: usize| u.entries.keys().filter(|a| a.len() == d).count();
        let widths: Vec<usize> = (0..=30).map(width).collect();
        assert!(widths[30] > widths[10], "{widths:?}");
        for d in 1..=30 {
            assert!(widths[d] <= d + 2, "{widths:?}");
        }
    }
}
