//! Cycle-normalization and the rewrite of `eql` steps into `weak` + `eqla`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::prooftree::{Node, NodeAddr, PreProof, Step};
use crate::rules::RuleInstance;

/// Groups nodes whose unfolding subtrees are equal. Buds share the class of
/// their companion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubtreeClasses {
    pub class_of: BTreeMap<NodeAddr, usize>,
    pub count: usize,
}

impl SubtreeClasses {
    pub fn same(&self, a: &NodeAddr, b: &NodeAddr) -> bool {
        self.class_of.get(a).is_some_and(|c| self.class_of.get(b) == Some(c))
    }

    pub fn classes(&self) -> Vec<Vec<NodeAddr>> {
        let mut out = vec![Vec::new(); self.count];
        for (a, c) in &self.class_of {
            out[*c].push(a.clone());
        }
        out
    }
}

/// Partition refinement over inner nodes, labelled by sequent and step, with
/// bud children redirected to their companions.
pub fn subtree_classes(p: &PreProof) -> SubtreeClasses {
    let inner: Vec<NodeAddr> = p.tree.nodes.iter().filter(|(_, n)| !n.is_bud()).map(|(a, _)| a.clone()).collect();
    let index: BTreeMap<&NodeAddr, usize> = inner.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let succ: Vec<Vec<Option<usize>>> = inner
        .iter()
        .map(|a| p.tree.children(a).into_iter().map(|k| p.resolve_node(&k).and_then(|r| index.get(&r).copied())).collect())
        .collect();
    let labels: Vec<&Node> = inner.iter().map(|a| &p.tree.nodes[a]).collect();
    let mut class = dense(labels.iter().map(|n| (*n).clone()).collect::<Vec<_>>());
    loop {
        let keyed: Vec<(usize, Vec<Option<usize>>)> =
            (0..inner.len()).map(|i| (class[i], succ[i].iter().map(|s| s.map(|j| class[j])).collect())).collect();
        let next = dense(keyed);
        let done = count(&next) == count(&class);
        class = next;
        if done {
            break;
        }
    }
    let mut class_of: BTreeMap<NodeAddr, usize> = inner.iter().cloned().zip(class.iter().copied()).collect();
    for b in p.buds() {
        if let Some(c) = p.resolve_node(b).and_then(|r| class_of.get(&r).copied()) {
            class_of.insert(b.clone(), c);
        }
    }
    SubtreeClasses { class_of, count: count(&class) }
}

fn dense<K: Ord>(keys: Vec<K>) -> Vec<usize> {
    let mut ids: BTreeMap<&K, usize> = BTreeMap::new();
    let mut sorted: Vec<&K> = keys.iter().collect();
    sorted.sort();
    for k in sorted {
        let n = ids.len();
        ids.entry(k).or_insert(n);
    }
    keys.iter().map(|k| ids[k]).collect()
}

fn count(class: &[usize]) -> usize {
    class.iter().max().map_or(0, |m| m + 1)
}

/// Rebuilds the pre-proof by walking its unfolding and closing each branch
/// at the first node whose subtree class already occurs above it; the
/// shallowest such ancestor becomes the companion.
pub fn cycle_normalize(p: &PreProof) -> PreProof {
    let classes = subtree_classes(p);
    let mut out = PreProof::default();
    let Some(root) = p.resolve_node(&NodeAddr::root()) else { return p.clone() };
    // (new address, source node, classes on the path above with their addresses)
    let mut stack: Vec<(NodeAddr, NodeAddr, Vec<(usize, NodeAddr)>)> = vec![(NodeAddr::root(), root, Vec::new())];
    while let Some((addr, src, above)) = stack.pop() {
        let class = classes.class_of[&src];
        let node = &p.tree.nodes[&src];
        if let Some((_, comp)) = above.iter().find(|(c, _)| *c == class) {
            out.companions.insert(addr.clone(), comp.clone());
            out.tree.nodes.insert(addr, Node { sequent: node.sequent.clone(), step: Step::Bud });
            continue;
        }
        let mut path = above.clone();
        path.push((class, addr.clone()));
        for (i, k) in p.tree.children(&src).into_iter().enumerate() {
            if let Some(next) = p.resolve_node(&k) {
                stack.push((addr.child(i as u32), next, path.clone()));
            }
        }
        out.tree.nodes.insert(addr, node.clone());
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("node \"{0}\" is a cut")]
    ContainsCut(NodeAddr),
}

/// Replaces every `eql` step by an `eqla` step with the same template
/// followed by a weakening that drops the equation again.
pub fn replace_eql_with_eqla(p: &PreProof) -> Result<PreProof, NormalizeError> {
    if let Some((a, _)) = p.tree.nodes.iter().find(|(_, n)| n.step.rule().is_some_and(RuleInstance::is_cut)) {
        return Err(NormalizeError::ContainsCut(a.clone()));
    }
    let mut moved: BTreeMap<NodeAddr, NodeAddr> = BTreeMap::new();
    let mut out = PreProof::default();
    let mut stack = vec![(NodeAddr::root(), NodeAddr::root())];
    while let Some((old, new)) = stack.pop() {
        let Some(node) = p.tree.get(&old) else { continue };
        moved.insert(old.clone(), new.clone());
        let below = match &node.step {
            Step::Rule(RuleInstance::EqL(t)) => {
                let premise = &p.tree.nodes[&old.child(0)].sequent;
                let mut with_eq = premise.clone();
                with_eq.left.insert(t.equation());
                out.tree.nodes.insert(new.clone(), Node { sequent: node.sequent.clone(), step: Step::Rule(RuleInstance::EqLa(t.clone())) });
                let weak = Step::Rule(RuleInstance::Weak { premise: premise.clone() });
                out.tree.nodes.insert(new.child(0), Node { sequent: with_eq, step: weak });
                new.child(0)
            }
            _ => {
                out.tree.nodes.insert(new.clone(), node.clone());
                new.clone()
            }
        };
        for (i, k) in p.tree.children(&old).into_iter().enumerate() {
            stack.push((k, below.child(i as u32)));
        }
    }
    for (b, c) in &p.companions {
        if let (Some(nb), Some(nc)) = (moved.get(b), moved.get(c)) {
            out.companions.insert(nb.clone(), nc.clone());
        }
    }
    Ok(out)
}
