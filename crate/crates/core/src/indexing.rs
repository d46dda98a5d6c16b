//! Indices of left-predicate atoms relative to right-predicate atoms, index
//! sequents, switching points and index paths, with checkers for how these
//! evolve along derivations.
//!
//! The two predicates are parameters; by default the left one is `Add2` and
//! the right one `Add1`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::congruence::{DeltaSet, OffsetGraph};
use crate::prooftree::{NodeAddr, PreProof};
use crate::rules::{RuleInstance, System};
use crate::syntax::{decompose, Formula, IndDefSet, NonSuccessorTerm, Sequent, Sym, Term};
use crate::trace::{gtc_closure, trace_step, GtcVerdict};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum IndexError {
    #[error(transparent)]
    NonSuccessor(#[from] NonSuccessorTerm),
    #[error("{0} is not a {1} atom of the antecedent")]
    NotAnIndexedAtom(Formula, Sym),
    #[error("trace mismatch at step {step}: {reason}")]
    TraceMismatch { step: usize, reason: String },
    #[error("path is not a path of the unfolding at step {0}")]
    NotAPath(usize),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
}

/// The two ternary predicates the index relates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexPreds {
    /// Antecedent predicate whose atoms carry an index.
    pub left: Sym,
    /// Succedent predicate the index is measured against.
    pub right: Sym,
}

impl Default for IndexPreds {
    fn default() -> Self {
        IndexPreds { left: Sym::new("Add2"), right: Sym::new("Add1") }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IndexValue {
    Bot,
    Int(i64),
    Undefined,
}

impl fmt::Display for IndexValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexValue::Bot => f.write_str("bot"),
            IndexValue::Int(d) => write!(f, "{d}"),
            IndexValue::Undefined => f.write_str("undefined"),
        }
    }
}

impl Serialize for IndexValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            IndexValue::Int(d) => s.serialize_i64(*d),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

/// Argument sets of the indexed atoms of a sequent.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SequentSets {
    /// First arguments, plus `0`.
    pub a: BTreeSet<String>,
    /// Second and third arguments.
    pub bc: BTreeSet<String>,
    /// Second arguments of succedent atoms.
    pub b1: BTreeSet<String>,
    /// Third arguments.
    pub c: BTreeSet<String>,
}

struct Sets {
    a: BTreeSet<Term>,
    bc: BTreeSet<Term>,
    b1: BTreeSet<Term>,
    c: BTreeSet<Term>,
}

impl IndexPreds {
    fn indexed<'a>(&'a self, seq: &'a Sequent) -> impl Iterator<Item = &'a [Term]> + 'a {
        let left = seq.left.iter().filter(|f| f.pred_name() == Some(&self.left));
        let right = seq.right.iter().filter(|f| f.pred_name() == Some(&self.right));
        left.chain(right).map(Formula::args).filter(|a| a.len() == 3)
    }

    fn sets(&self, seq: &Sequent) -> Sets {
        let mut s = Sets { a: BTreeSet::from([Term::zero()]), bc: BTreeSet::new(), b1: BTreeSet::new(), c: BTreeSet::new() };
        for args in self.indexed(seq) {
            s.a.insert(args[0].clone());
            s.bc.insert(args[1].clone());
            s.bc.insert(args[2].clone());
            s.c.insert(args[2].clone());
        }
        for f in seq.right.iter().filter(|f| f.pred_name() == Some(&self.right)) {
            if let [_, b, _] = f.args() {
                s.b1.insert(b.clone());
            }
        }
        s
    }

    pub fn sequent_sets(&self, seq: &Sequent) -> SequentSets {
        let s = self.sets(seq);
        let show = |set: BTreeSet<Term>| set.iter().map(Term::to_string).collect();
        SequentSets { a: show(s.a), bc: show(s.bc), b1: show(s.b1), c: show(s.c) }
    }

    /// The index of `atom` in `seq`.
    pub fn index_of(&self, seq: &Sequent, atom: &Formula) -> Result<IndexValue, IndexError> {
        let b = match atom {
            Formula::Pred(p, args) if *p == self.left && args.len() == 3 && seq.left.contains(atom) => &args[1],
            _ => return Err(IndexError::NotAnIndexedAtom(atom.clone(), self.left.clone())),
        };
        let g = OffsetGraph::build(&seq.left)?;
        let mut found: Option<i64> = None;
        for f in seq.right.iter().filter(|f| f.pred_name() == Some(&self.right)) {
            let [_, b2, _] = f.args() else { continue };
            match g.delta_set(b, b2)? {
                DeltaSet::Unrelated => {}
                DeltaSet::Ambiguous => return Ok(IndexValue::Undefined),
                DeltaSet::Unique(d) => match found {
                    Some(e) if e != d => return Ok(IndexValue::Undefined),
                    _ => found = Some(d),
                },
            }
        }
        Ok(found.map_or(IndexValue::Bot, IndexValue::Int))
    }

    pub fn is_index_sequent(&self, seq: &Sequent) -> Result<bool, IndexError> {
        let g = OffsetGraph::build(&seq.left)?;
        let s = self.sets(seq);
        for t in &s.b1 {
            for u in &s.c {
                if g.related(t, u)? {
                    return Ok(false);
                }
            }
            for t2 in &s.b1 {
                match g.delta_set(t, t2)? {
                    DeltaSet::Unrelated | DeltaSet::Unique(0) => {}
                    _ => return Ok(false),
                }
            }
        }
        Ok(true)
    }

    /// A case split on a left-predicate atom whose index is `Bot`.
    pub fn is_switching_point(&self, p: &PreProof, at: &NodeAddr) -> bool {
        let Some(node) = p.tree.get(at) else { return false };
        match node.step.rule() {
            Some(RuleInstance::Case { principal, .. }) if principal.pred_name() == Some(&self.left) => {
                self.index_of(&node.sequent, principal) == Ok(IndexValue::Bot)
            }
            _ => false,
        }
    }

    /// `path` lists addresses of the unfolding. It is an index path when its
    /// first sequent is an index sequent and every step into the first
    /// premise of a left-predicate case split leaves a switching point.
    pub fn is_index_path(&self, p: &PreProof, path: &[NodeAddr]) -> bool {
        let Ok(nodes) = resolve_path(p, path) else { return false };
        let Some(first) = nodes.first() else { return false };
        if !self.is_index_sequent(&p.tree.nodes[first].sequent).unwrap_or(false) {
            return false;
        }
        nodes.iter().zip(path.iter().skip(1)).all(|(src, next)| {
            let left_case = matches!(p.tree.nodes[src].step.rule(),
                Some(RuleInstance::Case { principal, .. }) if principal.pred_name() == Some(&self.left));
            !(left_case && next.last() == Some(0)) || self.is_switching_point(p, src)
        })
    }

    /// Checks each step of `trace` along `path` against the expected change
    /// of index for its rule.
    pub fn validate_index_lemma(
        &self,
        p: &PreProof,
        defs: &IndDefSet,
        path: &[NodeAddr],
        trace: &[Formula],
    ) -> Result<IndexLemmaReport, IndexError> {
        let nodes = resolve_path(p, path)?;
        if trace.len() != nodes.len() {
            return Err(IndexError::TraceMismatch { step: trace.len().min(nodes.len()), reason: "trace and path lengths differ".into() });
        }
        let mut steps = Vec::new();
        for k in 0..nodes.len().saturating_sub(1) {
            let (src, dst) = (&p.tree.nodes[&nodes[k]], &p.tree.nodes[&nodes[k + 1]]);
            let child = path[k + 1].last().expect("child") as usize;
            let inst = src.step.rule().ok_or(IndexError::NotAPath(k))?;
            let succ = trace_step(defs, &src.sequent, inst, child, &dst.sequent, &trace[k])
                .map_err(|e| IndexError::TraceMismatch { step: k, reason: e.to_string() })?;
            let progress = match (succ.contains(&(trace[k + 1].clone(), false)), succ.contains(&(trace[k + 1].clone(), true))) {
                (_, true) => true,
                (true, false) => false,
                _ => return Err(IndexError::TraceMismatch { step: k, reason: format!("{} does not follow {}", trace[k + 1], trace[k]) }),
            };
            let before = self.index_of(&src.sequent, &trace[k])?;
            let after = self.index_of(&dst.sequent, &trace[k + 1])?;
            let case = self.step_case(inst, child, progress);
            let holds = case.admits(before, after);
            steps.push(IndexStep {
                from: path[k].clone(),
                to: path[k + 1].clone(),
                rule: inst.id().to_string(),
                case,
                before,
                after,
                holds,
            });
        }
        Ok(IndexLemmaReport { steps })
    }

    fn step_case(&self, inst: &RuleInstance, child: usize, progress: bool) -> StepCase {
        match inst {
            RuleInstance::Weak { .. } | RuleInstance::Subst { .. } => StepCase::WeakOrSubst,
            RuleInstance::EqL(_) | RuleInstance::EqLa(_) => StepCase::Equality,
            RuleInstance::Intro { pred, .. } if *pred == self.right => StepCase::RightIntro,
            RuleInstance::Case { principal, .. } if principal.pred_name() == Some(&self.left) => match (child, progress) {
                (0, _) => StepCase::CaseLeft,
                (_, false) => StepCase::CaseRight,
                (_, true) => StepCase::CaseProgress,
            },
            other => StepCase::Uncovered(other.id().to_string()),
        }
    }

    /// Terms allowed in the antecedent and succedent of the cut-free
    /// fragment: equations and left atoms on the left, right atoms on the
    /// right, successor-form terms throughout.
    pub fn validate_shape(&self, seq: &Sequent) -> Result<(), Vec<ShapeViolation>> {
        let mut out = Vec::new();
        let mut terms: Vec<&Term> = Vec::new();
        for f in &seq.left {
            match f {
                Formula::Eq(a, b) => terms.extend([a, b]),
                Formula::Pred(p, args) if *p == self.left => terms.extend(args),
                other => out.push(ShapeViolation::Antecedent(other.to_string())),
            }
        }
        for f in &seq.right {
            match f {
                Formula::Pred(p, args) if *p == self.right => terms.extend(args),
                other => out.push(ShapeViolation::Succedent(other.to_string())),
            }
        }
        for t in terms {
            if decompose(t).is_err() {
                out.push(ShapeViolation::NonSuccessor(t.to_string()));
            }
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    /// No first argument is related to a second or third argument.
    pub fn validate_abc(&self, seq: &Sequent) -> Result<(), Vec<ShapeViolation>> {
        let g = OffsetGraph::build(&seq.left).map_err(|e| vec![ShapeViolation::NonSuccessor(e.0.to_string())])?;
        let s = self.sets(seq);
        let mut out = Vec::new();
        for t in &s.a {
            for u in &s.bc {
                match g.related(t, u) {
                    Ok(true) => out.push(ShapeViolation::Related(t.to_string(), u.to_string())),
                    Ok(false) => {}
                    Err(e) => out.push(ShapeViolation::NonSuccessor(e.0.to_string())),
                }
            }
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }
}

fn resolve_path(p: &PreProof, path: &[NodeAddr]) -> Result<Vec<NodeAddr>, IndexError> {
    let mut out = Vec::new();
    for (k, a) in path.iter().enumerate() {
        if k > 0 && a.parent().as_ref() != Some(&path[k - 1]) {
            return Err(IndexError::NotAPath(k));
        }
        out.push(p.resolve(a).ok_or(IndexError::NotAPath(k))?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Error)]
#[serde(tag = "kind", content = "detail", rename_all = "kebab-case")]
pub enum ShapeViolation {
    #[error("antecedent formula {0} is neither an equation nor a left atom")]
    Antecedent(String),
    #[error("succedent formula {0} is not a right atom")]
    Succedent(String),
    #[error("term {0} is not of successor form")]
    NonSuccessor(String),
    #[error("first argument {0} is related to {1}")]
    Related(String, String),
}

/// Which change of index a step admits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepCase {
    WeakOrSubst,
    Equality,
    RightIntro,
    CaseLeft,
    CaseRight,
    CaseProgress,
    Uncovered(String),
}

impl StepCase {
    pub fn admits(&self, before: IndexValue, after: IndexValue) -> bool {
        if before == IndexValue::Bot {
            return after == IndexValue::Bot;
        }
        match self {
            StepCase::WeakOrSubst => after == before || after == IndexValue::Bot,
            StepCase::Equality | StepCase::RightIntro | StepCase::CaseLeft | StepCase::CaseRight => after == before,
            StepCase::CaseProgress => matches!((before, after), (IndexValue::Int(d), IndexValue::Int(e)) if e == d + 1),
            StepCase::Uncovered(_) => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexStep {
    pub from: NodeAddr,
    pub to: NodeAddr,
    pub rule: String,
    pub case: StepCase,
    pub before: IndexValue,
    pub after: IndexValue,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexLemmaReport {
    pub steps: Vec<IndexStep>,
}

impl IndexLemmaReport {
    pub fn violations(&self) -> impl Iterator<Item = &IndexStep> {
        self.steps.iter().filter(|s| !s.holds)
    }

    pub fn is_ok(&self) -> bool {
        self.violations().next().is_none()
    }

    /// Steps whose index goes from `d` to `d + 1`.
    pub fn increments(&self) -> impl Iterator<Item = &IndexStep> {
        self.steps.iter().filter(|s| matches!((s.before, s.after), (IndexValue::Int(d), IndexValue::Int(e)) if e == d + 1))
    }
}

/// Every index path of at most `max_len` nodes starting at a node of the
/// unfolding of depth below `max_len`, together with the first node on it
/// that is not an index sequent.
pub fn index_path_failures(cfg: &IndexPreds, p: &PreProof, max_len: usize) -> (usize, Vec<(Vec<NodeAddr>, NodeAddr)>) {
    let mut cache: BTreeMap<NodeAddr, bool> = BTreeMap::new();
    let mut is_index =
        |src: &NodeAddr| *cache.entry(src.clone()).or_insert_with(|| cfg.is_index_sequent(&p.tree.nodes[src].sequent).unwrap_or(false));
    let unfolding = p.unfold(max_len);
    let mut checked = 0;
    let mut failures = Vec::new();
    for (start, src) in &unfolding.entries {
        if start.len() + 1 >= max_len || !is_index(src) {
            continue;
        }
        let mut stack = vec![vec![start.clone()]];
        while let Some(path) = stack.pop() {
            checked += 1;
            let last = path.last().expect("non-empty");
            let src = &unfolding.entries[last];
            if !is_index(src) {
                failures.push((path.clone(), last.clone()));
                continue;
            }
            if path.len() >= max_len {
                continue;
            }
            for (i, _) in p.tree.children(src).iter().enumerate() {
                let next = last.child(i as u32);
                if !unfolding.entries.contains_key(&next) {
                    continue;
                }
                let mut q = path.clone();
                q.push(next);
                if cfg.is_index_path(p, &q) {
                    stack.push(q);
                }
            }
        }
    }
    (checked, failures)
}

/// One round of the construction: from `start`, follow rightmost premises to
/// the first switching point and continue at its first premise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstructionStep {
    pub start: NodeAddr,
    pub start_is_index_sequent: bool,
    pub rightmost: Vec<NodeAddr>,
    pub switching_point: Option<NodeAddr>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum ConstructionOutcome {
    /// A start node came round again: the construction needs more distinct
    /// switching points than the finite tree has.
    ContradictionReached { repeated: NodeAddr },
    /// The global trace condition fails, so the argument has nothing to work
    /// with.
    GtcFailed { witness: Vec<NodeAddr> },
    /// A rightmost path cycles without meeting a switching point.
    NoSwitchingPoint { from: NodeAddr },
    /// A rightmost path ends at a closed leaf.
    RightmostPathClosed { leaf: NodeAddr },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CutFreeAnalysis {
    pub steps: Vec<ConstructionStep>,
    pub outcome: ConstructionOutcome,
}

impl ConstructionOutcome {
    pub fn describe(&self) -> String {
        match self {
            ConstructionOutcome::ContradictionReached { repeated } => format!("contradiction reached (node \"{repeated}\" repeats)"),
            ConstructionOutcome::GtcFailed { witness } => {
                let w: Vec<String> = witness.iter().map(|a| format!("\"{a}\"")).collect();
                format!("global trace condition fails (cycle {}), so the switching-point step has no progressing trace", w.join(" "))
            }
            ConstructionOutcome::NoSwitchingPoint { from } => format!("rightmost path from \"{from}\" has no switching point"),
            ConstructionOutcome::RightmostPathClosed { leaf } => format!("rightmost path ends at closed leaf \"{leaf}\""),
        }
    }
}

/// Runs the switching-point construction on a cut-free pre-proof of
/// `left(x, y, z) |- right(x, y, z)`.
pub fn analyze_cut_free(cfg: &IndexPreds, p: &PreProof, defs: &IndDefSet) -> Result<CutFreeAnalysis, IndexError> {
    let fail = |s: &str| Err(IndexError::PreconditionFailed(s.to_string()));
    let Some(root) = p.root() else { return fail("root shape") };
    if !root_shape(cfg, &root.sequent) {
        return fail("root shape");
    }
    if !p.is_cut_free() {
        return fail("cut-free");
    }
    if !p.is_cycle_normal() {
        return fail("cycle-normal");
    }
    if p.validate(System::ClkidA, defs).is_err() {
        return fail("validates under clkid-a");
    }
    let mut steps = Vec::new();
    if let Ok(GtcVerdict::Rejected { witness }) = gtc_closure(p, defs) {
        return Ok(CutFreeAnalysis { steps, outcome: ConstructionOutcome::GtcFailed { witness } });
    }
    let mut start = NodeAddr::root();
    let mut seen = BTreeSet::new();
    loop {
        if !seen.insert(start.clone()) {
            return Ok(CutFreeAnalysis { steps, outcome: ConstructionOutcome::ContradictionReached { repeated: start } });
        }
        let mut rightmost = Vec::new();
        let mut visited = BTreeSet::new();
        let mut cur = start.clone();
        let found = loop {
            if !visited.insert(cur.clone()) {
                break None;
            }
            rightmost.push(cur.clone());
            if cfg.is_switching_point(p, &cur) {
                break Some(cur.clone());
            }
            let Some(last) = p.tree.children(&cur).pop() else { break None };
            cur = p.resolve_node(&last).expect("validated");
        };
        let start_is_index_sequent = cfg.is_index_sequent(&p.tree.nodes[&start].sequent)?;
        steps.push(ConstructionStep { start: start.clone(), start_is_index_sequent, rightmost, switching_point: found.clone() });
        let Some(sp) = found else {
            let outcome = if p.tree.children(&cur).is_empty() {
                ConstructionOutcome::RightmostPathClosed { leaf: cur }
            } else {
                ConstructionOutcome::NoSwitchingPoint { from: start }
            };
            return Ok(CutFreeAnalysis { steps, outcome });
        };
        start = p.resolve_node(&sp.child(0)).expect("validated");
    }
}

/// `left(x, y, z) |- right(x, y, z)` for distinct variables.
pub fn root_shape(cfg: &IndexPreds, seq: &Sequent) -> bool {
    let (Some(l), Some(r)) = (seq.left.first(), seq.right.first()) else { return false };
    if seq.left.len() != 1 || seq.right.len() != 1 || l.pred_name() != Some(&cfg.left) || r.pred_name() != Some(&cfg.right) {
        return false;
    }
    let vars: Option<Vec<_>> = l.args().iter().map(Term::as_var).collect();
    let distinct: BTreeSet<_> = vars.iter().flatten().collect();
    l.args() == r.args() && distinct.len() == 3
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::syntax::{parse_formula, parse_sequent};

    fn seq(s: &str) -> Sequent {
        parse_sequent(s, &fixtures::add_defs()).unwrap()
    }

    fn atom(s: &str) -> Formula {
        parse_formula(s, &fixtures::add_defs()).unwrap()
    }

    #[test]
    fn index_values() {
        let c = IndexPreds::default();
        assert_eq!(c.index_of(&seq("Add2(x,y,z) |- Add1(x,y,z)"), &atom("Add2(x,y,z)")), Ok(IndexValue::Int(0)));
        assert_eq!(c.index_of(&seq("Add2(x,y,z) |-"), &atom("Add2(x,y,z)")), Ok(IndexValue::Bot));
        let s = seq("Add2(a,b,c), b = s(b1) |- Add1(a1,b1,c1)");
        assert_eq!(c.index_of(&s, &atom("Add2(a,b,c)")), Ok(IndexValue::Int(1)));
        let s = seq("Add2(a,b,c), b = b1, b = s(b1) |- Add1(a1,b1,c1)");
        assert_eq!(c.index_of(&s, &atom("Add2(a,b,c)")), Ok(IndexValue::Undefined));
        let s = seq("Add2(a,b,c), b = s(b1) |- Add1(a1,b1,c1), Add1(a1,b,c1)");
        assert_eq!(c.index_of(&s, &atom("Add2(a,b,c)")), Ok(IndexValue::Undefined));
        assert!(c.index_of(&s, &atom("Add2(a,b,a)")).is_err());
    }

    #[test]
    fn index_value_agrees_with_chain_oracle() {
        use crate::congruence::chain_oracle;
        let c = IndexPreds::default();
        let s = seq("Add2(a,b,c), b = s(b1) |- Add1(a1,b1,c1)");
        let gamma: Vec<Formula> = s.left.iter().filter(|f| matches!(f, Formula::Eq(..))).cloned().collect();
        let (b, b1) = (Term::var("b"), Term::var("b1"));
        assert!(chain_oracle(&gamma, &b, &b1.clone().lift(1), 8, 8));
        assert!(!chain_oracle(&gamma, &b, &b1, 8, 8));
        assert_eq!(c.index_of(&s, &atom("Add2(a,b,c)")), Ok(IndexValue::Int(1)));
    }

    #[test]
    fn index_sequents() {
        let c = IndexPreds::default();
        assert_eq!(c.is_index_sequent(&seq("Add2(x,y,z) |- Add1(x,y,z)")), Ok(true));
        assert_eq!(c.is_index_sequent(&seq("b1 = c1 |- Add1(a1,b1,c1)")), Ok(false));
        assert_eq!(c.is_index_sequent(&seq("b1 = s(b2) |- Add1(a1,b1,c1), Add1(a2,b2,c2)")), Ok(false));
        assert_eq!(c.is_index_sequent(&seq("b1 = b2 |- Add1(a1,b1,c1), Add1(a2,b2,c2)")), Ok(true));
    }

    #[test]
    fn defined_on_index_sequents() {
        let c = IndexPreds::default();
        let family = [
            "Add2(a,b,c) |- Add1(a,b,c)",
            "Add2(a,b,c), b = s(b1) |- Add1(a,b1,c)",
            "Add2(a,b,c), b = b1, b1 = b2 |- Add1(a,b1,c), Add1(a,b2,c)",
            "Add2(a,b,c), Add2(a,s(b),c), b = s(d) |- Add1(a,d,c)",
        ];
        for text in family {
            let s = seq(text);
            assert_eq!(c.is_index_sequent(&s), Ok(true), "{text}");
            for f in s.left.iter().filter(|f| f.pred_name() == Some(&c.left)) {
                assert_ne!(c.index_of(&s, f), Ok(IndexValue::Undefined), "{text}");
            }
        }
    }

    #[test]
    fn switching_points() {
        let c = IndexPreds::default();
        let (p, defs) = fixtures::fig2();
        assert!(!c.is_switching_point(&p, &NodeAddr::root()));
        assert!(!c.is_switching_point(&p, &NodeAddr::from_slice(&[1, 0, 0, 0, 0])));
        let text = r#"proof t {
            node "" : Add2(x, y, z) |- by case(Add2) -> "0", "1";
            node "0" : x = 0, y = y1, z = y1 |- by weak -> "0.0";
            node "0.0" : |- by weak;
            node "1" : x = s(x1), y = y1, z = z1, Add2(x1, s(y1), z1) |- by weak -> "1.0";
            node "1.0" : Add2(x1, s(y1), z1) |- by subst(x := x1, y := s(y1), z := z1) -> "1.0.0";
            node "1.0.0" : Add2(x, y, z) |- by bud(companion = "");
        }"#;
        let q = crate::prooftree::script::Script::parse(text, &defs).unwrap().to_preproof(System::ClkidA);
        assert!(c.is_switching_point(&q, &NodeAddr::root()));
        assert!(c.is_index_path(&q, &[NodeAddr::root(), NodeAddr::from_slice(&[0])]));
        assert!(!c.is_index_path(&p, &[NodeAddr::root(), NodeAddr::from_slice(&[0])]));
        assert!(c.is_index_path(&p, &[NodeAddr::root()]));
        assert!(c.is_index_path(&p, &[NodeAddr::root(), NodeAddr::from_slice(&[1])]));
    }

    #[test]
    fn shapes() {
        let c = IndexPreds::default();
        let root = seq("Add2(x,y,z) |- Add1(x,y,z)");
        assert_eq!(c.validate_shape(&root), Ok(()));
        assert_eq!(c.validate_abc(&root), Ok(()));
        let q = seq("forall w. Add2(w,w,w) |- Add1(x,y,z)");
        assert!(matches!(c.validate_shape(&q).unwrap_err()[0], ShapeViolation::Antecedent(_)));
        let bad = seq("Add2(a,b,c), a = b |-");
        assert!(matches!(c.validate_abc(&bad).unwrap_err()[0], ShapeViolation::Related(..)));
    }

    #[test]
    fn lemma_steps_on_fig2() {
        let c = IndexPreds::default();
        let (p, defs) = fixtures::fig2();
        let path: Vec<NodeAddr> = (0..=7).map(|k| NodeAddr::from_slice(&[1, 0, 0, 0, 0, 0, 0][..k])).collect();
        let mut trace = vec![atom("Add2(x, y, z)")];
        trace.extend(std::iter::repeat_n(atom("Add2(x1, s(y1), z1)"), 6));
        trace.push(atom("Add2(x, y, z)"));
        let r = c.validate_index_lemma(&p, &defs, &path, &trace).unwrap();
        let values: Vec<IndexValue> = std::iter::once(r.steps[0].before).chain(r.steps.iter().map(|s| s.after)).collect();
        use IndexValue::*;
        assert_eq!(values, vec![Int(0), Int(1), Int(1), Int(1), Int(1), Undefined, Int(0), Int(0)]);
        assert_eq!(r.increments().count(), 1);
        assert_eq!(r.steps[0].case, StepCase::CaseProgress);
        assert!(r.steps[0].holds);
        let bad: Vec<&str> = r.violations().map(|s| s.rule.as_str()).collect();
        assert_eq!(bad, vec!["cut", "weak"]);
        let mut wrong = trace.clone();
        wrong[2] = atom("Add2(x, y, z)");
        assert!(matches!(c.validate_index_lemma(&p, &defs, &path, &wrong), Err(IndexError::TraceMismatch { step: 1, .. })));
    }

    #[test]
    fn bot_persists() {
        let c = IndexPreds::default();
        let text = r#"proof t {
            node "" : Add2(x, y, z) |- by weak -> "0";
            node "0" : Add2(x, y, z) |- by subst(x := x, y := y) -> "0.0";
            node "0.0" : Add2(x, y, z) |- by weak;
        }"#;
        let defs = fixtures::add_defs();
        let p = crate::prooftree::script::Script::parse(text, &defs).unwrap().to_preproof(System::ClkidA);
        let path = [NodeAddr::root(), NodeAddr::from_slice(&[0]), NodeAddr::from_slice(&[0, 0])];
        let trace = vec![atom("Add2(x, y, z)"); 3];
        let r = c.validate_index_lemma(&p, &defs, &path, &trace).unwrap();
        assert!(r.steps.iter().all(|s| s.before == IndexValue::Bot && s.after == IndexValue::Bot && s.holds));
    }

    #[test]
    fn construction_preconditions() {
        let c = IndexPreds::default();
        let (p, defs) = fixtures::fig1();
        assert_eq!(analyze_cut_free(&c, &p, &defs), Err(IndexError::PreconditionFailed("root shape".into())));
        let (p, defs) = fixtures::fig2();
        assert_eq!(analyze_cut_free(&c, &p, &defs), Err(IndexError::PreconditionFailed("cut-free".into())));
        let (p, defs) = fixtures::loop0();
        let r = analyze_cut_free(&c, &p, &defs).unwrap();
        assert!(matches!(r.outcome, ConstructionOutcome::GtcFailed { .. }));
    }
}
