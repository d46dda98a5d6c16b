//! Bounded backward search for cut-free cyclic proofs in the system whose
//! equality rule keeps the equation.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::prooftree::{DerivationTree, Node, NodeAddr, PreProof, Step};
use crate::rules::matching::{match_sequent, match_term};
use crate::rules::{case_distinctions, directional_template, premises_of, RuleInstance, System};
use crate::syntax::{decompose, Formula, FreshSupply, IndDefSet, Sequent, Substitution, Term, Var};
use crate::trace::gtc_closure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    #[default]
    Focused,
    Exhaustive,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Focused => "focused",
            Strategy::Exhaustive => "exhaustive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("unknown strategy `{0}` (expected focused or exhaustive)")]
pub struct UnknownStrategy(String);

impl FromStr for Strategy {
    type Err = UnknownStrategy;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "focused" => Ok(Strategy::Focused),
            "exhaustive" => Ok(Strategy::Exhaustive),
            other => Err(UnknownStrategy(other.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchBudget {
    /// Inner nodes of the whole pre-proof.
    pub max_nodes: usize,
    pub max_term_height: u32,
    /// Longest node address.
    pub max_branch_depth: usize,
    pub strategy: Strategy,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_nodes: 12, max_term_height: 4, max_branch_depth: 10, strategy: Strategy::Focused }
    }
}

impl fmt::Display for SearchBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}, N={}, H={}, D={}", self.strategy, self.max_nodes, self.max_term_height, self.max_branch_depth)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub nodes_expanded: u64,
    pub sequents_canonicalized: u64,
    pub buds_attempted: u64,
    pub gtc_rejections: u64,
    /// Closed pre-proofs handed to the trace check.
    pub candidates: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found { proof: PreProof, stats: SearchStats },
    Exhausted(SearchStats),
}

impl SearchOutcome {
    pub fn stats(&self) -> &SearchStats {
        match self {
            SearchOutcome::Found { stats, .. } | SearchOutcome::Exhausted(stats) => stats,
        }
    }

    pub fn proof(&self) -> Option<&PreProof> {
        match self {
            SearchOutcome::Found { proof, .. } => Some(proof),
            SearchOutcome::Exhausted(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("goal formula {0} is outside the focused fragment (equations and inductive atoms over 0 and s)")]
    GoalShape(Formula),
    #[error("budget component {0} must be positive")]
    ZeroBudget(&'static str),
}

/// What the search reports to an observer.
pub enum SearchEvent<'a> {
    /// A node placed in the tree, with the tree as it stands.
    Generated(&'a NodeAddr, &'a DerivationTree),
    /// A closed pre-proof about to be checked for the trace condition.
    Candidate(&'a PreProof),
}

/// A variable-renaming normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canonical {
    pub sequent: Sequent,
    /// Maps each free variable of the input to its canonical name.
    pub renaming: Substitution,
}

fn term_vars_in_order(t: &Term, out: &mut Vec<Var>) {
    match t {
        Term::Var(v) => {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        Term::App(_, args) => args.iter().for_each(|a| term_vars_in_order(a, out)),
    }
}

fn vars_in_order(f: &Formula, bound: &mut Vec<Var>, out: &mut Vec<Var>) {
    let terms = |ts: &[&Term], bound: &Vec<Var>, out: &mut Vec<Var>| {
        let mut local = Vec::new();
        ts.iter().for_each(|t| term_vars_in_order(t, &mut local));
        for v in local {
            if !bound.contains(&v) && !out.contains(&v) {
                out.push(v);
            }
        }
    };
    match f {
        Formula::Eq(l, r) => terms(&[l, r], bound, out),
        Formula::Pred(_, args) => terms(&args.iter().collect::<Vec<_>>(), bound, out),
        Formula::Not(a) => vars_in_order(a, bound, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            vars_in_order(a, bound, out);
            vars_in_order(b, bound, out);
        }
        Formula::Forall(x, b) | Formula::Exists(x, b) => {
            bound.push(x.clone());
            vars_in_order(b, bound, out);
            bound.pop();
        }
    }
}

fn coloured(f: &Formula, colour: &BTreeMap<Var, usize>) -> Formula {
    let th: Substitution = f
        .fv()
        .into_iter()
        .map(|v| {
            let c = colour[&v];
            (v, Term::var(&format!("_{c}")))
        })
        .collect();
    f.subst(&th)
}

/// Groups the formulas of `seq` by a renaming-invariant key, refining
/// variable colours by where each variable occurs.
fn invariant_groups(seq: &Sequent) -> Vec<Vec<&Formula>> {
    let items: Vec<(bool, &Formula)> = seq.left.iter().map(|f| (false, f)).chain(seq.right.iter().map(|f| (true, f))).collect();
    let orders: Vec<Vec<Var>> = items
        .iter()
        .map(|(_, f)| {
            let mut vs = Vec::new();
            vars_in_order(f, &mut Vec::new(), &mut vs);
            vs
        })
        .collect();
    let mut colour: BTreeMap<Var, usize> = seq.fv().into_iter().map(|v| (v, 0)).collect();
    let mut classes = 1;
    loop {
        let sigs: Vec<(bool, Formula)> = items.iter().map(|(side, f)| (*side, coloured(f, &colour))).collect();
        let mut keys: BTreeMap<&Var, Vec<(&(bool, Formula), usize)>> = BTreeMap::new();
        for (i, vs) in orders.iter().enumerate() {
            for (pos, v) in vs.iter().enumerate() {
                keys.entry(v).or_default().push((&sigs[i], pos));
            }
        }
        for k in keys.values_mut() {
            k.sort();
        }
        let mut ranked: Vec<&Vec<(&(bool, Formula), usize)>> = keys.values().collect();
        ranked.sort();
        ranked.dedup();
        let next: BTreeMap<Var, usize> = keys.iter().map(|(v, k)| ((*v).clone(), ranked.binary_search(&k).expect("ranked"))).collect();
        let n = ranked.len();
        if n <= classes {
            let mut sorted: Vec<((bool, Formula), &Formula)> = sigs.into_iter().zip(items.iter().map(|(_, f)| *f)).collect();
            sorted.sort_by(|a, b| a.0.cmp(&b.0));
            let mut groups: Vec<Vec<&Formula>> = Vec::new();
            for (i, (sig, f)) in sorted.iter().enumerate() {
                if i > 0 && sorted[i - 1].0 == *sig {
                    groups.last_mut().expect("group").push(f);
                } else {
                    groups.push(vec![f]);
                }
            }
            return groups;
        }
        classes = n;
        colour = next;
    }
}

/// Equal for two sequents exactly when they differ by a bijective renaming
/// of free variables.
pub fn canonicalize(seq: &Sequent) -> Canonical {
    let groups = invariant_groups(seq);
    let mut best: Option<((Vec<Formula>, Vec<Formula>), Substitution)> = None;
    let mut order: Vec<&Formula> = Vec::new();
    permute_groups(&groups, 0, &mut order, &mut |order| {
        let mut vars = Vec::new();
        for f in order {
            vars_in_order(f, &mut Vec::new(), &mut vars);
        }
        let th: Substitution = vars.into_iter().enumerate().map(|(i, v)| (v, Term::var(&format!("_v{i}")))).collect();
        let renamed = th.apply_sequent(seq);
        let key = (renamed.left.into_iter().collect::<Vec<_>>(), renamed.right.into_iter().collect::<Vec<_>>());
        if best.as_ref().is_none_or(|(k, _)| key < *k) {
            best = Some((key, th));
        }
    });
    let ((left, right), renaming) = best.expect("at least one ordering");
    Canonical { sequent: Sequent::new(left, right), renaming }
}

fn permute_groups<'a>(groups: &[Vec<&'a Formula>], g: usize, order: &mut Vec<&'a Formula>, visit: &mut dyn FnMut(&[&'a Formula])) {
    let Some(group) = groups.get(g) else {
        visit(order);
        return;
    };
    let mut idx: Vec<usize> = (0..group.len()).collect();
    loop {
        let before = order.len();
        order.extend(idx.iter().map(|&i| group[i]));
        permute_groups(groups, g + 1, order, visit);
        order.truncate(before);
        if !next_permutation(&mut idx) {
            break;
        }
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else { return false };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("pivot");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Equations and inductive atoms on the left, inductive atoms on the right,
/// every term built from variables, 0 and s.
pub fn check_fragment(defs: &IndDefSet, seq: &Sequent) -> Result<(), Formula> {
    let terms_ok = |ts: &[&Term]| ts.iter().all(|t| decompose(t).is_ok());
    for f in &seq.left {
        let ok = match f {
            Formula::Eq(a, b) => terms_ok(&[a, b]),
            Formula::Pred(p, args) => defs.is_inductive(p) && terms_ok(&args.iter().collect::<Vec<_>>()),
            _ => false,
        };
        if !ok {
            return Err(f.clone());
        }
    }
    for f in &seq.right {
        let ok = matches!(f, Formula::Pred(p, args) if defs.is_inductive(p) && terms_ok(&args.iter().collect::<Vec<_>>()));
        if !ok {
            return Err(f.clone());
        }
    }
    Ok(())
}

/// One way of continuing at an open goal: a chain of rule applications whose
/// last premises become new goals, or which ends in a bud.
struct Move {
    /// Rules applied along a single-premise chain, each with its conclusion.
    chain: Vec<(Sequent, RuleInstance)>,
    /// Premises of the last rule in the chain, or the bud.
    end: MoveEnd,
}

enum MoveEnd {
    Premises(Vec<Sequent>),
    Bud { sequent: Sequent, companion: NodeAddr },
}

impl Move {
    fn inner(&self) -> usize {
        self.chain.len()
    }
}

/// Goal, equation sides and direction of one equality step.
type RewriteKey = (Sequent, Term, Term, bool);

struct Searcher<'a, 'o> {
    defs: &'a IndDefSet,
    budget: SearchBudget,
    stats: SearchStats,
    tree: DerivationTree,
    companions: BTreeMap<NodeAddr, NodeAddr>,
    /// Goals in context known to have no closure within the stored budget.
    dead: HashMap<Vec<Sequent>, usize>,
    found: Option<PreProof>,
    canon_cache: HashMap<Sequent, Sequent>,
    rewrite_cache: HashMap<RewriteKey, Option<(RuleInstance, Sequent)>>,
    observer: &'o mut dyn FnMut(SearchEvent<'_>),
}

impl Searcher<'_, '_> {
    fn ancestors(&self, addr: &NodeAddr) -> Vec<NodeAddr> {
        let mut out: Vec<NodeAddr> = addr.ancestors().filter(|a| a != addr).collect();
        out.sort_by_key(|a| std::cmp::Reverse(a.len()));
        out
    }

    fn fits(&self, s: &Sequent) -> bool {
        s.max_term_height() <= self.budget.max_term_height
    }

    fn canonical(&mut self, s: &Sequent) -> Sequent {
        if let Some(c) = self.canon_cache.get(s) {
            return c.clone();
        }
        self.stats.sequents_canonicalized += 1;
        let c = canonicalize(s).sequent;
        self.canon_cache.insert(s.clone(), c.clone());
        c
    }

    /// The equality step rewriting `l` into `r` (or back), if it changes
    /// anything.
    fn rewrite(&mut self, goal: &Sequent, l: &Term, r: &Term, forward: bool) -> Option<(RuleInstance, Sequent)> {
        let key = (goal.clone(), l.clone(), r.clone(), forward);
        if let Some(hit) = self.rewrite_cache.get(&key) {
            return hit.clone();
        }
        let inst = RuleInstance::EqLa(directional_template(goal, l, r, forward));
        let out = premises_of(System::ClkidA, self.defs, goal, &inst).ok().and_then(|mut prems| {
            let premise = prems.pop()?;
            (prems.is_empty() && premise != *goal).then_some((inst, premise))
        });
        self.rewrite_cache.insert(key, out.clone());
        out
    }

    /// Two consecutive equality steps are explored in one order only when
    /// swapping them reaches the same sequent.
    fn commutes_back(&mut self, addr: &NodeAddr, l: &Term, r: &Term, forward: bool, premise: &Sequent) -> bool {
        let Some(parent) = addr.parent() else { return false };
        let node = self.tree.nodes[&parent].clone();
        let Some(RuleInstance::EqLa(prev)) = node.step.rule() else { return false };
        let goal = self.tree.nodes[addr].sequent.clone();
        let Some(prev_forward) =
            [true, false].into_iter().find(|&d| self.rewrite(&node.sequent, &prev.lhs, &prev.rhs, d).is_some_and(|(_, s)| s == goal))
        else {
            return false;
        };
        if (l, r, forward) >= (&prev.lhs, &prev.rhs, prev_forward) {
            return false;
        }
        let eq = Formula::Eq(l.clone(), r.clone());
        if !node.sequent.left.contains(&eq) {
            return false;
        }
        let Some((_, mid)) = self.rewrite(&node.sequent, l, r, forward) else { return false };
        if !mid.left.contains(&prev.equation()) {
            return false;
        }
        self.rewrite(&mid, &prev.lhs, &prev.rhs, prev_forward).is_some_and(|(_, s)| s == *premise)
    }

    fn moves(&mut self, addr: &NodeAddr, goal: &Sequent) -> Vec<Move> {
        let mut closing = Vec::new();
        let mut buds = Vec::new();
        let mut rest = Vec::new();
        let ancestors = self.ancestors(addr);

        let canon = self.canonical(goal);
        let mut repeats = false;
        // A cycle without a case split has no progress point.
        let mut case_on_cycle = false;
        for a in &ancestors {
            let anc = self.tree.nodes[a].sequent.clone();
            repeats |= self.canonical(&anc) == canon;
            case_on_cycle |= matches!(self.tree.nodes[a].step.rule(), Some(RuleInstance::Case { .. }));
            if !case_on_cycle {
                continue;
            }
            let mut seen = Vec::new();
            for th in match_sequent(&anc, goal, false) {
                let th: Substitution = th.normalized();
                if seen.contains(&th) {
                    continue;
                }
                seen.push(th.clone());
                self.stats.buds_attempted += 1;
                let image = th.apply_sequent(&anc);
                let mut chain = Vec::new();
                if image != *goal {
                    chain.push((goal.clone(), RuleInstance::Weak { premise: image.clone() }));
                }
                if !th.is_identity() {
                    chain.push((image.clone(), RuleInstance::Subst { theta: th.clone(), premise: anc.clone() }));
                }
                buds.push(Move { chain, end: MoveEnd::Bud { sequent: anc.clone(), companion: a.clone() } });
            }
        }
        if repeats {
            return buds;
        }

        for f in &goal.right {
            let Formula::Pred(p, args) = f else { continue };
            for prod in self.defs.productions_of(p) {
                let mut th = Substitution::new();
                let params = prod.params.iter().cloned().collect();
                if prod.conclusion.len() != args.len()
                    || !prod.conclusion.iter().zip(args).all(|(pt, t)| match_term(pt, t, &params, &mut th))
                {
                    continue;
                }
                if prod.premises().any(|q| q.fv().iter().any(|v| th.get(v).is_none())) {
                    continue;
                }
                let inst = RuleInstance::Intro { pred: p.clone(), production: prod.name.clone(), inst: th, keep: false };
                if let Ok(prems) = premises_of(System::ClkidA, self.defs, goal, &inst) {
                    let m = Move { chain: vec![(goal.clone(), inst)], end: MoveEnd::Premises(prems) };
                    if matches!(&m.end, MoveEnd::Premises(ps) if ps.is_empty()) {
                        closing.push(m);
                    } else {
                        rest.push(m);
                    }
                }
            }
        }

        if self.budget.strategy == Strategy::Exhaustive && goal.left.intersection(&goal.right).next().is_some() {
            closing.push(Move { chain: vec![(goal.clone(), RuleInstance::Axiom)], end: MoveEnd::Premises(vec![]) });
        }

        for f in &goal.left {
            let Formula::Eq(l, r) = f else { continue };
            if l == r {
                continue;
            }
            for forward in [true, false] {
                let (from, to) = if forward { (l, r) } else { (r, l) };
                let eliminates = from.as_var().is_some_and(|v| !to.has_var(v));
                if self.budget.strategy == Strategy::Focused && !eliminates {
                    continue;
                }
                let Some((inst, premise)) = self.rewrite(goal, l, r, forward) else { continue };
                if self.commutes_back(addr, l, r, forward, &premise) {
                    continue;
                }
                rest.push(Move { chain: vec![(goal.clone(), inst)], end: MoveEnd::Premises(vec![premise]) });
            }
        }

        for f in &goal.left {
            if !self.defs.is_inductive_atom(f) {
                continue;
            }
            let mut supply = FreshSupply::avoiding(goal.fv());
            let Ok(branches) = case_distinctions(self.defs, goal, f, &mut supply) else { continue };
            let inst = RuleInstance::Case { principal: f.clone(), fresh: branches.iter().map(|b| b.fresh.clone()).collect(), keep: false };
            if let Ok(prems) = premises_of(System::ClkidA, self.defs, goal, &inst) {
                rest.push(Move { chain: vec![(goal.clone(), inst)], end: MoveEnd::Premises(prems) });
            }
        }

        if self.budget.strategy == Strategy::Exhaustive {
            for f in goal.formulas() {
                let mut premise = goal.clone();
                premise.left.remove(f);
                premise.right.remove(f);
                rest.push(Move {
                    chain: vec![(goal.clone(), RuleInstance::Weak { premise: premise.clone() })],
                    end: MoveEnd::Premises(vec![premise]),
                });
            }
            for (v, t) in generalizations(goal) {
                let th = Substitution::single(v.clone(), t.clone());
                let premise = abstract_term(goal, &t, &v);
                rest.push(Move {
                    chain: vec![(goal.clone(), RuleInstance::Subst { theta: th, premise: premise.clone() })],
                    end: MoveEnd::Premises(vec![premise]),
                });
            }
        }

        closing.into_iter().chain(buds).chain(rest).collect()
    }

    fn check_candidate(&mut self) -> bool {
        let proof = PreProof { tree: self.tree.clone(), companions: self.companions.clone() };
        self.stats.candidates += 1;
        (self.observer)(SearchEvent::Candidate(&proof));
        match gtc_closure(&proof, self.defs) {
            Ok(v) if v.is_accepted() => {
                self.found = Some(proof);
                true
            }
            _ => {
                self.stats.gtc_rejections += 1;
                false
            }
        }
    }

    /// Closes `goals` left to right within `budget` inner nodes, calling `k`
    /// with the nodes used for every closure until it returns true.
    fn solve_all(&mut self, goals: &[NodeAddr], budget: usize, k: &mut dyn FnMut(&mut Self, usize) -> bool) -> bool {
        let Some((first, rest)) = goals.split_first() else { return k(self, 0) };
        self.solve_goal(first, budget, &mut |s, used| s.solve_all(rest, budget - used, &mut |s, more| k(s, used + more)))
    }

    fn solve_goal(&mut self, addr: &NodeAddr, budget: usize, k: &mut dyn FnMut(&mut Self, usize) -> bool) -> bool {
        let goal = self.tree.nodes[addr].sequent.clone();
        let key: Vec<Sequent> = addr.ancestors().chain([addr.clone()]).map(|a| self.tree.nodes[&a].sequent.clone()).collect();
        if self.dead.get(&key).is_some_and(|&b| b >= budget) {
            return false;
        }
        let mut closed = false;
        for m in self.moves(addr, &goal) {
            if m.inner() > budget {
                continue;
            }
            let leaf_depth = match &m.end {
                _ if m.chain.is_empty() => addr.len(),
                MoveEnd::Premises(ps) if ps.is_empty() => addr.len() + m.chain.len() - 1,
                _ => addr.len() + m.chain.len(),
            };
            if leaf_depth > self.budget.max_branch_depth {
                continue;
            }
            if let MoveEnd::Premises(ps) = &m.end {
                if !ps.iter().all(|p| self.fits(p)) {
                    continue;
                }
            }
            self.stats.nodes_expanded += 1;
            let placed = self.place(addr, &m);
            let cost = m.inner();
            let done = self.solve_all(&placed.goals.clone(), budget - cost, &mut |s, used| {
                closed = true;
                k(s, used + cost)
            });
            if done {
                return true;
            }
            self.unplace(addr, placed);
        }
        if !closed {
            let b = self.dead.entry(key).or_insert(0);
            *b = (*b).max(budget);
        }
        false
    }

    fn place(&mut self, addr: &NodeAddr, m: &Move) -> Placed {
        let original = self.tree.nodes[addr].clone();
        let mut cur = addr.clone();
        let mut written = Vec::new();
        for (k, (concl, inst)) in m.chain.iter().enumerate() {
            if k > 0 {
                cur = cur.child(0);
            }
            written.push((cur.clone(), Node { sequent: concl.clone(), step: Step::Rule(inst.clone()) }));
        }
        let mut goals = Vec::new();
        let mut bud = None;
        match &m.end {
            MoveEnd::Premises(ps) => {
                for (i, p) in ps.iter().enumerate() {
                    let a = cur.child(i as u32);
                    written.push((a.clone(), Node { sequent: p.clone(), step: Step::Bud }));
                    goals.push(a);
                }
            }
            MoveEnd::Bud { sequent, companion } => {
                let a = if m.chain.is_empty() { cur } else { cur.child(0) };
                written.push((a.clone(), Node { sequent: sequent.clone(), step: Step::Bud }));
                self.companions.insert(a.clone(), companion.clone());
                bud = Some(a);
            }
        }
        for (a, n) in &written {
            self.tree.nodes.insert(a.clone(), n.clone());
        }
        for (a, _) in written.iter().filter(|(a, _)| a != addr) {
            (self.observer)(SearchEvent::Generated(a, &self.tree));
        }
        Placed { goals, written: written.into_iter().map(|(a, _)| a).collect(), bud, original }
    }

    fn unplace(&mut self, addr: &NodeAddr, placed: Placed) {
        for a in placed.written {
            self.tree.nodes.remove(&a);
        }
        if let Some(b) = placed.bud {
            self.companions.remove(&b);
        }
        self.tree.nodes.insert(addr.clone(), placed.original);
    }
}

struct Placed {
    goals: Vec<NodeAddr>,
    written: Vec<NodeAddr>,
    bud: Option<NodeAddr>,
    original: Node,
}

/// Candidate generalizations for the exhaustive strategy: each non-variable
/// subterm, replaced everywhere by a fresh variable.
fn generalizations(goal: &Sequent) -> Vec<(Var, Term)> {
    fn subterms(t: &Term, out: &mut Vec<Term>) {
        if let Term::App(_, args) = t {
            if !out.contains(t) {
                out.push(t.clone());
            }
            args.iter().for_each(|a| subterms(a, out));
        }
    }
    let mut ts = Vec::new();
    for f in goal.formulas() {
        match f {
            Formula::Eq(a, b) => {
                subterms(a, &mut ts);
                subterms(b, &mut ts);
            }
            Formula::Pred(_, args) => args.iter().for_each(|a| subterms(a, &mut ts)),
            _ => {}
        }
    }
    let mut supply = FreshSupply::avoiding(goal.fv());
    let v = supply.fresh();
    ts.into_iter().map(|t| (v.clone(), t)).collect()
}

fn abstract_term(goal: &Sequent, t: &Term, v: &Var) -> Sequent {
    let abs = |f: &Formula| crate::rules::rewrite::abstract_all(f, t, v);
    Sequent::new(goal.left.iter().map(abs), goal.right.iter().map(abs))
}

/// The branch of a partial search tree leading to `addr`: its nodes and
/// their children.
pub fn branch_view(tree: &DerivationTree, addr: &NodeAddr) -> PreProof {
    let mut view = PreProof::default();
    for a in addr.ancestors().chain([addr.clone()]) {
        for c in tree.children(&a).into_iter().chain([a]) {
            if let Some(n) = tree.get(&c) {
                view.tree.nodes.insert(c, n.clone());
            }
        }
    }
    view
}

/// Searches for a cut-free cyclic proof of `goal`, reporting every placed
/// sequent and every closed candidate to `observer`.
pub fn search_with(
    defs: &IndDefSet,
    goal: &Sequent,
    budget: SearchBudget,
    observer: &mut dyn FnMut(SearchEvent<'_>),
) -> Result<SearchOutcome, SearchError> {
    if budget.max_nodes == 0 {
        return Err(SearchError::ZeroBudget("max_nodes"));
    }
    if budget.max_branch_depth == 0 {
        return Err(SearchError::ZeroBudget("max_branch_depth"));
    }
    if budget.strategy == Strategy::Focused {
        check_fragment(defs, goal).map_err(SearchError::GoalShape)?;
    }
    let root = NodeAddr::root();
    let mut s = Searcher {
        defs,
        budget,
        stats: SearchStats::default(),
        tree: DerivationTree::default(),
        companions: BTreeMap::new(),
        dead: HashMap::new(),
        found: None,
        canon_cache: HashMap::new(),
        rewrite_cache: HashMap::new(),
        observer,
    };
    if !s.fits(goal) {
        return Ok(SearchOutcome::Exhausted(s.stats));
    }
    s.tree.nodes.insert(root.clone(), Node { sequent: goal.clone(), step: Step::Bud });
    (s.observer)(SearchEvent::Generated(&root, &s.tree));
    s.solve_all(&[root], budget.max_nodes, &mut |s, _| s.check_candidate());
    Ok(match s.found.take() {
        Some(proof) => SearchOutcome::Found { proof, stats: s.stats },
        None => SearchOutcome::Exhausted(s.stats),
    })
}

pub fn search(defs: &IndDefSet, goal: &Sequent, budget: SearchBudget) -> Result<SearchOutcome, SearchError> {
    search_with(defs, goal, budget, &mut |_| {})
}
