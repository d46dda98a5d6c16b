//! Serializable reports for each front-end command, and the operations that
//! build them.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::congruence::{DeltaSet, OffsetGraph};
use crate::indexing::{IndexPreds, IndexValue, SequentSets};
use crate::normalize::cycle_normalize;
use crate::prooftree::script::{print_script, Script, ScriptError};
use crate::prooftree::{NodeAddr, PreProof, Step};
use crate::rules::{RuleSpec, System};
use crate::search::{search, SearchBudget, SearchError, SearchStats};
use crate::semantics::{counterexample, lfp_holds, SemanticsError};
use crate::syntax::{parse_formula, parse_sequent, Formula, IndDefSet, NonSuccessorTerm, ParseError, Sequent, Term};
use crate::trace::{gtc_closure_any, gtc_oracle, GtcVerdict, OracleVerdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum GtcMode {
    #[default]
    Closure,
    /// Bounded walk enumeration with the given bound.
    Oracle(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("unknown trace-condition mode `{0}` (expected closure or oracle:N)")]
pub struct UnknownGtcMode(String);

impl FromStr for GtcMode {
    type Err = UnknownGtcMode;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "closure" {
            return Ok(GtcMode::Closure);
        }
        s.strip_prefix("oracle:")
            .and_then(|n| n.parse().ok())
            .filter(|&n: &usize| n > 0)
            .map(GtcMode::Oracle)
            .ok_or_else(|| UnknownGtcMode(s.to_string()))
    }
}

impl fmt::Display for GtcMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GtcMode::Closure => f.write_str("closure"),
            GtcMode::Oracle(n) => write!(f, "oracle:{n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum GtcReport {
    Accepted,
    Rejected {
        witness: Vec<NodeAddr>,
    },
    Inconclusive,
    /// Not run because the pre-proof is locally invalid.
    Skipped,
}

impl GtcReport {
    fn word(&self) -> &'static str {
        match self {
            GtcReport::Accepted => "accepted",
            GtcReport::Rejected { .. } => "rejected",
            GtcReport::Inconclusive => "inconclusive",
            GtcReport::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ViolationReport {
    pub addr: NodeAddr,
    pub kind: &'static str,
    pub message: String,
}

/// One line of the per-node rule audit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodeAudit {
    pub addr: NodeAddr,
    pub sequent: String,
    pub rule: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub companion: Option<NodeAddr>,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub proof: String,
    pub system: System,
    pub gtc_mode: String,
    pub normalized: bool,
    pub nodes: usize,
    pub inner_nodes: usize,
    pub buds: usize,
    pub cuts: usize,
    pub cycle_normal: bool,
    pub violations: Vec<ViolationReport>,
    pub gtc: GtcReport,
    pub audit: Vec<NodeAudit>,
    pub ok: bool,
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            return write!(f, "proof OK (GTC: {})", self.gtc.word());
        }
        if self.violations.is_empty() {
            write!(f, "proof REJECTED (GTC: {})", self.gtc.word())?;
        } else {
            write!(f, "proof INVALID ({} violation(s), GTC: {})", self.violations.len(), self.gtc.word())?;
        }
        for v in &self.violations {
            write!(f, "\n  node \"{}\" (height {}): {}", v.addr, v.addr.len() + 1, v.message)?;
        }
        if let GtcReport::Rejected { witness } = &self.gtc {
            let w: Vec<String> = witness.iter().map(|a| format!("\"{a}\"")).collect();
            write!(f, "\n  no progressing trace along the cycle {}", w.join(" -> "))?;
        }
        Ok(())
    }
}

/// Local validation, cycle normality and the global trace condition.
pub fn check_proof(name: &str, p: &PreProof, defs: &IndDefSet, system: System, mode: GtcMode, normalize: bool) -> CheckReport {
    let normalized = normalize && !p.is_cycle_normal();
    let p = if normalized { cycle_normalize(p) } else { p.clone() };
    let violations: Vec<ViolationReport> = p
        .validate(system, defs)
        .err()
        .unwrap_or_default()
        .into_iter()
        .map(|v| ViolationReport { addr: v.addr.clone(), kind: v.kind.tag(), message: v.kind.to_string() })
        .collect();
    let gtc = if !violations.is_empty() {
        GtcReport::Skipped
    } else {
        match mode {
            GtcMode::Closure => match gtc_closure_any(&p, defs).0 {
                GtcVerdict::Accepted => GtcReport::Accepted,
                GtcVerdict::Rejected { witness } => GtcReport::Rejected { witness },
            },
            GtcMode::Oracle(n) => match gtc_oracle(&p, defs, n) {
                OracleVerdict::Accepted => GtcReport::Accepted,
                OracleVerdict::Rejected { witness } => GtcReport::Rejected { witness },
                OracleVerdict::Inconclusive => GtcReport::Inconclusive,
            },
        }
    };
    let audit = p
        .tree
        .nodes
        .iter()
        .map(|(a, n)| NodeAudit {
            addr: a.clone(),
            sequent: n.sequent.to_string(),
            rule: match &n.step {
                Step::Rule(inst) => RuleSpec::of(inst).to_string(),
                Step::Bud => "bud".to_string(),
                Step::Failed(spec, _) => spec.clone(),
            },
            companion: p.companions.get(a).cloned(),
            ok: !violations.iter().any(|v| &v.addr == a),
        })
        .collect();
    CheckReport {
        proof: name.to_string(),
        system,
        gtc_mode: mode.to_string(),
        normalized,
        nodes: p.tree.len(),
        inner_nodes: p.inner_count(),
        buds: p.buds().count(),
        cuts: p.tree.nodes.values().filter(|n| n.step.rule().is_some_and(|r| r.is_cut())).count(),
        cycle_normal: p.is_cycle_normal(),
        ok: violations.is_empty() && gtc == GtcReport::Accepted,
        violations,
        gtc,
        audit,
    }
}

/// A parsed proof file.
#[derive(Clone, Debug)]
pub struct LoadedProof {
    pub name: String,
    pub proof: PreProof,
    pub defs: IndDefSet,
    pub local_defs: IndDefSet,
}

/// Parses a proof script. Without explicit `defs`, a script that declares its
/// own predicates starts from nothing and any other starts from the bundled
/// addition predicates.
pub fn load_proof(text: &str, defs: Option<&IndDefSet>, system: System) -> Result<LoadedProof, ScriptError> {
    let base = match defs {
        Some(d) => d.clone(),
        None if text.lines().any(|l| l.trim_start().starts_with("inductive")) => IndDefSet::default(),
        None => crate::fixtures::add_defs(),
    };
    let script = Script::parse(text, &base)?;
    let proof = script.to_preproof(system);
    Ok(LoadedProof { name: script.name, proof, defs: script.defs, local_defs: script.local_defs })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalizeReport {
    pub proof: String,
    pub was_cycle_normal: bool,
    pub nodes_before: usize,
    pub nodes_after: usize,
    pub unfold_depth_checked: usize,
    pub unfoldings_agree: bool,
    #[serde(skip)]
    pub script: String,
}

/// Cycle-normalizes and prints the result as a script.
pub fn normalize_proof(loaded: &LoadedProof) -> NormalizeReport {
    const DEPTH: usize = 50;
    let p = &loaded.proof;
    let q = cycle_normalize(p);
    let local = (!loaded.local_defs.productions.is_empty()).then_some(&loaded.local_defs);
    NormalizeReport {
        proof: loaded.name.clone(),
        was_cycle_normal: p.is_cycle_normal(),
        nodes_before: p.tree.len(),
        nodes_after: q.tree.len(),
        unfold_depth_checked: DEPTH,
        unfoldings_agree: p.unfold(DEPTH).same_as(p, &q.unfold(DEPTH), &q),
        script: print_script(&loaded.name, local, &q),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub goal: String,
    pub budget: SearchBudget,
    pub outcome: &'static str,
    pub stats: SearchStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proof: Option<String>,
}

impl fmt::Display for SearchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = &self.stats;
        writeln!(
            f,
            "{} under strategy {}, budget N={}, H={}, D={}",
            self.outcome.to_uppercase(),
            self.budget.strategy,
            self.budget.max_nodes,
            self.budget.max_term_height,
            self.budget.max_branch_depth
        )?;
        write!(
            f,
            "stats: {} expanded, {} canonicalized, {} buds attempted, {} candidates, {} trace rejections",
            s.nodes_expanded, s.sequents_canonicalized, s.buds_attempted, s.candidates, s.gtc_rejections
        )?;
        if let Some(p) = &self.proof {
            write!(f, "\n{p}")?;
        }
        Ok(())
    }
}

pub fn search_goal(defs: &IndDefSet, goal: &Sequent, budget: SearchBudget) -> Result<SearchReport, SearchError> {
    let out = search(defs, goal, budget)?;
    Ok(SearchReport {
        goal: goal.to_string(),
        budget,
        outcome: if out.proof().is_some() { "found" } else { "exhausted" },
        stats: *out.stats(),
        proof: out.proof().map(|p| print_script("found", None, p)),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AtomIndex {
    pub atom: String,
    pub index: IndexValue,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexReport {
    pub node: NodeAddr,
    pub sequent: String,
    pub sets: SequentSets,
    pub index_sequent: bool,
    pub switching_point: bool,
    pub atoms: Vec<AtomIndex>,
}

impl fmt::Display for IndexReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "node \"{}\": {}", self.node, self.sequent)?;
        for a in &self.atoms {
            writeln!(f, "  index of {} = {}", a.atom, a.index)?;
        }
        let show = |s: &std::collections::BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>().join(", ");
        writeln!(
            f,
            "  A = {{{}}}  BC = {{{}}}  B1 = {{{}}}  C = {{{}}}",
            show(&self.sets.a),
            show(&self.sets.bc),
            show(&self.sets.b1),
            show(&self.sets.c)
        )?;
        write!(f, "  index sequent: {}; switching point: {}", self.index_sequent, self.switching_point)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum IndexQueryError {
    #[error("no node \"{0}\" in the proof")]
    UnknownNode(NodeAddr),
    #[error("the node has {0} indexed atom(s); atom {1} does not exist")]
    UnknownAtom(usize, usize),
    #[error(transparent)]
    NonSuccessor(#[from] NonSuccessorTerm),
    #[error(transparent)]
    Index(#[from] crate::indexing::IndexError),
}

/// Index diagnostics at one node, for every left atom or only the `atom`-th.
pub fn index_at(cfg: &IndexPreds, p: &PreProof, node: &NodeAddr, atom: Option<usize>) -> Result<IndexReport, IndexQueryError> {
    let n = p.tree.get(node).ok_or_else(|| IndexQueryError::UnknownNode(node.clone()))?;
    let seq = &n.sequent;
    let lefts: Vec<&Formula> = seq.left.iter().filter(|f| f.pred_name() == Some(&cfg.left)).collect();
    let chosen: Vec<&Formula> = match atom {
        None => lefts.clone(),
        Some(k) => vec![*lefts.get(k).ok_or(IndexQueryError::UnknownAtom(lefts.len(), k))?],
    };
    let atoms = chosen
        .into_iter()
        .map(|f| Ok(AtomIndex { atom: f.to_string(), index: cfg.index_of(seq, f)? }))
        .collect::<Result<_, IndexQueryError>>()?;
    Ok(IndexReport {
        node: node.clone(),
        sequent: seq.to_string(),
        sets: cfg.sequent_sets(seq),
        index_sequent: cfg.is_index_sequent(seq)?,
        switching_point: cfg.is_switching_point(p, node),
        atoms,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EqReport {
    pub gamma: Vec<String>,
    pub left: String,
    pub right: String,
    pub related: bool,
    pub delta: DeltaSet,
    pub equiv: bool,
    pub cap_hit: bool,
}

impl fmt::Display for EqReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let delta = match self.delta {
            DeltaSet::Unrelated => "unrelated".to_string(),
            DeltaSet::Unique(d) => d.to_string(),
            DeltaSet::Ambiguous => "ambiguous".to_string(),
        };
        write!(
            f,
            "{} ~ {}: {}; offset: {}; {} = {} provable: {}",
            self.left, self.right, self.related, delta, self.left, self.right, self.equiv
        )
    }
}

pub fn eq_query(gamma: &[Formula], t1: &Term, t2: &Term) -> Result<EqReport, NonSuccessorTerm> {
    let g = OffsetGraph::build(gamma)?;
    let eq = g.equiv_detailed(t1, t2)?;
    Ok(EqReport {
        gamma: gamma.iter().map(Formula::to_string).collect(),
        left: t1.to_string(),
        right: t2.to_string(),
        related: g.related(t1, t2)?,
        delta: g.delta_set(t1, t2)?,
        equiv: eq.holds,
        cap_hit: eq.cap_hit,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EvalReport {
    pub input: String,
    pub kind: &'static str,
    pub bound: u64,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<BTreeMap<String, u64>>,
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.input, if self.holds { "true" } else { "false" })?;
        if self.kind == "sequent" {
            write!(f, " (values up to {})", self.bound)?;
        }
        if let Some(cx) = &self.counterexample {
            let parts: Vec<String> = cx.iter().map(|(v, n)| format!("{v} = {n}")).collect();
            write!(f, "; counterexample: {}", parts.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// Evaluates a ground atom, or a sequent under all assignments up to `bound`.
pub fn eval_input(defs: &IndDefSet, text: &str, bound: u64) -> Result<EvalReport, EvalError> {
    if text.contains("|-") {
        let seq = parse_sequent(text, defs)?;
        let cx = counterexample(defs, &seq, bound)?;
        return Ok(EvalReport {
            input: seq.to_string(),
            kind: "sequent",
            bound,
            holds: cx.is_none(),
            counterexample: cx.map(|env| env.into_iter().map(|(v, n)| (v.to_string(), n)).collect()),
        });
    }
    let atom = parse_formula(text, defs)?;
    let rounds = atom.max_term_height() as usize + 2;
    Ok(EvalReport {
        input: atom.to_string(),
        kind: "atom",
        bound,
        holds: lfp_holds(defs, &atom, rounds.max(bound as usize))?,
        counterexample: None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CounterexampleReport {
    pub with_cut: CheckReport,
    pub cut_free: SearchReport,
    pub verdict: String,
}

impl fmt::Display for CounterexampleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.verdict)?;
        let s = &self.cut_free.stats;
        write!(
            f,
            "with-Cut proof: {} nodes, {} cut(s), GTC {}; cut-free search of {}: {} expanded, {} canonicalized, {} buds attempted, {} candidates, {} trace rejections (H={}, D={})",
            self.with_cut.nodes,
            self.with_cut.cuts,
            self.with_cut.gtc.word(),
            self.cut_free.goal,
            s.nodes_expanded,
            s.sequents_canonicalized,
            s.buds_attempted,
            s.candidates,
            s.gtc_rejections,
            self.cut_free.budget.max_term_height,
            self.cut_free.budget.max_branch_depth
        )?;
        if !self.with_cut.ok {
            write!(f, "\n{}", self.with_cut)?;
        }
        Ok(())
    }
}

/// Checks the proof with cut and searches for a cut-free proof of its
/// conclusion.
pub fn counterexample_report(loaded: &LoadedProof, budget: SearchBudget) -> Result<CounterexampleReport, SearchError> {
    let with_cut = check_proof(&loaded.name, &loaded.proof, &loaded.defs, System::Clkid, GtcMode::Closure, false);
    let goal = loaded.proof.root().map(|n| n.sequent.clone()).unwrap_or_default();
    let cut_free = search_goal(&loaded.defs, &goal, budget)?;
    let verdict = format!(
        "with-Cut proof: {}; cut-free search: {} ({}, N={})",
        if with_cut.ok { "OK" } else { "FAILED" },
        cut_free.outcome.to_uppercase(),
        budget.strategy,
        budget.max_nodes
    );
    Ok(CounterexampleReport { with_cut, cut_free, verdict })
}
