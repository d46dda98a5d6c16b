//! Text format for pre-proofs.
//!
//! ```text
//! inductive B(1) { rule s: B(x) => B(s(x)); }     // optional
//! proof NAME {
//!   node "" : B(x) |- by case(B) -> "0";
//!   node "0" : x = s(y), B(y) |- by ...;
//!   node "0.0" : B(x) |- by bud(companion = "");
//! }
//! ```
//!
//! Rules: `axiom`, `weak`, `cut(F)`, `subst` or `subst(x := t, ...)`,
//! `notl`..`impr` with an optional principal formula, `alll(F, t)` and the
//! other quantifier rules (`_` leaves the formula open), `eql(t = u)`,
//! `eqla(t = u)`, `eqr` or `eqr(t)`, `intro(P.rule)` or `intro(P.rule, F)`,
//! `case(P)` or `case(P, F)`. Omitted annotations are reconstructed from the
//! premises.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{DerivationTree, Node, NodeAddr, PreProof, Step};
use crate::rules::{elaborate, Connective, Quantifier, RuleSpec, System};
use crate::syntax::{Formula, IndDefSet, ParseError, Parser, Sequent, Substitution, Sym, Tok};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ScriptError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("node \"{0}\" is defined twice")]
    DuplicateNode(NodeAddr),
    #[error("node \"{addr}\" lists premises {listed} but the script has {actual}")]
    PremiseList { addr: NodeAddr, listed: String, actual: String },
    #[error("the script has no `proof` block")]
    MissingProof,
}

/// What the script says justifies a node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeSpec {
    Rule(RuleSpec),
    Bud(NodeAddr),
}

/// A parsed script before rule elaboration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Script {
    pub name: String,
    /// External definitions merged with inline `inductive` blocks.
    pub defs: IndDefSet,
    /// Definitions declared inline.
    pub local_defs: IndDefSet,
    pub nodes: BTreeMap<NodeAddr, (Sequent, NodeSpec)>,
}

impl Script {
    pub fn parse(text: &str, external: &IndDefSet) -> Result<Script, ScriptError> {
        let mut p = Parser::new(text, external.clone())?;
        p.allow_reserved = true;
        p.declare_ordinary = true;
        let before = p.defs.clone();
        if text_has_inductive(&p) {
            p.prescan_inductives()?;
        }
        while p.at_keyword("inductive") {
            p.inductive_block()?;
        }
        p.declare_ordinary = false;
        let local_defs = difference(&p.defs, &before);
        if !p.at_keyword("proof") {
            return Err(if *p.peek() == Tok::Eof { ScriptError::MissingProof } else { p.unexpected("`proof`").into() });
        }
        p.bump();
        let name = p.ident()?;
        p.expect(&Tok::LBrace)?;
        let mut nodes = BTreeMap::new();
        let mut listed = Vec::new();
        while p.at_keyword("node") {
            p.bump();
            let addr = address(&mut p)?;
            p.expect(&Tok::Colon)?;
            let sequent = p.sequent()?;
            if !p.at_keyword("by") {
                return Err(p.unexpected("`by`").into());
            }
            p.bump();
            let spec = node_spec(&mut p)?;
            if p.eat(&Tok::Arrow) {
                let mut kids = vec![address(&mut p)?];
                while p.eat(&Tok::Comma) {
                    kids.push(address(&mut p)?);
                }
                listed.push((addr.clone(), kids));
            }
            p.expect(&Tok::Semi)?;
            if nodes.insert(addr.clone(), (sequent, spec)).is_some() {
                return Err(ScriptError::DuplicateNode(addr));
            }
        }
        p.expect(&Tok::RBrace)?;
        p.expect_eof()?;
        for (addr, kids) in listed {
            let actual: Vec<NodeAddr> = (0..).map(|i| addr.child(i)).take_while(|c| nodes.contains_key(c)).collect();
            if kids != actual {
                return Err(ScriptError::PremiseList { addr, listed: quote_all(&kids), actual: quote_all(&actual) });
            }
        }
        Ok(Script { name, defs: p.defs, local_defs, nodes })
    }

    /// Elaborates every rule against its premises in the script.
    pub fn to_preproof(&self, system: System) -> PreProof {
        let mut tree = DerivationTree::default();
        let mut companions = BTreeMap::new();
        for (addr, (sequent, spec)) in &self.nodes {
            let step = match spec {
                NodeSpec::Bud(c) => {
                    companions.insert(addr.clone(), c.clone());
                    Step::Bud
                }
                NodeSpec::Rule(rule) => {
                    let premises: Vec<Sequent> =
                        (0..).map(|i| addr.child(i)).map_while(|c| self.nodes.get(&c).map(|(s, _)| s.clone())).collect();
                    match elaborate(system, &self.defs, sequent, rule, &premises) {
                        Ok(inst) => Step::Rule(inst),
                        Err(e) => Step::failed(rule, &e),
                    }
                }
            };
            tree.nodes.insert(addr.clone(), Node { sequent: sequent.clone(), step });
        }
        PreProof { tree, companions }
    }
}

fn text_has_inductive(p: &Parser) -> bool {
    p.at_keyword("inductive")
}

fn difference(after: &IndDefSet, before: &IndDefSet) -> IndDefSet {
    IndDefSet {
        inductive: after.inductive.iter().filter(|(s, _)| !before.is_inductive(s)).cloned().collect(),
        productions: after.productions.iter().filter(|r| !before.is_inductive(&r.pred)).cloned().collect(),
        ..Default::default()
    }
}

fn quote_all(addrs: &[NodeAddr]) -> String {
    let parts: Vec<String> = addrs.iter().map(|a| format!("\"{a}\"")).collect();
    format!("[{}]", parts.join(", "))
}

/// `"0.1"`, `""`, or the unquoted form `0.1`.
fn address(p: &mut Parser) -> Result<NodeAddr, ParseError> {
    match p.peek().clone() {
        Tok::Str(s) => {
            let addr = if s.is_empty() {
                Ok(NodeAddr::root())
            } else {
                s.split('.').map(|d| d.trim().parse::<u32>()).collect::<Result<Vec<u32>, _>>().map(NodeAddr)
            };
            let addr = addr.map_err(|_| p.syntax(format!("bad node address \"{s}\"")))?;
            p.bump();
            Ok(addr)
        }
        Tok::Nat(_) => {
            let mut steps = vec![small(p)?];
            while p.eat(&Tok::Dot) {
                steps.push(small(p)?);
            }
            Ok(NodeAddr(steps))
        }
        _ => Err(p.unexpected("node address")),
    }
}

fn small(p: &mut Parser) -> Result<u32, ParseError> {
    let n = p.nat()?;
    u32::try_from(n).map_err(|_| p.syntax("address component too large"))
}

fn node_spec(p: &mut Parser) -> Result<NodeSpec, ParseError> {
    if p.at_keyword("bud") {
        p.bump();
        p.expect(&Tok::LParen)?;
        if !p.at_keyword("companion") {
            return Err(p.unexpected("`companion`"));
        }
        p.bump();
        p.expect(&Tok::Equals)?;
        let c = address(p)?;
        p.expect(&Tok::RParen)?;
        return Ok(NodeSpec::Bud(c));
    }
    rule_spec(p).map(NodeSpec::Rule)
}

fn open(p: &mut Parser) -> bool {
    p.eat(&Tok::LParen)
}

fn optional_formula(p: &mut Parser) -> Result<Option<Formula>, ParseError> {
    if p.at_keyword("_") {
        p.bump();
        Ok(None)
    } else {
        p.formula().map(Some)
    }
}

fn rule_spec(p: &mut Parser) -> Result<RuleSpec, ParseError> {
    let name = p.ident()?;
    let conn = Connective::ALL.into_iter().find(|c| c.keyword() == name);
    let quant = [Quantifier::AllL, Quantifier::AllR, Quantifier::ExL, Quantifier::ExR].into_iter().find(|q| q.keyword() == name);
    let spec = match name.as_str() {
        "axiom" => RuleSpec::Axiom,
        "weak" => RuleSpec::Weak,
        "cut" => {
            p.expect(&Tok::LParen)?;
            let f = p.formula()?;
            p.expect(&Tok::RParen)?;
            RuleSpec::Cut(f)
        }
        "subst" => {
            if !open(p) {
                return Ok(RuleSpec::Subst(None));
            }
            let mut theta = Substitution::new();
            if *p.peek() != Tok::RParen {
                loop {
                    let v = p.var_name()?;
                    p.expect(&Tok::Assign)?;
                    let t = p.term()?;
                    if theta.insert(v.clone(), t).is_some() {
                        return Err(p.syntax(format!("variable `{v}` bound twice")));
                    }
                    if !p.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            p.expect(&Tok::RParen)?;
            RuleSpec::Subst(Some(theta))
        }
        "eql" | "eqla" => {
            let eq = if open(p) {
                let f = p.formula()?;
                if !matches!(f, Formula::Eq(..)) {
                    return Err(p.syntax("expected an equation"));
                }
                p.expect(&Tok::RParen)?;
                Some(f)
            } else {
                None
            };
            if name == "eql" {
                RuleSpec::EqL(eq)
            } else {
                RuleSpec::EqLa(eq)
            }
        }
        "eqr" => {
            if open(p) {
                let t = p.term()?;
                p.expect(&Tok::RParen)?;
                RuleSpec::EqR(Some(t))
            } else {
                RuleSpec::EqR(None)
            }
        }
        "intro" | "case" => {
            p.expect(&Tok::LParen)?;
            let pred = Sym::new(&p.ident()?);
            let rule = if name == "intro" {
                p.expect(&Tok::Dot)?;
                Some(p.ident()?)
            } else {
                None
            };
            let principal = if p.eat(&Tok::Comma) { Some(p.formula()?) } else { None };
            p.expect(&Tok::RParen)?;
            match rule {
                Some(r) => RuleSpec::Intro(pred, r, principal),
                None => RuleSpec::Case(pred, principal),
            }
        }
        _ if conn.is_some() => {
            let principal = if open(p) {
                let f = p.formula()?;
                p.expect(&Tok::RParen)?;
                Some(f)
            } else {
                None
            };
            RuleSpec::Logical(conn.expect("checked"), principal)
        }
        _ if quant.is_some() => {
            let (mut principal, mut term) = (None, None);
            if open(p) {
                principal = optional_formula(p)?;
                if p.eat(&Tok::Comma) {
                    term = Some(p.term()?);
                }
                p.expect(&Tok::RParen)?;
            }
            RuleSpec::Quant(quant.expect("checked"), principal, term)
        }
        other => return Err(p.syntax(format!("unknown rule `{other}`"))),
    };
    Ok(spec)
}

/// Prints a pre-proof in the script format; `defs` are emitted inline.
pub fn print_script(name: &str, defs: Option<&IndDefSet>, proof: &PreProof) -> String {
    let mut out = String::new();
    if let Some(d) = defs {
        let _ = writeln!(out, "{d}");
    }
    let _ = writeln!(out, "proof {name} {{");
    for (addr, node) in &proof.tree.nodes {
        let rule = match &node.step {
            Step::Rule(inst) => RuleSpec::of(inst).to_string(),
            Step::Bud => {
                let c = proof.companions.get(addr).map(ToString::to_string).unwrap_or_default();
                format!("bud(companion = \"{c}\")")
            }
            Step::Failed(spec, _) => spec.clone(),
        };
        let kids = proof.tree.children(addr);
        let arrow = if kids.is_empty() || node.is_bud() {
            String::new()
        } else {
            format!(" -> {}", kids.iter().map(|k| format!("\"{k}\"")).collect::<Vec<_>>().join(", "))
        };
        let _ = writeln!(out, "  node \"{addr}\" : {} by {rule}{arrow};", node.sequent);
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::syntax::parse_defs;

    fn defs() -> IndDefSet {
        parse_defs(fixtures::ADD_DEFS).unwrap()
    }

    #[test]
    fn parses_addresses_and_buds() {
        let text = r#"proof t {
            node "" : Add2(x,y,z) |- Add1(x,y,z) by weak -> 0;
            node 0 : Add2(x,y,z) |- Add1(x,y,z) by bud(companion = "");
        }"#;
        let s = Script::parse(text, &defs()).unwrap();
        assert_eq!(s.name, "t");
        assert_eq!(s.nodes.len(), 2);
        let p = s.to_preproof(System::Clkid);
        assert_eq!(p.companions.get(&NodeAddr::from_slice(&[0])), Some(&NodeAddr::root()));
        assert_eq!(p.validate(System::Clkid, &defs()), Ok(()));
    }

    #[test]
    fn rejects_duplicates_and_bad_premise_lists() {
        let dup = r#"proof t { node "" : |- by axiom; node "" : |- by axiom; }"#;
        assert!(matches!(Script::parse(dup, &defs()), Err(ScriptError::DuplicateNode(_))));
        let bad = r#"proof t { node "" : |- by weak -> "1"; node "0" : |- by axiom; }"#;
        assert!(matches!(Script::parse(bad, &defs()), Err(ScriptError::PremiseList { .. })));
        let unknown = r#"proof t { node "" : |- by frob; }"#;
        assert!(matches!(Script::parse(unknown, &defs()), Err(ScriptError::Parse(_))));
        assert_eq!(Script::parse("", &defs()), Err(ScriptError::MissingProof));
    }

    #[test]
    fn inline_definitions() {
        let s = Script::parse(fixtures::SWAP2, &IndDefSet::default()).unwrap();
        assert!(s.defs.is_inductive(&Sym::new("B")));
        assert_eq!(s.local_defs.productions.len(), 1);
    }

    #[test]
    fn annotations_parse() {
        let text = r#"proof t {
            node "" : Add1(x,y,z), x = 0 |- Add1(0,y,y) by eql(x = 0) -> "0";
            node "0" : Add1(x,y,z) |- Add1(0,y,y) by intro(Add1.R1, Add1(0,y,y));
        }"#;
        let s = Script::parse(text, &defs()).unwrap();
        let root = &s.nodes[&NodeAddr::root()].1;
        assert!(matches!(root, NodeSpec::Rule(RuleSpec::EqL(Some(Formula::Eq(..))))));
        let q = r#"proof t { node "" : forall w. w = w |- by alll(_, 0) -> "0"; node "0" : 0 = 0 |- by weak; }"#;
        let s = Script::parse(q, &defs()).unwrap();
        assert!(matches!(&s.nodes[&NodeAddr::root()].1, NodeSpec::Rule(RuleSpec::Quant(Quantifier::AllL, None, Some(_)))));
    }

    #[test]
    fn fixtures_round_trip_through_the_printer() {
        for (name, p, defs) in fixtures::all() {
            let text = print_script(name, None, &p);
            let back = Script::parse(&text, &defs).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
            let q = back.to_preproof(fixtures::system_of(name));
            assert_eq!(q, p, "{name}");
        }
    }
}
