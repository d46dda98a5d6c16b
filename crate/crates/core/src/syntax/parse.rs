use std::collections::BTreeSet;

use thiserror::Error;

use super::{is_reserved_name, Formula, IndDefSet, Production, Sequent, Sym, Term, Var, SUCC, ZERO};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("arity mismatch for `{name}`: expected {expected}, found {found}")]
    Arity { name: String, expected: usize, found: usize },
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("production conclusion `{0}` is not an inductive atom")]
    OrdinaryConclusion(String),
    #[error("production in block `{expected}` concludes `{found}`")]
    ConclusionMismatch { expected: String, found: String },
    #[error("duplicate definition of `{0}`")]
    Duplicate(String),
    #[error("`{0}` is a reserved name")]
    ReservedName(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Nat(u64),
    Str(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Colon,
    Assign,
    Equals,
    Turnstile,
    FatArrow,
    Arrow,
    Tilde,
    Amp,
    Bar,
    Dot,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Nat(n) => format!("number `{n}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Assign => ":=",
            Tok::Equals => "=",
            Tok::Turnstile => "|-",
            Tok::FatArrow => "=>",
            Tok::Arrow => "->",
            Tok::Tilde => "~",
            Tok::Amp => "&",
            Tok::Bar => "|",
            Tok::Dot => ".",
            _ => "?",
        }
    }
}

pub(crate) struct Lexer;

impl Lexer {
    pub(crate) fn lex(text: &str) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
        let chars: Vec<char> = text.chars().collect();
        let mut out = Vec::new();
        let (mut i, mut line, mut col) = (0, 1, 1);
        let err = |line, col, msg: String| ParseError { line, col, kind: ParseErrorKind::Syntax(msg) };
        while i < chars.len() {
            let c = chars[i];
            let (l0, c0) = (line, col);
            let adv = |n: usize, i: &mut usize, col: &mut usize| {
                *i += n;
                *col += n;
            };
            if c == '\n' {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            if c.is_whitespace() {
                adv(1, &mut i, &mut col);
                continue;
            }
            if c == '/' && chars.get(i + 1) == Some(&'/') {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                col += i - start;
                out.push((Tok::Ident(chars[start..i].iter().collect()), l0, c0));
                continue;
            }
            if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                col += i - start;
                let s: String = chars[start..i].iter().collect();
                let n = s.parse().map_err(|_| err(l0, c0, format!("number `{s}` too large")))?;
                out.push((Tok::Nat(n), l0, c0));
                continue;
            }
            if c == '"' {
                let start = i + 1;
                i += 1;
                while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                    i += 1;
                }
                if i >= chars.len() || chars[i] != '"' {
                    return Err(err(l0, c0, "unterminated string".into()));
                }
                let s: String = chars[start..i].iter().collect();
                i += 1;
                col += s.chars().count() + 2;
                out.push((Tok::Str(s), l0, c0));
                continue;
            }
            let next = chars.get(i + 1).copied();
            let (tok, n) = match (c, next) {
                ('|', Some('-')) => (Tok::Turnstile, 2),
                ('=', Some('>')) => (Tok::FatArrow, 2),
                ('-', Some('>')) => (Tok::Arrow, 2),
                (':', Some('=')) => (Tok::Assign, 2),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                ('{', _) => (Tok::LBrace, 1),
                ('}', _) => (Tok::RBrace, 1),
                (',', _) => (Tok::Comma, 1),
                (';', _) => (Tok::Semi, 1),
                (':', _) => (Tok::Colon, 1),
                ('=', _) => (Tok::Equals, 1),
                ('~', _) => (Tok::Tilde, 1),
                ('&', _) => (Tok::Amp, 1),
                ('|', _) => (Tok::Bar, 1),
                ('.', _) => (Tok::Dot, 1),
                _ => return Err(err(l0, c0, format!("unexpected character `{c}`"))),
            };
            adv(n, &mut i, &mut col);
            out.push((tok, l0, c0));
        }
        out.push((Tok::Eof, line, col));
        Ok(out)
    }
}

const KEYWORDS: [&str; 3] = ["forall", "exists", "by"];

/// Recursive-descent parser shared by definition files, sequents and
/// proof scripts.
pub(crate) struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    pub(crate) defs: IndDefSet,
    /// Unknown predicate applications become ordinary predicates.
    pub(crate) declare_ordinary: bool,
    pub(crate) allow_reserved: bool,
}

impl Parser {
    pub(crate) fn new(text: &str, defs: IndDefSet) -> Result<Parser, ParseError> {
        Ok(Parser { toks: Lexer::lex(text)?, pos: 0, defs, declare_ordinary: false, allow_reserved: false })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    pub(crate) fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    pub(crate) fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn error(&self, kind: ParseErrorKind) -> ParseError {
        let (_, line, col) = &self.toks[self.pos];
        ParseError { line: *line, col: *col, kind }
    }

    pub(crate) fn syntax(&self, msg: impl Into<String>) -> ParseError {
        self.error(ParseErrorKind::Syntax(msg.into()))
    }

    pub(crate) fn unexpected(&self, wanted: &str) -> ParseError {
        self.syntax(format!("expected {wanted}, found {}", self.peek().describe()))
    }

    pub(crate) fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, t: &Tok) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{}`", t.text())))
        }
    }

    pub(crate) fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    pub(crate) fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    pub(crate) fn nat(&mut self) -> Result<u64, ParseError> {
        match self.peek().clone() {
            Tok::Nat(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.unexpected("number")),
        }
    }

    pub(crate) fn expect_eof(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    pub(crate) fn var_name(&mut self) -> Result<Var, ParseError> {
        let name = self.ident()?;
        self.check_var_name(&name)?;
        Ok(Var::new(&name))
    }

    fn check_var_name(&self, name: &str) -> Result<(), ParseError> {
        if KEYWORDS.contains(&name) || (!self.allow_reserved && is_reserved_name(name)) {
            return Err(self.error(ParseErrorKind::ReservedName(name.to_string())));
        }
        Ok(())
    }

    fn check_function(&mut self, name: &str, n: usize) -> Result<(), ParseError> {
        let sym = Sym::new(name);
        let builtin = match name {
            ZERO => Some(0),
            SUCC => Some(1),
            _ => None,
        };
        let known = builtin.or_else(|| self.defs.functions.get(&sym).copied());
        match known {
            Some(k) if k != n => Err(self.error(ParseErrorKind::Arity { name: name.to_string(), expected: k, found: n })),
            Some(_) => Ok(()),
            None => {
                self.defs.functions.insert(sym, n);
                Ok(())
            }
        }
    }

    fn args(&mut self) -> Result<Vec<Term>, ParseError> {
        self.expect(&Tok::LParen)?;
        let mut args = Vec::new();
        if !self.eat(&Tok::RParen) {
            loop {
                args.push(self.term()?);
                if self.eat(&Tok::RParen) {
                    break;
                }
                self.expect(&Tok::Comma)?;
            }
        }
        Ok(args)
    }

    pub(crate) fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Nat(n) => {
                self.bump();
                let n = u32::try_from(n).map_err(|_| self.syntax("numeral too large"))?;
                Ok(Term::numeral(n))
            }
            Tok::Ident(name) => {
                if *self.peek_at(1) == Tok::LParen {
                    let save = self.pos;
                    self.bump();
                    let args = self.args()?;
                    if self.is_predicate(&name) {
                        self.pos = save;
                        return Err(self.syntax(format!("predicate `{name}` used as a term")));
                    }
                    let here = self.pos;
                    self.pos = save;
                    self.check_function(&name, args.len())?;
                    self.pos = here;
                    Ok(Term::App(Sym::new(&name), args))
                } else {
                    self.check_var_name(&name)?;
                    self.bump();
                    Ok(Term::Var(Var::new(&name)))
                }
            }
            _ => Err(self.unexpected("term")),
        }
    }

    fn is_predicate(&self, name: &str) -> bool {
        let s = Sym::new(name);
        self.defs.is_inductive(&s) || self.defs.ordinary.contains_key(&s)
    }

    /// An atom: `P(t, ...)` or `t = u`.
    pub(crate) fn atom(&mut self) -> Result<Formula, ParseError> {
        if let (Tok::Ident(name), Tok::LParen) = (self.peek().clone(), self.peek_at(1).clone()) {
            let save = self.pos;
            self.bump();
            let args = self.args()?;
            if *self.peek() == Tok::Equals && !self.is_predicate(&name) {
                self.pos = save;
            } else {
                let here = self.pos;
                self.pos = save;
                let sym = Sym::new(&name);
                match self.defs.pred_arity(&sym) {
                    Some(k) if k != args.len() => return Err(self.error(ParseErrorKind::Arity { name, expected: k, found: args.len() })),
                    Some(_) => {}
                    None if self.declare_ordinary && !self.defs.functions.contains_key(&sym) => {
                        self.defs.ordinary.insert(sym.clone(), args.len());
                    }
                    None => return Err(self.error(ParseErrorKind::UnknownPredicate(name))),
                }
                self.pos = here;
                return Ok(Formula::Pred(sym, args));
            }
        }
        let l = self.term()?;
        self.expect(&Tok::Equals)?;
        let r = self.term()?;
        Ok(Formula::Eq(l, r))
    }

    pub(crate) fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.formula()?;
            return Ok(Formula::Imp(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conjunction()?;
        while self.eat(&Tok::Bar) {
            let rhs = self.conjunction()?;
            acc = Formula::Or(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while self.eat(&Tok::Amp) {
            let rhs = self.unary()?;
            acc = Formula::And(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.eat(&Tok::Tilde) {
            return Ok(Formula::Not(Box::new(self.unary()?)));
        }
        if self.at_keyword("forall") || self.at_keyword("exists") {
            let universal = self.at_keyword("forall");
            self.bump();
            let x = self.var_name()?;
            self.expect(&Tok::Dot)?;
            let body = Box::new(self.formula()?);
            return Ok(if universal { Formula::Forall(x, body) } else { Formula::Exists(x, body) });
        }
        if self.eat(&Tok::LParen) {
            let f = self.formula()?;
            self.expect(&Tok::RParen)?;
            return Ok(f);
        }
        self.atom()
    }

    fn starts_formula(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => s != "by",
            Tok::Nat(_) | Tok::Tilde | Tok::LParen => true,
            _ => false,
        }
    }

    pub(crate) fn formula_list(&mut self) -> Result<Vec<Formula>, ParseError> {
        let mut out = Vec::new();
        if !self.starts_formula() {
            return Ok(out);
        }
        loop {
            out.push(self.formula()?);
            if !self.eat(&Tok::Comma) {
                return Ok(out);
            }
        }
    }

    pub(crate) fn sequent(&mut self) -> Result<Sequent, ParseError> {
        let left = self.formula_list()?;
        self.expect(&Tok::Turnstile)?;
        let right = self.formula_list()?;
        Ok(Sequent::new(left, right))
    }

    /// Registers every `inductive NAME(N)` header ahead of parsing so that
    /// productions may mention predicates declared later.
    pub(crate) fn prescan_inductives(&mut self) -> Result<(), ParseError> {
        let mut seen = BTreeSet::new();
        for w in self.toks.windows(5) {
            if let [(Tok::Ident(kw), ..), (Tok::Ident(name), l, c), (Tok::LParen, ..), (Tok::Nat(n), ..), (Tok::RParen, ..)] = w {
                if kw == "inductive" {
                    if !seen.insert(name.clone()) || self.defs.is_inductive(&Sym::new(name)) {
                        return Err(ParseError { line: *l, col: *c, kind: ParseErrorKind::Duplicate(name.clone()) });
                    }
                    self.defs.inductive.push((Sym::new(name), *n as usize));
                }
            }
        }
        Ok(())
    }

    /// `inductive NAME(N) { rule ... }`, with the header already registered.
    pub(crate) fn inductive_block(&mut self) -> Result<(), ParseError> {
        if !self.at_keyword("inductive") {
            return Err(self.unexpected("`inductive`"));
        }
        self.bump();
        let name = self.ident()?;
        self.expect(&Tok::LParen)?;
        self.nat()?;
        self.expect(&Tok::RParen)?;
        self.expect(&Tok::LBrace)?;
        let pred = Sym::new(&name);
        while self.at_keyword("rule") {
            self.bump();
            let rname = self.ident()?;
            if self.defs.production(&pred, &rname).is_some() {
                return Err(self.error(ParseErrorKind::Duplicate(format!("{name}.{rname}"))));
            }
            self.expect(&Tok::Colon)?;
            let mut premises = Vec::new();
            if *self.peek() != Tok::FatArrow {
                loop {
                    premises.push(self.atom()?);
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            self.expect(&Tok::FatArrow)?;
            let concl = self.atom()?;
            let args = match &concl {
                Formula::Pred(p, args) if *p == pred => args.clone(),
                Formula::Pred(p, _) if self.defs.is_inductive(p) => {
                    return Err(self.error(ParseErrorKind::ConclusionMismatch { expected: name, found: p.to_string() }))
                }
                other => return Err(self.error(ParseErrorKind::OrdinaryConclusion(other.to_string()))),
            };
            self.expect(&Tok::Semi)?;
            let (inductive, ordinary): (Vec<_>, Vec<_>) = premises.into_iter().partition(|f| self.defs.is_inductive_atom(f));
            let all: Vec<Formula> = ordinary.iter().chain(&inductive).cloned().collect();
            let params = Production::compute_params(&args, &all);
            self.defs.productions.push(Production { name: rname, pred: pred.clone(), params, ordinary, inductive, conclusion: args });
        }
        self.expect(&Tok::RBrace)
    }
}

pub fn parse_defs(text: &str) -> Result<IndDefSet, ParseError> {
    let mut p = Parser::new(text, IndDefSet::default())?;
    p.declare_ordinary = true;
    p.prescan_inductives()?;
    while *p.peek() != Tok::Eof {
        p.inductive_block()?;
    }
    let mut defs = p.defs;
    // Keep productions grouped by predicate in declaration order.
    let order: Vec<Sym> = defs.inductive.iter().map(|(s, _)| s.clone()).collect();
    defs.productions.sort_by_key(|r| order.iter().position(|s| *s == r.pred));
    Ok(defs)
}

pub fn parse_sequent(text: &str, defs: &IndDefSet) -> Result<Sequent, ParseError> {
    let mut p = Parser::new(text, defs.clone())?;
    let s = p.sequent()?;
    p.expect_eof()?;
    Ok(s)
}

/// Like [`parse_sequent`] but accepts the reserved `_vN` names, for text
/// produced by this library.
pub fn parse_sequent_reserved(text: &str, defs: &IndDefSet) -> Result<Sequent, ParseError> {
    let mut p = Parser::new(text, defs.clone())?;
    p.allow_reserved = true;
    let s = p.sequent()?;
    p.expect_eof()?;
    Ok(s)
}

pub fn parse_formula(text: &str, defs: &IndDefSet) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text, defs.clone())?;
    let f = p.formula()?;
    p.expect_eof()?;
    Ok(f)
}

pub fn parse_term(text: &str, defs: &IndDefSet) -> Result<Term, ParseError> {
    let mut p = Parser::new(text, defs.clone())?;
    let t = p.term()?;
    p.expect_eof()?;
    Ok(t)
}
