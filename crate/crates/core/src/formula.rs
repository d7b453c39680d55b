//! Formula and hyperformula language: parsing, desugaring, translation to
//! cirquents, and the classical (underlined) reading.
//!
//! Grammar, loosest-binding first:
//!
//! ```text
//! formula := disjunction ('->' formula)?          right-associative
//! disjunction := conjunction ('|' conjunction)*   chain of 2+ is one n-ary ∨
//! conjunction := unary ('&' unary)*               chain of 2+ is one n-ary ∧
//! unary := '~' unary | primary
//! primary := atom | '#t' | '#f' | '(' formula ')' | '[' formula ']'
//!          | '&' '{' formulas '}' | '|' '{' formulas '}'
//! ```
//!
//! `[F]` overlines `F`. Atoms are identifiers. A chain like `Q | R | S` is a
//! single arity-3 gate, distinct from the nested `Q | (R | S)`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::cirquent::{fresh_name, Cirquent, GateKind, GraphData, Label, Literal};

/// Negation-normal formula over variable-arity connectives.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Formula {
    Literal(Literal),
    Conj(Vec<Formula>),
    Disj(Vec<Formula>),
}

/// A formula in which any subterm may additionally be overlined.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Hyperformula {
    pub overlined: bool,
    pub node: HyperNode,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum HyperNode {
    Literal(Literal),
    Conj(Vec<Hyperformula>),
    Disj(Vec<Hyperformula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("double overline")]
    DoubleOverline,
    #[error("negation applied to an overlined subformula")]
    NegatedOverline,
}

impl Formula {
    pub fn literal(text: &str) -> Formula {
        Formula::Literal(Literal::parse(text).expect("valid literal"))
    }

    /// The dual formula: literals flip and the connectives swap.
    pub fn negate(&self) -> Formula {
        match self {
            Formula::Literal(l) => Formula::Literal(l.opposite()),
            Formula::Conj(items) => Formula::Disj(items.iter().map(Formula::negate).collect()),
            Formula::Disj(items) => Formula::Conj(items.iter().map(Formula::negate).collect()),
        }
    }

    /// The same formula with every flag off.
    pub fn hyper(&self) -> Hyperformula {
        let node = match self {
            Formula::Literal(l) => HyperNode::Literal(l.clone()),
            Formula::Conj(items) => HyperNode::Conj(items.iter().map(Formula::hyper).collect()),
            Formula::Disj(items) => HyperNode::Disj(items.iter().map(Formula::hyper).collect()),
        };
        Hyperformula { overlined: false, node }
    }
}

impl Hyperformula {
    /// Forgets the overline flags.
    pub fn strip(&self) -> Formula {
        match &self.node {
            HyperNode::Literal(l) => Formula::Literal(l.clone()),
            HyperNode::Conj(items) => Formula::Conj(items.iter().map(Hyperformula::strip).collect()),
            HyperNode::Disj(items) => Formula::Disj(items.iter().map(Hyperformula::strip).collect()),
        }
    }
}

/// The classical reading: overline all and only the literal occurrences.
pub fn underline(f: &Formula) -> Hyperformula {
    match f {
        Formula::Literal(l) => {
            Hyperformula { overlined: true, node: HyperNode::Literal(l.clone()) }
        }
        Formula::Conj(items) => Hyperformula {
            overlined: false,
            node: HyperNode::Conj(items.iter().map(underline).collect()),
        },
        Formula::Disj(items) => Hyperformula {
            overlined: false,
            node: HyperNode::Disj(items.iter().map(underline).collect()),
        },
    }
}

// ---------------------------------------------------------------- parsing

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Tilde,
    Amp,
    Pipe,
    Arrow,
    LPar,
    RPar,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Top,
    Bot,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, FormulaError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let tok = match b {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'~' => Tok::Tilde,
            b'&' => Tok::Amp,
            b'|' => Tok::Pipe,
            b'(' => Tok::LPar,
            b')' => Tok::RPar,
            b'[' => Tok::LBracket,
            b']' => Tok::RBracket,
            b'{' => Tok::LBrace,
            b'}' => Tok::RBrace,
            b',' => Tok::Comma,
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    out.push((i, Tok::Arrow));
                    i += 2;
                    continue;
                }
                return Err(err_at(i, "expected `->`"));
            }
            b'#' => {
                let tok = match bytes.get(i + 1) {
                    Some(b't') => Tok::Top,
                    Some(b'f') => Tok::Bot,
                    _ => return Err(err_at(i, "expected `#t` or `#f`")),
                };
                out.push((i, tok));
                i += 2;
                continue;
            }
            b if b.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            _ => return Err(err_at(i, format!("unexpected character `{}`", b as char))),
        };
        out.push((i, tok));
        i += 1;
    }
    Ok(out)
}

fn err_at(position: usize, message: impl Into<String>) -> FormulaError {
    FormulaError::Syntax { position, message: message.into() }
}

/// Pre-desugaring syntax tree.
enum Raw {
    Atom(String),
    Neg(Box<Raw>),
    Conj(Vec<Raw>),
    Disj(Vec<Raw>),
    Imp(Box<Raw>, Box<Raw>),
    Over(Box<Raw>),
    Top,
    Bot,
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.len, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), FormulaError> {
        if self.peek() == Some(&want) {
            self.at += 1;
            Ok(())
        } else {
            Err(err_at(self.pos(), format!("expected {what}")))
        }
    }

    fn formula(&mut self) -> Result<Raw, FormulaError> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.at += 1;
            let rhs = self.formula()?;
            return Ok(Raw::Imp(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Raw, FormulaError> {
        let mut items = vec![self.conjunction()?];
        while self.peek() == Some(&Tok::Pipe) {
            self.at += 1;
            items.push(self.conjunction()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Raw::Disj(items) })
    }

    fn conjunction(&mut self) -> Result<Raw, FormulaError> {
        let mut items = vec![self.unary()?];
        while self.peek() == Some(&Tok::Amp) {
            self.at += 1;
            items.push(self.unary()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Raw::Conj(items) })
    }

    fn unary(&mut self) -> Result<Raw, FormulaError> {
        if self.peek() == Some(&Tok::Tilde) {
            self.at += 1;
            return Ok(Raw::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Raw, FormulaError> {
        let position = self.pos();
        match self.bump() {
            Some(Tok::Ident(name)) => Ok(Raw::Atom(name)),
            Some(Tok::Top) => Ok(Raw::Top),
            Some(Tok::Bot) => Ok(Raw::Bot),
            Some(Tok::LPar) => {
                let inner = self.formula()?;
                self.expect(Tok::RPar, "`)`")?;
                Ok(inner)
            }
            Some(Tok::LBracket) => {
                let inner = self.formula()?;
                self.expect(Tok::RBracket, "`]`")?;
                Ok(Raw::Over(Box::new(inner)))
            }
            Some(Tok::Amp) => Ok(Raw::Conj(self.braced_list()?)),
            Some(Tok::Pipe) => Ok(Raw::Disj(self.braced_list()?)),
            _ => Err(err_at(position, "expected a formula")),
        }
    }

    fn braced_list(&mut self) -> Result<Vec<Raw>, FormulaError> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut items = Vec::new();
        if self.peek() != Some(&Tok::RBrace) {
            items.push(self.formula()?);
            while self.peek() == Some(&Tok::Comma) {
                self.at += 1;
                items.push(self.formula()?);
            }
        }
        self.expect(Tok::RBrace, "`}`")?;
        Ok(items)
    }
}

/// Parses and desugars: `->` expands, negation is pushed to atoms, `#t`/`#f`
/// become empty connectives, and arity-1 connectives collapse into their
/// operand (keeping its overline flag, merged with the connective's own).
pub fn parse(text: &str) -> Result<Hyperformula, FormulaError> {
    let toks = lex(text)?;
    let mut parser = Parser { toks, at: 0, len: text.len() };
    let raw = parser.formula()?;
    if parser.at != parser.toks.len() {
        return Err(err_at(parser.pos(), "unexpected trailing input"));
    }
    desugar(&raw, false)
}

fn desugar(raw: &Raw, negated: bool) -> Result<Hyperformula, FormulaError> {
    match raw {
        Raw::Atom(atom) => Ok(Hyperformula {
            overlined: false,
            node: HyperNode::Literal(Literal { atom: atom.clone(), negated }),
        }),
        Raw::Neg(inner) => desugar(inner, !negated),
        Raw::Top => Ok(empty_gate(if negated { GateKind::Or } else { GateKind::And })),
        Raw::Bot => Ok(empty_gate(if negated { GateKind::And } else { GateKind::Or })),
        Raw::Imp(lhs, rhs) => {
            let l = desugar(lhs, !negated)?;
            let r = desugar(rhs, negated)?;
            let node = if negated {
                HyperNode::Conj(vec![l, r])
            } else {
                HyperNode::Disj(vec![l, r])
            };
            Ok(Hyperformula { overlined: false, node })
        }
        Raw::Conj(items) => nary(items, negated, !negated),
        Raw::Disj(items) => nary(items, negated, negated),
        Raw::Over(inner) => {
            if negated {
                return Err(FormulaError::NegatedOverline);
            }
            let mut f = desugar(inner, false)?;
            if f.overlined {
                return Err(FormulaError::DoubleOverline);
            }
            f.overlined = true;
            Ok(f)
        }
    }
}

fn empty_gate(kind: GateKind) -> Hyperformula {
    let node = match kind {
        GateKind::And => HyperNode::Conj(Vec::new()),
        GateKind::Or => HyperNode::Disj(Vec::new()),
    };
    Hyperformula { overlined: false, node }
}

/// Builds an n-ary connective; `conj_out` says whether the desugared gate is
/// conjunctive once the surrounding negation is accounted for.
fn nary(items: &[Raw], negated: bool, conj_out: bool) -> Result<Hyperformula, FormulaError> {
    let mut out = Vec::with_capacity(items.len());
    for item in items {
        out.push(desugar(item, negated)?);
    }
    if out.len() == 1 {
        return Ok(out.pop().unwrap());
    }
    let node = if conj_out { HyperNode::Conj(out) } else { HyperNode::Disj(out) };
    Ok(Hyperformula { overlined: false, node })
}

// -------------------------------------------------------------- rendering

fn precedence(node: &HyperNode) -> u8 {
    match node {
        HyperNode::Literal(_) => 3,
        HyperNode::Conj(items) if items.len() >= 2 => 2,
        HyperNode::Disj(items) if items.len() >= 2 => 1,
        _ => 3,
    }
}

fn render_into(h: &Hyperformula, out: &mut String) {
    if h.overlined {
        out.push('[');
        render_bare(h, out);
        out.push(']');
    } else {
        render_bare(h, out);
    }
}

fn render_bare(h: &Hyperformula, out: &mut String) {
    let my_prec = precedence(&h.node);
    let chain = |items: &[Hyperformula], kind: GateKind, out: &mut String| {
        for (i, item) in items.iter().enumerate() {
            if i > 0 {
                out.push_str(match kind {
                    GateKind::And => " & ",
                    GateKind::Or => " | ",
                });
            }
            let needs_parens = !item.overlined && precedence(&item.node) <= my_prec;
            if needs_parens {
                out.push('(');
            }
            render_into(item, out);
            if needs_parens {
                out.push(')');
            }
        }
    };
    match &h.node {
        HyperNode::Literal(l) => out.push_str(&l.to_string()),
        HyperNode::Conj(items) if items.is_empty() => out.push_str("#t"),
        HyperNode::Disj(items) if items.is_empty() => out.push_str("#f"),
        HyperNode::Conj(items) if items.len() == 1 => {
            out.push_str("&{");
            render_into(&items[0], out);
            out.push('}');
        }
        HyperNode::Disj(items) if items.len() == 1 => {
            out.push_str("|{");
            render_into(&items[0], out);
            out.push('}');
        }
        HyperNode::Conj(items) => chain(items, GateKind::And, out),
        HyperNode::Disj(items) => chain(items, GateKind::Or, out),
    }
}

/// Text that [`parse`] maps back to an equal tree (for desugared-shape
/// inputs; arity-1 connectives render as `&{…}` but re-collapse on parse).
pub fn render(h: &Hyperformula) -> String {
    let mut out = String::new();
    render_into(h, &mut out);
    out
}

impl fmt::Display for Hyperformula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(&self.hyper()))
    }
}

// ------------------------------------------------------------ translation

struct Builder {
    data: GraphData,
    used: std::collections::BTreeSet<String>,
    shared: BTreeMap<Formula, String>,
    gates: usize,
    formulas: BTreeMap<String, Formula>,
}

impl Builder {
    fn fresh(&mut self, base: &str) -> String {
        let name = fresh_name(base, &self.used);
        self.used.insert(name.clone());
        name
    }

    /// `inside` is true when this occurrence lies strictly inside an
    /// overlined region; together with the node's own flag that decides
    /// shareability.
    fn build(&mut self, h: &Hyperformula, inside: bool) -> String {
        let shareable = h.overlined || inside;
        let key = shareable.then(|| h.strip());
        if let Some(k) = &key {
            if let Some(existing) = self.shared.get(k) {
                return existing.clone();
            }
        }
        let (name, label) = match &h.node {
            HyperNode::Literal(l) => (self.fresh(&l.to_string()), Label::Port(l.clone())),
            HyperNode::Conj(_) => {
                self.gates += 1;
                (self.fresh(&format!("g{}", self.gates)), Label::Gate(GateKind::And))
            }
            HyperNode::Disj(_) => {
                self.gates += 1;
                (self.fresh(&format!("g{}", self.gates)), Label::Gate(GateKind::Or))
            }
        };
        self.data.add_node(name.clone(), label);
        self.formulas.insert(name.clone(), h.strip());
        if let Some(k) = key {
            self.shared.insert(k, name.clone());
        }
        let children: &[Hyperformula] = match &h.node {
            HyperNode::Literal(_) => &[],
            HyperNode::Conj(items) | HyperNode::Disj(items) => items,
        };
        for child in children {
            let child_name = self.build(child, shareable);
            self.data.add_edge(name.clone(), child_name);
        }
        name
    }
}

/// Translates a hyperformula to its cirquent: the parse tree, except that
/// every occurrence that is overlined or strictly inside an overline is
/// shared with all other such occurrences of the same (flag-stripped)
/// subformula. Gates are named `g1, g2, …` in prefix order; ports are named
/// by their literal, disambiguated with `#k` suffixes when unshared
/// duplicates exist.
pub fn to_cirquent(h: &Hyperformula) -> Cirquent {
    to_cirquent_with_formulas(h).0
}

/// Like [`to_cirquent`], but also returns the formula each node was built
/// for, flags stripped.
pub(crate) fn to_cirquent_with_formulas(
    h: &Hyperformula,
) -> (Cirquent, BTreeMap<String, Formula>) {
    let mut builder = Builder {
        data: GraphData::new(),
        used: Default::default(),
        shared: BTreeMap::new(),
        gates: 0,
        formulas: BTreeMap::new(),
    };
    let root = builder.build(h, false);
    let c = builder
        .data
        .validate(&root)
        .expect("hyperformula translation yields a well-formed cirquent");
    (c, builder.formulas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn lit(text: &str) -> Formula {
        Formula::literal(text)
    }

    #[test]
    fn implication_expands() {
        let h = parse("P -> Q").unwrap();
        assert_eq!(h.strip(), Formula::Disj(vec![lit("~P"), lit("Q")]));
        assert!(!h.overlined);
    }

    #[test]
    fn negation_pushes_through_gates() {
        let h = parse("~(P & Q)").unwrap();
        assert_eq!(h.strip(), Formula::Disj(vec![lit("~P"), lit("~Q")]));
        let h = parse("~~P").unwrap();
        assert_eq!(h.strip(), lit("P"));
        let h = parse("~(P | ~Q | R)").unwrap();
        assert_eq!(h.strip(), Formula::Conj(vec![lit("~P"), lit("Q"), lit("~R")]));
    }

    #[test]
    fn truth_constants_are_empty_gates() {
        assert_eq!(parse("#t").unwrap().strip(), Formula::Conj(vec![]));
        assert_eq!(parse("#f").unwrap().strip(), Formula::Disj(vec![]));
        assert_eq!(parse("~#t").unwrap().strip(), Formula::Disj(vec![]));
        let c = to_cirquent(&parse("#t").unwrap());
        assert!(c.is_axiom());
        let c = to_cirquent(&parse("#f").unwrap());
        assert!(c.is_counter_axiom());
    }

    #[test]
    fn chains_are_flat_and_parens_nest() {
        let flat = parse("Q | R | S").unwrap().strip();
        assert_eq!(flat, Formula::Disj(vec![lit("Q"), lit("R"), lit("S")]));
        let nested = parse("Q | (R | S)").unwrap().strip();
        assert_eq!(
            nested,
            Formula::Disj(vec![lit("Q"), Formula::Disj(vec![lit("R"), lit("S")])])
        );
        assert_ne!(flat, nested);
        let mixed = parse("A & B | C").unwrap().strip();
        assert_eq!(
            mixed,
            Formula::Disj(vec![Formula::Conj(vec![lit("A"), lit("B")]), lit("C")])
        );
    }

    #[test]
    fn arrow_is_right_associative() {
        let h = parse("A -> B -> C").unwrap().strip();
        assert_eq!(
            h,
            Formula::Disj(vec![
                lit("~A"),
                Formula::Disj(vec![lit("~B"), lit("C")])
            ])
        );
    }

    #[test]
    fn overline_errors() {
        assert_eq!(parse("~[P]"), Err(FormulaError::NegatedOverline));
        assert_eq!(parse("[[P]]"), Err(FormulaError::DoubleOverline));
        assert_eq!(parse("[&{[P]}]"), Err(FormulaError::DoubleOverline));
        assert_eq!(parse("~(P & [Q])"), Err(FormulaError::NegatedOverline));
        assert!(parse("~~[P]").unwrap().overlined);
        assert!(parse("[~P | Q]").unwrap().overlined);
    }

    #[test]
    fn arity_one_collapses_and_keeps_flags() {
        let h = parse("&{P}").unwrap();
        assert_eq!(h, parse("P").unwrap());
        let h = parse("[&{P}]").unwrap();
        assert!(h.overlined);
        assert_eq!(h.strip(), lit("P"));
    }

    #[test]
    fn shared_overlined_port_translation() {
        let c = to_cirquent(&parse("(Q | [R]) & ([R] & Q)").unwrap());
        assert_eq!(c.node_count(), 6);
        let r_ports: Vec<_> = c
            .ports()
            .filter(|(_, l)| **l == Literal::parse("R").unwrap())
            .collect();
        assert_eq!(r_ports.len(), 1);
        assert_eq!(c.parents(r_ports[0].0).len(), 2);
        let q_ports = c
            .ports()
            .filter(|(_, l)| **l == Literal::parse("Q").unwrap())
            .count();
        assert_eq!(q_ports, 2);
        assert_eq!(c.label(c.root()), Some(&Label::Gate(GateKind::And)));
    }

    #[test]
    fn scope_limits_sharing() {
        // The second R is not under any overline, so the two Rs stay apart.
        let c = to_cirquent(&parse("(Q | [R]) & (R & Q)").unwrap());
        assert_eq!(c.node_count(), 7);
    }

    #[test]
    fn overline_free_formula_is_a_tree() {
        let c = to_cirquent(&parse("(Q | R) & (R & Q)").unwrap());
        assert_eq!(c.node_count(), 7);
        assert_eq!(c.edge_count(), 6);
        for (node, _) in c.nodes() {
            let expect = if node == c.root() { 0 } else { 1 };
            assert_eq!(c.parents(node).len(), expect);
        }
    }

    #[test]
    fn fully_overlined_formula_compresses() {
        let c = to_cirquent(&parse("[(~P | P) & (~P | P) & P]").unwrap());
        assert_eq!(c.node_count(), 4);
        let root = c.root();
        assert_eq!(c.label(root), Some(&Label::Gate(GateKind::And)));
        assert_eq!(c.children(root).len(), 2);
        let or_gates: Vec<_> = c
            .gates()
            .filter(|&(_, k)| k == GateKind::Or)
            .collect();
        assert_eq!(or_gates.len(), 1);
        assert_eq!(c.children(or_gates[0].0).len(), 2);
    }

    #[test]
    fn duplicate_arcs_collapse() {
        let c = to_cirquent(&parse("&{[#t], [#t]}").unwrap());
        assert_eq!(c.node_count(), 2);
        assert_eq!(c.edge_count(), 1);
    }

    #[test]
    fn underline_shares_each_literal_once() {
        let c = to_cirquent(&underline(&parse("P & P").unwrap().strip()));
        assert_eq!(c.node_count(), 2);
        assert_eq!(c.edge_count(), 1);
        assert_eq!(c.label(c.root()), Some(&Label::Gate(GateKind::And)));
        let c = to_cirquent(&underline(&parse("P").unwrap().strip()));
        assert_eq!(c.node_count(), 1);
        assert!(c.label(c.root()).unwrap().is_port());
    }

    #[test]
    fn classical_reading_of_three_atom_disjunction() {
        let f = parse("~P | (~Q & P) | (P & ~R) | (Q & R)").unwrap().strip();
        let c = to_cirquent(&underline(&f));
        assert_eq!(c.node_count(), 10);
        assert_eq!(c.ports().count(), 6);
        assert_eq!(c.label(c.root()), Some(&Label::Gate(GateKind::Or)));
        assert_eq!(c.children(c.root()).len(), 4);
        let and_gates = c
            .gates()
            .filter(|&(_, k)| k == GateKind::And)
            .count();
        assert_eq!(and_gates, 3);
        assert!(c.is_circuit());
    }

    #[test]
    fn tree_node_count_equals_occurrence_count() {
        for (text, occurrences) in [
            ("P", 1),
            ("P & Q", 3),
            ("P -> Q", 3),
            ("(A | B) & (C | D) & E", 8),
            ("~(A & (B | C))", 5),
        ] {
            let h = parse(text).unwrap();
            let c = to_cirquent(&h);
            assert_eq!(c.node_count(), occurrences, "{text}");
        }
    }

    #[test]
    fn circuit_iff_no_repeated_same_polarity_literal() {
        for (text, expect) in [
            ("P & ~P", true),
            ("P & P", false),
            ("P & (Q | ~P)", true),
            ("(P | Q) & (P | R)", false),
        ] {
            let c = to_cirquent(&parse(text).unwrap());
            assert_eq!(c.is_circuit(), expect, "{text}");
        }
    }

    #[test]
    fn render_examples() {
        let h = Hyperformula {
            overlined: false,
            node: HyperNode::Disj(vec![lit("~P").hyper(), lit("Q").hyper()]),
        };
        assert_eq!(render(&h), "~P | Q");
        assert_eq!(render(&parse("#t").unwrap()), "#t");
        assert_eq!(render(&parse("(Q | [R]) & ([R] & Q)").unwrap()), "(Q | [R]) & ([R] & Q)");
        assert_eq!(
            render(&parse("P & (Q | (R | S))").unwrap()),
            "P & (Q | (R | S))"
        );
    }

    fn random_hyper(rng: &mut StdRng, depth: usize, inside_over: bool) -> Hyperformula {
        let overlined = !inside_over && rng.gen_bool(0.25);
        let inside = inside_over || overlined;
        let pick: u8 = if depth == 0 { 0 } else { rng.gen_range(0..4) };
        let node = match pick {
            0 | 3 => {
                let atom = ["P", "Q", "R", "S"][rng.gen_range(0..4)];
                HyperNode::Literal(Literal {
                    atom: atom.to_string(),
                    negated: rng.gen_bool(0.5),
                })
            }
            kind => {
                let n = match rng.gen_range(0..4) {
                    0 => 0,
                    _ => rng.gen_range(2..4),
                };
                let items = (0..n).map(|_| random_hyper(rng, depth - 1, inside)).collect();
                if kind == 1 {
                    HyperNode::Conj(items)
                } else {
                    HyperNode::Disj(items)
                }
            }
        };
        Hyperformula { overlined, node }
    }

    #[test]
    fn render_parse_round_trip_on_random_trees() {
        let mut rng = StdRng::seed_from_u64(0x5eed);
        for _ in 0..1000 {
            let h = random_hyper(&mut rng, 4, false);
            let text = render(&h);
            let back = parse(&text).unwrap_or_else(|e| panic!("{text}: {e}"));
            assert_eq!(back, h, "{text}");
        }
    }

    #[test]
    fn translation_always_validates() {
        let mut rng = StdRng::seed_from_u64(0xcafe);
        for _ in 0..500 {
            let h = random_hyper(&mut rng, 4, false);
            let c = to_cirquent(&h);
            assert!(c.node_count() >= 1);
        }
    }
}
