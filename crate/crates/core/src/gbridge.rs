//! Sequent proofs and their translation into deep cirquent derivations.
//!
//! A sequent is a nonempty finite set of formulas, read disjunctively. The
//! sequent system has three rules: an axiom for sequents holding an opposite
//! pair of literals, a disjunction introduction whose premise replaces a
//! binary disjunction by its two disjuncts, and a conjunction introduction
//! whose two premises split a binary conjunction over a shared side set.
//!
//! [`translate_g_to_cl8`] rebuilds any such proof of a single formula `F`
//! as a derivation concluding in the shared-port cirquent of `F` with every
//! literal occurrence overlined. The derivation grows bottom-up: throughout,
//! its premise is a conjunctive root whose children are disjunctive gates,
//! one per open sequent, each holding one member node per sequent formula.
//! Disjunction introductions dissolve a member gate in place, conjunction
//! introductions expand a trade into primitive steps and copy the shared
//! context into both new sequent gates, and closed sequents finish with one
//! weakening, merge, and coupling apiece.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::cirquent::{fresh_name, Cirquent, GateKind, Label};
use crate::derivation::Derivation;
use crate::formula::{to_cirquent_with_formulas, underline, Formula};
use crate::prover::{
    absorb_root_children, couple_pair_gates, expand_trade, merge_equal_or_gates, opposite_pair,
    trade_params,
};
use crate::rules::{RuleId, RuleParams, Step};

/// A nonempty finite set of formulas, read as their disjunction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Sequent {
    formulas: BTreeSet<Formula>,
}

impl Sequent {
    pub fn new(formulas: impl IntoIterator<Item = Formula>) -> Result<Sequent, GBridgeError> {
        let formulas: BTreeSet<Formula> = formulas.into_iter().collect();
        if formulas.is_empty() {
            return Err(GBridgeError::EmptySequent);
        }
        Ok(Sequent { formulas })
    }

    pub fn singleton(f: Formula) -> Sequent {
        Sequent { formulas: [f].into_iter().collect() }
    }

    pub fn formulas(&self) -> &BTreeSet<Formula> {
        &self.formulas
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.formulas.contains(f)
    }

    /// True when some atom occurs both as a positive and as a negative
    /// literal member.
    pub fn has_opposite_pair(&self) -> bool {
        self.formulas.iter().any(|f| match f {
            Formula::Literal(l) => self.formulas.contains(&Formula::Literal(l.opposite())),
            _ => false,
        })
    }

    /// The member set with `f` removed and `with` added.
    fn replace(&self, f: &Formula, with: impl IntoIterator<Item = Formula>) -> BTreeSet<Formula> {
        let mut out = self.formulas.clone();
        out.remove(f);
        out.extend(with);
        out
    }

    /// The member set with `extra` added and nothing removed.
    fn extend(&self, extra: impl IntoIterator<Item = Formula>) -> BTreeSet<Formula> {
        let mut out = self.formulas.clone();
        out.extend(extra);
        out
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let texts: Vec<String> = self.formulas.iter().map(|g| g.to_string()).collect();
        write!(f, "{}", texts.join(", "))
    }
}

/// The rule concluding a proof node, with its principal formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GRule {
    Axiom,
    OrIntro(Formula),
    AndIntro(Formula),
}

/// A sequent proof tree: the conclusion sits at the root and premises are
/// its children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GProof {
    pub sequent: Sequent,
    pub rule: GRule,
    pub children: Vec<GProof>,
}

impl GProof {
    pub fn leaf(sequent: Sequent) -> GProof {
        GProof { sequent, rule: GRule::Axiom, children: Vec::new() }
    }

    /// Total formula occurrences: the sum over all tree nodes of the sizes
    /// of their sequent members.
    pub fn size(&self) -> usize {
        self.sequent.formulas.iter().map(formula_size).sum::<usize>()
            + self.children.iter().map(GProof::size).sum::<usize>()
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(GProof::node_count).sum::<usize>()
    }

    /// The node reached by taking the given child index at each level.
    fn node_at(&self, path: &[usize]) -> &GProof {
        let mut node = self;
        for &i in path {
            node = &node.children[i];
        }
        node
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GBridgeError {
    #[error("a sequent must hold at least one formula")]
    EmptySequent,
    #[error("node {path:?}: an axiom leaf needs an opposite pair of literal members")]
    NotAxiom { path: Vec<usize> },
    #[error("node {path:?}: {detail}")]
    PremiseMismatch { path: Vec<usize>, detail: String },
    #[error("node {path:?}: {detail}")]
    BadNode { path: Vec<usize>, detail: String },
    #[error("the formula is not provable")]
    Unprovable,
    #[error("proof search exceeded its budget of {budget} sequents")]
    BudgetExceeded { budget: usize },
    #[error("translation starts from a proof of a single formula")]
    NotSingleton,
}

/// Number of syntax-tree nodes in the formula.
pub fn formula_size(f: &Formula) -> usize {
    match f {
        Formula::Literal(_) => 1,
        Formula::Conj(items) | Formula::Disj(items) => {
            1 + items.iter().map(formula_size).sum::<usize>()
        }
    }
}

/// Rewrites every connective to binary form: chains fold right-associatively
/// and single-operand connectives collapse to their operand. Childless
/// connectives are left alone.
pub fn binarize(f: &Formula) -> Formula {
    fn fold(items: &[Formula], wrap: fn(Vec<Formula>) -> Formula) -> Formula {
        match items {
            [] => wrap(Vec::new()),
            [only] => binarize(only),
            [first, rest @ ..] => wrap(vec![binarize(first), fold(rest, wrap)]),
        }
    }
    match f {
        Formula::Literal(_) => f.clone(),
        Formula::Conj(items) => fold(items, Formula::Conj),
        Formula::Disj(items) => fold(items, Formula::Disj),
    }
}

/// The two operands of a binary principal, or an error naming the node.
fn principal_operands<'a>(
    principal: &'a Formula,
    wanted: GateKind,
    path: &[usize],
) -> Result<(&'a Formula, &'a Formula), GBridgeError> {
    let items = match (principal, wanted) {
        (Formula::Conj(items), GateKind::And) => items,
        (Formula::Disj(items), GateKind::Or) => items,
        _ => {
            return Err(GBridgeError::BadNode {
                path: path.to_vec(),
                detail: format!("`{principal}` is not a principal of the right shape"),
            })
        }
    };
    if items.len() != 2 {
        return Err(GBridgeError::BadNode {
            path: path.to_vec(),
            detail: format!("principal `{principal}` must be binary"),
        });
    }
    Ok((&items[0], &items[1]))
}

/// Checks a proof tree: axiom leaves hold an opposite pair, each
/// introduction names a binary principal present in its conclusion, and
/// premises match the conclusion up to the principal being kept or dropped
/// (sequents are sets, so a premise may retain the principal).
pub fn check_g_proof(p: &GProof) -> Result<(), GBridgeError> {
    let mut path = Vec::new();
    check_node(p, &mut path)
}

fn check_node(p: &GProof, path: &mut Vec<usize>) -> Result<(), GBridgeError> {
    let arity = |wanted: usize| -> Result<(), GBridgeError> {
        if p.children.len() == wanted {
            Ok(())
        } else {
            Err(GBridgeError::BadNode {
                path: path.clone(),
                detail: format!(
                    "expected {wanted} premise(s), found {}",
                    p.children.len()
                ),
            })
        }
    };
    let present = |principal: &Formula| -> Result<(), GBridgeError> {
        if p.sequent.contains(principal) {
            Ok(())
        } else {
            Err(GBridgeError::PremiseMismatch {
                path: path.clone(),
                detail: format!("principal `{principal}` is not in the sequent"),
            })
        }
    };
    match &p.rule {
        GRule::Axiom => {
            arity(0)?;
            if !p.sequent.has_opposite_pair() {
                return Err(GBridgeError::NotAxiom { path: path.clone() });
            }
        }
        GRule::OrIntro(principal) => {
            arity(1)?;
            let (e, f) = principal_operands(principal, GateKind::Or, path)?;
            present(principal)?;
            let dropped = p.sequent.replace(principal, [e.clone(), f.clone()]);
            let kept = p.sequent.extend([e.clone(), f.clone()]);
            let got = &p.children[0].sequent.formulas;
            if *got != dropped && *got != kept {
                return Err(GBridgeError::PremiseMismatch {
                    path: path.clone(),
                    detail: format!(
                        "premise {} does not split `{principal}` out of {}",
                        p.children[0].sequent, p.sequent
                    ),
                });
            }
        }
        GRule::AndIntro(principal) => {
            arity(2)?;
            let (e, f) = principal_operands(principal, GateKind::And, path)?;
            present(principal)?;
            let left = &p.children[0].sequent.formulas;
            let right = &p.children[1].sequent.formulas;
            let fits = |gamma_keeps_principal: bool| {
                let base = if gamma_keeps_principal {
                    p.sequent.extend([])
                } else {
                    p.sequent.replace(principal, [])
                };
                let mut want_left = base.clone();
                want_left.insert(e.clone());
                let mut want_right = base;
                want_right.insert(f.clone());
                *left == want_left && *right == want_right
            };
            if !fits(false) && !fits(true) {
                return Err(GBridgeError::PremiseMismatch {
                    path: path.clone(),
                    detail: format!(
                        "premises {} and {} do not split `{principal}` out of {} over one side set",
                        p.children[0].sequent, p.children[1].sequent, p.sequent
                    ),
                });
            }
        }
    }
    for (i, child) in p.children.iter().enumerate() {
        path.push(i);
        check_node(child, path)?;
        path.pop();
    }
    Ok(())
}

/// Proves the formula in the sequent system, bottom-up: binarize, then keep
/// decomposing the least binary non-literal member until every branch holds
/// an opposite pair. The budget caps the number of sequents visited.
pub fn prove_g(f: &Formula, budget: usize) -> Result<GProof, GBridgeError> {
    let mut remaining = budget;
    let root = Sequent::singleton(binarize(f));
    search(root, &mut remaining, budget)
}

fn search(seq: Sequent, remaining: &mut usize, budget: usize) -> Result<GProof, GBridgeError> {
    if *remaining == 0 {
        return Err(GBridgeError::BudgetExceeded { budget });
    }
    *remaining -= 1;
    if seq.has_opposite_pair() {
        return Ok(GProof::leaf(seq));
    }
    let principal = seq
        .formulas
        .iter()
        .find(|f| matches!(f, Formula::Conj(items) | Formula::Disj(items) if items.len() == 2))
        .cloned();
    let Some(principal) = principal else {
        return Err(GBridgeError::Unprovable);
    };
    match &principal {
        Formula::Disj(items) => {
            let premise = Sequent::new(seq.replace(&principal, items.iter().cloned()))?;
            let child = search(premise, remaining, budget)?;
            Ok(GProof { sequent: seq, rule: GRule::OrIntro(principal.clone()), children: vec![child] })
        }
        Formula::Conj(items) => {
            let left = Sequent::new(seq.replace(&principal, [items[0].clone()]))?;
            let right = Sequent::new(seq.replace(&principal, [items[1].clone()]))?;
            let left = search(left, remaining, budget)?;
            let right = search(right, remaining, budget)?;
            Ok(GProof {
                sequent: seq,
                rule: GRule::AndIntro(principal.clone()),
                children: vec![left, right],
            })
        }
        Formula::Literal(_) => unreachable!("literals are never chosen as principals"),
    }
}

/// Which sequent gate stands for which proof node, in construction order.
/// Paths are child-index lists from the proof's root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationTrace {
    pub associations: Vec<(String, Vec<usize>)>,
}

/// Translates a checked proof of a single formula `F` into a derivation of
/// the cirquent of `F` with all literal occurrences overlined.
pub fn translate_g_to_cl8(p: &GProof) -> Result<Derivation, GBridgeError> {
    Ok(translate_g_to_cl8_traced(p)?.0)
}

/// Like [`translate_g_to_cl8`], also reporting which sequent gate tracked
/// which proof node.
pub fn translate_g_to_cl8_traced(
    p: &GProof,
) -> Result<(Derivation, TranslationTrace), GBridgeError> {
    check_g_proof(p)?;
    if p.sequent.formulas.len() != 1 {
        return Err(GBridgeError::NotSingleton);
    }
    let goal = p.sequent.formulas.first().unwrap().clone();
    let (conclusion, mut formula_of) = to_cirquent_with_formulas(&underline(&goal));
    let mut deriv = Derivation::single(conclusion);

    // Two shortenings grow the bottom: a disjunctive gate around the whole
    // cirquent stands for the root sequent, and a conjunctive cap above it
    // becomes the root for the rest of the construction.
    let first = insert_root_gate(&mut deriv, GateKind::Or, "s1");
    insert_root_gate(&mut deriv, GateKind::And, "s0");

    let mut trace = vec![(first.clone(), Vec::new())];
    let mut agenda: Vec<(String, Vec<usize>)> = vec![(first, Vec::new())];
    loop {
        let next = agenda
            .iter()
            .enumerate()
            .filter(|(_, (_, path))| !matches!(p.node_at(path).rule, GRule::Axiom))
            .min_by(|a, b| a.1 .0.cmp(&b.1 .0))
            .map(|(i, _)| i);
        let Some(pos) = next else { break };
        let (gate, path) = agenda[pos].clone();
        let node = p.node_at(&path);
        match node.rule.clone() {
            GRule::OrIntro(principal) => {
                let kept = node.children[0].sequent.formulas
                    == node.sequent.extend(operands(&principal));
                let target = member_for(deriv.premise(), &formula_of, &gate, &principal);
                let target = if kept {
                    let (keep, dissolve) =
                        split_subtree(&mut deriv, &mut formula_of, &target, &gate, &gate)
                            .expect("a non-literal principal is represented by a gate");
                    let _ = keep;
                    dissolve
                } else {
                    target
                };
                dissolve_member(&mut deriv, &gate, &target);
                agenda[pos].1.push(0);
                trace.push((gate, agenda[pos].1.clone()));
            }
            GRule::AndIntro(principal) => {
                let kept = node.children[0].sequent.formulas
                    == node.sequent.extend([operands(&principal)[0].clone()]);
                let conjuncts =
                    trade_member(&mut deriv, &mut formula_of, &gate, &principal, kept);
                agenda.remove(pos);
                for (i, conjunct) in conjuncts.into_iter().enumerate() {
                    let mut child_path = path.clone();
                    child_path.push(i);
                    trace.push((conjunct.clone(), child_path.clone()));
                    agenda.push((conjunct, child_path));
                }
            }
            GRule::Axiom => unreachable!("the agenda only offers open sequents"),
        }
    }

    // Every sequent gate now holds an opposite pair; weaken the rest away,
    // merge gates left with equal pairs, couple, and absorb into the axiom.
    let mut leaves: Vec<String> = agenda.into_iter().map(|(gate, _)| gate).collect();
    leaves.sort();
    for gate in leaves {
        let top = deriv.premise();
        let (pos, neg) =
            opposite_pair(top, &gate).expect("a closed sequent gate holds an opposite pair");
        let mut delta = top.children(&gate).clone();
        delta.remove(&pos);
        delta.remove(&neg);
        if delta.is_empty() {
            continue;
        }
        let step = Step::new(
            RuleId::Weakening,
            RuleParams::new()
                .with_central("a", &gate)
                .with_peripheral("Gamma", [pos, neg])
                .with_peripheral("Delta", delta)
                .with_peripheral("Theta", top.parents(&gate).clone()),
        );
        deriv.prepend_apply(step).expect("weakening a sequent gate down to its pair must apply");
    }
    merge_equal_or_gates(&mut deriv);
    couple_pair_gates(&mut deriv);
    absorb_root_children(&mut deriv);
    assert!(deriv.premise().is_axiom(), "the finished translation must start from the axiom");
    Ok((deriv, TranslationTrace { associations: trace }))
}

fn operands(principal: &Formula) -> Vec<Formula> {
    match principal {
        Formula::Conj(items) | Formula::Disj(items) => items.clone(),
        Formula::Literal(_) => unreachable!("principals are never literals"),
    }
}

/// Wraps the current root in a fresh gate of the given kind via one
/// shortening, and returns the fresh gate's name.
fn insert_root_gate(deriv: &mut Derivation, kind: GateKind, base: &str) -> String {
    let top = deriv.premise();
    let root = top.root().to_string();
    let used: BTreeSet<String> = top.node_names().cloned().collect();
    let name = fresh_name(base, &used);
    let step = Step::new(
        RuleId::Shortening(kind),
        RuleParams::new()
            .with_central("a", &root)
            .with_central("b", &name)
            .with_peripheral("Gamma", top.children(&root).clone()),
    );
    deriv.prepend_apply(step).expect("capping the root with a fresh gate must apply");
    name
}

/// The least-named child of `gate` that was built for `formula`.
fn member_for(
    top: &Cirquent,
    formula_of: &BTreeMap<String, Formula>,
    gate: &str,
    formula: &Formula,
) -> String {
    top.children(gate)
        .iter()
        .find(|child| formula_of.get(*child) == Some(formula))
        .unwrap_or_else(|| panic!("gate `{gate}` holds no member for `{formula}`"))
        .clone()
}

/// Lifts the children of `member` into `gate` by one deepening, removing the
/// member gate itself.
fn dissolve_member(deriv: &mut Derivation, gate: &str, member: &str) {
    let top = deriv.premise();
    let kind = match top.label(member) {
        Some(Label::Gate(kind)) => *kind,
        _ => unreachable!("only gates are dissolved"),
    };
    let mut gamma = top.children(gate).clone();
    gamma.remove(member);
    let step = Step::new(
        RuleId::Deepening(kind),
        RuleParams::new()
            .with_central("a", gate)
            .with_central("b", member)
            .with_peripheral("Gamma", gamma)
            .with_peripheral("Delta", top.children(member).clone())
            .with_peripheral("Theta", top.parents(gate).clone()),
    );
    deriv.prepend_apply(step).expect("dissolving a single-parent member gate must apply");
}

/// Splits the gate subtree under `node` into two copies, the first parented
/// by `left` and the second by `right` (which may be the same gate: the
/// copies then sit side by side under it). Ports stay shared. Returns the
/// two top copies, or None when `node` is a port.
fn split_subtree(
    deriv: &mut Derivation,
    formula_of: &mut BTreeMap<String, Formula>,
    node: &str,
    left: &str,
    right: &str,
) -> Option<(String, String)> {
    let top = deriv.premise();
    let kind = match top.label(node) {
        Some(Label::Gate(kind)) => *kind,
        _ => return None,
    };
    let gamma = top.children(node).clone();
    let mut used: BTreeSet<String> = top.node_names().cloned().collect();
    let first = fresh_name(&format!("{node}.1"), &used);
    used.insert(first.clone());
    let second = fresh_name(&format!("{node}.2"), &used);
    let step = Step::new(
        RuleId::Globalization(kind),
        RuleParams::new()
            .with_central("a", &first)
            .with_central("b", &second)
            .with_central("c", node)
            .with_peripheral("Gamma", gamma.clone())
            .with_peripheral("Theta", [left.to_string()])
            .with_peripheral("Omega", [right.to_string()]),
    );
    deriv.prepend_apply(step).expect("splitting a gate between its two parents must apply");
    if let Some(f) = formula_of.get(node).cloned() {
        formula_of.insert(first.clone(), f.clone());
        formula_of.insert(second.clone(), f);
    }
    for child in gamma {
        split_subtree(deriv, formula_of, &child, &first, &second);
    }
    Some((first, second))
}

/// Handles one conjunction introduction at the sequent gate `gate`: wrap
/// shared port members of the principal's node, expand a trade that turns
/// the gate into one sequent gate per conjunct, dissolve the principal's
/// node into the root, copy the shared context into both new gates, and
/// unwrap. Returns the new sequent gates in premise order.
fn trade_member(
    deriv: &mut Derivation,
    formula_of: &mut BTreeMap<String, Formula>,
    gate: &str,
    principal: &Formula,
    kept: bool,
) -> Vec<String> {
    let items = operands(principal);
    let target = member_for(deriv.premise(), formula_of, gate, principal);
    let target = if kept {
        let (_, copy) = split_subtree(deriv, formula_of, &target, gate, gate)
            .expect("a non-literal principal is represented by a gate");
        copy
    } else {
        target
    };

    // A port child of the principal's node may also sit elsewhere among the
    // trade's roles; a throwaway unary gate around it keeps the roles
    // disjoint and is dissolved again right after the trade.
    let mut wrappers = Vec::new();
    let ports: Vec<String> = deriv
        .premise()
        .children(&target)
        .iter()
        .filter(|child| matches!(deriv.premise().label(child), Some(Label::Port(_))))
        .cloned()
        .collect();
    for port in ports {
        let top = deriv.premise();
        let used: BTreeSet<String> = top.node_names().cloned().collect();
        let wrapper = fresh_name(&format!("{port}.w"), &used);
        let mut omega = top.parents(&port).clone();
        omega.remove(&target);
        let step = Step::new(
            RuleId::Shortening(GateKind::Or),
            RuleParams::new()
                .with_central("a", &port)
                .with_central("b", &wrapper)
                .with_peripheral("Theta", [target.clone()])
                .with_peripheral("Omega", omega),
        );
        deriv.prepend_apply(step).expect("wrapping a port member must apply");
        formula_of.insert(wrapper.clone(), formula_of[&port].clone());
        wrappers.push(wrapper);
    }

    let params = trade_params(deriv.premise(), gate, &target);
    let segment = expand_trade(deriv.premise(), &params)
        .expect("a trade assembled from a sequent gate must expand");
    let rest = std::mem::replace(deriv, segment);
    deriv.append(rest);

    let mut groups = Vec::new();
    for i in 1.. {
        match (params.central(&format!("b{i}")), params.central(&format!("c{i}"))) {
            (Some(bi), Some(ci)) => groups.push((bi.to_string(), ci.to_string())),
            _ => break,
        }
    }

    let root = deriv.premise().root().to_string();
    dissolve_member(deriv, &root, &target);

    if groups.len() == 2 {
        for member in params.peripheral("Pi") {
            split_subtree(deriv, formula_of, &member, &groups[0].0, &groups[1].0);
        }
    }
    for wrapper in wrappers {
        let top = deriv.premise();
        let parent = top.parents(&wrapper).first().expect("wrappers keep one parent").clone();
        dissolve_member(deriv, &parent, &wrapper);
    }

    // Premise order: the gate holding the first operand's node comes first.
    // With one group the operands are one equal literal and either premise
    // subtree proves the shared sequent; the first is followed.
    match groups.as_slice() {
        [(only, _)] => vec![only.clone()],
        [(b1, c1), (b2, _)] => {
            if formula_of[c1] == items[0] {
                vec![b1.clone(), b2.clone()]
            } else {
                vec![b2.clone(), b1.clone()]
            }
        }
        _ => unreachable!("a binary principal trades into one or two groups"),
    }
}
