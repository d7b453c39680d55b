//! Proof search: standardization, the trade macro, the rank measure, and a
//! complete bottom-up prover.
//!
//! [`prove`] first decides validity by brute force. On the valid side it
//! generalizes the cirquent to a circuit, restructures that circuit to its
//! standard form, repeatedly trades away non-root conjunctive gates while a
//! big-integer rank certifies progress, finishes with weakenings,
//! localizations, couplings and deepenings down to the axiom, and finally
//! renames the whole proof back onto the original cirquent.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;

use crate::cirquent::{fresh_name, AtomRenaming, Cirquent, GateKind, Label};
use crate::derivation::{lift_instance, Derivation};
use crate::rules::{apply_rule, Direction, RuleError, RuleId, RuleParams, Step};
use crate::semantics::{
    decide_validity_within, generalize_to_circuit, Assignment, SemanticsError, Verdict,
    DEFAULT_PORT_BUDGET,
};

/// True when every non-root gate has exactly one parent, no gate has a child
/// gate of its own kind, and no gate has exactly one child.
pub fn is_standard(c: &Cirquent) -> bool {
    c.gates().all(|(name, kind)| {
        (name == c.root() || c.parents(name).len() == 1)
            && c.children(name).len() != 1
            && c.children(name).iter().all(|child| c.label(child) != Some(&Label::Gate(kind)))
    })
}

/// Splits off one parent of the least-named gate that has several.
fn split_step(c: &Cirquent) -> Option<Step> {
    let (name, kind) =
        c.gates().find(|(name, _)| *name != c.root() && c.parents(name).len() > 1)?;
    let used: BTreeSet<String> = c.node_names().cloned().collect();
    let first = c.parents(name).first().cloned().unwrap();
    let mut rest = c.parents(name).clone();
    rest.remove(&first);
    let a = fresh_name(&format!("{name}.1"), &used);
    let mut used = used;
    used.insert(a.clone());
    let b = fresh_name(&format!("{name}.2"), &used);
    Some(Step::new(
        RuleId::Globalization(kind),
        RuleParams::new()
            .with_central("a", &a)
            .with_central("b", &b)
            .with_central("c", name)
            .with_peripheral("Gamma", c.children(name).clone())
            .with_peripheral("Theta", [first])
            .with_peripheral("Omega", rest),
    ))
}

/// Absorbs the least-named same-kind child gate into its parent.
fn unnest_step(c: &Cirquent) -> Option<Step> {
    for (name, kind) in c.gates() {
        let Some(child) = c
            .children(name)
            .iter()
            .find(|child| c.label(child) == Some(&Label::Gate(kind)))
        else {
            continue;
        };
        let mut gamma = c.children(name).clone();
        gamma.remove(child);
        return Some(Step::new(
            RuleId::Deepening(kind),
            RuleParams::new()
                .with_central("a", name)
                .with_central("b", child)
                .with_peripheral("Gamma", gamma)
                .with_peripheral("Delta", c.children(child).clone())
                .with_peripheral("Theta", c.parents(name).clone()),
        ));
    }
    None
}

/// Removes the least-named gate that has exactly one child.
fn drop_unary_step(c: &Cirquent) -> Option<Step> {
    let (name, kind) = c.gates().find(|(name, _)| c.children(name).len() == 1)?;
    let child = c.children(name).first().cloned().unwrap();
    let mut omega = c.parents(&child).clone();
    omega.remove(name);
    Some(Step::new(
        RuleId::Lengthening(kind),
        RuleParams::new()
            .with_central("a", &child)
            .with_central("b", name)
            .with_peripheral("Gamma", c.children(&child).clone())
            .with_peripheral("Theta", c.parents(name).clone())
            .with_peripheral("Omega", omega),
    ))
}

/// Restructures `c` into its standard form and returns it together with a
/// derivation from the standard form back to `c`.
///
/// The three move kinds (splitting shared gates, flattening same-kind
/// nesting, removing single-child gates) run to a joint fixpoint: dropping
/// a single-child gate can nest two same-kind gates that used to be
/// separated, so one sweep per move kind is not always enough.
pub fn standardize(c: &Cirquent) -> (Cirquent, Derivation) {
    let mut deriv = Derivation::single(c.clone());
    loop {
        let step = {
            let cur = deriv.premise();
            split_step(cur).or_else(|| unnest_step(cur)).or_else(|| drop_unary_step(cur))
        };
        match step {
            Some(step) => {
                deriv.prepend_apply(step).expect("standardization move must apply");
            }
            None => break,
        }
    }
    (deriv.premise().clone(), deriv)
}

/// A big-integer measure of how much conjunctive structure still sits below
/// disjunctive gates. Strictly decreasing across the prover's trade rounds.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Rank {
    pub value: BigUint,
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Disjunctive gates with no disjunctive ancestor, in name order.
fn active_gates(c: &Cirquent) -> Vec<String> {
    c.gates()
        .filter(|(name, kind)| *kind == GateKind::Or && !has_or_ancestor(c, name))
        .map(|(name, _)| name.clone())
        .collect()
}

fn has_or_ancestor(c: &Cirquent, name: &str) -> bool {
    let mut seen = BTreeSet::new();
    let mut stack: Vec<&String> = c.parents(name).iter().collect();
    while let Some(next) = stack.pop() {
        if !seen.insert(next.clone()) {
            continue;
        }
        if c.label(next) == Some(&Label::Gate(GateKind::Or)) {
            return true;
        }
        stack.extend(c.parents(next).iter());
    }
    false
}

/// Sums `s^m` over the active gates of `c`, where `m` counts the conjunctive
/// gates below the active gate.
pub fn rank(c: &Cirquent, s: u64) -> Rank {
    assert!(s >= 2, "the rank base must be at least 2");
    let mut value = BigUint::default();
    for name in active_gates(c) {
        let m = c
            .descendants(&name)
            .iter()
            .filter(|d| matches!(c.label(d), Some(Label::Gate(GateKind::And))))
            .count();
        value += BigUint::from(s).pow(m as u32);
    }
    Rank { value }
}

/// Replays one trade instance as primitive steps: a lengthening, then one
/// pulldown and one shortening per group; with no groups, a lengthening and
/// a weakening. Returns the derivation from the trade's premise to the
/// given conclusion.
pub fn expand_trade(
    conclusion: &Cirquent,
    params: &RuleParams,
) -> Result<Derivation, RuleError> {
    let schema_premise =
        apply_rule(conclusion, &RuleId::Trade, params, Direction::ConclusionToPremise)?;
    let a = params.central("a").unwrap().to_string();
    let b = params.central("b").unwrap().to_string();
    let theta = params.peripheral("Theta");
    let pi = params.peripheral("Pi");
    let mut groups = Vec::new();
    for i in 1.. {
        match (params.central(&format!("b{i}")), params.central(&format!("c{i}"))) {
            (Some(bi), Some(ci)) => groups.push((bi.to_string(), ci.to_string(), i)),
            _ => break,
        }
    }
    let bset: BTreeSet<String> = groups.iter().map(|(bi, _, _)| bi.clone()).collect();

    let mut steps = vec![Step::new(
        RuleId::Lengthening(GateKind::Or),
        RuleParams::new()
            .with_central("a", &a)
            .with_central("b", &b)
            .with_peripheral("Gamma", bset.clone())
            .with_peripheral("Theta", theta.clone()),
    )];
    if groups.is_empty() {
        steps.push(Step::new(
            RuleId::Weakening,
            RuleParams::new()
                .with_central("a", &b)
                .with_peripheral("Gamma", [a.clone()])
                .with_peripheral("Delta", pi)
                .with_peripheral("Theta", theta),
        ));
    } else {
        for (index, (bi, ci, _)) in groups.iter().enumerate() {
            // The shared Pi arcs move down one group at a time, so from the
            // second pulldown on they are already present under `b`.
            let delta = if index == 0 { BTreeSet::new() } else { pi.clone() };
            let mut sigma = bset.clone();
            sigma.remove(bi);
            steps.push(Step::new(
                RuleId::Pulldown,
                RuleParams::new()
                    .with_central("a", bi)
                    .with_central("b", &a)
                    .with_central("c", &b)
                    .with_peripheral("Gamma", [ci.clone()])
                    .with_peripheral("Delta", delta)
                    .with_peripheral("Pi", pi.clone())
                    .with_peripheral("Sigma", sigma)
                    .with_peripheral("Theta", theta.clone()),
            ));
        }
        for (bi, ci, i) in &groups {
            steps.push(Step::new(
                RuleId::Shortening(GateKind::Or),
                RuleParams::new()
                    .with_central("a", ci)
                    .with_central("b", bi)
                    .with_peripheral("Gamma", params.peripheral(&format!("Gamma{i}")))
                    .with_peripheral("Theta", [a.clone()])
                    .with_peripheral("Omega", params.peripheral(&format!("Omega{i}"))),
            ));
        }
    }

    let mut deriv = Derivation::single(conclusion.clone());
    for step in steps.into_iter().rev() {
        deriv.prepend_apply(step)?;
    }
    assert_eq!(
        *deriv.premise(),
        schema_premise,
        "the primitive replay must land on the trade schema's premise"
    );
    Ok(deriv)
}

/// Milestones of a proof construction: the rank base, the rank after
/// destandardizing and after each trade round, and the cirquents reached at
/// the labeled stages "J", "D", "E", "F" and "G".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProverTrace {
    pub s: u64,
    pub ranks: Vec<Rank>,
    pub stages: Vec<(String, Cirquent)>,
}

/// What [`prove`] found: a checking proof with its trace, or the brute-force
/// counterevidence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProveOutcome {
    Proved { proof: Derivation, trace: ProverTrace },
    NotValid { falsifiers: Vec<Assignment> },
}

/// Searches for a proof of `c` with the default port budget, single-worker.
pub fn prove(c: &Cirquent) -> Result<ProveOutcome, SemanticsError> {
    prove_within(c, DEFAULT_PORT_BUDGET, 1)
}

/// Searches for a proof of `c`, deciding validity first with the given port
/// budget and worker count.
pub fn prove_within(
    c: &Cirquent,
    max_ports: usize,
    jobs: usize,
) -> Result<ProveOutcome, SemanticsError> {
    let arrangement = match decide_validity_within(c, max_ports, jobs)? {
        Verdict::NotValid { falsifiers } => return Ok(ProveOutcome::NotValid { falsifiers }),
        Verdict::Valid(arrangement) => arrangement,
    };
    let (circuit, renaming) = generalize_to_circuit(c, &arrangement)?;
    let (proof, trace) = prove_circuit(&circuit, &renaming);
    assert_eq!(proof.conclusion(), c, "the lifted proof must conclude in the input");
    Ok(ProveOutcome::Proved { proof, trace })
}

/// Builds a proof of a valid circuit bottom-up and lifts it through the
/// given renaming. Panics if the input is not a valid circuit.
fn prove_circuit(circuit: &Cirquent, renaming: &AtomRenaming) -> (Derivation, ProverTrace) {
    let (standard, mut deriv) = standardize(circuit);
    let s = (standard.node_count() as u64 + 1).max(2);
    let mut ranks = vec![rank(&standard, s)];
    let mut stages = vec![("J".to_string(), standard)];

    loop {
        let Some((active, principal)) = trade_site(deriv.premise()) else { break };
        for step in isolate_steps(deriv.premise(), &active, &principal) {
            deriv.prepend_apply(step).expect("isolating a shared port must apply");
        }
        let params = trade_params(deriv.premise(), &active, &principal);
        let mut segment = expand_trade(deriv.premise(), &params)
            .expect("a trade assembled from the cirquent must expand");
        segment.append(deriv);
        deriv = segment;
        let (standard, mut segment) = standardize(deriv.premise());
        segment.append(deriv);
        deriv = segment;
        let next = rank(&standard, s);
        assert!(
            next < *ranks.last().unwrap(),
            "a trade round must strictly lower the rank ({next} >= {})",
            ranks.last().unwrap()
        );
        ranks.push(next);
    }
    stages.push(("D".to_string(), deriv.premise().clone()));

    // With no conjunctive gate anywhere, the root is a disjunctive gate over
    // ports; putting a fresh conjunctive root above it reduces this case to
    // the ordinary endgame.
    if deriv.premise().gates().all(|(_, kind)| kind != GateKind::And) {
        let top = deriv.premise();
        let root = top.root().to_string();
        let names: BTreeSet<String> = top.node_names().cloned().collect();
        let gamma = top.children(&root).clone();
        let lid = fresh_name("r", &names);
        deriv
            .prepend_apply(Step::new(
                RuleId::Shortening(GateKind::And),
                RuleParams::new()
                    .with_central("a", &root)
                    .with_central("b", &lid)
                    .with_peripheral("Gamma", gamma),
            ))
            .expect("capping the disjunctive root must apply");
    }

    // E: weaken every disjunctive gate down to its first opposite-label pair.
    let or_gates: Vec<String> = sorted_or_gates(deriv.premise());
    for gate in &or_gates {
        let top = deriv.premise();
        let (pos, neg) = opposite_pair(top, gate)
            .expect("a valid circuit keeps an opposite-labeled pair under every disjunctive gate");
        let mut delta = top.children(gate).clone();
        delta.remove(&pos);
        delta.remove(&neg);
        if delta.is_empty() {
            continue;
        }
        let step = Step::new(
            RuleId::Weakening,
            RuleParams::new()
                .with_central("a", gate)
                .with_peripheral("Gamma", [pos, neg])
                .with_peripheral("Delta", delta)
                .with_peripheral("Theta", top.parents(gate).clone()),
        );
        deriv.prepend_apply(step).expect("trimming a disjunctive gate must apply");
    }
    stages.push(("E".to_string(), deriv.premise().clone()));

    // F: merge disjunctive gates that hold the same pair.
    merge_equal_or_gates(&mut deriv);
    stages.push(("F".to_string(), deriv.premise().clone()));

    // G: replace every pair gate by a childless conjunctive gate.
    couple_pair_gates(&mut deriv);
    stages.push(("G".to_string(), deriv.premise().clone()));

    // Deepenings absorb the childless conjunctive gates into the root.
    absorb_root_children(&mut deriv);
    assert!(deriv.premise().is_axiom(), "the endgame must reach the axiom");

    let deriv = lift_instance(&deriv, renaming);
    (deriv, ProverTrace { s, ranks, stages })
}

/// Merges disjunctive gates with equal child sets pairwise, bottom-up, until
/// all child sets are distinct.
pub(crate) fn merge_equal_or_gates(deriv: &mut Derivation) {
    loop {
        let step = {
            let top = deriv.premise();
            let gates = sorted_or_gates(top);
            let mut found = None;
            'outer: for (i, left) in gates.iter().enumerate() {
                for right in &gates[i + 1..] {
                    if top.children(left) == top.children(right) {
                        found = Some((left.clone(), right.clone()));
                        break 'outer;
                    }
                }
            }
            found.map(|(left, right)| {
                let names: BTreeSet<String> = top.node_names().cloned().collect();
                let merged = fresh_name(&format!("{left}~{right}"), &names);
                Step::new(
                    RuleId::Localization(GateKind::Or),
                    RuleParams::new()
                        .with_central("a", &left)
                        .with_central("b", &right)
                        .with_central("c", &merged)
                        .with_peripheral("Gamma", top.children(&left).clone())
                        .with_peripheral("Theta", top.parents(&left).clone())
                        .with_peripheral("Omega", top.parents(&right).clone()),
                )
            })
        };
        match step {
            Some(step) => {
                deriv.prepend_apply(step).expect("merging equal pairs must apply");
            }
            None => break,
        }
    }
}

/// Replaces every disjunctive gate, each expected to hold an opposite pair of
/// ports, by a childless conjunctive gate, bottom-up.
pub(crate) fn couple_pair_gates(deriv: &mut Derivation) {
    for gate in sorted_or_gates(deriv.premise()) {
        let top = deriv.premise();
        let (pos, neg) =
            opposite_pair(top, &gate).expect("pair gates survive the merge stage");
        let atom = match top.label(&pos) {
            Some(Label::Port(lit)) => lit.atom.clone(),
            _ => unreachable!("pair members are ports"),
        };
        let step = Step::new(
            RuleId::Coupling,
            RuleParams::new()
                .with_central("a", &gate)
                .with_central("b", &pos)
                .with_central("c", &neg)
                .with_atom(&atom)
                .with_peripheral("Theta", top.parents(&gate).clone()),
        );
        deriv.prepend_apply(step).expect("coupling a pair gate must apply");
    }
}

/// Dissolves the root's childless conjunctive children into the root,
/// bottom-up, until the root has no children left.
pub(crate) fn absorb_root_children(deriv: &mut Derivation) {
    loop {
        let step = {
            let top = deriv.premise();
            let root = top.root().to_string();
            top.children(&root).first().map(|child| {
                let mut gamma = top.children(&root).clone();
                gamma.remove(child);
                Step::new(
                    RuleId::Deepening(GateKind::And),
                    RuleParams::new()
                        .with_central("a", &root)
                        .with_central("b", child)
                        .with_peripheral("Gamma", gamma),
                )
            })
        };
        match step {
            Some(step) => {
                deriv.prepend_apply(step).expect("absorbing a childless gate must apply");
            }
            None => break,
        }
    }
}

fn sorted_or_gates(c: &Cirquent) -> Vec<String> {
    c.gates()
        .filter(|(_, kind)| *kind == GateKind::Or)
        .map(|(name, _)| name.clone())
        .collect()
}

/// The first opposite-labeled pair of ports among `gate`'s children, in name
/// order, returned as (positive, negative).
pub(crate) fn opposite_pair(c: &Cirquent, gate: &str) -> Option<(String, String)> {
    let children: Vec<&String> = c.children(gate).iter().collect();
    for (i, left) in children.iter().enumerate() {
        let Some(Label::Port(lit)) = c.label(left) else { continue };
        for right in &children[i + 1..] {
            let Some(Label::Port(other)) = c.label(right) else { continue };
            if *other == lit.opposite() {
                return Some(if lit.negated {
                    ((*right).clone(), (*left).clone())
                } else {
                    ((*left).clone(), (*right).clone())
                });
            }
        }
    }
    None
}

/// The least-named active gate with a conjunctive child, and that child.
fn trade_site(c: &Cirquent) -> Option<(String, String)> {
    for active in active_gates(c) {
        let principal = c
            .children(&active)
            .iter()
            .find(|child| c.label(child) == Some(&Label::Gate(GateKind::And)));
        if let Some(principal) = principal {
            return Some((active, principal.clone()));
        }
    }
    None
}

/// Steps that hang a fresh disjunctive gate over each child port of the
/// principal gate whose other parents would collide with the trade's
/// central roles. After them, those other arcs point at the fresh gate, so
/// every group member and every peripheral set stays clear of the centrals.
fn isolate_steps(c: &Cirquent, active: &str, principal: &str) -> Vec<Step> {
    let mut centrals: BTreeSet<String> = c.children(principal).clone();
    centrals.insert(active.to_string());
    let mut used: BTreeSet<String> = c.node_names().cloned().collect();
    let mut steps = Vec::new();
    for child in c.children(principal) {
        let mut moved = c.parents(child).clone();
        moved.remove(principal);
        if moved.is_disjoint(&centrals) {
            continue;
        }
        let lid = fresh_name(&format!("{child}~"), &used);
        used.insert(lid.clone());
        steps.push(Step::new(
            RuleId::Shortening(GateKind::Or),
            RuleParams::new()
                .with_central("a", child)
                .with_central("b", &lid)
                .with_peripheral("Gamma", c.children(child).clone())
                .with_peripheral("Theta", moved)
                .with_peripheral("Omega", [principal.to_string()]),
        ));
    }
    steps
}

/// Trade parameters for dissolving `principal`, a conjunctive child of the
/// disjunctive gate `active`, with fresh group names derived from the
/// principal's.
pub(crate) fn trade_params(c: &Cirquent, active: &str, principal: &str) -> RuleParams {
    let mut pi = c.children(active).clone();
    pi.remove(principal);
    let mut params = RuleParams::new()
        .with_central("a", principal)
        .with_central("b", active)
        .with_peripheral("Theta", c.parents(active).clone())
        .with_peripheral("Pi", pi);
    let mut used: BTreeSet<String> = c.node_names().cloned().collect();
    for (i, group) in c.children(principal).iter().enumerate() {
        let lid = fresh_name(&format!("{principal}.{}", i + 1), &used);
        used.insert(lid.clone());
        let mut omega = c.parents(group).clone();
        omega.remove(principal);
        params = params
            .with_central(&format!("b{}", i + 1), &lid)
            .with_central(&format!("c{}", i + 1), group)
            .with_peripheral(&format!("Gamma{}", i + 1), c.children(group).clone())
            .with_peripheral(&format!("Omega{}", i + 1), omega);
    }
    params
}
