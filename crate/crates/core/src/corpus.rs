//! Reference cirquents and generators used across tests, benchmarks, and
//! the acceptance suite: the figure fixtures, exhaustive small-cirquent
//! enumeration, and seeded random generators.

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::cirquent::{AtomRenaming, Cirquent, GateKind, GraphData, Label, Literal};
use crate::derivation::Derivation;
use crate::rules::{RuleParams, Step};

fn port(text: &str) -> Label {
    Label::Port(Literal::parse(text).expect("valid literal"))
}

fn and() -> Label {
    Label::Gate(GateKind::And)
}

fn or() -> Label {
    Label::Gate(GateKind::Or)
}

/// Shared-port reading of ¬P ∨ (¬Q∧P) ∨ (P∧¬R) ∨ (Q∧R): the two middle
/// conjunctions use one P-port. Ports are named 1–6 left to right.
pub fn fig2_left() -> Cirquent {
    let mut g = GraphData::new();
    g.add_node("1", port("~P"));
    g.add_node("2", port("~Q"));
    g.add_node("3", port("P"));
    g.add_node("4", port("~R"));
    g.add_node("5", port("Q"));
    g.add_node("6", port("R"));
    g.add_node("a1", and());
    g.add_node("a2", and());
    g.add_node("a3", and());
    g.add_node("r", or());
    for (p, c) in [
        ("a1", "2"),
        ("a1", "3"),
        ("a2", "3"),
        ("a2", "4"),
        ("a3", "5"),
        ("a3", "6"),
        ("r", "1"),
        ("r", "a1"),
        ("r", "a2"),
        ("r", "a3"),
    ] {
        g.add_edge(p, c);
    }
    g.validate("r").unwrap()
}

/// Tree reading of the same formula: two separate P-ports. Ports 1–7 left
/// to right.
pub fn fig2_right() -> Cirquent {
    let mut g = GraphData::new();
    g.add_node("1", port("~P"));
    g.add_node("2", port("~Q"));
    g.add_node("3", port("P"));
    g.add_node("4", port("P"));
    g.add_node("5", port("~R"));
    g.add_node("6", port("Q"));
    g.add_node("7", port("R"));
    g.add_node("a1", and());
    g.add_node("a2", and());
    g.add_node("a3", and());
    g.add_node("r", or());
    for (p, c) in [
        ("a1", "2"),
        ("a1", "3"),
        ("a2", "4"),
        ("a2", "5"),
        ("a3", "6"),
        ("a3", "7"),
        ("r", "1"),
        ("r", "a1"),
        ("r", "a2"),
        ("r", "a3"),
    ] {
        g.add_edge(p, c);
    }
    g.validate("r").unwrap()
}

fn all_atoms_to_p(c: &Cirquent) -> Cirquent {
    let mut renaming = AtomRenaming::identity();
    for atom in c.atoms() {
        renaming.insert(atom, "P");
    }
    c.rename_atoms(&renaming)
}

/// [`fig2_left`] with every atom renamed to P; provable but not a circuit.
pub fn fig3_left() -> Cirquent {
    all_atoms_to_p(&fig2_left())
}

/// [`fig2_right`] with every atom renamed to P; not valid.
pub fn fig3_right() -> Cirquent {
    all_atoms_to_p(&fig2_right())
}

fn pair_tower(pairs_per_side: usize) -> Cirquent {
    let mut g = GraphData::new();
    g.add_node("r", or());
    g.add_node("c1", and());
    g.add_node("c2", and());
    g.add_edge("r", "c1");
    g.add_edge("r", "c2");
    let total = 2 * pairs_per_side;
    for i in 0..total {
        let gate = format!("b{}", i + 1);
        g.add_node(gate.clone(), or());
        let side = if i < pairs_per_side { "c1" } else { "c2" };
        g.add_edge(side, gate.clone());
        let label = if i < pairs_per_side { "~P" } else { "P" };
        for j in 0..2 {
            let p = format!("{}", 2 * i + j + 1);
            g.add_node(p.clone(), port(label));
            g.add_edge(gate.clone(), p);
        }
    }
    g.validate("r").unwrap()
}

/// Valid: ∨ of two ∧-gates, each over two ∨-pairs of like-polarity P-ports.
/// Ports 1–4 are ¬P, ports 5–8 are P.
pub fn fig4() -> Cirquent {
    pair_tower(2)
}

/// The three-pair-per-side analogue of [`fig4`]; not valid. Ports 1–6 are
/// ¬P, ports 7–12 are P.
pub fn fig5() -> Cirquent {
    pair_tower(3)
}

/// Every figure fixture with its validity verdict.
pub fn figure_verdicts() -> Vec<(&'static str, Cirquent, bool)> {
    vec![
        ("fig2-left", fig2_left(), true),
        ("fig2-right", fig2_right(), false),
        ("fig3-left", fig3_left(), true),
        ("fig3-right", fig3_right(), false),
        ("fig4", fig4(), true),
        ("fig5", fig5(), false),
    ]
}

/// A uniformly shaped random cirquent: a root plus `extra` nodes, each
/// non-root node wired under at least one earlier node, gates re-labeled to
/// ports at the leaves. Port labels draw from `atoms` with random polarity.
/// The fully worked twenty-step proof of the shared-conjunct tautology
/// that [`fig2_left`] draws, built by replaying its transcribed steps from
/// the axiom. Its conclusion is [`fig2_left`] up to node renaming.
pub fn worked_proof() -> Derivation {
    use crate::rules::RuleId::*;
    use GateKind::{And, Or};
    let axiom = {
        let mut data = GraphData::new();
        data.add_node("4", and());
        data.validate("4").expect("a lone gate is well-formed")
    };
    let steps: Vec<(crate::rules::RuleId, RuleParams)> = vec![
        (Deepening(And), params(&[("a", "4"), ("b", "2")], &[])),
        (Deepening(And), params(&[("a", "4"), ("b", "3")], &[("Gamma", &["2"])])),
        (
            Coupling,
            params(&[("a", "2"), ("b", "Q"), ("c", "~Q")], &[("Theta", &["4"])]).with_atom("Q"),
        ),
        (
            Coupling,
            params(&[("a", "3"), ("b", "R"), ("c", "~R")], &[("Theta", &["4"])]).with_atom("R"),
        ),
        (Lengthening(Or), params(&[("a", "4"), ("b", "1")], &[("Gamma", &["2", "3"])])),
        (
            Pulldown,
            params(
                &[("a", "2"), ("b", "4"), ("c", "1")],
                &[("Gamma", &["Q"]), ("Pi", &["~Q"]), ("Sigma", &["3"])],
            ),
        ),
        (
            Pulldown,
            params(
                &[("a", "3"), ("b", "4"), ("c", "1")],
                &[("Gamma", &["R"]), ("Delta", &["~Q"]), ("Pi", &["~R"]), ("Sigma", &["2"])],
            ),
        ),
        (Shortening(Or), params(&[("a", "Q"), ("b", "2")], &[("Theta", &["4"])])),
        (Shortening(Or), params(&[("a", "R"), ("b", "3")], &[("Theta", &["4"])])),
        (Lengthening(And), params(&[("a", "~Q"), ("b", "2")], &[("Theta", &["1"])])),
        (Lengthening(And), params(&[("a", "~R"), ("b", "3")], &[("Theta", &["1"])])),
        (
            Deepening(And),
            params(&[("a", "2"), ("b", "5")], &[("Gamma", &["~Q"]), ("Theta", &["1"])]),
        ),
        (
            Deepening(And),
            params(&[("a", "3"), ("b", "6")], &[("Gamma", &["~R"]), ("Theta", &["1"])]),
        ),
        (
            Globalization(And),
            params(&[("a", "5"), ("b", "6"), ("c", "7")], &[("Theta", &["2"]), ("Omega", &["3"])]),
        ),
        (
            Coupling,
            params(&[("a", "7"), ("b", "P"), ("c", "~P")], &[("Theta", &["2", "3"])])
                .with_atom("P"),
        ),
        (
            Localization(Or),
            params(
                &[("a", "5"), ("b", "6"), ("c", "7")],
                &[("Gamma", &["P", "~P"]), ("Theta", &["2"]), ("Omega", &["3"])],
            ),
        ),
        (
            Pulldown,
            params(
                &[("a", "6"), ("b", "3"), ("c", "1")],
                &[
                    ("Gamma", &["P"]),
                    ("Delta", &["2", "4"]),
                    ("Pi", &["~P"]),
                    ("Sigma", &["~R"]),
                ],
            ),
        ),
        (
            Pulldown,
            params(
                &[("a", "5"), ("b", "2"), ("c", "1")],
                &[
                    ("Gamma", &["P"]),
                    ("Delta", &["~P", "3", "4"]),
                    ("Pi", &["~P"]),
                    ("Sigma", &["~Q"]),
                ],
            ),
        ),
        (
            Shortening(Or),
            params(&[("a", "P"), ("b", "6")], &[("Theta", &["3"]), ("Omega", &["5"])]),
        ),
        (
            Shortening(Or),
            params(&[("a", "P"), ("b", "5")], &[("Theta", &["2"]), ("Omega", &["3"])]),
        ),
    ];
    let mut proof = Derivation::single(axiom);
    for (rule, p) in steps {
        proof.push_apply(Step::new(rule, p)).expect("every transcribed step applies");
    }
    proof
}

fn params(centrals: &[(&str, &str)], peripherals: &[(&str, &[&str])]) -> RuleParams {
    let mut p = RuleParams::new();
    for (role, node) in centrals {
        p = p.with_central(role, *node);
    }
    for (role, nodes) in peripherals {
        p = p.with_peripheral(role, nodes.iter().copied());
    }
    p
}

pub fn random_cirquent(rng: &mut StdRng, extra: usize, atoms: &[&str]) -> Cirquent {
    loop {
        let mut g = GraphData::new();
        let n = extra + 1;
        let mut childless: BTreeSet<usize> = BTreeSet::new();
        for i in 0..n {
            childless.insert(i);
        }
        for i in 1..n {
            let parents = 1 + rng.gen_range(0..2.min(i));
            let mut chosen = BTreeSet::new();
            while chosen.len() < parents {
                chosen.insert(rng.gen_range(0..i));
            }
            for p in chosen {
                g.add_edge(format!("n{p}"), format!("n{i}"));
                childless.remove(&p);
            }
        }
        for i in 0..n {
            let name = format!("n{i}");
            let label = if childless.contains(&i) && i != 0 && rng.gen_bool(0.85) {
                let atom = atoms[rng.gen_range(0..atoms.len())];
                let negated = rng.gen_bool(0.5);
                Label::Port(Literal { atom: atom.to_string(), negated })
            } else if rng.gen_bool(0.5) {
                and()
            } else {
                or()
            };
            g.add_node(name, label);
        }
        if let Ok(c) = g.validate("n0") {
            return c;
        }
    }
}

/// Seeded convenience wrapper for reproducible sweeps.
pub fn random_cirquents(seed: u64, count: usize, max_extra: usize) -> Vec<Cirquent> {
    let mut rng = StdRng::seed_from_u64(seed);
    let atoms = ["P", "Q", "R"];
    (0..count)
        .map(|_| {
            let extra = rng.gen_range(1..=max_extra);
            random_cirquent(&mut rng, extra, &atoms)
        })
        .collect()
}

/// Relabels the ports of `c` in name order with `A0`, `~A0`, `A1`, `~A1`,
/// and so on, making the result a circuit that still offers opposite pairs.
pub fn circuitize(c: &Cirquent) -> Cirquent {
    let mut data = GraphData::new();
    for (k, (name, _)) in c.ports().enumerate() {
        let literal = Literal { atom: format!("A{}", k / 2), negated: k % 2 == 1 };
        data.add_node(name, Label::Port(literal));
    }
    for (name, kind) in c.gates() {
        data.add_node(name, Label::Gate(kind));
    }
    for name in c.node_names() {
        for child in c.children(name) {
            data.add_edge(name, child);
        }
    }
    data.validate_auto_root().expect("relabeling ports keeps the graph well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_shapes() {
        assert_eq!(fig2_left().node_count(), 10);
        assert_eq!(fig2_left().edge_count(), 10);
        assert!(fig2_left().is_circuit());
        assert_eq!(fig2_right().node_count(), 11);
        assert!(!fig2_right().is_circuit());
        assert!(!fig3_left().is_circuit());
        assert_eq!(fig3_left().node_count(), 10);
        assert_eq!(fig4().node_count(), 15);
        assert_eq!(fig5().node_count(), 21);
        assert_eq!(fig4().ports().count(), 8);
        assert_eq!(fig5().ports().count(), 12);
    }

    #[test]
    fn figure3_is_the_atom_collapse_of_figure2() {
        let left = fig3_left();
        assert_eq!(left.atoms().len(), 1);
        let numbered_ports = left.ports().count();
        assert_eq!(numbered_ports, 6);
    }

    #[test]
    fn random_generator_is_reproducible() {
        let a = random_cirquents(7, 20, 10);
        let b = random_cirquents(7, 20, 10);
        assert_eq!(a, b);
        assert!(a.iter().any(|c| c.node_count() > 4));
    }
}
