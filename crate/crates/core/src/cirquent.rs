//! The cirquent data model: named nodes labeled with literals or gate kinds,
//! a set of parent→child arcs, and a designated root that reaches every node.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Kind of a gate node: conjunctive (`and`, drawn ∘) or disjunctive
/// (`or`, drawn •). A childless conjunctive gate plays the role of ⊤,
/// a childless disjunctive gate the role of ⊥.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum GateKind {
    And,
    Or,
}

impl GateKind {
    /// The opposite kind.
    pub fn flip(self) -> GateKind {
        match self {
            GateKind::And => GateKind::Or,
            GateKind::Or => GateKind::And,
        }
    }

    /// Keyword used by the text formats (`and` / `or`).
    pub fn keyword(self) -> &'static str {
        match self {
            GateKind::And => "and",
            GateKind::Or => "or",
        }
    }

    /// Inverse of [`GateKind::keyword`].
    pub fn parse(text: &str) -> Option<GateKind> {
        match text {
            "and" => Some(GateKind::And),
            "or" => Some(GateKind::Or),
            _ => None,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// A literal: an atom with a polarity. `P` and `~P` are distinct labels.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Literal {
    pub atom: String,
    pub negated: bool,
}

impl Literal {
    pub fn positive(atom: impl Into<String>) -> Literal {
        Literal { atom: atom.into(), negated: false }
    }

    pub fn negative(atom: impl Into<String>) -> Literal {
        Literal { atom: atom.into(), negated: true }
    }

    /// The literal with the same atom and the opposite polarity.
    pub fn opposite(&self) -> Literal {
        Literal { atom: self.atom.clone(), negated: !self.negated }
    }

    /// Parses `P` or `~P`. Returns `None` when the atom is not an identifier.
    pub fn parse(text: &str) -> Option<Literal> {
        let (negated, atom) = match text.strip_prefix('~') {
            Some(rest) => (true, rest),
            None => (false, text),
        };
        if is_valid_atom(atom) {
            Some(Literal { atom: atom.to_string(), negated })
        } else {
            None
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "~{}", self.atom)
        } else {
            f.write_str(&self.atom)
        }
    }
}

/// Label of a node: a literal for ports, a gate kind for gates.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Label {
    Port(Literal),
    Gate(GateKind),
}

impl Label {
    pub fn is_port(&self) -> bool {
        matches!(self, Label::Port(_))
    }

    pub fn gate_kind(&self) -> Option<GateKind> {
        match self {
            Label::Gate(k) => Some(*k),
            Label::Port(_) => None,
        }
    }

    /// Flips a gate kind or a literal polarity.
    pub fn negate(&self) -> Label {
        match self {
            Label::Port(l) => Label::Port(l.opposite()),
            Label::Gate(k) => Label::Gate(k.flip()),
        }
    }
}

/// Atoms are identifiers: a letter followed by letters, digits or `_`.
pub fn is_valid_atom(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Node names are free-form tokens over `[A-Za-z0-9_~#.-]` that do not start
/// with `#` (a leading `#` starts a comment in the text formats). Numerals,
/// literal-shaped names like `~P`, and generated names like `g#2` are all
/// valid.
pub fn is_valid_node_name(name: &str) -> bool {
    !name.is_empty()
        && !name.starts_with('#')
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '~' | '#' | '.' | '-'))
}

/// Smallest unused name of the form `base` or `base#k`.
pub fn fresh_name(base: &str, used: &BTreeSet<String>) -> String {
    if !used.contains(base) && is_valid_node_name(base) {
        return base.to_string();
    }
    for k in 1.. {
        let candidate = format!("{base}#{k}");
        if !used.contains(&candidate) {
            return candidate;
        }
    }
    unreachable!()
}

/// A finitely-supported atom renaming, the identity outside its support.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct AtomRenaming {
    map: BTreeMap<String, String>,
}

impl AtomRenaming {
    pub fn identity() -> AtomRenaming {
        AtomRenaming::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (String, String)>) -> AtomRenaming {
        AtomRenaming { map: pairs.into_iter().collect() }
    }

    pub fn insert(&mut self, from: impl Into<String>, to: impl Into<String>) {
        self.map.insert(from.into(), to.into());
    }

    pub fn apply(&self, atom: &str) -> String {
        self.map.get(atom).cloned().unwrap_or_else(|| atom.to_string())
    }

    pub fn apply_literal(&self, lit: &Literal) -> Literal {
        Literal { atom: self.apply(&lit.atom), negated: lit.negated }
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&String, &String)> {
        self.map.iter()
    }
}

/// A well-formedness violation found while validating a candidate graph.
#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum Violation {
    #[error("root `{root}` is not a node of the graph")]
    MissingRoot { root: String },
    #[error("edge {parent} -> {child} mentions a node that does not exist")]
    DanglingEdge { parent: String, child: String },
    #[error("port `{port}` has a child `{child}`")]
    PortHasChild { port: String, child: String },
    #[error("the arcs contain a cycle through `{witness}`")]
    CycleDetected { witness: String },
    #[error("node `{node}` is not reachable from the root")]
    UnreachableNode { node: String },
    #[error("`{name}` is not a valid node name")]
    BadNodeName { name: String },
    #[error("`{atom}` is not a valid atom")]
    BadAtom { atom: String },
}

/// A mutable node/arc bag, the construction and editing surface for
/// [`Cirquent`]. Every node has an entry in `children` (empty for ports).
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct GraphData {
    pub labels: BTreeMap<String, Label>,
    pub children: BTreeMap<String, BTreeSet<String>>,
}

impl GraphData {
    pub fn new() -> GraphData {
        GraphData::default()
    }

    pub fn add_node(&mut self, name: impl Into<String>, label: Label) {
        let name = name.into();
        self.children.entry(name.clone()).or_default();
        self.labels.insert(name, label);
    }

    /// Removes a node together with all incident arcs.
    pub fn remove_node(&mut self, name: &str) {
        self.labels.remove(name);
        self.children.remove(name);
        for kids in self.children.values_mut() {
            kids.remove(name);
        }
    }

    pub fn add_edge(&mut self, parent: impl Into<String>, child: impl Into<String>) {
        self.children.entry(parent.into()).or_default().insert(child.into());
    }

    pub fn remove_edge(&mut self, parent: &str, child: &str) {
        if let Some(kids) = self.children.get_mut(parent) {
            kids.remove(child);
        }
    }

    /// Names of nodes that no arc points at.
    pub fn parentless(&self) -> BTreeSet<String> {
        let mut result: BTreeSet<String> = self.labels.keys().cloned().collect();
        for kids in self.children.values() {
            for k in kids {
                result.remove(k);
            }
        }
        result
    }

    /// Repeatedly deletes every non-root node with no incoming arc, together
    /// with its outgoing arcs. The result is order-independent.
    pub fn delete_orphans(&mut self, root: &str) {
        loop {
            let mut orphans = self.parentless();
            orphans.remove(root);
            if orphans.is_empty() {
                return;
            }
            for name in orphans {
                self.remove_node(&name);
            }
        }
    }

    /// Validates the graph with an explicit root, collecting every violated
    /// invariant instead of stopping at the first.
    pub fn validate(self, root: impl Into<String>) -> Result<Cirquent, Vec<Violation>> {
        let root = root.into();
        let mut violations = Vec::new();

        for name in self.labels.keys() {
            if !is_valid_node_name(name) {
                violations.push(Violation::BadNodeName { name: name.clone() });
            }
        }
        for label in self.labels.values() {
            if let Label::Port(lit) = label {
                if !is_valid_atom(&lit.atom) {
                    violations.push(Violation::BadAtom { atom: lit.atom.clone() });
                }
            }
        }
        if !self.labels.contains_key(&root) {
            violations.push(Violation::MissingRoot { root: root.clone() });
        }

        for (parent, kids) in &self.children {
            let parent_label = self.labels.get(parent);
            if parent_label.is_none() && !kids.is_empty() {
                violations.push(Violation::DanglingEdge {
                    parent: parent.clone(),
                    child: kids.iter().next().unwrap().clone(),
                });
                continue;
            }
            for child in kids {
                if !self.labels.contains_key(child) {
                    violations.push(Violation::DanglingEdge {
                        parent: parent.clone(),
                        child: child.clone(),
                    });
                } else if matches!(parent_label, Some(Label::Port(_))) {
                    violations.push(Violation::PortHasChild {
                        port: parent.clone(),
                        child: child.clone(),
                    });
                }
            }
        }

        if !violations.is_empty() {
            // Structural checks below assume an intact node set.
            return Err(violations);
        }

        if let Some(witness) = find_cycle(&self.children) {
            violations.push(Violation::CycleDetected { witness });
        } else {
            let reachable = reachable_from(&self.children, &root);
            for name in self.labels.keys() {
                if !reachable.contains(name) {
                    violations.push(Violation::UnreachableNode { node: name.clone() });
                }
            }
        }

        if violations.is_empty() {
            let parents = invert(&self.children);
            Ok(Cirquent { labels: self.labels, children: self.children, parents, root })
        } else {
            Err(violations)
        }
    }

    /// Validates the graph, taking the unique parentless node as the root.
    pub fn validate_auto_root(self) -> Result<Cirquent, Vec<Violation>> {
        let parentless = self.parentless();
        match parentless.len() {
            1 => {
                let root = parentless.into_iter().next().unwrap();
                self.validate(root)
            }
            0 => Err(vec![Violation::CycleDetected {
                witness: self.labels.keys().next().cloned().unwrap_or_default(),
            }]),
            _ => {
                // Whichever candidate is picked, the others are unreachable;
                // report them all against the first.
                let mut iter = parentless.into_iter();
                let root = iter.next().unwrap();
                match self.validate(root) {
                    Ok(c) => Ok(c),
                    Err(v) => Err(v),
                }
            }
        }
    }
}

fn invert(children: &BTreeMap<String, BTreeSet<String>>) -> BTreeMap<String, BTreeSet<String>> {
    let mut parents: BTreeMap<String, BTreeSet<String>> =
        children.keys().map(|k| (k.clone(), BTreeSet::new())).collect();
    for (parent, kids) in children {
        for child in kids {
            parents.entry(child.clone()).or_default().insert(parent.clone());
        }
    }
    parents
}

fn reachable_from(children: &BTreeMap<String, BTreeSet<String>>, start: &str) -> BTreeSet<String> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![start.to_string()];
    while let Some(name) = stack.pop() {
        if !seen.insert(name.clone()) {
            continue;
        }
        if let Some(kids) = children.get(&name) {
            stack.extend(kids.iter().cloned());
        }
    }
    seen
}

/// Returns a node on some cycle, if one exists.
fn find_cycle(children: &BTreeMap<String, BTreeSet<String>>) -> Option<String> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        White,
        Grey,
        Black,
    }
    let mut marks: BTreeMap<&str, Mark> =
        children.keys().map(|k| (k.as_str(), Mark::White)).collect();

    // Iterative DFS with an explicit stack of (node, child iterator position).
    for start in children.keys() {
        if marks[start.as_str()] != Mark::White {
            continue;
        }
        let mut stack: Vec<(&str, std::collections::btree_set::Iter<'_, String>)> = Vec::new();
        marks.insert(start, Mark::Grey);
        stack.push((start, children[start].iter()));
        while let Some((node, iter)) = stack.last_mut() {
            match iter.next() {
                Some(child) => match marks.get(child.as_str()) {
                    Some(Mark::White) => {
                        marks.insert(child, Mark::Grey);
                        stack.push((child, children[child].iter()));
                    }
                    Some(Mark::Grey) => return Some(child.clone()),
                    Some(Mark::Black) | None => {}
                },
                None => {
                    marks.insert(node, Mark::Black);
                    stack.pop();
                }
            }
        }
    }
    None
}

/// An immutable, validated cirquent.
///
/// Invariants: arcs are acyclic and form a set, ports are childless, every
/// arc endpoint exists, and the root reaches every node (equivalently, the
/// root is the unique parentless node).
#[derive(Clone, Debug)]
pub struct Cirquent {
    labels: BTreeMap<String, Label>,
    children: BTreeMap<String, BTreeSet<String>>,
    parents: BTreeMap<String, BTreeSet<String>>,
    root: String,
}

impl PartialEq for Cirquent {
    fn eq(&self, other: &Cirquent) -> bool {
        self.root == other.root && self.labels == other.labels && self.children == other.children
    }
}

impl Eq for Cirquent {}

impl Cirquent {
    /// Validates raw node/arc data with an explicit root.
    pub fn validate(
        labels: BTreeMap<String, Label>,
        edges: impl IntoIterator<Item = (String, String)>,
        root: impl Into<String>,
    ) -> Result<Cirquent, Vec<Violation>> {
        let mut data = GraphData::new();
        for (name, label) in labels {
            data.add_node(name, label);
        }
        for (parent, child) in edges {
            data.add_edge(parent, child);
        }
        data.validate(root)
    }

    /// The single-gate cirquent consisting of one childless conjunctive gate,
    /// the axiom of the calculus.
    pub fn axiom() -> Cirquent {
        let mut data = GraphData::new();
        data.add_node("1", Label::Gate(GateKind::And));
        data.validate("1").unwrap()
    }

    /// The single-gate childless disjunctive cirquent, the refutation target.
    pub fn counter_axiom() -> Cirquent {
        let mut data = GraphData::new();
        data.add_node("1", Label::Gate(GateKind::Or));
        data.validate("1").unwrap()
    }

    /// True iff this is a single childless conjunctive gate (any node name).
    pub fn is_axiom(&self) -> bool {
        self.labels.len() == 1 && self.label(&self.root) == Some(&Label::Gate(GateKind::And))
    }

    /// True iff this is a single childless disjunctive gate.
    pub fn is_counter_axiom(&self) -> bool {
        self.labels.len() == 1 && self.label(&self.root) == Some(&Label::Gate(GateKind::Or))
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.children.values().map(BTreeSet::len).sum()
    }

    pub fn has_node(&self, name: &str) -> bool {
        self.labels.contains_key(name)
    }

    pub fn label(&self, name: &str) -> Option<&Label> {
        self.labels.get(name)
    }

    pub fn node_names(&self) -> impl Iterator<Item = &String> {
        self.labels.keys()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&String, &Label)> {
        self.labels.iter()
    }

    /// Port names with their literals, in name order.
    pub fn ports(&self) -> impl Iterator<Item = (&String, &Literal)> {
        self.labels.iter().filter_map(|(n, l)| match l {
            Label::Port(lit) => Some((n, lit)),
            Label::Gate(_) => None,
        })
    }

    /// Gate names with their kinds, in name order.
    pub fn gates(&self) -> impl Iterator<Item = (&String, GateKind)> {
        self.labels.iter().filter_map(|(n, l)| match l {
            Label::Gate(k) => Some((n, *k)),
            Label::Port(_) => None,
        })
    }

    pub fn children(&self, name: &str) -> &BTreeSet<String> {
        static EMPTY: BTreeSet<String> = BTreeSet::new();
        self.children.get(name).unwrap_or(&EMPTY)
    }

    pub fn parents(&self, name: &str) -> &BTreeSet<String> {
        static EMPTY: BTreeSet<String> = BTreeSet::new();
        self.parents.get(name).unwrap_or(&EMPTY)
    }

    pub fn edges(&self) -> impl Iterator<Item = (&String, &String)> {
        self.children.iter().flat_map(|(p, kids)| kids.iter().map(move |c| (p, c)))
    }

    /// All atoms occurring in port labels.
    pub fn atoms(&self) -> BTreeSet<String> {
        self.ports().map(|(_, lit)| lit.atom.clone()).collect()
    }

    /// True iff no two ports carry the same label (`P` and `~P` count as
    /// different labels).
    pub fn is_circuit(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.ports().all(|(_, lit)| seen.insert(lit.clone()))
    }

    /// Node names in an order where children come before parents.
    pub fn topo_order_children_first(&self) -> Vec<String> {
        let mut order = Vec::with_capacity(self.labels.len());
        let mut remaining: BTreeMap<&str, usize> =
            self.children.iter().map(|(n, kids)| (n.as_str(), kids.len())).collect();
        let mut queue: Vec<&str> = remaining
            .iter()
            .filter(|(_, deg)| **deg == 0)
            .map(|(n, _)| *n)
            .collect();
        while let Some(node) = queue.pop() {
            order.push(node.to_string());
            for parent in self.parents(node) {
                let deg = remaining.get_mut(parent.as_str()).unwrap();
                *deg -= 1;
                if *deg == 0 {
                    queue.push(parent);
                }
            }
        }
        debug_assert_eq!(order.len(), self.labels.len());
        order
    }

    /// The set of proper descendants of a node.
    pub fn descendants(&self, name: &str) -> BTreeSet<String> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<&String> = self.children(name).iter().collect();
        while let Some(next) = stack.pop() {
            if seen.insert(next.clone()) {
                stack.extend(self.children(next).iter());
            }
        }
        seen
    }

    /// Flips every port label to its opposite and every gate kind to the
    /// other kind, keeping names, arcs and root.
    pub fn negate(&self) -> Cirquent {
        let labels = self.labels.iter().map(|(n, l)| (n.clone(), l.negate())).collect();
        Cirquent {
            labels,
            children: self.children.clone(),
            parents: self.parents.clone(),
            root: self.root.clone(),
        }
    }

    /// Renames atoms inside port labels, preserving polarity and shape.
    pub fn rename_atoms(&self, renaming: &AtomRenaming) -> Cirquent {
        let labels = self
            .labels
            .iter()
            .map(|(n, l)| {
                let l = match l {
                    Label::Port(lit) => Label::Port(renaming.apply_literal(lit)),
                    Label::Gate(k) => Label::Gate(*k),
                };
                (n.clone(), l)
            })
            .collect();
        Cirquent {
            labels,
            children: self.children.clone(),
            parents: self.parents.clone(),
            root: self.root.clone(),
        }
    }

    /// Renames nodes through an injective mapping (identity off its support).
    pub fn rename_nodes(&self, mapping: &BTreeMap<String, String>) -> Result<Cirquent, Violation> {
        let rename = |name: &String| mapping.get(name).unwrap_or(name).clone();
        let mut data = GraphData::new();
        for (name, label) in &self.labels {
            let new = rename(name);
            if data.labels.contains_key(&new) {
                return Err(Violation::BadNodeName { name: new });
            }
            data.add_node(new, label.clone());
        }
        for (parent, child) in self.edges() {
            data.add_edge(rename(parent), rename(child));
        }
        data.validate(rename(&self.root)).map_err(|mut v| v.remove(0))
    }

    pub fn to_graph_data(&self) -> GraphData {
        GraphData { labels: self.labels.clone(), children: self.children.clone() }
    }
}

/// Deletes orphans from edited graph data and re-validates. The companion of
/// arc-deleting transformations.
pub fn delete_orphans(mut data: GraphData, root: &str) -> Result<Cirquent, Vec<Violation>> {
    data.delete_orphans(root);
    data.validate(root)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gate(kind: GateKind) -> Label {
        Label::Gate(kind)
    }

    fn port(text: &str) -> Label {
        Label::Port(Literal::parse(text).unwrap())
    }

    /// A diamond: root ∧ over two ∨ gates sharing a port.
    fn diamond() -> Cirquent {
        let mut g = GraphData::new();
        g.add_node("r", gate(GateKind::And));
        g.add_node("l", gate(GateKind::Or));
        g.add_node("m", gate(GateKind::Or));
        g.add_node("p", port("P"));
        g.add_edge("r", "l");
        g.add_edge("r", "m");
        g.add_edge("l", "p");
        g.add_edge("m", "p");
        g.validate("r").unwrap()
    }

    #[test]
    fn axiom_is_a_single_conjunctive_gate() {
        let ax = Cirquent::axiom();
        assert!(ax.is_axiom());
        assert!(!ax.is_counter_axiom());
        assert_eq!(ax.node_count(), 1);
        assert_eq!(ax.edge_count(), 0);
        assert!(ax.is_circuit());
    }

    #[test]
    fn port_with_child_is_rejected() {
        let mut g = GraphData::new();
        g.add_node("r", port("P"));
        g.add_node("x", port("Q"));
        g.add_edge("r", "x");
        let err = g.validate("r").unwrap_err();
        assert!(err
            .iter()
            .any(|v| matches!(v, Violation::PortHasChild { port, .. } if port == "r")));
    }

    #[test]
    fn cycle_is_rejected() {
        let mut g = GraphData::new();
        g.add_node("a", gate(GateKind::And));
        g.add_node("b", gate(GateKind::Or));
        g.add_edge("a", "b");
        g.add_edge("b", "a");
        let err = g.clone().validate("a").unwrap_err();
        assert!(err.iter().any(|v| matches!(v, Violation::CycleDetected { .. })));
    }

    #[test]
    fn unreachable_node_is_rejected() {
        let mut g = GraphData::new();
        g.add_node("a", gate(GateKind::And));
        g.add_node("b", gate(GateKind::Or));
        let err = g.validate("a").unwrap_err();
        assert_eq!(err, vec![Violation::UnreachableNode { node: "b".into() }]);
    }

    #[test]
    fn dangling_edge_is_rejected() {
        let mut g = GraphData::new();
        g.add_node("a", gate(GateKind::And));
        g.add_edge("a", "ghost");
        let err = g.validate("a").unwrap_err();
        assert_eq!(
            err,
            vec![Violation::DanglingEdge { parent: "a".into(), child: "ghost".into() }]
        );
    }

    #[test]
    fn missing_root_is_rejected() {
        let mut g = GraphData::new();
        g.add_node("a", gate(GateKind::And));
        let err = g.validate("nope").unwrap_err();
        assert!(err.iter().any(|v| matches!(v, Violation::MissingRoot { .. })));
    }

    #[test]
    fn single_port_cirquent_is_legal() {
        let mut g = GraphData::new();
        g.add_node("p", port("~Q"));
        let c = g.validate("p").unwrap();
        assert_eq!(c.root(), "p");
        assert!(c.is_circuit());
    }

    #[test]
    fn shared_port_diamond_is_legal_and_not_a_circuit_question() {
        let c = diamond();
        assert_eq!(c.node_count(), 4);
        assert_eq!(c.edge_count(), 4);
        // One shared port: labels are trivially distinct.
        assert!(c.is_circuit());
        assert_eq!(c.parents("p").len(), 2);
    }

    #[test]
    fn duplicate_labels_break_circuit() {
        let mut g = GraphData::new();
        g.add_node("r", gate(GateKind::Or));
        g.add_node("p1", port("P"));
        g.add_node("p2", port("P"));
        g.add_edge("r", "p1");
        g.add_edge("r", "p2");
        let c = g.validate("r").unwrap();
        assert!(!c.is_circuit());
        // Opposite labels count as different.
        let mut g = GraphData::new();
        g.add_node("r", gate(GateKind::Or));
        g.add_node("p1", port("P"));
        g.add_node("p2", port("~P"));
        g.add_edge("r", "p1");
        g.add_edge("r", "p2");
        assert!(g.validate("r").unwrap().is_circuit());
    }

    #[test]
    fn negate_is_an_involution() {
        let c = diamond();
        let n = c.negate();
        assert_eq!(n.label("r"), Some(&gate(GateKind::Or)));
        assert_eq!(n.label("l"), Some(&gate(GateKind::And)));
        assert_eq!(n.label("p"), Some(&port("~P")));
        assert_eq!(n.negate(), c);
    }

    #[test]
    fn rename_atoms_preserves_shape_and_polarity() {
        let mut g = GraphData::new();
        g.add_node("r", gate(GateKind::And));
        g.add_node("x", port("P"));
        g.add_node("y", port("~Q"));
        g.add_edge("r", "x");
        g.add_edge("r", "y");
        let c = g.validate("r").unwrap();
        let mut ren = AtomRenaming::identity();
        ren.insert("P", "Q");
        let r = c.rename_atoms(&ren);
        assert_eq!(r.label("x"), Some(&port("Q")));
        assert_eq!(r.label("y"), Some(&port("~Q")));
        assert_eq!(r.edge_count(), c.edge_count());
        assert_eq!(c.rename_atoms(&AtomRenaming::identity()), c);
    }

    #[test]
    fn delete_orphans_cascades() {
        // r -> {a}, a -> {p, q}; removing arc r->a orphans a, then p and q.
        let mut g = GraphData::new();
        g.add_node("r", gate(GateKind::Or));
        g.add_node("a", gate(GateKind::And));
        g.add_node("keep", port("K"));
        g.add_node("p", port("P"));
        g.add_edge("r", "a");
        g.add_edge("r", "keep");
        g.add_edge("a", "p");
        g.remove_edge("r", "a");
        let c = delete_orphans(g, "r").unwrap();
        assert!(!c.has_node("a"));
        assert!(!c.has_node("p"));
        assert!(c.has_node("keep"));
    }

    #[test]
    fn delete_orphans_keeps_nodes_with_other_parents() {
        let mut g = GraphData::new();
        g.add_node("r", gate(GateKind::Or));
        g.add_node("a", gate(GateKind::And));
        g.add_node("b", gate(GateKind::And));
        g.add_node("p", port("P"));
        g.add_edge("r", "a");
        g.add_edge("r", "b");
        g.add_edge("a", "p");
        g.add_edge("b", "p");
        g.remove_edge("r", "a");
        let c = delete_orphans(g, "r").unwrap();
        assert!(!c.has_node("a"));
        assert!(c.has_node("p"));
    }

    #[test]
    fn fresh_names_use_hash_counter() {
        let used: BTreeSet<String> = ["b".to_string(), "b#1".to_string()].into();
        assert_eq!(fresh_name("b", &used), "b#2");
        assert_eq!(fresh_name("c", &used), "c");
    }

    #[test]
    fn topo_order_puts_children_first() {
        let c = diamond();
        let order = c.topo_order_children_first();
        let pos = |n: &str| order.iter().position(|x| x == n).unwrap();
        assert!(pos("p") < pos("l"));
        assert!(pos("p") < pos("m"));
        assert!(pos("l") < pos("r"));
        assert_eq!(order.len(), 4);
    }
}
