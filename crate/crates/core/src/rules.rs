//! Inference rules as parameterized, bidirectional, checkable graph rewrites.
//!
//! Every rule instance is fully described by a [`RuleId`] and a set of
//! [`RuleParams`]: named central nodes plus named peripheral node sets.
//! A central node's children and parents are *exactly* the sets stated by
//! the rule's schema equations; everything the equations do not mention is
//! copied verbatim between premise and conclusion. [`apply_rule`] rewrites a
//! cirquent in either direction and [`check_step`] verifies a claimed
//! premise/conclusion pair by recomputing one side and comparing node names,
//! labels and arcs literally.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::cirquent::{
    fresh_name, is_valid_atom, is_valid_node_name, Cirquent, GateKind, Label, Literal,
};

/// Orientation of a rewrite: which side of the rule the given cirquent is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    PremiseToConclusion,
    ConclusionToPremise,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::PremiseToConclusion => Direction::ConclusionToPremise,
            Direction::ConclusionToPremise => Direction::PremiseToConclusion,
        }
    }
}

/// The rule catalog. The six restructuring rules carry the gate kind they
/// operate on; the other rules fix their gate kinds themselves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RuleId {
    Deepening(GateKind),
    Flattening(GateKind),
    Globalization(GateKind),
    Localization(GateKind),
    Lengthening(GateKind),
    Shortening(GateKind),
    Coupling,
    Weakening,
    Pulldown,
    Cocoupling,
    Coweakening,
    Copulldown,
    Merging,
    Comerging,
    Trade,
    Redraw,
}

impl RuleId {
    pub fn base_name(&self) -> &'static str {
        match self {
            RuleId::Deepening(_) => "deepening",
            RuleId::Flattening(_) => "flattening",
            RuleId::Globalization(_) => "globalization",
            RuleId::Localization(_) => "localization",
            RuleId::Lengthening(_) => "lengthening",
            RuleId::Shortening(_) => "shortening",
            RuleId::Coupling => "coupling",
            RuleId::Weakening => "weakening",
            RuleId::Pulldown => "pulldown",
            RuleId::Cocoupling => "cocoupling",
            RuleId::Coweakening => "coweakening",
            RuleId::Copulldown => "copulldown",
            RuleId::Merging => "merging",
            RuleId::Comerging => "comerging",
            RuleId::Trade => "trade",
            RuleId::Redraw => "redraw",
        }
    }

    pub fn flavor(&self) -> Option<GateKind> {
        match self {
            RuleId::Deepening(k)
            | RuleId::Flattening(k)
            | RuleId::Globalization(k)
            | RuleId::Localization(k)
            | RuleId::Lengthening(k)
            | RuleId::Shortening(k) => Some(*k),
            _ => None,
        }
    }

    /// Parses the textual form used in derivation files, e.g.
    /// `deepening/and` or `coupling`.
    pub fn parse(token: &str) -> Option<RuleId> {
        let (name, flavor) = match token.split_once('/') {
            Some((n, f)) => (n, Some(GateKind::parse(f)?)),
            None => (token, None),
        };
        let with_flavor = |make: fn(GateKind) -> RuleId| flavor.map(make);
        let bare = |rule: RuleId| if flavor.is_none() { Some(rule) } else { None };
        match name {
            "deepening" => with_flavor(RuleId::Deepening),
            "flattening" => with_flavor(RuleId::Flattening),
            "globalization" => with_flavor(RuleId::Globalization),
            "localization" => with_flavor(RuleId::Localization),
            "lengthening" => with_flavor(RuleId::Lengthening),
            "shortening" => with_flavor(RuleId::Shortening),
            "coupling" => bare(RuleId::Coupling),
            "weakening" => bare(RuleId::Weakening),
            "pulldown" => bare(RuleId::Pulldown),
            "cocoupling" => bare(RuleId::Cocoupling),
            "coweakening" => bare(RuleId::Coweakening),
            "copulldown" => bare(RuleId::Copulldown),
            "merging" => bare(RuleId::Merging),
            "comerging" => bare(RuleId::Comerging),
            "trade" => bare(RuleId::Trade),
            "redraw" => bare(RuleId::Redraw),
            _ => None,
        }
    }

    /// The rule this one turns into when premise and conclusion are negated
    /// and swapped. An involution.
    pub fn dual(&self) -> RuleId {
        match self {
            RuleId::Deepening(k) => RuleId::Flattening(k.flip()),
            RuleId::Flattening(k) => RuleId::Deepening(k.flip()),
            RuleId::Globalization(k) => RuleId::Localization(k.flip()),
            RuleId::Localization(k) => RuleId::Globalization(k.flip()),
            RuleId::Lengthening(k) => RuleId::Shortening(k.flip()),
            RuleId::Shortening(k) => RuleId::Lengthening(k.flip()),
            RuleId::Coupling => RuleId::Cocoupling,
            RuleId::Cocoupling => RuleId::Coupling,
            RuleId::Weakening => RuleId::Coweakening,
            RuleId::Coweakening => RuleId::Weakening,
            RuleId::Pulldown => RuleId::Copulldown,
            RuleId::Copulldown => RuleId::Pulldown,
            RuleId::Merging => RuleId::Comerging,
            RuleId::Comerging => RuleId::Merging,
            RuleId::Trade => RuleId::Trade,
            RuleId::Redraw => RuleId::Redraw,
        }
    }

    /// True for the six rules that neither create nor destroy ports.
    pub fn is_restructuring(&self) -> bool {
        matches!(
            self,
            RuleId::Deepening(_)
                | RuleId::Flattening(_)
                | RuleId::Globalization(_)
                | RuleId::Localization(_)
                | RuleId::Lengthening(_)
                | RuleId::Shortening(_)
        )
    }

    /// Every rule identifier, both flavors of the flavored ones included.
    pub fn catalog() -> Vec<RuleId> {
        let mut out = Vec::new();
        for kind in [GateKind::And, GateKind::Or] {
            out.extend([
                RuleId::Deepening(kind),
                RuleId::Flattening(kind),
                RuleId::Globalization(kind),
                RuleId::Localization(kind),
                RuleId::Lengthening(kind),
                RuleId::Shortening(kind),
            ]);
        }
        out.extend([
            RuleId::Coupling,
            RuleId::Weakening,
            RuleId::Pulldown,
            RuleId::Cocoupling,
            RuleId::Coweakening,
            RuleId::Copulldown,
            RuleId::Merging,
            RuleId::Comerging,
            RuleId::Trade,
            RuleId::Redraw,
        ]);
        out
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.flavor() {
            Some(kind) => write!(f, "{}/{}", self.base_name(), kind.keyword()),
            None => f.write_str(self.base_name()),
        }
    }
}

/// Named parameters of one rule application: single-node central roles
/// (`a`, `b`, `c`, and `b1`/`c1`... for trade), node-set peripheral roles
/// (`Gamma`, `Delta`, `Theta`, `Omega`, `Sigma`, `Pi`, and indexed
/// `Gamma1`/`Omega1`...), the coupling atom, and the redraw mapping.
/// Empty peripheral sets are not stored; an omitted role means the empty set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleParams {
    centrals: BTreeMap<String, String>,
    peripherals: BTreeMap<String, BTreeSet<String>>,
    atom: Option<String>,
    mapping: Option<BTreeMap<String, String>>,
}

impl RuleParams {
    pub fn new() -> RuleParams {
        RuleParams::default()
    }

    pub fn with_central(mut self, role: &str, node: impl Into<String>) -> RuleParams {
        self.centrals.insert(role.to_string(), node.into());
        self
    }

    pub fn with_peripheral<S: Into<String>>(
        mut self,
        role: &str,
        nodes: impl IntoIterator<Item = S>,
    ) -> RuleParams {
        let set: BTreeSet<String> = nodes.into_iter().map(Into::into).collect();
        if set.is_empty() {
            self.peripherals.remove(role);
        } else {
            self.peripherals.insert(role.to_string(), set);
        }
        self
    }

    pub fn with_atom(mut self, atom: impl Into<String>) -> RuleParams {
        self.atom = Some(atom.into());
        self
    }

    pub fn with_mapping(mut self, mapping: BTreeMap<String, String>) -> RuleParams {
        self.mapping = Some(mapping);
        self
    }

    pub fn central(&self, role: &str) -> Option<&str> {
        self.centrals.get(role).map(String::as_str)
    }

    pub fn peripheral(&self, role: &str) -> BTreeSet<String> {
        self.peripherals.get(role).cloned().unwrap_or_default()
    }

    pub fn atom(&self) -> Option<&str> {
        self.atom.as_deref()
    }

    pub fn mapping(&self) -> Option<&BTreeMap<String, String>> {
        self.mapping.as_ref()
    }

    pub fn centrals(&self) -> impl Iterator<Item = (&String, &String)> {
        self.centrals.iter()
    }

    pub fn peripherals(&self) -> impl Iterator<Item = (&String, &BTreeSet<String>)> {
        self.peripherals.iter()
    }

    fn required(&self, role: &str) -> Result<&str, RuleError> {
        self.central(role)
            .ok_or_else(|| RuleError::ParamViolation {
                condition: format!("central parameter `{role}` is required"),
            })
    }
}

/// One entry of a derivation: the rule and where it is applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub rule: RuleId,
    pub params: RuleParams,
}

impl Step {
    pub fn new(rule: RuleId, params: RuleParams) -> Step {
        Step { rule, params }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("parameter violation: {condition}")]
    ParamViolation { condition: String },
    #[error("`{name}` already names a node of the cirquent, but must be new")]
    FreshNameClash { name: String },
    #[error("the rewrite does not reproduce the stated cirquent: {detail}")]
    ConclusionMismatch { detail: String },
    #[error("parameter enumeration exceeded the budget of {budget} candidates")]
    BudgetExceeded { budget: usize },
}

fn violation(condition: impl Into<String>) -> RuleError {
    RuleError::ParamViolation { condition: condition.into() }
}

fn describe_label(label: &Label) -> String {
    match label {
        Label::Gate(GateKind::And) => "a conjunctive gate".to_string(),
        Label::Gate(GateKind::Or) => "a disjunctive gate".to_string(),
        Label::Port(lit) => format!("a port labeled {lit}"),
    }
}

fn describe_set(set: &BTreeSet<String>) -> String {
    let mut out = String::from("{");
    for (i, name) in set.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(name);
    }
    out.push('}');
    out
}

/// A central node's full description on one side of a rule: its label and
/// its exact neighborhoods, with the defining role expressions kept for
/// error reporting.
struct NodeSpec {
    name: String,
    label: Label,
    children: BTreeSet<String>,
    children_rule: String,
    parents: BTreeSet<String>,
    parents_rule: String,
}

impl NodeSpec {
    fn new(name: &str, label: Label) -> NodeSpec {
        NodeSpec {
            name: name.to_string(),
            label,
            children: BTreeSet::new(),
            children_rule: "{}".to_string(),
            parents: BTreeSet::new(),
            parents_rule: "{}".to_string(),
        }
    }

    fn children(mut self, nodes: BTreeSet<String>, rule: impl Into<String>) -> NodeSpec {
        self.children = nodes;
        self.children_rule = rule.into();
        self
    }

    fn parents(mut self, nodes: BTreeSet<String>, rule: impl Into<String>) -> NodeSpec {
        self.parents = nodes;
        self.parents_rule = rule.into();
        self
    }
}

type Side = Vec<NodeSpec>;

fn union(a: &BTreeSet<String>, b: &BTreeSet<String>) -> BTreeSet<String> {
    a.union(b).cloned().collect()
}

fn with(mut set: BTreeSet<String>, extra: &str) -> BTreeSet<String> {
    set.insert(extra.to_string());
    set
}

fn singleton(name: &str) -> BTreeSet<String> {
    BTreeSet::from([name.to_string()])
}

/// Strips flavored inverse pairs down to one base schema each. The returned
/// direction is relative to the base schema.
fn normalize(rule: &RuleId, direction: Direction) -> (RuleId, Direction) {
    match rule {
        RuleId::Flattening(k) => (RuleId::Deepening(*k), direction.flip()),
        RuleId::Localization(k) => (RuleId::Globalization(*k), direction.flip()),
        RuleId::Shortening(k) => (RuleId::Lengthening(*k), direction.flip()),
        other => (*other, direction),
    }
}

/// The roles a rule accepts. Trade is validated separately because its role
/// names are indexed.
fn role_whitelist(base: &RuleId) -> (&'static [&'static str], &'static [&'static str], bool) {
    match base {
        RuleId::Deepening(_) => (&["a", "b"], &["Gamma", "Delta", "Theta"], false),
        RuleId::Globalization(_) => (&["a", "b", "c"], &["Gamma", "Theta", "Omega"], false),
        RuleId::Lengthening(_) => (&["a", "b"], &["Gamma", "Theta", "Omega"], false),
        RuleId::Coupling | RuleId::Cocoupling => (&["a", "b", "c"], &["Theta"], true),
        RuleId::Weakening | RuleId::Coweakening => (&["a"], &["Gamma", "Delta", "Theta"], false),
        RuleId::Pulldown | RuleId::Copulldown => {
            (&["a", "b", "c"], &["Gamma", "Delta", "Theta", "Sigma", "Pi"], false)
        }
        RuleId::Merging | RuleId::Comerging => {
            (&["a", "b", "c"], &["Gamma", "Delta", "Theta", "Omega"], false)
        }
        _ => (&[], &[], false),
    }
}

fn validate_roles(base: &RuleId, params: &RuleParams) -> Result<(), RuleError> {
    if params.mapping.is_some() {
        return Err(violation("only redraw takes a node mapping"));
    }
    let (centrals, peripherals, needs_atom) = role_whitelist(base);
    if needs_atom {
        match params.atom() {
            None => return Err(violation("an atom parameter is required")),
            Some(atom) if !is_valid_atom(atom) => {
                return Err(violation(format!("`{atom}` is not a valid atom name")));
            }
            Some(_) => {}
        }
    } else if params.atom.is_some() {
        return Err(violation(format!("{} takes no atom parameter", base.base_name())));
    }
    if matches!(base, RuleId::Trade) {
        return validate_trade_roles(params);
    }
    for role in params.centrals.keys() {
        if !centrals.contains(&role.as_str()) {
            return Err(violation(format!(
                "{} has no central parameter `{role}`",
                base.base_name()
            )));
        }
    }
    for role in params.peripherals.keys() {
        if !peripherals.contains(&role.as_str()) {
            return Err(violation(format!(
                "{} has no peripheral parameter `{role}`",
                base.base_name()
            )));
        }
    }
    Ok(())
}

/// Trade takes `a`, `b`, and matched runs `b1..bn`, `c1..cn` with optional
/// `Gamma1..Gamman`, `Omega1..Omegan`. Returns the run length.
fn trade_arity(params: &RuleParams) -> Result<usize, RuleError> {
    let mut n = 0;
    while params.central(&format!("b{}", n + 1)).is_some()
        || params.central(&format!("c{}", n + 1)).is_some()
    {
        n += 1;
        if params.central(&format!("b{n}")).is_none() || params.central(&format!("c{n}")).is_none()
        {
            return Err(violation(format!("trade requires both `b{n}` and `c{n}`")));
        }
    }
    Ok(n)
}

fn validate_trade_roles(params: &RuleParams) -> Result<(), RuleError> {
    let n = trade_arity(params)?;
    for role in params.centrals.keys() {
        let ok = role == "a"
            || role == "b"
            || role
                .strip_prefix('b')
                .or_else(|| role.strip_prefix('c'))
                .and_then(|i| i.parse::<usize>().ok())
                .is_some_and(|i| 1 <= i && i <= n);
        if !ok {
            return Err(violation(format!("trade has no central parameter `{role}`")));
        }
    }
    for role in params.peripherals.keys() {
        let ok = role == "Theta"
            || role == "Pi"
            || role
                .strip_prefix("Gamma")
                .or_else(|| role.strip_prefix("Omega"))
                .and_then(|i| i.parse::<usize>().ok())
                .is_some_and(|i| 1 <= i && i <= n);
        if !ok {
            return Err(violation(format!("trade has no peripheral parameter `{role}`")));
        }
    }
    Ok(())
}

/// Builds the premise-side and conclusion-side node descriptions of the base
/// schema under the given parameters. Labels that a rule inherits rather
/// than fixes are resolved against `source`.
fn build_sides(
    base: &RuleId,
    params: &RuleParams,
    source: &Cirquent,
) -> Result<(Side, Side), RuleError> {
    let keep = |name: &str| -> Result<Label, RuleError> {
        source
            .label(name)
            .cloned()
            .ok_or_else(|| violation(format!("`{name}` is not a node of the cirquent")))
    };
    match base {
        RuleId::Deepening(k) => {
            let a = params.required("a")?;
            let b = params.required("b")?;
            let gamma = params.peripheral("Gamma");
            let delta = params.peripheral("Delta");
            let theta = params.peripheral("Theta");
            let premise = vec![NodeSpec::new(a, Label::Gate(*k))
                .children(union(&gamma, &delta), "Gamma + Delta")
                .parents(theta.clone(), "Theta")];
            let conclusion = vec![
                NodeSpec::new(a, Label::Gate(*k))
                    .children(with(gamma, b), "Gamma + {b}")
                    .parents(theta, "Theta"),
                NodeSpec::new(b, Label::Gate(*k))
                    .children(delta, "Delta")
                    .parents(singleton(a), "{a}"),
            ];
            Ok((premise, conclusion))
        }
        RuleId::Globalization(k) => {
            let a = params.required("a")?;
            let b = params.required("b")?;
            let c = params.required("c")?;
            let gamma = params.peripheral("Gamma");
            let theta = params.peripheral("Theta");
            let omega = params.peripheral("Omega");
            let premise = vec![
                NodeSpec::new(a, Label::Gate(*k))
                    .children(gamma.clone(), "Gamma")
                    .parents(theta.clone(), "Theta"),
                NodeSpec::new(b, Label::Gate(*k))
                    .children(gamma.clone(), "Gamma")
                    .parents(omega.clone(), "Omega"),
            ];
            let conclusion = vec![NodeSpec::new(c, Label::Gate(*k))
                .children(gamma, "Gamma")
                .parents(union(&theta, &omega), "Theta + Omega")];
            Ok((premise, conclusion))
        }
        RuleId::Lengthening(k) => {
            let a = params.required("a")?;
            let b = params.required("b")?;
            let gamma = params.peripheral("Gamma");
            let theta = params.peripheral("Theta");
            let omega = params.peripheral("Omega");
            let a_label = keep(a)?;
            let premise = vec![NodeSpec::new(a, a_label.clone())
                .children(gamma.clone(), "Gamma")
                .parents(union(&theta, &omega), "Theta + Omega")];
            let conclusion = vec![
                NodeSpec::new(a, a_label)
                    .children(gamma, "Gamma")
                    .parents(with(omega, b), "Omega + {b}"),
                NodeSpec::new(b, Label::Gate(*k))
                    .children(singleton(a), "{a}")
                    .parents(theta, "Theta"),
            ];
            Ok((premise, conclusion))
        }
        RuleId::Coupling | RuleId::Cocoupling => {
            let a = params.required("a")?;
            let b = params.required("b")?;
            let c = params.required("c")?;
            let theta = params.peripheral("Theta");
            let atom = params.atom().expect("atom checked by validate_roles");
            let pos = Label::Port(Literal { atom: atom.to_string(), negated: false });
            let neg = Label::Port(Literal { atom: atom.to_string(), negated: true });
            let lone = |kind| {
                vec![NodeSpec::new(a, Label::Gate(kind))
                    .children(BTreeSet::new(), "{}")
                    .parents(theta.clone(), "Theta")]
            };
            let split = |kind| {
                vec![
                    NodeSpec::new(a, Label::Gate(kind))
                        .children(BTreeSet::from([b.to_string(), c.to_string()]), "{b, c}")
                        .parents(theta.clone(), "Theta"),
                    NodeSpec::new(b, pos.clone()).parents(singleton(a), "{a}"),
                    NodeSpec::new(c, neg.clone()).parents(singleton(a), "{a}"),
                ]
            };
            Ok(match base {
                RuleId::Coupling => (lone(GateKind::And), split(GateKind::Or)),
                _ => (split(GateKind::And), lone(GateKind::Or)),
            })
        }
        RuleId::Weakening | RuleId::Coweakening => {
            let a = params.required("a")?;
            let gamma = params.peripheral("Gamma");
            let delta = params.peripheral("Delta");
            let theta = params.peripheral("Theta");
            let kind = if matches!(base, RuleId::Weakening) { GateKind::Or } else { GateKind::And };
            let narrow = vec![NodeSpec::new(a, Label::Gate(kind))
                .children(gamma.clone(), "Gamma")
                .parents(theta.clone(), "Theta")];
            let wide = vec![NodeSpec::new(a, Label::Gate(kind))
                .children(union(&gamma, &delta), "Gamma + Delta")
                .parents(theta, "Theta")];
            Ok(match base {
                RuleId::Weakening => (narrow, wide),
                _ => (wide, narrow),
            })
        }
        RuleId::Pulldown | RuleId::Copulldown => {
            let a = params.required("a")?;
            let b = params.required("b")?;
            let c = params.required("c")?;
            let gamma = params.peripheral("Gamma");
            let delta = params.peripheral("Delta");
            let theta = params.peripheral("Theta");
            let sigma = params.peripheral("Sigma");
            let pi = params.peripheral("Pi");
            let (outer, inner) = match base {
                RuleId::Pulldown => (GateKind::Or, GateKind::And),
                _ => (GateKind::And, GateKind::Or),
            };
            let tower = |a_children: BTreeSet<String>,
                         a_rule: &str,
                         c_children: BTreeSet<String>,
                         c_rule: &str| {
                vec![
                    NodeSpec::new(a, Label::Gate(outer))
                        .children(a_children, a_rule)
                        .parents(singleton(b), "{b}"),
                    NodeSpec::new(b, Label::Gate(inner))
                        .children(with(sigma.clone(), a), "Sigma + {a}")
                        .parents(singleton(c), "{c}"),
                    NodeSpec::new(c, Label::Gate(outer))
                        .children(c_children, c_rule)
                        .parents(theta.clone(), "Theta"),
                ]
            };
            let pi_deep = tower(
                union(&gamma, &pi),
                "Gamma + Pi",
                with(delta.clone(), b),
                "Delta + {b}",
            );
            let pi_shallow = tower(
                gamma.clone(),
                "Gamma",
                with(union(&delta, &pi), b),
                "Delta + Pi + {b}",
            );
            Ok(match base {
                RuleId::Pulldown => (pi_deep, pi_shallow),
                _ => (pi_shallow, pi_deep),
            })
        }
        RuleId::Merging | RuleId::Comerging => {
            let a = params.required("a")?;
            let b = params.required("b")?;
            let c = params.required("c")?;
            let gamma = params.peripheral("Gamma");
            let delta = params.peripheral("Delta");
            let theta = params.peripheral("Theta");
            let omega = params.peripheral("Omega");
            let kind = if matches!(base, RuleId::Merging) { GateKind::Or } else { GateKind::And };
            let two = vec![
                NodeSpec::new(b, Label::Gate(kind))
                    .children(gamma.clone(), "Gamma")
                    .parents(theta.clone(), "Theta"),
                NodeSpec::new(c, Label::Gate(kind))
                    .children(delta.clone(), "Delta")
                    .parents(omega.clone(), "Omega"),
            ];
            let one = vec![NodeSpec::new(a, Label::Gate(kind))
                .children(union(&gamma, &delta), "Gamma + Delta")
                .parents(union(&theta, &omega), "Theta + Omega")];
            Ok(match base {
                RuleId::Merging => (two, one),
                _ => (one, two),
            })
        }
        RuleId::Trade => {
            let n = trade_arity(params)?;
            let a = params.required("a")?;
            let b = params.required("b")?;
            let theta = params.peripheral("Theta");
            let pi = params.peripheral("Pi");
            let mut bs = Vec::new();
            let mut cs = Vec::new();
            for i in 1..=n {
                bs.push(params.required(&format!("b{i}"))?.to_string());
                cs.push(params.required(&format!("c{i}"))?.to_string());
            }
            let mut premise = vec![NodeSpec::new(a, Label::Gate(GateKind::And))
                .children(bs.iter().cloned().collect(), "{b1..bn}")
                .parents(theta.clone(), "Theta")];
            let mut conclusion = vec![
                NodeSpec::new(b, Label::Gate(GateKind::Or))
                    .children(with(pi.clone(), a), "Pi + {a}")
                    .parents(theta.clone(), "Theta"),
                NodeSpec::new(a, Label::Gate(GateKind::And))
                    .children(cs.iter().cloned().collect(), "{c1..cn}")
                    .parents(singleton(b), "{b}"),
            ];
            for i in 1..=n {
                let bi = &bs[i - 1];
                let ci = &cs[i - 1];
                let gamma_i = params.peripheral(&format!("Gamma{i}"));
                let omega_i = params.peripheral(&format!("Omega{i}"));
                premise.push(
                    NodeSpec::new(bi, Label::Gate(GateKind::Or))
                        .children(with(pi.clone(), ci), format!("Pi + {{c{i}}}"))
                        .parents(singleton(a), "{a}"),
                );
                premise.push(
                    NodeSpec::new(ci, keep(ci)?)
                        .children(gamma_i.clone(), format!("Gamma{i}"))
                        .parents(with(omega_i.clone(), bi), format!("Omega{i} + {{b{i}}}")),
                );
                conclusion.push(
                    NodeSpec::new(ci, keep(ci)?)
                        .children(gamma_i, format!("Gamma{i}"))
                        .parents(with(omega_i, a), format!("Omega{i} + {{a}}")),
                );
            }
            Ok((premise, conclusion))
        }
        RuleId::Redraw | RuleId::Flattening(_) | RuleId::Localization(_) | RuleId::Shortening(_) => {
            unreachable!("normalized before schema construction")
        }
    }
}

fn apply_redraw(
    c: &Cirquent,
    params: &RuleParams,
    direction: Direction,
) -> Result<Cirquent, RuleError> {
    if !params.centrals.is_empty() || !params.peripherals.is_empty() || params.atom.is_some() {
        return Err(violation("redraw takes only a node mapping"));
    }
    let mapping = params
        .mapping()
        .ok_or_else(|| violation("redraw requires a node mapping"))?;
    let oriented: BTreeMap<String, String> = match direction {
        Direction::PremiseToConclusion => mapping.clone(),
        Direction::ConclusionToPremise => {
            let mut inverted = BTreeMap::new();
            for (old, new) in mapping {
                if inverted.insert(new.clone(), old.clone()).is_some() {
                    return Err(violation(format!(
                        "redraw mapping sends two nodes to `{new}` and cannot be reversed"
                    )));
                }
            }
            inverted
        }
    };
    for old in oriented.keys() {
        if !c.has_node(old) {
            return Err(violation(format!(
                "redraw mapping names `{old}`, which is not a node of the cirquent"
            )));
        }
    }
    c.rename_nodes(&oriented)
        .map_err(|v| violation(format!("redraw mapping is not a clean renaming: {v}")))
}

/// Rewrites `c` across one rule instance. With `PremiseToConclusion` the
/// given cirquent is the premise and the conclusion is returned; the other
/// direction reverses that. All names of created nodes come from the
/// parameters, so a rewrite followed by its reverse restores the original
/// cirquent exactly.
pub fn apply_rule(
    c: &Cirquent,
    rule: &RuleId,
    params: &RuleParams,
    direction: Direction,
) -> Result<Cirquent, RuleError> {
    if matches!(rule, RuleId::Redraw) {
        return apply_redraw(c, params, direction);
    }
    let (base, dir) = normalize(rule, direction);
    validate_roles(&base, params)?;

    let mut seen: BTreeMap<&String, &String> = BTreeMap::new();
    for (role, name) in params.centrals() {
        if let Some(other) = seen.insert(name, role) {
            return Err(violation(format!(
                "central parameters must be pairwise distinct, but `{other}` and `{role}` are both `{name}`"
            )));
        }
    }
    let central_names: BTreeSet<&str> =
        params.centrals.values().map(String::as_str).collect();
    for (role, set) in params.peripherals() {
        for member in set {
            if central_names.contains(member.as_str()) {
                return Err(violation(format!(
                    "peripheral `{role}` contains the central node `{member}`"
                )));
            }
            if !c.has_node(member) {
                return Err(violation(format!(
                    "peripheral `{role}` names `{member}`, which is not a node of the cirquent"
                )));
            }
        }
    }

    let (premise, conclusion) = build_sides(&base, params, c)?;
    let (src, tgt) = match dir {
        Direction::PremiseToConclusion => (&premise, &conclusion),
        Direction::ConclusionToPremise => (&conclusion, &premise),
    };

    for spec in src {
        let label = c
            .label(&spec.name)
            .ok_or_else(|| violation(format!("`{}` is not a node of the cirquent", spec.name)))?;
        if *label != spec.label {
            return Err(violation(format!(
                "`{}` must be {}, found {}",
                spec.name,
                describe_label(&spec.label),
                describe_label(label)
            )));
        }
        if *c.children(&spec.name) != spec.children {
            return Err(violation(format!(
                "children of `{}` must be {} = {}, found {}",
                spec.name,
                spec.children_rule,
                describe_set(&spec.children),
                describe_set(c.children(&spec.name))
            )));
        }
        if *c.parents(&spec.name) != spec.parents {
            return Err(violation(format!(
                "parents of `{}` must be {} = {}, found {}",
                spec.name,
                spec.parents_rule,
                describe_set(&spec.parents),
                describe_set(c.parents(&spec.name))
            )));
        }
    }

    let src_names: BTreeSet<&str> = src.iter().map(|s| s.name.as_str()).collect();
    for spec in tgt {
        if src_names.contains(spec.name.as_str()) {
            continue;
        }
        if c.has_node(&spec.name) {
            return Err(match spec.label {
                Label::Port(_) => RuleError::FreshNameClash { name: spec.name.clone() },
                Label::Gate(_) => violation(format!(
                    "`{}` must be a new node, but already occurs in the cirquent",
                    spec.name
                )),
            });
        }
        if !is_valid_node_name(&spec.name) {
            return Err(violation(format!("`{}` is not a valid node name", spec.name)));
        }
    }

    let mut data = c.to_graph_data();
    for name in &src_names {
        data.children.insert(name.to_string(), BTreeSet::new());
        for kids in data.children.values_mut() {
            kids.remove(*name);
        }
    }
    let tgt_names: BTreeSet<&str> = tgt.iter().map(|s| s.name.as_str()).collect();
    for name in &src_names {
        if !tgt_names.contains(name) {
            data.remove_node(name);
        }
    }
    for spec in tgt {
        data.labels.insert(spec.name.clone(), spec.label.clone());
        data.children.entry(spec.name.clone()).or_default();
    }
    for spec in tgt {
        for child in &spec.children {
            data.add_edge(spec.name.clone(), child.clone());
        }
        for parent in &spec.parents {
            data.add_edge(parent.clone(), spec.name.clone());
        }
    }
    let cascade_root = match base {
        RuleId::Weakening | RuleId::Coweakening => Some(c.root().to_string()),
        // Reversing a trade removes `b`, so exclusively-held children of `b`
        // vanish with it, and `a` takes over as root when `b` was the root.
        RuleId::Trade if dir == Direction::ConclusionToPremise => {
            let a = params.central("a").unwrap_or_default();
            let b = params.central("b").unwrap_or_default();
            Some(if c.root() == b { a.to_string() } else { c.root().to_string() })
        }
        _ => None,
    };
    if let Some(root) = cascade_root {
        data.delete_orphans(&root);
    }
    data.validate_auto_root().map_err(|violations| {
        let detail: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        violation(format!("the rewrite is not a well-formed cirquent: {}", detail.join("; ")))
    })
}

/// Reports the first discrepancy between the recomputed cirquent and the
/// stated one.
fn first_difference(computed: &Cirquent, stated: &Cirquent, side: &str) -> String {
    for (name, label) in computed.nodes() {
        match stated.label(name) {
            None => return format!("the recomputed {side} contains `{name}`, the stated one does not"),
            Some(other) if other != label => {
                return format!(
                    "`{name}` is {} in the recomputed {side} but {} in the stated one",
                    describe_label(label),
                    describe_label(other)
                );
            }
            Some(_) => {}
        }
    }
    for (name, _) in stated.nodes() {
        if !computed.has_node(name) {
            return format!("the stated {side} contains `{name}`, the recomputed one does not");
        }
    }
    for (name, _) in computed.nodes() {
        if computed.children(name) != stated.children(name) {
            return format!(
                "children of `{name}` are {} in the recomputed {side} but {} in the stated one",
                describe_set(computed.children(name)),
                describe_set(stated.children(name))
            );
        }
    }
    if computed.root() != stated.root() {
        return format!(
            "the recomputed {side} is rooted at `{}`, the stated one at `{}`",
            computed.root(),
            stated.root()
        );
    }
    format!("the recomputed and stated {side} differ in no visible way")
}

/// Verifies that `conclusion` follows from `premise` by the given step.
/// Weakening and trade are checked conclusion-to-premise, because their
/// Delta and Pi may name nodes that exist only in the conclusion; every
/// other rule is checked by recomputing the conclusion from the premise.
pub fn check_step(
    premise: &Cirquent,
    conclusion: &Cirquent,
    step: &Step,
) -> Result<(), RuleError> {
    if matches!(step.rule, RuleId::Weakening | RuleId::Trade) {
        let computed = apply_rule(conclusion, &step.rule, &step.params, Direction::ConclusionToPremise)?;
        if computed != *premise {
            return Err(RuleError::ConclusionMismatch {
                detail: first_difference(&computed, premise, "premise"),
            });
        }
    } else {
        let computed = apply_rule(premise, &step.rule, &step.params, Direction::PremiseToConclusion)?;
        if computed != *conclusion {
            return Err(RuleError::ConclusionMismatch {
                detail: first_difference(&computed, conclusion, "conclusion"),
            });
        }
    }
    Ok(())
}

/// True iff every port of the premise survives into the conclusion with the
/// same name and label.
pub fn is_i_analytic_step(premise: &Cirquent, conclusion: &Cirquent) -> bool {
    premise.ports().all(|(name, lit)| {
        matches!(conclusion.label(name), Some(Label::Port(other)) if other == lit)
    })
}

struct Enumerator {
    budget: usize,
    tried: usize,
}

impl Enumerator {
    fn charge(&mut self, count: usize) -> Result<(), RuleError> {
        self.tried = self.tried.saturating_add(count);
        if self.tried > self.budget {
            Err(RuleError::BudgetExceeded { budget: self.budget })
        } else {
            Ok(())
        }
    }
}

/// All ways to cover `set` by an ordered pair of possibly overlapping
/// subsets, as the rules' `Gamma + Delta`-style unions allow.
fn covers(set: &BTreeSet<String>) -> Vec<(BTreeSet<String>, BTreeSet<String>)> {
    let items: Vec<&String> = set.iter().collect();
    let mut out = Vec::new();
    let mut assignment = vec![0u8; items.len()];
    loop {
        let mut left = BTreeSet::new();
        let mut right = BTreeSet::new();
        for (i, which) in assignment.iter().enumerate() {
            match which {
                0 => {
                    left.insert(items[i].clone());
                }
                1 => {
                    right.insert(items[i].clone());
                }
                _ => {
                    left.insert(items[i].clone());
                    right.insert(items[i].clone());
                }
            }
        }
        out.push((left, right));
        let mut i = 0;
        loop {
            if i == assignment.len() {
                return out;
            }
            assignment[i] += 1;
            if assignment[i] < 3 {
                break;
            }
            assignment[i] = 0;
            i += 1;
        }
    }
}

fn subsets(set: &BTreeSet<String>) -> Vec<BTreeSet<String>> {
    let items: Vec<&String> = set.iter().collect();
    let mut out = Vec::new();
    for mask in 0u64..(1 << items.len()) {
        out.push(
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, n)| (*n).clone())
                .collect(),
        );
    }
    out
}

fn cover_cost(set: &BTreeSet<String>) -> usize {
    3usize.saturating_pow(set.len() as u32)
}

fn subset_cost(set: &BTreeSet<String>) -> usize {
    1usize.checked_shl(set.len() as u32).unwrap_or(usize::MAX)
}

/// Lists every parameter assignment under which [`apply_rule`] succeeds on
/// `c` in the given direction, canonicalizing the free choices: nodes the
/// rule creates take the first fresh name for their role, and coupling atoms
/// range over the cirquent's atoms plus one fresh atom. The budget bounds
/// the number of candidate assignments examined.
pub fn enumerate_params(
    c: &Cirquent,
    rule: &RuleId,
    direction: Direction,
    budget: usize,
) -> Result<Vec<RuleParams>, RuleError> {
    let mut meter = Enumerator { budget, tried: 0 };
    let candidates = collect_candidates(c, rule, direction, &mut meter)?;
    let mut out = Vec::new();
    for params in candidates {
        if apply_rule(c, rule, &params, direction).is_ok() {
            out.push(params);
        }
    }
    Ok(out)
}

fn collect_candidates(
    c: &Cirquent,
    rule: &RuleId,
    direction: Direction,
    meter: &mut Enumerator,
) -> Result<Vec<RuleParams>, RuleError> {
    if matches!(rule, RuleId::Redraw) {
        meter.charge(1)?;
        return Ok(vec![RuleParams::new().with_mapping(BTreeMap::new())]);
    }
    let (base, dir) = normalize(rule, direction);
    let used: BTreeSet<String> = c.node_names().cloned().collect();
    let fresh = |role: &str, also: &[&str]| {
        let mut taken = used.clone();
        for name in also {
            taken.insert(name.to_string());
        }
        fresh_name(role, &taken)
    };
    let gates_of = |kind: GateKind| -> Vec<String> {
        c.gates().filter(|(_, k)| *k == kind).map(|(n, _)| n.clone()).collect()
    };
    let p2c = matches!(dir, Direction::PremiseToConclusion);
    let mut out = Vec::new();
    match base {
        RuleId::Deepening(k) => {
            for a in gates_of(k) {
                let theta = c.parents(&a).clone();
                if p2c {
                    meter.charge(cover_cost(c.children(&a)))?;
                    let b = fresh("b", &[]);
                    for (gamma, delta) in covers(c.children(&a)) {
                        out.push(
                            RuleParams::new()
                                .with_central("a", &a)
                                .with_central("b", &b)
                                .with_peripheral("Gamma", gamma)
                                .with_peripheral("Delta", delta)
                                .with_peripheral("Theta", theta.clone()),
                        );
                    }
                } else {
                    for b in c.children(&a) {
                        meter.charge(1)?;
                        if c.label(b) != Some(&Label::Gate(k)) {
                            continue;
                        }
                        let mut gamma = c.children(&a).clone();
                        gamma.remove(b);
                        out.push(
                            RuleParams::new()
                                .with_central("a", &a)
                                .with_central("b", b)
                                .with_peripheral("Gamma", gamma)
                                .with_peripheral("Delta", c.children(b).clone())
                                .with_peripheral("Theta", theta.clone()),
                        );
                    }
                }
            }
        }
        RuleId::Globalization(k) => {
            let gates = gates_of(k);
            if p2c {
                for a in &gates {
                    for b in &gates {
                        meter.charge(1)?;
                        if a == b || c.children(a) != c.children(b) {
                            continue;
                        }
                        out.push(
                            RuleParams::new()
                                .with_central("a", a)
                                .with_central("b", b)
                                .with_central("c", fresh("c", &[]))
                                .with_peripheral("Gamma", c.children(a).clone())
                                .with_peripheral("Theta", c.parents(a).clone())
                                .with_peripheral("Omega", c.parents(b).clone()),
                        );
                    }
                }
            } else {
                for gate in gates {
                    meter.charge(cover_cost(c.parents(&gate)))?;
                    let a = fresh("a", &[]);
                    let b = fresh("b", &[&a]);
                    for (theta, omega) in covers(c.parents(&gate)) {
                        out.push(
                            RuleParams::new()
                                .with_central("a", &a)
                                .with_central("b", &b)
                                .with_central("c", &gate)
                                .with_peripheral("Gamma", c.children(&gate).clone())
                                .with_peripheral("Theta", theta)
                                .with_peripheral("Omega", omega),
                        );
                    }
                }
            }
        }
        RuleId::Lengthening(k) => {
            if p2c {
                for a in c.node_names() {
                    meter.charge(cover_cost(c.parents(a)))?;
                    let b = fresh("b", &[]);
                    for (theta, omega) in covers(c.parents(a)) {
                        out.push(
                            RuleParams::new()
                                .with_central("a", a)
                                .with_central("b", &b)
                                .with_peripheral("Gamma", c.children(a).clone())
                                .with_peripheral("Theta", theta)
                                .with_peripheral("Omega", omega),
                        );
                    }
                }
            } else {
                for b in gates_of(k) {
                    meter.charge(1)?;
                    if c.children(&b).len() != 1 {
                        continue;
                    }
                    let a = c.children(&b).first().unwrap().clone();
                    let mut omega = c.parents(&a).clone();
                    omega.remove(&b);
                    out.push(
                        RuleParams::new()
                            .with_central("a", &a)
                            .with_central("b", &b)
                            .with_peripheral("Gamma", c.children(&a).clone())
                            .with_peripheral("Theta", c.parents(&b).clone())
                            .with_peripheral("Omega", omega),
                    );
                }
            }
        }
        RuleId::Coupling | RuleId::Cocoupling => {
            let ports_up = matches!(base, RuleId::Coupling) == p2c;
            if ports_up {
                // The childless-gate side is given; ports are created.
                let kind =
                    if matches!(base, RuleId::Coupling) { GateKind::And } else { GateKind::Or };
                let mut atoms: Vec<String> = c.atoms().into_iter().collect();
                atoms.push({
                    let taken: BTreeSet<String> = c.atoms();
                    fresh_name("A", &taken)
                });
                for a in gates_of(kind) {
                    if !c.children(&a).is_empty() {
                        continue;
                    }
                    for atom in &atoms {
                        meter.charge(1)?;
                        let b = fresh("b", &[]);
                        let cc = fresh("c", &[&b]);
                        out.push(
                            RuleParams::new()
                                .with_central("a", &a)
                                .with_central("b", &b)
                                .with_central("c", &cc)
                                .with_atom(atom)
                                .with_peripheral("Theta", c.parents(&a).clone()),
                        );
                    }
                }
            } else {
                let kind =
                    if matches!(base, RuleId::Coupling) { GateKind::Or } else { GateKind::And };
                for a in gates_of(kind) {
                    meter.charge(1)?;
                    let kids: Vec<&String> = c.children(&a).iter().collect();
                    if kids.len() != 2 {
                        continue;
                    }
                    let lit = |n: &str| match c.label(n) {
                        Some(Label::Port(l)) => Some(l.clone()),
                        _ => None,
                    };
                    let (Some(l0), Some(l1)) = (lit(kids[0]), lit(kids[1])) else {
                        continue;
                    };
                    if l0.opposite() != l1 {
                        continue;
                    }
                    let (b, cc, atom) = if l0.negated {
                        (kids[1], kids[0], l1.atom)
                    } else {
                        (kids[0], kids[1], l0.atom)
                    };
                    out.push(
                        RuleParams::new()
                            .with_central("a", &a)
                            .with_central("b", b)
                            .with_central("c", cc)
                            .with_atom(atom)
                            .with_peripheral("Theta", c.parents(&a).clone()),
                    );
                }
            }
        }
        RuleId::Weakening | RuleId::Coweakening => {
            let kind = if matches!(base, RuleId::Weakening) { GateKind::Or } else { GateKind::And };
            let widening = matches!(base, RuleId::Weakening) == p2c;
            for a in gates_of(kind) {
                let theta = c.parents(&a).clone();
                if widening {
                    // Delta ranges over the other nodes of the cirquent.
                    let mut others: BTreeSet<String> = c.node_names().cloned().collect();
                    others.remove(&a);
                    meter.charge(subset_cost(&others))?;
                    for delta in subsets(&others) {
                        out.push(
                            RuleParams::new()
                                .with_central("a", &a)
                                .with_peripheral("Gamma", c.children(&a).clone())
                                .with_peripheral("Delta", delta)
                                .with_peripheral("Theta", theta.clone()),
                        );
                    }
                } else {
                    meter.charge(cover_cost(c.children(&a)))?;
                    for (gamma, delta) in covers(c.children(&a)) {
                        out.push(
                            RuleParams::new()
                                .with_central("a", &a)
                                .with_peripheral("Gamma", gamma)
                                .with_peripheral("Delta", delta)
                                .with_peripheral("Theta", theta.clone()),
                        );
                    }
                }
            }
        }
        RuleId::Pulldown | RuleId::Copulldown => {
            let (outer, inner) = match base {
                RuleId::Pulldown => (GateKind::Or, GateKind::And),
                _ => (GateKind::And, GateKind::Or),
            };
            // Pi sits under a in pulldown's premise and copulldown's
            // conclusion; on the other side it sits under c.
            let pi_under_a = matches!(base, RuleId::Pulldown) == p2c;
            for cn in gates_of(outer) {
                for b in c.children(&cn).clone() {
                    if c.label(&b) != Some(&Label::Gate(inner)) || *c.parents(&b) != singleton(&cn)
                    {
                        continue;
                    }
                    for a in c.children(&b).clone() {
                        meter.charge(1)?;
                        if c.label(&a) != Some(&Label::Gate(outer))
                            || *c.parents(&a) != singleton(&b)
                        {
                            continue;
                        }
                        let mut sigma = c.children(&b).clone();
                        sigma.remove(&a);
                        let base_params = RuleParams::new()
                            .with_central("a", &a)
                            .with_central("b", &b)
                            .with_central("c", &cn)
                            .with_peripheral("Sigma", sigma)
                            .with_peripheral("Theta", c.parents(&cn).clone());
                        if pi_under_a {
                            meter.charge(cover_cost(c.children(&a)))?;
                            let mut delta = c.children(&cn).clone();
                            delta.remove(&b);
                            for (gamma, pi) in covers(c.children(&a)) {
                                out.push(
                                    base_params
                                        .clone()
                                        .with_peripheral("Gamma", gamma)
                                        .with_peripheral("Delta", delta.clone())
                                        .with_peripheral("Pi", pi),
                                );
                            }
                        } else {
                            let mut rest = c.children(&cn).clone();
                            rest.remove(&b);
                            meter.charge(cover_cost(&rest))?;
                            for (delta, pi) in covers(&rest) {
                                out.push(
                                    base_params
                                        .clone()
                                        .with_peripheral("Gamma", c.children(&a).clone())
                                        .with_peripheral("Delta", delta)
                                        .with_peripheral("Pi", pi),
                                );
                            }
                        }
                    }
                }
            }
        }
        RuleId::Merging | RuleId::Comerging => {
            let kind = if matches!(base, RuleId::Merging) { GateKind::Or } else { GateKind::And };
            let joining = matches!(base, RuleId::Merging) == p2c;
            let gates = gates_of(kind);
            if joining {
                for b in &gates {
                    for cc in &gates {
                        meter.charge(1)?;
                        if b == cc {
                            continue;
                        }
                        out.push(
                            RuleParams::new()
                                .with_central("a", fresh("a", &[]))
                                .with_central("b", b)
                                .with_central("c", cc)
                                .with_peripheral("Gamma", c.children(b).clone())
                                .with_peripheral("Delta", c.children(cc).clone())
                                .with_peripheral("Theta", c.parents(b).clone())
                                .with_peripheral("Omega", c.parents(cc).clone()),
                        );
                    }
                }
            } else {
                for a in gates {
                    let child_covers = cover_cost(c.children(&a));
                    let parent_covers = cover_cost(c.parents(&a));
                    meter.charge(child_covers.saturating_mul(parent_covers))?;
                    let b = fresh("b", &[]);
                    let cc = fresh("c", &[&b]);
                    for (gamma, delta) in covers(c.children(&a)) {
                        for (theta, omega) in covers(c.parents(&a)) {
                            out.push(
                                RuleParams::new()
                                    .with_central("a", &a)
                                    .with_central("b", &b)
                                    .with_central("c", &cc)
                                    .with_peripheral("Gamma", gamma.clone())
                                    .with_peripheral("Delta", delta.clone())
                                    .with_peripheral("Theta", theta)
                                    .with_peripheral("Omega", omega),
                            );
                        }
                    }
                }
            }
        }
        RuleId::Trade => {
            if p2c {
                'outer: for a in gates_of(GateKind::And) {
                    let bs: Vec<String> = c.children(&a).iter().cloned().collect();
                    for bi in &bs {
                        if c.label(bi) != Some(&Label::Gate(GateKind::Or))
                            || *c.parents(bi) != singleton(&a)
                        {
                            continue 'outer;
                        }
                    }
                    let mut common: Option<BTreeSet<String>> = None;
                    for bi in &bs {
                        let kids = c.children(bi).clone();
                        common = Some(match common {
                            None => kids,
                            Some(acc) => acc.intersection(&kids).cloned().collect(),
                        });
                    }
                    let common = common.unwrap_or_default();
                    meter.charge(subset_cost(&common).max(1))?;
                    let pis = if bs.is_empty() {
                        let mut others: BTreeSet<String> = c.node_names().cloned().collect();
                        others.remove(&a);
                        meter.charge(subset_cost(&others))?;
                        subsets(&others)
                    } else {
                        subsets(&common)
                    };
                    for pi in pis {
                        let mut params = RuleParams::new()
                            .with_central("a", &a)
                            .with_central("b", fresh("b", &[]))
                            .with_peripheral("Theta", c.parents(&a).clone())
                            .with_peripheral("Pi", pi.clone());
                        let mut ok = true;
                        for (i, bi) in bs.iter().enumerate() {
                            let mut rest: BTreeSet<String> =
                                c.children(bi).difference(&pi).cloned().collect();
                            if rest.len() != 1 {
                                ok = false;
                                break;
                            }
                            let ci = rest.pop_first().unwrap();
                            let mut omega_i = c.parents(&ci).clone();
                            omega_i.remove(bi);
                            params = params
                                .with_central(&format!("b{}", i + 1), bi)
                                .with_central(&format!("c{}", i + 1), &ci)
                                .with_peripheral(&format!("Gamma{}", i + 1), c.children(&ci).clone())
                                .with_peripheral(&format!("Omega{}", i + 1), omega_i);
                        }
                        if ok {
                            out.push(params);
                        }
                    }
                }
            } else {
                for b in gates_of(GateKind::Or) {
                    for a in c.children(&b).clone() {
                        meter.charge(1)?;
                        if c.label(&a) != Some(&Label::Gate(GateKind::And))
                            || *c.parents(&a) != singleton(&b)
                        {
                            continue;
                        }
                        let mut pi = c.children(&b).clone();
                        pi.remove(&a);
                        let cs: Vec<String> = c.children(&a).iter().cloned().collect();
                        let mut params = RuleParams::new()
                            .with_central("a", &a)
                            .with_central("b", &b)
                            .with_peripheral("Theta", c.parents(&b).clone())
                            .with_peripheral("Pi", pi);
                        let mut fresh_bs: Vec<String> = Vec::new();
                        for (i, ci) in cs.iter().enumerate() {
                            let also: Vec<&str> =
                                fresh_bs.iter().map(String::as_str).collect();
                            let bi = {
                                let mut taken = used.clone();
                                for name in &also {
                                    taken.insert(name.to_string());
                                }
                                fresh_name(&format!("b{}", i + 1), &taken)
                            };
                            let mut omega_i = c.parents(ci).clone();
                            omega_i.remove(&a);
                            params = params
                                .with_central(&format!("b{}", i + 1), &bi)
                                .with_central(&format!("c{}", i + 1), ci)
                                .with_peripheral(&format!("Gamma{}", i + 1), c.children(ci).clone())
                                .with_peripheral(&format!("Omega{}", i + 1), omega_i);
                            fresh_bs.push(bi);
                        }
                        out.push(params);
                    }
                }
            }
        }
        RuleId::Redraw
        | RuleId::Flattening(_)
        | RuleId::Localization(_)
        | RuleId::Shortening(_) => unreachable!("normalized above"),
    }
    Ok(out)
}
