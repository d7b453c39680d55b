//! Derivations: sequences of cirquents joined by rule steps, with profile-
//! aware checking, dualization, and atom-renaming lifts.
//!
//! A derivation runs from its first cirquent (the premise end) to its last.
//! A *proof* is a derivation whose premise is the lone conjunctive gate; a
//! *refutation* is one whose conclusion is the lone disjunctive gate.

use std::fmt;

use thiserror::Error;

use crate::cirquent::{AtomRenaming, Cirquent};
use crate::rules::{apply_rule, check_step, is_i_analytic_step, Direction, RuleError, RuleId, Step};

/// Which rule set a derivation is checked against.
///
/// The base profile admits the six restructuring rules, coupling, weakening,
/// pulldown, and redraw. The symmetric profile adds the three dual rules.
/// The merge profile swaps weakening out for merging and comerging. The
/// local profile keeps the base rules but bounds each step's effect:
/// weakening may delete only one arc and pulldown may move only one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Cl8,
    Cl8s,
    Cl8Merge,
    Cl8Local,
}

impl Profile {
    pub const ALL: [Profile; 4] = [Profile::Cl8, Profile::Cl8s, Profile::Cl8Merge, Profile::Cl8Local];

    pub fn keyword(&self) -> &'static str {
        match self {
            Profile::Cl8 => "cl8",
            Profile::Cl8s => "cl8s",
            Profile::Cl8Merge => "cl8-merge",
            Profile::Cl8Local => "cl8-local",
        }
    }

    pub fn parse(text: &str) -> Option<Profile> {
        Profile::ALL.into_iter().find(|p| p.keyword() == text)
    }

    pub fn admits(&self, rule: &RuleId) -> bool {
        if rule.is_restructuring() || matches!(rule, RuleId::Coupling | RuleId::Redraw) {
            return true;
        }
        match self {
            Profile::Cl8 | Profile::Cl8Local => {
                matches!(rule, RuleId::Weakening | RuleId::Pulldown)
            }
            Profile::Cl8s => matches!(
                rule,
                RuleId::Weakening
                    | RuleId::Pulldown
                    | RuleId::Cocoupling
                    | RuleId::Coweakening
                    | RuleId::Copulldown
            ),
            Profile::Cl8Merge => {
                matches!(rule, RuleId::Pulldown | RuleId::Merging | RuleId::Comerging)
            }
        }
    }

    /// The extra per-step conditions of the local profile.
    fn step_restriction(&self, step: &Step) -> Option<String> {
        if !matches!(self, Profile::Cl8Local) {
            return None;
        }
        match step.rule {
            RuleId::Weakening if step.params.peripheral("Delta").len() != 1 => {
                Some("weakening must delete a single arc, so Delta must be a singleton".to_string())
            }
            RuleId::Pulldown if step.params.peripheral("Pi").len() != 1 => {
                Some("pulldown must move a single arc, so Pi must be a singleton".to_string())
            }
            _ => None,
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivationError {
    #[error("a derivation of {cirquents} cirquents needs {} steps, found {steps}", cirquents.saturating_sub(1))]
    Shape { cirquents: usize, steps: usize },
    #[error("step {index} uses {rule}, which the {profile} profile does not admit")]
    RuleDisabled { index: usize, rule: RuleId, profile: Profile },
    #[error("step {index} violates the {profile} profile: {condition}")]
    ProfileRestriction { index: usize, profile: Profile, condition: String },
    #[error("step {index} does not check: {source}")]
    Step { index: usize, source: RuleError },
    #[error("a proof must start from the lone conjunctive gate")]
    AxiomMismatch,
    #[error("a refutation must end at the lone disjunctive gate")]
    RefutationMismatch,
}

/// A sequence of cirquents C1..Cn together with the n-1 steps that join
/// each consecutive pair. The sequence runs premise-first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    cirquents: Vec<Cirquent>,
    steps: Vec<Step>,
}

impl Derivation {
    pub fn new(cirquents: Vec<Cirquent>, steps: Vec<Step>) -> Result<Derivation, DerivationError> {
        if cirquents.is_empty() || cirquents.len() != steps.len() + 1 {
            return Err(DerivationError::Shape { cirquents: cirquents.len(), steps: steps.len() });
        }
        Ok(Derivation { cirquents, steps })
    }

    /// The zero-step derivation of a cirquent from itself.
    pub fn single(c: Cirquent) -> Derivation {
        Derivation { cirquents: vec![c], steps: Vec::new() }
    }

    pub fn cirquents(&self) -> &[Cirquent] {
        &self.cirquents
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn premise(&self) -> &Cirquent {
        self.cirquents.first().expect("a derivation is never empty")
    }

    pub fn conclusion(&self) -> &Cirquent {
        self.cirquents.last().expect("a derivation is never empty")
    }

    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    /// Total node and arc count over all cirquents: the size measure used
    /// for growth reports.
    pub fn size(&self) -> usize {
        self.cirquents.iter().map(|c| c.node_count() + c.edge_count()).sum()
    }

    /// Extends the conclusion end by one step.
    pub fn push(&mut self, step: Step, next: Cirquent) {
        self.steps.push(step);
        self.cirquents.push(next);
    }

    /// Applies a step to the conclusion and appends the result.
    pub fn push_apply(&mut self, step: Step) -> Result<(), RuleError> {
        let next =
            apply_rule(self.conclusion(), &step.rule, &step.params, Direction::PremiseToConclusion)?;
        self.push(step, next);
        Ok(())
    }

    /// Reverse-applies a step to the premise and prepends the result, for
    /// constructions that grow a derivation upward from its conclusion.
    pub fn prepend_apply(&mut self, step: Step) -> Result<(), RuleError> {
        let previous =
            apply_rule(self.premise(), &step.rule, &step.params, Direction::ConclusionToPremise)?;
        self.cirquents.insert(0, previous);
        self.steps.insert(0, step);
        Ok(())
    }

    /// Concatenates a derivation that continues from this one's conclusion.
    pub fn append(&mut self, other: Derivation) {
        assert_eq!(
            self.conclusion(),
            other.premise(),
            "appended derivation must continue from the current conclusion"
        );
        let mut rest = other.cirquents.into_iter();
        rest.next();
        self.cirquents.extend(rest);
        self.steps.extend(other.steps);
    }
}

fn check_one(d: &Derivation, profile: Profile, index: usize) -> Result<(), DerivationError> {
    let step = &d.steps[index];
    if !profile.admits(&step.rule) {
        return Err(DerivationError::RuleDisabled { index, rule: step.rule, profile });
    }
    if let Some(condition) = profile.step_restriction(step) {
        return Err(DerivationError::ProfileRestriction { index, profile, condition });
    }
    check_step(&d.cirquents[index], &d.cirquents[index + 1], step)
        .map_err(|source| DerivationError::Step { index, source })
}

/// Checks every step against the profile's rule set and conditions.
/// On failure, reports the lowest failing step index.
pub fn check_derivation(d: &Derivation, profile: Profile) -> Result<(), DerivationError> {
    for index in 0..d.steps.len() {
        check_one(d, profile, index)?;
    }
    Ok(())
}

/// Like [`check_derivation`], with steps checked by `jobs` worker threads.
/// Steps are independent, so the outcome is identical; the lowest failing
/// index is still the one reported.
pub fn check_derivation_jobs(
    d: &Derivation,
    profile: Profile,
    jobs: usize,
) -> Result<(), DerivationError> {
    let n = d.steps.len();
    if jobs <= 1 || n < 2 {
        return check_derivation(d, profile);
    }
    let jobs = jobs.min(n);
    let chunk = n.div_ceil(jobs);
    let mut failures: Vec<Option<DerivationError>> = Vec::new();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for worker in 0..jobs {
            let lo = worker * chunk;
            let hi = (lo + chunk).min(n);
            handles.push(scope.spawn(move || {
                for index in lo..hi {
                    if let Err(e) = check_one(d, profile, index) {
                        return Some(e);
                    }
                }
                None
            }));
        }
        for handle in handles {
            failures.push(handle.join().expect("checker threads do not panic"));
        }
    });
    match failures.into_iter().flatten().next() {
        Some(error) => Err(error),
        None => Ok(()),
    }
}

/// Checks a derivation claimed to be a proof: it must start from the lone
/// conjunctive gate.
pub fn check_proof(d: &Derivation, profile: Profile) -> Result<(), DerivationError> {
    if !d.premise().is_axiom() {
        return Err(DerivationError::AxiomMismatch);
    }
    check_derivation(d, profile)
}

/// Checks a derivation claimed to be a refutation: it must end at the lone
/// disjunctive gate.
pub fn check_refutation(d: &Derivation, profile: Profile) -> Result<(), DerivationError> {
    if !d.conclusion().is_counter_axiom() {
        return Err(DerivationError::RefutationMismatch);
    }
    check_derivation(d, profile)
}

/// True iff every step keeps all premise ports, names and labels intact.
pub fn is_i_analytic(d: &Derivation) -> bool {
    d.cirquents.windows(2).all(|pair| is_i_analytic_step(&pair[0], &pair[1]))
}

fn dual_step(step: &Step) -> Step {
    let params = match step.rule {
        RuleId::Coupling | RuleId::Cocoupling => {
            let b = step.params.central("b").map(str::to_string);
            let c = step.params.central("c").map(str::to_string);
            let mut params = step.params.clone();
            if let (Some(b), Some(c)) = (b, c) {
                params = params.with_central("b", c).with_central("c", b);
            }
            params
        }
        RuleId::Redraw => match step.params.mapping() {
            Some(mapping) => {
                let inverted = mapping.iter().map(|(k, v)| (v.clone(), k.clone())).collect();
                step.params.clone().with_mapping(inverted)
            }
            None => step.params.clone(),
        },
        _ => step.params.clone(),
    };
    Step::new(step.rule.dual(), params)
}

/// Negates every cirquent, reverses the sequence, and replaces each rule by
/// its dual. Turns a proof of C into a refutation of the negation of C, and
/// is an involution.
pub fn dualize(d: &Derivation) -> Derivation {
    let cirquents = d.cirquents.iter().rev().map(Cirquent::negate).collect();
    let steps = d.steps.iter().rev().map(dual_step).collect();
    Derivation::new(cirquents, steps).expect("reversal preserves the step count")
}

/// Renames atoms throughout: in every cirquent and in every coupling step's
/// atom parameter. Node names are untouched, so the steps keep checking.
pub fn lift_instance(d: &Derivation, renaming: &AtomRenaming) -> Derivation {
    let cirquents = d.cirquents.iter().map(|c| c.rename_atoms(renaming)).collect();
    let steps = d
        .steps
        .iter()
        .map(|step| {
            let params = match step.params.atom() {
                Some(atom) => step.params.clone().with_atom(renaming.apply(atom)),
                None => step.params.clone(),
            };
            Step::new(step.rule, params)
        })
        .collect();
    Derivation::new(cirquents, steps).expect("renaming preserves the step count")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cirquent::{GateKind, GraphData, Label, Literal};
    use crate::corpus;
    use crate::rules::RuleParams;

    #[test]
    fn zero_step_proof_and_refutation() {
        let proof = Derivation::single(Cirquent::axiom());
        for profile in Profile::ALL {
            check_proof(&proof, profile).unwrap();
        }
        let refutation = dualize(&proof);
        assert_eq!(refutation.step_count(), 0);
        check_refutation(&refutation, Profile::Cl8).unwrap();
        assert_eq!(dualize(&refutation), proof);
    }

    #[test]
    fn worked_proof_checks_and_matches_reference_cirquent() {
        let proof = corpus::worked_proof();
        assert_eq!(proof.step_count(), 20);
        check_proof(&proof, Profile::Cl8).unwrap();
        check_proof(&proof, Profile::Cl8s).unwrap();
        assert!(crate::canon::is_isomorphic(proof.conclusion(), &corpus::fig2_left()));
        assert!(is_i_analytic(&proof));
    }

    #[test]
    fn worked_proof_dualizes_to_a_refutation() {
        let proof = corpus::worked_proof();
        let refutation = dualize(&proof);
        assert_eq!(refutation.premise(), &proof.conclusion().negate());
        check_refutation(&refutation, Profile::Cl8s).unwrap();
        assert_eq!(dualize(&refutation), proof);
    }

    #[test]
    fn parallel_checking_agrees_with_sequential() {
        let proof = corpus::worked_proof();
        for jobs in [1, 2, 3, 8, 64] {
            assert_eq!(check_derivation_jobs(&proof, Profile::Cl8, jobs), Ok(()));
        }

        let mut broken = proof.clone();
        let mut data = broken.cirquents[9].to_graph_data();
        data.add_node("stray", Label::Port(Literal::parse("Z").unwrap()));
        data.add_edge(broken.cirquents[9].root().to_string(), "stray".to_string());
        broken.cirquents[9] = data.validate_auto_root().unwrap();
        let sequential = check_derivation(&broken, Profile::Cl8).unwrap_err();
        for jobs in [2, 4] {
            assert_eq!(check_derivation_jobs(&broken, Profile::Cl8, jobs), Err(sequential.clone()));
        }
    }

    #[test]
    fn profiles_gate_rules() {
        let narrow = {
            let mut data = GraphData::new();
            data.add_node("1", Label::Gate(GateKind::Or));
            data.add_node("2", Label::Port(Literal::parse("P").unwrap()));
            data.add_edge("1", "2");
            data.validate_auto_root().unwrap()
        };
        let wide = {
            let mut data = GraphData::new();
            data.add_node("1", Label::Gate(GateKind::Or));
            data.add_node("2", Label::Port(Literal::parse("P").unwrap()));
            data.add_node("3", Label::Port(Literal::parse("Q").unwrap()));
            data.add_edge("1", "2");
            data.add_edge("1", "3");
            data.validate_auto_root().unwrap()
        };
        let weaken = Step::new(
            RuleId::Weakening,
            RuleParams::new()
                .with_central("a", "1")
                .with_peripheral("Gamma", ["2"])
                .with_peripheral("Delta", ["3"]),
        );
        let d = Derivation::new(vec![narrow.clone(), wide.clone()], vec![weaken]).unwrap();
        check_derivation(&d, Profile::Cl8).unwrap();
        check_derivation(&d, Profile::Cl8Local).unwrap();
        let err = check_derivation(&d, Profile::Cl8Merge).unwrap_err();
        assert!(matches!(
            err,
            DerivationError::RuleDisabled { index: 0, rule: RuleId::Weakening, .. }
        ));

        // The local profile rejects multi-arc weakenings.
        let wider = {
            let mut data = wide.to_graph_data();
            data.add_node("4", Label::Port(Literal::parse("R").unwrap()));
            data.add_edge("1", "4");
            data.validate_auto_root().unwrap()
        };
        let double = Step::new(
            RuleId::Weakening,
            RuleParams::new()
                .with_central("a", "1")
                .with_peripheral("Gamma", ["2"])
                .with_peripheral("Delta", ["3", "4"]),
        );
        let d = Derivation::new(vec![narrow, wider], vec![double]).unwrap();
        check_derivation(&d, Profile::Cl8).unwrap();
        let err = check_derivation(&d, Profile::Cl8Local).unwrap_err();
        assert!(matches!(err, DerivationError::ProfileRestriction { index: 0, .. }));
    }

    #[test]
    fn trade_is_rejected_by_every_profile() {
        let d = {
            let mut data = GraphData::new();
            data.add_node("a", Label::Gate(GateKind::And));
            let premise = data.validate_auto_root().unwrap();
            let step = Step::new(
                RuleId::Trade,
                RuleParams::new().with_central("a", "a").with_central("b", "b"),
            );
            let conclusion = apply_rule(
                &premise,
                &RuleId::Trade,
                &step.params,
                Direction::PremiseToConclusion,
            )
            .unwrap();
            Derivation::new(vec![premise, conclusion], vec![step]).unwrap()
        };
        for profile in Profile::ALL {
            let err = check_derivation(&d, profile).unwrap_err();
            assert!(matches!(err, DerivationError::RuleDisabled { rule: RuleId::Trade, .. }));
        }
    }

    #[test]
    fn proof_checking_requires_the_axiom_start() {
        let not_axiom = Derivation::single(Cirquent::counter_axiom());
        assert_eq!(check_proof(&not_axiom, Profile::Cl8), Err(DerivationError::AxiomMismatch));
        assert_eq!(
            check_refutation(&Derivation::single(Cirquent::axiom()), Profile::Cl8),
            Err(DerivationError::RefutationMismatch)
        );
    }

    #[test]
    fn mutated_parameters_are_reported_at_their_index() {
        let proof = corpus::worked_proof();
        let mut broken = proof.clone();
        let step = &mut broken.steps[14];
        assert_eq!(step.rule, RuleId::Coupling);
        step.params = step.params.clone().with_atom("Q");
        let err = check_derivation(&broken, Profile::Cl8).unwrap_err();
        assert!(matches!(err, DerivationError::Step { index: 14, .. }), "{err}");
    }

    #[test]
    fn lifting_renames_atoms_everywhere() {
        let proof = corpus::worked_proof();
        let renaming = AtomRenaming::from_pairs(
            [("P", "X"), ("Q", "Y"), ("R", "P")]
                .map(|(a, b)| (a.to_string(), b.to_string())),
        );
        let lifted = lift_instance(&proof, &renaming);
        check_proof(&lifted, Profile::Cl8).unwrap();
        assert_eq!(lifted.conclusion(), &proof.conclusion().rename_atoms(&renaming));
        let atoms = lifted.conclusion().atoms();
        assert!(atoms.contains("X") && atoms.contains("Y") && atoms.contains("P"));
        assert!(!atoms.contains("Q") && !atoms.contains("R"));
    }

    #[test]
    fn profile_names_round_trip() {
        for profile in Profile::ALL {
            assert_eq!(Profile::parse(profile.keyword()), Some(profile));
        }
        assert_eq!(Profile::parse("cl9"), None);
    }

    #[test]
    fn derivation_shape_is_validated() {
        let err = Derivation::new(vec![Cirquent::axiom()], vec![]).map(|_| ()).and(
            Derivation::new(
                vec![Cirquent::axiom()],
                vec![Step::new(RuleId::Coupling, RuleParams::new())],
            )
            .map(|_| ()),
        );
        assert_eq!(err, Err(DerivationError::Shape { cirquents: 1, steps: 1 }));
    }
}
