//! Deep cirquent calculus toolkit.
//!
//! A *cirquent* is a rooted directed acyclic graph whose childless
//! literal-labeled nodes (*ports*) may be shared between several gates.
//! This crate provides the data model, the inference rules of the deep
//! calculus operating on such graphs, an abstract resource semantics with a
//! validity decision, a prover implementing the completeness procedure, a
//! bridge from a classical cut-free sequent calculus, and a generator of
//! polynomial-size proofs of the pigeonhole principle. Text formats for
//! cirquents (`.cirq`), derivations (`.clp`) and sequent proofs (`.gpf`) live
//! in [`formats`].

pub mod canon;
pub mod cirquent;
pub mod corpus;
pub mod derivation;
pub mod formats;
pub mod formula;
pub mod gbridge;
pub mod prover;
pub mod rules;
pub mod semantics;

pub use cirquent::{Cirquent, GateKind, GraphData, Label, Literal, Violation};
