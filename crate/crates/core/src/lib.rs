//! A confluence prover for term rewriting systems `R = S ∪ P` where `S` is
//! terminating (possibly only relative to part of `P`) and `P` is reversible,
//! such as commutativity and associativity axioms.
//!
//! Confluence is established by critical-pair criteria that only use ordinary
//! syntactic unification, together with a completion procedure that adds and
//! replaces rules without changing the rewrite relation.

pub mod ars_oracle;
pub mod certificate;
pub mod completion;
pub mod criteria;
pub mod critical_pairs;
pub mod reversibility;
pub mod rewriting;
pub mod syntax;
pub mod termination;
pub mod terms;
