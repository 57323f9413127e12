//! Front-end and type system for moot-lite, a small C-like language with
//! structural static subsumption, strengthenable (`+`) declarations and
//! monomorphizing code generation.
//!
//! The pipeline is:
//!
//! 1. [`frontend::parse`] and [`frontend::expand_param_typedefs`]
//! 2. [`universe::TypeUniverse::from_program`] collects the relevant types
//! 3. [`hierarchy`] infers the subsumption order as a greatest simulation
//! 4. [`typeflow`] types syntax graphs over the [`antichain`] lattice
//! 5. [`mono`] instantiates functions from the entry point and emits C

pub mod antichain;
pub mod diag;
pub mod frontend;
pub mod hierarchy;
pub mod mono;
pub mod typeflow;
pub mod universe;

pub use antichain::Antichain;
pub use diag::{Diagnostic, Severity, Span, Stage};
pub use hierarchy::{CandidateSubsumption, CounterexamplePath, SubsumptionOrder};
pub use typeflow::{FlowMemo, MatchRelation, SyntaxGraph, Typing};
pub use universe::{RelationLabel, TypeId, TypeKind, TypeRelation, TypeUniverse};
