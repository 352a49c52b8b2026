//! A rule-based model transformation engine.
//!
//! Transformations are written in a small textual language ([`dsl`]) of
//! procedures, rules and foreach loops over declarative patterns. Patterns
//! are matched against an in-memory [`model::Model`] typed by a
//! [`metamodel::Metamodel`]; NOT conditions, reference elements (`@x`) and
//! create/delete actions are supported. The [`corpus`] module bundles a suite
//! of graph and greeting transformations together with independent oracles.

pub mod corpus;
pub mod dsl;
pub mod expr;
pub mod interpreter;
pub mod metamodel;
pub mod model;
pub mod oracle;
pub mod pattern;
pub mod pipeline;
