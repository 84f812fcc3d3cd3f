//! A nominal actor calculus: syntax, concrete and abstract operational
//! semantics, counter-machine encodings, renaming-based orderings and
//! decision procedures for termination and reachability on the decidable
//! fragments.

pub mod cm;
pub mod deciders;
pub mod explore;
pub mod fragments;
pub mod generate;
pub mod json;
pub mod order;
pub mod semantics;
pub mod syntax;
