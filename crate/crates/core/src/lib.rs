//! Complex-based semantics for the propositional and monadic first-order
//! fragments of PM-style logic.
//!
//! Formulas are parsed from ASCII PM notation ([`syntax`]), evaluated to
//! meanings built from the elementary complexes of a finite world
//! ([`ontology`], [`meaning`], [`prop`], [`fo`]), compared against
//! classical truth tables and Tarskian models ([`oracle`]), and derived in
//! PM-style proof scripts ([`proof`]).

pub mod error;
pub mod fo;
pub mod meaning;
pub mod ontology;
pub mod oracle;
pub mod proof;
pub mod prop;
pub mod syntax;

pub use error::{Error, ParseError};
pub use meaning::{is_true, Meaning, Policy};
pub use ontology::World;
pub use syntax::{parse, print, Formula};
