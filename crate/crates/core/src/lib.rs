//! Polynomial interpolation and structure theory for finite Mal'cev algebras.

pub mod affine;
pub mod algebra;
pub mod brute;
pub mod closure;
pub mod commutator;
pub mod congruence;
pub mod corpus;
pub mod error;
pub mod field;
pub mod format;
pub mod lattice;
pub mod lemmas;
pub mod modules;
pub mod partial;
pub mod structure;
pub mod tct;

pub use algebra::{Elem, FiniteAlgebra, FunctionTable, OperationTable};
pub use closure::ClosureConfig;
pub use commutator::Analysis;
pub use congruence::Congruence;
pub use error::{Error, Result};
pub use partial::{PartialFunction, Relation};
