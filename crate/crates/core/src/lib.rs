//! Finite fields, finite groups given by Cayley tables, group algebras over
//! them, and the orders of their unitary subgroups.

pub mod algebra;
pub mod catalog;
pub mod error;
pub mod field;
pub mod group;
pub mod linalg;
pub mod unitary;

pub use algebra::{AlgebraElement, GroupAlgebra, GroupInvolution, InvolutionKind};
pub use error::{Error, Result};
pub use field::{make_field, parse_field, FieldElement, FieldSpec};
pub use group::Group;
pub use unitary::{compute, Char2Options, ElementSet, Method, MethodChoice, UnitaryResult};
