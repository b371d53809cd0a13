//! Exact computation of δ-derivation spaces of basis-indexed graded Lie
//! algebras on finite index windows, and certification of local and 2-local
//! half-derivation constructions.

pub mod algebras;
pub mod cli;
pub mod dersolve;
pub mod error;
pub mod exactlin;
pub mod locality;
pub mod operators;
pub mod text;
pub mod verify;

pub use algebras::{Algebra, BasisKey, Element, KeyKind};
pub use error::{Error, Result};
pub use exactlin::{Scalar, SparseVec};
