//! Maximal abelian subalgebras of the Euclidean, Minkowski and conformal
//! algebras: exact construction, verification, and the separable coordinate
//! charts they induce.

pub mod error;
pub mod exactla;
pub mod liecore;
pub mod catalog;
pub mod cocycle;
pub mod conformal;
pub mod charts;
pub mod document;

pub use error::{Error, Result};
pub use exactla::{ExactMatrix, ExactScalar};
pub use document::AlgebraDocument;
