//! Exact rational linear algebra.

pub mod complement;
pub mod matrix;
pub mod rat;
pub mod subspace;

pub use complement::invariant_complement;
pub use matrix::{Echelon, Matrix};
pub use rat::{format_rat, int, parse_rat, rat, Rat};
pub use subspace::Subspace;
