//! Numerical toolkit for momentum sets of unitary representations, their
//! support functions, and the convex geometry around them.

pub mod abelian;
pub mod convex;
pub mod error;
pub mod liealg;
pub mod linalg;
pub mod momentum;
pub(crate) mod lp;
pub mod rkhs;
pub mod sampling;
pub mod unirep;

pub use error::{Error, Result};
