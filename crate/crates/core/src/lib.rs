//! Symmetric extendibility of U2-invariant two-qudit states.
//!
//! Closed-form criteria cover the generalised-isotropic family; a
//! semidefinite feasibility solver handles the general invariant case, and
//! the extender turns a block decomposition into an explicit extension.

pub mod criteria;
pub mod error;
pub mod extender;
pub mod matcore;
pub mod solver;
pub mod states;

pub use error::{Error, Result};
pub use matcore::HermitianMatrix;
