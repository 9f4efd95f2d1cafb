//! Exact verification toolkit and continuous-time simulator for multispecies
//! long-range swap processes with species-dependent interpolation weights.
//!
//! The crate builds the model's two-site interaction operators over exact
//! rationals, verifies their structural identities by exhaustive basis
//! enumeration, runs the boundary-elimination machinery that reduces n-body
//! dynamics to two-body operators, checks the scattering matrix against the
//! Yang-Baxter equation, and cross-validates a Gillespie simulator against
//! closed formulas and a master-equation oracle.

pub mod algebra;
pub mod local_ops;
pub mod master;
pub mod params;
pub mod process;
pub mod reduction;
pub mod report;
pub mod scattering;

pub use algebra::{Matrix, Rational, SpeciesOperator, Word, WordBasis, rat};
pub use params::ModelParams;
pub use process::{Configuration, Direction};
