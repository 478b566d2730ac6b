//! Exact generalized Riemann difference stencils, the good-set elimination
//! calculus with checkable certificates, and numerical estimation of
//! generalized Riemann and Peano derivatives.

pub mod elimination;
pub mod exec;
pub mod linalg;
pub mod numeric;
pub mod rational;
pub mod stencil;

pub use exec::Execution;
pub use rational::Rational;
pub use stencil::Stencil;
