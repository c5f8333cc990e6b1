//! Linear multistep methods for ordinary differential equations.
//!
//! - [`tableau`]: exact Adams-Bashforth, Adams-Moulton and BDF coefficients.
//! - [`analysis`]: Taylor constants, order, error constant, consistency.
//! - [`stability`]: root condition, absolute stability regions, A-stability
//!   sampling, stiff decay.
//! - [`integrate`]: fixed-step solves with Newton-solved implicit steps and a
//!   convergence-order harness.
//! - [`problems`]: test problems with closed-form solutions.
//! - [`cli`]: the `lmm` command-line front end.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod integrate;
pub mod problems;
pub mod rational;
pub mod stability;
pub mod tableau;

pub use error::{Error, Result};
pub use rational::Rational;
pub use tableau::Tableau;
