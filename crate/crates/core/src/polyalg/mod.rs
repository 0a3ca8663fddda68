//! Complex polynomial and separable rational-function algebra on `C^n`.
//!
//! Coefficients are double-precision complex pairs throughout; identity
//! checks elsewhere in the crate are therefore always stated with explicit
//! tolerances. Values are immutable after construction and all operations
//! are pure functions.

mod multipoly;
mod rational;
mod roots;
mod unipoly;

pub use multipoly::{MultiIndex, MultiPoly};
pub use rational::{sum_scaled, RationalEvaluator, ScaledValue, SeparableRational};
pub use roots::{roots_with_multiplicity, ClusteredRoot, RootConfig};
pub use unipoly::{binomial_power, UniPoly};
