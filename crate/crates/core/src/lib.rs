//! Octant Hardy-space decompositions of `L^p(R^n)` functions for `0 < p < 1`.
//!
//! For `p < 1` the usual Fourier/Hilbert-transform splitting of a function
//! into analytic halves is unavailable, but every `f` in `L^p(R^n)` can still
//! be written as a sum of `2^n` boundary-value functions, one per octant tube,
//! each of them a series of rational atoms holomorphic over its tube. This
//! crate implements that pipeline constructively and verifies the explicit
//! constants numerically:
//!
//! * [`polyalg`] — complex polynomial / separable rational arithmetic,
//!   evaluation, and root finding;
//! * [`conformal`] — the Cayley maps between half-planes and the unit disc;
//! * [`quadrature`] — adaptive `L^p` quasi-norm slices tolerating real-axis
//!   poles and heavy tails;
//! * [`hardy`] — octant membership certificates and the interior sup bound;
//! * [`split`] — the phase-parametrised splitting of one atom into `2^n`
//!   octant components, with grid phase selection;
//! * [`approx`] — telescoping rational approximation of sampled functions;
//! * [`decompose`] — the end-to-end octant decomposition;
//! * [`density`] — mollifiers and reciprocal-basis fits on the polydisc;
//! * [`intersect`] — atoms common to all octants, non-uniqueness demos, and
//!   the gluing operator.
//!
//! All values are immutable after construction and every operation is a pure
//! function, so the whole API is safe to drive from multiple threads.

pub mod approx;
pub mod config;
pub mod conformal;
pub mod decompose;
pub mod density;
pub mod error;
pub mod hardy;
pub mod intersect;
pub mod json;
pub mod polyalg;
pub mod quadrature;
pub mod report;
pub mod special;
pub mod split;

pub use config::Tolerances;
pub use error::CoreError;
pub use num_complex::Complex64;
pub use polyalg::{MultiIndex, MultiPoly, SeparableRational, UniPoly};
pub use quadrature::{QuasiNormResult, SingularitySchedule};
pub use hardy::{CertStatus, HardyCertificate, SignVector};
pub use split::{OctantSplit, PhaseVector, SplitParams};
pub use approx::{AtomSeries, SampledFunction};
pub use decompose::OctantDecomposition;
pub use intersect::XpAtom;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, CoreError>;
