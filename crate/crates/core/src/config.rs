//! Numerical tolerances and resource caps, with one place to change them.
//!
//! Every threshold used by the library is a field here so that reports can
//! embed the exact configuration they were produced under.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tolerances {
    /// Minimum denominator modulus accepted by guarded rational evaluation.
    pub tau_pole: f64,
    /// Relative residual target for polynomial root finding.
    pub tau_root: f64,
    /// Base radius for root clustering when estimating multiplicities.
    pub tau_cluster: f64,
    /// Roots may sit this far inside the forbidden half-plane and still
    /// certify (covers roots numerically on the real axis).
    pub tau_margin: f64,
    /// Minimum distance of `(-1)^m` to `e^{i phi}` before a split phase is
    /// rejected as degenerate.
    pub tau_degenerate: f64,
    /// Minimum separation between poles of an intersection-class atom.
    pub tau_distinct: f64,
    /// Imaginary-part tolerance under which a root counts as real.
    pub tau_real_axis: f64,
    /// Iteration cap for the root finder.
    pub root_max_iters: u32,
    /// Default relative quadrature tolerance per dimension (index `n - 1`).
    pub quad_rel_tol: [f64; 3],
    /// Looser relative tolerance used while scanning phase grids.
    pub phase_scan_rel_tol: f64,
    /// Gauss-Legendre panel order for the outermost dimension.
    pub gl_order: usize,
    /// Gauss-Legendre panel order for inner dimensions of iterated integrals.
    pub gl_order_inner: usize,
    /// Cap on adaptive cells per one-dimensional pass.
    pub quad_max_cells: usize,
    /// Cap on bisection depth (grading toward poles is geometric in depth).
    pub quad_max_depth: u32,
    /// Singular values below `rcond * sigma_max` are truncated in fits.
    pub fit_rcond: f64,
    /// Condition-number threshold above which a fit is rejected outright.
    pub fit_cond_limit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tau_pole: 1e-12,
            tau_root: 1e-10,
            tau_cluster: 1e-7,
            tau_margin: 1e-9,
            tau_degenerate: 1e-6,
            tau_distinct: 1e-8,
            tau_real_axis: 1e-8,
            root_max_iters: 200,
            quad_rel_tol: [1e-7, 1e-5, 1e-4],
            phase_scan_rel_tol: 5e-3,
            gl_order: 15,
            gl_order_inner: 9,
            quad_max_cells: 20_000,
            quad_max_depth: 60,
            fit_rcond: 1e-12,
            fit_cond_limit: 1e15,
        }
    }
}

impl Tolerances {
    /// Tighter quadrature targets; roughly 10x the default cost.
    pub fn strict() -> Self {
        Tolerances {
            quad_rel_tol: [1e-9, 1e-7, 1e-5],
            phase_scan_rel_tol: 1e-4,
            quad_max_cells: 80_000,
            ..Tolerances::default()
        }
    }

    /// Loose targets for interactive exploration.
    pub fn fast() -> Self {
        Tolerances {
            quad_rel_tol: [1e-5, 1e-3, 1e-3],
            phase_scan_rel_tol: 2e-2,
            gl_order: 11,
            gl_order_inner: 7,
            quad_max_cells: 6_000,
            ..Tolerances::default()
        }
    }

    /// Resolve a named profile; unknown names fall back to the default.
    pub fn profile(name: &str) -> Self {
        match name {
            "strict" => Tolerances::strict(),
            "fast" => Tolerances::fast(),
            _ => Tolerances::default(),
        }
    }

    /// Default relative quadrature tolerance for dimension `n` (1-based).
    pub fn quad_tol_for(&self, n: usize) -> f64 {
        self.quad_rel_tol[n.clamp(1, 3) - 1]
    }
}
