//! Telescoping rational approximation of sampled functions.
//!
//! A sampled function is truncated to a box, fitted by an atom
//! `Q = P / prod_k (1 + x_k^2)^(L_k)`, and the stages telescope:
//! `R_1 = Q_1`, `R_k = Q_k - Q_{k-1}`, with per-stage budgets
//! `eps_k = ||f||_p^p eps / 4^(k+3)` and degree escalation whenever a budget
//! is missed. Budgets this tight are rarely all achievable in floating
//! point; whether each one was met is recorded, never assumed.

mod fit;

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::config::Tolerances;
use crate::error::CoreError;
use crate::polyalg::{SeparableRational, UniPoly};
use crate::quadrature::{lp_distance, SingularitySchedule};

pub use fit::{fit_atom, FitOptions, FittedAtom};

/// A black-box function of `n` real variables with decay hints.
#[derive(Clone)]
pub struct SampledFunction {
    evaluator: Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>,
    n: usize,
    /// Half-width of the box `[-N, N]^n` outside which the function is
    /// treated as negligible.
    pub support_half_width: f64,
    /// Magnitude cap used by [`truncate`].
    pub clip_level: f64,
}

impl std::fmt::Debug for SampledFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SampledFunction")
            .field("n", &self.n)
            .field("support_half_width", &self.support_half_width)
            .field("clip_level", &self.clip_level)
            .finish()
    }
}

impl SampledFunction {
    pub fn new(
        n: usize,
        support_half_width: f64,
        clip_level: f64,
        evaluator: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Result<Self, CoreError> {
        if n == 0 || support_half_width <= 0.0 || clip_level <= 0.0 {
            return Err(CoreError::InvalidInput(
                "sampled function needs n >= 1 and positive support/clip parameters".into(),
            ));
        }
        Ok(SampledFunction {
            evaluator: Arc::new(evaluator),
            n,
            support_half_width,
            clip_level,
        })
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        (self.evaluator)(x)
    }

    /// `exp(-|x|^2)`.
    pub fn gaussian(n: usize) -> Self {
        SampledFunction::new(n, 4.0, 2.0, move |x: &[f64]| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            Complex64::new((-r2).exp(), 0.0)
        })
        .unwrap()
    }

    /// The smooth compactly supported bump `exp(1 - 1/(1 - |x/2|^2))` on
    /// `|x| < 2`.
    pub fn bump(n: usize) -> Self {
        SampledFunction::new(n, 2.5, 2.0, move |x: &[f64]| {
            let r2: f64 = x.iter().map(|v| (v / 2.0) * (v / 2.0)).sum();
            if r2 >= 1.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new((1.0 - 1.0 / (1.0 - r2)).exp(), 0.0)
            }
        })
        .unwrap()
    }

    /// `prod_k sinc^2(x_k)`; only in `L^p` for `p > 1/2`.
    pub fn sinc_squared(n: usize) -> Self {
        SampledFunction::new(n, 30.0, 2.0, move |x: &[f64]| {
            let mut prod = 1.0;
            for &v in x {
                let s = if v.abs() < 1e-8 {
                    1.0 - v * v / 6.0
                } else {
                    v.sin() / v
                };
                prod *= s * s;
            }
            Complex64::new(prod, 0.0)
        })
        .unwrap()
    }

    /// Boundary values of `(x + i)^(-k)` on the real line.
    pub fn recip_power_boundary(k: u32) -> Self {
        SampledFunction::new(1, 50.0, 2.0, move |x: &[f64]| {
            Complex64::new(x[0], 1.0).powi(-(k as i32))
        })
        .unwrap()
    }

    /// Nearest-neighbour interpolant of scattered samples; zero outside the
    /// sampled box. Serves the CSV input path at desk scale.
    pub fn from_samples(
        n: usize,
        points: Vec<Vec<f64>>,
        values: Vec<Complex64>,
    ) -> Result<Self, CoreError> {
        if points.len() != values.len() || points.is_empty() {
            return Err(CoreError::InvalidInput(
                "sample table must be non-empty with matching point/value counts".into(),
            ));
        }
        if points.iter().any(|pt| pt.len() != n) {
            return Err(CoreError::InvalidInput(format!(
                "every sample point needs {n} coordinates"
            )));
        }
        let half_width = points
            .iter()
            .flat_map(|pt| pt.iter().map(|v| v.abs()))
            .fold(1.0f64, f64::max);
        let clip = values
            .iter()
            .map(|v| v.norm())
            .fold(1.0f64, f64::max);
        SampledFunction::new(n, half_width, clip, move |x: &[f64]| {
            if x.iter().any(|v| v.abs() > half_width) {
                return Complex64::new(0.0, 0.0);
            }
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (i, pt) in points.iter().enumerate() {
                let d: f64 = pt.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
                if d < best_d {
                    best_d = d;
                    best = i;
                }
            }
            values[best]
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TruncationReport {
    /// `||f_N - f||_p^p` estimate.
    pub removed_mass: f64,
    pub abs_error: f64,
}

/// Clips `|f|` to `level` and zeroes the function outside `[-level... box]`,
/// reporting the removed `L^p` mass.
pub fn truncate(
    f: &SampledFunction,
    level: f64,
    p: f64,
    tols: &Tolerances,
) -> Result<(SampledFunction, TruncationReport), CoreError> {
    if level <= 0.0 {
        return Err(CoreError::InvalidInput("truncation level must be positive".into()));
    }
    let inner = f.evaluator.clone();
    let n = f.n;
    let cap = level;
    let truncated = SampledFunction::new(n, level.min(f.support_half_width), cap, move |x: &[f64]| {
        if x.iter().any(|v| v.abs() > cap) {
            return Complex64::new(0.0, 0.0);
        }
        let v = inner(x);
        let m = v.norm();
        if m > cap {
            v * (cap / m)
        } else {
            v
        }
    })?;
    let orig = f.clone();
    let trunc = truncated.clone();
    let diff = move |x: &[f64]| orig.eval(x) - trunc.eval(x);
    let schedule = SingularitySchedule {
        per_variable: vec![vec![]; n],
    };
    let (removed_mass, abs_error) = lp_distance(
        Some(&diff),
        &[],
        p,
        n,
        tols.quad_tol_for(n).max(1e-6),
        tols,
        &schedule,
    )?;
    Ok((
        truncated,
        TruncationReport {
            removed_mass,
            abs_error,
        },
    ))
}

/// The telescoping series: atoms `R_k`, underlying fits `Q_k`, budgets, and
/// measured norms/residuals.
#[derive(Debug, Clone, Serialize)]
pub struct AtomSeries {
    pub atoms: Vec<SeparableRational>,
    pub fits: Vec<SeparableRational>,
    /// Per-stage budgets `eps_k`.
    pub budgets: Vec<f64>,
    /// Whether `||Q_k - f||_p^p < eps_k` was achieved numerically.
    pub budget_met: Vec<bool>,
    /// `||R_k||_p^p`.
    pub norms: Vec<f64>,
    /// `||f - Q_k||_p^p` after each stage.
    pub residuals: Vec<f64>,
    pub f_norm: f64,
    pub f_norm_error: f64,
    pub epsilon: f64,
    /// `sum_k ||R_k||_p^p`, to compare against `(1 + eps) ||f||_p^p`.
    pub norm_sum: f64,
}

#[derive(Debug, Clone)]
pub struct TelescopeOptions {
    /// Numerator degree of the first stage (per variable).
    pub initial_degree: u32,
    /// Stop once `||f - Q_k||_p^p` falls below this fraction of `||f||_p^p`.
    pub residual_target_rel: f64,
    /// Cap on the per-variable numerator degree after escalation.
    pub max_degree_cap: u32,
    pub grid_per_dim: usize,
}

impl Default for TelescopeOptions {
    fn default() -> Self {
        TelescopeOptions {
            initial_degree: 12,
            residual_target_rel: 1e-8,
            max_degree_cap: 40,
            grid_per_dim: 0,
        }
    }
}

/// Per-variable exponent making the atom pass the `p * gap > 1` screening
/// with one unit of headroom at numerator degree `d`.
pub fn exponent_for_degree(d: u32, p: f64) -> u32 {
    let needed = (d as f64 + 1.0 / p) / 2.0;
    needed.floor() as u32 + 1
}

/// Builds the telescoping series for `f`.
pub fn telescope(
    f: &SampledFunction,
    p: f64,
    epsilon: f64,
    max_atoms: usize,
    opts: &TelescopeOptions,
    tols: &Tolerances,
) -> Result<AtomSeries, CoreError> {
    if !(0.0 < p && p < 1.0) {
        return Err(CoreError::InvalidInput(format!("p = {p} outside (0, 1)")));
    }
    if epsilon <= 0.0 || max_atoms == 0 {
        return Err(CoreError::InvalidInput(
            "epsilon must be positive and max_atoms >= 1".into(),
        ));
    }
    let n = f.nvars();
    let empty_schedule = SingularitySchedule {
        per_variable: vec![vec![]; n],
    };
    let fe = |x: &[f64]| f.eval(x);
    let (f_norm, f_norm_error) = lp_distance(
        Some(&fe),
        &[],
        p,
        n,
        tols.quad_tol_for(n).max(1e-6),
        tols,
        &empty_schedule,
    )?;
    if f_norm <= 0.0 {
        return Err(CoreError::InvalidInput(
            "function has zero L^p mass; nothing to approximate".into(),
        ));
    }

    let l_tilde = (1.0 / p).ceil() as u32 + 1;
    let mut degree = opts.initial_degree;
    let mut atoms: Vec<SeparableRational> = Vec::new();
    let mut fits: Vec<SeparableRational> = Vec::new();
    let mut exponents: Vec<Vec<u32>> = Vec::new();
    let mut budgets = Vec::new();
    let mut budget_met = Vec::new();
    let mut norms = Vec::new();
    let mut residuals = Vec::new();

    for k in 1..=max_atoms {
        let budget = f_norm * epsilon / 4.0f64.powi(k as i32 + 3);
        let big_l = exponent_for_degree(degree, p).max(l_tilde + 1);
        let fit_opts = FitOptions {
            l: vec![big_l - l_tilde; n],
            l_tilde: vec![l_tilde; n],
            max_degree: vec![degree; n],
            grid_per_dim: opts.grid_per_dim,
            rcond: tols.fit_rcond,
        };
        let fitted = fit_atom(f, p, &fit_opts, tols)?;
        let residual = fitted.lp_residual.value;
        if let Some(&last) = residuals.last() {
            if residual >= last {
                // The escalated fit did not improve; the series has stalled.
                break;
            }
        }
        let q_k = fitted.atom;
        let r_k = if let (Some(prev_fit), Some(prev_exp)) =
            (fits.last(), exponents.last())
        {
            sub_class_a(&q_k, &fitted.exponents, prev_fit, prev_exp)?
        } else {
            q_k.clone()
        };
        let norm_k = match crate::quadrature::lp_quasinorm(
            &r_k,
            p,
            &vec![0.0; n],
            tols.quad_tol_for(n).max(1e-6),
            tols,
        ) {
            Ok(q) => q.value,
            Err(CoreError::ToleranceNotMet { value, .. }) => value,
            Err(e) => return Err(e),
        };

        budgets.push(budget);
        budget_met.push(residual < budget);
        residuals.push(residual);
        norms.push(norm_k);
        atoms.push(r_k);
        fits.push(q_k);
        exponents.push(fitted.exponents);

        if residual <= opts.residual_target_rel * f_norm {
            break;
        }
        if !budget_met.last().unwrap() {
            // Escalation schedule: 1.5x per missed budget, capped.
            degree = ((degree as f64 * 1.5).ceil() as u32).min(opts.max_degree_cap);
        }
    }

    let norm_sum = norms.iter().sum();
    Ok(AtomSeries {
        atoms,
        fits,
        budgets,
        budget_met,
        norms,
        residuals,
        f_norm,
        f_norm_error,
        epsilon,
        norm_sum,
    })
}

/// `a - b` for two class-A atoms, over the smallest common denominator
/// `(1 + x^2)^max(La, Lb)` per variable (no blind product-denominator).
fn sub_class_a(
    a: &SeparableRational,
    a_exp: &[u32],
    b: &SeparableRational,
    b_exp: &[u32],
) -> Result<SeparableRational, CoreError> {
    let n = a.nvars();
    let one_plus_x2 = UniPoly::new(vec![
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
    ]);
    let mut num_a = a.numerator().clone();
    let mut num_b = b.numerator().clone();
    let mut dens = Vec::with_capacity(n);
    for k in 0..n {
        let big = a_exp[k].max(b_exp[k]);
        if big > a_exp[k] {
            num_a = num_a.mul_univar(k, &one_plus_x2.pow(big - a_exp[k]));
        }
        if big > b_exp[k] {
            num_b = num_b.mul_univar(k, &one_plus_x2.pow(big - b_exp[k]));
        }
        dens.push(one_plus_x2.pow(big));
    }
    SeparableRational::new(num_a.sub(&num_b), dens)
}
