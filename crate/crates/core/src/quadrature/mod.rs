//! `L^p` quasi-norm slices `int |R(x + iy)|^p dx` for `0 < p < 1`.
//!
//! The index range makes two things unavoidable: integrable real-axis poles
//! (order times p below one) and heavy rational tails (degree gap times p
//! barely above one). Divergence screening is static, from the uncancelled
//! degrees and pole orders, before any quadrature runs.

pub mod engine;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::CoreError;
use crate::polyalg::{
    roots_with_multiplicity, sum_scaled, RationalEvaluator, RootConfig, ScaledValue,
    SeparableRational,
};
use engine::{integrate_line, AxisResult, EngineConfig};

/// A computed quasi-norm slice: `value` is the integral of `|R|^p`, i.e. the
/// p-th power of the quasi-norm.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuasiNormResult {
    pub value: f64,
    pub abs_error: f64,
    pub p: f64,
    pub y_offset: Vec<f64>,
}

/// Real pole locations with orders, per variable, sorted ascending.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SingularitySchedule {
    pub per_variable: Vec<Vec<(f64, u32)>>,
}

impl SingularitySchedule {
    /// Locates the real denominator roots of `r` by root clustering.
    pub fn from_rational(r: &SeparableRational, tols: &Tolerances) -> Result<Self, CoreError> {
        let root_cfg = RootConfig {
            max_iters: tols.root_max_iters,
            tau_root: tols.tau_root,
            tau_cluster: tols.tau_cluster,
        };
        let mut per_variable = Vec::with_capacity(r.nvars());
        for k in 0..r.nvars() {
            let q = r.denominator(k);
            let mut list = Vec::new();
            if q.degree().unwrap_or(0) >= 1 {
                for root in roots_with_multiplicity(q, &root_cfg)? {
                    if root.location.im.abs() <= tols.tau_real_axis * (1.0 + root.location.re.abs())
                    {
                        list.push((root.location.re, root.multiplicity));
                    }
                }
            }
            list.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            list.dedup_by(|a, b| {
                if (a.0 - b.0).abs() <= 1e-12 * (1.0 + b.0.abs()) {
                    b.1 += a.1;
                    true
                } else {
                    false
                }
            });
            per_variable.push(list);
        }
        Ok(SingularitySchedule { per_variable })
    }

    pub fn merge(mut self, other: &SingularitySchedule) -> SingularitySchedule {
        for (mine, theirs) in self.per_variable.iter_mut().zip(&other.per_variable) {
            mine.extend(theirs.iter().copied());
            mine.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            mine.dedup_by(|a, b| {
                if (a.0 - b.0).abs() <= 1e-12 * (1.0 + b.0.abs()) {
                    b.1 = b.1.max(a.1);
                    true
                } else {
                    false
                }
            });
        }
        self
    }
}

/// Running count of integrand evaluations, for performance tracing.
pub static EVAL_COUNT: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);

/// The integrand `|sum_j c_j R_j(x + i y) + extra(x)|^p`.
///
/// Rational terms are stored pre-shifted, so only real coordinates flow
/// through evaluation; the scaled-value representation keeps tails and
/// near-pole magnitudes inside f64 range.
pub struct LpIntegrand<'a> {
    pub p: f64,
    pub terms: Vec<(Complex64, RationalEvaluator)>,
    pub extra: Option<&'a (dyn Fn(&[f64]) -> Complex64 + Sync)>,
}

impl<'a> LpIntegrand<'a> {
    pub fn single(r: &SeparableRational, p: f64, y: &[f64]) -> LpIntegrand<'a> {
        let shifted = shift_by_imag(r, y);
        LpIntegrand {
            p,
            terms: vec![(Complex64::new(1.0, 0.0), shifted.evaluator())],
            extra: None,
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        EVAL_COUNT.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        let mut z = [Complex64::new(0.0, 0.0); 3];
        for (k, &v) in x.iter().enumerate() {
            z[k] = Complex64::new(v, 0.0);
        }
        let zs = &z[..x.len()];
        if self.terms.len() == 1 && self.extra.is_none() {
            let (c, ev) = &self.terms[0];
            let mut v = ev.eval(zs);
            v.mantissa *= c;
            return v.abs_pow(self.p);
        }
        let mut parts: Vec<ScaledValue> = Vec::with_capacity(self.terms.len() + 1);
        for (c, ev) in &self.terms {
            let mut v = ev.eval(zs);
            v.mantissa *= c;
            parts.push(v);
        }
        if let Some(f) = &self.extra {
            parts.push(ScaledValue {
                mantissa: f(x),
                log: 0.0,
            });
        }
        sum_scaled(&parts).abs_pow(self.p)
    }
}

/// Shifts `r(z) -> r(z + i y)` so the slice integral runs over real `x`.
pub fn shift_by_imag(r: &SeparableRational, y: &[f64]) -> SeparableRational {
    if y.iter().all(|&v| v == 0.0) {
        return r.clone();
    }
    let offsets: Vec<Complex64> = y.iter().map(|&v| Complex64::new(0.0, v)).collect();
    r.shift(&offsets)
}

/// Integrates an [`LpIntegrand`] over `R^n` with per-axis adaptive passes.
pub fn integrate_lp(
    ig: &LpIntegrand,
    schedule: &SingularitySchedule,
    n: usize,
    rel_tol: f64,
    tols: &Tolerances,
) -> Result<(f64, f64), CoreError> {
    if n == 0 || n > 3 {
        return Err(CoreError::InvalidInput(format!(
            "dimension {n} outside supported range 1..=3"
        )));
    }
    let mut x = [0.0f64; 3];
    let res = integrate_axis(ig, schedule, 0, n, rel_tol, tols, &mut x);
    // The engine chases a tighter internal target; what the caller asked for
    // is the combined Richardson-plus-inner estimate against `rel_tol`.
    let target = rel_tol * (1.0 + res.value.abs());
    if res.abs_error > target {
        return Err(CoreError::ToleranceNotMet {
            value: res.value,
            abs_error: res.abs_error,
            target,
        });
    }
    Ok((res.value, res.abs_error))
}

fn integrate_axis(
    ig: &LpIntegrand,
    schedule: &SingularitySchedule,
    axis: usize,
    n: usize,
    rel_tol: f64,
    tols: &Tolerances,
    x: &mut [f64; 3],
) -> AxisResult {
    // Budget split: the outermost Richardson target takes 0.4 of the
    // requested tolerance and each nested level runs 4x tighter, so the
    // integrated inner errors stay inside the remaining headroom.
    let cfg = EngineConfig {
        rel_tol: rel_tol * 0.4 * 0.25f64.powi(axis as i32),
        gl_order: if axis == 0 {
            tols.gl_order
        } else {
            tols.gl_order_inner
        },
        max_cells: (tols.quad_max_cells >> (2 * axis)).max(600),
        max_depth: tols.quad_max_depth,
    };
    let singular_t: Vec<f64> = schedule
        .per_variable
        .get(axis)
        .map(|list| list.iter().map(|&(s, _)| s.atan()).collect())
        .unwrap_or_default();

    if axis + 1 == n {
        let mut f = |t: f64| {
            let xv = t.tan();
            x[axis] = xv;
            let jac = 1.0 + xv * xv;
            (ig.eval(&x[..n]) * jac, 0.0)
        };
        integrate_line(&mut f, &singular_t, &cfg)
    } else {
        let mut f = |t: f64| {
            let xv = t.tan();
            x[axis] = xv;
            let jac = 1.0 + xv * xv;
            let mut xc = *x;
            let inner = integrate_axis(ig, schedule, axis + 1, n, rel_tol, tols, &mut xc);
            (inner.value * jac, inner.abs_error * jac)
        };
        integrate_line(&mut f, &singular_t, &cfg)
    }
}

/// Static divergence screening from degrees and real pole orders.
fn screen(
    r: &SeparableRational,
    p: f64,
    y: &[f64],
    schedule: &SingularitySchedule,
) -> Result<(), CoreError> {
    for k in 0..r.nvars() {
        let gap = r.degree_gap(k);
        if gap == i64::MAX {
            continue; // zero rational
        }
        if p * gap as f64 <= 1.0 {
            return Err(CoreError::DivergentIntegral {
                reason: format!(
                    "variable {k}: p * degree gap = {:.3} <= 1 (tail not integrable)",
                    p * gap as f64
                ),
            });
        }
        if y[k] == 0.0 {
            if let Some(list) = schedule.per_variable.get(k) {
                for &(loc, order) in list {
                    if p * order as f64 >= 1.0 {
                        return Err(CoreError::DivergentIntegral {
                            reason: format!(
                                "variable {k}: real pole at {loc} of order {order} with p * order >= 1"
                            ),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

/// Quasi-norm slice of one rational at imaginary offset `y`, to relative
/// tolerance `tol`: the returned `abs_error` satisfies
/// `abs_error <= tol * (1 + value)` or the call fails with the best estimate.
pub fn lp_quasinorm(
    r: &SeparableRational,
    p: f64,
    y: &[f64],
    tol: f64,
    tols: &Tolerances,
) -> Result<QuasiNormResult, CoreError> {
    quasinorm_impl(r, p, y, tol, tols, None)
}

/// Same as [`lp_quasinorm`] but with the real-pole schedule supplied by the
/// caller (for example from the closed-form split pole locations), skipping
/// the root-finding pass. The schedule must describe the slice at offset `y`.
pub fn lp_quasinorm_scheduled(
    r: &SeparableRational,
    p: f64,
    y: &[f64],
    tol: f64,
    tols: &Tolerances,
    schedule: &SingularitySchedule,
) -> Result<QuasiNormResult, CoreError> {
    quasinorm_impl(r, p, y, tol, tols, Some(schedule))
}

fn quasinorm_impl(
    r: &SeparableRational,
    p: f64,
    y: &[f64],
    tol: f64,
    tols: &Tolerances,
    schedule: Option<&SingularitySchedule>,
) -> Result<QuasiNormResult, CoreError> {
    if !(0.0 < p && p < 1.0) {
        return Err(CoreError::InvalidInput(format!("p = {p} outside (0, 1)")));
    }
    if tol <= 0.0 {
        return Err(CoreError::InvalidInput("tol must be positive".into()));
    }
    if y.len() != r.nvars() {
        return Err(CoreError::DimensionMismatch {
            expected: r.nvars(),
            got: y.len(),
        });
    }
    if r.is_zero() {
        return Ok(QuasiNormResult {
            value: 0.0,
            abs_error: 0.0,
            p,
            y_offset: y.to_vec(),
        });
    }
    let shifted = shift_by_imag(r, y);
    let owned;
    let schedule = match schedule {
        Some(s) => s,
        None => {
            owned = SingularitySchedule::from_rational(&shifted, tols)?;
            &owned
        }
    };
    screen(r, p, y, schedule)?;
    let n = r.nvars();
    let (value, abs_error) = if n == 1 {
        let ig = LpIntegrand {
            p,
            terms: vec![(Complex64::new(1.0, 0.0), shifted.evaluator())],
            extra: None,
        };
        integrate_lp(&ig, schedule, n, tol, tols)?
    } else {
        // |R|^p always factors as |num|^p prod_k |1/Q_k|^p, so the
        // pole-aware product rule applies to every separable rational.
        let core = SeparableRational::new(
            shifted.numerator().clone(),
            vec![crate::polyalg::UniPoly::one(); n],
        )?;
        let one = crate::polyalg::MultiPoly::constant(1, Complex64::new(1.0, 0.0));
        let fi = FactoredLpIntegrand {
            core: core.evaluator(),
            axis_factors: (0..n)
                .map(|k| {
                    SeparableRational::new(one.clone(), vec![shifted.denominator(k).clone()])
                        .map(|r| r.evaluator())
                })
                .collect::<Result<_, _>>()?,
            p,
        };
        let (value, err) = product_quasinorm(&fi, schedule, n, tol, tols)?;
        if err > tol * (1.0 + value.abs()) {
            return Err(CoreError::ToleranceNotMet {
                value,
                abs_error: err,
                target: tol * (1.0 + value.abs()),
            });
        }
        (value, err)
    };
    Ok(QuasiNormResult {
        value,
        abs_error,
        p,
        y_offset: y.to_vec(),
    })
}

/// An integrand factoring as `|core(x)|^p * prod_k |axis_k(x_k)|^p`, with
/// all real poles inside the one-variable axis factors. The split
/// components have exactly this shape.
pub struct FactoredLpIntegrand {
    /// The coupled polynomial part (a rational with unit denominators).
    pub core: RationalEvaluator,
    /// One-variable rationals holding the pole structure per axis.
    pub axis_factors: Vec<RationalEvaluator>,
    pub p: f64,
}

/// Inner integral over axes `>= 1` for one fixed outer coordinate:
/// `int |core(x)|^p prod_(k>=1) |axis_k|^p` with the adaptive engine, so the
/// kinks of `|core|^p` stay under per-cell error control.
fn factored_inner(
    fi: &FactoredLpIntegrand,
    schedule: &SingularitySchedule,
    axis: usize,
    n: usize,
    rel_tol: f64,
    tols: &Tolerances,
    x: &mut [f64; 3],
) -> engine::AxisResult {
    let cfg = engine::EngineConfig {
        rel_tol: rel_tol * 0.25f64.powi(axis as i32),
        gl_order: tols.gl_order_inner,
        max_cells: (tols.quad_max_cells >> (2 * axis)).max(600),
        max_depth: tols.quad_max_depth,
    };
    let singular_t: Vec<f64> = schedule
        .per_variable
        .get(axis)
        .map(|l| l.iter().map(|&(s, _)| s.atan()).collect())
        .unwrap_or_default();
    if axis + 1 == n {
        let mut f = |t: f64| {
            let xv = t.tan();
            x[axis] = xv;
            let jac = 1.0 + xv * xv;
            let mut z = [Complex64::new(0.0, 0.0); 3];
            for k in 0..n {
                z[k] = Complex64::new(x[k], 0.0);
            }
            let core = fi.core.eval(&z[..n]);
            let u = fi.axis_factors[axis].eval(&[z[axis]]);
            if core.is_zero() || u.is_zero() {
                return (0.0, 0.0);
            }
            let lg = fi.p
                * (core.mantissa.norm().ln() + core.log + u.mantissa.norm().ln() + u.log);
            ((lg + jac.ln()).exp(), 0.0)
        };
        engine::integrate_line(&mut f, &singular_t, &cfg)
    } else {
        let mut f = |t: f64| {
            let xv = t.tan();
            x[axis] = xv;
            let jac = 1.0 + xv * xv;
            let u = fi.axis_factors[axis].eval(&[Complex64::new(xv, 0.0)]);
            if u.is_zero() {
                return (0.0, 0.0);
            }
            let weight = (fi.p * (u.mantissa.norm().ln() + u.log) + jac.ln()).exp();
            let mut xc = *x;
            let inner = factored_inner(fi, schedule, axis + 1, n, rel_tol, tols, &mut xc);
            (inner.value * weight, inner.abs_error * weight)
        };
        engine::integrate_line(&mut f, &singular_t, &cfg)
    }
}

/// Quasi-norm of a separable-pole product integrand at `y = 0`.
///
/// The outermost axis uses a fixed composite Gauss rule on a partition
/// graded against its singular factor alone (the inner integration smooths
/// the `|core|^p` kinks in the outer direction, so fixed nodes suffice
/// there); inner axes stay fully adaptive. The outer error estimate comes
/// from comparing two Gauss orders on the same partition. This removes the
/// multiplicative cell blow-up of nested adaptive passes when every real
/// pole lives in a one-variable factor.
pub fn product_quasinorm(
    fi: &FactoredLpIntegrand,
    schedule: &SingularitySchedule,
    n: usize,
    rel_tol: f64,
    tols: &Tolerances,
) -> Result<(f64, f64), CoreError> {
    if n < 2 || n > 3 {
        return Err(CoreError::InvalidInput(format!(
            "product rule supports n in 2..=3, got {n}"
        )));
    }
    let singular_t: Vec<f64> = schedule
        .per_variable
        .first()
        .map(|l| l.iter().map(|&(s, _)| s.atan()).collect())
        .unwrap_or_default();
    let u0 = &fi.axis_factors[0];
    let p = fi.p;

    // Two passes with increasingly deep outer partitions: the difference is
    // the error estimate, dominated by near-pole mass the shallower grading
    // misses (a same-partition order comparison cannot see that bias).
    let mut values = [0.0f64; 2];
    let mut inner_err = 0.0f64;
    for (pass, part_tol) in [rel_tol * 0.3, rel_tol * 0.03].into_iter().enumerate() {
        let part_cfg = engine::EngineConfig {
            rel_tol: part_tol.max(1e-8),
            gl_order: 7,
            max_cells: (tols.quad_max_cells / 4).max(600),
            max_depth: tols.quad_max_depth,
        };
        let mut probe = |t: f64| {
            let x = t.tan();
            (
                u0.abs_pow(&[Complex64::new(x, 0.0)], p) * (1.0 + x * x),
                0.0,
            )
        };
        let cells = engine::partition_line(&mut probe, &singular_t, &part_cfg);
        let rule = engine::GaussRule::new(8);
        let mut acc = 0.0f64;
        let mut comp = 0.0f64;
        for &(t0, t1) in &cells {
            let half = 0.5 * (t1 - t0);
            let mid = 0.5 * (t0 + t1);
            for (node, w) in rule.nodes.iter().zip(rule.weights.iter()) {
                let t = mid + half * node;
                let xv = t.tan();
                let u = u0.eval(&[Complex64::new(xv, 0.0)]);
                if u.is_zero() {
                    continue;
                }
                let jac = 1.0 + xv * xv;
                let weight =
                    w * half * (p * (u.mantissa.norm().ln() + u.log) + jac.ln()).exp();
                if weight == 0.0 || !weight.is_finite() {
                    continue;
                }
                let mut x = [0.0f64; 3];
                x[0] = xv;
                let inner = factored_inner(fi, schedule, 1, n, rel_tol, tols, &mut x);
                let term = weight * inner.value;
                if pass == 1 {
                    inner_err += weight.abs() * inner.abs_error;
                }
                let y = term - comp;
                let s = acc + y;
                comp = (s - acc) - y;
                acc = s;
            }
        }
        values[pass] = acc;
    }
    let value = values[1];
    let err = (values[1] - values[0]).abs() + inner_err + 0.02 * rel_tol * (1.0 + value.abs());
    Ok((value, err))
}

/// `int |f(x) + sum_j c_j R_j(x)|^p dx` over `R^n` at `y = 0`, for residual
/// norms of sampled functions against rational partial sums. The supplied
/// schedule must cover the real poles of every rational term.
pub fn lp_distance(
    f: Option<&(dyn Fn(&[f64]) -> Complex64 + Sync)>,
    terms: &[(Complex64, &SeparableRational)],
    p: f64,
    n: usize,
    tol: f64,
    tols: &Tolerances,
    schedule: &SingularitySchedule,
) -> Result<(f64, f64), CoreError> {
    if !(0.0 < p && p < 1.0) {
        return Err(CoreError::InvalidInput(format!("p = {p} outside (0, 1)")));
    }
    let ig = LpIntegrand {
        p,
        terms: terms
            .iter()
            .map(|(c, r)| (*c, r.evaluator()))
            .collect(),
        extra: f,
    };
    integrate_lp(&ig, schedule, n, tol, tols)
}

/// Slice values along a grid of interior offsets; used to check that the
/// norm-slice function is maximized at the boundary `y = 0`.
pub fn norm_slice_profile(
    r: &SeparableRational,
    p: f64,
    octant: &crate::hardy::SignVector,
    y_grid: &[Vec<f64>],
    tol: f64,
    tols: &Tolerances,
) -> Result<Vec<QuasiNormResult>, CoreError> {
    for y in y_grid {
        if y.len() != r.nvars() {
            return Err(CoreError::DimensionMismatch {
                expected: r.nvars(),
                got: y.len(),
            });
        }
        for (k, &yk) in y.iter().enumerate() {
            if yk * (octant.signs()[k] as f64) < 0.0 {
                return Err(CoreError::InvalidInput(format!(
                    "offset {y:?} lies outside the closed octant {octant}"
                )));
            }
        }
    }
    y_grid
        .iter()
        .map(|y| lp_quasinorm(r, p, y, tol, tols))
        .collect()
}
