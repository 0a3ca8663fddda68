//! Weighted tensor least-squares fitting of class-A atoms.
//!
//! Atoms with denominator `(1 + x^2)^L` and numerator degree at most `D`
//! pull back under `x = tan(theta/2)` to trigonometric polynomials of degree
//! `L` in `theta` vanishing to order `2s = 2L - D` (D rounded down to even)
//! at `theta = pi`. The fit therefore works in the near-orthogonal circle
//! basis
//!
//! ```text
//! psi_j(x) = cos(j theta) cos^(2s)(theta/2),   j = 0..L-s,
//!            sin(j theta) cos^(2s)(theta/2),   j = 1..L-s,
//! ```
//!
//! sampled uniformly in `theta`; the same functions in monomial form are
//! `Re/Im[(1 + ix)^(2j)] (1 + x^2)^(L-j-s)` with exact integer coefficients,
//! so converting the solution to the interchange format is stable. A direct
//! box-sampled fit of the `(1+x^2)^(-j)` family stalls near condition 1e11;
//! this one stays near orthogonal.
//!
//! Both the sample grid and the weight `prod_k (1 + x_k^2)^(l_tilde_k)`
//! factorize per variable, so the normal problem is a Kronecker product and
//! one truncated-SVD pseudo-inverse per dimension solves the whole tensor
//! system.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::SampledFunction;
use crate::config::Tolerances;
use crate::error::CoreError;
use crate::polyalg::{binomial_power, MultiIndex, MultiPoly, SeparableRational, UniPoly};
use crate::quadrature::{lp_distance, QuasiNormResult, SingularitySchedule};

#[derive(Debug, Clone)]
pub struct FitOptions {
    /// Base denominator exponents.
    pub l: Vec<u32>,
    /// Weight exponents; the fit needs `p * l_tilde_k > 1`.
    pub l_tilde: Vec<u32>,
    /// Per-variable numerator degree cap; must stay below `2 (l + l_tilde)`.
    pub max_degree: Vec<u32>,
    /// Sample points per axis; `0` picks `4 * (max_degree + 1) + 65`.
    pub grid_per_dim: usize,
    /// Relative singular-value cutoff.
    pub rcond: f64,
}

#[derive(Debug, Clone)]
pub struct FittedAtom {
    pub atom: SeparableRational,
    /// Denominator exponents `L_k = l_k + l_tilde_k`.
    pub exponents: Vec<u32>,
    /// Weighted RMS residual over the sample grid.
    pub sample_residual: f64,
    /// Unweighted max residual over the sample grid.
    pub sup_residual: f64,
    /// `||f - Q||_p^p` by quadrature.
    pub lp_residual: QuasiNormResult,
    /// Largest per-dimension condition number of the truncated systems.
    pub condition: f64,
}

/// Fits `Q = P / prod (1 + x_k^2)^(l_k + l_tilde_k)` to `f` over its
/// truncation box and measures the `L^p` residual.
pub fn fit_atom(
    f: &SampledFunction,
    p: f64,
    opts: &FitOptions,
    tols: &Tolerances,
) -> Result<FittedAtom, CoreError> {
    let n = f.nvars();
    if opts.l.len() != n || opts.l_tilde.len() != n || opts.max_degree.len() != n {
        return Err(CoreError::DimensionMismatch {
            expected: n,
            got: opts.l.len().min(opts.l_tilde.len()).min(opts.max_degree.len()),
        });
    }
    for k in 0..n {
        if p * opts.l_tilde[k] as f64 <= 1.0 {
            return Err(CoreError::InvalidInput(format!(
                "weight exponent l_tilde[{k}] = {} needs p * l_tilde > 1",
                opts.l_tilde[k]
            )));
        }
        if opts.max_degree[k] >= 2 * (opts.l[k] + opts.l_tilde[k]) {
            return Err(CoreError::InvalidInput(format!(
                "max_degree[{k}] = {} must stay below 2 (l + l_tilde) = {}",
                opts.max_degree[k],
                2 * (opts.l[k] + opts.l_tilde[k])
            )));
        }
    }

    let mut degrees: Vec<u32> = opts.max_degree.clone();
    let mut reduced_once = false;
    loop {
        match fit_once(f, p, opts, &degrees, tols) {
            Ok(fitted) => return Ok(fitted),
            Err(CoreError::IllConditionedFit { cond }) if !reduced_once => {
                // One retry at reduced degree, as the escalation path expects.
                reduced_once = true;
                for d in degrees.iter_mut() {
                    *d = d.saturating_sub(2);
                }
                let _ = cond;
            }
            Err(e) => return Err(e),
        }
    }
}

fn fit_once(
    f: &SampledFunction,
    p: f64,
    opts: &FitOptions,
    degrees: &[u32],
    tols: &Tolerances,
) -> Result<FittedAtom, CoreError> {
    let n = f.nvars();
    let exponents: Vec<u32> = (0..n).map(|k| opts.l[k] + opts.l_tilde[k]).collect();

    // Per-dimension grids, basis matrices, and pseudo-inverses.
    let mut grids: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut pinvs: Vec<DMatrix<Complex64>> = Vec::with_capacity(n);
    let mut weights: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut bases: Vec<Vec<CircleBasisFn>> = Vec::with_capacity(n);
    let mut condition = 1.0f64;
    for k in 0..n {
        let big_l = exponents[k];
        let half_deg = (degrees[k] / 2) as i64;
        let s = big_l as i64 - half_deg;
        if s < 1 {
            return Err(CoreError::InvalidInput(format!(
                "max_degree[{k}] leaves no decay margin against 2 (l + l_tilde)"
            )));
        }
        let s = s as u32;
        let j_max = big_l - s;
        let mut basis: Vec<CircleBasisFn> = Vec::with_capacity(2 * j_max as usize + 1);
        for j in 0..=j_max {
            basis.push(CircleBasisFn { j, sine: false, s });
        }
        for j in 1..=j_max {
            basis.push(CircleBasisFn { j, sine: true, s });
        }
        let g = if opts.grid_per_dim > 0 {
            opts.grid_per_dim.max(2 * basis.len())
        } else {
            6 * basis.len() + 65
        };
        // Uniform on the Cayley circle; theta covers the tails natively.
        let thetas: Vec<f64> = (0..g)
            .map(|i| {
                -std::f64::consts::PI
                    + 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / g as f64
            })
            .collect();
        let grid: Vec<f64> = thetas.iter().map(|&t| (t / 2.0).tan()).collect();
        let w: Vec<f64> = grid
            .iter()
            .map(|&x| (1.0 + x * x).powi(opts.l_tilde[k] as i32).sqrt())
            .collect();
        let mut mat = DMatrix::<Complex64>::zeros(grid.len(), basis.len());
        for (i, &theta) in thetas.iter().enumerate() {
            for (c, b) in basis.iter().enumerate() {
                mat[(i, c)] = Complex64::new(b.value_at_theta(theta) * w[i], 0.0);
            }
        }
        let (pinv, cond) = pseudo_inverse(mat, opts.rcond);
        if cond > tols.fit_cond_limit {
            return Err(CoreError::IllConditionedFit { cond });
        }
        condition = condition.max(cond);
        grids.push(grid);
        pinvs.push(pinv);
        weights.push(w);
        bases.push(basis);
    }

    // Weighted sample tensor.
    let dims: Vec<usize> = grids.iter().map(|g| g.len()).collect();
    let total: usize = dims.iter().product();
    let mut data = vec![Complex64::new(0.0, 0.0); total];
    let mut x = vec![0.0f64; n];
    for (flat, slot) in data.iter_mut().enumerate() {
        let mut rem = flat;
        let mut wprod = 1.0;
        for k in (0..n).rev() {
            let i = rem % dims[k];
            rem /= dims[k];
            x[k] = grids[k][i];
            wprod *= weights[k][i];
        }
        *slot = f.eval(&x) * wprod;
    }

    // Solve mode by mode.
    let mut coeff = data;
    let mut coeff_dims = dims.clone();
    for k in 0..n {
        let (next, next_dims) = mode_apply(&coeff, &coeff_dims, k, &pinvs[k]);
        coeff = next;
        coeff_dims = next_dims;
    }

    // Assemble the numerator in monomial form.
    let num_factors: Vec<Vec<UniPoly>> = (0..n)
        .map(|k| {
            bases[k]
                .iter()
                .map(|b| b.numerator_factor(exponents[k]))
                .collect()
        })
        .collect();
    let out_dims: Vec<usize> = (0..n).map(|k| degrees[k] as usize + 1).collect();
    let out_total: usize = out_dims.iter().product();
    let mut dense = vec![Complex64::new(0.0, 0.0); out_total];
    let mut idx = vec![0usize; n];
    for (flat, &c) in coeff.iter().enumerate() {
        if c.norm() < 1e-300 {
            continue;
        }
        let mut rem = flat;
        for k in (0..n).rev() {
            idx[k] = rem % coeff_dims[k];
            rem /= coeff_dims[k];
        }
        accumulate_outer(&mut dense, &out_dims, &num_factors, &idx, c, 0, 0, &mut vec![0; n]);
    }
    let mut numerator = MultiPoly::zero(n);
    for (flat, &c) in dense.iter().enumerate() {
        if c.norm() == 0.0 {
            continue;
        }
        let mut rem = flat;
        let mut e = vec![0u32; n];
        for k in (0..n).rev() {
            e[k] = (rem % out_dims[k]) as u32;
            rem /= out_dims[k];
        }
        numerator.add_term(MultiIndex(e), c);
    }

    let one_plus_x2 = UniPoly::new(vec![
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
    ]);
    let dens: Vec<UniPoly> = exponents.iter().map(|&l| one_plus_x2.pow(l)).collect();
    let atom = SeparableRational::new(numerator, dens)?;

    // Residuals on the grid.
    let ev = atom.evaluator();
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    let mut sum_sq = 0.0;
    let mut wsum = 0.0;
    let mut sup = 0.0f64;
    let mut rem_x = vec![0.0f64; n];
    for flat in 0..total {
        let mut rem = flat;
        let mut wprod = 1.0;
        for k in (0..n).rev() {
            let i = rem % dims[k];
            rem /= dims[k];
            rem_x[k] = grids[k][i];
            z[k] = Complex64::new(grids[k][i], 0.0);
            wprod *= weights[k][i];
        }
        let diff = (f.eval(&rem_x) - ev.eval(&z).to_complex()).norm();
        sup = sup.max(diff);
        sum_sq += (diff * wprod).powi(2);
        wsum += wprod * wprod;
    }
    let sample_residual = (sum_sq / wsum.max(1e-300)).sqrt();

    // Honest L^p residual by quadrature. The |f - Q|^p integrand carries a
    // kink at every sign change of the error, so multi-dimensional passes
    // run at a percent-level tolerance; stage decisions only need that much.
    let schedule = SingularitySchedule {
        per_variable: vec![vec![]; n],
    };
    let fe = |x: &[f64]| f.eval(x);
    let residual_tol = if n == 1 {
        tols.quad_tol_for(1) * 10.0
    } else {
        1e-3
    };
    let (value, abs_error) = match lp_distance(
        Some(&fe),
        &[(Complex64::new(-1.0, 0.0), &atom)],
        p,
        n,
        residual_tol,
        tols,
        &schedule,
    ) {
        Ok(pair) => pair,
        Err(CoreError::ToleranceNotMet {
            value, abs_error, ..
        }) => (value, abs_error),
        Err(e) => return Err(e),
    };

    Ok(FittedAtom {
        atom,
        exponents,
        sample_residual,
        sup_residual: sup,
        lp_residual: QuasiNormResult {
            value,
            abs_error,
            p,
            y_offset: vec![0.0; n],
        },
        condition,
    })
}

/// One circle basis function `cos/sin(j theta) cos^(2s)(theta/2)`.
#[derive(Debug, Clone, Copy)]
struct CircleBasisFn {
    j: u32,
    sine: bool,
    s: u32,
}

impl CircleBasisFn {
    fn value_at_theta(&self, theta: f64) -> f64 {
        let osc = if self.sine {
            (self.j as f64 * theta).sin()
        } else {
            (self.j as f64 * theta).cos()
        };
        osc * (theta / 2.0).cos().powi(2 * self.s as i32)
    }

    /// Monomial numerator over `(1 + x^2)^L`:
    /// `Re/Im[(1 + ix)^(2j)] (1 + x^2)^(L - j - s)`, exact small integers.
    fn numerator_factor(&self, big_l: u32) -> UniPoly {
        let osc = binomial_power(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            2 * self.j,
        );
        let part = UniPoly::new(
            osc.coeffs()
                .iter()
                .map(|c| {
                    if self.sine {
                        Complex64::new(c.im, 0.0)
                    } else {
                        Complex64::new(c.re, 0.0)
                    }
                })
                .collect(),
        );
        let one_plus_x2 = UniPoly::new(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ]);
        part.mul(&one_plus_x2.pow(big_l - self.j - self.s))
    }
}

/// Adds `c * prod_k factor[k][idx[k]]` into the dense coefficient tensor.
#[allow(clippy::too_many_arguments)]
fn accumulate_outer(
    dense: &mut [Complex64],
    out_dims: &[usize],
    num_factors: &[Vec<UniPoly>],
    idx: &[usize],
    c: Complex64,
    axis: usize,
    flat: usize,
    pos: &mut Vec<usize>,
) {
    if axis == out_dims.len() {
        dense[flat] += c;
        return;
    }
    let poly = &num_factors[axis][idx[axis]];
    for (e, &pc) in poly.coeffs().iter().enumerate() {
        if pc.re == 0.0 && pc.im == 0.0 {
            continue;
        }
        pos[axis] = e;
        accumulate_outer(
            dense,
            out_dims,
            num_factors,
            idx,
            c * pc,
            axis + 1,
            flat * out_dims[axis] + e,
            pos,
        );
    }
}

/// Moore-Penrose pseudo-inverse with relative cutoff; returns the kept
/// condition number. Columns are equilibrated to unit norm first, so the
/// cutoff measures shape degeneracy rather than scale spread.
fn pseudo_inverse(mut mat: DMatrix<Complex64>, rcond: f64) -> (DMatrix<Complex64>, f64) {
    let ncols = mat.ncols();
    let mut col_scale = vec![1.0f64; ncols];
    for c in 0..ncols {
        let norm = mat.column(c).norm();
        if norm > 0.0 {
            col_scale[c] = 1.0 / norm;
            for v in mat.column_mut(c).iter_mut() {
                *v *= col_scale[c];
            }
        }
    }
    let svd = mat.svd(true, true);
    let u = svd.u.expect("svd requested u");
    let v_t = svd.v_t.expect("svd requested v_t");
    let s = &svd.singular_values;
    let smax = s.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = rcond * smax;
    let mut smin_kept = smax;
    let r = s.len();
    let mut sig_inv = DMatrix::<Complex64>::zeros(r, r);
    for i in 0..r {
        if s[i] > cutoff && s[i] > 0.0 {
            sig_inv[(i, i)] = Complex64::new(1.0 / s[i], 0.0);
            smin_kept = smin_kept.min(s[i]);
        }
    }
    let mut pinv = v_t.adjoint() * sig_inv * u.adjoint();
    for c in 0..ncols {
        for v in pinv.row_mut(c).iter_mut() {
            *v *= col_scale[c];
        }
    }
    let cond = if smin_kept > 0.0 { smax / smin_kept } else { f64::INFINITY };
    (pinv, cond)
}

/// Applies `mat` along `axis` of a dense row-major tensor.
fn mode_apply(
    data: &[Complex64],
    dims: &[usize],
    axis: usize,
    mat: &DMatrix<Complex64>,
) -> (Vec<Complex64>, Vec<usize>) {
    let rows = mat.nrows();
    let cols = mat.ncols();
    debug_assert_eq!(cols, dims[axis]);
    let outer: usize = dims[..axis].iter().product();
    let inner: usize = dims[axis + 1..].iter().product();
    let mut out_dims = dims.to_vec();
    out_dims[axis] = rows;
    let mut out = vec![Complex64::new(0.0, 0.0); outer * rows * inner];
    for o in 0..outer {
        for r in 0..rows {
            for s in 0..cols {
                let m = mat[(r, s)];
                if m.re == 0.0 && m.im == 0.0 {
                    continue;
                }
                let src_base = (o * cols + s) * inner;
                let dst_base = (o * rows + r) * inner;
                for i in 0..inner {
                    out[dst_base + i] += m * data[src_base + i];
                }
            }
        }
    }
    (out, out_dims)
}
