//! Density machinery: bounded rational mollifiers on the tube and
//! reciprocal-basis fits on the polydisc.
//!
//! The mollifier
//!
//! ```text
//! g(z) = prod_j alpha^(N+1) (2i / ((1+alpha^2) i + (1-alpha^2) z_j))^(N+1)
//! ```
//!
//! is holomorphic on the closed first-octant tube, bounded by one there, and
//! tends to one pointwise as `alpha -> 1`; multiplying a slightly lifted
//! function by it produces smooth rapidly-decaying approximants. Separately,
//! boundary values of first-octant Hardy functions are fitted in the class
//! of rationals `prod_k (z_k + i)^(-N-1) P(1/(z_1+i), ...)` by sampling the
//! Cayley pullback on the distinguished boundary of the polydisc and solving
//! a least-squares problem in powers of `u_k = 2i/(z_k + i)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::approx::SampledFunction;
use crate::config::Tolerances;
use crate::error::CoreError;
use crate::hardy::SignVector;
use crate::polyalg::{binomial_power, MultiPoly, SeparableRational, UniPoly};
use crate::special::integral_one_plus_x2_pow;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MollifierParams {
    pub alpha: f64,
    pub big_n: u32,
    pub n: usize,
}

impl MollifierParams {
    pub fn new(alpha: f64, big_n: u32, n: usize) -> Result<Self, CoreError> {
        if !(0.0 < alpha && alpha < 1.0) || big_n == 0 || n == 0 {
            return Err(CoreError::InvalidInput(
                "mollifier needs 0 < alpha < 1, N >= 1, n >= 1".into(),
            ));
        }
        Ok(MollifierParams { alpha, big_n, n })
    }
}

/// Direct evaluation of the mollifier; the denominator cannot vanish for
/// `Im z_j >= 0`.
pub fn mollifier_eval(params: &MollifierParams, z: &[Complex64]) -> Complex64 {
    let a = params.alpha;
    let e = params.big_n + 1;
    let mut acc = Complex64::new(1.0, 0.0);
    for &zj in z.iter() {
        let den = Complex64::new(0.0, 1.0 + a * a) + (1.0 - a * a) * zj;
        acc *= (a * 2.0 * I / den).powu(e);
    }
    acc
}

/// The mollifier as a separable rational function.
pub fn mollifier_rational(params: &MollifierParams) -> SeparableRational {
    let a = params.alpha;
    let e = params.big_n + 1;
    let scale = (Complex64::new(0.0, 2.0 * a)).powu(e);
    let mut num = MultiPoly::constant(params.n, Complex64::new(1.0, 0.0));
    for _ in 0..params.n {
        num = num.scale(scale);
    }
    let den = binomial_power(
        Complex64::new(0.0, 1.0 + a * a),
        Complex64::new(1.0 - a * a, 0.0),
        e,
    );
    SeparableRational::new(num, vec![den; params.n]).expect("mollifier is well formed")
}

/// `g(z) * r(z + i * shift)`: lifts `r` into the tube and damps it so the
/// product is smooth on the closed tube with faster decay.
pub fn mollify(
    r: &SeparableRational,
    params: &MollifierParams,
    shift: f64,
) -> Result<SeparableRational, CoreError> {
    if params.n != r.nvars() {
        return Err(CoreError::DimensionMismatch {
            expected: r.nvars(),
            got: params.n,
        });
    }
    if shift <= 0.0 {
        return Err(CoreError::InvalidInput("shift must be positive".into()));
    }
    let offsets = vec![Complex64::new(0.0, shift); r.nvars()];
    let lifted = r.shift(&offsets);
    lifted.mul(&mollifier_rational(params))
}

/// A fitted member of the reciprocal class for one octant.
#[derive(Debug, Clone, Serialize)]
pub struct RnAtom {
    pub octant: SignVector,
    pub big_n: u32,
    /// Coefficients of `P` in the tensor powers of `u_k = 2i/(z_k + sigma_k i)`
    /// (graded-lex over the multi-indices).
    pub coefficients: Vec<(Vec<u32>, Complex64)>,
    pub rational: SeparableRational,
}

#[derive(Debug, Clone, Serialize)]
pub struct RnFit {
    pub atom: RnAtom,
    /// Max residual of the polydisc fit over the sample grid.
    pub sup_residual: f64,
    /// Transported bound: `sup^p 2^((N+1)p) prod_k J((N+1)p/2)` with
    /// `J(q) = int (1+x^2)^(-q) dx`.
    pub lp_bound: f64,
    pub samples: usize,
    pub condition: f64,
}

/// Fits boundary values of a Hardy function over `octant` in the class
/// `prod_k (z_k + sigma_k i)^(-N-1) P(...)`, by uniform angular sampling of
/// the distinguished boundary. Requires `(N+1) p > 1`.
pub fn fit_rn(
    f: &SampledFunction,
    p: f64,
    big_n: u32,
    degree: u32,
    octant: &SignVector,
    grid_per_dim: usize,
    tols: &Tolerances,
) -> Result<RnFit, CoreError> {
    let n = f.nvars();
    if octant.n() != n {
        return Err(CoreError::DimensionMismatch {
            expected: n,
            got: octant.n(),
        });
    }
    if (big_n as f64 + 1.0) * p <= 1.0 {
        return Err(CoreError::InvalidInput(format!(
            "(N+1) p = {} must exceed 1",
            (big_n as f64 + 1.0) * p
        )));
    }
    let g = if grid_per_dim > 0 {
        grid_per_dim.max(2 * (degree as usize + 1))
    } else {
        8 * (degree as usize + 1) + 33
    };
    // Angular grid, offset to avoid psi = +-pi (x = infinity).
    let psis: Vec<f64> = (0..g)
        .map(|i| -std::f64::consts::PI + 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / g as f64)
        .collect();
    let xs: Vec<f64> = psis.iter().map(|&t| (t / 2.0).tan()).collect();
    // u(psi) = 1 + e^{i psi}.
    let us: Vec<Complex64> = psis
        .iter()
        .map(|&t| Complex64::new(1.0 + t.cos(), t.sin()))
        .collect();

    // Design matrix per dimension: powers of u.
    let mut mat = DMatrix::<Complex64>::zeros(g, degree as usize + 1);
    for (i, &u) in us.iter().enumerate() {
        let mut acc = Complex64::new(1.0, 0.0);
        for jj in 0..=degree as usize {
            mat[(i, jj)] = acc;
            acc *= u;
        }
    }
    let (pinv, condition) = pseudo_inverse(mat, tols.fit_rcond);
    if condition > tols.fit_cond_limit {
        return Err(CoreError::IllConditionedFit { cond: condition });
    }

    // Target tensor: h~(psi) = f(sigma * x) / prod u^(N+1); sign flips pull
    // every octant back to the first one.
    let dims = vec![g; n];
    let total: usize = dims.iter().product();
    let mut data = vec![Complex64::new(0.0, 0.0); total];
    let mut x = vec![0.0f64; n];
    for (flat, slot) in data.iter_mut().enumerate() {
        let mut rem = flat;
        let mut denom = Complex64::new(1.0, 0.0);
        for k in (0..n).rev() {
            let i = rem % g;
            rem /= g;
            x[k] = octant.signs()[k] as f64 * xs[i];
            denom *= us[i].powu(big_n + 1);
        }
        *slot = f.eval(&x) / denom;
    }

    // Tensor solve: the same pseudo-inverse applies along every mode.
    let mut coeff = data.clone();
    let mut coeff_dims = dims.clone();
    for k in 0..n {
        let (next, next_dims) = mode_apply(&coeff, &coeff_dims, k, &pinv);
        coeff = next;
        coeff_dims = next_dims;
    }

    // Sup residual of the polydisc fit over the sample grid.
    let mut sup = 0.0f64;
    for (flat, &target) in data.iter().enumerate() {
        let mut rem = flat;
        let mut fitted = Complex64::new(0.0, 0.0);
        // Evaluate the tensor polynomial at this grid point.
        let mut point_us = vec![Complex64::new(0.0, 0.0); n];
        for k in (0..n).rev() {
            let i = rem % g;
            rem /= g;
            point_us[k] = us[i];
        }
        for (cflat, &c) in coeff.iter().enumerate() {
            if c.norm() == 0.0 {
                continue;
            }
            let mut crem = cflat;
            let mut term = c;
            for k in (0..n).rev() {
                let jk = crem % coeff_dims[k];
                crem /= coeff_dims[k];
                term *= point_us[k].powu(jk as u32);
            }
            fitted += term;
        }
        sup = sup.max((fitted - target).norm());
    }

    // Assemble the rational: R(z) = prod u_k^(N+1) P(u), with
    // u_k = 2i / (z_k + sigma_k i) realized over (z_k + sigma_k i)^(N+1+deg).
    let mut coeffs_list: Vec<(Vec<u32>, Complex64)> = Vec::new();
    let mut numerator = MultiPoly::zero(n);
    let deg = degree;
    for (cflat, &c) in coeff.iter().enumerate() {
        if c.norm() < 1e-300 {
            continue;
        }
        let mut crem = cflat;
        let mut jvec = vec![0u32; n];
        for k in (0..n).rev() {
            jvec[k] = (crem % coeff_dims[k]) as u32;
            crem /= coeff_dims[k];
        }
        coeffs_list.push((jvec.clone(), c));
        // Term: c prod_k (2i)^(N+1+j_k) (z_k + s_k i)^(deg - j_k).
        let mut term = MultiPoly::constant(n, c);
        for k in 0..n {
            let s = octant.signs()[k] as f64;
            let factor = binomial_power(
                Complex64::new(0.0, s),
                Complex64::new(1.0, 0.0),
                deg - jvec[k],
            )
            .scale(Complex64::new(0.0, 2.0).powu(big_n + 1 + jvec[k]));
            term = term.mul_univar(k, &factor);
        }
        numerator = numerator.add(&term);
    }
    let dens: Vec<UniPoly> = (0..n)
        .map(|k| {
            let s = octant.signs()[k] as f64;
            binomial_power(
                Complex64::new(0.0, s),
                Complex64::new(1.0, 0.0),
                big_n + 1 + deg,
            )
        })
        .collect();
    let rational = SeparableRational::new(numerator, dens)?;

    // Error transport to L^p: pointwise |f - R| <= sup * prod |2/(z_k+i)|^(N+1),
    // and the slab integral of (1+x^2)^(-(N+1)p/2) is closed-form.
    let q = (big_n as f64 + 1.0) * p / 2.0;
    let lp_bound = sup.powf(p)
        * 2.0f64.powf((big_n as f64 + 1.0) * p)
        * integral_one_plus_x2_pow(q).powi(n as i32);

    Ok(RnFit {
        atom: RnAtom {
            octant: octant.clone(),
            big_n,
            coefficients: coeffs_list,
            rational,
        },
        sup_residual: sup,
        lp_bound,
        samples: total,
        condition,
    })
}

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
    let u = svd.u.expect("svd u");
    let v_t = svd.v_t.expect("svd v_t");
    let s = &svd.singular_values;
    let smax = s.iter().cloned().fold(0.0f64, f64::max);
    let mut smin = smax;
    let r = s.len();
    let mut sig_inv = DMatrix::<Complex64>::zeros(r, r);
    for i in 0..r {
        if s[i] > rcond * smax && s[i] > 0.0 {
            sig_inv[(i, i)] = Complex64::new(1.0 / s[i], 0.0);
            smin = smin.min(s[i]);
        }
    }
    let mut pinv = v_t.adjoint() * sig_inv * u.adjoint();
    for c in 0..ncols {
        for v in pinv.row_mut(c).iter_mut() {
            *v *= col_scale[c];
        }
    }
    (pinv, if smin > 0.0 { smax / smin } else { f64::INFINITY })
}

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
                let src = (o * cols + s) * inner;
                let dst = (o * rows + r) * inner;
                for i in 0..inner {
                    out[dst + i] += m * data[src + i];
                }
            }
        }
    }
    (out, out_dims)
}
