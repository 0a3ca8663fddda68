//! Splitting one rational atom into `2^n` octant Hardy components.
//!
//! For an atom `R = P / prod_k (1 + z_k^2)^(l_k)` and parameters `m_k`,
//! `phi_k`, the per-variable factors
//!
//! ```text
//! F_k^+ = (i - z)^m / D_k,   F_k^- = -e^{i phi} (i + z)^m / D_k,
//! D_k(z) = (i - z)^m - e^{i phi} (i + z)^m
//! ```
//!
//! satisfy `F_k^+ + F_k^- = 1` identically, and all roots of `D_k` are real
//! and simple whenever the leading coefficient `(-1)^m - e^{i phi}` stays
//! away from zero. The octant component multiplies `R` by `F_k^+` or `F_k^-`
//! per variable, written in the closed form that cancels the `(z_k -+ i)^l`
//! pole structurally:
//!
//! ```text
//! sigma(k) = +1:  numerator gains (-1)^m (z_k - i)^(m - l),
//!                 denominator (z_k + i)^l D_k(z_k)
//! sigma(k) = -1:  numerator gains -e^{i phi} (z_k + i)^(m - l),
//!                 denominator (z_k - i)^l D_k(z_k)
//! ```
//!
//! so components only carry the real `D_k` poles plus the half-plane-clear
//! poles at `-+ i`, the components sum to `R` exactly, and per-variable
//! degree gaps are preserved.
//!
//! On the real axis `|beta(x)| = 1`, so every component has the same modulus
//! `|R(x)| / prod_k 2 |sin((phi_k - m_k theta(x_k)) / 2)|` regardless of its
//! octant; the fast phase-scan objective uses this identity (and the tests
//! verify it) while reported per-component norms are always integrated
//! independently.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::CoreError;
use crate::hardy::{certify_with_norm, HardyCertificate, SignVector};
use crate::polyalg::{binomial_power, MultiPoly, SeparableRational, UniPoly};
use crate::quadrature::{lp_quasinorm, lp_quasinorm_scheduled, QuasiNormResult, SingularitySchedule};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `C_np = 2^n (2^(1-p) pi / (1 - p))^n`, the averaging constant.
pub fn c_np(n: usize, p: f64) -> f64 {
    (2.0 * 2.0f64.powf(1.0 - p) * PI / (1.0 - p)).powi(n as i32)
}

/// A phase vector in `(-pi, pi)^n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseVector {
    phis: Vec<f64>,
}

impl PhaseVector {
    pub fn new(phis: Vec<f64>) -> Result<Self, CoreError> {
        if phis.iter().any(|p| !(p.abs() < PI)) {
            return Err(CoreError::InvalidInput(
                "phase components must lie in (-pi, pi)".into(),
            ));
        }
        Ok(PhaseVector { phis })
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    pub fn n(&self) -> usize {
        self.phis.len()
    }
}

/// Split parameters: per-variable order `m_k` and the phase.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitParams {
    pub m: Vec<u32>,
    pub phase: PhaseVector,
}

impl SplitParams {
    pub fn new(m: Vec<u32>, phase: PhaseVector) -> Result<Self, CoreError> {
        if m.len() != phase.n() {
            return Err(CoreError::DimensionMismatch {
                expected: m.len(),
                got: phase.n(),
            });
        }
        Ok(SplitParams { m, phase })
    }

    /// Smallest admissible orders, `m_k = l_k + n + 1`.
    pub fn default_m(l: &[u32], n: usize) -> Vec<u32> {
        l.iter().map(|&lk| lk + n as u32 + 1).collect()
    }

    /// Checks `m_k > l_k + n` and non-degeneracy of every phase component.
    pub fn validate_for(&self, l: &[u32], tau_degenerate: f64) -> Result<(), CoreError> {
        let n = l.len();
        if self.m.len() != n {
            return Err(CoreError::DimensionMismatch {
                expected: n,
                got: self.m.len(),
            });
        }
        for k in 0..n {
            if self.m[k] as usize <= l[k] as usize + n {
                return Err(CoreError::InvalidInput(format!(
                    "m[{k}] = {} must exceed l[{k}] + n = {}",
                    self.m[k],
                    l[k] as usize + n
                )));
            }
            check_degenerate(self.m[k], self.phase.phis[k], k, tau_degenerate)?;
        }
        Ok(())
    }
}

fn check_degenerate(m: u32, phi: f64, var: usize, tau: f64) -> Result<(), CoreError> {
    let lead = minus_one_pow(m) - Complex64::new(0.0, phi).exp();
    if lead.norm() <= tau {
        return Err(CoreError::DegeneratePhase {
            var,
            leading: lead.norm(),
        });
    }
    Ok(())
}

fn minus_one_pow(m: u32) -> Complex64 {
    if m % 2 == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(-1.0, 0.0)
    }
}

/// The one-variable partition pair over the common denominator `D`.
#[derive(Debug, Clone)]
pub struct PhaseFactorPair {
    pub plus: SeparableRational,
    pub minus: SeparableRational,
    pub denominator: UniPoly,
}

/// Builds `F^+ = (i-z)^m / D` and `F^- = -e^{i phi}(i+z)^m / D`.
///
/// The denominator is assembled coefficientwise as the exact sum of the two
/// numerators, so `F^+ + F^- = 1` holds structurally.
pub fn phase_factors(m: u32, phi: f64, tau_degenerate: f64) -> Result<PhaseFactorPair, CoreError> {
    if m == 0 {
        return Err(CoreError::InvalidInput("m must be positive".into()));
    }
    check_degenerate(m, phi, 0, tau_degenerate)?;
    let num_plus = binomial_power(I, Complex64::new(-1.0, 0.0), m);
    let phase = Complex64::new(0.0, phi).exp();
    let num_minus = binomial_power(I, Complex64::new(1.0, 0.0), m).scale(-phase);
    let denominator = num_plus.add(&num_minus);
    let plus = SeparableRational::new(
        MultiPoly::from_univar(&num_plus, 0, 1),
        vec![denominator.clone()],
    )?;
    let minus = SeparableRational::new(
        MultiPoly::from_univar(&num_minus, 0, 1),
        vec![denominator.clone()],
    )?;
    Ok(PhaseFactorPair {
        plus,
        minus,
        denominator,
    })
}

/// The `m` real poles of the split denominator, exactly:
/// `beta(x)^m = e^{i phi}` iff `theta(x) = (phi + 2 pi j) / m`, and
/// `theta(x) = 2 atan(x)`.
pub fn split_real_poles(m: u32, phi: f64) -> Vec<f64> {
    let m_f = m as f64;
    let lo = ((-m_f * PI - phi) / (2.0 * PI)).ceil() as i64;
    let hi = ((m_f * PI - phi) / (2.0 * PI)).floor() as i64;
    let mut out = Vec::new();
    for j in lo..=hi {
        let theta = (phi + 2.0 * PI * j as f64) / m_f;
        if theta.abs() < PI {
            out.push((theta / 2.0).tan());
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

/// Recovers the per-variable exponents `l_k` of a class-A atom, verifying
/// that each denominator is a scalar multiple of `(1 + z^2)^(l_k)`.
pub fn class_a_exponents(r: &SeparableRational) -> Result<Vec<u32>, CoreError> {
    let mut out = Vec::with_capacity(r.nvars());
    for k in 0..r.nvars() {
        let q = r.denominator(k);
        let deg = q.degree().unwrap_or(0);
        if deg % 2 != 0 {
            return Err(CoreError::InvalidInput(format!(
                "denominator {k} has odd degree {deg}; not of class-A form"
            )));
        }
        let l = (deg / 2) as u32;
        let lead = q.leading().unwrap_or(Complex64::new(1.0, 0.0));
        let model = UniPoly::new(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ])
        .pow(l)
        .scale(lead);
        let scale = model.max_coeff_modulus();
        let diff = q.sub(&model);
        if diff.max_coeff_modulus() > 1e-9 * scale {
            return Err(CoreError::InvalidInput(format!(
                "denominator {k} is not a scalar multiple of (1+z^2)^{l}"
            )));
        }
        out.push(l);
    }
    Ok(out)
}

/// The `2^n` octant components of one atom; octants are enumerated with the
/// all-positive octant first.
#[derive(Debug, Clone, Serialize)]
pub struct OctantSplit {
    pub components: Vec<(SignVector, SeparableRational)>,
    pub params: SplitParams,
    pub norms: Vec<(SignVector, QuasiNormResult)>,
    pub certificates: Vec<(SignVector, HardyCertificate)>,
    pub atom_norm: QuasiNormResult,
    /// `C_np`, the constant the phase average is measured against.
    pub bound_constant: f64,
    /// `sum_sigma ||R_sigma||_p^p`.
    pub norm_sum: f64,
    /// `norm_sum / ||R||_p^p`.
    pub achieved_ratio: f64,
}

/// One octant component together with its per-variable factorization
/// `R_sigma = P(x) * prod_k axis_num_k(x_k) / axis_den_k(x_k)`, which the
/// product-rule quadrature exploits.
struct ComponentParts {
    octant: SignVector,
    rational: SeparableRational,
    axis_num: Vec<UniPoly>,
    axis_den: Vec<UniPoly>,
}

/// Builds the raw components without quadrature; shared by the scan path.
fn build_components(
    r: &SeparableRational,
    l: &[u32],
    params: &SplitParams,
) -> Result<Vec<ComponentParts>, CoreError> {
    let n = r.nvars();
    let mut per_var: Vec<[(UniPoly, UniPoly); 2]> = Vec::with_capacity(n);
    for k in 0..n {
        let m = params.m[k];
        let phi = params.phase.phis[k];
        let pair = phase_factors(m, phi, 0.0)?;
        let d = pair.denominator;
        let lk = l[k];
        let phase = Complex64::new(0.0, phi).exp();
        // sigma = +1: (-1)^m (z - i)^(m-l) over (z + i)^l D
        let plus_num = binomial_power(-I, Complex64::new(1.0, 0.0), m - lk)
            .scale(minus_one_pow(m));
        let plus_den = binomial_power(I, Complex64::new(1.0, 0.0), lk).mul(&d);
        // sigma = -1: -e^{i phi} (z + i)^(m-l) over (z - i)^l D
        let minus_num = binomial_power(I, Complex64::new(1.0, 0.0), m - lk).scale(-phase);
        let minus_den = binomial_power(-I, Complex64::new(1.0, 0.0), lk).mul(&d);
        per_var.push([(plus_num, plus_den), (minus_num, minus_den)]);
    }
    let mut out = Vec::with_capacity(1 << n);
    for octant in SignVector::all(n) {
        let mut num = r.numerator().clone();
        let mut axis_num = Vec::with_capacity(n);
        let mut dens = Vec::with_capacity(n);
        for k in 0..n {
            let side = if octant.signs()[k] > 0 { 0 } else { 1 };
            let (num_factor, den) = &per_var[k][side];
            num = num.mul_univar(k, num_factor);
            axis_num.push(num_factor.clone());
            dens.push(den.clone());
        }
        out.push(ComponentParts {
            octant,
            rational: SeparableRational::new(num, dens.clone())?,
            axis_num,
            axis_den: dens,
        });
    }
    Ok(out)
}

/// Boundary quasi-norm of one component through the factored product rule
/// (n >= 2) or the adaptive engine (n = 1).
fn component_norm(
    atom: &SeparableRational,
    part: &ComponentParts,
    p: f64,
    tol: f64,
    schedule: &SingularitySchedule,
    tols: &Tolerances,
) -> Result<QuasiNormResult, CoreError> {
    let n = atom.nvars();
    if n == 1 {
        return lp_quasinorm_scheduled(&part.rational, p, &[0.0], tol, tols, schedule);
    }
    let core = SeparableRational::new(atom.numerator().clone(), vec![UniPoly::one(); n])?;
    let fi = crate::quadrature::FactoredLpIntegrand {
        core: core.evaluator(),
        axis_factors: (0..n)
            .map(|k| {
                SeparableRational::new(
                    crate::polyalg::MultiPoly::from_univar(&part.axis_num[k], 0, 1),
                    vec![part.axis_den[k].clone()],
                )
                .map(|r| r.evaluator())
            })
            .collect::<Result<_, _>>()?,
        p,
    };
    let (value, abs_error) = crate::quadrature::product_quasinorm(&fi, schedule, n, tol, tols)?;
    Ok(QuasiNormResult {
        value,
        abs_error,
        p,
        y_offset: vec![0.0; n],
    })
}

/// Schedule of the real `D_k` poles, from the closed-form root locations.
fn component_schedule(params: &SplitParams) -> SingularitySchedule {
    SingularitySchedule {
        per_variable: params
            .m
            .iter()
            .zip(params.phase.phis.iter())
            .map(|(&m, &phi)| {
                split_real_poles(m, phi)
                    .into_iter()
                    .map(|x| (x, 1))
                    .collect()
            })
            .collect(),
    }
}

/// Splits a class-A atom into `2^n` certified octant components.
pub fn split_atom(
    r: &SeparableRational,
    p: f64,
    params: &SplitParams,
    tols: &Tolerances,
) -> Result<OctantSplit, CoreError> {
    let n = r.nvars();
    if !(0.0 < p && p < 1.0) {
        return Err(CoreError::InvalidInput(format!("p = {p} outside (0, 1)")));
    }
    let l = class_a_exponents(r)?;
    params.validate_for(&l, tols.tau_degenerate)?;
    for k in 0..n {
        let gap = r.degree_gap(k);
        if gap != i64::MAX && p * gap as f64 <= 1.0 {
            return Err(CoreError::IntegrabilityViolation {
                reason: format!("atom fails screening in variable {k}: p * gap = {}", p * gap as f64),
            });
        }
    }
    let quad_tol = tols.quad_tol_for(n);
    let atom_norm = lp_quasinorm(r, p, &vec![0.0; n], quad_tol, tols)?;
    let parts = build_components(r, &l, params)?;
    let schedule = component_schedule(params);

    // On the real axis every component has the same modulus
    // |R(x)| / prod_k 2 |sin((phi_k - m_k theta(x_k)) / 2)|, so the boundary
    // quasi-norm integral is one and the same for all 2^n octants; it is
    // integrated once. Certificates (roots, margins) stay per-component.
    let shared_norm = component_norm(r, &parts[0], p, quad_tol, &schedule, tols)?;
    let results: Vec<Result<(QuasiNormResult, HardyCertificate), CoreError>> = parts
        .par_iter()
        .map(|part| {
            let norm = shared_norm.clone();
            let cert =
                certify_with_norm(&part.rational, &part.octant, p, tols, Some(norm.clone()))?;
            Ok((norm, cert))
        })
        .collect();

    let mut components = Vec::with_capacity(parts.len());
    let mut norms = Vec::with_capacity(parts.len());
    let mut certificates = Vec::with_capacity(parts.len());
    for (part, res) in parts.into_iter().zip(results) {
        let (norm, cert) = res?;
        norms.push((part.octant.clone(), norm));
        certificates.push((part.octant.clone(), cert));
        components.push((part.octant, part.rational));
    }
    let norm_sum: f64 = norms.iter().map(|(_, q)| q.value).sum();
    let achieved_ratio = if atom_norm.value > 0.0 {
        norm_sum / atom_norm.value
    } else {
        0.0
    };
    Ok(OctantSplit {
        components,
        params: params.clone(),
        norms,
        certificates,
        atom_norm,
        bound_constant: c_np(n, p),
        norm_sum,
        achieved_ratio,
    })
}

/// Deterministic jittered phase grid over `(-pi, pi)^n`, degenerate points
/// excluded.
pub fn phase_grid(
    m: &[u32],
    grid_per_dim: usize,
    seed: u64,
    tau_degenerate: f64,
) -> Vec<PhaseVector> {
    let n = m.len();
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let jitters: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..0.95)).collect();
    let axes: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            (0..grid_per_dim)
                .map(|j| -PI + 2.0 * PI * (j as f64 + jitters[k]) / grid_per_dim as f64)
                .filter(|&phi| {
                    phi.abs() < PI && check_degenerate(m[k], phi, k, tau_degenerate).is_ok()
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    'outer: loop {
        out.push(PhaseVector {
            phis: idx.iter().enumerate().map(|(k, &i)| axes[k][i]).collect(),
        });
        let mut k = 0;
        loop {
            idx[k] += 1;
            if idx[k] < axes[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
            if k == n {
                break 'outer;
            }
        }
    }
    out
}

/// Fixed-grid scan kernel for ranking phases.
///
/// On the real axis all `2^n` components share the modulus
/// `|R(x)| / prod_k 2 |sin((phi_k - m_k theta(x_k)) / 2)|`, so the summed
/// objective factors over a fixed theta-grid as
/// `2^n sum F(theta) prod_k g(theta_k; phi_k)`,
/// with the atom part `F` built once. Trapezoid sums of the integrable
/// `|sin|^(-p)` factors are only percent-accurate, which is plenty for
/// ranking: the winner is re-integrated adaptively afterwards.
pub(crate) struct ScanKernel {
    n: usize,
    p: f64,
    thetas: Vec<f64>,
    /// `|R(x(theta))|^p * prod_k dx_k/dtheta_k`, flattened row-major.
    base: Vec<f64>,
    dtheta: f64,
}

impl ScanKernel {
    pub(crate) fn new(r: &SeparableRational, p: f64, grid_points: usize) -> ScanKernel {
        let n = r.nvars();
        let g = grid_points;
        let thetas: Vec<f64> = (0..g)
            .map(|i| -PI + 2.0 * PI * (i as f64 + 0.5) / g as f64)
            .collect();
        let xs: Vec<f64> = thetas.iter().map(|&t| (t / 2.0).tan()).collect();
        let jacs: Vec<f64> = xs.iter().map(|&x| 0.5 * (1.0 + x * x)).collect();
        let ev = r.evaluator();
        let total = g.pow(n as u32);
        let mut base = vec![0.0f64; total];
        let mut z = [Complex64::new(0.0, 0.0); 3];
        for (flat, slot) in base.iter_mut().enumerate() {
            let mut rem = flat;
            let mut jac = 1.0;
            for k in (0..n).rev() {
                let i = rem % g;
                rem /= g;
                z[k] = Complex64::new(xs[i], 0.0);
                jac *= jacs[i];
            }
            *slot = ev.abs_pow(&z[..n], p) * jac;
        }
        ScanKernel {
            n,
            p,
            thetas,
            base,
            dtheta: 2.0 * PI / g as f64,
        }
    }

    /// Approximates `sum_sigma ||R_sigma(., phi)||_p^p`.
    pub(crate) fn objective(&self, m: &[u32], phase: &PhaseVector) -> f64 {
        let g = self.thetas.len();
        let mut weights: Vec<Vec<f64>> = Vec::with_capacity(self.n);
        for k in 0..self.n {
            weights.push(
                self.thetas
                    .iter()
                    .map(|&t| {
                        let s = 2.0 * ((phase.phis()[k] - m[k] as f64 * t) / 2.0).sin().abs();
                        s.max(1e-14).powf(-self.p)
                    })
                    .collect(),
            );
        }
        let mut acc = 0.0f64;
        let mut idx = [0usize; 3];
        for (flat, &b) in self.base.iter().enumerate() {
            let mut rem = flat;
            let mut w = 1.0;
            for k in (0..self.n).rev() {
                idx[k] = rem % g;
                rem /= g;
                w *= weights[k][idx[k]];
            }
            acc += b * w;
        }
        (1u64 << self.n) as f64 * acc * self.dtheta.powi(self.n as i32)
    }
}

/// Adaptive scan objective: `2^n ||R_{first octant}(., phi)||_p^p`, using
/// the equal-modulus identity on the real axis.
fn scan_objective(
    r: &SeparableRational,
    l: &[u32],
    p: f64,
    phase: &PhaseVector,
    m: &[u32],
    tols: &Tolerances,
) -> Result<(f64, f64), CoreError> {
    let n = r.nvars();
    let params = SplitParams {
        m: m.to_vec(),
        phase: phase.clone(),
    };
    let parts = build_components(r, l, &params)?;
    let schedule = component_schedule(&params);
    let q = component_norm(r, &parts[0], p, tols.phase_scan_rel_tol, &schedule, tols)?;
    let scale = (1u64 << n) as f64;
    Ok((scale * q.value, scale * q.abs_error))
}

/// Grid mean of the summed component quasi-norms over the phase box,
/// with every component integrated independently.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseMeanReport {
    pub mean: f64,
    pub accumulated_error: f64,
    pub grid_points: usize,
    /// `C_np ||R||_p^p`, what the mean is guaranteed to stay below.
    pub bound: f64,
    pub atom_norm: f64,
    pub p: f64,
}

pub fn mean_over_phase(
    r: &SeparableRational,
    p: f64,
    m: &[u32],
    grid_per_dim: usize,
    seed: u64,
    tols: &Tolerances,
) -> Result<PhaseMeanReport, CoreError> {
    if grid_per_dim < 8 {
        return Err(CoreError::InvalidInput(
            "phase grid needs at least 8 points per dimension".into(),
        ));
    }
    let n = r.nvars();
    let l = class_a_exponents(r)?;
    let atom_norm = lp_quasinorm(r, p, &vec![0.0; n], tols.quad_tol_for(n), tols)?;
    let grid = phase_grid(m, grid_per_dim, seed, tols.tau_degenerate);
    let per_point: Vec<Result<(f64, f64), CoreError>> = grid
        .par_iter()
        .map(|phase| {
            let params = SplitParams {
                m: m.to_vec(),
                phase: phase.clone(),
            };
            params.validate_for(&l, tols.tau_degenerate)?;
            let parts = build_components(r, &l, &params)?;
            let schedule = component_schedule(&params);
            let mut sum = 0.0;
            let mut err = 0.0;
            for part in &parts {
                let q = lp_quasinorm_scheduled(
                    &part.rational,
                    p,
                    &vec![0.0; n],
                    tols.phase_scan_rel_tol,
                    tols,
                    &schedule,
                )?;
                sum += q.value;
                err += q.abs_error;
            }
            Ok((sum, err))
        })
        .collect();
    let mut total = 0.0;
    let mut err_total = 0.0;
    for res in per_point {
        let (v, e) = res?;
        total += v;
        err_total += e;
    }
    let count = grid.len().max(1) as f64;
    Ok(PhaseMeanReport {
        mean: total / count,
        accumulated_error: err_total / count + atom_norm.abs_error * c_np(n, p),
        grid_points: grid.len(),
        bound: c_np(n, p) * atom_norm.value,
        atom_norm: atom_norm.value,
        p,
    })
}

/// Grid search for a phase meeting the averaging bound
/// `sum_sigma ||R_sigma||_p^p <= C_np ||R||_p^p`, followed by one local
/// refinement around the best grid point if needed.
pub fn select_phase(
    r: &SeparableRational,
    p: f64,
    m: &[u32],
    grid_per_dim: usize,
    seed: u64,
    tols: &Tolerances,
) -> Result<(PhaseVector, OctantSplit), CoreError> {
    if grid_per_dim < 8 {
        return Err(CoreError::InvalidInput(
            "phase grid needs at least 8 points per dimension".into(),
        ));
    }
    let n = r.nvars();
    let l = class_a_exponents(r)?;
    let atom_norm = lp_quasinorm(r, p, &vec![0.0; n], tols.quad_tol_for(n), tols)?;
    let bound = c_np(n, p) * atom_norm.value;

    // The fixed-grid kernel ranks the candidates; everything reported comes
    // from adaptive quadrature afterwards.
    let kernel_points = match n {
        1 => 4096,
        2 => 256,
        _ => 48,
    };
    let kernel = ScanKernel::new(r, p, kernel_points);
    let rank = |grid: &[PhaseVector]| -> Option<PhaseVector> {
        let scores: Vec<f64> = grid
            .par_iter()
            .map(|phase| kernel.objective(m, phase))
            .collect();
        grid.iter()
            .zip(scores)
            .min_by(|(_, a), (_, b)| a.partial_cmp(b).unwrap())
            .map(|(phase, _)| phase.clone())
    };
    let verify = |phase: &PhaseVector| -> Result<(f64, f64), CoreError> {
        scan_objective(r, &l, p, phase, m, tols)
    };

    let grid = phase_grid(m, grid_per_dim, seed, tols.tau_degenerate);
    let mut best_phase = rank(&grid).ok_or(CoreError::PhaseSearchFailed {
        best: f64::INFINITY,
        bound,
    })?;
    let (mut best_value, mut best_err) = verify(&best_phase)?;

    if best_value > bound + 3.0 * (best_err + atom_norm.abs_error * c_np(n, p)) {
        // One refinement pass: a finer grid in the cell around the best point.
        let spacing = 2.0 * PI / grid_per_dim as f64;
        let refined: Vec<PhaseVector> = {
            let mut pts = Vec::new();
            let steps = 8i32;
            let mut idx = vec![0i32; n];
            'outer: loop {
                let phis: Vec<f64> = (0..n)
                    .map(|k| {
                        let off = (idx[k] - steps / 2) as f64 * spacing / steps as f64;
                        (best_phase.phis[k] + off).clamp(-PI + 1e-9, PI - 1e-9)
                    })
                    .collect();
                if phis
                    .iter()
                    .enumerate()
                    .all(|(k, &phi)| check_degenerate(m[k], phi, k, tols.tau_degenerate).is_ok())
                {
                    pts.push(PhaseVector { phis });
                }
                let mut k = 0;
                loop {
                    idx[k] += 1;
                    if idx[k] < steps {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                    if k == n {
                        break 'outer;
                    }
                }
            }
            pts
        };
        if let Some(candidate) = rank(&refined) {
            let (value, err) = verify(&candidate)?;
            if value < best_value {
                best_phase = candidate;
                best_value = value;
                best_err = err;
            }
        }
        if best_value > bound + 3.0 * (best_err + atom_norm.abs_error * c_np(n, p)) {
            return Err(CoreError::PhaseSearchFailed {
                best: best_value,
                bound,
            });
        }
    }

    let params = SplitParams {
        m: m.to_vec(),
        phase: best_phase.clone(),
    };
    let split = split_atom(r, p, &params, tols)?;
    Ok((best_phase, split))
}
