//! Membership certificates for octant Hardy spaces.
//!
//! A separable rational that is integrable on the boundary and has no
//! denominator root strictly inside an octant's tube belongs to the Hardy
//! space over that tube; its Hardy norm is then the boundary quasi-norm.
//! The certificate records the machine-checkable evidence: per-variable
//! roots, signed margins, degree gaps, real pole orders, and the boundary
//! slice.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::CoreError;
use crate::polyalg::{roots_with_multiplicity, ClusteredRoot, RootConfig, SeparableRational};
use crate::quadrature::{lp_quasinorm, QuasiNormResult};

/// An octant label: one sign per coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignVector {
    signs: Vec<i8>,
}

impl SignVector {
    pub fn new(signs: Vec<i8>) -> Result<Self, CoreError> {
        if signs.is_empty() || signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(CoreError::InvalidInput(
                "sign vector entries must be +1 or -1, length >= 1".into(),
            ));
        }
        Ok(SignVector { signs })
    }

    /// The first octant: all signs positive.
    pub fn first(n: usize) -> Self {
        SignVector { signs: vec![1; n] }
    }

    /// All `2^n` octants, first octant first, then by flipping signs in
    /// binary-counter order (deterministic).
    pub fn all(n: usize) -> Vec<SignVector> {
        (0..(1usize << n))
            .map(|mask| SignVector {
                signs: (0..n)
                    .map(|k| if mask & (1 << k) == 0 { 1 } else { -1 })
                    .collect(),
            })
            .collect()
    }

    /// Parses a label like `"++-"`.
    pub fn parse(s: &str) -> Result<Self, CoreError> {
        let signs: Result<Vec<i8>, CoreError> = s
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(CoreError::InvalidInput(format!(
                    "octant labels use only '+' and '-', found {other:?}"
                ))),
            })
            .collect();
        SignVector::new(signs?)
    }

    pub fn n(&self) -> usize {
        self.signs.len()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Componentwise signed copy of `delta`, pointing into this octant.
    pub fn signed(&self, delta: &[f64]) -> Vec<f64> {
        self.signs
            .iter()
            .zip(delta.iter())
            .map(|(&s, &d)| s as f64 * d)
            .collect()
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.signs {
            write!(f, "{}", if s > 0 { '+' } else { '-' })?;
        }
        Ok(())
    }
}

impl Serialize for SignVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SignVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        SignVector::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertStatus {
    Valid,
    Invalid,
    Indeterminate,
}

/// Root evidence for one variable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VariableEvidence {
    /// Denominator roots as `(re, im, multiplicity)`.
    pub roots: Vec<(f64, f64, u32)>,
    /// Most negative signed clearance `-sigma_k * Im(root)`; positive means
    /// every root is clear of the open half-plane.
    pub min_margin: f64,
    /// Uncancelled degree gap `deg Q_k - deg_k P`.
    pub gap: i64,
    pub real_pole_orders: Vec<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HardyCertificate {
    pub octant: SignVector,
    pub p: f64,
    pub per_variable: Vec<VariableEvidence>,
    pub lp_finite: bool,
    pub quasi_norm: Option<QuasiNormResult>,
    pub status: CertStatus,
    /// The margin tolerance the verdict was made under.
    pub tau_margin: f64,
}

impl HardyCertificate {
    pub fn is_valid(&self) -> bool {
        self.status == CertStatus::Valid
    }
}

/// Certifies membership of `r` in the Hardy space over `octant`'s tube.
///
/// Roots exactly on the real axis are accepted for every octant: open-tube
/// holomorphy only excludes roots strictly inside the open half-planes.
pub fn certify(
    r: &SeparableRational,
    octant: &SignVector,
    p: f64,
    tols: &Tolerances,
) -> Result<HardyCertificate, CoreError> {
    certify_with_norm(r, octant, p, tols, None)
}

/// [`certify`] with an already-computed boundary quasi-norm, so callers that
/// just integrated the component do not pay for the slice twice.
pub fn certify_with_norm(
    r: &SeparableRational,
    octant: &SignVector,
    p: f64,
    tols: &Tolerances,
    known_norm: Option<QuasiNormResult>,
) -> Result<HardyCertificate, CoreError> {
    if !(0.0 < p && p < 1.0) {
        return Err(CoreError::InvalidInput(format!("p = {p} outside (0, 1)")));
    }
    if octant.n() != r.nvars() {
        return Err(CoreError::DimensionMismatch {
            expected: r.nvars(),
            got: octant.n(),
        });
    }
    let root_cfg = RootConfig {
        max_iters: tols.root_max_iters,
        tau_root: tols.tau_root,
        tau_cluster: tols.tau_cluster,
    };
    let mut per_variable = Vec::with_capacity(r.nvars());
    let mut indeterminate = false;
    let mut margins_ok = true;
    let mut lp_finite = true;
    for k in 0..r.nvars() {
        let q = r.denominator(k);
        let gap = r.degree_gap(k);
        let roots: Vec<ClusteredRoot> = if q.degree().unwrap_or(0) >= 1 {
            match roots_with_multiplicity(q, &root_cfg) {
                Ok(roots) => roots,
                Err(CoreError::NonConvergence { partial, .. }) => {
                    indeterminate = true;
                    partial
                        .into_iter()
                        .map(|z| ClusteredRoot {
                            location: z,
                            multiplicity: 1,
                        })
                        .collect()
                }
                Err(e) => return Err(e),
            }
        } else {
            Vec::new()
        };
        let sigma = octant.signs()[k] as f64;
        let mut min_margin = f64::INFINITY;
        let mut real_orders = Vec::new();
        for root in &roots {
            let margin = -sigma * root.location.im;
            min_margin = min_margin.min(margin);
            if root.location.im.abs() <= tols.tau_real_axis * (1.0 + root.location.re.abs()) {
                real_orders.push(root.multiplicity);
            }
        }
        if min_margin < -tols.tau_margin {
            margins_ok = false;
        }
        if !r.is_zero() {
            if gap != i64::MAX && p * gap as f64 <= 1.0 {
                lp_finite = false;
            }
            if real_orders.iter().any(|&o| p * o as f64 >= 1.0) {
                lp_finite = false;
            }
        }
        per_variable.push(VariableEvidence {
            roots: roots
                .iter()
                .map(|r| (r.location.re, r.location.im, r.multiplicity))
                .collect(),
            min_margin,
            gap,
            real_pole_orders: real_orders,
        });
    }

    let quasi_norm = if lp_finite && !indeterminate {
        match known_norm {
            Some(q) => Some(q),
            None => {
                let y = vec![0.0; r.nvars()];
                match lp_quasinorm(r, p, &y, tols.quad_tol_for(r.nvars()), tols) {
                    Ok(q) => Some(q),
                    Err(CoreError::ToleranceNotMet {
                        value, abs_error, ..
                    }) => Some(QuasiNormResult {
                        value,
                        abs_error,
                        p,
                        y_offset: y,
                    }),
                    Err(_) => None,
                }
            }
        }
    } else {
        None
    };

    let status = if indeterminate {
        CertStatus::Indeterminate
    } else if margins_ok && lp_finite {
        CertStatus::Valid
    } else {
        CertStatus::Invalid
    };

    Ok(HardyCertificate {
        octant: octant.clone(),
        p,
        per_variable,
        lp_finite,
        quasi_norm,
        status,
        tau_margin: tols.tau_margin,
    })
}

/// Observed-versus-bound report for the interior sup estimate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InteriorSupReport {
    /// `(2/pi)^(n/p)`.
    pub constant: f64,
    /// Full right-hand side `constant * ||R||_Hp * (prod delta)^(-1/p)`.
    pub bound: f64,
    pub max_ratio: f64,
    pub argmax: Vec<f64>,
    pub samples: usize,
    pub violations: usize,
}

/// Checks `|R(x + i sigma delta)| <= (2/pi)^(n/p) ||R||_Hp (prod delta)^(-1/p)`
/// over a sample grid. Failures are reported, never thrown.
pub fn interior_sup_check(
    r: &SeparableRational,
    cert: &HardyCertificate,
    delta: &[f64],
    sample_grid: Option<&[Vec<f64>]>,
    tols: &Tolerances,
) -> Result<InteriorSupReport, CoreError> {
    let n = r.nvars();
    if delta.len() != n {
        return Err(CoreError::DimensionMismatch {
            expected: n,
            got: delta.len(),
        });
    }
    if delta.iter().any(|&d| d <= 0.0) {
        return Err(CoreError::InvalidInput(
            "delta must be strictly positive in every coordinate".into(),
        ));
    }
    let p = cert.p;
    let constant = (2.0 / std::f64::consts::PI).powf(n as f64 / p);
    let hnorm = cert
        .quasi_norm
        .as_ref()
        .map(|q| q.value.powf(1.0 / p))
        .unwrap_or(0.0);
    let delta_prod: f64 = delta.iter().product();
    let bound = constant * hnorm * delta_prod.powf(-1.0 / p);

    // Default grid: 32 points per axis on [-10, 10], shifted by i delta.
    let default_grid;
    let grid: &[Vec<f64>] = match sample_grid {
        Some(g) => g,
        None => {
            default_grid = default_tensor_grid(n, 32, 10.0);
            &default_grid
        }
    };

    let shift: Vec<Complex64> = cert
        .octant
        .signed(delta)
        .iter()
        .map(|&d| Complex64::new(0.0, d))
        .collect();
    let ev = r.evaluator();
    let mut max_ratio = 0.0f64;
    let mut argmax = vec![0.0; n];
    let mut violations = 0usize;
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    for x in grid {
        for k in 0..n {
            z[k] = Complex64::new(x[k], 0.0) + shift[k];
        }
        let value = ev.eval(&z).to_complex().norm();
        let ratio = if bound > 0.0 {
            value / bound
        } else if value == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        if ratio > max_ratio {
            max_ratio = ratio;
            argmax = x.clone();
        }
        if ratio > 1.0 + 1e-6 {
            violations += 1;
        }
    }
    let _ = tols;
    Ok(InteriorSupReport {
        constant,
        bound,
        max_ratio,
        argmax,
        samples: grid.len(),
        violations,
    })
}

/// Tensor grid of `per_axis` points per coordinate on `[-half, half]^n`.
pub fn default_tensor_grid(n: usize, per_axis: usize, half: f64) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = (0..per_axis)
        .map(|i| -half + 2.0 * half * i as f64 / (per_axis - 1) as f64)
        .collect();
    let mut out = Vec::with_capacity(axis.len().pow(n as u32));
    let mut idx = vec![0usize; n];
    loop {
        out.push(idx.iter().map(|&i| axis[i]).collect());
        let mut k = 0;
        loop {
            idx[k] += 1;
            if idx[k] < axis.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
            if k == n {
                return out;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::{binomial_power, MultiPoly, UniPoly};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pole_at_minus_i_pow6() -> SeparableRational {
        let q = binomial_power(c(0.0, 1.0), c(1.0, 0.0), 6); // (i + z)^6
        SeparableRational::new(MultiPoly::constant(1, c(1.0, 0.0)), vec![q]).unwrap()
    }

    #[test]
    fn upper_half_plane_valid() {
        let r = pole_at_minus_i_pow6();
        let cert = certify(
            &r,
            &SignVector::first(1),
            0.5,
            &Tolerances::default(),
        )
        .unwrap();
        assert!(cert.is_valid(), "{cert:?}");
        assert!(cert.per_variable[0].min_margin > 0.9);
        assert_eq!(cert.per_variable[0].gap, 6);
        // Norm slice at the boundary: int (1+x^2)^(-3) dx... with p = 1/2
        // the integrand is (1+x^2)^(-3/2), so the value is 2.
        let q = cert.quasi_norm.as_ref().unwrap();
        assert!((q.value - 2.0).abs() < 1e-5);
    }

    #[test]
    fn lower_half_plane_invalid() {
        let r = pole_at_minus_i_pow6();
        let cert = certify(
            &r,
            &SignVector::parse("-").unwrap(),
            0.5,
            &Tolerances::default(),
        )
        .unwrap();
        assert_eq!(cert.status, CertStatus::Invalid);
        assert!(cert.per_variable[0].min_margin < 0.0);
    }

    #[test]
    fn real_poles_certify_everywhere() {
        // 1/((z1^2-1)(z2^2-1)) at p = 0.6: real poles, margins 0, gaps 2.
        let q = UniPoly::new(vec![c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let r = SeparableRational::new(
            MultiPoly::constant(2, c(1.0, 0.0)),
            vec![q.clone(), q],
        )
        .unwrap();
        for octant in SignVector::all(2) {
            let cert = certify(&r, &octant, 0.6, &Tolerances::default()).unwrap();
            assert!(cert.is_valid(), "octant {octant}: {:?}", cert.status);
            assert!(cert.per_variable[0].min_margin.abs() < 1e-9);
            assert_eq!(cert.per_variable[0].real_pole_orders, vec![1, 1]);
        }
    }

    #[test]
    fn margin_monotonicity() {
        // Valid at tau implies valid at larger tau.
        let r = pole_at_minus_i_pow6();
        let mut tols = Tolerances::default();
        let base = certify(&r, &SignVector::first(1), 0.5, &tols).unwrap();
        assert!(base.is_valid());
        tols.tau_margin = 1e-3;
        let looser = certify(&r, &SignVector::first(1), 0.5, &tols).unwrap();
        assert!(looser.is_valid());
    }

    #[test]
    fn interior_sup_bound_holds() {
        let r = pole_at_minus_i_pow6();
        let tols = Tolerances::default();
        let cert = certify(&r, &SignVector::first(1), 0.5, &tols).unwrap();
        let report = interior_sup_check(&r, &cert, &[1.0], None, &tols).unwrap();
        assert_eq!(report.violations, 0);
        assert!(report.max_ratio <= 1.0 + 1e-6, "ratio {}", report.max_ratio);
        // Scaling leaves the ratio unchanged.
        let r2 = r.scale(c(2.0, 0.0));
        let cert2 = certify(&r2, &SignVector::first(1), 0.5, &tols).unwrap();
        let report2 = interior_sup_check(&r2, &cert2, &[1.0], None, &tols).unwrap();
        assert!((report2.max_ratio - report.max_ratio).abs() < 1e-6);
    }

    #[test]
    fn zero_rational_all_ratios_zero() {
        let r = SeparableRational::zero(1);
        let tols = Tolerances::default();
        let cert = certify(&r, &SignVector::first(1), 0.5, &tols).unwrap();
        let report = interior_sup_check(&r, &cert, &[1.0], None, &tols).unwrap();
        assert_eq!(report.max_ratio, 0.0);
        assert_eq!(report.violations, 0);
    }
}
