//! Simultaneous (Aberth-Ehrlich) root finding with multiplicity estimation.
//!
//! Chosen over a companion-matrix eigensolver to keep the hot path free of
//! dense linear algebra; the split denominators produce clusters of simple
//! real roots that Aberth handles well.

use num_complex::Complex64;

use super::unipoly::UniPoly;
use crate::error::CoreError;

#[derive(Debug, Clone)]
pub struct RootConfig {
    pub max_iters: u32,
    /// Residual acceptance: `|p(r)| <= tau_root * (1 + max |coeff|)`.
    pub tau_root: f64,
    /// Base clustering radius for multiplicity estimation.
    pub tau_cluster: f64,
}

impl Default for RootConfig {
    fn default() -> Self {
        RootConfig {
            max_iters: 200,
            tau_root: 1e-10,
            tau_cluster: 1e-7,
        }
    }
}

/// A root location with its estimated multiplicity.
#[derive(Debug, Clone, Copy)]
pub struct ClusteredRoot {
    pub location: Complex64,
    pub multiplicity: u32,
}

/// All complex roots of `poly` with multiplicity estimates.
///
/// Multiplicities are recovered by clustering: a group of `k` numerical roots
/// within the expected `eps^(1/k)` scatter radius is merged when the first
/// `k - 1` derivatives also vanish at the centroid to working precision.
pub fn roots_with_multiplicity(
    poly: &UniPoly,
    cfg: &RootConfig,
) -> Result<Vec<ClusteredRoot>, CoreError> {
    let deg = match poly.degree() {
        None | Some(0) => {
            return Err(CoreError::InvalidInput(
                "root finding requires degree >= 1".into(),
            ))
        }
        Some(d) => d,
    };

    // Deflate exact roots at the origin (exactly zero low-order coefficients).
    let mut coeffs = poly.coeffs().to_vec();
    let mut zeros_at_origin = 0u32;
    while coeffs.len() > 1 && coeffs[0].re == 0.0 && coeffs[0].im == 0.0 {
        coeffs.remove(0);
        zeros_at_origin += 1;
    }
    let reduced = UniPoly::new(coeffs);
    let mut raw = if reduced.degree().unwrap_or(0) >= 1 {
        aberth(&reduced, cfg)?
    } else {
        Vec::new()
    };
    for _ in 0..zeros_at_origin {
        raw.push(Complex64::new(0.0, 0.0));
    }

    // Residual check against the full polynomial, scaled by the attainable
    // backward-stable magnitude sum |c_k| |r|^k.
    for &r in &raw {
        let v = poly.eval(r);
        if v.norm() > cfg.tau_root * abs_horner(poly, r.norm()).max(1.0) {
            return Err(CoreError::NonConvergence {
                iterations: cfg.max_iters,
                partial: raw.clone(),
            });
        }
    }
    let _ = deg;

    Ok(cluster_roots(poly, raw, cfg))
}

/// `sum_k |c_k| t^k`, the conditioning scale of evaluation at radius `t`.
fn abs_horner(poly: &UniPoly, t: f64) -> f64 {
    let mut acc = 0.0f64;
    for c in poly.coeffs().iter().rev() {
        acc = acc * t + c.norm();
    }
    acc
}

fn aberth(poly: &UniPoly, cfg: &RootConfig) -> Result<Vec<Complex64>, CoreError> {
    let deg = poly.degree().unwrap();
    let lead = poly.leading().unwrap();
    let monic = poly.scale(1.0 / lead);
    let coeffs = monic.coeffs();

    // Fujiwara bound for the initial circle (the plain Cauchy bound misfires
    // badly on binomial-heavy coefficients), with an irrational angular
    // offset so symmetric polynomials do not trap the iteration.
    let radius = coeffs[..deg]
        .iter()
        .enumerate()
        .map(|(k, c)| 2.0 * c.norm().powf(1.0 / (deg - k) as f64))
        .fold(0.0f64, f64::max)
        .max(1e-3);
    let center = -coeffs[deg - 1] / deg as f64;
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.376) / deg as f64 + 0.5;
            center + 0.7 * radius * Complex64::new(theta.cos(), theta.sin())
        })
        .collect();

    let mut offsets = vec![Complex64::new(0.0, 0.0); deg];
    for iter in 0..cfg.max_iters {
        let mut max_step = 0.0f64;
        // Residual-based stop: multiple roots make the Aberth steps stall at
        // the cluster radius while the residuals are already at the floor.
        let mut max_resid = 0.0f64;
        for i in 0..deg {
            let (v, d) = monic.eval_with_derivative(z[i]);
            max_resid = max_resid.max(v.norm() / abs_horner(&monic, z[i].norm()).max(1.0));
            if v.norm() == 0.0 {
                offsets[i] = Complex64::new(0.0, 0.0);
                continue;
            }
            let newton = if d.norm() > 0.0 {
                v / d
            } else {
                Complex64::new(1e-8, 1e-8)
            };
            let mut rep = Complex64::new(0.0, 0.0);
            for j in 0..deg {
                if j != i {
                    let diff = z[i] - z[j];
                    if diff.norm() > 1e-300 {
                        rep += 1.0 / diff;
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * rep;
            let w = if denom.norm() > 1e-300 {
                newton / denom
            } else {
                newton
            };
            offsets[i] = w;
        }
        if max_resid < 0.1 * cfg.tau_root {
            break;
        }
        for i in 0..deg {
            z[i] -= offsets[i];
            if !z[i].is_finite() {
                return Err(CoreError::NonConvergence {
                    iterations: iter,
                    partial: z.clone(),
                });
            }
            max_step = max_step.max(offsets[i].norm() / (1.0 + z[i].norm()));
        }
        if max_step < 1e-14 {
            break;
        }
    }

    // Newton polish; improves simple roots to machine residual.
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (v, d) = monic.eval_with_derivative(*zi);
            if d.norm() > 0.0 {
                let step = v / d;
                if step.norm() < 1.0 {
                    *zi -= step;
                }
            }
        }
    }

    // Deterministic order regardless of iteration history.
    z.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    Ok(z)
}

fn cluster_roots(poly: &UniPoly, roots: Vec<Complex64>, cfg: &RootConfig) -> Vec<ClusteredRoot> {
    let deg = roots.len();
    let mut assigned = vec![false; deg];
    let mut out = Vec::new();
    // A k-fold root scatters numerical roots over roughly (residual)^(1/k),
    // so candidate multiplicities are tried from high to low, each with its
    // own admissible radius, and every merge must survive the Taylor test.
    for m in (2..=deg).rev() {
        let radius_base = cfg.tau_cluster.max((10.0 * cfg.tau_root).powf(1.0 / m as f64));
        loop {
            let mut merged = false;
            for i in 0..deg {
                if assigned[i] {
                    continue;
                }
                let mut candidates: Vec<usize> =
                    (0..deg).filter(|&j| !assigned[j] && j != i).collect();
                candidates.sort_by(|&a, &b| {
                    let da = (roots[a] - roots[i]).norm();
                    let db = (roots[b] - roots[i]).norm();
                    da.partial_cmp(&db).unwrap().then(a.cmp(&b))
                });
                if candidates.len() + 1 < m {
                    continue;
                }
                let members: Vec<usize> = std::iter::once(i)
                    .chain(candidates.into_iter().take(m - 1))
                    .collect();
                let centroid = members
                    .iter()
                    .map(|&j| roots[j])
                    .fold(Complex64::new(0.0, 0.0), |a, b| a + b)
                    / m as f64;
                let radius = radius_base * (1.0 + centroid.norm());
                if members
                    .iter()
                    .all(|&j| (roots[j] - centroid).norm() <= radius)
                    && validate_multiplicity(poly, centroid, m as u32)
                {
                    for &j in &members {
                        assigned[j] = true;
                    }
                    out.push(ClusteredRoot {
                        location: centroid,
                        multiplicity: m as u32,
                    });
                    merged = true;
                }
            }
            if !merged {
                break;
            }
        }
    }
    for (j, &r) in roots.iter().enumerate() {
        if !assigned[j] {
            out.push(ClusteredRoot {
                location: r,
                multiplicity: 1,
            });
        }
    }
    out.sort_by(|a, b| {
        a.location
            .re
            .partial_cmp(&b.location.re)
            .unwrap()
            .then(a.location.im.partial_cmp(&b.location.im).unwrap())
    });
    out
}

/// A centroid passes as a k-fold root when the Taylor coefficients of orders
/// below k are negligible against the polynomial's scale at that point.
fn validate_multiplicity(poly: &UniPoly, c: Complex64, k: u32) -> bool {
    let shifted = poly.shift(c);
    let coeffs = shifted.coeffs();
    let scale: f64 = coeffs
        .iter()
        .map(|t| t.norm())
        .fold(0.0, f64::max)
        .max(1e-300);
    (0..k as usize).all(|j| {
        coeffs
            .get(j)
            .map(|t| t.norm() <= 1e-7 * scale)
            .unwrap_or(true)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn quadratic_roots() {
        // 1 + z^2 -> {+i, -i}
        let p = UniPoly::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let roots = roots_with_multiplicity(&p, &RootConfig::default()).unwrap();
        assert_eq!(roots.len(), 2);
        assert!((roots[0].location - c(0.0, -1.0)).norm() < 1e-12);
        assert!((roots[1].location - c(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn linear_phase_equation() {
        // (i - z) - i(i + z) = 0 at z = 1, i.e. beta(1) = e^{i pi/2}.
        let i = c(0.0, 1.0);
        let p = UniPoly::new(vec![i, c(-1.0, 0.0)]).add(
            &UniPoly::new(vec![i, c(1.0, 0.0)]).scale(-i),
        );
        let roots = roots_with_multiplicity(&p, &RootConfig::default()).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0].location - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn triple_root_clusters() {
        // (z + i)^3
        let p = UniPoly::from_roots(&[c(0.0, -1.0), c(0.0, -1.0), c(0.0, -1.0)]);
        let roots = roots_with_multiplicity(&p, &RootConfig::default()).unwrap();
        assert_eq!(roots.len(), 1, "cluster should merge: {roots:?}");
        assert_eq!(roots[0].multiplicity, 3);
        assert!((roots[0].location - c(0.0, -1.0)).norm() < 1e-8);
    }

    #[test]
    fn distinct_nearby_roots_stay_separate() {
        let p = UniPoly::from_roots(&[c(0.0, 0.0), c(0.02, 0.0), c(-0.02, 0.0)]);
        let roots = roots_with_multiplicity(&p, &RootConfig::default()).unwrap();
        assert_eq!(roots.len(), 3);
        assert!(roots.iter().all(|r| r.multiplicity == 1));
    }

    #[test]
    fn residual_bound_holds() {
        let p = UniPoly::new(vec![
            c(2.0, -1.0),
            c(0.0, 3.0),
            c(-4.0, 0.5),
            c(1.0, 1.0),
            c(0.0, -2.0),
            c(5.0, 0.0),
        ]);
        let roots = roots_with_multiplicity(&p, &RootConfig::default()).unwrap();
        assert_eq!(
            roots.iter().map(|r| r.multiplicity).sum::<u32>() as usize,
            p.degree().unwrap()
        );
        let scale = 1.0 + p.max_coeff_modulus();
        for r in &roots {
            assert!(p.eval(r.location).norm() <= 1e-9 * scale);
        }
    }
}
