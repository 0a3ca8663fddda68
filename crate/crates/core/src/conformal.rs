//! Cayley-type transforms between half-planes and the unit disc.
//!
//! `beta` maps the upper half-plane onto the open disc and the real line onto
//! the unit circle minus `{-1}`; `alpha_map` is its inverse. These two maps
//! carry the whole splitting and density machinery.

use num_complex::Complex64;

use crate::error::CoreError;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// An angle normalized into `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub theta: f64,
}

/// `beta(z) = (i - z) / (i + z)`.
pub fn beta(z: Complex64) -> Result<Complex64, CoreError> {
    let den = I + z;
    if den.norm() < 1e-14 {
        return Err(CoreError::PoleProximity {
            var: 0,
            distance: den.norm(),
            threshold: 1e-14,
        });
    }
    Ok((I - z) / den)
}

/// The boundary phase `theta(x) = arg(i - x) - arg(i + x)`, satisfying
/// `beta(x) = e^{i theta(x)}` and lying in `(-pi, pi)` for finite real `x`.
pub fn theta_of(x: f64) -> PhasePoint {
    // Two-argument arctangent form; the difference never wraps for real x.
    let theta = (1.0f64).atan2(-x) - (1.0f64).atan2(x);
    PhasePoint { theta }
}

/// `alpha(w) = i (1 - w) / (1 + w)`, the inverse of [`beta`].
pub fn alpha_map(w: Complex64) -> Result<Complex64, CoreError> {
    let den = Complex64::new(1.0, 0.0) + w;
    if den.norm() < 1e-14 {
        return Err(CoreError::PoleProximity {
            var: 0,
            distance: den.norm(),
            threshold: 1e-14,
        });
    }
    Ok(I * (Complex64::new(1.0, 0.0) - w) / den)
}

/// Componentwise [`beta`] for points of `C^n`.
pub fn beta_vec(z: &[Complex64]) -> Result<Vec<Complex64>, CoreError> {
    z.iter().map(|&zk| beta(zk)).collect()
}

/// Componentwise [`alpha_map`] for points of the polydisc.
pub fn alpha_vec(w: &[Complex64]) -> Result<Vec<Complex64>, CoreError> {
    w.iter().map(|&wk| alpha_map(wk)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn beta_fixed_points() {
        assert!((beta(c(0.0, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!(beta(c(0.0, 1.0)).unwrap().norm() < 1e-15);
        assert!((beta(c(1.0, 0.0)).unwrap() - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn theta_values() {
        assert!(theta_of(0.0).theta.abs() < 1e-15);
        assert!((theta_of(1.0).theta - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
        assert!((theta_of(-1.0).theta + std::f64::consts::FRAC_PI_2).abs() < 1e-14);
    }

    #[test]
    fn theta_matches_beta_phase() {
        for k in -40..=40 {
            let x = 0.37 * k as f64;
            let theta = theta_of(x).theta;
            let expected = beta(c(x, 0.0)).unwrap();
            let phase = Complex64::new(theta.cos(), theta.sin());
            assert!((phase - expected).norm() < 1e-13, "x = {x}");
            assert!(theta.abs() < std::f64::consts::PI);
        }
    }

    #[test]
    fn theta_monotone() {
        // beta traverses the circle monotonically as x increases.
        let mut last = theta_of(-50.0).theta;
        for k in 1..=200 {
            let t = theta_of(-50.0 + 0.5 * k as f64).theta;
            assert!(t > last);
            last = t;
        }
    }

    #[test]
    fn alpha_inverts_beta() {
        assert!((alpha_map(c(0.0, 0.0)).unwrap() - c(0.0, 1.0)).norm() < 1e-15);
        assert!(alpha_map(c(1.0, 0.0)).unwrap().norm() < 1e-15);
        for k in 0..60 {
            let z = c(
                (k as f64 * 0.71).sin() * 3.0,
                (k as f64 * 0.37).cos() * 2.0 + 2.5,
            );
            let w = beta(z).unwrap();
            let back = alpha_map(w).unwrap();
            assert!((back - z).norm() < 1e-13 * (1.0 + z.norm()));
        }
    }

    #[test]
    fn beta_contracts_upper_half_plane() {
        for k in 0..100 {
            let x = ((k * 37) % 100) as f64 / 5.0 - 10.0;
            let y = ((k * 59) % 97) as f64 / 10.0 + 0.01;
            let w = beta(c(x, y)).unwrap();
            assert!(w.norm() < 1.0, "z = {x}+{y}i mapped to |w| = {}", w.norm());
        }
        for k in 0..100 {
            let x = ((k * 41) % 100) as f64 / 5.0 - 10.0;
            assert!((beta(c(x, 0.0)).unwrap().norm() - 1.0).abs() < 1e-14);
        }
    }
}
