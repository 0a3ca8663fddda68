//! The few special functions the closed-form oracles need.

use std::f64::consts::PI;

/// Lanczos coefficients, g = 7, n = 9.
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// Gamma function for real arguments away from the non-positive integers.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection.
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut acc = LANCZOS[0];
        for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
            acc += c / (x + k as f64);
        }
        let t = x + 7.5;
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
    }
}

/// `int_R (1 + x^2)^(-q) dx = sqrt(pi) Gamma(q - 1/2) / Gamma(q)` for `q > 1/2`.
pub fn integral_one_plus_x2_pow(q: f64) -> f64 {
    assert!(q > 0.5, "integral diverges for q <= 1/2");
    PI.sqrt() * gamma(q - 0.5) / gamma(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_reference_values() {
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-13);
        assert!((gamma(1.0) - 1.0).abs() < 1e-13);
        assert!((gamma(6.0) - 120.0).abs() < 1e-10);
        // Gamma(1/4), 16 digits.
        assert!((gamma(0.25) - 3.625_609_908_221_908_3).abs() < 1e-12);
    }

    #[test]
    fn slab_integral_matches_arctan() {
        // q = 1: integral is pi.
        assert!((integral_one_plus_x2_pow(1.0) - PI).abs() < 1e-12);
        // q = 3/2: integral is 2.
        assert!((integral_one_plus_x2_pow(1.5) - 2.0).abs() < 1e-12);
    }
}
