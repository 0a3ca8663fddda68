//! Shared fixtures for the criterion benchmarks.

use num_complex::Complex64;

use hardy_tubes::polyalg::{binomial_power, MultiPoly, UniPoly};
use hardy_tubes::SeparableRational;

/// `1 / (1 + x^2)^l` in one variable.
pub fn recip_power_atom(l: u32) -> SeparableRational {
    let q = UniPoly::new(vec![
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
    ])
    .pow(l);
    SeparableRational::new(MultiPoly::constant(1, Complex64::new(1.0, 0.0)), vec![q]).unwrap()
}

/// `1 / ((z + i)^l (z - 2i)^l ... )`-style test polynomial for root finding.
pub fn clustered_poly(l: u32) -> UniPoly {
    binomial_power(Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0), l)
        .mul(&binomial_power(Complex64::new(1.0, -2.0), Complex64::new(1.0, 0.0), 2))
}
