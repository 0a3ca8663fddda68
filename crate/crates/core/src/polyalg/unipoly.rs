//! Dense univariate polynomials in ascending coefficient order.

use num_complex::Complex64;

/// A univariate polynomial `c_0 + c_1 z + ... + c_d z^d`.
///
/// The empty coefficient vector is the zero polynomial; otherwise the leading
/// coefficient is nonzero (exact zeros are trimmed on construction).
#[derive(Debug, Clone, PartialEq)]
pub struct UniPoly {
    coeffs: Vec<Complex64>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| c.re == 0.0 && c.im == 0.0) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        UniPoly::new(vec![c])
    }

    pub fn one() -> Self {
        UniPoly::constant(Complex64::new(1.0, 0.0))
    }

    /// The monomial `z`.
    pub fn identity() -> Self {
        UniPoly::new(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<Complex64> {
        self.coeffs.last().copied()
    }

    pub fn max_coeff_modulus(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            d = d * z + v;
            v = v * z + c;
        }
        (v, d)
    }

    pub fn derivative(&self) -> UniPoly {
        if self.coeffs.len() <= 1 {
            return UniPoly::zero();
        }
        UniPoly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(k, &c)| c * (k as f64 + 1.0))
                .collect(),
        )
    }

    pub fn add(&self, rhs: &UniPoly) -> UniPoly {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len().max(rhs.coeffs.len())];
        for (k, &c) in self.coeffs.iter().enumerate() {
            out[k] += c;
        }
        for (k, &c) in rhs.coeffs.iter().enumerate() {
            out[k] += c;
        }
        UniPoly::new(out)
    }

    pub fn sub(&self, rhs: &UniPoly) -> UniPoly {
        self.add(&rhs.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> UniPoly {
        if c.re == 0.0 && c.im == 0.0 {
            return UniPoly::zero();
        }
        UniPoly::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    pub fn mul(&self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out =
            vec![Complex64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }

    pub fn pow(&self, k: u32) -> UniPoly {
        let mut acc = UniPoly::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex64]) -> UniPoly {
        let mut acc = UniPoly::one();
        for &r in roots {
            acc = acc.mul(&UniPoly::new(vec![-r, Complex64::new(1.0, 0.0)]));
        }
        acc
    }

    /// The shifted polynomial `q(z) = p(z + a)`.
    pub fn shift(&self, a: Complex64) -> UniPoly {
        // Repeated synthetic division by (z - (-a)) yields the Taylor
        // coefficients at -a applied to p(z + a).
        let mut work = self.coeffs.clone();
        let n = work.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n {
            let mut rem = Complex64::new(0.0, 0.0);
            for c in work.iter_mut().rev() {
                let t = *c + rem * a;
                rem = t;
                *c = t;
            }
            // After one pass the constant term is the next Taylor coefficient.
            out[k] = work[0];
            work.remove(0);
        }
        UniPoly::new(out)
    }

    /// Coefficient order reversed against the polynomial's own degree:
    /// `rev(u) = u^d * p(1/u)`.
    pub fn reversed(&self) -> UniPoly {
        let mut c = self.coeffs.clone();
        c.reverse();
        UniPoly::new(c)
    }

    /// Euclidean division, returning `(quotient, remainder)`.
    pub fn divrem(&self, divisor: &UniPoly) -> (UniPoly, UniPoly) {
        let d = divisor.degree().expect("division by zero polynomial");
        let lead = divisor.coeffs[d];
        if self.coeffs.len() <= d {
            return (UniPoly::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let qlen = rem.len() - d;
        let mut q = vec![Complex64::new(0.0, 0.0); qlen];
        for k in (0..qlen).rev() {
            let factor = rem[k + d] / lead;
            q[k] = factor;
            for j in 0..=d {
                rem[k + j] -= factor * divisor.coeffs[j];
            }
        }
        rem.truncate(d);
        (UniPoly::new(q), UniPoly::new(rem))
    }
}

/// Coefficient form of `(a + b z)^m` by the binomial theorem.
pub fn binomial_power(a: Complex64, b: Complex64, m: u32) -> UniPoly {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); m as usize + 1];
    // binom(m, k) a^(m-k) b^k, built incrementally to keep integer binomials exact.
    let mut binom = 1.0f64;
    for k in 0..=m as usize {
        if k > 0 {
            binom = binom * (m as usize - k + 1) as f64 / k as f64;
        }
        coeffs[k] = a.powu((m as usize - k) as u32) * b.powu(k as u32) * binom;
    }
    UniPoly::new(coeffs)
}
