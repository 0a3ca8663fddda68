//! Rational functions with separable denominators.

use num_complex::Complex64;

use super::multipoly::{DenseTensor, MultiPoly};
use super::unipoly::UniPoly;
use crate::error::CoreError;

/// `P(z) / (Q_1(z_1) ... Q_n(z_n))` on `C^n`.
///
/// No cancellation of common numerator/denominator factors is ever attempted;
/// per-variable degree gaps are tracked from the uncancelled form, which only
/// makes integrability screening conservative.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableRational {
    numerator: MultiPoly,
    denominators: Vec<UniPoly>,
}

impl SeparableRational {
    pub fn new(numerator: MultiPoly, denominators: Vec<UniPoly>) -> Result<Self, CoreError> {
        if numerator.nvars() != denominators.len() {
            return Err(CoreError::DimensionMismatch {
                expected: numerator.nvars(),
                got: denominators.len(),
            });
        }
        if denominators.iter().any(|q| q.is_zero()) {
            return Err(CoreError::InvalidInput(
                "denominator factor is the zero polynomial".into(),
            ));
        }
        Ok(SeparableRational {
            numerator,
            denominators,
        })
    }

    pub fn zero(n: usize) -> Self {
        SeparableRational {
            numerator: MultiPoly::zero(n),
            denominators: vec![UniPoly::one(); n],
        }
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        SeparableRational {
            numerator: MultiPoly::constant(n, c),
            denominators: vec![UniPoly::one(); n],
        }
    }

    pub fn nvars(&self) -> usize {
        self.denominators.len()
    }

    pub fn numerator(&self) -> &MultiPoly {
        &self.numerator
    }

    pub fn denominator(&self, var: usize) -> &UniPoly {
        &self.denominators[var]
    }

    pub fn denominators(&self) -> &[UniPoly] {
        &self.denominators
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// `deg Q_k - deg_k P`; `i64::MAX` for the zero rational.
    pub fn degree_gap(&self, var: usize) -> i64 {
        match self.numerator.degree(var) {
            None => i64::MAX,
            Some(d) => self.denominators[var].degree().unwrap_or(0) as i64 - d as i64,
        }
    }

    /// Guarded evaluation; refuses points whose denominator factors fall
    /// below `tau_pole` in modulus (scaled by the factor's coefficient size).
    pub fn eval(&self, z: &[Complex64], tau_pole: f64) -> Result<Complex64, CoreError> {
        if z.len() != self.nvars() {
            return Err(CoreError::DimensionMismatch {
                expected: self.nvars(),
                got: z.len(),
            });
        }
        let mut den = Complex64::new(1.0, 0.0);
        for (k, q) in self.denominators.iter().enumerate() {
            let v = q.eval(z[k]);
            let scale = 1.0 + q.max_coeff_modulus();
            if v.norm() < tau_pole * scale {
                return Err(CoreError::PoleProximity {
                    var: k,
                    distance: v.norm(),
                    threshold: tau_pole * scale,
                });
            }
            den *= v;
        }
        Ok(self.numerator.eval(z)? / den)
    }

    /// Unguarded evaluation through a fresh evaluator; for hot loops build
    /// the [`RationalEvaluator`] once instead.
    pub fn eval_unchecked(&self, z: &[Complex64]) -> Complex64 {
        self.evaluator().eval(z).to_complex()
    }

    pub fn scale(&self, c: Complex64) -> SeparableRational {
        SeparableRational {
            numerator: self.numerator.scale(c),
            denominators: self.denominators.clone(),
        }
    }

    pub fn neg(&self) -> SeparableRational {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    /// Sum over the common (product) denominator, without cancellation.
    pub fn add(&self, rhs: &SeparableRational) -> Result<SeparableRational, CoreError> {
        if rhs.nvars() != self.nvars() {
            return Err(CoreError::DimensionMismatch {
                expected: self.nvars(),
                got: rhs.nvars(),
            });
        }
        if self.is_zero() {
            return Ok(rhs.clone());
        }
        if rhs.is_zero() {
            return Ok(self.clone());
        }
        let mut left = self.numerator.clone();
        let mut right = rhs.numerator.clone();
        let mut dens = Vec::with_capacity(self.nvars());
        for k in 0..self.nvars() {
            left = left.mul_univar(k, &rhs.denominators[k]);
            right = right.mul_univar(k, &self.denominators[k]);
            dens.push(self.denominators[k].mul(&rhs.denominators[k]));
        }
        Ok(SeparableRational {
            numerator: left.add(&right),
            denominators: dens,
        })
    }

    pub fn sub(&self, rhs: &SeparableRational) -> Result<SeparableRational, CoreError> {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &SeparableRational) -> Result<SeparableRational, CoreError> {
        if rhs.nvars() != self.nvars() {
            return Err(CoreError::DimensionMismatch {
                expected: self.nvars(),
                got: rhs.nvars(),
            });
        }
        let dens = self
            .denominators
            .iter()
            .zip(rhs.denominators.iter())
            .map(|(a, b)| a.mul(b))
            .collect();
        Ok(SeparableRational {
            numerator: self.numerator.mul(&rhs.numerator),
            denominators: dens,
        })
    }

    /// Shifts every variable, `R(z) -> R(z + a)`.
    pub fn shift(&self, offsets: &[Complex64]) -> SeparableRational {
        assert_eq!(offsets.len(), self.nvars());
        SeparableRational {
            numerator: self.numerator.shift(offsets),
            denominators: self
                .denominators
                .iter()
                .zip(offsets.iter())
                .map(|(q, &a)| q.shift(a))
                .collect(),
        }
    }

    /// Compiles the rational into a dense-coefficient evaluator that stays
    /// accurate for arbitrarily large `|z_k|` via reciprocal-coefficient
    /// evaluation with explicit scale bookkeeping.
    pub fn evaluator(&self) -> RationalEvaluator {
        let n = self.nvars();
        let dense = self.numerator.to_dense();
        let mut num_variants = Vec::with_capacity(1 << n);
        for mask in 0..(1usize << n) {
            if mask == 0 {
                num_variants.push(dense.clone());
            } else {
                let mut t = dense.clone();
                for (var, _) in self.denominators.iter().enumerate() {
                    if mask & (1 << var) != 0 {
                        t = t.reversed_axis(var);
                    }
                }
                num_variants.push(t);
            }
        }
        let num_degrees: Vec<i32> = (0..n)
            .map(|v| self.numerator.degree(v).unwrap_or(0) as i32)
            .collect();
        let dens = self
            .denominators
            .iter()
            .map(|q| DenFactor {
                direct: q.coeffs().to_vec(),
                reversed: q.reversed().coeffs().to_vec(),
                degree: q.degree().unwrap_or(0) as i32,
            })
            .collect();
        RationalEvaluator {
            zero: self.numerator.is_zero(),
            num_variants,
            num_degrees,
            dens,
        }
    }
}

#[derive(Debug, Clone)]
struct DenFactor {
    direct: Vec<Complex64>,
    reversed: Vec<Complex64>,
    degree: i32,
}

/// A complex value `m * exp(log)` kept in mantissa/log form so tail and
/// near-pole magnitudes never overflow.
#[derive(Debug, Clone, Copy)]
pub struct ScaledValue {
    pub mantissa: Complex64,
    pub log: f64,
}

impl ScaledValue {
    pub fn zero() -> Self {
        ScaledValue {
            mantissa: Complex64::new(0.0, 0.0),
            log: 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.re == 0.0 && self.mantissa.im == 0.0
    }

    pub fn to_complex(&self) -> Complex64 {
        self.mantissa * self.log.exp()
    }

    /// `|value|^p`, computed in logs.
    pub fn abs_pow(&self, p: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        (p * (self.mantissa.norm().ln() + self.log)).exp()
    }
}

/// Sum of scaled values, factored against the largest scale.
pub fn sum_scaled(values: &[ScaledValue]) -> ScaledValue {
    let mut max_log = f64::NEG_INFINITY;
    for v in values {
        if !v.is_zero() {
            max_log = max_log.max(v.log);
        }
    }
    if max_log == f64::NEG_INFINITY {
        return ScaledValue::zero();
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for v in values {
        if !v.is_zero() {
            acc += v.mantissa * (v.log - max_log).exp();
        }
    }
    ScaledValue {
        mantissa: acc,
        log: max_log,
    }
}

/// Pre-compiled evaluator for one separable rational function.
#[derive(Debug, Clone)]
pub struct RationalEvaluator {
    zero: bool,
    num_variants: Vec<DenseTensor>,
    num_degrees: Vec<i32>,
    dens: Vec<DenFactor>,
}

impl RationalEvaluator {
    pub fn nvars(&self) -> usize {
        self.dens.len()
    }

    /// Evaluates at `z`, switching each axis to reciprocal coordinates when
    /// `|z_k| > 1` so that only the scale bookkeeping sees large magnitudes.
    pub fn eval(&self, z: &[Complex64]) -> ScaledValue {
        if self.zero {
            return ScaledValue::zero();
        }
        let n = self.dens.len();
        assert!(n <= 3, "evaluator supports n <= 3");
        debug_assert_eq!(z.len(), n);
        let mut mask = 0usize;
        let mut w = [Complex64::new(0.0, 0.0); 3];
        for k in 0..n {
            if z[k].re.abs() > 1.0 || z[k].im.abs() > 1.0 || z[k].norm_sqr() > 1.0 {
                mask |= 1 << k;
                // finv stays finite where the naive 1/z overflows norm_sqr.
                w[k] = z[k].finv();
            } else {
                w[k] = z[k];
            }
        }
        let mut mantissa = self.num_variants[mask].eval(&w[..n]);
        let mut log = 0.0f64;
        for k in 0..n {
            let den = &self.dens[k];
            let (dv, extra) = if mask & (1 << k) != 0 {
                // P and Q both reversed along axis k: value gains
                // z^(deg P - deg Q) = w^(gap), tracked in logs.
                let dv = horner(&den.reversed, w[k]);
                let gap = den.degree - self.num_degrees[k];
                let r = w[k].norm();
                let phase = w[k] / r;
                mantissa *= phase.powi(gap);
                (dv, gap as f64 * r.ln())
            } else {
                (horner(&den.direct, w[k]), 0.0)
            };
            // Guard exact-pole hits: the quadrature never lands on a pole,
            // but user grids may; return an infinite scale honestly.
            mantissa /= dv;
            log += extra;
        }
        if !mantissa.is_finite() {
            return ScaledValue {
                mantissa,
                log: 0.0,
            };
        }
        // Renormalize so the mantissa stays O(1) across products upstream.
        let m = mantissa.norm();
        if m > 0.0 && (m > 1e100 || m < 1e-100) {
            ScaledValue {
                mantissa: mantissa / m,
                log: log + m.ln(),
            }
        } else {
            ScaledValue { mantissa, log }
        }
    }

    /// `|R(z)|^p` through the log path.
    pub fn abs_pow(&self, z: &[Complex64], p: f64) -> f64 {
        self.eval(z).abs_pow(p)
    }
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::multipoly::MultiIndex;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn one_over_one_plus_z2() -> SeparableRational {
        SeparableRational::new(
            MultiPoly::constant(1, c(1.0, 0.0)),
            vec![UniPoly::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])],
        )
        .unwrap()
    }

    #[test]
    fn guarded_eval() {
        let r = one_over_one_plus_z2();
        let v = r.eval(&[c(1.0, 0.0)], 1e-12).unwrap();
        assert!((v - c(0.5, 0.0)).norm() < 1e-15);
        // A pole is refused.
        match r.eval(&[c(0.0, 1.0)], 1e-12) {
            Err(CoreError::PoleProximity { var: 0, .. }) => {}
            other => panic!("expected pole proximity, got {other:?}"),
        }
    }

    #[test]
    fn product_rational() {
        // z1 z2 / ((1+z1^2)(1+z2^2)) at (1,1) = 0.25
        let mut num = MultiPoly::zero(2);
        num.add_term(MultiIndex(vec![1, 1]), c(1.0, 0.0));
        let q = UniPoly::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let r = SeparableRational::new(num, vec![q.clone(), q]).unwrap();
        let v = r.eval(&[c(1.0, 0.0), c(1.0, 0.0)], 1e-12).unwrap();
        assert!((v - c(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn combine_ops() {
        let r = one_over_one_plus_z2();
        let prod = r.mul(&r).unwrap();
        let v = prod.eval(&[c(1.0, 0.0)], 1e-12).unwrap();
        assert!((v - c(0.25, 0.0)).norm() < 1e-15);
        assert!(r.scale(c(0.0, 0.0)).is_zero());
        // 1/(z-1) - 1/(z+1) = 2/((z-1)(z+1))
        let a = SeparableRational::new(
            MultiPoly::constant(1, c(1.0, 0.0)),
            vec![UniPoly::new(vec![c(-1.0, 0.0), c(1.0, 0.0)])],
        )
        .unwrap();
        let b = SeparableRational::new(
            MultiPoly::constant(1, c(-1.0, 0.0)),
            vec![UniPoly::new(vec![c(1.0, 0.0), c(1.0, 0.0)])],
        )
        .unwrap();
        let s = a.add(&b).unwrap();
        for x in [0.5f64, 2.0, -3.0] {
            let v = s.eval(&[c(x, 0.0)], 1e-12).unwrap();
            let want = 2.0 / (x * x - 1.0);
            assert!((v - c(want, 0.0)).norm() < 1e-12 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn evaluator_matches_direct_and_handles_tails() {
        let r = one_over_one_plus_z2();
        let ev = r.evaluator();
        for x in [0.0f64, 0.5, 3.0, 150.0, -2e6] {
            let direct = 1.0 / (1.0 + x * x);
            let got = ev.eval(&[c(x, 0.0)]).to_complex();
            assert!(
                (got.re - direct).abs() < 1e-14 * (1.0 + direct.abs()),
                "x={x}: got {got}, want {direct}"
            );
        }
        // Far tail via the log path: |R|^(1/2) ~ 1/|x| there, beyond what a
        // direct x^2 would survive in f64.
        let huge = 1e155;
        let lp = ev.abs_pow(&[c(huge, 0.0)], 0.5);
        let want = 1.0 / huge;
        assert!((lp - want).abs() < 1e-10 * want.abs(), "{lp} vs {want}");
    }
}
