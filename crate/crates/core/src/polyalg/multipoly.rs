//! Sparse multivariate polynomials with graded-lexicographic term order.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::unipoly::UniPoly;
use crate::error::CoreError;

/// Exponent vector `(k_1, ..., k_n)` ordered graded-lexicographically, which
/// fixes the serialization order of terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

/// A sparse polynomial on `C^n`; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly {
    n: usize,
    terms: BTreeMap<MultiIndex, Complex64>,
}

impl MultiPoly {
    pub fn zero(n: usize) -> Self {
        MultiPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        let mut p = MultiPoly::zero(n);
        p.add_term(MultiIndex(vec![0; n]), c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Adds `c` to the coefficient at `idx`, dropping exact zeros.
    pub fn add_term(&mut self, idx: MultiIndex, c: Complex64) {
        debug_assert_eq!(idx.0.len(), self.n);
        if c.re == 0.0 && c.im == 0.0 {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(idx) {
            Entry::Occupied(mut e) => {
                let v = *e.get() + c;
                if v.re == 0.0 && v.im == 0.0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    /// Per-variable degree, or `None` for the zero polynomial.
    pub fn degree(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|idx| idx.0[var]).max()
    }

    pub fn max_coeff_modulus(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn add(&self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (idx, &c) in rhs.terms.iter() {
            out.add_term(idx.clone(), c);
        }
        out
    }

    pub fn sub(&self, rhs: &MultiPoly) -> MultiPoly {
        self.add(&rhs.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> MultiPoly {
        if c.re == 0.0 && c.im == 0.0 {
            return MultiPoly::zero(self.n);
        }
        MultiPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(idx, &a)| (idx.clone(), a * c))
                .collect(),
        }
    }

    pub fn mul(&self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero(self.n);
        for (ia, &ca) in self.terms.iter() {
            for (ib, &cb) in rhs.terms.iter() {
                let idx = MultiIndex(
                    ia.0.iter()
                        .zip(ib.0.iter())
                        .map(|(a, b)| a + b)
                        .collect(),
                );
                out.add_term(idx, ca * cb);
            }
        }
        out
    }

    /// Multiplies by a univariate polynomial in variable `var`.
    pub fn mul_univar(&self, var: usize, p: &UniPoly) -> MultiPoly {
        let mut out = MultiPoly::zero(self.n);
        for (idx, &c) in self.terms.iter() {
            for (k, &pc) in p.coeffs().iter().enumerate() {
                if pc.re == 0.0 && pc.im == 0.0 {
                    continue;
                }
                let mut e = idx.0.clone();
                e[var] += k as u32;
                out.add_term(MultiIndex(e), c * pc);
            }
        }
        out
    }

    /// Embeds a univariate polynomial as a polynomial in variable `var` of an
    /// `n`-variable ring.
    pub fn from_univar(p: &UniPoly, var: usize, n: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(n);
        for (k, &c) in p.coeffs().iter().enumerate() {
            let mut e = vec![0u32; n];
            e[var] = k as u32;
            out.add_term(MultiIndex(e), c);
        }
        out
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64, CoreError> {
        if z.len() != self.n {
            return Err(CoreError::DimensionMismatch {
                expected: self.n,
                got: z.len(),
            });
        }
        // Power tables per variable up to the degree actually used.
        let mut powers: Vec<Vec<Complex64>> = Vec::with_capacity(self.n);
        for v in 0..self.n {
            let d = self.degree(v).unwrap_or(0) as usize;
            let mut table = Vec::with_capacity(d + 1);
            let mut acc = Complex64::new(1.0, 0.0);
            table.push(acc);
            for _ in 0..d {
                acc *= z[v];
                table.push(acc);
            }
            powers.push(table);
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for (idx, &c) in self.terms.iter() {
            let mut t = c;
            for (v, &e) in idx.0.iter().enumerate() {
                t *= powers[v][e as usize];
            }
            sum += t;
        }
        Ok(sum)
    }

    /// Variable substitution `z_k -> z_k + a_k`.
    pub fn shift(&self, offsets: &[Complex64]) -> MultiPoly {
        assert_eq!(offsets.len(), self.n);
        let mut out = self.clone();
        for (var, &a) in offsets.iter().enumerate() {
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            out = out.shift_one(var, a);
        }
        out
    }

    fn shift_one(&self, var: usize, a: Complex64) -> MultiPoly {
        // Collect coefficients by the exponent of `var`, shift each slice.
        let mut out = MultiPoly::zero(self.n);
        // Group terms into univariate polynomials in `var` with multi-monomial tails.
        let mut groups: BTreeMap<MultiIndex, Vec<(u32, Complex64)>> = BTreeMap::new();
        for (idx, &c) in self.terms.iter() {
            let mut tail = idx.0.clone();
            let e = tail[var];
            tail[var] = 0;
            groups.entry(MultiIndex(tail)).or_default().push((e, c));
        }
        for (tail, entries) in groups {
            let dmax = entries.iter().map(|(e, _)| *e).max().unwrap_or(0) as usize;
            let mut coeffs = vec![Complex64::new(0.0, 0.0); dmax + 1];
            for (e, c) in entries {
                coeffs[e as usize] += c;
            }
            let shifted = UniPoly::new(coeffs).shift(a);
            for (k, &c) in shifted.coeffs().iter().enumerate() {
                let mut e = tail.0.clone();
                e[var] = k as u32;
                out.add_term(MultiIndex(e), c);
            }
        }
        out
    }

    /// Division by a univariate polynomial in variable `var`, returning
    /// `(quotient, remainder)` with `deg_var(remainder) < deg(divisor)`.
    pub fn divrem_univar(&self, var: usize, divisor: &UniPoly) -> (MultiPoly, MultiPoly) {
        let d = divisor.degree().expect("division by zero polynomial");
        let lead = divisor.coeffs()[d];
        // Treat self as a polynomial in `var` with MultiPoly coefficients.
        let self_deg = match self.degree(var) {
            Some(deg) => deg as usize,
            None => return (MultiPoly::zero(self.n), MultiPoly::zero(self.n)),
        };
        if self_deg < d {
            return (MultiPoly::zero(self.n), self.clone());
        }
        let mut slices: Vec<MultiPoly> = vec![MultiPoly::zero(self.n); self_deg + 1];
        for (idx, &c) in self.terms.iter() {
            let e = idx.0[var] as usize;
            let mut tail = idx.0.clone();
            tail[var] = 0;
            slices[e].add_term(MultiIndex(tail), c);
        }
        let qlen = self_deg - d + 1;
        let mut quotient: Vec<MultiPoly> = vec![MultiPoly::zero(self.n); qlen];
        for k in (0..qlen).rev() {
            let factor = slices[k + d].scale(Complex64::new(1.0, 0.0) / lead);
            for j in 0..=d {
                let t = factor.scale(divisor.coeffs()[j]);
                slices[k + j] = slices[k + j].sub(&t);
            }
            quotient[k] = factor;
        }
        let mut q = MultiPoly::zero(self.n);
        for (k, part) in quotient.iter().enumerate() {
            for (idx, &c) in part.terms.iter() {
                let mut e = idx.0.clone();
                e[var] = k as u32;
                q.add_term(MultiIndex(e), c);
            }
        }
        let mut r = MultiPoly::zero(self.n);
        for (k, part) in slices.iter().enumerate().take(d) {
            for (idx, &c) in part.terms.iter() {
                let mut e = idx.0.clone();
                e[var] = k as u32;
                r.add_term(MultiIndex(e), c);
            }
        }
        (q, r)
    }

    /// Dense coefficient tensor (row-major over variables) for fast repeated
    /// evaluation.
    pub fn to_dense(&self) -> DenseTensor {
        let dims: Vec<usize> = (0..self.n)
            .map(|v| self.degree(v).unwrap_or(0) as usize + 1)
            .collect();
        let total: usize = dims.iter().product();
        let mut data = vec![Complex64::new(0.0, 0.0); total.max(1)];
        for (idx, &c) in self.terms.iter() {
            let mut flat = 0usize;
            for (v, &e) in idx.0.iter().enumerate() {
                flat = flat * dims[v] + e as usize;
            }
            data[flat] = c;
        }
        DenseTensor { dims, data }
    }
}

/// Dense coefficient tensor used by [`super::RationalEvaluator`].
#[derive(Debug, Clone)]
pub struct DenseTensor {
    pub dims: Vec<usize>,
    pub data: Vec<Complex64>,
}

impl DenseTensor {
    /// Nested Horner evaluation, highest variable innermost.
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.eval_block(z, 0, 0, self.data.len())
    }

    fn eval_block(&self, z: &[Complex64], axis: usize, start: usize, len: usize) -> Complex64 {
        if axis + 1 == self.dims.len() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in (start..start + len).rev() {
                acc = acc * z[axis] + self.data[k];
            }
            return acc;
        }
        let stride = len / self.dims[axis];
        let mut acc = Complex64::new(0.0, 0.0);
        for k in (0..self.dims[axis]).rev() {
            acc = acc * z[axis] + self.eval_block(z, axis + 1, start + k * stride, stride);
        }
        acc
    }

    /// Tensor with axis `var` reversed, realizing `u^deg * p(..., 1/u, ...)`.
    pub fn reversed_axis(&self, var: usize) -> DenseTensor {
        let mut out = self.clone();
        let inner: usize = self.dims[var + 1..].iter().product();
        let outer: usize = self.dims[..var].iter().product();
        let d = self.dims[var];
        for o in 0..outer {
            for k in 0..d {
                for i in 0..inner {
                    let src = (o * d + k) * inner + i;
                    let dst = (o * d + (d - 1 - k)) * inner + i;
                    out.data[dst] = self.data[src];
                }
            }
        }
        out
    }
}
