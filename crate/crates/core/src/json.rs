//! The JSON interchange format for rationals.
//!
//! ```json
//! {
//!   "n": 2,
//!   "numerator": [{"index": [0, 0], "re": 1.0, "im": 0.0}],
//!   "denominators": [
//!     [{"re": 1.0, "im": 0.0}, {"re": 0.0, "im": 0.0}, {"re": 1.0, "im": 0.0}],
//!     [{"re": 1.0, "im": 0.0}]
//!   ]
//! }
//! ```
//!
//! Denominator coefficients are ascending in degree; numerator terms are
//! emitted in graded-lexicographic order of their multi-indices. This format
//! is the contract for every CLI command, so [`SeparableRational`]
//! serializes straight into it.

use num_complex::Complex64;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CoreError;
use crate::polyalg::{MultiIndex, MultiPoly, SeparableRational, UniPoly};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermJson {
    pub index: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoeffJson {
    pub re: f64,
    pub im: f64,
}

/// Wire form of a separable rational.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RationalJson {
    pub n: usize,
    pub numerator: Vec<TermJson>,
    pub denominators: Vec<Vec<CoeffJson>>,
}

impl RationalJson {
    /// Validates and converts, reporting the JSON-pointer path of the first
    /// offending field.
    pub fn into_rational(self) -> Result<SeparableRational, CoreError> {
        if self.n == 0 {
            return Err(CoreError::InvalidInput(
                "/n: dimension must be at least 1".into(),
            ));
        }
        let n = self.n;
        let mut num = MultiPoly::zero(n);
        for (t, term) in self.numerator.iter().enumerate() {
            if term.index.len() != n {
                return Err(CoreError::InvalidInput(format!(
                    "/numerator/{t}/index: expected length {n}, got {}",
                    term.index.len()
                )));
            }
            if !term.re.is_finite() || !term.im.is_finite() {
                return Err(CoreError::InvalidInput(format!(
                    "/numerator/{t}: coefficient must be finite"
                )));
            }
            num.add_term(
                MultiIndex(term.index.clone()),
                Complex64::new(term.re, term.im),
            );
        }
        if self.denominators.len() != n {
            return Err(CoreError::InvalidInput(format!(
                "/denominators: expected {n} entries, got {}",
                self.denominators.len()
            )));
        }
        let mut dens = Vec::with_capacity(n);
        for (k, coeffs) in self.denominators.iter().enumerate() {
            for (j, c) in coeffs.iter().enumerate() {
                if !c.re.is_finite() || !c.im.is_finite() {
                    return Err(CoreError::InvalidInput(format!(
                        "/denominators/{k}/{j}: coefficient must be finite"
                    )));
                }
            }
            let q = UniPoly::new(
                coeffs
                    .iter()
                    .map(|c| Complex64::new(c.re, c.im))
                    .collect(),
            );
            if q.is_zero() {
                return Err(CoreError::InvalidInput(format!(
                    "/denominators/{k}: denominator is the zero polynomial"
                )));
            }
            dens.push(q);
        }
        SeparableRational::new(num, dens)
    }

    pub fn from_rational(r: &SeparableRational) -> RationalJson {
        RationalJson {
            n: r.nvars(),
            numerator: r
                .numerator()
                .terms()
                .map(|(idx, c)| TermJson {
                    index: idx.0.clone(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
            denominators: r
                .denominators()
                .iter()
                .map(|q| {
                    q.coeffs()
                        .iter()
                        .map(|c| CoeffJson { re: c.re, im: c.im })
                        .collect()
                })
                .collect(),
        }
    }
}

impl Serialize for SeparableRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RationalJson::from_rational(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SeparableRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let wire = RationalJson::deserialize(d)?;
        wire.into_rational().map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = r#"{
            "n": 1,
            "numerator": [{"index": [0], "re": 1.0, "im": 0.0}],
            "denominators": [[{"re": 1.0, "im": 0.0}, {"re": 0.0, "im": 0.0}, {"re": 1.0, "im": 0.0}]]
        }"#;
        let r: SeparableRational = serde_json::from_str(text).unwrap();
        assert_eq!(r.nvars(), 1);
        let v = r.eval(&[Complex64::new(1.0, 0.0)], 1e-12).unwrap();
        assert!((v.re - 0.5).abs() < 1e-15);
        let back = serde_json::to_string(&r).unwrap();
        let r2: SeparableRational = serde_json::from_str(&back).unwrap();
        assert_eq!(r, r2);
    }

    #[test]
    fn dimension_mismatch_reports_pointer() {
        let text = r#"{
            "n": 2,
            "numerator": [{"index": [0], "re": 1.0, "im": 0.0}],
            "denominators": [[{"re": 1.0, "im": 0.0}]]
        }"#;
        let err = serde_json::from_str::<SeparableRational>(text)
            .unwrap_err()
            .to_string();
        assert!(err.contains("/numerator/0/index"), "{err}");
    }

    #[test]
    fn zero_denominator_rejected() {
        let text = r#"{
            "n": 1,
            "numerator": [],
            "denominators": [[{"re": 0.0, "im": 0.0}]]
        }"#;
        let err = serde_json::from_str::<SeparableRational>(text)
            .unwrap_err()
            .to_string();
        assert!(err.contains("/denominators/0"), "{err}");
    }
}
