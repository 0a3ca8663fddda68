//! Self-describing report blocks shared by the library and the CLI.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// One verified inequality: the theoretical bound, the measured value, and
/// the verdict at the stated tolerance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub description: String,
    pub theoretical: f64,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl BoundCheck {
    /// `measured <= theoretical * (1 + tolerance) + slack`.
    pub fn upper(
        name: &str,
        description: &str,
        theoretical: f64,
        measured: f64,
        tolerance: f64,
        slack: f64,
    ) -> Self {
        BoundCheck {
            name: name.into(),
            description: description.into(),
            theoretical,
            measured,
            tolerance,
            pass: measured <= theoretical * (1.0 + tolerance) + slack,
        }
    }
}

/// Header attached to every CLI report so outputs are reproducible from the
/// report alone.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportMeta {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub threads: usize,
    pub tolerance_profile: String,
    /// Explicit constants the checks used, keyed by name.
    pub constants: BTreeMap<String, f64>,
    /// The full tolerance configuration the computation ran under.
    pub tolerances: crate::config::Tolerances,
}
