//! Check reports: one verified identity per record, serialized to JSON.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// One verified identity: parameters, both sides, residual, tolerance and
/// the derived pass flag. `pass` holds exactly when `residual <= tolerance`;
/// a check that uses a relative metric says so in `notes`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    pub params: BTreeMap<String, String>,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub notes: String,
}

impl CheckReport {
    pub fn new(
        check_id: impl Into<String>,
        params: BTreeMap<String, String>,
        lhs: f64,
        rhs: f64,
        residual: f64,
        tolerance: f64,
        notes: impl Into<String>,
    ) -> Self {
        CheckReport {
            check_id: check_id.into(),
            params,
            lhs,
            rhs,
            residual,
            tolerance,
            pass: residual <= tolerance,
            notes: notes.into(),
        }
    }

    /// Absolute-difference check |lhs - rhs| <= tolerance.
    pub fn absolute(
        check_id: impl Into<String>,
        params: BTreeMap<String, String>,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
        notes: impl Into<String>,
    ) -> Self {
        let residual = (lhs - rhs).abs();
        Self::new(check_id, params, lhs, rhs, residual, tolerance, notes)
    }

    /// Check of a precomputed residual (monotonicity ladders, suprema).
    pub fn residual_only(
        check_id: impl Into<String>,
        params: BTreeMap<String, String>,
        residual: f64,
        tolerance: f64,
        notes: impl Into<String>,
    ) -> Self {
        Self::new(check_id, params, residual, 0.0, residual, tolerance, notes)
    }

    pub fn one_line(&self) -> String {
        format!(
            "{} {:<44} residual {:>12.4e}  tol {:>9.2e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.check_id,
            self.residual,
            self.tolerance
        )
    }
}

/// Convenience constructor for the params map.
pub fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}
