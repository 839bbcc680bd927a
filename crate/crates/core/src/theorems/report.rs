use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// One scale of an inequality check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleRow {
    pub epsilon: f64,
    pub lhs: f64,
    pub rhs: f64,
}

/// Outcome of an executable inequality `lhs <= rhs * (1 + tol)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub tol: f64,
    pub holds: bool,
    /// `rhs - lhs`.
    pub slack: f64,
    pub breakdown: Vec<ScaleRow>,
    /// Counts and constants from the construction.
    pub witnesses: BTreeMap<String, f64>,
}

impl InequalityReport {
    /// Builds a report whose verdict is `lhs <= rhs * (1 + tol)` at every row
    /// (or for the totals when there are no rows).
    pub fn from_rows(name: &str, mut rows: Vec<ScaleRow>, tol: f64) -> Self {
        // Empty sums come out as -0.0; store +0.0.
        for r in &mut rows {
            r.lhs += 0.0;
            r.rhs += 0.0;
        }
        let (lhs, rhs) = match rows.last() {
            Some(r) => (r.lhs, r.rhs),
            None => (0.0, 0.0),
        };
        let holds = rows.iter().all(|r| leq(r.lhs, r.rhs, tol));
        InequalityReport {
            name: name.into(),
            lhs,
            rhs,
            tol,
            holds,
            slack: rhs - lhs,
            breakdown: rows,
            witnesses: BTreeMap::new(),
        }
    }

    pub fn single(name: &str, epsilon: f64, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self::from_rows(name, vec![ScaleRow { epsilon, lhs, rhs }], tol)
    }

    pub fn witness(mut self, key: &str, value: f64) -> Self {
        self.witnesses.insert(key.into(), value);
        self
    }

    /// Adds a side condition to the verdict.
    pub fn require(mut self, key: &str, ok: bool) -> Self {
        self.witnesses.insert(key.into(), if ok { 1.0 } else { 0.0 });
        self.holds &= ok;
        self
    }
}

/// `a <= b * (1 + tol)`, with `0 <= 0` holding.
pub fn leq(a: f64, b: f64, tol: f64) -> bool {
    a <= b * (1.0 + tol) || a <= b
}
