use std::collections::BTreeMap;

use chernforge::numeric::circle_distance;
use serde::Serialize;

pub const SCHEMA: u32 = 1;

/// One check as produced by a scenario, before tolerance overrides.
#[derive(Debug, Clone)]
pub struct Check {
    pub id: String,
    pub expected: f64,
    pub computed: Result<f64, String>,
    pub tolerance: f64,
    pub mod_1: bool,
}

impl Check {
    pub fn abs(id: impl Into<String>, expected: f64, computed: chernforge::Result<f64>, tolerance: f64) -> Self {
        Check { id: id.into(), expected, computed: computed.map_err(|e| e.to_string()), tolerance, mod_1: false }
    }

    pub fn circle(id: impl Into<String>, expected: f64, computed: chernforge::Result<f64>, tolerance: f64) -> Self {
        Check { id: id.into(), expected, computed: computed.map_err(|e| e.to_string()), tolerance, mod_1: true }
    }

    pub fn failed(id: impl Into<String>, error: String) -> Self {
        Check { id: id.into(), expected: f64::NAN, computed: Err(error), tolerance: 0.0, mod_1: false }
    }

    pub fn record(&self) -> CheckRecord {
        let (computed, error) = match &self.computed {
            Ok(v) if v.is_finite() => (Some(*v), None),
            Ok(v) => (None, Some(format!("non-finite result {v}"))),
            Err(e) => (None, Some(e.clone())),
        };
        let pass = computed.is_some_and(|c| {
            let dist = if self.mod_1 { circle_distance(c, self.expected) } else { (c - self.expected).abs() };
            self.tolerance > 0.0 && dist <= self.tolerance
        });
        CheckRecord {
            check_id: self.id.clone(),
            expected: self.expected.is_finite().then_some(self.expected),
            computed,
            tolerance: self.tolerance,
            mod_1: self.mod_1,
            pass,
            error,
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CheckRecord {
    pub check_id: String,
    pub expected: Option<f64>,
    pub computed: Option<f64>,
    pub tolerance: f64,
    pub mod_1: bool,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub version: String,
    pub scenario: String,
    pub resolution: usize,
    pub params: BTreeMap<String, f64>,
    pub pass: bool,
    pub checks: Vec<CheckRecord>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub schema: u32,
    pub version: String,
    pub pass: bool,
    pub reports: Vec<Report>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Evaluation {
    pub schema: u32,
    pub character: String,
    pub cycle: String,
    pub resolution: usize,
    pub value_mod_1: f64,
    pub curvature_periods: Vec<f64>,
    pub tolerances: BTreeMap<String, f64>,
}

pub fn version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_rule() {
        assert!(Check::abs("a", 1.0, Ok(1.0 + 1e-7), 1e-6).record().pass);
        assert!(!Check::abs("a", 1.0, Ok(1.0 + 1e-5), 1e-6).record().pass);
        assert!(Check::circle("a", 0.0, Ok(0.9999999), 1e-6).record().pass);
        assert!(!Check::abs("a", 0.0, Ok(0.0), 0.0).record().pass);
        assert!(!Check::abs("a", 0.0, Ok(f64::NAN), 1.0).record().pass);
        let r = Check::abs("a", 0.0, Err(chernforge::Error::NotTrivialized), 1.0).record();
        assert!(!r.pass && r.error.is_some() && r.computed.is_none());
    }
}
