//! Optional TOML configuration with `[resolution]` and `[tolerance]` tables.
//!
//! ```toml
//! [resolution]
//! default = 48              # used by `eval`
//! instanton = 24            # per scenario
//!
//! [tolerance]
//! bounding = 1e-6           # every check of a scenario
//! "gauss-bonnet.integral" = 1e-8
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub resolution: BTreeMap<String, usize>,
    #[serde(default)]
    pub tolerance: BTreeMap<String, f64>,
}

impl Config {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text).map_err(|message| CliError::Config { path: path.display().to_string(), message })
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let cfg: Config = toml::from_str(text).map_err(|e| e.to_string())?;
        if let Some((k, _)) = cfg.resolution.iter().find(|(_, &n)| n == 0) {
            return Err(format!("resolution '{k}' must be positive"));
        }
        Ok(cfg)
    }

    pub fn scenario_resolution(&self, scenario: &str) -> Option<usize> {
        self.resolution.get(scenario).copied()
    }

    pub fn default_resolution(&self) -> Option<usize> {
        self.resolution.get("default").copied()
    }

    /// Most specific tolerance for a check: `scenario.check` before `scenario`.
    pub fn tolerance(&self, scenario: &str, check: &str) -> Option<f64> {
        self.tolerance.get(&format!("{scenario}.{check}")).or_else(|| self.tolerance.get(scenario)).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_order() {
        let c = Config::parse("[resolution]\nholonomy = 32\n[tolerance]\nholonomy = 1e-3\n\"holonomy.a\" = 1e-9\n")
            .unwrap();
        assert_eq!(c.scenario_resolution("holonomy"), Some(32));
        assert_eq!(c.tolerance("holonomy", "a"), Some(1e-9));
        assert_eq!(c.tolerance("holonomy", "b"), Some(1e-3));
        assert_eq!(c.tolerance("bounding", "a"), None);
    }

    #[test]
    fn rejects_unknown_sections_and_zero_resolution() {
        assert!(Config::parse("[grid]\nn = 3\n").is_err());
        assert!(Config::parse("[resolution]\nbounding = 0\n").is_err());
    }
}
