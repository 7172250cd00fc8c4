//! Optional TOML configuration. Command-line flags override every key.
//!
//! ```toml
//! prec = 40
//! max_q_prec = 4096
//! k_samples = ["1/2", "-7/3"]
//!
//! [scan]
//! l_max = 4
//! w_max = 60
//!
//! [verify]
//! profile = "quick"
//! lax_trials = 5
//! ```

use std::path::Path;

use serde::Deserialize;

use qmx_core::rational;
use qmx_core::verify::Profile;
use qmx_core::{QmxError, Rational, Result};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub prec: Option<usize>,
    pub max_q_prec: Option<usize>,
    pub k_samples: Option<Vec<String>>,
    #[serde(default)]
    pub scan: ScanConfig,
    /// `profile` names the base profile; other keys override its fields.
    #[serde(default)]
    pub verify: toml::Table,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub l_max: Option<u32>,
    pub w_max: Option<i64>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| QmxError::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| QmxError::Parse(e.to_string()))
    }

    pub fn k_samples(&self) -> Result<Option<Vec<Rational>>> {
        self.k_samples.as_ref().map(|v| v.iter().map(|s| rational::parse(s)).collect()).transpose()
    }

    /// The named profile (flag, then file, then `full`) with file overrides
    /// applied.
    pub fn profile(&self, name: Option<&str>) -> Result<Profile> {
        let mut table = self.verify.clone();
        let file_name = table.remove("profile").and_then(|v| v.as_str().map(str::to_string));
        let name = name.map(str::to_string).or(file_name).unwrap_or_else(|| "full".into());
        let base = Profile::by_name(&name).ok_or_else(|| QmxError::Parse(format!("unknown profile {name:?}")))?;
        let mut merged = toml::Table::try_from(&base).map_err(|e| QmxError::Parse(e.to_string()))?;
        merged.extend(table);
        if let Some(m) = self.max_q_prec {
            merged.insert("max_q_prec".into(), toml::Value::Integer(m as i64));
        }
        merged.try_into().map_err(|e: toml::de::Error| QmxError::Parse(e.to_string()))
    }
}
