//! TOML run configuration.
//!
//! ```toml
//! [channel]
//! theta = 0.1          # detector efficiency
//! a0_db = 5.0          # detector loss
//! a1_db_per_km = 0.17  # fiber loss
//! p0 = 4.0e-7          # vacuum counting rate
//! s = 0.03             # signal error rate
//!
//! [scenario]
//! name = "custom"               # k2, k3-ma, k3-wang, k3-ours, k4, universal, custom
//! decoys = [0.1, 0.25]          # custom only
//! direction = "reverse"         # forward | reverse
//! dark_mode = "explicit"        # pd-zero | pd-equals-p0 | explicit
//! p_dark = 2.0e-7               # explicit only
//! bound_dark = "inclusive"      # inclusive | subtracted
//!
//! [sweep]
//! l_min = 0.0
//! l_max = 250.0
//! l_step = 1.0
//! format = "csv"                # csv | gnuplot-data
//! ```
//!
//! Every key is optional; missing channel keys fall back to the built-in
//! `paper` preset and command-line flags override file values.

use std::path::Path;

use decoy_akg::channel::ChannelParams;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub channel: ChannelSection,
    #[serde(default)]
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub sweep: SweepSection,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub preset: Option<String>,
    pub theta: Option<f64>,
    pub a0_db: Option<f64>,
    pub a1_db_per_km: Option<f64>,
    pub p0: Option<f64>,
    pub s: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub name: Option<String>,
    pub decoys: Option<Vec<f64>>,
    pub direction: Option<String>,
    pub dark_mode: Option<String>,
    pub p_dark: Option<f64>,
    pub bound_dark: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub l_min: Option<f64>,
    pub l_max: Option<f64>,
    pub l_step: Option<f64>,
    pub format: Option<String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }
}

impl ChannelSection {
    /// Channel parameters with file overrides applied to the named preset.
    pub fn resolve(&self) -> Result<ChannelParams, CliError> {
        let base = match self.preset.as_deref() {
            None | Some("paper") => ChannelParams::paper(),
            Some(other) => return Err(CliError::Config(format!("unknown channel preset '{other}'"))),
        };
        let params = ChannelParams {
            theta: self.theta.unwrap_or(base.theta),
            a0_db: self.a0_db.unwrap_or(base.a0_db),
            a1_db_per_km: self.a1_db_per_km.unwrap_or(base.a1_db_per_km),
            p0: self.p0.unwrap_or(base.p0),
            p_dark: 0.0,
            s: self.s.unwrap_or(base.s),
        };
        params
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(params)
    }
}
