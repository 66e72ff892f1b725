//! Run manifests: everything needed to repeat a run.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::config::{ConfigFile, RunConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    /// `simulate` or `simulate-dist`.
    pub engine: String,
    pub seed: u64,
    /// Seconds since the Unix epoch.
    pub started_at: u64,
    pub config: ConfigFile,
}

impl RunManifest {
    pub fn new(engine: &str, config: &RunConfig, seed: u64) -> Self {
        let started_at = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            engine: engine.to_string(),
            seed,
            started_at,
            config: config.to_file(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serialises");
        s.push('\n');
        s
    }

    /// The configuration this manifest records.
    pub fn run_config(&self) -> Result<RunConfig, crate::config::InvalidConfig> {
        let mut rc = self.config.resolve()?;
        rc.seed = Some(self.seed);
        rc.sim.seed = self.seed;
        Ok(rc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_reproduces_the_config() {
        let mut rc = ConfigFile::parse(r#"{"J": 1, "K": -0.1, "agents": 7}"#).unwrap().resolve().unwrap();
        rc.seed = Some(3);
        rc.sim.seed = 3;
        let m = RunManifest::new("simulate", &rc, 3);
        let back: RunManifest = serde_json::from_str(&m.to_json()).unwrap();
        assert_eq!(back.run_config().unwrap(), rc);
    }
}
