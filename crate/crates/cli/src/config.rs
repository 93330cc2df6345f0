//! Scenario configuration files.
//!
//! A config is one JSON object. `preset` picks the base configuration
//! (default: the plain defaults); every other key overrides one field of it.
//! Nested blocks (`resources`, `apps`, `network`, `schedule`) replace the
//! whole block and must be complete. Unknown keys are rejected.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use fogpart_core::scenario::{
    AppRanges, NetworkParams, Preset, ResourceRanges, ScenarioConfig, ScheduleConfig,
};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub preset: Option<Preset>,
    pub name: Option<String>,
    pub device_count: Option<usize>,
    pub gateway_count: Option<usize>,
    pub ba_attachment: Option<usize>,
    pub resources: Option<ResourceRanges>,
    pub apps: Option<AppRanges>,
    pub network: Option<NetworkParams>,
    pub app_count: Option<usize>,
    pub user_count: Option<usize>,
    pub schedule: Option<ScheduleConfig>,
    pub cloud: Option<bool>,
    pub cloud_factor: Option<u64>,
    pub seed: Option<u64>,
}

impl ConfigFile {
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        serde_json::from_str(text).with_context(|| format!("invalid config {}", origin.display()))
    }

    /// Effective configuration; `seed` wins over the file's seed.
    pub fn resolve(self, seed: Option<u64>) -> Result<ScenarioConfig> {
        let base_seed = seed.or(self.seed).unwrap_or(0);
        let mut cfg = match self.preset {
            Some(p) => p.config(base_seed),
            None => ScenarioConfig {
                seed: base_seed,
                ..ScenarioConfig::default()
            },
        };
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { cfg.$f = v; } )* };
        }
        set!(
            name,
            device_count,
            gateway_count,
            ba_attachment,
            resources,
            apps,
            network,
            app_count,
            user_count,
            cloud,
            cloud_factor
        );
        if let Some(s) = self.schedule {
            cfg.schedule = Some(s);
        }
        if let Err(e) = cfg.validate() {
            bail!("{e}");
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_with_override() {
        let f =
            ConfigFile::parse(r#"{"preset": "MEDIUM", "user_count": 7}"#, Path::new("x")).unwrap();
        let cfg = f.resolve(Some(4)).unwrap();
        assert_eq!(cfg.app_count, 20);
        assert_eq!(cfg.user_count, 7);
        assert_eq!(cfg.seed, 4);
    }

    #[test]
    fn unknown_keys_report_position() {
        let err = ConfigFile::parse(
            "{\n  \"preset\": \"SMALL\",\n  \"users\": 3\n}",
            Path::new("c.json"),
        )
        .unwrap_err();
        let msg = format!("{err:#}");
        assert!(msg.contains("unknown field `users`"), "{msg}");
        assert!(msg.contains("line 3"), "{msg}");
    }
}
