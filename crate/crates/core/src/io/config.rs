use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::distributions::GammaSpec;
use crate::error::{Error, Result};
use crate::simulator::EpidemicParams;

/// Environment variable that, when set, replaces the configured seed.
pub const SEED_ENV: &str = "EPISTOCH_SEED";

/// JSON configuration for `simulate` and `replicate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub k: usize,
    pub r0: f64,
    pub latent: GammaSpec,
    pub infectious: GammaSpec,
    pub seed: u64,
    #[serde(default = "one")]
    pub replications: usize,
    /// Where to write the CSV output, if not given on the command line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

fn one() -> usize {
    1
}

impl RunConfig {
    /// Parses and validates; `seed_override` is the raw value of
    /// [`SEED_ENV`], if any.
    pub fn from_json(text: &str, seed_override: Option<&str>) -> Result<Self> {
        let mut cfg: RunConfig = serde_json::from_str(text)?;
        if let Some(raw) = seed_override {
            cfg.seed = raw.trim().parse().map_err(|_| {
                Error::InvalidInput(format!(
                    "{SEED_ENV} must be an unsigned integer, got `{raw}`"
                ))
            })?;
        }
        cfg.params()?;
        if cfg.replications == 0 {
            return Err(Error::invalid("replications", 0.0, "must be at least 1"));
        }
        Ok(cfg)
    }

    /// Reads `path`, honouring [`SEED_ENV`].
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let env = std::env::var(SEED_ENV).ok();
        Self::from_json(&text, env.as_deref())
    }

    pub fn params(&self) -> Result<EpidemicParams> {
        EpidemicParams::new(self.n, self.k, self.r0, self.latent, self.infectious)
    }
}
