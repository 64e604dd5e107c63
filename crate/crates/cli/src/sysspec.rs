//! Resolving a forecasting system from command-line flags: either an inline
//! preset with its parameters or a JSON spec file.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context};
use clap::Args;
use imprand_core::{ForecastingSystem, IntervalForecast};

use crate::manifest::RunManifest;

#[derive(Debug, Args)]
pub struct SystemArgs {
    /// Inline preset: stationary | vacuous | alternating-pq | near-half.
    #[arg(long, value_name = "PRESET")]
    pub system: Option<String>,

    /// JSON spec file describing the forecasting system.
    #[arg(long, value_name = "FILE", conflicts_with = "system")]
    pub system_file: Option<PathBuf>,

    /// Lower bound for the stationary preset.
    #[arg(long)]
    pub lower: Option<f64>,

    /// Upper bound for the stationary preset.
    #[arg(long)]
    pub upper: Option<f64>,

    /// Odd-situation forecast for the alternating-pq preset.
    #[arg(long)]
    pub p: Option<f64>,

    /// Even-situation forecast for the alternating-pq preset.
    #[arg(long)]
    pub q: Option<f64>,
}

impl SystemArgs {
    pub fn resolve(&self, manifest: RunManifest) -> anyhow::Result<(ForecastingSystem, RunManifest)> {
        if let Some(path) = &self.system_file {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading system spec {}", path.display()))?;
            let system: ForecastingSystem =
                serde_json::from_str(&text).context("parsing system spec")?;
            let manifest = manifest
                .param("system-file", path.display().to_string())
                .input(path, text.as_bytes());
            return Ok((system, manifest));
        }
        let preset = self
            .system
            .as_deref()
            .ok_or_else(|| anyhow!("either --system or --system-file is required"))?;
        let manifest = manifest.param("system", preset);
        match preset {
            "vacuous" => Ok((ForecastingSystem::vacuous(), manifest)),
            "near-half" => Ok((ForecastingSystem::near_half(), manifest)),
            "stationary" => {
                let (lower, upper) = match (self.lower, self.upper) {
                    (Some(l), Some(u)) => (l, u),
                    _ => bail!("the stationary preset needs --lower and --upper"),
                };
                let interval = IntervalForecast::new(lower, upper)?;
                Ok((
                    ForecastingSystem::stationary(interval),
                    manifest.param("lower", lower).param("upper", upper),
                ))
            }
            "alternating-pq" => {
                let (p, q) = match (self.p, self.q) {
                    (Some(p), Some(q)) => (p, q),
                    _ => bail!("the alternating-pq preset needs --p and --q"),
                };
                Ok((
                    ForecastingSystem::alternating_pq(p, q)?,
                    manifest.param("p", p).param("q", q),
                ))
            }
            other => bail!(
                "unknown system preset '{other}' (expected stationary|vacuous|alternating-pq|near-half)"
            ),
        }
    }
}
