use std::path::{Path, PathBuf};

use clap::Args;
use kdv_tau::kdv::{GbgwLayout, WkLayout};
use serde::{Deserialize, Serialize};

use crate::Failure;

/// Everything a run depends on. Read from an optional JSON file, then
/// overridden field by field by flags.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub genus: u32,
    pub times: u32,
    pub t_order: u32,
    pub x_order: u32,
    /// Defaults to `3G - 1` when absent.
    pub wk_times: Option<u32>,
    pub wk_order: Option<u32>,
    pub cache_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let g = GbgwLayout::default();
        RunConfig {
            genus: g.genus,
            times: g.times,
            t_order: g.t_order,
            x_order: g.x_order,
            wk_times: None,
            wk_order: None,
            cache_dir: None,
        }
    }
}

#[derive(Args, Clone, Debug, Default)]
pub struct ConfigArgs {
    /// JSON file with any subset of the run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Highest genus G (at least 1).
    #[arg(long)]
    pub genus: Option<u32>,
    /// Number A of times beyond T1: uses T1, T3, ..., T_{2A+1}.
    #[arg(long)]
    pub times: Option<u32>,
    /// Cap on the total degree in the times.
    #[arg(long)]
    pub t_order: Option<u32>,
    /// Cap on the degree in X = x + 2.
    #[arg(long)]
    pub x_order: Option<u32>,
    /// Witten–Kontsevich times t1..tM (at least 3G - 1).
    #[arg(long)]
    pub wk_times: Option<u32>,
    /// Witten–Kontsevich degree cap.
    #[arg(long)]
    pub wk_order: Option<u32>,
    /// Directory for cached jet polynomials.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<RunConfig, Failure> {
        let mut cfg = match &self.config {
            Some(path) => read_config(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.genus {
            cfg.genus = v;
        }
        if let Some(v) = self.times {
            cfg.times = v;
        }
        if let Some(v) = self.t_order {
            cfg.t_order = v;
        }
        if let Some(v) = self.x_order {
            cfg.x_order = v;
        }
        if self.wk_times.is_some() {
            cfg.wk_times = self.wk_times;
        }
        if self.wk_order.is_some() {
            cfg.wk_order = self.wk_order;
        }
        if self.cache_dir.is_some() {
            cfg.cache_dir = self.cache_dir.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn read_config(path: &Path) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("bad config {}: {e}", path.display())))
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), Failure> {
        if self.genus < 1 {
            return Err(Failure::Usage("genus must be at least 1".into()));
        }
        self.gbgw().validate().map_err(|e| Failure::Usage(e.to_string()))?;
        self.wk().validate().map_err(|e| Failure::Usage(e.to_string()))
    }

    pub fn gbgw(&self) -> GbgwLayout {
        GbgwLayout {
            genus: self.genus,
            times: self.times,
            t_order: self.t_order,
            x_order: self.x_order,
        }
    }

    pub fn wk(&self) -> WkLayout {
        let base = WkLayout::for_genus(self.genus);
        WkLayout {
            genus: self.genus,
            times: self.wk_times.unwrap_or(base.times),
            order: self.wk_order.unwrap_or(base.order),
        }
    }
}
