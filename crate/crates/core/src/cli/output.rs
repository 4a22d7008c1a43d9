//! CSV tables and the JSON run manifest.
//!
//! CDF files hold one row per sample with the header
//! `sample_index,interference_dbm,cdf_fraction`. Summary files are long
//! tables with one statistic per row and an explicit `unit` column.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::sim::aggregate::fraction_below;
use crate::sim::{percentile, Experiment, SimulationConfig, SweepResult};

pub const CDF_HEADER: [&str; 3] = ["sample_index", "interference_dbm", "cdf_fraction"];

pub const SUMMARY_HEADER: [&str; 9] = [
    "scheme",
    "n_antennas",
    "clusters_per_sector",
    "covariance",
    "nulls",
    "metric",
    "statistic",
    "value",
    "unit",
];

/// Record of one invocation, written before the run and rewritten when it
/// finishes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub experiment: String,
    pub seed: u64,
    pub antennas: Vec<usize>,
    pub config: SimulationConfig,
    pub started_unix_s: f64,
    pub finished_unix_s: Option<f64>,
    pub wall_time_s: Option<f64>,
    /// `running`, `complete` or `failed`.
    pub status: String,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn start(experiment: Experiment, config: &SimulationConfig, antennas: &[usize]) -> Self {
        Self {
            version: concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")).to_string(),
            experiment: experiment.name().to_string(),
            seed: config.seed,
            antennas: antennas.to_vec(),
            config: config.clone(),
            started_unix_s: unix_now(),
            finished_unix_s: None,
            wall_time_s: None,
            status: "running".to_string(),
            outputs: Vec::new(),
        }
    }

    pub fn finish(&mut self, ok: bool) {
        let now = unix_now();
        self.finished_unix_s = Some(now);
        self.wall_time_s = Some(now - self.started_unix_s);
        self.status = if ok { "complete" } else { "failed" }.to_string();
    }

    pub fn path(out_dir: &Path, experiment: Experiment) -> PathBuf {
        out_dir.join(format!("{}_manifest.json", experiment.name()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

/// Writes the empirical CDF of `sorted` (ascending dBm samples).
pub fn write_cdf(path: &Path, sorted: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CDF_HEADER)?;
    let n = sorted.len();
    for (i, &x) in sorted.iter().enumerate() {
        w.write_record([i.to_string(), x.to_string(), ((i + 1) as f64 / n as f64).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// One summary row without the sweep-point columns.
struct Stat {
    metric: &'static str,
    statistic: &'static str,
    value: f64,
    unit: &'static str,
}

fn stats(r: &SweepResult, threshold_dbm: f64) -> Vec<Stat> {
    let a = &r.aggregate;
    let stat = |metric, statistic, value, unit| Stat { metric, statistic, value, unit };
    let pct = |v: &[f64], p: f64| if v.is_empty() { f64::NAN } else { percentile(v, p) };
    vec![
        stat("cell_rate", "mean", a.mean_cell_rate_bps / 1e6, "Mbps"),
        stat("wifi_sector_rate", "mean", a.mean_wifi_sector_rate_mbps, "Mbps"),
        stat("lbt_pass", "fraction", a.lbt_pass_fraction, "ratio"),
        stat("wifi_interference", "p5", pct(&a.wifi_forced_dbm, 5.0), "dBm"),
        stat("wifi_interference", "median", pct(&a.wifi_forced_dbm, 50.0), "dBm"),
        stat("wifi_interference", "p95", pct(&a.wifi_forced_dbm, 95.0), "dBm"),
        stat("wifi_interference", "fraction_below_threshold", fraction_below(&a.wifi_forced_dbm, threshold_dbm), "ratio"),
        stat("wifi_interference_gated", "median", pct(&a.wifi_gated_dbm, 50.0), "dBm"),
        stat("wifi_interference_gated", "p95", pct(&a.wifi_gated_dbm, 95.0), "dBm"),
        stat("bs_detected_power", "median", pct(&a.bs_interference_dbm, 50.0), "dBm"),
        stat("bs_detected_power", "p95", pct(&a.bs_interference_dbm, 95.0), "dBm"),
        stat("nulls", "mean", a.mean_nulls, "count"),
        stat("precoding_failures", "total", a.precoding_failures as f64, "count"),
        stat("drops", "total", a.drops as f64, "count"),
    ]
}

/// Writes every statistic of every sweep point.
pub fn write_summary(path: &Path, results: &[SweepResult], threshold_dbm: f64) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(SUMMARY_HEADER)?;
    for r in results {
        let p = &r.point;
        let nulls = p.nulls.map_or_else(|| "auto".to_string(), |d| d.to_string());
        for s in stats(r, threshold_dbm) {
            w.write_record([
                p.scheme.name().to_string(),
                p.n.to_string(),
                p.clusters.to_string(),
                p.covariance.to_string(),
                nulls.clone(),
                s.metric.to_string(),
                s.statistic.to_string(),
                s.value.to_string(),
                s.unit.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
