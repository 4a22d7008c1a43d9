//! Parameter sweeps over drops and the named figure experiments.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::drop_seed;
use crate::scheduler::DofPolicy;
use crate::sim::aggregate::{aggregate, AggregateResult};
use crate::sim::config::{CovarianceMode, Scheme, SimulationConfig};
use crate::sim::drop::{DropContext, DropMetrics};
use crate::subspace::CovarianceEstimate;

/// Where the base stations get the Wi-Fi covariance from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceSource {
    Exact,
    /// Sample covariance of this many snapshots.
    Estimated(usize),
}

impl CovarianceSource {
    pub fn from_config(config: &SimulationConfig) -> Self {
        match config.covariance.mode {
            CovarianceMode::Exact => CovarianceSource::Exact,
            CovarianceMode::Estimated => CovarianceSource::Estimated(config.covariance.samples),
        }
    }
}

impl fmt::Display for CovarianceSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CovarianceSource::Exact => write!(f, "exact"),
            CovarianceSource::Estimated(m) => write!(f, "estimated_{m}"),
        }
    }
}

/// Cartesian grid of sweep values. Points are enumerated with antennas
/// outermost, then clusters, covariance sources, schemes and null counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub antennas: Vec<usize>,
    pub clusters: Vec<usize>,
    pub covariance: Vec<CovarianceSource>,
    pub schemes: Vec<Scheme>,
    /// Fixed null counts; `None` applies the configured rule.
    pub nulls: Vec<Option<usize>>,
}

/// One point of a [`Sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub n: usize,
    pub clusters: usize,
    pub covariance: CovarianceSource,
    pub scheme: Scheme,
    pub nulls: Option<usize>,
}

impl Sweep {
    /// The configuration's own single point.
    pub fn single(config: &SimulationConfig, n: usize) -> Self {
        Self {
            antennas: vec![n],
            clusters: vec![config.layout.wifi_clusters_per_sector],
            covariance: vec![CovarianceSource::from_config(config)],
            schemes: vec![config.scheme],
            nulls: vec![config.scheduler.d_i],
        }
    }

    pub fn points(&self) -> Vec<SweepPoint> {
        let mut out = Vec::new();
        for &n in &self.antennas {
            for &clusters in &self.clusters {
                for &covariance in &self.covariance {
                    for &scheme in &self.schemes {
                        for &nulls in &self.nulls {
                            out.push(SweepPoint { n, clusters, covariance, scheme, nulls });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub point: SweepPoint,
    pub aggregate: AggregateResult,
}

/// Evaluates every sweep point on one drop. Geometry and fading are shared
/// by all points with the same antenna and cluster counts.
pub fn run_drop_sweep(config: &SimulationConfig, seed: u64, sweep: &Sweep) -> Result<Vec<DropMetrics>> {
    let mut out = Vec::with_capacity(sweep.points().len());
    let estimated: Vec<usize> = {
        let mut m: Vec<usize> = sweep
            .covariance
            .iter()
            .filter_map(|c| match c {
                CovarianceSource::Estimated(m) => Some(*m),
                CovarianceSource::Exact => None,
            })
            .collect();
        m.sort_unstable();
        m.dedup();
        m
    };
    let needs_covariance = sweep.schemes.contains(&Scheme::MmimoU);
    for &n in &sweep.antennas {
        for &clusters in &sweep.clusters {
            let mut cfg = config.clone();
            cfg.layout.wifi_clusters_per_sector = clusters;
            let ctx = DropContext::prepare(&cfg, seed, n)?;
            let mut exact: Option<Vec<CovarianceEstimate>> = None;
            let mut sampled: Vec<Vec<CovarianceEstimate>> = Vec::new();
            if needs_covariance {
                if sweep.covariance.contains(&CovarianceSource::Exact) {
                    exact = Some(ctx.exact_covariances());
                }
                if !estimated.is_empty() {
                    sampled = ctx.estimated_covariances(&estimated).map_err(|e| e.in_drop(seed))?;
                }
            }
            let mut conventional: Option<DropMetrics> = None;
            for source in &sweep.covariance {
                let covs: &[CovarianceEstimate] = match source {
                    _ if !needs_covariance => &[],
                    CovarianceSource::Exact => exact.as_deref().unwrap_or(&[]),
                    CovarianceSource::Estimated(m) => {
                        let idx = estimated.binary_search(m).expect("checkpoint listed");
                        &sampled[idx]
                    }
                };
                for &scheme in &sweep.schemes {
                    for &nulls in &sweep.nulls {
                        let metrics = if scheme == Scheme::Conventional {
                            // nothing depends on the covariance or on nulls
                            match &conventional {
                                Some(m) => m.clone(),
                                None => {
                                    let m = ctx.evaluate(&[], scheme, DofPolicy::Fixed { d: 0 })?;
                                    conventional = Some(m.clone());
                                    m
                                }
                            }
                        } else {
                            let policy = nulls.map_or(config.dof_policy(), |d| DofPolicy::Fixed { d });
                            ctx.evaluate(covs, scheme, policy)?
                        };
                        out.push(metrics);
                    }
                }
            }
        }
    }
    Ok(out)
}

fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::config("threads", e.to_string()))
}

/// Per-drop metrics of every sweep point, `[point][drop]`, drops in index
/// order whatever order the workers finish in.
pub fn run_sweep_drops(config: &SimulationConfig, sweep: &Sweep) -> Result<Vec<Vec<DropMetrics>>> {
    if config.drops == 0 {
        return Err(Error::EmptyDrops);
    }
    for &n in &sweep.antennas {
        config.check_dof("array.antennas", n)?;
    }
    let pool = thread_pool(config.threads)?;
    let per_drop: Vec<Vec<DropMetrics>> = pool.install(|| {
        (0..config.drops as u64)
            .into_par_iter()
            .map(|d| run_drop_sweep(config, drop_seed(config.seed, d), sweep))
            .collect::<Result<Vec<_>>>()
    })?;
    let points = sweep.points().len();
    let mut by_point: Vec<Vec<DropMetrics>> = (0..points).map(|_| Vec::with_capacity(config.drops)).collect();
    for drop in per_drop {
        for (p, m) in drop.into_iter().enumerate() {
            by_point[p].push(m);
        }
    }
    Ok(by_point)
}

/// Runs `config.drops` drops and aggregates every sweep point.
pub fn run_experiment(config: &SimulationConfig, sweep: &Sweep) -> Result<Vec<SweepResult>> {
    let by_point = run_sweep_drops(config, sweep)?;
    sweep
        .points()
        .into_iter()
        .zip(by_point)
        .map(|(point, drops)| Ok(SweepResult { point, aggregate: aggregate(&drops)? }))
        .collect()
}

/// Named experiments reproducing the coexistence study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    /// Interference at Wi-Fi devices, CDF per antenna count.
    Fig4WifiCdf,
    /// Power detected by the base stations' energy detectors, CDF.
    Fig5BsCdf,
    /// Cellular and Wi-Fi rates against the antenna count.
    Fig6RatesVsN,
    /// Rates and worst-case interference against the snapshot count.
    Fig7Covariance,
    /// Cellular rate against the null count for 1, 2 and 4 hotspots.
    Fig8RatesVsD,
    /// Interference against the null count for 1, 2 and 4 hotspots.
    Fig9InterferenceVsD,
    /// The configuration as given.
    Custom,
}

pub const EXPERIMENTS: [Experiment; 7] = [
    Experiment::Fig4WifiCdf,
    Experiment::Fig5BsCdf,
    Experiment::Fig6RatesVsN,
    Experiment::Fig7Covariance,
    Experiment::Fig8RatesVsD,
    Experiment::Fig9InterferenceVsD,
    Experiment::Custom,
];

/// Snapshot counts of the covariance sweep.
pub const SNAPSHOT_GRID: [usize; 7] = [8, 16, 32, 64, 128, 256, 512];

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Fig4WifiCdf => "fig4_wifi_cdf",
            Experiment::Fig5BsCdf => "fig5_bs_cdf",
            Experiment::Fig6RatesVsN => "fig6_rates_vs_n",
            Experiment::Fig7Covariance => "fig7_covariance",
            Experiment::Fig8RatesVsD => "fig8_rates_vs_d",
            Experiment::Fig9InterferenceVsD => "fig9_interference_vs_d",
            Experiment::Custom => "custom",
        }
    }

    /// Default sweep; `antennas` replaces the default antenna list.
    pub fn sweep(self, config: &SimulationConfig, antennas: Option<&[usize]>) -> Result<Sweep> {
        let both = vec![Scheme::MmimoU, Scheme::Conventional];
        let clusters = vec![config.layout.wifi_clusters_per_sector];
        let cov = vec![CovarianceSource::from_config(config)];
        let single = config.array.antennas.unwrap_or(64);
        let pick = |default: &[usize]| antennas.map_or_else(|| default.to_vec(), <[usize]>::to_vec);
        let null_grid = |n: usize| -> Vec<Option<usize>> {
            let spare = n.saturating_sub(config.scheduler.k_i);
            (0..=spare).step_by(4).map(Some).collect()
        };
        let sweep = match self {
            Experiment::Fig4WifiCdf | Experiment::Fig5BsCdf => Sweep {
                antennas: pick(&[16, 32, 64]),
                clusters,
                covariance: cov,
                schemes: both,
                nulls: vec![config.scheduler.d_i],
            },
            Experiment::Fig6RatesVsN => Sweep {
                antennas: pick(&[16, 48, 112]),
                clusters,
                covariance: cov,
                schemes: both,
                nulls: vec![config.scheduler.d_i],
            },
            Experiment::Fig7Covariance => {
                let mut covariance: Vec<CovarianceSource> =
                    SNAPSHOT_GRID.iter().map(|&m| CovarianceSource::Estimated(m)).collect();
                covariance.push(CovarianceSource::Exact);
                Sweep {
                    antennas: pick(&[single]),
                    clusters,
                    covariance,
                    schemes: vec![Scheme::MmimoU],
                    nulls: vec![config.scheduler.d_i],
                }
            }
            Experiment::Fig8RatesVsD | Experiment::Fig9InterferenceVsD => {
                let antennas = pick(&[single]);
                let nulls = null_grid(antennas.iter().copied().min().unwrap_or(single));
                Sweep {
                    antennas,
                    clusters: vec![1, 2, 4],
                    covariance: cov,
                    schemes: vec![Scheme::MmimoU],
                    nulls,
                }
            }
            Experiment::Custom => {
                let n = match antennas {
                    Some([n]) => *n,
                    Some(_) => return Err(Error::config("array.antennas", "custom runs take a single antenna count")),
                    None => config
                        .array
                        .antennas
                        .ok_or_else(|| Error::config("array.antennas", "custom runs need an antenna count"))?,
                };
                Sweep::single(config, n)
            }
        };
        Ok(sweep)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EXPERIMENTS
            .iter()
            .copied()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::UnknownExperiment(s.to_string()))
    }
}
