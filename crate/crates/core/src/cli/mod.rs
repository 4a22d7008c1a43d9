//! Batch command line: `run` an experiment into CSV files plus a manifest,
//! or `validate` the fast invariant suite.
//!
//! The binary is a thin wrapper around [`main`]; everything here is callable
//! from tests.

pub mod config;
pub mod output;
pub mod validate;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::Result;
use crate::sim::{run_experiment, Experiment, Scheme, SimulationConfig};

pub use config::{env_overrides, parse_config, ENV_PREFIX};
pub use output::{write_cdf, write_summary, RunManifest, CDF_HEADER, SUMMARY_HEADER};
pub use validate::{cmd_validate, Check, ValidationReport};

#[derive(Debug, Parser)]
#[command(name = "mmimo-u", version, about = "Massive MIMO in unlicensed spectrum: coexistence simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a named experiment and write CSV files and a JSON manifest.
    Run {
        /// fig4_wifi_cdf, fig5_bs_cdf, fig6_rates_vs_n, fig7_covariance,
        /// fig8_rates_vs_d, fig9_interference_vs_d or custom.
        experiment: Experiment,
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated antenna counts replacing the experiment's default.
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
    },
    /// Check projector algebra, nulling and the d.o.f. budget on a tiny instance.
    Validate {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Print the resolved configuration as TOML.
    Config {
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// `key=value` override, repeatable; applied after the file and the
    /// environment.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Master seed; every drop derives its own streams from it
    #[arg(long)]
    pub seed: Option<u64>,
    /// Independent drops per sweep point
    #[arg(long)]
    pub drops: Option<usize>,
    /// Worker threads, 0 for one per core.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// 19 sites instead of 7.
    #[arg(long)]
    pub full_scale: bool,
}

impl CommonArgs {
    /// Layers defaults, file, environment, `--set` and the dedicated flags.
    pub fn resolve(&self, env: &[String]) -> Result<SimulationConfig> {
        let mut overrides: Vec<String> = env.to_vec();
        if self.full_scale {
            overrides.push("layout.sites=19".into());
        }
        overrides.extend(self.set.iter().cloned());
        if let Some(s) = self.seed {
            overrides.push(format!("seed={s}"));
        }
        if let Some(d) = self.drops {
            overrides.push(format!("drops={d}"));
        }
        if let Some(t) = self.threads {
            overrides.push(format!("threads={t}"));
        }
        if let Some(o) = &self.out {
            let text = toml::Value::String(o.to_string_lossy().into_owned()).to_string();
            overrides.push(format!("output_dir={text}"));
        }
        parse_config(self.config.as_deref(), &overrides)
    }
}

fn cdf_path(dir: &Path, experiment: Experiment, scheme: Scheme, n: usize) -> PathBuf {
    dir.join(format!("{}_{}_n{n}.csv", experiment.name(), scheme.name()))
}

/// Runs `experiment` and writes its files under `config.output_dir`.
/// `antennas` replaces the experiment's default antenna list.
pub fn cmd_run(experiment: Experiment, config: &SimulationConfig, antennas: Option<&[usize]>) -> Result<RunManifest> {
    let sweep = experiment.sweep(config, antennas)?;
    for &n in &sweep.antennas {
        config.check_dof("array.antennas", n)?;
    }
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir)?;
    let manifest_path = RunManifest::path(dir, experiment);
    let mut manifest = RunManifest::start(experiment, config, &sweep.antennas);
    manifest.write(&manifest_path)?;
    log::info!(
        "{experiment}: {} sweep points x {} drops, seed {}",
        sweep.points().len(),
        config.drops,
        config.seed
    );

    let outcome = run_experiment(config, &sweep).and_then(|results| {
        let mut outputs = Vec::new();
        for r in &results {
            let samples = match experiment {
                Experiment::Fig4WifiCdf | Experiment::Custom => &r.aggregate.wifi_forced_dbm,
                Experiment::Fig5BsCdf => &r.aggregate.bs_interference_dbm,
                _ => continue,
            };
            let path = cdf_path(dir, experiment, r.point.scheme, r.point.n);
            write_cdf(&path, samples)?;
            outputs.push(path);
        }
        let summary = dir.join(format!("{}_summary.csv", experiment.name()));
        write_summary(&summary, &results, config.phy.lbt_threshold_dbm)?;
        outputs.push(summary);
        Ok(outputs)
    });
    match outcome {
        Ok(outputs) => {
            manifest.outputs = outputs;
            manifest.finish(true);
            manifest.write(&manifest_path)?;
            Ok(manifest)
        }
        Err(e) => {
            manifest.finish(false);
            manifest.write(&manifest_path)?;
            Err(e)
        }
    }
}

/// Executes parsed arguments. `env` holds the environment overrides as
/// `key=value` strings. Returns the process exit code.
pub fn execute(cli: Cli, env: &[String]) -> i32 {
    let result = match cli.command {
        Command::Run { experiment, common, n } => common.resolve(env).and_then(|config| {
            let manifest = cmd_run(experiment, &config, n.as_deref())?;
            for p in &manifest.outputs {
                println!("{}", p.display());
            }
            Ok(0)
        }),
        Command::Validate { common } => common.resolve(env).and_then(|config| {
            let report = cmd_validate(&config)?;
            print!("{}", report.table());
            if report.passed() {
                Ok(0)
            } else {
                eprintln!("failed invariants: {}", report.failures().join(", "));
                Ok(1)
            }
        }),
        Command::Config { common } => common.resolve(env).map(|config| {
            print!("{}", config.to_toml());
            0
        }),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        1
    })
}

/// Entry point of the binary.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    execute(cli, &env_overrides(std::env::vars()))
}
