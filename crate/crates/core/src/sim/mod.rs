//! Monte Carlo drops, figure experiments and their aggregation.

pub mod activity;
pub mod aggregate;
pub mod config;
pub mod drop;
pub mod experiment;

pub use activity::{sample_wifi_activity, wifi_sector_rate};
pub use aggregate::{aggregate, percentile, AggregateResult};
pub use config::{CovarianceMode, Scheme, SimulationConfig};
pub use drop::{run_drop, DropContext, DropMetrics};
pub use experiment::{run_experiment, CovarianceSource, Experiment, Sweep, SweepPoint, SweepResult};
