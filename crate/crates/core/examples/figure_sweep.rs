//! Runs a named experiment at reduced size and prints the headline
//! statistics of each sweep point. Pass the experiment name and the drop
//! count, e.g. `cargo run --release --example figure_sweep fig6_rates_vs_n 10`.

use mmimo_u::sim::{run_experiment, Experiment, SimulationConfig};

fn main() -> mmimo_u::Result<()> {
    let mut args = std::env::args().skip(1);
    let experiment: Experiment = args.next().as_deref().unwrap_or("fig6_rates_vs_n").parse()?;
    let mut config = SimulationConfig::default();
    config.drops = args.next().and_then(|s| s.parse().ok()).unwrap_or(5);
    config.array.antennas = Some(64);
    let sweep = experiment.sweep(&config, None)?;
    println!("{experiment}: {} points, {} drops each", sweep.points().len(), config.drops);
    println!(
        "{:>13} {:>4} {:>3} {:>13} {:>5} {:>10} {:>9} {:>7} {:>10}",
        "scheme", "N", "cl", "covariance", "D", "cell_Mbps", "wifi_Mbps", "lbt_%", "wifi_p95"
    );
    for r in run_experiment(&config, &sweep)? {
        let a = &r.aggregate;
        println!(
            "{:>13} {:>4} {:>3} {:>13} {:>5} {:>10.1} {:>9.1} {:>7.1} {:>10.2}",
            r.point.scheme.name(),
            r.point.n,
            r.point.clusters,
            r.point.covariance.to_string(),
            r.point.nulls.map_or("auto".to_string(), |d| d.to_string()),
            a.mean_cell_rate_bps / 1e6,
            a.mean_wifi_sector_rate_mbps,
            100.0 * a.lbt_pass_fraction,
            a.wifi_forced_percentile(95.0)
        );
    }
    Ok(())
}
