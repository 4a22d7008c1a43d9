//! One complete drop under both schemes: listening, access decisions,
//! rates and the interference seen by the Wi-Fi population.

use mmimo_u::rng::drop_seed;
use mmimo_u::sim::{run_drop, Scheme, SimulationConfig};
use mmimo_u::units::mw_to_dbm;

fn main() -> mmimo_u::Result<()> {
    let mut config = SimulationConfig::default();
    config.array.antennas = Some(32);
    let seed = drop_seed(config.seed, 0);
    for scheme in [Scheme::MmimoU, Scheme::Conventional] {
        config.scheme = scheme;
        let m = run_drop(&config, seed)?;
        let passed = m.bss.iter().filter(|b| b.lbt.passed).count();
        let mut wifi: Vec<f64> = m.wifi_forced_mw.iter().map(|&x| mw_to_dbm(x)).collect();
        wifi.sort_by(f64::total_cmp);
        println!("{}:", scheme.name());
        println!("  base stations clear to send: {passed}/{}", m.bss.len());
        println!("  mean cell rate: {:.1} Mbit/s", m.mean_cell_rate_bps() / 1e6);
        println!(
            "  Wi-Fi interference with all cells on: median {:.1} dBm, worst {:.1} dBm",
            wifi[wifi.len() / 2],
            wifi[wifi.len() - 1]
        );
        let sector: f64 = m.sector_wifi_rate_mbps.iter().sum::<f64>() / m.sector_wifi_rate_mbps.len() as f64;
        println!("  Wi-Fi throughput per sector: {sector:.1} Mbit/s");
    }
    Ok(())
}
