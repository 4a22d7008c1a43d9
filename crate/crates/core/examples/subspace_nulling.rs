//! Listens to the Wi-Fi population of one drop, estimates the covariance at
//! a base station and shows how much Wi-Fi power survives projection as
//! the number of suppressed directions grows.

use mmimo_u::rng::drop_seed;
use mmimo_u::sim::{DropContext, SimulationConfig};
use mmimo_u::subspace::dominant_subspace;
use mmimo_u::units::mw_to_dbm;

fn main() -> mmimo_u::Result<()> {
    let config = SimulationConfig::default();
    let n = 32;
    let ctx = DropContext::prepare(&config, drop_seed(config.seed, 0), n)?;
    let bs = 0;
    let exact = &ctx.exact_covariances()[bs];
    let estimated = &ctx.estimated_covariances(&[64, 512])?;
    let noise = config.bs_noise_mw();

    println!("base station {bs}, N = {n}, noise {:.1} dBm per antenna", mw_to_dbm(noise));
    println!("leading eigenvalues over the noise level (dB):");
    let show = |v: &[f64]| v.iter().take(8).map(|l| format!("{:6.1}", 10.0 * (l / noise).log10())).collect::<Vec<_>>().join(" ");
    println!("  exact     {}", show(&exact.eigvals));
    println!("  M_c = 64  {}", show(&estimated[0][bs].eigvals));
    println!("  M_c = 512 {}", show(&estimated[1][bs].eigvals));

    // Wi-Fi power left after projection, exact covariance minus noise
    println!("\n{:>4} {:>18}", "D", "residual_wifi_dBm");
    for d in [0, 2, 4, 8, 12, 16, 24] {
        let p = dominant_subspace(exact, d)?;
        let residual = (&p.pi_perp * &exact.z_hat).trace().re - noise * (n - d) as f64;
        println!("{d:>4} {:>18.2}", mw_to_dbm(residual.max(1e-30)));
    }
    Ok(())
}
