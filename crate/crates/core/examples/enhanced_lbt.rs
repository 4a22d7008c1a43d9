//! Plain energy detection against detection restricted to the complement
//! of the Wi-Fi subspace, for every base station of one drop.

use mmimo_u::phy::{conventional_lbt, enhanced_lbt};
use mmimo_u::rng::{drop_seed, seeded};
use mmimo_u::sim::activity::sample_wifi_activity;
use mmimo_u::sim::{DropContext, Scheme, SimulationConfig};
use mmimo_u::subspace::{sample_idle_signal, IdleSnapshot};
use mmimo_u::units::mw_to_dbm;

fn main() -> mmimo_u::Result<()> {
    let config = SimulationConfig::default();
    let n = 16;
    let gamma = config.phy.lbt_threshold_dbm;
    let ctx = DropContext::prepare(&config, drop_seed(config.seed, 0), n)?;
    let covs = ctx.exact_covariances();
    let projectors = ctx.projectors(&covs, Scheme::MmimoU, config.dof_policy())?;
    let mut rng = seeded(9);

    println!("N = {n}, threshold {gamma} dBm, 200 listening symbols per base station");
    println!("{:>3} {:>3} {:>14} {:>14}", "bs", "D", "plain_dBm", "projected_dBm");
    let (mut plain_pass, mut proj_pass) = (0, 0);
    for (b, (d, p)) in projectors.iter().enumerate() {
        let snaps: Vec<IdleSnapshot> = (0..200)
            .map(|i| {
                let active = sample_wifi_activity(&ctx.clusters, &mut rng);
                sample_idle_signal(&ctx.channels, b, &active, &ctx.wifi_power_mw, config.bs_noise_mw(), i, &mut rng)
            })
            .collect();
        let plain = conventional_lbt(&snaps, gamma);
        let projected = enhanced_lbt(&p.pi_perp, &snaps, gamma);
        plain_pass += plain.passed as usize;
        proj_pass += projected.passed as usize;
        println!(
            "{b:>3} {d:>3} {:>14.2} {:>14.2}",
            mw_to_dbm(plain.measured_mw),
            mw_to_dbm(projected.measured_mw)
        );
    }
    let nb = projectors.len();
    println!("clear channel: plain {plain_pass}/{nb}, projected {proj_pass}/{nb}");
    Ok(())
}
