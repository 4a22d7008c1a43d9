//! Uplink pilots, projected channel estimates and zero-forcing for one
//! cell, then the SINR terms of its users with every cell transmitting.

use mmimo_u::phy::{
    estimate_ue_channels, received_pilot_block, ue_sinr, wifi_interference, zf_precoder, BsTransmission,
};
use mmimo_u::rng::drop_seed;
use mmimo_u::sim::{DropContext, Scheme, SimulationConfig};
use mmimo_u::units::{dbm_to_mw, linear_to_db, mw_to_dbm};

fn main() -> mmimo_u::Result<()> {
    let config = SimulationConfig::default();
    let n = 64;
    let ctx = DropContext::prepare(&config, drop_seed(config.seed, 1), n)?;
    let covs = ctx.exact_covariances();
    let projectors = ctx.projectors(&covs, Scheme::MmimoU, config.dof_policy())?;
    let p_b = dbm_to_mw(config.power.bs_dbm);

    let mut tx = Vec::new();
    for (b, slots) in ctx.cell_slots.iter().enumerate() {
        let y = received_pilot_block(&ctx.channels, b, &ctx.uplink, &ctx.pilot_book, &ctx.wifi_pilot, &ctx.pilot_noise[b]);
        let pilots: Vec<usize> = slots.iter().map(|&s| ctx.uplink[s].pilot).collect();
        let scale: Vec<f64> = slots.iter().map(|&s| ctx.csi_scale[s]).collect();
        let ids: Vec<usize> = slots.iter().map(|&s| ctx.channels.ues[s]).collect();
        let csi = estimate_ue_channels(&y, &ctx.pilot_book, &projectors[b].1.pi_perp, &pilots, &scale, &ids)?;
        let pre = zf_precoder(&csi.normalized, config.phy.condition_bound)?;
        tx.push(BsTransmission { bs: b, slots: slots.clone(), w: pre.w, power_mw: p_b });
    }

    let wifi: Vec<(usize, f64)> = ctx.interval_active.iter().map(|&l| (l, ctx.wifi_power_mw[l])).collect();
    println!("cell 0, N = {n}, {} nulls, {} users", projectors[0].0, ctx.cell_slots[0].len());
    println!("{:>4} {:>10} {:>10} {:>10} {:>10} {:>8}", "ue", "sig_dBm", "intra_dBm", "inter_dBm", "wifi_dBm", "sinr_dB");
    for col in 0..tx[0].slots.len() {
        let t = ue_sinr(0, col, &tx, &ctx.channels, &wifi, config.ue_noise_mw());
        println!(
            "{:>4} {:>10.1} {:>10.1} {:>10.1} {:>10.1} {:>8.1}",
            ctx.channels.ues[tx[0].slots[col]],
            mw_to_dbm(t.signal),
            mw_to_dbm(t.intra_cell),
            mw_to_dbm(t.inter_cell),
            mw_to_dbm(t.wifi),
            linear_to_db(t.sinr())
        );
    }
    let worst = (0..ctx.wifi.len())
        .map(|l| wifi_interference(l, &tx, &ctx.channels))
        .fold(0.0, f64::max);
    println!("strongest interference at any Wi-Fi device: {:.1} dBm", mw_to_dbm(worst));
    Ok(())
}
