//! Slow-fading budget of base station and Wi-Fi links: path loss, antenna
//! gain, line-of-sight state and the resulting SNR at the user noise floor.

use mmimo_u::rng::seeded;
use mmimo_u::sim::SimulationConfig;
use mmimo_u::topology::Position;
use mmimo_u::units::{dbm_to_mw, mw_to_dbm};

fn main() -> mmimo_u::Result<()> {
    let config = SimulationConfig::default();
    let model = config.channel_model();
    let layout = config.layout_for(64)?;
    let bs = &layout.bss[0];
    let noise_dbm = mw_to_dbm(config.ue_noise_mw());
    let mut rng = seeded(3);

    println!("UE noise {noise_dbm:.2} dBm, base station noise {:.2} dBm", mw_to_dbm(config.bs_noise_mw()));
    println!("{:>8} {:>6} {:>10} {:>10} {:>10} {:>10}", "dist_m", "los", "pl_db", "shadow_db", "ant_db", "snr_db");
    for d in [40.0, 80.0, 150.0, 250.0] {
        let dir = bs.sector_azimuth.to_radians();
        let target = bs.position + Position::new(dir.cos(), dir.sin()) * d;
        let link = model.bs_link(&layout, bs, target, config.layout.ue_height_m, &mut rng);
        let rx = config.power.bs_dbm + 10.0 * link.gain.log10();
        println!(
            "{:>8.0} {:>6} {:>10.2} {:>10.2} {:>10.2} {:>10.2}",
            d,
            link.los,
            link.path_loss_db,
            link.shadowing_db,
            link.antenna_gain_db,
            rx - noise_dbm
        );
    }

    println!("\nWi-Fi access point to a nearby device:");
    for d in [5.0, 20.0, 60.0] {
        let link = model.device_link(&layout, Position::new(0.0, 0.0), Position::new(d, 0.0), &mut rng);
        let rx_mw = dbm_to_mw(config.power.ap_dbm) * link.gain;
        println!("  {d:>4} m: path loss {:.1} dB, received {:.1} dBm", link.path_loss_db, mw_to_dbm(rx_mw));
    }
    Ok(())
}
