//! Builds the seven-site hexagonal layout, drops users and Wi-Fi hotspots,
//! and shows how wrap-around shortens distances across the network edge.

use mmimo_u::rng::{stream_rng, Stream};
use mmimo_u::sim::SimulationConfig;
use mmimo_u::topology::{drop_ues, drop_wifi, wrap_distance, WiFiKind};

fn main() -> mmimo_u::Result<()> {
    let config = SimulationConfig::default();
    let layout = config.layout_for(64)?;
    println!(
        "{} sites, {} sectors, ISD {} m, cell radius {:.1} m",
        layout.sites.len(),
        layout.num_bss(),
        layout.isd,
        layout.cell_radius()
    );
    for bs in layout.bss.iter().take(3) {
        println!(
            "  sector {} at ({:.0}, {:.0}) m, boresight {:.0} deg, {} antennas",
            bs.id, bs.position.x, bs.position.y, bs.sector_azimuth, bs.antennas
        );
    }

    let seed = 42;
    let geometry = config.geometry();
    let ues = drop_ues(&layout, config.layout.ues_per_sector, geometry, &mut stream_rng(seed, Stream::Users))?;
    let wifi = drop_wifi(
        &layout,
        config.layout.wifi_clusters_per_sector,
        config.layout.wifi_cluster_radius_m,
        config.wifi_profile(),
        geometry,
        &mut stream_rng(seed, Stream::WiFi),
    )?;
    let aps = wifi.iter().filter(|d| d.kind == WiFiKind::Ap).count();
    println!(
        "dropped {} users (mean {} per sector) and {} Wi-Fi devices ({} access points)",
        ues.len(),
        config.layout.ues_per_sector,
        wifi.len(),
        aps
    );

    // two sites on opposite edges of the network
    let a = layout.sites[1];
    let b = layout.sites[4];
    println!(
        "site 1 to site 4: direct {:.0} m, wrapped {:.0} m",
        (a - b).norm(),
        wrap_distance(&layout, a, b)
    );
    Ok(())
}
