//! Wi-Fi traffic: one device per hotspot transmits at a time.

use rand::Rng;

use crate::topology::WiFiDevice;

/// Device ids of every cluster, clusters in id order.
pub fn clusters_of(wifi: &[WiFiDevice]) -> Vec<Vec<usize>> {
    let count = wifi.iter().map(|d| d.cluster + 1).max().unwrap_or(0);
    let mut clusters = vec![Vec::new(); count];
    for d in wifi {
        clusters[d.cluster].push(d.id);
    }
    clusters
}

/// Picks one device uniformly in every non-empty cluster.
pub fn sample_wifi_activity<R: Rng + ?Sized>(clusters: &[Vec<usize>], rng: &mut R) -> Vec<usize> {
    clusters
        .iter()
        .filter(|c| !c.is_empty())
        .map(|c| c[rng.random_range(0..c.len())])
        .collect()
}

/// Probability that each device is the active one of its cluster.
pub fn activity_probabilities(wifi: &[WiFiDevice]) -> Vec<f64> {
    let clusters = clusters_of(wifi);
    wifi.iter().map(|d| 1.0 / clusters[d.cluster].len() as f64).collect()
}

/// Hotspot throughput in a sector: every cluster whose worst device sees
/// less than `threshold_dbm` contributes `per_cluster_mbps`.
pub fn wifi_sector_rate(cluster_max_interference_mw: &[f64], threshold_dbm: f64, per_cluster_mbps: f64) -> f64 {
    let gate = crate::units::dbm_to_mw(threshold_dbm);
    cluster_max_interference_mw.iter().filter(|&&i| i < gate).count() as f64 * per_cluster_mbps
}
