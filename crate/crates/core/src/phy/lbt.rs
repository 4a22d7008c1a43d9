//! Energy detection, plain and restricted to the complement of the Wi-Fi
//! subspace.
//!
//! The detector compares the power averaged over the listening symbols with
//! the threshold; timing (DIFS, backoff) is not modelled.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelSet;
use crate::linalg::{norm_sq, CMatrix};
use crate::subspace::IdleSnapshot;
use crate::units::dbm_to_mw;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LbtOutcome {
    pub passed: bool,
    /// Detected power, mW.
    pub measured_mw: f64,
    pub threshold_dbm: f64,
}

/// Clear-channel decision: passed when strictly below the threshold.
pub fn lbt_decision(measured_mw: f64, threshold_dbm: f64) -> LbtOutcome {
    LbtOutcome {
        passed: measured_mw < dbm_to_mw(threshold_dbm),
        measured_mw,
        threshold_dbm,
    }
}

/// Energy detection on the raw array signal, summed over antennas and
/// averaged over snapshots.
pub fn conventional_lbt(snapshots: &[IdleSnapshot], threshold_dbm: f64) -> LbtOutcome {
    let total: f64 = snapshots.iter().map(|s| norm_sq(&s.z)).sum();
    lbt_decision(mean(total, snapshots.len()), threshold_dbm)
}

/// Energy detection after projecting every snapshot with `pi_perp`.
pub fn enhanced_lbt(pi_perp: &CMatrix, snapshots: &[IdleSnapshot], threshold_dbm: f64) -> LbtOutcome {
    let total: f64 = snapshots.iter().map(|s| norm_sq(&(pi_perp * &s.z))).sum();
    lbt_decision(mean(total, snapshots.len()), threshold_dbm)
}

fn mean(total: f64, count: usize) -> f64 {
    if count == 0 {
        0.0
    } else {
        total / count as f64
    }
}

/// Expected detected power over symbols and noise for a fixed set of
/// emitting devices: `sum_l P_l |pi_perp g_il|^2 + noise tr(pi_perp)`.
pub fn expected_filtered_power(
    pi_perp: &CMatrix,
    channels: &ChannelSet,
    bs: usize,
    emitters: &[(usize, f64)],
    noise_mw: f64,
) -> f64 {
    let trace: Complex64 = pi_perp.trace();
    let mut total = noise_mw * trace.re;
    for &(l, p) in emitters {
        total += p * norm_sq(&(pi_perp * channels.g(bs, l)));
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{complex_gaussian_vector, CVector};
    use crate::rng::seeded;
    use crate::subspace::{dominant_subspace, exact_covariance, sample_idle_signal, CovarianceEstimate};

    fn channels(n: usize, gains: &[f64], seed: u64) -> ChannelSet {
        let mut rng = seeded(seed);
        let g = gains
            .iter()
            .map(|&a| complex_gaussian_vector(n, &mut rng) * Complex64::new(a.sqrt(), 0.0))
            .collect();
        ChannelSet::from_parts(vec![], vec![n], gains.len(), vec![], g, vec![]).unwrap()
    }

    #[test]
    fn thresholds() {
        assert!(lbt_decision(1e-12, -62.0).passed);
        assert!(!lbt_decision(dbm_to_mw(-62.0), -62.0).passed);
        assert!(lbt_decision(1e9, f64::INFINITY).passed);
        let noise: Vec<IdleSnapshot> = (0..10)
            .map(|m| IdleSnapshot { z: CVector::from_element(4, Complex64::new(1e-6, 0.0)), symbol_index: m })
            .collect();
        assert!(conventional_lbt(&noise, -62.0).passed);
    }

    #[test]
    fn nearby_access_point_blocks() {
        // 24 dBm AP, -70 dB per-antenna gain, 64 antennas: about -28 dBm
        let ch = channels(64, &[1e-7], 1);
        let mut rng = seeded(2);
        let snaps: Vec<IdleSnapshot> = (0..50)
            .map(|m| sample_idle_signal(&ch, 0, &[0], &[dbm_to_mw(24.0)], dbm_to_mw(-96.0), m, &mut rng))
            .collect();
        let o = conventional_lbt(&snaps, -62.0);
        assert!(!o.passed);
        assert!(o.measured_mw > dbm_to_mw(-40.0));
    }

    #[test]
    fn zero_nulls_is_bitwise_conventional() {
        let ch = channels(8, &[1e-9, 1e-8], 3);
        let mut rng = seeded(4);
        let snaps: Vec<IdleSnapshot> = (0..20)
            .map(|m| sample_idle_signal(&ch, 0, &[0, 1], &[250.0, 63.0], 1e-10, m, &mut rng))
            .collect();
        let est = CovarianceEstimate::from_matrix(exact_covariance(&ch, 0, &[250.0, 63.0], &[1.0, 1.0], 1e-10), None);
        let p = dominant_subspace(&est, 0).unwrap();
        let a = conventional_lbt(&snaps, -62.0);
        let b = enhanced_lbt(&p.pi_perp, &snaps, -62.0);
        assert_eq!(a.measured_mw.to_bits(), b.measured_mw.to_bits());
        assert_eq!(a.passed, b.passed);
    }

    #[test]
    fn full_nulling_silences_detector() {
        let ch = channels(16, &[1e-6, 1e-6], 5);
        let power = [250.0, 63.0];
        let est = CovarianceEstimate::from_matrix(exact_covariance(&ch, 0, &power, &[1.0, 1.0], 0.0), None);
        let p = dominant_subspace(&est, 2).unwrap();
        let measured = expected_filtered_power(&p.pi_perp, &ch, 0, &[(0, power[0]), (1, power[1])], 0.0);
        assert!(measured < 1e-10 * 250.0 * 16e-6);
        assert!(lbt_decision(measured, -62.0).passed);
    }

    #[test]
    fn expectation_matches_snapshot_average() {
        let ch = channels(8, &[1e-6, 1e-7], 6);
        let power = [250.0, 63.0];
        let est = CovarianceEstimate::from_matrix(exact_covariance(&ch, 0, &power, &[1.0, 1.0], 1e-9), None);
        let p = dominant_subspace(&est, 1).unwrap();
        let mut rng = seeded(7);
        let snaps: Vec<IdleSnapshot> = (0..40_000)
            .map(|m| sample_idle_signal(&ch, 0, &[0, 1], &power, 1e-9, m, &mut rng))
            .collect();
        let mc = enhanced_lbt(&p.pi_perp, &snaps, -62.0).measured_mw;
        let ex = expected_filtered_power(&p.pi_perp, &ch, 0, &[(0, power[0]), (1, power[1])], 1e-9);
        assert!((mc / ex - 1.0).abs() < 0.03, "{mc} vs {ex}");
    }
}
