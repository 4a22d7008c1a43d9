//! Figure-level statistics over drops.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::drop::DropMetrics;
use crate::units::mw_to_dbm;

/// Value at percentile `p` (0 to 100) of ascending `sorted`, interpolating
/// linearly between order statistics.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of an empty sample");
    let pos = (p / 100.0).clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        return sorted[lo];
    }
    let t = pos - lo as f64;
    sorted[lo] + t * (sorted[hi] - sorted[lo])
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// Statistics of one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateResult {
    pub drops: usize,
    /// Mean over drops and base stations of the summed UE rates, bit/s.
    pub mean_cell_rate_bps: f64,
    pub mean_wifi_sector_rate_mbps: f64,
    pub lbt_pass_fraction: f64,
    pub precoding_failures: usize,
    /// Ascending samples, dBm.
    pub wifi_forced_dbm: Vec<f64>,
    pub wifi_gated_dbm: Vec<f64>,
    pub bs_interference_dbm: Vec<f64>,
    /// Mean null count over base stations and drops.
    pub mean_nulls: f64,
    /// Per drop, in drop order.
    pub drop_cell_rate_bps: Vec<f64>,
    pub drop_wifi_p95_dbm: Vec<f64>,
    pub drop_wifi_median_dbm: Vec<f64>,
}

impl AggregateResult {
    pub fn wifi_forced_percentile(&self, p: f64) -> f64 {
        percentile(&self.wifi_forced_dbm, p)
    }

    /// Fraction of forced-transmission interference samples below `dbm`.
    pub fn wifi_forced_fraction_below(&self, dbm: f64) -> f64 {
        fraction_below(&self.wifi_forced_dbm, dbm)
    }
}

pub fn fraction_below(samples: &[f64], x: f64) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().filter(|&&s| s < x).count() as f64 / samples.len() as f64
}

/// Folds drops in the given order.
pub fn aggregate(drops: &[DropMetrics]) -> Result<AggregateResult> {
    if drops.is_empty() {
        return Err(Error::EmptyDrops);
    }
    let mut cell_rates = Vec::new();
    let mut sector_rates = Vec::new();
    let mut passes = 0usize;
    let mut bs_count = 0usize;
    let mut failures = 0;
    let mut nulls = 0usize;
    let mut forced = Vec::new();
    let mut gated = Vec::new();
    let mut bs_int = Vec::new();
    let mut drop_rate = Vec::with_capacity(drops.len());
    let mut drop_p95 = Vec::with_capacity(drops.len());
    let mut drop_median = Vec::with_capacity(drops.len());
    for d in drops {
        let rates = d.cell_rates_bps();
        drop_rate.push(rates.iter().sum::<f64>() / rates.len().max(1) as f64);
        cell_rates.extend(rates);
        sector_rates.extend(d.sector_wifi_rate_mbps.iter().copied());
        for b in &d.bss {
            bs_count += 1;
            passes += b.lbt.passed as usize;
            failures += b.precoding_failed as usize;
            nulls += b.d_i;
            bs_int.push(mw_to_dbm(b.lbt.measured_mw));
        }
        let f: Vec<f64> = d.wifi_forced_mw.iter().map(|&x| mw_to_dbm(x)).collect();
        if f.is_empty() {
            drop_p95.push(f64::NAN);
            drop_median.push(f64::NAN);
        } else {
            let fs = sorted(f.clone());
            drop_p95.push(percentile(&fs, 95.0));
            drop_median.push(percentile(&fs, 50.0));
        }
        forced.extend(f);
        gated.extend(d.wifi_gated_mw.iter().map(|&x| mw_to_dbm(x)));
    }
    let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
    Ok(AggregateResult {
        drops: drops.len(),
        mean_cell_rate_bps: mean(&cell_rates),
        mean_wifi_sector_rate_mbps: mean(&sector_rates),
        lbt_pass_fraction: passes as f64 / bs_count.max(1) as f64,
        precoding_failures: failures,
        wifi_forced_dbm: sorted(forced),
        wifi_gated_dbm: sorted(gated),
        bs_interference_dbm: sorted(bs_int),
        mean_nulls: nulls as f64 / bs_count.max(1) as f64,
        drop_cell_rate_bps: drop_rate,
        drop_wifi_p95_dbm: drop_p95,
        drop_wifi_median_dbm: drop_median,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phy::LbtOutcome;
    use crate::rng::seeded;
    use crate::sim::config::Scheme;
    use crate::sim::drop::{BsRecord, UeRecord};
    use rand::Rng;

    fn one_bs_drop(rates: &[f64]) -> DropMetrics {
        DropMetrics {
            seed: 0,
            n_antennas: 16,
            scheme: Scheme::MmimoU,
            bss: vec![BsRecord {
                bs: 0,
                d_i: 4,
                served: rates.len(),
                shortfall: 0,
                lbt: LbtOutcome { passed: true, measured_mw: 1e-9, threshold_dbm: -62.0 },
                transmitted: true,
                precoding_failed: false,
            }],
            ues: rates
                .iter()
                .enumerate()
                .map(|(k, &r)| UeRecord { ue: k, bs: 0, sinr: 1.0, rate_bps: r })
                .collect(),
            wifi_forced_mw: vec![1e-8, 1e-9],
            wifi_gated_mw: vec![1e-8, 1e-9],
            sector_wifi_rate_mbps: vec![130.0],
        }
    }

    #[test]
    fn cell_rate_of_single_drop() {
        let a = aggregate(&[one_bs_drop(&[10e6, 20e6])]).unwrap();
        assert_eq!(a.mean_cell_rate_bps, 30e6);
        assert_eq!(a.lbt_pass_fraction, 1.0);
        assert_eq!(a.mean_wifi_sector_rate_mbps, 130.0);
        assert!(matches!(aggregate(&[]), Err(Error::EmptyDrops)));
    }

    #[test]
    fn percentiles_match_sort_and_index() {
        let mut rng = seeded(1);
        for _ in 0..100 {
            let n = rng.random_range(1..50);
            let v = sorted((0..n).map(|_| rng.random::<f64>()).collect());
            assert_eq!(percentile(&v, 0.0), v[0]);
            assert_eq!(percentile(&v, 100.0), v[n - 1]);
            for p in [5.0, 50.0, 95.0] {
                let pos = p / 100.0 * (n - 1) as f64;
                let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
                let expected = v[lo] + (pos - lo as f64) * (v[hi] - v[lo]);
                assert!((percentile(&v, p) - expected).abs() < 1e-15);
                assert!(percentile(&v, p) >= v[lo] && percentile(&v, p) <= v[hi]);
            }
        }
        assert_eq!(percentile(&[1.0, 2.0, 3.0, 4.0], 50.0), 2.5);
    }
}
