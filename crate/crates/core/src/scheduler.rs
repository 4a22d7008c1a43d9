//! Split of the array dimensions between users and nulls, and user selection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How many suppression dimensions a base station reserves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DofPolicy {
    /// `round(fraction * (N - K))`.
    Fraction { fraction: f64 },
    /// A fixed count.
    Fixed { d: usize },
    /// Every eigenvalue of the covariance more than `margin` above the noise
    /// floor gets a null, i.e. the numerical rank of the Wi-Fi subspace.
    NoiseRank { margin: f64 },
}

impl Default for DofPolicy {
    fn default() -> Self {
        DofPolicy::Fraction { fraction: 0.5 }
    }
}

/// Users multiplexed and nulls reserved at one base station.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DofAllocation {
    pub k_i: usize,
    pub d_i: usize,
}

impl DofAllocation {
    /// `d_i <= min(N - k_i, m_c)`; `m_c = None` stands for an exact covariance.
    pub fn is_admissible(&self, n: usize, m_c: Option<usize>) -> bool {
        self.k_i <= n && self.d_i <= (n - self.k_i).min(m_c.unwrap_or(usize::MAX))
    }
}

/// Allocates `(K, D)` for an `n`-element array. `noise_rank` is consulted
/// only by [`DofPolicy::NoiseRank`]. The suppression count is clamped to the
/// spare dimensions and to the number of covariance samples.
pub fn allocate_dof(
    n: usize,
    k_target: usize,
    m_c: Option<usize>,
    policy: DofPolicy,
    noise_rank: Option<usize>,
) -> Result<DofAllocation> {
    if k_target > n {
        return Err(Error::TooManyUsers { k: k_target, n });
    }
    let spare = n - k_target;
    let wanted = match policy {
        DofPolicy::Fraction { fraction } => (fraction * spare as f64).round() as usize,
        DofPolicy::Fixed { d } => d,
        DofPolicy::NoiseRank { .. } => noise_rank.unwrap_or(0),
    };
    let d_i = wanted.min(spare).min(m_c.unwrap_or(usize::MAX));
    Ok(DofAllocation { k_i: k_target, d_i })
}

/// Number of eigenvalues above `margin` times the noise level.
pub fn noise_rank(eigvals: &[f64], noise_mw: f64, margin: f64) -> usize {
    eigvals.iter().filter(|&&l| l > margin * noise_mw).count()
}

/// Ratio of the serving base station's average received power to the power
/// from every other base station and every Wi-Fi access point. Powers and
/// gains are linear. Returns infinity when nothing interferes.
pub fn ue_metric(p_b: f64, serving_gain: f64, other_gains: &[f64], ap_received: &[f64]) -> f64 {
    let denom = p_b * other_gains.iter().sum::<f64>() + ap_received.iter().sum::<f64>();
    if denom == 0.0 {
        f64::INFINITY
    } else {
        p_b * serving_gain / denom
    }
}

/// Outcome of the selection at one base station.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    /// Candidate UE ids in input order.
    pub candidates: Vec<usize>,
    pub metrics: Vec<f64>,
    /// 1-based rank by descending metric.
    pub ranks: Vec<usize>,
    pub selected: Vec<bool>,
    /// Selected UE ids, best first.
    pub chosen: Vec<usize>,
    /// How many slots stayed empty for lack of candidates.
    pub shortfall: usize,
}

/// Selects the `k` candidates with the largest metric, lower UE id first on
/// ties.
pub fn select_ues(candidates: &[usize], k: usize, metrics: &[f64]) -> SelectionReport {
    assert_eq!(candidates.len(), metrics.len(), "one metric per candidate");
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| {
        metrics[b]
            .total_cmp(&metrics[a])
            .then(candidates[a].cmp(&candidates[b]))
    });
    let mut ranks = vec![0; candidates.len()];
    let mut selected = vec![false; candidates.len()];
    for (r, &i) in order.iter().enumerate() {
        ranks[i] = r + 1;
        selected[i] = r < k;
    }
    let chosen = order.iter().take(k).map(|&i| candidates[i]).collect();
    SelectionReport {
        candidates: candidates.to_vec(),
        metrics: metrics.to_vec(),
        ranks,
        selected,
        chosen,
        shortfall: k.saturating_sub(candidates.len()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand::Rng;

    #[test]
    fn default_rule() {
        let a = allocate_dof(64, 8, None, DofPolicy::default(), None).unwrap();
        assert_eq!(a, DofAllocation { k_i: 8, d_i: 28 });
        let b = allocate_dof(16, 8, Some(4), DofPolicy::default(), None).unwrap();
        assert_eq!(b.d_i, 4);
        assert_eq!(allocate_dof(8, 8, None, DofPolicy::default(), None).unwrap().d_i, 0);
        assert!(matches!(allocate_dof(4, 8, None, DofPolicy::default(), None), Err(Error::TooManyUsers { .. })));
    }

    #[test]
    fn fixed_and_rank_policies_are_clamped() {
        let a = allocate_dof(64, 8, None, DofPolicy::Fixed { d: 999 }, None).unwrap();
        assert_eq!(a.d_i, 56);
        let b = allocate_dof(32, 8, Some(512), DofPolicy::NoiseRank { margin: 2.0 }, Some(11)).unwrap();
        assert_eq!(b.d_i, 11);
        assert!(a.is_admissible(64, None) && b.is_admissible(32, Some(512)));
        assert!(!DofAllocation { k_i: 8, d_i: 57 }.is_admissible(64, None));
        assert_eq!(noise_rank(&[10.0, 3.0, 1.1, 1.0], 1.0, 2.0), 2);
    }

    #[test]
    fn metric_hand_value() {
        // -80 dB serving, -100 dB other BS, AP contributing P_b * 1e-10
        let p_b = 1000.0;
        let mu = ue_metric(p_b, 1e-8, &[1e-10], &[p_b * 1e-10]);
        assert!((mu - 50.0).abs() < 1e-9);
        assert_eq!(ue_metric(p_b, 1e-8, &[], &[]), f64::INFINITY);
        let scaled = ue_metric(p_b, 3e-8, &[3e-10], &[3.0 * p_b * 1e-10]);
        assert!((scaled - mu).abs() < 1e-9);
    }

    #[test]
    fn selection_basics() {
        let ids: Vec<usize> = (0..10).collect();
        let metrics: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let r = select_ues(&ids, 8, &metrics);
        assert_eq!(r.chosen, vec![9, 8, 7, 6, 5, 4, 3, 2]);
        assert_eq!(r.ranks[9], 1);
        assert_eq!(r.selected.iter().filter(|&&s| s).count(), 8);
        let eq = select_ues(&ids, 8, &[1.0; 10]);
        assert_eq!(eq.chosen, (0..8).collect::<Vec<_>>());
        let short = select_ues(&ids[..3], 8, &metrics[..3]);
        assert_eq!(short.chosen.len(), 3);
        assert_eq!(short.shortfall, 5);
        let inf = select_ues(&[4, 2], 1, &[5.0, f64::INFINITY]);
        assert_eq!(inf.chosen, vec![2]);
    }

    #[test]
    fn selection_matches_full_sort() {
        let mut rng = seeded(3);
        for _ in 0..200 {
            let n = rng.random_range(0..30);
            let ids: Vec<usize> = (0..n).map(|i| i * 3 + 1).collect();
            let metrics: Vec<f64> = (0..n).map(|_| (rng.random_range(0..6) as f64) * 0.5).collect();
            let k = rng.random_range(0..12);
            let mut pairs: Vec<(f64, usize)> = metrics.iter().cloned().zip(ids.iter().cloned()).collect();
            pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
            let expected: Vec<usize> = pairs.iter().take(k).map(|p| p.1).collect();
            assert_eq!(select_ues(&ids, k, &metrics).chosen, expected);
        }
    }
}
