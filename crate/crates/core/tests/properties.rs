//! Property tests over randomly generated instances.

mod common;

use mmimo_u::linalg::{complex_gaussian_vector, norm_sq, CMatrix};
use mmimo_u::phy::{enhanced_lbt, zf_precoder};
use mmimo_u::rng::seeded;
use mmimo_u::scheduler::{allocate_dof, select_ues, DofPolicy};
use mmimo_u::sim::{percentile, wifi_sector_rate, SimulationConfig};
use mmimo_u::subspace::{dominant_subspace, CovarianceEstimate, IdleSnapshot};
use mmimo_u::topology::{build_layout, wrap_distance, Position};
use proptest::prelude::*;

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projectors_are_complementary_idempotent(seed in any::<u64>(), n in 1usize..24, frac in 0.0f64..=1.0) {
        let mut rng = seeded(seed);
        let cov = CovarianceEstimate::from_matrix(common::random_covariance(n, 1 + n / 3, &mut rng), None);
        let d = (frac * n as f64).round() as usize;
        let p = dominant_subspace(&cov, d).unwrap();
        prop_assert!(max_abs(&(&p.pi * &p.pi - &p.pi)) < 1e-10);
        prop_assert!(max_abs(&(&p.pi_perp * &p.pi_perp - &p.pi_perp)) < 1e-10);
        prop_assert!(max_abs(&(&p.pi + &p.pi_perp - CMatrix::identity(n, n))) < 1e-10);
        prop_assert!(max_abs(&(&p.pi * &p.pi_perp)) < 1e-10);
        prop_assert!((p.pi_perp.trace().re - (n - d) as f64).abs() < 1e-9);
    }

    #[test]
    fn filtered_energy_splits(seed in any::<u64>(), n in 1usize..24, d in 0usize..24) {
        let mut rng = seeded(seed);
        let d = d.min(n);
        let cov = CovarianceEstimate::from_matrix(common::random_covariance(n, 2, &mut rng), None);
        let p = dominant_subspace(&cov, d).unwrap();
        let z = complex_gaussian_vector(n, &mut rng);
        let total = norm_sq(&z);
        let split = norm_sq(&(&p.pi * &z)) + norm_sq(&(&p.pi_perp * &z));
        prop_assert!((split - total).abs() <= 1e-10 * total);
    }

    #[test]
    fn detected_power_falls_with_more_nulls(seed in any::<u64>(), n in 2usize..20) {
        let mut rng = seeded(seed);
        let cov = CovarianceEstimate::from_matrix(common::random_covariance(n, 3, &mut rng), None);
        let snaps: Vec<IdleSnapshot> = (0..16)
            .map(|i| IdleSnapshot { z: complex_gaussian_vector(n, &mut rng), symbol_index: i })
            .collect();
        let mut last = f64::INFINITY;
        for d in 0..=n {
            let p = dominant_subspace(&cov, d).unwrap();
            let m = enhanced_lbt(&p.pi_perp, &snaps, -62.0).measured_mw;
            prop_assert!(m <= last * (1.0 + 1e-12) + 1e-15);
            last = m;
        }
    }

    #[test]
    fn zero_forcing_nulls_other_users(seed in any::<u64>(), n in 2usize..48, k in 1usize..12) {
        let k = k.min(n);
        let mut rng = seeded(seed);
        let h = mmimo_u::linalg::complex_gaussian_matrix(n, k, &mut rng);
        let w = zf_precoder(&h, 1e12).unwrap().w;
        prop_assert!((w.norm_squared() - 1.0).abs() < 1e-10);
        let g = h.adjoint() * &w;
        for r in 0..k {
            for c in 0..k {
                if r != c {
                    prop_assert!(g[(r, c)].norm_sqr() <= 1e-9 * g[(c, c)].norm_sqr());
                }
            }
        }
    }

    #[test]
    fn precoder_stays_in_complement(seed in any::<u64>(), n in 4usize..32) {
        let mut rng = seeded(seed);
        let cov = CovarianceEstimate::from_matrix(common::random_covariance(n, 2, &mut rng), None);
        let d = n / 4;
        let p = dominant_subspace(&cov, d).unwrap();
        let k = (n - d).min(4);
        let mut h = CMatrix::zeros(n, k);
        for c in 0..k {
            h.set_column(c, &(&p.pi_perp * complex_gaussian_vector(n, &mut rng)));
        }
        let w = zf_precoder(&h, 1e12).unwrap().w;
        for c in w.column_iter() {
            prop_assert!((&p.pi * c).norm() <= 1e-10 * c.norm());
        }
    }

    #[test]
    fn single_device_is_nulled(seed in any::<u64>(), n in 2usize..48) {
        let r = common::rank_one_nulling_residual(1, seed);
        prop_assert!(r < 1e-10, "n={n} residual {r}");
    }

    #[test]
    fn dof_split_is_admissible(n in 1usize..256, k in 0usize..64, m in proptest::option::of(1usize..600), f in 0.0f64..=1.0, d in 0usize..600) {
        prop_assume!(k <= n);
        for policy in [DofPolicy::Fraction { fraction: f }, DofPolicy::Fixed { d }] {
            let a = allocate_dof(n, k, m, policy, None).unwrap();
            prop_assert!(a.is_admissible(n, m));
            prop_assert_eq!(a.k_i + a.d_i <= n, true);
        }
    }

    #[test]
    fn selection_takes_the_best(metrics in proptest::collection::vec(0.0f64..1e6, 0..40), k in 0usize..16) {
        let ids: Vec<usize> = (0..metrics.len()).map(|i| i * 3).collect();
        let r = select_ues(&ids, k, &metrics);
        prop_assert_eq!(r.chosen.len(), k.min(ids.len()));
        prop_assert_eq!(r.shortfall, k.saturating_sub(ids.len()));
        let worst_chosen = r.chosen.iter().map(|u| metrics[u / 3]).fold(f64::INFINITY, f64::min);
        for (i, &m) in metrics.iter().enumerate() {
            if !r.chosen.contains(&ids[i]) {
                prop_assert!(m <= worst_chosen);
            }
        }
    }

    #[test]
    fn percentile_matches_sort_oracle(mut v in proptest::collection::vec(-200.0f64..50.0, 1..200), p in 0.0f64..=100.0) {
        v.sort_by(f64::total_cmp);
        let got = percentile(&v, p);
        // oracle: rank p/100 * (n - 1) between neighbouring order statistics
        let rank = p / 100.0 * (v.len() - 1) as f64;
        let lo = v[rank.floor() as usize];
        let hi = v[rank.ceil() as usize];
        prop_assert!(got >= lo - 1e-12 && got <= hi + 1e-12);
        prop_assert!((got - (lo + (rank - rank.floor()) * (hi - lo))).abs() < 1e-9);
        if p == 0.0 { prop_assert_eq!(got, v[0]); }
        if p == 100.0 { prop_assert_eq!(got, v[v.len() - 1]); }
    }

    #[test]
    fn sector_rate_counts_clear_clusters(levels in proptest::collection::vec(-120.0f64..-30.0, 0..6)) {
        let mw: Vec<f64> = levels.iter().map(|d| 10f64.powf(d / 10.0)).collect();
        let rate = wifi_sector_rate(&mw, -62.0, 65.0);
        let clear = levels.iter().filter(|&&d| d < -62.0).count();
        prop_assert!((rate - 65.0 * clear as f64).abs() < 1e-9);
    }

    #[test]
    fn wrapped_distance_never_exceeds_direct(x in -1500.0f64..1500.0, y in -1500.0f64..1500.0, a in -1500.0f64..1500.0, b in -1500.0f64..1500.0) {
        let layout = build_layout(7, 500.0, 3).unwrap();
        let p = Position::new(x, y);
        let q = Position::new(a, b);
        let w = wrap_distance(&layout, p, q);
        prop_assert!(w <= (p - q).norm() + 1e-9);
        prop_assert!((w - wrap_distance(&layout, q, p)).abs() < 1e-9);
    }

    #[test]
    fn config_round_trips(k in 1usize..8, drops in 1usize..500, seed in 0..=i64::MAX as u64, sigma in 0.0f64..12.0, d in proptest::option::of(0usize..8)) {
        let mut c = SimulationConfig::default();
        c.scheduler.k_i = k;
        c.drops = drops;
        c.seed = seed;
        c.channel.shadow_sigma_d2d_db = sigma;
        c.scheduler.d_i = d;
        let back = SimulationConfig::from_toml(&c.to_toml()).unwrap();
        prop_assert_eq!(back, c);
    }
}

#[test]
fn covariance_error_decays_as_inverse_root() {
    let slope = common::covariance_error_slope(11);
    assert!((slope + 0.5).abs() <= 0.1, "slope {slope}");
}

#[test]
fn csi_normalization_is_exact() {
    assert!(common::csi_normalization_error(100, 5) <= 1e-10);
}

#[test]
fn projected_detector_without_nulls_is_bitwise_plain() {
    assert_eq!(common::elbt_without_nulls_mismatches(100, 9), 0);
}
