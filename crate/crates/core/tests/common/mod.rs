//! Independent oracles shared by the integration tests. Everything here is
//! written with plain loops over `Vec<Complex64>` so that it does not share
//! code paths with the library's matrix routines.

#![allow(dead_code)]

use std::f64::consts::PI;

use mmimo_u::channel::ChannelSet;
use mmimo_u::linalg::{complex_gaussian, complex_gaussian_matrix, complex_gaussian_vector, CMatrix, CVector};
use mmimo_u::phy::{
    conventional_lbt, enhanced_lbt, estimate_ue_channels, received_pilot_block, ue_sinr, wifi_interference,
    zf_precoder, BsTransmission, PilotBook, PilotTransmission, WiFiPilotInterference,
};
use mmimo_u::rng::{seeded, SimRng};
use mmimo_u::subspace::{dominant_subspace, CovarianceAccumulator, CovarianceEstimate, IdleSnapshot, ProjectorPair};
use num_complex::Complex64;
use rand::Rng;

pub type C = Complex64;

pub fn to_vec(v: &CVector) -> Vec<C> {
    v.iter().copied().collect()
}

pub fn rows(m: &CMatrix) -> Vec<Vec<C>> {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect()).collect()
}

/// `a^H b`.
pub fn dotc(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[C]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn matvec(m: &[Vec<C>], v: &[C]) -> Vec<C> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub fn rel_vec(a: &[C], b: &[C]) -> f64 {
    let diff: Vec<C> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&diff) / norm(b)
}

/// Errors of the library against the oracle on the two-cell instance.
#[derive(Debug, Clone, Copy)]
pub struct TinyErrors {
    pub sinr: f64,
    pub sinr_terms: f64,
    pub wifi_interference: f64,
    pub csi: f64,
}

impl TinyErrors {
    pub fn max(&self) -> f64 {
        self.sinr.max(self.sinr_terms).max(self.wifi_interference).max(self.csi)
    }
}

/// Two base stations with `N = 4`, one UE each, one Wi-Fi device. Both UEs
/// share pilot 0 of a length-2 codebook so the estimates are contaminated,
/// the device is on air during the pilots and base station 0 nulls one
/// random direction.
pub fn tiny_instance(seed: u64) -> TinyErrors {
    let n = 4;
    let mut rng = seeded(seed);
    // spread the link strengths over several decades
    let link = |scale: f64, rng: &mut SimRng| complex_gaussian_vector(n, rng) * C::new(scale, 0.0);
    let gain: [[f64; 2]; 2] = [[1e-7, 3e-10], [2e-10, 5e-8]]; // [bs][ue]
    let h = vec![
        link(gain[0][0].sqrt(), &mut rng),
        link(gain[0][1].sqrt(), &mut rng),
        link(gain[1][0].sqrt(), &mut rng),
        link(gain[1][1].sqrt(), &mut rng),
    ];
    let g = vec![link(4e-9f64.sqrt(), &mut rng), link(1e-9f64.sqrt(), &mut rng)];
    let q = vec![complex_gaussian(&mut rng) * 1e-5, complex_gaussian(&mut rng) * 3e-5];
    let ch = ChannelSet::from_parts(vec![0, 1], vec![n, n], 1, h.clone(), g.clone(), q.clone()).unwrap();

    let p_ue = [0.2, 0.05];
    let p_wifi = 63.0;
    let p_bs = 10.0;
    let noise_bs: f64 = 1e-12;
    let noise_ue = 6.3e-13;
    let m_p = 2;
    let book = PilotBook::dft(m_p);
    let uplink = [
        PilotTransmission { slot: 0, pilot: 0, power_mw: p_ue[0] },
        PilotTransmission { slot: 1, pilot: 0, power_mw: p_ue[1] },
    ];
    let s = complex_gaussian_vector(m_p, &mut rng);
    let wifi = [WiFiPilotInterference { device: 0, power_mw: p_wifi, symbols: s.clone() }];
    let noise: Vec<CMatrix> = (0..2)
        .map(|_| complex_gaussian_matrix(n, m_p, &mut rng) * C::new(noise_bs.sqrt(), 0.0))
        .collect();
    let basis = {
        let v = complex_gaussian_vector(n, &mut rng);
        let v = &v * C::new(1.0 / v.norm(), 0.0);
        CMatrix::from_column_slice(n, 1, v.as_slice())
    };
    let proj = [ProjectorPair::from_basis(basis), ProjectorPair::identity(n)];
    let scale = [(p_ue[0] * gain[0][0]).sqrt(), (p_ue[1] * gain[1][1]).sqrt()];

    // library chain
    let mut lib_csi = Vec::new();
    let mut tx = Vec::new();
    for b in 0..2 {
        let y = received_pilot_block(&ch, b, &uplink, &book, &wifi, &noise[b]);
        let est = estimate_ue_channels(&y, &book, &proj[b].pi_perp, &[0], &[scale[b]], &[b]).unwrap();
        lib_csi.push(to_vec(&est.normalized.column(0).into_owned()));
        let w = zf_precoder(&est.normalized, 1e12).unwrap().w;
        tx.push(BsTransmission { bs: b, slots: vec![b], w, power_mw: p_bs });
    }
    let lib_terms: Vec<_> = (0..2).map(|k| ue_sinr(k, 0, &tx, &ch, &[(0, p_wifi)], noise_ue)).collect();
    let lib_wifi = wifi_interference(0, &tx, &ch);

    // oracle chain
    let hv: Vec<Vec<C>> = h.iter().map(to_vec).collect();
    let gv: Vec<Vec<C>> = g.iter().map(to_vec).collect();
    let sv = to_vec(&s);
    let pilot: Vec<C> = (0..m_p)
        .map(|m| C::from_polar(1.0 / (m_p as f64).sqrt(), -2.0 * PI * (m * 0) as f64 / m_p as f64))
        .collect();
    let mut w_or = Vec::new();
    let mut csi_or = Vec::new();
    for b in 0..2 {
        let nz = rows(&noise[b]);
        let mut y = vec![vec![C::new(0.0, 0.0); m_p]; n];
        for a in 0..n {
            for m in 0..m_p {
                let mut acc = nz[a][m];
                for (k, &p) in p_ue.iter().enumerate() {
                    acc += p.sqrt() * hv[b * 2 + k][a] * pilot[m];
                }
                acc += p_wifi.sqrt() * gv[b][a] * sv[m];
                y[a][m] = acc;
            }
        }
        let raw: Vec<C> = (0..n).map(|a| (0..m_p).map(|m| y[a][m] * pilot[m].conj()).sum()).collect();
        let projected = matvec(&rows(&proj[b].pi_perp), &raw);
        let normalized: Vec<C> = projected.iter().map(|x| x / scale[b]).collect();
        // zero forcing with one user is the normalized matched filter
        let nn = norm(&normalized);
        w_or.push(normalized.iter().map(|x| x / nn).collect::<Vec<C>>());
        csi_or.push(normalized);
    }
    let mut sinr_err = 0.0f64;
    let mut term_err = 0.0f64;
    for k in 0..2 {
        let h_own = &hv[k * 2 + k];
        let signal = p_bs * dotc(h_own, &w_or[k]).norm_sqr();
        let j = 1 - k;
        let inter = p_bs * dotc(&hv[j * 2 + k], &w_or[j]).norm_sqr();
        let wifi_term = p_wifi * q[k].norm_sqr();
        let sinr = signal / (inter + wifi_term + noise_ue);
        let t = lib_terms[k];
        sinr_err = sinr_err.max(rel(t.sinr(), sinr));
        term_err = term_err
            .max(rel(t.signal, signal))
            .max(rel(t.inter_cell, inter))
            .max(rel(t.wifi, wifi_term))
            .max(t.intra_cell / signal);
    }
    let interference: f64 = (0..2).map(|b| p_bs * dotc(&gv[b], &w_or[b]).norm_sqr()).sum();
    let csi_err = (0..2).map(|b| rel_vec(&lib_csi[b], &csi_or[b])).fold(0.0, f64::max);
    TinyErrors {
        sinr: sinr_err,
        sinr_terms: term_err,
        wifi_interference: rel(lib_wifi, interference),
        csi: csi_err,
    }
}

/// Random Wi-Fi style covariance `sum_l P_l g_l g_l^H + noise I`.
pub fn random_covariance(n: usize, devices: usize, rng: &mut SimRng) -> CMatrix {
    let mut z = CMatrix::identity(n, n) * C::new(1e-3, 0.0);
    for _ in 0..devices {
        let g = complex_gaussian_vector(n, rng);
        let p: f64 = 10f64.powf(rng.random_range(-1.0..2.0));
        z += &g * g.adjoint() * C::new(p, 0.0);
    }
    z
}

/// Largest deviation from idempotence and complementarity over random
/// projectors.
pub fn projector_algebra_error(trials: usize, seed: u64) -> f64 {
    let mut rng = seeded(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let n = rng.random_range(2..=32);
        let devices = rng.random_range(1..=n);
        let cov = CovarianceEstimate::from_matrix(random_covariance(n, devices, &mut rng), None);
        let d = rng.random_range(0..=n);
        let p = dominant_subspace(&cov, d).unwrap();
        let id = CMatrix::identity(n, n);
        for m in [
            &p.pi * &p.pi - &p.pi,
            &p.pi_perp * &p.pi_perp - &p.pi_perp,
            &p.pi + &p.pi_perp - &id,
            &p.pi * &p.pi_perp,
        ] {
            worst = worst.max(m.iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }
    worst
}

/// Largest `|h_j^H w_k| / (|h_j| |w_k|)`, `j != k`, for zero forcing on
/// random perfectly known channels.
pub fn zf_offdiagonal_error(trials: usize, seed: u64) -> f64 {
    let mut rng = seeded(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let n = rng.random_range(2..=64);
        let k = rng.random_range(1..=n.min(16));
        let h = complex_gaussian_matrix(n, k, &mut rng);
        let w = zf_precoder(&h, 1e12).unwrap().w;
        for j in 0..k {
            let hj = to_vec(&h.column(j).into_owned());
            for c in 0..k {
                if c == j {
                    continue;
                }
                let wc = to_vec(&w.column(c).into_owned());
                worst = worst.max(dotc(&hj, &wc).norm() / (norm(&hj) * norm(&wc)));
            }
        }
    }
    worst
}

/// Counts trials where the projected detector with no nulls differs in any
/// bit from the plain detector.
pub fn elbt_without_nulls_mismatches(trials: usize, seed: u64) -> usize {
    let mut rng = seeded(seed);
    let mut bad = 0;
    for _ in 0..trials {
        let n = rng.random_range(1..=32);
        let cov = CovarianceEstimate::from_matrix(random_covariance(n, 2, &mut rng), None);
        let p = dominant_subspace(&cov, 0).unwrap();
        let snaps: Vec<IdleSnapshot> = (0..rng.random_range(1..20))
            .map(|i| IdleSnapshot { z: complex_gaussian_vector(n, &mut rng) * C::new(1e-4, 0.0), symbol_index: i })
            .collect();
        let threshold = rng.random_range(-90.0..-60.0);
        let a = conventional_lbt(&snaps, threshold);
        let b = enhanced_lbt(&p.pi_perp, &snaps, threshold);
        bad += (a.measured_mw.to_bits() != b.measured_mw.to_bits() || a.passed != b.passed) as usize;
    }
    bad
}

/// Noise-free single-user estimate divided by `sqrt(P h_bar)` against the
/// projected small-scale channel.
pub fn csi_normalization_error(trials: usize, seed: u64) -> f64 {
    let mut rng = seeded(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let n = rng.random_range(2..=32);
        let slow: f64 = 10f64.powf(rng.random_range(-13.0..-6.0));
        let power: f64 = 10f64.powf(rng.random_range(-3.0..2.3));
        let fast = complex_gaussian_vector(n, &mut rng);
        let h = &fast * C::new(slow.sqrt(), 0.0);
        let ch = ChannelSet::from_parts(vec![0], vec![n], 0, vec![h], vec![], vec![]).unwrap();
        let m_p = rng.random_range(1..=8);
        let book = PilotBook::dft(m_p);
        let pilot = rng.random_range(0..m_p);
        let up = [PilotTransmission { slot: 0, pilot, power_mw: power }];
        let y = received_pilot_block(&ch, 0, &up, &book, &[], &CMatrix::zeros(n, m_p));
        let cov = CovarianceEstimate::from_matrix(random_covariance(n, 1, &mut rng), None);
        let p = dominant_subspace(&cov, rng.random_range(0..n)).unwrap();
        let est = estimate_ue_channels(&y, &book, &p.pi_perp, &[pilot], &[(power * slow).sqrt()], &[0]).unwrap();
        let expect = matvec(&rows(&p.pi_perp), &to_vec(&fast));
        if norm(&expect) > 1e-6 {
            worst = worst.max(rel_vec(&to_vec(&est.normalized.column(0).into_owned()), &expect));
        }
    }
    worst
}

/// Least-squares slope of log(relative Frobenius error) against log(M_c)
/// for the sample covariance of Gaussian snapshots.
pub fn covariance_error_slope(seed: u64) -> f64 {
    let mut rng = seeded(seed);
    let n = 8;
    let z = random_covariance(n, 3, &mut rng);
    let chol = z.clone().cholesky().unwrap().l();
    let grid = [16usize, 32, 64, 128, 256, 512, 1024, 2048, 4096];
    let trials = 40;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &m in &grid {
        let mut err = 0.0;
        for _ in 0..trials {
            let mut acc = CovarianceAccumulator::new(n);
            for _ in 0..m {
                acc.push(&(&chol * complex_gaussian_vector(n, &mut rng)));
            }
            let est = acc.estimate().unwrap();
            err += (&est.z_hat - &z).norm() / z.norm();
        }
        xs.push((m as f64).ln());
        ys.push((err / trials as f64).ln());
    }
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Residual `|pi_perp g| / |g|` after nulling the single dominant direction
/// of one device's covariance.
pub fn rank_one_nulling_residual(trials: usize, seed: u64) -> f64 {
    let mut rng = seeded(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let n = rng.random_range(2..=64);
        let g = complex_gaussian_vector(n, &mut rng);
        let p: f64 = 10f64.powf(rng.random_range(-9.0..-3.0));
        let noise: f64 = 10f64.powf(rng.random_range(-13.0..-11.0));
        let z = &g * g.adjoint() * C::new(p, 0.0) + CMatrix::identity(n, n) * C::new(noise, 0.0);
        let pair = dominant_subspace(&CovarianceEstimate::from_matrix(z, None), 1).unwrap();
        let residual = to_vec(&(&pair.pi_perp * &g));
        worst = worst.max(norm(&residual) / norm(&to_vec(&g)));
    }
    worst
}
