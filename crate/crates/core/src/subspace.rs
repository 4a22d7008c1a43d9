//! Wi-Fi covariance at a silent base station and the projectors built from
//! its dominant eigenvectors.
//!
//! While all base stations are silent, base station `i` records
//! `z[m] = sum_l sqrt(P_l) g_il s_l[m] + eta[m]` over the active Wi-Fi
//! devices. The sample covariance of these snapshots, or its closed-form
//! expectation, is eigen-decomposed; the `d` strongest eigenvectors span the
//! space that transmissions and energy detection must avoid.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::Rng;

use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::linalg::{complex_gaussian, complex_gaussian_vector, CMatrix, CVector};

/// One listening snapshot at a base station.
#[derive(Debug, Clone, PartialEq)]
pub struct IdleSnapshot {
    pub z: CVector,
    pub symbol_index: usize,
}

/// Builds `sum_l g_il x_l + noise` where `x_l` already carries the transmit
/// amplitude and the symbol of device `l`.
pub fn compose_idle_signal(channels: &ChannelSet, bs: usize, emissions: &[(usize, Complex64)], noise: CVector) -> CVector {
    let mut z = noise;
    for &(l, x) in emissions {
        z.axpy(x, channels.g(bs, l), Complex64::new(1.0, 0.0));
    }
    z
}

/// Draws one snapshot with fresh unit-variance symbols and noise of power
/// `noise_mw` per antenna. `power_mw[l]` is the transmit power of device `l`.
pub fn sample_idle_signal<R: Rng + ?Sized>(
    channels: &ChannelSet,
    bs: usize,
    active: &[usize],
    power_mw: &[f64],
    noise_mw: f64,
    symbol_index: usize,
    rng: &mut R,
) -> IdleSnapshot {
    let n = channels.g_dim(bs);
    let emissions: Vec<(usize, Complex64)> = active
        .iter()
        .map(|&l| (l, complex_gaussian(rng) * power_mw[l].sqrt()))
        .collect();
    let noise = complex_gaussian_vector(n, rng) * Complex64::new(noise_mw.sqrt(), 0.0);
    IdleSnapshot {
        z: compose_idle_signal(channels, bs, &emissions, noise),
        symbol_index,
    }
}

/// Eigen-decomposed covariance of the Wi-Fi signal at one base station.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceEstimate {
    pub z_hat: CMatrix,
    /// Orthonormal eigenvectors as columns, matching `eigvals`.
    pub eigvecs: CMatrix,
    /// Eigenvalues in descending order.
    pub eigvals: Vec<f64>,
    /// Number of snapshots averaged, `None` for the exact covariance.
    pub m_c: Option<usize>,
}

impl CovarianceEstimate {
    /// Symmetrizes `z` and decomposes it. Equal eigenvalues keep the order
    /// the decomposition returned them in.
    pub fn from_matrix(z: CMatrix, m_c: Option<usize>) -> Self {
        let z_hat = (&z + z.adjoint()) * Complex64::new(0.5, 0.0);
        let n = z_hat.nrows();
        let eig = SymmetricEigen::new(z_hat.clone());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let eigvals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let eigvecs = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Self { z_hat, eigvecs, eigvals, m_c }
    }

    pub fn dim(&self) -> usize {
        self.z_hat.nrows()
    }
}

/// Sample covariance `(1/M) sum z z^H` of the snapshots.
pub fn estimate_covariance(snapshots: &[IdleSnapshot]) -> Result<CovarianceEstimate> {
    let first = snapshots.first().ok_or(Error::EmptySnapshots)?;
    let mut acc = CovarianceAccumulator::new(first.z.len());
    for s in snapshots {
        acc.push(&s.z);
    }
    acc.estimate()
}

/// Running sum of outer products, so that estimates for growing sample
/// counts can be read off one stream of snapshots.
#[derive(Debug, Clone)]
pub struct CovarianceAccumulator {
    sum: CMatrix,
    count: usize,
}

impl CovarianceAccumulator {
    pub fn new(n: usize) -> Self {
        Self { sum: CMatrix::zeros(n, n), count: 0 }
    }

    pub fn push(&mut self, z: &CVector) {
        self.sum.ger(Complex64::new(1.0, 0.0), z, &z.conjugate(), Complex64::new(1.0, 0.0));
        self.count += 1;
    }

    /// Adds the columns of `block` as snapshots.
    pub fn push_block(&mut self, block: &CMatrix) {
        self.sum.gemm(Complex64::new(1.0, 0.0), block, &block.adjoint(), Complex64::new(1.0, 0.0));
        self.count += block.ncols();
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn estimate(&self) -> Result<CovarianceEstimate> {
        if self.count == 0 {
            return Err(Error::EmptySnapshots);
        }
        let z = &self.sum * Complex64::new(1.0 / self.count as f64, 0.0);
        Ok(CovarianceEstimate::from_matrix(z, Some(self.count)))
    }
}

/// Closed-form covariance `sum_l p_l P_l g_il g_il^H + noise I`, where
/// `activity[l]` is the probability that device `l` transmits in a snapshot.
pub fn exact_covariance(channels: &ChannelSet, bs: usize, power_mw: &[f64], activity: &[f64], noise_mw: f64) -> CMatrix {
    let n = channels.g_dim(bs);
    let mut z = CMatrix::identity(n, n) * Complex64::new(noise_mw, 0.0);
    for l in 0..channels.num_wifi {
        let w = activity[l] * power_mw[l];
        if w > 0.0 {
            let g = channels.g(bs, l);
            z.ger(Complex64::new(w, 0.0), g, &g.conjugate(), Complex64::new(1.0, 0.0));
        }
    }
    z
}

/// Dominant subspace basis and the two projectors derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorPair {
    /// `N x d` orthonormal basis of the suppressed subspace.
    pub sigma: CMatrix,
    pub pi: CMatrix,
    pub pi_perp: CMatrix,
}

impl ProjectorPair {
    pub fn identity(n: usize) -> Self {
        Self::from_basis(CMatrix::zeros(n, 0))
    }

    pub fn from_basis(sigma: CMatrix) -> Self {
        let n = sigma.nrows();
        let pi = &sigma * sigma.adjoint();
        let pi_perp = CMatrix::identity(n, n) - &pi;
        Self { sigma, pi, pi_perp }
    }

    pub fn dim(&self) -> usize {
        self.sigma.ncols()
    }

    /// Projection onto the complement of the suppressed subspace.
    pub fn project(&self, v: &CVector) -> CVector {
        &self.pi_perp * v
    }
}

/// Projectors onto the `d` strongest eigen-directions and their complement.
/// `d` may not exceed the array size nor the number of averaged snapshots.
pub fn dominant_subspace(cov: &CovarianceEstimate, d: usize) -> Result<ProjectorPair> {
    let n = cov.dim();
    let bound = cov.m_c.map_or(n, |m| m.min(n));
    if d > bound {
        return Err(Error::SubspaceDimension { d, bound });
    }
    Ok(ProjectorPair::from_basis(cov.eigvecs.columns(0, d).into_owned()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{complex_gaussian_vector, norm_sq, rel_frobenius_error};
    use crate::rng::seeded;

    fn channels(n: usize, wifi: usize, seed: u64) -> ChannelSet {
        let mut rng = seeded(seed);
        let g = (0..wifi).map(|_| complex_gaussian_vector(n, &mut rng)).collect();
        ChannelSet::from_parts(vec![], vec![n], wifi, vec![], g, vec![]).unwrap()
    }

    #[test]
    fn quiet_air_is_noise() {
        let ch = channels(8, 2, 1);
        let mut rng = seeded(2);
        let draws = 20_000;
        let total: f64 = (0..draws)
            .map(|m| norm_sq(&sample_idle_signal(&ch, 0, &[], &[1.0, 1.0], 0.5, m, &mut rng).z))
            .sum();
        assert!((total / draws as f64 / (8.0 * 0.5) - 1.0).abs() < 0.02);
    }

    #[test]
    fn single_device_without_noise_is_collinear() {
        let ch = channels(6, 1, 3);
        let mut rng = seeded(4);
        let s = sample_idle_signal(&ch, 0, &[0], &[2.0], 0.0, 0, &mut rng);
        let g = ch.g(0, 0);
        let c = g.dotc(&s.z).norm();
        assert!((c * c / (norm_sq(g) * norm_sq(&s.z)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn snapshot_average_matches_closed_form() {
        let ch = channels(4, 2, 5);
        let power = [1.0, 0.25];
        let exact = exact_covariance(&ch, 0, &power, &[1.0, 1.0], 0.1);
        let mut rng = seeded(6);
        let snaps: Vec<IdleSnapshot> = (0..100_000)
            .map(|m| sample_idle_signal(&ch, 0, &[0, 1], &power, 0.1, m, &mut rng))
            .collect();
        let est = estimate_covariance(&snaps).unwrap();
        assert!(rel_frobenius_error(&est.z_hat, &exact) < 0.02);
    }

    #[test]
    fn single_sample_is_rank_one() {
        let mut rng = seeded(7);
        let z = complex_gaussian_vector(5, &mut rng);
        let est = estimate_covariance(&[IdleSnapshot { z: z.clone(), symbol_index: 0 }]).unwrap();
        assert!((est.eigvals[0] / norm_sq(&z) - 1.0).abs() < 1e-12);
        assert!(est.eigvals[1..].iter().all(|l| l.abs() < 1e-12 * est.eigvals[0]));
        assert_eq!(est.m_c, Some(1));
    }

    #[test]
    fn zero_snapshots() {
        let zero = IdleSnapshot { z: CVector::zeros(3), symbol_index: 0 };
        let est = estimate_covariance(&[zero.clone(), zero]).unwrap();
        assert!(est.eigvals.iter().all(|&l| l == 0.0));
        assert!(matches!(estimate_covariance(&[]), Err(Error::EmptySnapshots)));
    }

    #[test]
    fn exact_covariance_rank_one_eigenvalue() {
        let ch = channels(8, 1, 8);
        let z = exact_covariance(&ch, 0, &[3.0], &[1.0], 0.2);
        let est = CovarianceEstimate::from_matrix(z, None);
        let expected = 3.0 * norm_sq(ch.g(0, 0)) + 0.2;
        assert!((est.eigvals[0] / expected - 1.0).abs() < 1e-12);
        for l in &est.eigvals[1..] {
            assert!((l - 0.2).abs() < 1e-12);
        }
        let none = channels(4, 0, 1);
        assert_eq!(exact_covariance(&none, 0, &[], &[], 0.3), CMatrix::identity(4, 4) * Complex64::new(0.3, 0.0));
    }

    #[test]
    fn projector_edge_dimensions() {
        let ch = channels(6, 2, 9);
        let est = CovarianceEstimate::from_matrix(exact_covariance(&ch, 0, &[1.0, 1.0], &[0.5, 0.5], 0.1), None);
        let p0 = dominant_subspace(&est, 0).unwrap();
        assert_eq!(p0.pi, CMatrix::zeros(6, 6));
        assert_eq!(p0.pi_perp, CMatrix::identity(6, 6));
        let pn = dominant_subspace(&est, 6).unwrap();
        assert!(rel_frobenius_error(&pn.pi, &CMatrix::identity(6, 6)) < 1e-12);
        assert!(pn.pi_perp.norm() < 1e-12);
        assert!(matches!(dominant_subspace(&est, 7), Err(Error::SubspaceDimension { d: 7, bound: 6 })));
    }

    #[test]
    fn dimension_limited_by_sample_count() {
        let mut rng = seeded(10);
        let snaps: Vec<IdleSnapshot> = (0..3)
            .map(|m| IdleSnapshot { z: complex_gaussian_vector(8, &mut rng), symbol_index: m })
            .collect();
        let est = estimate_covariance(&snaps).unwrap();
        assert!(dominant_subspace(&est, 3).is_ok());
        assert!(matches!(dominant_subspace(&est, 4), Err(Error::SubspaceDimension { d: 4, bound: 3 })));
    }

    #[test]
    fn rank_one_nulling() {
        let ch = channels(16, 1, 11);
        let est = CovarianceEstimate::from_matrix(exact_covariance(&ch, 0, &[1e-3], &[0.125], 1e-12), None);
        let p = dominant_subspace(&est, 1).unwrap();
        let g = ch.g(0, 0);
        assert!(p.project(g).norm() / g.norm() < 1e-10);
    }

    #[test]
    fn accumulator_block_matches_sequential() {
        let mut rng = seeded(12);
        let block = crate::linalg::complex_gaussian_matrix(5, 40, &mut rng);
        let mut a = CovarianceAccumulator::new(5);
        let mut b = CovarianceAccumulator::new(5);
        a.push_block(&block);
        for c in block.column_iter() {
            b.push(&c.into_owned());
        }
        assert_eq!(a.count(), b.count());
        assert!(rel_frobenius_error(&a.estimate().unwrap().z_hat, &b.estimate().unwrap().z_hat) < 1e-13);
    }
}
