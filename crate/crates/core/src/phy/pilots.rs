//! Uplink pilots, fractional power control and projected channel estimation.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::units::linear_to_db;

/// Orthonormal pilot codebook and the per-cell assignment of its columns.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotBook {
    /// `M_p x M_p` unitary matrix whose columns are the pilots.
    pub matrix: CMatrix,
    /// `assignment[cell][slot]` is the pilot index of the cell's slot-th UE.
    pub assignment: Vec<Vec<usize>>,
}

impl PilotBook {
    /// Normalized DFT codebook with an empty assignment.
    pub fn dft(m_p: usize) -> Self {
        let scale = 1.0 / (m_p as f64).sqrt();
        let matrix = CMatrix::from_fn(m_p, m_p, |r, c| {
            Complex64::from_polar(scale, -2.0 * PI * (r * c) as f64 / m_p as f64)
        });
        Self { matrix, assignment: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pilot(&self, index: usize) -> CVector {
        self.matrix.column(index).into_owned()
    }

    /// Gives every cell a random set of distinct pilots, independently across
    /// cells (full reuse). `users[c]` is the number of UEs in cell `c`.
    pub fn assign_random<R: Rng + ?Sized>(&mut self, users: &[usize], rng: &mut R) -> Result<()> {
        let m_p = self.len();
        let mut assignment = Vec::with_capacity(users.len());
        for (cell, &k) in users.iter().enumerate() {
            if k > m_p {
                return Err(Error::PilotShortage { cell, needed: k, available: m_p });
            }
            let mut perm: Vec<usize> = (0..m_p).collect();
            perm.shuffle(rng);
            perm.truncate(k);
            assignment.push(perm);
        }
        self.assignment = assignment;
        Ok(())
    }
}

/// Fractional power control, `min(P_max, P0 - alpha * G_dB)` in dBm, where
/// `G_dB` is the slow fading gain toward the serving base station.
pub fn uplink_pilot_power(slow_gain: f64, p_max_dbm: f64, p0_dbm: f64, alpha: f64) -> f64 {
    p_max_dbm.min(p0_dbm - alpha * linear_to_db(slow_gain))
}

/// One UE sending its pilot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PilotTransmission {
    /// Channel-set slot of the UE.
    pub slot: usize,
    pub pilot: usize,
    pub power_mw: f64,
}

/// A Wi-Fi device active during the pilot phase, with its `M_p` symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct WiFiPilotInterference {
    pub device: usize,
    pub power_mw: f64,
    pub symbols: CVector,
}

/// `Y = sum_k sqrt(P_k) h_k v_k^T + sum_l sqrt(P_l) g_l s_l^T + noise` at
/// base station `bs`.
pub fn received_pilot_block(
    channels: &ChannelSet,
    bs: usize,
    uplink: &[PilotTransmission],
    book: &PilotBook,
    wifi: &[WiFiPilotInterference],
    noise: &CMatrix,
) -> CMatrix {
    let mut y = noise.clone();
    let one = Complex64::new(1.0, 0.0);
    for t in uplink {
        let h = channels.h(bs, t.slot) * Complex64::new(t.power_mw.sqrt(), 0.0);
        y.ger(one, &h, &book.pilot(t.pilot), one);
    }
    for w in wifi {
        let g = channels.g(bs, w.device) * Complex64::new(w.power_mw.sqrt(), 0.0);
        y.ger(one, &g, &w.symbols, one);
    }
    y
}

/// Projected channel estimates and their normalized matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsiEstimate {
    pub h_hat: Vec<CVector>,
    /// `N x K` matrix of the estimates divided by their slow-fading amplitude.
    pub normalized: CMatrix,
}

/// `h_hat = pi_perp Y conj(v)` for every requested pilot, then each estimate
/// is divided by `scale[k]`, the square root of the UE's pilot power times
/// its slow fading gain, so that all columns are of unit average power.
pub fn estimate_ue_channels(
    y: &CMatrix,
    book: &PilotBook,
    pi_perp: &CMatrix,
    pilots: &[usize],
    scale: &[f64],
    ue_ids: &[usize],
) -> Result<CsiEstimate> {
    let n = y.nrows();
    let mut h_hat = Vec::with_capacity(pilots.len());
    let mut normalized = CMatrix::zeros(n, pilots.len());
    for (k, &p) in pilots.iter().enumerate() {
        if !(scale[k] > 0.0) {
            return Err(Error::ZeroSlowGain { ue: ue_ids.get(k).copied().unwrap_or(k) });
        }
        let e = pi_perp * (y * book.pilot(p).conjugate());
        normalized.set_column(k, &(&e * Complex64::new(1.0 / scale[k], 0.0)));
        h_hat.push(e);
    }
    Ok(CsiEstimate { h_hat, normalized })
}
