//! Downlink SINR, interference at Wi-Fi devices and achievable rate.

use serde::{Deserialize, Serialize};

use crate::channel::ChannelSet;
use crate::linalg::CMatrix;

/// A base station that transmits in the current interval.
#[derive(Debug, Clone, PartialEq)]
pub struct BsTransmission {
    pub bs: usize,
    /// Channel-set slot of the UE served by each column of `w`.
    pub slots: Vec<usize>,
    pub w: CMatrix,
    pub power_mw: f64,
}

/// Received power components at one UE, mW.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinrTerms {
    pub signal: f64,
    pub intra_cell: f64,
    pub inter_cell: f64,
    pub wifi: f64,
    pub noise: f64,
}

impl SinrTerms {
    pub fn sinr(&self) -> f64 {
        self.signal / (self.intra_cell + self.inter_cell + self.wifi + self.noise)
    }
}

/// Power a base station delivers to channel `h` summed over its streams.
fn leaked(t: &BsTransmission, h: &crate::linalg::CVector) -> f64 {
    t.w.column_iter().map(|w| t.power_mw * h.dotc(&w).norm_sqr()).sum()
}

/// SINR terms of the UE served by column `column` of `transmissions[serving]`.
/// Only the listed base stations transmit; `wifi` lists the active devices
/// with their transmit power.
pub fn ue_sinr(
    serving: usize,
    column: usize,
    transmissions: &[BsTransmission],
    channels: &ChannelSet,
    wifi: &[(usize, f64)],
    noise_mw: f64,
) -> SinrTerms {
    let own = &transmissions[serving];
    let slot = own.slots[column];
    let h = channels.h(own.bs, slot);
    let mut signal = 0.0;
    let mut intra_cell = 0.0;
    for (c, w) in own.w.column_iter().enumerate() {
        let p = own.power_mw * h.dotc(&w).norm_sqr();
        if c == column {
            signal = p;
        } else {
            intra_cell += p;
        }
    }
    let inter_cell = transmissions
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != serving)
        .map(|(_, t)| leaked(t, channels.h(t.bs, slot)))
        .sum();
    let wifi = wifi.iter().map(|&(l, p)| p * channels.q(l, slot).norm_sqr()).sum();
    SinrTerms { signal, intra_cell, inter_cell, wifi, noise: noise_mw }
}

/// Interference power at Wi-Fi device `device` from every transmitting base
/// station, averaged over unit-variance data symbols.
pub fn wifi_interference(device: usize, transmissions: &[BsTransmission], channels: &ChannelSet) -> f64 {
    transmissions.iter().map(|t| leaked(t, channels.g(t.bs, device))).sum()
}

/// `1{passed} B log2(1 + sinr)` in bit/s.
pub fn ue_rate(sinr: f64, lbt_passed: bool, bandwidth_hz: f64) -> f64 {
    if lbt_passed {
        bandwidth_hz * (1.0 + sinr).log2()
    } else {
        0.0
    }
}
