//! One Monte Carlo drop: geometry, fading, scheduling and the transmission
//! chain of one coherence interval.
//!
//! [`DropContext::prepare`] draws everything that does not depend on the
//! transmission scheme or on the number of nulls, so that several schemes
//! and null counts can be evaluated on identical randomness. Every phase
//! draws from its own stream of the drop seed.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{realize_channels, slow_fading_table, ChannelSet, SlowFadingTable};
use crate::error::{Error, Result};
use crate::linalg::{complex_gaussian, complex_gaussian_matrix, complex_gaussian_vector, CMatrix};
use crate::phy::{
    estimate_ue_channels, expected_filtered_power, lbt_decision, received_pilot_block, ue_rate, ue_sinr,
    uplink_pilot_power, wifi_interference, zf_precoder, BsTransmission, LbtOutcome, PilotBook, PilotTransmission,
    WiFiPilotInterference,
};
use crate::rng::{stream_rng, Stream};
use crate::scheduler::{allocate_dof, noise_rank, select_ues, ue_metric, DofPolicy, SelectionReport};
use crate::sim::activity::{activity_probabilities, clusters_of, sample_wifi_activity, wifi_sector_rate};
use crate::sim::config::{Scheme, SimulationConfig};
use crate::subspace::{
    compose_idle_signal, dominant_subspace, exact_covariance, CovarianceAccumulator, CovarianceEstimate,
    ProjectorPair,
};
use crate::topology::{associate_ues, drop_ues, drop_wifi, NetworkLayout, UserEquipment, WiFiDevice, WiFiKind};
use crate::units::dbm_to_mw;

/// Scheme-independent state of one drop.
#[derive(Debug, Clone)]
pub struct DropContext {
    pub config: SimulationConfig,
    pub seed: u64,
    pub n: usize,
    pub layout: NetworkLayout,
    pub ues: Vec<UserEquipment>,
    pub wifi: Vec<WiFiDevice>,
    pub slow: SlowFadingTable,
    pub selections: Vec<SelectionReport>,
    /// Channel-set slots of the selected UEs of every base station.
    pub cell_slots: Vec<Vec<usize>>,
    /// Serving base station of every slot.
    pub slot_bs: Vec<usize>,
    pub channels: ChannelSet,
    pub wifi_power_mw: Vec<f64>,
    pub clusters: Vec<Vec<usize>>,
    /// Devices transmitting during the interval.
    pub interval_active: Vec<usize>,
    pub pilot_book: PilotBook,
    /// Pilot of every slot, with its power.
    pub uplink: Vec<PilotTransmission>,
    /// `sqrt(P h_bar)` of every slot, used to normalize its estimate.
    pub csi_scale: Vec<f64>,
    pub wifi_pilot: Vec<WiFiPilotInterference>,
    pub pilot_noise: Vec<CMatrix>,
}

/// Per base station outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BsRecord {
    pub bs: usize,
    pub d_i: usize,
    pub served: usize,
    pub shortfall: usize,
    pub lbt: LbtOutcome,
    /// Whether the base station transmitted after listening.
    pub transmitted: bool,
    pub precoding_failed: bool,
}

/// Per selected UE outcome of the listen-gated transmission.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UeRecord {
    pub ue: usize,
    pub bs: usize,
    pub sinr: f64,
    pub rate_bps: f64,
}

/// Everything measured in one drop for one scheme and null rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropMetrics {
    pub seed: u64,
    pub n_antennas: usize,
    pub scheme: Scheme,
    pub bss: Vec<BsRecord>,
    pub ues: Vec<UeRecord>,
    /// Interference at every Wi-Fi device when all base stations transmit.
    pub wifi_forced_mw: Vec<f64>,
    /// Interference at every Wi-Fi device from the base stations that passed
    /// listen-before-talk.
    pub wifi_gated_mw: Vec<f64>,
    /// Hotspot throughput of every sector, Mbit/s.
    pub sector_wifi_rate_mbps: Vec<f64>,
}

impl DropMetrics {
    /// `sum_k R_ik` of every base station.
    pub fn cell_rates_bps(&self) -> Vec<f64> {
        let mut rates = vec![0.0; self.bss.len()];
        for u in &self.ues {
            rates[u.bs] += u.rate_bps;
        }
        rates
    }

    pub fn mean_cell_rate_bps(&self) -> f64 {
        let r = self.cell_rates_bps();
        r.iter().sum::<f64>() / r.len().max(1) as f64
    }
}

/// Transmission of the listed base stations, after pilots and precoding.
struct RoundOutcome {
    sinr: Vec<f64>,
    transmitted: Vec<bool>,
    failed: Vec<bool>,
    wifi_mw: Vec<f64>,
}

impl DropContext {
    pub fn prepare(config: &SimulationConfig, seed: u64, n: usize) -> Result<Self> {
        Self::prepare_inner(config, seed, n).map_err(|e| e.in_drop(seed))
    }

    fn prepare_inner(config: &SimulationConfig, seed: u64, n: usize) -> Result<Self> {
        config.check_dof("array.antennas", n)?;
        let layout = config.layout_for(n)?;
        let geometry = config.geometry();

        let mut ues = drop_ues(&layout, config.layout.ues_per_sector, geometry, &mut stream_rng(seed, Stream::Users))?;
        let wifi = drop_wifi(
            &layout,
            config.layout.wifi_clusters_per_sector,
            config.layout.wifi_cluster_radius_m,
            config.wifi_profile(),
            geometry,
            &mut stream_rng(seed, Stream::WiFi),
        )?;
        let model = config.channel_model();
        let slow = slow_fading_table(
            &model,
            &layout,
            &ues,
            &wifi,
            config.heights(),
            &mut stream_rng(seed, Stream::SlowFading),
        );
        let nb = layout.num_bss();
        let serving = associate_ues(&mut ues, nb, |b, u| slow.bs_ue(b, u).gain);

        let p_b = dbm_to_mw(config.power.bs_dbm);
        let wifi_power_mw: Vec<f64> = wifi.iter().map(|d| dbm_to_mw(d.tx_power_dbm)).collect();
        let aps: Vec<usize> = wifi.iter().filter(|d| d.kind == WiFiKind::Ap).map(|d| d.id).collect();
        let sensitivity = dbm_to_mw(config.scheduler.sensitivity_dbm);
        let mut candidates = vec![Vec::new(); nb];
        let mut metrics = vec![Vec::new(); nb];
        for ue in &ues {
            let s = serving[ue.id];
            let own = slow.bs_ue(s, ue.id).gain;
            if p_b * own < sensitivity {
                continue;
            }
            let others: Vec<f64> = (0..nb).filter(|&b| b != s).map(|b| slow.bs_ue(b, ue.id).gain).collect();
            let ap_rx: Vec<f64> = aps.iter().map(|&l| wifi_power_mw[l] * slow.wifi_ue(l, ue.id).gain).collect();
            candidates[s].push(ue.id);
            metrics[s].push(ue_metric(p_b, own, &others, &ap_rx));
        }
        let selections: Vec<SelectionReport> = (0..nb)
            .map(|b| select_ues(&candidates[b], config.scheduler.k_i, &metrics[b]))
            .collect();

        let mut selected = Vec::new();
        let mut cell_slots = Vec::with_capacity(nb);
        let mut slot_bs = Vec::new();
        for (b, sel) in selections.iter().enumerate() {
            let start = selected.len();
            selected.extend_from_slice(&sel.chosen);
            slot_bs.extend(std::iter::repeat_n(b, sel.chosen.len()));
            cell_slots.push((start..selected.len()).collect::<Vec<_>>());
        }

        let channels = realize_channels(&model, &layout, &slow, &selected, &mut stream_rng(seed, Stream::FastFading))?;

        let clusters = clusters_of(&wifi);
        let interval_active = sample_wifi_activity(&clusters, &mut stream_rng(seed, Stream::Activity));

        let mut rng = stream_rng(seed, Stream::Pilots);
        let mut pilot_book = PilotBook::dft(config.phy.pilots);
        let per_cell: Vec<usize> = cell_slots.iter().map(Vec::len).collect();
        pilot_book.assign_random(&per_cell, &mut rng)?;
        let p0 = config.phy.p0_dbm + 10.0 * (config.phy.pilot_rbs.max(1) as f64).log10();
        let mut uplink = Vec::with_capacity(selected.len());
        let mut csi_scale = Vec::with_capacity(selected.len());
        for (b, slots) in cell_slots.iter().enumerate() {
            for (k, &slot) in slots.iter().enumerate() {
                let gain = slow.bs_ue(b, selected[slot]).gain;
                let power_mw = dbm_to_mw(uplink_pilot_power(gain, config.phy.ue_max_power_dbm, p0, config.phy.alpha));
                uplink.push(PilotTransmission { slot, pilot: pilot_book.assignment[b][k], power_mw });
                csi_scale.push((power_mw * gain).sqrt());
            }
        }
        let m_p = pilot_book.len();
        let wifi_pilot = interval_active
            .iter()
            .map(|&l| WiFiPilotInterference {
                device: l,
                power_mw: wifi_power_mw[l],
                symbols: complex_gaussian_vector(m_p, &mut rng),
            })
            .collect();
        let noise_amp = Complex64::new(config.bs_noise_mw().sqrt(), 0.0);
        let pilot_noise = (0..nb).map(|_| complex_gaussian_matrix(n, m_p, &mut rng) * noise_amp).collect();

        Ok(Self {
            config: config.clone(),
            seed,
            n,
            layout,
            ues,
            wifi,
            slow,
            selections,
            cell_slots,
            slot_bs,
            channels,
            wifi_power_mw,
            clusters,
            interval_active,
            pilot_book,
            uplink,
            csi_scale,
            wifi_pilot,
            pilot_noise,
        })
    }

    /// Closed-form Wi-Fi covariance at every base station.
    pub fn exact_covariances(&self) -> Vec<CovarianceEstimate> {
        let activity = activity_probabilities(&self.wifi);
        let noise = self.config.bs_noise_mw();
        (0..self.layout.num_bss())
            .map(|b| {
                let z = exact_covariance(&self.channels, b, &self.wifi_power_mw, &activity, noise);
                CovarianceEstimate::from_matrix(z, None)
            })
            .collect()
    }

    /// Listening snapshots of every base station as columns of an `N x m`
    /// matrix. The active devices are redrawn for every snapshot and the
    /// devices' symbols are common to all base stations. The first `m`
    /// columns do not depend on how many snapshots are requested.
    pub fn listening_snapshots(&self, m: usize) -> Vec<CMatrix> {
        let nb = self.layout.num_bss();
        let noise_amp = Complex64::new(self.config.bs_noise_mw().sqrt(), 0.0);
        let mut rng = stream_rng(self.seed, Stream::Covariance);
        let mut blocks = vec![CMatrix::zeros(self.n, m); nb];
        for k in 0..m {
            let active = sample_wifi_activity(&self.clusters, &mut rng);
            let emissions: Vec<(usize, Complex64)> = active
                .iter()
                .map(|&l| (l, complex_gaussian(&mut rng) * self.wifi_power_mw[l].sqrt()))
                .collect();
            for (b, block) in blocks.iter_mut().enumerate() {
                let noise = complex_gaussian_vector(self.n, &mut rng) * noise_amp;
                block.set_column(k, &compose_idle_signal(&self.channels, b, &emissions, noise));
            }
        }
        blocks
    }

    /// Sample covariances after each of the increasing `checkpoints`
    /// snapshot counts, all read from one snapshot stream.
    pub fn estimated_covariances(&self, checkpoints: &[usize]) -> Result<Vec<Vec<CovarianceEstimate>>> {
        if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("covariance.samples", "checkpoints must be strictly increasing"));
        }
        let Some(&last) = checkpoints.last() else {
            return Ok(Vec::new());
        };
        if checkpoints[0] == 0 {
            return Err(Error::EmptySnapshots);
        }
        let blocks = self.listening_snapshots(last);
        let mut out: Vec<Vec<CovarianceEstimate>> = vec![Vec::new(); checkpoints.len()];
        for block in &blocks {
            let mut acc = CovarianceAccumulator::new(self.n);
            let mut done = 0;
            for (c, &m) in checkpoints.iter().enumerate() {
                acc.push_block(&block.columns(done, m - done).into_owned());
                done = m;
                out[c].push(acc.estimate()?);
            }
        }
        Ok(out)
    }

    /// Covariances in the configured mode.
    pub fn covariances(&self) -> Result<Vec<CovarianceEstimate>> {
        match self.config.m_c() {
            None => Ok(self.exact_covariances()),
            Some(m) => Ok(self.estimated_covariances(&[m])?.pop().unwrap_or_default()),
        }
    }

    /// Nulls and projectors of every base station.
    pub fn projectors(
        &self,
        covs: &[CovarianceEstimate],
        scheme: Scheme,
        policy: DofPolicy,
    ) -> Result<Vec<(usize, ProjectorPair)>> {
        let nb = self.layout.num_bss();
        if scheme == Scheme::Conventional {
            return Ok((0..nb).map(|_| (0, ProjectorPair::identity(self.n))).collect());
        }
        if covs.len() != nb {
            return Err(Error::MissingGeometry(format!("{} covariances for {nb} base stations", covs.len())));
        }
        let noise = self.config.bs_noise_mw();
        covs.iter()
            .map(|cov| {
                let rank = match policy {
                    DofPolicy::NoiseRank { margin } => Some(noise_rank(&cov.eigvals, noise, margin)),
                    _ => None,
                };
                let alloc = allocate_dof(self.n, self.config.scheduler.k_i, cov.m_c, policy, rank)?;
                Ok((alloc.d_i, dominant_subspace(cov, alloc.d_i)?))
            })
            .collect()
    }

    /// Runs listening, pilots, precoding and metric evaluation.
    pub fn evaluate(&self, covs: &[CovarianceEstimate], scheme: Scheme, policy: DofPolicy) -> Result<DropMetrics> {
        self.evaluate_inner(covs, scheme, policy).map_err(|e| e.in_drop(self.seed))
    }

    fn evaluate_inner(&self, covs: &[CovarianceEstimate], scheme: Scheme, policy: DofPolicy) -> Result<DropMetrics> {
        let nb = self.layout.num_bss();
        let projectors = self.projectors(covs, scheme, policy)?;
        // the detector statistic is averaged over symbols and over which
        // device of each hotspot is on air
        let activity = activity_probabilities(&self.wifi);
        let emitters: Vec<(usize, f64)> = (0..self.wifi.len()).map(|l| (l, activity[l] * self.wifi_power_mw[l])).collect();
        let noise_bs = self.config.bs_noise_mw();
        let lbt: Vec<LbtOutcome> = projectors
            .iter()
            .enumerate()
            .map(|(b, (_, p))| {
                let measured = expected_filtered_power(&p.pi_perp, &self.channels, b, &emitters, noise_bs);
                lbt_decision(measured, self.config.phy.lbt_threshold_dbm)
            })
            .collect();

        let everyone = vec![true; nb];
        let passed: Vec<bool> = lbt.iter().map(|o| o.passed).collect();
        let forced = self.transmit(&projectors, &everyone)?;
        let gated = if passed == everyone { None } else { Some(self.transmit(&projectors, &passed)?) };
        let gated_ref = gated.as_ref().unwrap_or(&forced);

        let bandwidth = self.config.channel.bandwidth_hz;
        let ues = (0..self.slot_bs.len())
            .map(|slot| {
                let bs = self.slot_bs[slot];
                let on = gated_ref.transmitted[bs];
                let sinr = if on { gated_ref.sinr[slot] } else { 0.0 };
                UeRecord { ue: self.channels.ues[slot], bs, sinr, rate_bps: ue_rate(sinr, on, bandwidth) }
            })
            .collect();

        let mut cluster_max = vec![0.0f64; self.clusters.len()];
        for d in &self.wifi {
            cluster_max[d.cluster] = cluster_max[d.cluster].max(gated_ref.wifi_mw[d.id]);
        }
        let mut per_sector = vec![Vec::new(); nb];
        for (c, members) in self.clusters.iter().enumerate() {
            if let Some(&first) = members.first() {
                per_sector[self.wifi[first].sector].push(cluster_max[c]);
            }
        }
        let sector_wifi_rate_mbps = per_sector
            .iter()
            .map(|c| wifi_sector_rate(c, self.config.phy.lbt_threshold_dbm, self.config.wifi.rate_per_cluster_mbps))
            .collect();

        let bss = (0..nb)
            .map(|b| BsRecord {
                bs: b,
                d_i: projectors[b].0,
                served: self.cell_slots[b].len(),
                shortfall: self.selections[b].shortfall,
                lbt: lbt[b],
                transmitted: gated_ref.transmitted[b],
                precoding_failed: gated_ref.failed[b],
            })
            .collect();

        Ok(DropMetrics {
            seed: self.seed,
            n_antennas: self.n,
            scheme,
            bss,
            ues,
            wifi_forced_mw: forced.wifi_mw.clone(),
            wifi_gated_mw: gated_ref.wifi_mw.clone(),
            sector_wifi_rate_mbps,
        })
    }

    /// Pilots, channel estimation and precoding at the `active` base
    /// stations, then SINR and Wi-Fi interference once all precoders exist.
    fn transmit(&self, projectors: &[(usize, ProjectorPair)], active: &[bool]) -> Result<RoundOutcome> {
        let nb = self.layout.num_bss();
        let uplink: Vec<PilotTransmission> = self
            .uplink
            .iter()
            .filter(|t| active[self.slot_bs[t.slot]])
            .copied()
            .collect();
        let p_b = dbm_to_mw(self.config.power.bs_dbm);
        let mut transmissions = Vec::new();
        let mut failed = vec![false; nb];
        for b in (0..nb).filter(|&b| active[b]) {
            let slots = &self.cell_slots[b];
            if slots.is_empty() {
                continue;
            }
            let y = received_pilot_block(
                &self.channels,
                b,
                &uplink,
                &self.pilot_book,
                &self.wifi_pilot,
                &self.pilot_noise[b],
            );
            let pilots: Vec<usize> = slots.iter().map(|&s| self.uplink[s].pilot).collect();
            let scale: Vec<f64> = slots.iter().map(|&s| self.csi_scale[s]).collect();
            let ids: Vec<usize> = slots.iter().map(|&s| self.channels.ues[s]).collect();
            let csi = estimate_ue_channels(&y, &self.pilot_book, &projectors[b].1.pi_perp, &pilots, &scale, &ids)?;
            match zf_precoder(&csi.normalized, self.config.phy.condition_bound) {
                Ok(p) => transmissions.push(BsTransmission { bs: b, slots: slots.clone(), w: p.w, power_mw: p_b }),
                Err(Error::PrecodingFailure { condition, .. }) => {
                    log::debug!("drop {:#x}: BS {b} silent, Gram condition {condition:e}", self.seed);
                    failed[b] = true;
                }
                Err(e) => return Err(e),
            }
        }

        let wifi_active: Vec<(usize, f64)> =
            self.interval_active.iter().map(|&l| (l, self.wifi_power_mw[l])).collect();
        let noise_ue = self.config.ue_noise_mw();
        let mut sinr = vec![0.0; self.slot_bs.len()];
        let mut transmitted = vec![false; nb];
        for (i, t) in transmissions.iter().enumerate() {
            transmitted[t.bs] = true;
            for (col, &slot) in t.slots.iter().enumerate() {
                sinr[slot] = ue_sinr(i, col, &transmissions, &self.channels, &wifi_active, noise_ue).sinr();
            }
        }
        let wifi_mw = (0..self.wifi.len())
            .map(|l| wifi_interference(l, &transmissions, &self.channels))
            .collect();
        Ok(RoundOutcome { sinr, transmitted, failed, wifi_mw })
    }
}

/// Runs one drop with the configured antenna count, covariance mode, scheme
/// and null rule.
pub fn run_drop(config: &SimulationConfig, seed: u64) -> Result<DropMetrics> {
    let n = config
        .array
        .antennas
        .ok_or_else(|| Error::config("array.antennas", "antenna count is required"))?;
    let ctx = DropContext::prepare(config, seed, n)?;
    let covs = match config.scheme {
        Scheme::MmimoU => ctx.covariances().map_err(|e| e.in_drop(seed))?,
        Scheme::Conventional => Vec::new(),
    };
    ctx.evaluate(&covs, config.scheme, config.dof_policy())
}

