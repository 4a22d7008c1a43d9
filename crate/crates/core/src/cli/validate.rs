//! Fast invariant checks on a one-site instance built from the configured
//! channel and scheduler parameters.

use crate::error::Result;
use crate::linalg::{norm_sq, CMatrix};
use crate::phy::{conventional_lbt, enhanced_lbt, zf_precoder};
use crate::rng::{drop_seed, stream_rng, Stream};
use crate::scheduler::{allocate_dof, noise_rank, DofPolicy};
use crate::sim::activity::sample_wifi_activity;
use crate::sim::{DropContext, SimulationConfig};
use crate::subspace::{dominant_subspace, sample_idle_signal, IdleSnapshot, ProjectorPair};

/// Outcome of one invariant: passed when `value <= tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub antennas: usize,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed()).map(|c| c.name).collect()
    }

    /// Fixed-width pass/fail table.
    pub fn table(&self) -> String {
        let mut s = format!("{:<32} {:>12} {:>12}  result\n", "invariant", "value", "tolerance");
        for c in &self.checks {
            let verdict = if c.passed() { "pass" } else { "FAIL" };
            s.push_str(&format!("{:<32} {:>12.3e} {:>12.3e}  {verdict}\n", c.name, c.value, c.tolerance));
        }
        s
    }
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Runs the invariant suite. The array size is the configured one, or 16.
pub fn cmd_validate(config: &SimulationConfig) -> Result<ValidationReport> {
    let tol = config.validate.tolerance;
    let n = config.array.antennas.unwrap_or(16);
    let mut cfg = config.clone();
    cfg.layout.sites = 1;
    cfg.layout.wifi_clusters_per_sector = cfg.layout.wifi_clusters_per_sector.max(1);
    cfg.check_dof("array.antennas", n)?;
    let ctx = DropContext::prepare(&cfg, drop_seed(cfg.seed, 0), n)?;
    let covs = ctx.exact_covariances();
    let policy = cfg.dof_policy();
    let noise = cfg.bs_noise_mw();

    let mut budget_violations = 0usize;
    let mut idempotence = 0.0f64;
    let mut complement = 0.0f64;
    let mut pairs = Vec::new();
    for cov in &covs {
        let rank = match policy {
            DofPolicy::NoiseRank { margin } => Some(noise_rank(&cov.eigvals, noise, margin)),
            _ => None,
        };
        let alloc = allocate_dof(n, cfg.scheduler.k_i, cov.m_c, policy, rank)?;
        budget_violations += !alloc.is_admissible(n, cov.m_c) as usize;
        let p = dominant_subspace(cov, alloc.d_i)?;
        idempotence = idempotence.max(max_abs(&(&p.pi_perp * &p.pi_perp - &p.pi_perp)));
        idempotence = idempotence.max(max_abs(&(&p.pi * &p.pi - &p.pi)));
        complement = complement.max(max_abs(&(&p.pi + &p.pi_perp - CMatrix::identity(n, n))));
        complement = complement.max(max_abs(&(&p.pi * &p.pi_perp)));
        pairs.push(p);
    }

    // listening snapshots for the detector checks
    let mut rng = stream_rng(ctx.seed, Stream::Covariance);
    let mut energy = 0.0f64;
    let mut lbt_mismatch = 0usize;
    for (b, p) in pairs.iter().enumerate() {
        let snaps: Vec<IdleSnapshot> = (0..32)
            .map(|i| {
                let active = sample_wifi_activity(&ctx.clusters, &mut rng);
                sample_idle_signal(&ctx.channels, b, &active, &ctx.wifi_power_mw, noise, i, &mut rng)
            })
            .collect();
        for s in &snaps {
            let total = norm_sq(&s.z);
            let split = norm_sq(&(&p.pi * &s.z)) + norm_sq(&(&p.pi_perp * &s.z));
            energy = energy.max((split - total).abs() / total);
        }
        let plain = conventional_lbt(&snaps, cfg.phy.lbt_threshold_dbm);
        let open = enhanced_lbt(&ProjectorPair::identity(n).pi_perp, &snaps, cfg.phy.lbt_threshold_dbm);
        lbt_mismatch += (plain.measured_mw.to_bits() != open.measured_mw.to_bits() || plain.passed != open.passed) as usize;
    }

    // zero forcing on the true projected channels
    let mut leakage = 0.0f64;
    let mut outside = 0.0f64;
    for (b, p) in pairs.iter().enumerate() {
        let slots = &ctx.cell_slots[b];
        if slots.is_empty() {
            continue;
        }
        let mut h = CMatrix::zeros(n, slots.len());
        for (k, &s) in slots.iter().enumerate() {
            h.set_column(k, &(&p.pi_perp * ctx.channels.h(b, s)));
        }
        let w = zf_precoder(&h, cfg.phy.condition_bound)?.w;
        for (k, &s) in slots.iter().enumerate() {
            let hk = ctx.channels.h(b, s);
            let gains: Vec<f64> = w.column_iter().map(|c| hk.dotc(&c).norm_sqr()).collect();
            let other: f64 = gains.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, g)| g).sum();
            leakage = leakage.max(other / gains[k]);
        }
        for c in w.column_iter() {
            outside = outside.max((&p.pi * c).norm() / c.norm());
        }
    }

    let checks = vec![
        Check { name: "dof_budget_violations", value: budget_violations as f64, tolerance: 0.0 },
        Check { name: "projector_idempotence", value: idempotence, tolerance: tol },
        Check { name: "projector_complementarity", value: complement, tolerance: tol },
        Check { name: "lbt_energy_conservation", value: energy, tolerance: tol },
        Check { name: "elbt_equals_lbt_without_nulls", value: lbt_mismatch as f64, tolerance: 0.0 },
        Check { name: "zf_intra_cell_leakage", value: leakage, tolerance: tol },
        Check { name: "precoder_outside_complement", value: outside, tolerance: tol },
    ];
    Ok(ValidationReport { antennas: n, checks })
}
