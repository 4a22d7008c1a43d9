//! Simulation configuration with the reference scenario as defaults.
//!
//! The configuration is TOML; every key lives in a section, and dotted keys
//! such as `channel.bs_noise_figure_db = 7` work at top level. Unknown keys
//! are rejected.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelModel, D2dModel, DeviceHeights, ElementPattern, KFactorRule, Shadowing, UmaModel};
use crate::error::{Error, Result};
use crate::scheduler::DofPolicy;
use crate::topology::{build_layout, DropGeometry, NetworkLayout, WiFiProfile};
use crate::units::{dbm_to_mw, noise_power_dbm};

/// Transmission scheme of the base stations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Subspace nulling, projected energy detection and projected CSI.
    MmimoU,
    /// Plain energy detection and zero-forcing without nulls.
    Conventional,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::MmimoU => "mmimo_u",
            Scheme::Conventional => "conventional",
        }
    }
}

/// Source of the Wi-Fi covariance at the base stations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceMode {
    Exact,
    Estimated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayoutConfig {
    pub sites: usize,
    pub isd_m: f64,
    pub sectors_per_site: usize,
    pub ues_per_sector: f64,
    pub wifi_clusters_per_sector: usize,
    pub wifi_cluster_radius_m: f64,
    pub wifi_devices_per_cluster: usize,
    pub min_distance_m: f64,
    pub bs_height_m: f64,
    pub ue_height_m: f64,
    pub wifi_height_m: f64,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        Self {
            sites: 7,
            isd_m: 500.0,
            sectors_per_site: 3,
            ues_per_sector: 32.0,
            wifi_clusters_per_sector: 2,
            wifi_cluster_radius_m: 20.0,
            wifi_devices_per_cluster: 8,
            min_distance_m: 35.0,
            bs_height_m: 25.0,
            ue_height_m: 1.5,
            wifi_height_m: 1.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArrayConfig {
    /// Elements per base station; required by the `custom` experiment.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub antennas: Option<usize>,
    pub spacing_wavelengths: f64,
    pub downtilt_deg: f64,
    pub element_gain_dbi: f64,
    pub beamwidth_deg: f64,
    pub max_attenuation_db: f64,
}

impl Default for ArrayConfig {
    fn default() -> Self {
        Self {
            antennas: None,
            spacing_wavelengths: 0.5,
            downtilt_deg: 12.0,
            element_gain_dbi: 8.0,
            beamwidth_deg: 65.0,
            max_attenuation_db: 30.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerConfig {
    pub bs_dbm: f64,
    pub ap_dbm: f64,
    pub sta_dbm: f64,
}

impl Default for PowerConfig {
    fn default() -> Self {
        Self {
            bs_dbm: 30.0,
            ap_dbm: 24.0,
            sta_dbm: 18.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    pub carrier_ghz: f64,
    pub bandwidth_hz: f64,
    pub thermal_noise_dbm_hz: f64,
    pub ue_noise_figure_db: f64,
    pub bs_noise_figure_db: f64,
    pub shadow_sigma_bs_los_db: f64,
    pub shadow_sigma_bs_nlos_db: f64,
    pub shadow_sigma_d2d_db: f64,
    pub k_factor_intercept_db: f64,
    pub k_factor_slope_db_per_m: f64,
    pub bs_distance_floor_m: f64,
    pub d2d_distance_floor_m: f64,
    pub street_width_m: f64,
    pub building_height_m: f64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            carrier_ghz: 5.15,
            bandwidth_hz: 20e6,
            thermal_noise_dbm_hz: -174.0,
            ue_noise_figure_db: 9.0,
            bs_noise_figure_db: 5.0,
            shadow_sigma_bs_los_db: 4.0,
            shadow_sigma_bs_nlos_db: 6.0,
            shadow_sigma_d2d_db: 7.0,
            k_factor_intercept_db: 13.0,
            k_factor_slope_db_per_m: 0.03,
            bs_distance_floor_m: 35.0,
            d2d_distance_floor_m: 3.0,
            street_width_m: 20.0,
            building_height_m: 20.0,
        }
    }
}

/// Name of the rule choosing the number of nulls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DofPolicyName {
    Fraction,
    NoiseRank,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchedulerConfig {
    pub k_i: usize,
    /// Fixed number of nulls; overrides `dof_policy` when set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_i: Option<usize>,
    pub dof_policy: DofPolicyName,
    pub d_fraction: f64,
    pub noise_rank_margin_db: f64,
    pub sensitivity_dbm: f64,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        Self {
            k_i: 8,
            d_i: None,
            dof_policy: DofPolicyName::Fraction,
            d_fraction: 0.5,
            noise_rank_margin_db: 3.0,
            sensitivity_dbm: -94.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhyConfig {
    pub lbt_threshold_dbm: f64,
    pub pilots: usize,
    pub condition_bound: f64,
    pub ue_max_power_dbm: f64,
    /// Target received power per resource block.
    pub p0_dbm: f64,
    pub alpha: f64,
    /// Resource blocks a pilot spans; scales the per-block target.
    pub pilot_rbs: usize,
}

impl Default for PhyConfig {
    fn default() -> Self {
        Self {
            lbt_threshold_dbm: -62.0,
            pilots: 8,
            condition_bound: 1e12,
            ue_max_power_dbm: 23.0,
            p0_dbm: -58.0,
            alpha: 0.6,
            pilot_rbs: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CovarianceConfig {
    pub mode: CovarianceMode,
    /// Listening snapshots in estimated mode.
    pub samples: usize,
}

impl Default for CovarianceConfig {
    fn default() -> Self {
        Self {
            mode: CovarianceMode::Exact,
            samples: 512,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WifiConfig {
    pub rate_per_cluster_mbps: f64,
}

impl Default for WifiConfig {
    fn default() -> Self {
        Self { rate_per_cluster_mbps: 65.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateConfig {
    pub tolerance: f64,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        Self { tolerance: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub seed: u64,
    pub drops: usize,
    pub scheme: Scheme,
    /// Worker threads, 0 for one per core.
    pub threads: usize,
    pub output_dir: PathBuf,
    pub layout: LayoutConfig,
    pub array: ArrayConfig,
    pub power: PowerConfig,
    pub channel: ChannelConfig,
    pub scheduler: SchedulerConfig,
    pub phy: PhyConfig,
    pub covariance: CovarianceConfig,
    pub wifi: WifiConfig,
    pub validate: ValidateConfig,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            drops: 100,
            scheme: Scheme::MmimoU,
            threads: 0,
            output_dir: PathBuf::from("results"),
            layout: LayoutConfig::default(),
            array: ArrayConfig::default(),
            power: PowerConfig::default(),
            channel: ChannelConfig::default(),
            scheduler: SchedulerConfig::default(),
            phy: PhyConfig::default(),
            covariance: CovarianceConfig::default(),
            wifi: WifiConfig::default(),
            validate: ValidateConfig::default(),
        }
    }
}

impl SimulationConfig {
    /// The 19-site deployment instead of the 7-site default.
    pub fn full_scale(mut self) -> Self {
        self.layout.sites = 19;
        self
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration always serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: SimulationConfig = toml::from_str(text).map_err(|e| {
            let key = e.message().split('`').nth(1).unwrap_or("config").to_string();
            Error::config(key, e.to_string())
        })?;
        Ok(cfg)
    }

    pub fn ue_noise_mw(&self) -> f64 {
        let c = &self.channel;
        dbm_to_mw(noise_power_dbm(c.thermal_noise_dbm_hz, c.bandwidth_hz, c.ue_noise_figure_db))
    }

    pub fn bs_noise_mw(&self) -> f64 {
        let c = &self.channel;
        dbm_to_mw(noise_power_dbm(c.thermal_noise_dbm_hz, c.bandwidth_hz, c.bs_noise_figure_db))
    }

    pub fn channel_model(&self) -> ChannelModel {
        let c = &self.channel;
        ChannelModel {
            carrier_ghz: c.carrier_ghz,
            uma: UmaModel {
                bs_height: self.layout.bs_height_m,
                ue_height: self.layout.ue_height_m,
                street_width: c.street_width_m,
                building_height: c.building_height_m,
                min_distance: c.bs_distance_floor_m,
            },
            d2d: D2dModel {
                tx_height: self.layout.wifi_height_m,
                rx_height: self.layout.ue_height_m,
                min_distance: c.d2d_distance_floor_m,
            },
            shadowing: Shadowing {
                bs_los_db: c.shadow_sigma_bs_los_db,
                bs_nlos_db: c.shadow_sigma_bs_nlos_db,
                d2d_db: c.shadow_sigma_d2d_db,
            },
            k_rule: KFactorRule {
                intercept_db: c.k_factor_intercept_db,
                slope_db_per_m: c.k_factor_slope_db_per_m,
            },
            pattern: ElementPattern {
                max_gain_dbi: self.array.element_gain_dbi,
                beamwidth_deg: self.array.beamwidth_deg,
                max_attenuation_db: self.array.max_attenuation_db,
            },
            spacing: self.array.spacing_wavelengths,
        }
    }

    pub fn heights(&self) -> DeviceHeights {
        DeviceHeights {
            ue: self.layout.ue_height_m,
            wifi: self.layout.wifi_height_m,
        }
    }

    pub fn geometry(&self) -> DropGeometry {
        DropGeometry {
            min_distance: self.layout.min_distance_m,
        }
    }

    pub fn wifi_profile(&self) -> WiFiProfile {
        WiFiProfile {
            devices_per_cluster: self.layout.wifi_devices_per_cluster,
            ap_power_dbm: self.power.ap_dbm,
            sta_power_dbm: self.power.sta_dbm,
        }
    }

    /// Layout with every base station configured for `n` antennas.
    pub fn layout_for(&self, n: usize) -> Result<NetworkLayout> {
        let mut layout = build_layout(self.layout.sites, self.layout.isd_m, self.layout.sectors_per_site)?;
        for bs in &mut layout.bss {
            bs.antennas = n;
            bs.height = self.layout.bs_height_m;
            bs.downtilt = self.array.downtilt_deg;
            bs.tx_power_dbm = self.power.bs_dbm;
        }
        Ok(layout)
    }

    /// Null-count rule from the scheduler section.
    pub fn dof_policy(&self) -> DofPolicy {
        match (self.scheduler.d_i, self.scheduler.dof_policy) {
            (Some(d), _) => DofPolicy::Fixed { d },
            (None, DofPolicyName::Fraction) => DofPolicy::Fraction {
                fraction: self.scheduler.d_fraction,
            },
            (None, DofPolicyName::NoiseRank) => DofPolicy::NoiseRank {
                margin: 10f64.powf(self.scheduler.noise_rank_margin_db / 10.0),
            },
        }
    }

    /// Snapshot count bounding the subspace dimension, `None` when exact.
    pub fn m_c(&self) -> Option<usize> {
        match self.covariance.mode {
            CovarianceMode::Exact => None,
            CovarianceMode::Estimated => Some(self.covariance.samples),
        }
    }

    /// Checks value ranges and the degrees-of-freedom budget.
    pub fn validate(&self) -> Result<()> {
        if i64::try_from(self.seed).is_err() {
            return Err(Error::config("seed", "must be below 2^63 to survive a TOML round trip"));
        }
        let l = &self.layout;
        if ![1, 7, 19].contains(&l.sites) {
            return Err(Error::config("layout.sites", format!("{} is not one of 1, 7, 19", l.sites)));
        }
        positive("layout.isd_m", l.isd_m)?;
        positive("layout.ues_per_sector", l.ues_per_sector)?;
        if l.sectors_per_site == 0 {
            return Err(Error::config("layout.sectors_per_site", "must be at least 1"));
        }
        if l.wifi_devices_per_cluster == 0 {
            return Err(Error::config("layout.wifi_devices_per_cluster", "must be at least 1"));
        }
        if !(l.wifi_cluster_radius_m >= 0.0) {
            return Err(Error::config("layout.wifi_cluster_radius_m", "must be non-negative"));
        }
        if l.min_distance_m >= l.isd_m / 2.0 {
            return Err(Error::config("layout.min_distance_m", "must be below half the inter-site distance"));
        }
        positive("channel.carrier_ghz", self.channel.carrier_ghz)?;
        positive("channel.bandwidth_hz", self.channel.bandwidth_hz)?;
        positive("array.spacing_wavelengths", self.array.spacing_wavelengths)?;
        positive("phy.condition_bound", self.phy.condition_bound)?;
        for (key, s) in [
            ("channel.shadow_sigma_bs_los_db", self.channel.shadow_sigma_bs_los_db),
            ("channel.shadow_sigma_bs_nlos_db", self.channel.shadow_sigma_bs_nlos_db),
            ("channel.shadow_sigma_d2d_db", self.channel.shadow_sigma_d2d_db),
        ] {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::config(key, "must be a finite non-negative deviation"));
            }
        }
        if self.scheduler.k_i > self.phy.pilots {
            return Err(Error::config(
                "scheduler.k_i",
                format!("{} users need more than the {} available pilots", self.scheduler.k_i, self.phy.pilots),
            ));
        }
        if self.covariance.mode == CovarianceMode::Estimated && self.covariance.samples == 0 {
            return Err(Error::config("covariance.samples", "estimated mode needs at least one snapshot"));
        }
        if !(0.0..=1.0).contains(&self.scheduler.d_fraction) {
            return Err(Error::config("scheduler.d_fraction", "must lie in [0, 1]"));
        }
        if let Some(n) = self.array.antennas {
            self.check_dof("array.antennas", n)?;
        }
        if let Some(d) = self.scheduler.d_i {
            if let Some(m) = self.m_c() {
                if d > m {
                    return Err(Error::config(
                        "scheduler.d_i",
                        format!("{d} nulls exceed the {m} covariance snapshots"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// `K <= N` and a fixed `D <= N - K`.
    pub fn check_dof(&self, key: &str, n: usize) -> Result<()> {
        let k = self.scheduler.k_i;
        if k > n {
            return Err(Error::config(key, format!("{n} antennas cannot serve k_i = {k} users")));
        }
        if let Some(d) = self.scheduler.d_i {
            if d > n - k {
                return Err(Error::config(
                    "scheduler.d_i",
                    format!("{d} nulls exceed the {} spare dimensions of N = {n}, K = {k}", n - k),
                ));
            }
        }
        Ok(())
    }
}

fn positive(key: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(key, "must be positive and finite"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        let c = SimulationConfig::from_toml("").unwrap();
        assert_eq!(c, SimulationConfig::default());
        assert_eq!(c.array.antennas, None);
        assert_eq!(c.scheduler.k_i, 8);
        assert_eq!(c.phy.lbt_threshold_dbm, -62.0);
        assert!((crate::units::mw_to_dbm(c.ue_noise_mw()) + 91.99).abs() < 0.01);
        c.validate().unwrap();
    }

    #[test]
    fn round_trip() {
        let mut c = SimulationConfig::default();
        c.array.antennas = Some(64);
        c.scheduler.d_i = Some(12);
        c.covariance.mode = CovarianceMode::Estimated;
        c.scheme = Scheme::Conventional;
        let back = SimulationConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn dotted_keys_and_unknown_keys() {
        let c = SimulationConfig::from_toml("channel.bs_noise_figure_db = 7\n[array]\nantennas = 32\n").unwrap();
        assert_eq!(c.channel.bs_noise_figure_db, 7.0);
        assert_eq!(c.array.antennas, Some(32));
        let e = SimulationConfig::from_toml("channel.bogus = 1").unwrap_err();
        assert!(e.to_string().contains("bogus"), "{e}");
        let t = SimulationConfig::from_toml("drops = \"many\"").unwrap_err();
        assert!(matches!(t, Error::Config { .. }));
    }

    #[test]
    fn rejects_excess_nulls() {
        let mut c = SimulationConfig::default();
        c.array.antennas = Some(64);
        c.scheduler.d_i = Some(999);
        let e = c.validate().unwrap_err();
        assert!(e.to_string().contains("scheduler.d_i"), "{e}");
        c.scheduler.d_i = Some(56);
        c.validate().unwrap();
        c.layout.sites = 5;
        assert!(c.validate().unwrap_err().to_string().contains("layout.sites"));
    }

    #[test]
    fn policy_selection() {
        let mut c = SimulationConfig::default();
        assert_eq!(c.dof_policy(), DofPolicy::Fraction { fraction: 0.5 });
        c.scheduler.dof_policy = DofPolicyName::NoiseRank;
        assert!(matches!(c.dof_policy(), DofPolicy::NoiseRank { .. }));
        c.scheduler.d_i = Some(3);
        assert_eq!(c.dof_policy(), DofPolicy::Fixed { d: 3 });
    }
}
