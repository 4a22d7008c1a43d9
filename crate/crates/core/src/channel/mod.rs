//! Slow and fast fading for every link class.
//!
//! Slow fading (path loss, shadowing, element gain) is drawn once per drop
//! for every base station to UE, base station to Wi-Fi and Wi-Fi to UE pair.
//! Fast fading is realized per coherence interval, and only for the links the
//! transmission chain needs: all base stations toward the selected UEs and
//! toward every Wi-Fi device, and every Wi-Fi device toward the selected UEs.

pub mod antenna;
pub mod fading;
pub mod pathloss;

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CVector;
use crate::topology::{wrap_angle_deg, BaseStation, NetworkLayout, Position, UserEquipment, WiFiDevice};
use crate::units::db_to_linear;

pub use antenna::{element_gain, steering_vector, ElementPattern};
pub use fading::{
    fast_fading_scalar, fast_fading_vector, ricean_k, shadowing_sample, KFactorRule, LinkKind, Shadowing,
};
pub use pathloss::{path_loss_bs_link, path_loss_d2d, D2dModel, UmaModel};

const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Large-scale gain of one link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlowFading {
    /// Linear power gain, `10^((antenna_gain - path_loss - shadowing)/10)`.
    pub gain: f64,
    pub path_loss_db: f64,
    pub shadowing_db: f64,
    pub antenna_gain_db: f64,
    pub los: bool,
    pub k_factor_db: f64,
    /// Horizontal distance after wrap-around.
    pub distance_m: f64,
    /// Angle of the far end from array broadside, degrees.
    pub azimuth_off_deg: f64,
}

impl SlowFading {
    fn compose(path_loss_db: f64, shadowing_db: f64, antenna_gain_db: f64) -> f64 {
        db_to_linear(antenna_gain_db - path_loss_db - shadowing_db)
    }
}

/// Every model constant that enters link generation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel {
    pub carrier_ghz: f64,
    pub uma: UmaModel,
    pub d2d: D2dModel,
    pub shadowing: Shadowing,
    pub k_rule: KFactorRule,
    pub pattern: ElementPattern,
    /// Element spacing in wavelengths.
    pub spacing: f64,
}

impl Default for ChannelModel {
    fn default() -> Self {
        Self {
            carrier_ghz: 5.15,
            uma: UmaModel::default(),
            d2d: D2dModel::default(),
            shadowing: Shadowing::default(),
            k_rule: KFactorRule::default(),
            pattern: ElementPattern::default(),
            spacing: 0.5,
        }
    }
}

impl ChannelModel {
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / (self.carrier_ghz * 1e9)
    }

    /// Slow fading from a sector base station to a device at `target`.
    pub fn bs_link<R: Rng + ?Sized>(
        &self,
        layout: &NetworkLayout,
        bs: &BaseStation,
        target: Position,
        target_height: f64,
        rng: &mut R,
    ) -> SlowFading {
        let disp = layout.wrap_displacement(bs.position, target);
        let d2 = disp.norm();
        let dh = bs.height - target_height;
        let d3 = d2.hypot(dh);
        let los = rng.random::<f64>() < UmaModel::los_probability(d2);
        let uma = UmaModel {
            bs_height: bs.height,
            ue_height: target_height,
            ..self.uma
        };
        let path_loss_db = uma.path_loss(d3, self.carrier_ghz, los);
        let kind = if los { LinkKind::BsLos } else { LinkKind::BsNlos };
        let shadowing_db = self.shadowing.sample(kind, rng);
        let azimuth_off_deg = if d2 > 0.0 {
            wrap_angle_deg(disp.azimuth_deg() - bs.sector_azimuth)
        } else {
            0.0
        };
        let elevation = dh.atan2(d2).to_degrees();
        let antenna_gain_db = self.pattern.gain(azimuth_off_deg, elevation - bs.downtilt);
        SlowFading {
            gain: SlowFading::compose(path_loss_db, shadowing_db, antenna_gain_db),
            path_loss_db,
            shadowing_db,
            antenna_gain_db,
            los,
            k_factor_db: self.k_rule.k_db(d2),
            distance_m: d2,
            azimuth_off_deg,
        }
    }

    /// Slow fading between two ground devices (isotropic antennas).
    pub fn device_link<R: Rng + ?Sized>(
        &self,
        layout: &NetworkLayout,
        a: Position,
        b: Position,
        rng: &mut R,
    ) -> SlowFading {
        let d = layout.wrap_displacement(a, b).norm();
        let los = rng.random::<f64>() < D2dModel::los_probability(d);
        let path_loss_db = self.d2d.path_loss(d, self.carrier_ghz, los);
        let shadowing_db = self.shadowing.sample(LinkKind::DeviceToDevice, rng);
        SlowFading {
            gain: SlowFading::compose(path_loss_db, shadowing_db, 0.0),
            path_loss_db,
            shadowing_db,
            antenna_gain_db: 0.0,
            los,
            k_factor_db: self.k_rule.k_db(d),
            distance_m: d,
            azimuth_off_deg: 0.0,
        }
    }
}

/// Slow fading of every link in a drop, stored densely.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlowFadingTable {
    pub num_bss: usize,
    pub num_ues: usize,
    pub num_wifi: usize,
    bs_ue: Vec<SlowFading>,
    bs_wifi: Vec<SlowFading>,
    wifi_ue: Vec<SlowFading>,
}

impl SlowFadingTable {
    pub fn bs_ue(&self, bs: usize, ue: usize) -> &SlowFading {
        &self.bs_ue[bs * self.num_ues + ue]
    }

    pub fn bs_wifi(&self, bs: usize, wifi: usize) -> &SlowFading {
        &self.bs_wifi[bs * self.num_wifi + wifi]
    }

    pub fn wifi_ue(&self, wifi: usize, ue: usize) -> &SlowFading {
        &self.wifi_ue[wifi * self.num_ues + ue]
    }
}

/// Heights of the ground devices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceHeights {
    pub ue: f64,
    pub wifi: f64,
}

impl Default for DeviceHeights {
    fn default() -> Self {
        Self { ue: 1.5, wifi: 1.5 }
    }
}

/// Draws slow fading for every link, base station major.
pub fn slow_fading_table<R: Rng + ?Sized>(
    model: &ChannelModel,
    layout: &NetworkLayout,
    ues: &[UserEquipment],
    wifi: &[WiFiDevice],
    heights: DeviceHeights,
    rng: &mut R,
) -> SlowFadingTable {
    let mut bs_ue = Vec::with_capacity(layout.num_bss() * ues.len());
    let mut bs_wifi = Vec::with_capacity(layout.num_bss() * wifi.len());
    for bs in &layout.bss {
        for ue in ues {
            bs_ue.push(model.bs_link(layout, bs, ue.position, heights.ue, rng));
        }
        for w in wifi {
            bs_wifi.push(model.bs_link(layout, bs, w.position, heights.wifi, rng));
        }
    }
    let mut wifi_ue = Vec::with_capacity(wifi.len() * ues.len());
    for w in wifi {
        for ue in ues {
            wifi_ue.push(model.device_link(layout, w.position, ue.position, rng));
        }
    }
    SlowFadingTable {
        num_bss: layout.num_bss(),
        num_ues: ues.len(),
        num_wifi: wifi.len(),
        bs_ue,
        bs_wifi,
        wifi_ue,
    }
}

/// Channel realization of one coherence interval.
///
/// `h` holds base station to UE vectors for the UEs listed in `ues` (slot
/// order), `g` base station to Wi-Fi vectors, and `q` Wi-Fi to UE scalars.
/// The same `g` serves for listening at the base station and for the
/// interference the base station causes at the device.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub ues: Vec<usize>,
    pub num_bss: usize,
    /// Array size of every base station.
    pub antennas: Vec<usize>,
    pub num_wifi: usize,
    h: Vec<CVector>,
    g: Vec<CVector>,
    q: Vec<Complex64>,
}

impl ChannelSet {
    pub fn h(&self, bs: usize, slot: usize) -> &CVector {
        &self.h[bs * self.ues.len() + slot]
    }

    pub fn g(&self, bs: usize, wifi: usize) -> &CVector {
        &self.g[bs * self.num_wifi + wifi]
    }

    pub fn q(&self, wifi: usize, slot: usize) -> Complex64 {
        self.q[wifi * self.ues.len() + slot]
    }

    pub fn g_dim(&self, bs: usize) -> usize {
        self.antennas[bs]
    }

    /// Builds a channel set from explicit coefficients, laid out as the
    /// accessors read them.
    pub fn from_parts(
        ues: Vec<usize>,
        antennas: Vec<usize>,
        num_wifi: usize,
        h: Vec<CVector>,
        g: Vec<CVector>,
        q: Vec<Complex64>,
    ) -> Result<Self> {
        let num_bss = antennas.len();
        if h.len() != num_bss * ues.len() || g.len() != num_bss * num_wifi || q.len() != num_wifi * ues.len() {
            return Err(Error::MissingGeometry("channel coefficient counts do not match the link sets".into()));
        }
        Ok(Self { ues, num_bss, antennas, num_wifi, h, g, q })
    }
}

/// Composes `sqrt(slow gain) x fast fading` for the links listed in the type
/// docs of [`ChannelSet`].
pub fn realize_channels<R: Rng + ?Sized>(
    model: &ChannelModel,
    layout: &NetworkLayout,
    slow: &SlowFadingTable,
    ues: &[usize],
    rng: &mut R,
) -> Result<ChannelSet> {
    if slow.num_bss != layout.num_bss() {
        return Err(Error::MissingGeometry(format!(
            "slow fading covers {} base stations, layout has {}",
            slow.num_bss,
            layout.num_bss()
        )));
    }
    if let Some(&bad) = ues.iter().find(|&&u| u >= slow.num_ues) {
        return Err(Error::MissingGeometry(format!("no slow fading for UE {bad}")));
    }
    let vector = |bs: &BaseStation, sf: &SlowFading, rng: &mut R| {
        let a = steering_vector(bs.antennas, model.spacing, sf.azimuth_off_deg);
        fast_fading_vector(sf.k_factor_db, &a, rng) * Complex64::new(sf.gain.sqrt(), 0.0)
    };
    let mut h = Vec::with_capacity(layout.num_bss() * ues.len());
    let mut g = Vec::with_capacity(layout.num_bss() * slow.num_wifi);
    for bs in &layout.bss {
        for &ue in ues {
            h.push(vector(bs, slow.bs_ue(bs.id, ue), rng));
        }
        for w in 0..slow.num_wifi {
            g.push(vector(bs, slow.bs_wifi(bs.id, w), rng));
        }
    }
    let lambda = model.wavelength();
    let mut q = Vec::with_capacity(slow.num_wifi * ues.len());
    for w in 0..slow.num_wifi {
        for &ue in ues {
            let sf = slow.wifi_ue(w, ue);
            let phasor = Complex64::from_polar(1.0, -2.0 * PI * sf.distance_m / lambda);
            q.push(fast_fading_scalar(sf.k_factor_db, phasor, rng) * sf.gain.sqrt());
        }
    }
    Ok(ChannelSet {
        ues: ues.to_vec(),
        num_bss: layout.num_bss(),
        antennas: layout.bss.iter().map(|b| b.antennas).collect(),
        num_wifi: slow.num_wifi,
        h,
        g,
        q,
    })
}
