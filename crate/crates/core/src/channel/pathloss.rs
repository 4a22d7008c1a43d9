//! Path loss and line-of-sight probability models.
//!
//! Base station links use the 3GPP 36.814 urban macro model. Device to device
//! links (Wi-Fi to UE, Wi-Fi to Wi-Fi) use the WINNER+ B1 based outdoor model
//! of 3GPP 36.843, with the urban micro line-of-sight probability.

use log::{debug, warn};

const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Urban macro model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UmaModel {
    pub bs_height: f64,
    pub ue_height: f64,
    pub street_width: f64,
    pub building_height: f64,
    /// Distances below this are clamped.
    pub min_distance: f64,
}

impl Default for UmaModel {
    fn default() -> Self {
        Self {
            bs_height: 25.0,
            ue_height: 1.5,
            street_width: 20.0,
            building_height: 20.0,
            min_distance: 35.0,
        }
    }
}

impl UmaModel {
    /// Break point distance computed with effective heights (1 m environment
    /// height removed).
    pub fn breakpoint(&self, fc_ghz: f64) -> f64 {
        4.0 * (self.bs_height - 1.0) * (self.ue_height - 1.0) * fc_ghz * 1e9 / SPEED_OF_LIGHT
    }

    pub fn path_loss(&self, d3d: f64, fc_ghz: f64, los: bool) -> f64 {
        let d = if d3d < self.min_distance {
            warn!("BS link distance {d3d:.2} m below {} m floor, clamping", self.min_distance);
            self.min_distance
        } else {
            d3d
        };
        if los {
            self.los(d, fc_ghz)
        } else {
            self.nlos(d, fc_ghz)
        }
    }

    fn los(&self, d: f64, fc: f64) -> f64 {
        if d <= self.breakpoint(fc) {
            22.0 * d.log10() + 28.0 + 20.0 * fc.log10()
        } else {
            let hb = self.bs_height - 1.0;
            let hu = self.ue_height - 1.0;
            40.0 * d.log10() + 7.8 - 18.0 * hb.log10() - 18.0 * hu.log10() + 2.0 * fc.log10()
        }
    }

    fn nlos(&self, d: f64, fc: f64) -> f64 {
        let (w, h, hbs, hut) = (self.street_width, self.building_height, self.bs_height, self.ue_height);
        161.04 - 7.1 * w.log10() + 7.5 * h.log10()
            - (24.37 - 3.7 * (h / hbs).powi(2)) * hbs.log10()
            + (43.42 - 3.1 * hbs.log10()) * (d.log10() - 3.0)
            + 20.0 * fc.log10()
            - (3.2 * (11.75 * hut).log10().powi(2) - 4.97)
    }

    /// Probability that a link with horizontal distance `d2d` is in line of sight.
    pub fn los_probability(d2d: f64) -> f64 {
        (18.0 / d2d).min(1.0) * (1.0 - (-d2d / 63.0).exp()) + (-d2d / 63.0).exp()
    }
}

/// Urban macro path loss with the default geometry (25 m BS, 1.5 m device).
pub fn path_loss_bs_link(d3d: f64, fc_ghz: f64, los: bool) -> f64 {
    UmaModel::default().path_loss(d3d, fc_ghz, los)
}

/// Outdoor device to device model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct D2dModel {
    pub tx_height: f64,
    pub rx_height: f64,
    pub min_distance: f64,
}

impl Default for D2dModel {
    fn default() -> Self {
        Self {
            tx_height: 1.5,
            rx_height: 1.5,
            min_distance: 3.0,
        }
    }
}

impl D2dModel {
    pub fn breakpoint(&self, fc_ghz: f64) -> f64 {
        4.0 * self.tx_height * self.rx_height * fc_ghz * 1e9 / SPEED_OF_LIGHT
    }

    pub fn path_loss(&self, d: f64, fc_ghz: f64, los: bool) -> f64 {
        let d = if d < self.min_distance {
            if d > 0.0 {
                debug!("device link distance {d:.2} m below {} m floor, clamping", self.min_distance);
            }
            self.min_distance
        } else {
            d
        };
        let pl_los = self.los(d, fc_ghz);
        if los {
            pl_los
        } else {
            pl_los.max(36.7 * d.log10() + 22.7 + 26.0 * fc_ghz.log10())
        }
    }

    fn los(&self, d: f64, fc: f64) -> f64 {
        if d <= self.breakpoint(fc) {
            22.7 * d.log10() + 27.0 + 20.0 * fc.log10()
        } else {
            40.0 * d.log10() + 7.56 - 17.3 * self.tx_height.log10() - 17.3 * self.rx_height.log10()
                + 2.7 * fc.log10()
        }
    }

    /// Urban micro line-of-sight probability at horizontal distance `d`.
    pub fn los_probability(d: f64) -> f64 {
        (18.0 / d).min(1.0) * (1.0 - (-d / 36.0).exp()) + (-d / 36.0).exp()
    }
}

/// Device to device path loss with 1.5 m terminals.
pub fn path_loss_d2d(d: f64, fc_ghz: f64, los: bool) -> f64 {
    D2dModel::default().path_loss(d, fc_ghz, los)
}
