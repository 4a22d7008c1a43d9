//! Sector element pattern and uniform linear array response.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::linalg::CVector;

/// 3GPP 36.873 single-element pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementPattern {
    pub max_gain_dbi: f64,
    pub beamwidth_deg: f64,
    /// Front-to-back ratio and side-lobe floor.
    pub max_attenuation_db: f64,
}

impl Default for ElementPattern {
    fn default() -> Self {
        Self {
            max_gain_dbi: 8.0,
            beamwidth_deg: 65.0,
            max_attenuation_db: 30.0,
        }
    }
}

impl ElementPattern {
    /// Gain at the given offsets from boresight. `elevation_off` is measured
    /// from the tilted boresight, positive below it.
    pub fn gain(&self, azimuth_off: f64, elevation_off: f64) -> f64 {
        let a_max = self.max_attenuation_db;
        let a_h = -(12.0 * (azimuth_off / self.beamwidth_deg).powi(2)).min(a_max);
        let a_v = -(12.0 * (elevation_off / self.beamwidth_deg).powi(2)).min(a_max);
        self.max_gain_dbi - (-(a_h + a_v)).min(a_max)
    }
}

/// Element gain of the default pattern.
pub fn element_gain(azimuth_off: f64, elevation_off: f64) -> f64 {
    ElementPattern::default().gain(azimuth_off, elevation_off)
}

/// Response of an `n`-element array with `spacing` wavelengths toward a
/// target at `theta_deg` from broadside.
pub fn steering_vector(n: usize, spacing: f64, theta_deg: f64) -> CVector {
    let s = theta_deg.to_radians().sin();
    CVector::from_fn(n, |k, _| Complex64::from_polar(1.0, -2.0 * PI * spacing * k as f64 * s))
}
