//! Log-normal shadowing and Ricean small-scale fading.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::linalg::{complex_gaussian, CVector};

/// Which shadowing law a link follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkKind {
    BsLos,
    BsNlos,
    DeviceToDevice,
}

/// Shadowing standard deviations in dB per link kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shadowing {
    pub bs_los_db: f64,
    pub bs_nlos_db: f64,
    pub d2d_db: f64,
}

impl Default for Shadowing {
    fn default() -> Self {
        Self {
            bs_los_db: 4.0,
            bs_nlos_db: 6.0,
            d2d_db: 7.0,
        }
    }
}

impl Shadowing {
    pub fn sigma(&self, kind: LinkKind) -> f64 {
        match kind {
            LinkKind::BsLos => self.bs_los_db,
            LinkKind::BsNlos => self.bs_nlos_db,
            LinkKind::DeviceToDevice => self.d2d_db,
        }
    }

    /// Zero-mean Gaussian shadowing in dB. A zero deviation consumes no
    /// randomness.
    pub fn sample<R: Rng + ?Sized>(&self, kind: LinkKind, rng: &mut R) -> f64 {
        shadowing_sample(self.sigma(kind), rng)
    }
}

pub fn shadowing_sample<R: Rng + ?Sized>(sigma_db: f64, rng: &mut R) -> f64 {
    if sigma_db == 0.0 {
        return 0.0;
    }
    Normal::new(0.0, sigma_db).expect("finite shadowing deviation").sample(rng)
}

/// Distance-dependent Ricean K factor, linear in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KFactorRule {
    pub intercept_db: f64,
    pub slope_db_per_m: f64,
}

impl Default for KFactorRule {
    fn default() -> Self {
        Self {
            intercept_db: 13.0,
            slope_db_per_m: 0.03,
        }
    }
}

impl KFactorRule {
    pub fn k_db(&self, d2d: f64) -> f64 {
        self.intercept_db - self.slope_db_per_m * d2d
    }
}

pub fn ricean_k(d2d: f64) -> f64 {
    KFactorRule::default().k_db(d2d)
}

/// Weights of the deterministic and scattered parts for a K factor in dB.
fn mixture_weights(k_db: f64) -> (f64, f64) {
    if k_db == f64::INFINITY {
        return (1.0, 0.0);
    }
    if k_db == f64::NEG_INFINITY {
        return (0.0, 1.0);
    }
    let k = 10f64.powf(k_db / 10.0);
    ((k / (k + 1.0)).sqrt(), (1.0 / (k + 1.0)).sqrt())
}

/// Ricean vector around `los_steering` with unit mean power per entry when
/// the steering entries have unit modulus. An infinite K returns the
/// steering vector unchanged and draws nothing.
pub fn fast_fading_vector<R: Rng + ?Sized>(k_db: f64, los_steering: &CVector, rng: &mut R) -> CVector {
    let (a, b) = mixture_weights(k_db);
    if b == 0.0 {
        return los_steering.clone();
    }
    CVector::from_fn(los_steering.len(), |n, _| los_steering[n] * a + complex_gaussian(rng) * b)
}

/// Scalar counterpart of [`fast_fading_vector`].
pub fn fast_fading_scalar<R: Rng + ?Sized>(k_db: f64, los_phasor: Complex64, rng: &mut R) -> Complex64 {
    let (a, b) = mixture_weights(k_db);
    if b == 0.0 {
        return los_phasor;
    }
    los_phasor * a + complex_gaussian(rng) * b
}
