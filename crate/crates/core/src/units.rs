//! Power unit conversions. Linear powers are carried in milliwatts throughout
//! the crate.

#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[inline]
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[inline]
pub fn dbm_to_mw(dbm: f64) -> f64 {
    db_to_linear(dbm)
}

#[inline]
pub fn mw_to_dbm(mw: f64) -> f64 {
    linear_to_db(mw)
}

/// Thermal noise power in dBm over `bandwidth_hz` for a receiver with the
/// given noise figure.
pub fn noise_power_dbm(psd_dbm_per_hz: f64, bandwidth_hz: f64, noise_figure_db: f64) -> f64 {
    psd_dbm_per_hz + 10.0 * bandwidth_hz.log10() + noise_figure_db
}
