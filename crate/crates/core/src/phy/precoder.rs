//! Zero-forcing precoder with unit total power.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Precoding weights of one base station, one column per served UE.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecoderState {
    pub w: CMatrix,
    /// `||H (H^H H)^-1||_F^2`.
    pub zeta: f64,
}

/// `W = H (H^H H)^-1 / sqrt(zeta)`. Fails when the Gram matrix has a
/// condition number above `condition_bound`.
pub fn zf_precoder(h_hat: &CMatrix, condition_bound: f64) -> Result<PrecoderState> {
    let (n, k) = h_hat.shape();
    if k == 0 {
        return Ok(PrecoderState { w: CMatrix::zeros(n, 0), zeta: 0.0 });
    }
    let gram = h_hat.adjoint() * h_hat;
    let gram = (&gram + gram.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(gram.clone());
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };
    if !(condition <= condition_bound) {
        return Err(Error::PrecodingFailure { condition, bound: condition_bound });
    }
    let inv = gram
        .cholesky()
        .ok_or(Error::PrecodingFailure { condition, bound: condition_bound })?
        .inverse();
    let a = h_hat * inv;
    let zeta = a.norm_squared();
    let w = a * Complex64::new(1.0 / zeta.sqrt(), 0.0);
    Ok(PrecoderState { w, zeta })
}
