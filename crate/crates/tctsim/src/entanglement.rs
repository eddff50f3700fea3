//! Logarithmic negativity of two-qubit states.
//!
//! `E_N(rho) = log2 ||rho^{T_B}||_1` with the trace norm evaluated through a
//! Hermitian eigendecomposition of the partial transpose (it stays Hermitian,
//! so singular values are absolute eigenvalues).

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg;

/// Partial transpose over the second qubit on the {gg, ge, eg, ee} basis
/// (index `2 i_a + i_b`).
pub fn partial_transpose(rho: &Array2<C64>) -> Result<Array2<C64>> {
    if rho.dim() != (4, 4) {
        return Err(Error::DimensionMismatch(format!(
            "partial transpose expects 4x4, got {:?}",
            rho.dim()
        )));
    }
    let mut out = Array2::zeros((4, 4));
    for ia in 0..2 {
        for ja in 0..2 {
            for ib in 0..2 {
                for jb in 0..2 {
                    // <ia jb| rho^T_B |ja ib> = <ia ib| rho |ja jb>
                    out[[2 * ia + jb, 2 * ja + ib]] = rho[[2 * ia + ib, 2 * ja + jb]];
                }
            }
        }
    }
    Ok(out)
}

/// Logarithmic negativity; tiny negative values from floating-point noise
/// are clamped to zero.
pub fn log_negativity(rho: &Array2<C64>) -> Result<f64> {
    let pt = partial_transpose(rho)?;
    let (vals, _) = linalg::eigh(&pt)?;
    let trace_norm: f64 = vals.iter().map(|v| v.abs()).sum();
    let en = trace_norm.log2();
    if en < 0.0 {
        if en > -1e-10 {
            return Ok(0.0);
        }
        return Ok(en.max(0.0));
    }
    Ok(en)
}

/// E_N for every state of a sampled evolution restricted to the two-qubit
/// basis.
pub fn log_negativity_series(states: &[Array2<C64>]) -> Result<Vec<f64>> {
    states.iter().map(log_negativity).collect()
}
