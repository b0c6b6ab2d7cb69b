//! [P, Q] on an N-point periodic grid.
//!
//! P_N = (ℏ/i)D with D the wrapped fourth-order central difference, so P_N is
//! hermitian, and Q_N = diag(x_i). The commutator has zero trace for any N.
//! Rows whose stencil does not wrap act like (ℏ/i)·1 on smooth vectors; the
//! wrapped rows pick up x_j − x_i ≈ L and carry the whole trace deficit.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QopError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcrReport {
    pub n: usize,
    /// |Tr(P_N Q_N − Q_N P_N)|, from the matrix products.
    pub trace: f64,
    /// |mean diagonal of [P_N, Q_N] − ℏ/i|; equals ℏ whenever the trace vanishes.
    pub mean_diagonal_deviation: f64,
    /// max over unwrapped rows of |([P,Q]f)_i − (ℏ/i)f_i| for a smooth f.
    pub interior_row_deviation: f64,
    /// The same quantity over the wrapped rows.
    pub boundary_row_deviation: f64,
}

/// Fourth-order weights for d/dx at offsets −2..=2, in units of 1/h.
const D1: [f64; 5] = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];

pub fn finite_dim_ccr_probe(n: usize, hbar: f64) -> Result<CcrReport> {
    if !(2..=512).contains(&n) {
        return Err(QopError::Input(format!("N must lie in 2..=512, got {n}")));
    }
    let h = 1.0 / n as f64;
    let x: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
    let minus_i_hbar = Complex64::new(0.0, -hbar);
    let mut p = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for (k, w) in D1.iter().enumerate() {
            let j = (i as i64 + k as i64 - 2).rem_euclid(n as i64) as usize;
            p[(i, j)] += minus_i_hbar * (*w / h);
        }
    }
    let q = DMatrix::<Complex64>::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        x.iter().map(|v| Complex64::new(*v, 0.0)),
    ));
    let c = &p * &q - &q * &p;
    let trace = c.trace().norm();
    let mean_diagonal_deviation = (c.trace() / n as f64 - minus_i_hbar).norm();
    // A smooth, non-periodic test vector.
    let f: Vec<Complex64> = x.iter().map(|v| Complex64::new((1.3 * v).cos() + v * v, 0.5 * v)).collect();
    let fv = nalgebra::DVector::from_vec(f.clone());
    let cf = &c * &fv;
    let mut interior: f64 = 0.0;
    let mut boundary: f64 = 0.0;
    for i in 0..n {
        let dev = (cf[i] - minus_i_hbar * f[i]).norm();
        if i >= 2 && i + 2 < n {
            interior = interior.max(dev);
        } else {
            boundary = boundary.max(dev);
        }
    }
    Ok(CcrReport {
        n,
        trace,
        mean_diagonal_deviation,
        interior_row_deviation: interior,
        boundary_row_deviation: boundary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_vanishes_and_interior_rows_are_canonical() {
        for n in [4, 64, 256] {
            let r = finite_dim_ccr_probe(n, 1.0).unwrap();
            assert!(r.trace <= 1e-12, "{r:?}");
            assert!((r.mean_diagonal_deviation - 1.0).abs() <= 1e-12);
        }
        let r = finite_dim_ccr_probe(256, 1.0).unwrap();
        assert!(r.interior_row_deviation <= 1e-6, "{r:?}");
        let coarse = finite_dim_ccr_probe(64, 1.0).unwrap();
        // The wrapped rows grow like 1/h.
        let ratio = r.boundary_row_deviation / coarse.boundary_row_deviation;
        assert!((ratio - 4.0).abs() < 0.2, "{ratio}");
    }

    #[test]
    fn range_is_enforced() {
        assert!(finite_dim_ccr_probe(1, 1.0).is_err());
        assert!(finite_dim_ccr_probe(513, 1.0).is_err());
        assert!(finite_dim_ccr_probe(2, 1.0).is_ok());
    }
}
