use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QopError, Result};
use crate::numerics::stencil::fornberg_weights;
use crate::numerics::GridFunction;

/// (ψ(a), …, ψ^{(k−1)}(a), ψ(b), …, ψ^{(k−1)}(b)).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTrace {
    pub order: usize,
    pub vector: Vec<Complex64>,
}

impl BoundaryTrace {
    pub fn new(order: usize, vector: Vec<Complex64>) -> Result<Self> {
        if vector.len() != 2 * order {
            return Err(QopError::Structural(format!(
                "a trace of order {order} has {} entries, got {}",
                2 * order,
                vector.len()
            )));
        }
        Ok(Self { order, vector })
    }

    /// ψ^{(j)} at the left end.
    pub fn left(&self, j: usize) -> Complex64 {
        self.vector[j]
    }

    /// ψ^{(j)} at the right end.
    pub fn right(&self, j: usize) -> Complex64 {
        self.vector[self.order + j]
    }
}

/// One-sided O(h²) boundary traces up to derivative order k−1.
pub fn boundary_trace(f: &GridFunction, k: usize) -> Result<BoundaryTrace> {
    let grid = f.grid();
    if !grid.is_compact() {
        return Err(QopError::Input("boundary traces need a compact interval, not a truncated line".into()));
    }
    if k > 4 {
        return Err(QopError::Input(format!("trace order {k} exceeds 4")));
    }
    let n = grid.len();
    let h = grid.h();
    let v = f.values();
    let mut left = Vec::with_capacity(k);
    let mut right = Vec::with_capacity(k);
    for j in 0..k {
        if j == 0 {
            left.push(v[0]);
            right.push(v[n - 1]);
            continue;
        }
        let width = j + 2;
        let offsets: Vec<f64> = (0..width).map(|i| i as f64).collect();
        let w = fornberg_weights(0.0, &offsets, j);
        let scale = h.powi(-(j as i32));
        let l: Complex64 = w.iter().enumerate().map(|(i, w)| v[i] * *w).sum();
        // Mirror the stencil for the right end; odd derivatives flip sign.
        let r: Complex64 = w.iter().enumerate().map(|(i, w)| v[n - 1 - i] * *w).sum();
        let sign = if j % 2 == 1 { -1.0 } else { 1.0 };
        left.push(l * scale);
        right.push(r * scale * sign);
    }
    left.extend(right);
    BoundaryTrace::new(k, left)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::catalog_get;
    use crate::numerics::Grid;
    use crate::operator::Constants;
    use std::f64::consts::TAU;

    fn sampled(name: &str, a: f64, b: f64, n: usize) -> GridFunction {
        catalog_get(name, &Constants::default())
            .unwrap()
            .sample(&Grid::compact(a, b, n).unwrap())
            .unwrap()
    }

    #[test]
    fn parabola_traces() {
        let t = boundary_trace(&sampled("parabola_well", -1.0, 1.0, 1025), 2).unwrap();
        let c = 15f64.sqrt() / 4.0;
        assert!(t.left(0).norm() < 1e-4 && t.right(0).norm() < 1e-4);
        assert!((t.left(1).re - 2.0 * c).abs() < 1e-4);
        assert!((t.right(1).re + 2.0 * c).abs() < 1e-4);
    }

    #[test]
    fn circle_mode_is_periodic() {
        let t = boundary_trace(&sampled("circle_mode(1)", 0.0, TAU, 1025), 1).unwrap();
        let want = 1.0 / TAU.sqrt();
        assert!((t.left(0).re - want).abs() < 1e-6 && (t.right(0).re - want).abs() < 1e-6);
    }

    #[test]
    fn ground_state_curvature_vanishes_at_walls() {
        let t = boundary_trace(&sampled("well_eigenfunction(1)", -1.0, 1.0, 2049), 3).unwrap();
        for j in [0, 2] {
            assert!(t.left(j).norm() < 1e-3 && t.right(j).norm() < 1e-3, "j={j}: {t:?}");
        }
        assert!((t.left(1).re - std::f64::consts::FRAC_PI_2).abs() < 1e-3);
    }

    #[test]
    fn truncated_lines_have_no_trace() {
        let f = catalog_get("gaussian", &Constants::default())
            .unwrap()
            .sample(&Grid::line(5.0, 101).unwrap())
            .unwrap();
        assert!(matches!(boundary_trace(&f, 1), Err(QopError::Input(_))));
    }
}
