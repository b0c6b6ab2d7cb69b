use num_complex::Complex64;

use super::grid::GridFunction;
use crate::error::{QopError, Result};

/// Finite-difference weights for the `m`-th derivative at `x0` from `nodes` (Fornberg).
pub fn fornberg_weights(x0: f64, nodes: &[f64], m: usize) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Stencil start index and width for derivative `order` at node `i` of `n`.
///
/// Interior nodes get the symmetric O(h²) stencil; near an edge the window of
/// `order + 2` nodes is clamped inside the grid, which keeps O(h²).
pub(crate) fn stencil_window(i: usize, n: usize, order: usize) -> (usize, usize) {
    let half = order.div_ceil(2);
    if i >= half && i + half < n {
        return (i - half, 2 * half + 1);
    }
    let width = order + 2;
    let start = if i < half { 0 } else { n - width };
    (start, width)
}

/// Weights in units of the grid step (multiply the sum by h^-order).
pub(crate) fn unit_weights(i: usize, n: usize, order: usize) -> (usize, Vec<f64>) {
    let (start, width) = stencil_window(i, n, order);
    let offsets: Vec<f64> = (0..width).map(|j| (start + j) as f64).collect();
    (start, fornberg_weights(i as f64, &offsets, order))
}

/// d^order f / dx^order with O(h²) accuracy at every node.
pub fn derivative(f: &GridFunction, order: usize) -> Result<GridFunction> {
    if !(1..=4).contains(&order) {
        return Err(QopError::Input(format!("derivative order {order} outside 1..=4")));
    }
    let n = f.grid().len();
    if n < 2 * order + 5 {
        return Err(QopError::Structural(format!(
            "order-{order} derivative needs at least {} nodes, grid has {n}",
            2 * order + 5
        )));
    }
    let scale = f.grid().h().powi(-(order as i32));
    let v = f.values();
    // Interior weights are shared; compute once.
    let (_, central) = unit_weights(n / 2, n, order);
    let half = order.div_ceil(2);
    let out = (0..n)
        .map(|i| {
            let s: Complex64 = if i >= half && i + half < n {
                central.iter().enumerate().map(|(j, w)| v[i - half + j] * *w).sum()
            } else {
                let (start, w) = unit_weights(i, n, order);
                w.iter().enumerate().map(|(j, w)| v[start + j] * *w).sum()
            };
            s * scale
        })
        .collect();
    GridFunction::new(*f.grid(), out, format!("d{order}({})", f.label()))
}
