use num_complex::Complex64;

use super::grid::{check_same_grid, GridFunction};
use crate::error::Result;

/// Composite Simpson weights (times h) for `n` uniform nodes.
///
/// An odd number of intervals closes with a Simpson 3/8 panel on the last three.
pub(crate) fn simpson_weights(n: usize) -> Vec<f64> {
    debug_assert!(n >= 4);
    let intervals = n - 1;
    let mut w = vec![0.0; n];
    let simpson_end = if intervals.is_multiple_of(2) { intervals } else { intervals - 3 };
    let mut i = 0;
    while i < simpson_end {
        w[i] += 1.0 / 3.0;
        w[i + 1] += 4.0 / 3.0;
        w[i + 2] += 1.0 / 3.0;
        i += 2;
    }
    if simpson_end < intervals {
        let s = simpson_end;
        w[s] += 3.0 / 8.0;
        w[s + 1] += 9.0 / 8.0;
        w[s + 2] += 9.0 / 8.0;
        w[s + 3] += 3.0 / 8.0;
    }
    w
}

/// ∫ f over the grid of `f`.
pub fn simpson(f: &GridFunction) -> Complex64 {
    let h = f.grid().h();
    simpson_weights(f.grid().len())
        .iter()
        .zip(f.values())
        .map(|(w, v)| v * *w)
        .sum::<Complex64>()
        * h
}

/// Simpson rule on real samples spaced by `h`.
pub fn simpson_real(values: &[f64], h: f64) -> f64 {
    simpson_weights(values.len())
        .iter()
        .zip(values)
        .map(|(w, v)| w * v)
        .sum::<f64>()
        * h
}

/// ⟨f, g⟩ = ∫ conj(f) g, conjugate-linear in the first slot.
pub fn inner_product(f: &GridFunction, g: &GridFunction) -> Result<Complex64> {
    check_same_grid(f.grid(), g.grid())?;
    let h = f.grid().h();
    let w = simpson_weights(f.grid().len());
    let s: Complex64 = w
        .iter()
        .zip(f.values().iter().zip(g.values()))
        .map(|(w, (a, b))| a.conj() * b * *w)
        .sum();
    Ok(s * h)
}

/// ‖f‖ from the Simpson inner product.
pub fn norm(f: &GridFunction) -> f64 {
    let h = f.grid().h();
    simpson_weights(f.grid().len())
        .iter()
        .zip(f.values())
        .map(|(w, v)| w * v.norm_sqr())
        .sum::<f64>()
        .max(0.0)
        .sqrt()
        * h.sqrt()
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const K15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c);
    let mut k = K15_WEIGHTS[7] * fc;
    let mut g = G7_WEIGHTS[3] * fc;
    for i in 0..7 {
        let dx = r * GK_NODES[i];
        let s = f(c - dx) + f(c + dx);
        k += K15_WEIGHTS[i] * s;
        if i % 2 == 1 {
            g += G7_WEIGHTS[i / 2] * s;
        }
    }
    (k * r, ((k - g) * r).abs())
}

/// Adaptive Gauss–Kronrod (7/15) integral of a real function on `[a, b]`.
///
/// Returns the estimate and its error bound. Non-finite samples propagate into
/// the estimate so the caller can detect them.
pub fn gauss_kronrod<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rtol: f64, max_panels: usize) -> (f64, f64) {
    if a == b {
        return (0.0, 0.0);
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut panels = vec![(a, b, v, e)];
    loop {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if !total.is_finite() || err <= rtol * total.abs().max(1e-300) || panels.len() >= max_panels {
            return (total, err);
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (pa, pb, _, _) = panels.swap_remove(worst);
        let mid = 0.5 * (pa + pb);
        if mid <= pa || mid >= pb {
            return (total, err);
        }
        let (v1, e1) = gk15(&mut f, pa, mid);
        let (v2, e2) = gk15(&mut f, mid, pb);
        panels.push((pa, mid, v1, e1));
        panels.push((mid, pb, v2, e2));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::grid::Grid;
    use std::f64::consts::PI;

    fn gauss(grid: Grid) -> GridFunction {
        GridFunction::from_fn(grid, "g", |x| Complex64::new((-x * x).exp(), 0.0)).unwrap()
    }

    #[test]
    fn gaussian_overlap_matches_closed_form() {
        let g = gauss(Grid::line(10.0, 2049).unwrap());
        let v = inner_product(&g, &g).unwrap();
        assert!((v.re - (PI / 2.0).sqrt()).abs() < 1e-8, "{v}");
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn even_node_counts_stay_accurate() {
        let g = gauss(Grid::line(10.0, 2048).unwrap());
        let v = inner_product(&g, &g).unwrap();
        assert!((v.re - (PI / 2.0).sqrt()).abs() < 1e-8, "{v}");
    }

    #[test]
    fn simpson_exact_on_cubics() {
        for n in [8usize, 9, 10, 11] {
            let grid = Grid::compact(0.0, 2.0, n).unwrap();
            let f = GridFunction::from_fn(grid, "c", |x| Complex64::new(x * x * x - x, 0.0)).unwrap();
            assert!((simpson(&f).re - 2.0).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn well_modes_are_orthogonal() {
        let grid = Grid::compact(-1.0, 1.0, 2049).unwrap();
        let p1 = GridFunction::from_fn(grid, "1", |x| Complex64::new((PI * x / 2.0).cos(), 0.0)).unwrap();
        let p2 = GridFunction::from_fn(grid, "2", |x| Complex64::new((PI * x).sin(), 0.0)).unwrap();
        assert!(inner_product(&p1, &p2).unwrap().norm() < 1e-10);
    }

    #[test]
    fn zero_function_has_zero_norm() {
        let z = GridFunction::zeros(Grid::compact(0.0, 1.0, 16).unwrap(), "0");
        assert_eq!(inner_product(&z, &z).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(norm(&z), 0.0);
    }

    #[test]
    fn mismatched_grids_are_structural_errors() {
        let a = gauss(Grid::line(10.0, 101).unwrap());
        let b = gauss(Grid::line(10.0, 103).unwrap());
        assert!(matches!(inner_product(&a, &b), Err(crate::QopError::Structural(_))));
    }

    #[test]
    fn kronrod_handles_peaked_integrands() {
        let (v, _) = gauss_kronrod(|x| (-1e4 * (x - 0.3) * (x - 0.3)).exp(), 0.0, 1.0, 1e-12, 200);
        assert!((v - (PI / 1e4).sqrt()).abs() < 1e-12);
        let (w, _) = gauss_kronrod(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10, 400);
        assert!((w - 2.0).abs() < 1e-6);
    }
}
