//! Decay classification from window suprema of |x^m f^{(j)}(x)|.

use serde::{Deserialize, Serialize};

use crate::error::{QopError, Result};
use crate::numerics::{Sampler, Spike};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecayClass {
    RapidDecay,
    PolynomialDecay,
    NonDecaying,
    Unbounded,
}

/// Window suprema for one (m, j) pair on one side of the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowSeries {
    pub m: u32,
    pub j: u32,
    pub side: i8,
    pub sups: Vec<f64>,
    pub growing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub class: DecayClass,
    /// (m, j) pairs whose weighted derivative grows without bound.
    pub failures: Vec<(u32, u32)>,
    pub series: Vec<WindowSeries>,
}

impl DecayReport {
    pub fn fails_at(&self, m: u32, j: u32) -> bool {
        self.failures.contains(&(m, j))
    }
}

const FIRST_WINDOW: i32 = 3;
const LAST_WINDOW: i32 = 14;
const SAMPLES_PER_WINDOW: usize = 64;

/// Last four suprema strictly increase and at least double.
fn is_growing(s: &[f64]) -> bool {
    let n = s.len();
    if n < 4 {
        return false;
    }
    let tail = &s[n - 4..];
    let increasing = tail.windows(2).all(|w| w[1] > w[0]);
    increasing && (tail[3].is_infinite() || tail[3] >= 2.0 * tail[0])
}

fn is_decaying(s: &[f64]) -> bool {
    let first = s.first().copied().unwrap_or(0.0);
    let last = s.last().copied().unwrap_or(0.0);
    last.is_finite() && (last == 0.0 || last <= 0.5 * first)
}

/// Fourth-order central derivative of order `j` (0, 1 or 2) at a sample point.
fn fd(f: &dyn Sampler, at: &Sample, j: u32) -> f64 {
    let (d, v): (f64, Box<dyn Fn(f64) -> num_complex::Complex64>) = match at.spike {
        Some(s) => ((s.half_width / 16.0).min(1e-3 * at.x.abs()), Box::new(move |t| f.eval_near(&s, t))),
        None => (1e-3 * at.x.abs().max(1.0), Box::new(move |t| f.eval(at.x + t))),
    };
    match j {
        0 => v(0.0).norm(),
        1 => ((v(-2.0 * d) - v(2.0 * d)) + (v(d) - v(-d)) * 8.0).norm() / (12.0 * d),
        _ => (-(v(2.0 * d) + v(-2.0 * d)) + (v(d) + v(-d)) * 16.0 - v(0.0) * 30.0).norm() / (12.0 * d * d),
    }
}

struct Sample {
    x: f64,
    spike: Option<Spike>,
}

/// Classifies decay at infinity over windows [2^j, 2^{j+1}], j = 3..14, on both sides.
pub fn schwartz_probe(f: &dyn Sampler, max_poly_degree: u32, max_deriv: u32) -> Result<DecayReport> {
    if max_poly_degree > 8 || max_deriv > 2 {
        return Err(QopError::Precondition(format!(
            "decay probe supports m ≤ 8 and j ≤ 2, got m = {max_poly_degree}, j = {max_deriv}"
        )));
    }
    let mut series = Vec::new();
    for side in [1i8, -1] {
        // Sample points per window, including spike centers.
        let windows: Vec<Vec<Sample>> = (FIRST_WINDOW..=LAST_WINDOW)
            .map(|w| {
                let lo = 2f64.powi(w);
                let hi = 2.0 * lo;
                let step = (hi - lo) / (SAMPLES_PER_WINDOW - 1) as f64;
                let (a, b) = if side > 0 { (lo, hi) } else { (-hi, -lo) };
                let mut xs: Vec<Sample> = (0..SAMPLES_PER_WINDOW)
                    .map(|i| Sample { x: side as f64 * (lo + i as f64 * step), spike: None })
                    .collect();
                xs.extend(f.spikes(a, b).into_iter().map(|s| Sample { x: s.center, spike: Some(s) }));
                xs
            })
            .collect();
        for j in 0..=max_deriv {
            let base: Vec<Vec<(f64, f64)>> = windows
                .iter()
                .map(|xs| xs.iter().map(|p| (p.x, fd(f, p, j))).collect())
                .collect();
            for m in 0..=max_poly_degree {
                let sups: Vec<f64> = base
                    .iter()
                    .map(|w| w.iter().map(|(x, v)| x.abs().powi(m as i32) * v).fold(0.0, f64::max))
                    .collect();
                let growing = is_growing(&sups);
                series.push(WindowSeries { m, j, side, sups, growing });
            }
        }
    }
    let zeroth: Vec<&WindowSeries> = series.iter().filter(|s| s.m == 0 && s.j == 0).collect();
    let mut failures: Vec<(u32, u32)> = series.iter().filter(|s| s.growing).map(|s| (s.m, s.j)).collect();
    failures.sort_unstable();
    failures.dedup();
    let class = if zeroth.iter().any(|s| s.growing) {
        DecayClass::Unbounded
    } else if !zeroth.iter().all(|s| is_decaying(&s.sups)) {
        DecayClass::NonDecaying
    } else if failures.is_empty() {
        DecayClass::RapidDecay
    } else {
        DecayClass::PolynomialDecay
    };
    Ok(DecayReport { class, failures, series })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::catalog_get;
    use crate::operator::Constants;

    fn classify(name: &str) -> DecayReport {
        let f = catalog_get(name, &Constants::default()).unwrap();
        schwartz_probe(&f, 8, 2).unwrap()
    }

    #[test]
    fn gaussian_decays_rapidly() {
        assert_eq!(classify("gaussian(1)").class, DecayClass::RapidDecay);
    }

    #[test]
    fn a_eigenfunction_decays_only_polynomially() {
        let r = classify("A_eigenfunction_f");
        assert_eq!(r.class, DecayClass::PolynomialDecay);
        assert!(r.fails_at(3, 0));
        assert!(!r.fails_at(1, 0));
    }

    #[test]
    fn spike_train_is_unbounded() {
        assert_eq!(classify("unbounded_L2").class, DecayClass::Unbounded);
    }

    #[test]
    fn plane_wave_and_triangles_do_not_decay() {
        assert_eq!(classify("plane_wave(2)").class, DecayClass::NonDecaying);
        assert_eq!(classify("triangle_sum").class, DecayClass::NonDecaying);
    }

    #[test]
    fn rejects_out_of_range_orders() {
        let f = catalog_get("gaussian", &Constants::default()).unwrap();
        assert!(matches!(schwartz_probe(&f, 9, 0), Err(QopError::Precondition(_))));
    }
}
