use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QopError, Result};

/// Whether a grid covers a genuine compact interval or a truncation of the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GridKind {
    Compact,
    /// `[-radius, radius]` standing in for ℝ.
    TruncatedLine { radius: f64 },
}

/// Uniform grid with `n_points` nodes from `a` to `b` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    kind: GridKind,
    a: f64,
    b: f64,
    n_points: usize,
    h: f64,
}

pub const MIN_POINTS: usize = 8;

impl Grid {
    pub fn compact(a: f64, b: f64, n_points: usize) -> Result<Self> {
        Self::build(GridKind::Compact, a, b, n_points)
    }

    pub fn line(radius: f64, n_points: usize) -> Result<Self> {
        Self::build(GridKind::TruncatedLine { radius }, -radius, radius, n_points)
    }

    fn build(kind: GridKind, a: f64, b: f64, n_points: usize) -> Result<Self> {
        if n_points < MIN_POINTS {
            return Err(QopError::Structural(format!(
                "grid needs at least {MIN_POINTS} points, got {n_points}"
            )));
        }
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(QopError::Structural(format!(
                "grid endpoints must be finite with a < b, got [{a}, {b}]"
            )));
        }
        let h = (b - a) / (n_points - 1) as f64;
        Ok(Self { kind, a, b, n_points, h })
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn is_compact(&self) -> bool {
        matches!(self.kind, GridKind::Compact)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        self.n_points == 0
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.b
        } else {
            self.a + i as f64 * self.h
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.node(i))
    }

    /// Node sets agree up to rounding in the endpoints.
    pub fn same_nodes(&self, other: &Grid) -> bool {
        self.n_points == other.n_points
            && (self.a - other.a).abs() <= 1e-12 * (1.0 + self.a.abs())
            && (self.b - other.b).abs() <= 1e-12 * (1.0 + self.b.abs())
    }
}

/// Complex samples of a function on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<Complex64>,
    label: String,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(QopError::Structural(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(QopError::Input(format!(
                "non-finite sample at node {i} (x = {})",
                grid.node(i)
            )));
        }
        Ok(Self { grid, values, label: label.into() })
    }

    pub fn from_fn(grid: Grid, label: impl Into<String>, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.nodes().map(f).collect();
        Self::new(grid, values, label)
    }

    pub fn zeros(grid: Grid, label: impl Into<String>) -> Self {
        Self { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()], label: label.into() }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let values = self.values.iter().map(|v| v * c).collect();
        Self { grid: self.grid, values, label: self.label.clone() }
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: Complex64, other: &GridFunction, beta: Complex64) -> Result<Self> {
        check_same_grid(&self.grid, &other.grid)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(f, g)| alpha * f + beta * g)
            .collect();
        Ok(Self { grid: self.grid, values, label: format!("{}+{}", self.label, other.label) })
    }

    /// Pointwise `m(x) * f(x)`.
    pub fn multiply_by(&self, m: impl Fn(f64) -> Complex64) -> Self {
        let values = self
            .values
            .iter()
            .zip(self.grid.nodes())
            .map(|(v, x)| m(x) * v)
            .collect();
        Self { grid: self.grid, values, label: self.label.clone() }
    }
}

pub(crate) fn check_same_grid(a: &Grid, b: &Grid) -> Result<()> {
    if a.same_nodes(b) {
        Ok(())
    } else {
        Err(QopError::Structural(format!(
            "grid mismatch: [{}, {}]/{} vs [{}, {}]/{}",
            a.a(),
            a.b(),
            a.len(),
            b.a(),
            b.b(),
            b.len()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_endpoints() {
        let g = Grid::compact(-1.0, 1.0, 9).unwrap();
        assert_eq!(g.h(), 0.25);
        assert_eq!(g.node(0), -1.0);
        assert_eq!(g.node(8), 1.0);
        assert!(g.nodes().collect::<Vec<_>>().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn rejects_coarse_or_inverted_grids() {
        assert!(matches!(Grid::compact(0.0, 1.0, 7), Err(QopError::Structural(_))));
        assert!(matches!(Grid::compact(1.0, 0.0, 16), Err(QopError::Structural(_))));
        assert!(Grid::line(5.0, 8).is_ok());
    }

    #[test]
    fn rejects_non_finite_samples() {
        let g = Grid::compact(0.0, 1.0, 8).unwrap();
        let r = GridFunction::from_fn(g, "bad", |x| Complex64::new(1.0 / (x - 0.0), 0.0));
        assert!(matches!(r, Err(QopError::Input(_))));
    }
}
