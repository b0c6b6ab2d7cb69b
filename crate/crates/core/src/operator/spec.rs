use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::constants::Constants;
use super::poly::{binomial, Poly};
use crate::error::{QopError, Result};
use crate::numerics::{derivative, fornberg_weights, GridFunction, Sampler, Spike};

/// Which physical observable an expression stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorKind {
    Position,
    Momentum,
    AngularMomentum,
    /// Multiplication by the angle φ on [0, 2π].
    Angle,
    Hamiltonian,
    HamiltonianSquared,
    /// PQ³ + Q³P.
    AOperator,
    /// Anything produced by the operator algebra.
    Composite,
}

/// A differential expression Σ c_j(x) d^j/dx^j with polynomial coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec {
    name: String,
    kind: OperatorKind,
    coefficients: Vec<Poly>,
    constants: Constants,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl OperatorSpec {
    pub fn new(name: impl Into<String>, kind: OperatorKind, mut coefficients: Vec<Poly>, constants: Constants) -> Result<Self> {
        constants.validate()?;
        while coefficients.last().is_some_and(Poly::is_zero) {
            coefficients.pop();
        }
        let name = name.into();
        if coefficients.is_empty() {
            return Err(QopError::Input(format!("operator '{name}' has every coefficient identically zero")));
        }
        let order = coefficients.len() - 1;
        if !matches!(order, 0 | 1 | 2 | 4) {
            return Err(QopError::Unsupported(format!("operator '{name}' has order {order}; supported orders are 0, 1, 2, 4")));
        }
        Ok(Self { name, kind, coefficients, constants })
    }

    /// Q: multiplication by x.
    pub fn position(k: Constants) -> Self {
        Self::fixed("Q", OperatorKind::Position, vec![Poly::monomial(c(1.0, 0.0), 1)], k)
    }

    /// P = (ℏ/i) d/dx.
    pub fn momentum(k: Constants) -> Self {
        Self::fixed("P", OperatorKind::Momentum, vec![Poly::zero(), Poly::constant(c(0.0, -k.hbar))], k)
    }

    /// L_z = (ℏ/i) d/dφ on the circle.
    pub fn angular_momentum(k: Constants) -> Self {
        Self::fixed("L_z", OperatorKind::AngularMomentum, vec![Poly::zero(), Poly::constant(c(0.0, -k.hbar))], k)
    }

    /// Multiplication by φ.
    pub fn angle(k: Constants) -> Self {
        Self::fixed("phi", OperatorKind::Angle, vec![Poly::monomial(c(1.0, 0.0), 1)], k)
    }

    /// H = −(ℏ²/2m) d²/dx².
    pub fn hamiltonian(k: Constants) -> Self {
        let c2 = -k.hbar * k.hbar / (2.0 * k.mass);
        Self::fixed("H", OperatorKind::Hamiltonian, vec![Poly::zero(), Poly::zero(), Poly::constant(c(c2, 0.0))], k)
    }

    /// H² = (ℏ⁴/4m²) d⁴/dx⁴.
    pub fn hamiltonian_squared(k: Constants) -> Self {
        let c4 = k.hbar.powi(4) / (4.0 * k.mass * k.mass);
        let mut co = vec![Poly::zero(); 4];
        co.push(Poly::constant(c(c4, 0.0)));
        Self::fixed("H^2", OperatorKind::HamiltonianSquared, co, k)
    }

    /// A = PQ³ + Q³P = (ℏ/i)(3x² + 2x³ d/dx).
    pub fn a_operator(k: Constants) -> Self {
        let c0 = Poly::monomial(c(0.0, -3.0 * k.hbar), 2);
        let c1 = Poly::monomial(c(0.0, -2.0 * k.hbar), 3);
        Self::fixed("A", OperatorKind::AOperator, vec![c0, c1], k)
    }

    fn fixed(name: &str, kind: OperatorKind, co: Vec<Poly>, k: Constants) -> Self {
        Self { name: name.into(), kind, coefficients: co, constants: k }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[Poly] {
        &self.coefficients
    }

    /// c_j, or zero above the order.
    pub fn coefficient(&self, j: usize) -> Poly {
        self.coefficients.get(j).cloned().unwrap_or_default()
    }

    pub fn constants(&self) -> &Constants {
        &self.constants
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Leading coefficient is a constant.
    pub fn has_constant_leading_coefficient(&self) -> bool {
        self.coefficients.last().and_then(Poly::degree) == Some(0)
    }

    /// Formal (integration-by-parts) adjoint Σ_j (−1)^j d^j ∘ conj(c_j).
    pub fn formal_adjoint(&self) -> Result<Self> {
        let k = self.order();
        let mut out = vec![Poly::zero(); k + 1];
        for (j, cj) in self.coefficients.iter().enumerate() {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let cc = cj.conj();
            for (i, slot) in out.iter_mut().enumerate().take(j + 1) {
                let term = cc.derivative_n(j - i).scale(c(sign * binomial(j, i), 0.0));
                *slot = &*slot + &term;
            }
        }
        Self::new(format!("{}^‡", self.name), self.kind, out, self.constants)
    }

    /// self ∘ other.
    pub fn compose(&self, other: &OperatorSpec) -> Result<Self> {
        let order = self.order() + other.order();
        let mut out = vec![Poly::zero(); order + 1];
        for (j, aj) in self.coefficients.iter().enumerate() {
            for (l, bl) in other.coefficients.iter().enumerate() {
                for i in 0..=j {
                    let term = &(aj * &bl.derivative_n(j - i)).scale(c(binomial(j, i), 0.0));
                    out[i + l] = &out[i + l] + term;
                }
            }
        }
        let tol = 1e-13 * out.iter().map(Poly::max_abs).fold(1.0, f64::max);
        let out = out.iter().map(|p| p.chop(tol)).collect();
        Self::new(format!("{}{}", self.name, other.name), OperatorKind::Composite, out, self.constants)
    }

    pub fn sum(&self, other: &OperatorSpec, beta: Complex64) -> Result<Self> {
        let n = self.coefficients.len().max(other.coefficients.len());
        let out = (0..n)
            .map(|j| &self.coefficient(j) + &other.coefficient(j).scale(beta))
            .collect::<Vec<_>>();
        let tol = 1e-13 * out.iter().map(Poly::max_abs).fold(1.0, f64::max);
        let out = out.iter().map(|p| p.chop(tol)).collect();
        Self::new(format!("{}+({beta}){}", self.name, other.name), OperatorKind::Composite, out, self.constants)
    }

    /// [A, B] = AB − BA.
    pub fn commutator(a: &OperatorSpec, b: &OperatorSpec) -> Result<Self> {
        let ab = a.compose(b)?;
        let ba = b.compose(a)?;
        Ok(ab.sum(&ba, c(-1.0, 0.0))?.with_name(format!("[{},{}]", a.name, b.name)))
    }

    /// Σ c_j(x)·(d^j f)(x) with O(h²) finite differences.
    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        let mut acc = f.multiply_by(|x| self.coefficients[0].eval(x));
        for (j, cj) in self.coefficients.iter().enumerate().skip(1) {
            if cj.is_zero() {
                continue;
            }
            let d = derivative(f, j)?;
            acc = acc.combine(c(1.0, 0.0), &d.multiply_by(|x| cj.eval(x)), c(1.0, 0.0))?;
        }
        Ok(acc.with_label(format!("{}({})", self.name, f.label())))
    }

    /// `op f` as a pointwise sampler, using seven-point differences of `f`.
    pub fn image_sampler(&self, f: Arc<dyn Sampler>) -> ImageSampler {
        ImageSampler { op: self.clone(), f, interval: None }
    }
}

impl fmt::Display for OperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(j, p)| if j == 0 { format!("[{p}]") } else { format!("[{p}] d^{j}") })
            .collect();
        write!(f, "{} = {}", self.name, terms.join(" + "))
    }
}

/// Pointwise image of a sampler under an operator.
pub struct ImageSampler {
    op: OperatorSpec,
    f: Arc<dyn Sampler>,
    interval: Option<(f64, f64)>,
}

const CENTRAL7: [[f64; 7]; 5] = [
    [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
    [-1.0 / 60.0, 3.0 / 20.0, -3.0 / 4.0, 0.0, 3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0],
    [1.0 / 90.0, -3.0 / 20.0, 3.0 / 2.0, -49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0],
    [1.0 / 8.0, -1.0, 13.0 / 8.0, 0.0, -13.0 / 8.0, 1.0, -1.0 / 8.0],
    [-1.0 / 6.0, 2.0, -13.0 / 2.0, 28.0 / 3.0, -13.0 / 2.0, 2.0, -1.0 / 6.0],
];

/// Relative step per derivative order, balancing truncation against roundoff.
const REL_STEP: [f64; 5] = [0.0, 1e-3, 2e-3, 1e-2, 5e-2];

impl ImageSampler {
    /// Keeps every stencil inside [a, b]; near an end the stencil turns one-sided.
    pub fn within(mut self, a: f64, b: f64) -> Self {
        self.interval = Some((a, b));
        self
    }

    fn step(j: usize, x: f64) -> f64 {
        let scale = if j == 1 { x.abs().clamp(1e-2, 1e3) } else { x.abs().clamp(1.0, 1e3) };
        REL_STEP[j] * scale
    }

    fn derivative_at(&self, j: usize, x: f64) -> Complex64 {
        let mut h = Self::step(j, x);
        if let Some((a, b)) = self.interval {
            h = h.min((b - a) / 12.0);
            if x - 3.0 * h < a || x + 3.0 * h > b {
                let left = (x - 3.0 * h).max(a).min(b - 6.0 * h);
                let nodes: Vec<f64> = (0..7).map(|i| left + i as f64 * h).collect();
                let w = fornberg_weights(x, &nodes, j);
                return nodes.iter().zip(&w).map(|(xn, wi)| self.f.eval(*xn) * *wi).sum();
            }
        }
        let d: Complex64 = CENTRAL7[j].iter().enumerate().map(|(i, w)| self.f.eval(x + (i as f64 - 3.0) * h) * *w).sum();
        d / h.powi(j as i32)
    }
}

impl Sampler for ImageSampler {
    fn eval(&self, x: f64) -> Complex64 {
        self.op
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(j, p)| p.eval(x) * if j == 0 { self.f.eval(x) } else { self.derivative_at(j, x) })
            .sum()
    }

    fn spikes(&self, lo: f64, hi: f64) -> Vec<Spike> {
        self.f.spikes(lo, hi)
    }

    fn eval_near(&self, spike: &Spike, t: f64) -> Complex64 {
        let x = spike.center + t;
        self.op
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(j, p)| {
                let h = spike.half_width * REL_STEP[j.max(1)];
                let d: Complex64 = CENTRAL7[j]
                    .iter()
                    .enumerate()
                    .map(|(i, w)| self.f.eval_near(spike, t + (i as f64 - 3.0) * h) * *w)
                    .sum();
                p.eval(x) * d / h.powi(j as i32)
            })
            .sum()
    }
}
