//! Functionals on test functions: δ, plane waves, regular elements, and the Fourier transform.
//!
//! A functional is only ever evaluated on a test function that passed the
//! rapid-decay probe. Operators act on functionals by transpose on the test
//! function, so (P l_p)(φ) = l_p(Pφ).

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QopError, Result};
use crate::functions::{schwartz_probe, AnalyticFunction, DecayClass, DecayReport, FunctionTrait};
use crate::numerics::{
    gauss_kronrod, improper_norm_probe, simpson, Grid, GridFunction, NormProbeResult, ProbeDomain, Sampler,
};
use crate::operator::{Constants, OperatorKind, OperatorSpec};

/// Transform values on a p-grid, flagged when f has not decayed at the x-grid edges.
#[derive(Debug, Clone)]
pub struct FourierResult {
    pub transform: GridFunction,
    pub edges_not_decayed: bool,
}

/// Edge magnitude above which a transform is flagged.
const EDGE_DECAY: f64 = 1e-10;

fn transform(f: &GridFunction, p_grid: &Grid, hbar: f64, sign: f64) -> Result<FourierResult> {
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(QopError::Input(format!("hbar must be positive, got {hbar}")));
    }
    let v = f.values();
    let edges_not_decayed = v[0].norm() > EDGE_DECAY || v[v.len() - 1].norm() > EDGE_DECAY;
    let pref = (TAU * hbar).sqrt().recip();
    let xs: Vec<f64> = f.grid().nodes().collect();
    let values = p_grid
        .nodes()
        .map(|p| {
            let integrand: Vec<Complex64> =
                xs.iter().zip(v).map(|(x, fx)| fx * Complex64::from_polar(1.0, sign * p * x / hbar)).collect();
            let g = GridFunction::new(*f.grid(), integrand, "")?;
            Ok(simpson(&g) * pref)
        })
        .collect::<Result<Vec<Complex64>>>()?;
    let label = if sign < 0.0 { format!("F[{}]", f.label()) } else { format!("F^-1[{}]", f.label()) };
    Ok(FourierResult { transform: GridFunction::new(*p_grid, values, label)?, edges_not_decayed })
}

/// (ℱf)(p) = ∫ e^{−ipx/ℏ} f(x) dx / √(2πℏ), by direct quadrature at every p node.
pub fn fourier(f: &GridFunction, p_grid: &Grid, hbar: f64) -> Result<FourierResult> {
    transform(f, p_grid, hbar, -1.0)
}

/// The inverse kernel e^{+ipx/ℏ}/√(2πℏ).
pub fn inverse_fourier(fp: &GridFunction, x_grid: &Grid, hbar: f64) -> Result<FourierResult> {
    transform(fp, x_grid, hbar, 1.0)
}

#[derive(Debug, Clone)]
pub enum FunctionalKind {
    Delta(f64),
    PlaneWave(f64),
    Regular(AnalyticFunction),
}

#[derive(Debug, Clone)]
pub struct Functional {
    pub kind: FunctionalKind,
    pub constants: Constants,
}

impl Functional {
    pub fn delta(x0: f64, constants: Constants) -> Self {
        Self { kind: FunctionalKind::Delta(x0), constants }
    }

    pub fn plane_wave(p: f64, constants: Constants) -> Self {
        Self { kind: FunctionalKind::PlaneWave(p), constants }
    }

    pub fn regular(psi: AnalyticFunction, constants: Constants) -> Self {
        Self { kind: FunctionalKind::Regular(psi), constants }
    }
}

/// Panels of unit width on [−R, R] keep narrow test functions resolved.
const LINE_RADIUS: f64 = 40.0;

fn line_integral(f: impl Fn(f64) -> Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let panels = (2.0 * LINE_RADIUS) as i32;
    for k in 0..panels {
        let a = -LINE_RADIUS + k as f64;
        let b = a + 1.0;
        acc.re += gauss_kronrod(|x| f(x).re, a, b, 1e-13, 64).0;
        acc.im += gauss_kronrod(|x| f(x).im, a, b, 1e-13, 64).0;
    }
    acc
}

/// Evaluation without the test-function check, for internal use on known Schwartz inputs.
fn eval_unchecked(func: &Functional, phi: &dyn Sampler) -> Complex64 {
    let hbar = func.constants.hbar;
    match &func.kind {
        FunctionalKind::Delta(x0) => phi.eval(*x0),
        FunctionalKind::PlaneWave(p) => {
            let pref = (TAU * hbar).sqrt().recip();
            line_integral(|x| Complex64::from_polar(pref, -p * x / hbar) * phi.eval(x))
        }
        FunctionalKind::Regular(psi) => line_integral(|x| psi.eval(x).conj() * phi.eval(x)),
    }
}

/// Rejects test functions that fail the rapid-decay probe.
pub fn require_test_function(phi: &AnalyticFunction) -> Result<()> {
    let report = schwartz_probe(phi, 8, 2)?;
    if report.class != DecayClass::RapidDecay {
        return Err(QopError::Input(format!("'{}' is not a test function: decay class {:?}", phi.name(), report.class)));
    }
    Ok(())
}

/// δ_{x₀}(φ) = φ(x₀); l_p(φ) = (ℱφ)(p); ω_ψ(φ) = ⟨ψ, φ⟩.
pub fn eval(func: &Functional, phi: &AnalyticFunction) -> Result<Complex64> {
    require_test_function(phi)?;
    Ok(eval_unchecked(func, phi))
}

/// A Gaussian test function e^{−(x−c)²/(2w²)} with closed-form derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTest {
    pub center: f64,
    pub width: f64,
}

impl GaussianTest {
    pub fn value(&self, x: f64) -> f64 {
        let u = (x - self.center) / self.width;
        (-0.5 * u * u).exp()
    }

    pub fn derivative(&self, x: f64) -> f64 {
        -(x - self.center) / (self.width * self.width) * self.value(x)
    }

    pub fn to_function(self) -> AnalyticFunction {
        AnalyticFunction::from_fn(
            format!("test({},{})", self.center, self.width),
            move |x| Complex64::new(self.value(x), 0.0),
            vec![],
            ProbeDomain::Line,
            [FunctionTrait::SquareIntegrable, FunctionTrait::VanishesAtInfinity, FunctionTrait::Schwartz],
        )
    }
}

/// Twelve test functions: centers {−1.5, −0.4, 0.7, 2} times widths {0.3, 0.8, 1.5}.
pub fn standard_test_set() -> Vec<GaussianTest> {
    let mut out = Vec::with_capacity(12);
    for center in [-1.5, -0.4, 0.7, 2.0] {
        for width in [0.3, 0.8, 1.5] {
            out.push(GaussianTest { center, width });
        }
    }
    out
}

/// max over the test set of |F(op φ) − λ F(φ)|, with op acting by transpose.
pub fn weak_eigen_check(op: &OperatorSpec, func: &Functional, lambda: Complex64, tests: &[GaussianTest]) -> Result<f64> {
    if tests.is_empty() {
        return Err(QopError::Input("weak eigenvalue check needs at least one test function".into()));
    }
    let hbar = op.constants().hbar;
    let kind = op.kind();
    if !matches!(kind, OperatorKind::Position | OperatorKind::Momentum) {
        return Err(QopError::Unsupported(format!("weak eigenvalue checks are defined for Q and P, not {}", op.name())));
    }
    let mut worst: f64 = 0.0;
    for t in tests {
        require_test_function(&t.to_function())?;
        let t = *t;
        let phi = move |x: f64| Complex64::new(t.value(x), 0.0);
        let op_phi: Arc<dyn Sampler> = match kind {
            OperatorKind::Position => Arc::new(move |x: f64| Complex64::new(x * t.value(x), 0.0)),
            _ => Arc::new(move |x: f64| Complex64::new(0.0, -hbar * t.derivative(x))),
        };
        let r = eval_unchecked(func, op_phi.as_ref()) - lambda * eval_unchecked(func, &phi);
        worst = worst.max(r.norm());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TripleTier {
    SchwartzMember,
    L2Only,
    TemperedOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleClassification {
    pub tier: TripleTier,
    pub decay: DecayReport,
    pub norm: NormProbeResult,
}

/// Growth allowed per window doubling for a polynomial bound of degree 8.
const TEMPERED_RATIO: f64 = 256.0 * 1.5;

/// Places f in S ⊂ L² ⊂ S′ from the decay and integrability probes.
pub fn classify_triple(f: &AnalyticFunction) -> Result<TripleClassification> {
    let decay = schwartz_probe(f, 8, 2)?;
    let norm = improper_norm_probe(f, f.singular_points(), f.support())?;
    let tier = if decay.class == DecayClass::RapidDecay && norm.is_finite() {
        TripleTier::SchwartzMember
    } else if norm.is_finite() {
        TripleTier::L2Only
    } else {
        let polynomial = decay.series.iter().filter(|s| s.m == 0 && s.j == 0).all(|s| {
            s.sups.windows(2).all(|w| w[1].is_finite() && w[1] <= TEMPERED_RATIO * w[0].max(f64::MIN_POSITIVE))
        });
        if !polynomial {
            return Err(QopError::Input(format!("'{}' is not tempered at polynomial order ≤ 8", f.name())));
        }
        TripleTier::TemperedOnly
    };
    Ok(TripleClassification { tier, decay, norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::catalog_get;
    use crate::numerics::inner_product;
    use std::f64::consts::PI;

    fn k() -> Constants {
        Constants::default()
    }

    fn gauss_grid(center: f64, width: f64) -> GridFunction {
        let grid = Grid::line(12.0, 1025).unwrap();
        let t = GaussianTest { center, width };
        GridFunction::from_fn(grid, "g", move |x| Complex64::new(t.value(x), 0.0)).unwrap()
    }

    #[test]
    fn gaussian_is_its_own_transform() {
        let pg = Grid::line(6.0, 241).unwrap();
        let r = fourier(&gauss_grid(0.0, 1.0), &pg, 1.0).unwrap();
        assert!(!r.edges_not_decayed);
        for (p, v) in pg.nodes().zip(r.transform.values()) {
            assert!((v - Complex64::new((-p * p / 2.0).exp(), 0.0)).norm() < 1e-6);
        }
    }

    #[test]
    fn parseval_and_round_trip() {
        let pg = Grid::line(12.0, 1025).unwrap();
        let f = gauss_grid(0.3, 0.8);
        let g = gauss_grid(-0.5, 1.2);
        let (ff, fg) = (fourier(&f, &pg, 1.0).unwrap().transform, fourier(&g, &pg, 1.0).unwrap().transform);
        let defect = inner_product(&ff, &fg).unwrap() - inner_product(&f, &g).unwrap();
        assert!(defect.norm() < 1e-6);
        let back = inverse_fourier(&ff, f.grid(), 1.0).unwrap().transform;
        for (a, b) in back.values().iter().zip(f.values()) {
            assert!((a - b).norm() < 1e-5);
        }
        let narrow = GridFunction::from_fn(Grid::line(2.0, 101).unwrap(), "wide", |x| Complex64::new((-x * x / 2.0).exp(), 0.0))
            .unwrap();
        assert!(fourier(&narrow, &pg, 1.0).unwrap().edges_not_decayed);
    }

    #[test]
    fn functional_values() {
        let g = GaussianTest { center: 0.0, width: 1.0 / 2f64.sqrt() }.to_function();
        assert!((eval(&Functional::delta(0.0, k()), &g).unwrap() - 1.0).norm() < 1e-15);
        let half = GaussianTest { center: 0.0, width: 1.0 }.to_function();
        assert!((eval(&Functional::plane_wave(0.0, k()), &half).unwrap() - 1.0).norm() < 1e-10);
        let reg = Functional::regular(catalog_get(&format!("gaussian({})", 1.0 / 2f64.sqrt()), &k()).unwrap(), k());
        assert!((eval(&reg, &g).unwrap().re - (PI / 2.0).sqrt()).abs() < 1e-8);
        let wave = catalog_get("plane_wave(1)", &k()).unwrap();
        assert!(matches!(eval(&Functional::delta(0.0, k()), &wave), Err(QopError::Input(_))));
    }

    #[test]
    fn weak_eigenvalues() {
        let tests = standard_test_set();
        let q = weak_eigen_check(&OperatorSpec::position(k()), &Functional::delta(1.3, k()), 1.3.into(), &tests).unwrap();
        assert!(q <= 1e-9);
        let p = weak_eigen_check(&OperatorSpec::momentum(k()), &Functional::plane_wave(2.0, k()), 2.0.into(), &tests).unwrap();
        assert!(p <= 1e-6, "{p}");
        let d = weak_eigen_check(&OperatorSpec::momentum(k()), &Functional::delta(0.0, k()), 0.0.into(), &tests).unwrap();
        assert!(d > 0.1);
        let h = OperatorSpec::hamiltonian(k());
        assert!(matches!(weak_eigen_check(&h, &Functional::delta(0.0, k()), 0.0.into(), &tests), Err(QopError::Unsupported(_))));
    }

    #[test]
    fn gelfand_tiers() {
        let tier = |n: &str| classify_triple(&catalog_get(n, &k()).unwrap()).unwrap().tier;
        assert_eq!(tier("gaussian"), TripleTier::SchwartzMember);
        assert_eq!(tier("A_eigenfunction_f"), TripleTier::L2Only);
        assert_eq!(tier("plane_wave(2)"), TripleTier::TemperedOnly);
        let wild = AnalyticFunction::from_fn("exp", |x: f64| Complex64::new(x.abs().exp(), 0.0), vec![], ProbeDomain::Line, []);
        assert!(classify_triple(&wild).is_err());
    }

    #[test]
    fn delta_as_a_limit_of_narrow_gaussians() {
        let phi = GaussianTest { center: 0.4, width: 0.9 }.to_function();
        let mut last = f64::INFINITY;
        for sigma in [0.4, 0.2, 0.1] {
            let reg = Functional::regular(catalog_get(&format!("gaussian({sigma})"), &k()).unwrap(), k());
            let approx = eval(&reg, &phi).unwrap() / (sigma * (2.0 * PI).sqrt());
            let err = (approx - phi.eval(0.0)).norm();
            assert!(err < last);
            last = err;
        }
    }
}
