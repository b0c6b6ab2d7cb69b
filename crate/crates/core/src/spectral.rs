//! Discrete spectra, spectral weights and expectation values.
//!
//! Expectation values come in two lawful forms (Σ moment(E_n) p_n and
//! ‖Aψ‖²) and one naive form ⟨ψ, Aψ⟩ that is only meaningful for ψ ∈ D(A).
//! The naive form is still computed, but carries a flag when ψ is outside.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boundary::{analyze, Classification, SubspaceBasis};
use crate::error::{QopError, Result};
use crate::functions::AnalyticFunction;
use crate::numerics::{
    gauss_kronrod, hermitian_eigenvalues, inner_product, norm, sym_tridiag_eigen, Grid, GridFunction, Sampler,
};
use crate::operator::{
    apply_in_domain, domain_check, twist_of, DomainMembershipReport, DomainSpec, OperatorSpec, Subject,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectralSource {
    Discretized,
    ClosedForm,
}

/// Ascending eigenvalues with orthonormal eigenfunctions on a common grid.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub eigenvalues: Vec<f64>,
    pub eigenfunctions: Vec<GridFunction>,
    pub source: SpectralSource,
}

/// Residual tolerance for closed-form eigenpairs, relative to max(1, |p|).
const CLOSED_FORM_TOL: f64 = 1e-3;

/// The `k` lowest eigenpairs (or the `k` of smallest modulus for momentum-like operators).
///
/// Refuses with the classification attached unless the pair is self-adjoint.
pub fn discrete_spectrum(op: &OperatorSpec, dom: &DomainSpec, grid: &Grid, k: usize) -> Result<SpectralData> {
    let analysis = analyze(op, dom)?;
    if analysis.classification != Classification::SelfAdjoint {
        return Err(QopError::Refused { classification: analysis.classification });
    }
    let (a, b) = dom.interval().expect("analyze accepts compact domains only");
    if !grid.is_compact() || (grid.a() - a).abs() > 1e-12 || (grid.b() - b).abs() > 1e-12 {
        return Err(QopError::Input(format!("grid does not cover the interval of '{}'", dom.name())));
    }
    match op.order() {
        1 => twisted_momentum_spectrum(op, dom, grid, k),
        2 => dirichlet_spectrum(op, dom, grid, k),
        other => Err(QopError::Unsupported(format!("discrete spectra are built for orders 1 and 2, not {other}"))),
    }
}

fn twisted_momentum_spectrum(op: &OperatorSpec, dom: &DomainSpec, grid: &Grid, k: usize) -> Result<SpectralData> {
    let lambda = twist_of(dom)
        .ok_or_else(|| QopError::Unsupported(format!("order-1 spectra need a twisted domain, got '{}'", dom.name())))?;
    let c1 = op.coefficient(1);
    if c1.degree() != Some(0) || !op.coefficient(0).is_zero() {
        return Err(QopError::Unsupported(format!("{} is not a constant-coefficient momentum", op.name())));
    }
    // c₁ = ℏ/i for the catalog momenta; eigenfunctions e^{ipx/ℏ} with e^{−ipL/ℏ} = λ.
    let hbar = (Complex64::i() * c1.eval(0.0)).re;
    let (a, b) = (grid.a(), grid.b());
    let len = b - a;
    let alpha = lambda.arg();
    let mut ns: Vec<i32> = (-(k as i32)..=(k as i32)).collect();
    let p = |n: i32| hbar * (std::f64::consts::TAU * n as f64 - alpha) / len;
    ns.sort_by(|x, y| p(*x).abs().total_cmp(&p(*y).abs()).then(x.cmp(y)));
    ns.truncate(k);
    ns.sort_by(|x, y| p(*x).total_cmp(&p(*y)));
    let amp = len.sqrt().recip();
    let mut eigenvalues = Vec::with_capacity(k);
    let mut eigenfunctions = Vec::with_capacity(k);
    for n in ns {
        let pn = p(n);
        let f = GridFunction::from_fn(*grid, format!("psi_{n}"), |x| Complex64::from_polar(amp, pn * (x - a) / hbar))?;
        let pf = apply_in_domain(op, &f, dom)?;
        let r = norm(&pf.combine(Complex64::new(1.0, 0.0), &f, Complex64::new(-pn, 0.0))?) / norm(&f);
        if r > CLOSED_FORM_TOL * pn.abs().max(1.0) {
            return Err(QopError::Numerical(format!("closed-form eigenpair n = {n} has residual {r:e} on this grid")));
        }
        eigenvalues.push(pn);
        eigenfunctions.push(f);
    }
    Ok(SpectralData { eigenvalues, eigenfunctions, source: SpectralSource::ClosedForm })
}

fn dirichlet_spectrum(op: &OperatorSpec, dom: &DomainSpec, grid: &Grid, k: usize) -> Result<SpectralData> {
    let bc = dom.boundary_constraints().expect("compact");
    let lifted = bc.lift(2, (grid.a(), grid.b()))?;
    // ψ(a) = 0 = ψ(b) leaves exactly ψ′(a) and ψ′(b) free.
    let mut free = DMatrix::from_element(4, 2, Complex64::new(0.0, 0.0));
    free[(1, 0)] = Complex64::new(1.0, 0.0);
    free[(3, 1)] = Complex64::new(1.0, 0.0);
    let same = SubspaceBasis::kernel_of(&lifted).same_subspace(&SubspaceBasis::span(&free), 1e-9);
    if !same || !op.coefficient(1).is_zero() || op.coefficient(2).degree() != Some(0) {
        return Err(QopError::Unsupported(format!(
            "order-2 spectra are built for c₂d² + c₀ with ψ(a) = 0 = ψ(b), got {} on '{}'",
            op.name(),
            dom.name()
        )));
    }
    let c2 = op.coefficient(2).eval(0.0).re;
    let n = grid.len();
    let h = grid.h();
    let interior = n - 2;
    if k > interior {
        return Err(QopError::Input(format!("{k} eigenpairs requested from {interior} interior nodes")));
    }
    let c0 = op.coefficient(0);
    let diag: Vec<f64> = (1..n - 1).map(|i| -2.0 * c2 / (h * h) + c0.eval(grid.node(i)).re).collect();
    let off = vec![c2 / (h * h); interior - 1];
    let pairs = sym_tridiag_eigen(&diag, &off, k)?;
    let mut eigenvalues = Vec::with_capacity(k);
    let mut eigenfunctions = Vec::with_capacity(k);
    for (j, pair) in pairs.into_iter().enumerate() {
        let mut values = vec![Complex64::new(0.0, 0.0); n];
        for (i, v) in pair.vector.iter().enumerate() {
            values[i + 1] = Complex64::new(*v, 0.0);
        }
        let f = GridFunction::new(*grid, values, format!("phi_{}", j + 1))?;
        let nf = norm(&f);
        eigenvalues.push(pair.value);
        eigenfunctions.push(f.scale(Complex64::new(nf.recip(), 0.0)));
    }
    Ok(SpectralData { eigenvalues, eigenfunctions, source: SpectralSource::Discretized })
}

/// p_n = |⟨φ_n, ψ⟩|² for n ≤ N, with the missing mass as tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightProfile {
    pub weights: Vec<f64>,
    pub truncation: usize,
    pub tail_estimate: f64,
}

impl WeightProfile {
    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }
}

pub fn spectral_weights(psi: &GridFunction, basis: &SpectralData, n: usize) -> Result<WeightProfile> {
    let nrm = norm(psi);
    if (nrm - 1.0).abs() > 1e-6 {
        return Err(QopError::Input(format!("state has norm {nrm}, expected 1")));
    }
    if n > basis.eigenfunctions.len() {
        return Err(QopError::Input(format!(
            "truncation {n} exceeds the {} available eigenfunctions",
            basis.eigenfunctions.len()
        )));
    }
    let weights = basis.eigenfunctions[..n]
        .iter()
        .map(|phi| inner_product(phi, psi).map(|c| c.norm_sqr()))
        .collect::<Result<Vec<f64>>>()?;
    let tail_estimate = (1.0 - weights.iter().sum::<f64>()).max(0.0);
    Ok(WeightProfile { weights, truncation: n, tail_estimate })
}

/// A polynomial moment c₀ + c₁E + c₂E².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moment {
    pub coefficients: [f64; 3],
}

impl Moment {
    pub const ONE: Moment = Moment { coefficients: [1.0, 0.0, 0.0] };
    pub const ENERGY: Moment = Moment { coefficients: [0.0, 1.0, 0.0] };
    pub const ENERGY_SQUARED: Moment = Moment { coefficients: [0.0, 0.0, 1.0] };

    pub fn eval(&self, e: f64) -> f64 {
        self.coefficients[0] + e * (self.coefficients[1] + e * self.coefficients[2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConvergenceFlag {
    Converged,
    Unconverged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralExpectation {
    pub value: f64,
    pub truncation: usize,
    pub weight_tail: f64,
    /// Σ_{n>N} moment(E_n)p_n from an n⁻² envelope fitted on the upper half of the terms.
    pub tail_bound: f64,
    pub flag: ConvergenceFlag,
}

/// Σ_{n≤N} moment(E_n)·p_n with an explicit tail.
pub fn expectation_spectral(
    psi: &GridFunction,
    basis: &SpectralData,
    moment: Moment,
    n: usize,
    tol: f64,
) -> Result<SpectralExpectation> {
    let w = spectral_weights(psi, basis, n)?;
    let terms: Vec<f64> = w.weights.iter().zip(&basis.eigenvalues).map(|(p, e)| moment.eval(*e) * p).collect();
    let value: f64 = terms.iter().sum();
    let half = n / 2;
    let upper: f64 = terms[half..].iter().map(|t| t.abs()).sum();
    let envelope: f64 = (half + 1..=n).map(|m| 1.0 / (m * m) as f64).sum();
    let c = if envelope > 0.0 { upper / envelope } else { 0.0 };
    let tail_bound = c / n.max(1) as f64;
    let flag = if tail_bound <= tol { ConvergenceFlag::Converged } else { ConvergenceFlag::Unconverged };
    Ok(SpectralExpectation { value, truncation: n, weight_tail: w.tail_estimate, tail_bound, flag })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DomainFlag {
    Clean,
    MeaninglessOutsideDomain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectExpectation {
    pub value: f64,
    pub imaginary_part: f64,
    pub flag: DomainFlag,
    pub membership: DomainMembershipReport,
}

/// ∫ conj(f)·g over the support of an analytic subject.
fn analytic_overlap(f: &dyn Sampler, g: &dyn Sampler, (a, b): (f64, f64)) -> Complex64 {
    let re = gauss_kronrod(|x| (f.eval(x).conj() * g.eval(x)).re, a, b, 1e-12, 256).0;
    let im = gauss_kronrod(|x| (f.eval(x).conj() * g.eval(x)).im, a, b, 1e-12, 256).0;
    Complex64::new(re, im)
}

/// Truncation radius for analytic subjects on the line.
const LINE_RADIUS: f64 = 40.0;

fn bounds(dom: &DomainSpec) -> (f64, f64) {
    dom.interval().unwrap_or((-LINE_RADIUS, LINE_RADIUS))
}

fn image_of(op: &OperatorSpec, f: &AnalyticFunction, dom: &DomainSpec) -> crate::operator::ImageSampler {
    let img = op.image_sampler(f.sampler());
    match dom.interval() {
        Some((a, b)) => img.within(a, b),
        None => img,
    }
}

/// ⟨ψ, Aψ⟩ by quadrature, flagged when ψ ∉ D(A).
pub fn expectation_direct(subject: Subject<'_>, op: &OperatorSpec, dom: &DomainSpec) -> Result<DirectExpectation> {
    let membership = domain_check(subject, op, dom)?;
    let v = match subject {
        Subject::Grid(f) => inner_product(f, &apply_in_domain(op, f, dom)?)?,
        Subject::Analytic(f) => analytic_overlap(f, &image_of(op, f, dom), bounds(dom)),
    };
    let flag = if membership.in_domain { DomainFlag::Clean } else { DomainFlag::MeaninglessOutsideDomain };
    Ok(DirectExpectation { value: v.re, imaginary_part: v.im, flag, membership })
}

/// ‖Aψ‖² = ⟨Aψ, Aψ⟩, the lawful form of ⟨A²⟩ for ψ ∈ D(A).
pub fn expectation_form(subject: Subject<'_>, op: &OperatorSpec, dom: &DomainSpec) -> Result<DirectExpectation> {
    let membership = domain_check(subject, op, dom)?;
    let v = match subject {
        Subject::Grid(f) => {
            let g = apply_in_domain(op, f, dom)?;
            inner_product(&g, &g)?
        }
        Subject::Analytic(f) => {
            let img = image_of(op, f, dom);
            analytic_overlap(&img, &img, bounds(dom))
        }
    };
    let flag = if membership.in_domain { DomainFlag::Clean } else { DomainFlag::MeaninglessOutsideDomain };
    Ok(DirectExpectation { value: v.re, imaginary_part: v.im, flag, membership })
}

/// Largest |eigenvalue| of the discretization per grid and the fitted exponent in 1/h.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub spacings: Vec<f64>,
    pub norms: Vec<f64>,
    pub exponent: f64,
}

fn discretized_matrix(op: &OperatorSpec, dom: &DomainSpec, grid: &Grid) -> Result<DMatrix<Complex64>> {
    let n = grid.len();
    let h = grid.h();
    let zero = Complex64::new(0.0, 0.0);
    match op.order() {
        0 => Ok(DMatrix::from_fn(n, n, |i, j| if i == j { op.coefficient(0).eval(grid.node(i)) } else { zero })),
        1 => {
            let lambda = twist_of(dom)
                .ok_or_else(|| QopError::Unsupported("first-order growth probes need a twisted domain".into()))?;
            // Central difference on the n − 1 distinct nodes, wrapped with the twist.
            let m = n - 1;
            let c1 = op.coefficient(1).eval(0.0) / (2.0 * h);
            let mut a = DMatrix::from_element(m, m, zero);
            for i in 0..m {
                let (up, up_phase) = if i + 1 == m { (0, lambda.conj()) } else { (i + 1, Complex64::new(1.0, 0.0)) };
                let (dn, dn_phase) = if i == 0 { (m - 1, lambda) } else { (i - 1, Complex64::new(1.0, 0.0)) };
                a[(i, up)] += c1 * up_phase;
                a[(i, dn)] -= c1 * dn_phase;
            }
            Ok(a)
        }
        2 => {
            let c2 = op.coefficient(2).eval(0.0) / (h * h);
            let m = n - 2;
            Ok(DMatrix::from_fn(m, m, |i, j| {
                if i == j {
                    -2.0 * c2 + op.coefficient(0).eval(grid.node(i + 1))
                } else if i.abs_diff(j) == 1 {
                    c2
                } else {
                    zero
                }
            }))
        }
        other => Err(QopError::Unsupported(format!("no growth probe for order {other}"))),
    }
}

/// Evidence that an operator is unbounded: its discretized norm grows like h^{−exponent}.
pub fn norm_growth_probe(op: &OperatorSpec, dom: &DomainSpec, n_points: &[usize]) -> Result<GrowthReport> {
    if n_points.len() < 3 {
        return Err(QopError::Input("norm growth needs at least three grids".into()));
    }
    let (a, b) = dom
        .interval()
        .ok_or_else(|| QopError::Unsupported("norm growth is probed on compact intervals".into()))?;
    let mut spacings = Vec::new();
    let mut norms = Vec::new();
    for &n in n_points {
        let grid = Grid::compact(a, b, n)?;
        let m = discretized_matrix(op, dom, &grid)?;
        let ev = hermitian_eigenvalues(&m)?;
        spacings.push(grid.h());
        norms.push(ev.iter().map(|v| v.abs()).fold(0.0, f64::max));
    }
    // Least-squares slope of log‖A_h‖ against log(1/h).
    let xs: Vec<f64> = spacings.iter().map(|h| -h.ln()).collect();
    let ys: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(GrowthReport { spacings, norms, exponent: sxy / sxx })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{catalog_get, well_energy};
    use crate::operator::Constants;
    use std::f64::consts::{PI, TAU};

    fn k() -> Constants {
        Constants::default()
    }

    fn well(n: usize, kk: usize) -> SpectralData {
        let grid = Grid::compact(-1.0, 1.0, n).unwrap();
        discrete_spectrum(&OperatorSpec::hamiltonian(k()), &DomainSpec::well_dirichlet(1.0), &grid, kk).unwrap()
    }

    #[test]
    fn infinite_well_ground_state() {
        let s = well(2000, 3);
        assert!((s.eigenvalues[0] / (PI * PI / 8.0) - 1.0).abs() <= 1e-4);
        for i in 0..3 {
            for j in 0..3 {
                let g = inner_product(&s.eigenfunctions[i], &s.eigenfunctions[j]).unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - want).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn well_eigenvalues_converge_at_second_order() {
        let err = |n| (well(n, 1).eigenvalues[0] - well_energy(1, &k())).abs();
        let ratio = err(101) / err(201);
        assert!((ratio.log2() - 2.0).abs() < 0.2, "{ratio}");
    }

    #[test]
    fn angular_momentum_and_twisted_momentum() {
        let grid = Grid::compact(0.0, TAU, 1025).unwrap();
        let s = discrete_spectrum(&OperatorSpec::angular_momentum(k()), &DomainSpec::periodic(0.0, TAU), &grid, 5).unwrap();
        assert_eq!(s.source, SpectralSource::ClosedForm);
        for (got, want) in s.eigenvalues.iter().zip([-2.0, -1.0, 0.0, 1.0, 2.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        let g = Grid::compact(0.0, 1.0, 1025).unwrap();
        let p = discrete_spectrum(&OperatorSpec::momentum(k()), &DomainSpec::periodic(0.0, 1.0), &g, 5).unwrap();
        for (got, want) in p.eigenvalues.iter().zip([-2.0 * TAU, -TAU, 0.0, TAU, 2.0 * TAU]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn refuses_non_observables() {
        let g = Grid::compact(0.0, 1.0, 101).unwrap();
        let r = discrete_spectrum(&OperatorSpec::momentum(k()), &DomainSpec::dirichlet(0.0, 1.0), &g, 3);
        assert_eq!(r.unwrap_err(), QopError::Refused { classification: Classification::HermitianNotSelfAdjoint });
    }

    #[test]
    fn parabola_weights_and_moments() {
        let s = well(4001, 2000);
        let psi = catalog_get("parabola_well", &k()).unwrap().sample(s.eigenfunctions[0].grid()).unwrap();
        let w = spectral_weights(&psi, &s, 2000).unwrap();
        assert!((w.weights[0] - 960.0 / PI.powi(6)).abs() < 1e-5);
        assert!(w.weights[1].abs() < 1e-10);
        assert!(w.total() <= 1.0 + 1e-9 && w.total() >= 1.0 - 1e-4);
        let e2 = expectation_spectral(&psi, &s, Moment::ENERGY_SQUARED, 2000, 2e-3).unwrap();
        assert!((e2.value - 1.875).abs() < 2e-3, "{}", e2.value);
        assert_eq!(e2.flag, ConvergenceFlag::Converged);
        let e1 = expectation_spectral(&psi, &s, Moment::ENERGY, 2000, 1e-3).unwrap();
        assert!((e1.value - 1.25).abs() < 1e-4, "{}", e1.value);
        let one = expectation_spectral(&psi, &s, Moment::ONE, 2000, 1e-3).unwrap();
        assert!((one.value - 1.0).abs() < 1e-6);
        let phi3 = s.eigenfunctions[2].clone();
        let w3 = spectral_weights(&phi3, &s, 10).unwrap();
        assert!((w3.weights[2] - 1.0).abs() < 1e-10);
        assert!(w3.weights.iter().enumerate().all(|(i, p)| i == 2 || p.abs() < 1e-10));
    }

    #[test]
    fn naive_and_lawful_second_moments() {
        let psi = catalog_get("parabola_well", &k()).unwrap();
        let naive =
            expectation_direct(Subject::Analytic(&psi), &OperatorSpec::hamiltonian_squared(k()), &DomainSpec::well_h2(1.0))
                .unwrap();
        assert!(naive.value.abs() < 1e-8, "{}", naive.value);
        assert_eq!(naive.flag, DomainFlag::MeaninglessOutsideDomain);
        let form =
            expectation_form(Subject::Analytic(&psi), &OperatorSpec::hamiltonian(k()), &DomainSpec::well_dirichlet(1.0))
                .unwrap();
        assert!((form.value - 1.875).abs() < 1e-6, "{}", form.value);
        assert_eq!(form.flag, DomainFlag::Clean);
        let phi1 = catalog_get("well_eigenfunction(1)", &k()).unwrap();
        let e =
            expectation_direct(Subject::Analytic(&phi1), &OperatorSpec::hamiltonian(k()), &DomainSpec::well_dirichlet(1.0))
                .unwrap();
        assert!((e.value - PI * PI / 8.0).abs() < 1e-4);
        assert_eq!(e.flag, DomainFlag::Clean);
    }

    #[test]
    fn growth_exponents() {
        let grids = [33, 65, 129, 257];
        let p = norm_growth_probe(&OperatorSpec::momentum(k()), &DomainSpec::periodic(0.0, 1.0), &grids).unwrap();
        assert!((p.exponent - 1.0).abs() < 0.1, "{p:?}");
        let h = norm_growth_probe(&OperatorSpec::hamiltonian(k()), &DomainSpec::well_dirichlet(1.0), &grids).unwrap();
        assert!((h.exponent - 2.0).abs() < 0.1, "{h:?}");
        let q = norm_growth_probe(&OperatorSpec::position(k()), &DomainSpec::unconstrained(-1.0, 1.0), &grids).unwrap();
        assert!(q.exponent.abs() < 0.05 && q.norms.iter().all(|v| *v <= 1.0 + 1e-9), "{q:?}");
    }
}
