//! Deficiency indices from closed-form solutions of A†g = ±i g.
//!
//! Each candidate solution is kept only if it obeys the adjoint boundary
//! conditions and its norm probe reports Finite. The general ODE solver is a
//! non-goal, so the solution families are hard-coded per operator shape.

use std::f64::consts::TAU;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boundary::{analyze, Classification};
use crate::error::{QopError, Result};
use crate::functions::{catalog_get, schwartz_probe, twisted_momentum, DecayClass};
use crate::linalg::null_space;
use crate::numerics::{improper_norm_probe, Grid, GridFunction, NormProbeResult, ProbeDomain, Sampler};
use crate::operator::{DecayRequirement, DomainConstraints, DomainSpec, OperatorKind, OperatorSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    SelfAdjoint,
    ExtensionsExist,
    NoExtension,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumClass {
    SubsetOfReals,
    AllComplexPlane,
    ClosedUpperHalfPlane,
    ClosedLowerHalfPlane,
}

/// A candidate solution of A†g = ±i g and what the checks said about it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub sign: i8,
    pub name: String,
    pub norm: NormProbeResult,
    pub meets_adjoint_conditions: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeficiencyReport {
    pub n_plus: usize,
    pub n_minus: usize,
    pub verdict: Verdict,
    pub spectrum_class: SpectrumClass,
    /// Surviving solutions, one per unit of the indices.
    pub witnesses: Vec<Witness>,
    /// Every candidate examined, including rejected ones.
    pub candidates: Vec<Witness>,
}

/// Verdict and spectrum location from the indices alone.
pub fn classify_von_neumann(n_plus: usize, n_minus: usize) -> (Verdict, SpectrumClass) {
    match (n_plus, n_minus) {
        (0, 0) => (Verdict::SelfAdjoint, SpectrumClass::SubsetOfReals),
        (p, m) if p == m => (Verdict::ExtensionsExist, SpectrumClass::AllComplexPlane),
        (0, _) => (Verdict::NoExtension, SpectrumClass::ClosedUpperHalfPlane),
        (_, 0) => (Verdict::NoExtension, SpectrumClass::ClosedLowerHalfPlane),
        _ => (Verdict::NoExtension, SpectrumClass::AllComplexPlane),
    }
}

/// One closed-form solution of op g = z g.
#[derive(Clone)]
struct Solution {
    name: String,
    sampler: Arc<dyn Sampler>,
    singular: Vec<f64>,
    /// g^{(j)}(x) for traces on compact intervals.
    derivative: Option<Arc<dyn Fn(f64, usize) -> Complex64 + Send + Sync>>,
}

fn exponential(kappa: Complex64, name: String) -> Solution {
    Solution {
        name,
        sampler: Arc::new(move |x: f64| (kappa * x).exp()),
        singular: Vec::new(),
        derivative: Some(Arc::new(move |x: f64, j: usize| kappa.powu(j as u32) * (kappa * x).exp())),
    }
}

fn is_constant_momentum(op: &OperatorSpec) -> bool {
    let h = op.constants().hbar;
    op.order() == 1
        && op.coefficient(0).is_zero()
        && op.coefficient(1).degree() == Some(0)
        && (op.coefficient(1).eval(0.0) - Complex64::new(0.0, -h)).norm() < 1e-12 * h
}

fn is_free_hamiltonian(op: &OperatorSpec) -> bool {
    op.order() == 2
        && op.coefficient(0).is_zero()
        && op.coefficient(1).is_zero()
        && op.coefficient(2).degree() == Some(0)
        && op.coefficient(2).eval(0.0).im == 0.0
        && op.coefficient(2).eval(0.0).re < 0.0
}

fn fmt_c(z: Complex64) -> String {
    format!("({:.6}{:+.6}i)", z.re, z.im)
}

/// Basis of solutions of op g = z g for the supported operator shapes.
fn solutions(op: &OperatorSpec, z: Complex64) -> Result<Vec<Solution>> {
    let hbar = op.constants().hbar;
    if is_constant_momentum(op) {
        // (ℏ/i) g′ = z g.
        let kappa = Complex64::i() * z / hbar;
        return Ok(vec![exponential(kappa, format!("exp({}x)", fmt_c(kappa)))]);
    }
    if is_free_hamiltonian(op) {
        // c₂ g″ = z g.
        let c2 = op.coefficient(2).eval(0.0);
        let kappa = (z / c2).sqrt();
        if kappa.norm() < 1e-14 {
            let one = exponential(Complex64::new(0.0, 0.0), "1".into());
            let lin = Solution {
                name: "x".into(),
                sampler: Arc::new(|x: f64| Complex64::new(x, 0.0)),
                singular: Vec::new(),
                derivative: Some(Arc::new(|x: f64, j: usize| match j {
                    0 => Complex64::new(x, 0.0),
                    1 => Complex64::new(1.0, 0.0),
                    _ => Complex64::new(0.0, 0.0),
                })),
            };
            return Ok(vec![one, lin]);
        }
        return Ok(vec![
            exponential(kappa, format!("exp({}x)", fmt_c(kappa))),
            exponential(-kappa, format!("exp({}x)", fmt_c(-kappa))),
        ]);
    }
    if op.kind() == OperatorKind::AOperator {
        // (ℏ/i)(3x²g + 2x³g′) = z g  ⇒  g = |x|^{−3/2} exp(−iz/(4ℏx²)).
        let s = -Complex64::i() * z / (4.0 * hbar);
        let name = if (z - Complex64::i()).norm() < 1e-12 {
            "A_deficiency_g_plus".to_string()
        } else if (z + Complex64::i()).norm() < 1e-12 {
            "A_deficiency_g_minus".to_string()
        } else {
            format!("|x|^(-3/2) exp({}/x^2)", fmt_c(s))
        };
        let sampler: Arc<dyn Sampler> = if let Ok(f) = catalog_get(&name, op.constants()) {
            f.sampler()
        } else {
            Arc::new(move |x: f64| {
                if x == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    (s / (x * x)).exp() * x.abs().powf(-1.5)
                }
            })
        };
        return Ok(vec![Solution { name, sampler, singular: vec![0.0], derivative: None }]);
    }
    Err(QopError::Unsupported(format!(
        "no closed-form solution family for {}; supported are (ℏ/i)d/dx, −c d²/dx² and PQ³+Q³P",
        op.name()
    )))
}

fn trace_matrix(sols: &[Solution], k: usize, a: f64, b: f64) -> DMatrix<Complex64> {
    DMatrix::from_fn(2 * k, sols.len(), |r, c| {
        let d = sols[c].derivative.as_ref().expect("compact solutions carry derivatives");
        if r < k {
            d(a, r)
        } else {
            d(b, r - k)
        }
    })
}

/// Solutions of op g = z g lying in D(op†); returns (admissible count, candidates).
fn adjoint_kernel(op: &OperatorSpec, dom: &DomainSpec, z: Complex64, sign: i8) -> Result<(usize, Vec<Witness>, Vec<Witness>)> {
    let sols = solutions(op, z)?;
    match dom.interval() {
        Some((a, b)) => {
            let analysis = analyze(op, dom)?;
            let basis = analysis.adjoint.basis();
            let t = trace_matrix(&sols, op.order(), a, b);
            // Component of each trace outside V†.
            let outside = &t - basis * (basis.adjoint() * &t);
            let kernel = null_space(&outside);
            let mut candidates = Vec::new();
            for (c, s) in sols.iter().enumerate() {
                let norm = improper_norm_probe(s.sampler.as_ref(), &s.singular, ProbeDomain::Interval(a, b))?;
                let col = outside.column(c).norm() / t.column(c).norm().max(f64::MIN_POSITIVE);
                candidates.push(Witness { sign, name: s.name.clone(), norm, meets_adjoint_conditions: col <= 1e-9 });
            }
            let all_finite = candidates.iter().all(|w| w.norm.is_finite());
            let count = if all_finite { kernel.ncols() } else { 0 };
            let witnesses = (0..count)
                .map(|c| {
                    let name = if sols.len() == 1 {
                        sols[0].name.clone()
                    } else {
                        let terms: Vec<String> =
                            (0..sols.len()).map(|i| format!("{}·{}", fmt_c(kernel[(i, c)]), sols[i].name)).collect();
                        terms.join(" + ")
                    };
                    Witness { sign, name, norm: candidates[0].norm.clone(), meets_adjoint_conditions: true }
                })
                .collect();
            Ok((count, witnesses, candidates))
        }
        None => {
            // The adjoint of a line operator acts on its maximal domain: only square-integrability is required.
            let mut candidates = Vec::new();
            for s in &sols {
                let norm = improper_norm_probe(s.sampler.as_ref(), &s.singular, ProbeDomain::Line)?;
                candidates.push(Witness { sign, name: s.name.clone(), norm, meets_adjoint_conditions: true });
            }
            let witnesses: Vec<Witness> = candidates.iter().filter(|w| w.norm.is_finite()).cloned().collect();
            Ok((witnesses.len(), witnesses, candidates))
        }
    }
}

fn check_line_operator(op: &OperatorSpec, dom: &DomainSpec) -> Result<()> {
    if dom.interval().is_some() {
        return Ok(());
    }
    let formal = op.formal_adjoint()?;
    let symmetric = (0..=op.order()).all(|j| (&op.coefficient(j) - &formal.coefficient(j)).max_abs() <= 1e-12);
    if !symmetric {
        return Err(QopError::Unsupported(format!("{} is not formally symmetric", op.name())));
    }
    Ok(())
}

/// (n₊, n₋) = (dim ker(A† − i), dim ker(A† + i)) with the verdict of the criterion theorem.
pub fn deficiency_indices(op: &OperatorSpec, dom: &DomainSpec) -> Result<DeficiencyReport> {
    check_line_operator(op, dom)?;
    let (n_plus, mut witnesses, mut candidates) = adjoint_kernel(op, dom, Complex64::i(), 1)?;
    let (n_minus, w_minus, c_minus) = adjoint_kernel(op, dom, -Complex64::i(), -1)?;
    witnesses.extend(w_minus);
    candidates.extend(c_minus);
    let (verdict, spectrum_class) = classify_von_neumann(n_plus, n_minus);
    Ok(DeficiencyReport { n_plus, n_minus, verdict, spectrum_class, witnesses, candidates })
}

/// The catalog pair behind a CLI operator name.
pub fn catalog_pair(name: &str, k: &crate::operator::Constants) -> Result<(OperatorSpec, DomainSpec)> {
    Ok(match name {
        "P_box" => (OperatorSpec::momentum(*k), DomainSpec::dirichlet(0.0, 1.0)),
        "P_line" => (OperatorSpec::momentum(*k), DomainSpec::line(DecayRequirement::Maximal)),
        "A_line" => (OperatorSpec::a_operator(*k), DomainSpec::line(DecayRequirement::Schwartz)),
        "Lz_circle" => (OperatorSpec::angular_momentum(*k), DomainSpec::periodic(0.0, TAU).renamed("circle")),
        "H_well" => (OperatorSpec::hamiltonian(*k), DomainSpec::well_dirichlet(k.a)),
        other => {
            return Err(QopError::Unsupported(format!(
                "'{other}' is not an analyzed pair; use P_box, P_line, A_line, Lz_circle or H_well"
            )))
        }
    })
}

/// The self-adjoint extensions ψ(a) = e^{iα}ψ(b) of a first-order momentum with indices (1, 1).
#[derive(Debug, Clone)]
pub struct ExtensionFamily {
    pub parameter: &'static str,
    op: OperatorSpec,
    a: f64,
    b: f64,
}

impl ExtensionFamily {
    pub fn domain(&self, alpha: f64) -> DomainSpec {
        DomainSpec::twisted(self.a, self.b, alpha)
    }

    pub fn operator(&self) -> &OperatorSpec {
        &self.op
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// p_n(α) = ℏ(2πn − α)/L.
    pub fn eigenvalue(&self, n: i32, alpha: f64) -> f64 {
        twisted_momentum(n, alpha, self.op.constants().hbar, self.b - self.a)
    }

    /// Normalized e^{i p_n x/ℏ} on a grid of the interval.
    pub fn eigenfunction(&self, n: i32, alpha: f64, n_points: usize) -> Result<GridFunction> {
        let p = self.eigenvalue(n, alpha);
        let hbar = self.op.constants().hbar;
        let amp = (self.b - self.a).sqrt().recip();
        let grid = Grid::compact(self.a, self.b, n_points)?;
        GridFunction::from_fn(grid, format!("psi_{n}(alpha={alpha})"), |x| Complex64::from_polar(amp, p * x / hbar))
    }

    /// Classification of the α-member under the boundary calculus.
    pub fn classify(&self, alpha: f64) -> Result<Classification> {
        Ok(analyze(&self.op, &self.domain(alpha))?.classification)
    }

    /// ‖Pψ_n − p_nψ_n‖/‖ψ_n‖ on the grid, with the twisted wrap-around stencil.
    pub fn residual(&self, n: i32, alpha: f64, n_points: usize) -> Result<f64> {
        let f = self.eigenfunction(n, alpha, n_points)?;
        let pf = crate::operator::apply_in_domain(&self.op, &f, &self.domain(alpha))?;
        let r = pf.combine(Complex64::new(1.0, 0.0), &f, Complex64::new(-self.eigenvalue(n, alpha), 0.0))?;
        Ok(crate::numerics::norm(&r) / crate::numerics::norm(&f))
    }
}

pub fn extension_family(op: &OperatorSpec, dom: &DomainSpec) -> Result<ExtensionFamily> {
    let Some((a, b)) = dom.interval() else {
        return Err(QopError::Precondition("extension families are built on compact intervals".into()));
    };
    if !is_constant_momentum(op) {
        return Err(QopError::Precondition(format!("{} is not a first-order momentum", op.name())));
    }
    let report = deficiency_indices(op, dom)?;
    if (report.n_plus, report.n_minus) != (1, 1) {
        return Err(QopError::Precondition(format!(
            "deficiency indices are ({}, {}), a one-parameter family needs (1, 1)",
            report.n_plus, report.n_minus
        )));
    }
    Ok(ExtensionFamily { parameter: "alpha", op: op.clone(), a, b })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResidualVerdict {
    InResidualSpectrum,
    Eigenvalue,
    NotDetected,
}

/// Whether some solution of op g = z g lies in the domain itself.
fn eigen_in_domain(op: &OperatorSpec, dom: &DomainSpec, z: Complex64) -> Result<bool> {
    let sols = solutions(op, z)?;
    match (dom.constraints(), dom.interval()) {
        (DomainConstraints::Boundary(bc), Some((a, b))) => {
            let lifted = bc.lift(op.order(), (a, b))?;
            let t = trace_matrix(&sols, op.order(), a, b);
            let m = lifted.rows() * &t;
            let scale = t.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
            let m = m.map(|v| if v.norm() <= 1e-12 * scale { Complex64::new(0.0, 0.0) } else { v });
            Ok(null_space(&m).ncols() > 0)
        }
        (DomainConstraints::Decay(req), None) => {
            for s in &sols {
                if !improper_norm_probe(s.sampler.as_ref(), &s.singular, ProbeDomain::Line)?.is_finite() {
                    continue;
                }
                if *req == DecayRequirement::Maximal || schwartz_probe(s.sampler.as_ref(), 8, 2)?.class == DecayClass::RapidDecay
                {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        _ => Err(QopError::Structural(format!("domain '{}' mixes a base and constraint kind", dom.name()))),
    }
}

/// Eigenvalue if an eigenfunction obeys the domain; residual spectrum if instead
/// z̄ is an eigenvalue of the adjoint with a square-integrable eigenfunction.
pub fn residual_spectrum_probe(op: &OperatorSpec, dom: &DomainSpec, z: Complex64) -> Result<ResidualVerdict> {
    check_line_operator(op, dom)?;
    let eigen = eigen_in_domain(op, dom, z)?;
    let (adjoint_dim, _, _) = adjoint_kernel(op, dom, z.conj(), 0)?;
    let residual = !eigen && adjoint_dim > 0;
    assert!(!(eigen && residual), "eigenvalue and residual spectrum are exclusive");
    Ok(if eigen {
        ResidualVerdict::Eigenvalue
    } else if residual {
        ResidualVerdict::InResidualSpectrum
    } else {
        ResidualVerdict::NotDetected
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::Constants;
    use std::f64::consts::PI;

    fn k() -> Constants {
        Constants::default()
    }

    fn indices(name: &str) -> DeficiencyReport {
        let (op, dom) = catalog_pair(name, &k()).unwrap();
        deficiency_indices(&op, &dom).unwrap()
    }

    #[test]
    fn criterion_theorem_table() {
        assert_eq!(classify_von_neumann(0, 0), (Verdict::SelfAdjoint, SpectrumClass::SubsetOfReals));
        assert_eq!(classify_von_neumann(1, 1), (Verdict::ExtensionsExist, SpectrumClass::AllComplexPlane));
        assert_eq!(classify_von_neumann(0, 1), (Verdict::NoExtension, SpectrumClass::ClosedUpperHalfPlane));
        assert_eq!(classify_von_neumann(2, 0), (Verdict::NoExtension, SpectrumClass::ClosedLowerHalfPlane));
    }

    #[test]
    fn box_momentum_has_one_one() {
        let r = indices("P_box");
        assert_eq!((r.n_plus, r.n_minus), (1, 1));
        assert_eq!(r.verdict, Verdict::ExtensionsExist);
        assert_eq!(r.witnesses.len(), 2);
        assert!(r.witnesses.iter().all(|w| w.norm.is_finite()));
    }

    #[test]
    fn line_operators() {
        let p = indices("P_line");
        assert_eq!((p.n_plus, p.n_minus), (0, 0));
        assert!(p.candidates.iter().all(|w| w.norm.status == crate::numerics::NormStatus::Divergent));
        let a = indices("A_line");
        assert_eq!((a.n_plus, a.n_minus), (0, 1));
        assert_eq!(a.verdict, Verdict::NoExtension);
        assert_eq!(a.witnesses[0].name, "A_deficiency_g_minus");
    }

    #[test]
    fn self_adjoint_compact_pairs() {
        for name in ["Lz_circle", "H_well"] {
            let r = indices(name);
            assert_eq!((r.n_plus, r.n_minus), (0, 0), "{name}");
        }
    }

    #[test]
    fn extension_family_members() {
        let (op, dom) = catalog_pair("P_box", &k()).unwrap();
        let fam = extension_family(&op, &dom).unwrap();
        assert!(fam.domain(0.0).boundary_constraints().unwrap().labels()[0] == "ψ(0) = ψ(1)");
        assert!((fam.eigenvalue(1, 0.0) - TAU).abs() < 1e-12);
        assert!((fam.eigenvalue(0, PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert!(fam.residual(0, PI / 2.0, 2049).unwrap() <= 1e-3);
        assert_eq!(fam.classify(0.7).unwrap(), Classification::SelfAdjoint);
        let (lop, ldom) = catalog_pair("P_line", &k()).unwrap();
        assert!(matches!(extension_family(&lop, &ldom), Err(QopError::Precondition(_))));
    }

    #[test]
    fn residual_spectrum_cases() {
        let (p, dir) = catalog_pair("P_box", &k()).unwrap();
        for z in [Complex64::new(1.0, 1.0), Complex64::new(3.0, 0.0)] {
            assert_eq!(residual_spectrum_probe(&p, &dir, z).unwrap(), ResidualVerdict::InResidualSpectrum);
        }
        let (lz, circ) = catalog_pair("Lz_circle", &k()).unwrap();
        assert_eq!(residual_spectrum_probe(&lz, &circ, Complex64::new(2.0, 0.0)).unwrap(), ResidualVerdict::Eigenvalue);
        assert_eq!(residual_spectrum_probe(&lz, &circ, Complex64::new(0.5, 0.0)).unwrap(), ResidualVerdict::NotDetected);
        let (a, line) = catalog_pair("A_line", &k()).unwrap();
        assert_eq!(residual_spectrum_probe(&a, &line, Complex64::new(0.0, 1.0)).unwrap(), ResidualVerdict::InResidualSpectrum);
    }

    #[test]
    fn outside_catalog_is_unsupported() {
        let q = OperatorSpec::position(k());
        assert!(matches!(deficiency_indices(&q, &DomainSpec::unconstrained(0.0, 1.0)), Err(QopError::Unsupported(_))));
        assert!(catalog_pair("Q_line", &k()).is_err());
    }
}
