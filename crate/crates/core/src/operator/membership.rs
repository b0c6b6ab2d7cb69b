//! Domain membership: boundary residuals, decay class and the norm of the image.

use serde::{Deserialize, Serialize};

use num_complex::Complex64;

use super::domain::{DecayRequirement, DomainConstraints, DomainSpec};
use super::spec::OperatorSpec;
use crate::error::{QopError, Result};
use crate::functions::{boundary_trace, schwartz_probe, AnalyticFunction, DecayClass};
use crate::numerics::{
    fornberg_weights, improper_norm_probe, norm, GridFunction, GridKind, NormProbeResult, NormStatus, ProbeDomain,
};

/// What is being tested for membership.
#[derive(Debug, Clone, Copy)]
pub enum Subject<'a> {
    Grid(&'a GridFunction),
    Analytic(&'a AnalyticFunction),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainMembershipReport {
    pub in_domain: bool,
    pub violated_constraints: Vec<String>,
    pub image_norm_status: NormProbeResult,
}

/// Boundary residual tolerance relative to 1 + ‖f‖∞.
pub const BC_TOL: f64 = 1e-6;

/// Nodes for the sup-norm estimate of an analytic subject.
const SUP_SAMPLES: usize = 4001;

/// Checks f ∈ D(op) for the domain `dom`: boundary conditions or decay, and ‖op f‖ < ∞.
pub fn domain_check(subject: Subject<'_>, op: &OperatorSpec, dom: &DomainSpec) -> Result<DomainMembershipReport> {
    let mut violated = Vec::new();
    let image = match (dom.constraints(), dom.interval()) {
        (DomainConstraints::Boundary(bc), Some((a, b))) => {
            let (trace, sup) = match subject {
                Subject::Grid(f) => {
                    let g = f.grid();
                    if g.kind() != GridKind::Compact || (g.a() - a).abs() > 1e-12 || (g.b() - b).abs() > 1e-12 {
                        return Err(QopError::Input(format!("grid does not cover the interval of '{}'", dom.name())));
                    }
                    (boundary_trace(f, bc.order())?.vector, f.sup_norm())
                }
                Subject::Analytic(f) => (analytic_trace(f, bc.order(), a, b), analytic_sup(f, a, b)),
            };
            let tol = BC_TOL * (1.0 + sup);
            for r in 0..bc.count() {
                let res: Complex64 = (0..trace.len()).map(|c| bc.rows()[(r, c)] * trace[c]).sum();
                if res.norm() > tol {
                    violated.push(bc.labels()[r].clone());
                }
            }
            image_norm(subject, op, ProbeDomain::Interval(a, b))?
        }
        (DomainConstraints::Decay(req), None) => {
            match subject {
                Subject::Analytic(f) => {
                    let own = improper_norm_probe(f, f.singular_points(), ProbeDomain::Line)?;
                    if !own.is_finite() {
                        violated.push("f square-integrable on R".to_string());
                    }
                    if *req == DecayRequirement::Schwartz {
                        let decay = schwartz_probe(f, 8, 2)?;
                        if decay.class != DecayClass::RapidDecay {
                            let first = decay.failures.first().map(|(m, j)| format!(" (fails at m = {m}, j = {j})"));
                            violated.push(format!("rapid decay of x^m f^(j){}", first.unwrap_or_default()));
                        }
                    }
                }
                Subject::Grid(f) => {
                    if f.grid().is_compact() {
                        return Err(QopError::Input(format!("'{}' needs a truncated-line grid", dom.name())));
                    }
                    let v = f.values();
                    let edge = v[0].norm().max(v[v.len() - 1].norm());
                    if edge > 1e-8 * (1.0 + f.sup_norm()) {
                        violated.push("f negligible at the truncation edges".to_string());
                    }
                }
            }
            image_norm(subject, op, ProbeDomain::Line)?
        }
        _ => return Err(QopError::Structural(format!("domain '{}' mixes a base and constraint kind", dom.name()))),
    };
    let in_domain = violated.is_empty() && image.is_finite();
    Ok(DomainMembershipReport { in_domain, violated_constraints: violated, image_norm_status: image })
}

fn image_norm(subject: Subject<'_>, op: &OperatorSpec, domain: ProbeDomain) -> Result<NormProbeResult> {
    match subject {
        Subject::Grid(f) => {
            // A grid function has only one resolution; report ‖op f‖² on it.
            let v = norm(&op.apply(f)?).powi(2);
            let status = if v.is_finite() { NormStatus::Finite } else { NormStatus::Divergent };
            Ok(NormProbeResult { status, value: v.is_finite().then_some(v), refinement_trace: vec![v] })
        }
        Subject::Analytic(f) => {
            let img = op.image_sampler(f.sampler());
            let img = match domain {
                ProbeDomain::Interval(a, b) => img.within(a, b),
                ProbeDomain::Line => img,
            };
            improper_norm_probe(&img, f.singular_points(), domain)
        }
    }
}

/// One-sided derivatives of an analytic function at both ends, from points inside [a, b].
pub fn analytic_trace(f: &AnalyticFunction, k: usize, a: f64, b: f64) -> Vec<Complex64> {
    let h = (b - a) / 200.0;
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * k];
    for (end, x0, dir) in [(0usize, a, 1.0), (1usize, b, -1.0)] {
        let nodes: Vec<f64> = (0..9).map(|i| x0 + dir * i as f64 * h).collect();
        let vals: Vec<Complex64> = nodes.iter().map(|x| f.eval_inside(*x, a, b)).collect();
        for j in 0..k {
            let w = fornberg_weights(x0, &nodes, j);
            out[end * k + j] = vals.iter().zip(&w).map(|(v, wi)| v * *wi).sum();
        }
    }
    out
}

fn analytic_sup(f: &AnalyticFunction, a: f64, b: f64) -> f64 {
    let h = (b - a) / (SUP_SAMPLES - 1) as f64;
    (0..SUP_SAMPLES).map(|i| f.eval_inside(a + i as f64 * h, a, b).norm()).fold(0.0, f64::max)
}

trait EvalInside {
    fn eval_inside(&self, x: f64, a: f64, b: f64) -> Complex64;
}

impl EvalInside for AnalyticFunction {
    /// Pins the last node to the endpoint so rounding never leaves the support.
    fn eval_inside(&self, x: f64, a: f64, b: f64) -> Complex64 {
        use crate::numerics::Sampler;
        self.eval(x.clamp(a, b))
    }
}

/// Twist λ of a single condition ψ(a) = λψ(b) with |λ| = 1, if that is the whole domain.
pub fn twist_of(dom: &DomainSpec) -> Option<Complex64> {
    let bc = dom.boundary_constraints()?;
    if bc.order() != 1 || bc.count() != 1 {
        return None;
    }
    let (l, r) = (bc.rows()[(0, 0)], bc.rows()[(0, 1)]);
    if l.norm() < 1e-12 {
        return None;
    }
    let lambda = -r / l;
    ((lambda.norm() - 1.0).abs() < 1e-12).then_some(lambda)
}

/// Applies `op` honouring a twisted or periodic domain by wrap-around stencils.
///
/// The last node is the image of the first: ψ(b) = λ̄ψ(a). Plane waves that obey
/// the condition are exact eigenvectors of the wrapped differences. Any other
/// domain falls back to [`OperatorSpec::apply`].
pub fn apply_in_domain(op: &OperatorSpec, f: &GridFunction, dom: &DomainSpec) -> Result<GridFunction> {
    let Some(lambda) = twist_of(dom) else {
        return op.apply(f);
    };
    let grid = f.grid();
    let (a, b) = dom.interval().expect("twisted domains are compact");
    if !grid.is_compact() || (grid.a() - a).abs() > 1e-12 || (grid.b() - b).abs() > 1e-12 {
        return Err(QopError::Input(format!("grid does not cover the interval of '{}'", dom.name())));
    }
    let n = grid.len();
    let m = n - 1;
    let v = f.values();
    let h = grid.h();
    let shift = lambda.conj();
    // Value at virtual node i, where i may leave [0, m): ψ(x + L) = λ̄ψ(x).
    let at = |i: i64| {
        let period = i.div_euclid(m as i64);
        let idx = i.rem_euclid(m as i64) as usize;
        v[idx] * shift.powi(period as i32)
    };
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (j, cj) in op.coefficients().iter().enumerate() {
        if cj.is_zero() {
            continue;
        }
        let half = (j as i64 + 1) / 2 + 1;
        let offsets: Vec<f64> = (-half..=half).map(|o| o as f64).collect();
        let w = fornberg_weights(0.0, &offsets, j);
        let scale = h.powi(-(j as i32));
        for (i, slot) in out.iter_mut().enumerate().take(m) {
            let d: Complex64 = (-half..=half).zip(&w).map(|(o, wi)| at(i as i64 + o) * *wi).sum();
            *slot += cj.eval(grid.node(i)) * d * scale;
        }
        // The duplicated end node inherits the twist.
        let d0: Complex64 = (-half..=half).zip(&w).map(|(o, wi)| at(m as i64 + o) * *wi).sum();
        out[m] += cj.eval(b) * d0 * scale;
    }
    GridFunction::new(*grid, out, format!("{}({})", op.name(), f.label()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::catalog_get;
    use crate::numerics::{inner_product, Grid};
    use crate::operator::{domain_of_commutator, Constants};
    use std::f64::consts::TAU;

    fn k() -> Constants {
        Constants::default()
    }

    #[test]
    fn parabola_lies_in_d_h_but_not_d_h2() {
        let psi = catalog_get("parabola_well", &k()).unwrap();
        let r = domain_check(Subject::Analytic(&psi), &OperatorSpec::hamiltonian(k()), &DomainSpec::well_dirichlet(1.0))
            .unwrap();
        assert!(r.in_domain, "{r:?}");
        let r2 = domain_check(Subject::Analytic(&psi), &OperatorSpec::hamiltonian_squared(k()), &DomainSpec::well_h2(1.0))
            .unwrap();
        assert!(!r2.in_domain);
        assert_eq!(r2.violated_constraints, vec!["ψ″(-1) = 0".to_string(), "ψ″(1) = 0".to_string()]);
        assert!(r2.image_norm_status.is_finite());
    }

    #[test]
    fn circle_modes_miss_the_commutator_domain() {
        let lz = OperatorSpec::angular_momentum(k());
        let phi = OperatorSpec::angle(k());
        let d = domain_of_commutator(
            &lz,
            &DomainSpec::named("circle", &k()).unwrap(),
            &phi,
            &DomainSpec::named("circle_full", &k()).unwrap(),
        )
        .unwrap();
        let comm = OperatorSpec::commutator(&lz, &phi).unwrap();
        for m in [0, 1, -2] {
            let f = catalog_get(&format!("circle_mode({m})"), &k()).unwrap();
            let r = domain_check(Subject::Analytic(&f), &comm, &d).unwrap();
            assert!(!r.in_domain);
            assert!(r.violated_constraints.iter().any(|v| v == "ψ(0) = 0"), "{r:?}");
        }
    }

    #[test]
    fn grid_and_line_subjects() {
        let grid = Grid::compact(-1.0, 1.0, 801).unwrap();
        let phi = catalog_get("well_eigenfunction(2)", &k()).unwrap().sample(&grid).unwrap();
        let r = domain_check(Subject::Grid(&phi), &OperatorSpec::hamiltonian(k()), &DomainSpec::well_dirichlet(1.0)).unwrap();
        assert!(r.in_domain);
        let g = catalog_get("gaussian", &k()).unwrap();
        let line = DomainSpec::line(DecayRequirement::Schwartz);
        assert!(domain_check(Subject::Analytic(&g), &OperatorSpec::momentum(k()), &line).unwrap().in_domain);
        let f = catalog_get("A_eigenfunction_f", &k()).unwrap();
        let r = domain_check(Subject::Analytic(&f), &OperatorSpec::a_operator(k()), &line).unwrap();
        assert!(!r.in_domain);
        let maximal = DomainSpec::line(DecayRequirement::Maximal);
        assert!(domain_check(Subject::Analytic(&f), &OperatorSpec::a_operator(k()), &maximal).unwrap().in_domain);
        assert!(matches!(
            domain_check(Subject::Grid(&phi), &OperatorSpec::momentum(k()), &line),
            Err(QopError::Input(_))
        ));
    }

    #[test]
    fn wrapped_momentum_has_circle_modes_as_exact_eigenvectors() {
        let grid = Grid::compact(0.0, TAU, 513).unwrap();
        let circle = DomainSpec::named("circle", &k()).unwrap();
        let f = catalog_get("circle_mode(3)", &k()).unwrap().sample(&grid).unwrap();
        let lf = apply_in_domain(&OperatorSpec::angular_momentum(k()), &f, &circle).unwrap();
        let mean = inner_product(&f, &lf).unwrap();
        let resid = lf.combine(Complex64::new(1.0, 0.0), &f, -mean).unwrap();
        assert!(norm(&resid) < 1e-12);
        assert!((mean.re - 3.0).abs() < 1e-4);
    }

    #[test]
    fn twisted_plane_wave_residual() {
        let alpha = std::f64::consts::FRAC_PI_2;
        let grid = Grid::compact(0.0, 1.0, 2049).unwrap();
        let dom = DomainSpec::twisted(0.0, 1.0, alpha);
        let p = -alpha;
        let f = GridFunction::from_fn(grid, "psi_p", |x| Complex64::from_polar(1.0, p * x)).unwrap();
        let pf = apply_in_domain(&OperatorSpec::momentum(k()), &f, &dom).unwrap();
        let resid = pf.combine(Complex64::new(1.0, 0.0), &f, Complex64::new(-p, 0.0)).unwrap();
        assert!(norm(&resid) / norm(&f) < 1e-3);
        assert_eq!(twist_of(&dom).map(|l| (l.arg() - alpha).abs() < 1e-12), Some(true));
        assert!(twist_of(&DomainSpec::dirichlet(0.0, 1.0)).is_none());
    }
}
