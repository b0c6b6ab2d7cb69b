//! Variances and lower bounds on ΔA·ΔB for sampled states.
//!
//! Three bounds are compared. The commutator bound ½|⟨ψ, i[A,B]ψ⟩| only
//! exists when ψ lies in the commutator's domain. The form bound
//! ½|i⟨Aψ,Bψ⟩ − i⟨Bψ,Aψ⟩| needs only ψ ∈ D(A) ∩ D(B) and always holds. On the
//! circle the form bound reduces to (ℏ/2)|1 − 2π|ψ(2π)|²|.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QopError, Result};
use crate::functions::catalog_get;
use crate::numerics::{fornberg_weights, inner_product, norm, Grid, GridFunction};
use crate::operator::{
    apply_in_domain, domain_check, domain_of_commutator, twist_of, Constants, DomainBase, DomainSpec, OperatorSpec,
    Subject,
};

/// Seed used for random circle states unless overridden.
pub const DEFAULT_SEED: u64 = 20_231_117;

/// Tolerance on ‖ψ‖ = 1.
const NORM_TOL: f64 = 1e-6;

/// Slack allowed in ΔA·ΔB ≥ bound.
pub const INEQUALITY_SLACK: f64 = 1e-9;

/// A bound that is either computed or withheld with the reasons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Bound {
    Present { value: f64 },
    Absent { reason: Vec<String> },
}

impl Bound {
    pub fn value(&self) -> Option<f64> {
        match self {
            Bound::Present { value } => Some(*value),
            Bound::Absent { .. } => None,
        }
    }
}

/// Two observables with their domains.
#[derive(Debug, Clone)]
pub struct ObservablePair {
    pub a: OperatorSpec,
    pub dom_a: DomainSpec,
    pub b: OperatorSpec,
    pub dom_b: DomainSpec,
}

impl ObservablePair {
    /// (P, Q) on Schwartz functions of the line.
    pub fn momentum_position(k: Constants) -> Self {
        let line = DomainSpec::line(crate::operator::DecayRequirement::Schwartz);
        Self { a: OperatorSpec::momentum(k), dom_a: line.clone(), b: OperatorSpec::position(k), dom_b: line }
    }

    /// (L_z, φ) on the circle: periodic for L_z, unconstrained for φ.
    pub fn lz_phi(k: Constants) -> Self {
        Self {
            a: OperatorSpec::angular_momentum(k),
            dom_a: DomainSpec::named("circle", &k).expect("built-in domain"),
            b: OperatorSpec::angle(k),
            dom_b: DomainSpec::named("circle_full", &k).expect("built-in domain"),
        }
    }

    fn is_lz_phi(&self) -> bool {
        matches!(self.dom_a.interval(), Some((a, b)) if a == 0.0 && (b - TAU).abs() < 1e-12)
            && twist_of(&self.dom_a).is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyReport {
    pub state: String,
    pub operator_a: String,
    pub operator_b: String,
    pub delta_a: f64,
    pub delta_b: f64,
    pub product: f64,
    pub bound_commutator: Bound,
    pub bound_form: f64,
    pub bound_lz_phi: Option<f64>,
    pub inequality_holds: bool,
    pub caveat: Option<String>,
}

/// Half-width of the high-order central stencil used on line grids.
const LINE_STENCIL_EXTRA: i64 = 3;

/// op ψ, using wrapped differences on twisted domains and eighth-order
/// central differences in the interior of line grids.
fn image(op: &OperatorSpec, psi: &GridFunction, dom: &DomainSpec) -> Result<GridFunction> {
    if twist_of(dom).is_some() || psi.grid().is_compact() {
        return apply_in_domain(op, psi, dom);
    }
    let coarse = op.apply(psi)?;
    let grid = psi.grid();
    let n = grid.len() as i64;
    let v = psi.values();
    let mut out = psi.multiply_by(|x| op.coefficient(0).eval(x)).values().to_vec();
    for (j, cj) in op.coefficients().iter().enumerate().skip(1) {
        if cj.is_zero() {
            continue;
        }
        let half = (j as i64 + 1) / 2 + LINE_STENCIL_EXTRA;
        let offsets: Vec<f64> = (-half..=half).map(|o| o as f64).collect();
        let w = fornberg_weights(0.0, &offsets, j);
        let scale = grid.h().powi(-(j as i32));
        for i in half..n - half {
            let d: Complex64 = (-half..=half).zip(&w).map(|(o, wi)| v[(i + o) as usize] * *wi).sum();
            out[i as usize] += cj.eval(grid.node(i as usize)) * d * scale;
        }
    }
    // Edge nodes, where the state has already decayed, keep the low-order image.
    let edge = (op.order() as i64 + 1) / 2 + LINE_STENCIL_EXTRA;
    for i in (0..edge).chain(n - edge..n) {
        out[i as usize] = coarse.values()[i as usize];
    }
    GridFunction::new(*grid, out, coarse.label())
}

fn require_member(psi: &GridFunction, op: &OperatorSpec, dom: &DomainSpec) -> Result<()> {
    let report = domain_check(Subject::Grid(psi), op, dom)?;
    if !report.in_domain {
        let mut why = report.violated_constraints.clone();
        if !report.image_norm_status.is_finite() {
            why.push(format!("‖{} ψ‖ not finite", op.name()));
        }
        return Err(QopError::Precondition(format!(
            "state '{}' is outside D({}) on '{}': {}",
            psi.label(),
            op.name(),
            dom.name(),
            why.join("; ")
        )));
    }
    Ok(())
}

fn require_normalized(psi: &GridFunction) -> Result<()> {
    let nrm = norm(psi);
    if (nrm - 1.0).abs() > NORM_TOL {
        return Err(QopError::Input(format!("state '{}' has norm {nrm}, expected 1", psi.label())));
    }
    Ok(())
}

/// Δ_ψ op = ‖op ψ − ⟨op⟩ψ‖, refused when ψ ∉ D(op).
pub fn variance(psi: &GridFunction, op: &OperatorSpec, dom: &DomainSpec) -> Result<f64> {
    require_normalized(psi)?;
    require_member(psi, op, dom)?;
    let img = image(op, psi, dom)?;
    let mean = inner_product(psi, &img)?.re;
    let centred = img.combine(Complex64::new(1.0, 0.0), psi, Complex64::new(-mean, 0.0))?;
    Ok(norm(&centred))
}

/// ½|i⟨Aψ,Bψ⟩ − i⟨Bψ,Aψ⟩| = |Im⟨Aψ,Bψ⟩|, defined on D(A) ∩ D(B).
pub fn bound_form(psi: &GridFunction, pair: &ObservablePair) -> Result<f64> {
    require_member(psi, &pair.a, &pair.dom_a)?;
    require_member(psi, &pair.b, &pair.dom_b)?;
    let ap = image(&pair.a, psi, &pair.dom_a)?;
    let bp = image(&pair.b, psi, &pair.dom_b)?;
    let i = Complex64::i();
    let z = i * inner_product(&ap, &bp)? - i * inner_product(&bp, &ap)?;
    Ok(0.5 * z.norm())
}

/// ½|⟨ψ, i[A,B]ψ⟩| when ψ ∈ D([A,B]), otherwise the violated constraints.
pub fn bound_commutator(psi: &GridFunction, pair: &ObservablePair) -> Result<Bound> {
    let comm = OperatorSpec::commutator(&pair.a, &pair.b)?;
    let dom = domain_of_commutator(&pair.a, &pair.dom_a, &pair.b, &pair.dom_b)?;
    let report = domain_check(Subject::Grid(psi), &comm, &dom)?;
    if !report.in_domain {
        let mut reason = report.violated_constraints;
        if !report.image_norm_status.is_finite() {
            reason.push(format!("‖{} ψ‖ not finite", comm.name()));
        }
        return Ok(Bound::Absent { reason });
    }
    let img = image(&comm, psi, &dom)?;
    let value = 0.5 * (Complex64::i() * inner_product(psi, &img)?).norm();
    Ok(Bound::Present { value })
}

/// (ℏ/2)|1 − 2π|ψ(2π)|²| for ψ ∈ D(L_z) on the circle.
pub fn bound_lz_phi(psi: &GridFunction, k: &Constants) -> Result<f64> {
    let pair = ObservablePair::lz_phi(*k);
    require_member(psi, &pair.a, &pair.dom_a)?;
    let end = psi.values()[psi.grid().len() - 1];
    Ok(0.5 * k.hbar * (1.0 - TAU * end.norm_sqr()).abs())
}

const LZ_PHI_CAVEAT: &str = "Δφ is the variance of multiplication by φ on [0, 2π); it changes when the origin of the angle is moved";

/// Every quantity for one state and one pair of observables.
pub fn uncertainty_report(psi: &GridFunction, pair: &ObservablePair) -> Result<UncertaintyReport> {
    let k = *pair.a.constants();
    let delta_a = variance(psi, &pair.a, &pair.dom_a)?;
    let delta_b = variance(psi, &pair.b, &pair.dom_b)?;
    let product = delta_a * delta_b;
    let form = bound_form(psi, pair)?;
    let lz_phi = pair.is_lz_phi();
    let bound_lz = if lz_phi { Some(bound_lz_phi(psi, &k)?) } else { None };
    let inequality_holds =
        product >= form - INEQUALITY_SLACK && bound_lz.is_none_or(|b| product >= b - INEQUALITY_SLACK);
    Ok(UncertaintyReport {
        state: psi.label().to_string(),
        operator_a: pair.a.name().to_string(),
        operator_b: pair.b.name().to_string(),
        delta_a,
        delta_b,
        product,
        bound_commutator: bound_commutator(psi, pair)?,
        bound_form: form,
        bound_lz_phi: bound_lz,
        inequality_holds,
        caveat: lz_phi.then(|| LZ_PHI_CAVEAT.to_string()),
    })
}

/// Grid for circle states; the last node duplicates φ = 0.
pub fn circle_grid(n_points: usize) -> Result<Grid> {
    Grid::compact(0.0, TAU, n_points)
}

/// Σ c_m e^{imφ}/√(2π), normalized on the grid.
pub fn circle_state(modes: &[(i32, Complex64)], n_points: usize, label: &str) -> Result<GridFunction> {
    if modes.is_empty() {
        return Err(QopError::Input("a circle state needs at least one mode".into()));
    }
    let grid = circle_grid(n_points)?;
    let raw = GridFunction::from_fn(grid, label, |phi| {
        modes.iter().map(|(m, c)| c * Complex64::from_polar(1.0 / TAU.sqrt(), *m as f64 * phi)).sum()
    })?;
    normalized(raw)
}

/// (ψ₀ + λψ₁)/√(1 + λ²).
pub fn two_mode_state(lambda: f64, n_points: usize) -> Result<GridFunction> {
    circle_state(&[(0, 1.0.into()), (1, lambda.into())], n_points, &format!("two_mode({lambda})"))
}

/// A random combination of the modes |m| ≤ 6 with uniform coefficients in the unit square.
pub fn random_circle_state(rng: &mut ChaCha8Rng, n_points: usize) -> Result<GridFunction> {
    let modes: Vec<(i32, Complex64)> =
        (-6..=6).map(|m| (m, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))).collect();
    circle_state(&modes, n_points, "random_circle_state")
}

/// A reproducible sequence of random circle states.
pub fn random_circle_states(seed: u64, count: usize, n_points: usize) -> Result<Vec<GridFunction>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| random_circle_state(&mut rng, n_points).map(|s| s.with_label(format!("random_circle_state#{i}"))))
        .collect()
}

fn normalized(f: GridFunction) -> Result<GridFunction> {
    let nrm = norm(&f);
    if !(nrm.is_finite() && nrm > 0.0) {
        return Err(QopError::Input(format!("state '{}' cannot be normalized (norm {nrm})", f.label())));
    }
    Ok(f.scale(Complex64::new(1.0 / nrm, 0.0)))
}

/// Grid resolution for the named states.
pub const STATE_POINTS: usize = 2401;

/// Line states need room for the tails.
const LINE_RADIUS: f64 = 12.0;

/// Named states and the pair of observables they are paired with.
///
/// `gaussian(σ)` lives on the line with (P, Q). On the circle: `circle_mode(m)`,
/// `two_mode(λ)`, `vanishing` (∝ 1 − cos φ, zero at both ends) and `random(i)`.
pub fn named_state(name: &str, k: &Constants, seed: u64) -> Result<(GridFunction, ObservablePair)> {
    let name = name.trim();
    let arg = |default: &str| -> String {
        name.find('(').map_or(default.to_string(), |i| name[i + 1..].trim_end_matches(')').trim().to_string())
    };
    let parse = |s: String| -> Result<f64> {
        s.parse::<f64>().map_err(|_| QopError::Input(format!("cannot parse parameter of state '{name}'")))
    };
    let base = name.split('(').next().unwrap_or("");
    match base {
        "gaussian" => {
            let f = catalog_get(name, k)?;
            let g = f.sample(&Grid::line(LINE_RADIUS, STATE_POINTS)?)?.with_label(name);
            Ok((normalized(g)?, ObservablePair::momentum_position(*k)))
        }
        "circle_mode" => {
            let m = parse(arg("0"))?;
            if m.fract() != 0.0 {
                return Err(QopError::Input(format!("circle_mode needs an integer, got {m}")));
            }
            let s = circle_state(&[(m as i32, 1.0.into())], STATE_POINTS, name)?;
            Ok((s, ObservablePair::lz_phi(*k)))
        }
        "two_mode" => Ok((two_mode_state(parse(arg("0.1"))?, STATE_POINTS)?, ObservablePair::lz_phi(*k))),
        "vanishing" => {
            let s = circle_state(&[(0, 1.0.into()), (1, (-0.5).into()), (-1, (-0.5).into())], STATE_POINTS, name)?;
            Ok((s, ObservablePair::lz_phi(*k)))
        }
        "random" => {
            let i = parse(arg("0"))?;
            if i.fract() != 0.0 || i < 0.0 {
                return Err(QopError::Input(format!("random needs a non-negative index, got {i}")));
            }
            let states = random_circle_states(seed, i as usize + 1, STATE_POINTS)?;
            let s = states.into_iter().last().expect("count ≥ 1").with_label(name);
            Ok((s, ObservablePair::lz_phi(*k)))
        }
        other => Err(QopError::Input(format!(
            "unknown state '{other}'; expected gaussian(σ), circle_mode(m), two_mode(λ), vanishing or random(i)"
        ))),
    }
}

/// Sanity check that a pair lives on one base.
pub fn same_base(pair: &ObservablePair) -> bool {
    matches!((pair.dom_a.base(), pair.dom_b.base()), (DomainBase::Line, DomainBase::Line))
        || pair.dom_a.interval() == pair.dom_b.interval()
}
