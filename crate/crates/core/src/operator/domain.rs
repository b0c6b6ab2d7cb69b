use std::f64::consts::TAU;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::constants::Constants;
use super::poly::binomial;
use super::spec::OperatorSpec;
use crate::error::{QopError, Result};
use crate::linalg::{rank, row_reduce};

/// Where the functions of a domain live.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DomainBase {
    Compact { a: f64, b: f64 },
    Line,
}

/// Decay requirement at infinity for line domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecayRequirement {
    /// f and op f square-integrable.
    Maximal,
    /// f rapidly decreasing with all derivatives.
    Schwartz,
}

/// Linear conditions M·trace(ψ) = 0 on the order-k boundary trace.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryConstraints {
    order: usize,
    rows: DMatrix<Complex64>,
    labels: Vec<String>,
}

impl BoundaryConstraints {
    /// Rows must be linearly independent; labels are generated when absent.
    pub fn new(order: usize, rows: DMatrix<Complex64>, labels: Option<Vec<String>>, base: (f64, f64)) -> Result<Self> {
        if rows.ncols() != 2 * order {
            return Err(QopError::Structural(format!(
                "constraint rows have {} columns, trace order {order} needs {}",
                rows.ncols(),
                2 * order
            )));
        }
        if rows.nrows() > 2 * order {
            return Err(QopError::Structural(format!("{} constraints on a {}-dimensional trace", rows.nrows(), 2 * order)));
        }
        if rank(&rows) < rows.nrows() {
            return Err(QopError::Structural("constraint rows are linearly dependent".into()));
        }
        let labels = match labels {
            Some(l) if l.len() == rows.nrows() => l,
            Some(l) => {
                return Err(QopError::Structural(format!("{} labels for {} constraints", l.len(), rows.nrows())));
            }
            None => (0..rows.nrows()).map(|r| describe_row(&rows, r, order, base)).collect(),
        };
        Ok(Self { order, rows, labels })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rows(&self) -> &DMatrix<Complex64> {
        &self.rows
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn count(&self) -> usize {
        self.rows.nrows()
    }

    /// The same conditions on a longer trace (ψ, …, ψ^{(k−1)}).
    pub fn lift(&self, k: usize, base: (f64, f64)) -> Result<Self> {
        if k < self.order {
            return Err(QopError::Structural(format!("cannot lift order {} constraints down to order {k}", self.order)));
        }
        let mut rows = DMatrix::zeros(self.rows.nrows(), 2 * k);
        for r in 0..self.rows.nrows() {
            for end in 0..2 {
                for d in 0..self.order {
                    rows[(r, end * k + d)] = self.rows[(r, end * self.order + d)];
                }
            }
        }
        Self::new(k, rows, Some(self.labels.clone()), base)
    }
}

/// Human-readable form of one constraint row, e.g. `ψ(0) = e^{0.7i}·ψ(1)`.
fn describe_row(rows: &DMatrix<Complex64>, r: usize, k: usize, (a, b): (f64, f64)) -> String {
    let primes = ["", "′", "″", "‴"];
    let name = |col: usize| {
        let (x, d) = if col < k { (a, col) } else { (b, col - k) };
        format!("ψ{}({})", primes[d], fmt_point(x))
    };
    let nz: Vec<(usize, Complex64)> = (0..rows.ncols())
        .map(|cidx| (cidx, rows[(r, cidx)]))
        .filter(|(_, v)| v.norm() > 1e-12)
        .collect();
    match nz.as_slice() {
        [(i, _)] => format!("{} = 0", name(*i)),
        [(i, ci), (j, cj)] => {
            let ratio = -cj / ci;
            if (ratio - 1.0).norm() < 1e-12 {
                format!("{} = {}", name(*i), name(*j))
            } else {
                format!("{} = {}·{}", name(*i), fmt_coeff(ratio), name(*j))
            }
        }
        terms => {
            let parts: Vec<String> = terms.iter().map(|(i, v)| format!("{}·{}", fmt_coeff(*v), name(*i))).collect();
            format!("{} = 0", parts.join(" + "))
        }
    }
}

fn fmt_point(x: f64) -> String {
    if (x - TAU).abs() < 1e-12 {
        "2π".into()
    } else if (x + TAU).abs() < 1e-12 {
        "-2π".into()
    } else {
        format!("{x}")
    }
}

fn fmt_coeff(z: Complex64) -> String {
    if z.im.abs() < 1e-12 {
        return format!("{}", round6(z.re));
    }
    if (z.norm() - 1.0).abs() < 1e-12 {
        return format!("e^{{{}i}}", round6(z.arg()));
    }
    format!("({}{:+}i)", round6(z.re), round6(z.im))
}

fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

/// One constraint family of a domain.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainConstraints {
    Boundary(BoundaryConstraints),
    Decay(DecayRequirement),
}

/// The second half of an operator's identity.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    name: String,
    base: DomainBase,
    constraints: DomainConstraints,
}

fn unit_rows(k: usize, cols: &[usize]) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(cols.len(), 2 * k);
    for (r, c) in cols.iter().enumerate() {
        m[(r, *c)] = Complex64::new(1.0, 0.0);
    }
    m
}

impl DomainSpec {
    pub fn new(name: impl Into<String>, base: DomainBase, constraints: DomainConstraints) -> Result<Self> {
        match (&base, &constraints) {
            (DomainBase::Compact { a, b }, DomainConstraints::Boundary(_)) if a < b => {}
            (DomainBase::Line, DomainConstraints::Decay(_)) => {}
            _ => {
                return Err(QopError::Input(
                    "compact bases take boundary constraints and the line takes a decay class".into(),
                ))
            }
        }
        Ok(Self { name: name.into(), base, constraints })
    }

    fn boundary(name: &str, a: f64, b: f64, k: usize, rows: DMatrix<Complex64>) -> Self {
        let bc = BoundaryConstraints::new(k, rows, None, (a, b)).expect("catalog constraints are independent");
        Self { name: name.into(), base: DomainBase::Compact { a, b }, constraints: DomainConstraints::Boundary(bc) }
    }

    /// ψ(a) = 0 = ψ(b) on a first-order trace.
    pub fn dirichlet(a: f64, b: f64) -> Self {
        Self::boundary("dirichlet", a, b, 1, unit_rows(1, &[0, 1]))
    }

    /// ψ(a) = ψ(b).
    pub fn periodic(a: f64, b: f64) -> Self {
        Self::twisted(a, b, 0.0).renamed("periodic")
    }

    /// ψ(a) = e^{iα} ψ(b).
    pub fn twisted(a: f64, b: f64, alpha: f64) -> Self {
        let rows = DMatrix::from_row_slice(1, 2, &[Complex64::new(1.0, 0.0), -Complex64::from_polar(1.0, alpha)]);
        Self::boundary(&format!("twisted({alpha})"), a, b, 1, rows)
    }

    /// No boundary condition on a first-order trace.
    pub fn free(a: f64, b: f64) -> Self {
        Self::boundary("free", a, b, 1, DMatrix::zeros(0, 2))
    }

    /// No constraint at all (order-0 trace), the domain of a bounded multiplication.
    pub fn unconstrained(a: f64, b: f64) -> Self {
        Self::boundary("full", a, b, 0, DMatrix::zeros(0, 0))
    }

    /// ψ(±a) = 0 on a second-order trace.
    pub fn well_dirichlet(a: f64) -> Self {
        Self::boundary("well_dirichlet", -a, a, 2, unit_rows(2, &[0, 2]))
    }

    /// ψ(±a) = 0 = ψ″(±a) on a fourth-order trace.
    pub fn well_h2(a: f64) -> Self {
        Self::boundary("well_h2", -a, a, 4, unit_rows(4, &[0, 2, 4, 6]))
    }

    /// ψ(±a) = 0 = ψ′(±a) on a fourth-order trace.
    pub fn well_h2_clamped(a: f64) -> Self {
        Self::boundary("well_h2_clamped", -a, a, 4, unit_rows(4, &[0, 1, 4, 5]))
    }

    pub fn line(req: DecayRequirement) -> Self {
        let name = match req {
            DecayRequirement::Maximal => "line_maximal",
            DecayRequirement::Schwartz => "line_schwartz",
        };
        Self { name: name.into(), base: DomainBase::Line, constraints: DomainConstraints::Decay(req) }
    }

    /// Domain by name: `dirichlet`, `periodic`, `twisted`, `free`, `well_dirichlet`,
    /// `well_h2`, `well_h2_clamped`, `circle`, `circle_full`, `line_maximal`, `line_schwartz`.
    pub fn named(name: &str, k: &Constants) -> Result<Self> {
        Ok(match name {
            "dirichlet" => Self::dirichlet(0.0, 1.0),
            "periodic" => Self::periodic(0.0, 1.0),
            "twisted" => Self::twisted(0.0, 1.0, k.alpha),
            "free" => Self::free(0.0, 1.0),
            "well_dirichlet" => Self::well_dirichlet(k.a),
            "well_h2" => Self::well_h2(k.a),
            "well_h2_clamped" => Self::well_h2_clamped(k.a),
            "circle" => Self::periodic(0.0, TAU).renamed("circle"),
            "circle_full" => Self::unconstrained(0.0, TAU).renamed("circle_full"),
            "line_maximal" => Self::line(DecayRequirement::Maximal),
            "line_schwartz" => Self::line(DecayRequirement::Schwartz),
            other => return Err(QopError::Input(format!("unknown domain '{other}'"))),
        })
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn base(&self) -> DomainBase {
        self.base
    }

    pub fn constraints(&self) -> &DomainConstraints {
        &self.constraints
    }

    pub fn boundary_constraints(&self) -> Option<&BoundaryConstraints> {
        match &self.constraints {
            DomainConstraints::Boundary(b) => Some(b),
            DomainConstraints::Decay(_) => None,
        }
    }

    pub fn interval(&self) -> Option<(f64, f64)> {
        match self.base {
            DomainBase::Compact { a, b } => Some((a, b)),
            DomainBase::Line => None,
        }
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.base, &self.constraints) {
            (DomainBase::Compact { a, b }, DomainConstraints::Boundary(bc)) => {
                let conds = if bc.labels.is_empty() { "no boundary condition".to_string() } else { bc.labels.join(", ") };
                write!(f, "{} on [{}, {}]: {}", self.name, fmt_point(*a), fmt_point(*b), conds)
            }
            (_, DomainConstraints::Decay(d)) => write!(f, "{} on R: {:?}", self.name, d),
            _ => write!(f, "{}", self.name),
        }
    }
}

fn same_interval(x: (f64, f64), y: (f64, f64)) -> bool {
    (x.0 - y.0).abs() <= 1e-12 * (1.0 + x.0.abs()) && (x.1 - y.1).abs() <= 1e-12 * (1.0 + x.1.abs())
}

/// Stacks two row sets on a common trace order and reduces to echelon form.
fn stack(
    first: &BoundaryConstraints,
    second: &BoundaryConstraints,
    base: (f64, f64),
) -> Result<BoundaryConstraints> {
    let k = first.order.max(second.order);
    let (p, q) = (first.lift(k, base)?, second.lift(k, base)?);
    let mut rows = DMatrix::zeros(p.count() + q.count(), 2 * k);
    rows.rows_mut(0, p.count()).copy_from(&p.rows);
    rows.rows_mut(p.count(), q.count()).copy_from(&q.rows);
    if q.count() == 0 {
        return Ok(p);
    }
    if p.count() == 0 {
        return Ok(q);
    }
    // Echelon form states the combined conditions one trace entry at a time.
    BoundaryConstraints::new(k, row_reduce(&rows), None, base)
}

/// D(A + B) = D(A) ∩ D(B).
pub fn domain_of_sum(da: &DomainSpec, db: &DomainSpec) -> Result<DomainSpec> {
    let name = format!("{}∩{}", da.name, db.name);
    match (&da.constraints, &db.constraints, da.interval(), db.interval()) {
        (DomainConstraints::Boundary(p), DomainConstraints::Boundary(q), Some(x), Some(y)) => {
            if !same_interval(x, y) {
                return Err(QopError::Input(format!("domains live on different intervals {x:?} and {y:?}")));
            }
            let bc = stack(p, q, x)?;
            DomainSpec::new(name, da.base, DomainConstraints::Boundary(bc))
        }
        (DomainConstraints::Decay(p), DomainConstraints::Decay(q), None, None) => {
            let req = if *p == DecayRequirement::Schwartz || *q == DecayRequirement::Schwartz {
                DecayRequirement::Schwartz
            } else {
                DecayRequirement::Maximal
            };
            DomainSpec::new(name, DomainBase::Line, DomainConstraints::Decay(req))
        }
        _ => Err(QopError::Input("cannot intersect a compact-interval domain with a line domain".into())),
    }
}

/// D(AB) = {f ∈ D(B) : Bf ∈ D(A)}, with A's conditions pushed through B's boundary action.
pub fn domain_of_product(da: &DomainSpec, op_b: &OperatorSpec, db: &DomainSpec) -> Result<DomainSpec> {
    if op_b.order() > 2 {
        return Err(QopError::Unsupported(format!(
            "pushing boundary conditions through an order-{} operator is not supported",
            op_b.order()
        )));
    }
    let name = format!("D({}·{})", da.name, op_b.name());
    match (&da.constraints, &db.constraints, da.interval(), db.interval()) {
        (DomainConstraints::Boundary(p), DomainConstraints::Boundary(q), Some(x), Some(y)) => {
            if !same_interval(x, y) {
                return Err(QopError::Input(format!("domains live on different intervals {x:?} and {y:?}")));
            }
            let kb = op_b.order();
            let kf = p.order + kb;
            // (Bf)^{(j)} = Σ_l Σ_{i≤j} C(j,i) c_l^{(j−i)} f^{(i+l)} at each end.
            let mut pushed: DMatrix<Complex64> = DMatrix::zeros(p.count(), 2 * kf);
            for r in 0..p.count() {
                for (end, xe) in [x.0, x.1].into_iter().enumerate() {
                    for j in 0..p.order {
                        let w = p.rows[(r, end * p.order + j)];
                        if w.norm() == 0.0 {
                            continue;
                        }
                        for (l, cl) in op_b.coefficients().iter().enumerate() {
                            for i in 0..=j {
                                let coef = cl.derivative_n(j - i).eval(xe) * binomial(j, i);
                                pushed[(r, end * kf + i + l)] += w * coef;
                            }
                        }
                    }
                }
            }
            let scale = pushed.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let pushed = prune_zero_rows(&pushed, 1e-12 * scale.max(1.0));
            let pushed_bc = BoundaryConstraints::new(kf, row_reduce(&pushed), None, x)?;
            let bc = stack(&pushed_bc, q, x)?;
            DomainSpec::new(name, da.base, DomainConstraints::Boundary(bc))
        }
        (DomainConstraints::Decay(p), DomainConstraints::Decay(q), None, None) => {
            let req = match (p, q) {
                (_, DecayRequirement::Schwartz) => DecayRequirement::Schwartz,
                (DecayRequirement::Maximal, DecayRequirement::Maximal) => DecayRequirement::Maximal,
                (DecayRequirement::Schwartz, DecayRequirement::Maximal) => {
                    return Err(QopError::Unsupported(
                        "{f ∈ D_max(B) : Bf ∈ S} is not a decay class this model can express".into(),
                    ))
                }
            };
            DomainSpec::new(name, DomainBase::Line, DomainConstraints::Decay(req))
        }
        _ => Err(QopError::Unsupported("mixed compact/line domain product".into())),
    }
}

/// D([A, B]) = D(AB) ∩ D(BA).
pub fn domain_of_commutator(op_a: &OperatorSpec, da: &DomainSpec, op_b: &OperatorSpec, db: &DomainSpec) -> Result<DomainSpec> {
    let ab = domain_of_product(da, op_b, db)?;
    let ba = domain_of_product(db, op_a, da)?;
    Ok(domain_of_sum(&ab, &ba)?.renamed(format!("D([{},{}])", op_a.name(), op_b.name())))
}

fn prune_zero_rows(m: &DMatrix<Complex64>, tol: f64) -> DMatrix<Complex64> {
    let keep: Vec<usize> = (0..m.nrows()).filter(|&r| m.row(r).iter().any(|v| v.norm() > tol)).collect();
    DMatrix::from_fn(keep.len(), m.ncols(), |r, c| m[(keep[r], c)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::SubspaceBasis;

    fn k() -> Constants {
        Constants::default()
    }

    fn kernel(d: &DomainSpec) -> SubspaceBasis {
        SubspaceBasis::kernel_of(d.boundary_constraints().unwrap())
    }

    #[test]
    fn lz_phi_product_domain_pins_the_right_end() {
        let lz = DomainSpec::named("circle", &k()).unwrap();
        let full = DomainSpec::named("circle_full", &k()).unwrap();
        let d = domain_of_product(&lz, &OperatorSpec::angle(k()), &full).unwrap();
        let bc = d.boundary_constraints().unwrap();
        assert_eq!(bc.count(), 1);
        assert_eq!(bc.labels()[0], "ψ(2π) = 0");
    }

    #[test]
    fn commutator_domain_pins_both_ends() {
        let lz = DomainSpec::named("circle", &k()).unwrap();
        let full = DomainSpec::named("circle_full", &k()).unwrap();
        let d = domain_of_commutator(&OperatorSpec::angular_momentum(k()), &lz, &OperatorSpec::angle(k()), &full).unwrap();
        let want = DomainSpec::boundary("want", 0.0, TAU, 1, unit_rows(1, &[0, 1]));
        assert!(kernel(&d).same_subspace(&kernel(&want), 1e-9));
    }

    #[test]
    fn phi_lz_product_keeps_periodicity() {
        let lz = DomainSpec::named("circle", &k()).unwrap();
        let full = DomainSpec::named("circle_full", &k()).unwrap();
        let d = domain_of_product(&full, &OperatorSpec::angular_momentum(k()), &lz).unwrap();
        assert!(kernel(&d).same_subspace(&kernel(&lz), 1e-9));
    }

    #[test]
    fn sum_with_full_domain_is_identity_and_idempotent() {
        let lz = DomainSpec::named("circle", &k()).unwrap();
        let full = DomainSpec::named("circle_full", &k()).unwrap();
        assert!(kernel(&domain_of_sum(&lz, &full).unwrap()).same_subspace(&kernel(&lz), 1e-9));
        assert!(kernel(&domain_of_sum(&lz, &lz).unwrap()).same_subspace(&kernel(&lz), 1e-9));
    }

    #[test]
    fn dirichlet_meets_periodic() {
        let d = domain_of_sum(&DomainSpec::dirichlet(0.0, 1.0), &DomainSpec::periodic(0.0, 1.0)).unwrap();
        assert_eq!(d.boundary_constraints().unwrap().count(), 2);
        assert!(kernel(&d).same_subspace(&kernel(&DomainSpec::dirichlet(0.0, 1.0)), 1e-9));
    }

    #[test]
    fn position_squared_keeps_maximal_domain() {
        let m = DomainSpec::line(DecayRequirement::Maximal);
        let d = domain_of_product(&m, &OperatorSpec::position(k()), &m).unwrap();
        assert_eq!(d.constraints(), &DomainConstraints::Decay(DecayRequirement::Maximal));
    }

    #[test]
    fn algebra_rejects_bad_inputs() {
        let line = DomainSpec::line(DecayRequirement::Maximal);
        assert!(matches!(domain_of_sum(&line, &DomainSpec::dirichlet(0.0, 1.0)), Err(QopError::Input(_))));
        assert!(matches!(
            domain_of_sum(&DomainSpec::dirichlet(0.0, 1.0), &DomainSpec::dirichlet(0.0, 2.0)),
            Err(QopError::Input(_))
        ));
        let h2 = OperatorSpec::hamiltonian_squared(k());
        assert!(matches!(
            domain_of_product(&DomainSpec::well_h2(1.0), &h2, &DomainSpec::well_h2(1.0)),
            Err(QopError::Unsupported(_))
        ));
        assert!(matches!(DomainSpec::named("box", &k()), Err(QopError::Input(_))));
    }

    #[test]
    fn twisted_labels_show_the_phase() {
        let d = DomainSpec::twisted(0.0, 1.0, 0.7);
        assert_eq!(d.boundary_constraints().unwrap().labels()[0], "ψ(0) = e^{0.7i}·ψ(1)");
    }
}
