//! Integration-by-parts surface terms as a sesquilinear form on boundary traces.
//!
//! For an order-k expression A on [a, b] the trace of ψ is
//! (ψ(a), …, ψ^{(k−1)}(a), ψ(b), …, ψ^{(k−1)}(b)) and
//! ⟨φ, Aψ⟩ − ⟨A‡φ, ψ⟩ = trace(φ)^H · S · trace(ψ).
//! A domain is a subspace V of trace space; the adjoint domain is its
//! S-annihilator, and the classification compares the two.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QopError, Result};
use crate::linalg::{null_space, orthonormal_columns, RANK_TOL};
use crate::operator::{BoundaryConstraints, DomainSpec, OperatorSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    SelfAdjoint,
    HermitianNotSelfAdjoint,
    NotHermitian,
}

impl Classification {
    pub fn is_hermitian(self) -> bool {
        !matches!(self, Classification::NotHermitian)
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::SelfAdjoint => "self-adjoint",
            Classification::HermitianNotSelfAdjoint => "hermitian-not-self-adjoint",
            Classification::NotHermitian => "not-hermitian",
        })
    }
}

/// The surface-term matrix S of an operator on a compact interval.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFormMatrix {
    order: usize,
    s: DMatrix<Complex64>,
}

impl BoundaryFormMatrix {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.s
    }

    /// trace(φ)^H · S · trace(ψ).
    pub fn evaluate(&self, phi: &[Complex64], psi: &[Complex64]) -> Result<Complex64> {
        let n = 2 * self.order;
        if phi.len() != n || psi.len() != n {
            return Err(QopError::Structural(format!(
                "boundary form of order {} needs traces of length {n}",
                self.order
            )));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, pi) in phi.iter().enumerate() {
            for (j, qj) in psi.iter().enumerate() {
                acc += pi.conj() * self.s[(i, j)] * qj;
            }
        }
        Ok(acc)
    }
}

/// S for `op` on [a, b], assembled from endpoint coefficient values.
///
/// Order 1 accepts any coefficients. Orders 2 and 4 need a constant leading
/// coefficient, and order 4 accepts only c₀ besides it.
pub fn boundary_form(op: &OperatorSpec, (a, b): (f64, f64)) -> Result<BoundaryFormMatrix> {
    let k = op.order();
    let mut s = DMatrix::from_element(2 * k, 2 * k, Complex64::new(0.0, 0.0));
    // Each end contributes with sign −1 at a and +1 at b.
    let ends = [(0usize, a, -1.0), (k, b, 1.0)];
    match k {
        0 => {}
        1 => {
            for (off, x, sign) in ends {
                s[(off, off)] = op.coefficient(1).eval(x) * sign;
            }
        }
        2 => {
            if !op.has_constant_leading_coefficient() {
                return Err(QopError::Unsupported(format!("{}: order-2 form needs a constant leading coefficient", op.name())));
            }
            for (off, x, sign) in ends {
                let c2 = op.coefficient(2).eval(x);
                let c1 = op.coefficient(1).eval(x);
                // c₂(φ̄ψ′ − φ̄′ψ) + c₁φ̄ψ with c₂′ = 0.
                s[(off, off)] = c1 * sign;
                s[(off, off + 1)] = c2 * sign;
                s[(off + 1, off)] = -c2 * sign;
            }
        }
        4 => {
            let lower_free = (1..4).all(|j| op.coefficient(j).is_zero());
            if !op.has_constant_leading_coefficient() || !lower_free {
                return Err(QopError::Unsupported(format!(
                    "{}: the order-4 form is only available for c₄ d⁴ + c₀",
                    op.name()
                )));
            }
            for (off, x, sign) in ends {
                let c4 = op.coefficient(4).eval(x);
                // c₄(φ̄ψ‴ − φ̄′ψ″ + φ̄″ψ′ − φ̄‴ψ).
                s[(off, off + 3)] = c4 * sign;
                s[(off + 1, off + 2)] = -c4 * sign;
                s[(off + 2, off + 1)] = c4 * sign;
                s[(off + 3, off)] = -c4 * sign;
            }
        }
        other => return Err(QopError::Unsupported(format!("no boundary form for order {other}"))),
    }
    Ok(BoundaryFormMatrix { order: k, s })
}

/// A subspace of ℂ^n stored as orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    basis: DMatrix<Complex64>,
}

impl SubspaceBasis {
    /// Orthonormalizes the span of the given columns.
    pub fn span(columns: &DMatrix<Complex64>) -> Self {
        Self { basis: orthonormal_columns(columns) }
    }

    pub fn full(n: usize) -> Self {
        Self { basis: DMatrix::identity(n, n) }
    }

    pub fn zero(n: usize) -> Self {
        Self { basis: DMatrix::from_element(n, 0, Complex64::new(0.0, 0.0)) }
    }

    /// ker M of a constraint set.
    pub fn kernel_of(bc: &BoundaryConstraints) -> Self {
        Self { basis: null_space(bc.rows()) }
    }

    pub fn ambient(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<Complex64> {
        &self.basis
    }

    /// Distance of `v` from the subspace relative to ‖v‖.
    pub fn relative_distance(&self, v: &[Complex64]) -> f64 {
        let v = DMatrix::from_column_slice(v.len(), 1, v);
        let norm = v.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let proj = &self.basis * (self.basis.adjoint() * &v);
        (v - proj).norm() / norm
    }

    pub fn contains_vector(&self, v: &[Complex64], tol: f64) -> bool {
        self.relative_distance(v) <= tol
    }

    /// self ⊆ other.
    pub fn is_subspace_of(&self, other: &SubspaceBasis, tol: f64) -> bool {
        self.ambient() == other.ambient()
            && (0..self.dim()).all(|c| other.contains_vector(self.basis.column(c).as_slice(), tol))
    }

    pub fn same_subspace(&self, other: &SubspaceBasis, tol: f64) -> bool {
        self.dim() == other.dim() && self.is_subspace_of(other, tol)
    }
}

/// V† = {u : u^H S v = 0 for every v ∈ V}, the null space of (S V)^H.
pub fn adjoint_domain(form: &BoundaryFormMatrix, v: &SubspaceBasis) -> Result<SubspaceBasis> {
    let n = 2 * form.order;
    if v.ambient() != n {
        return Err(QopError::Structural(format!(
            "subspace of ℂ^{} against a boundary form on ℂ^{n}",
            v.ambient()
        )));
    }
    if v.dim() == 0 {
        return Ok(SubspaceBasis::full(n));
    }
    let sv = &form.s * &v.basis;
    Ok(SubspaceBasis { basis: null_space(&sv.adjoint()) })
}

/// Hermitian iff V ⊆ V†; self-adjoint iff V = V†.
pub fn classify(v: &SubspaceBasis, v_dagger: &SubspaceBasis) -> Result<Classification> {
    if v.ambient() != v_dagger.ambient() {
        return Err(QopError::Structural("subspaces live in different trace spaces".into()));
    }
    Ok(if !v.is_subspace_of(v_dagger, RANK_TOL.sqrt()) {
        Classification::NotHermitian
    } else if v.dim() == v_dagger.dim() {
        Classification::SelfAdjoint
    } else {
        Classification::HermitianNotSelfAdjoint
    })
}

/// Boundary-level analysis of an (operator, compact domain) pair.
#[derive(Debug, Clone)]
pub struct BoundaryAnalysis {
    pub form: BoundaryFormMatrix,
    pub domain: SubspaceBasis,
    pub adjoint: SubspaceBasis,
    pub classification: Classification,
}

/// Lifts the domain's constraints to the operator's trace order and classifies.
pub fn analyze(op: &OperatorSpec, dom: &DomainSpec) -> Result<BoundaryAnalysis> {
    let Some((a, b)) = dom.interval() else {
        return Err(QopError::Unsupported(format!(
            "domain '{}' lives on the line; its surface terms are checked by truncation instead",
            dom.name()
        )));
    };
    let bc = dom.boundary_constraints().expect("compact domains carry boundary constraints");
    if bc.order() > op.order() {
        return Err(QopError::Unsupported(format!(
            "domain '{}' constrains order-{} traces but {} has order {}",
            dom.name(),
            bc.order(),
            op.name(),
            op.order()
        )));
    }
    let formal = op.formal_adjoint()?;
    let symmetric = (0..=op.order()).all(|j| (&op.coefficient(j) - &formal.coefficient(j)).max_abs() <= 1e-12);
    if !symmetric {
        return Err(QopError::Unsupported(format!("{} is not formally symmetric", op.name())));
    }
    let form = boundary_form(op, (a, b))?;
    let lifted = bc.lift(op.order(), (a, b))?;
    let domain = SubspaceBasis::kernel_of(&lifted);
    let adjoint = adjoint_domain(&form, &domain)?;
    let classification = classify(&domain, &adjoint)?;
    Ok(BoundaryAnalysis { form, domain, adjoint, classification })
}

/// Surface term ⟨φ, Aψ⟩ − ⟨Aφ, ψ⟩ of a formally symmetric order-1 operator
/// on [−R, R], i.e. [c₁ φ̄ψ]_{−R}^{R}, for line domains.
pub fn line_surface_term(
    op: &OperatorSpec,
    phi: &dyn crate::numerics::Sampler,
    psi: &dyn crate::numerics::Sampler,
    radius: f64,
) -> Result<Complex64> {
    if op.order() != 1 {
        return Err(QopError::Unsupported("line surface terms are implemented for first-order operators".into()));
    }
    let c1 = op.coefficient(1);
    let end = |x: f64| c1.eval(x) * phi.eval(x).conj() * psi.eval(x);
    Ok(end(radius) - end(-radius))
}
