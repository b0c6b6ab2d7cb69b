//! Property suites over randomized inputs.

use nalgebra::DMatrix;
use proptest::prelude::*;
use qop_core::boundary::{adjoint_domain, analyze, boundary_form, Classification, SubspaceBasis};
use qop_core::deficiency::{catalog_pair, classify_von_neumann, deficiency_indices, Verdict};
use qop_core::distributions::{eval, fourier, Functional, GaussianTest};
use qop_core::functions::AnalyticFunction;
use qop_core::numerics::{gauss_kronrod, inner_product, Grid, GridFunction};
use qop_core::operator::{
    domain_of_sum, BoundaryConstraints, Constants, DomainBase, DomainConstraints, DomainSpec, OperatorSpec, Poly,
};
use qop_core::uncertainty::{circle_state, uncertainty_report, ObservablePair};
use qop_core::Complex64;

fn k() -> Constants {
    Constants::default()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| c(a, b))
}

fn poly(max_degree: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(complex(), 1..=max_degree + 1).prop_map(Poly::new)
}

fn grid_values(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(complex(), n)
}

/// j-th derivatives of a polynomial at x, j < count.
fn poly_trace(p: &Poly, k: usize, a: f64, b: f64) -> Vec<Complex64> {
    let mut ders = vec![p.clone()];
    for _ in 1..k {
        let next = ders.last().unwrap().derivative();
        ders.push(next);
    }
    let mut out: Vec<Complex64> = ders.iter().map(|d| d.eval(a)).collect();
    out.extend(ders.iter().map(|d| d.eval(b)));
    out
}

fn poly_apply(op: &OperatorSpec, p: &Poly, x: f64) -> Complex64 {
    let mut d = p.clone();
    let mut acc = c(0.0, 0.0);
    for (j, cj) in op.coefficients().iter().enumerate() {
        if j > 0 {
            d = d.derivative();
        }
        acc += cj.eval(x) * d.eval(x);
    }
    acc
}

fn integrate(f: impl Fn(f64) -> Complex64, a: f64, b: f64) -> Complex64 {
    c(gauss_kronrod(|x| f(x).re, a, b, 1e-13, 64).0, gauss_kronrod(|x| f(x).im, a, b, 1e-13, 64).0)
}

fn random_subspace(n: usize) -> impl Strategy<Value = SubspaceBasis> {
    (0..=n).prop_flat_map(move |d| {
        prop::collection::vec(complex(), n * d.max(1)).prop_map(move |v| {
            if d == 0 {
                SubspaceBasis::zero(n)
            } else {
                SubspaceBasis::span(&DMatrix::from_vec(n, d, v))
            }
        })
    })
}

fn constraint_domain(rows: Vec<Complex64>, count: usize) -> Option<DomainSpec> {
    let m = DMatrix::from_row_slice(count, 2, &rows);
    let bc = BoundaryConstraints::new(1, m, None, (0.0, 1.0)).ok()?;
    DomainSpec::new("random", DomainBase::Compact { a: 0.0, b: 1.0 }, DomainConstraints::Boundary(bc)).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inner_product_is_conjugate_symmetric(f in grid_values(65), g in grid_values(65)) {
        let grid = Grid::compact(0.0, 1.0, 65).unwrap();
        let f = GridFunction::new(grid, f, "f").unwrap();
        let g = GridFunction::new(grid, g, "g").unwrap();
        let fg = inner_product(&f, &g).unwrap();
        let gf = inner_product(&g, &f).unwrap();
        prop_assert!((fg - gf.conj()).norm() <= 1e-12);
        prop_assert!(inner_product(&f, &f).unwrap().im.abs() <= 1e-12);
    }

    #[test]
    fn apply_is_linear(f in grid_values(41), g in grid_values(41), alpha in complex(), beta in complex(), which in 0usize..5) {
        let ops = [
            OperatorSpec::position(k()),
            OperatorSpec::momentum(k()),
            OperatorSpec::hamiltonian(k()),
            OperatorSpec::a_operator(k()),
            OperatorSpec::hamiltonian_squared(k()),
        ];
        let op = &ops[which];
        let grid = Grid::compact(-1.0, 1.0, 41).unwrap();
        let f = GridFunction::new(grid, f, "f").unwrap();
        let g = GridFunction::new(grid, g, "g").unwrap();
        let lhs = op.apply(&f.combine(alpha, &g, beta).unwrap()).unwrap();
        let rhs = op.apply(&f).unwrap().combine(alpha, &op.apply(&g).unwrap(), beta).unwrap();
        let scale = 1.0 + lhs.sup_norm();
        for (l, r) in lhs.values().iter().zip(rhs.values()) {
            prop_assert!((l - r).norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn boundary_form_matches_integration_by_parts(
        phi in poly(5), psi in poly(5), which in 0usize..5, a in -2.0..0.0f64, len in 0.5..3.0f64,
    ) {
        let ops = [
            OperatorSpec::momentum(k()),
            OperatorSpec::hamiltonian(k()),
            OperatorSpec::hamiltonian_squared(k()),
            OperatorSpec::a_operator(k()),
            OperatorSpec::angular_momentum(k()),
        ];
        let op = &ops[which];
        let b = a + len;
        let adj = op.formal_adjoint().unwrap();
        let form = boundary_form(op, (a, b)).unwrap();
        let quad = integrate(|x| phi.eval(x).conj() * poly_apply(op, &psi, x) - poly_apply(&adj, &phi, x).conj() * psi.eval(x), a, b);
        let s = form.evaluate(&poly_trace(&phi, op.order(), a, b), &poly_trace(&psi, op.order(), a, b)).unwrap();
        prop_assert!((quad - s).norm() <= 1e-4 * (1.0 + s.norm()), "{quad} vs {s}");
    }

    #[test]
    fn annihilator_is_antitone_and_involutive(v in random_subspace(4), extra in prop::collection::vec(complex(), 4), a in -2.0..0.0f64) {
        // H's form on any interval is nondegenerate on ℂ⁴.
        let form = boundary_form(&OperatorSpec::hamiltonian(k()), (a, a + 1.5)).unwrap();
        let vd = adjoint_domain(&form, &v).unwrap();
        let vdd = adjoint_domain(&form, &vd).unwrap();
        prop_assert!(vdd.same_subspace(&v, 1e-6));
        // W = V + span(extra) contains V, so W† ⊆ V†.
        let mut cols = v.basis().clone().resize_horizontally(v.dim() + 1, c(0.0, 0.0));
        for (i, e) in extra.iter().enumerate() {
            cols[(i, v.dim())] = *e;
        }
        let w = SubspaceBasis::span(&cols);
        let wd = adjoint_domain(&form, &w).unwrap();
        prop_assert!(wd.is_subspace_of(&vd, 1e-6));
    }

    #[test]
    fn domain_sum_is_commutative_and_idempotent(r1 in prop::collection::vec(complex(), 2), r2 in prop::collection::vec(complex(), 2)) {
        let (Some(d1), Some(d2)) = (constraint_domain(r1, 1), constraint_domain(r2, 1)) else { return Ok(()); };
        let s12 = domain_of_sum(&d1, &d2).unwrap();
        let s21 = domain_of_sum(&d2, &d1).unwrap();
        let v12 = SubspaceBasis::kernel_of(s12.boundary_constraints().unwrap());
        let v21 = SubspaceBasis::kernel_of(s21.boundary_constraints().unwrap());
        prop_assert!(v12.same_subspace(&v21, 1e-9));
        let s11 = domain_of_sum(&d1, &d1).unwrap();
        let v1 = SubspaceBasis::kernel_of(d1.boundary_constraints().unwrap());
        prop_assert!(SubspaceBasis::kernel_of(s11.boundary_constraints().unwrap()).same_subspace(&v1, 1e-9));
    }

    #[test]
    fn functionals_are_linear(alpha in complex(), beta in complex(), c1 in -2.0..2.0f64, c2 in -2.0..2.0f64, x0 in -1.0..1.0f64, p in -3.0..3.0f64) {
        let f = GaussianTest { center: c1, width: 0.7 }.to_function();
        let g = GaussianTest { center: c2, width: 1.1 }.to_function();
        let h = AnalyticFunction::linear_combination(&[(alpha, &f), (beta, &g)]).unwrap();
        for func in [Functional::delta(x0, k()), Functional::plane_wave(p, k())] {
            let lhs = eval(&func, &h).unwrap();
            let rhs = alpha * eval(&func, &f).unwrap() + beta * eval(&func, &g).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-9);
        }
    }

    #[test]
    fn parseval_on_gaussian_pairs(c1 in -2.0..2.0f64, c2 in -2.0..2.0f64, w1 in 0.5..1.5f64, w2 in 0.5..1.5f64) {
        let xg = Grid::line(14.0, 1201).unwrap();
        let pg = Grid::line(14.0, 1201).unwrap();
        let f = GridFunction::from_fn(xg, "f", |x| c(GaussianTest { center: c1, width: w1 }.value(x), 0.0)).unwrap();
        let g = GridFunction::from_fn(xg, "g", |x| Complex64::from_polar(GaussianTest { center: c2, width: w2 }.value(x), 0.3 * x)).unwrap();
        let ff = fourier(&f, &pg, 1.0).unwrap().transform;
        let fg = fourier(&g, &pg, 1.0).unwrap().transform;
        let defect = (inner_product(&ff, &fg).unwrap() - inner_product(&f, &g).unwrap()).norm();
        prop_assert!(defect <= 1e-6, "{defect}");
    }

    #[test]
    fn uncertainty_reports_are_phase_invariant(modes in prop::collection::vec(complex(), 5), theta in 0.0..std::f64::consts::TAU) {
        let coeffs: Vec<(i32, Complex64)> = (-2..=2).zip(modes).collect();
        let Ok(psi) = circle_state(&coeffs, 801, "s") else { return Ok(()); };
        let pair = ObservablePair::lz_phi(k());
        let a = uncertainty_report(&psi, &pair).unwrap();
        let b = uncertainty_report(&psi.scale(Complex64::from_polar(1.0, theta)), &pair).unwrap();
        for (x, y) in [(a.delta_a, b.delta_a), (a.delta_b, b.delta_b), (a.product, b.product), (a.bound_form, b.bound_form),
                       (a.bound_lz_phi.unwrap(), b.bound_lz_phi.unwrap())] {
            prop_assert!((x - y).abs() <= 1e-10, "{x} vs {y}");
        }
        prop_assert_eq!(a.inequality_holds, b.inequality_holds);
        prop_assert_eq!(a.bound_commutator.value().is_some(), b.bound_commutator.value().is_some());
    }

    #[test]
    fn twisted_domains_are_self_adjoint(alpha in -6.3..6.3f64) {
        let c = analyze(&OperatorSpec::momentum(k()), &DomainSpec::twisted(0.0, 1.0, alpha)).unwrap().classification;
        prop_assert_eq!(c, Classification::SelfAdjoint);
    }
}

#[test]
fn boundary_classification_agrees_with_deficiency_indices() {
    for name in ["P_box", "P_line", "A_line", "Lz_circle", "H_well"] {
        let (op, dom) = catalog_pair(name, &k()).unwrap();
        let r = deficiency_indices(&op, &dom).unwrap();
        assert_eq!((r.verdict, r.spectrum_class), classify_von_neumann(r.n_plus, r.n_minus), "{name}");
        assert_eq!(r.witnesses.len(), r.n_plus + r.n_minus, "{name}");
        if dom.interval().is_some() {
            let c = analyze(&op, &dom).unwrap().classification;
            assert_eq!(c == Classification::SelfAdjoint, r.verdict == Verdict::SelfAdjoint, "{name}");
            assert_eq!(c == Classification::HermitianNotSelfAdjoint, r.verdict == Verdict::ExtensionsExist, "{name}");
        }
    }
}
