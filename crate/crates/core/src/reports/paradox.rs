//! The seven paradoxes: each runs the naive computation, names the defect,
//! and checks the resolution numerically.
//!
//! A report is `Reproduced` only if every check passes. Errors raised while
//! computing a check become a failed check rather than an abort.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::ccr::finite_dim_ccr_probe;
use super::config::ScenarioConfig;
use crate::boundary::{analyze, Classification};
use crate::deficiency::{
    catalog_pair, deficiency_indices, extension_family, residual_spectrum_probe, ResidualVerdict, Verdict,
};
use crate::error::Result;
use crate::functions::{catalog_entry, catalog_get, schwartz_probe, CatalogName, DecayClass, TriangleTrain};
use crate::numerics::{improper_norm_probe, inner_product, Grid, NormStatus, ProbeDomain, Sampler};
use crate::operator::{domain_check, domain_of_commutator, DomainSpec, OperatorSpec, Subject};
use crate::spectral::{
    discrete_spectrum, expectation_direct, expectation_form, expectation_spectral, norm_growth_probe, spectral_weights,
    DomainFlag, Moment,
};
use crate::uncertainty::{
    bound_commutator, named_state, random_circle_states, uncertainty_report, Bound, ObservablePair,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParadoxVerdict {
    Reproduced,
    Failed,
}

/// One numerical assertion behind a verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: Option<f64>,
    pub criterion: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParadoxReport {
    pub id: u8,
    pub title: String,
    pub naive_result: String,
    pub defect: String,
    pub resolution_result: String,
    pub verdict: ParadoxVerdict,
    pub failed_checks: Vec<String>,
    /// The formulas the checks exercise.
    pub equations: Vec<String>,
    pub checks: Vec<Check>,
    pub payload: BTreeMap<String, Value>,
    pub seed: u64,
}

pub const PARADOX_IDS: std::ops::RangeInclusive<u8> = 1..=7;

#[derive(Default)]
struct Sheet {
    checks: Vec<Check>,
    payload: BTreeMap<String, Value>,
}

impl Sheet {
    fn near(&mut self, name: &str, value: f64, target: f64, tol: f64) {
        self.checks.push(Check {
            name: name.into(),
            value: Some(value),
            criterion: format!("= {target} ± {tol:e}"),
            passed: (value - target).abs() <= tol,
        });
    }

    fn at_most(&mut self, name: &str, value: f64, bound: f64) {
        self.checks.push(Check {
            name: name.into(),
            value: Some(value),
            criterion: format!("≤ {bound:e}"),
            passed: value <= bound,
        });
    }

    fn below(&mut self, name: &str, value: f64, bound: f64) {
        self.checks.push(Check { name: name.into(), value: Some(value), criterion: format!("< {bound}"), passed: value < bound });
    }

    fn holds(&mut self, name: &str, passed: bool, criterion: impl Into<String>) {
        self.checks.push(Check { name: name.into(), value: None, criterion: criterion.into(), passed });
    }

    fn put(&mut self, key: &str, value: impl Serialize) {
        self.payload.insert(key.into(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    /// Runs a fallible block; an error becomes a failed check of that name.
    fn guard(&mut self, name: &str, f: impl FnOnce(&mut Sheet) -> Result<()>) {
        if let Err(e) = f(self) {
            self.holds(name, false, format!("evaluation error: {e}"));
        }
    }
}

struct Story {
    title: &'static str,
    naive: String,
    defect: String,
    resolution: String,
    equations: &'static [&'static str],
}

/// Runs one paradox; ids outside 1..=7 are an input error.
pub fn run_paradox(id: u8, config: &ScenarioConfig, seed: u64) -> Result<ParadoxReport> {
    let mut sheet = Sheet::default();
    let story = match id {
        1 => ccr_trace(config, &mut sheet),
        2 => square_integrable_but_not_vanishing(config, &mut sheet),
        3 => imaginary_eigenvalue(config, &mut sheet),
        4 => momentum_on_an_interval(config, &mut sheet),
        5 => angle_commutator(config, &mut sheet),
        6 => uncertainty_below_half(config, &mut sheet, seed),
        7 => energy_square_of_the_well(config, &mut sheet),
        other => {
            return Err(crate::QopError::Input(format!("paradox id must lie in 1..=7, got {other}")));
        }
    };
    let failed_checks: Vec<String> = sheet.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
    Ok(ParadoxReport {
        id,
        title: story.title.into(),
        naive_result: story.naive,
        defect: story.defect,
        resolution_result: story.resolution,
        verdict: if failed_checks.is_empty() && !sheet.checks.is_empty() {
            ParadoxVerdict::Reproduced
        } else {
            ParadoxVerdict::Failed
        },
        failed_checks,
        equations: story.equations.iter().map(|s| s.to_string()).collect(),
        checks: sheet.checks,
        payload: sheet.payload,
        seed,
    })
}

/// All seven, computed concurrently and returned in id order.
pub fn run_all(config: &ScenarioConfig, seed: u64) -> Vec<ParadoxReport> {
    std::thread::scope(|s| {
        let handles: Vec<_> = PARADOX_IDS.map(|id| s.spawn(move || run_paradox(id, config, seed))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("paradox thread panicked").expect("ids are in range"))
            .collect()
    })
}

fn ccr_trace(config: &ScenarioConfig, s: &mut Sheet) -> Story {
    let k = config.constants;
    let mut boundary = Vec::new();
    for n in [4usize, 64, 256] {
        s.guard(&format!("ccr_N{n}"), |s| {
            let r = finite_dim_ccr_probe(n, k.hbar)?;
            s.at_most(&format!("trace_N{n}"), r.trace, 1e-12);
            s.near(&format!("mean_diagonal_deviation_N{n}"), r.mean_diagonal_deviation, k.hbar, 1e-12 * k.hbar);
            if n == 256 {
                s.at_most("interior_row_deviation_N256", r.interior_row_deviation / k.hbar, 1e-6);
            }
            boundary.push(r.boundary_row_deviation);
            s.put(&format!("ccr_N{n}"), &r);
            Ok(())
        });
    }
    if boundary.len() == 3 {
        // h shrinks by 4 from N = 64 to N = 256.
        s.near("boundary_rows_scale_like_inverse_h", boundary[2] / boundary[1], 4.0, 0.2);
    }
    let grids = [33, 65, 129, 257];
    s.guard("norm_growth", |s| {
        let p = norm_growth_probe(&OperatorSpec::momentum(k), &DomainSpec::periodic(0.0, 1.0), &grids)?;
        s.near("growth_exponent_P", p.exponent, 1.0, 0.1);
        let h = norm_growth_probe(&OperatorSpec::hamiltonian(k), &DomainSpec::well_dirichlet(k.a), &grids)?;
        s.near("growth_exponent_H", h.exponent, 2.0, 0.1);
        let q = norm_growth_probe(&OperatorSpec::position(k), &DomainSpec::unconstrained(-k.a, k.a), &grids)?;
        s.near("growth_exponent_Q", q.exponent, 0.0, 0.05);
        let qmax = q.norms.iter().copied().fold(0.0, f64::max);
        s.at_most("norm_Q_over_a", qmax / k.a, 1.0 + 1e-9);
        s.put("growth_P", &p);
        s.put("growth_H", &h);
        s.put("growth_Q", &q);
        Ok(())
    });
    Story {
        title: "Canonical commutation has no finite-dimensional realization",
        naive: "Taking the trace of [P,Q] = (ℏ/i)·1 in N dimensions gives 0 = Nℏ/i.".into(),
        defect: "Tr[X,Y] = 0 for all N×N matrices, so the identity cannot hold on every row; P is unbounded and needs infinite dimensions.".into(),
        resolution: "The N-point commutator has zero trace, matches (ℏ/i)·1 on unwrapped rows to O(h⁴), and concentrates the deficit in wrapped rows of size O(1/h). ‖P_N‖ ∝ h⁻¹ and ‖H_N‖ ∝ h⁻² while ‖Q_N‖ ≤ a.".into(),
        equations: &["Tr(PQ − QP) = 0", "[P, Q] = (ℏ/i)·1", "‖P_N‖ ∝ h⁻¹", "‖H_N‖ ∝ h⁻²"],
    }
}

fn square_integrable_but_not_vanishing(config: &ScenarioConfig, s: &mut Sheet) -> Story {
    let k = config.constants;
    let mut naive_sup = f64::NAN;
    s.guard("triangle_sum", |s| {
        let f = catalog_get("triangle_sum", &k)?;
        // Blind sampling steps over the narrow triangles.
        let step = 2f64.sqrt() / 4.0;
        naive_sup = (0..2500).map(|i| f.eval(100.0 + 0.05 + step * i as f64).norm()).fold(0.0, f64::max);
        s.put("blind_sampling_sup_on_100_1000", naive_sup);
        let total = TriangleTrain::integral_to(1e4);
        s.near("triangle_integral_to_1e4", total, PI * PI / 6.0, 1e-3);
        let norm = improper_norm_probe(&f, f.singular_points(), f.support())?;
        s.holds("triangle_square_integrable", norm.is_finite(), "norm probe Finite");
        let decay = schwartz_probe(&f, 0, 0)?;
        s.holds("triangle_does_not_vanish", decay.class == DecayClass::NonDecaying, "decay class NonDecaying");
        s.put("triangle_norm", &norm);
        s.put("triangle_decay_class", decay.class);
        Ok(())
    });
    s.guard("unbounded_L2", |s| {
        let f = catalog_get("unbounded_L2", &k)?;
        let norm = improper_norm_probe(&f, f.singular_points(), f.support())?;
        s.holds("spikes_square_integrable", norm.is_finite(), "norm probe Finite");
        let decay = schwartz_probe(&f, 0, 0)?;
        s.holds("spikes_unbounded", decay.class == DecayClass::Unbounded, "decay class Unbounded");
        s.put("unbounded_L2_norm", &norm);
        Ok(())
    });
    s.guard("dmax_p_members_vanish", |s| {
        let p = OperatorSpec::momentum(k);
        let mut members = Vec::new();
        let mut all_vanish = true;
        for name in CatalogName::representatives() {
            let f = catalog_entry(name, &k)?;
            if f.support() != ProbeDomain::Line || matches!(name, CatalogName::TriangleSum | CatalogName::UnboundedL2) {
                continue;
            }
            let nf = improper_norm_probe(&f, f.singular_points(), ProbeDomain::Line)?;
            if !nf.is_finite() {
                continue;
            }
            let img = p.image_sampler(f.sampler());
            let np = improper_norm_probe(&img, f.singular_points(), ProbeDomain::Line)?;
            if !np.is_finite() {
                continue;
            }
            let class = schwartz_probe(&f, 0, 0)?.class;
            all_vanish &= matches!(class, DecayClass::RapidDecay | DecayClass::PolynomialDecay);
            members.push(name.to_string());
        }
        s.holds("dmax_p_members_vanish_at_infinity", all_vanish && members.len() >= 2, "f, f′ ∈ L² ⇒ f → 0, on ≥ 2 members");
        s.put("dmax_p_members", &members);
        Ok(())
    });
    Story {
        title: "Square-integrable functions need not vanish at infinity",
        naive: format!(
            "Blind uniform sampling of the triangle train on [100, 1000] sees sup |f| = {naive_sup:.3e}, suggesting f → 0."
        ),
        defect: "‖f‖ < ∞ only constrains the measure of the set where f is large, not its pointwise values.".into(),
        resolution: "The triangle train has ∫f = Σ1/n² = π²/6 and finite norm but height 1 at every integer; the spike train is square integrable and unbounded. Catalog members with f and f′ square integrable all decay.".into(),
        equations: &["Σ 1/n² = π²/6", "∫|f|² < ∞ ⇏ f(x) → 0", "f, f′ ∈ L²(ℝ) ⇒ f(x) → 0"],
    }
}

fn imaginary_eigenvalue(config: &ScenarioConfig, s: &mut Sheet) -> Story {
    let k = config.constants;
    let a_op = OperatorSpec::a_operator(k);
    s.guard("eigen_equation", |s| {
        let grid = Grid::line(8.0, 16385)?;
        let f = catalog_get("A_eigenfunction_f", &k)?;
        let fs = f.sample(&grid)?;
        let af = a_op.apply(&fs)?;
        let eig = Complex64::new(0.0, -k.hbar);
        let worst = grid
            .nodes()
            .enumerate()
            .filter(|(_, x)| (0.3..=3.0).contains(&x.abs()))
            .map(|(i, _)| (af.values()[i] - eig * fs.values()[i]).norm() / fs.values()[i].norm())
            .fold(0.0, f64::max);
        s.at_most("relative_eigen_residual", worst, config.tolerances.eigen_check);
        let n = improper_norm_probe(&f, f.singular_points(), f.support())?;
        s.near("norm_squared", n.value.unwrap_or(f64::NAN), 1.0, 1e-6);
        let decay = schwartz_probe(&f, 8, 2)?;
        s.holds("decay_only_polynomial", decay.class == DecayClass::PolynomialDecay, "decay class PolynomialDecay");
        let first = decay.failures.iter().map(|(m, _)| *m).min();
        s.put("first_failing_power", first);
        let schwartz = domain_check(Subject::Analytic(&f), &a_op, &DomainSpec::named("line_schwartz", &k)?)?;
        s.holds("outside_schwartz_domain", !schwartz.in_domain, "f ∉ D(A)");
        let maximal = domain_check(Subject::Analytic(&f), &a_op, &DomainSpec::named("line_maximal", &k)?)?;
        s.holds("inside_maximal_domain", maximal.in_domain, "f ∈ D(A†)");
        s.put("schwartz_violations", &schwartz.violated_constraints);
        Ok(())
    });
    s.guard("deficiency", |s| {
        let (op, dom) = catalog_pair("A_line", &k)?;
        let r = deficiency_indices(&op, &dom)?;
        s.holds("indices_0_1", (r.n_plus, r.n_minus) == (0, 1), "(n₊, n₋) = (0, 1)");
        s.holds("no_extension", r.verdict == Verdict::NoExtension, "verdict NoExtension");
        let status = |name: &str| r.candidates.iter().find(|w| w.name == name).map(|w| w.norm.status);
        s.holds("g_plus_divergent", status("A_deficiency_g_plus") == Some(NormStatus::Divergent), "g₊ Divergent");
        s.holds("g_minus_finite", status("A_deficiency_g_minus") == Some(NormStatus::Finite), "g₋ Finite");
        s.put("deficiency", &r);
        Ok(())
    });
    Story {
        title: "A formally symmetric operator with an imaginary eigenvalue",
        naive: "A = PQ³ + Q³P looks symmetric by formal integration by parts, yet A f = (ℏ/i) f with ‖f‖ = 1.".into(),
        defect: "f decays only polynomially, so it lies outside the Schwartz domain of A; the eigen equation holds for the adjoint.".into(),
        resolution: "The eigenvalue ℏ/i belongs to A†. Deficiency indices (0, 1): g₊ diverges, g₋ is square integrable, and A has no self-adjoint extension.".into(),
        equations: &[
            "A = (ℏ/i)(3x² + 2x³ d/dx)",
            "f(x) ∝ |x|^{-3/2} exp(−1/(4x²))",
            "A† g = ±i g",
            "(n₊, n₋) = (0, 1)",
        ],
    }
}

fn momentum_on_an_interval(config: &ScenarioConfig, s: &mut Sheet) -> Story {
    let k = config.constants;
    let p = OperatorSpec::momentum(k);
    let dir = DomainSpec::dirichlet(0.0, 1.0);
    s.guard("classification", |s| {
        let c = analyze(&p, &dir)?.classification;
        s.holds("hermitian_not_self_adjoint", c == Classification::HermitianNotSelfAdjoint, "hermitian-not-self-adjoint");
        s.put("classification", c.to_string());
        let r = deficiency_indices(&p, &dir)?;
        s.holds("indices_1_1", (r.n_plus, r.n_minus) == (1, 1), "(n₊, n₋) = (1, 1)");
        s.holds("extensions_exist", r.verdict == Verdict::ExtensionsExist, "verdict ExtensionsExist");
        for (label, z) in [("1+i", Complex64::new(1.0, 1.0)), ("3", Complex64::new(3.0, 0.0))] {
            let v = residual_spectrum_probe(&p, &dir, z)?;
            s.holds(&format!("residual_spectrum_at_{label}"), v == ResidualVerdict::InResidualSpectrum, "z in the residual spectrum");
        }
        Ok(())
    });
    s.guard("extension_family", |s| {
        let fam = extension_family(&p, &dir)?;
        let mut alphas = vec![0.0, 0.7, PI];
        if !alphas.contains(&k.alpha) {
            alphas.push(k.alpha);
        }
        let n_points = config.grid.n_points;
        let mut table = Vec::new();
        for alpha in alphas {
            s.holds(
                &format!("self_adjoint_alpha_{alpha}"),
                fam.classify(alpha)? == Classification::SelfAdjoint,
                "twisted domain self-adjoint",
            );
            let mut worst: f64 = 0.0;
            for n in -3..=3 {
                let r = fam.residual(n, alpha, n_points)?;
                worst = worst.max(r / fam.eigenvalue(n, alpha).abs().max(1.0));
                table.push(json!({"alpha": alpha, "n": n, "p_n": fam.eigenvalue(n, alpha), "residual": r}));
            }
            s.at_most(&format!("eigen_residual_alpha_{alpha}"), worst, config.tolerances.residual);
            let spec = discrete_spectrum(&p, &fam.domain(alpha), &Grid::compact(0.0, 1.0, n_points)?, 7)?;
            let mut want: Vec<f64> = (-6..=6).map(|n| fam.eigenvalue(n, alpha)).collect();
            want.sort_by(|x, y| x.abs().total_cmp(&y.abs()).then(x.total_cmp(y)));
            want.truncate(7);
            want.sort_by(f64::total_cmp);
            let dev = spec.eigenvalues.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            s.at_most(&format!("spectrum_alpha_{alpha}"), dev, 1e-9);
        }
        s.put("extension_spectra", table);
        Ok(())
    });
    Story {
        title: "A hermitian momentum on an interval with complex eigenvalues",
        naive: "e^{ipx/ℏ} solves Pψ = pψ for every complex p, so P on [0, 1] would have complex eigenvalues.".into(),
        defect: "With ψ(0) = 0 = ψ(1), P is hermitian but not self-adjoint: the plane waves lie in D(P†), not in D(P).".into(),
        resolution: "Every z ∈ ℂ is in the residual spectrum; indices (1, 1) give the family ψ(0) = e^{iα}ψ(1) whose members are self-adjoint with spectrum p_n = ℏ(2πn − α).".into(),
        equations: &["ψ(0) = 0 = ψ(1)", "(n₊, n₋) = (1, 1)", "ψ(0) = e^{iα}ψ(1)", "p_n = ℏ(2πn − α)"],
    }
}

fn angle_commutator(config: &ScenarioConfig, s: &mut Sheet) -> Story {
    let k = config.constants;
    let pair = ObservablePair::lz_phi(k);
    let mut naive_value = f64::NAN;
    s.guard("commutator_domain", |s| {
        let d = domain_of_commutator(&pair.a, &pair.dom_a, &pair.b, &pair.dom_b)?;
        let labels = d.boundary_constraints().map(|b| b.labels().to_vec()).unwrap_or_default();
        s.holds(
            "commutator_domain_is_dirichlet",
            labels.iter().any(|l| l == "ψ(0) = 0") && labels.iter().any(|l| l == "ψ(2π) = 0"),
            "D([L_z, φ]) imposes ψ(0) = 0 = ψ(2π)",
        );
        s.put("commutator_domain", labels);
        Ok(())
    });
    for m in [0, 1, -2] {
        s.guard(&format!("mode_{m}"), |s| {
            let (psi, _) = named_state(&format!("circle_mode({m})"), &k, 0)?;
            let lz = crate::operator::apply_in_domain(&pair.a, &psi, &pair.dom_a)?;
            let phipsi = pair.b.apply(&psi)?;
            // Moving the eigenvalue mℏ across both terms gives zero.
            let naive = inner_product(&lz, &phipsi)? - inner_product(&phipsi, &lz)?;
            naive_value = naive.norm();
            s.at_most(&format!("naive_commutator_mode_{m}"), naive.norm(), 1e-8);
            let absent = matches!(bound_commutator(&psi, &pair)?, Bound::Absent { ref reason } if reason.iter().any(|r| r == "ψ(0) = 0"));
            s.holds(&format!("bound_commutator_absent_mode_{m}"), absent, "Absent with ψ(0) = 0 violated");
            let r = domain_check(Subject::Grid(&phipsi), &pair.a, &pair.dom_a)?;
            s.holds(&format!("phi_psi_outside_D_Lz_mode_{m}"), !r.in_domain, "φψ_m ∉ D(L_z)");
            // ⟨ψ, L_z(φψ)⟩ − ⟨L_zψ, φψ⟩ = (ℏ/i)·2π|ψ(2π)|².
            let lz_phipsi = pair.a.apply(&phipsi)?;
            let surface = inner_product(&psi, &lz_phipsi)? - inner_product(&lz, &phipsi)?;
            let end = psi.values()[psi.grid().len() - 1].norm_sqr();
            let want = Complex64::new(0.0, -k.hbar * TAU * end);
            s.at_most(&format!("surface_term_mode_{m}"), (surface - want).norm() / k.hbar, 1e-4);
            Ok(())
        });
    }
    Story {
        title: "Angular momentum and angle: 0 = ℏ/i",
        naive: format!(
            "⟨ψ_m, [L_z, φ]ψ_m⟩ with L_zψ_m = mℏψ_m moved onto both sides gives {naive_value:.1e}, while [L_z, φ] = ℏ/i gives ℏ/i."
        ),
        defect: "φψ_m is not periodic, so it is outside D(L_z); ψ_m does not satisfy ψ(0) = 0 = ψ(2π), so it is outside D([L_z, φ]).".into(),
        resolution: "The commutator bound is withheld for every ψ_m with the violated constraint named; integrating by parts leaves the surface term (ℏ/i)·2π|ψ(2π)|² = ℏ/i.".into(),
        equations: &["[L_z, φ] = ℏ/i", "D([L_z, φ]) = {ψ : ψ(0) = 0 = ψ(2π)}", "⟨ψ, L_z φψ⟩ − ⟨L_zψ, φψ⟩ = (ℏ/i)·2π|ψ(2π)|²"],
    }
}

fn uncertainty_below_half(config: &ScenarioConfig, s: &mut Sheet, seed: u64) -> Story {
    let k = config.constants;
    let tol = config.tolerances.uncertainty;
    let mut two_mode_product = f64::NAN;
    s.guard("gaussian", |s| {
        let (psi, pair) = named_state("gaussian(1)", &k, seed)?;
        let r = uncertainty_report(&psi, &pair)?;
        s.near("gaussian_product", r.product / k.hbar, 0.5, tol);
        s.near("gaussian_bound_form", r.bound_form / k.hbar, 0.5, tol);
        s.put("gaussian", &r);
        Ok(())
    });
    s.guard("two_mode", |s| {
        let (psi, pair) = named_state("two_mode(0.1)", &k, seed)?;
        let r = uncertainty_report(&psi, &pair)?;
        two_mode_product = r.product;
        s.below("two_mode_product_below_half", r.product / k.hbar, 0.5);
        s.holds("two_mode_inequality", r.product >= r.bound_form - 1e-9, "ΔL_z·Δφ ≥ bound_form − 1e-9");
        let closed = 0.5 * k.hbar * (1.0 - 1.1f64.powi(2) / 1.01).abs();
        s.near("two_mode_bound_lz_phi", r.bound_lz_phi.unwrap_or(f64::NAN), closed, tol);
        s.put("two_mode", &r);
        Ok(())
    });
    s.guard("eigenstates", |s| {
        for m in [-1, 0, 2] {
            let (psi, pair) = named_state(&format!("circle_mode({m})"), &k, seed)?;
            let r = uncertainty_report(&psi, &pair)?;
            s.at_most(&format!("eigenstate_product_mode_{m}"), r.product.abs(), 1e-8);
            s.at_most(&format!("eigenstate_bound_mode_{m}"), r.bound_form.abs(), 1e-8);
            s.holds(
                &format!("eigenstate_commutator_absent_mode_{m}"),
                matches!(r.bound_commutator, Bound::Absent { .. }),
                "bound_commutator Absent",
            );
        }
        Ok(())
    });
    s.guard("vanishing", |s| {
        let (psi, pair) = named_state("vanishing", &k, seed)?;
        let r = uncertainty_report(&psi, &pair)?;
        let c = r.bound_commutator.value().unwrap_or(f64::NAN);
        s.near("vanishing_commutator_equals_form", c - r.bound_form, 0.0, tol);
        Ok(())
    });
    s.guard("random_states", |s| {
        let pair = ObservablePair::lz_phi(k);
        let states = random_circle_states(seed, 50, 1201)?;
        let mut worst = f64::INFINITY;
        for psi in &states {
            let r = uncertainty_report(psi, &pair)?;
            worst = worst.min(r.product - r.bound_form).min(r.product - r.bound_lz_phi.unwrap_or(f64::NAN));
        }
        s.holds("random_states_respect_bounds", worst >= -1e-9, "min(ΔL_zΔφ − bound) ≥ −1e-9 over 50 states");
        s.put("random_states_min_margin", worst);
        Ok(())
    });
    Story {
        title: "ΔL_z·Δφ below ℏ/2",
        naive: format!(
            "[L_z, φ] = ℏ/i suggests ΔL_z·Δφ ≥ ℏ/2, yet (ψ₀ + 0.1ψ₁)/√1.01 gives {two_mode_product:.6} and every ψ_m gives 0."
        ),
        defect: "The commutator bound needs ψ ∈ D([L_z, φ]), which forces ψ(0) = 0 = ψ(2π).".into(),
        resolution: "The form bound ½|i⟨Aψ,Bψ⟩ − i⟨Bψ,Aψ⟩| = (ℏ/2)|1 − 2π|ψ(2π)|²| holds on D(L_z) ∩ D(φ) for every state tested and reduces to ℏ/2 on the commutator domain.".into(),
        equations: &[
            "(Δ_ψA)² = ‖(A − ⟨A⟩_ψ)ψ‖²",
            "Δ_ψA·Δ_ψB ≥ ½|i⟨Aψ,Bψ⟩ − i⟨Bψ,Aψ⟩|",
            "ΔL_z·Δφ ≥ (ℏ/2)|1 − 2π|ψ(2π)|²|",
        ],
    }
}

fn energy_square_of_the_well(config: &ScenarioConfig, s: &mut Sheet) -> Story {
    let k = config.constants;
    // Tolerances are in units of ℏ⁴/(m²a⁴).
    let unit = k.hbar.powi(4) / (k.mass.powi(2) * k.a.powi(4));
    let exact = 15.0 / 8.0 * unit;
    let mut naive_value = f64::NAN;
    s.put("exact", exact);
    s.guard("naive", |s| {
        let psi = catalog_get("parabola_well", &k)?;
        let naive = expectation_direct(
            Subject::Analytic(&psi),
            &OperatorSpec::hamiltonian_squared(k),
            &DomainSpec::well_h2(k.a),
        )?;
        naive_value = naive.value;
        s.at_most("naive_value", naive.value.abs(), config.tolerances.naive * unit);
        s.holds("naive_flagged", naive.flag == DomainFlag::MeaninglessOutsideDomain, "MeaninglessOutsideDomain");
        s.put("naive_violations", &naive.membership.violated_constraints);
        let form =
            expectation_form(Subject::Analytic(&psi), &OperatorSpec::hamiltonian(k), &DomainSpec::well_dirichlet(k.a))?;
        s.near("form_value", form.value, exact, config.tolerances.form * unit);
        s.holds("form_clean", form.flag == DomainFlag::Clean, "Clean");
        Ok(())
    });
    s.guard("spectral", |s| {
        let grid = Grid::compact(-k.a, k.a, config.grid.n_points)?;
        let basis = discrete_spectrum(&OperatorSpec::hamiltonian(k), &DomainSpec::well_dirichlet(k.a), &grid, config.grid.truncation)?;
        let psi = catalog_get("parabola_well", &k)?.sample(&grid)?;
        let n = config.grid.truncation;
        let w = spectral_weights(&psi, &basis, n)?;
        s.at_most("weight_deficit", 1.0 - w.total(), 1e-4);
        let e2 = expectation_spectral(&psi, &basis, Moment::ENERGY_SQUARED, n, config.tolerances.spectral * unit)?;
        s.near("spectral_value", e2.value, exact, config.tolerances.spectral * unit);
        s.put("spectral", &e2);
        s.put("leading_weights", &w.weights[..w.weights.len().min(6)]);
        Ok(())
    });
    Story {
        title: "⟨H²⟩ of a state in the infinite well",
        naive: format!("ψ ∝ a² − x² has H²ψ = 0 inside the well, so ⟨ψ, H²ψ⟩ = {naive_value:.1e}."),
        defect: "ψ″(±a) ≠ 0, so ψ ∉ D(H²); the integral of ψ·H²ψ is not an expectation value.".into(),
        resolution: "Σ E_n²|⟨φ_n, ψ⟩|² and ‖Hψ‖² both give 15ℏ⁴/(8m²a⁴).".into(),
        equations: &[
            "E_n = π²ℏ²n²/(8ma²)",
            "D(H²) = {ψ : ψ(±a) = 0 = ψ″(±a)}",
            "⟨H²⟩_ψ = Σ E_n² |⟨φ_n, ψ⟩|² = ‖Hψ‖² = 15ℏ⁴/(8m²a⁴)",
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(id: u8) -> ParadoxReport {
        run_paradox(id, &ScenarioConfig::default(), crate::uncertainty::DEFAULT_SEED).unwrap()
    }

    fn assert_reproduced(r: &ParadoxReport) {
        let failed: Vec<_> = r.checks.iter().filter(|c| !c.passed).collect();
        assert_eq!(r.verdict, ParadoxVerdict::Reproduced, "{failed:#?}");
        assert!(!r.equations.is_empty());
    }

    #[test]
    fn each_paradox_is_reproduced() {
        for id in PARADOX_IDS {
            assert_reproduced(&run(id));
        }
    }

    #[test]
    fn out_of_range_ids_are_rejected() {
        assert!(run_paradox(0, &ScenarioConfig::default(), 1).is_err());
        assert!(run_paradox(8, &ScenarioConfig::default(), 1).is_err());
    }

    #[test]
    fn tightened_tolerance_fails_the_verdict() {
        let mut cfg = ScenarioConfig::default();
        cfg.tolerances.eigen_check = 1e-14;
        let r = run_paradox(3, &cfg, 1).unwrap();
        assert_eq!(r.verdict, ParadoxVerdict::Failed);
        assert_eq!(r.failed_checks, vec!["relative_eigen_residual".to_string()]);
    }
}
