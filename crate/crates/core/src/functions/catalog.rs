use std::collections::BTreeSet;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QopError, Result};
use crate::numerics::{Grid, GridFunction, ProbeDomain, Sampler, Spike};
use crate::operator::Constants;

/// Analytic properties a catalog entry claims; tests verify them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FunctionTrait {
    SquareIntegrable,
    VanishesAtInfinity,
    Schwartz,
    PolynomiallyBounded,
}

use FunctionTrait::*;

/// A named function of one real variable with its natural support.
///
/// Compactly supported entries vanish outside `support`.
#[derive(Clone)]
pub struct AnalyticFunction {
    name: String,
    sampler: Arc<dyn Sampler>,
    singular_points: Vec<f64>,
    support: ProbeDomain,
    traits: BTreeSet<FunctionTrait>,
}

impl fmt::Debug for AnalyticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticFunction")
            .field("name", &self.name)
            .field("singular_points", &self.singular_points)
            .field("support", &self.support)
            .field("traits", &self.traits)
            .finish()
    }
}

impl AnalyticFunction {
    pub fn new(
        name: impl Into<String>,
        sampler: Arc<dyn Sampler>,
        singular_points: Vec<f64>,
        support: ProbeDomain,
        traits: impl IntoIterator<Item = FunctionTrait>,
    ) -> Self {
        Self { name: name.into(), sampler, singular_points, support, traits: traits.into_iter().collect() }
    }

    pub fn from_fn(
        name: impl Into<String>,
        f: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        singular_points: Vec<f64>,
        support: ProbeDomain,
        traits: impl IntoIterator<Item = FunctionTrait>,
    ) -> Self {
        Self::new(name, Arc::new(f), singular_points, support, traits)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn singular_points(&self) -> &[f64] {
        &self.singular_points
    }

    pub fn support(&self) -> ProbeDomain {
        self.support
    }

    pub fn traits(&self) -> &BTreeSet<FunctionTrait> {
        &self.traits
    }

    pub fn has(&self, t: FunctionTrait) -> bool {
        self.traits.contains(&t)
    }

    pub fn sampler(&self) -> Arc<dyn Sampler> {
        Arc::clone(&self.sampler)
    }

    /// Samples on `grid`; a non-finite value (e.g. at a singular point) is an input error.
    pub fn sample(&self, grid: &Grid) -> Result<GridFunction> {
        GridFunction::from_fn(*grid, self.name.clone(), |x| self.sampler.eval(x))
    }

    /// Σ cᵢ fᵢ. Traits kept are those shared by every term, each being a linear subspace.
    pub fn linear_combination(terms: &[(Complex64, &AnalyticFunction)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| QopError::Input("empty linear combination".into()))?;
        let mut traits = first.1.traits.clone();
        let mut singular = Vec::new();
        let (mut lo, mut hi) = support_bounds(first.1.support);
        for (_, f) in terms {
            traits = traits.intersection(&f.traits).copied().collect();
            singular.extend_from_slice(&f.singular_points);
            let (a, b) = support_bounds(f.support);
            lo = lo.min(a);
            hi = hi.max(b);
        }
        singular.sort_by(f64::total_cmp);
        singular.dedup();
        let support = if lo.is_infinite() && hi.is_infinite() { ProbeDomain::Line } else { ProbeDomain::Interval(lo, hi) };
        let name = terms
            .iter()
            .map(|(c, f)| format!("({c})*{}", f.name))
            .collect::<Vec<_>>()
            .join(" + ");
        let parts: Vec<(Complex64, Arc<dyn Sampler>)> = terms.iter().map(|(c, f)| (*c, f.sampler())).collect();
        Ok(Self { name, sampler: Arc::new(Combination(parts)), singular_points: singular, support, traits })
    }
}

impl Sampler for AnalyticFunction {
    fn eval(&self, x: f64) -> Complex64 {
        self.sampler.eval(x)
    }

    fn spikes(&self, lo: f64, hi: f64) -> Vec<Spike> {
        self.sampler.spikes(lo, hi)
    }

    fn eval_near(&self, spike: &Spike, t: f64) -> Complex64 {
        self.sampler.eval_near(spike, t)
    }
}

fn support_bounds(d: ProbeDomain) -> (f64, f64) {
    match d {
        ProbeDomain::Interval(a, b) => (a, b),
        ProbeDomain::Line => (f64::NEG_INFINITY, f64::INFINITY),
    }
}

struct Combination(Vec<(Complex64, Arc<dyn Sampler>)>);

impl Sampler for Combination {
    fn eval(&self, x: f64) -> Complex64 {
        self.0.iter().map(|(c, f)| c * f.eval(x)).sum()
    }

    fn spikes(&self, lo: f64, hi: f64) -> Vec<Spike> {
        let mut all: Vec<Spike> = self.0.iter().flat_map(|(_, f)| f.spikes(lo, hi)).collect();
        all.sort_by(|a, b| a.center.total_cmp(&b.center));
        all.dedup_by(|a, b| a.center == b.center);
        all
    }

    fn eval_near(&self, spike: &Spike, t: f64) -> Complex64 {
        self.0.iter().map(|(c, f)| c * f.eval_near(spike, t)).sum()
    }
}

/// Triangles of height 1 and half-width 1/n² centred at every n ≥ 1.
#[derive(Debug, Clone, Copy)]
pub struct TriangleTrain;

impl TriangleTrain {
    fn half_width(n: i64) -> f64 {
        1.0 / (n * n) as f64
    }

    fn tent(n: i64, x: f64) -> f64 {
        let w = Self::half_width(n);
        (1.0 - (x - n as f64).abs() / w).max(0.0)
    }

    /// Exact ∫₀ᵀ f, summing clipped triangle areas.
    pub fn integral_to(t: f64) -> f64 {
        let mut total = 0.0;
        let last = (t + 1.0).floor() as i64;
        for n in 1..=last.max(0) {
            let w = Self::half_width(n);
            let c = n as f64;
            total += clipped_tent_area(c - w, c, c + w, t);
        }
        total
    }
}

/// Area of the unit-height tent on [l, r] with apex at c, cut at x = t.
fn clipped_tent_area(l: f64, c: f64, r: f64, t: f64) -> f64 {
    if t <= l {
        0.0
    } else if t <= c {
        let s = (t - l) / (c - l);
        0.5 * (c - l) * s * s
    } else if t < r {
        let s = (r - t) / (r - c);
        0.5 * (r - l) - 0.5 * (r - c) * s * s
    } else {
        0.5 * (r - l)
    }
}

impl Sampler for TriangleTrain {
    fn eval(&self, x: f64) -> Complex64 {
        if x <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        // Tents overlapping x have centers within 1 of x.
        let lo = (x - 1.0).floor().max(1.0) as i64;
        let hi = (x + 1.0).ceil() as i64;
        Complex64::new((lo..=hi).map(|n| Self::tent(n, x)).sum(), 0.0)
    }

    fn eval_near(&self, spike: &Spike, t: f64) -> Complex64 {
        let n = spike.index;
        if spike.center != n as f64 {
            return self.eval(spike.center + t);
        }
        let own = (1.0 - t.abs() / Self::half_width(n)).max(0.0);
        let x = spike.center + t;
        let others: f64 = (n - 1..=n + 1).filter(|m| *m != n && *m >= 1).map(|m| Self::tent(m, x)).sum();
        Complex64::new(own + others, 0.0)
    }

    fn spikes(&self, lo: f64, hi: f64) -> Vec<Spike> {
        let first = lo.ceil().max(2.0) as i64;
        let last = hi.floor() as i64;
        (first..=last)
            .map(|n| Spike { index: n, center: n as f64, half_width: Self::half_width(n) })
            .collect()
    }
}

/// x² exp(−x^p sin²x), with spikes of height (nπ)² at every nonzero multiple of π.
///
/// With p = 16 the spike masses of |f|² shrink like x⁻⁴; with p = 8 they tend to √(π/2).
#[derive(Debug, Clone, Copy)]
pub struct SpikeTrain {
    pub power: i32,
}

impl SpikeTrain {
    fn chart(&self, x: f64, t: f64) -> f64 {
        x * x * (-x.powi(self.power) * t.sin().powi(2)).exp()
    }

    fn half_width(&self, center: f64) -> f64 {
        (8.0 * center.abs().powf(-0.5 * self.power as f64)).min(PI / 4.0)
    }

    /// ∫|f|² across spike n in its local chart.
    pub fn spike_mass(&self, n: i64) -> f64 {
        let c = n as f64 * PI;
        let w = self.half_width(c);
        let g = |t: f64| self.chart(c + t, t).powi(2);
        let (a, _) = crate::numerics::gauss_kronrod(g, -w, 0.0, 1e-12, 400);
        let (b, _) = crate::numerics::gauss_kronrod(g, 0.0, w, 1e-12, 400);
        a + b
    }
}

impl Sampler for SpikeTrain {
    fn eval(&self, x: f64) -> Complex64 {
        // Near a multiple of π the naive sin(x) loses every digit; re-anchor.
        let n = (x / PI).round();
        let v = if n != 0.0 {
            let t = (x - n * PI) - n * 1.224_646_799_147_353_2e-16;
            self.chart(x, t)
        } else {
            self.chart(x, x)
        };
        Complex64::new(v, 0.0)
    }

    fn spikes(&self, lo: f64, hi: f64) -> Vec<Spike> {
        let first = (lo / PI).ceil() as i64;
        let last = (hi / PI).floor() as i64;
        (first..=last)
            .filter(|n| n.abs() >= 1)
            .map(|n| {
                let c = n as f64 * PI;
                Spike { index: n, center: c, half_width: self.half_width(c) }
            })
            .collect()
    }

    fn eval_near(&self, spike: &Spike, t: f64) -> Complex64 {
        if (spike.center - spike.index as f64 * PI).abs() > 1e-9 * spike.center.abs() {
            return self.eval(spike.center + t);
        }
        Complex64::new(self.chart(spike.center + t, t), 0.0)
    }
}

/// Catalog entry names, with their parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CatalogName {
    ParabolaWell,
    AEigenfunctionF,
    ADeficiencyGPlus,
    ADeficiencyGMinus,
    TriangleSum,
    UnboundedL2,
    Gaussian { sigma: f64 },
    WellEigenfunction { n: u32 },
    CircleMode { m: i32 },
    PlaneWave { p: f64 },
    TwistedEigenfunction { n: i32, alpha: f64 },
}

impl CatalogName {
    /// One representative of every entry.
    pub fn representatives() -> Vec<CatalogName> {
        use CatalogName::*;
        vec![
            ParabolaWell,
            AEigenfunctionF,
            ADeficiencyGPlus,
            ADeficiencyGMinus,
            TriangleSum,
            UnboundedL2,
            Gaussian { sigma: 1.0 },
            WellEigenfunction { n: 2 },
            CircleMode { m: 1 },
            PlaneWave { p: 2.0 },
            TwistedEigenfunction { n: 1, alpha: 0.7 },
        ]
    }
}

impl fmt::Display for CatalogName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use CatalogName::*;
        match self {
            ParabolaWell => write!(f, "parabola_well"),
            AEigenfunctionF => write!(f, "A_eigenfunction_f"),
            ADeficiencyGPlus => write!(f, "A_deficiency_g_plus"),
            ADeficiencyGMinus => write!(f, "A_deficiency_g_minus"),
            TriangleSum => write!(f, "triangle_sum"),
            UnboundedL2 => write!(f, "unbounded_L2"),
            Gaussian { sigma } => write!(f, "gaussian({sigma})"),
            WellEigenfunction { n } => write!(f, "well_eigenfunction({n})"),
            CircleMode { m } => write!(f, "circle_mode({m})"),
            PlaneWave { p } => write!(f, "plane_wave({p})"),
            TwistedEigenfunction { n, alpha } => write!(f, "twisted_eigenfunction({n},{alpha})"),
        }
    }
}

fn parse_args(s: &str) -> Result<(&str, Vec<&str>)> {
    let s = s.trim();
    match s.find('(') {
        None => Ok((s, Vec::new())),
        Some(i) => {
            let inner = s[i + 1..]
                .strip_suffix(')')
                .ok_or_else(|| QopError::Input(format!("unbalanced parentheses in '{s}'")))?;
            let args = inner.split(',').map(str::trim).filter(|a| !a.is_empty()).collect();
            Ok((s[..i].trim(), args))
        }
    }
}

fn num<T: FromStr>(name: &str, arg: Option<&&str>, default: Option<T>) -> Result<T> {
    match arg {
        Some(a) => a
            .parse()
            .map_err(|_| QopError::Input(format!("{name}: cannot parse parameter '{a}'"))),
        None => default.ok_or_else(|| QopError::Input(format!("{name} needs a parameter"))),
    }
}

impl FromStr for CatalogName {
    type Err = QopError;

    fn from_str(s: &str) -> Result<Self> {
        use CatalogName::*;
        let (base, args) = parse_args(s)?;
        let arity = |n: usize| -> Result<()> {
            if args.len() > n {
                Err(QopError::Input(format!("{base} takes at most {n} parameter(s), got {}", args.len())))
            } else {
                Ok(())
            }
        };
        let name = match base {
            "parabola_well" => ParabolaWell,
            "A_eigenfunction_f" => AEigenfunctionF,
            "A_deficiency_g_plus" => ADeficiencyGPlus,
            "A_deficiency_g_minus" => ADeficiencyGMinus,
            "triangle_sum" => TriangleSum,
            "unbounded_L2" => UnboundedL2,
            "gaussian" => {
                arity(1)?;
                Gaussian { sigma: num(base, args.first(), Some(1.0))? }
            }
            "well_eigenfunction" => {
                arity(1)?;
                WellEigenfunction { n: num(base, args.first(), Some(1))? }
            }
            "circle_mode" => {
                arity(1)?;
                CircleMode { m: num(base, args.first(), Some(0))? }
            }
            "plane_wave" => {
                arity(1)?;
                PlaneWave { p: num(base, args.first(), None)? }
            }
            "twisted_eigenfunction" => {
                arity(2)?;
                TwistedEigenfunction { n: num(base, args.first(), None)?, alpha: num(base, args.get(1), Some(0.0))? }
            }
            other => return Err(QopError::Input(format!("unknown catalog function '{other}'"))),
        };
        if !matches!(name, ParabolaWell | AEigenfunctionF | ADeficiencyGPlus | ADeficiencyGMinus | TriangleSum | UnboundedL2) {
            return Ok(name);
        }
        arity(0)?;
        Ok(name)
    }
}

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// |x|^{-3/2} exp(s / (4 c x²)); zero at the origin when the exponent decays.
fn a_family(x: f64, s: f64, c: f64) -> f64 {
    if x == 0.0 {
        return if s < 0.0 { 0.0 } else { f64::INFINITY };
    }
    x.abs().powf(-1.5) * (s / (4.0 * c * x * x)).exp()
}

/// Looks up a catalog entry by name, e.g. `gaussian(0.5)` or `twisted_eigenfunction(1,0.7)`.
pub fn catalog_get(name: &str, constants: &Constants) -> Result<AnalyticFunction> {
    constants.validate()?;
    catalog_entry(name.parse()?, constants)
}

pub fn catalog_entry(name: CatalogName, constants: &Constants) -> Result<AnalyticFunction> {
    constants.validate()?;
    let Constants { hbar, a, .. } = *constants;
    let label = name.to_string();
    let line = ProbeDomain::Line;
    let f = match name {
        CatalogName::ParabolaWell => {
            let c = 15f64.sqrt() / (4.0 * a.powf(2.5));
            AnalyticFunction::from_fn(
                label,
                move |x| re(if x.abs() <= a { c * (a * a - x * x) } else { 0.0 }),
                vec![],
                ProbeDomain::Interval(-a, a),
                [SquareIntegrable, VanishesAtInfinity, PolynomiallyBounded],
            )
        }
        CatalogName::AEigenfunctionF => AnalyticFunction::from_fn(
            label,
            |x| re(std::f64::consts::FRAC_1_SQRT_2 * a_family(x, -1.0, 1.0)),
            vec![0.0],
            line,
            [SquareIntegrable, VanishesAtInfinity, PolynomiallyBounded],
        ),
        CatalogName::ADeficiencyGPlus => AnalyticFunction::from_fn(
            label,
            move |x| re(a_family(x, 1.0, hbar)),
            vec![0.0],
            line,
            [VanishesAtInfinity],
        ),
        CatalogName::ADeficiencyGMinus => AnalyticFunction::from_fn(
            label,
            move |x| re(a_family(x, -1.0, hbar)),
            vec![0.0],
            line,
            [SquareIntegrable, VanishesAtInfinity, PolynomiallyBounded],
        ),
        CatalogName::TriangleSum => AnalyticFunction::new(
            label,
            Arc::new(TriangleTrain),
            vec![],
            line,
            [SquareIntegrable, PolynomiallyBounded],
        ),
        CatalogName::UnboundedL2 => AnalyticFunction::new(
            label,
            Arc::new(SpikeTrain { power: 16 }),
            vec![],
            line,
            [SquareIntegrable, PolynomiallyBounded],
        ),
        CatalogName::Gaussian { sigma } => {
            if !(sigma.is_finite() && sigma > 0.0) {
                return Err(QopError::Input(format!("gaussian width must be positive, got {sigma}")));
            }
            AnalyticFunction::from_fn(
                label,
                move |x| re((-x * x / (2.0 * sigma * sigma)).exp()),
                vec![],
                line,
                [SquareIntegrable, VanishesAtInfinity, Schwartz, PolynomiallyBounded],
            )
        }
        CatalogName::WellEigenfunction { n } => {
            if n == 0 {
                return Err(QopError::Input("well eigenfunctions are numbered from 1".into()));
            }
            let k = n as f64 * PI / (2.0 * a);
            let norm = 1.0 / a.sqrt();
            let odd = n % 2 == 1;
            AnalyticFunction::from_fn(
                label,
                move |x| {
                    if x.abs() > a {
                        return re(0.0);
                    }
                    re(norm * if odd { (k * x).cos() } else { (k * x).sin() })
                },
                vec![],
                ProbeDomain::Interval(-a, a),
                [SquareIntegrable, VanishesAtInfinity, PolynomiallyBounded],
            )
        }
        CatalogName::CircleMode { m } => {
            let norm = 1.0 / TAU.sqrt();
            AnalyticFunction::from_fn(
                label,
                move |phi| {
                    if (0.0..=TAU).contains(&phi) {
                        Complex64::from_polar(norm, m as f64 * phi)
                    } else {
                        re(0.0)
                    }
                },
                vec![],
                ProbeDomain::Interval(0.0, TAU),
                [SquareIntegrable, VanishesAtInfinity, PolynomiallyBounded],
            )
        }
        CatalogName::PlaneWave { p } => {
            let norm = 1.0 / (TAU * hbar).sqrt();
            AnalyticFunction::from_fn(
                label,
                move |x| Complex64::from_polar(norm, p * x / hbar),
                vec![],
                line,
                [PolynomiallyBounded],
            )
        }
        CatalogName::TwistedEigenfunction { n, alpha } => {
            let p = twisted_momentum(n, alpha, hbar, 1.0);
            AnalyticFunction::from_fn(
                label,
                move |x| if (0.0..=1.0).contains(&x) { Complex64::from_polar(1.0, p * x / hbar) } else { re(0.0) },
                vec![],
                ProbeDomain::Interval(0.0, 1.0),
                [SquareIntegrable, VanishesAtInfinity, PolynomiallyBounded],
            )
        }
    };
    Ok(f)
}

/// Momentum eigenvalue ℏ(2πn − α)/L of the twisted box ψ(0) = e^{iα}ψ(L).
pub fn twisted_momentum(n: i32, alpha: f64, hbar: f64, length: f64) -> f64 {
    hbar * (TAU * n as f64 - alpha) / length
}

/// Infinite-well energy π²ℏ²n²/(8ma²).
pub fn well_energy(n: u32, c: &Constants) -> f64 {
    PI * PI * c.hbar * c.hbar * (n as f64).powi(2) / (8.0 * c.mass * c.a * c.a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{improper_norm_probe, inner_product, NormStatus};

    fn get(name: &str) -> AnalyticFunction {
        catalog_get(name, &Constants::default()).unwrap()
    }

    #[test]
    fn documented_point_values() {
        assert!((get("parabola_well").eval(0.0).re - 15f64.sqrt() / 4.0).abs() < 1e-15);
        assert_eq!(get("A_eigenfunction_f").eval(0.0), re(0.0));
        let c = get("circle_mode(0)");
        for phi in [0.0, 1.0, 4.0] {
            assert!((c.eval(phi) - re(1.0 / TAU.sqrt())).norm() < 1e-15);
        }
        assert_eq!(get("A_deficiency_g_minus").eval(0.0), re(0.0));
    }

    #[test]
    fn names_round_trip() {
        for n in CatalogName::representatives() {
            assert_eq!(n.to_string().parse::<CatalogName>().unwrap(), n);
        }
        assert_eq!("gaussian".parse::<CatalogName>().unwrap(), CatalogName::Gaussian { sigma: 1.0 });
    }

    #[test]
    fn unknown_names_are_input_errors() {
        for bad in ["psi", "gaussian(x)", "parabola_well(2)", "plane_wave", "gaussian(1"] {
            assert!(matches!(catalog_get(bad, &Constants::default()), Err(QopError::Input(_))), "{bad}");
        }
    }

    #[test]
    fn spike_train_has_polynomial_peaks() {
        let f = get("unbounded_L2");
        for n in [3i64, 40, 1000] {
            let x = n as f64 * PI;
            let s = f.spikes(x - 1.0, x + 1.0)[0];
            assert!((f.eval_near(&s, 0.0).re - x * x).abs() < 1e-9 * x * x);
        }
    }

    #[test]
    fn literal_spike_masses_approach_root_half_pi() {
        let m = SpikeTrain { power: 8 }.spike_mass(200);
        assert!((m - (PI / 2.0).sqrt()).abs() < 1e-6, "{m}");
        let r = SpikeTrain { power: 16 }.spike_mass(200);
        let x = 200.0 * PI;
        assert!((r * x.powi(4) - (PI / 2.0).sqrt()).abs() < 1e-6);
    }

    #[test]
    fn triangle_integral_converges_monotonically() {
        let mut prev = 0.0;
        for t in [0.5, 1.0, 1.9, 2.0, 10.0, 100.5, 1e3, 1e4] {
            let v = TriangleTrain::integral_to(t);
            assert!(v >= prev);
            prev = v;
        }
        assert!((prev - PI * PI / 6.0).abs() < 1e-3);
    }

    #[test]
    fn declared_square_integrability_matches_probe() {
        for name in CatalogName::representatives() {
            let f = catalog_entry(name, &Constants::default()).unwrap();
            let r = improper_norm_probe(&f, f.singular_points(), f.support()).unwrap();
            assert_eq!(
                r.status == NormStatus::Finite,
                f.has(SquareIntegrable),
                "{name}: {:?}",
                r.refinement_trace.last()
            );
        }
    }

    #[test]
    fn normalizations() {
        let c = Constants::default();
        let probe = |n: &str| {
            let f = get(n);
            improper_norm_probe(&f, f.singular_points(), f.support()).unwrap().value.unwrap()
        };
        for n in ["parabola_well", "A_eigenfunction_f", "well_eigenfunction(3)", "circle_mode(2)", "twisted_eigenfunction(2,0.7)"] {
            assert!((probe(n) - 1.0).abs() < 1e-6, "{n}");
        }
        let grid = Grid::compact(-1.0, 1.0, 2049).unwrap();
        let a = get("well_eigenfunction(1)").sample(&grid).unwrap();
        let b = get("well_eigenfunction(2)").sample(&grid).unwrap();
        assert!(inner_product(&a, &b).unwrap().norm() < 1e-10);
        assert!((well_energy(1, &c) - PI * PI / 8.0).abs() < 1e-15);
    }

    #[test]
    fn twisted_mode_obeys_its_boundary_phase() {
        let alpha = 0.7;
        let f = get("twisted_eigenfunction(1,0.7)");
        let lhs = f.eval(0.0);
        let rhs = Complex64::from_polar(1.0, alpha) * f.eval(1.0);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn combinations_keep_shared_traits() {
        let g = get("gaussian");
        let p = get("plane_wave(1)");
        let c = AnalyticFunction::linear_combination(&[(re(2.0), &g), (re(-1.0), &p)]).unwrap();
        assert_eq!(c.traits().iter().copied().collect::<Vec<_>>(), vec![PolynomiallyBounded]);
        assert!((c.eval(0.3) - (g.eval(0.3) * 2.0 - p.eval(0.3))).norm() < 1e-15);
    }
}
