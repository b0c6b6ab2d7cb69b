//! Decides whether ∫|f|² over an interval or the line is finite.
//!
//! Cutoffs shrink geometrically toward every singular point and the
//! truncation radius grows geometrically toward infinity. Each refinement adds
//! only the newly exposed shells, so the partial sums form a monotone trace.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quadrature::gauss_kronrod;
use crate::error::{QopError, Result};

/// A narrow feature the sampler wants integrated in its own local chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spike {
    pub index: i64,
    pub center: f64,
    pub half_width: f64,
}

/// A pointwise function of one real variable.
pub trait Sampler: Send + Sync {
    fn eval(&self, x: f64) -> Complex64;

    /// Spikes whose centers lie in `[lo, hi]`, sorted by center.
    fn spikes(&self, _lo: f64, _hi: f64) -> Vec<Spike> {
        Vec::new()
    }

    /// f(center + t), evaluated without cancellation in `center + t`.
    fn eval_near(&self, spike: &Spike, t: f64) -> Complex64 {
        self.eval(spike.center + t)
    }
}

impl<F> Sampler for F
where
    F: Fn(f64) -> Complex64 + Send + Sync,
{
    fn eval(&self, x: f64) -> Complex64 {
        self(x)
    }
}

/// Integration region for the probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ProbeDomain {
    /// `[a, b]`; either end may be infinite.
    Interval(f64, f64),
    Line,
}

impl ProbeDomain {
    fn bounds(self) -> (f64, f64) {
        match self {
            ProbeDomain::Interval(a, b) => (a, b),
            ProbeDomain::Line => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormStatus {
    Finite,
    Divergent,
    Inconclusive,
}

/// Outcome of a square-integrability probe; `value` is present iff Finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormProbeResult {
    pub status: NormStatus,
    pub value: Option<f64>,
    pub refinement_trace: Vec<f64>,
}

impl NormProbeResult {
    pub fn is_finite(&self) -> bool {
        self.status == NormStatus::Finite
    }
}

/// Thresholds of the refinement rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSettings {
    pub rtol: f64,
    pub growth_factor: f64,
    pub growth_window: usize,
    pub max_refinements: usize,
    /// Refinements performed before the Finite test may fire.
    pub min_refinements: usize,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        Self { rtol: 1e-6, growth_factor: 10.0, growth_window: 3, max_refinements: 40, min_refinements: 1 }
    }
}

const T0: f64 = 8.0;
const SHELL_RTOL: f64 = 1e-11;
const SHELL_PANELS: usize = 4000;

#[derive(Debug, Clone, Copy)]
enum End {
    Regular(f64),
    Singular { at: f64, eps0: f64, inward: f64 },
    Infinite { sign: f64 },
}

struct Piece {
    left: End,
    right: End,
}

impl Piece {
    /// Inner edge of the left (or right) end at refinement `k`.
    fn edge(end: End, k: i32, t0: f64) -> f64 {
        match end {
            End::Regular(x) => x,
            End::Singular { at, eps0, inward } => at + inward * eps0 * 0.5f64.powi(k),
            End::Infinite { sign } => sign * t0 * 4f64.powi(k),
        }
    }
}

struct Integrator<'a> {
    f: &'a dyn Sampler,
    singular: &'a [f64],
    bad: Option<f64>,
}

impl Integrator<'_> {
    fn plain(&mut self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let f = self.f;
        let mut bad = None;
        let (v, _) = gauss_kronrod(
            |x| {
                let z = f.eval(x);
                if z.re.is_finite() && z.im.is_finite() {
                    z.norm_sqr()
                } else {
                    bad.get_or_insert(x);
                    0.0
                }
            },
            lo,
            hi,
            SHELL_RTOL,
            SHELL_PANELS,
        );
        if let Some(x) = bad {
            self.flag(x);
        }
        v
    }

    /// ∫|f|² over `center + [tl, tr]`, evaluated in the spike's chart.
    fn spike(&mut self, s: &Spike, tl: f64, tr: f64) -> f64 {
        if tr <= tl {
            return 0.0;
        }
        let f = self.f;
        let mut bad = None;
        let (v, _) = gauss_kronrod(
            |t| {
                let z = f.eval_near(s, t);
                if z.re.is_finite() && z.im.is_finite() {
                    z.norm_sqr()
                } else {
                    bad.get_or_insert(s.center + t);
                    0.0
                }
            },
            tl,
            tr,
            SHELL_RTOL,
            SHELL_PANELS,
        );
        if let Some(x) = bad {
            self.flag(x);
        }
        v
    }

    fn flag(&mut self, x: f64) {
        if self.bad.is_none() && !self.singular.contains(&x) {
            self.bad = Some(x);
        }
    }

    /// ∫|f|² over `[lo, hi]` with spike windows taken in local charts.
    fn shell(&mut self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let mut total = 0.0;
        let mut cursor = lo;
        for s in self.f.spikes(lo, hi) {
            // Window edges stay in chart coordinates; x cannot resolve narrow spikes.
            let tl = if s.center - s.half_width >= cursor { -s.half_width } else { cursor - s.center };
            let tr = if s.center + s.half_width <= hi { s.half_width } else { hi - s.center };
            if tr <= tl {
                continue;
            }
            total += self.plain(cursor, s.center + tl);
            // Split at the apex so kinked spikes integrate exactly.
            total += self.spike(&s, tl, tr.min(0.0)) + self.spike(&s, tl.max(0.0), tr);
            cursor = s.center + tr;
        }
        total + self.plain(cursor, hi)
    }
}

/// Square-integrability probe with the default thresholds.
pub fn improper_norm_probe(f: &dyn Sampler, singular_points: &[f64], domain: ProbeDomain) -> Result<NormProbeResult> {
    improper_norm_probe_with(f, singular_points, domain, ProbeSettings::default())
}

pub fn improper_norm_probe_with(
    f: &dyn Sampler,
    singular_points: &[f64],
    domain: ProbeDomain,
    settings: ProbeSettings,
) -> Result<NormProbeResult> {
    let (lo, hi) = domain.bounds();
    if lo.is_nan() || hi.is_nan() || hi <= lo {
        return Err(QopError::Input(format!("empty probe domain [{lo}, {hi}]")));
    }
    for &s in singular_points {
        if !(s >= lo && s <= hi && s.is_finite()) {
            return Err(QopError::Input(format!("singular point {s} outside [{lo}, {hi}]")));
        }
    }
    let mut cuts: Vec<f64> = singular_points.iter().copied().filter(|s| *s > lo && *s < hi).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut breaks = vec![lo];
    breaks.extend(&cuts);
    breaks.push(hi);
    let t0 = breaks
        .iter()
        .filter(|b| b.is_finite())
        .map(|b| 2.0 * b.abs())
        .fold(T0, f64::max);

    let is_singular = |x: f64| singular_points.contains(&x);
    let pieces: Vec<Piece> = breaks
        .windows(2)
        .map(|w| {
            let (u, v) = (w[0], w[1]);
            let eps0 = if (v - u).is_finite() { (0.25 * (v - u)).min(0.5) } else { 0.5 };
            let end = |x: f64, inward: f64| {
                if x.is_infinite() {
                    End::Infinite { sign: x.signum() }
                } else if is_singular(x) {
                    End::Singular { at: x, eps0, inward }
                } else {
                    End::Regular(x)
                }
            };
            Piece { left: end(u, 1.0), right: end(v, -1.0) }
        })
        .collect();

    let mut integ = Integrator { f, singular: singular_points, bad: None };
    let mut trace = Vec::new();
    let mut partial = 0.0;
    for p in &pieces {
        partial += integ.shell(Piece::edge(p.left, 0, t0), Piece::edge(p.right, 0, t0));
    }
    trace.push(partial);

    for k in 1..=settings.max_refinements as i32 {
        for p in &pieces {
            let (l_old, l_new) = (Piece::edge(p.left, k - 1, t0), Piece::edge(p.left, k, t0));
            let (r_old, r_new) = (Piece::edge(p.right, k - 1, t0), Piece::edge(p.right, k, t0));
            partial += integ.shell(l_new, l_old) + integ.shell(r_old, r_new);
        }
        if let Some(x) = integ.bad {
            return Err(QopError::Input(format!("sampler is non-finite at x = {x:e}, off the singular set")));
        }
        trace.push(partial);
        let n = trace.len();
        let (prev, last) = (trace[n - 2], trace[n - 1]);
        if k as usize >= settings.min_refinements && last.is_finite() && (last - prev).abs() <= settings.rtol * last.abs() {
            return Ok(NormProbeResult { status: NormStatus::Finite, value: Some(last), refinement_trace: trace });
        }
        let w = settings.growth_window;
        if n > w {
            let tail = &trace[n - 1 - w..];
            let increasing = tail.windows(2).all(|p| p[1] > p[0]);
            if increasing && (last.is_infinite() || last >= settings.growth_factor * tail[0]) {
                return Ok(NormProbeResult { status: NormStatus::Divergent, value: None, refinement_trace: trace });
            }
        }
        if last.is_infinite() {
            break;
        }
    }
    if let Some(x) = integ.bad {
        return Err(QopError::Input(format!("sampler is non-finite at x = {x:e}, off the singular set")));
    }
    Ok(NormProbeResult { status: NormStatus::Inconclusive, value: None, refinement_trace: trace })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(sign: f64) -> impl Fn(f64) -> Complex64 + Send + Sync {
        move |x: f64| {
            if x == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            Complex64::new(x.abs().powf(-1.5) * (sign / (4.0 * x * x)).exp(), 0.0)
        }
    }

    #[test]
    fn decaying_deficiency_witness_is_finite() {
        let r = improper_norm_probe(&g(-1.0), &[0.0], ProbeDomain::Line).unwrap();
        assert_eq!(r.status, NormStatus::Finite, "{:?}", r.refinement_trace);
        // ∫ x^-3 e^{-1/(2x²)} over ℝ = 2.
        assert!((r.value.unwrap() - 2.0).abs() < 1e-5);
    }

    #[test]
    fn exploding_deficiency_witness_diverges() {
        let r = improper_norm_probe(&g(1.0), &[0.0], ProbeDomain::Line).unwrap();
        assert_eq!(r.status, NormStatus::Divergent, "{:?}", r.refinement_trace);
    }

    #[test]
    fn exponential_on_line_diverges_and_on_box_is_finite() {
        let e = |x: f64| Complex64::new((-x).exp(), 0.0);
        assert_eq!(improper_norm_probe(&e, &[], ProbeDomain::Line).unwrap().status, NormStatus::Divergent);
        let r = improper_norm_probe(&e, &[], ProbeDomain::Interval(0.0, 1.0)).unwrap();
        assert!((r.value.unwrap() - 0.5 * (1.0 - (-2.0f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn logarithmic_divergence_is_not_coerced() {
        let f = |x: f64| Complex64::new(1.0 / (1.0 + x * x).powf(0.25), 0.0);
        let r = improper_norm_probe(&f, &[], ProbeDomain::Line).unwrap();
        assert_eq!(r.status, NormStatus::Inconclusive);
        assert!(r.value.is_none());
    }

    #[test]
    fn nan_off_singular_set_is_an_input_error() {
        let f = |x: f64| Complex64::new(if x.abs() > 5.0 { f64::NAN } else { 0.0 }, 0.0);
        assert!(matches!(improper_norm_probe(&f, &[], ProbeDomain::Line), Err(QopError::Input(_))));
    }

    #[test]
    fn finite_value_is_stable_under_one_more_step() {
        let f = g(-1.0);
        let r = improper_norm_probe(&f, &[0.0], ProbeDomain::Line).unwrap();
        let k = r.refinement_trace.len() - 1;
        let more = ProbeSettings { min_refinements: k + 1, ..Default::default() };
        let r2 = improper_norm_probe_with(&f, &[0.0], ProbeDomain::Line, more).unwrap();
        let (a, b) = (r.value.unwrap(), r2.value.unwrap());
        assert!((a - b).abs() <= 1e-6 * b);
    }
}
