//! Single analyses behind the CLI subcommands and scenario files.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::{Analysis, ScenarioConfig};
use crate::boundary::analyze;
use crate::deficiency::{catalog_pair, deficiency_indices, extension_family, DeficiencyReport};
use crate::distributions::fourier;
use crate::error::{QopError, Result};
use crate::functions::{catalog_get, well_energy};
use crate::numerics::{norm, Grid};
use crate::operator::{Constants, DomainSpec, OperatorSpec};
use crate::spectral::discrete_spectrum;
use crate::uncertainty::{named_state, uncertainty_report};

/// Scalar facts plus an optional table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub analysis: String,
    pub subject: String,
    pub facts: BTreeMap<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl AnalysisReport {
    fn new(analysis: &str, subject: impl Into<String>) -> Self {
        Self { analysis: analysis.into(), subject: subject.into(), facts: BTreeMap::new(), columns: vec![], rows: vec![] }
    }

    fn fact(&mut self, key: &str, v: impl Serialize) {
        self.facts.insert(key.into(), serde_json::to_value(v).unwrap_or(Value::Null));
    }

    fn table(&mut self, columns: &[&str], rows: Vec<Vec<Value>>) {
        self.columns = columns.iter().map(|c| c.to_string()).collect();
        self.rows = rows;
    }
}

/// Q, P, Lz, phi, H, H2 or A.
pub fn resolve_operator(name: &str, k: &Constants) -> Result<OperatorSpec> {
    Ok(match name {
        "Q" => OperatorSpec::position(*k),
        "P" => OperatorSpec::momentum(*k),
        "Lz" => OperatorSpec::angular_momentum(*k),
        "phi" => OperatorSpec::angle(*k),
        "H" => OperatorSpec::hamiltonian(*k),
        "H2" => OperatorSpec::hamiltonian_squared(*k),
        "A" => OperatorSpec::a_operator(*k),
        other => return Err(QopError::Config(format!("unknown operator '{other}'; expected Q, P, Lz, phi, H, H2 or A"))),
    })
}

fn resolve_domain(name: &str, k: &Constants) -> Result<DomainSpec> {
    DomainSpec::named(name, k).map_err(|e| QopError::Config(e.to_string()))
}

/// Spectrum of H (well), Lz (circle) or P_alpha (twisted momentum on [0, 1]).
pub fn spectrum_report(operator: &str, k: &Constants, n_points: usize, count: usize) -> Result<AnalysisReport> {
    let (op, dom) = match operator {
        "H" => (OperatorSpec::hamiltonian(*k), DomainSpec::well_dirichlet(k.a)),
        "Lz" => (OperatorSpec::angular_momentum(*k), resolve_domain("circle", k)?),
        "P_alpha" => (OperatorSpec::momentum(*k), DomainSpec::twisted(0.0, 1.0, k.alpha)),
        other => return Err(QopError::Config(format!("unknown spectrum operator '{other}'; expected H, Lz or P_alpha"))),
    };
    let mut r = spectrum_of(&op, &dom, n_points, count)?;
    let hbar = k.hbar;
    let exact = |i: usize, e: f64| -> f64 {
        match operator {
            "H" => well_energy(i as u32 + 1, k),
            "Lz" => hbar * (e / hbar).round(),
            _ => hbar * (TAU * ((e / hbar + k.alpha) / TAU).round() - k.alpha),
        }
    };
    let rows = r
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let e = row[1].as_f64().unwrap_or(f64::NAN);
            let x = exact(i, e);
            let rel = (e - x).abs() / x.abs().max(f64::MIN_POSITIVE);
            vec![row[0].clone(), row[1].clone(), Value::from(x), Value::from(if x == 0.0 { (e - x).abs() } else { rel })]
        })
        .collect();
    r.subject = operator.to_string();
    r.table(&["index", "eigenvalue", "exact", "relative_error"], rows);
    Ok(r)
}

fn spectrum_of(op: &OperatorSpec, dom: &DomainSpec, n_points: usize, count: usize) -> Result<AnalysisReport> {
    let (a, b) = dom
        .interval()
        .ok_or_else(|| QopError::Unsupported(format!("spectra are computed on compact domains, not '{}'", dom.name())))?;
    let grid = Grid::compact(a, b, n_points)?;
    let data = discrete_spectrum(op, dom, &grid, count)?;
    let mut r = AnalysisReport::new("spectrum", format!("{} on {}", op.name(), dom.name()));
    r.fact("n_points", n_points);
    r.fact("source", data.source);
    let rows = data.eigenvalues.iter().enumerate().map(|(i, e)| vec![Value::from(i + 1), Value::from(*e)]).collect();
    r.table(&["index", "eigenvalue"], rows);
    Ok(r)
}

fn deficiency_table(r: &mut AnalysisReport, d: &DeficiencyReport) {
    r.fact("n_plus", d.n_plus);
    r.fact("n_minus", d.n_minus);
    r.fact("verdict", d.verdict);
    r.fact("spectrum_class", d.spectrum_class);
    let rows = d
        .candidates
        .iter()
        .map(|w| {
            vec![
                Value::from(w.sign),
                Value::from(w.name.clone()),
                serde_json::to_value(w.norm.status).unwrap_or(Value::Null),
                w.norm.value.map(Value::from).unwrap_or(Value::Null),
                Value::from(w.meets_adjoint_conditions),
            ]
        })
        .collect();
    r.table(&["sign", "candidate", "norm_status", "norm_squared", "meets_adjoint_conditions"], rows);
}

/// Indices for a catalog pair: P_box, P_line, A_line, Lz_circle or H_well.
pub fn deficiency_report(pair: &str, k: &Constants) -> Result<AnalysisReport> {
    let (op, dom) = catalog_pair(pair, k).map_err(|e| match e {
        QopError::Unsupported(m) => QopError::Config(m),
        other => other,
    })?;
    let d = deficiency_indices(&op, &dom)?;
    let mut r = AnalysisReport::new("deficiency", pair);
    deficiency_table(&mut r, &d);
    Ok(r)
}

pub fn uncertainty_cli_report(state: &str, k: &Constants, seed: u64) -> Result<AnalysisReport> {
    let (psi, pair) = named_state(state, k, seed).map_err(|e| match e {
        QopError::Input(m) => QopError::Config(m),
        other => other,
    })?;
    let u = uncertainty_report(&psi, &pair)?;
    let mut r = AnalysisReport::new("uncertainty", state);
    if let Value::Object(map) = serde_json::to_value(&u).unwrap_or(Value::Null) {
        r.facts.extend(map);
    }
    r.fact("seed", seed);
    Ok(r)
}

/// Transform of a catalog state sampled on [−20, 20].
pub fn fourier_report(state: &str, k: &Constants) -> Result<AnalysisReport> {
    let f = catalog_get(state, k).map_err(|e| QopError::Config(e.to_string()))?;
    let xg = Grid::line(20.0, 4097)?;
    let pg = Grid::line(8.0, 321)?;
    let fx = f.sample(&xg)?;
    let t = fourier(&fx, &pg, k.hbar)?;
    let mut r = AnalysisReport::new("fourier", state);
    let (nx, np) = (norm(&fx), norm(&t.transform));
    r.fact("norm_x", nx);
    r.fact("norm_p", np);
    r.fact("parseval_defect", (nx * nx - np * np).abs());
    r.fact("edges_not_decayed", t.edges_not_decayed);
    let rows = pg
        .nodes()
        .zip(t.transform.values())
        .map(|(p, v)| vec![Value::from(p), Value::from(v.re), Value::from(v.im), Value::from(v.norm())])
        .collect();
    r.table(&["p", "re", "im", "abs"], rows);
    Ok(r)
}

/// Runs every analysis requested by a scenario, in order.
pub fn run_scenario(cfg: &ScenarioConfig, seed: u64) -> Result<Vec<AnalysisReport>> {
    let k = cfg.constants;
    let op = resolve_operator(&cfg.operator, &k)?;
    let dom = resolve_domain(&cfg.domain, &k)?;
    let subject = format!("{} on {}", op.name(), dom.name());
    cfg.analyses
        .iter()
        .map(|a| match a {
            Analysis::Classification => {
                let b = analyze(&op, &dom)?;
                let mut r = AnalysisReport::new("classification", subject.clone());
                r.fact("classification", b.classification.to_string());
                r.fact("domain_dimension", b.domain.dim());
                r.fact("adjoint_dimension", b.adjoint.dim());
                r.fact("trace_dimension", b.domain.ambient());
                Ok(r)
            }
            Analysis::Deficiency => {
                let mut r = AnalysisReport::new("deficiency", subject.clone());
                deficiency_table(&mut r, &deficiency_indices(&op, &dom)?);
                Ok(r)
            }
            Analysis::ExtensionFamily => {
                let fam = extension_family(&op, &dom)?;
                let mut r = AnalysisReport::new("extension_family", subject.clone());
                r.fact("alpha", k.alpha);
                r.fact("classification", fam.classify(k.alpha)?.to_string());
                let rows = (-3..=3)
                    .map(|n| {
                        Ok(vec![
                            Value::from(n),
                            Value::from(fam.eigenvalue(n, k.alpha)),
                            Value::from(fam.residual(n, k.alpha, cfg.grid.n_points)?),
                        ])
                    })
                    .collect::<Result<Vec<_>>>()?;
                r.table(&["n", "p_n", "residual"], rows);
                Ok(r)
            }
            Analysis::Spectrum => spectrum_of(&op, &dom, cfg.grid.n_points, cfg.grid.truncation),
            Analysis::Uncertainty => uncertainty_cli_report(&cfg.state, &k, seed),
            Analysis::Fourier => fourier_report(&cfg.state, &k),
        })
        .collect()
}
