//! Strict JSON scenario files.
//!
//! Every key is optional and falls back to a documented default, but an
//! unknown key anywhere is an error. Diagnostics carry `origin:line:column`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{QopError, Result};
use crate::operator::Constants;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Nodes of the working grid, endpoints included.
    pub n_points: usize,
    /// Number of eigenpairs kept in spectral sums.
    pub truncation: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n_points: 4001, truncation: 2000 }
    }
}

/// Pass/fail tolerances used by the paradox runner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Spectral sum for ⟨H²⟩ against its exact value.
    pub spectral: f64,
    /// ‖Hψ‖² against its exact value.
    pub form: f64,
    /// |naive ⟨ψ, H²ψ⟩|.
    pub naive: f64,
    /// Relative eigen-equation residual of the A eigenfunction.
    pub eigen_check: f64,
    /// Eigenpair residuals of the twisted momentum family.
    pub residual: f64,
    /// Weak eigenvalue residuals of δ and plane waves.
    pub weak_eigen: f64,
    /// Parseval defect of the Fourier transform.
    pub parseval: f64,
    /// Uncertainty products and bounds.
    pub uncertainty: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            spectral: 1e-3,
            form: 1e-6,
            naive: 1e-8,
            eigen_check: 1e-4,
            residual: 1e-3,
            weak_eigen: 1e-6,
            parseval: 1e-6,
            uncertainty: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Classification,
    Deficiency,
    ExtensionFamily,
    Spectrum,
    Uncertainty,
    Fourier,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub constants: Constants,
    pub grid: GridConfig,
    pub tolerances: Tolerances,
    /// One of Q, P, Lz, phi, H, H2, A.
    pub operator: String,
    /// A named domain such as `dirichlet`, `twisted` or `well_dirichlet`.
    pub domain: String,
    /// A named state for the uncertainty and Fourier analyses.
    pub state: String,
    pub analyses: Vec<Analysis>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            constants: Constants::default(),
            grid: GridConfig::default(),
            tolerances: Tolerances::default(),
            operator: "P".into(),
            domain: "dirichlet".into(),
            state: "gaussian(1)".into(),
            analyses: Vec::new(),
        }
    }
}

/// 1-based line of the first occurrence of `"key"`, or 1.
fn line_of(text: &str, key: &str) -> usize {
    let quoted = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&quoted)).map_or(1, |i| i + 1)
}

fn anchored(origin: &str, text: &str, key: &str, msg: String) -> QopError {
    QopError::Config(format!("{origin}:{}: {msg}", line_of(text, key)))
}

/// Parses and validates a scenario; `origin` prefixes diagnostics.
pub fn parse_scenario(text: &str, origin: &str) -> Result<ScenarioConfig> {
    let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| {
        let full = e.to_string();
        let msg = full.split(" at line ").next().unwrap_or(&full).to_string();
        QopError::Config(format!("{origin}:{}:{}: {msg}", e.line(), e.column()))
    })?;
    cfg.constants.validate().map_err(|e| anchored(origin, text, "constants", e.to_string()))?;
    let g = cfg.grid;
    if g.n_points < 101 || g.n_points.is_multiple_of(2) {
        return Err(anchored(origin, text, "n_points", format!("n_points must be odd and ≥ 101, got {}", g.n_points)));
    }
    if g.truncation == 0 || 2 * g.truncation + 1 > g.n_points {
        return Err(anchored(
            origin,
            text,
            "truncation",
            format!("truncation must lie in 1..={} for n_points = {}, got {}", (g.n_points - 1) / 2, g.n_points, g.truncation),
        ));
    }
    let t = cfg.tolerances;
    for (key, v) in [
        ("spectral", t.spectral),
        ("form", t.form),
        ("naive", t.naive),
        ("eigen_check", t.eigen_check),
        ("residual", t.residual),
        ("weak_eigen", t.weak_eigen),
        ("parseval", t.parseval),
        ("uncertainty", t.uncertainty),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(anchored(origin, text, key, format!("tolerance '{key}' must be finite and positive, got {v}")));
        }
    }
    Ok(cfg)
}

pub fn load_scenario(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| QopError::Config(format!("{}: cannot read scenario: {e}", path.display())))?;
    parse_scenario(&text, &path.display().to_string())
}
