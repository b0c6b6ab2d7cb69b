use serde::{Deserialize, Serialize};

use crate::error::{QopError, Result};

/// Physical constants shared by operators, states and reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Constants {
    pub hbar: f64,
    pub mass: f64,
    /// Half-width of the well, or the interval length where one is needed.
    pub a: f64,
    /// Boundary phase of the twisted momentum domain, radians.
    pub alpha: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0, a: 1.0, alpha: 0.0 }
    }
}

impl Constants {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("hbar", self.hbar), ("mass", self.mass), ("a", self.a)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(QopError::Input(format!("{name} must be finite and positive, got {v}")));
            }
        }
        if !self.alpha.is_finite() {
            return Err(QopError::Input(format!("alpha must be finite, got {}", self.alpha)));
        }
        Ok(())
    }
}
