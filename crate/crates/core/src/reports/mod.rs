//! Scenario files, the paradox runner, single analyses and report rendering.

pub mod analysis;
pub mod ccr;
pub mod config;
pub mod emit;
pub mod paradox;

pub use analysis::{
    deficiency_report, fourier_report, resolve_operator, run_scenario, spectrum_report, uncertainty_cli_report,
    AnalysisReport,
};
pub use ccr::{finite_dim_ccr_probe, CcrReport};
pub use config::{load_scenario, parse_scenario, Analysis, GridConfig, ScenarioConfig, Tolerances};
pub use emit::{emit_report, Emit, Format};
pub use paradox::{run_all, run_paradox, Check, ParadoxReport, ParadoxVerdict, PARADOX_IDS};
