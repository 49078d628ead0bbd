//! Two continuous-time macro models of a supply shock: quantity adjustment
//! with sticky prices (TMIA) and price adjustment with output tracking
//! potential (TMIIA). Provides rest points, local stability, simulation and
//! the cross-model comparison.

pub mod commands;
pub mod config;
pub mod demand;
pub mod error;
pub mod integrate;
pub mod models;
pub mod output;
pub mod scenario;
pub mod stability;
pub mod sweep;

pub use config::{parse_config, read_config, ConfigError, RunConfig};
pub use demand::{AffineDemand, DemandInputs, DemandPartials, DemandSpec, ReferencePoint, StructuralDemand};
pub use error::{Error, Result};
pub use integrate::{integrate, step_rk4, Dynamics, Trajectory};
pub use models::{find_equilibrium, ExogenousPoint, MacroState, Model, ModelKind, Rates, TmiaParams, TmiiaParams};
pub use scenario::{
    compare_models, policy_effect, run_model, run_scenario, ModelChoice, PolicyPaths, ScenarioSpec, Schedule, Sign,
};
pub use stability::{classify_stability, StabilityReport, Verdict};
