//! The four front-end commands, returning text so every front end emits the
//! same bytes.

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::Result;
use crate::models::ModelKind;
use crate::output::{to_json, trajectory_csv, Report};
use crate::scenario::{compare_models, run_scenario, ComparisonTable, PredictionReport};
use crate::stability::{classify_stability, StabilityReport};
use crate::sweep::{run_sweep, DrawOutcome};

/// Rest-point analysis at the exogenous levels in force just before `t = 0`.
pub fn stability_reports(cfg: &RunConfig) -> Result<Vec<StabilityReport>> {
    let spec = &cfg.scenario;
    spec.validate()?;
    let before = spec.exogenous_path().before(0.0)?;
    spec.models
        .kinds()
        .into_iter()
        .map(|k| classify_stability(&spec.model(k), &spec.demand, &before, spec.r_star))
        .collect()
}

#[derive(Serialize)]
struct StabilityBody {
    reports: Vec<StabilityReport>,
}

pub fn stability(cfg: &RunConfig) -> Result<String> {
    Ok(to_json(&Report {
        command: "stability",
        config: cfg,
        body: StabilityBody {
            reports: stability_reports(cfg)?,
        },
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateOutput {
    pub csv: Vec<(ModelKind, String)>,
    pub json: String,
}

#[derive(Serialize)]
struct SimulateBody {
    reports: Vec<PredictionReport>,
}

pub fn simulate(cfg: &RunConfig) -> Result<SimulateOutput> {
    let runs = run_scenario(&cfg.scenario)?;
    let csv = runs
        .iter()
        .map(|r| (r.report.model, trajectory_csv(&r.trajectory)))
        .collect();
    let json = to_json(&Report {
        command: "simulate",
        config: cfg,
        body: SimulateBody {
            reports: runs.into_iter().map(|r| r.report).collect(),
        },
    });
    Ok(SimulateOutput { csv, json })
}

/// CSV destination for one model. With more than one model, `out.csv`
/// becomes `out_TMIA.csv` and `out_TMIIA.csv`.
pub fn csv_path(base: &str, kind: ModelKind, several: bool) -> String {
    if !several {
        return base.to_string();
    }
    let path = std::path::Path::new(base);
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(base);
    let name = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}_{kind}.{ext}"),
        None => format!("{stem}_{kind}"),
    };
    path.with_file_name(name).display().to_string()
}

#[derive(Serialize)]
struct CompareBody {
    table: ComparisonTable,
}

pub fn compare(cfg: &RunConfig) -> Result<String> {
    Ok(to_json(&Report {
        command: "compare",
        config: cfg,
        body: CompareBody {
            table: compare_models(&cfg.scenario, &cfg.compare)?,
        },
    }))
}

#[derive(Serialize)]
struct SweepBody {
    draws: Vec<DrawOutcome>,
}

pub fn sweep(cfg: &RunConfig) -> Result<String> {
    cfg.scenario.validate()?;
    Ok(to_json(&Report {
        command: "sweep",
        config: cfg,
        body: SweepBody {
            draws: run_sweep(&cfg.scenario, &cfg.sweep),
        },
    }))
}
