//! Scenario configuration files.
//!
//! The format is TOML. Every key is optional except where noted; omitted keys
//! take the values in the default table below. Unknown keys are rejected.
//!
//! | key                         | default                          |
//! |-----------------------------|----------------------------------|
//! | `model`                     | `"TMIA"` (`"TMIIA"`, `"both"`)   |
//! | `r_star`                    | `demand.reference.r0`            |
//! | `initial`                   | `"at-old-equilibrium"` or `{ Y, p, x, r }` |
//! | `params.{A,B,C,D1,D2}`      | `0.8, 0.5, 0.3, 0.5, 0.5`        |
//! | `params.{A',B',C',D1',D2'}` | `0.8, 0.5, 0.3, 0.5, 0.5`        |
//! | `params.pi0`                | `0`                              |
//! | `demand.kind`               | `"affine"` (`"structural"`)      |
//! | `demand.reference.{Y_star0,p0,r0,G0}` | `100, 1, 0.02, 20`     |
//! | `demand.{e_Y,e_Ystar,e_p,e_x,e_r,e_G}` | `0.6, 0.5, -0.2, 0.1, -0.5, 1` |
//! | `demand.{c_Y,c_Ystar,M,wealth_coef,q,K,c_x,c_r,T,c_T}` | `0.6, 0.5, 50, 0.1, 1, 200, 0.1, 0.5, 20, 0.5` |
//! | `shock`                     | absent: `Y*` constant at `Y_star0` |
//! | `shock.kind`                | `"step"` (`"constant"`, `"ramp"`, `"piecewise"`) |
//! | `shock.{t0,from,to}`        | `0, Y_star0, 0.9 Y_star0`        |
//! | `policy.G`                  | `G0`; a number or a schedule table |
//! | `policy.mu`                 | `0`; a number or a schedule table  |
//! | `run.{horizon,dt,sample_every}` | `200, 0.01, 10`              |
//! | `output.{csv,json}`         | unset (JSON goes to stdout)      |
//! | `compare.{fiscal,monetary}` | `10, 0.05`                       |
//! | `sweep.{draws,seed}`        | `1000, 42`                       |
//! | `sweep.ranges.<name>`       | see [`SweepRanges`]              |

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::demand::{AffineDemand, DemandSpec, ReferencePoint, StructuralDemand};
use crate::models::{ModelKind, TmiaParams, TmiiaParams};
use crate::scenario::{InitialState, ModelChoice, PolicyDeltas, PolicyPaths, ScenarioSpec, Schedule};
use crate::sweep::{SweepConfig, SweepRanges};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("unknown key `{key}` at line {line}")]
    UnknownKey { key: String, line: usize },

    #[error("invalid value at line {line}: {message}")]
    Invalid { line: usize, message: String },

    #[error("constraint violated for `{field}`: {reason}")]
    Constraint { field: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputPaths {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub json: Option<String>,
}

/// A fully resolved configuration. Serializes to the same shape that JSON
/// reports embed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub scenario: ScenarioSpec,
    pub output: OutputPaths,
    pub compare: PolicyDeltas,
    pub sweep: SweepConfig,
    /// Non-default demand signs accepted for sensitivity runs.
    pub warnings: Vec<String>,
}

impl RunConfig {
    pub fn set_model(&mut self, choice: ModelChoice) {
        self.scenario.models = choice;
    }

    pub fn set_horizon(&mut self, horizon: f64) -> Result<(), ConfigError> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(ConfigError::Constraint {
                field: "run.horizon".into(),
                reason: format!("must be positive, got {horizon}"),
            });
        }
        self.scenario.horizon = horizon;
        Ok(())
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        parse_config("").expect("empty document resolves to defaults")
    }
}

// ---------------------------------------------------------------------------
// Raw document
// ---------------------------------------------------------------------------

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    model: Option<String>,
    r_star: Option<f64>,
    initial: Option<InitialState>,
    params: Option<ParamsDoc>,
    demand: Option<DemandDoc>,
    shock: Option<ShockDoc>,
    policy: Option<PolicyDoc>,
    run: Option<RunDoc>,
    output: Option<OutputDoc>,
    compare: Option<PolicyDeltas>,
    sweep: Option<SweepDoc>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsDoc {
    #[serde(rename = "A")]
    a: Option<f64>,
    #[serde(rename = "B")]
    b: Option<f64>,
    #[serde(rename = "C")]
    c: Option<f64>,
    #[serde(rename = "D1")]
    d1: Option<f64>,
    #[serde(rename = "D2")]
    d2: Option<f64>,
    #[serde(rename = "A'")]
    a_p: Option<f64>,
    #[serde(rename = "B'")]
    b_p: Option<f64>,
    #[serde(rename = "C'")]
    c_p: Option<f64>,
    #[serde(rename = "D1'")]
    d1_p: Option<f64>,
    #[serde(rename = "D2'")]
    d2_p: Option<f64>,
    pi0: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReferenceDoc {
    #[serde(rename = "Y_star0")]
    y_star0: Option<f64>,
    p0: Option<f64>,
    r0: Option<f64>,
    #[serde(rename = "G0")]
    g0: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct DemandDoc {
    kind: Option<String>,
    reference: Option<ReferenceDoc>,
    #[serde(rename = "e_Y")]
    e_y: Option<f64>,
    #[serde(rename = "e_Ystar")]
    e_ystar: Option<f64>,
    e_p: Option<f64>,
    e_x: Option<f64>,
    e_r: Option<f64>,
    #[serde(rename = "e_G")]
    e_g: Option<f64>,
    #[serde(rename = "c_Y")]
    c_y: Option<f64>,
    #[serde(rename = "c_Ystar")]
    c_ystar: Option<f64>,
    #[serde(rename = "M")]
    money: Option<f64>,
    wealth_coef: Option<f64>,
    q: Option<f64>,
    #[serde(rename = "K")]
    capital: Option<f64>,
    c_x: Option<f64>,
    c_r: Option<f64>,
    #[serde(rename = "T")]
    taxes: Option<f64>,
    #[serde(rename = "c_T")]
    c_t: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShockDoc {
    kind: Option<String>,
    value: Option<f64>,
    t0: Option<f64>,
    t1: Option<f64>,
    from: Option<f64>,
    to: Option<f64>,
    breakpoints: Option<Vec<f64>>,
    values: Option<Vec<f64>>,
    before: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum LevelOrSchedule {
    Level(f64),
    Schedule(Schedule),
}

impl LevelOrSchedule {
    fn into_schedule(self) -> Schedule {
        match self {
            LevelOrSchedule::Level(v) => Schedule::constant(v),
            LevelOrSchedule::Schedule(s) => s,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolicyDoc {
    #[serde(rename = "G")]
    g: Option<LevelOrSchedule>,
    mu: Option<LevelOrSchedule>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunDoc {
    horizon: Option<f64>,
    dt: Option<f64>,
    sample_every: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputDoc {
    csv: Option<String>,
    json: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepDoc {
    draws: Option<usize>,
    seed: Option<u64>,
    ranges: Option<SweepRanges>,
}

// ---------------------------------------------------------------------------
// Parsing and resolution
// ---------------------------------------------------------------------------

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn classify(text: &str, err: toml::de::Error) -> ConfigError {
    let line = err.span().map(|s| line_of(text, s.start)).unwrap_or(0);
    let message = err.message().to_string();
    if let Some(rest) = message.strip_prefix("unknown field `") {
        let key = rest.split('`').next().unwrap_or_default().to_string();
        return ConfigError::UnknownKey { key, line };
    }
    // Parse failures of the TOML grammar itself come without a serde prefix.
    let grammar = toml::from_str::<toml::Table>(text).is_err();
    if grammar {
        ConfigError::Syntax { line, message }
    } else {
        ConfigError::Invalid { line, message }
    }
}

fn constraint(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Constraint {
        field: field.to_string(),
        reason: reason.into(),
    }
}

pub fn read_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let doc: Document = toml::from_str(text).map_err(|e| classify(text, e))?;

    let models = match doc.model.as_deref().unwrap_or("TMIA") {
        "TMIA" => ModelChoice::Tmia,
        "TMIIA" => ModelChoice::Tmiia,
        "both" => ModelChoice::Both,
        other => return Err(constraint("model", format!("expected TMIA, TMIIA or both, got `{other}`"))),
    };

    let params = doc.params.unwrap_or_default();
    let d_tmia = TmiaParams::default();
    let d_tmiia = TmiiaParams::default();
    let pi0 = params.pi0.unwrap_or(0.0);
    let tmia = TmiaParams {
        a: params.a.unwrap_or(d_tmia.a),
        b: params.b.unwrap_or(d_tmia.b),
        c_exp: params.c.unwrap_or(d_tmia.c_exp),
        d1: params.d1.unwrap_or(d_tmia.d1),
        d2: params.d2.unwrap_or(d_tmia.d2),
        pi_target: pi0,
    };
    let tmiia = TmiiaParams {
        a: params.a_p.unwrap_or(d_tmiia.a),
        b: params.b_p.unwrap_or(d_tmiia.b),
        c: params.c_p.unwrap_or(d_tmiia.c),
        d1: params.d1_p.unwrap_or(d_tmiia.d1),
        d2: params.d2_p.unwrap_or(d_tmiia.d2),
        pi_target: pi0,
    };
    for check in [tmia.validate(), tmiia.validate()] {
        if let Err(crate::error::Error::InvalidParameter { field, reason }) = check {
            return Err(ConfigError::Constraint { field, reason });
        }
    }

    let demand = resolve_demand(doc.demand.unwrap_or_default())?;
    let validation = demand.validate();
    if let Some(v) = validation.violations().next() {
        return Err(constraint(&format!("demand.{}", v.field), v.message.clone()));
    }
    let warnings = validation
        .warnings()
        .map(|w| format!("demand.{}: {}", w.field, w.message))
        .collect();
    let rf = *demand.reference();

    let y_star = match doc.shock {
        None => Schedule::constant(rf.y_star0),
        Some(s) => resolve_shock(s, &rf)?,
    };
    let policy = doc.policy.unwrap_or_default();
    let policy = PolicyPaths {
        g: policy
            .g
            .map(LevelOrSchedule::into_schedule)
            .unwrap_or(Schedule::constant(rf.g0)),
        mu: policy
            .mu
            .map(LevelOrSchedule::into_schedule)
            .unwrap_or(Schedule::constant(0.0)),
    };

    let run = doc.run.unwrap_or_default();
    let output = doc.output.unwrap_or_default();
    let sweep = doc.sweep.unwrap_or_default();
    let sweep = SweepConfig {
        draws: sweep.draws.unwrap_or(1000),
        seed: sweep.seed.unwrap_or(42),
        ranges: sweep.ranges.unwrap_or_default(),
    };
    sweep
        .ranges
        .validate()
        .map_err(|(field, reason)| constraint(&format!("sweep.ranges.{field}"), reason))?;

    let scenario = ScenarioSpec {
        models,
        tmia,
        tmiia,
        demand,
        r_star: doc.r_star.unwrap_or(rf.r0),
        y_star,
        policy,
        horizon: run.horizon.unwrap_or(200.0),
        dt: run.dt.unwrap_or(0.01),
        sample_every: run.sample_every.unwrap_or(10),
        initial: doc.initial.unwrap_or_default(),
    };
    scenario.validate().map_err(|e| match e {
        crate::error::Error::InvalidParameter { field, reason } => ConfigError::Constraint { field, reason },
        other => constraint("config", other.to_string()),
    })?;

    Ok(RunConfig {
        scenario,
        output: OutputPaths {
            csv: output.csv,
            json: output.json,
        },
        compare: doc.compare.unwrap_or_default(),
        sweep,
        warnings,
    })
}

fn resolve_demand(doc: DemandDoc) -> Result<DemandSpec, ConfigError> {
    let dr = ReferencePoint::default();
    let r = doc.reference.unwrap_or_default();
    let reference = ReferencePoint {
        y_star0: r.y_star0.unwrap_or(dr.y_star0),
        p0: r.p0.unwrap_or(dr.p0),
        r0: r.r0.unwrap_or(dr.r0),
        g0: r.g0.unwrap_or(dr.g0),
    };
    let affine_keys = [
        ("e_Y", doc.e_y),
        ("e_Ystar", doc.e_ystar),
        ("e_p", doc.e_p),
        ("e_x", doc.e_x),
        ("e_r", doc.e_r),
        ("e_G", doc.e_g),
    ];
    let structural_keys = [
        ("c_Y", doc.c_y),
        ("c_Ystar", doc.c_ystar),
        ("M", doc.money),
        ("wealth_coef", doc.wealth_coef),
        ("q", doc.q),
        ("K", doc.capital),
        ("c_x", doc.c_x),
        ("c_r", doc.c_r),
        ("T", doc.taxes),
        ("c_T", doc.c_t),
    ];
    let reject = |kind: &str, keys: &[(&str, Option<f64>)]| {
        match keys.iter().find(|(_, v)| v.is_some()) {
            Some((k, _)) => Err(constraint(&format!("demand.{k}"), format!("not a coefficient of {kind} demand"))),
            None => Ok(()),
        }
    };
    match doc.kind.as_deref().unwrap_or("affine") {
        "affine" => {
            reject("affine", &structural_keys)?;
            let d = AffineDemand::default();
            Ok(DemandSpec::Affine(AffineDemand {
                reference,
                e_y: doc.e_y.unwrap_or(d.e_y),
                e_ystar: doc.e_ystar.unwrap_or(d.e_ystar),
                e_p: doc.e_p.unwrap_or(d.e_p),
                e_x: doc.e_x.unwrap_or(d.e_x),
                e_r: doc.e_r.unwrap_or(d.e_r),
                e_g: doc.e_g.unwrap_or(d.e_g),
            }))
        }
        "structural" => {
            reject("structural", &affine_keys)?;
            let d = StructuralDemand::default();
            Ok(DemandSpec::Structural(StructuralDemand {
                reference,
                c_y: doc.c_y.unwrap_or(d.c_y),
                c_ystar: doc.c_ystar.unwrap_or(d.c_ystar),
                money: doc.money.unwrap_or(d.money),
                wealth_coef: doc.wealth_coef.unwrap_or(d.wealth_coef),
                q: doc.q.unwrap_or(d.q),
                capital: doc.capital.unwrap_or(d.capital),
                c_x: doc.c_x.unwrap_or(d.c_x),
                c_r: doc.c_r.unwrap_or(d.c_r),
                taxes: doc.taxes.unwrap_or(d.taxes),
                c_t: doc.c_t.unwrap_or(d.c_t),
            }))
        }
        other => Err(constraint("demand.kind", format!("expected affine or structural, got `{other}`"))),
    }
}

fn resolve_shock(doc: ShockDoc, rf: &ReferencePoint) -> Result<Schedule, ConfigError> {
    let kind = doc.kind.as_deref().unwrap_or("step");
    let allowed: &[&str] = match kind {
        "constant" => &["value"],
        "step" => &["t0", "from", "to"],
        "ramp" => &["t0", "t1", "from", "to"],
        "piecewise" => &["breakpoints", "values", "before"],
        other => {
            return Err(constraint(
                "shock.kind",
                format!("expected constant, step, ramp or piecewise, got `{other}`"),
            ))
        }
    };
    let present = [
        ("value", doc.value.is_some()),
        ("t0", doc.t0.is_some()),
        ("t1", doc.t1.is_some()),
        ("from", doc.from.is_some()),
        ("to", doc.to.is_some()),
        ("breakpoints", doc.breakpoints.is_some()),
        ("values", doc.values.is_some()),
        ("before", doc.before.is_some()),
    ];
    if let Some((k, _)) = present.iter().find(|(k, set)| *set && !allowed.contains(k)) {
        return Err(constraint(&format!("shock.{k}"), format!("not used by a {kind} shock")));
    }
    let from = doc.from.unwrap_or(rf.y_star0);
    let to = doc.to.unwrap_or(0.9 * rf.y_star0);
    let schedule = match kind {
        "constant" => Schedule::constant(doc.value.unwrap_or(rf.y_star0)),
        "step" => Schedule::step(doc.t0.unwrap_or(0.0), from, to),
        "ramp" => Schedule::Ramp {
            t0: doc.t0.unwrap_or(0.0),
            t1: doc.t1.ok_or_else(|| constraint("shock.t1", "required for a ramp"))?,
            from,
            to,
        },
        _ => Schedule::Piecewise {
            breakpoints: doc
                .breakpoints
                .ok_or_else(|| constraint("shock.breakpoints", "required for a piecewise shock"))?,
            values: doc
                .values
                .ok_or_else(|| constraint("shock.values", "required for a piecewise shock"))?,
            before: doc.before,
        },
    };
    Ok(schedule)
}

/// Parse a `--model` override.
pub fn parse_model_choice(s: &str) -> Result<ModelChoice, ConfigError> {
    match s {
        "TMIA" | "tmia" => Ok(ModelChoice::Tmia),
        "TMIIA" | "tmiia" => Ok(ModelChoice::Tmiia),
        "both" => Ok(ModelChoice::Both),
        other => Err(constraint("--model", format!("expected TMIA, TMIIA or both, got `{other}`"))),
    }
}

impl From<ModelKind> for ModelChoice {
    fn from(k: ModelKind) -> Self {
        match k {
            ModelKind::Tmia => ModelChoice::Tmia,
            ModelKind::Tmiia => ModelChoice::Tmiia,
        }
    }
}
