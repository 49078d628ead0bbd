//! Supply-shock scenarios, sign predictions and the two-model comparison.

pub mod schedule;

use serde::{Deserialize, Serialize};

use crate::demand::DemandSpec;
use crate::error::{Error, Result};
use crate::integrate::{integrate, Dynamics, Trajectory};
use crate::models::{find_equilibrium, ExogenousPoint, MacroState, Model, ModelKind, Rates, TmiaParams, TmiiaParams};

pub use schedule::{eval_schedule, Schedule};

/// Relative size below which a rate counts as zero.
pub const SIGN_ZERO_TOL: f64 = 1e-10;
/// Terminal gap, relative to `Y*`, below which a run has converged.
pub const CONVERGENCE_TOL: f64 = 1e-3;
/// A policy moves output if `max |ΔY|` exceeds this fraction of `Y_star0`.
pub const POLICY_EFFECT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelChoice {
    #[serde(rename = "TMIA")]
    Tmia,
    #[serde(rename = "TMIIA")]
    Tmiia,
    #[serde(rename = "both")]
    Both,
}

impl ModelChoice {
    pub fn kinds(self) -> Vec<ModelKind> {
        match self {
            ModelChoice::Tmia => vec![ModelKind::Tmia],
            ModelChoice::Tmiia => vec![ModelKind::Tmiia],
            ModelChoice::Both => vec![ModelKind::Tmia, ModelKind::Tmiia],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialState {
    /// Rest point at the exogenous levels in force just before `t = 0`.
    OldEquilibrium(OldEquilibriumTag),
    Explicit(MacroState),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OldEquilibriumTag {
    AtOldEquilibrium,
}

impl Default for InitialState {
    fn default() -> Self {
        InitialState::OldEquilibrium(OldEquilibriumTag::AtOldEquilibrium)
    }
}

/// Fiscal and monetary paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyPaths {
    #[serde(rename = "G")]
    pub g: Schedule,
    pub mu: Schedule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub models: ModelChoice,
    pub tmia: TmiaParams,
    pub tmiia: TmiiaParams,
    pub demand: DemandSpec,
    pub r_star: f64,
    pub y_star: Schedule,
    pub policy: PolicyPaths,
    pub horizon: f64,
    pub dt: f64,
    pub sample_every: usize,
    pub initial: InitialState,
}

impl ScenarioSpec {
    /// Default parameters, reference demand and a 10% negative step in `Y*` at `t = 0`.
    pub fn default_shock(models: ModelChoice) -> Self {
        let demand = DemandSpec::default();
        let rf = *demand.reference();
        Self {
            models,
            tmia: TmiaParams::default(),
            tmiia: TmiiaParams::default(),
            demand,
            r_star: rf.r0,
            y_star: Schedule::step(0.0, rf.y_star0, 0.9 * rf.y_star0),
            policy: PolicyPaths {
                g: Schedule::constant(rf.g0),
                mu: Schedule::constant(0.0),
            },
            horizon: 200.0,
            dt: 0.01,
            sample_every: 10,
            initial: InitialState::default(),
        }
    }

    pub fn model(&self, kind: ModelKind) -> Model {
        match kind {
            ModelKind::Tmia => Model::Tmia(self.tmia),
            ModelKind::Tmiia => Model::Tmiia(self.tmiia),
        }
    }

    pub fn exogenous_path(&self) -> ExogenousPath {
        ExogenousPath {
            y_star: self.y_star.clone(),
            g: self.policy.g.clone(),
            mu: self.policy.mu.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for kind in self.models.kinds() {
            self.model(kind).validate()?;
        }
        let report = self.demand.validate();
        if let Some(v) = report.violations().next() {
            return Err(Error::InvalidParameter {
                field: format!("demand.{}", v.field),
                reason: v.message.clone(),
            });
        }
        self.y_star.validate("shock")?;
        self.policy.g.validate("policy.G")?;
        self.policy.mu.validate("policy.mu")?;
        if self.y_star.min_level() <= 0.0 {
            return Err(Error::InvalidParameter {
                field: "shock".into(),
                reason: "potential output must stay positive".into(),
            });
        }
        if !self.r_star.is_finite() {
            return Err(Error::InvalidParameter {
                field: "r_star".into(),
                reason: "must be finite".into(),
            });
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "run.horizon".into(),
                reason: format!("must be positive, got {}", self.horizon),
            });
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "run.dt".into(),
                reason: format!("must be positive, got {}", self.dt),
            });
        }
        if self.sample_every == 0 {
            return Err(Error::InvalidParameter {
                field: "run.sample_every".into(),
                reason: "must be at least 1".into(),
            });
        }
        if let InitialState::Explicit(s) = &self.initial {
            s.check().map_err(|e| Error::InvalidParameter {
                field: "initial".into(),
                reason: e.to_string(),
            })?;
        }
        Ok(())
    }
}

/// All exogenous schedules together.
#[derive(Debug, Clone, PartialEq)]
pub struct ExogenousPath {
    pub y_star: Schedule,
    pub g: Schedule,
    pub mu: Schedule,
}

impl ExogenousPath {
    pub fn at(&self, t: f64) -> Result<ExogenousPoint> {
        Ok(ExogenousPoint {
            y_star: self.y_star.eval(t)?,
            g: self.g.eval(t)?,
            mu: self.mu.eval(t)?,
        })
    }

    pub fn before(&self, t: f64) -> Result<ExogenousPoint> {
        Ok(ExogenousPoint {
            y_star: self.y_star.left_limit(t)?,
            g: self.g.left_limit(t)?,
            mu: self.mu.left_limit(t)?,
        })
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = [&self.y_star, &self.g, &self.mu]
            .iter()
            .flat_map(|s| s.breakpoints())
            .collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }
}

/// A model driven by time-varying exogenous schedules.
pub struct ModelDynamics<'a> {
    pub model: Model,
    pub demand: &'a DemandSpec,
    pub path: &'a ExogenousPath,
}

impl Dynamics for ModelDynamics<'_> {
    fn rates(&self, t: f64, state: &MacroState) -> Result<Rates> {
        self.model.field(state, self.demand, &self.path.at(t)?)
    }

    fn observe(&self, t: f64, state: &MacroState) -> Result<(f64, ExogenousPoint)> {
        let exog = self.path.at(t)?;
        Ok((self.model.inflation_rate(state, self.demand, &exog)?, exog))
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.path.breakpoints()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
    #[serde(rename = "0")]
    Zero,
}

impl Sign {
    pub fn of(value: f64, scale: f64) -> Self {
        if value.abs() < SIGN_ZERO_TOL * scale {
            Sign::Zero
        } else if value > 0.0 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Positive => "+",
            Sign::Negative => "-",
            Sign::Zero => "0",
        }
    }
}

/// Signs of `(dY, dp, dx, dr)`.
pub type SignTuple = [Sign; 4];

pub fn format_signs(s: &SignTuple) -> String {
    format!("({},{},{},{})", s[0].symbol(), s[1].symbol(), s[2].symbol(), s[3].symbol())
}

/// Signs of the field with post-shock exogenous levels applied to the
/// pre-shock state.
pub fn short_run_signs(
    model: &Model,
    demand: &DemandSpec,
    state: &MacroState,
    exog_after: &ExogenousPoint,
) -> Result<SignTuple> {
    let rates = model.field(state, demand, exog_after)?;
    Ok(signs_of(&rates, state))
}

fn signs_of(rates: &Rates, state: &MacroState) -> SignTuple {
    let scales = [state.y.abs().max(1.0), state.p.abs().max(1.0), 1.0, 1.0];
    let r = rates.to_array();
    [
        Sign::of(r[0], scales[0]),
        Sign::of(r[1], scales[1]),
        Sign::of(r[2], scales[2]),
        Sign::of(r[3], scales[3]),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionReport {
    pub model: ModelKind,
    pub initial_state: MacroState,
    pub short_run_rates: Rates,
    pub short_run_signs: SignTuple,
    pub terminal_time: f64,
    pub terminal_state: MacroState,
    pub terminal_y_star: f64,
    pub terminal_gap: f64,
    pub terminal_pi: f64,
    pub terminal_x: f64,
    pub converged: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRun {
    pub trajectory: Trajectory,
    pub report: PredictionReport,
}

pub fn initial_state(spec: &ScenarioSpec, kind: ModelKind) -> Result<MacroState> {
    match spec.initial {
        InitialState::Explicit(s) => Ok(s),
        InitialState::OldEquilibrium(_) => {
            let before = spec.exogenous_path().before(0.0)?;
            find_equilibrium(&spec.model(kind), &spec.demand, before.y_star, before.g, spec.r_star)
        }
    }
}

/// Integrate one model of the scenario and summarize it.
pub fn run_model(spec: &ScenarioSpec, kind: ModelKind) -> Result<ModelRun> {
    spec.validate()?;
    let model = spec.model(kind);
    let path = spec.exogenous_path();
    let start = initial_state(spec, kind)?;
    let dynamics = ModelDynamics {
        model,
        demand: &spec.demand,
        path: &path,
    };
    let trajectory = integrate(&dynamics, &start, 0.0, spec.horizon, spec.dt, spec.sample_every)?;

    let exog0 = path.at(0.0)?;
    let short_run_rates = model.field(&start, &spec.demand, &exog0)?;
    let short_run_signs = signs_of(&short_run_rates, &start);

    let n = trajectory.len() - 1;
    let terminal_state = trajectory.states[n];
    let terminal_exog = trajectory.exogenous[n];
    let terminal_gap = (terminal_state.y - terminal_exog.y_star).abs();
    let converged = terminal_gap < CONVERGENCE_TOL * terminal_exog.y_star;

    let mut notes = Vec::new();
    if converged && terminal_state.x.abs() > 1e-6 {
        notes.push(format!(
            "terminal expected inflation x = {:.6e} is not zero, so the terminal state is not yet a rest point",
            terminal_state.x
        ));
    }
    if converged && (terminal_state.r - spec.r_star).abs() > 1e-6 {
        notes.push(format!(
            "rest points form a continuum in (p, r): output converged with r = {:.6} (r_star = {:.6}) and p = {:.6}",
            terminal_state.r, spec.r_star, terminal_state.p
        ));
    }
    if !converged {
        notes.push(format!(
            "output gap {:.6e} still exceeds {} * Ystar at t = {}",
            terminal_gap, CONVERGENCE_TOL, trajectory.times[n]
        ));
    }
    if kind == ModelKind::Tmiia {
        notes.push("output path depends only on Ystar and A'; demand, G and mu move nominal variables only".into());
    }

    let report = PredictionReport {
        model: kind,
        initial_state: start,
        short_run_rates,
        short_run_signs,
        terminal_time: trajectory.times[n],
        terminal_state,
        terminal_y_star: terminal_exog.y_star,
        terminal_gap,
        terminal_pi: trajectory.pi[n],
        terminal_x: terminal_state.x,
        converged,
        notes,
    };
    Ok(ModelRun { trajectory, report })
}

/// Every model requested by `spec.models`, in `TMIA, TMIIA` order.
pub fn run_scenario(spec: &ScenarioSpec) -> Result<Vec<ModelRun>> {
    spec.models.kinds().into_iter().map(|k| run_model(spec, k)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyEffect {
    pub model: ModelKind,
    pub times: Vec<f64>,
    pub delta_y: Vec<f64>,
    pub delta_p: Vec<f64>,
    pub max_abs_dy: f64,
    pub max_abs_dp: f64,
}

/// Alternative minus baseline, sample by sample, on a shared grid. Both runs
/// start from the baseline's initial state, so the alternative policy acts
/// from `t = 0` onwards.
pub fn policy_effect(
    spec: &ScenarioSpec,
    kind: ModelKind,
    baseline: &PolicyPaths,
    alternative: &PolicyPaths,
) -> Result<PolicyEffect> {
    let mut base_spec = spec.clone();
    base_spec.policy = baseline.clone();
    let start = initial_state(&base_spec, kind)?;
    let run = |policy: &PolicyPaths| {
        let mut s = spec.clone();
        s.policy = policy.clone();
        s.initial = InitialState::Explicit(start);
        run_model(&s, kind).map(|r| r.trajectory)
    };
    let base = run(baseline)?;
    let alt = run(alternative)?;
    if base.times != alt.times {
        return Err(Error::Precondition("baseline and alternative sample grids differ".into()));
    }
    let delta_y: Vec<f64> = alt.states.iter().zip(&base.states).map(|(a, b)| a.y - b.y).collect();
    let delta_p: Vec<f64> = alt.states.iter().zip(&base.states).map(|(a, b)| a.p - b.p).collect();
    let max_abs = |v: &[f64]| v.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
    Ok(PolicyEffect {
        model: kind,
        max_abs_dy: max_abs(&delta_y),
        max_abs_dp: max_abs(&delta_p),
        times: base.times,
        delta_y,
        delta_p,
    })
}

/// Sizes of the policy experiments used by [`compare_models`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyDeltas {
    /// Permanent addition to `G` from `t = 0`.
    #[serde(default = "default_fiscal_delta")]
    pub fiscal: f64,
    /// Permanent addition to `mu` from `t = 0`.
    #[serde(default = "default_monetary_delta")]
    pub monetary: f64,
}

fn default_fiscal_delta() -> f64 {
    10.0
}

fn default_monetary_delta() -> f64 {
    0.05
}

impl Default for PolicyDeltas {
    fn default() -> Self {
        Self {
            fiscal: default_fiscal_delta(),
            monetary: default_monetary_delta(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Sign(Sign),
    Effective,
    NoEffect,
}

impl Cell {
    pub fn label(self) -> &'static str {
        match self {
            Cell::Sign(s) => s.symbol(),
            Cell::Effective => "effective",
            Cell::NoEffect => "none",
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub quantity: &'static str,
    #[serde(rename = "TMIA")]
    pub tmia: Cell,
    #[serde(rename = "TMIIA")]
    pub tmiia: Cell,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
    pub reports: Vec<PredictionReport>,
    pub fiscal: Vec<PolicyEffectSummary>,
    pub monetary: Vec<PolicyEffectSummary>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolicyEffectSummary {
    pub model: ModelKind,
    pub max_abs_dy: f64,
    pub max_abs_dp: f64,
}

impl ComparisonTable {
    pub fn row(&self, quantity: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.quantity == quantity)
    }
}

/// Run both models on the same shock and policy experiments and tabulate
/// where their predictions differ.
pub fn compare_models(spec: &ScenarioSpec, deltas: &PolicyDeltas) -> Result<ComparisonTable> {
    let mut spec = spec.clone();
    spec.models = ModelChoice::Both;
    spec.validate()?;
    let threshold = POLICY_EFFECT_TOL * spec.demand.reference().y_star0;
    let baseline = spec.policy.clone();
    let fiscal_alt = PolicyPaths {
        g: baseline.g.shifted(deltas.fiscal),
        mu: baseline.mu.clone(),
    };
    let monetary_alt = PolicyPaths {
        g: baseline.g.clone(),
        mu: baseline.mu.shifted(deltas.monetary),
    };

    let mut reports = Vec::new();
    let mut fiscal = Vec::new();
    let mut monetary = Vec::new();
    for kind in [ModelKind::Tmia, ModelKind::Tmiia] {
        reports.push(run_model(&spec, kind)?.report);
        for (alt, out) in [(&fiscal_alt, &mut fiscal), (&monetary_alt, &mut monetary)] {
            let e = policy_effect(&spec, kind, &baseline, alt)?;
            out.push(PolicyEffectSummary {
                model: kind,
                max_abs_dy: e.max_abs_dy,
                max_abs_dp: e.max_abs_dp,
            });
        }
    }

    let sign_row = |quantity: &'static str, i: usize| ComparisonRow {
        quantity,
        tmia: Cell::Sign(reports[0].short_run_signs[i]),
        tmiia: Cell::Sign(reports[1].short_run_signs[i]),
    };
    let effect = |s: &PolicyEffectSummary| {
        if s.max_abs_dy > threshold {
            Cell::Effective
        } else {
            Cell::NoEffect
        }
    };
    let rows = vec![
        sign_row("output", 0),
        sign_row("inflation", 1),
        sign_row("expectations", 2),
        sign_row("real_rate", 3),
        ComparisonRow {
            quantity: "fiscal_policy",
            tmia: effect(&fiscal[0]),
            tmiia: effect(&fiscal[1]),
        },
        ComparisonRow {
            quantity: "monetary_policy",
            tmia: effect(&monetary[0]),
            tmiia: effect(&monetary[1]),
        },
    ];
    Ok(ComparisonTable {
        rows,
        reports,
        fiscal,
        monetary,
    })
}
