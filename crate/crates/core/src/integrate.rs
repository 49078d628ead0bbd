//! Fixed-step classical Runge-Kutta with positivity guards.
//!
//! A base step that would leave `Y > 0, p > 0` is retried as two half steps,
//! recursively, at most [`MAX_HALVINGS`] deep and [`MAX_SUBSTEPS`] attempts
//! per base step. Samples are taken on the base grid `t0 + k dt`, so two runs
//! with the same `dt` share sample times even when one of them had to
//! subdivide.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{ExogenousPoint, MacroState, Rates};

pub const MAX_HALVINGS: u32 = 20;
/// RK4 attempts allowed per base step across all halvings.
pub const MAX_SUBSTEPS: u32 = 4096;

/// Right-hand side of the system plus what is recorded at each sample.
pub trait Dynamics {
    fn rates(&self, t: f64, state: &MacroState) -> Result<Rates>;

    /// Realized inflation and the exogenous levels in force at `t`.
    fn observe(&self, t: f64, state: &MacroState) -> Result<(f64, ExogenousPoint)>;

    /// Times where the right-hand side jumps. Steps are split there.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// A bare vector field with a fixed exogenous record; `pi` is taken as `dp/p`.
pub struct FieldFn<F> {
    pub field: F,
    pub exogenous: ExogenousPoint,
}

impl<F> Dynamics for FieldFn<F>
where
    F: Fn(f64, &MacroState) -> Result<Rates>,
{
    fn rates(&self, t: f64, state: &MacroState) -> Result<Rates> {
        (self.field)(t, state)
    }

    fn observe(&self, t: f64, state: &MacroState) -> Result<(f64, ExogenousPoint)> {
        Ok(((self.field)(t, state)?.dp / state.p, self.exogenous))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<MacroState>,
    pub pi: Vec<f64>,
    pub exogenous: Vec<ExogenousPoint>,
}

impl Trajectory {
    fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
            pi: Vec::with_capacity(n),
            exogenous: Vec::with_capacity(n),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> Option<&MacroState> {
        self.states.last()
    }

    fn record(&mut self, dynamics: &dyn Dynamics, t: f64, state: MacroState) -> Result<()> {
        let (pi, exog) = dynamics.observe(t, &state)?;
        self.times.push(t);
        self.states.push(state);
        self.pi.push(pi);
        self.exogenous.push(exog);
        Ok(())
    }
}

fn axpy(y: [f64; 4], a: f64, k: [f64; 4]) -> MacroState {
    MacroState::from_array([y[0] + a * k[0], y[1] + a * k[1], y[2] + a * k[2], y[3] + a * k[3]])
}

fn as_rejection(t: f64, e: Error) -> Error {
    match e {
        Error::Domain(reason) | Error::NonFinite(reason) => Error::StepRejected { t, reason },
        other => other,
    }
}

/// One classical RK4 step. Fails with [`Error::StepRejected`] when a stage or
/// the result leaves the admissible region.
pub fn step_rk4<F>(field: F, state: &MacroState, t: f64, dt: f64) -> Result<MacroState>
where
    F: Fn(f64, &MacroState) -> Result<Rates>,
{
    rk4(&field, state, t, dt, t + dt)
}

// `t_last` is the time of the final stage; a step ending on a jump of a
// right-continuous input evaluates it just before the jump.
fn rk4<F>(field: &F, state: &MacroState, t: f64, dt: f64, t_last: f64) -> Result<MacroState>
where
    F: Fn(f64, &MacroState) -> Result<Rates>,
{
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Precondition(format!("dt must be positive, got {dt}")));
    }
    let y = state.to_array();
    let eval = |tt: f64, s: &MacroState| field(tt, s).map(Rates::to_array).map_err(|e| as_rejection(t, e));
    let k1 = eval(t, state)?;
    let k2 = eval(t + 0.5 * dt, &axpy(y, 0.5 * dt, k1))?;
    let k3 = eval(t + 0.5 * dt, &axpy(y, 0.5 * dt, k2))?;
    let k4 = eval(t_last, &axpy(y, dt, k3))?;
    let mut out = [0.0; 4];
    for i in 0..4 {
        out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    let next = MacroState::from_array(out);
    if !next.is_admissible() {
        return Err(Error::StepRejected {
            t,
            reason: format!("step of {dt} gives Y = {}, p = {}", next.y, next.p),
        });
    }
    Ok(next)
}

// Advance over [t, t + dt], halving on rejection.
fn advance(
    dynamics: &dyn Dynamics,
    state: &MacroState,
    t: f64,
    dt: f64,
    ends_on_jump: bool,
    depth: u32,
    budget: &mut u32,
) -> std::result::Result<MacroState, (f64, Error)> {
    if *budget == 0 {
        let reason = format!("more than {MAX_SUBSTEPS} substeps in one base step");
        return Err((t, Error::StepRejected { t, reason }));
    }
    *budget -= 1;
    let end = t + dt;
    let t_last = if ends_on_jump { end.next_down() } else { end };
    match rk4(&|tt, s: &MacroState| dynamics.rates(tt, s), state, t, dt, t_last) {
        Ok(next) => Ok(next),
        Err(Error::StepRejected { .. }) if depth < MAX_HALVINGS => {
            let half = 0.5 * dt;
            let mid = advance(dynamics, state, t, half, false, depth + 1, budget)?;
            advance(dynamics, &mid, t + half, dt - half, ends_on_jump, depth + 1, budget)
        }
        Err(e) => Err((t, e)),
    }
}

/// Integrate from `t0` to `t1` with base step `dt`, keeping every
/// `sample_every`-th grid point and both endpoints.
pub fn integrate(
    dynamics: &dyn Dynamics,
    initial: &MacroState,
    t0: f64,
    t1: f64,
    dt: f64,
    sample_every: usize,
) -> Result<Trajectory> {
    if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
        return Err(Error::Precondition(format!("need t1 > t0, got [{t0}, {t1}]")));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Precondition(format!("dt must be positive, got {dt}")));
    }
    if sample_every == 0 {
        return Err(Error::Precondition("sample_every must be at least 1".into()));
    }
    initial.check()?;

    let span = t1 - t0;
    let mut n_steps = (span / dt).round() as usize;
    if t0 + n_steps as f64 * dt < t1 - 1e-9 * dt {
        n_steps += 1;
    }
    let n_steps = n_steps.max(1);
    let grid = |k: usize| if k >= n_steps { t1 } else { t0 + k as f64 * dt };

    let mut breaks: Vec<f64> = dynamics
        .breakpoints()
        .into_iter()
        .filter(|b| b.is_finite() && *b > t0 && *b < t1)
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut next_break = 0;

    let mut traj = Trajectory::with_capacity(n_steps / sample_every + 2);
    traj.record(dynamics, t0, *initial)?;
    let mut state = *initial;

    for k in 0..n_steps {
        let (ta, tb) = (grid(k), grid(k + 1));
        let mut t = ta;
        while next_break < breaks.len() && breaks[next_break] <= ta {
            next_break += 1;
        }
        // Split at breakpoints strictly inside the step.
        while next_break < breaks.len() && breaks[next_break] < tb {
            let b = breaks[next_break];
            state = run_piece(dynamics, &state, t, b - t, true, &traj)?;
            t = b;
            next_break += 1;
        }
        let ends_on_jump = breaks.binary_search_by(|b| b.total_cmp(&tb)).is_ok();
        state = run_piece(dynamics, &state, t, tb - t, ends_on_jump, &traj)?;
        if (k + 1) % sample_every == 0 || k + 1 == n_steps {
            traj.record(dynamics, tb, state)?;
        }
    }
    Ok(traj)
}

fn run_piece(
    dynamics: &dyn Dynamics,
    state: &MacroState,
    t: f64,
    h: f64,
    ends_on_jump: bool,
    traj: &Trajectory,
) -> Result<MacroState> {
    if h <= 0.0 {
        return Ok(*state);
    }
    let mut budget = MAX_SUBSTEPS;
    advance(dynamics, state, t, h, ends_on_jump, 0, &mut budget).map_err(|(t_fail, e)| match e {
        Error::StepRejected { .. } => Error::TrajectoryTruncated {
            t: t_fail,
            halvings: MAX_HALVINGS,
            partial: Box::new(traj.clone()),
        },
        other => other,
    })
}
