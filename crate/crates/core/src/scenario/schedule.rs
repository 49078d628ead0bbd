use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Time path of an exogenous level on `[0, ∞)`.
///
/// Jumps are right-continuous: at a breakpoint the new level already applies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Schedule {
    Constant {
        value: f64,
    },
    Step {
        #[serde(default)]
        t0: f64,
        from: f64,
        to: f64,
    },
    /// `from` until `t0`, linear to `to` at `t1`, `to` afterwards.
    Ramp {
        #[serde(default)]
        t0: f64,
        t1: f64,
        from: f64,
        to: f64,
    },
    Piecewise {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
        /// Level before the first breakpoint; defaults to the first value.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        before: Option<f64>,
    },
}

impl Schedule {
    pub fn constant(value: f64) -> Self {
        Schedule::Constant { value }
    }

    pub fn step(t0: f64, from: f64, to: f64) -> Self {
        Schedule::Step { t0, from, to }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        let bad = |reason: String| Error::InvalidParameter {
            field: name.to_string(),
            reason,
        };
        let finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(bad(format!("{what} must be finite")))
            }
        };
        match self {
            Schedule::Constant { value } => finite(*value, "value"),
            Schedule::Step { t0, from, to } => {
                finite(*t0, "t0")?;
                finite(*from, "from")?;
                finite(*to, "to")?;
                if *t0 < 0.0 {
                    return Err(bad(format!("t0 must be >= 0, got {t0}")));
                }
                Ok(())
            }
            Schedule::Ramp { t0, t1, from, to } => {
                for (v, w) in [(t0, "t0"), (t1, "t1"), (from, "from"), (to, "to")] {
                    finite(*v, w)?;
                }
                if *t0 < 0.0 || t1 <= t0 {
                    return Err(bad(format!("ramp needs 0 <= t0 < t1, got [{t0}, {t1}]")));
                }
                Ok(())
            }
            Schedule::Piecewise {
                breakpoints,
                values,
                before,
            } => {
                if breakpoints.is_empty() || breakpoints.len() != values.len() {
                    return Err(bad("breakpoints and values must be non-empty and equally long".into()));
                }
                if breakpoints.iter().chain(values).chain(before).any(|v| !v.is_finite()) {
                    return Err(bad("entries must be finite".into()));
                }
                if breakpoints[0] < 0.0 || breakpoints.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(bad("breakpoints must be >= 0 and strictly increasing".into()));
                }
                Ok(())
            }
        }
    }

    /// Level at `t` (right-continuous).
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::Domain(format!("schedule evaluated outside [0, inf): t = {t}")));
        }
        Ok(self.level(t, false))
    }

    /// Limit from the left at `t`; at `t = 0` this is the level in force
    /// before the run starts.
    pub fn left_limit(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::Domain(format!("schedule evaluated outside [0, inf): t = {t}")));
        }
        Ok(self.level(t, true))
    }

    fn level(&self, t: f64, left: bool) -> f64 {
        let after = |b: f64| if left { t > b } else { t >= b };
        match self {
            Schedule::Constant { value } => *value,
            Schedule::Step { t0, from, to } => {
                if after(*t0) {
                    *to
                } else {
                    *from
                }
            }
            Schedule::Ramp { t0, t1, from, to } => {
                if t <= *t0 {
                    *from
                } else if t >= *t1 {
                    *to
                } else {
                    from + (to - from) * (t - t0) / (t1 - t0)
                }
            }
            Schedule::Piecewise {
                breakpoints,
                values,
                before,
            } => match breakpoints.iter().rposition(|&b| after(b)) {
                Some(i) => values[i],
                None => before.unwrap_or(values[0]),
            },
        }
    }

    /// Times where the level jumps or its slope changes.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Schedule::Constant { .. } => Vec::new(),
            Schedule::Step { t0, .. } => vec![*t0],
            Schedule::Ramp { t0, t1, .. } => vec![*t0, *t1],
            Schedule::Piecewise { breakpoints, .. } => breakpoints.clone(),
        }
    }

    /// The same path with every level moved by `delta`.
    pub fn shifted(&self, delta: f64) -> Schedule {
        match self {
            Schedule::Constant { value } => Schedule::Constant { value: value + delta },
            Schedule::Step { t0, from, to } => Schedule::Step {
                t0: *t0,
                from: from + delta,
                to: to + delta,
            },
            Schedule::Ramp { t0, t1, from, to } => Schedule::Ramp {
                t0: *t0,
                t1: *t1,
                from: from + delta,
                to: to + delta,
            },
            Schedule::Piecewise {
                breakpoints,
                values,
                before,
            } => Schedule::Piecewise {
                breakpoints: breakpoints.clone(),
                values: values.iter().map(|v| v + delta).collect(),
                before: before.map(|b| b + delta),
            },
        }
    }

    /// Smallest level taken anywhere on `[0, ∞)`.
    pub fn min_level(&self) -> f64 {
        match self {
            Schedule::Constant { value } => *value,
            Schedule::Step { from, to, .. } | Schedule::Ramp { from, to, .. } => from.min(*to),
            Schedule::Piecewise { values, before, .. } => values
                .iter()
                .chain(before)
                .copied()
                .fold(f64::INFINITY, f64::min),
        }
    }
}

pub fn eval_schedule(s: &Schedule, t: f64) -> Result<f64> {
    s.eval(t)
}
