//! Vector fields of the two adjustment models and their rest points.
//!
//! TMIA adjusts quantities: output chases demand, prices follow the output
//! gap. TMIIA adjusts prices: output chases potential, prices follow excess
//! demand. Both close the system with a rate rule driven by the output gap
//! and expected inflation, with an additive easing term `mu`.

use serde::{Deserialize, Serialize};

use crate::demand::{DemandInputs, DemandSpec};
use crate::error::{ensure_finite, Error, Result};

/// Endogenous state `(Y, p, x, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacroState {
    #[serde(rename = "Y")]
    pub y: f64,
    pub p: f64,
    pub x: f64,
    pub r: f64,
}

impl MacroState {
    pub fn new(y: f64, p: f64, x: f64, r: f64) -> Self {
        Self { y, p, x, r }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.y, self.p, self.x, self.r]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn is_admissible(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite()) && self.y > 0.0 && self.p > 0.0
    }

    pub fn check(&self) -> Result<()> {
        for (name, v) in [("Y", self.y), ("p", self.p), ("x", self.x), ("r", self.r)] {
            ensure_finite(name, v)?;
        }
        if self.y <= 0.0 || self.p <= 0.0 {
            return Err(Error::Domain(format!(
                "state requires Y > 0 and p > 0, got Y = {}, p = {}",
                self.y, self.p
            )));
        }
        Ok(())
    }
}

/// Time derivative of a [`MacroState`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Rates {
    pub dy: f64,
    pub dp: f64,
    pub dx: f64,
    pub dr: f64,
}

impl Rates {
    pub fn to_array(self) -> [f64; 4] {
        [self.dy, self.dp, self.dx, self.dr]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self {
            dy: a[0],
            dp: a[1],
            dx: a[2],
            dr: a[3],
        }
    }

    pub fn inf_norm(&self) -> f64 {
        self.to_array().iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Exogenous levels at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExogenousPoint {
    #[serde(rename = "Ystar")]
    pub y_star: f64,
    #[serde(rename = "G")]
    pub g: f64,
    /// Additive monetary easing in the rate law; positive values lower `r`.
    pub mu: f64,
}

impl ExogenousPoint {
    fn check(&self) -> Result<()> {
        ensure_finite("Ystar", self.y_star)?;
        ensure_finite("G", self.g)?;
        ensure_finite("mu", self.mu)?;
        if self.y_star <= 0.0 {
            return Err(Error::Domain(format!("Ystar must be positive, got {}", self.y_star)));
        }
        Ok(())
    }

    fn demand_inputs(&self, s: &MacroState) -> DemandInputs {
        DemandInputs {
            y: s.y,
            y_star: self.y_star,
            p: s.p,
            x: s.x,
            r: s.r,
            g: self.g,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "TMIA")]
    Tmia,
    #[serde(rename = "TMIIA")]
    Tmiia,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Tmia => "TMIA",
            ModelKind::Tmiia => "TMIIA",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Quantity-adjustment speeds. `c_exp` is the gain of adaptive expectations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TmiaParams {
    pub a: f64,
    pub b: f64,
    pub c_exp: f64,
    pub d1: f64,
    pub d2: f64,
    /// Inflation target in the rate law; rest points need it to be zero.
    #[serde(default)]
    pub pi_target: f64,
}

impl Default for TmiaParams {
    fn default() -> Self {
        Self {
            a: 0.8,
            b: 0.5,
            c_exp: 0.3,
            d1: 0.5,
            d2: 0.5,
            pi_target: 0.0,
        }
    }
}

/// Price-adjustment speeds (the primed coefficients).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TmiiaParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d1: f64,
    pub d2: f64,
    #[serde(default)]
    pub pi_target: f64,
}

impl Default for TmiiaParams {
    fn default() -> Self {
        Self {
            a: 0.8,
            b: 0.5,
            c: 0.3,
            d1: 0.5,
            d2: 0.5,
            pi_target: 0.0,
        }
    }
}

fn check_speeds(prefix: &str, named: [(&str, f64); 5], pi_target: f64) -> Result<()> {
    for (name, v) in named {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidParameter {
                field: format!("{prefix}{name}"),
                reason: format!("must be positive and finite, got {v}"),
            });
        }
    }
    if !pi_target.is_finite() {
        return Err(Error::InvalidParameter {
            field: format!("{prefix}pi0"),
            reason: "must be finite".into(),
        });
    }
    Ok(())
}

impl TmiaParams {
    pub fn validate(&self) -> Result<()> {
        check_speeds(
            "params.",
            [("A", self.a), ("B", self.b), ("C", self.c_exp), ("D1", self.d1), ("D2", self.d2)],
            self.pi_target,
        )
    }
}

impl TmiiaParams {
    pub fn validate(&self) -> Result<()> {
        check_speeds(
            "params.",
            [("A'", self.a), ("B'", self.b), ("C'", self.c), ("D1'", self.d1), ("D2'", self.d2)],
            self.pi_target,
        )
    }
}

/// A model together with its adjustment speeds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", content = "params")]
pub enum Model {
    #[serde(rename = "TMIA")]
    Tmia(TmiaParams),
    #[serde(rename = "TMIIA")]
    Tmiia(TmiiaParams),
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Tmia(_) => ModelKind::Tmia,
            Model::Tmiia(_) => ModelKind::Tmiia,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Model::Tmia(p) => p.validate(),
            Model::Tmiia(p) => p.validate(),
        }
    }

    /// Gain of the adaptive-expectations equation (`C` or `C'`).
    pub fn expectations_gain(&self) -> f64 {
        match self {
            Model::Tmia(p) => p.c_exp,
            Model::Tmiia(p) => p.c,
        }
    }

    pub fn field(&self, state: &MacroState, demand: &DemandSpec, exog: &ExogenousPoint) -> Result<Rates> {
        match self {
            Model::Tmia(p) => tmia_field(state, p, demand, exog),
            Model::Tmiia(p) => tmiia_field(state, p, demand, exog),
        }
    }

    pub fn inflation_rate(&self, state: &MacroState, demand: &DemandSpec, exog: &ExogenousPoint) -> Result<f64> {
        inflation_rate(self, state, demand, exog)
    }
}

/// Quantity adjustment:
///
/// ```text
/// dY = A (E - Y)
/// dp = p B (Y - Y*) + p x
/// dx = B C (Y - Y*)
/// dr = (D1 + D2 B)(Y - Y*) + D2 (x - pi0) - mu
/// ```
pub fn tmia_field(
    state: &MacroState,
    params: &TmiaParams,
    demand: &DemandSpec,
    exog: &ExogenousPoint,
) -> Result<Rates> {
    exog.check()?;
    let e = demand.eval(&exog.demand_inputs(state))?;
    let gap = state.y - exog.y_star;
    let TmiaParams { a, b, c_exp, d1, d2, pi_target } = *params;
    Ok(Rates {
        dy: a * (e - state.y),
        dp: state.p * b * gap + state.p * state.x,
        dx: b * c_exp * gap,
        dr: (d1 + d2 * b) * gap + d2 * (state.x - pi_target) - exog.mu,
    })
}

/// Price adjustment:
///
/// ```text
/// dY = A' (Y* - Y)
/// dp = p B' (E - Y) + p x
/// dx = B' C' (E - Y)
/// dr = D1' (Y - Y*) + D2' (x - pi0) - mu
/// ```
pub fn tmiia_field(
    state: &MacroState,
    params: &TmiiaParams,
    demand: &DemandSpec,
    exog: &ExogenousPoint,
) -> Result<Rates> {
    exog.check()?;
    let e = demand.eval(&exog.demand_inputs(state))?;
    let excess = e - state.y;
    let TmiiaParams { a, b, c, d1, d2, pi_target } = *params;
    Ok(Rates {
        dy: a * (exog.y_star - state.y),
        dp: state.p * b * excess + state.p * state.x,
        dx: b * c * excess,
        dr: d1 * (state.y - exog.y_star) + d2 * (state.x - pi_target) - exog.mu,
    })
}

/// Realized inflation `pi`, equal to `dp / p` of the model's field.
pub fn inflation_rate(
    model: &Model,
    state: &MacroState,
    demand: &DemandSpec,
    exog: &ExogenousPoint,
) -> Result<f64> {
    exog.check()?;
    Ok(match model {
        Model::Tmia(p) => p.b * (state.y - exog.y_star) + state.x,
        Model::Tmiia(p) => {
            let e = demand.eval(&exog.demand_inputs(state))?;
            p.b * (e - state.y) + state.x
        }
    })
}

const EQUILIBRIUM_MAX_ITER: usize = 100;
const BRACKET_MAX_EXPANSIONS: usize = 200;

/// Rest point `(Y*, p_eq, 0, r*)` where `p_eq > 0` clears demand at full employment.
///
/// The rate is not pinned by the dynamics, so `r_star` is an input. The price
/// level is found by Newton's method safeguarded with bisection on a bracket.
pub fn find_equilibrium(
    model: &Model,
    demand: &DemandSpec,
    y_star: f64,
    g: f64,
    r_star: f64,
) -> Result<MacroState> {
    model.validate()?;
    ensure_finite("Ystar", y_star)?;
    ensure_finite("G", g)?;
    ensure_finite("r_star", r_star)?;
    if y_star <= 0.0 {
        return Err(Error::Domain(format!("Ystar must be positive, got {y_star}")));
    }
    let p_eq = solve_clearing_price(demand, y_star, g, r_star)?;
    Ok(MacroState::new(y_star, p_eq, 0.0, r_star))
}

fn solve_clearing_price(demand: &DemandSpec, y_star: f64, g: f64, r_star: f64) -> Result<f64> {
    let inputs = |p: f64| DemandInputs {
        y: y_star,
        y_star,
        p,
        x: 0.0,
        r: r_star,
        g,
    };
    let excess = |p: f64| -> Result<(f64, f64)> {
        let i = inputs(p);
        Ok((demand.eval(&i)? - y_star, demand.partials(&i)?.d_p))
    };
    let tol = 1e-10 * y_star;

    let p_start = demand.reference().p0;
    let p_start = if p_start.is_finite() && p_start > 0.0 { p_start } else { 1.0 };
    let (h0, slope0) = excess(p_start)?;
    if h0 == 0.0 {
        return Ok(p_start);
    }
    if slope0 == 0.0 || !slope0.is_finite() {
        return Err(Error::NoPositiveRoot { y_star });
    }

    // Walk geometrically toward the Newton direction until the sign flips.
    let upward = -h0 / slope0 > 0.0;
    let factor = if upward { 2.0 } else { 0.5 };
    let (mut a, mut ha) = (p_start, h0);
    let mut bracket = None;
    for _ in 0..BRACKET_MAX_EXPANSIONS {
        let b = a * factor;
        let (hb, _) = excess(b)?;
        if hb == 0.0 {
            return Ok(b);
        }
        if hb.signum() != ha.signum() {
            bracket = Some(if upward { (a, ha, b) } else { (b, hb, a) });
            break;
        }
        a = b;
        ha = hb;
    }
    let Some((mut lo, h_lo, mut hi)) = bracket else {
        return Err(Error::NoPositiveRoot { y_star });
    };
    let lo_sign = h_lo.signum();

    let mut p = if upward { lo } else { hi };
    let mut best = (f64::INFINITY, p);
    for _ in 0..EQUILIBRIUM_MAX_ITER {
        let (h, slope) = excess(p)?;
        if h.abs() < best.0 {
            best = (h.abs(), p);
        }
        if h.abs() <= tol {
            return Ok(polish(p, h, &excess));
        }
        if h.signum() == lo_sign {
            lo = p;
        } else {
            hi = p;
        }
        let newton = p - h / slope;
        p = if slope != 0.0 && newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::NoConvergence {
        what: "equilibrium price solver",
        iterations: EQUILIBRIUM_MAX_ITER,
        residual: best.0,
    })
}

// A few extra Newton steps so that the field vanishes to rounding, not just
// to the acceptance tolerance.
fn polish(mut p: f64, mut h: f64, excess: &impl Fn(f64) -> Result<(f64, f64)>) -> f64 {
    for _ in 0..3 {
        let Ok((_, slope)) = excess(p) else { break };
        if slope == 0.0 || h == 0.0 {
            break;
        }
        let next = p - h / slope;
        match excess(next) {
            Ok((hn, _)) if next > 0.0 && hn.abs() < h.abs() => {
                p = next;
                h = hn;
            }
            _ => break,
        }
    }
    p
}
