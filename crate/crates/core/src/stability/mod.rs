//! Local stability of the rest points.
//!
//! The analytic Jacobian of each model is cross-checked against central
//! differences, its characteristic polynomial is built by Faddeev-LeVerrier,
//! and the eigenvalues come from Durand-Kerner on that polynomial. The
//! Routh-Hurwitz verdict on the same coefficients is reported alongside.
//!
//! In both models the `p` and `r` columns of the Jacobian are proportional
//! (they only act through `E`), so one eigenvalue is always zero: the rate is
//! not pinned at a rest point and the rest points form a continuum. The
//! full 4x4 verdict is therefore at best `Marginal`. [`ReducedStability`]
//! repeats the analysis on the cubic left after removing that zero root,
//! which decides whether trajectories settle onto the continuum.

pub mod poly;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::demand::{DemandInputs, DemandPartials, DemandSpec};
use crate::error::{Error, Result};
use crate::models::{find_equilibrium, ExogenousPoint, MacroState, Model, ModelKind, Rates};

pub use poly::{
    characteristic_polynomial, monic_roots, polynomial_roots, routh_hurwitz, routh_hurwitz_cubic,
    CharPoly, HurwitzVerdict,
};

/// Real parts within this band of zero are `Marginal`.
pub const MARGINAL_TOL: f64 = 1e-8;
/// Relative tolerance on the field when accepting a base point as a rest point.
pub const EQUILIBRIUM_TOL: f64 = 1e-9;
pub const FD_STEP: f64 = 1e-6;

/// 4x4 matrix with rows and columns ordered `(Y, p, x, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jacobian4(pub [[f64; 4]; 4]);

impl Jacobian4 {
    pub fn max_abs_diff(&self, other: &Jacobian4) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..4 {
            for j in 0..4 {
                m = m.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Stable,
    Unstable,
    Marginal,
}

impl Verdict {
    pub fn from_max_real_part(max_re: f64) -> Self {
        if max_re < -MARGINAL_TOL {
            Verdict::Stable
        } else if max_re > MARGINAL_TOL {
            Verdict::Unstable
        } else {
            Verdict::Marginal
        }
    }
}

pub fn analytic_jacobian(
    model: &Model,
    demand: &DemandSpec,
    equilibrium: &MacroState,
    exog: &ExogenousPoint,
) -> Result<Jacobian4> {
    equilibrium.check()?;
    let residual = model.field(equilibrium, demand, exog)?.inf_norm();
    if residual > EQUILIBRIUM_TOL * equilibrium.y.abs().max(1.0) {
        return Err(Error::NotEquilibrium { residual });
    }
    let d = demand.partials(&DemandInputs {
        y: equilibrium.y,
        y_star: exog.y_star,
        p: equilibrium.p,
        x: equilibrium.x,
        r: equilibrium.r,
        g: exog.g,
    })?;
    let p = equilibrium.p;
    Ok(Jacobian4(match model {
        Model::Tmia(k) => [
            [k.a * (d.d_y - 1.0), k.a * d.d_p, k.a * d.d_x, k.a * d.d_r],
            [p * k.b, 0.0, p, 0.0],
            [k.b * k.c_exp, 0.0, 0.0, 0.0],
            [k.d1 + k.d2 * k.b, 0.0, k.d2, 0.0],
        ],
        Model::Tmiia(k) => {
            let pb = p * k.b;
            let cb = k.c * k.b;
            [
                [-k.a, 0.0, 0.0, 0.0],
                [pb * (d.d_y - 1.0), pb * d.d_p, pb * d.d_x + p, pb * d.d_r],
                [cb * (d.d_y - 1.0), cb * d.d_p, cb * d.d_x, cb * d.d_r],
                [k.d1, 0.0, k.d2, 0.0],
            ]
        }
    }))
}

/// Central differences, one column per state component.
pub fn finite_difference_jacobian<F>(field: F, base: &MacroState, h: f64) -> Result<Jacobian4>
where
    F: Fn(&MacroState) -> Result<Rates>,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Precondition(format!("step must be positive, got {h}")));
    }
    base.check()?;
    if base.y - h <= 0.0 || base.p - h <= 0.0 {
        return Err(Error::Domain(format!(
            "step {h} would leave the admissible region at Y = {}, p = {}",
            base.y, base.p
        )));
    }
    let mut jac = [[0.0; 4]; 4];
    let s = base.to_array();
    for j in 0..4 {
        let mut plus = s;
        let mut minus = s;
        plus[j] += h;
        minus[j] -= h;
        let fp = field(&MacroState::from_array(plus))?.to_array();
        let fm = field(&MacroState::from_array(minus))?.to_array();
        for i in 0..4 {
            jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok(Jacobian4(jac))
}

/// Necessary conditions for local stability, as closed-form inequalities on
/// the demand partials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NecessaryConditions {
    /// TMIA: `-p B E_p - (D1 + D2 B) E_r > B C E_x`. Equivalent to `c2 > 0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tmia_condition: Option<bool>,
    /// TMIIA: `-p E_p > C' E_x`. Equivalent to a negative trace of the
    /// `(p, x, r)` block.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tmiia_condition: Option<bool>,
    /// Tobin's original two-equation condition `p E_p + C E_x < 0`.
    pub tobin_condition: bool,
}

impl NecessaryConditions {
    /// The condition belonging to the model that produced this record.
    pub fn model_condition(&self) -> bool {
        self.tmia_condition
            .or(self.tmiia_condition)
            .expect("one model condition is always set")
    }
}

pub fn check_necessary_conditions(
    model: &Model,
    partials: &DemandPartials,
    p_star: f64,
) -> Result<NecessaryConditions> {
    if !(p_star > 0.0 && p_star.is_finite()) {
        return Err(Error::Domain(format!("p_star must be positive, got {p_star}")));
    }
    let d = partials;
    let tobin_condition = p_star * d.d_p + model.expectations_gain() * d.d_x < 0.0;
    Ok(match model {
        Model::Tmia(k) => NecessaryConditions {
            tmia_condition: Some(
                -p_star * k.b * d.d_p - (k.d1 + k.d2 * k.b) * d.d_r > k.b * k.c_exp * d.d_x,
            ),
            tmiia_condition: None,
            tobin_condition,
        },
        Model::Tmiia(k) => NecessaryConditions {
            tmia_condition: None,
            tmiia_condition: Some(-p_star * d.d_p > k.c * d.d_x),
            tobin_condition,
        },
    })
}

/// Stability after removing the structural zero eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedStability {
    /// Ascending coefficients of `det(λI - J) / λ`.
    pub cubic: [f64; 4],
    pub eigenvalues: Vec<Complex64>,
    pub max_real_part: f64,
    pub verdict: Verdict,
    pub routh_hurwitz: HurwitzVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub model: ModelKind,
    pub equilibrium: MacroState,
    pub exogenous: ExogenousPoint,
    pub partials: DemandPartials,
    pub jacobian: Jacobian4,
    pub fd_max_abs_error: f64,
    pub charpoly: CharPoly,
    pub eigenvalues: [Complex64; 4],
    pub max_real_part: f64,
    pub verdict: Verdict,
    pub routh_hurwitz: HurwitzVerdict,
    pub necessary: NecessaryConditions,
    pub reduced: ReducedStability,
}

pub fn max_real_part(roots: &[Complex64]) -> f64 {
    roots.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

/// Full pipeline at the rest point `(Y*, p_eq, 0, r_star)` for the given
/// exogenous levels.
pub fn classify_stability(
    model: &Model,
    demand: &DemandSpec,
    exog: &ExogenousPoint,
    r_star: f64,
) -> Result<StabilityReport> {
    let equilibrium = find_equilibrium(model, demand, exog.y_star, exog.g, r_star)?;
    let jacobian = analytic_jacobian(model, demand, &equilibrium, exog)?;
    let fd = finite_difference_jacobian(|s| model.field(s, demand, exog), &equilibrium, FD_STEP)?;
    let partials = demand.partials(&DemandInputs {
        y: equilibrium.y,
        y_star: exog.y_star,
        p: equilibrium.p,
        x: equilibrium.x,
        r: equilibrium.r,
        g: exog.g,
    })?;

    let charpoly = characteristic_polynomial(&jacobian.0);
    let eigenvalues = polynomial_roots(&charpoly)?;
    let max_re = max_real_part(&eigenvalues);

    let cubic = charpoly.deflate_zero_root();
    let reduced_roots = monic_roots(&cubic)?;
    let reduced_max = max_real_part(&reduced_roots);

    Ok(StabilityReport {
        model: model.kind(),
        equilibrium,
        exogenous: *exog,
        partials,
        fd_max_abs_error: jacobian.max_abs_diff(&fd),
        jacobian,
        charpoly,
        eigenvalues,
        max_real_part: max_re,
        verdict: Verdict::from_max_real_part(max_re),
        routh_hurwitz: routh_hurwitz(&charpoly),
        necessary: check_necessary_conditions(model, &partials, equilibrium.p)?,
        reduced: ReducedStability {
            cubic,
            max_real_part: reduced_max,
            verdict: Verdict::from_max_real_part(reduced_max),
            routh_hurwitz: routh_hurwitz_cubic(&cubic),
            eigenvalues: reduced_roots,
        },
    })
}
