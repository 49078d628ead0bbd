//! Aggregate effective demand `E(Y, Y*, p, x, r, G)`.
//!
//! Two concrete forms are provided. [`AffineDemand`] is linear in deviations
//! from a [`ReferencePoint`], so its gradient is constant. [`StructuralDemand`]
//! routes the price level through real wealth `W = M/p + qK`, which makes
//! `dE/dp = -wealth_coef * M / p^2` state dependent.
//!
//! Both forms return exactly `Y_star0` at their reference point.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// The full-employment rest point that a demand specification is calibrated to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferencePoint {
    pub y_star0: f64,
    pub p0: f64,
    pub r0: f64,
    pub g0: f64,
}

impl Default for ReferencePoint {
    fn default() -> Self {
        Self {
            y_star0: 100.0,
            p0: 1.0,
            r0: 0.02,
            g0: 20.0,
        }
    }
}

/// Arguments of the demand function at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemandInputs {
    pub y: f64,
    pub y_star: f64,
    pub p: f64,
    pub x: f64,
    pub r: f64,
    pub g: f64,
}

impl DemandInputs {
    /// The reference point itself: full employment, zero expected inflation.
    pub fn at_reference(reference: &ReferencePoint) -> Self {
        Self {
            y: reference.y_star0,
            y_star: reference.y_star0,
            p: reference.p0,
            x: 0.0,
            r: reference.r0,
            g: reference.g0,
        }
    }

    fn check(&self) -> Result<()> {
        for (name, v) in [
            ("Y", self.y),
            ("Ystar", self.y_star),
            ("p", self.p),
            ("x", self.x),
            ("r", self.r),
            ("G", self.g),
        ] {
            ensure_finite(name, v)?;
        }
        if self.p <= 0.0 {
            return Err(Error::Domain(format!("price level must be positive, got {}", self.p)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineDemand {
    pub reference: ReferencePoint,
    pub e_y: f64,
    pub e_ystar: f64,
    pub e_p: f64,
    pub e_x: f64,
    pub e_r: f64,
    pub e_g: f64,
}

impl Default for AffineDemand {
    fn default() -> Self {
        Self {
            reference: ReferencePoint::default(),
            e_y: 0.6,
            e_ystar: 0.5,
            e_p: -0.2,
            e_x: 0.1,
            e_r: -0.5,
            e_g: 1.0,
        }
    }
}

/// Consumption/investment block with an explicit wealth channel.
///
/// `E = k + c_y Y + c_ystar Y* + wealth_coef (M/p + qK) + c_x x - c_r r - c_t T + G`
/// where the constant `k` is fixed so that `E = Y_star0` at the reference point.
/// Taxes, `q` and `K` are held constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructuralDemand {
    pub reference: ReferencePoint,
    pub c_y: f64,
    pub c_ystar: f64,
    pub money: f64,
    pub wealth_coef: f64,
    pub q: f64,
    pub capital: f64,
    pub c_x: f64,
    pub c_r: f64,
    pub taxes: f64,
    pub c_t: f64,
}

impl Default for StructuralDemand {
    fn default() -> Self {
        Self {
            reference: ReferencePoint::default(),
            c_y: 0.6,
            c_ystar: 0.5,
            money: 50.0,
            wealth_coef: 0.1,
            q: 1.0,
            capital: 200.0,
            c_x: 0.1,
            c_r: 0.5,
            taxes: 20.0,
            c_t: 0.5,
        }
    }
}

impl StructuralDemand {
    pub fn real_wealth(&self, p: f64) -> f64 {
        self.money / p + self.q * self.capital
    }

    /// The additive constant `k` that pins the reference-point identity.
    pub fn calibration_constant(&self) -> f64 {
        let rf = &self.reference;
        rf.y_star0
            - (self.c_y * rf.y_star0
                + self.c_ystar * rf.y_star0
                + self.wealth_coef * self.real_wealth(rf.p0)
                - self.c_r * rf.r0
                - self.c_t * self.taxes
                + rf.g0)
    }

    fn eval(&self, i: &DemandInputs) -> f64 {
        // Written as deviations from the reference; algebraically equal to the
        // calibrated level form but exact at the reference point.
        let rf = &self.reference;
        rf.y_star0
            + self.c_y * (i.y - rf.y_star0)
            + self.c_ystar * (i.y_star - rf.y_star0)
            + self.wealth_coef * (self.money / i.p - self.money / rf.p0)
            + self.c_x * i.x
            - self.c_r * (i.r - rf.r0)
            + (i.g - rf.g0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DemandSpec {
    Affine(AffineDemand),
    Structural(StructuralDemand),
}

impl Default for DemandSpec {
    fn default() -> Self {
        DemandSpec::Affine(AffineDemand::default())
    }
}

/// Gradient of `E` with respect to each argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DemandPartials {
    pub d_y: f64,
    pub d_ystar: f64,
    pub d_p: f64,
    pub d_x: f64,
    pub d_r: f64,
    pub d_g: f64,
}

impl DemandPartials {
    pub fn as_array(&self) -> [f64; 6] {
        [self.d_y, self.d_ystar, self.d_p, self.d_x, self.d_r, self.d_g]
    }
}

impl DemandSpec {
    pub fn reference(&self) -> &ReferencePoint {
        match self {
            DemandSpec::Affine(a) => &a.reference,
            DemandSpec::Structural(s) => &s.reference,
        }
    }

    pub fn eval(&self, inputs: &DemandInputs) -> Result<f64> {
        inputs.check()?;
        Ok(match self {
            DemandSpec::Affine(a) => {
                let rf = &a.reference;
                rf.y_star0
                    + a.e_y * (inputs.y - rf.y_star0)
                    + a.e_ystar * (inputs.y_star - rf.y_star0)
                    + a.e_p * (inputs.p - rf.p0)
                    + a.e_x * inputs.x
                    + a.e_r * (inputs.r - rf.r0)
                    + a.e_g * (inputs.g - rf.g0)
            }
            DemandSpec::Structural(s) => s.eval(inputs),
        })
    }

    pub fn partials(&self, inputs: &DemandInputs) -> Result<DemandPartials> {
        inputs.check()?;
        Ok(match self {
            DemandSpec::Affine(a) => DemandPartials {
                d_y: a.e_y,
                d_ystar: a.e_ystar,
                d_p: a.e_p,
                d_x: a.e_x,
                d_r: a.e_r,
                d_g: a.e_g,
            },
            DemandSpec::Structural(s) => DemandPartials {
                d_y: s.c_y,
                d_ystar: s.c_ystar,
                d_p: -s.wealth_coef * s.money / (inputs.p * inputs.p),
                d_x: s.c_x,
                d_r: -s.c_r,
                d_g: 1.0,
            },
        })
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let rf = self.reference();
        report.positive("reference.Y_star0", rf.y_star0);
        report.positive("reference.p0", rf.p0);
        report.finite("reference.r0", rf.r0);
        report.finite("reference.G0", rf.g0);
        if rf.g0.is_finite() && rf.g0 < 0.0 {
            report.violation("reference.G0", format!("must be >= 0, got {}", rf.g0));
        }
        match self {
            DemandSpec::Affine(a) => {
                report.open_unit("e_Y", a.e_y);
                report.ystar_sign("e_Ystar", a.e_ystar);
                report.negative("e_p", a.e_p);
                report.positive("e_x", a.e_x);
                report.negative("e_r", a.e_r);
                report.positive("e_G", a.e_g);
            }
            DemandSpec::Structural(s) => {
                report.open_unit("c_Y", s.c_y);
                report.ystar_sign("c_Ystar", s.c_ystar);
                report.positive("M", s.money);
                report.positive("wealth_coef", s.wealth_coef);
                report.positive("q", s.q);
                report.positive("K", s.capital);
                report.positive("c_x", s.c_x);
                report.positive("c_r", s.c_r);
                report.finite("T", s.taxes);
                report.positive("c_T", s.c_t);
            }
        }
        report
    }
}

pub fn eval_demand(spec: &DemandSpec, inputs: &DemandInputs) -> Result<f64> {
    spec.eval(inputs)
}

pub fn demand_partials(spec: &DemandSpec, inputs: &DemandInputs) -> Result<DemandPartials> {
    spec.partials(inputs)
}

pub fn validate_demand_signs(spec: &DemandSpec) -> ValidationReport {
    spec.validate()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Violation,
    /// Allowed for sensitivity runs but differs from the default sign convention.
    NonDefaultSign,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignIssue {
    pub field: String,
    pub severity: Severity,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub issues: Vec<SignIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations().next().is_none()
    }

    pub fn violations(&self) -> impl Iterator<Item = &SignIssue> {
        self.issues
            .iter()
            .filter(|i| i.severity == Severity::Violation)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &SignIssue> {
        self.issues
            .iter()
            .filter(|i| i.severity == Severity::NonDefaultSign)
    }

    fn violation(&mut self, field: &str, message: String) {
        self.issues.push(SignIssue {
            field: field.to_string(),
            severity: Severity::Violation,
            message,
        });
    }

    fn finite(&mut self, field: &str, v: f64) -> bool {
        if !v.is_finite() {
            self.violation(field, format!("must be finite, got {v}"));
            return false;
        }
        true
    }

    fn positive(&mut self, field: &str, v: f64) {
        if self.finite(field, v) && v <= 0.0 {
            self.violation(field, format!("must be > 0, got {v}"));
        }
    }

    fn negative(&mut self, field: &str, v: f64) {
        if self.finite(field, v) && v >= 0.0 {
            self.violation(field, format!("must be < 0, got {v}"));
        }
    }

    fn open_unit(&mut self, field: &str, v: f64) {
        if self.finite(field, v) && !(v > 0.0 && v < 1.0) {
            self.violation(field, format!("must lie in (0, 1), got {v}"));
        }
    }

    fn ystar_sign(&mut self, field: &str, v: f64) {
        if !self.finite(field, v) {
            return;
        }
        if v < 0.0 {
            self.issues.push(SignIssue {
                field: field.to_string(),
                severity: Severity::NonDefaultSign,
                message: format!("non-default sign: {v} < 0 (demand rises when potential output falls)"),
            });
        } else if v == 0.0 {
            self.violation(field, "must be nonzero".to_string());
        }
    }
}
