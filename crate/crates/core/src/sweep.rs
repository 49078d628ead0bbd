//! Seeded random draws of adjustment speeds and demand slopes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::demand::{AffineDemand, DemandSpec};
use crate::error::Result;
use crate::models::{ModelKind, TmiaParams, TmiiaParams};
use crate::scenario::{short_run_signs, ScenarioSpec, SignTuple};
use crate::stability::{classify_stability, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub draws: usize,
    pub seed: u64,
    pub ranges: SweepRanges,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            draws: 1000,
            seed: 42,
            ranges: SweepRanges::default(),
        }
    }
}

/// Closed intervals `[lo, hi]` sampled uniformly. The speed ranges apply to
/// the primed and unprimed coefficients alike. Demand slopes are drawn only
/// for affine demand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepRanges {
    #[serde(rename = "A")]
    pub a: [f64; 2],
    #[serde(rename = "B")]
    pub b: [f64; 2],
    #[serde(rename = "C")]
    pub c: [f64; 2],
    #[serde(rename = "D1")]
    pub d1: [f64; 2],
    #[serde(rename = "D2")]
    pub d2: [f64; 2],
    #[serde(rename = "e_Y")]
    pub e_y: [f64; 2],
    #[serde(rename = "e_Ystar")]
    pub e_ystar: [f64; 2],
    pub e_p: [f64; 2],
    pub e_x: [f64; 2],
    pub e_r: [f64; 2],
}

impl Default for SweepRanges {
    fn default() -> Self {
        Self {
            a: [0.05, 2.0],
            b: [0.05, 2.0],
            c: [0.05, 2.0],
            d1: [0.05, 2.0],
            d2: [0.05, 2.0],
            e_y: [0.05, 0.95],
            e_ystar: [0.05, 1.0],
            e_p: [-1.0, -0.01],
            e_x: [0.01, 2.0],
            e_r: [-2.0, -0.01],
        }
    }
}

impl SweepRanges {
    fn named(&self) -> [(&'static str, [f64; 2]); 10] {
        [
            ("A", self.a),
            ("B", self.b),
            ("C", self.c),
            ("D1", self.d1),
            ("D2", self.d2),
            ("e_Y", self.e_y),
            ("e_Ystar", self.e_ystar),
            ("e_p", self.e_p),
            ("e_x", self.e_x),
            ("e_r", self.e_r),
        ]
    }

    /// Every range must be finite with `lo <= hi`; speeds must stay positive
    /// and slopes must keep their required signs.
    pub fn validate(&self) -> std::result::Result<(), (&'static str, String)> {
        for (name, [lo, hi]) in self.named() {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err((name, format!("need finite lo <= hi, got [{lo}, {hi}]")));
            }
        }
        for (name, [lo, _]) in &self.named()[..5] {
            if *lo <= 0.0 {
                return Err((name, "speeds must be positive".into()));
            }
        }
        let signed = [
            ("e_Y", self.e_y[0] >= 0.0 && self.e_y[1] < 1.0),
            ("e_p", self.e_p[1] < 0.0),
            ("e_x", self.e_x[0] > 0.0),
            ("e_r", self.e_r[1] < 0.0),
        ];
        match signed.iter().find(|(_, ok)| !ok) {
            Some((name, _)) => Err((name, "range leaves the admissible sign region".into())),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrawOutcome {
    pub index: usize,
    pub model: ModelKind,
    pub speeds: [f64; 5],
    pub demand: DemandSpec,
    pub verdict: Option<Verdict>,
    pub max_real_part: Option<f64>,
    pub reduced_verdict: Option<Verdict>,
    pub reduced_max_real_part: Option<f64>,
    pub routh_hurwitz: Option<bool>,
    pub reduced_routh_hurwitz: Option<bool>,
    pub model_condition: Option<bool>,
    pub tobin_condition: Option<bool>,
    pub fd_max_abs_error: Option<f64>,
    pub short_run_signs: Option<SignTuple>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn uniform(rng: &mut ChaCha8Rng, [lo, hi]: [f64; 2]) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

/// One parameter set per draw and model; draws are independent of which
/// models are requested so a TMIA-only sweep reproduces the TMIA half of a
/// `both` sweep.
pub fn draw_scenarios(spec: &ScenarioSpec, config: &SweepConfig) -> Vec<(usize, ScenarioSpec)> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let r = &config.ranges;
    (0..config.draws)
        .map(|i| {
            let mut s = spec.clone();
            let mut speeds = || {
                [
                    uniform(&mut rng, r.a),
                    uniform(&mut rng, r.b),
                    uniform(&mut rng, r.c),
                    uniform(&mut rng, r.d1),
                    uniform(&mut rng, r.d2),
                ]
            };
            let [a, b, c, d1, d2] = speeds();
            s.tmia = TmiaParams {
                a,
                b,
                c_exp: c,
                d1,
                d2,
                ..spec.tmia
            };
            let [a, b, c, d1, d2] = speeds();
            s.tmiia = TmiiaParams {
                a,
                b,
                c,
                d1,
                d2,
                ..spec.tmiia
            };
            let slopes = [
                uniform(&mut rng, r.e_y),
                uniform(&mut rng, r.e_ystar),
                uniform(&mut rng, r.e_p),
                uniform(&mut rng, r.e_x),
                uniform(&mut rng, r.e_r),
            ];
            if let DemandSpec::Affine(d) = &spec.demand {
                s.demand = DemandSpec::Affine(AffineDemand {
                    e_y: slopes[0],
                    e_ystar: slopes[1],
                    e_p: slopes[2],
                    e_x: slopes[3],
                    e_r: slopes[4],
                    ..*d
                });
            }
            (i, s)
        })
        .collect()
}

fn speeds_of(spec: &ScenarioSpec, kind: ModelKind) -> [f64; 5] {
    match kind {
        ModelKind::Tmia => {
            let p = spec.tmia;
            [p.a, p.b, p.c_exp, p.d1, p.d2]
        }
        ModelKind::Tmiia => {
            let p = spec.tmiia;
            [p.a, p.b, p.c, p.d1, p.d2]
        }
    }
}

/// Classify one drawn scenario. Numerical failures are recorded in the
/// outcome rather than aborting the sweep.
pub fn evaluate_draw(index: usize, spec: &ScenarioSpec, kind: ModelKind) -> DrawOutcome {
    let mut out = DrawOutcome {
        index,
        model: kind,
        speeds: speeds_of(spec, kind),
        demand: spec.demand,
        verdict: None,
        max_real_part: None,
        reduced_verdict: None,
        reduced_max_real_part: None,
        routh_hurwitz: None,
        reduced_routh_hurwitz: None,
        model_condition: None,
        tobin_condition: None,
        fd_max_abs_error: None,
        short_run_signs: None,
        error: None,
    };
    let result = (|| -> Result<()> {
        let model = spec.model(kind);
        let path = spec.exogenous_path();
        let before = path.before(0.0)?;
        let report = classify_stability(&model, &spec.demand, &before, spec.r_star)?;
        out.verdict = Some(report.verdict);
        out.max_real_part = Some(report.max_real_part);
        out.reduced_verdict = Some(report.reduced.verdict);
        out.reduced_max_real_part = Some(report.reduced.max_real_part);
        out.routh_hurwitz = Some(report.routh_hurwitz.stable);
        out.reduced_routh_hurwitz = Some(report.reduced.routh_hurwitz.stable);
        out.model_condition = Some(report.necessary.model_condition());
        out.tobin_condition = Some(report.necessary.tobin_condition);
        out.fd_max_abs_error = Some(report.fd_max_abs_error);
        out.short_run_signs = Some(short_run_signs(&model, &spec.demand, &report.equilibrium, &path.at(0.0)?)?);
        Ok(())
    })();
    if let Err(e) = result {
        out.error = Some(e.to_string());
    }
    out
}

pub fn run_sweep(spec: &ScenarioSpec, config: &SweepConfig) -> Vec<DrawOutcome> {
    let kinds = spec.models.kinds();
    draw_scenarios(spec, config)
        .iter()
        .flat_map(|(i, s)| kinds.iter().map(move |k| evaluate_draw(*i, s, *k)))
        .collect()
}
