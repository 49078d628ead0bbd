use num_complex::Complex64;
use proptest::prelude::*;

use tobin_core::demand::{AffineDemand, DemandInputs, DemandSpec, StructuralDemand};
use tobin_core::models::{find_equilibrium, ExogenousPoint, MacroState, Model, ModelKind, TmiaParams, TmiiaParams};
use tobin_core::scenario::{run_model, short_run_signs, ModelChoice, PolicyPaths, ScenarioSpec, Schedule};
use tobin_core::stability::poly::{characteristic_polynomial, monic_roots, routh_hurwitz_cubic, CharPoly};
use tobin_core::stability::{analytic_jacobian, classify_stability, finite_difference_jacobian};

fn speeds() -> impl Strategy<Value = [f64; 5]> {
    [0.05..2.0, 0.05..2.0, 0.05..2.0, 0.05..2.0, 0.05..2.0]
}

fn affine() -> impl Strategy<Value = DemandSpec> {
    (0.05..0.95, 0.05..1.0, -1.0..-0.01, 0.01..2.0, -2.0..-0.01).prop_map(|(e_y, e_ystar, e_p, e_x, e_r)| {
        DemandSpec::Affine(AffineDemand {
            e_y,
            e_ystar,
            e_p,
            e_x,
            e_r,
            ..AffineDemand::default()
        })
    })
}

fn structural() -> impl Strategy<Value = DemandSpec> {
    (0.1..0.9, 0.1..0.9, 10.0..100.0, 0.01..0.3, 0.05..1.0).prop_map(|(c_y, c_ystar, money, wealth_coef, c_r)| {
        DemandSpec::Structural(StructuralDemand {
            c_y,
            c_ystar,
            money,
            wealth_coef,
            c_r,
            ..StructuralDemand::default()
        })
    })
}

fn demand() -> impl Strategy<Value = DemandSpec> {
    prop_oneof![affine(), structural()]
}

fn model() -> impl Strategy<Value = Model> {
    (speeds(), any::<bool>()).prop_map(|([a, b, c, d1, d2], tmia)| {
        if tmia {
            Model::Tmia(TmiaParams {
                a,
                b,
                c_exp: c,
                d1,
                d2,
                pi_target: 0.0,
            })
        } else {
            Model::Tmiia(TmiiaParams {
                a,
                b,
                c,
                d1,
                d2,
                pi_target: 0.0,
            })
        }
    })
}

fn inputs() -> impl Strategy<Value = DemandInputs> {
    (60.0..140.0, 60.0..140.0, 0.2..5.0, -0.5..0.5, -0.5..0.5, 0.0..60.0).prop_map(|(y, y_star, p, x, r, g)| {
        DemandInputs {
            y,
            y_star,
            p,
            x,
            r,
            g,
        }
    })
}

fn reference_exog() -> ExogenousPoint {
    ExogenousPoint {
        y_star: 100.0,
        g: 20.0,
        mu: 0.0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 128,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn demand_gradient_matches_central_differences(d in demand(), at in inputs()) {
        let g = d.partials(&at).unwrap().as_array();
        let x0 = [at.y, at.y_star, at.p, at.x, at.r, at.g];
        for i in 0..6 {
            let h = 1e-6 * x0[i].abs().max(1.0);
            let bump = |s: f64| {
                let mut x = x0;
                x[i] += s * h;
                d.eval(&DemandInputs { y: x[0], y_star: x[1], p: x[2], x: x[3], r: x[4], g: x[5] }).unwrap()
            };
            let fd = (bump(1.0) - bump(-1.0)) / (2.0 * h);
            prop_assert!((fd - g[i]).abs() <= 1e-5 * g[i].abs().max(1e-3), "partial {i}: fd {fd} vs {}", g[i]);
        }
    }

    #[test]
    fn field_vanishes_at_equilibrium(m in model(), d in affine(), y_star in 80.0..120.0) {
        let rf = *d.reference();
        // Pick G so that demand clears at p0 for this Y*; the root is then known.
        let g = if let DemandSpec::Affine(a) = &d {
            rf.g0 + (y_star - rf.y_star0) * (1.0 - a.e_y - a.e_ystar) / a.e_g
        } else {
            unreachable!()
        };
        let eq = find_equilibrium(&m, &d, y_star, g, rf.r0).unwrap();
        prop_assert!((eq.p - rf.p0).abs() < 1e-8);
        let rates = m.field(&eq, &d, &ExogenousPoint { y_star, g, mu: 0.0 }).unwrap();
        prop_assert!(rates.inf_norm() < 1e-9 * y_star.max(1.0));
    }

    #[test]
    fn structural_equilibrium_clears_demand(m in model(), d in structural(), y_star in 90.0..110.0) {
        let eq = find_equilibrium(&m, &d, y_star, 20.0, 0.02);
        if let Ok(eq) = eq {
            let e = d.eval(&DemandInputs { y: y_star, y_star, p: eq.p, x: 0.0, r: 0.02, g: 20.0 }).unwrap();
            prop_assert!((e - y_star).abs() < 1e-8 * y_star);
        }
    }

    #[test]
    fn analytic_jacobian_matches_differences(m in model(), d in demand()) {
        let exog = reference_exog();
        let eq = find_equilibrium(&m, &d, exog.y_star, exog.g, 0.02).unwrap();
        let j = analytic_jacobian(&m, &d, &eq, &exog).unwrap();
        let fd = finite_difference_jacobian(|s| m.field(s, &d, &exog), &eq, 1e-6).unwrap();
        prop_assert!(j.max_abs_diff(&fd) < 1e-5);
    }

    #[test]
    fn inflation_is_price_growth(m in model(), d in demand(), at in inputs(), mu in -0.1..0.1) {
        let s = MacroState::new(at.y, at.p, at.x, at.r);
        let exog = ExogenousPoint { y_star: at.y_star, g: at.g, mu };
        let rates = m.field(&s, &d, &exog).unwrap();
        let pi = m.inflation_rate(&s, &d, &exog).unwrap();
        prop_assert!((pi - rates.dp / s.p).abs() <= 1e-12 * (1.0 + pi.abs()));
    }

    #[test]
    fn tmiia_output_ignores_demand_and_policy(d1 in demand(), d2 in demand(), g in 10.0..30.0, mu in 0.0..0.1) {
        let base = ScenarioSpec { horizon: 3.0, ..ScenarioSpec::default_shock(ModelChoice::Tmiia) };
        let start = run_model(&base, ModelKind::Tmiia).unwrap().report.initial_state;
        let with = |d: &DemandSpec, g: f64, mu: f64| {
            let spec = ScenarioSpec {
                demand: *d,
                policy: PolicyPaths { g: Schedule::constant(g), mu: Schedule::constant(mu) },
                initial: tobin_core::scenario::InitialState::Explicit(start),
                ..base.clone()
            };
            run_model(&spec, ModelKind::Tmiia).unwrap().trajectory
        };
        let a = with(&d1, 20.0, 0.0);
        let b = with(&d2, g, mu);
        for (x, y) in a.states.iter().zip(&b.states) {
            prop_assert_eq!(x.y, y.y);
        }
    }

    #[test]
    fn shock_signs_follow_the_sign_tables(m in model(), d in affine(), drop in 1.0..30.0) {
        use tobin_core::scenario::Sign::*;
        let eq = find_equilibrium(&m, &d, 100.0, 20.0, 0.02).unwrap();
        let after = ExogenousPoint { y_star: 100.0 - drop, g: 20.0, mu: 0.0 };
        let signs = short_run_signs(&m, &d, &eq, &after).unwrap();
        let expected = match m.kind() {
            ModelKind::Tmia => [Negative, Positive, Positive, Positive],
            ModelKind::Tmiia => [Negative, Negative, Negative, Positive],
        };
        prop_assert_eq!(signs, expected);
    }

    #[test]
    fn eigenvalues_are_conjugate_closed_roots(m in model(), d in demand()) {
        let r = classify_stability(&m, &d, &reference_exog(), 0.02).unwrap();
        let poly = r.charpoly;
        for z in r.eigenvalues {
            let scale = (1.0 + z.norm()).powi(4);
            prop_assert!(poly.eval(z).norm() <= 1e-8 * scale);
            let paired = r.eigenvalues.iter().any(|w| (w - z.conj()).norm() <= 1e-9 * (1.0 + z.norm()));
            prop_assert!(paired);
        }
        // The p and r columns are proportional, so one eigenvalue is zero.
        let scale: f64 = poly.coeffs.iter().map(|c| c.abs()).sum();
        prop_assert!(poly.coeffs[0].abs() < 1e-12 * scale, "c0 = {:e}", poly.coeffs[0]);
    }

    #[test]
    fn trace_and_determinant_identities(m in model(), d in demand()) {
        let r = classify_stability(&m, &d, &reference_exog(), 0.02).unwrap();
        let j = r.jacobian.0;
        let trace: f64 = (0..4).map(|i| j[i][i]).sum();
        let sum: Complex64 = r.eigenvalues.iter().sum();
        prop_assert!((sum.re - trace).abs() < 1e-8 * (1.0 + trace.abs()));
        prop_assert!(sum.im.abs() < 1e-8);
        prop_assert!((r.charpoly.coeffs[3] + trace).abs() < 1e-12 * (1.0 + trace.abs()));
    }

    #[test]
    fn cubic_routh_hurwitz_matches_roots(c2 in -3.0..3.0, c1 in -3.0..3.0, c0 in -3.0..3.0) {
        let cubic = [c0, c1, c2, 1.0];
        let roots = monic_roots(&cubic).unwrap();
        let max_re = roots.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        prop_assume!(max_re.abs() > 1e-6);
        prop_assert_eq!(routh_hurwitz_cubic(&cubic).stable, max_re < 0.0);
    }

    #[test]
    fn characteristic_polynomial_of_triangular_matrix(diag in [-5.0..5.0, -5.0..5.0, -5.0..5.0, -5.0..5.0], up in -3.0..3.0) {
        let mut a = [[0.0; 4]; 4];
        for i in 0..4 {
            a[i][i] = diag[i];
        }
        a[0][3] = up;
        a[1][2] = -up;
        let poly: CharPoly = characteristic_polynomial(&a);
        for &l in &diag {
            prop_assert!(poly.eval(Complex64::new(l, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn schedule_shift_is_pointwise(from in 50.0..150.0, to in 50.0..150.0, t0 in 0.0..10.0, t in 0.0..20.0, delta in -10.0..10.0) {
        let s = Schedule::step(t0, from, to);
        prop_assert_eq!(s.shifted(delta).eval(t).unwrap(), s.eval(t).unwrap() + delta);
        let expected = if t >= t0 { to } else { from };
        prop_assert_eq!(s.eval(t).unwrap(), expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn demand_is_exact_at_the_reference_point(d in demand()) {
        let rf = *d.reference();
        let e = d.eval(&DemandInputs::at_reference(&rf)).unwrap();
        prop_assert!((e - rf.y_star0).abs() <= 1e-12 * rf.y_star0);
    }

    #[test]
    fn demand_is_monotone_along_segments(d in demand(), at in inputs(), len in 0.01..0.5) {
        // (coordinate, direction of increase of E)
        for (i, up) in [(0, true), (2, false), (3, true), (4, false), (5, true)] {
            let at_t = |t: f64| {
                let mut x = [at.y, at.y_star, at.p, at.x, at.r, at.g];
                x[i] += t * len * x[i].abs().max(1.0);
                d.eval(&DemandInputs { y: x[0], y_star: x[1], p: x[2], x: x[3], r: x[4], g: x[5] }).unwrap()
            };
            let v: Vec<f64> = (0..=8).map(|k| at_t(k as f64 / 8.0)).collect();
            for w in v.windows(2) {
                prop_assert!(if up { w[1] > w[0] } else { w[1] < w[0] }, "coordinate {i}");
            }
        }
    }

    #[test]
    fn tmiia_output_rate_is_bit_identical(
        m in speeds(), d1 in demand(), d2 in demand(), at in inputs(),
        p2 in 0.2..5.0, x2 in -0.5..0.5, r2 in -0.5..0.5, g2 in 0.0..60.0, mu in -0.1..0.1,
    ) {
        let [a, b, c, d1s, d2s] = m;
        let model = Model::Tmiia(TmiiaParams { a, b, c, d1: d1s, d2: d2s, pi_target: 0.0 });
        let s1 = MacroState::new(at.y, at.p, at.x, at.r);
        let s2 = MacroState::new(at.y, p2, x2, r2);
        let e1 = ExogenousPoint { y_star: at.y_star, g: at.g, mu: 0.0 };
        let e2 = ExogenousPoint { y_star: at.y_star, g: g2, mu };
        let dy1 = model.field(&s1, &d1, &e1).unwrap().dy;
        let dy2 = model.field(&s2, &d2, &e2).unwrap().dy;
        prop_assert_eq!(dy1.to_bits(), dy2.to_bits());
    }

    #[test]
    fn tmia_positive_gap_raises_prices_expectations_and_rates(
        m in speeds(), d in demand(), gap in 0.1..30.0, p in 0.2..5.0, r in -0.5..0.5,
    ) {
        let [a, b, c, d1, d2] = m;
        let model = Model::Tmia(TmiaParams { a, b, c_exp: c, d1, d2, pi_target: 0.0 });
        let s = MacroState::new(100.0 + gap, p, 0.0, r);
        let rates = model.field(&s, &d, &ExogenousPoint { y_star: 100.0, g: 20.0, mu: 0.0 }).unwrap();
        prop_assert!(rates.dp > 0.0 && rates.dx > 0.0 && rates.dr > 0.0);
    }

    #[test]
    fn rest_point_is_a_fixed_point_of_the_integrator(m in model(), d in demand()) {
        let kind = m.kind();
        let mut spec = ScenarioSpec { horizon: 20.0, demand: d, ..ScenarioSpec::default_shock(kind.into()) };
        spec.y_star = Schedule::constant(100.0);
        match m {
            Model::Tmia(p) => spec.tmia = p,
            Model::Tmiia(p) => spec.tmiia = p,
        }
        let run = run_model(&spec, kind).unwrap();
        let s0 = run.trajectory.states[0].to_array();
        for s in &run.trajectory.states {
            for (a, b) in s.to_array().iter().zip(&s0) {
                prop_assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0));
            }
        }
    }

    #[test]
    fn stored_states_stay_positive(m in model(), d in affine(), to in 70.0..130.0) {
        let kind = m.kind();
        let mut spec = ScenarioSpec { horizon: 30.0, demand: d, ..ScenarioSpec::default_shock(kind.into()) };
        spec.y_star = Schedule::step(0.0, 100.0, to);
        match m {
            Model::Tmia(p) => spec.tmia = p,
            Model::Tmiia(p) => spec.tmiia = p,
        }
        // Unstable draws may be truncated; whatever was stored must be admissible.
        let states = match run_model(&spec, kind) {
            Ok(run) => run.trajectory.states,
            Err(tobin_core::Error::TrajectoryTruncated { partial, .. }) => partial.states,
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert!(states.iter().all(|s| s.y > 0.0 && s.p > 0.0));
    }
}

#[test]
fn order_against_tmiia_closed_form() {
    let err = |dt: f64| {
        let spec = ScenarioSpec {
            horizon: 10.0,
            dt,
            sample_every: 1,
            ..ScenarioSpec::default_shock(ModelChoice::Tmiia)
        };
        let run = run_model(&spec, ModelKind::Tmiia).unwrap();
        let exact = 90.0 + 10.0 * (-spec.tmiia.a * 10.0_f64).exp();
        (run.report.terminal_state.y - exact).abs()
    };
    let ratio = err(0.2) / err(0.1);
    assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
}

#[test]
#[ignore = "does not hold: the fiscal boost is reversed by the rate rule from t = 1.1 on the default configuration (see README)"]
fn monotone_cushioning() {
    let spec = ScenarioSpec::default_shock(ModelChoice::Tmia);
    let mut prev: Option<Vec<f64>> = None;
    for dg in [0.0, 2.5, 5.0, 10.0] {
        let mut s = spec.clone();
        s.policy.g = spec.policy.g.shifted(dg);
        let start = tobin_core::scenario::initial_state(&spec, ModelKind::Tmia).unwrap();
        s.initial = tobin_core::scenario::InitialState::Explicit(start);
        let y: Vec<f64> = run_model(&s, ModelKind::Tmia).unwrap().trajectory.states.iter().map(|s| s.y).collect();
        if let Some(p) = &prev {
            for (i, (a, b)) in y.iter().zip(p).enumerate() {
                assert!(a >= b, "dG = {dg}: Y fell below the smaller boost at sample {i}");
            }
        }
        prev = Some(y);
    }
}

#[test]
fn reduced_cubic_matches_nonzero_eigenvalues() {
    let m = Model::Tmia(TmiaParams::default());
    let r = classify_stability(&m, &DemandSpec::default(), &reference_exog(), 0.02).unwrap();
    let mut nonzero: Vec<Complex64> = r.eigenvalues.iter().copied().filter(|z| z.norm() > 1e-9).collect();
    let mut reduced = r.reduced.eigenvalues.clone();
    let key = |z: &Complex64| (z.re, z.im);
    nonzero.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
    reduced.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
    assert_eq!(nonzero.len(), 3);
    for (a, b) in nonzero.iter().zip(&reduced) {
        assert!((a - b).norm() < 1e-9);
    }
}
