//! Browser bindings. Each export takes a TOML scenario and returns JSON.

use serde_json::{json, Value};
use tobin_core::scenario::run_scenario;
use tobin_core::{commands, parse_config};
use wasm_bindgen::prelude::*;

fn to_js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

/// Column-oriented trajectories for plotting, plus the prediction reports.
pub fn simulate_json(config: &str) -> Result<String, String> {
    let cfg = parse_config(config).map_err(|e| e.to_string())?;
    let runs = run_scenario(&cfg.scenario).map_err(|e| e.to_string())?;
    let runs: Vec<Value> = runs
        .iter()
        .map(|run| {
            let t = &run.trajectory;
            let col = |f: &dyn Fn(usize) -> f64| (0..t.len()).map(f).collect::<Vec<f64>>();
            json!({
                "model": run.report.model,
                "t": t.times,
                "Y": col(&|i| t.states[i].y),
                "p": col(&|i| t.states[i].p),
                "x": col(&|i| t.states[i].x),
                "r": col(&|i| t.states[i].r),
                "pi": t.pi,
                "Ystar": col(&|i| t.exogenous[i].y_star),
                "report": run.report,
            })
        })
        .collect();
    Ok(json!({ "warnings": cfg.warnings, "runs": runs }).to_string())
}

pub fn stability_json(config: &str) -> Result<String, String> {
    let cfg = parse_config(config).map_err(|e| e.to_string())?;
    commands::stability(&cfg).map_err(|e| e.to_string())
}

pub fn compare_json(config: &str) -> Result<String, String> {
    let cfg = parse_config(config).map_err(|e| e.to_string())?;
    commands::compare(&cfg).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn simulate(config: &str) -> Result<String, JsValue> {
    to_js(simulate_json(config))
}

#[wasm_bindgen]
pub fn stability(config: &str) -> Result<String, JsValue> {
    to_js(stability_json(config))
}

#[wasm_bindgen]
pub fn compare(config: &str) -> Result<String, JsValue> {
    to_js(compare_json(config))
}
