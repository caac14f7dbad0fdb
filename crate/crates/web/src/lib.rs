//! WebAssembly bindings for the browser demo in `www/`. Every export
//! returns a JSON string; the `*_json` functions hold the logic so they can
//! be tested natively.

use dtqw::qutrit::{self, ChainLayout, NoiseModel};
use dtqw::topology::{self, SweepInitial, SweepMode, SweepPlan, DEFAULT_EDGE_WINDOW};
use dtqw::walk::{self, WalkKind, WalkState};
use dtqw::{metrics, Result};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Longest walk the page will draw.
pub const MAX_STEPS: usize = 60;

fn initial(name: &str) -> Result<WalkState> {
    match name {
        "phi_co" => Ok(walk::phi_co()),
        "phi_ce" => Ok(walk::phi_ce()),
        other => Err(dtqw::Error::InvalidArgument(format!("unknown initial state `{other}`"))),
    }
}

fn check_steps(steps: usize, max: usize) -> Result<()> {
    if steps > max {
        return Err(dtqw::Error::InvalidArgument(format!("at most {max} steps")));
    }
    Ok(())
}

pub fn walk_heatmap_json(theta_minus: f64, theta_plus: f64, steps: usize, init: &str) -> Result<String> {
    check_steps(steps, MAX_STEPS)?;
    let profile = topology::edge_profile(theta_minus, theta_plus);
    let dists = walk::evolve(&initial(init)?, &profile, WalkKind::Bidirectional, steps)?;
    let t = steps as i64;
    let rows: Vec<Vec<f64>> = dists.iter().map(|d| (-t..=t).map(|x| d.prob(x)).collect()).collect();
    let diffusion: Vec<f64> = dists.iter().map(|d| metrics::diffusion_distance(d).unwrap_or(f64::NAN)).collect();
    let p_edge: Vec<f64> = dists.iter().map(|d| topology::p_edge(d, &DEFAULT_EDGE_WINDOW)).collect();
    Ok(json!({"lo": -t, "rows": rows, "diffusion": diffusion, "p_edge": p_edge}).to_string())
}

/// `mode` is `"contrast"` (θ₊ = π/4 fixed, θ₋ swept over (−π/2, π/2)) or
/// `"locality"` (θ₋ = −θ₊, θ₊ swept over (0, π/2)).
pub fn edge_sweep_json(mode: &str, steps: usize, points: usize) -> Result<String> {
    check_steps(steps, MAX_STEPS)?;
    let points = points.clamp(1, 400);
    let half = std::f64::consts::FRAC_PI_2;
    let (mode, lo, hi) = match mode {
        "contrast" => (SweepMode::FixPlusVaryMinus { theta_plus: half / 2.0 }, -half, half),
        "locality" => (SweepMode::Antisymmetric, 0.0, half),
        other => return Err(dtqw::Error::InvalidArgument(format!("unknown sweep `{other}`"))),
    };
    let grid = (1..=points).map(|k| lo + (hi - lo) * k as f64 / (points + 1) as f64).collect();
    let rows = topology::run_sweep(&SweepPlan { mode, grid, steps: vec![steps], initial: SweepInitial::PhiCe })?;
    let theta: Vec<f64> = rows.iter().map(|r| r.theta_swept_rad).collect();
    let p_edge: Vec<f64> = rows.iter().map(|r| r.p_edge).collect();
    Ok(json!({"theta": theta, "p_edge": p_edge}).to_string())
}

/// Similarity of the amplitude-damped chain to the ideal walk, per step.
pub fn noisy_similarity_json(t1_us: f64, steps: usize, init: &str) -> Result<String> {
    check_steps(steps, 19)?;
    let noise = NoiseModel::with_t1(t1_us);
    noise.validate()?;
    let layout = ChainLayout::new(steps + 1)?;
    let init = initial(init)?;
    let profile = topology::edge_profile(-std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_4);
    let ideal = walk::evolve(&init, &walk::map_profile_bi_to_uni(&profile, steps)?, WalkKind::Unidirectional, steps)?;
    let circuit = qutrit::compile_walk(steps, &profile, &init.amps[0], &layout)?;
    let states = qutrit::simulate_trajectory(&circuit, &noise, &layout)?;
    let mut similarity = Vec::new();
    let mut loss = Vec::new();
    for (s, (st, d)) in states.iter().zip(&ideal).enumerate() {
        let m = qutrit::measure_positions(st, &layout, s);
        similarity.push(metrics::similarity(&m.distribution, d));
        loss.push(m.loss);
    }
    Ok(json!({"similarity": similarity, "loss": loss}).to_string())
}

fn js(r: Result<String>) -> std::result::Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn walk_heatmap(theta_minus: f64, theta_plus: f64, steps: usize, initial: &str) -> std::result::Result<String, JsError> {
    js(walk_heatmap_json(theta_minus, theta_plus, steps, initial))
}

#[wasm_bindgen]
pub fn edge_sweep(mode: &str, steps: usize, points: usize) -> std::result::Result<String, JsError> {
    js(edge_sweep_json(mode, steps, points))
}

#[wasm_bindgen]
pub fn noisy_similarity(t1_us: f64, steps: usize, initial: &str) -> std::result::Result<String, JsError> {
    js(noisy_similarity_json(t1_us, steps, initial))
}
