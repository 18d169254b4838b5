//! Browser demo: shape parameters, reconfigurability and planning for an
//! ASCII map typed into the page. The `*_text` functions hold the logic and
//! run natively; the exported wrappers only convert errors.

use std::collections::HashSet;

use serde::Serialize;
use wasm_bindgen::prelude::*;

use polyroute::domain::Polyomino;
use polyroute::planners::{auto_plan, Algorithm};
use polyroute::primitives::{check_universal_reconfigurability, Reconfigurability};
use polyroute::shape::ShapeProfile;
use polyroute::tooling::{gen_random_instance, render_frame};

fn parse(map: &str) -> Result<Polyomino, String> {
    Polyomino::parse(map).map_err(|e| e.to_string())
}

pub fn params_text(map: &str) -> Result<String, String> {
    Ok(ShapeProfile::compute(&parse(map)?).to_text())
}

pub fn check_ur_text(map: &str) -> Result<String, String> {
    Ok(match check_universal_reconfigurability(&parse(map)?) {
        Reconfigurability::Yes(cover) => format!("yes ({} squares in the 2x2 cover)", cover.len()),
        Reconfigurability::No(w) => format!("no: {w:?}"),
    })
}

#[derive(Serialize)]
struct PlanView {
    algorithm: String,
    makespan: usize,
    diameter: u32,
    lower_bound: usize,
    start_svg: String,
    target_svg: String,
}

/// Plans a random permutation (seeded) of the agents on `map`. `algo` is a
/// planner tag or `auto`.
pub fn plan_json(map: &str, seed: u64, algo: &str) -> Result<String, String> {
    let p = parse(map)?;
    let inst = gen_random_instance(&p, seed);
    let r = match algo {
        "auto" => auto_plan(&inst, false),
        tag => Algorithm::from_tag(tag).ok_or_else(|| format!("unknown planner {tag:?}"))?.run(&inst),
    }
    .map_err(|e| e.to_string())?;
    let view = PlanView {
        algorithm: r.algorithm.to_string(),
        makespan: r.makespan,
        diameter: r.diameter,
        lower_bound: r.lower_bound,
        start_svg: render_frame(&p, &inst.start, &HashSet::new()),
        target_svg: render_frame(&p, &inst.target, &HashSet::new()),
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn params(map: &str) -> Result<String, JsError> {
    params_text(map).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn check_ur(map: &str) -> Result<String, JsError> {
    check_ur_text(map).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn plan(map: &str, seed: u64, algo: &str) -> Result<String, JsError> {
    plan_json(map, seed, algo).map_err(|e| JsError::new(&e))
}
