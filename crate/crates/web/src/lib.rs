//! Browser bindings. Every export takes plain text and returns a JSON
//! string, so the page needs no bundler.

use mereoml::dataset::{LoadOptions, RawTable};
use mereoml::geometry::{navigate, parse_formation, parse_world};
use mereoml::granulation::{reflect, run_decider, DeciderConfig};
use mereoml::inclusion::{exp_compose, t_lukasiewicz, ObjectInclusion};
use mereoml::DecisionSystem;
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct CurvePoint {
    r: f64,
    lukasiewicz: f64,
    exponential: f64,
}

/// Composition bounds `L(r, s)` and `α(r, s)` on a grid of `r` in `(0, 1]`.
pub fn composition_curves(s: f64, samples: usize) -> Result<String, String> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(format!("s must lie in (0, 1], got {s}"));
    }
    let n = samples.clamp(2, 1000);
    let points = (1..=n)
        .map(|k| {
            let r = k as f64 / n as f64;
            Ok(CurvePoint {
                r,
                lukasiewicz: t_lukasiewicz(r, s),
                exponential: exp_compose(r, s).map_err(|e| e.to_string())?,
            })
        })
        .collect::<Result<Vec<_>, String>>()?;
    serde_json::to_string(&points).map_err(|e| e.to_string())
}

fn parse_table(csv: &str, decision: &str) -> Result<DecisionSystem, String> {
    let raw = RawTable::from_reader(csv.as_bytes(), &LoadOptions::default()).map_err(|e| e.to_string())?;
    DecisionSystem::from_raw(&raw, decision).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct GranuleView {
    center: usize,
    members: Vec<usize>,
}

#[derive(Serialize)]
struct Granulation {
    objects: usize,
    granules: Vec<GranuleView>,
    reflection_csv: String,
    accuracy: Option<f64>,
}

/// Irreducible covering and granular reflection at `radius` under the
/// Łukasiewicz inclusion. With `folds ≥ 2` also cross-validates that radius.
pub fn granulate_table(csv: &str, decision: &str, radius: f64, folds: usize, seed: u64) -> Result<String, String> {
    if !(0.0..=1.0).contains(&radius) {
        return Err(format!("radius must lie in [0, 1], got {radius}"));
    }
    let ds = parse_table(csv, decision)?;
    let reflection = reflect(&ds, radius, &ObjectInclusion::Lukasiewicz);
    let accuracy = if folds >= 2 && ds.n_objects() >= folds {
        let config = DeciderConfig {
            folds,
            seed,
            radii: Some(vec![radius]),
            inclusion: ObjectInclusion::Lukasiewicz,
        };
        Some(run_decider(&ds, &config).map_err(|e| e.to_string())?.best().accuracy)
    } else {
        None
    };
    let out = Granulation {
        objects: ds.n_objects(),
        granules: reflection
            .covering
            .granules
            .iter()
            .map(|g| GranuleView {
                center: g.center,
                members: g.members.iter().collect(),
            })
            .collect(),
        reflection_csv: reflection.to_csv(&ds),
        accuracy,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Frame {
    violations: usize,
    rects: Vec<[f64; 5]>,
}

#[derive(Serialize)]
struct Simulation {
    status: String,
    bounds: [f64; 4],
    goal: [f64; 4],
    obstacles: Vec<[f64; 4]>,
    frames: Vec<Frame>,
}

/// Runs the navigator and returns every frame as `[id, x1, y1, x2, y2]` rows.
pub fn simulate_world(world: &str, formation: &str, steps: usize) -> Result<String, String> {
    let world = parse_world(world).map_err(|e| format!("world: {e}"))?;
    let known = world.robots.keys().copied().collect();
    let formation = parse_formation(formation, Some(&known)).map_err(|e| format!("formation: {e}"))?;
    let log = navigate(&world, &formation, steps.min(5000)).map_err(|e| e.to_string())?;
    let corners = |r: &mereoml::geometry::Rect| [r.x1, r.y1, r.x2, r.y2];
    let out = Simulation {
        status: format!("{:?}", log.status),
        bounds: corners(&world.bounds),
        goal: corners(&world.goal),
        obstacles: world.obstacles.iter().map(corners).collect(),
        frames: log
            .steps
            .iter()
            .map(|s| Frame {
                violations: s.violations,
                rects: s
                    .robots
                    .iter()
                    .map(|r| [r.id as f64, r.rect.x1, r.rect.y1, r.rect.x2, r.rect.y2])
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn curves(s: f64, samples: usize) -> Result<String, JsValue> {
    composition_curves(s, samples).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn granulate(csv: &str, decision: &str, radius: f64, folds: usize, seed: u32) -> Result<String, JsValue> {
    granulate_table(csv, decision, radius, folds, seed as u64).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn simulate(world: &str, formation: &str, steps: usize) -> Result<String, JsValue> {
    simulate_world(world, formation, steps).map_err(|e| JsValue::from_str(&e))
}
