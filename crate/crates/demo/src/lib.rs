//! Browser bindings. Every operation is a plain function returning JSON text
//! so it can be tested natively; the `wasm_bindgen` wrappers only convert
//! errors.

use lfgraph::autos::{check_structure, decompose, random_generated_automorphism};
use lfgraph::budget::Deadline;
use lfgraph::graph::{domination_number, DomMode, Target};
use lfgraph::{Field, LfGraph, Side};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest graph the page will draw.
pub const DRAW_LIMIT: usize = 160;
/// Exact domination runs without a clock in the browser, so it is kept to
/// instances that finish quickly.
pub const DOMINATION_LIMIT: usize = 64;

fn instance(q: u32, n: u32, limit: usize) -> Result<LfGraph, String> {
    let field = Field::of_order(q as usize).map_err(|e| e.to_string())?;
    LfGraph::build_with_limit(&field, n as usize, Some(limit)).map_err(|e| e.to_string())
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::Vec => "vec",
        Side::Fun => "fun",
    }
}

pub fn graph_json(q: u32, n: u32) -> Result<String, String> {
    let g = instance(q, n, DRAW_LIMIT)?;
    let vertices: Vec<_> = (0..g.vertex_count())
        .map(|v| {
            json!({
                "id": v,
                "side": side_name(g.side(v)),
                "coords": g.coords(v).indices(),
                "line": g.line_of(v),
            })
        })
        .collect();
    let doc = json!({
        "q": g.q(),
        "n": g.n(),
        "vertices": vertices,
        "edges": g.edges(),
        "lines": g.lines().len(),
        "components": g.components(),
    });
    Ok(doc.to_string())
}

pub fn domination_json(q: u32, n: u32, target: &str, total: bool) -> Result<String, String> {
    let g = instance(q, n, DOMINATION_LIMIT)?;
    let t = match target {
        "vec" => Target::Vec,
        "fun" => Target::Fun,
        "whole" => Target::Whole,
        other => return Err(format!("unknown target {other:?}")),
    };
    let mode = if total {
        DomMode::Total
    } else {
        DomMode::Standard
    };
    let d = domination_number(&g, t, mode, &Deadline::none()).map_err(|e| e.to_string())?;
    Ok(json!({"target": target, "total": total, "size": d.size, "witness": d.witness}).to_string())
}

pub fn random_automorphism_json(q: u32, n: u32, seed: u32, swap: bool) -> Result<String, String> {
    let g = instance(q, n, DRAW_LIMIT)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.into());
    let rho = random_generated_automorphism(&g, &mut rng, swap).map_err(|e| e.to_string())?;
    let structure = check_structure(&g, &rho).map_err(|e| e.to_string())?;
    let factors = match decompose(&g, &rho) {
        Ok(d) => json!(d.to_doc()),
        Err(f) => json!({"failure": f}),
    };
    Ok(json!({
        "image": rho.image(),
        "structure": structure,
        "decomposition": factors,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn build_graph(q: u32, n: u32) -> Result<String, JsError> {
    graph_json(q, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn dominate(q: u32, n: u32, target: &str, total: bool) -> Result<String, JsError> {
    domination_json(q, n, target, total).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn random_automorphism(q: u32, n: u32, seed: u32, swap: bool) -> Result<String, JsError> {
    random_automorphism_json(q, n, seed, swap).map_err(|e| JsError::new(&e))
}
