//! wasm-bindgen entry points for the browser page in `www/`.
//!
//! Every function takes and returns strings so the same code runs natively
//! in tests. Errors come back as the message string.

use canonring::gn::{build_gn, verify_gn};
use canonring::io;
use canonring::linear_system::{enumerate_linear_system, is_extremal};
use canonring::metric::Point;
use canonring::witness;
use canonring::Budgets;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest `n` the page will run `verify_gn` for.
pub const MAX_GN: usize = 3;

fn msg(e: canonring::Error) -> String {
    e.to_string()
}

fn small_budgets() -> Budgets {
    Budgets {
        max_elements: 20_000,
        max_products: 2_000_000,
        ..Budgets::default()
    }
}

/// Elements of `R(G, m·D)` with their extremality, plus a DOT rendering.
#[wasm_bindgen]
pub fn linear_system(graph: &str, divisor: &str, m: u32) -> Result<String, String> {
    let b = small_budgets();
    let g = io::parse_graph(graph).map_err(msg)?;
    let d = io::parse_divisor(divisor, &g).map_err(msg)?;
    let md = i64::from(m) * d;
    let els = enumerate_linear_system(&g, &md, 1, &b).map_err(msg)?;
    let mut rows = Vec::with_capacity(els.len());
    for e in &els {
        let ext = is_extremal(&g, &md, &e.function, &b).map_err(msg)?;
        rows.push(json!({ "values": e.function.values(), "extremal": ext }));
    }
    Ok(json!({ "count": els.len(), "elements": rows, "dot": g.to_dot(Some(&md)) }).to_string())
}

/// The `G_n` report for `n ≤ MAX_GN`.
#[wasm_bindgen]
pub fn gn_report(n: usize) -> Result<String, String> {
    if n == 0 || n > MAX_GN {
        return Err(format!("n must be between 1 and {MAX_GN}"));
    }
    let report = verify_gn(n, &small_budgets()).map_err(msg)?;
    let gn = build_gn(n).map_err(msg)?;
    let mut v = io::gn_report_json(&report);
    v["dot"] = json!(gn.graph.to_dot(Some(&gn.witness_target())));
    Ok(v.to_string())
}

/// Non-finite generation certificate for a witness instance and one `s`.
#[wasm_bindgen]
pub fn witness_certificate(instance: &str, s: u32) -> Result<String, String> {
    let b = small_budgets();
    let inst = io::parse_witness_instance(instance).map_err(msg)?;
    let report = witness::nonfinite_certificate(&inst, &[s], &b).map_err(msg)?;
    let mut v = io::nonfinite_json(&inst, &report);
    if let Some(c) = report.certificates.first() {
        let g = &inst.graph;
        let marks = [
            (Point::Vertex(inst.p()), "p".to_string()),
            (Point::Vertex(inst.q()), "q".to_string()),
            (c.witness.r.clone(), "r".to_string()),
        ];
        v["dot"] = json!(io::metric_to_dot(g, Some(&c.witness.ftilde.div(g)), &marks));
    }
    Ok(v.to_string())
}
