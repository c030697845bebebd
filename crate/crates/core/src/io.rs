//! JSON and DOT formats.
//!
//! * graph: `{"vertices": n, "edges": [[u, v], ...], "labels": [...]}`
//! * metric graph: the same plus `"lengths": {"edgeIndex": "p/q"}`
//! * divisor: `{"coeffs": {"vertexIndex": c}}`, or the keyword `K`
//! * point: `{"edge": i, "offset": "p/q"}` or `{"vertex": v}`
//! * metric divisor: `{"points": [{"edge": i, "offset": "p/q", "coeff": c}, ...]}`
//!
//! Rationals are written as `"p/q"` strings (`"p"` when integral). Points in
//! metric input refer to the input model and are mapped through the
//! suppression of 2-valent vertices.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::gn::GnReport;
use crate::graph::{Divisor, FiniteGraph, RationalFunction};
use crate::linear_system::RgdElement;
use crate::metric::{MetricDivisor, MetricGraph, MetricSubgraph, PlFunction, Point};
use crate::rational::{self, Rational};
use crate::witness::{Certificate, HypothesisReport, NonfiniteReport, Obstruction, WitnessInstance, WitnessResult};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphInput {
    vertices: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default)]
    labels: Option<Vec<String>>,
    #[serde(default)]
    lengths: Option<BTreeMap<String, String>>,
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

fn model_of(spec: &GraphInput) -> Result<FiniteGraph> {
    let g = FiniteGraph::new(spec.vertices, spec.edges.iter().map(|e| (e[0], e[1])).collect())?;
    match &spec.labels {
        Some(l) => g.with_labels(l.clone()),
        None => Ok(g),
    }
}

fn index_key(key: &str, bound: usize, what: &str) -> Result<usize> {
    let i: usize = key
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{what} key {key:?} is not an index")))?;
    if i >= bound {
        return Err(Error::IndexOutOfRange { index: i, bound });
    }
    Ok(i)
}

pub fn parse_graph(text: &str) -> Result<FiniteGraph> {
    let spec: GraphInput = serde_json::from_str(text).map_err(json_err)?;
    if spec.lengths.is_some() {
        return Err(Error::Parse("a finite graph carries no lengths".into()));
    }
    model_of(&spec)
}

fn metric_of(spec: &GraphInput) -> Result<MetricGraph> {
    let model = model_of(spec)?;
    let given = spec
        .lengths
        .as_ref()
        .ok_or_else(|| Error::Parse("metric graph needs \"lengths\"".into()))?;
    let mut lengths: Vec<Option<Rational>> = vec![None; model.edge_count()];
    for (k, v) in given {
        lengths[index_key(k, model.edge_count(), "length")?] = Some(rational::parse(v)?);
    }
    let lengths = lengths
        .into_iter()
        .enumerate()
        .map(|(e, l)| l.ok_or_else(|| Error::Parse(format!("no length for edge {e}"))))
        .collect::<Result<Vec<_>>>()?;
    MetricGraph::new(model, lengths)
}

pub fn parse_metric_graph(text: &str) -> Result<MetricGraph> {
    let spec: GraphInput = serde_json::from_str(text).map_err(json_err)?;
    metric_of(&spec)
}

fn is_keyword_k(text: &str) -> bool {
    matches!(text.trim(), "K" | "\"K\"")
}

/// `{"coeffs": {...}}` or `K` for the canonical divisor.
pub fn parse_divisor(text: &str, g: &FiniteGraph) -> Result<Divisor> {
    if is_keyword_k(text) {
        return Ok(g.canonical_divisor());
    }
    let v: Value = serde_json::from_str(text).map_err(json_err)?;
    divisor_from_value(&v, g)
}

fn divisor_from_value(v: &Value, g: &FiniteGraph) -> Result<Divisor> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Input {
        coeffs: BTreeMap<String, i64>,
    }
    let spec: Input = serde_json::from_value(v.clone()).map_err(json_err)?;
    let mut d = Divisor::zero(g.vertex_count());
    for (k, c) in spec.coeffs {
        d.0[index_key(&k, g.vertex_count(), "divisor")?] += c;
    }
    Ok(d)
}

/// `{"values": [...]}` or a bare array.
pub fn parse_function(text: &str, g: &FiniteGraph) -> Result<RationalFunction> {
    let v: Value = serde_json::from_str(text).map_err(json_err)?;
    let arr = match &v {
        Value::Object(m) if m.len() == 1 && m.contains_key("values") => &m["values"],
        _ => &v,
    };
    let values: Vec<i64> = serde_json::from_value(arr.clone()).map_err(json_err)?;
    if values.len() != g.vertex_count() {
        return Err(Error::SizeMismatch {
            expected: g.vertex_count(),
            found: values.len(),
        });
    }
    Ok(RationalFunction(values))
}

fn point_from_value(v: &Value, g: &MetricGraph) -> Result<Point> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("a point is an object".into()))?;
    let get_index = |key: &str| -> Result<Option<usize>> {
        obj.get(key)
            .map(|x| {
                x.as_u64()
                    .map(|i| i as usize)
                    .ok_or_else(|| Error::Parse(format!("{key:?} must be an index")))
            })
            .transpose()
    };
    if let Some(vertex) = get_index("vertex")? {
        return g.input_vertex(vertex);
    }
    let edge = get_index("edge")?.ok_or_else(|| Error::Parse("a point needs \"edge\" or \"vertex\"".into()))?;
    let offset = match obj.get("offset") {
        Some(Value::String(s)) => rational::parse(s)?,
        Some(Value::Number(n)) if n.is_i64() => rational::int(n.as_i64().expect("checked")),
        _ => return Err(Error::Parse("\"offset\" must be a \"p/q\" string".into())),
    };
    g.input_point(edge, offset)
}

pub fn parse_point(text: &str, g: &MetricGraph) -> Result<Point> {
    let v: Value = serde_json::from_str(text).map_err(json_err)?;
    point_from_value(&v, g)
}

fn metric_divisor_from_value(v: &Value, g: &MetricGraph) -> Result<MetricDivisor> {
    if v.as_str().is_some_and(|s| s.trim() == "K") {
        return Ok(g.canonical_divisor());
    }
    let points = v
        .get("points")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("metric divisor needs a \"points\" array".into()))?;
    let mut d = MetricDivisor::zero();
    for entry in points {
        let coeff = entry
            .get("coeff")
            .and_then(Value::as_i64)
            .ok_or_else(|| Error::Parse("each point needs an integer \"coeff\"".into()))?;
        let mut loc = entry.clone();
        if let Some(m) = loc.as_object_mut() {
            m.remove("coeff");
        }
        d.add_at(point_from_value(&loc, g)?, coeff);
    }
    Ok(d)
}

pub fn parse_metric_divisor(text: &str, g: &MetricGraph) -> Result<MetricDivisor> {
    if is_keyword_k(text) {
        return Ok(g.canonical_divisor());
    }
    let v: Value = serde_json::from_str(text).map_err(json_err)?;
    metric_divisor_from_value(&v, g)
}

/// `{"graph": {...}, "divisor": "K" | {...}, "edge": e, "n": n}`
pub fn parse_witness_instance(text: &str) -> Result<WitnessInstance> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Input {
        graph: GraphInput,
        #[serde(default)]
        divisor: Option<Value>,
        edge: usize,
        n: u32,
    }
    let spec: Input = serde_json::from_str(text).map_err(json_err)?;
    let g = metric_of(&spec.graph)?;
    let d = match &spec.divisor {
        None => g.canonical_divisor(),
        Some(v) => metric_divisor_from_value(v, &g)?,
    };
    let edge = g.input_edge(spec.edge)?;
    WitnessInstance::new(g, d, edge, spec.n)
}

pub fn rat(q: &Rational) -> Value {
    Value::String(rational::format(q))
}

pub fn graph_json(g: &FiniteGraph) -> Value {
    let mut m = Map::new();
    m.insert("vertices".into(), json!(g.vertex_count()));
    m.insert(
        "edges".into(),
        json!(g.edges().iter().map(|&(u, v)| [u, v]).collect::<Vec<_>>()),
    );
    if let Some(l) = g.labels() {
        m.insert("labels".into(), json!(l));
    }
    Value::Object(m)
}

pub fn metric_graph_json(g: &MetricGraph) -> Value {
    let mut v = graph_json(g.model());
    let lengths: Map<String, Value> = g
        .lengths()
        .iter()
        .enumerate()
        .map(|(e, l)| (e.to_string(), rat(l)))
        .collect();
    v["lengths"] = Value::Object(lengths);
    v
}

pub fn divisor_json(d: &Divisor) -> Value {
    let coeffs: Map<String, Value> = d
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(v, &c)| (v.to_string(), json!(c)))
        .collect();
    json!({ "coeffs": coeffs })
}

pub fn element_json(el: &RgdElement) -> Value {
    json!({ "degree": el.degree, "values": el.function.values() })
}

pub fn point_json(p: &Point) -> Value {
    match p {
        Point::Vertex(v) => json!({ "vertex": v }),
        Point::Edge { edge, offset } => json!({ "edge": edge, "offset": rat(offset) }),
    }
}

pub fn metric_divisor_json(d: &MetricDivisor) -> Value {
    let points: Vec<Value> = d
        .iter()
        .map(|(p, c)| {
            let mut v = point_json(p);
            v["coeff"] = json!(c);
            v
        })
        .collect();
    json!({ "points": points })
}

/// Per edge, `[offset, value]` pairs.
pub fn pl_json(f: &PlFunction) -> Value {
    let edges: Vec<Value> = f
        .pieces()
        .iter()
        .map(|p| Value::Array(p.iter().map(|(t, v)| json!([rat(t), rat(v)])).collect()))
        .collect();
    json!({ "edges": edges })
}

pub fn subgraph_json(g: &MetricGraph, s: &MetricSubgraph) -> Value {
    let intervals: Vec<Value> = s
        .intervals()
        .iter()
        .flat_map(|(e, l)| l.iter().map(move |(a, b)| json!({ "edge": e, "from": rat(a), "to": rat(b) })))
        .collect();
    json!({
        "vertices": s.vertices().iter().collect::<Vec<_>>(),
        "intervals": intervals,
        "text": s.describe(g),
    })
}

pub fn gn_report_json(r: &GnReport) -> Value {
    let checks = |c: &[crate::gn::IntegrityCheck]| -> Value {
        Value::Array(
            c.iter()
                .map(|c| json!({ "k": c.k, "h": c.h.values(), "holds": c.holds }))
                .collect(),
        )
    };
    json!({
        "n": r.n,
        "vertices": r.vertices,
        "edges": r.edges,
        "vacuous": r.vacuous,
        "witness": r.witness.values(),
        "witness_ok": r.witness_ok,
        "extremal": r.extremal,
        "generated_below": r.generated_below,
        "search_bound": r.search_bound,
        "lower_elements": r.lower_elements,
        "products_examined": r.products_examined,
        "search_candidates": checks(&r.search_candidates),
        "integrality": checks(&r.integrality),
        "passed": r.passed(),
    })
}

pub fn hypotheses_json(h: &HypothesisReport) -> Value {
    let mut v = serde_json::to_value(h).expect("plain report serialises");
    v["passed"] = json!(h.passed());
    if let Some(phi) = &h.equivalence {
        v["equivalence"] = pl_json(phi);
    }
    v
}

pub fn obstruction_json(o: &Obstruction) -> Value {
    serde_json::to_value(o).expect("plain report serialises")
}

pub fn witness_json(g: &MetricGraph, w: &WitnessResult) -> Value {
    json!({
        "s": w.s,
        "degree": w.degree,
        "N": w.chips,
        "L": rat(&w.length),
        "r": point_json(&w.r),
        "r_offset": rat(&w.r_offset),
        "ftilde": pl_json(&w.ftilde),
        "f": pl_json(&w.f),
        "orders": { "p": w.orders[0], "q": w.orders[1], "r": w.orders[2] },
        "expected_orders": { "p": w.expected_orders[0], "q": w.expected_orders[1], "r": w.expected_orders[2] },
        "orders_ok": w.orders_ok,
        "extremal": w.extremal,
        "firing_subgraphs": w.firing.iter().map(|s| subgraph_json(g, s)).collect::<Vec<_>>(),
    })
}

pub fn certificate_json(g: &MetricGraph, c: &Certificate) -> Value {
    let mut v = witness_json(g, &c.witness);
    v["obstruction"] = obstruction_json(&c.obstruction);
    v["holds"] = json!(c.holds());
    v
}

pub fn nonfinite_json(inst: &WitnessInstance, r: &NonfiniteReport) -> Value {
    json!({
        "graph": metric_graph_json(&inst.graph),
        "divisor": metric_divisor_json(&inst.divisor),
        "edge": inst.edge,
        "n": inst.n,
        "hypotheses": hypotheses_json(&r.hypotheses),
        "certificates": r.certificates.iter().map(|c| certificate_json(&inst.graph, c)).collect::<Vec<_>>(),
        "statement": r.statement(),
        "holds": r.holds(),
    })
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering of a metric graph. Divisor coefficients label vertices;
/// interior support points and extra `marks` become nodes splitting their edge.
pub fn metric_to_dot(g: &MetricGraph, divisor: Option<&MetricDivisor>, marks: &[(Point, String)]) -> String {
    let mut names: BTreeMap<Point, String> = BTreeMap::new();
    for (p, name) in marks {
        names.insert(p.clone(), name.clone());
    }
    let coeff = |p: &Point| divisor.map(|d| d.coeff(p)).unwrap_or(0);
    let mut out = String::from("graph G {\n");
    for v in 0..g.vertex_count() {
        let p = Point::Vertex(v);
        let mut label = names.get(&p).cloned().unwrap_or_else(|| g.label(v));
        if divisor.is_some() {
            label = format!("{label}: {}", coeff(&p));
        }
        out.push_str(&format!("  v{v} [label=\"{}\"];\n", escape(&label)));
    }
    let mut interior: BTreeMap<usize, Vec<Rational>> = BTreeMap::new();
    let extra = divisor.into_iter().flat_map(|d| d.support()).chain(marks.iter().map(|(p, _)| p.clone()));
    for p in extra {
        if let Point::Edge { edge, offset } = p {
            interior.entry(edge).or_default().push(offset);
        }
    }
    for e in 0..g.edge_count() {
        let (u, w) = g.model().edge(e);
        let len = g.length(e).clone();
        let mut stops = interior.remove(&e).unwrap_or_default();
        stops.sort();
        stops.dedup();
        let mut prev_node = format!("v{u}");
        let mut prev_t = Rational::from_integer(0.into());
        for (i, t) in stops.iter().enumerate() {
            let p = Point::Edge {
                edge: e,
                offset: t.clone(),
            };
            let node = format!("e{e}_{i}");
            let mut label = names.get(&p).cloned().unwrap_or_else(|| p.to_string());
            if divisor.is_some() {
                label = format!("{label}: {}", coeff(&p));
            }
            out.push_str(&format!("  {node} [label=\"{}\", shape=point, xlabel=\"{}\"];\n", escape(&label), escape(&label)));
            out.push_str(&format!(
                "  {prev_node} -- {node} [label=\"{}\"];\n",
                rational::format(&(t - &prev_t))
            ));
            prev_node = node;
            prev_t = t.clone();
        }
        out.push_str(&format!(
            "  {prev_node} -- v{w} [label=\"{}\"];\n",
            rational::format(&(len - prev_t))
        ));
    }
    out.push_str("}\n");
    out
}
