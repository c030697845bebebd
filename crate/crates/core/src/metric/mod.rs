//! Compact metric graphs with rational edge lengths.
//!
//! A metric graph is stored through its canonical model: the vertices are
//! exactly the points of valence different from 2. Points are either model
//! vertices or interior points of an edge, so every point has one
//! representation and points compare structurally.

mod firing;
mod pl;
mod refine;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, Zero};

use crate::budget::Budgets;
use crate::error::{Error, Result};
use crate::graph::FiniteGraph;
use crate::rational::{self, Rational};

pub use firing::{
    can_fire_metric, can_fire_metric_with, cf_move, covering_subgraph_pair, firing_subgraphs, firing_threshold,
    is_extremal_metric, MetricSubgraph,
};
pub use pl::{ord_div_metric, PlFunction};
pub use refine::{linear_equiv_metric, linear_equiv_metric_with, refine, refinement_factor, Refinement};

/// One end of an edge at a vertex: `end == 0` is offset 0, `end == 1` is the far end.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Incidence {
    pub edge: usize,
    pub end: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Vertex(usize),
    /// Strictly inside the edge, `0 < offset < length`.
    Edge { edge: usize, offset: Rational },
}

/// Where an input edge or vertex landed after suppressing 2-valent vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
struct InputEdge {
    edge: usize,
    start: Rational,
    length: Rational,
    reversed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricGraph {
    model: FiniteGraph,
    lengths: Vec<Rational>,
    refinement: bool,
    incidences: Vec<Vec<Incidence>>,
    input_edges: Vec<InputEdge>,
    input_vertices: Vec<Point>,
}

fn incidences_of(model: &FiniteGraph) -> Vec<Vec<Incidence>> {
    let mut inc = vec![Vec::new(); model.vertex_count()];
    for (e, &(u, v)) in model.edges().iter().enumerate() {
        inc[u].push(Incidence { edge: e, end: 0 });
        inc[v].push(Incidence { edge: e, end: 1 });
    }
    inc
}

fn check_lengths(model: &FiniteGraph, lengths: &[Rational]) -> Result<()> {
    if lengths.len() != model.edge_count() {
        return Err(Error::SizeMismatch {
            expected: model.edge_count(),
            found: lengths.len(),
        });
    }
    if let Some(l) = lengths.iter().find(|l| !l.is_positive()) {
        return Err(Error::InvalidMetricGraph(format!(
            "edge lengths must be positive, found {}",
            rational::format(l)
        )));
    }
    Ok(())
}

impl MetricGraph {
    /// Builds the metric graph of `(model, lengths)`, suppressing 2-valent
    /// vertices. Points given on the input model are translated with
    /// [`MetricGraph::input_point`].
    pub fn new(model: FiniteGraph, lengths: Vec<Rational>) -> Result<Self> {
        check_lengths(&model, &lengths)?;
        let n = model.vertex_count();
        let keep: Vec<bool> = (0..n).map(|v| model.valence(v) != 2).collect();
        if !keep.iter().any(|&k| k) {
            return Err(Error::InvalidMetricGraph("homeomorphic to a circle".into()));
        }
        if keep.iter().all(|&k| k) {
            return Ok(Self::assemble(model, lengths, false));
        }
        let inc = incidences_of(&model);
        let mut new_index = vec![usize::MAX; n];
        let mut kept = Vec::new();
        for v in (0..n).filter(|&v| keep[v]) {
            new_index[v] = kept.len();
            kept.push(v);
        }
        let mut edges = Vec::new();
        let mut new_lengths = Vec::new();
        let mut input_edges: Vec<Option<InputEdge>> = vec![None; model.edge_count()];
        let mut vertex_at: Vec<Option<(usize, Rational)>> = vec![None; n];
        for &start in &kept {
            for first in &inc[start] {
                if input_edges[first.edge].is_some() {
                    continue;
                }
                let id = edges.len();
                let mut at = Rational::zero();
                let mut cur = *first;
                let end_vertex = loop {
                    let (a, b) = model.edge(cur.edge);
                    let far = if cur.end == 0 { b } else { a };
                    input_edges[cur.edge] = Some(InputEdge {
                        edge: id,
                        start: at.clone(),
                        length: lengths[cur.edge].clone(),
                        reversed: cur.end == 1,
                    });
                    at += &lengths[cur.edge];
                    if keep[far] {
                        break far;
                    }
                    vertex_at[far] = Some((id, at.clone()));
                    let arrived = Incidence {
                        edge: cur.edge,
                        end: 1 - cur.end,
                    };
                    cur = *inc[far]
                        .iter()
                        .find(|i| **i != arrived)
                        .expect("2-valent vertex has a second incidence");
                };
                edges.push((new_index[start], new_index[end_vertex]));
                new_lengths.push(at);
            }
        }
        let canon = FiniteGraph::new(kept.len(), edges)?;
        let canon = match model.labels() {
            Some(l) => canon.with_labels(kept.iter().map(|&v| l[v].clone()).collect())?,
            None => canon,
        };
        let mut g = Self::assemble(canon, new_lengths, false);
        g.input_edges = input_edges.into_iter().map(|e| e.expect("every edge lies on a chain")).collect();
        g.input_vertices = (0..n)
            .map(|v| match &vertex_at[v] {
                None => Point::Vertex(new_index[v]),
                Some((e, t)) => Point::Edge {
                    edge: *e,
                    offset: t.clone(),
                },
            })
            .collect();
        Ok(g)
    }

    /// A model that may keep 2-valent vertices (a refinement of a canonical one).
    pub fn refinement(model: FiniteGraph, lengths: Vec<Rational>) -> Result<Self> {
        check_lengths(&model, &lengths)?;
        if (0..model.vertex_count()).all(|v| model.valence(v) == 2) {
            return Err(Error::InvalidMetricGraph("homeomorphic to a circle".into()));
        }
        Ok(Self::assemble(model, lengths, true))
    }

    /// Every edge of `model` with the same integer length.
    pub fn uniform(model: FiniteGraph, length: i64) -> Result<Self> {
        let lengths = vec![rational::int(length); model.edge_count()];
        Self::new(model, lengths)
    }

    fn assemble(model: FiniteGraph, lengths: Vec<Rational>, refinement: bool) -> Self {
        let incidences = incidences_of(&model);
        let input_edges = (0..model.edge_count())
            .map(|e| InputEdge {
                edge: e,
                start: Rational::zero(),
                length: lengths[e].clone(),
                reversed: false,
            })
            .collect();
        let input_vertices = (0..model.vertex_count()).map(Point::Vertex).collect();
        MetricGraph {
            model,
            lengths,
            refinement,
            incidences,
            input_edges,
            input_vertices,
        }
    }

    pub fn model(&self) -> &FiniteGraph {
        &self.model
    }

    pub fn lengths(&self) -> &[Rational] {
        &self.lengths
    }

    pub fn length(&self, e: usize) -> &Rational {
        &self.lengths[e]
    }

    pub fn is_refinement(&self) -> bool {
        self.refinement
    }

    /// All edge lengths are integers.
    pub fn is_z_metric(&self) -> bool {
        self.lengths.iter().all(|l| l.is_integer())
    }

    pub fn incidences(&self, v: usize) -> &[Incidence] {
        &self.incidences[v]
    }

    pub fn vertex_count(&self) -> usize {
        self.model.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.model.edge_count()
    }

    /// First Betti number of the model.
    pub fn genus(&self) -> usize {
        self.model.genus()
    }

    pub fn vertex(&self, v: usize) -> Result<Point> {
        if v >= self.vertex_count() {
            return Err(Error::IndexOutOfRange {
                index: v,
                bound: self.vertex_count(),
            });
        }
        Ok(Point::Vertex(v))
    }

    /// The point at `offset` along `edge`, with endpoints mapped to vertices.
    pub fn point(&self, edge: usize, offset: Rational) -> Result<Point> {
        if edge >= self.edge_count() {
            return Err(Error::IndexOutOfRange {
                index: edge,
                bound: self.edge_count(),
            });
        }
        let len = &self.lengths[edge];
        if offset.is_negative() || offset > *len {
            return Err(Error::InvalidArgument(format!(
                "offset {} outside edge {edge} of length {}",
                rational::format(&offset),
                rational::format(len)
            )));
        }
        let (u, v) = self.model.edge(edge);
        Ok(if offset.is_zero() {
            Point::Vertex(u)
        } else if offset == *len {
            Point::Vertex(v)
        } else {
            Point::Edge { edge, offset }
        })
    }

    /// Translates a point on an edge of the model passed to [`MetricGraph::new`].
    pub fn input_point(&self, input_edge: usize, offset: Rational) -> Result<Point> {
        let Some(m) = self.input_edges.get(input_edge) else {
            return Err(Error::IndexOutOfRange {
                index: input_edge,
                bound: self.input_edges.len(),
            });
        };
        if offset.is_negative() || offset > m.length {
            return Err(Error::InvalidArgument(format!(
                "offset {} outside input edge {input_edge}",
                rational::format(&offset)
            )));
        }
        let t = if m.reversed {
            // the chain walked this input edge from its far end
            m.start.clone() + m.length.clone() - offset
        } else {
            m.start.clone() + offset
        };
        self.point(m.edge, t)
    }

    /// The canonical edge containing an input edge.
    pub fn input_edge(&self, input_edge: usize) -> Result<usize> {
        self.input_edges
            .get(input_edge)
            .map(|m| m.edge)
            .ok_or(Error::IndexOutOfRange {
                index: input_edge,
                bound: self.input_edges.len(),
            })
    }

    pub fn input_vertex(&self, v: usize) -> Result<Point> {
        self.input_vertices.get(v).cloned().ok_or(Error::IndexOutOfRange {
            index: v,
            bound: self.input_vertices.len(),
        })
    }

    /// Integer distance to the model vertices along its edge.
    pub fn is_z_point(&self, p: &Point) -> bool {
        match p {
            Point::Vertex(_) => true,
            Point::Edge { edge, offset } => offset.is_integer() && self.lengths[*edge].is_integer(),
        }
    }

    pub fn valence(&self, p: &Point) -> i64 {
        match p {
            Point::Vertex(v) => self.model.valence(*v),
            Point::Edge { .. } => 2,
        }
    }

    /// Offsets of `p` on `edge`, if it lies on the closed edge (two for a
    /// vertex closing a loop).
    pub fn offsets_on(&self, p: &Point, edge: usize) -> Vec<Rational> {
        match p {
            Point::Edge { edge: e, offset } if *e == edge => vec![offset.clone()],
            Point::Edge { .. } => Vec::new(),
            Point::Vertex(v) => {
                let (a, b) = self.model.edge(edge);
                let mut out = Vec::new();
                if a == *v {
                    out.push(Rational::zero());
                }
                if b == *v {
                    out.push(self.lengths[edge].clone());
                }
                out
            }
        }
    }

    pub fn validate_point(&self, p: &Point) -> Result<()> {
        match p {
            Point::Vertex(v) => self.vertex(*v).map(|_| ()),
            Point::Edge { edge, offset } => match self.point(*edge, offset.clone())? {
                Point::Edge { .. } => Ok(()),
                Point::Vertex(_) => Err(Error::InvalidArgument("edge point at an endpoint".into())),
            },
        }
    }

    /// `K = Σ (val(x) - 2)[x]`, supported on model vertices.
    pub fn canonical_divisor(&self) -> MetricDivisor {
        let mut d = MetricDivisor::zero();
        for v in 0..self.vertex_count() {
            d.add_at(Point::Vertex(v), self.model.valence(v) - 2);
        }
        d
    }

    pub fn validate_divisor(&self, d: &MetricDivisor) -> Result<()> {
        d.points().try_for_each(|p| self.validate_point(p))
    }

    /// Number of vertices of the refinement by `q`, if within budget.
    pub(crate) fn refined_size(&self, q: u64, budgets: &Budgets) -> Result<usize> {
        let qr = rational::int(i64::try_from(q).map_err(|_| Error::Overflow("refinement factor"))?);
        let mut total = Rational::from_integer(self.vertex_count().into());
        for l in &self.lengths {
            total += l * &qr - rational::int(1);
        }
        let cap = rational::int(budgets.max_refined_vertices as i64);
        if total > cap {
            return Err(Error::BudgetExceeded(format!(
                "refinement by {q} needs {} vertices (cap {})",
                rational::format(&total),
                budgets.max_refined_vertices
            )));
        }
        rational::to_i64(&total)
            .map(|t| t as usize)
            .ok_or(Error::Overflow("refined size"))
    }

    pub fn label(&self, v: usize) -> String {
        self.model.label(v)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Vertex(v) => write!(f, "v{v}"),
            Point::Edge { edge, offset } => write!(f, "e{edge}@{}", rational::format(offset)),
        }
    }
}

/// Finite formal sum of points with nonzero integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MetricDivisor(BTreeMap<Point, i64>);

impl MetricDivisor {
    pub fn zero() -> Self {
        MetricDivisor(BTreeMap::new())
    }

    pub fn from_points<I: IntoIterator<Item = (Point, i64)>>(points: I) -> Self {
        let mut d = Self::zero();
        for (p, c) in points {
            d.add_at(p, c);
        }
        d
    }

    pub fn point(p: Point) -> Self {
        Self::from_points([(p, 1)])
    }

    pub fn add_at(&mut self, p: Point, c: i64) {
        if c == 0 {
            return;
        }
        let entry = self.0.entry(p.clone()).or_insert(0);
        *entry += c;
        if *entry == 0 {
            self.0.remove(&p);
        }
    }

    pub fn coeff(&self, p: &Point) -> i64 {
        self.0.get(p).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> i64 {
        self.0.values().sum()
    }

    pub fn is_effective(&self) -> bool {
        self.0.values().all(|&c| c >= 0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = &Point> {
        self.0.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, i64)> {
        self.0.iter().map(|(p, &c)| (p, c))
    }

    pub fn support(&self) -> Vec<Point> {
        self.0.keys().cloned().collect()
    }

    /// Supported on ℤ-points.
    pub fn is_z_divisor(&self, g: &MetricGraph) -> bool {
        self.points().all(|p| g.is_z_point(p))
    }
}

impl Add for MetricDivisor {
    type Output = MetricDivisor;
    fn add(mut self, rhs: MetricDivisor) -> MetricDivisor {
        for (p, c) in rhs.0 {
            self.add_at(p, c);
        }
        self
    }
}

impl Neg for MetricDivisor {
    type Output = MetricDivisor;
    fn neg(self) -> MetricDivisor {
        MetricDivisor(self.0.into_iter().map(|(p, c)| (p, -c)).collect())
    }
}

impl Sub for MetricDivisor {
    type Output = MetricDivisor;
    fn sub(self, rhs: MetricDivisor) -> MetricDivisor {
        self + (-rhs)
    }
}

impl Mul<MetricDivisor> for i64 {
    type Output = MetricDivisor;
    fn mul(self, rhs: MetricDivisor) -> MetricDivisor {
        if self == 0 {
            return MetricDivisor::zero();
        }
        MetricDivisor(rhs.0.into_iter().map(|(p, c)| (p, self * c)).collect())
    }
}

impl fmt::Display for MetricDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0.iter().map(|(p, c)| format!("{c}[{p}]")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}
