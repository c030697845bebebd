//! Continuous piecewise linear functions with integer slopes.

use num_traits::{Signed, Zero};

use super::{MetricDivisor, MetricGraph, Point};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Per edge, breakpoints `(offset, value)` from offset 0 to the edge length.
/// Interior breakpoints are kept only where the slope changes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlFunction {
    pieces: Vec<Vec<(Rational, Rational)>>,
}

fn slope(a: &(Rational, Rational), b: &(Rational, Rational)) -> Rational {
    (&b.1 - &a.1) / (&b.0 - &a.0)
}

fn simplify(points: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(points.len());
    for p in points {
        if let Some(last) = out.last() {
            if last.0 == p.0 {
                continue;
            }
        }
        if out.len() >= 2 {
            let n = out.len();
            if slope(&out[n - 2], &out[n - 1]) == slope(&out[n - 1], &p) {
                out.pop();
            }
        }
        out.push(p);
    }
    out
}

fn eval_pieces(pieces: &[(Rational, Rational)], t: &Rational) -> Rational {
    let i = pieces.partition_point(|(o, _)| o <= t);
    if i == 0 {
        return pieces[0].1.clone();
    }
    if i == pieces.len() {
        return pieces[i - 1].1.clone();
    }
    let (a, b) = (&pieces[i - 1], &pieces[i]);
    &a.1 + slope(a, b) * (t - &a.0)
}

impl PlFunction {
    pub fn new(g: &MetricGraph, pieces: Vec<Vec<(Rational, Rational)>>) -> Result<Self> {
        if pieces.len() != g.edge_count() {
            return Err(Error::InvalidPl(format!(
                "expected {} edges, found {}",
                g.edge_count(),
                pieces.len()
            )));
        }
        for (e, p) in pieces.iter().enumerate() {
            if p.len() < 2 {
                return Err(Error::InvalidPl(format!("edge {e} needs both endpoints")));
            }
            if !p[0].0.is_zero() || p[p.len() - 1].0 != *g.length(e) {
                return Err(Error::InvalidPl(format!("edge {e} breakpoints must span the edge")));
            }
            for w in p.windows(2) {
                if w[1].0 <= w[0].0 {
                    return Err(Error::InvalidPl(format!("edge {e} offsets must increase")));
                }
                if !slope(&w[0], &w[1]).is_integer() {
                    return Err(Error::InvalidPl(format!("edge {e} has a non-integer slope")));
                }
            }
        }
        let f = PlFunction {
            pieces: pieces.into_iter().map(simplify).collect(),
        };
        for v in 0..g.vertex_count() {
            let mut values = g.incidences(v).iter().map(|i| f.end_value(i.edge, i.end));
            if let Some(first) = values.next() {
                if values.any(|x| x != first) {
                    return Err(Error::InvalidPl(format!("discontinuous at vertex {v}")));
                }
            }
        }
        Ok(f)
    }

    pub fn constant(g: &MetricGraph, c: Rational) -> Self {
        PlFunction {
            pieces: g
                .lengths()
                .iter()
                .map(|l| vec![(Rational::zero(), c.clone()), (l.clone(), c.clone())])
                .collect(),
        }
    }

    /// Linear on every edge with the given vertex values.
    pub fn from_vertex_values(g: &MetricGraph, values: &[Rational]) -> Result<Self> {
        if values.len() != g.vertex_count() {
            return Err(Error::SizeMismatch {
                expected: g.vertex_count(),
                found: values.len(),
            });
        }
        let pieces = (0..g.edge_count())
            .map(|e| {
                let (u, v) = g.model().edge(e);
                vec![
                    (Rational::zero(), values[u].clone()),
                    (g.length(e).clone(), values[v].clone()),
                ]
            })
            .collect();
        Self::new(g, pieces)
    }

    pub fn pieces(&self) -> &[Vec<(Rational, Rational)>] {
        &self.pieces
    }

    pub fn edge_count(&self) -> usize {
        self.pieces.len()
    }

    fn end_value(&self, e: usize, end: u8) -> Rational {
        let p = &self.pieces[e];
        if end == 0 {
            p[0].1.clone()
        } else {
            p[p.len() - 1].1.clone()
        }
    }

    pub fn eval_on_edge(&self, e: usize, t: &Rational) -> Rational {
        eval_pieces(&self.pieces[e], t)
    }

    pub fn eval(&self, g: &MetricGraph, p: &Point) -> Rational {
        match p {
            Point::Vertex(v) => self.vertex_value(g, *v),
            Point::Edge { edge, offset } => self.eval_on_edge(*edge, offset),
        }
    }

    pub fn vertex_value(&self, g: &MetricGraph, v: usize) -> Rational {
        match g.incidences(v).first() {
            Some(i) => self.end_value(i.edge, i.end),
            // a single point: every function is its own constant
            None => Rational::zero(),
        }
    }

    /// Slopes of the linear pieces of edge `e`, in order.
    pub fn slopes(&self, e: usize) -> Vec<i64> {
        self.pieces[e]
            .windows(2)
            .map(|w| rational::to_i64(&slope(&w[0], &w[1])).expect("validated integer slope"))
            .collect()
    }

    /// Interior breakpoints of every edge.
    pub fn breakpoints(&self) -> Vec<Point> {
        let mut out = Vec::new();
        for (e, p) in self.pieces.iter().enumerate() {
            for (t, _) in &p[1..p.len() - 1] {
                out.push(Point::Edge {
                    edge: e,
                    offset: t.clone(),
                });
            }
        }
        out
    }

    /// Sum of outgoing slopes at `p`.
    pub fn ord(&self, g: &MetricGraph, p: &Point) -> i64 {
        match p {
            Point::Vertex(v) => g
                .incidences(*v)
                .iter()
                .map(|i| {
                    let s = self.slopes(i.edge);
                    if i.end == 0 {
                        s[0]
                    } else {
                        -s[s.len() - 1]
                    }
                })
                .sum(),
            Point::Edge { edge, offset } => {
                let pts = &self.pieces[*edge];
                match pts.iter().position(|(t, _)| t == offset) {
                    Some(i) if i > 0 && i + 1 < pts.len() => {
                        let s = self.slopes(*edge);
                        s[i] - s[i - 1]
                    }
                    _ => 0,
                }
            }
        }
    }

    pub fn div(&self, g: &MetricGraph) -> MetricDivisor {
        let mut d = MetricDivisor::zero();
        for v in 0..g.vertex_count() {
            d.add_at(Point::Vertex(v), self.ord(g, &Point::Vertex(v)));
        }
        for p in self.breakpoints() {
            let c = self.ord(g, &p);
            d.add_at(p, c);
        }
        d
    }

    /// Per edge: the endpoint difference equals `Σ slope · length` of its pieces.
    pub fn telescopes(&self) -> bool {
        self.pieces.iter().enumerate().all(|(e, p)| {
            let total: Rational = self
                .slopes(e)
                .iter()
                .zip(p.windows(2))
                .map(|(&s, w)| rational::int(s) * (&w[1].0 - &w[0].0))
                .sum();
            total == &p[p.len() - 1].1 - &p[0].1
        })
    }

    pub fn min_value(&self) -> Rational {
        self.pieces
            .iter()
            .flat_map(|p| p.iter().map(|(_, v)| v))
            .min()
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn max_value(&self) -> Rational {
        self.pieces
            .iter()
            .flat_map(|p| p.iter().map(|(_, v)| v))
            .max()
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.min_value() == self.max_value()
    }

    pub fn shifted(&self, c: &Rational) -> Self {
        self.map(|v| v + c)
    }

    pub fn scaled(&self, k: i64) -> Self {
        let k = rational::int(k);
        self.map(|v| v * &k)
    }

    /// Shift so that the minimum is 0.
    pub fn normalized(&self) -> Self {
        let m = self.min_value();
        self.map(|v| v - &m)
    }

    fn map(&self, f: impl Fn(&Rational) -> Rational) -> Self {
        PlFunction {
            pieces: self
                .pieces
                .iter()
                .map(|p| simplify(p.iter().map(|(t, v)| (t.clone(), f(v))).collect()))
                .collect(),
        }
    }

    fn check_pair(&self, other: &PlFunction) -> Result<()> {
        let same = self.pieces.len() == other.pieces.len()
            && self
                .pieces
                .iter()
                .zip(&other.pieces)
                .all(|(a, b)| a[a.len() - 1].0 == b[b.len() - 1].0);
        if same {
            Ok(())
        } else {
            Err(Error::InvalidPl("functions live on different metric graphs".into()))
        }
    }

    fn merged_offsets(a: &[(Rational, Rational)], b: &[(Rational, Rational)]) -> Vec<Rational> {
        let mut ts: Vec<Rational> = a.iter().chain(b).map(|(t, _)| t.clone()).collect();
        ts.sort();
        ts.dedup();
        ts
    }

    fn combine(&self, other: &PlFunction, op: impl Fn(&Rational, &Rational) -> Rational) -> Result<Self> {
        self.check_pair(other)?;
        let pieces = self
            .pieces
            .iter()
            .zip(&other.pieces)
            .map(|(a, b)| {
                let ts = Self::merged_offsets(a, b);
                simplify(
                    ts.into_iter()
                        .map(|t| {
                            let v = op(&eval_pieces(a, &t), &eval_pieces(b, &t));
                            (t, v)
                        })
                        .collect(),
                )
            })
            .collect();
        Ok(PlFunction { pieces })
    }

    /// Tropical product: pointwise sum.
    pub fn odot(&self, other: &PlFunction) -> Result<Self> {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &PlFunction) -> Result<Self> {
        self.combine(other, |a, b| a - b)
    }

    fn envelope(&self, other: &PlFunction, take_max: bool) -> Result<Self> {
        self.check_pair(other)?;
        let pick = |x: Rational, y: Rational| {
            if (x >= y) == take_max {
                x
            } else {
                y
            }
        };
        let pieces = self
            .pieces
            .iter()
            .zip(&other.pieces)
            .map(|(a, b)| {
                let ts = Self::merged_offsets(a, b);
                let mut out = Vec::with_capacity(ts.len() * 2);
                for (i, t) in ts.iter().enumerate() {
                    let (fa, fb) = (eval_pieces(a, t), eval_pieces(b, t));
                    if i > 0 {
                        let s = &ts[i - 1];
                        let d0 = eval_pieces(a, s) - eval_pieces(b, s);
                        let d1 = &fa - &fb;
                        if (d0.is_positive() && d1.is_negative()) || (d0.is_negative() && d1.is_positive()) {
                            let x = s + &d0 * (t - s) / (&d0 - &d1);
                            let v = eval_pieces(a, &x);
                            out.push((x, v));
                        }
                    }
                    out.push((t.clone(), pick(fa, fb)));
                }
                simplify(out)
            })
            .collect();
        Ok(PlFunction { pieces })
    }

    /// Tropical sum: pointwise maximum.
    pub fn oplus(&self, other: &PlFunction) -> Result<Self> {
        self.envelope(other, true)
    }

    pub fn min(&self, other: &PlFunction) -> Result<Self> {
        self.envelope(other, false)
    }

    /// Pointwise `min(f, c)`.
    pub fn clamp_above(&self, g: &MetricGraph, c: &Rational) -> Self {
        self.min(&PlFunction::constant(g, c.clone()))
            .expect("same metric graph")
    }

    pub fn format_breakpoints(&self) -> Vec<Vec<(String, String)>> {
        self.pieces
            .iter()
            .map(|p| p.iter().map(|(t, v)| (rational::format(t), rational::format(v))).collect())
            .collect()
    }
}

/// `div(f) = Σ ord_x(f)[x]` after checking that `f` lives on `g`.
pub fn ord_div_metric(g: &MetricGraph, f: &PlFunction) -> Result<MetricDivisor> {
    let f = PlFunction::new(g, f.pieces.clone())?;
    Ok(f.div(g))
}
