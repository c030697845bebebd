//! Refinement of a metric graph into a finite graph with unit steps `1/q`.
//!
//! If `div(f)` is supported on points whose offsets are multiples of `1/q`,
//! then every breakpoint of `f` is such a point (a breakpoint has nonzero
//! order), so `f` is linear with integer slope on each step of the
//! refinement. Its values at refined vertices, times `q` and shifted to be
//! integral, form a finite-graph rational function `F` with the same
//! principal divisor: a step of length `1/q` and slope `s` changes `q·f` by
//! `s`. Conversely `F/q` extended linearly is a PL function with integer
//! slopes. Linear equivalence of `1/q`-divisors on the metric graph is
//! therefore linear equivalence on the refinement.

use num_traits::Zero;

use super::{MetricDivisor, MetricGraph, PlFunction, Point};
use crate::budget::Budgets;
use crate::error::{Error, Result};
use crate::graph::{Divisor, FiniteGraph, RationalFunction};
use crate::rational::{self, Rational};

#[derive(Clone, Debug)]
pub struct Refinement {
    q: u64,
    graph: FiniteGraph,
    /// Refined vertices along each edge, offset 0 to the far end.
    chains: Vec<Vec<usize>>,
    points: Vec<Point>,
}

fn q_rational(q: u64) -> Result<Rational> {
    Ok(rational::int(i64::try_from(q).map_err(|_| Error::Overflow("refinement factor"))?))
}

/// Least `q` making every edge length and every listed offset a multiple of `1/q`.
pub fn refinement_factor<'a, I: IntoIterator<Item = &'a Point>>(g: &MetricGraph, points: I) -> Result<u64> {
    let mut q = rational::denominator_lcm(g.lengths())?;
    for p in points {
        if let Point::Edge { offset, .. } = p {
            q = rational::lcm_u64(q, rational::denominator_lcm([offset])?);
        }
    }
    Ok(q)
}

pub fn refine(g: &MetricGraph, q: u64) -> Result<Refinement> {
    refine_with(g, q, &Budgets::default())
}

pub(crate) fn refine_with(g: &MetricGraph, q: u64, budgets: &Budgets) -> Result<Refinement> {
    if q == 0 {
        return Err(Error::InvalidArgument("refinement factor must be positive".into()));
    }
    let qr = q_rational(q)?;
    let mut steps = Vec::with_capacity(g.edge_count());
    for (e, l) in g.lengths().iter().enumerate() {
        let k = l * &qr;
        if !k.is_integer() {
            return Err(Error::NonIntegralRefinement {
                factor: q,
                what: format!("length of edge {e}"),
            });
        }
        steps.push(rational::to_i64(&k).ok_or(Error::Overflow("refined edge"))? as usize);
    }
    let total = g.refined_size(q, budgets)?;
    let mut points: Vec<Point> = (0..g.vertex_count()).map(Point::Vertex).collect();
    let mut labels: Vec<String> = (0..g.vertex_count()).map(|v| g.label(v)).collect();
    let mut edges = Vec::with_capacity(total);
    let mut chains = Vec::with_capacity(g.edge_count());
    for (e, &k) in steps.iter().enumerate() {
        let (u, v) = g.model().edge(e);
        let mut chain = vec![u];
        for j in 1..k {
            let p = Point::Edge {
                edge: e,
                offset: rational::int(j as i64) / &qr,
            };
            chain.push(points.len());
            labels.push(p.to_string());
            points.push(p);
        }
        chain.push(v);
        edges.extend(chain.windows(2).map(|w| (w[0], w[1])));
        chains.push(chain);
    }
    let graph = FiniteGraph::new(points.len(), edges)?.with_labels(labels)?;
    Ok(Refinement {
        q,
        graph,
        chains,
        points,
    })
}

impl Refinement {
    pub fn factor(&self) -> u64 {
        self.q
    }

    pub fn graph(&self) -> &FiniteGraph {
        &self.graph
    }

    pub fn chain(&self, e: usize) -> &[usize] {
        &self.chains[e]
    }

    pub fn point_of(&self, v: usize) -> &Point {
        &self.points[v]
    }

    pub fn vertex_of(&self, p: &Point) -> Result<usize> {
        match p {
            Point::Vertex(v) => Ok(*v),
            Point::Edge { edge, offset } => {
                let k = offset * q_rational(self.q)?;
                if !k.is_integer() {
                    return Err(Error::NonIntegralRefinement {
                        factor: self.q,
                        what: format!("point {p}"),
                    });
                }
                let k = rational::to_i64(&k).ok_or(Error::Overflow("refined index"))? as usize;
                self.chains
                    .get(*edge)
                    .and_then(|c| c.get(k))
                    .copied()
                    .ok_or(Error::IndexOutOfRange {
                        index: *edge,
                        bound: self.chains.len(),
                    })
            }
        }
    }

    pub fn divisor_to_graph(&self, d: &MetricDivisor) -> Result<Divisor> {
        let mut out = Divisor::zero(self.graph.vertex_count());
        for (p, c) in d.iter() {
            out.0[self.vertex_of(p)?] += c;
        }
        Ok(out)
    }

    pub fn divisor_from_graph(&self, d: &Divisor) -> MetricDivisor {
        MetricDivisor::from_points(
            d.coeffs()
                .iter()
                .enumerate()
                .map(|(v, &c)| (self.points[v].clone(), c)),
        )
    }

    /// `base + F/q`, linear on each refined step.
    pub fn lift(&self, g: &MetricGraph, f: &RationalFunction, base: &Rational) -> Result<PlFunction> {
        let qr = q_rational(self.q)?;
        let pieces = self
            .chains
            .iter()
            .map(|chain| {
                chain
                    .iter()
                    .enumerate()
                    .map(|(j, &v)| (rational::int(j as i64) / &qr, base + rational::int(f[v]) / &qr))
                    .collect()
            })
            .collect();
        PlFunction::new(g, pieces)
    }

    /// `(F, base)` with `f = base + F/q`, when `f` breaks only at refined vertices.
    pub fn restrict(&self, g: &MetricGraph, f: &PlFunction) -> Result<(RationalFunction, Rational)> {
        let qr = q_rational(self.q)?;
        for p in f.breakpoints() {
            self.vertex_of(&p)?;
        }
        let base = f.vertex_value(g, 0);
        let mut values = vec![0i64; self.graph.vertex_count()];
        for (v, p) in self.points.iter().enumerate() {
            let scaled = (f.eval(g, p) - &base) * &qr;
            values[v] = rational::to_i64(&scaled).ok_or(Error::NonIntegralRefinement {
                factor: self.q,
                what: format!("value at {p}"),
            })?;
        }
        Ok((RationalFunction(values), base))
    }
}

/// A PL function `f` with `D - D' = div(f)` and minimum 0, or `None`.
pub fn linear_equiv_metric(g: &MetricGraph, d: &MetricDivisor, d2: &MetricDivisor) -> Result<Option<PlFunction>> {
    linear_equiv_metric_with(g, d, d2, &Budgets::default())
}

pub fn linear_equiv_metric_with(
    g: &MetricGraph,
    d: &MetricDivisor,
    d2: &MetricDivisor,
    budgets: &Budgets,
) -> Result<Option<PlFunction>> {
    g.validate_divisor(d)?;
    g.validate_divisor(d2)?;
    if d.degree() != d2.degree() {
        return Ok(None);
    }
    let q = refinement_factor(g, d.points().chain(d2.points()))?;
    let refined = refine_with(g, q, budgets)?;
    let a = refined.divisor_to_graph(d)?;
    let b = refined.divisor_to_graph(d2)?;
    let Some(f) = refined.graph().linear_equiv(&a, &b)? else {
        return Ok(None);
    };
    let lifted = refined.lift(g, &f, &Rational::zero())?;
    debug_assert_eq!(lifted.div(g), d.clone() - d2.clone());
    Ok(Some(lifted))
}
