//! Subgraphs, chip-firing moves and the extremality test on metric graphs.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};

use super::{MetricDivisor, MetricGraph, PlFunction, Point};
use crate::budget::Budgets;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// `(edge, from, to)`
type Span = (usize, Rational, Rational);

/// A finite union of closed edge intervals and vertices.
///
/// Normal form: intervals on each edge are disjoint and sorted, an interval
/// reaching an edge end puts that vertex in `vertices`, and degenerate
/// intervals at edge ends are dropped in favour of the vertex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MetricSubgraph {
    vertices: BTreeSet<usize>,
    intervals: BTreeMap<usize, Vec<(Rational, Rational)>>,
}

impl MetricSubgraph {
    pub fn new<V, I>(g: &MetricGraph, vertices: V, intervals: I) -> Result<Self>
    where
        V: IntoIterator<Item = usize>,
        I: IntoIterator<Item = (usize, Rational, Rational)>,
    {
        let mut vs = BTreeSet::new();
        for v in vertices {
            g.vertex(v)?;
            vs.insert(v);
        }
        let mut raw: BTreeMap<usize, Vec<(Rational, Rational)>> = BTreeMap::new();
        for (e, a, b) in intervals {
            if e >= g.edge_count() {
                return Err(Error::IndexOutOfRange {
                    index: e,
                    bound: g.edge_count(),
                });
            }
            if a.is_negative() || b < a || b > *g.length(e) {
                return Err(Error::InvalidArgument(format!(
                    "interval [{}, {}] does not lie on edge {e}",
                    rational::format(&a),
                    rational::format(&b)
                )));
            }
            raw.entry(e).or_default().push((a, b));
        }
        Ok(Self::normalise(g, vs, raw))
    }

    fn normalise(
        g: &MetricGraph,
        mut vertices: BTreeSet<usize>,
        raw: BTreeMap<usize, Vec<(Rational, Rational)>>,
    ) -> Self {
        let mut intervals = BTreeMap::new();
        for (e, mut list) in raw {
            list.sort();
            let mut merged: Vec<(Rational, Rational)> = Vec::new();
            for (a, b) in list {
                match merged.last_mut() {
                    Some(last) if a <= last.1 => {
                        if b > last.1 {
                            last.1 = b;
                        }
                    }
                    _ => merged.push((a, b)),
                }
            }
            let len = g.length(e).clone();
            let (u, v) = g.model().edge(e);
            if merged.first().is_some_and(|(a, _)| a.is_zero()) {
                vertices.insert(u);
            }
            if merged.last().is_some_and(|(_, b)| *b == len) {
                vertices.insert(v);
            }
            merged.retain(|(a, b)| !(a == b && (a.is_zero() || *a == len)));
            if !merged.is_empty() {
                intervals.insert(e, merged);
            }
        }
        MetricSubgraph { vertices, intervals }
    }

    pub fn point(g: &MetricGraph, p: &Point) -> Result<Self> {
        g.validate_point(p)?;
        match p {
            Point::Vertex(v) => Self::new(g, [*v], []),
            Point::Edge { edge, offset } => Self::new(g, [], [(*edge, offset.clone(), offset.clone())]),
        }
    }

    pub fn whole(g: &MetricGraph) -> Self {
        Self::normalise(
            g,
            (0..g.vertex_count()).collect(),
            (0..g.edge_count())
                .map(|e| (e, vec![(Rational::zero(), g.length(e).clone())]))
                .collect(),
        )
    }

    pub fn vertices(&self) -> &BTreeSet<usize> {
        &self.vertices
    }

    pub fn intervals(&self) -> &BTreeMap<usize, Vec<(Rational, Rational)>> {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.intervals.is_empty()
    }

    pub fn is_whole(&self, g: &MetricGraph) -> bool {
        self.vertices.len() == g.vertex_count()
            && (0..g.edge_count()).all(|e| {
                self.intervals
                    .get(&e)
                    .is_some_and(|l| l.len() == 1 && l[0].0.is_zero() && l[0].1 == *g.length(e))
            })
    }

    pub fn contains(&self, p: &Point) -> bool {
        match p {
            Point::Vertex(v) => self.vertices.contains(v),
            Point::Edge { edge, offset } => self
                .intervals
                .get(edge)
                .is_some_and(|l| l.iter().any(|(a, b)| a <= offset && offset <= b)),
        }
    }

    pub fn union(&self, g: &MetricGraph, other: &MetricSubgraph) -> MetricSubgraph {
        let vertices = self.vertices.union(&other.vertices).copied().collect();
        let mut raw = self.intervals.clone();
        for (e, l) in &other.intervals {
            raw.entry(*e).or_default().extend(l.iter().cloned());
        }
        Self::normalise(g, vertices, raw)
    }

    /// Offsets on edge `e` where the subgraph starts or stops.
    fn cut_offsets(&self, g: &MetricGraph, e: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(), g.length(e).clone()];
        if let Some(l) = self.intervals.get(&e) {
            for (a, b) in l {
                out.push(a.clone());
                out.push(b.clone());
            }
        }
        out
    }

    pub fn describe(&self, g: &MetricGraph) -> String {
        let mut parts: Vec<String> = self.vertices.iter().map(|&v| g.label(v)).collect();
        for (e, l) in &self.intervals {
            for (a, b) in l {
                if a == b {
                    parts.push(format!("e{e}@{}", rational::format(a)));
                } else {
                    parts.push(format!("e{e}[{}, {}]", rational::format(a), rational::format(b)));
                }
            }
        }
        format!("{{{}}}", parts.join(", "))
    }

    /// Distance from each model vertex, by Dijkstra over exact lengths.
    fn vertex_distances(&self, g: &MetricGraph) -> Vec<Option<Rational>> {
        let n = g.vertex_count();
        let mut dist: Vec<Option<Rational>> = vec![None; n];
        let improve = |slot: &mut Option<Rational>, d: Rational| {
            if slot.as_ref().is_none_or(|cur| d < *cur) {
                *slot = Some(d);
            }
        };
        for &v in &self.vertices {
            dist[v] = Some(Rational::zero());
        }
        for (&e, l) in &self.intervals {
            let (u, w) = g.model().edge(e);
            improve(&mut dist[u], l[0].0.clone());
            improve(&mut dist[w], g.length(e) - &l[l.len() - 1].1);
        }
        let mut done = vec![false; n];
        loop {
            let next = (0..n)
                .filter(|&v| !done[v] && dist[v].is_some())
                .min_by(|&a, &b| dist[a].cmp(&dist[b]));
            let Some(v) = next else { break };
            done[v] = true;
            let dv = dist[v].clone().expect("reached");
            for inc in g.incidences(v) {
                let (a, b) = g.model().edge(inc.edge);
                let far = if inc.end == 0 { b } else { a };
                improve(&mut dist[far], &dv + g.length(inc.edge));
            }
        }
        dist
    }
}

/// `CF(Γ', l)(x) = -min(l, dist(x, Γ'))`
pub fn cf_move(g: &MetricGraph, sub: &MetricSubgraph, l: &Rational) -> Result<PlFunction> {
    if sub.is_empty() {
        return Err(Error::EmptySubgraph);
    }
    if sub.is_whole(g) {
        return Err(Error::NotProper);
    }
    if !l.is_positive() {
        return Err(Error::InvalidArgument("l must be positive".into()));
    }
    let dist = sub.vertex_distances(g);
    let mut pieces = Vec::with_capacity(g.edge_count());
    for e in 0..g.edge_count() {
        let (u, w) = g.model().edge(e);
        let len = g.length(e).clone();
        let own = sub.intervals.get(&e).cloned().unwrap_or_default();
        // d(t) = min over lines of slope +1 (c + t), slope -1 (c - t), and 0 on own intervals
        let mut rising: Vec<Rational> = own.iter().map(|(_, b)| -b.clone()).collect();
        let mut falling: Vec<Rational> = own.iter().map(|(a, _)| a.clone()).collect();
        if let Some(du) = &dist[u] {
            rising.push(du.clone());
        }
        if let Some(dw) = &dist[w] {
            falling.push(dw + &len);
        }
        let d_at = |t: &Rational| -> Rational {
            let mut best: Option<Rational> = None;
            let mut take = |x: Rational| {
                if best.as_ref().is_none_or(|b| x < *b) {
                    best = Some(x);
                }
            };
            for (a, b) in &own {
                take(if t < a {
                    a - t
                } else if t > b {
                    t - b
                } else {
                    Rational::zero()
                });
            }
            if let Some(du) = &dist[u] {
                take(du + t);
            }
            if let Some(dw) = &dist[w] {
                take(dw + &len - t);
            }
            best.expect("connected graph reaches a nonempty subgraph")
        };
        let mut ts = vec![Rational::zero(), len.clone()];
        for (a, b) in &own {
            ts.push(a.clone());
            ts.push(b.clone());
        }
        for c in &rising {
            ts.push(-c.clone());
            ts.push(l - c);
            for c2 in &falling {
                ts.push((c2 - c) / rational::int(2));
            }
        }
        for c in &falling {
            ts.push(c.clone());
            ts.push(c - l);
        }
        ts.retain(|t| !t.is_negative() && *t <= len);
        ts.sort();
        ts.dedup();
        pieces.push(
            ts.into_iter()
                .map(|t| {
                    let d = d_at(&t);
                    let v = if d < *l { -d } else { -l.clone() };
                    (t, v)
                })
                .collect(),
        );
    }
    PlFunction::new(g, pieces)
}

/// One third of the smallest gap, along any edge, between vertices, points
/// of `supp(E)` and the ends of the subgraph's intervals.
pub fn firing_threshold(g: &MetricGraph, e: &MetricDivisor, sub: &MetricSubgraph) -> Rational {
    let mut gap: Option<Rational> = None;
    for edge in 0..g.edge_count() {
        let mut ts = sub.cut_offsets(g, edge);
        for p in e.points() {
            ts.extend(g.offsets_on(p, edge));
        }
        ts.sort();
        ts.dedup();
        for w in ts.windows(2) {
            let d = &w[1] - &w[0];
            if gap.as_ref().is_none_or(|m| d < *m) {
                gap = Some(d);
            }
        }
    }
    gap.unwrap_or_else(|| rational::int(1)) / rational::int(3)
}

pub fn can_fire_metric(g: &MetricGraph, e: &MetricDivisor, sub: &MetricSubgraph) -> Result<bool> {
    can_fire_metric_with(g, e, sub, &firing_threshold(g, e, sub))
}

/// Firing test with an explicit `l`.
pub fn can_fire_metric_with(g: &MetricGraph, e: &MetricDivisor, sub: &MetricSubgraph, l: &Rational) -> Result<bool> {
    let cf = cf_move(g, sub, l)?;
    Ok((e.clone() + cf.div(g)).is_effective())
}

struct Components {
    /// Closure of each connected component of `Γ \ supp(E)`.
    closures: Vec<MetricSubgraph>,
    support: Vec<MetricSubgraph>,
}

fn components(g: &MetricGraph, e: &MetricDivisor) -> Result<Components> {
    let support = e.support();
    let cut_vertex: BTreeSet<usize> = support
        .iter()
        .filter_map(|p| match p {
            Point::Vertex(v) => Some(*v),
            Point::Edge { .. } => None,
        })
        .collect();
    // union-find over model vertices followed by edge segments
    let n = g.vertex_count();
    let mut segments: Vec<(usize, Rational, Rational)> = Vec::new();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut c = x;
        while parent[c] != r {
            let next = parent[c];
            parent[c] = r;
            c = next;
        }
        r
    }
    for edge in 0..g.edge_count() {
        let len = g.length(edge).clone();
        let mut cuts: Vec<Rational> = support
            .iter()
            .filter_map(|p| match p {
                Point::Edge { edge: pe, offset } if *pe == edge => Some(offset.clone()),
                _ => None,
            })
            .collect();
        cuts.push(Rational::zero());
        cuts.push(len.clone());
        cuts.sort();
        let (u, w) = g.model().edge(edge);
        for pair in cuts.windows(2) {
            let id = parent.len();
            parent.push(id);
            segments.push((edge, pair[0].clone(), pair[1].clone()));
            if pair[0].is_zero() && !cut_vertex.contains(&u) {
                let (a, b) = (find(&mut parent, id), find(&mut parent, u));
                parent[a] = b;
            }
            if pair[1] == len && !cut_vertex.contains(&w) {
                let (a, b) = (find(&mut parent, id), find(&mut parent, w));
                parent[a] = b;
            }
        }
    }
    let mut groups: BTreeMap<usize, (Vec<usize>, Vec<Span>)> = BTreeMap::new();
    for v in (0..n).filter(|v| !cut_vertex.contains(v)) {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().0.push(v);
    }
    for (i, s) in segments.into_iter().enumerate() {
        let r = find(&mut parent, n + i);
        groups.entry(r).or_default().1.push(s);
    }
    let closures = groups
        .into_values()
        .map(|(vs, segs)| MetricSubgraph::new(g, vs, segs))
        .collect::<Result<Vec<_>>>()?;
    let support = support
        .iter()
        .map(|p| MetricSubgraph::point(g, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(Components { closures, support })
}

/// Every proper subgraph that can fire on the effective divisor `E`.
///
/// A firing subgraph has its boundary inside `supp(E)`, since each boundary
/// point loses chips under `CF`. Its trace on `Γ \ supp(E)` is then open and
/// closed there, hence a union of components, and the subgraph is the
/// closure of that union together with some support points.
pub fn firing_subgraphs(g: &MetricGraph, e: &MetricDivisor, budgets: &Budgets) -> Result<Vec<MetricSubgraph>> {
    g.validate_divisor(e)?;
    if !e.is_effective() {
        return Err(Error::InvalidArgument("firing needs an effective divisor".into()));
    }
    let parts = components(g, e)?;
    let pieces: Vec<&MetricSubgraph> = parts.closures.iter().chain(&parts.support).collect();
    if pieces.len() > budgets.max_firing_bits {
        return Err(Error::BudgetExceeded(format!(
            "{} components and support points exceed {} firing bits",
            pieces.len(),
            budgets.max_firing_bits
        )));
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << pieces.len()) {
        let mut sub = MetricSubgraph::normalise(g, BTreeSet::new(), BTreeMap::new());
        for (i, p) in pieces.iter().enumerate() {
            if mask >> i & 1 == 1 {
                sub = sub.union(g, p);
            }
        }
        if sub.is_whole(g) || !seen.insert(sub.clone()) {
            continue;
        }
        if can_fire_metric(g, e, &sub)? {
            out.push(sub);
        }
    }
    out.sort();
    Ok(out)
}

/// Two firing subgraphs covering `Γ` for `E = D + div(f)`, if any.
pub fn covering_subgraph_pair(
    g: &MetricGraph,
    d: &MetricDivisor,
    f: &PlFunction,
    budgets: &Budgets,
) -> Result<Option<(MetricSubgraph, MetricSubgraph)>> {
    let e = d.clone() + super::pl::ord_div_metric(g, f)?;
    if !e.is_effective() {
        return Err(Error::NotMember);
    }
    let firing = firing_subgraphs(g, &e, budgets)?;
    for (i, a) in firing.iter().enumerate() {
        for b in &firing[i..] {
            if a.union(g, b).is_whole(g) {
                return Ok(Some((a.clone(), b.clone())));
            }
        }
    }
    Ok(None)
}

pub fn is_extremal_metric(g: &MetricGraph, d: &MetricDivisor, f: &PlFunction, budgets: &Budgets) -> Result<bool> {
    Ok(covering_subgraph_pair(g, d, f, budgets)?.is_none())
}
