//! Oracles and property suites shared by the integration tests.
//!
//! Everything here recomputes its answer by a different route from the
//! library: raw edge lists instead of the graph type's Laplacian, exhaustive
//! boxes instead of polytope bounds, an independent subdivision instead of
//! `refine`, and slopes read off breakpoints instead of `PlFunction::div`.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use canonring::linear_system::{enumerate_linear_system, extremals};
use canonring::metric::{
    can_fire_metric_with, firing_subgraphs, firing_threshold, refine, MetricDivisor, MetricGraph, MetricSubgraph,
    PlFunction, Point,
};
use canonring::rational::{self, frac, int, Rational};
use canonring::semiring::{decompose, oplus_cover};
use canonring::smith::solve_integer;
use canonring::{Budgets, Divisor, FiniteGraph, RationalFunction, RgdElement};
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use proptest::sample::Index;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestRunner};

// ---------------------------------------------------------------- graphs

/// `ord_x(f) = Σ (f(y) - f(x))` straight from the edge list.
pub fn div_oracle(n: usize, edges: &[(usize, usize)], f: &[i64]) -> Vec<i64> {
    let mut d = vec![0; n];
    for &(u, v) in edges {
        d[u] += f[v] - f[u];
        d[v] += f[u] - f[v];
    }
    d
}

pub fn member_oracle(g: &FiniteGraph, d: &[i64], f: &[i64]) -> bool {
    div_oracle(g.vertex_count(), g.edges(), f)
        .iter()
        .zip(d)
        .all(|(a, b)| a + b >= 0)
}

fn diameter(g: &FiniteGraph) -> i64 {
    let n = g.vertex_count();
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in g.edges() {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut best = 0;
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        dist[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        best = best.max(*dist.iter().max().unwrap());
    }
    best as i64
}

/// Height bound for the box: with `f` of minimum 0 and maximum `M` in
/// `R(G, D)`, summing `f·ord(f)` gives `Σ_e (Δ_e f)² ≤ M·deg D⁺`, and a
/// shortest path from a minimum to a maximum gives `M² ≤ diam·Σ_e (Δ_e f)²`.
pub fn box_bound(g: &FiniteGraph, d: &[i64]) -> i64 {
    let pos: i64 = d.iter().filter(|&&c| c > 0).sum();
    diameter(g) * pos
}

/// All functions with minimum 0 in `[0, B]^V` satisfying `D + div f ≥ 0`.
pub fn box_enumerate(g: &FiniteGraph, d: &[i64]) -> BTreeSet<Vec<i64>> {
    let n = g.vertex_count();
    let b = box_bound(g, d);
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in g.edges() {
        nbrs[u].push(v);
        nbrs[v].push(u);
    }
    // vertex x can be checked once x and all its neighbours are assigned
    let ready: Vec<Vec<usize>> = (0..n)
        .map(|k| {
            (0..n)
                .filter(|&x| {
                    let last = nbrs[x].iter().copied().chain([x]).max().unwrap();
                    last == k
                })
                .collect()
        })
        .collect();
    let mut out = BTreeSet::new();
    let mut f = vec![0i64; n];
    fn rec(
        k: usize,
        f: &mut Vec<i64>,
        b: i64,
        d: &[i64],
        nbrs: &[Vec<usize>],
        ready: &[Vec<usize>],
        out: &mut BTreeSet<Vec<i64>>,
    ) {
        if k == f.len() {
            if f.iter().min() == Some(&0) {
                out.insert(f.clone());
            }
            return;
        }
        for v in 0..=b {
            f[k] = v;
            let ok = ready[k]
                .iter()
                .all(|&x| nbrs[x].iter().map(|&y| f[y] - f[x]).sum::<i64>() + d[x] >= 0);
            if ok {
                rec(k + 1, f, b, d, nbrs, ready, out);
            }
        }
    }
    rec(0, &mut f, b, d, &nbrs, &ready, &mut out);
    out
}

/// Loopless connected multigraphs with at most `max_v` vertices and
/// `max_e` edges, one per isomorphism class.
pub fn small_graphs(max_v: usize, max_e: usize) -> Vec<FiniteGraph> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for n in 1..=max_v {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let perms = permutations(n);
        for k in 0..=max_e {
            for multiset in multisets(pairs.len(), k) {
                let edges: Vec<(usize, usize)> = multiset.iter().map(|&i| pairs[i]).collect();
                if !connected(n, &edges) {
                    continue;
                }
                let canon = perms
                    .iter()
                    .map(|p| {
                        let mut e: Vec<(usize, usize)> = edges
                            .iter()
                            .map(|&(u, v)| {
                                let (a, b) = (p[u], p[v]);
                                (a.min(b), a.max(b))
                            })
                            .collect();
                        e.sort();
                        e
                    })
                    .min()
                    .unwrap();
                if seen.insert((n, canon.clone())) {
                    out.push(FiniteGraph::new(n, canon).unwrap());
                }
            }
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn multisets(kinds: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if kinds == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for rest in multisets(kinds, k - 1) {
        let lo = rest.last().copied().unwrap_or(0);
        for i in lo..kinds {
            let mut m = rest.clone();
            m.push(i);
            out.push(m);
        }
    }
    out.sort();
    out.dedup();
    out
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for &(u, v) in edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        parent[a] = b;
    }
    let root = find(&mut parent, 0);
    (0..n).all(|x| find(&mut parent, x) == root)
}

fn laplacian_matrix(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<BigInt>> {
    let mut l = vec![vec![BigInt::zero(); n]; n];
    for &(u, v) in edges {
        l[u][v] += 1;
        l[v][u] += 1;
        l[u][u] -= 1;
        l[v][v] -= 1;
    }
    l
}

/// `D ~ D'` by a Smith-form integer solve of the full Laplacian system.
pub fn snf_equivalent(n: usize, edges: &[(usize, usize)], a: &[i64], b: &[i64]) -> bool {
    let rhs: Vec<BigInt> = a.iter().zip(b).map(|(x, y)| BigInt::from(x - y)).collect();
    solve_integer(&laplacian_matrix(n, edges), &rhs).is_some()
}

/// Irreducible `(degree, slice)` pairs among heights `1..=max_h`, from the box.
pub fn brute_irreducibles(g: &FiniteGraph, d: &[i64], max_h: u32) -> BTreeSet<(u32, Vec<i64>)> {
    let mut levels: Vec<BTreeSet<Vec<i64>>> = vec![BTreeSet::new()];
    let mut out = BTreeSet::new();
    for m in 1..=max_h {
        let md: Vec<i64> = d.iter().map(|c| c * i64::from(m)).collect();
        let slices: BTreeSet<Vec<i64>> = box_enumerate(g, &md)
            .into_iter()
            .map(|f| f.iter().map(|v| v - f[0]).collect())
            .collect();
        for s in &slices {
            let reducible = (1..m).any(|i| {
                levels[i as usize].iter().any(|a| {
                    let b: Vec<i64> = s.iter().zip(a).map(|(x, y)| x - y).collect();
                    levels[(m - i) as usize].contains(&b)
                })
            });
            if !reducible {
                out.insert((m, s.clone()));
            }
        }
        levels.push(slices);
    }
    out
}

/// Exact-degree `⊙`-products of `gens`, each shifted to touch `f` from below;
/// `f` is generated iff their pointwise maximum is `f`.
pub fn brute_generated(f: &[i64], m: u32, gens: &[RgdElement]) -> bool {
    let n = f.len();
    let mut best = vec![i64::MIN; n];
    fn rec(start: usize, left: u32, acc: &mut Vec<i64>, gens: &[RgdElement], f: &[i64], best: &mut Vec<i64>) {
        if left == 0 {
            let shift = f.iter().zip(acc.iter()).map(|(a, b)| a - b).min().unwrap();
            for (i, b) in best.iter_mut().enumerate() {
                *b = (*b).max(acc[i] + shift);
            }
            return;
        }
        for i in start..gens.len() {
            if gens[i].degree <= left {
                for (a, v) in acc.iter_mut().zip(gens[i].function.values()) {
                    *a += v;
                }
                rec(i, left - gens[i].degree, acc, gens, f, best);
                for (a, v) in acc.iter_mut().zip(gens[i].function.values()) {
                    *a -= v;
                }
            }
        }
    }
    rec(0, m, &mut vec![0; n], gens, f, &mut best);
    best == f
}

// ---------------------------------------------------------------- metric

/// Orders read off the breakpoints: outgoing slope sums.
pub fn pl_div_oracle(g: &MetricGraph, f: &PlFunction) -> BTreeMap<Point, Rational> {
    let mut d: BTreeMap<Point, Rational> = BTreeMap::new();
    let mut add = |p: Point, c: Rational| {
        *d.entry(p).or_insert_with(Rational::zero) += c;
    };
    for (e, pieces) in f.pieces().iter().enumerate() {
        let (u, v) = g.model().edge(e);
        let slopes: Vec<Rational> = pieces
            .windows(2)
            .map(|w| (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0))
            .collect();
        add(Point::Vertex(u), slopes[0].clone());
        add(Point::Vertex(v), -slopes[slopes.len() - 1].clone());
        for i in 1..slopes.len() {
            add(
                Point::Edge {
                    edge: e,
                    offset: pieces[i].0.clone(),
                },
                &slopes[i] - &slopes[i - 1],
            );
        }
    }
    d.retain(|_, c| !c.is_zero());
    d
}

pub fn metric_member_oracle(g: &MetricGraph, d: &MetricDivisor, f: &PlFunction) -> bool {
    let div = pl_div_oracle(g, f);
    let mut points: BTreeSet<Point> = div.keys().cloned().collect();
    points.extend(d.points().cloned());
    points
        .iter()
        .all(|p| div.get(p).cloned().unwrap_or_else(Rational::zero) + int(d.coeff(p)) >= Rational::zero())
}

/// Subdivision of `g` into steps of `1/q`, built from scratch.
pub struct Subdivision {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    index: BTreeMap<Point, usize>,
}

impl Subdivision {
    pub fn new(g: &MetricGraph, q: i64) -> Subdivision {
        let mut index = BTreeMap::new();
        let mut n = g.vertex_count();
        for v in 0..n {
            index.insert(Point::Vertex(v), v);
        }
        let mut edges = Vec::new();
        for e in 0..g.edge_count() {
            let steps = g.length(e) * int(q);
            assert!(steps.is_integer(), "q does not subdivide edge {e}");
            let steps = rational::to_i64(&steps).unwrap();
            let (u, v) = g.model().edge(e);
            let mut prev = u;
            for j in 1..steps {
                index.insert(
                    Point::Edge {
                        edge: e,
                        offset: frac(j, q),
                    },
                    n,
                );
                edges.push((prev, n));
                prev = n;
                n += 1;
            }
            edges.push((prev, v));
        }
        Subdivision { n, edges, index }
    }

    pub fn vector(&self, d: &MetricDivisor) -> Vec<i64> {
        let mut out = vec![0; self.n];
        for (p, c) in d.iter() {
            out[self.index[p]] += c;
        }
        out
    }

    pub fn equivalent(&self, a: &MetricDivisor, b: &MetricDivisor) -> bool {
        snf_equivalent(self.n, &self.edges, &self.vector(a), &self.vector(b))
    }
}

// ---------------------------------------------------------------- suites

pub const CASES: u32 = 1000;

pub fn config(seed: u64) -> Config {
    Config {
        cases: CASES,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: None,
        ..Config::default()
    }
}

fn run<S: Strategy>(seed: u64, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    TestRunner::new(config(seed)).run(&strategy, test).map_err(|e| e.to_string())
}

/// Connected loopless multigraph on 2..=4 vertices with at most 6 edges.
pub fn arb_graph() -> impl Strategy<Value = FiniteGraph> {
    (2usize..=4)
        .prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec(any::<Index>(), n - 1),
                proptest::collection::vec((0..n, 0..n), 0..=(7 - n)),
            )
        })
        .prop_map(|(n, parents, extra)| {
            let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (parents[v - 1].index(v), v)).collect();
            edges.extend(extra.into_iter().filter(|(u, v)| u != v));
            FiniteGraph::new(n, edges).unwrap()
        })
}

/// A graph with a small divisor: `K` or random coefficients in `-1..=2`.
pub fn arb_system() -> impl Strategy<Value = (FiniteGraph, Divisor)> {
    arb_graph().prop_flat_map(|g| {
        let n = g.vertex_count();
        let k = g.canonical_divisor();
        (
            Just(g),
            prop_oneof![Just(k), proptest::collection::vec(-1i64..=2, n).prop_map(Divisor)],
        )
    })
}

fn arb_graph_function() -> impl Strategy<Value = (FiniteGraph, Vec<i64>, Vec<i64>)> {
    arb_graph().prop_flat_map(|g| {
        let n = g.vertex_count();
        (
            Just(g),
            proptest::collection::vec(-6i64..=6, n),
            proptest::collection::vec(-6i64..=6, n),
        )
    })
}

/// Metric graphs with rational lengths.
pub fn metric_family(kind: usize, lengths: &[Rational]) -> MetricGraph {
    match kind {
        0 => MetricGraph::new(FiniteGraph::theta(), lengths[..3].to_vec()).unwrap(),
        1 => MetricGraph::new(FiniteGraph::complete(4), lengths[..6].to_vec()).unwrap(),
        _ => {
            // two loops joined by a bridge, each loop split by a 3-valent vertex
            let model = FiniteGraph::new(4, vec![(0, 1), (0, 1), (1, 2), (2, 3), (2, 3)]).unwrap();
            MetricGraph::new(model, lengths[..5].to_vec()).unwrap()
        }
    }
}

fn arb_length() -> impl Strategy<Value = Rational> {
    prop_oneof![Just(frac(1, 2)), Just(int(1)), Just(frac(3, 2)), Just(int(2))]
}

fn arb_metric() -> impl Strategy<Value = MetricGraph> {
    (0usize..3, proptest::collection::vec(arb_length(), 6)).prop_map(|(k, l)| metric_family(k, &l))
}

/// A PL function with integer slopes: lift of random integers on a refinement.
fn lift_random(g: &MetricGraph, q: u64, values: &[i64], base: &Rational) -> PlFunction {
    let r = refine(g, q).unwrap();
    let n = r.graph().vertex_count();
    let f = RationalFunction((0..n).map(|i| values[i % values.len()]).collect());
    r.lift(g, &f, base).unwrap()
}

fn arb_metric_functions() -> impl Strategy<Value = (MetricGraph, PlFunction, PlFunction)> {
    (
        arb_metric(),
        prop_oneof![Just(2u64), Just(4u64)],
        proptest::collection::vec(-4i64..=4, 7..40),
        proptest::collection::vec(-4i64..=4, 5..40),
        -5i64..=5,
    )
        .prop_map(|(g, q, a, b, c)| {
            let f = lift_random(&g, q, &a, &frac(c, 7));
            let h = lift_random(&g, q, &b, &int(0));
            (g, f, h)
        })
}

fn ensure(cond: bool, what: &str) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(what.to_string()))
    }
}

fn degree_of(d: &BTreeMap<Point, Rational>) -> Rational {
    d.values().fold(Rational::zero(), |a, b| a + b)
}

fn metric_div_as_map(d: &MetricDivisor) -> BTreeMap<Point, Rational> {
    d.iter().filter(|(_, c)| *c != 0).map(|(p, c)| (p.clone(), int(c))).collect()
}

pub fn suite_degree_zero() -> Result<(), String> {
    run(101, arb_graph_function(), |(g, f, _)| {
        let d = g.div(&RationalFunction(f.clone())).unwrap();
        ensure(d.degree() == 0, "graph degree")?;
        ensure(d.coeffs() == div_oracle(g.vertex_count(), g.edges(), &f), "graph div oracle")
    })?;
    run(102, arb_metric_functions(), |(g, f, _)| {
        let d = f.div(&g);
        ensure(d.degree() == 0, "metric degree")?;
        ensure(degree_of(&pl_div_oracle(&g, &f)).is_zero(), "metric oracle degree")?;
        ensure(metric_div_as_map(&d) == pl_div_oracle(&g, &f), "metric div oracle")
    })
}

pub fn suite_div_additive() -> Result<(), String> {
    run(201, arb_graph_function(), |(g, f, h)| {
        let (f, h) = (RationalFunction(f), RationalFunction(h));
        let prod = canonring::linear_system::odot(&f, &h).unwrap();
        ensure(g.div(&prod).unwrap() == g.div(&f).unwrap() + g.div(&h).unwrap(), "graph")
    })?;
    run(202, arb_metric_functions(), |(g, f, h)| {
        let prod = f.odot(&h).unwrap();
        ensure(prod.div(&g) == f.div(&g) + h.div(&g), "metric")?;
        ensure(metric_div_as_map(&prod.div(&g)) == pl_div_oracle(&g, &prod), "metric oracle")
    })
}

pub fn suite_closure() -> Result<(), String> {
    let b = Budgets::default();
    run(
        301,
        (arb_system(), 1u32..=2, 1u32..=2, any::<Index>(), any::<Index>(), any::<Index>()),
        |((g, d), m1, m2, i, j, k)| {
            let a = enumerate_linear_system(&g, &d, m1, &b).unwrap();
            let c = enumerate_linear_system(&g, &d, m2, &b).unwrap();
            if a.is_empty() || c.is_empty() {
                return Ok(());
            }
            let (x, y) = (&a[i.index(a.len())].function, &c[j.index(c.len())].function);
            let prod = canonring::linear_system::odot(x, y).unwrap();
            let sum_d: Vec<i64> = d.coeffs().iter().map(|v| v * i64::from(m1 + m2)).collect();
            ensure(member_oracle(&g, &sum_d, prod.values()), "⊙ closure")?;
            let z = a[k.index(a.len())].function.shifted(j.index(7) as i64 - 3);
            let sum = canonring::linear_system::oplus(x, &z).unwrap();
            let m1_d: Vec<i64> = d.coeffs().iter().map(|v| v * i64::from(m1)).collect();
            ensure(member_oracle(&g, &m1_d, sum.values()), "⊕ closure")
        },
    )?;
    // metric: lifts of refined elements, shifted by rationals so that
    // envelopes cross off the grid
    let cases: Vec<(MetricGraph, MetricDivisor, Vec<Vec<PlFunction>>)> = [0usize, 1]
        .iter()
        .map(|&kind| {
            let g = metric_family(kind, &vec![int(1); 6]);
            let k = g.canonical_divisor();
            let r = refine(&g, 2).unwrap();
            let levels = (1..=2)
                .map(|m| {
                    let dk = r.divisor_to_graph(&(m * k.clone())).unwrap();
                    enumerate_linear_system(r.graph(), &dk, 1, &b)
                        .unwrap()
                        .into_iter()
                        .map(|el| r.lift(&g, &el.function, &int(0)).unwrap())
                        .collect()
                })
                .collect();
            (g, k, levels)
        })
        .collect();
    run(
        302,
        (0usize..2, 0usize..2, 0usize..2, any::<Index>(), any::<Index>(), -9i64..=9, 1i64..=5),
        |(which, m1, m2, i, j, num, den)| {
            let (g, k, levels) = &cases[which];
            let x = &levels[m1][i.index(levels[m1].len())];
            let y = &levels[m2][j.index(levels[m2].len())];
            let prod = x.odot(y).unwrap();
            let total = (m1 + m2 + 2) as i64 * k.clone();
            ensure(metric_member_oracle(g, &total, &prod), "metric ⊙ closure")?;
            let z = &levels[m1][j.index(levels[m1].len())];
            let sum = x.oplus(&z.shifted(&frac(num, den))).unwrap();
            ensure(metric_member_oracle(g, &((m1 + 1) as i64 * k.clone()), &sum), "metric ⊕ closure")
        },
    )
}

pub fn suite_extremal_cover() -> Result<(), String> {
    let b = Budgets::default();
    run(401, (arb_system(), 1u32..=2, any::<Index>()), |((g, d), m, i)| {
        let els = enumerate_linear_system(&g, &d, m, &b).unwrap();
        if els.is_empty() {
            return Ok(());
        }
        let ext = extremals(&g, &d, m, &b).unwrap();
        let f = els[i.index(els.len())].function.values();
        // max over extremals e of e + min(f - e)
        let mut rebuilt = vec![i64::MIN; f.len()];
        for e in &ext {
            let e = e.function.values();
            let c = f.iter().zip(e).map(|(a, b)| a - b).min().unwrap();
            for (r, v) in rebuilt.iter_mut().zip(e) {
                *r = (*r).max(v + c);
            }
        }
        ensure(rebuilt == f, "reconstruction")?;
        let funcs: Vec<RationalFunction> = ext.iter().map(|e| e.function.clone()).collect();
        ensure(oplus_cover(&els[i.index(els.len())].function, &funcs).is_some(), "oplus_cover")
    })
}

fn arb_point(g: &MetricGraph, e: usize, num: i64, den: i64) -> Option<Point> {
    let len = g.length(e).clone();
    let t = frac(num, den) * &len;
    if t.is_zero() || t >= len {
        return None;
    }
    g.point(e, t).ok()
}

pub fn suite_halving() -> Result<(), String> {
    let b = Budgets::default();
    let strategy = (
        arb_metric(),
        proptest::collection::vec((any::<Index>(), 0i64..=4, 1i64..=4), 1..=4),
        proptest::collection::vec(any::<bool>(), 4),
        proptest::collection::vec((any::<Index>(), 0i64..=3, 1i64..=3), 0..=2),
        any::<Index>(),
        any::<bool>(),
    );
    run(501, strategy, |(g, chips, vs, spans, pick, from_list)| {
        let mut e = MetricDivisor::zero();
        for (idx, num, c) in chips {
            let edge = idx.index(g.edge_count());
            let p = arb_point(&g, edge, num, 4).unwrap_or(Point::Vertex(g.model().edge(edge).0));
            e.add_at(p, c);
        }
        let sub = if from_list {
            let list = firing_subgraphs(&g, &e, &b).unwrap();
            if list.is_empty() {
                return Ok(());
            }
            list[pick.index(list.len())].clone()
        } else {
            let vertices: Vec<usize> = (0..g.vertex_count()).filter(|&v| vs[v % vs.len()]).collect();
            let intervals: Vec<(usize, Rational, Rational)> = spans
                .iter()
                .map(|(idx, a, w)| {
                    let edge = idx.index(g.edge_count());
                    let len = g.length(edge).clone();
                    let lo = frac(*a, 4) * &len;
                    let hi = (&lo + frac(*w, 4) * &len).min(len);
                    (edge, lo, hi)
                })
                .collect();
            match MetricSubgraph::new(&g, vertices, intervals) {
                Ok(s) if !s.is_empty() && !s.is_whole(&g) => s,
                _ => return Ok(()),
            }
        };
        let l = firing_threshold(&g, &e, &sub);
        let full = can_fire_metric_with(&g, &e, &sub, &l).unwrap();
        let half = can_fire_metric_with(&g, &e, &sub, &(&l / int(2))).unwrap();
        let quarter = can_fire_metric_with(&g, &e, &sub, &(&l / int(4))).unwrap();
        ensure(full == half && half == quarter, "can_fire depends on l")
    })
}

pub fn suite_shift_invariance() -> Result<(), String> {
    let b = Budgets::default();
    run(601, (arb_system(), 2u32..=3, any::<Index>(), -20i64..=20), |((g, d), m, i, c)| {
        let els = enumerate_linear_system(&g, &d, m, &b).unwrap();
        if els.is_empty() {
            return Ok(());
        }
        let mut gens = Vec::new();
        for j in 1..m {
            gens.extend(enumerate_linear_system(&g, &d, j, &b).unwrap());
        }
        let f = &els[i.index(els.len())].function;
        let plain = decompose(&RgdElement::new(f, m), &gens, &b).unwrap();
        let moved = decompose(&RgdElement::new(&f.shifted(c), m), &gens, &b).unwrap();
        ensure(plain.is_generated() == moved.is_generated(), "shifted target")?;
        let shifted_gens: Vec<RgdElement> = gens
            .iter()
            .enumerate()
            .map(|(k, e)| RgdElement::new(&e.function.shifted(c + k as i64), e.degree))
            .collect();
        let regen = decompose(&RgdElement::new(f, m), &shifted_gens, &b).unwrap();
        ensure(plain.is_generated() == regen.is_generated(), "shifted generators")?;
        ensure(plain.is_generated() == brute_generated(f.normalized().values(), m, &gens), "brute oracle")?;
        if let Some(h) = moved.evaluate(&gens) {
            ensure(h.normalized() == f.normalized(), "certificate evaluates to target")?;
        }
        Ok(())
    })
}

pub type Suite = (&'static str, fn() -> Result<(), String>);

pub const SUITES: [Suite; 6] = [
    ("deg div(f) = 0", suite_degree_zero),
    ("div(f ⊙ g) = div f + div g", suite_div_additive),
    ("⊕/⊙ closure (graph and metric)", suite_closure),
    ("extremal-cover reconstruction", suite_extremal_cover),
    ("can_fire invariant under halving l", suite_halving),
    ("decomposability invariant under shift", suite_shift_invariance),
];

/// Criterion 9 sweep: `(graphs, comparisons, discrepancies)`.
pub fn rgd_box_sweep() -> (usize, usize, Vec<String>) {
    let b = Budgets::default();
    let graphs = small_graphs(4, 6);
    let mut compared = 0;
    let mut bad = Vec::new();
    for g in &graphs {
        let n = g.vertex_count();
        let mut ds = vec![g.canonical_divisor(), Divisor::from_points(n, &[(0, 1)]).unwrap()];
        if n > 1 {
            ds.push(Divisor::from_points(n, &[(0, 2), (n - 1, -1)]).unwrap());
        }
        for d in &ds {
            for m in 1..=3u32 {
                let md = i64::from(m) * d.clone();
                let lib: BTreeSet<Vec<i64>> = canonring::linear_system::rgd_enumerate(g, &md)
                    .unwrap()
                    .into_iter()
                    .map(|e| e.function.0)
                    .collect();
                let lib_graded: BTreeSet<Vec<i64>> = enumerate_linear_system(g, d, m, &b)
                    .unwrap()
                    .into_iter()
                    .map(|e| e.function.0)
                    .collect();
                let oracle = box_enumerate(g, md.coeffs());
                compared += 1;
                if lib != oracle || lib_graded != oracle {
                    bad.push(format!("{:?} D={:?} m={m}: {} vs {}", g.edges(), d.coeffs(), lib.len(), oracle.len()));
                }
            }
        }
    }
    (graphs.len(), compared, bad)
}
