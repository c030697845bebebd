//! Finite multigraphs, divisors and integer-valued rational functions.
//!
//! Graphs are connected, undirected and may carry loops and parallel edges.
//! A loop counts twice toward the valence of its vertex but contributes
//! nothing to orders, principal divisors or the Laplacian: the difference
//! `f(y) - f(x)` vanishes along it.

use std::collections::VecDeque;
use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    labels: Option<Vec<String>>,
    /// Non-loop neighbours with multiplicity, sorted by neighbour index.
    neighbours: Vec<Vec<(usize, i64)>>,
    valence: Vec<i64>,
}

impl FiniteGraph {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::NoVertices);
        }
        for &(u, v) in &edges {
            for x in [u, v] {
                if x >= vertex_count {
                    return Err(Error::IndexOutOfRange {
                        index: x,
                        bound: vertex_count,
                    });
                }
            }
        }
        let mut valence = vec![0i64; vertex_count];
        let mut mult = vec![std::collections::BTreeMap::<usize, i64>::new(); vertex_count];
        for &(u, v) in &edges {
            valence[u] += 1;
            valence[v] += 1;
            if u != v {
                *mult[u].entry(v).or_default() += 1;
                *mult[v].entry(u).or_default() += 1;
            }
        }
        let neighbours = mult
            .into_iter()
            .map(|m| m.into_iter().collect())
            .collect();
        let g = FiniteGraph {
            vertex_count,
            edges,
            labels: None,
            neighbours,
            valence,
        };
        if !g.is_connected_without(None) {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.vertex_count {
            return Err(Error::SizeMismatch {
                expected: self.vertex_count,
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Two vertices joined by three parallel edges.
    pub fn theta() -> Self {
        Self::new(2, vec![(0, 1), (0, 1), (0, 1)]).expect("theta graph is valid")
    }

    /// Path on `k + 1` vertices `0 - 1 - ... - k`.
    pub fn path(k: usize) -> Self {
        Self::new(k + 1, (0..k).map(|i| (i, i + 1)).collect()).expect("path is valid")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 2);
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect()).expect("cycle is valid")
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        Self::new(n, edges).expect("complete graph is valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, v: usize) -> String {
        match &self.labels {
            Some(l) => l[v].clone(),
            None => v.to_string(),
        }
    }

    /// Number of edge ends at `v`; loops count twice.
    pub fn valence(&self, v: usize) -> i64 {
        self.valence[v]
    }

    /// Non-loop neighbours of `v` with edge multiplicities.
    pub fn neighbours(&self, v: usize) -> &[(usize, i64)] {
        &self.neighbours[v]
    }

    /// Number of non-loop edge ends at `v`.
    pub fn proper_degree(&self, v: usize) -> i64 {
        self.neighbours[v].iter().map(|&(_, m)| m).sum()
    }

    pub fn genus(&self) -> usize {
        self.edges.len() + 1 - self.vertex_count
    }

    pub fn is_bridge(&self, e: usize) -> bool {
        !self.is_connected_without(Some(e))
    }

    fn is_connected_without(&self, skip: Option<usize>) -> bool {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            if Some(i) != skip {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        let mut seen = vec![false; self.vertex_count];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    queue.push_back(y);
                }
            }
        }
        count == self.vertex_count
    }

    /// Vertices in breadth-first order from `root`.
    pub fn bfs_order(&self, root: usize) -> Vec<usize> {
        let mut seen = vec![false; self.vertex_count];
        let mut order = vec![root];
        seen[root] = true;
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            for &(y, _) in &self.neighbours[x] {
                if !seen[y] {
                    seen[y] = true;
                    order.push(y);
                }
            }
            i += 1;
        }
        order
    }

    pub fn laplacian(&self) -> LaplacianView {
        let n = self.vertex_count;
        let mut m = vec![vec![0i64; n]; n];
        for x in 0..n {
            for &(y, k) in &self.neighbours[x] {
                m[x][y] = k;
            }
            m[x][x] = -self.proper_degree(x);
        }
        LaplacianView { matrix: m }
    }

    /// `K_G = sum (val(x) - 2) [x]`.
    pub fn canonical_divisor(&self) -> Divisor {
        Divisor((0..self.vertex_count).map(|v| self.valence[v] - 2).collect())
    }

    pub fn ord(&self, f: &RationalFunction, x: usize) -> i64 {
        self.neighbours[x]
            .iter()
            .map(|&(y, m)| m * (f.0[y] - f.0[x]))
            .sum()
    }

    /// Principal divisor of `f`.
    pub fn div(&self, f: &RationalFunction) -> Result<Divisor> {
        self.check_size(f.len())?;
        Ok(Divisor((0..self.vertex_count).map(|x| self.ord(f, x)).collect()))
    }

    pub(crate) fn check_size(&self, len: usize) -> Result<()> {
        if len != self.vertex_count {
            return Err(Error::SizeMismatch {
                expected: self.vertex_count,
                found: len,
            });
        }
        Ok(())
    }

    /// Decides `D ~ D'` over the integers. On success returns `f` with
    /// `div(f) = D - D'`, normalized to minimum value 0.
    pub fn linear_equiv(&self, d: &Divisor, d2: &Divisor) -> Result<Option<RationalFunction>> {
        self.check_size(d.len())?;
        self.check_size(d2.len())?;
        let rhs = d.clone() - d2.clone();
        if rhs.degree() != 0 {
            return Ok(None);
        }
        let f = linalg::solve_laplacian_integral(self, rhs.coeffs())?;
        Ok(f.map(|v| RationalFunction(v).normalized()))
    }

    /// Graphviz rendering; divisor coefficients, when given, become vertex labels.
    pub fn to_dot(&self, divisor: Option<&Divisor>) -> String {
        let mut out = String::from("graph G {\n");
        for v in 0..self.vertex_count {
            let mut label = self.label(v);
            if let Some(d) = divisor {
                label = format!("{label}: {}", d[v]);
            }
            out.push_str(&format!("  v{v} [label=\"{label}\"];\n"));
        }
        for &(u, v) in &self.edges {
            out.push_str(&format!("  v{u} -- v{v};\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// The graph Laplacian with the sign convention `Δ·f = div(f)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaplacianView {
    matrix: Vec<Vec<i64>>,
}

impl LaplacianView {
    pub fn rows(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn apply(&self, f: &[i64]) -> Vec<i64> {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(f).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Integer coefficient per vertex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Divisor(pub Vec<i64>);

impl Divisor {
    pub fn zero(n: usize) -> Self {
        Divisor(vec![0; n])
    }

    /// Sum of `c[v]` over the given `(v, c)` pairs.
    pub fn from_points(n: usize, points: &[(usize, i64)]) -> Result<Self> {
        let mut d = vec![0; n];
        for &(v, c) in points {
            if v >= n {
                return Err(Error::IndexOutOfRange { index: v, bound: n });
            }
            d[v] += c;
        }
        Ok(Divisor(d))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_effective(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&v| self.0[v] != 0).collect()
    }
}

impl Index<usize> for Divisor {
    type Output = i64;
    fn index(&self, v: usize) -> &i64 {
        &self.0[v]
    }
}

impl Add for Divisor {
    type Output = Divisor;
    fn add(self, rhs: Divisor) -> Divisor {
        assert_eq!(self.len(), rhs.len());
        Divisor(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for Divisor {
    type Output = Divisor;
    fn sub(self, rhs: Divisor) -> Divisor {
        assert_eq!(self.len(), rhs.len());
        Divisor(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for Divisor {
    type Output = Divisor;
    fn neg(self) -> Divisor {
        Divisor(self.0.into_iter().map(|a| -a).collect())
    }
}

impl Mul<Divisor> for i64 {
    type Output = Divisor;
    fn mul(self, rhs: Divisor) -> Divisor {
        Divisor(rhs.0.into_iter().map(|a| self * a).collect())
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .support()
            .into_iter()
            .map(|v| format!("{}[{}]", self.0[v], v))
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// An integer label per vertex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RationalFunction(pub Vec<i64>);

impl RationalFunction {
    pub fn constant(n: usize, c: i64) -> Self {
        RationalFunction(vec![c; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }

    pub fn min_value(&self) -> i64 {
        self.0.iter().copied().min().unwrap_or(0)
    }

    /// Representative of the constant-shift orbit with minimum value 0.
    pub fn normalized(&self) -> Self {
        let m = self.min_value();
        RationalFunction(self.0.iter().map(|&x| x - m).collect())
    }

    pub fn shifted(&self, c: i64) -> Self {
        RationalFunction(self.0.iter().map(|&x| x + c).collect())
    }

    pub fn is_constant(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }
}

impl Index<usize> for RationalFunction {
    type Output = i64;
    fn index(&self, v: usize) -> &i64 {
        &self.0[v]
    }
}
