//! The tropical linear systems `R(G, D)` of a finite graph: exhaustive
//! enumeration, chip-firing subsets and extremality.
//!
//! `R(G, D)` is identified with the lattice points of
//! `P = {x : Δx + D ≥ 0}`, taken modulo the all-ones direction. On the slice
//! `x[0] = 0` this polytope is a simplex: removing any single constraint row
//! leaves a nonsingular reduced Laplacian, so each vertex is the point where
//! all constraints but one are tight, i.e. the rational function moving all
//! `deg D` chips onto one vertex. Per-coordinate LP bounds are therefore the
//! coordinate extremes over those `n` vertices, and they are exact.

use serde::{Deserialize, Serialize};

use crate::budget::Budgets;
use crate::error::{Error, Result};
use crate::graph::{Divisor, FiniteGraph, RationalFunction};
use crate::linalg;
use crate::rational::{self, Rational};

/// An element of `R(G, m·D)` for a fixed base divisor `D`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RgdElement {
    /// The graded degree `m`.
    pub degree: u32,
    /// Orbit representative with minimum value 0.
    pub function: RationalFunction,
    /// Orbit representative with value 0 at vertex 0.
    pub slice: Vec<i64>,
}

impl RgdElement {
    pub fn new(function: &RationalFunction, degree: u32) -> Self {
        let base = function[0];
        RgdElement {
            degree,
            function: function.normalized(),
            slice: function.values().iter().map(|&v| v - base).collect(),
        }
    }

    /// Tropical product; degrees add.
    pub fn odot(&self, other: &RgdElement) -> RgdElement {
        let f = odot(&self.function, &other.function).expect("same graph");
        RgdElement::new(&f, self.degree + other.degree)
    }
}

pub fn is_member(g: &FiniteGraph, d: &Divisor, f: &RationalFunction) -> Result<bool> {
    g.check_size(d.len())?;
    Ok((g.div(f)? + d.clone()).is_effective())
}

/// Vertices of `{x : Δx + D ≥ 0, x[0] = 0}`; empty when `deg D < 0`.
pub fn slice_vertices(g: &FiniteGraph, d: &Divisor) -> Result<Vec<Vec<Rational>>> {
    g.check_size(d.len())?;
    let n = g.vertex_count();
    let deg = d.degree();
    if deg < 0 {
        return Ok(Vec::new());
    }
    let mut out: Vec<Vec<Rational>> = Vec::new();
    for i in 0..n {
        // Δx + D = deg·e_i
        let b: Vec<Rational> = (0..n)
            .map(|v| rational::int(if v == i { deg } else { 0 } - d[v]))
            .collect();
        let x = linalg::solve_laplacian(g, &b).ok_or_else(|| {
            Error::DegenerateCone("reduced Laplacian is singular".into())
        })?;
        if !out.contains(&x) {
            out.push(x);
        }
    }
    Ok(out)
}

/// Integer box containing every lattice point of the slice, or `None` if empty.
pub fn slice_bounds(g: &FiniteGraph, d: &Divisor) -> Result<Option<Vec<(i64, i64)>>> {
    let verts = slice_vertices(g, d)?;
    if verts.is_empty() {
        return Ok(None);
    }
    let n = g.vertex_count();
    let mut bounds = Vec::with_capacity(n);
    for j in 0..n {
        let lo = verts.iter().map(|v| &v[j]).min().unwrap().ceil();
        let hi = verts.iter().map(|v| &v[j]).max().unwrap().floor();
        let lo = rational::big_to_i64(lo.numer())?;
        let hi = rational::big_to_i64(hi.numer())?;
        if lo > hi {
            return Ok(None);
        }
        bounds.push((lo, hi));
    }
    Ok(Some(bounds))
}

struct Search<'a> {
    g: &'a FiniteGraph,
    order: Vec<usize>,
    lo: Vec<i64>,
    hi: Vec<i64>,
    c: Vec<i64>,
    vals: Vec<i64>,
    assigned: Vec<bool>,
    out: Vec<Vec<i64>>,
    cap: usize,
}

impl Search<'_> {
    fn optimistic(&self, z: usize) -> i64 {
        if self.assigned[z] {
            self.vals[z]
        } else {
            self.hi[z]
        }
    }

    fn pessimistic(&self, z: usize) -> i64 {
        if self.assigned[z] {
            self.vals[z]
        } else {
            self.lo[z]
        }
    }

    /// Feasible range of `v` given the current partial assignment.
    fn range(&self, v: usize) -> (i64, i64) {
        let g = self.g;
        let mut lo = self.lo[v];
        let mut hi = self.hi[v];
        // own constraint: deg'(v)·x_v <= c_v + Σ m·x_y
        let dv = g.proper_degree(v);
        let s: i64 = g.neighbours(v).iter().map(|&(y, m)| m * self.optimistic(y)).sum();
        hi = hi.min((self.c[v] + s).div_euclid(dv));
        // neighbour constraints: m_yv·x_v >= deg'(y)·x_y - c_y - Σ_{z≠v} m·x_z
        for &(y, m) in g.neighbours(v) {
            let others: i64 = g
                .neighbours(y)
                .iter()
                .filter(|&&(z, _)| z != v)
                .map(|&(z, k)| k * self.optimistic(z))
                .sum();
            let need = g.proper_degree(y) * self.pessimistic(y) - self.c[y] - others;
            lo = lo.max(div_ceil(need, m));
        }
        (lo, hi)
    }

    fn run(&mut self, depth: usize) -> Result<()> {
        if depth == self.order.len() {
            debug_assert!((0..self.g.vertex_count()).all(|x| {
                let s: i64 = self
                    .g
                    .neighbours(x)
                    .iter()
                    .map(|&(y, m)| m * (self.vals[y] - self.vals[x]))
                    .sum();
                s + self.c[x] >= 0
            }));
            if self.out.len() >= self.cap {
                return Err(Error::BudgetExceeded(format!(
                    "more than {} lattice points",
                    self.cap
                )));
            }
            self.out.push(self.vals.clone());
            return Ok(());
        }
        let v = self.order[depth];
        let (lo, hi) = self.range(v);
        self.assigned[v] = true;
        for x in lo..=hi {
            self.vals[v] = x;
            self.run(depth + 1)?;
        }
        self.assigned[v] = false;
        self.vals[v] = 0;
        Ok(())
    }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

/// All lattice points of `{x : Δx + D ≥ 0, x[0] = 0}`, in lexicographic order.
pub fn slice_lattice_points(g: &FiniteGraph, d: &Divisor, budgets: &Budgets) -> Result<Vec<Vec<i64>>> {
    let Some(bounds) = slice_bounds(g, d)? else {
        return Ok(Vec::new());
    };
    let n = g.vertex_count();
    let mut s = Search {
        g,
        order: g.bfs_order(0).into_iter().skip(1).collect(),
        lo: bounds.iter().map(|b| b.0).collect(),
        hi: bounds.iter().map(|b| b.1).collect(),
        c: d.coeffs().to_vec(),
        vals: vec![0; n],
        assigned: vec![false; n],
        out: Vec::new(),
        cap: budgets.max_elements,
    };
    s.assigned[0] = true;
    s.run(0)?;
    let mut out = s.out;
    out.sort();
    Ok(out)
}

/// `R(G, m·D)` as normalized orbit representatives labelled with degree `m`.
pub fn enumerate_linear_system(
    g: &FiniteGraph,
    base: &Divisor,
    m: u32,
    budgets: &Budgets,
) -> Result<Vec<RgdElement>> {
    let d = i64::from(m) * base.clone();
    let mut out: Vec<RgdElement> = slice_lattice_points(g, &d, budgets)?
        .into_iter()
        .map(|x| RgdElement::new(&RationalFunction(x), m))
        .collect();
    out.sort_by(|a, b| a.function.cmp(&b.function));
    Ok(out)
}

/// `R(G, D)` modulo constants, one normalized representative per orbit.
pub fn rgd_enumerate(g: &FiniteGraph, d: &Divisor) -> Result<Vec<RgdElement>> {
    enumerate_linear_system(g, d, 1, &Budgets::default())
}

/// A proper nonempty set of vertices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FiringSubset {
    members: Vec<bool>,
}

impl FiringSubset {
    pub fn new(n: usize, vertices: &[usize]) -> Result<Self> {
        let mut members = vec![false; n];
        for &v in vertices {
            if v >= n {
                return Err(Error::IndexOutOfRange { index: v, bound: n });
            }
            members[v] = true;
        }
        Self::from_mask(members)
    }

    pub fn from_mask(members: Vec<bool>) -> Result<Self> {
        let count = members.iter().filter(|&&b| b).count();
        if count == 0 || count == members.len() {
            return Err(Error::EmptyOrFullSubset);
        }
        Ok(FiringSubset { members })
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members[v]
    }

    pub fn vertices(&self) -> Vec<usize> {
        (0..self.members.len()).filter(|&v| self.members[v]).collect()
    }

    pub fn mask(&self) -> &[bool] {
        &self.members
    }

    /// The chip-firing function: 0 on the subset, -1 elsewhere.
    pub fn cf(&self) -> RationalFunction {
        RationalFunction(self.members.iter().map(|&b| if b { 0 } else { -1 }).collect())
    }
}

/// Whether `E + div(CF(V'))` is effective.
pub fn can_fire(g: &FiniteGraph, e: &Divisor, subset: &FiringSubset) -> Result<bool> {
    g.check_size(e.len())?;
    g.check_size(subset.members.len())?;
    Ok((0..g.vertex_count()).all(|x| {
        let crossing: i64 = g
            .neighbours(x)
            .iter()
            .filter(|&&(y, _)| subset.members[y] != subset.members[x])
            .map(|&(_, m)| m)
            .sum();
        if subset.members[x] {
            e[x] >= crossing
        } else {
            e[x] + crossing >= 0
        }
    }))
}

/// Every subset that can fire on the effective divisor `e`.
///
/// A vertex outside `supp(e)` can only belong to a firing subset together
/// with all of its neighbours, so a firing subset is a union of connected
/// components of `G - supp(e)` plus some support vertices. The search runs
/// over those choices instead of all `2^|V|` subsets.
pub fn firing_subsets(g: &FiniteGraph, e: &Divisor, budgets: &Budgets) -> Result<Vec<FiringSubset>> {
    g.check_size(e.len())?;
    if !e.is_effective() {
        return Err(Error::InvalidArgument("firing search needs an effective divisor".into()));
    }
    let n = g.vertex_count();
    let support = e.support();
    let mut comp = vec![usize::MAX; n];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if e[start] != 0 || comp[start] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut members = vec![start];
        comp[start] = id;
        let mut i = 0;
        while i < members.len() {
            let x = members[i];
            for &(y, _) in g.neighbours(x) {
                if e[y] == 0 && comp[y] == usize::MAX {
                    comp[y] = id;
                    members.push(y);
                }
            }
            i += 1;
        }
        comps.push(members);
    }
    let bits = comps.len() + support.len();
    if bits > budgets.max_firing_bits {
        return Err(Error::BudgetExceeded(format!(
            "firing search over {bits} free choices (cap {})",
            budgets.max_firing_bits
        )));
    }
    // support neighbours each component drags along
    let required: Vec<u64> = comps
        .iter()
        .map(|c| {
            let mut mask = 0u64;
            for &x in c {
                for &(y, _) in g.neighbours(x) {
                    if let Some(pos) = support.iter().position(|&s| s == y) {
                        mask |= 1 << pos;
                    }
                }
            }
            mask
        })
        .collect();
    let mut out = Vec::new();
    for cmask in 0u64..(1u64 << comps.len()) {
        let mut need = 0u64;
        for (i, r) in required.iter().enumerate() {
            if cmask >> i & 1 == 1 {
                need |= r;
            }
        }
        for smask in 0u64..(1u64 << support.len()) {
            if smask & need != need {
                continue;
            }
            let mut members = vec![false; n];
            for (i, c) in comps.iter().enumerate() {
                if cmask >> i & 1 == 1 {
                    for &x in c {
                        members[x] = true;
                    }
                }
            }
            for (i, &s) in support.iter().enumerate() {
                if smask >> i & 1 == 1 {
                    members[s] = true;
                }
            }
            let Ok(subset) = FiringSubset::from_mask(members) else {
                continue;
            };
            if can_fire(g, e, &subset)? {
                out.push(subset);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Two firing subsets covering `V`, if any exist; their existence is exactly
/// non-extremality of `f` in `R(G, D)`.
pub fn covering_firing_pair(
    g: &FiniteGraph,
    d: &Divisor,
    f: &RationalFunction,
    budgets: &Budgets,
) -> Result<Option<(FiringSubset, FiringSubset)>> {
    let e = g.div(f)? + d.clone();
    if !e.is_effective() {
        return Err(Error::NotMember);
    }
    let subsets = firing_subsets(g, &e, budgets)?;
    for (i, a) in subsets.iter().enumerate() {
        for b in &subsets[i..] {
            if a.members.iter().zip(&b.members).all(|(x, y)| *x || *y) {
                return Ok(Some((a.clone(), b.clone())));
            }
        }
    }
    Ok(None)
}

pub fn is_extremal(g: &FiniteGraph, d: &Divisor, f: &RationalFunction, budgets: &Budgets) -> Result<bool> {
    Ok(covering_firing_pair(g, d, f, budgets)?.is_none())
}

/// The extremals of `R(G, m·D)` modulo constants.
pub fn extremals(g: &FiniteGraph, base: &Divisor, m: u32, budgets: &Budgets) -> Result<Vec<RgdElement>> {
    let d = i64::from(m) * base.clone();
    let mut out = Vec::new();
    for el in enumerate_linear_system(g, base, m, budgets)? {
        if is_extremal(g, &d, &el.function, budgets)? {
            out.push(el);
        }
    }
    Ok(out)
}

fn check_pair(f: &RationalFunction, g: &RationalFunction) -> Result<()> {
    if f.len() != g.len() {
        return Err(Error::SizeMismatch {
            expected: f.len(),
            found: g.len(),
        });
    }
    Ok(())
}

/// `(f ⊕ g)(x) = max(f(x), g(x))`
pub fn oplus(f: &RationalFunction, g: &RationalFunction) -> Result<RationalFunction> {
    check_pair(f, g)?;
    Ok(RationalFunction(f.0.iter().zip(&g.0).map(|(a, b)| *a.max(b)).collect()))
}

/// `(f ⊙ g)(x) = f(x) + g(x)`
pub fn odot(f: &RationalFunction, g: &RationalFunction) -> Result<RationalFunction> {
    check_pair(f, g)?;
    Ok(RationalFunction(f.0.iter().zip(&g.0).map(|(a, b)| a + b).collect()))
}

/// `(c ⊙ f)(x) = c + f(x)`
pub fn scale(c: i64, f: &RationalFunction) -> RationalFunction {
    f.shifted(c)
}

/// Vertices where `f - p` attains its minimum, together with that minimum.
pub(crate) fn argmin_gap(f: &[i64], p: &[i64]) -> (i64, Vec<usize>) {
    let gap: Vec<i64> = f.iter().zip(p).map(|(a, b)| a - b).collect();
    let m = *gap.iter().min().expect("nonempty");
    (m, (0..gap.len()).filter(|&i| gap[i] == m).collect())
}
