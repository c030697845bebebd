//! Generation of the graded semi-ring `⊕_m R(G, m·D)` over `Z^trop`.
//!
//! Two notions of generation appear here and must not be confused:
//!
//! * **Monoid generation.** Height-`m` lattice points of the cone
//!   `C = {(x, m) : Δx + m·D ≥ 0, m ≥ 0}` are exactly `R(G, m·D)`, and adding
//!   lattice points is the tropical product `⊙`. The Hilbert basis of `C`
//!   (modulo the all-ones lineality) therefore generates every element as a
//!   pure `⊙`-product plus a constant shift.
//! * **Semi-ring generation.** The semi-ring also has `⊕ = max`, so an element
//!   can be generated without being a single product. `f` of degree `m` lies
//!   in the sub-semi-ring generated by a set `S` iff for every vertex `x`
//!   some degree-`m` product `p` of members of `S` satisfies
//!   `f - p ≥ (f - p)(x)` (shift `p` down until it touches `f` at `x`); `f` is
//!   then the `⊕` of those shifted products. This covering criterion is what
//!   [`decompose`] and [`min_generator_degrees`] decide, and it can only make
//!   the set of required degrees smaller than the Hilbert basis degrees.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::budget::Budgets;
use crate::error::{Error, Result};
use crate::graph::{Divisor, FiniteGraph, RationalFunction};
use crate::linear_system::{self, argmin_gap, RgdElement};
use crate::rational;

/// `{(x, m) ∈ R^{n+1} : Δx + m·D ≥ 0, m ≥ 0}` with lineality `(1, ..., 1, 0)`.
#[derive(Clone, Debug)]
pub struct MonoidCone {
    graph: FiniteGraph,
    base: Divisor,
}

/// A primitive generator of an extreme ray of the pointed quotient cone,
/// written on the slice `x[0] = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeRay {
    pub slice: Vec<i64>,
    pub height: u32,
}

pub fn graded_cone(g: &FiniteGraph, d: &Divisor) -> Result<MonoidCone> {
    g.check_size(d.len())?;
    Ok(MonoidCone {
        graph: g.clone(),
        base: d.clone(),
    })
}

impl MonoidCone {
    pub fn graph(&self) -> &FiniteGraph {
        &self.graph
    }

    pub fn base(&self) -> &Divisor {
        &self.base
    }

    pub fn ambient_dimension(&self) -> usize {
        self.graph.vertex_count() + 1
    }

    /// Rows `(Δ | D)` followed by the row for `m ≥ 0`.
    pub fn constraint_rows(&self) -> Vec<Vec<i64>> {
        let n = self.graph.vertex_count();
        let lap = self.graph.laplacian();
        let mut rows: Vec<Vec<i64>> = lap
            .rows()
            .iter()
            .zip(self.base.coeffs())
            .map(|(r, &d)| {
                let mut row = r.clone();
                row.push(d);
                row
            })
            .collect();
        let mut last = vec![0; n];
        last.push(1);
        rows.push(last);
        rows
    }

    pub fn lineality(&self) -> Vec<i64> {
        let mut v = vec![1; self.graph.vertex_count()];
        v.push(0);
        v
    }

    pub fn contains(&self, x: &[i64], m: i64) -> bool {
        if m < 0 || x.len() != self.graph.vertex_count() {
            return false;
        }
        (0..x.len()).all(|v| {
            let s: i64 = self
                .graph
                .neighbours(v)
                .iter()
                .map(|&(y, k)| k * (x[y] - x[v]))
                .sum();
            s + m * self.base[v] >= 0
        })
    }

    /// Extreme rays of the quotient by the lineality. Every ray has positive
    /// height: at `m = 0` the constraints force `Δx = 0`, i.e. `x` constant.
    pub fn rays(&self) -> Result<Vec<ConeRay>> {
        let verts = linear_system::slice_vertices(&self.graph, &self.base)?;
        let mut rays = Vec::with_capacity(verts.len());
        for v in verts {
            let lcm = rational::denominator_lcm(v.iter())?;
            let scale = rational::int(i64::try_from(lcm).map_err(|_| Error::Overflow("ray height"))?);
            let slice = v
                .iter()
                .map(|c| rational::big_to_i64((c * &scale).numer()))
                .collect::<Result<Vec<_>>>()?;
            let height = u32::try_from(lcm).map_err(|_| Error::Overflow("ray height"))?;
            rays.push(ConeRay { slice, height });
        }
        Ok(rays)
    }

    /// Lattice points at height `m`, on the slice `x[0] = 0`.
    pub fn points_at_height(&self, m: u32, budgets: &Budgets) -> Result<Vec<RgdElement>> {
        linear_system::enumerate_linear_system(&self.graph, &self.base, m, budgets)
    }
}

/// Degree-graded generators modulo constant shifts. Degree-0 units (the
/// constants) are implicit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSet {
    pub elements: Vec<RgdElement>,
    /// Heights searched; no irreducible lies above this.
    pub height_bound: u32,
}

impl GeneratorSet {
    pub fn degrees(&self) -> BTreeSet<u32> {
        self.elements.iter().map(|e| e.degree).collect()
    }
}

/// Hilbert basis of the pointed quotient of the graded cone.
///
/// If `p = Σ λ_i r_i` over linearly independent primitive rays and some
/// `λ_i ≥ 1`, then `p - r_i` is again a lattice point of the cone, so an
/// irreducible `p ≠ r_i` lies in the half-open fundamental parallelepiped of
/// some simplicial subcone and its height is below the sum of the ray
/// heights. All lattice points up to that height are enumerated slice by
/// slice and reduced to the irreducible ones.
pub fn hilbert_basis(cone: &MonoidCone, budgets: &Budgets) -> Result<GeneratorSet> {
    let rays = cone.rays()?;
    if rays.is_empty() {
        return Ok(GeneratorSet {
            elements: Vec::new(),
            height_bound: 0,
        });
    }
    let bound: u64 = rays.iter().map(|r| u64::from(r.height)).sum();
    if bound > u64::from(budgets.max_degree) {
        return Err(Error::DegreeOverflow {
            degree: u32::try_from(bound).unwrap_or(u32::MAX),
            bound: budgets.max_degree,
        });
    }
    let bound = bound as u32;
    let mut levels: Vec<HashSet<Vec<i64>>> = vec![HashSet::from([vec![0; cone.graph.vertex_count()]])];
    let mut by_level: Vec<Vec<RgdElement>> = vec![Vec::new()];
    let mut elements = Vec::new();
    for m in 1..=bound {
        let pts = cone.points_at_height(m, budgets)?;
        for p in &pts {
            let reducible = (1..m).any(|j| {
                by_level[j as usize].iter().any(|q| {
                    let rest: Vec<i64> = p.slice.iter().zip(&q.slice).map(|(a, b)| a - b).collect();
                    levels[(m - j) as usize].contains(&rest)
                })
            });
            if !reducible {
                elements.push(p.clone());
            }
        }
        levels.push(pts.iter().map(|p| p.slice.clone()).collect());
        by_level.push(pts);
    }
    Ok(GeneratorSet {
        elements,
        height_bound: bound,
    })
}

/// Writes `target` as a `⊙`-product of basis elements (with repetition),
/// returning the indices. Matching is on slice coordinates, so the product
/// equals the target up to a constant shift.
pub fn monoid_certificate(cone: &MonoidCone, target: &RgdElement, basis: &GeneratorSet) -> Option<Vec<usize>> {
    fn go(
        cone: &MonoidCone,
        basis: &[RgdElement],
        rest: Vec<i64>,
        m: u32,
        start: usize,
        acc: &mut Vec<usize>,
        dead: &mut HashSet<(Vec<i64>, u32, usize)>,
    ) -> bool {
        if m == 0 {
            return rest.iter().all(|&v| v == 0);
        }
        let key = (rest.clone(), m, start);
        if dead.contains(&key) {
            return false;
        }
        for (i, b) in basis.iter().enumerate().skip(start) {
            if b.degree > m {
                continue;
            }
            let next: Vec<i64> = rest.iter().zip(&b.slice).map(|(a, c)| a - c).collect();
            if !cone.contains(&next, i64::from(m - b.degree)) {
                continue;
            }
            acc.push(i);
            if go(cone, basis, next, m - b.degree, i, acc, dead) {
                return true;
            }
            acc.pop();
        }
        dead.insert(key);
        false
    }
    let mut acc = Vec::new();
    let mut dead = HashSet::new();
    go(
        cone,
        &basis.elements,
        target.slice.clone(),
        target.degree,
        0,
        &mut acc,
        &mut dead,
    )
    .then_some(acc)
}

/// One `⊕`-term: a `⊙`-product of generators plus a constant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub factors: Vec<usize>,
    pub shift: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Generated { terms: Vec<Term> },
    /// Every degree-exact product was examined and some vertex stayed uncovered.
    Absent { uncovered: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationCertificate {
    pub target: RgdElement,
    pub outcome: Outcome,
    pub products_examined: u64,
}

impl GenerationCertificate {
    pub fn is_generated(&self) -> bool {
        matches!(self.outcome, Outcome::Generated { .. })
    }

    /// Re-evaluates the `⊕`-of-products expression.
    pub fn evaluate(&self, gens: &[RgdElement]) -> Option<RationalFunction> {
        let Outcome::Generated { terms } = &self.outcome else {
            return None;
        };
        let n = self.target.function.len();
        let mut best: Option<Vec<i64>> = None;
        for t in terms {
            let mut v = vec![t.shift; n];
            for &i in &t.factors {
                for (a, b) in v.iter_mut().zip(gens[i].function.values()) {
                    *a += b;
                }
            }
            best = Some(match best {
                None => v,
                Some(b) => b.iter().zip(&v).map(|(x, y)| *x.max(y)).collect(),
            });
        }
        best.map(RationalFunction)
    }
}

/// Tracks which vertices some shifted candidate touches from below.
struct Cover<'a> {
    target: &'a [i64],
    covered: Vec<bool>,
    remaining: usize,
}

impl<'a> Cover<'a> {
    fn new(target: &'a [i64]) -> Self {
        Cover {
            target,
            covered: vec![false; target.len()],
            remaining: target.len(),
        }
    }

    /// Returns the shift when the candidate covers something new.
    fn offer(&mut self, p: &[i64]) -> Option<i64> {
        let (shift, touch) = argmin_gap(self.target, p);
        let mut fresh = false;
        for x in touch {
            if !self.covered[x] {
                self.covered[x] = true;
                self.remaining -= 1;
                fresh = true;
            }
        }
        fresh.then_some(shift)
    }

    fn done(&self) -> bool {
        self.remaining == 0
    }

    fn uncovered(&self) -> Vec<usize> {
        (0..self.covered.len()).filter(|&i| !self.covered[i]).collect()
    }
}

/// Decides whether `target` lies in the sub-semi-ring generated by `gens`
/// over `Z^trop`, by the covering criterion over all degree-exact products.
pub fn decompose(target: &RgdElement, gens: &[RgdElement], budgets: &Budgets) -> Result<GenerationCertificate> {
    if target.degree > budgets.max_degree {
        return Err(Error::DegreeOverflow {
            degree: target.degree,
            bound: budgets.max_degree,
        });
    }
    if gens.iter().any(|g| g.degree == 0) {
        return Err(Error::InvalidArgument("generators must have positive degree".into()));
    }
    let n = target.function.len();
    if let Some(g) = gens.iter().find(|g| g.function.len() != n) {
        return Err(Error::SizeMismatch {
            expected: n,
            found: g.function.len(),
        });
    }

    struct Walk<'a> {
        gens: &'a [RgdElement],
        cover: Cover<'a>,
        terms: Vec<Term>,
        factors: Vec<usize>,
        examined: u64,
        cap: u64,
    }

    impl Walk<'_> {
        fn go(&mut self, start: usize, remaining: u32, acc: &mut Vec<i64>) -> Result<()> {
            if remaining == 0 {
                self.examined += 1;
                if self.examined > self.cap {
                    return Err(Error::BudgetExceeded(format!("more than {} products", self.cap)));
                }
                if let Some(shift) = self.cover.offer(acc) {
                    self.terms.push(Term {
                        factors: self.factors.clone(),
                        shift,
                    });
                }
                return Ok(());
            }
            for i in start..self.gens.len() {
                if self.cover.done() {
                    return Ok(());
                }
                let g = &self.gens[i];
                if g.degree > remaining {
                    continue;
                }
                for (a, b) in acc.iter_mut().zip(g.function.values()) {
                    *a += b;
                }
                self.factors.push(i);
                let r = self.go(i, remaining - g.degree, acc);
                self.factors.pop();
                for (a, b) in acc.iter_mut().zip(g.function.values()) {
                    *a -= b;
                }
                r?;
            }
            Ok(())
        }
    }

    let mut walk = Walk {
        gens,
        cover: Cover::new(target.function.values()),
        terms: Vec::new(),
        factors: Vec::new(),
        examined: 0,
        cap: budgets.max_products,
    };
    if target.degree == 0 {
        // degree 0 is the units: constants only
        walk.cover.offer(&vec![0; n]);
        walk.terms.push(Term {
            factors: Vec::new(),
            shift: target.function.min_value(),
        });
    } else {
        let mut acc = vec![0; n];
        walk.go(0, target.degree, &mut acc)?;
    }
    let outcome = if walk.cover.done() {
        Outcome::Generated { terms: walk.terms }
    } else {
        Outcome::Absent {
            uncovered: walk.cover.uncovered(),
        }
    };
    Ok(GenerationCertificate {
        target: target.clone(),
        outcome,
        products_examined: walk.examined,
    })
}

/// Writes `f` as a `⊕` of shifted candidates, returning `(index, shift)`
/// pairs, or `None` when some vertex cannot be touched.
pub fn oplus_cover(f: &RationalFunction, candidates: &[RationalFunction]) -> Option<Vec<(usize, i64)>> {
    let mut cover = Cover::new(f.values());
    let mut out = Vec::new();
    for (i, c) in candidates.iter().enumerate() {
        if let Some(shift) = cover.offer(c.values()) {
            out.push((i, shift));
        }
        if cover.done() {
            return Some(out);
        }
    }
    None
}

/// Per-degree summary of a generation scan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeScan {
    pub degree: u32,
    pub elements: usize,
    pub products: usize,
    pub indecomposable: Vec<RationalFunction>,
}

/// For each `m ≤ m_max`, the elements of `R(G, m·D)` that are not generated
/// by lower degrees.
///
/// A product of two or more lower-degree elements can be regrouped as
/// `a ⊙ b` with `a ∈ R(G, i·D)` and `b ∈ R(G, (m-i)·D)`, since every partial
/// product is itself an element of the semi-ring. Pairs therefore suffice.
pub fn generation_scan(g: &FiniteGraph, d: &Divisor, m_max: u32, budgets: &Budgets) -> Result<Vec<DegreeScan>> {
    if m_max == 0 {
        return Err(Error::InvalidArgument("m_max must be at least 1".into()));
    }
    if m_max > budgets.max_degree {
        return Err(Error::DegreeOverflow {
            degree: m_max,
            bound: budgets.max_degree,
        });
    }
    let mut levels: Vec<Vec<RgdElement>> = vec![Vec::new()];
    let mut scans = Vec::new();
    for m in 1..=m_max {
        let level = linear_system::enumerate_linear_system(g, d, m, budgets)?;
        let mut products: HashSet<Vec<i64>> = HashSet::new();
        let mut pairs: u64 = 0;
        for i in 1..=m / 2 {
            for a in &levels[i as usize] {
                for b in &levels[(m - i) as usize] {
                    pairs += 1;
                    if pairs > budgets.max_products {
                        return Err(Error::BudgetExceeded(format!(
                            "more than {} products at degree {m}",
                            budgets.max_products
                        )));
                    }
                    products.insert(a.odot(b).function.0);
                }
            }
        }
        let mut products: Vec<Vec<i64>> = products.into_iter().collect();
        products.sort();
        let mut indecomposable = Vec::new();
        for f in &level {
            let mut cover = Cover::new(f.function.values());
            for p in &products {
                cover.offer(p);
                if cover.done() {
                    break;
                }
            }
            if !cover.done() {
                indecomposable.push(f.function.clone());
            }
        }
        scans.push(DegreeScan {
            degree: m,
            elements: level.len(),
            products: products.len(),
            indecomposable,
        });
        levels.push(level);
    }
    Ok(scans)
}

/// Degrees `m ≤ m_max` at which some element needs a new generator.
pub fn min_generator_degrees(g: &FiniteGraph, d: &Divisor, m_max: u32, budgets: &Budgets) -> Result<Vec<u32>> {
    Ok(generation_scan(g, d, m_max, budgets)?
        .into_iter()
        .filter(|s| !s.indecomposable.is_empty())
        .map(|s| s.degree)
        .collect())
}

/// Groups generators by degree, for reporting.
pub fn count_by_degree(elements: &[RgdElement]) -> HashMap<u32, usize> {
    let mut out = HashMap::new();
    for e in elements {
        *out.entry(e.degree).or_default() += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta_k() -> (FiniteGraph, Divisor) {
        let g = FiniteGraph::theta();
        let k = g.canonical_divisor();
        (g, k)
    }

    fn el(values: &[i64], m: u32) -> RgdElement {
        RgdElement::new(&RationalFunction(values.to_vec()), m)
    }

    #[test]
    fn theta_cone_slice_and_rays() {
        let (g, k) = theta_k();
        let cone = graded_cone(&g, &k).unwrap();
        assert_eq!(cone.ambient_dimension(), 3);
        // slice x_p = 0: |3a| <= m
        for a in -3..=3 {
            for m in 0..=4 {
                assert_eq!(cone.contains(&[0, a], m), (3 * a).abs() <= m, "a={a} m={m}");
            }
        }
        let mut rays = cone.rays().unwrap();
        rays.sort_by_key(|r| r.slice.clone());
        assert_eq!(
            rays,
            vec![
                ConeRay { slice: vec![0, -1], height: 3 },
                ConeRay { slice: vec![0, 1], height: 3 }
            ]
        );
        assert_eq!(cone.lineality(), vec![1, 1, 0]);
    }

    #[test]
    fn path_cone_slice() {
        let g = FiniteGraph::path(1);
        let d = Divisor(vec![1, 0]);
        let cone = graded_cone(&g, &d).unwrap();
        for a in -4..=2 {
            for m in 0..=3 {
                assert_eq!(cone.contains(&[0, a], m), -m <= a && a <= 0);
            }
        }
    }

    #[test]
    fn theta_hilbert_basis() {
        let (g, k) = theta_k();
        let basis = hilbert_basis(&graded_cone(&g, &k).unwrap(), &Budgets::default()).unwrap();
        assert_eq!(basis.degrees(), BTreeSet::from([1, 3]));
        let mut slices: Vec<(u32, Vec<i64>)> =
            basis.elements.iter().map(|e| (e.degree, e.slice.clone())).collect();
        slices.sort();
        assert_eq!(slices, vec![(1, vec![0, 0]), (3, vec![0, -1]), (3, vec![0, 1])]);
    }

    #[test]
    fn path_hilbert_basis() {
        let g = FiniteGraph::path(1);
        let d = Divisor(vec![1, 0]);
        let basis = hilbert_basis(&graded_cone(&g, &d).unwrap(), &Budgets::default()).unwrap();
        let mut slices: Vec<Vec<i64>> = basis.elements.iter().map(|e| e.slice.clone()).collect();
        slices.sort();
        assert_eq!(slices, vec![vec![0, -1], vec![0, 0]]);
        assert_eq!(basis.degrees(), BTreeSet::from([1]));
    }

    #[test]
    fn zero_divisor_basis_is_degree_one_constant() {
        let g = FiniteGraph::path(2);
        let basis = hilbert_basis(&graded_cone(&g, &Divisor::zero(3)).unwrap(), &Budgets::default()).unwrap();
        assert_eq!(basis.elements.len(), 1);
        assert!(basis.elements[0].function.is_constant());
        assert_eq!(basis.elements[0].degree, 1);
        let neg = hilbert_basis(&graded_cone(&g, &Divisor(vec![-1, 0, 0])).unwrap(), &Budgets::default()).unwrap();
        assert!(neg.elements.is_empty());
    }

    #[test]
    fn theta_decompositions() {
        let gens = vec![el(&[0, 0], 1), el(&[0, 1], 3), el(&[1, 0], 3)];
        let b = Budgets::default();
        let cert = decompose(&el(&[0, 1], 4), &gens, &b).unwrap();
        assert!(cert.is_generated());
        assert_eq!(cert.evaluate(&gens).unwrap().normalized(), RationalFunction(vec![0, 1]));
        let Outcome::Generated { terms } = &cert.outcome else { unreachable!() };
        assert!(terms.iter().any(|t| t.factors == vec![0, 1]));

        let low = vec![el(&[0, 0], 1), el(&[0, 0], 2)];
        let cert = decompose(&el(&[0, 1], 3), &low, &b).unwrap();
        assert!(!cert.is_generated());

        let me = decompose(&gens[1], &gens, &b).unwrap();
        assert!(me.is_generated());
        let Outcome::Generated { terms } = &me.outcome else { unreachable!() };
        assert!(terms.iter().any(|t| t.factors == vec![1]));
    }

    #[test]
    fn decompose_respects_degree_bound() {
        let b = Budgets {
            max_degree: 2,
            ..Budgets::default()
        };
        assert!(matches!(
            decompose(&el(&[0, 0], 3), &[el(&[0, 0], 1)], &b),
            Err(Error::DegreeOverflow { degree: 3, bound: 2 })
        ));
    }

    #[test]
    fn generator_degrees_examples() {
        let (g, k) = theta_k();
        let b = Budgets::default();
        assert_eq!(min_generator_degrees(&g, &k, 6, &b).unwrap(), vec![1, 3]);
        let path = FiniteGraph::path(1);
        assert_eq!(min_generator_degrees(&path, &Divisor(vec![1, 0]), 4, &b).unwrap(), vec![1]);
    }

    #[test]
    fn monoid_certificates_on_theta() {
        let (g, k) = theta_k();
        let b = Budgets::default();
        let cone = graded_cone(&g, &k).unwrap();
        let basis = hilbert_basis(&cone, &b).unwrap();
        for m in 0..=8 {
            for p in cone.points_at_height(m, &b).unwrap() {
                let idx = monoid_certificate(&cone, &p, &basis).expect("certificate");
                let deg: u32 = idx.iter().map(|&i| basis.elements[i].degree).sum();
                assert_eq!(deg, m);
            }
        }
    }

    #[test]
    fn oplus_cover_reconstructs() {
        let f = RationalFunction(vec![0, 0]);
        let cands = vec![RationalFunction(vec![0, 1]), RationalFunction(vec![1, 0])];
        let cover = oplus_cover(&f, &cands).unwrap();
        assert_eq!(cover.len(), 2);
        assert!(oplus_cover(&f, &cands[..1]).is_none());
    }
}
