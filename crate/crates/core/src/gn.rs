//! The family `G_n`: the theta graph with each edge subdivided into a
//! segment of `2n - 1` edges. The canonical semi-ring of `G_n` is not
//! generated in degree at most `n - 1`.

use serde::{Deserialize, Serialize};

use crate::budget::Budgets;
use crate::error::{Error, Result};
use crate::graph::{Divisor, FiniteGraph, RationalFunction};
use crate::linear_system::{self, RgdElement};
use crate::semiring::{self, Outcome};

#[derive(Clone, Debug)]
pub struct GnGraph {
    pub n: usize,
    pub graph: FiniteGraph,
    pub p: usize,
    pub q: usize,
    /// `n` edges from `p` along segment 0.
    pub r: usize,
    /// One edge from `p` along segments 1 and 2.
    pub u: usize,
    pub w: usize,
    /// Vertices of each segment from `p` to `q` inclusive.
    pub segments: [Vec<usize>; 3],
}

pub fn build_gn(n: usize) -> Result<GnGraph> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let inner = 2 * n - 2;
    let count = 2 + 3 * inner;
    let mut edges = Vec::with_capacity(3 * (2 * n - 1));
    let mut labels = vec!["p".to_string(), "q".to_string()];
    let mut segments: [Vec<usize>; 3] = Default::default();
    for (s, seg) in segments.iter_mut().enumerate() {
        seg.push(0);
        for j in 0..inner {
            let v = 2 + s * inner + j;
            seg.push(v);
            labels.push(format!("s{s}_{}", j + 1));
        }
        seg.push(1);
        edges.extend(seg.windows(2).map(|w| (w[0], w[1])));
    }
    let graph = FiniteGraph::new(count, edges)?.with_labels(labels)?;
    Ok(GnGraph {
        n,
        r: segments[0][n],
        u: segments[1][1],
        w: segments[2][1],
        p: 0,
        q: 1,
        graph,
        segments,
    })
}

/// One evaluation of `k = (2n - 1)(3h(p) - 2h(u) - h(w))` for an `h` with
/// `kK + div(h) = 2k[r]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegrityCheck {
    pub k: u32,
    pub h: RationalFunction,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GnReport {
    pub n: usize,
    pub vertices: usize,
    pub edges: usize,
    pub vacuous: bool,
    pub witness: RationalFunction,
    pub witness_ok: bool,
    pub extremal: bool,
    pub generated_below: bool,
    /// Largest degree searched for a decomposition.
    pub search_bound: u32,
    pub lower_elements: Vec<usize>,
    pub products_examined: u64,
    /// Lower-degree elements `h` with `kK + div(h) = 2k[r]` met during the search.
    pub search_candidates: Vec<IntegrityCheck>,
    /// Direct solves of `kK ~ 2k[r]` for `k ≤ 3(2n - 1)`.
    pub integrality: Vec<IntegrityCheck>,
}

impl GnReport {
    pub fn passed(&self) -> bool {
        self.vacuous
            || (self.witness_ok
                && self.extremal
                && !self.generated_below
                && self.search_candidates.iter().all(|c| c.holds)
                && self.integrality.iter().all(|c| c.holds))
    }

    pub fn ensure(&self) -> Result<()> {
        if self.passed() {
            return Ok(());
        }
        let mut failed = Vec::new();
        if !self.witness_ok {
            failed.push("witness");
        }
        if !self.extremal {
            failed.push("extremality");
        }
        if self.generated_below {
            failed.push("non-generation");
        }
        if !self.search_candidates.iter().chain(&self.integrality).all(|c| c.holds) {
            failed.push("integrality identity");
        }
        Err(Error::VerificationFailed(format!("G_{}: {}", self.n, failed.join(", "))))
    }
}

impl GnGraph {
    fn identity_holds(&self, k: u32, h: &RationalFunction) -> bool {
        let odd = 2 * self.n as i64 - 1;
        i64::from(k) == odd * (3 * h[self.p] - 2 * h[self.u] - h[self.w])
    }

    fn check(&self, k: u32, h: &RationalFunction) -> IntegrityCheck {
        IntegrityCheck {
            k,
            h: h.clone(),
            holds: self.identity_holds(k, h),
        }
    }

    /// `[p] + (2n - 1)[r]`
    pub fn witness_target(&self) -> Divisor {
        let mut t = Divisor::zero(self.graph.vertex_count());
        t.0[self.p] += 1;
        t.0[self.r] += 2 * self.n as i64 - 1;
        t
    }
}

/// Checks that `R(G_n)` is not generated in degree `≤ n - 1`.
///
/// The three legs: a witness `f` with `nK + div(f) = [p] + (2n-1)[r]`, its
/// extremality, and an exhaustive search over degree-`n` products of all
/// lower-degree elements that leaves some vertex uncovered.
pub fn verify_gn(n: usize, budgets: &Budgets) -> Result<GnReport> {
    let gn = build_gn(n)?;
    let g = &gn.graph;
    let k = g.canonical_divisor();
    let nk = n as i64 * k.clone();
    let target = gn.witness_target();
    let mut report = GnReport {
        n,
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        vacuous: n == 1,
        witness: RationalFunction::constant(g.vertex_count(), 0),
        witness_ok: false,
        extremal: false,
        generated_below: false,
        search_bound: n as u32 - 1,
        lower_elements: Vec::new(),
        products_examined: 0,
        search_candidates: Vec::new(),
        integrality: Vec::new(),
    };
    if n == 1 {
        return Ok(report);
    }
    let degree = u32::try_from(n).map_err(|_| Error::Overflow("n"))?;
    if degree > budgets.max_degree {
        return Err(Error::DegreeOverflow {
            degree,
            bound: budgets.max_degree,
        });
    }

    let Some(f) = g.linear_equiv(&target, &nk)? else {
        return Ok(report);
    };
    report.witness_ok = g.div(&f)? + nk.clone() == target;
    report.witness = f.clone();
    report.extremal = linear_system::is_extremal(g, &nk, &f, budgets)?;

    let mut gens: Vec<RgdElement> = Vec::new();
    for m in 1..degree {
        let level = linear_system::enumerate_linear_system(g, &k, m, budgets)?;
        report.lower_elements.push(level.len());
        let two_r = Divisor::from_points(g.vertex_count(), &[(gn.r, 2 * i64::from(m))])?;
        let mk = i64::from(m) * k.clone();
        for el in &level {
            if g.div(&el.function)? + mk.clone() == two_r {
                report.search_candidates.push(gn.check(m, &el.function));
            }
        }
        gens.extend(level);
    }
    let cert = semiring::decompose(&RgdElement::new(&f, degree), &gens, budgets)?;
    report.products_examined = cert.products_examined;
    report.generated_below = matches!(cert.outcome, Outcome::Generated { .. });

    for kk in 1..=3 * (2 * degree - 1) {
        let kk_k = i64::from(kk) * k.clone();
        let two_r = Divisor::from_points(g.vertex_count(), &[(gn.r, 2 * i64::from(kk))])?;
        // kK + div(h) = 2k[r]
        if let Some(h) = g.linear_equiv(&two_r, &kk_k)? {
            report.integrality.push(gn.check(kk, &h));
        }
    }
    Ok(report)
}
