//! Non-finite generation certificates for `⊕_m R(Γ, m·D)`.
//!
//! Setting: `Γ` a ℤ-metric graph of genus `g ≥ 2`, `D` a ℤ-divisor of
//! degree `d ≥ 2`, and a non-bridge edge `e = (p, q)` of length `L` with
//! `n·D ~ (nd/2)([p] + [q])`. For `s` a multiple of `n` put `N = s·d` and let
//! `r` be the point at offset `LN/(2LN - 1)·L` on `e`. Then
//!
//! * `f̃`, zero off `e` and linear on both sides of `r` with
//!   `f̃(r) = -LN(LN - 1)L/(2LN - 1)`, has orders `-(LN - 1)`, `-LN` and
//!   `2LN - 1` at `p`, `q` and `r`;
//! * `f = f̃ - 2L·φ_s`, where `div(φ_s) = sD - (N/2)([p] + [q])`, satisfies
//!   `2sL·D + div(f) = [p] + (2LN - 1)[r]` and is extremal;
//! * a decomposition of `f` through degrees below `2sL` would split off some
//!   `h` with `kD + div(h) = kd[r]` for `1 ≤ k ≤ 2sL - 1`.
//!
//! The last step is checked directly: each `kD ~ kd[r]` is decided exactly by
//! [`linear_equiv_metric`], so the integrality argument behind it is
//! replaced by a finite computation for the given instance.

use num_traits::Zero;
use serde::Serialize;

use crate::budget::Budgets;
use crate::error::{Error, Result};
use crate::graph::FiniteGraph;
use crate::metric::{
    firing_subgraphs, is_extremal_metric, linear_equiv_metric_with, MetricDivisor, MetricGraph, MetricSubgraph,
    PlFunction, Point,
};
use crate::rational::{self, Rational};

#[derive(Clone, Debug)]
pub struct WitnessInstance {
    pub graph: MetricGraph,
    pub divisor: MetricDivisor,
    pub edge: usize,
    /// The multiple in `n·D ~ (nd/2)([p] + [q])`.
    pub n: u32,
}

impl WitnessInstance {
    pub fn new(graph: MetricGraph, divisor: MetricDivisor, edge: usize, n: u32) -> Result<Self> {
        graph.validate_divisor(&divisor)?;
        if edge >= graph.edge_count() {
            return Err(Error::IndexOutOfRange {
                index: edge,
                bound: graph.edge_count(),
            });
        }
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        Ok(WitnessInstance {
            graph,
            divisor,
            edge,
            n,
        })
    }

    pub fn p(&self) -> usize {
        self.graph.model().edge(self.edge).0
    }

    pub fn q(&self) -> usize {
        self.graph.model().edge(self.edge).1
    }

    pub fn degree(&self) -> i64 {
        self.divisor.degree()
    }

    pub fn length(&self) -> &Rational {
        self.graph.length(self.edge)
    }

    pub fn genus(&self) -> usize {
        self.graph.genus()
    }

    /// `c·[p] + c·[q]`
    fn ends(&self, c: i64) -> MetricDivisor {
        MetricDivisor::from_points([(Point::Vertex(self.p()), c), (Point::Vertex(self.q()), c)])
    }
}

/// Each hypothesis of the criterion, reported separately.
#[derive(Clone, Debug, Serialize)]
pub struct HypothesisReport {
    pub genus: usize,
    pub degree: i64,
    pub length: String,
    pub z_metric: bool,
    pub z_divisor: bool,
    pub genus_at_least_two: bool,
    pub degree_at_least_two: bool,
    pub not_bridge: bool,
    pub nd_even: bool,
    pub equivalent: bool,
    #[serde(skip)]
    pub equivalence: Option<PlFunction>,
}

impl HypothesisReport {
    pub fn passed(&self) -> bool {
        self.z_metric
            && self.z_divisor
            && self.genus_at_least_two
            && self.degree_at_least_two
            && self.not_bridge
            && self.nd_even
            && self.equivalent
    }

    fn failures(&self) -> Vec<&'static str> {
        let checks = [
            (self.z_metric, "integer edge lengths"),
            (self.z_divisor, "divisor on ℤ-points"),
            (self.genus_at_least_two, "genus at least 2"),
            (self.degree_at_least_two, "degree at least 2"),
            (self.not_bridge, "edge is not a bridge"),
            (self.nd_even, "n·d even"),
            (self.equivalent, "n·D ~ (nd/2)([p] + [q])"),
        ];
        checks.iter().filter(|(ok, _)| !ok).map(|(_, name)| *name).collect()
    }
}

pub fn check_hypotheses(inst: &WitnessInstance, budgets: &Budgets) -> Result<HypothesisReport> {
    let g = &inst.graph;
    let d = inst.degree();
    let nd = i64::from(inst.n) * d;
    let mut report = HypothesisReport {
        genus: inst.genus(),
        degree: d,
        length: rational::format(inst.length()),
        z_metric: g.is_z_metric(),
        z_divisor: inst.divisor.is_z_divisor(g),
        genus_at_least_two: inst.genus() >= 2,
        degree_at_least_two: d >= 2,
        not_bridge: !g.model().is_bridge(inst.edge),
        nd_even: nd % 2 == 0,
        equivalent: false,
        equivalence: None,
    };
    if report.nd_even {
        let lhs = i64::from(inst.n) * inst.divisor.clone();
        let phi = linear_equiv_metric_with(g, &lhs, &inst.ends(nd / 2), budgets)?;
        report.equivalent = phi.is_some();
        report.equivalence = phi;
    }
    Ok(report)
}

/// Outcome of one `kD ~ kd[r]` test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KCheck {
    pub k: i64,
    pub equivalent: bool,
}

#[derive(Clone, Debug)]
pub struct WitnessResult {
    pub s: u32,
    /// `N = s·d`
    pub chips: i64,
    pub length: Rational,
    pub r: Point,
    pub r_offset: Rational,
    pub ftilde: PlFunction,
    pub f: PlFunction,
    /// Orders of `f̃` at `p`, `q`, `r`.
    pub orders: [i64; 3],
    pub expected_orders: [i64; 3],
    pub orders_ok: bool,
    pub extremal: bool,
    pub firing: Vec<MetricSubgraph>,
    pub degree: i64,
}

fn integer_length(inst: &WitnessInstance) -> Result<i64> {
    rational::to_i64(inst.length())
        .ok_or_else(|| Error::HypothesisFailure("edge length must be an integer".into()))
}

/// Builds `r`, `f̃` and `f` for `s` and checks its orders and extremality exactly.
pub fn build_witness(inst: &WitnessInstance, hyp: &HypothesisReport, s: u32, budgets: &Budgets) -> Result<WitnessResult> {
    if !hyp.passed() {
        return Err(Error::HypothesisFailure(hyp.failures().join(", ")));
    }
    if s == 0 || !s.is_multiple_of(inst.n) {
        return Err(Error::InvalidArgument(format!("s = {s} must be a positive multiple of n = {}", inst.n)));
    }
    let phi = hyp.equivalence.as_ref().expect("equivalence found when hypotheses pass");
    let g = &inst.graph;
    let l = integer_length(inst)?;
    let d = inst.degree();
    let ln = l * i64::from(s) * d;
    let odd = 2 * ln - 1;
    let len = rational::int(l);
    let r_offset = rational::frac(ln, odd) * &len;
    let r = g.point(inst.edge, r_offset.clone())?;
    if g.is_z_point(&r) {
        return Err(Error::VerificationFailed("r is a ℤ-point".into()));
    }

    let r_value = -rational::frac(ln * (ln - 1), odd) * &len;
    let mut pieces: Vec<Vec<(Rational, Rational)>> = g
        .lengths()
        .iter()
        .map(|x| vec![(Rational::zero(), Rational::zero()), (x.clone(), Rational::zero())])
        .collect();
    pieces[inst.edge] = vec![
        (Rational::zero(), Rational::zero()),
        (r_offset.clone(), r_value),
        (len.clone(), Rational::zero()),
    ];
    let ftilde = PlFunction::new(g, pieces)?;
    let (p, q) = (Point::Vertex(inst.p()), Point::Vertex(inst.q()));
    let orders = [ftilde.ord(g, &p), ftilde.ord(g, &q), ftilde.ord(g, &r)];
    let expected_orders = if inst.p() == inst.q() {
        // a loop: both ends meet at p
        [-(2 * ln - 1), -(2 * ln - 1), odd]
    } else {
        [-(ln - 1), -ln, odd]
    };

    // div(φ_s) = sD - (N/2)([p] + [q]) with φ_s = (s/n)·φ
    let phi_s = phi.scaled(i64::from(s / inst.n));
    let f = ftilde.sub(&phi_s.scaled(2 * l))?.normalized();
    let degree = 2 * i64::from(s) * l;
    let big_d = degree * inst.divisor.clone();
    let target = MetricDivisor::from_points([(p.clone(), 1), (r.clone(), odd)]);
    let orders_ok = orders == expected_orders
        && ftilde.div(g) == target.clone() - inst.ends(ln)
        && big_d.clone() + f.div(g) == target;
    if !orders_ok {
        return Err(Error::VerificationFailed(format!(
            "{degree}·D + div(f) differs from [p] + {odd}[r]; orders {orders:?}"
        )));
    }
    let extremal = is_extremal_metric(g, &big_d, &f, budgets)?;
    let firing = firing_subgraphs(g, &target, budgets)?;
    Ok(WitnessResult {
        s,
        chips: i64::from(s) * d,
        length: len,
        r,
        r_offset,
        ftilde,
        f,
        orders,
        expected_orders,
        orders_ok,
        extremal,
        firing,
        degree,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Obstruction {
    /// `kD ~ kd[r]` for `k = 1, ..., 2sL - 1`; all must be false.
    pub checks: Vec<KCheck>,
    /// Smallest `k ≤ 4(2LN - 1)` with `kD ~ kd[r]`, for information.
    pub first_equivalent: Option<i64>,
    /// `2LN - 1`
    pub modulus: i64,
    pub holds: bool,
    /// Every equivalent `k` found is a multiple of `2LN - 1`.
    pub consistent: bool,
}

pub fn indecomposability_check(inst: &WitnessInstance, w: &WitnessResult, budgets: &Budgets) -> Result<Obstruction> {
    let g = &inst.graph;
    let d = inst.degree();
    let modulus = 2 * rational::to_i64(&w.length).expect("integer length") * w.chips - 1;
    let test = |k: i64| -> Result<bool> {
        let lhs = k * inst.divisor.clone();
        let rhs = MetricDivisor::from_points([(w.r.clone(), k * d)]);
        Ok(linear_equiv_metric_with(g, &lhs, &rhs, budgets)?.is_some())
    };
    let mut checks = Vec::new();
    for k in 1..w.degree {
        checks.push(KCheck {
            k,
            equivalent: test(k)?,
        });
    }
    let mut first_equivalent = checks.iter().find(|c| c.equivalent).map(|c| c.k);
    if first_equivalent.is_none() {
        for k in w.degree..=4 * modulus {
            if test(k)? {
                first_equivalent = Some(k);
                break;
            }
        }
    }
    let holds = checks.iter().all(|c| !c.equivalent);
    let consistent = first_equivalent.is_none_or(|k| k % modulus == 0)
        && checks.iter().filter(|c| c.equivalent).all(|c| c.k % modulus == 0);
    Ok(Obstruction {
        checks,
        first_equivalent,
        modulus,
        holds,
        consistent,
    })
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub witness: WitnessResult,
    pub obstruction: Obstruction,
}

impl Certificate {
    pub fn holds(&self) -> bool {
        self.witness.orders_ok && self.witness.extremal && self.obstruction.holds && self.obstruction.consistent
    }
}

#[derive(Clone, Debug)]
pub struct NonfiniteReport {
    pub hypotheses: HypothesisReport,
    pub certificates: Vec<Certificate>,
}

impl NonfiniteReport {
    pub fn holds(&self) -> bool {
        self.hypotheses.passed() && !self.certificates.is_empty() && self.certificates.iter().all(Certificate::holds)
    }

    pub fn statement(&self) -> String {
        let degrees: Vec<String> = self.certificates.iter().map(|c| c.witness.degree.to_string()).collect();
        format!(
            "extremals of degree {} are not generated in lower degree; a generating set bounded by degree M misses the one built with 2sL > M",
            degrees.join(", ")
        )
    }
}

/// One certificate per `s`, each a verified indispensable extremal.
pub fn nonfinite_certificate(inst: &WitnessInstance, s_list: &[u32], budgets: &Budgets) -> Result<NonfiniteReport> {
    if s_list.is_empty() {
        return Err(Error::InvalidArgument("s_list must be nonempty".into()));
    }
    let hypotheses = check_hypotheses(inst, budgets)?;
    let mut certificates = Vec::with_capacity(s_list.len());
    for &s in s_list {
        let witness = build_witness(inst, &hypotheses, s, budgets)?;
        let obstruction = indecomposability_check(inst, &witness, budgets)?;
        certificates.push(Certificate { witness, obstruction });
    }
    Ok(NonfiniteReport {
        hypotheses,
        certificates,
    })
}

/// `K_n` with every edge of length `len`, `D = K_Γ` and `e` joining vertices 0 and 1.
pub fn complete_graph_instance(n: usize, len: i64) -> Result<WitnessInstance> {
    if n < 4 {
        return Err(Error::InvalidArgument("complete graph needs at least 4 vertices".into()));
    }
    if len <= 0 {
        return Err(Error::InvalidArgument("edge length must be positive".into()));
    }
    let g = MetricGraph::uniform(FiniteGraph::complete(n), len)?;
    let k = g.canonical_divisor();
    let n_param = if n % 2 == 1 { 1 } else { 2 };
    WitnessInstance::new(g, k, 0, n_param)
}

/// Theta graph with unit lengths and `D = K_Γ`, `n = 1`.
pub fn theta_instance() -> WitnessInstance {
    let g = MetricGraph::uniform(FiniteGraph::theta(), 1).expect("theta is a valid metric graph");
    let k = g.canonical_divisor();
    WitnessInstance::new(g, k, 0, 1).expect("theta instance is valid")
}
