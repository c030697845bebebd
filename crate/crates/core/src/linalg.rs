//! Exact solves of Laplacian systems `Δx = b`.
//!
//! For a connected graph the kernel of `Δ` is spanned by the all-ones vector,
//! so fixing `x[0] = 0` leaves a nonsingular system (the reduced Laplacian,
//! whose determinant counts spanning trees). Integer solvability of `Δx = b`
//! is then decided by solving the reduced system over the rationals: any
//! integer solution `y` gives the integral reduced solution `y - y[0]`, and
//! the reduced solution is unique.
//!
//! The negated reduced Laplacian is symmetric positive definite, so diagonal
//! pivots never vanish and a fill-reducing (minimum degree) order can be used
//! freely. Subdivided edges (long chains of 2-valent vertices) then eliminate
//! without fill.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::Result;
use crate::graph::FiniteGraph;
use crate::rational::{self, Rational};

/// Solves `Δx = b` with `x[0] = 0`. Returns `None` when `sum(b) != 0`.
pub fn solve_laplacian(g: &FiniteGraph, b: &[Rational]) -> Option<Vec<Rational>> {
    let n = g.vertex_count();
    assert_eq!(b.len(), n);
    let total: Rational = b.iter().sum();
    if !total.is_zero() {
        return None;
    }
    if n == 1 {
        return Some(vec![Rational::zero()]);
    }
    // Unknowns 1..n, equation rows 1..n of the negated system -Δx = -b.
    let mut rows: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); n];
    let mut rhs: Vec<Rational> = b.iter().map(|v| -v.clone()).collect();
    for x in 1..n {
        let row = &mut rows[x];
        row.insert(x, rational::int(g.proper_degree(x)));
        for &(y, m) in g.neighbours(x) {
            if y != 0 {
                row.insert(y, rational::int(-m));
            }
        }
    }
    let mut alive: Vec<bool> = (0..n).map(|x| x != 0).collect();
    let mut order = Vec::with_capacity(n - 1);
    let mut pivots: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); n];
    for _ in 1..n {
        let k = (1..n)
            .filter(|&x| alive[x])
            .min_by_key(|&x| (rows[x].len(), x))
            .expect("a live variable remains");
        alive[k] = false;
        let row_k = std::mem::take(&mut rows[k]);
        let pivot = row_k[&k].clone();
        for (&j, a_kj) in row_k.iter() {
            if j == k {
                continue;
            }
            // symmetric: a_jk == a_kj
            let factor = a_kj / &pivot;
            let rj = &mut rows[j];
            rj.remove(&k);
            for (&i, a_ki) in row_k.iter() {
                if i == k {
                    continue;
                }
                let entry = rj.entry(i).or_insert_with(Rational::zero);
                *entry -= &factor * a_ki;
                if entry.is_zero() {
                    rj.remove(&i);
                }
            }
            let delta = &factor * &rhs[k];
            rhs[j] -= delta;
        }
        order.push(k);
        pivots[k] = row_k;
    }
    let mut x = vec![Rational::zero(); n];
    for &k in order.iter().rev() {
        let row = &pivots[k];
        let mut acc = rhs[k].clone();
        for (&j, a) in row.iter() {
            if j != k {
                acc -= a * &x[j];
            }
        }
        x[k] = acc / &row[&k];
    }
    Some(x)
}

/// Integer solution of `Δx = b` with `x[0] = 0`, if one exists.
pub fn solve_laplacian_integral(g: &FiniteGraph, b: &[i64]) -> Result<Option<Vec<i64>>> {
    let b: Vec<Rational> = b.iter().map(|&v| rational::int(v)).collect();
    let Some(x) = solve_laplacian(g, &b) else {
        return Ok(None);
    };
    if !x.iter().all(|v| v.is_integer()) {
        return Ok(None);
    }
    x.iter()
        .map(|v| rational::big_to_i64(v.numer()))
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

/// Matrix-tree count: the absolute determinant of the reduced Laplacian.
pub fn spanning_tree_count(g: &FiniteGraph) -> BigInt {
    let n = g.vertex_count();
    if n == 1 {
        return BigInt::from(1);
    }
    let lap = g.laplacian();
    let m: Vec<Vec<BigInt>> = (1..n)
        .map(|i| (1..n).map(|j| BigInt::from(lap.rows()[i][j])).collect())
        .collect();
    crate::smith::determinant(&m).abs()
}
