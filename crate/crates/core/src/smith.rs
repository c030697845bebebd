//! Smith normal form over the integers.
//!
//! `smith_normal_form(A)` returns unimodular `U`, `V` and the invariant
//! factors with `U·A·V = diag(s_1, ..., s_r, 0, ...)` and `s_i | s_{i+1}`.
//! Used for general integer linear systems and for invariant factors of
//! Laplacians (the sandpile group).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Matrix = Vec<Vec<BigInt>>;

#[derive(Clone, Debug)]
pub struct Smith {
    pub u: Matrix,
    pub v: Matrix,
    /// The full diagonalized matrix `U·A·V`.
    pub d: Matrix,
    pub rank: usize,
}

impl Smith {
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.d[i][i].clone()).collect()
    }
}

fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

fn swap_cols(m: &mut Matrix, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// `row[dst] += k * row[src]`
fn add_row(m: &mut Matrix, dst: usize, src: usize, k: &BigInt) {
    let src_row = m[src].clone();
    for (x, s) in m[dst].iter_mut().zip(src_row) {
        *x += k * s;
    }
}

fn add_col(m: &mut Matrix, dst: usize, src: usize, k: &BigInt) {
    for row in m.iter_mut() {
        let s = row[src].clone();
        row[dst] += k * s;
    }
}

pub fn smith_normal_form(a: &Matrix) -> Smith {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut d = a.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !d[i][j].is_zero()
                    && best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut v, t, pj);

        let mut clean = true;
        for i in t + 1..rows {
            if !d[i][t].is_zero() {
                let q = -d[i][t].div_floor(&d[t][t]);
                add_row(&mut d, i, t, &q);
                add_row(&mut u, i, t, &q);
                if !d[i][t].is_zero() {
                    clean = false;
                }
            }
        }
        for j in t + 1..cols {
            if !d[t][j].is_zero() {
                let q = -d[t][j].div_floor(&d[t][t]);
                add_col(&mut d, j, t, &q);
                add_col(&mut v, j, t, &q);
                if !d[t][j].is_zero() {
                    clean = false;
                }
            }
        }
        if !clean {
            continue;
        }
        // divisibility: pull a non-multiple into row t and retry
        let mut fixed = true;
        'outer: for i in t + 1..rows {
            for j in t + 1..cols {
                if !d[i][j].is_multiple_of(&d[t][t]) {
                    let one = BigInt::one();
                    add_row(&mut d, t, i, &one);
                    add_row(&mut u, t, i, &one);
                    fixed = false;
                    break 'outer;
                }
            }
        }
        if !fixed {
            continue;
        }
        if d[t][t].is_negative() {
            let m1 = -BigInt::one();
            for x in d[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = &*x * &m1;
            }
        }
        t += 1;
    }
    Smith { u, v, d, rank: t }
}

/// An integer solution of `A·x = b`, or `None` if there is none.
pub fn solve_integer(a: &Matrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    assert_eq!(b.len(), rows);
    let s = smith_normal_form(a);
    let ub: Vec<BigInt> = (0..rows)
        .map(|i| (0..rows).map(|k| &s.u[i][k] * &b[k]).sum())
        .collect();
    let mut y = vec![BigInt::zero(); cols];
    for i in 0..rows {
        if i < s.rank {
            let (q, r) = ub[i].div_rem(&s.d[i][i]);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !ub[i].is_zero() {
            return None;
        }
    }
    Some(
        (0..cols)
            .map(|i| (0..cols).map(|k| &s.v[i][k] * &y[k]).sum())
            .collect(),
    )
}

/// Fraction-free (Bareiss) determinant.
pub fn determinant(a: &Matrix) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let val = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = val / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}
