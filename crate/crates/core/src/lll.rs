//! Integer LLL reduction (delta = 3/4) with exact rational Gram-Schmidt
//! data maintained incrementally (size reductions shift mu rows, swaps
//! use the standard local update), so large kernels reduce in
//! polynomial time without re-orthogonalizing. For a saturated rank-d
//! lattice in Z^m this guarantees
//! `prod ||b_i|| <= 2^(d(d-1)/4) * det(L)`, strictly stronger than the
//! `d^d` slack the Siegel certificate needs.

use num_bigint::BigInt;
use num_rational::BigRational;
#[allow(unused_imports)]
use num_traits::{Signed, Zero};

use crate::linalg::IMat;

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

struct Gso {
    // mu[i][j] for j < i (lower triangle, ragged).
    mu: Vec<Vec<BigRational>>,
    // Squared norms of the orthogonalized vectors.
    b: Vec<BigRational>,
}

fn gso(basis: &IMat) -> Gso {
    let n = basis.len();
    let mut star: Vec<Vec<BigRational>> = Vec::with_capacity(n);
    let mut mu: Vec<Vec<BigRational>> = vec![Vec::new(); n];
    let mut b: Vec<BigRational> = Vec::with_capacity(n);
    for i in 0..n {
        let mut v: Vec<BigRational> = basis[i]
            .iter()
            .map(|x| BigRational::from_integer(x.clone()))
            .collect();
        let mut mrow = Vec::with_capacity(i);
        for j in 0..i {
            let m = if b[j].is_zero() {
                BigRational::zero()
            } else {
                let d: BigRational = star[j]
                    .iter()
                    .zip(basis[i].iter())
                    .map(|(x, y)| x * BigRational::from_integer(y.clone()))
                    .fold(BigRational::zero(), |acc, v| acc + v);
                d / &b[j]
            };
            for (vk, sk) in v.iter_mut().zip(star[j].iter()) {
                *vk -= &m * sk;
            }
            mrow.push(m);
        }
        let norm = v
            .iter()
            .map(|x| x * x)
            .fold(BigRational::zero(), |acc, t| acc + t);
        mu[i] = mrow;
        b.push(norm);
        star.push(v);
    }
    Gso { mu, b }
}

fn round_rat(q: &BigRational) -> BigInt {
    // floor(q + 1/2); the tie direction is irrelevant for size reduction.
    let two = BigInt::from(2);
    let num = q.numer() * &two + q.denom();
    num_integer::Integer::div_floor(&num, &(q.denom() * &two))
}

/// `b_k -= r b_j` with the matching mu-row update (b* untouched).
fn size_reduce(basis: &mut IMat, g: &mut Gso, k: usize, j: usize) {
    let r = round_rat(&g.mu[k][j]);
    if r.is_zero() {
        return;
    }
    let row_j = basis[j].clone();
    for (x, y) in basis[k].iter_mut().zip(row_j.iter()) {
        *x -= &r * y;
    }
    let rq = BigRational::from_integer(r);
    for i in 0..j {
        let adj = &rq * &g.mu[j][i];
        g.mu[k][i] -= adj;
    }
    g.mu[k][j] -= rq;
}

/// Swap rows k-1 and k and patch the Gram-Schmidt data locally.
fn swap_step(basis: &mut IMat, g: &mut Gso, k: usize) {
    basis.swap(k - 1, k);
    let n = basis.len();
    let mu_ = g.mu[k][k - 1].clone();
    let b_new = &g.b[k] + &mu_ * &mu_ * &g.b[k - 1];
    if b_new.is_zero() {
        // Degenerate (dependent rows); fall back to full recomputation.
        let fresh = gso(basis);
        g.mu = fresh.mu;
        g.b = fresh.b;
        return;
    }
    let mu_new = &mu_ * &g.b[k - 1] / &b_new;
    g.b[k] = &g.b[k - 1] * &g.b[k] / &b_new;
    g.b[k - 1] = b_new;
    for i in 0..k - 1 {
        let tmp = g.mu[k - 1][i].clone();
        g.mu[k - 1][i] = g.mu[k][i].clone();
        g.mu[k][i] = tmp;
    }
    g.mu[k][k - 1] = mu_new.clone();
    for i in k + 1..n {
        let t = g.mu[i][k].clone();
        g.mu[i][k] = &g.mu[i][k - 1] - &mu_ * &t;
        g.mu[i][k - 1] = &t + &mu_new * &g.mu[i][k];
    }
}

/// In-place LLL reduction of the row basis. Rows must be linearly
/// independent.
pub fn lll_reduce(basis: &mut IMat) {
    let n = basis.len();
    if n <= 1 {
        return;
    }
    let delta = BigRational::new(BigInt::from(3), BigInt::from(4));
    let mut g = gso(basis);
    let mut k = 1usize;
    while k < n {
        size_reduce(basis, &mut g, k, k - 1);
        let lhs = &g.b[k];
        let mukk = &g.mu[k][k - 1];
        let rhs = (&delta - mukk * mukk) * &g.b[k - 1];
        if lhs >= &rhs {
            for j in (0..k.saturating_sub(1)).rev() {
                size_reduce(basis, &mut g, k, j);
            }
            k += 1;
        } else {
            swap_step(basis, &mut g, k);
            k = k.max(2) - 1;
        }
    }
}

/// Squared Euclidean norm of an integer vector.
pub fn norm_sq(v: &[BigInt]) -> BigInt {
    dot(v, v)
}
