//! Exact integer/rational linear algebra: fraction-free rank and
//! determinants (Bareiss), Hermite normal form with transform, integer
//! kernels, lattice saturation and rational Gauss elimination as an
//! independent second route for rank cross-checks.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IMat = Vec<Vec<BigInt>>;
pub type QMat = Vec<Vec<BigRational>>;

pub fn identity(n: usize) -> IMat {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    if m.is_empty() {
        return Vec::new();
    }
    let cols = m[0].len();
    (0..cols)
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

/// Rank by fraction-free (Bareiss) elimination.
pub fn rank_int(m: &IMat) -> usize {
    if m.is_empty() || m[0].is_empty() {
        return 0;
    }
    let mut a: IMat = m.to_vec();
    let rows = a.len();
    let cols = a[0].len();
    let mut prev = BigInt::one();
    let mut r = 0usize;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let t = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                a[i][j] = &t / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

/// Determinant of a square matrix by Bareiss elimination.
pub fn det_int(m: &IMat) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    debug_assert!(m.iter().all(|row| row.len() == n));
    let mut a: IMat = m.to_vec();
    let mut prev = BigInt::one();
    let mut sign = 1i32;
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return BigInt::zero();
        };
        if p != c {
            a.swap(c, p);
            sign = -sign;
        }
        for i in c + 1..n {
            for j in c + 1..n {
                let t = &a[c][c] * &a[i][j] - &a[i][c] * &a[c][j];
                a[i][j] = &t / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[c][c].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Rank by rational Gauss elimination with max-pivot selection.
/// Deliberately a different algorithm from `rank_int`.
pub fn rank_rat(m: &QMat) -> usize {
    if m.is_empty() || m[0].is_empty() {
        return 0;
    }
    let mut a: QMat = m.to_vec();
    let rows = a.len();
    let cols = a[0].len();
    let mut r = 0usize;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let p = (r..rows)
            .filter(|&i| !a[i][c].is_zero())
            .max_by(|&i, &j| {
                let (ni, nj) = (a[i][c].abs(), a[j][c].abs());
                ni.cmp(&nj)
            });
        let Some(p) = p else { continue };
        a.swap(r, p);
        let pivot = a[r][c].clone();
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = &a[i][c] / &pivot;
                for j in c..cols {
                    let s = &a[r][j] * &f;
                    a[i][j] = &a[i][j] - s;
                }
            }
        }
        r += 1;
    }
    r
}

/// Row-style Hermite normal form with a unimodular transform: returns
/// `(h, u)` with `u * m = h'` where `h` is `h'` without its zero rows,
/// echelon, positive pivots and entries above each pivot reduced into
/// `[0, pivot)`. `u` covers all rows of `m` (zero rows of `h'` last).
pub fn hnf_with_transform(m: &IMat) -> (IMat, IMat) {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut a = m.to_vec();
    let mut u = identity(rows);
    let mut r = 0usize;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // Reduce column c below row r to a single nonzero entry by gcd steps.
        loop {
            let mut min_idx: Option<usize> = None;
            for i in r..rows {
                if !a[i][c].is_zero()
                    && min_idx.map_or(true, |mi| a[i][c].abs() < a[mi][c].abs())
                {
                    min_idx = Some(i);
                }
            }
            let Some(mi) = min_idx else { break };
            a.swap(r, mi);
            u.swap(r, mi);
            let mut others = false;
            let pivot = a[r][c].clone();
            for i in r + 1..rows {
                if !a[i][c].is_zero() {
                    let q = div_round(&a[i][c], &pivot);
                    if !q.is_zero() {
                        row_sub(&mut a, i, r, &q);
                        row_sub(&mut u, i, r, &q);
                    }
                    if !a[i][c].is_zero() {
                        others = true;
                    }
                }
            }
            if !others {
                break;
            }
        }
        if a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            row_neg(&mut a, r);
            row_neg(&mut u, r);
        }
        let pivot = a[r][c].clone();
        for i in 0..r {
            let q = a[i][c].div_floor(&pivot);
            if !q.is_zero() {
                row_sub(&mut a, i, r, &q);
                row_sub(&mut u, i, r, &q);
            }
        }
        r += 1;
    }
    let h: IMat = a.into_iter().take(r).collect();
    (h, u)
}

/// HNF without the transform; zero rows removed.
pub fn hnf(m: &IMat) -> IMat {
    hnf_with_transform(m).0
}

fn row_sub(a: &mut IMat, i: usize, r: usize, q: &BigInt) {
    let row_r = a[r].clone();
    for (x, y) in a[i].iter_mut().zip(row_r.iter()) {
        *x -= q * y;
    }
}

fn row_neg(a: &mut IMat, i: usize) {
    for x in a[i].iter_mut() {
        *x = -x.clone();
    }
}

/// Nearest-integer quotient, for gcd-style reduction steps.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    let two_r: BigInt = &r * 2;
    if two_r.abs() > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Basis (rows) of the integer kernel `{ y : m * y = 0 }`. The result is a
/// basis of a saturated lattice in `Z^cols`. `cols` must be passed so the
/// kernel of an empty matrix is well-defined.
pub fn integer_kernel(m: &IMat, cols: usize) -> IMat {
    if m.is_empty() {
        return identity(cols);
    }
    debug_assert!(m.iter().all(|r| r.len() == cols));
    let bt = transpose(m);
    let (h, u) = hnf_with_transform(&bt);
    let rank = h.len();
    u.into_iter().skip(rank).collect()
}

/// Basis of the saturation `Sat(L) = (L (x) Q) cap Z^cols` of the lattice
/// spanned by the rows of `m`.
pub fn saturate(m: &IMat, cols: usize) -> IMat {
    let k = integer_kernel(m, cols);
    integer_kernel(&k, cols)
}

/// `det(B B^T)` of a row basis: by Cauchy-Binet this is the sum of the
/// squared maximal minors, i.e. the squared covolume of the row lattice.
pub fn gram_det(rows: &IMat) -> BigInt {
    if rows.is_empty() {
        return BigInt::one();
    }
    let g: IMat = rows
        .iter()
        .map(|a| {
            rows.iter()
                .map(|b| a.iter().zip(b.iter()).map(|(x, y)| x * y).sum())
                .collect()
        })
        .collect();
    det_int(&g)
}

/// Determinant of the square submatrix on the given rows/columns.
pub fn minor(m: &IMat, rows: &[usize], cols: &[usize]) -> BigInt {
    debug_assert_eq!(rows.len(), cols.len());
    let sub: IMat = rows
        .iter()
        .map(|&i| cols.iter().map(|&j| m[i][j].clone()).collect())
        .collect();
    det_int(&sub)
}

/// Basis of `{ x in Q^cols : m * x = 0 }` by Gauss-Jordan elimination.
pub fn rational_kernel(m: &QMat, cols: usize) -> QMat {
    if m.is_empty() {
        return (0..cols)
            .map(|i| {
                (0..cols)
                    .map(|j| {
                        if i == j {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
    }
    let mut a = m.to_vec();
    let rows = a.len();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let pivot = a[r][c].clone();
        for j in c..cols {
            a[r][j] = &a[r][j] / &pivot;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..cols {
                    let s = &a[r][j] * &f;
                    a[i][j] = &a[i][j] - s;
                }
            }
        }
        pivots.push((r, c));
        r += 1;
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let free_cols: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    let mut basis = Vec::new();
    for &fc in &free_cols {
        let mut v = vec![BigRational::zero(); cols];
        v[fc] = BigRational::one();
        for &(pr, pc) in &pivots {
            v[pc] = -a[pr][fc].clone();
        }
        basis.push(v);
    }
    basis
}

pub fn mat_vec_mul_rat(m: &QMat, v: &[BigRational]) -> Vec<BigRational> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v.iter())
                .map(|(a, b)| a * b)
                .fold(BigRational::zero(), |acc, x| acc + x)
        })
        .collect()
}

/// Stacks two row sets (used for tangent-space sums).
pub fn stack(a: &IMat, b: &IMat) -> IMat {
    a.iter().chain(b.iter()).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{big, rat};

    fn im(rows: &[&[i64]]) -> IMat {
        rows.iter().map(|r| r.iter().map(|&x| big(x)).collect()).collect()
    }

    #[test]
    fn rank_and_det() {
        let m = im(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        assert_eq!(rank_int(&m), 2);
        assert_eq!(det_int(&m), big(0));
        let m2 = im(&[&[2, 0], &[1, 3]]);
        assert_eq!(det_int(&m2), big(6));
        let qm: QMat = m.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
        assert_eq!(rank_rat(&qm), 2);
    }

    #[test]
    fn hnf_canonical() {
        let a = im(&[&[2, 4, 4], &[-6, 6, 12], &[10, 4, 16]]);
        let b = im(&[&[-6, 6, 12], &[10, 4, 16], &[2, 4, 4]]);
        // Same row lattice, same HNF.
        assert_eq!(hnf(&a), hnf(&b));
        let (h, u) = hnf_with_transform(&a);
        // u * a should reproduce h on the first rows.
        for (i, hrow) in h.iter().enumerate() {
            let mut prod = vec![BigInt::zero(); 3];
            for (k, arow) in a.iter().enumerate() {
                for j in 0..3 {
                    prod[j] += &u[i][k] * &arow[j];
                }
            }
            assert_eq!(&prod, hrow);
        }
    }

    #[test]
    fn kernel_and_saturation() {
        let m = im(&[&[1, 2, 3]]);
        let k = integer_kernel(&m, 3);
        assert_eq!(k.len(), 2);
        for row in &k {
            let dot: BigInt = row.iter().zip(m[0].iter()).map(|(a, b)| a * b).sum();
            assert!(dot.is_zero());
        }
        // Saturation of the index-2 sublattice spanned by (2,0),(0,2) of Z^2
        // restricted to its own span: rowspace is all of Q^2.
        let l = im(&[&[2, 0], &[0, 2]]);
        assert_eq!(hnf(&saturate(&l, 2)), identity(2));
        // Saturation of span{(2,4)} is span{(1,2)}.
        let l2 = im(&[&[2, 4]]);
        assert_eq!(hnf(&saturate(&l2, 2)), im(&[&[1, 2]]));
    }

    #[test]
    fn rational_kernel_matches() {
        let m: QMat = vec![vec![rat(1), rat(1), rat(1)]];
        let k = rational_kernel(&m, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            let s: BigRational = v.iter().cloned().sum();
            assert!(s.is_zero());
        }
    }
}
