//! Places of `Q`, local absolute values and the height functionals
//! (Weil, L2, Schmidt), all exact.
//!
//! Heights are `LogValue`s: the exact argument living under the
//! logarithm plus a float approximation. Identities (product formula,
//! projective invariance, duality, the sandwich `h <= h_L2 <= h +
//! (1/2) log m`) are therefore decided by integer comparisons, never by
//! float comparisons.

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{CoreError, Result};
use crate::linalg::{self, IMat};
use crate::ratio::{
    factorize, ln_f64, padic_valuation, primitive_from_rationals, rational_to_f64,
};

pub const DEFAULT_FACTOR_BOUND: u64 = 100_000_000;

/// A place of `Q`; the local degree is 1 throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Place {
    Archimedean,
    Finite(u64),
}

impl Place {
    pub fn finite(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(CoreError::Domain(format!("{p} is not prime")));
        }
        Ok(Place::Finite(p))
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// A positive quantity carried as `(1/2 if half) * log(argument)` with the
/// argument exact.
#[derive(Debug, Clone)]
pub struct LogValue {
    pub argument: BigRational,
    pub half: bool,
    pub approx: f64,
}

impl LogValue {
    pub fn full_log(argument: BigRational) -> Result<Self> {
        Self::build(argument, false)
    }

    pub fn half_log(argument: BigRational) -> Result<Self> {
        Self::build(argument, true)
    }

    fn build(argument: BigRational, half: bool) -> Result<Self> {
        if !argument.is_positive() {
            return Err(CoreError::Domain("log argument must be positive".into()));
        }
        let approx = ln_f64(&argument) * if half { 0.5 } else { 1.0 };
        Ok(Self { argument, half, approx })
    }

    pub fn zero() -> Self {
        Self {
            argument: BigRational::one(),
            half: false,
            approx: 0.0,
        }
    }

    /// The argument of the doubled value: `exp(2 * value)`, exact. Two
    /// `LogValue`s are compared by comparing these rationals.
    pub fn squared_argument(&self) -> BigRational {
        if self.half {
            self.argument.clone()
        } else {
            &self.argument * &self.argument
        }
    }

    pub fn eq_exact(&self, other: &Self) -> bool {
        self.squared_argument() == other.squared_argument()
    }

    pub fn le_exact(&self, other: &Self) -> bool {
        self.squared_argument() <= other.squared_argument()
    }

    /// Exact sum: `(1/2)log a + (1/2)log b = (1/2)log(ab)` with full logs
    /// promoted to half logs of squares.
    pub fn add(&self, other: &Self) -> Self {
        let arg = self.squared_argument() * other.squared_argument();
        let approx = self.approx + other.approx;
        Self {
            argument: arg,
            half: true,
            approx,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.argument.is_one()
    }
}

/// Exact local absolute value: a p-power at finite places, `|x|` at the
/// archimedean place.
#[derive(Debug, Clone)]
pub struct LocalAbs {
    pub value: BigRational,
    pub place: Place,
    /// `(p, e)` with value `p^e`, at finite places.
    pub p_power: Option<(u64, i64)>,
}

/// `|x|_v` with the normalization `|p|_p = 1/p`.
pub fn local_abs(x: &BigRational, v: Place) -> Result<LocalAbs> {
    if x.is_zero() {
        return Err(CoreError::Domain("absolute value of zero".into()));
    }
    match v {
        Place::Archimedean => Ok(LocalAbs {
            value: x.abs(),
            place: v,
            p_power: None,
        }),
        Place::Finite(p) => {
            if !is_prime(p) {
                return Err(CoreError::Domain(format!("{p} is not prime")));
            }
            let val = padic_valuation(x, p)?;
            let pb = BigRational::from_integer(BigInt::from(p));
            let value = if val >= 0 {
                BigRational::one() / pb.pow(val as i32)
            } else {
                pb.pow((-val) as i32)
            };
            Ok(LocalAbs {
                value,
                place: v,
                p_power: Some((p, -val)),
            })
        }
    }
}

/// A nonzero point of projective space over `Q`, with its primitive
/// integer representative (gcd one, first nonzero entry positive).
#[derive(Debug, Clone)]
pub struct ProjVector {
    pub coords: Vec<BigRational>,
    pub primitive: Vec<BigInt>,
}

impl ProjVector {
    pub fn new(coords: Vec<BigRational>) -> Result<Self> {
        if coords.is_empty() || coords.iter().all(|c| c.is_zero()) {
            return Err(CoreError::Domain("projective vector must be nonzero".into()));
        }
        let primitive = primitive_from_rationals(&coords)?;
        Ok(Self { coords, primitive })
    }

    pub fn from_integers(v: Vec<BigInt>) -> Result<Self> {
        Self::new(v.into_iter().map(BigRational::from_integer).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// `h(F) = log max |a_i|` on the primitive representative; the finite
/// places contribute nothing once the gcd is one.
pub fn weil_height(f: &ProjVector) -> Result<LogValue> {
    let max = f
        .primitive
        .iter()
        .map(|a| a.abs())
        .max()
        .ok_or_else(|| CoreError::Domain("empty vector".into()))?;
    LogValue::full_log(BigRational::from_integer(max))
}

/// `h_L2(F) = (1/2) log (sum a_i^2)` on the primitive representative.
pub fn l2_height(f: &ProjVector) -> Result<LogValue> {
    let sum: BigInt = f.primitive.iter().map(|a| a * a).sum();
    LogValue::half_log(BigRational::from_integer(sum))
}

/// Exact check of `h <= h_L2 <= h + (1/2) log(#F)`: with `M = max|a_i|`
/// and `S = sum a_i^2`, this is `M^2 <= S <= m * M^2` over the integers.
pub fn sandwich_check(f: &ProjVector) -> Result<bool> {
    let m = BigInt::from(f.dim());
    let max = f.primitive.iter().map(|a| a.abs()).max().unwrap();
    let sum: BigInt = f.primitive.iter().map(|a| a * a).sum();
    let max_sq = &max * &max;
    Ok(max_sq <= sum && sum <= m * max_sq)
}

/// A subspace of `Q^m` with a primitive integer basis and primitive
/// Plucker coordinates (first nonzero entry positive).
#[derive(Debug, Clone)]
pub struct Subspace {
    pub ambient_dim: usize,
    /// `d x m` integer matrix of rank `d`; rows are primitive.
    pub basis: IMat,
    /// Primitive Plucker vector, length `C(m, d)`; `[1]` when `d = 0`.
    pub plucker: Vec<BigInt>,
}

impl Subspace {
    pub fn from_integer_rows(rows: IMat, ambient_dim: usize) -> Result<Self> {
        for r in &rows {
            if r.len() != ambient_dim {
                return Err(CoreError::Domain("basis row has wrong length".into()));
            }
        }
        let d = rows.len();
        if d > ambient_dim {
            return Err(CoreError::Domain("more basis rows than ambient dimension".into()));
        }
        if d == 0 {
            return Ok(Self {
                ambient_dim,
                basis: Vec::new(),
                plucker: vec![BigInt::one()],
            });
        }
        if linalg::rank_int(&rows) != d {
            return Err(CoreError::Domain("rank-deficient basis".into()));
        }
        let basis: IMat = rows
            .iter()
            .map(|r| crate::ratio::primitive_vector(r))
            .collect::<Result<_>>()?;
        let plucker = plucker_of(&basis, ambient_dim)?;
        Ok(Self {
            ambient_dim,
            basis,
            plucker,
        })
    }

    pub fn from_rational_rows(rows: Vec<Vec<BigRational>>, ambient_dim: usize) -> Result<Self> {
        let int_rows: IMat = rows
            .iter()
            .map(|r| {
                if r.iter().all(|x| x.is_zero()) {
                    Err(CoreError::Domain("zero basis row".into()))
                } else {
                    primitive_from_rationals(r)
                }
            })
            .collect::<Result<_>>()?;
        Self::from_integer_rows(int_rows, ambient_dim)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient_dim - self.dim()
    }

    /// Canonical key: HNF of the saturated row lattice. Two subspaces are
    /// equal iff their keys are equal.
    pub fn canonical_key(&self) -> IMat {
        linalg::hnf(&linalg::saturate(&self.basis, self.ambient_dim))
    }

    pub fn eq_subspace(&self, other: &Self) -> bool {
        self.ambient_dim == other.ambient_dim && self.canonical_key() == other.canonical_key()
    }
}

fn plucker_of(basis: &IMat, ambient: usize) -> Result<Vec<BigInt>> {
    let d = basis.len();
    let rows: Vec<usize> = (0..d).collect();
    let minors: Vec<BigInt> = (0..ambient)
        .combinations(d)
        .map(|cols| linalg::minor(basis, &rows, &cols))
        .collect();
    crate::ratio::primitive_vector(&minors)
}

/// Schmidt height: the L2 height of the primitive Plucker vector.
/// `h({0}) = 0` and the full space has height 0.
pub fn schmidt_height(s: &Subspace) -> Result<LogValue> {
    let sum: BigInt = s.plucker.iter().map(|a| a * a).sum();
    LogValue::half_log(BigRational::from_integer(sum))
}

/// Verifies `prod_v |x|_v = 1` exactly and returns the residual, which is
/// `|x| * prod_p p^(-v_p(x))` as an exact rational.
pub fn product_formula_residual(x: &BigRational) -> Result<BigRational> {
    product_formula_residual_with_bound(x, DEFAULT_FACTOR_BOUND)
}

pub fn product_formula_residual_with_bound(x: &BigRational, bound: u64) -> Result<BigRational> {
    if x.is_zero() {
        return Err(CoreError::Domain("product formula needs a nonzero rational".into()));
    }
    let mut residual = x.abs();
    let mut fold = |n: &BigInt, inv: bool| -> Result<()> {
        for (p, e) in factorize(&n.abs(), bound)? {
            let pe = BigRational::from_integer(BigInt::from(p)).pow(e as i32);
            if inv {
                residual *= pe;
            } else {
                residual /= pe;
            }
        }
        Ok(())
    };
    fold(x.numer(), false)?;
    fold(x.denom(), true)?;
    Ok(residual)
}

/// Liouville inequality `log|x|_v >= -h({1, x})` over `Q`, checked exactly:
/// with `x = a/b` in lowest terms, `|x|_v * max(|a|, |b|) >= 1`.
pub fn liouville_gap(x: &BigRational, v: Place) -> Result<bool> {
    if x.is_zero() {
        return Err(CoreError::Domain("Liouville gap needs a nonzero rational".into()));
    }
    let h_arg = x.numer().abs().max(x.denom().abs());
    let abs = local_abs(x, v)?;
    Ok(abs.value * BigRational::from_integer(h_arg) >= BigRational::one())
}

/// Float view of a `LogValue` sum used in reports.
pub fn logvalue_to_f64(v: &LogValue) -> f64 {
    v.approx
}

/// Exact comparison helper: `a <= b + c` for `LogValue`s, via squared
/// arguments (`a`, `b`, `c` all nonnegative heights).
pub fn le_sum_exact(a: &LogValue, b: &LogValue, c: &LogValue) -> bool {
    a.squared_argument() <= b.squared_argument() * c.squared_argument()
}

pub fn rational_f64(q: &BigRational) -> f64 {
    rational_to_f64(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{big, rat, rat2};

    fn pv(v: &[i64]) -> ProjVector {
        ProjVector::from_integers(v.iter().map(|&x| big(x)).collect()).unwrap()
    }

    #[test]
    fn local_abs_examples() {
        // (12, finite 2) -> 1/4, from 12 = 2^2 * 3.
        let a = local_abs(&rat(12), Place::finite(2).unwrap()).unwrap();
        assert_eq!(a.value, rat2(1, 4));
        assert_eq!(a.p_power, Some((2, -2)));
        // (1, any place) -> 1.
        assert_eq!(local_abs(&rat(1), Place::Archimedean).unwrap().value, rat(1));
        assert_eq!(
            local_abs(&rat(1), Place::finite(7).unwrap()).unwrap().value,
            rat(1)
        );
        // (-3/2, archimedean) -> 3/2.
        assert_eq!(
            local_abs(&rat2(-3, 2), Place::Archimedean).unwrap().value,
            rat2(3, 2)
        );
        assert!(local_abs(&rat(0), Place::Archimedean).is_err());
    }

    #[test]
    fn weil_examples() {
        assert!(weil_height(&pv(&[1, 1])).unwrap().is_zero());
        assert_eq!(weil_height(&pv(&[1, 2])).unwrap().argument, rat(2));
        // Projective invariance: (2,4) ~ (1,2).
        assert_eq!(weil_height(&pv(&[2, 4])).unwrap().argument, rat(2));
    }

    #[test]
    fn l2_examples() {
        assert!(l2_height(&pv(&[1, 0])).unwrap().is_zero());
        let h = l2_height(&pv(&[1, 2])).unwrap();
        assert_eq!(h.argument, rat(5));
        assert!(h.half);
        assert_eq!(l2_height(&pv(&[3, 6])).unwrap().argument, rat(5));
    }

    #[test]
    fn sandwich_examples() {
        assert!(sandwich_check(&pv(&[1, 2])).unwrap());
        assert!(sandwich_check(&pv(&[1, 0, 0, 0])).unwrap());
        assert!(sandwich_check(&pv(&[1, 1, 1])).unwrap());
    }

    #[test]
    fn schmidt_examples() {
        let full = Subspace::from_integer_rows(
            vec![vec![big(1), big(0)], vec![big(0), big(1)]],
            2,
        )
        .unwrap();
        assert!(schmidt_height(&full).unwrap().is_zero());

        let line = Subspace::from_integer_rows(vec![vec![big(1), big(2)]], 2).unwrap();
        assert_eq!(schmidt_height(&line).unwrap().argument, rat(5));

        let plane = Subspace::from_integer_rows(
            vec![
                vec![big(1), big(-1), big(0)],
                vec![big(0), big(1), big(-1)],
            ],
            3,
        )
        .unwrap();
        let h = schmidt_height(&plane).unwrap();
        assert_eq!(h.argument, rat(3));
        assert_eq!(plane.plucker, vec![big(1), big(-1), big(1)]);

        let bad = Subspace::from_integer_rows(
            vec![vec![big(1), big(2)], vec![big(2), big(4)]],
            2,
        );
        assert!(bad.is_err());
    }

    #[test]
    fn product_formula_examples() {
        assert_eq!(product_formula_residual(&rat(6)).unwrap(), rat(1));
        assert_eq!(product_formula_residual(&rat(1)).unwrap(), rat(1));
        assert_eq!(product_formula_residual(&rat2(-5, 7)).unwrap(), rat(1));
        assert!(product_formula_residual(&rat(0)).is_err());
    }

    #[test]
    fn liouville_examples() {
        assert!(liouville_gap(&rat2(1, 2), Place::finite(2).unwrap()).unwrap());
        assert!(liouville_gap(&rat(1), Place::Archimedean).unwrap());
        assert!(liouville_gap(&rat2(3, 5), Place::finite(5).unwrap()).unwrap());
        // Equality case: |2|_2 = 1/2 and h({1,2}) = log 2.
        assert!(liouville_gap(&rat(2), Place::finite(2).unwrap()).unwrap());
    }

    #[test]
    fn logvalue_arithmetic() {
        let a = LogValue::full_log(rat(2)).unwrap(); // log 2
        let b = LogValue::half_log(rat(5)).unwrap(); // (1/2) log 5
        let s = a.add(&b); // (1/2) log 20
        assert_eq!(s.argument, rat(20));
        assert!(s.half);
        assert!((s.approx - 0.5 * 20f64.ln()).abs() < 1e-12);
        assert!(a.le_exact(&b)); // log 2 <= (1/2) log 5  <=>  4 <= 5
    }
}
