//! Outward-rounded interval arithmetic over dyadic-rounded rationals.
//!
//! Every value is an enclosure `[lo, hi]` with exact `BigRational`
//! endpoints. Field operations are exact (a point stays a point), so
//! quantities that happen to be rational (orbit counts, multidegree
//! values, `log e = 1` for `e`-powers) keep their exactness and floors
//! and ceilings of them are decided without ambiguity. Transcendental
//! functions (`ln`, `exp`, rational powers) return rigorous enclosures
//! computed from series with explicit tail bounds; endpoints are rounded
//! outward to the requested precision to keep bit sizes under control.
//!
//! Default working precision is 80 bits; comparisons that remain
//! ambiguous are re-run by callers at 256 bits.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{CoreError, Result};
use crate::ratio::{rat, rational_to_f64};

pub const DEFAULT_PREC: u32 = 80;
pub const REFINE_PREC: u32 = 256;
const GUARD: u32 = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct RealInterval {
    lo: BigRational,
    hi: BigRational,
}

fn pow2(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::one() << (e as u64))
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << ((-e) as u64))
    }
}

/// log2 of |q| up to one unit, from numerator/denominator bit lengths.
fn mag2(q: &BigRational) -> i64 {
    q.numer().bits() as i64 - q.denom().bits() as i64
}

/// Nearest dyadic with ~`prec` significant bits, rounded toward -inf
/// (`up = false`) or +inf (`up = true`): the result brackets `q`.
fn round_dir(q: &BigRational, prec: u32, up: bool) -> BigRational {
    if q.is_zero() {
        return q.clone();
    }
    let floor_div = |a: &BigInt, b: &BigInt| num_integer::Integer::div_floor(a, b);
    let ceil_div = |a: &BigInt, b: &BigInt| -num_integer::Integer::div_floor(&-a.clone(), b);
    let e = mag2(q) - prec as i64;
    // result = round(q / 2^e) * 2^e, with the denominator always positive.
    let (num, den): (BigInt, BigInt) = if e <= 0 {
        (q.numer() << ((-e) as u64), q.denom().clone())
    } else {
        (q.numer().clone(), q.denom() << (e as u64))
    };
    let t = if up { ceil_div(&num, &den) } else { floor_div(&num, &den) };
    BigRational::from_integer(t) * pow2(e)
}

fn round_down(q: &BigRational, prec: u32) -> BigRational {
    round_dir(q, prec, false)
}

/// True when `q` carries far more bits than `prec` significant bits at
/// its magnitude would need (rounding such inputs first keeps series
/// costs linear in the precision).
fn is_fat(q: &BigRational, prec: u32) -> bool {
    let bits = q.numer().bits() + q.denom().bits();
    let slack = mag2(q).unsigned_abs() + 2 * prec as u64 + 8;
    bits > slack
}

fn round_up(q: &BigRational, prec: u32) -> BigRational {
    round_dir(q, prec, true)
}

impl RealInterval {
    pub fn exact(q: BigRational) -> Self {
        Self { lo: q.clone(), hi: q }
    }

    pub fn from_i64(v: i64) -> Self {
        Self::exact(rat(v))
    }

    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Self { lo, hi }
    }

    pub fn zero() -> Self {
        Self::exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::exact(BigRational::one())
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// The exact rational value, when the enclosure is a point.
    pub fn as_exact(&self) -> Option<&BigRational> {
        if self.is_point() {
            Some(&self.lo)
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_point() {
            rational_to_f64(&self.lo)
        } else {
            rational_to_f64(&((&self.lo + &self.hi) / rat(2)))
        }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// Outward rounding of interval endpoints; exact points are preserved.
    pub fn rounded(&self, prec: u32) -> Self {
        if self.is_point() {
            return self.clone();
        }
        Self {
            lo: round_down(&self.lo, prec + GUARD),
            hi: round_up(&self.hi, prec + GUARD),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let cands = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        Self { lo, hi }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.contains_zero() {
            return Err(CoreError::Domain("interval division by enclosure of zero".into()));
        }
        let cands = [
            &self.lo / &other.lo,
            &self.lo / &other.hi,
            &self.hi / &other.lo,
            &self.hi / &other.hi,
        ];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        Ok(Self { lo, hi })
    }

    pub fn recip(&self) -> Result<Self> {
        Self::one().div(self)
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Enclosure of `|x|` over the enclosure of `x`.
    pub fn abs(&self) -> Self {
        if self.contains_zero() {
            Self {
                lo: BigRational::zero(),
                hi: self.lo.abs().max(self.hi.abs()),
            }
        } else {
            let (a, b) = (self.lo.abs(), self.hi.abs());
            Self {
                lo: a.clone().min(b.clone()),
                hi: a.max(b),
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        self.mul(&Self::exact(q.clone()))
    }

    pub fn powi(&self, e: i64) -> Result<Self> {
        if e == 0 {
            return Ok(Self::one());
        }
        if e < 0 {
            return self.powi(-e)?.recip();
        }
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut k = e as u64;
        loop {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            base = base.mul(&base);
        }
        Ok(acc)
    }

    pub fn max(&self, other: &Self) -> Self {
        Self {
            lo: self.lo.clone().max(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn min(&self, other: &Self) -> Self {
        Self {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().min(other.hi.clone()),
        }
    }

    /// Strict interval comparison: `Some(Less)` means every point of `self`
    /// is below every point of `other`. `None` means the enclosures overlap.
    pub fn cmp_strict(&self, other: &Self) -> Option<Ordering> {
        if self.is_point() && other.is_point() {
            return Some(self.lo.cmp(&other.lo));
        }
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if self.lo > other.hi {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    pub fn certainly_le(&self, other: &Self) -> bool {
        self.hi <= other.lo
    }

    pub fn certainly_ge(&self, other: &Self) -> bool {
        self.lo >= other.hi
    }

    /// Floor, defined only when unambiguous across the enclosure.
    pub fn floor(&self) -> Result<BigInt> {
        let fl = self.lo.floor().to_integer();
        let fh = self.hi.floor().to_integer();
        if fl == fh {
            Ok(fl)
        } else {
            Err(CoreError::Inconclusive(format!(
                "floor ambiguous on [{}, {}]",
                self.lo, self.hi
            )))
        }
    }

    /// Least integer >= the represented value, unambiguous enclosure required.
    pub fn ceil(&self) -> Result<BigInt> {
        let cl = self.lo.ceil().to_integer();
        let ch = self.hi.ceil().to_integer();
        if cl == ch {
            Ok(cl)
        } else {
            Err(CoreError::Inconclusive(format!(
                "ceil ambiguous on [{}, {}]",
                self.lo, self.hi
            )))
        }
    }

    /// Natural logarithm; requires a strictly positive enclosure.
    pub fn ln(&self, prec: u32) -> Result<Self> {
        if !self.lo.is_positive() {
            return Err(CoreError::Domain("ln of non-positive enclosure".into()));
        }
        let lo = ln_point(&self.lo, prec)?;
        let hi = ln_point(&self.hi, prec)?;
        Ok(Self { lo: lo.lo, hi: hi.hi }.rounded(prec))
    }

    pub fn exp(&self, prec: u32) -> Result<Self> {
        let lo = exp_point(&self.lo, prec)?;
        let hi = exp_point(&self.hi, prec)?;
        Ok(Self { lo: lo.lo, hi: hi.hi }.rounded(prec))
    }

    /// `self^(a/b)` for a strictly positive base. Integer exponents on exact
    /// points stay exact; everything else goes through `exp(e * ln self)`.
    pub fn pow_rational(&self, e: &BigRational, prec: u32) -> Result<Self> {
        if e.is_integer() {
            let k = e
                .to_integer()
                .try_into()
                .map_err(|_| CoreError::Domain("exponent out of range".into()))?;
            return self.powi(k);
        }
        if !self.lo.is_positive() {
            return Err(CoreError::Domain("rational power of non-positive enclosure".into()));
        }
        let l = self.ln(prec + GUARD)?;
        l.scale(e).exp(prec)
    }

    pub fn pow_interval(&self, e: &Self, prec: u32) -> Result<Self> {
        if let Some(q) = e.as_exact() {
            return self.pow_rational(q, prec);
        }
        if !self.lo.is_positive() {
            return Err(CoreError::Domain("interval power of non-positive enclosure".into()));
        }
        let l = self.ln(prec + GUARD)?;
        l.mul(e).exp(prec)
    }
}

/// atanh(t) for rational 0 <= t < 1/2, with rigorous tail bound. The
/// series runs in fixed-point integer arithmetic at scale 2^work with
/// directional floor/ceil steps, so each iteration costs a handful of
/// integer operations regardless of the input's rational complexity.
fn atanh_series(t: &BigRational, prec: u32) -> RealInterval {
    debug_assert!(!t.is_negative());
    let work = (prec + GUARD) as u64;
    let floor_div = |a: &BigInt, b: &BigInt| num_integer::Integer::div_floor(a, b);
    let ceil_div = |a: &BigInt, b: &BigInt| -num_integer::Integer::div_floor(&-a.clone(), b);
    // t at scale 2^work, outward.
    let scaled_num = t.numer() << work;
    let t_lo = floor_div(&scaled_num, t.denom());
    let t_hi = ceil_div(&scaled_num, t.denom());
    // t^2 at scale, outward.
    let t2_lo = (&t_lo * &t_lo) >> work;
    let t2_hi = ceil_div(&(&t_hi * &t_hi), &(BigInt::one() << work));
    let mut term_lo = t_lo;
    let mut term_hi = t_hi.clone();
    let mut sum_lo = BigInt::zero();
    let mut sum_hi = BigInt::zero();
    let mut j: i64 = 0;
    loop {
        sum_lo += floor_div(&term_lo, &BigInt::from(2 * j + 1));
        sum_hi += ceil_div(&term_hi, &BigInt::from(2 * j + 1));
        term_lo = (&term_lo * &t2_lo) >> work;
        term_hi = ceil_div(&(&term_hi * &t2_hi), &(BigInt::one() << work));
        j += 1;
        // Remaining tail <= term_hi * sum_k (t^2)^k / (2j+1) <= term_hi
        // * (9/8) / (2j+1) for t <= 1/3 + eps; term_hi itself majorizes.
        if term_hi <= BigInt::from(4) {
            sum_hi += &term_hi + BigInt::from(2 * j + 2); // tail + ulp slack
            let denom = BigInt::one() << work;
            return RealInterval::new(
                BigRational::new(sum_lo, denom.clone()),
                BigRational::new(sum_hi, denom),
            );
        }
        if j > 10_000 {
            // t < 1/2 guarantees convergence long before this.
            unreachable!("atanh series failed to converge");
        }
    }
}

fn ln2(prec: u32) -> RealInterval {
    // ln 2 = 2 atanh(1/3), cached per working precision.
    use std::sync::{Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<std::collections::BTreeMap<u32, RealInterval>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(std::collections::BTreeMap::new()));
    let mut map = cache.lock().expect("ln2 cache poisoned");
    map.entry(prec)
        .or_insert_with(|| {
            atanh_series(&BigRational::new(BigInt::one(), BigInt::from(3)), prec).scale(&rat(2))
        })
        .clone()
}

/// Rigorous enclosure of ln(q) for an exact positive rational. Fat
/// rationals are first bracketed by dyadics; `ln` is monotone, so the
/// bracket endpoints bound the result.
fn ln_point(q: &BigRational, prec: u32) -> Result<RealInterval> {
    if !q.is_positive() {
        return Err(CoreError::Domain("ln of non-positive rational".into()));
    }
    if q.is_one() {
        return Ok(RealInterval::zero());
    }
    let work = prec + GUARD;
    if is_fat(q, work) {
        let lo = ln_point(&round_down(q, work), prec)?;
        let hi = ln_point(&round_up(q, work), prec)?;
        return Ok(RealInterval::new(lo.lo, hi.hi));
    }
    // q = 2^k * m with m in [1, 2)
    let mut k = mag2(q);
    let mut m = q / pow2(k);
    while m < BigRational::one() {
        k -= 1;
        m = q / pow2(k);
    }
    while m >= rat(2) {
        k += 1;
        m = q / pow2(k);
    }
    // ln m = 2 atanh((m-1)/(m+1)), argument in [0, 1/3)
    let t = (&m - BigRational::one()) / (&m + BigRational::one());
    let lnm = atanh_series(&t, prec).scale(&rat(2));
    let l2 = ln2(prec);
    Ok(l2.scale(&rat(k)).add(&lnm).rounded(prec))
}

/// Rigorous enclosure of exp(q) for an exact rational. Negative
/// arguments go through `1/exp(-q)`; fat rationals are bracketed by
/// dyadics first (`exp` is monotone). The series core is fixed-point
/// integer arithmetic with directional rounding.
fn exp_point(q: &BigRational, prec: u32) -> Result<RealInterval> {
    if q.is_zero() {
        return Ok(RealInterval::one());
    }
    if q.is_negative() {
        return RealInterval::one().div(&exp_point(&-q.clone(), prec + GUARD)?);
    }
    let pre_work = prec + GUARD;
    if is_fat(q, pre_work) {
        let lo = exp_point(&round_down(q, pre_work), prec)?;
        let hi = exp_point(&round_up(q, pre_work), prec)?;
        return Ok(RealInterval::new(lo.lo, hi.hi));
    }
    // Halve until y <= 1/4, run the series, then square back.
    let mut s: u32 = 0;
    let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
    let mut y = q.clone();
    while y > quarter {
        y /= rat(2);
        s += 1;
        if s > 1 << 24 {
            return Err(CoreError::Domain("exp argument astronomically large".into()));
        }
    }
    let work = (prec + GUARD + 2 * s) as u64;
    let floor_div = |a: &BigInt, b: &BigInt| num_integer::Integer::div_floor(a, b);
    let ceil_div = |a: &BigInt, b: &BigInt| -num_integer::Integer::div_floor(&-a.clone(), b);
    let one = BigInt::one() << work;
    let scaled_num = y.numer() << work;
    let y_lo = floor_div(&scaled_num, y.denom());
    let y_hi = ceil_div(&scaled_num, y.denom());
    let mut term_lo = one.clone();
    let mut term_hi = one.clone();
    let mut sum_lo = one.clone();
    let mut sum_hi = one.clone();
    let mut n: i64 = 0;
    loop {
        n += 1;
        term_lo = floor_div(&(&term_lo * &y_lo), &(&one * BigInt::from(n)));
        term_hi = ceil_div(&(&term_hi * &y_hi), &(&one * BigInt::from(n)));
        sum_lo += &term_lo;
        sum_hi += &term_hi;
        // tail <= 2 * term * y/(n+1) <= term for y <= 1/4.
        if term_hi <= BigInt::from(4) {
            sum_hi += &term_hi + BigInt::from(n + 2); // tail + ulp slack
            let mut iv = RealInterval::new(
                BigRational::new(sum_lo, one.clone()),
                BigRational::new(sum_hi, one),
            );
            for _ in 0..s {
                iv = iv.mul(&iv).rounded(work as u32);
            }
            return Ok(iv.rounded(prec));
        }
        if n > 100_000 {
            unreachable!("exp series failed to converge");
        }
    }
}

/// Enclosure of Euler's number, cached per precision.
pub fn euler(prec: u32) -> RealInterval {
    use std::sync::{Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<std::collections::BTreeMap<u32, RealInterval>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(std::collections::BTreeMap::new()));
    let mut map = cache.lock().expect("euler cache poisoned");
    map.entry(prec)
        .or_insert_with(|| exp_point(&BigRational::one(), prec).expect("exp(1)"))
        .clone()
}

/// Enclosure of ln of an exact positive rational (public entry point).
pub fn ln_rational(q: &BigRational, prec: u32) -> Result<RealInterval> {
    ln_point(q, prec)
}

/// Enclosure of exp of an exact rational (public entry point).
pub fn exp_rational(q: &BigRational, prec: u32) -> Result<RealInterval> {
    exp_point(q, prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat2;

    fn close(iv: &RealInterval, v: f64, tol: f64) {
        assert!(
            (iv.to_f64() - v).abs() < tol,
            "expected {v}, got {} (width {})",
            iv.to_f64(),
            iv.width()
        );
        assert!(iv.lo() <= iv.hi());
    }

    #[test]
    fn ln_basics() {
        let l = ln_rational(&rat(2), 80).unwrap();
        close(&l, std::f64::consts::LN_2, 1e-15);
        assert!(l.width() < pow2(-70));
        let l3 = ln_rational(&rat2(1, 3), 80).unwrap();
        close(&l3, -(3f64.ln()), 1e-15);
        assert!(ln_rational(&rat(0), 80).is_err());
    }

    #[test]
    fn exp_basics() {
        let e = euler(80);
        close(&e, std::f64::consts::E, 1e-15);
        let big = exp_rational(&rat(30), 80).unwrap();
        close(&big, 30f64.exp(), 1e-2);
        let neg = exp_rational(&rat2(-7, 2), 80).unwrap();
        close(&neg, (-3.5f64).exp(), 1e-15);
    }

    #[test]
    fn ln_exp_roundtrip() {
        for q in [rat2(3, 2), rat(10), rat2(1, 7), rat(1000)] {
            let l = ln_rational(&q, 96).unwrap();
            let back = l.exp(96).unwrap();
            assert!(back.lo() <= &q && &q <= back.hi());
        }
    }

    #[test]
    fn pow_rational_exact_integer() {
        let x = RealInterval::exact(rat2(3, 2));
        let y = x.pow_rational(&rat(3), 80).unwrap();
        assert_eq!(y.as_exact().unwrap(), &rat2(27, 8));
        let z = x.pow_rational(&rat2(1, 2), 80).unwrap();
        close(&z, 1.5f64.sqrt(), 1e-15);
    }

    #[test]
    fn floor_ceil_points() {
        let x = RealInterval::exact(rat(5));
        assert_eq!(x.floor().unwrap(), BigInt::from(5));
        assert_eq!(x.ceil().unwrap(), BigInt::from(5));
        let y = RealInterval::exact(rat2(7, 2));
        assert_eq!(y.floor().unwrap(), BigInt::from(3));
        assert_eq!(y.ceil().unwrap(), BigInt::from(4));
        // A genuinely ambiguous enclosure refuses to answer.
        let z = RealInterval::new(rat2(199, 100), rat2(201, 100));
        assert!(z.floor().is_err());
    }

    #[test]
    fn interval_ops_keep_exactness() {
        let a = RealInterval::exact(rat2(1, 3));
        let b = RealInterval::exact(rat2(2, 5));
        assert!(a.add(&b).is_point());
        assert!(a.mul(&b).is_point());
        assert!(a.div(&b).unwrap().is_point());
    }

    #[test]
    fn rounding_is_outward() {
        let x = ln_rational(&rat(7), 200).unwrap();
        let r = x.rounded(60);
        assert!(r.lo() <= x.lo() && x.hi() <= r.hi());
    }
}
