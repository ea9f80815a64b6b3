//! Helpers around `BigInt`/`BigRational`: parsing and printing of exact
//! rationals, robust `f64` approximation, gcd normalization and trial
//! division with a configurable bound.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{CoreError, Result};

pub fn big(i: i64) -> BigInt {
    BigInt::from(i)
}

pub fn rat(i: i64) -> BigRational {
    BigRational::from_integer(big(i))
}

pub fn rat2(n: i64, d: i64) -> BigRational {
    BigRational::new(big(n), big(d))
}

/// Parses `"-3/5"`, `"7"` or `"2.25"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let num: BigInt = n
            .trim()
            .parse()
            .map_err(|_| CoreError::Domain(format!("bad numerator in {s:?}")))?;
        let den: BigInt = d
            .trim()
            .parse()
            .map_err(|_| CoreError::Domain(format!("bad denominator in {s:?}")))?;
        if den.is_zero() {
            return Err(CoreError::Domain(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let int_part: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse()
                .map_err(|_| CoreError::Domain(format!("bad decimal in {s:?}")))?
        };
        let digits = frac.trim();
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(CoreError::Domain(format!("bad decimal in {s:?}")));
        }
        let frac_num: BigInt = digits
            .parse()
            .map_err(|_| CoreError::Domain(format!("bad decimal in {s:?}")))?;
        let scale = BigInt::from(10u32).pow(digits.len() as u32);
        let frac_rat = BigRational::new(frac_num, scale);
        let int_rat = BigRational::from_integer(int_part);
        return Ok(if neg { int_rat - frac_rat } else { int_rat + frac_rat });
    }
    let num: BigInt = s
        .parse()
        .map_err(|_| CoreError::Domain(format!("bad rational {s:?}")))?;
    Ok(BigRational::from_integer(num))
}

/// Prints a rational as `num` or `num/den`.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// `f64` approximation that survives numerators/denominators far beyond the
/// `f64` range by scaling both sides with a common power of two.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    // Keep ~100 significant bits on each side.
    let shift_n = (nb - 100).max(0) as u64;
    let shift_d = (db - 100).max(0) as u64;
    let n = (q.numer() >> shift_n).to_f64().unwrap_or(f64::MAX);
    let d = (q.denom() >> shift_d).to_f64().unwrap_or(f64::MAX);
    (n / d) * 2f64.powi((shift_n as i64 - shift_d as i64) as i32)
}

/// Natural logarithm of a positive rational as `f64`, stable for huge
/// arguments: `ln(n/d) = ln(n_scaled) - ln(d_scaled) + (bits difference)*ln 2`.
pub fn ln_f64(q: &BigRational) -> f64 {
    assert!(q.is_positive(), "ln of non-positive rational");
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift_n = (nb - 64).max(0) as u64;
    let shift_d = (db - 64).max(0) as u64;
    let n = (q.numer().abs() >> shift_n).to_f64().unwrap();
    let d = (q.denom().abs() >> shift_d).to_f64().unwrap();
    n.ln() - d.ln() + (shift_n as f64 - shift_d as f64) * std::f64::consts::LN_2
}

/// Removes the gcd of a nonzero integer vector and fixes the sign of the
/// first nonzero entry to be positive. Returns the primitive vector.
pub fn primitive_vector(v: &[BigInt]) -> Result<Vec<BigInt>> {
    let mut g = BigInt::zero();
    for x in v {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return Err(CoreError::Domain("zero vector has no primitive form".into()));
    }
    let mut out: Vec<BigInt> = v.iter().map(|x| x / &g).collect();
    if let Some(first) = out.iter().find(|x| !x.is_zero()) {
        if first.sign() == Sign::Minus {
            for x in &mut out {
                *x = -&*x;
            }
        }
    }
    Ok(out)
}

/// Clears denominators of a nonzero rational vector and returns its
/// primitive integer form (gcd one, first nonzero entry positive).
pub fn primitive_from_rationals(v: &[BigRational]) -> Result<Vec<BigInt>> {
    let mut l = BigInt::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    primitive_vector(&ints)
}

/// Prime factorization of a positive integer by trial division.
///
/// `bound` caps the trial divisors; if a composite cofactor survives all
/// divisors up to `min(bound, sqrt(n))` the factorization fails (the caller
/// sees a domain error rather than a silent wrong answer).
pub fn factorize(n: &BigInt, bound: u64) -> Result<Vec<(u64, u32)>> {
    if !n.is_positive() {
        return Err(CoreError::Domain("factorize expects a positive integer".into()));
    }
    let mut m = n.clone();
    let mut out: Vec<(u64, u32)> = Vec::new();
    let small = |p: u64, m: &mut BigInt, out: &mut Vec<(u64, u32)>| {
        let pb = BigInt::from(p);
        let mut e = 0u32;
        while (&*m % &pb).is_zero() {
            *m /= &pb;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    small(2, &mut m, &mut out);
    small(3, &mut m, &mut out);
    let mut p: u64 = 5;
    let mut step: u64 = 2; // alternates 2, 4 to skip multiples of 2 and 3
    while p <= bound {
        let pb = BigInt::from(p);
        if (&pb * &pb) > m {
            break;
        }
        small(p, &mut m, &mut out);
        p += step;
        step = 6 - step;
    }
    if !m.is_one() {
        // Whatever remains has no factor <= min(bound, sqrt(m)); it is prime
        // exactly when it is below bound^2.
        if m.bits() <= 127 && m.to_u128().map_or(false, |v| v <= (bound as u128) * (bound as u128)) {
            let p = m
                .to_u64()
                .ok_or_else(|| CoreError::Domain(format!("prime cofactor {m} exceeds u64")))?;
            out.push((p, 1));
        } else {
            return Err(CoreError::Domain(format!(
                "factorization failed: cofactor {m} exceeds trial bound {bound}"
            )));
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// `v_p(q)`: p-adic valuation of a nonzero rational.
pub fn padic_valuation(q: &BigRational, p: u64) -> Result<i64> {
    if q.is_zero() {
        return Err(CoreError::Domain("valuation of zero".into()));
    }
    let pb = BigInt::from(p);
    let count = |mut n: BigInt| -> i64 {
        let mut v = 0i64;
        n = n.abs();
        while (&n % &pb).is_zero() {
            n /= &pb;
            v += 1;
        }
        v
    };
    Ok(count(q.numer().clone()) - count(q.denom().clone()))
}

/// Integer power with i64 exponent, for rationals (negative exponents allowed
/// on nonzero bases).
pub fn rat_pow(q: &BigRational, e: i64) -> Result<BigRational> {
    if q.is_zero() && e < 0 {
        return Err(CoreError::Domain("0 to a negative power".into()));
    }
    if e >= 0 {
        Ok(q.pow(e as i32))
    } else {
        Ok(q.pow(e as i32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(format_rational(&parse_rational("-3/6").unwrap()), "-1/2");
        assert_eq!(format_rational(&parse_rational("7").unwrap()), "7");
        assert_eq!(format_rational(&parse_rational("2.25").unwrap()), "9/4");
        assert_eq!(format_rational(&parse_rational("-0.5").unwrap()), "-1/2");
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn factorize_small() {
        assert_eq!(factorize(&big(12), 100).unwrap(), vec![(2, 2), (3, 1)]);
        assert_eq!(factorize(&big(1), 100).unwrap(), vec![]);
        assert_eq!(factorize(&big(9999991), 100_000_000).unwrap(), vec![(9999991, 1)]);
    }

    #[test]
    fn valuation() {
        assert_eq!(padic_valuation(&rat2(12, 1), 2).unwrap(), 2);
        assert_eq!(padic_valuation(&rat2(3, 5), 5).unwrap(), -1);
    }

    #[test]
    fn primitive() {
        let v = vec![big(2), big(4)];
        assert_eq!(primitive_vector(&v).unwrap(), vec![big(1), big(2)]);
        let w = vec![big(0), big(-3), big(6)];
        assert_eq!(primitive_vector(&w).unwrap(), vec![big(0), big(1), big(-2)]);
    }

    #[test]
    fn f64_of_huge() {
        let q = BigRational::new(BigInt::from(10u8).pow(400), BigInt::from(3));
        let f = rational_to_f64(&q);
        assert!(f.is_infinite() || f > 1e300);
        let l = ln_f64(&q);
        assert!((l - (400.0 * 10f64.ln() - 3f64.ln())).abs() < 1e-6);
    }
}
