//! Interpolation inequalities as numerical validity checkers, plus the
//! p-adic combinatorics they rest on: digit sums, factorial valuations,
//! the convergence radius `r_p = p^(-1/(p-1))`, the exponent `kappa`,
//! and exact Gauss norms.
//!
//! The archimedean checker is oriented conservatively: the left side is
//! a rigorous upper bound (coefficient majorants), the right side a
//! rigorous lower bound (exact Taylor-coefficient Cauchy bounds, real
//! sample points and exact divided derivatives), so `holds = true` is a
//! certificate. The ultrametric checker is exact for polynomials; for
//! truncated series it degrades to `Inconclusive` whenever the declared
//! tail bound could flip the comparison.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{CoreError, Result};
use crate::heights::{is_prime, local_abs, Place};
use crate::polybasis::UniPoly;
use crate::ratio::{big, rat, rational_to_f64};
use crate::real::{exp_rational, RealInterval};

/// Digit sum of `j` in base `p`.
pub fn sigma_p(j: u64, p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(CoreError::Domain(format!("{p} is not prime")));
    }
    let mut j = j;
    let mut s = 0;
    while j > 0 {
        s += j % p;
        j /= p;
    }
    Ok(s)
}

/// `v_p(j!) = (j - sigma_p(j))/(p - 1)`.
pub fn factorial_valuation(j: u64, p: u64) -> Result<u64> {
    let s = sigma_p(j, p)?;
    Ok((j - s) / (p - 1))
}

/// Independent Legendre count `sum_k floor(j / p^k)` (oracle side).
pub fn factorial_valuation_legendre(j: u64, p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(CoreError::Domain(format!("{p} is not prime")));
    }
    let mut acc = 0u64;
    let mut q = p;
    while q <= j {
        acc += j / q;
        match q.checked_mul(p) {
            Some(next) => q = next,
            None => break,
        }
    }
    Ok(acc)
}

/// `r_p = p^(-1/(p-1))`, carried as `(p, exponent)` plus a float.
#[derive(Debug, Clone)]
pub struct RpValue {
    pub p: u64,
    pub exponent: BigRational,
    pub approx: f64,
}

pub fn r_p_value(p: u64) -> Result<RpValue> {
    if !is_prime(p) {
        return Err(CoreError::Domain(format!("{p} is not prime")));
    }
    let exponent = BigRational::new(big(-1), big(p as i64 - 1));
    let approx = (p as f64).powf(-1.0 / (p as f64 - 1.0));
    Ok(RpValue { p, exponent, approx })
}

/// `kappa = (S1 - sigma_p(S1))/(p-1) + floor(log S1 / log p)`, the floor
/// computed by integer powers of `p`.
pub fn kappa(s1: u64, p: u64) -> Result<u64> {
    if s1 == 0 {
        return Err(CoreError::Domain("kappa needs S1 >= 1".into()));
    }
    let v = factorial_valuation(s1, p)?;
    let mut floor_log = 0u64;
    let mut q = p;
    while q <= s1 {
        floor_log += 1;
        match q.checked_mul(p) {
            Some(next) => q = next,
            None => break,
        }
    }
    Ok(v + floor_log)
}

/// Truncated p-adic power series with a rational evaluation radius and an
/// optional declared tail bound (a majorant of the Gauss norm, at the
/// same radius, of the discarded tail).
#[derive(Debug, Clone)]
pub struct PadicSeries {
    pub prime: u64,
    pub coeffs: Vec<BigRational>,
    pub radius: BigRational,
    pub tail_bound: Option<BigRational>,
}

impl PadicSeries {
    pub fn polynomial(prime: u64, coeffs: Vec<BigRational>, radius: BigRational) -> Result<Self> {
        if !is_prime(prime) {
            return Err(CoreError::Domain(format!("{prime} is not prime")));
        }
        if !radius.is_positive() {
            return Err(CoreError::Domain("radius must be positive".into()));
        }
        Ok(Self {
            prime,
            coeffs,
            radius,
            tail_bound: None,
        })
    }

    fn poly(&self) -> UniPoly {
        UniPoly::new(self.coeffs.clone())
    }
}

/// Exact Gauss norm at a rational radius: `max_n |a_n|_p r^n` (the sup of
/// `|f|` over the disk `|z| <= r` in `C_p`, by density of the value group).
pub fn gauss_norm(s: &PadicSeries) -> Result<BigRational> {
    gauss_norm_at(s, &s.radius)
}

fn gauss_norm_at(s: &PadicSeries, r: &BigRational) -> Result<BigRational> {
    if s.coeffs.is_empty() {
        return Err(CoreError::Domain("empty series".into()));
    }
    if !r.is_positive() {
        return Err(CoreError::Domain("radius must be positive".into()));
    }
    let place = Place::finite(s.prime)?;
    let mut best = BigRational::zero();
    for (n, a) in s.coeffs.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let v = local_abs(a, place)?.value * r.pow(n as i32);
        if v > best {
            best = v;
        }
    }
    Ok(best)
}

/// One term `poly(z) * exp(frequency * z)` of an archimedean sample.
#[derive(Debug, Clone)]
pub struct PolyExpTerm {
    pub poly: UniPoly,
    pub frequency: BigRational,
}

/// Archimedean sample `f(z) = sum_j p_j(z) e^(w_j z)` with distinct
/// rational frequencies (a bare polynomial is the single-term case with
/// frequency 0).
#[derive(Debug, Clone)]
pub struct AnalyticSample {
    pub terms: Vec<PolyExpTerm>,
}

impl AnalyticSample {
    pub fn new(terms: Vec<PolyExpTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(CoreError::Domain("sample needs at least one term".into()));
        }
        for (i, a) in terms.iter().enumerate() {
            for b in &terms[i + 1..] {
                if a.frequency == b.frequency {
                    return Err(CoreError::Domain("frequencies must be distinct".into()));
                }
            }
        }
        Ok(Self { terms })
    }

    pub fn polynomial(p: UniPoly) -> Result<Self> {
        Self::new(vec![PolyExpTerm {
            poly: p,
            frequency: BigRational::zero(),
        }])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.poly.is_zero())
    }

    /// Divided-derivative family: `f^(h)(z)/h! = sum_j q_{j,h}(z) e^(w_j z)`
    /// with `q_{j,0} = p_j`, `q_{j,h+1} = (q' + w_j q)/(h+1)`.
    fn divided_derivative_terms(&self, h_max: usize) -> Vec<Vec<UniPoly>> {
        let mut rows: Vec<Vec<UniPoly>> = Vec::with_capacity(h_max + 1);
        rows.push(self.terms.iter().map(|t| t.poly.clone()).collect());
        for h in 0..h_max {
            let prev = &rows[h];
            let div = BigRational::new(BigInt::one(), big(h as i64 + 1));
            let next: Vec<UniPoly> = prev
                .iter()
                .zip(self.terms.iter())
                .map(|(q, t)| {
                    let mut d = q.derivative();
                    let scaled =
                        UniPoly::new(q.coeffs.iter().map(|c| c * &t.frequency).collect());
                    d = add_poly(&d, &scaled);
                    UniPoly::new(d.coeffs.iter().map(|c| c * &div).collect())
                })
                .collect();
            rows.push(next);
        }
        rows
    }

    /// Enclosure of `f(z)` at a rational (real) point.
    fn eval_interval(&self, z: &BigRational, prec: u32) -> Result<RealInterval> {
        let mut acc = RealInterval::zero();
        for t in &self.terms {
            let e = exp_rational(&(&t.frequency * z), prec)?;
            acc = acc.add(&e.scale(&t.poly.eval(z)));
        }
        Ok(acc)
    }

    /// Exact Taylor coefficient `[z^k] f`.
    fn taylor_coeff(&self, k: usize) -> BigRational {
        let mut acc = BigRational::zero();
        for t in &self.terms {
            for (l, c) in t.poly.coeffs.iter().enumerate() {
                if l > k {
                    break;
                }
                // c * w^(k-l) / (k-l)!
                let mut term = c * t.frequency.pow((k - l) as i32);
                let mut fact = BigInt::one();
                for i in 1..=(k - l) {
                    fact *= big(i as i64);
                }
                term /= BigRational::from_integer(fact);
                acc += term;
            }
        }
        acc
    }
}

fn add_poly(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let n = a.coeffs.len().max(b.coeffs.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, c) in a.coeffs.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.coeffs.iter().enumerate() {
        out[i] += c;
    }
    UniPoly::new(out)
}

#[derive(Debug, Clone)]
pub struct ArchCheck {
    /// Rigorous upper bound for `|f|_r`.
    pub lhs_upper: f64,
    /// Rigorous lower bound for the right-hand side.
    pub rhs_lower: f64,
    /// Certified `lhs <= rhs`.
    pub holds: bool,
}

/// The archimedean interpolation inequality
/// `|f|_r <= 2 |f|_R (2r/R)^(T1 S1) + 5 (9r/S1)^(T1 S1) max |f^(h)(m)/h!|`
/// over `h < T1`, `m < S1`, checked with conservative orientation.
pub fn check_waldschmidt(
    f: &AnalyticSample,
    s1: u64,
    t1: u64,
    r: &BigRational,
    rr: &BigRational,
    prec: u32,
) -> Result<ArchCheck> {
    if s1 == 0 || t1 == 0 {
        return Err(CoreError::Precondition("S1, T1 must be >= 1".into()));
    }
    if rr < r || r < &rat(2 * s1 as i64) {
        return Err(CoreError::Precondition("need R >= r >= 2 S1".into()));
    }
    if f.is_zero() {
        return Ok(ArchCheck {
            lhs_upper: 0.0,
            rhs_lower: 0.0,
            holds: true,
        });
    }
    let ts = (t1 * s1) as i64;

    // Upper bound of |f|_r: sum_j ||p_j||_1(r) * e^(|w_j| r).
    let mut lhs = RealInterval::zero();
    for t in &f.terms {
        let coeff_sum: BigRational = t
            .poly
            .coeffs
            .iter()
            .enumerate()
            .map(|(l, c)| c.abs() * r.pow(l as i32))
            .sum();
        let e = exp_rational(&(t.frequency.abs() * r), prec)?;
        lhs = lhs.add(&e.scale(&coeff_sum));
    }

    // Lower bound of |f|_R: Cauchy from exact Taylor coefficients, plus
    // the two real boundary points.
    let max_freq = f
        .terms
        .iter()
        .map(|t| t.frequency.abs())
        .fold(BigRational::zero(), |a, b| a.max(b));
    let max_deg = f.terms.iter().filter_map(|t| t.poly.degree()).max().unwrap_or(0);
    let k_max = ((&max_freq * rr).ceil().to_integer().max(BigInt::zero()))
        .min(big(400))
        .to_string()
        .parse::<usize>()
        .unwrap_or(0)
        + max_deg
        + 8;
    let mut f_rr_lower = BigRational::zero();
    for k in 0..=k_max {
        let a = f.taylor_coeff(k).abs() * rr.pow(k as i32);
        if a > f_rr_lower {
            f_rr_lower = a;
        }
    }
    for z in [rr.clone(), -rr.clone()] {
        let v = f.eval_interval(&z, prec)?.abs();
        if v.lo() > &f_rr_lower {
            f_rr_lower = v.lo().clone();
        }
    }

    // Lower bound of the max derivative term: exact polynomials times
    // enclosed exponentials at the integer grid.
    let rows = f.divided_derivative_terms(t1 as usize - 1);
    let mut deriv_lower = BigRational::zero();
    for row in rows.iter() {
        for m in 0..s1 {
            let zm = rat(m as i64);
            let mut acc = RealInterval::zero();
            for (q, t) in row.iter().zip(f.terms.iter()) {
                let e = exp_rational(&(&t.frequency * &zm), prec)?;
                acc = acc.add(&e.scale(&q.eval(&zm)));
            }
            let lo = acc.abs().lo().clone();
            if lo > deriv_lower {
                deriv_lower = lo;
            }
        }
    }

    // Assemble the right side as a rigorous lower bound.
    let term1 = RealInterval::exact(f_rr_lower)
        .mul(&RealInterval::exact((rat(2) * r / rr).pow(ts as i32)))
        .scale(&rat(2));
    let term2 = RealInterval::exact(deriv_lower)
        .mul(&RealInterval::exact((rat(9) * r / rat(s1 as i64)).pow(ts as i32)))
        .scale(&rat(5));
    let rhs = term1.add(&term2);

    let holds = lhs.hi() <= rhs.lo();
    Ok(ArchCheck {
        lhs_upper: rational_to_f64(lhs.hi()),
        rhs_lower: rational_to_f64(rhs.lo()),
        holds,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RoyOutcome {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct RoyCheck {
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub outcome: RoyOutcome,
}

/// Roy's p-adic interpolation inequality
/// `|f|_r / r^((S1+1) T1) <= p^(kappa T1) max{ max |f^(h)(m)/h!|,
/// R^(-(S1+1) T1) |f|_R }` with the derivative max over the `S1 + 1`
/// integer points `0 <= m <= S1` and orders `h < T1` (the exponent
/// `(S1+1) T1` counts exactly those interpolation conditions; the
/// extremal product `prod_{m<=S1} (z-m)^{T1}` is the equality witness).
/// Exact for polynomials. A declared series tail makes the verdict
/// `Inconclusive` whenever it could flip the comparison (tails above
/// `2^-40` of the main term are refused).
pub fn check_roy(
    f: &PadicSeries,
    s1: u64,
    t1: u64,
    r: &BigRational,
    rr: &BigRational,
) -> Result<RoyCheck> {
    if s1 == 0 || t1 == 0 {
        return Err(CoreError::Precondition("S1, T1 must be >= 1".into()));
    }
    if rr < r || r < &BigRational::one() {
        return Err(CoreError::Precondition("need R >= r >= 1".into()));
    }
    let p = f.prime;
    let place = Place::finite(p)?;
    let st = ((s1 + 1) * t1) as i32;

    let f_r = gauss_norm_at(f, r)?;
    let f_rr = gauss_norm_at(f, rr)?;

    // Exact divided derivatives on the integer grid.
    let poly = f.poly();
    let mut deriv_max = BigRational::zero();
    for h in 0..t1 {
        let dp = crate::polybasis::divided_derivative_poly(&poly, h as usize);
        for m in 0..=s1 {
            let v = dp.eval(&rat(m as i64));
            if v.is_zero() {
                continue;
            }
            let a = local_abs(&v, place)?.value;
            if a > deriv_max {
                deriv_max = a;
            }
        }
    }

    let pk = BigRational::from_integer(big(p as i64)).pow((kappa(s1, p)? * t1) as i32);
    let lhs = &f_r / r.pow(st);
    let rhs = &pk * deriv_max.max(&f_rr / rr.pow(st));

    // Tail influence: a tail with Gauss norm <= eps at radius R perturbs
    // |f|_R by <= eps, |f|_r by <= eps (r <= R), and each divided
    // derivative by <= eps (ultrametric Cauchy bound at integer points).
    let outcome = match &f.tail_bound {
        None => {
            if lhs <= rhs {
                RoyOutcome::Holds
            } else {
                RoyOutcome::Fails
            }
        }
        Some(eps) => {
            let main = lhs.clone().max(rhs.clone());
            let threshold = main / BigRational::from_integer(BigInt::one() << 40);
            if eps > &threshold {
                RoyOutcome::Inconclusive
            } else {
                // Widen both sides by the worst-case tail contribution.
                let lhs_hi = &lhs + eps / r.pow(st);
                let lhs_lo = (&lhs - eps / r.pow(st)).max(BigRational::zero());
                let slack = &pk * eps;
                let rhs_hi = &rhs + &slack;
                let rhs_lo = (&rhs - &slack).max(BigRational::zero());
                if lhs_hi <= rhs_lo {
                    RoyOutcome::Holds
                } else if lhs_lo > rhs_hi {
                    RoyOutcome::Fails
                } else {
                    RoyOutcome::Inconclusive
                }
            }
        }
    };
    Ok(RoyCheck { lhs, rhs, outcome })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat2;

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_p(0, 7).unwrap(), 0);
        assert_eq!(sigma_p(7, 2).unwrap(), 3);
        assert_eq!(sigma_p(5, 3).unwrap(), 3);
    }

    #[test]
    fn factorial_valuation_examples() {
        assert_eq!(factorial_valuation(4, 2).unwrap(), 3);
        assert_eq!(factorial_valuation(0, 5).unwrap(), 0);
        assert_eq!(factorial_valuation(10, 5).unwrap(), 2);
    }

    #[test]
    fn valuation_matches_legendre() {
        for p in [2u64, 3, 5, 7, 11, 97] {
            for j in 0..2000u64 {
                assert_eq!(
                    factorial_valuation(j, p).unwrap(),
                    factorial_valuation_legendre(j, p).unwrap(),
                    "mismatch at p={p}, j={j}"
                );
            }
        }
    }

    #[test]
    fn factorial_abs_above_rp_power() {
        // |j!|_p >= r_p^j  <=>  v_p(j!) <= j/(p-1).
        for p in [2u64, 3, 5, 97] {
            for j in 0..1000u64 {
                let v = factorial_valuation(j, p).unwrap();
                assert!(v * (p - 1) <= j);
            }
        }
    }

    #[test]
    fn rp_examples() {
        let r2 = r_p_value(2).unwrap();
        assert_eq!(r2.exponent, rat2(-1, 1));
        assert!((r2.approx - 0.5).abs() < 1e-15);
        let r3 = r_p_value(3).unwrap();
        assert!((r3.approx - 3f64.powf(-0.5)).abs() < 1e-15);
        // Monotone toward 1.
        let mut prev = 0.0;
        for p in [2u64, 3, 5, 7, 11, 13, 97] {
            let v = r_p_value(p).unwrap().approx;
            assert!(v > prev);
            prev = v;
        }
        assert!(r_p_value(4).is_err());
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa(4, 2).unwrap(), 5);
        assert_eq!(kappa(1, 7).unwrap(), 0);
        assert_eq!(kappa(9, 3).unwrap(), 6);
    }

    #[test]
    fn gauss_norm_examples() {
        // Constant 1 at any radius: 1.
        let s = PadicSeries::polynomial(3, vec![rat(1)], rat(5)).unwrap();
        assert_eq!(gauss_norm(&s).unwrap(), rat(1));
        // z^2/2 at p = 2, r = 1: |1/2|_2 = 2.
        let s2 = PadicSeries::polynomial(2, vec![rat(0), rat(0), rat2(1, 2)], rat(1)).unwrap();
        assert_eq!(gauss_norm(&s2).unwrap(), rat(2));
        // sum z^n/n!, n <= 4, p = 2, r = 1/2: max at n = 0.
        let coeffs = vec![rat(1), rat(1), rat2(1, 2), rat2(1, 6), rat2(1, 24)];
        let s3 = PadicSeries::polynomial(2, coeffs, rat2(1, 2)).unwrap();
        assert_eq!(gauss_norm(&s3).unwrap(), rat(1));
    }

    #[test]
    fn gauss_norm_multiplicative() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for p in [2u64, 3, 5] {
            for _ in 0..50 {
                let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
                    let deg = rng.gen_range(0..5usize);
                    UniPoly::new(
                        (0..=deg)
                            .map(|_| rat2(rng.gen_range(-40..=40), rng.gen_range(1..=24)))
                            .collect(),
                    )
                };
                let a = mk(&mut rng);
                let b = mk(&mut rng);
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                let r = rat2(1, 1);
                let na = gauss_norm(
                    &PadicSeries::polynomial(p, a.coeffs.clone(), r.clone()).unwrap(),
                )
                .unwrap();
                let nb = gauss_norm(
                    &PadicSeries::polynomial(p, b.coeffs.clone(), r.clone()).unwrap(),
                )
                .unwrap();
                let ab = a.mul(&b);
                let nab =
                    gauss_norm(&PadicSeries::polynomial(p, ab.coeffs, r).unwrap()).unwrap();
                assert_eq!(nab, na * nb);
            }
        }
    }

    #[test]
    fn waldschmidt_monomial() {
        // f = z^3, r = 2 S1, R = 4 S1: closed-form norms, holds.
        let f = AnalyticSample::polynomial(UniPoly::new(vec![
            rat(0),
            rat(0),
            rat(0),
            rat(1),
        ]))
        .unwrap();
        let c = check_waldschmidt(&f, 2, 2, &rat(4), &rat(8), 80).unwrap();
        assert!(c.holds, "lhs {} rhs {}", c.lhs_upper, c.rhs_lower);
    }

    #[test]
    fn waldschmidt_zero_function() {
        let f = AnalyticSample::polynomial(UniPoly::zero()).unwrap();
        let c = check_waldschmidt(&f, 1, 1, &rat(2), &rat(4), 80).unwrap();
        assert!(c.holds);
    }

    #[test]
    fn waldschmidt_extremal_product() {
        // f = prod_{m < S1} (z - m)^{T1} with small S1 T1: the derivative
        // term sees the first nonvanishing divided derivative.
        let s1 = 3u64;
        let t1 = 2u64;
        let mut poly = UniPoly::constant(rat(1));
        for m in 0..s1 {
            for _ in 0..t1 {
                poly = poly.mul(&UniPoly::new(vec![rat(-(m as i64)), rat(1)]));
            }
        }
        let f = AnalyticSample::polynomial(poly).unwrap();
        let c = check_waldschmidt(&f, s1, t1, &rat(2 * s1 as i64), &rat(8 * s1 as i64), 96)
            .unwrap();
        assert!(c.holds, "lhs {} rhs {}", c.lhs_upper, c.rhs_lower);
    }

    #[test]
    fn waldschmidt_poly_exp() {
        // f = (1 + z) e^z - z^2 e^{-z}.
        let f = AnalyticSample::new(vec![
            PolyExpTerm {
                poly: UniPoly::new(vec![rat(1), rat(1)]),
                frequency: rat(1),
            },
            PolyExpTerm {
                poly: UniPoly::new(vec![rat(0), rat(0), rat(-1)]),
                frequency: rat(-1),
            },
        ])
        .unwrap();
        let c = check_waldschmidt(&f, 2, 2, &rat(4), &rat(8), 96).unwrap();
        assert!(c.holds, "lhs {} rhs {}", c.lhs_upper, c.rhs_lower);
    }

    #[test]
    fn waldschmidt_guards() {
        let f = AnalyticSample::polynomial(UniPoly::constant(rat(1))).unwrap();
        assert!(check_waldschmidt(&f, 2, 1, &rat(3), &rat(8), 80).is_err()); // r < 2 S1
        assert!(check_waldschmidt(&f, 1, 1, &rat(4), &rat(2), 80).is_err()); // R < r
    }

    #[test]
    fn roy_constant() {
        let f = PadicSeries::polynomial(3, vec![rat(1)], rat(1)).unwrap();
        let c = check_roy(&f, 2, 1, &rat(1), &rat(3)).unwrap();
        assert_eq!(c.outcome, RoyOutcome::Holds);
    }

    #[test]
    fn roy_grid_product() {
        // f = prod_{m<S1} (z - m), T1 = 1, r = 1, R = p: the surviving
        // grid value f(S1) = S1! activates the kappa factor.
        for p in [2u64, 3, 5] {
            let s1 = 4u64;
            let mut poly = UniPoly::constant(rat(1));
            for m in 0..s1 {
                poly = poly.mul(&UniPoly::new(vec![rat(-(m as i64)), rat(1)]));
            }
            let f = PadicSeries::polynomial(p, poly.coeffs, rat(1)).unwrap();
            let c = check_roy(&f, s1, 1, &rat(1), &rat(p as i64)).unwrap();
            assert_eq!(c.outcome, RoyOutcome::Holds, "p = {p}");
        }
    }

    #[test]
    fn roy_factorial_equality_regime() {
        // f = z^n/n! at n = S1: kappa exactly compensates |n!|_p.
        for p in [2u64, 3] {
            let n = 8usize;
            let mut fact = BigInt::one();
            for i in 1..=n {
                fact *= big(i as i64);
            }
            let mut coeffs = vec![rat(0); n + 1];
            coeffs[n] = BigRational::new(BigInt::one(), fact);
            let f = PadicSeries::polynomial(p, coeffs, rat(1)).unwrap();
            let c = check_roy(&f, n as u64, 1, &rat(1), &rat(p as i64)).unwrap();
            assert_eq!(c.outcome, RoyOutcome::Holds, "p = {p}");
        }
    }

    #[test]
    fn roy_tail_handling() {
        // Huge declared tail: inconclusive.
        let mut f = PadicSeries::polynomial(2, vec![rat(1), rat(1)], rat(1)).unwrap();
        f.tail_bound = Some(rat(1));
        let c = check_roy(&f, 1, 1, &rat(1), &rat(2)).unwrap();
        assert_eq!(c.outcome, RoyOutcome::Inconclusive);
        // Tiny tail on a strict instance: verdict survives.
        let mut coeffs = vec![rat(0); 11];
        coeffs[10] = rat(1);
        let mut g = PadicSeries::polynomial(2, coeffs, rat(1)).unwrap();
        g.tail_bound = Some(BigRational::new(BigInt::one(), BigInt::one() << 60));
        let c2 = check_roy(&g, 1, 1, &rat(1), &rat(2)).unwrap();
        assert_eq!(c2.outcome, RoyOutcome::Holds);
    }
}
