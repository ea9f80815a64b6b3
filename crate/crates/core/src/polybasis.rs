//! Binomial polynomials `Delta_n`, the Matveev family
//! `delta_flat(X; lambda0) = Delta_flat^q * Delta_r`, exact divided
//! derivatives, and the weight functional of the affine line: an exact
//! height term over the derivative values at integer points plus a
//! sup-norm term over a disk, enclosed rigorously.
//!
//! The sup of `|P(z)|` on `|z| <= R` is bracketed by the coefficient
//! bounds `max_j |c_j| R^j <= sup <= sum_j |c_j| R^j` (Cauchy), and the
//! lower end is optionally sharpened by circle sampling. In ultrametric
//! mode the sup over `|z| <= r` is the Gauss norm `max_j |c_j|_p r^j`,
//! exact; without a designated prime the trivial valuation is used,
//! which reproduces the degree-only term of the weight estimates.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{CoreError, Result};
use crate::heights::{weil_height, ProjVector};
use crate::ratio::{big, rat, rational_to_f64};
use crate::real::{euler, ln_rational, RealInterval};

/// Dense univariate polynomial over `Q`, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct UniPoly {
    pub coeffs: Vec<BigRational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::constant(BigRational::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// First derivative (used by the symbolic test oracle and the weight
    /// machinery through `divided_derivative`).
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * rat(k as i64))
                .collect(),
        )
    }
}

/// `Delta_0 = 1`, `Delta_n(X) = X(X+1)...(X+n-1)/n!`; integer-valued on
/// the integers.
pub fn binomial_delta(n: usize) -> UniPoly {
    let mut p = UniPoly::constant(BigRational::one());
    for k in 0..n {
        p = p.mul(&UniPoly::new(vec![rat(k as i64), rat(1)]));
    }
    if n > 0 {
        let mut fact = BigInt::one();
        for k in 1..=n {
            fact *= big(k as i64);
        }
        let inv = BigRational::new(BigInt::one(), fact);
        p = UniPoly::new(p.coeffs.into_iter().map(|c| c * &inv).collect());
    }
    p
}

/// Matveev polynomial `Delta_{d_flat}(X)^q * Delta_r(X)` with `(q, r)` the
/// euclidean division of `lambda0` by `d_flat`; its degree is `lambda0`.
pub fn matveev_delta(d_flat: usize, lambda0: usize) -> Result<UniPoly> {
    if d_flat == 0 {
        return Err(CoreError::Domain("matveev_delta needs d_flat >= 1".into()));
    }
    let q = lambda0 / d_flat;
    let r = lambda0 % d_flat;
    Ok(binomial_delta(d_flat).pow(q).mul(&binomial_delta(r)))
}

/// Coefficient of `h^{t0}` in `p(at + h)`: the divided derivative
/// `p^{(t0)}(at)/t0!`, computed by binomial expansion, no differentiation.
pub fn divided_derivative(p: &UniPoly, t0: usize, at: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    let mut binom = BigInt::one(); // C(k, t0) maintained incrementally
    for (k, c) in p.coeffs.iter().enumerate().skip(t0) {
        if k > t0 {
            // C(k, t0) = C(k-1, t0) * k / (k - t0)
            binom = &binom * big(k as i64) / big((k - t0) as i64);
        }
        acc += c * BigRational::from_integer(binom.clone()) * at.pow((k - t0) as i32);
    }
    acc
}

/// The polynomial `p^{(t0)}/t0!` itself.
pub fn divided_derivative_poly(p: &UniPoly, t0: usize) -> UniPoly {
    if t0 >= p.coeffs.len() {
        return UniPoly::zero();
    }
    let mut out = Vec::with_capacity(p.coeffs.len() - t0);
    let mut binom = BigInt::one();
    for (k, c) in p.coeffs.iter().enumerate().skip(t0) {
        if k > t0 {
            binom = &binom * big(k as i64) / big((k - t0) as i64);
        }
        out.push(c * BigRational::from_integer(binom.clone()));
    }
    UniPoly::new(out)
}

/// Disk/radius data for the sup-norm part of the weight.
#[derive(Debug, Clone)]
pub enum RadiusMode {
    /// Archimedean disk of radius `e * S`; `e` as an enclosure (exact
    /// rationals or an `e^k` enclosure both fit).
    Archimedean { e_param: RealInterval },
    /// Ultrametric radius `r > 1`; `prime` selects the coefficient
    /// valuation, trivial valuation if absent.
    Ultrametric { r: BigRational, prime: Option<u64> },
}

#[derive(Debug, Clone)]
pub struct WeightQuery {
    pub family: Vec<UniPoly>,
    pub t_max: usize,
    pub s_max: usize,
    pub radius: RadiusMode,
    pub field_degree: u64,
    /// Circle-sampling density for the archimedean lower bound.
    pub samples: usize,
}

/// Enclosure of the weight of the affine line for the given family:
/// exact height of all divided-derivative values at `s = 0..S`, orders
/// `t0 = 0..T`, plus `(1/D) log sup`.
pub fn weight_aleph(q: &WeightQuery, prec: u32) -> Result<RealInterval> {
    if q.family.is_empty() {
        return Err(CoreError::Domain("weight of an empty family".into()));
    }
    if q.family.iter().all(|p| p.is_zero()) {
        return Err(CoreError::Domain("weight of an all-zero family".into()));
    }
    let max_deg = q
        .family
        .iter()
        .filter_map(|p| p.degree())
        .max()
        .unwrap_or(0);
    let t_eff = q.t_max.min(max_deg);

    // Height term, exact: Weil height of the flattened value tuple.
    let mut values: Vec<BigRational> = Vec::new();
    for p in &q.family {
        for t0 in 0..=t_eff {
            for s in 0..=q.s_max {
                values.push(divided_derivative(p, t0, &rat(s as i64)));
            }
        }
    }
    let height_term = if values.iter().all(|v| v.is_zero()) {
        RealInterval::zero()
    } else {
        let pv = ProjVector::new(values)?;
        let h = weil_height(&pv)?;
        let l = ln_rational(&h.argument, prec)?;
        if h.half {
            l.scale(&BigRational::new(BigInt::one(), big(2)))
        } else {
            l
        }
    };

    // Sup term.
    let sup = match &q.radius {
        RadiusMode::Archimedean { e_param } => {
            let radius = e_param.scale(&rat(q.s_max as i64));
            sup_enclosure_arch(&q.family, t_eff, &radius, q.samples, prec)?
        }
        RadiusMode::Ultrametric { r, prime } => {
            if r <= &BigRational::one() {
                return Err(CoreError::Domain("ultrametric radius must exceed 1".into()));
            }
            let mut best: Option<BigRational> = None;
            for p in &q.family {
                for t0 in 0..=t_eff {
                    let dp = divided_derivative_poly(p, t0);
                    let n = gauss_style_norm(&dp, r, *prime)?;
                    best = Some(match best {
                        None => n,
                        Some(b) => b.max(n),
                    });
                }
            }
            let v = best.unwrap();
            RealInterval::exact(v)
        }
    };
    if !sup.lo().is_positive() {
        return Err(CoreError::Internal("sup enclosure collapsed to zero".into()));
    }
    let log_sup = sup.ln(prec)?;
    let d = BigRational::new(BigInt::one(), big(q.field_degree as i64));
    Ok(height_term.add(&log_sup.scale(&d)).rounded(prec))
}

/// `[max_j |c_j| R^j, sum_j |c_j| R^j]` over the whole family and all
/// divided-derivative orders, with the lower end sharpened by circle
/// sampling when it helps.
fn sup_enclosure_arch(
    family: &[UniPoly],
    t_eff: usize,
    radius: &RealInterval,
    samples: usize,
    prec: u32,
) -> Result<RealInterval> {
    let mut lo = RealInterval::zero();
    let mut hi = RealInterval::zero();
    let mut sampled_lo: f64 = 0.0;
    let r_mid = radius.to_f64();
    for p in family {
        for t0 in 0..=t_eff {
            let dp = divided_derivative_poly(p, t0);
            if dp.is_zero() {
                continue;
            }
            let mut sum = RealInterval::zero();
            let mut maxterm = RealInterval::zero();
            for (j, c) in dp.coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let term = radius.powi(j as i64)?.scale(&c.abs());
                sum = sum.add(&term);
                maxterm = maxterm.max(&term);
            }
            lo = lo.max(&maxterm);
            hi = hi.max(&sum);
            // Circle samples (f64) can only raise the lower bound.
            if samples > 0 && r_mid.is_finite() {
                let coefs: Vec<f64> = dp.coeffs.iter().map(rational_to_f64).collect();
                for k in 0..samples {
                    let theta = 2.0 * std::f64::consts::PI * (k as f64) / (samples as f64);
                    let (mut re, mut im) = (0.0f64, 0.0f64);
                    let (zr, zi) = (r_mid * theta.cos(), r_mid * theta.sin());
                    for c in coefs.iter().rev() {
                        let nre = re * zr - im * zi + c;
                        let nim = re * zi + im * zr;
                        re = nre;
                        im = nim;
                    }
                    let m = (re * re + im * im).sqrt();
                    if m.is_finite() {
                        sampled_lo = sampled_lo.max(m * (1.0 - 1e-9));
                    }
                }
            }
        }
    }
    // Merge the sampled lower bound if it beats the Cauchy bound and stays
    // consistent with the rigorous upper bound.
    if sampled_lo.is_finite() && sampled_lo > 0.0 {
        if let Some(s) = BigRational::from_float(sampled_lo) {
            if &s > lo.lo() && &s <= hi.hi() {
                lo = RealInterval::exact(s);
            }
        }
    }
    let out = RealInterval::new(lo.lo().clone(), hi.hi().clone());
    Ok(out.rounded(prec))
}

/// Gauss-style norm `max_j |c_j|_val * r^j`; p-adic valuation when `prime`
/// is given, trivial valuation otherwise.
fn gauss_style_norm(p: &UniPoly, r: &BigRational, prime: Option<u64>) -> Result<BigRational> {
    if p.is_zero() {
        return Ok(BigRational::zero());
    }
    let mut best = BigRational::zero();
    for (j, c) in p.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let cval = match prime {
            None => BigRational::one(),
            Some(pr) => crate::heights::local_abs(c, crate::heights::Place::finite(pr)?)?.value,
        };
        let term = cval * r.pow(j as i32);
        if term > best {
            best = term;
        }
    }
    Ok(best)
}

/// The Matveev-family weight estimate
/// `c * (D0 log(e + S/Dflat) + min(D0, T) Dflat + (D0/D) last)` with
/// `last = log(1 + eS/Dflat)` archimedean, `log r` ultrametric.
pub fn weight_bound_matveev(
    d0: u64,
    d_flat: u64,
    t: u64,
    s: u64,
    radius: &RadiusMode,
    field_degree: u64,
    c: &BigRational,
    prec: u32,
) -> Result<RealInterval> {
    if d_flat == 0 {
        return Err(CoreError::Domain("weight bound needs d_flat >= 1".into()));
    }
    if c < &BigRational::one() {
        return Err(CoreError::Domain("weight bound constant must be >= 1".into()));
    }
    if d0 == 0 {
        return Ok(RealInterval::zero());
    }
    let e = euler(prec);
    let s_over = rat(s as i64) / rat(d_flat as i64);
    let term1 = e
        .add(&RealInterval::exact(s_over))
        .ln(prec)?
        .scale(&rat(d0 as i64));
    let term2 = RealInterval::exact(rat(d0.min(t) as i64) * rat(d_flat as i64));
    let last = match radius {
        RadiusMode::Archimedean { e_param } => {
            let es = e_param.scale(&rat(s as i64)).scale(&rat2_inv(d_flat));
            RealInterval::one().add(&es).ln(prec)?
        }
        RadiusMode::Ultrametric { r, .. } => ln_rational(r, prec)?,
    };
    let term3 = last.scale(&(rat(d0 as i64) / rat(field_degree as i64)));
    Ok(term1.add(&term2).add(&term3).scale(c).rounded(prec))
}

fn rat2_inv(d: u64) -> BigRational {
    BigRational::new(BigInt::one(), big(d as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat2;
    use rand::{Rng, SeedableRng};

    #[test]
    fn delta_examples() {
        assert_eq!(binomial_delta(0), UniPoly::constant(rat(1)));
        // Delta_2(3) = 3*4/2 = 6.
        assert_eq!(binomial_delta(2).eval(&rat(3)), rat(6));
        // Delta_3(-1) = 0: the factor (X+1) vanishes.
        assert_eq!(binomial_delta(3).eval(&rat(-1)), rat(0));
    }

    #[test]
    fn delta_integer_valued() {
        for n in 0..=20usize {
            let d = binomial_delta(n);
            for m in -20..=20i64 {
                let v = d.eval(&rat(m));
                assert!(v.is_integer(), "Delta_{n}({m}) = {v} not an integer");
            }
        }
    }

    #[test]
    fn matveev_examples() {
        // (d_flat = 2, lambda0 = 5): Delta_2^2 * Delta_1, degree 5.
        let p = matveev_delta(2, 5).unwrap();
        assert_eq!(p.degree(), Some(5));
        assert_eq!(p, binomial_delta(2).pow(2).mul(&binomial_delta(1)));
        // (d_flat = 1, lambda0 = k): X^k.
        let q = matveev_delta(1, 4).unwrap();
        assert_eq!(q, UniPoly::new(vec![rat(0), rat(0), rat(0), rat(0), rat(1)]));
        // lambda0 = 0: constant 1.
        assert_eq!(matveev_delta(7, 0).unwrap(), UniPoly::constant(rat(1)));
        assert!(matveev_delta(0, 3).is_err());
    }

    #[test]
    fn matveev_degree_law() {
        for d_flat in 1..=10usize {
            for lambda0 in 0..=50usize {
                let p = matveev_delta(d_flat, lambda0).unwrap();
                assert_eq!(p.degree(), Some(lambda0), "deg at ({d_flat}, {lambda0})");
            }
        }
    }

    #[test]
    fn divided_derivative_examples() {
        // (X^2, t0 = 1, at = 3) -> 6.
        let x2 = UniPoly::new(vec![rat(0), rat(0), rat(1)]);
        assert_eq!(divided_derivative(&x2, 1, &rat(3)), rat(6));
        // Order above the degree vanishes.
        assert_eq!(divided_derivative(&x2, 5, &rat(11)), rat(0));
        // (Delta_2, t0 = 0, at = 4) -> 10.
        assert_eq!(divided_derivative(&binomial_delta(2), 0, &rat(4)), rat(10));
    }

    #[test]
    fn divided_derivative_vs_symbolic() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let deg = rng.gen_range(0..8usize);
            let p = UniPoly::new(
                (0..=deg)
                    .map(|_| rat2(rng.gen_range(-9..=9), rng.gen_range(1..=4)))
                    .collect(),
            );
            let t0 = rng.gen_range(0..6usize);
            let at = rat2(rng.gen_range(-5..=5), rng.gen_range(1..=3));
            // Symbolic oracle: differentiate t0 times, evaluate, divide t0!.
            let mut d = p.clone();
            for _ in 0..t0 {
                d = d.derivative();
            }
            let mut fact = BigRational::one();
            for k in 1..=t0 {
                fact *= rat(k as i64);
            }
            let oracle = d.eval(&at) / fact;
            assert_eq!(divided_derivative(&p, t0, &at), oracle);
        }
    }

    fn arch_query(family: Vec<UniPoly>, t: usize, s: usize, d: u64) -> WeightQuery {
        WeightQuery {
            family,
            t_max: t,
            s_max: s,
            radius: RadiusMode::Archimedean { e_param: euler(96) },
            field_degree: d,
            samples: 64,
        }
    }

    #[test]
    fn weight_trivial_family() {
        let q = arch_query(vec![UniPoly::constant(rat(1))], 3, 5, 1);
        let w = weight_aleph(&q, 80).unwrap();
        assert!(w.lo() <= &rat(0) && &rat(0) <= w.hi());
        assert!(w.width() < rat2(1, 1000));
    }

    #[test]
    fn weight_one_x_family() {
        let fam = vec![
            UniPoly::constant(rat(1)),
            UniPoly::new(vec![rat(0), rat(1)]),
        ];
        let q = arch_query(fam, 0, 1, 1);
        let w = weight_aleph(&q, 80).unwrap();
        // Height term 0 (values in {0,1}), sup term log(e) = 1.
        assert!(w.hi() <= &rat2(101, 100));
        assert!(w.lo() >= &rat2(99, 100));
    }

    #[test]
    fn weight_monomials_shape_bound() {
        // aleph((X^lambda0)) <= 10 * D0 (log S + log(e)/D) for sane grids.
        for (d0, s, d) in [(3u64, 4u64, 1u64), (5, 8, 2), (8, 2, 4)] {
            let fam: Vec<UniPoly> = (0..=d0 as usize)
                .map(|l| {
                    let mut c = vec![rat(0); l + 1];
                    c[l] = rat(1);
                    UniPoly::new(c)
                })
                .collect();
            let q = arch_query(fam, d0 as usize, s as usize, d);
            let w = weight_aleph(&q, 80).unwrap();
            let log_s = ln_rational(&rat(s as i64), 80).unwrap();
            let bound = log_s
                .add(&RealInterval::exact(rat2(1, d as i64)))
                .scale(&rat(10 * d0 as i64));
            assert!(
                w.hi() <= bound.hi(),
                "monomial weight {} exceeds shape bound {}",
                w.to_f64(),
                bound.to_f64()
            );
        }
    }

    #[test]
    fn weight_matveev_under_lemma_bound() {
        // Matveev family weight against the lemma estimate with c = 10,
        // across a small grid, both radius modes.
        let c = rat(10);
        for (d0, d_flat, t, s) in [(2u64, 1u64, 1u64, 2u64), (5, 2, 3, 8), (8, 3, 20, 20), (12, 4, 6, 12)] {
            let fam: Vec<UniPoly> = (0..=d0 as usize)
                .map(|l| matveev_delta(d_flat as usize, l).unwrap())
                .collect();
            // Archimedean with e = e.
            let qa = arch_query(fam.clone(), t as usize, s as usize, 1);
            let wa = weight_aleph(&qa, 80).unwrap();
            let ba = weight_bound_matveev(
                d0,
                d_flat,
                t,
                s,
                &qa.radius,
                1,
                &c,
                80,
            )
            .unwrap();
            assert!(
                wa.hi() <= ba.hi(),
                "arch weight {} above bound {} at ({d0},{d_flat},{t},{s})",
                wa.to_f64(),
                ba.to_f64()
            );
            // Ultrametric, trivial valuation, r = 3/2.
            let radius = RadiusMode::Ultrametric { r: rat2(3, 2), prime: None };
            let qu = WeightQuery { radius: radius.clone(), ..qa };
            let wu = weight_aleph(&qu, 80).unwrap();
            let bu = weight_bound_matveev(d0, d_flat, t, s, &radius, 1, &c, 80).unwrap();
            assert!(
                wu.hi() <= bu.hi(),
                "ultra weight {} above bound {} at ({d0},{d_flat},{t},{s})",
                wu.to_f64(),
                bu.to_f64()
            );
        }
    }

    #[test]
    fn weight_bound_degenerate() {
        let radius = RadiusMode::Ultrametric { r: rat(2), prime: None };
        let b = weight_bound_matveev(0, 1, 5, 5, &radius, 1, &rat(1), 80).unwrap();
        assert!(b.as_exact().unwrap().is_zero());
    }

    #[test]
    fn weight_bound_examples() {
        // (D0=2, Dflat=1, T=1, S=2, e, D=1, c=1): 2log(e+2) + 1 + 2log(1+2e).
        let radius = RadiusMode::Archimedean { e_param: euler(96) };
        let b = weight_bound_matveev(2, 1, 1, 2, &radius, 1, &rat(1), 96).unwrap();
        let expected = 2.0 * (std::f64::consts::E + 2.0).ln()
            + 1.0
            + 2.0 * (1.0 + 2.0 * std::f64::consts::E).ln();
        assert!((b.to_f64() - expected).abs() < 1e-10);
        // Ultrametric variant with r = 2: 2log(e+2) + 1 + 2log2.
        let radius_u = RadiusMode::Ultrametric { r: rat(2), prime: None };
        let bu = weight_bound_matveev(2, 1, 1, 2, &radius_u, 1, &rat(1), 96).unwrap();
        let expected_u =
            2.0 * (std::f64::consts::E + 2.0).ln() + 1.0 + 2.0 * std::f64::consts::LN_2;
        assert!((bu.to_f64() - expected_u).abs() < 1e-10);
    }

    #[test]
    fn enclosure_tightens_with_samples() {
        let fam = vec![UniPoly::new(vec![rat(1), rat(-2), rat(1)])]; // (1-X)^2
        let mk = |samples| WeightQuery {
            family: fam.clone(),
            t_max: 0,
            s_max: 2,
            radius: RadiusMode::Archimedean { e_param: euler(96) },
            field_degree: 1,
            samples,
        };
        let w0 = weight_aleph(&mk(0), 80).unwrap();
        let w1 = weight_aleph(&mk(64), 80).unwrap();
        let w2 = weight_aleph(&mk(256), 80).unwrap();
        assert!(w1.width() <= w0.width());
        assert!(w2.width() <= w1.width());
        assert!(w2.lo() <= w2.hi());
    }
}
