//! Group and subgroup descriptors on `G_a x G_m^n`, Hilbert-Samuel
//! multidegrees, orbit counts `card((Sigma_q(S) + G')/G')`, the
//! obstruction functionals `A`/`B` with the adjustment parameter `x`,
//! the rank bound and the non-nullity check of the adjusted degrees.
//!
//! Subgroups are connected subgroups of `G_a x G_m^n`: an optional
//! `G_a` factor times a subtorus presented by a saturated cocharacter
//! lattice (mixed "graph" rows cannot occur on this product and are
//! rejected). For a subtorus with saturated lattice `L`, the closure in
//! `(P^1)^(1+n)` has multidegree coefficient `d! * |det L_S|` on the
//! column subset `S`; coefficients sum to the degree of the closure.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::heights::Subspace;
use crate::linalg::{self, IMat};
use crate::ratio::{big, rat};
use crate::real::RealInterval;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorKind {
    Additive,
    Multiplicative,
    AbelianLike,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Factor {
    pub kind: FactorKind,
    pub dim: usize,
    pub rho: u8,
    pub deg: u64,
}

/// The ambient product `G_0 x G_1 x ... x G_n`, `G_0 = G_a` distinguished.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupDescriptor {
    pub factors: Vec<Factor>,
    pub y: u8,
}

impl GroupDescriptor {
    pub fn validate(&self) -> Result<()> {
        if self.factors.is_empty() {
            return Err(CoreError::Domain("group needs at least the G_a factor".into()));
        }
        let g0 = &self.factors[0];
        if g0.kind != FactorKind::Additive || g0.dim != 1 || g0.deg != 1 {
            return Err(CoreError::Domain(
                "factor 0 must be the additive line with degree 1".into(),
            ));
        }
        for (i, f) in self.factors.iter().enumerate() {
            if f.dim == 0 || f.deg == 0 {
                return Err(CoreError::Domain(format!("factor {i} has zero dim or degree")));
            }
            let want = match f.kind {
                FactorKind::Additive | FactorKind::Multiplicative => 1,
                FactorKind::AbelianLike => 2,
            };
            if f.rho != want {
                return Err(CoreError::Domain(format!(
                    "factor {i}: rho must be {want} for its kind"
                )));
            }
            if matches!(f.kind, FactorKind::Additive | FactorKind::Multiplicative) && f.dim != 1 {
                return Err(CoreError::Domain(format!("linear factor {i} must have dim 1")));
            }
        }
        if self.y > 1 {
            return Err(CoreError::Domain("y must be 0 or 1".into()));
        }
        if self.y == 0 {
            let semi_abelian = self.factors[1..]
                .iter()
                .all(|f| matches!(f.kind, FactorKind::Multiplicative | FactorKind::AbelianLike));
            if !semi_abelian {
                return Err(CoreError::Domain(
                    "y = 0 requires a semi-abelian G (no additive factors past G_0)".into(),
                ));
            }
        }
        Ok(())
    }

    /// Toric ambient with `n` multiplicative factors; `y = 0`.
    pub fn toric(n: usize) -> Self {
        let mut factors = vec![Factor {
            kind: FactorKind::Additive,
            dim: 1,
            rho: 1,
            deg: 1,
        }];
        for _ in 0..n {
            factors.push(Factor {
                kind: FactorKind::Multiplicative,
                dim: 1,
                rho: 1,
                deg: 1,
            });
        }
        Self { factors, y: 0 }
    }

    pub fn n(&self) -> usize {
        self.factors.len() - 1
    }

    /// `g = dim G` (without the `G_a` factor).
    pub fn g(&self) -> usize {
        self.factors[1..].iter().map(|f| f.dim).sum()
    }

    pub fn is_toric(&self) -> bool {
        self.factors[1..]
            .iter()
            .all(|f| f.kind == FactorKind::Multiplicative)
    }

    /// `deg(G_0 x G)` for the Segre sheaf: `(1+g)!/(prod g_i!) * prod deg_i`.
    pub fn deg_ambient(&self) -> BigInt {
        let total: usize = 1 + self.g();
        let mut v = factorial(total);
        for f in &self.factors {
            v /= factorial(f.dim);
            v *= big(f.deg as i64);
        }
        v
    }

    /// `H(G_0 x G; X_0..X_n) = (1+g)!/(prod g_i!) prod deg_i * prod X_i^{g_i}`
    /// evaluated at the given per-factor values (`values.len() = n + 1`).
    pub fn ambient_multidegree_eval(&self, values: &[RealInterval]) -> Result<RealInterval> {
        if values.len() != self.factors.len() {
            return Err(CoreError::Domain("wrong number of multidegree values".into()));
        }
        let mut acc = RealInterval::exact(BigRational::from_integer(self.deg_ambient()));
        for (f, v) in self.factors.iter().zip(values.iter()) {
            acc = acc.mul(&v.powi(f.dim as i64)?);
        }
        Ok(acc)
    }
}

fn factorial(n: usize) -> BigInt {
    let mut v = BigInt::one();
    for k in 2..=n {
        v *= big(k as i64);
    }
    v
}

/// Connected subgroup of `G_a x G_m^n`: optional `G_a` factor plus a
/// subtorus with saturated cocharacter lattice. Column 0 is the `G_a`
/// coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupDescriptor {
    /// Saturated lattice in HNF, rows independent; `d x (1 + n)`.
    pub lattice: IMat,
    pub ambient_cols: usize,
    pub contains_ga: bool,
}

impl SubgroupDescriptor {
    pub fn new(rows: IMat, ambient_cols: usize) -> Result<Self> {
        for r in &rows {
            if r.len() != ambient_cols {
                return Err(CoreError::Domain("lattice row has wrong length".into()));
            }
        }
        let sat = linalg::hnf(&linalg::saturate(&rows, ambient_cols));
        let mut contains_ga = false;
        for r in &sat {
            if !r[0].is_zero() {
                if r[0].is_one() && r[1..].iter().all(|x| x.is_zero()) {
                    contains_ga = true;
                } else {
                    return Err(CoreError::Unsupported(
                        "lattice mixes the additive coordinate with torus characters".into(),
                    ));
                }
            }
        }
        Ok(Self {
            lattice: sat,
            ambient_cols,
            contains_ga,
        })
    }

    pub fn trivial(ambient_cols: usize) -> Self {
        Self {
            lattice: Vec::new(),
            ambient_cols,
            contains_ga: false,
        }
    }

    pub fn full(ambient_cols: usize) -> Result<Self> {
        Self::new(linalg::identity(ambient_cols), ambient_cols)
    }

    pub fn dim(&self) -> usize {
        self.lattice.len()
    }

    /// Codimension inside `G_a x G_m^n`.
    pub fn codim(&self) -> usize {
        self.ambient_cols - self.dim()
    }

    /// Tangent space at the origin, as a subspace of `Q^(1+n)`.
    pub fn tangent(&self) -> Result<Subspace> {
        Subspace::from_integer_rows(self.lattice.clone(), self.ambient_cols)
    }

    /// Rows of the torus part (the `G_a` row removed), restricted to the
    /// torus columns `1..`.
    pub fn torus_rows(&self) -> IMat {
        self.lattice
            .iter()
            .filter(|r| r[0].is_zero())
            .map(|r| r[1..].to_vec())
            .collect()
    }

    /// Canonical ordering key (dimension, `G_a` flag, lattice rows).
    pub fn sort_key(&self) -> (usize, bool, Vec<Vec<BigInt>>) {
        (self.dim(), self.contains_ga, self.lattice.clone())
    }
}

/// Multidegree of a subgroup closure: nonzero coefficients on `d`-subsets
/// of the factor indices `{0..n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiDegree {
    pub dim: usize,
    pub coeffs: BTreeMap<Vec<usize>, BigInt>,
}

impl MultiDegree {
    /// Sum of the coefficients = degree of the closure.
    pub fn total(&self) -> BigInt {
        self.coeffs.values().cloned().sum()
    }

    pub fn eval(&self, values: &[RealInterval]) -> Result<RealInterval> {
        let mut acc = RealInterval::zero();
        for (subset, c) in &self.coeffs {
            let mut term = RealInterval::exact(BigRational::from_integer(c.clone()));
            for &i in subset {
                term = term.mul(values.get(i).ok_or_else(|| {
                    CoreError::Domain("multidegree evaluation: missing value".into())
                })?);
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }
}

/// `H(G'; X_0..X_n)`: coefficient `d! |det(lattice columns S)|` on each
/// `d`-subset `S`. The trivial subgroup has `H = 1`.
pub fn multidegree(sub: &SubgroupDescriptor) -> Result<MultiDegree> {
    let d = sub.dim();
    let rows: Vec<usize> = (0..d).collect();
    let mut coeffs = BTreeMap::new();
    if d == 0 {
        coeffs.insert(Vec::new(), BigInt::one());
        return Ok(MultiDegree { dim: 0, coeffs });
    }
    let dfac = factorial(d);
    for cols in (0..sub.ambient_cols).combinations(d) {
        let det = linalg::minor(&sub.lattice, &rows, &cols).abs();
        if !det.is_zero() {
            coeffs.insert(cols, det * &dfac);
        }
    }
    Ok(MultiDegree { dim: d, coeffs })
}

/// The point `q = (1, p)` with `p` in `(Q^x)^n`; only `p` is stored.
#[derive(Debug, Clone)]
pub struct PointSpec {
    pub coords: Vec<BigRational>,
}

impl PointSpec {
    pub fn new(coords: Vec<BigRational>) -> Result<Self> {
        if coords.iter().any(|c| c.is_zero()) {
            return Err(CoreError::Domain("point has a zero coordinate".into()));
        }
        Ok(Self { coords })
    }
}

/// Common torsion order of character values: `Some(1)`, `Some(2)` or
/// `None` (infinite). Over `Q` the only roots of unity are +-1.
fn torsion_order(values: &[BigRational]) -> Option<u64> {
    let mut order = 1u64;
    for v in values {
        if v.is_one() {
            continue;
        }
        if (-v.clone()).is_one() {
            order = 2;
        } else {
            return None;
        }
    }
    Some(order)
}

/// Values at `p` of a basis of the characters vanishing on the subtorus.
fn kernel_character_values(sub: &SubgroupDescriptor, q: &PointSpec) -> Result<Vec<BigRational>> {
    let n = sub.ambient_cols - 1;
    if q.coords.len() != n {
        return Err(CoreError::Domain("point dimension mismatch".into()));
    }
    let torus = sub.torus_rows();
    let kernel = linalg::integer_kernel(&torus, n);
    let mut out = Vec::with_capacity(kernel.len());
    for c in &kernel {
        let mut v = BigRational::one();
        for (pi, ci) in q.coords.iter().zip(c.iter()) {
            let e = ci
                .to_i32()
                .ok_or_else(|| CoreError::Domain("character exponent out of range".into()))?;
            v *= pi.pow(e);
        }
        out.push(v);
    }
    Ok(out)
}

/// `card((Sigma_q(S) + G')/G')` with `Sigma_q(S) = {s q : 0 <= s <= S}`:
/// `S + 1` when `G'` misses the `G_a` factor (the first coordinate of `q`
/// is 1), otherwise `min(S + 1, M)` with `M` the common torsion order of
/// the kernel characters at `p`.
pub fn orbit_count(q: &PointSpec, sub: &SubgroupDescriptor, s_max: u64) -> Result<BigInt> {
    if !sub.contains_ga {
        let n = sub.ambient_cols - 1;
        if q.coords.len() != n {
            return Err(CoreError::Domain("point dimension mismatch".into()));
        }
        return Ok(big(s_max as i64) + BigInt::one());
    }
    let values = kernel_character_values(sub, q)?;
    Ok(match torsion_order(&values) {
        Some(m) => big((s_max + 1).min(m) as i64),
        None => big(s_max as i64) + BigInt::one(),
    })
}

/// True iff `s q` lies in `G'` for some `1 <= s <= s_max` (torsion guard
/// appearing in the theorems' hypotheses).
pub fn some_multiple_in_subgroup(
    q: &PointSpec,
    sub: &SubgroupDescriptor,
    s_max: u64,
) -> Result<bool> {
    if s_max == 0 || !sub.contains_ga {
        return Ok(false);
    }
    let values = kernel_character_values(sub, q)?;
    Ok(match torsion_order(&values) {
        Some(m) => m <= s_max,
        None => false,
    })
}

/// Parameters feeding the obstruction functionals.
#[derive(Debug, Clone)]
pub struct ObstructionParams {
    pub t_tilde: RealInterval,
    pub c0: u64,
    /// `D~_0 .. D~_n`, one per factor.
    pub d_tilde: Vec<RealInterval>,
    pub s: u64,
}

/// `lambda' = codim_W (W cap t_G')` and `r' = codim G'`, by exact rank
/// computations. Errors when `t_G' + W` is the whole tangent space.
pub fn lambda_r(sub: &SubgroupDescriptor, w: &Subspace) -> Result<(usize, usize)> {
    if w.ambient_dim != sub.ambient_cols {
        return Err(CoreError::Domain("W lives in the wrong ambient space".into()));
    }
    let stacked = linalg::stack(&w.basis, &sub.lattice);
    let rank = linalg::rank_int(&stacked);
    let r = sub.codim();
    let lambda = rank - sub.dim();
    if rank == sub.ambient_cols {
        return Err(CoreError::Precondition(
            "tangent condition fails: t_G' + W is the full tangent space".into(),
        ));
    }
    if lambda == r {
        return Err(CoreError::Precondition("degenerate exponent r' = lambda'".into()));
    }
    Ok((lambda, r))
}

#[derive(Debug, Clone)]
pub struct SubgroupEval {
    pub sub: SubgroupDescriptor,
    pub lambda: usize,
    pub r: usize,
    pub orbit: BigInt,
    pub hs: MultiDegree,
    pub a: RealInterval,
    pub b: RealInterval,
}

/// `A(G')` and `B(G')` of the obstruction definition.
pub fn obstruction_ab(
    sub: &SubgroupDescriptor,
    params: &ObstructionParams,
    q: &PointSpec,
    w: &Subspace,
    prec: u32,
) -> Result<(RealInterval, RealInterval)> {
    let ev = eval_subgroup(sub, params, q, w, prec)?;
    Ok((ev.a, ev.b))
}

fn eval_subgroup(
    sub: &SubgroupDescriptor,
    params: &ObstructionParams,
    q: &PointSpec,
    w: &Subspace,
    prec: u32,
) -> Result<SubgroupEval> {
    if params.d_tilde.len() != sub.ambient_cols {
        return Err(CoreError::Domain("need one D~ value per factor".into()));
    }
    let (lambda, r) = lambda_r(sub, w)?;
    let orbit = orbit_count(q, sub, params.s)?;
    let hs = multidegree(sub)?;
    let hs_val = hs.eval(&params.d_tilde)?;
    let full = SubgroupDescriptor::full(sub.ambient_cols)?;
    let hs_amb = multidegree(&full)?.eval(&params.d_tilde)?;
    let num = params
        .t_tilde
        .powi(lambda as i64)?
        .mul(&RealInterval::exact(BigRational::from_integer(orbit.clone())))
        .mul(&hs_val);
    let den = hs_amb.scale(&rat(params.c0 as i64));
    let base = num.div(&den)?;
    let exponent = BigRational::new(BigInt::one(), big((r - lambda) as i64));
    let a = base.pow_rational(&exponent, prec)?;
    // B = A^((r - lambda)/r) * max(1, A)^(lambda/r).
    let e1 = BigRational::new(big((r - lambda) as i64), big(r as i64));
    let e2 = BigRational::new(big(lambda as i64), big(r as i64));
    let b1 = a.pow_rational(&e1, prec)?;
    let b2 = a.max(&RealInterval::one()).pow_rational(&e2, prec)?;
    let b = b1.mul(&b2).rounded(prec);
    Ok(SubgroupEval {
        sub: sub.clone(),
        lambda,
        r,
        orbit,
        hs,
        a,
        b,
    })
}

#[derive(Debug, Clone)]
pub struct ObstructionReport {
    pub x: RealInterval,
    pub argmin_index: usize,
    pub family: Vec<SubgroupEval>,
    /// Whether the relative-1e-9 checks of the minimality lemma ran (they
    /// require some `A <= 1`): `mho >= 1` for all members with equality at
    /// the argmin, and the homogeneity identity `x^r mho = A^(r-lambda)`.
    pub lemma_equality_checked: bool,
    pub refined_ties: bool,
}

const LEMMA_REL_TOL: f64 = 1e-9;

/// Picks `x = min B(G')` over the family, verifies the minimality lemma
/// numerically, and reports every evaluation. Overlapping candidates are
/// re-evaluated at 256 bits; surviving ties break by lattice order.
pub fn choose_x(
    family: &[SubgroupDescriptor],
    params: &ObstructionParams,
    q: &PointSpec,
    w: &Subspace,
    prec: u32,
) -> Result<ObstructionReport> {
    if family.is_empty() {
        return Err(CoreError::Domain("empty subgroup family".into()));
    }
    let mut evals: Vec<SubgroupEval> = family
        .iter()
        .map(|s| eval_subgroup(s, params, q, w, prec))
        .collect::<Result<_>>()?;
    let mut refined = false;
    let mut best = 0usize;
    for i in 1..evals.len() {
        match evals[i].b.cmp_strict(&evals[best].b) {
            Some(std::cmp::Ordering::Less) => best = i,
            Some(_) => {}
            None => {
                refined = true;
                let si = evals[i].sub.clone();
                let sb = evals[best].sub.clone();
                evals[i] = eval_subgroup(&si, params, q, w, crate::real::REFINE_PREC)?;
                evals[best] = eval_subgroup(&sb, params, q, w, crate::real::REFINE_PREC)?;
                match evals[i].b.cmp_strict(&evals[best].b) {
                    Some(std::cmp::Ordering::Less) => best = i,
                    Some(_) => {}
                    None => {
                        if evals[i].sub.sort_key() < evals[best].sub.sort_key() {
                            best = i;
                        }
                    }
                }
            }
        }
    }
    let x = evals[best].b.clone();

    let some_a_le_one = evals.iter().any(|e| e.a.hi() <= &rat(1));
    let mut checked = false;
    if some_a_le_one {
        if x.lo() > &rat(1) {
            return Err(CoreError::Inconsistency("some A(G') <= 1 but x > 1".into()));
        }
        let d_sharp: Vec<RealInterval> = params.d_tilde.iter().map(|d| d.mul(&x)).collect();
        let full = SubgroupDescriptor::full(w.ambient_dim)?;
        let amb_sharp = multidegree(&full)?.eval(&d_sharp)?;
        for (i, e) in evals.iter().enumerate() {
            let hs_sharp = e.hs.eval(&d_sharp)?;
            let mho = params
                .t_tilde
                .powi(e.lambda as i64)?
                .mul(&RealInterval::exact(BigRational::from_integer(e.orbit.clone())))
                .mul(&hs_sharp)
                .div(&amb_sharp.scale(&rat(params.c0 as i64)))?;
            let mho_mid = mho.to_f64();
            let mho_w = width_f64(&mho);
            if mho_mid < 1.0 - LEMMA_REL_TOL - mho_w {
                return Err(CoreError::Inconsistency(format!(
                    "mho = {mho_mid} < 1 for family member {i}"
                )));
            }
            if i == best && (mho_mid - 1.0).abs() > LEMMA_REL_TOL + mho_w {
                return Err(CoreError::Inconsistency(format!(
                    "mho at the argmin is {mho_mid}, expected 1"
                )));
            }
            // Homogeneity: x^r * mho = A^(r - lambda).
            let lhs = x.powi(e.r as i64)?.mul(&mho);
            let rhs = e.a.powi((e.r - e.lambda) as i64)?;
            let (l, rr) = (lhs.to_f64(), rhs.to_f64());
            let scale = l.abs().max(rr.abs()).max(1e-300);
            if (l - rr).abs() / scale
                > LEMMA_REL_TOL + (width_f64(&lhs) + width_f64(&rhs)) / scale
            {
                return Err(CoreError::Inconsistency(format!(
                    "homogeneity identity fails for member {i}: {l} vs {rr}"
                )));
            }
        }
        checked = true;
    }

    Ok(ObstructionReport {
        x,
        argmin_index: best,
        family: evals,
        lemma_equality_checked: checked,
        refined_ties: refined,
    })
}

fn width_f64(iv: &RealInterval) -> f64 {
    crate::ratio::rational_to_f64(&iv.width())
}

/// `c * T1^lambda' * card(...) * H(G'; D'_0..D'_n)` (rank bound shape).
pub fn rank_bound(
    sub: &SubgroupDescriptor,
    t1: u64,
    s1: u64,
    d_primes: &[RealInterval],
    q: &PointSpec,
    w: &Subspace,
    c: &RealInterval,
) -> Result<RealInterval> {
    let (lambda, _r) = lambda_r(sub, w)?;
    let orbit = orbit_count(q, sub, s1)?;
    let hs = multidegree(sub)?.eval(d_primes)?;
    Ok(c
        .mul(&RealInterval::from_i64(t1 as i64).powi(lambda as i64)?)
        .mul(&RealInterval::exact(BigRational::from_integer(orbit)))
        .mul(&hs))
}

/// The bound of the rank proposition: `C0^(3/2) (S0/S) H(G; D'_0..D'_n)`.
pub fn rank_bound_proposition(
    group: &GroupDescriptor,
    c0: u64,
    s0: u64,
    s: u64,
    d_primes: &[RealInterval],
    prec: u32,
) -> Result<RealInterval> {
    let c = RealInterval::from_i64(c0 as i64).pow_rational(&BigRational::new(big(3), big(2)), prec)?;
    let ratio = RealInterval::exact(BigRational::new(big(s0 as i64), big(s as i64)));
    let hs = group.ambient_multidegree_eval(d_primes)?;
    Ok(c.mul(&ratio).mul(&hs).rounded(prec))
}

#[derive(Debug, Clone)]
pub struct NonnullReport {
    /// `S >= C0 deg(G_0 x G)`.
    pub s_condition: bool,
    /// `T~ (S+1) max D~_i >= C0 deg(G_0 x G) D~_0`.
    pub t_condition: bool,
    pub hypotheses_met: bool,
    /// `max_i floor(x D~_i) >= 1`, only claimed when the hypotheses hold.
    pub conclusion: Option<bool>,
    pub d_max: Option<BigInt>,
}

/// Non-nullity of the adjusted degrees `D_i = floor(x D~_i)`, `i >= 1`.
/// When the hypotheses hold but the conclusion fails, that contradicts
/// the lemma and an inconsistency error is raised.
pub fn nonnull_degrees_check(
    x: &RealInterval,
    params: &ObstructionParams,
    group: &GroupDescriptor,
) -> Result<NonnullReport> {
    group.validate()?;
    if params.d_tilde.len() < 2 {
        return Err(CoreError::Domain(
            "need degrees for at least one torus factor".into(),
        ));
    }
    let deg = BigRational::from_integer(group.deg_ambient() * big(params.c0 as i64));
    let s_condition = BigRational::from_integer(big(params.s as i64)) >= deg;
    let max_dt = params.d_tilde[1..]
        .iter()
        .fold(RealInterval::zero(), |acc, d| acc.max(d));
    let lhs = params
        .t_tilde
        .mul(&RealInterval::from_i64(params.s as i64 + 1))
        .mul(&max_dt);
    let rhs = params.d_tilde[0].scale(&deg);
    let t_condition = match lhs.cmp_strict(&rhs) {
        Some(std::cmp::Ordering::Less) => false,
        Some(_) => true,
        None => {
            return Err(CoreError::Inconclusive(
                "non-nullity hypothesis comparison is ambiguous; refine precision".into(),
            ))
        }
    };
    let hypotheses_met = s_condition && t_condition;
    if !hypotheses_met {
        return Ok(NonnullReport {
            s_condition,
            t_condition,
            hypotheses_met,
            conclusion: None,
            d_max: None,
        });
    }
    let xd = x.mul(&max_dt);
    let d_max = xd.floor()?;
    if d_max < BigInt::one() {
        return Err(CoreError::Inconsistency(
            "non-nullity hypotheses hold but max_i floor(x D~_i) = 0".into(),
        ));
    }
    Ok(NonnullReport {
        s_condition,
        t_condition,
        hypotheses_met,
        conclusion: Some(true),
        d_max: Some(d_max),
    })
}

/// Hypothesis (`T~` large enough) of the multiplicity lemma, with
/// `c9 = 8^g deg(G_0 x G) prod deg G_i`: returns `(holds, lhs, rhs)`.
pub fn multiplicity_hypothesis_check(
    t_tilde: &RealInterval,
    d_tilde: &[RealInterval],
    s: u64,
    group: &GroupDescriptor,
) -> Result<(bool, f64, f64)> {
    group.validate()?;
    if d_tilde.is_empty() {
        return Err(CoreError::Domain("empty degree list".into()));
    }
    let g = group.g();
    let mut c9 = BigInt::from(8u32).pow(g as u32) * group.deg_ambient();
    for f in &group.factors[1..] {
        c9 *= big(f.deg as i64);
    }
    let spow = if group.y == 1 {
        RealInterval::one()
    } else {
        RealInterval::from_i64(s as i64 + 1)
    };
    let first = d_tilde[0].div(&spow)?;
    let mut m = first.max(&RealInterval::one());
    for d in &d_tilde[1..] {
        m = m.max(d);
    }
    let rhs = m.scale(&BigRational::from_integer(c9));
    let holds = match t_tilde.cmp_strict(&rhs) {
        Some(std::cmp::Ordering::Less) => false,
        Some(_) => true,
        None => {
            return Err(CoreError::Inconclusive(
                "multiplicity hypothesis comparison is ambiguous".into(),
            ))
        }
    };
    Ok((holds, t_tilde.to_f64(), rhs.to_f64()))
}

/// All saturated subtorus lattices of `Z^n` that admit a generating set
/// with entries bounded by `entry_bound`, canonicalized by HNF.
pub fn enumerate_subtori(n: usize, entry_bound: i64) -> Vec<IMat> {
    let mut out: Vec<IMat> = vec![Vec::new()];
    if n == 0 {
        return out;
    }
    // Primitive direction vectors, sign-normalized and deduplicated.
    let mut dirs: Vec<Vec<BigInt>> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    let mut v = vec![-entry_bound; n];
    loop {
        if v.iter().any(|&x| x != 0) {
            let vb: Vec<BigInt> = v.iter().map(|&x| big(x)).collect();
            if let Ok(p) = crate::ratio::primitive_vector(&vb) {
                if p.iter().all(|x| x.abs() <= big(entry_bound)) && seen.insert(p.clone()) {
                    dirs.push(p);
                }
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                break;
            }
            v[i] += 1;
            if v[i] <= entry_bound {
                break;
            }
            v[i] = -entry_bound;
            i += 1;
        }
        if i == n {
            break;
        }
    }
    let mut current: Vec<IMat> = dirs.iter().map(|d| vec![d.clone()]).collect();
    out.extend(current.iter().cloned());
    for dim in 2..n {
        let mut next: Vec<IMat> = Vec::new();
        let mut keys = std::collections::BTreeSet::new();
        for base in &current {
            for d in &dirs {
                let mut rows = base.clone();
                rows.push(d.clone());
                if linalg::rank_int(&rows) != dim {
                    continue;
                }
                let h = linalg::hnf(&linalg::saturate(&rows, n));
                if keys.insert(h.clone()) {
                    next.push(h);
                }
            }
        }
        out.extend(next.iter().cloned());
        current = next;
    }
    out.push(linalg::identity(n));
    // Canonicalize everything and deduplicate once more.
    let mut keys = std::collections::BTreeSet::new();
    let mut canon: Vec<IMat> = Vec::new();
    for l in out {
        let h = linalg::hnf(&linalg::saturate(&l, n));
        if keys.insert(h.clone()) {
            canon.push(h);
        }
    }
    canon.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    canon
}

/// All connected subgroups of `G_a x G_m^n` with torus lattices from
/// `enumerate_subtori` and an optional `G_a` factor.
pub fn enumerate_subgroups(n: usize, entry_bound: i64) -> Result<Vec<SubgroupDescriptor>> {
    let tori = enumerate_subtori(n, entry_bound);
    let cols = n + 1;
    let mut out = Vec::with_capacity(tori.len() * 2);
    for t in &tori {
        for ga in [false, true] {
            let mut rows: IMat = Vec::new();
            if ga {
                let mut e0 = vec![BigInt::zero(); cols];
                e0[0] = BigInt::one();
                rows.push(e0);
            }
            for r in t {
                let mut row = vec![BigInt::zero(); cols];
                row[1..].clone_from_slice(r);
                rows.push(row);
            }
            out.push(SubgroupDescriptor::new(rows, cols)?);
        }
    }
    out.sort_by_key(|s| s.sort_key());
    out.dedup();
    Ok(out)
}

/// Members of `enumerate_subgroups` satisfying the tangent condition
/// against `w` (eligible for the obstruction minimum).
pub fn eligible_family(
    n: usize,
    entry_bound: i64,
    w: &Subspace,
) -> Result<Vec<SubgroupDescriptor>> {
    Ok(enumerate_subgroups(n, entry_bound)?
        .into_iter()
        .filter(|s| lambda_r(s, w).is_ok())
        .collect())
}

pub mod hilbert_oracle {
    //! Brute-force Hilbert counts for subgroup closures: the dimension of
    //! the degree-`D` piece of the coordinate ring is the number of
    //! distinct character sums `sum a_i col_i`, `0 <= a_i <= D_i` (times
    //! `D_0 + 1` when the subgroup contains `G_a`). Top multidegree
    //! coefficients are extracted by mixed finite differences at a
    //! stabilized base point; the degree comes from diagonal differences.

    use super::*;

    /// Distinct sums `sum_{i=1..n} a_i col_i` with `0 <= a_i <= d[i]`,
    /// `col_i` the columns of the torus lattice rows. Exact enumeration.
    pub fn count_torus_points(torus_rows: &IMat, d: &[u64]) -> u64 {
        let k = torus_rows.len();
        let n = d.len();
        if k == 0 {
            return 1;
        }
        debug_assert!(torus_rows.iter().all(|r| r.len() == n));
        let cols: Vec<Vec<i64>> = (0..n)
            .map(|j| {
                torus_rows
                    .iter()
                    .map(|r| r[j].to_i64().expect("oracle entries fit i64"))
                    .collect()
            })
            .collect();
        let mut set = std::collections::HashSet::with_capacity(4096);
        let mut a = vec![0u64; n];
        let mut pt = vec![0i64; k];
        loop {
            pt.iter_mut().for_each(|x| *x = 0);
            for (j, &aj) in a.iter().enumerate() {
                for (t, c) in pt.iter_mut().zip(cols[j].iter()) {
                    *t += aj as i64 * c;
                }
            }
            let mut key = 0i64;
            for &c in &pt {
                key = key.wrapping_mul(1_000_003).wrapping_add(c);
            }
            set.insert(key);
            let mut i = 0;
            loop {
                if i == n {
                    break;
                }
                a[i] += 1;
                if a[i] <= d[i] {
                    break;
                }
                a[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
        set.len() as u64
    }

    /// Full Hilbert count `H(closure; D_0..D_n)` of a subgroup closure.
    pub fn count_points(sub: &SubgroupDescriptor, d: &[u64]) -> u64 {
        let torus = reduced_torus_rows(sub);
        let base = count_torus_points(&torus, &d[1..]);
        if sub.contains_ga {
            (d[0] + 1) * base
        } else {
            base
        }
    }

    fn reduced_torus_rows(sub: &SubgroupDescriptor) -> IMat {
        let mut t = sub.torus_rows();
        if t.len() > 1 {
            crate::lll::lll_reduce(&mut t);
        }
        t
    }

    /// Top multidegree coefficients by stabilized mixed differences, in
    /// the same normalization as `multidegree` (with the `dim!` factor).
    pub fn multidegree_brute(sub: &SubgroupDescriptor) -> Result<MultiDegree> {
        let n = sub.ambient_cols - 1;
        let torus = reduced_torus_rows(sub);
        let k = torus.len();
        let dim = k + usize::from(sub.contains_ga);
        let dfac = factorial(dim);
        let mut coeffs = BTreeMap::new();
        if dim == 0 {
            coeffs.insert(Vec::new(), BigInt::one());
            return Ok(MultiDegree { dim, coeffs });
        }
        let mut torus_coeffs: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
        if k == 0 {
            torus_coeffs.insert(Vec::new(), 1);
        } else {
            let mut stabilized = false;
            for m in [8u64, 12, 16, 24, 32] {
                torus_coeffs.clear();
                let mut ok = true;
                for subset in (0..n).combinations(k) {
                    let g0 = mixed_difference(&torus, &subset, m, n);
                    let g1 = mixed_difference(&torus, &subset, m + 1, n);
                    if g0 != g1 || g0 < 0 {
                        ok = false;
                        break;
                    }
                    if g0 != 0 {
                        torus_coeffs.insert(subset, g0 as u64);
                    }
                }
                if ok {
                    stabilized = true;
                    break;
                }
            }
            if !stabilized {
                return Err(CoreError::Internal(
                    "brute-force multidegree did not stabilize".into(),
                ));
            }
        }
        for (subset, g) in torus_coeffs {
            let mut key: Vec<usize> = subset.iter().map(|&j| j + 1).collect();
            if sub.contains_ga {
                key.insert(0, 0);
            }
            coeffs.insert(key, big(g as i64) * &dfac);
        }
        Ok(MultiDegree { dim, coeffs })
    }

    /// Mixed difference of the torus count over the variables in `subset`,
    /// the other variables pinned at `m`.
    fn mixed_difference(torus: &IMat, subset: &[usize], m: u64, n: usize) -> i64 {
        let kk = subset.len();
        let mut acc: i64 = 0;
        for mask in 0u32..(1 << kk) {
            let mut d = vec![m; n];
            let mut sign = 1i64;
            for (bit, &j) in subset.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    d[j] = m + 1;
                } else {
                    sign = -sign;
                }
            }
            acc += sign * count_torus_points(torus, &d) as i64;
        }
        acc
    }

    /// Degree of the closure by diagonal differences: the `dim`-th finite
    /// difference of `a -> H(closure; a, ..., a)`, stabilized in the base.
    pub fn degree_brute(sub: &SubgroupDescriptor) -> Result<BigInt> {
        let n1 = sub.ambient_cols;
        let dim = sub.dim();
        if dim == 0 {
            return Ok(BigInt::one());
        }
        let diag = |a: u64| {
            let d = vec![a; n1];
            count_points(sub, &d) as i64
        };
        let diff = |base: u64| {
            let mut acc = 0i64;
            for j in 0..=(dim as u64) {
                let c = binom(dim as u64, j) as i64;
                let sign = if (dim as u64 - j) % 2 == 0 { 1 } else { -1 };
                acc += sign * c * diag(base + j);
            }
            acc
        };
        for m in [8u64, 12, 16, 24, 32] {
            let d0 = diff(m);
            let d1 = diff(m + 1);
            if d0 == d1 && d0 >= 0 {
                return Ok(big(d0));
            }
        }
        Err(CoreError::Internal("brute-force degree did not stabilize".into()))
    }

    fn binom(n: u64, k: u64) -> u64 {
        let mut v = 1u64;
        for i in 0..k {
            v = v * (n - i) / (i + 1);
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat2;

    fn toric_sub(rows: &[&[i64]], cols: usize) -> SubgroupDescriptor {
        SubgroupDescriptor::new(
            rows.iter().map(|r| r.iter().map(|&x| big(x)).collect()).collect(),
            cols,
        )
        .unwrap()
    }

    fn w_span(rows: &[&[i64]], m: usize) -> Subspace {
        Subspace::from_integer_rows(
            rows.iter().map(|r| r.iter().map(|&x| big(x)).collect()).collect(),
            m,
        )
        .unwrap()
    }

    #[test]
    fn multidegree_examples() {
        // Full G_m^2 inside G_a x G_m^2: lattice rows (0,1,0),(0,0,1):
        // H = 2 X_1 X_2, total 2.
        let s = toric_sub(&[&[0, 1, 0], &[0, 0, 1]], 3);
        let md = multidegree(&s).unwrap();
        assert_eq!(md.coeffs.len(), 1);
        assert_eq!(md.coeffs[&vec![1, 2]], big(2));
        assert_eq!(md.total(), big(2));

        // Curve {(t, t^2)}: lattice (0,1,2): H = X_1 + 2 X_2, degree 3.
        let c = toric_sub(&[&[0, 1, 2]], 3);
        let mc = multidegree(&c).unwrap();
        assert_eq!(mc.coeffs[&vec![1]], big(1));
        assert_eq!(mc.coeffs[&vec![2]], big(2));
        assert_eq!(mc.total(), big(3));

        // Trivial subgroup: H = 1.
        let t = SubgroupDescriptor::trivial(3);
        let mt = multidegree(&t).unwrap();
        assert_eq!(mt.coeffs[&Vec::new()], big(1));
    }

    #[test]
    fn multidegree_saturates() {
        // Non-saturated (0,2,4) describes the same subtorus as (0,1,2).
        let s = toric_sub(&[&[0, 2, 4]], 3);
        let md = multidegree(&s).unwrap();
        assert_eq!(md.coeffs[&vec![1]], big(1));
        assert_eq!(md.coeffs[&vec![2]], big(2));
    }

    #[test]
    fn rejects_graph_rows() {
        assert!(SubgroupDescriptor::new(vec![vec![big(1), big(1)]], 2).is_err());
    }

    #[test]
    fn orbit_count_examples() {
        let q = PointSpec::new(vec![rat2(2, 1), rat2(2, 1)]).unwrap();
        // G' = 0: distinct multiples, 6 for S = 5.
        let t = SubgroupDescriptor::trivial(3);
        assert_eq!(orbit_count(&q, &t, 5).unwrap(), big(6));
        // G' = G_a x diagonal, p = (2,2): the character (1,-1) kills all
        // multiples: count 1.
        let diag = toric_sub(&[&[1, 0, 0], &[0, 1, 1]], 3);
        assert_eq!(orbit_count(&q, &diag, 7).unwrap(), big(1));
        // Same subgroup, p = (2,3): only k = 0 collapses: count 8.
        let q23 = PointSpec::new(vec![rat2(2, 1), rat2(3, 1)]).unwrap();
        assert_eq!(orbit_count(&q23, &diag, 7).unwrap(), big(8));
        // Torsion order 2: p = (2,-2): character value -1.
        let qneg = PointSpec::new(vec![rat2(2, 1), rat2(-2, 1)]).unwrap();
        assert_eq!(orbit_count(&qneg, &diag, 7).unwrap(), big(2));
        assert!(some_multiple_in_subgroup(&qneg, &diag, 7).unwrap());
        assert!(!some_multiple_in_subgroup(&q23, &diag, 7).unwrap());
    }

    #[test]
    fn obstruction_example() {
        // G_0 x G_m, W = t_{G_0}, G' = 0, T~ = 4, S = 2, D~ = (2,2),
        // C0 = 2: A = 3/4, B = sqrt(3/4).
        let w = w_span(&[&[1, 0]], 2);
        let q = PointSpec::new(vec![rat2(2, 1)]).unwrap();
        let params = ObstructionParams {
            t_tilde: RealInterval::from_i64(4),
            c0: 2,
            d_tilde: vec![RealInterval::from_i64(2), RealInterval::from_i64(2)],
            s: 2,
        };
        let sub = SubgroupDescriptor::trivial(2);
        let (a, b) = obstruction_ab(&sub, &params, &q, &w, 80).unwrap();
        assert_eq!(a.as_exact().unwrap(), &rat2(3, 4));
        assert!((b.to_f64() - 0.75f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn obstruction_lambda_zero() {
        // W inside t_G': lambda' = 0 and B = A.
        let w = w_span(&[&[1, 0]], 2);
        let q = PointSpec::new(vec![rat2(2, 1)]).unwrap();
        let params = ObstructionParams {
            t_tilde: RealInterval::from_i64(3),
            c0: 2,
            d_tilde: vec![RealInterval::from_i64(2), RealInterval::from_i64(2)],
            s: 3,
        };
        let sub = toric_sub(&[&[1, 0]], 2);
        let (a, b) = obstruction_ab(&sub, &params, &q, &w, 80).unwrap();
        assert_eq!(a.as_exact(), b.as_exact());
        assert!(a.as_exact().is_some());
    }

    #[test]
    fn tangent_condition_rejects() {
        let w = w_span(&[&[1, 0]], 2);
        // G' = {0} x G_m: t_G' + W = everything.
        let sub = toric_sub(&[&[0, 1]], 2);
        assert!(lambda_r(&sub, &w).is_err());
    }

    #[test]
    fn choose_x_single() {
        let w = w_span(&[&[1, 0]], 2);
        let q = PointSpec::new(vec![rat2(2, 1)]).unwrap();
        let params = ObstructionParams {
            t_tilde: RealInterval::from_i64(4),
            c0: 2,
            d_tilde: vec![RealInterval::from_i64(2), RealInterval::from_i64(2)],
            s: 2,
        };
        let fam = vec![SubgroupDescriptor::trivial(2)];
        let rep = choose_x(&fam, &params, &q, &w, 80).unwrap();
        assert!((rep.x.to_f64() - 0.75f64.sqrt()).abs() < 1e-12);
        assert_eq!(rep.argmin_index, 0);
        assert!(rep.lemma_equality_checked);
    }

    #[test]
    fn choose_x_family_enumerated() {
        let w = w_span(&[&[1, 0, 0]], 3);
        let q = PointSpec::new(vec![rat2(2, 1), rat2(3, 1)]).unwrap();
        let fam = eligible_family(2, 2, &w).unwrap();
        assert!(fam.len() > 2);
        let params = ObstructionParams {
            t_tilde: RealInterval::exact(rat2(100, 1)),
            c0: 2,
            d_tilde: vec![
                RealInterval::from_i64(50),
                RealInterval::from_i64(20),
                RealInterval::from_i64(20),
            ],
            s: 8,
        };
        let rep = choose_x(&fam, &params, &q, &w, 80).unwrap();
        for e in &rep.family {
            assert!(rep.x.lo() <= e.b.hi());
        }
    }

    #[test]
    fn rank_bound_trivial_subgroup() {
        let w = w_span(&[&[1, 0]], 2);
        let q = PointSpec::new(vec![rat2(2, 1)]).unwrap();
        let sub = SubgroupDescriptor::trivial(2);
        let ones = vec![RealInterval::one(), RealInterval::one()];
        // lambda' = dim W = 1, orbit = S1 + 1, H = 1: bound = c T1 (S1+1).
        let b = rank_bound(&sub, 3, 4, &ones, &q, &w, &RealInterval::from_i64(2)).unwrap();
        assert_eq!(b.as_exact().unwrap(), &rat(2 * 3 * 5));
        // T1 = 1, S1 = 0: bound = c.
        let b0 = rank_bound(&sub, 1, 0, &ones, &q, &w, &RealInterval::one()).unwrap();
        assert_eq!(b0.as_exact().unwrap(), &rat(1));
    }

    #[test]
    fn rank_bound_proposition_example() {
        // C0 = 2, S0/S = 1/4, H(G; 2,2) = 8: bound = 2^(3/2) * 2.
        let g = GroupDescriptor::toric(1);
        let d = vec![RealInterval::from_i64(2), RealInterval::from_i64(2)];
        let b = rank_bound_proposition(&g, 2, 1, 4, &d, 96).unwrap();
        assert!((b.to_f64() - 2f64.powf(1.5) * 2.0).abs() < 1e-12);
    }

    #[test]
    fn nonnull_check_paths() {
        let group = GroupDescriptor::toric(1);
        let mk = |s: u64, t: i64, d0: i64, d1: i64| ObstructionParams {
            t_tilde: RealInterval::from_i64(t),
            c0: 2,
            d_tilde: vec![RealInterval::from_i64(d0), RealInterval::from_i64(d1)],
            s,
        };
        // Hypotheses fine, x D~_1 = 3.2: conclusion true, D_max = 3.
        let p = mk(8, 10, 4, 4);
        let x = RealInterval::exact(rat2(8, 10));
        let rep = nonnull_degrees_check(&x, &p, &group).unwrap();
        assert!(rep.hypotheses_met);
        assert_eq!(rep.d_max.unwrap(), big(3));
        // S too small: hypotheses unmet, no claim made.
        let rep2 = nonnull_degrees_check(&x, &mk(2, 10, 4, 4), &group).unwrap();
        assert!(!rep2.hypotheses_met);
        assert!(rep2.conclusion.is_none());
        // Hypotheses met but x D~ < 1: inconsistency.
        let x3 = RealInterval::exact(rat2(1, 8));
        assert!(matches!(
            nonnull_degrees_check(&x3, &mk(8, 100, 4, 4), &group),
            Err(CoreError::Inconsistency(_))
        ));
    }

    #[test]
    fn multiplicity_hypothesis_paths() {
        let group = GroupDescriptor::toric(2);
        let d = vec![
            RealInterval::from_i64(10),
            RealInterval::from_i64(3),
            RealInterval::from_i64(2),
        ];
        // c9 = 8^2 * 6 * 1 * 1 = 384; max{10/(S+1), 3, 2, 1} = 3 for S >= 3.
        let (h1, _, _) =
            multiplicity_hypothesis_check(&RealInterval::from_i64(2000), &d, 9, &group).unwrap();
        assert!(h1);
        let (h2, _, _) =
            multiplicity_hypothesis_check(&RealInterval::from_i64(100), &d, 9, &group).unwrap();
        assert!(!h2);
    }

    #[test]
    fn enumerate_counts() {
        let tori = enumerate_subtori(2, 2);
        assert!(tori.iter().any(|t| t.is_empty()));
        assert!(tori.iter().any(|t| t.len() == 2));
        let dirs: Vec<_> = tori.iter().filter(|t| t.len() == 1).collect();
        assert!(dirs.len() >= 8);
        let subs = enumerate_subgroups(2, 2).unwrap();
        assert_eq!(subs.len(), tori.len() * 2);
    }

    #[test]
    fn brute_force_agrees_on_small_cases() {
        for rows in [
            vec![vec![big(0), big(1), big(2)]],
            vec![vec![big(0), big(1), big(0)], vec![big(0), big(0), big(1)]],
            vec![vec![big(1), big(0), big(0)], vec![big(0), big(2), big(3)]],
        ] {
            let sub = SubgroupDescriptor::new(rows, 3).unwrap();
            let md = multidegree(&sub).unwrap();
            let brute = hilbert_oracle::multidegree_brute(&sub).unwrap();
            assert_eq!(md, brute, "multidegree mismatch for {:?}", sub.lattice);
            assert_eq!(md.total(), hilbert_oracle::degree_brute(&sub).unwrap());
        }
    }

    #[test]
    fn ambient_multidegree_with_abelian_factor() {
        // G_a x E (elliptic, dim 1... take an abelian-like dim-2 factor of
        // degree 6): deg = 3!/2! * 6 = 18 and H = 18 X_0 X_1^2.
        let g = GroupDescriptor {
            factors: vec![
                Factor { kind: FactorKind::Additive, dim: 1, rho: 1, deg: 1 },
                Factor { kind: FactorKind::AbelianLike, dim: 2, rho: 2, deg: 6 },
            ],
            y: 0,
        };
        g.validate().unwrap();
        assert_eq!(g.deg_ambient(), big(18));
        let v = g
            .ambient_multidegree_eval(&[RealInterval::from_i64(2), RealInterval::from_i64(3)])
            .unwrap();
        assert_eq!(v.as_exact().unwrap(), &rat(18 * 2 * 9));
    }

    #[test]
    fn monotone_ratio_on_nested_subgroups() {
        // For G~ inside the ambient group, each partial map
        // x_i -> H(G~; .. x_i ..)/H(G; .. x_i ..) is nonincreasing.
        let sub = toric_sub(&[&[0, 1, 1]], 3);
        let md = multidegree(&sub).unwrap();
        let full = SubgroupDescriptor::full(3).unwrap();
        let mf = multidegree(&full).unwrap();
        for coord in 0..3usize {
            let mut prev: Option<f64> = None;
            for v in [1i64, 2, 5, 11, 23] {
                let mut vals = vec![
                    RealInterval::from_i64(3),
                    RealInterval::from_i64(4),
                    RealInterval::from_i64(5),
                ];
                vals[coord] = RealInterval::from_i64(v);
                let ratio = md
                    .eval(&vals)
                    .unwrap()
                    .div(&mf.eval(&vals).unwrap())
                    .unwrap()
                    .to_f64();
                if let Some(p) = prev {
                    assert!(
                        ratio <= p + 1e-12,
                        "ratio increased along coordinate {coord}"
                    );
                }
                prev = Some(ratio);
            }
        }
    }
}
