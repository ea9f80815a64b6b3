//! Parameter-selection engines (archimedean and ultrametric), the
//! per-condition checkers, the bound evaluators `U0`/`U1`, the
//! simplified `(log b)^(1+(g+1)/t)` bound and the `e`-optimizer.
//!
//! Non-explicit constants are configuration values: `C0 = 2`,
//! `c5 = c6 = (g+1) C0^6` (the replacement made by the parameter
//! system), `c_thm = 1`, `chi_H` capped by a constant. `e`-type radii
//! are carried either as exact `e^k` (so `log e^k = k` stays exact and
//! floors are decided without ambiguity) or as rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{CoreError, Result};
use crate::groups::{
    choose_x, eligible_family, some_multiple_in_subgroup, GroupDescriptor, ObstructionParams,
    ObstructionReport, PointSpec, SubgroupDescriptor,
};
use crate::heights::Subspace;
use crate::linalg::IMat;
use crate::ratio::{big, rat};
use crate::real::{euler, exp_rational, ln_rational, RealInterval};

/// Radius parameter `e >= e`, exact in the `e^k` form.
#[derive(Debug, Clone)]
pub enum EParam {
    /// `e^k` for rational `k >= 1`.
    EulerPow(BigRational),
    /// An explicit rational value `>= e`.
    Rational(BigRational),
}

impl EParam {
    pub fn euler() -> Self {
        EParam::EulerPow(BigRational::one())
    }

    pub fn log_interval(&self, prec: u32) -> Result<RealInterval> {
        match self {
            EParam::EulerPow(k) => Ok(RealInterval::exact(k.clone())),
            EParam::Rational(q) => ln_rational(q, prec),
        }
    }

    pub fn value_interval(&self, prec: u32) -> Result<RealInterval> {
        match self {
            EParam::EulerPow(k) => exp_rational(k, prec),
            EParam::Rational(q) => Ok(RealInterval::exact(q.clone())),
        }
    }

    /// Guard `e >= e` (equivalently `log e >= 1`).
    pub fn validate(&self, prec: u32) -> Result<()> {
        let l = self.log_interval(prec)?;
        if l.hi() < &rat(1) {
            return Err(CoreError::Domain("radius parameter must be >= e".into()));
        }
        Ok(())
    }
}

/// The height data `s -> h(s p_i)` of one factor.
#[derive(Debug, Clone)]
pub enum HeightCurve {
    /// A rational point on a torus factor: `h(s p) = s log M(p)` exactly.
    Toric { point: BigRational },
    /// Linear growth `h(s p) = s * hp` with a supplied slope.
    Linear { hp: BigRational },
    /// Explicit table `h(s p)` for `s = 0 .. len-1`.
    Table { values: Vec<BigRational> },
}

impl HeightCurve {
    /// `max_{0 <= s <= s_max} h(s p)`.
    pub fn max_up_to(&self, s_max: u64, prec: u32) -> Result<RealInterval> {
        match self {
            HeightCurve::Toric { point } => {
                if point.is_zero() {
                    return Err(CoreError::Domain("toric point must be nonzero".into()));
                }
                let m = point.numer().abs().max(point.denom().abs());
                if m.is_one() {
                    return Ok(RealInterval::zero());
                }
                let l = ln_rational(&BigRational::from_integer(m), prec)?;
                Ok(l.scale(&rat(s_max as i64)))
            }
            HeightCurve::Linear { hp } => {
                if hp.is_negative() {
                    return Err(CoreError::Domain("height slope must be >= 0".into()));
                }
                Ok(RealInterval::exact(hp * rat(s_max as i64)))
            }
            HeightCurve::Table { values } => {
                if values.len() as u64 <= s_max {
                    return Err(CoreError::Domain(format!(
                        "height table has {} entries, need s <= {s_max}",
                        values.len()
                    )));
                }
                let m = values[..=s_max as usize]
                    .iter()
                    .cloned()
                    .fold(BigRational::zero(), |a, b| a.max(b));
                Ok(RealInterval::exact(m))
            }
        }
    }

    /// `h(p)` itself (the `s = 1` value).
    pub fn h_point(&self, prec: u32) -> Result<RealInterval> {
        self.max_up_to(1, prec)
    }
}

#[derive(Debug, Clone)]
pub enum C56Rule {
    /// `(g+1) C0^6`, the replacement used by the parameter system.
    Paper,
    Explicit(BigRational),
}

#[derive(Debug, Clone)]
pub struct Constants {
    pub c0: u64,
    pub c_thm: BigRational,
    pub c56: C56Rule,
    pub chi_cap: BigRational,
    /// Constant of the Matveev weight estimate used for `aleph` bounds.
    pub weight_c: BigRational,
    pub subgroup_lattice_bound: i64,
    pub prec: u32,
}

impl Default for Constants {
    fn default() -> Self {
        Self {
            c0: 2,
            c_thm: BigRational::one(),
            c56: C56Rule::Paper,
            chi_cap: BigRational::one(),
            weight_c: rat(10),
            subgroup_lattice_bound: 3,
            prec: crate::real::DEFAULT_PREC,
        }
    }
}

impl Constants {
    pub fn c56_value(&self, g: usize) -> BigRational {
        match &self.c56 {
            C56Rule::Paper => {
                rat(g as i64 + 1) * BigRational::from_integer(big(self.c0 as i64).pow(6))
            }
            C56Rule::Explicit(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub enum PlaceData {
    Arch {
        e_param: EParam,
        /// `||u_i||`, one per factor.
        u_norms: Vec<BigRational>,
    },
    Ultra {
        p: u64,
        r: BigRational,
        u_norm: BigRational,
    },
}

#[derive(Debug, Clone)]
pub struct BoundInput {
    pub group: GroupDescriptor,
    /// Field degree `D >= 1`.
    pub d_field: u64,
    /// Codimension `t` of `V` in `t_G`, `1 <= t <= g`.
    pub t: u64,
    /// Height of `V` (externally supplied real, as a rational).
    pub h_v: BigRational,
    /// One curve per factor `i = 1..n`.
    pub curves: Vec<HeightCurve>,
    pub place: PlaceData,
    pub constants: Constants,
    /// Exact torus point for subgroup machinery, when available.
    pub toric_point: Option<Vec<BigRational>>,
    /// Integer basis of `V` inside `Z^g` (toric scope), for `W = t_Ga + V`.
    pub v_lattice: Option<IMat>,
}

impl BoundInput {
    pub fn validate(&self) -> Result<()> {
        self.group.validate()?;
        let g = self.group.g() as u64;
        if self.d_field == 0 {
            return Err(CoreError::Domain("field degree must be >= 1".into()));
        }
        if self.t == 0 || self.t > g {
            return Err(CoreError::Domain("need 1 <= t <= g".into()));
        }
        if self.h_v.is_negative() {
            return Err(CoreError::Domain("h(V) must be >= 0".into()));
        }
        if self.curves.len() != self.group.n() {
            return Err(CoreError::Domain("need one height curve per factor".into()));
        }
        match &self.place {
            PlaceData::Arch { e_param, u_norms } => {
                e_param.validate(self.constants.prec)?;
                if u_norms.len() != self.group.n() {
                    return Err(CoreError::Domain("need one ||u_i|| per factor".into()));
                }
                if u_norms.iter().any(|u| u.is_negative()) {
                    return Err(CoreError::Domain("||u_i|| must be >= 0".into()));
                }
            }
            PlaceData::Ultra { p, r, u_norm } => {
                ultra_guards(*p, r, u_norm)?;
            }
        }
        Ok(())
    }
}

/// Exact ultrametric guards: `||u|| < r_p^2` and `r in ]1, r_p^2/||u||[`,
/// i.e. `||u||^(p-1) < p^-2` and `(r ||u||)^(p-1) < p^-2`.
pub fn ultra_guards(p: u64, r: &BigRational, u_norm: &BigRational) -> Result<()> {
    if !crate::heights::is_prime(p) {
        return Err(CoreError::Domain(format!("{p} is not prime")));
    }
    if !u_norm.is_positive() {
        return Err(CoreError::Domain("||u|| must be positive".into()));
    }
    let pm2 = BigRational::new(BigInt::one(), big(p as i64).pow(2));
    let e = (p - 1) as i32;
    if u_norm.pow(e) >= pm2 {
        return Err(CoreError::Precondition(
            "guard ||u|| < r_p^2 fails (strict inequality required)".into(),
        ));
    }
    if r <= &BigRational::one() {
        return Err(CoreError::Precondition("guard r > 1 fails (open interval)".into()));
    }
    if (r * u_norm).pow(e) >= pm2 {
        return Err(CoreError::Precondition(
            "guard r < r_p^2/||u|| fails (open interval)".into(),
        ));
    }
    Ok(())
}

/// Bridging factor `1 + log(r_p^-1)/log r = 1 + log(p)/((p-1) log r)`,
/// with the majorant shape `log(r+1)/log(r)` it is compared against.
pub fn ultra_bridge(p: u64, r: &BigRational, prec: u32) -> Result<(RealInterval, RealInterval)> {
    let logp = ln_rational(&rat(p as i64), prec)?;
    let logr = ln_rational(r, prec)?;
    let bridge = RealInterval::one().add(
        &logp
            .scale(&BigRational::new(BigInt::one(), big(p as i64 - 1)))
            .div(&logr)?,
    );
    let shape = ln_rational(&(r + BigRational::one()), prec)?.div(&logr)?;
    Ok((bridge, shape))
}

#[derive(Debug, Clone)]
pub struct ParameterSet {
    pub a_param: BigInt,
    pub s0: u64,
    pub s: u64,
    pub u: RealInterval,
    pub t_tilde: RealInterval,
    pub t_int: BigInt,
    /// `D~_0 .. D~_n`.
    pub d_tilde: Vec<RealInterval>,
    pub d0_flat: BigInt,
    pub x: RealInterval,
    /// `D_0 .. D_n` (`D_i = floor(x D~_i)`).
    pub d: Vec<BigInt>,
    pub obstruction: Option<ObstructionReport>,
    pub warnings: Vec<String>,
}

fn to_u64(v: &BigInt, what: &str) -> Result<u64> {
    v.to_u64()
        .ok_or_else(|| CoreError::Domain(format!("{what} out of range: {v}")))
}

/// Least integer >= the enclosed value, retrying at higher precision via
/// the supplied recompute closure.
fn ceil_refined(
    mut compute: impl FnMut(u32) -> Result<RealInterval>,
    prec: u32,
) -> Result<BigInt> {
    let mut p = prec;
    loop {
        match compute(p)?.ceil() {
            Ok(v) => return Ok(v),
            Err(CoreError::Inconclusive(_)) if p < 4096 => p *= 2,
            Err(e) => return Err(e),
        }
    }
}

fn floor_refined(
    mut compute: impl FnMut(u32) -> Result<RealInterval>,
    prec: u32,
) -> Result<BigInt> {
    let mut p = prec;
    loop {
        match compute(p)?.floor() {
            Ok(v) => return Ok(v),
            Err(CoreError::Inconclusive(_)) if p < 4096 => p *= 2,
            Err(e) => return Err(e),
        }
    }
}

/// Cap for the adaptive-precision escalation of the parameter engines.
const SNAP_PREC: u32 = 2048;

/// Floor of an enclosure; an ambiguity surviving `SNAP_PREC` bits means
/// the value sits within `2^-1000` of an integer (degenerate parameter
/// coincidences can make it exactly an integer). In that case the integer
/// is taken and a warning recorded rather than refining forever.
fn floor_with_snap(
    iv: &RealInterval,
    prec: u32,
    warnings: &mut Vec<String>,
    what: &str,
) -> Result<BigInt> {
    match iv.floor() {
        Ok(v) => Ok(v),
        Err(e @ CoreError::Inconclusive(_)) => {
            if prec < SNAP_PREC {
                return Err(e);
            }
            let fl = iv.lo().floor().to_integer();
            let fh = iv.hi().floor().to_integer();
            let tiny = BigRational::new(BigInt::one(), BigInt::one() << (prec as usize / 2));
            if &fl + BigInt::one() == fh && iv.hi() - iv.lo() < tiny {
                warnings.push(format!(
                    "{what} lies within 2^-{} of the integer {fh}; snapped to it",
                    prec / 2
                ));
                Ok(fh)
            } else {
                Err(CoreError::Inconclusive(format!(
                    "{what} floor unresolved at {prec} bits"
                )))
            }
        }
        Err(e) => Err(e),
    }
}

/// The common body of Theorem-style `U` expressions:
/// `(a log_e)(a^y + (D/log_e) log(e + D/log_e))^(1/t)
///  * prod_i (1 + (D maxh_i + arch_i)/(a log_e))^(g_i/t)`.
/// `arch_i` is `(e a ||u_i||)^rho_i` at archimedean places, absent
/// otherwise. The caller scales by any prefactor.
#[allow(clippy::too_many_arguments)]
fn u_core(
    group: &GroupDescriptor,
    d_field: u64,
    t: u64,
    a: &BigInt,
    log_radius: &RealInterval,
    maxh: &[RealInterval],
    arch_terms: Option<&[RealInterval]>,
    prec: u32,
) -> Result<RealInterval> {
    let a_iv = RealInterval::exact(BigRational::from_integer(a.clone()));
    let d_iv = RealInterval::from_i64(d_field as i64);
    let a_log = a_iv.mul(log_radius);
    let e = euler(prec);
    let d_over = d_iv.div(log_radius)?;
    let middle = {
        let ay = if group.y == 1 { a_iv.clone() } else { RealInterval::one() };
        let inner = e.add(&d_over).ln(prec)?;
        ay.add(&d_over.mul(&inner))
    };
    let mut out = a_log.mul(&middle.pow_rational(
        &BigRational::new(BigInt::one(), big(t as i64)),
        prec,
    )?);
    for (i, f) in group.factors[1..].iter().enumerate() {
        let mut num = d_iv.mul(&maxh[i]);
        if let Some(at) = arch_terms {
            num = num.add(&at[i]);
        }
        let term = RealInterval::one().add(&num.div(&a_log)?);
        let gi_t = BigRational::new(big(f.dim as i64), big(t as i64));
        out = out.mul(&term.pow_rational(&gi_t, prec)?);
    }
    Ok(out.rounded(prec))
}

/// `(e a ||u_i||)^rho_i` per factor.
fn arch_terms(
    group: &GroupDescriptor,
    e_value: &RealInterval,
    a: &BigInt,
    u_norms: &[BigRational],
) -> Result<Vec<RealInterval>> {
    let a_iv = RealInterval::exact(BigRational::from_integer(a.clone()));
    group.factors[1..]
        .iter()
        .zip(u_norms.iter())
        .map(|(f, u)| e_value.mul(&a_iv).scale(u).powi(f.rho as i64))
        .collect()
}

/// `U_0` of the archimedean theorem (no prefactor): needs `a` and the
/// theorem-level constant `c5` for the height max range.
pub fn eval_u0(input: &BoundInput, a: &BigInt, c5: &BigRational) -> Result<RealInterval> {
    input.validate()?;
    let prec = input.constants.prec;
    let PlaceData::Arch { e_param, u_norms } = &input.place else {
        return Err(CoreError::Precondition("eval_u0 needs an archimedean place".into()));
    };
    let log_e = e_param.log_interval(prec)?;
    // a >= D max{1,hV}/log e.
    let need = RealInterval::exact(
        rat(input.d_field as i64) * input.h_v.clone().max(BigRational::one()),
    )
    .div(&log_e)?;
    if RealInterval::exact(BigRational::from_integer(a.clone()))
        .cmp_strict(&need)
        == Some(std::cmp::Ordering::Less)
    {
        return Err(CoreError::Precondition(
            "a must be at least D max{1,h(V)}/log e".into(),
        ));
    }
    let s_heights = floor_refined(
        |_p| Ok(RealInterval::exact(c5 * BigRational::from_integer(a.clone()))),
        prec,
    )?;
    let s_heights = to_u64(&s_heights, "c5 * a")?;
    let maxh: Vec<RealInterval> = input
        .curves
        .iter()
        .map(|c| c.max_up_to(s_heights, prec))
        .collect::<Result<_>>()?;
    let e_value = e_param.value_interval(prec)?;
    let at = arch_terms(&input.group, &e_value, a, u_norms)?;
    u_core(&input.group, input.d_field, input.t, a, &log_e, &maxh, Some(&at), prec)
}

/// `U_1` of the ultrametric theorem: `(a log(1+r))(...)^(1/t) prod (...)`.
pub fn eval_u1(input: &BoundInput, a: &BigInt, c6: &BigRational) -> Result<RealInterval> {
    input.validate()?;
    let prec = input.constants.prec;
    let PlaceData::Ultra { r, .. } = &input.place else {
        return Err(CoreError::Precondition("eval_u1 needs an ultrametric place".into()));
    };
    let log_r = ln_rational(r, prec)?;
    let s_heights = floor_refined(
        |_p| Ok(RealInterval::exact(c6 * BigRational::from_integer(a.clone()))),
        prec,
    )?;
    let s_heights = to_u64(&s_heights, "c6 * a")?;
    let maxh: Vec<RealInterval> = input
        .curves
        .iter()
        .map(|c| c.max_up_to(s_heights, prec))
        .collect::<Result<_>>()?;
    // Same core with log r, then swap the prefactor a*log(r) -> a*log(1+r).
    let core = u_core(&input.group, input.d_field, input.t, a, &log_r, &maxh, None, prec)?;
    let log_1r = ln_rational(&(r + BigRational::one()), prec)?;
    core.mul(&log_1r).div(&log_r).map(|v| v.rounded(prec))
}

/// `-c (log b)^(1+(g+1)/t) max{1, hp}^(g/t)`.
pub fn eval_simple_bound(
    g: u64,
    t: u64,
    b: &EParam,
    hp: &BigRational,
    c: &BigRational,
    prec: u32,
) -> Result<RealInterval> {
    if t == 0 || t > g {
        return Err(CoreError::Domain("need 1 <= t <= g".into()));
    }
    b.validate(prec)
        .map_err(|_| CoreError::Domain("b must be >= e".into()))?;
    let log_b = b.log_interval(prec)?;
    let e1 = BigRational::one() + BigRational::new(big(g as i64 + 1), big(t as i64));
    let term1 = log_b.pow_rational(&e1, prec)?;
    let hmax = RealInterval::exact(hp.clone().max(BigRational::one()));
    let e2 = BigRational::new(big(g as i64), big(t as i64));
    let term2 = hmax.pow_rational(&e2, prec)?;
    Ok(term1.mul(&term2).scale(c).neg().rounded(prec))
}

/// Builds `W = t_{G_a} + V` as a subspace of `Q^(1+n)` from an integer
/// basis of `V` in `Z^n`.
pub fn w_from_v_lattice(v_lattice: &IMat, n: usize) -> Result<Subspace> {
    let mut rows: IMat = vec![{
        let mut e0 = vec![BigInt::zero(); n + 1];
        e0[0] = BigInt::one();
        e0
    }];
    for r in v_lattice {
        if r.len() != n {
            return Err(CoreError::Domain("V-lattice row has wrong length".into()));
        }
        let mut row = vec![BigInt::zero(); n + 1];
        row[1..].clone_from_slice(r);
        rows.push(row);
    }
    Subspace::from_integer_rows(rows, n + 1)
}

fn select_x(
    input: &BoundInput,
    t_tilde: &RealInterval,
    d_tilde: &[RealInterval],
    s: u64,
    warnings: &mut Vec<String>,
    prec: u32,
) -> Result<(RealInterval, Option<ObstructionReport>)> {
    let n = input.group.n();
    let (Some(point), Some(vlat), true) = (
        input.toric_point.as_ref(),
        input.v_lattice.as_ref(),
        input.group.is_toric(),
    ) else {
        warnings.push(
            "x-selection skipped (no toric point/V-lattice or non-toric factors); x = 1"
                .into(),
        );
        return Ok((RealInterval::one(), None));
    };
    let q = PointSpec::new(point.clone())?;
    let w = w_from_v_lattice(vlat, n)?;
    let family = eligible_family(n, input.constants.subgroup_lattice_bound, &w)?;
    if family.is_empty() {
        warnings.push("empty eligible subgroup family; x = 1".into());
        return Ok((RealInterval::one(), None));
    }
    let params = ObstructionParams {
        t_tilde: t_tilde.clone(),
        c0: input.constants.c0,
        d_tilde: d_tilde.to_vec(),
        s,
    };
    let report = choose_x(&family, &params, &q, &w, prec)?;
    Ok((report.x.clone(), Some(report)))
}

/// Torsion guards of the theorems: `s p` must avoid every enumerated
/// subgroup `G'` of `G` with `t_G' + V != t_G`, for `1 <= s <= s_max`.
/// Returns the violating subgroups (empty = guards hold); pushes a
/// warning instead when the data is not toric.
pub fn torsion_guards(
    input: &BoundInput,
    s_max: u64,
    warnings: &mut Vec<String>,
) -> Result<Vec<SubgroupDescriptor>> {
    let n = input.group.n();
    let (Some(point), Some(vlat), true) = (
        input.toric_point.as_ref(),
        input.v_lattice.as_ref(),
        input.group.is_toric(),
    ) else {
        warnings.push("torsion guards unchecked (non-toric data)".into());
        return Ok(Vec::new());
    };
    // Work on G itself: subgroups of G_m^n, i.e. descriptors without G_a.
    // Embed into the 1+n column convention with a leading zero column and
    // require t_G' + V != t_G by ranks in Q^n.
    let v_sub = Subspace::from_integer_rows(vlat.clone(), n)?;
    let q = PointSpec::new(point.clone())?;
    let mut out = Vec::new();
    for torus in crate::groups::enumerate_subtori(n, input.constants.subgroup_lattice_bound) {
        let dim = torus.len();
        if dim == n {
            continue; // G' = G never satisfies the tangent condition
        }
        let stacked = crate::linalg::stack(&v_sub.basis, &torus);
        if crate::linalg::rank_int(&stacked) == n {
            continue; // t_G' + V = t_G: not constrained by the theorems
        }
        // Membership of s p in the subtorus via the G_a x G_m^n machinery:
        // G_a x T' contains (s, p^s) iff p^s lies in T'.
        let mut rows: IMat = vec![{
            let mut e0 = vec![BigInt::zero(); n + 1];
            e0[0] = BigInt::one();
            e0
        }];
        for r in &torus {
            let mut row = vec![BigInt::zero(); n + 1];
            row[1..].clone_from_slice(r);
            rows.push(row);
        }
        let sub = SubgroupDescriptor::new(rows, n + 1)?;
        if some_multiple_in_subgroup(&q, &sub, s_max)? {
            out.push(sub);
        }
    }
    Ok(out)
}

fn compute_params(
    input: &BoundInput,
    log_radius: &RealInterval,
    a_param: BigInt,
    u_prefactor_core: impl Fn(&BigInt, &[RealInterval], u32) -> Result<RealInterval>,
    degree_denominators: impl Fn(&[RealInterval], &RealInterval, u32) -> Result<Vec<RealInterval>>,
    prec: u32,
) -> Result<ParameterSet> {
    let c0 = input.constants.c0;
    let c0_big = big(c0 as i64);
    let g = input.group.g();
    let mut warnings = Vec::new();

    let s0 = to_u64(&(c0_big.pow(3) * &a_param), "S0")?;
    let s = to_u64(&(c0_big.pow(6) * &a_param), "S")?;
    let s_heights = (g as u64 + 1) * s;
    let maxh: Vec<RealInterval> = input
        .curves
        .iter()
        .map(|c| c.max_up_to(s_heights, prec))
        .collect::<Result<_>>()?;

    // U with the C0^(25 g) prefactor.
    let u_raw = u_prefactor_core(&a_param, &maxh, prec)?;
    let prefactor = BigRational::from_integer(c0_big.pow(25 * g as u32));
    let u = u_raw.scale(&prefactor).rounded(prec);

    // T~ = C0 U / (S0 log_radius), T = floor(T~).
    let s0_log = log_radius.scale(&rat(s0 as i64));
    let t_tilde = u.scale(&rat(c0 as i64)).div(&s0_log)?.rounded(prec);
    let t_int = floor_with_snap(&t_tilde, prec, &mut warnings, "T~")?;
    if t_int < BigInt::one() {
        return Err(CoreError::Internal("T = floor(T~) must be >= 1".into()));
    }

    // Degrees D~_i and D~_0, D0_flat.
    let denoms = degree_denominators(&maxh, &u, prec)?;
    debug_assert_eq!(denoms.len(), input.group.n() + 1);
    let mut d_tilde: Vec<RealInterval> = Vec::with_capacity(denoms.len());
    for den in &denoms {
        d_tilde.push(u.div(den)?.rounded(prec));
    }
    let d0_flat = floor_with_snap(
        &s0_log.scale(&BigRational::new(
            BigInt::one(),
            big(input.d_field as i64) * c0_big.pow(3),
        )),
        prec,
        &mut warnings,
        "D0_flat",
    )?;
    if d0_flat.is_zero() {
        warnings.push("D0_flat = 0: Matveev family degenerates to monomials".into());
    }

    // x via the obstruction machinery.
    let (x, obstruction) = select_x(input, &t_tilde, &d_tilde, s, &mut warnings, prec)?;

    let mut d: Vec<BigInt> = Vec::with_capacity(d_tilde.len());
    for (i, dt) in d_tilde.iter().enumerate() {
        d.push(floor_with_snap(
            &x.mul(dt),
            prec,
            &mut warnings,
            &format!("x D~_{i}"),
        )?);
    }
    if d[0].is_zero() {
        warnings.push("D_0 = 0 (flagged; the construction tolerates it)".into());
    }

    Ok(ParameterSet {
        a_param,
        s0,
        s,
        u,
        t_tilde,
        t_int,
        d_tilde,
        d0_flat,
        x,
        d,
        obstruction,
        warnings,
    })
}

/// Archimedean parameter system. Floors of huge parameters need absolute
/// precision below one, so the computation retries at doubled precision
/// until every integer part is unambiguous.
pub fn choose_params_arch(input: &BoundInput) -> Result<ParameterSet> {
    retry_precision(input.constants.prec, |p| choose_params_arch_at(input, p))
}

fn retry_precision<T>(
    base: u32,
    mut run: impl FnMut(u32) -> Result<T>,
) -> Result<T> {
    let mut prec = base.max(crate::real::DEFAULT_PREC);
    loop {
        match run(prec) {
            Err(CoreError::Inconclusive(_)) if prec <= SNAP_PREC => prec *= 2,
            other => return other,
        }
    }
}

fn choose_params_arch_at(input: &BoundInput, prec: u32) -> Result<ParameterSet> {
    input.validate()?;
    let PlaceData::Arch { e_param, u_norms } = &input.place else {
        return Err(CoreError::Precondition("archimedean place required".into()));
    };
    let log_e = e_param.log_interval(prec)?;
    let e_value = e_param.value_interval(prec)?;
    let d_field = input.d_field;

    // a = least integer >= D max{1, h(V)}/log e.
    let a_param = ceil_refined(
        |p| {
            let le = e_param.log_interval(p)?;
            RealInterval::exact(
                rat(d_field as i64) * input.h_v.clone().max(BigRational::one()),
            )
            .div(&le)
        },
        prec,
    )?;

    let group = input.group.clone();
    let t = input.t;
    let e_for_terms = e_value.clone();
    let u_norms_c = u_norms.clone();
    let log_e_c = log_e.clone();
    let core = move |a: &BigInt, maxh: &[RealInterval], p: u32| {
        let at = arch_terms(&group, &e_for_terms, a, &u_norms_c)?;
        u_core(&group, d_field, t, a, &log_e_c, maxh, Some(&at), p)
    };

    let c0_big = big(input.constants.c0 as i64);
    let group2 = input.group.clone();
    let u_norms2 = u_norms.clone();
    let log_e2 = log_e.clone();
    let e_value2 = e_value.clone();
    let s0 = to_u64(&(c0_big.pow(3) * &a_param), "S0")?;
    let s = to_u64(&(c0_big.pow(6) * &a_param), "S")?;
    let denominators = move |maxh: &[RealInterval], _u: &RealInterval, p: u32| {
        // D~_i = U/(C0^2 (D maxh_i + (e S ||u_i||)^rho_i + S0 log e)), i >= 1;
        // D~_0 = U/(C0^4 (D log(e + D/log e) + S0^y log e)).
        let c0sq = BigRational::from_integer(c0_big.pow(2));
        let c0q = BigRational::from_integer(c0_big.pow(4));
        let s0_log = log_e2.scale(&rat(s0 as i64));
        let mut out = Vec::with_capacity(maxh.len() + 1);
        let e = euler(p);
        let d_over = RealInterval::from_i64(d_field as i64).div(&log_e2)?;
        let inner = e.add(&d_over).ln(p)?;
        let d0_den = {
            let first = inner.scale(&rat(d_field as i64));
            let second = if group2.y == 1 {
                s0_log.clone()
            } else {
                log_e2.clone()
            };
            first.add(&second).scale(&c0q)
        };
        out.push(d0_den);
        for (i, f) in group2.factors[1..].iter().enumerate() {
            let es_u = e_value2
                .scale(&rat(s as i64))
                .scale(&u_norms2[i])
                .powi(f.rho as i64)?;
            let den = RealInterval::from_i64(d_field as i64)
                .mul(&maxh[i])
                .add(&es_u)
                .add(&s0_log)
                .scale(&c0sq);
            out.push(den);
        }
        Ok(out)
    };

    compute_params(input, &log_e, a_param, core, denominators, prec)
}

/// Ultrametric parameter system (`log r` replaces `log e`; no `||u||`
/// terms).
pub fn choose_params_ultra(input: &BoundInput) -> Result<ParameterSet> {
    retry_precision(input.constants.prec, |p| choose_params_ultra_at(input, p))
}

fn choose_params_ultra_at(input: &BoundInput, prec: u32) -> Result<ParameterSet> {
    input.validate()?;
    let PlaceData::Ultra { r, .. } = &input.place else {
        return Err(CoreError::Precondition("ultrametric place required".into()));
    };
    let log_r = ln_rational(r, prec)?;
    let d_field = input.d_field;

    // a >= (D max{1, h(V)} + log+ (1/log r))/log r.
    let r_c = r.clone();
    let hv = input.h_v.clone();
    let a_param = ceil_refined(
        |p| {
            let lr = ln_rational(&r_c, p)?;
            let inv = lr.recip()?;
            let logplus = if inv.hi() <= &rat(1) {
                RealInterval::zero()
            } else {
                inv.max(&RealInterval::one()).ln(p)?
            };
            RealInterval::exact(rat(d_field as i64) * hv.clone().max(BigRational::one()))
                .add(&logplus)
                .div(&lr)
        },
        prec,
    )?;

    let group = input.group.clone();
    let t = input.t;
    let log_r_c = log_r.clone();
    let core = move |a: &BigInt, maxh: &[RealInterval], p: u32| {
        u_core(&group, d_field, t, a, &log_r_c, maxh, None, p)
    };

    let c0_big = big(input.constants.c0 as i64);
    let group2 = input.group.clone();
    let log_r2 = log_r.clone();
    let s0 = to_u64(&(c0_big.pow(3) * &a_param), "S0")?;
    let denominators = move |maxh: &[RealInterval], _u: &RealInterval, p: u32| {
        let c0sq = BigRational::from_integer(c0_big.pow(2));
        let c0q = BigRational::from_integer(c0_big.pow(4));
        let s0_log = log_r2.scale(&rat(s0 as i64));
        let mut out = Vec::with_capacity(maxh.len() + 1);
        let e = euler(p);
        let d_over = RealInterval::from_i64(d_field as i64).div(&log_r2)?;
        let inner = e.add(&d_over).ln(p)?;
        let d0_den = {
            let first = inner.scale(&rat(d_field as i64));
            let second = if group2.y == 1 {
                s0_log.clone()
            } else {
                log_r2.clone()
            };
            first.add(&second).scale(&c0q)
        };
        out.push(d0_den);
        for (i, _f) in group2.factors[1..].iter().enumerate() {
            let den = RealInterval::from_i64(d_field as i64)
                .mul(&maxh[i])
                .add(&s0_log)
                .scale(&c0sq);
            out.push(den);
        }
        Ok(out)
    };

    compute_params(input, &log_r, a_param, core, denominators, prec)
}

#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub id: &'static str,
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs - rhs` oriented so that nonnegative means satisfied.
    pub slack: f64,
}

fn ge_condition(id: &'static str, lhs: &RealInterval, rhs: &RealInterval) -> ConditionReport {
    // Certain whenever the enclosures separate (or both are exact);
    // enclosures of width ~2^-80 that still straddle are decided by
    // midpoints, which only matters for razor-thin ties.
    let holds = match lhs.cmp_strict(rhs) {
        Some(std::cmp::Ordering::Less) => false,
        Some(_) => true,
        None => lhs.to_f64() >= rhs.to_f64(),
    };
    let l = lhs.to_f64();
    let r = rhs.to_f64();
    ConditionReport {
        id,
        holds,
        lhs: l,
        rhs: r,
        slack: l - r,
    }
}

fn le_condition(id: &'static str, lhs: &RealInterval, rhs: &RealInterval) -> ConditionReport {
    let holds = match lhs.cmp_strict(rhs) {
        Some(std::cmp::Ordering::Greater) => false,
        Some(_) => true,
        None => lhs.to_f64() <= rhs.to_f64(),
    };
    let l = lhs.to_f64();
    let r = rhs.to_f64();
    ConditionReport {
        id,
        holds,
        lhs: l,
        rhs: r,
        slack: r - l,
    }
}

/// The archimedean condition battery (each entry is `id, holds, slack`).
pub fn check_conditions_arch(
    ps: &ParameterSet,
    input: &BoundInput,
    aleph_hi: &RealInterval,
) -> Result<Vec<ConditionReport>> {
    let prec = input.constants.prec;
    let PlaceData::Arch { e_param, u_norms } = &input.place else {
        return Err(CoreError::Precondition("archimedean place required".into()));
    };
    let log_e = e_param.log_interval(prec)?;
    let e_value = e_param.value_interval(prec)?;
    let c0 = input.constants.c0 as i64;
    let c0_sq = RealInterval::exact(BigRational::from_integer(big(c0).pow(2)));
    let g = input.group.g() as i64;
    let mut out = Vec::new();

    out.push(ge_condition("arch-1a-Ttilde", &ps.t_tilde, &c0_sq));
    out.push(ge_condition(
        "arch-1b-S-ratio",
        &RealInterval::exact(BigRational::new(big(ps.s as i64), big(ps.s0 as i64))),
        &c0_sq,
    ));
    out.push(ge_condition(
        "arch-1c-S0",
        &RealInterval::from_i64(ps.s0 as i64),
        &c0_sq,
    ));

    // (2) T~ >= C0 max{D~_0/(S+1)^(1-y), D~_1, ..}.
    let spow = if input.group.y == 1 {
        RealInterval::one()
    } else {
        RealInterval::from_i64(ps.s as i64 + 1)
    };
    let mut m = ps.d_tilde[0].div(&spow)?;
    for dt in &ps.d_tilde[1..] {
        m = m.max(dt);
    }
    out.push(ge_condition(
        "arch-2-Ttilde-degrees",
        &ps.t_tilde,
        &m.scale(&rat(c0)),
    ));

    // (3) T~^(g-t+1) (S+1) <= C0 D~_0 prod D~_i^{g_i}.
    let lhs3 = ps
        .t_tilde
        .powi(g - input.t as i64 + 1)?
        .mul(&RealInterval::from_i64(ps.s as i64 + 1));
    let mut rhs3 = ps.d_tilde[0].scale(&rat(c0));
    for (f, dt) in input.group.factors[1..].iter().zip(&ps.d_tilde[1..]) {
        rhs3 = rhs3.mul(&dt.powi(f.dim as i64)?);
    }
    out.push(le_condition("arch-3-siegel-room", &lhs3, &rhs3));

    // (4) U >= C0^(3/2) D aleph.
    let c032 = RealInterval::from_i64(c0).pow_rational(&BigRational::new(big(3), big(2)), prec)?;
    out.push(ge_condition(
        "arch-4-weight",
        &ps.u,
        &c032.mul(&aleph_hi.scale(&rat(input.d_field as i64))),
    ));

    // (5) S0 log e >= C0^3 D max{1, h(V)}.
    let lhs5 = log_e.scale(&rat(ps.s0 as i64));
    let rhs5 = RealInterval::exact(
        BigRational::from_integer(big(c0).pow(3))
            * rat(input.d_field as i64)
            * input.h_v.clone().max(BigRational::one()),
    );
    out.push(ge_condition("arch-5-a-defining", &lhs5, &rhs5));

    // (6) U >= C0^2 D_i (D maxh_i + (e S ||u_i||)^rho_i), per factor.
    let s_heights = (input.group.g() as u64 + 1) * ps.s;
    for (i, f) in input.group.factors[1..].iter().enumerate() {
        let maxh = input.curves[i].max_up_to(s_heights, prec)?;
        let es_u = e_value
            .scale(&rat(ps.s as i64))
            .scale(&u_norms[i])
            .powi(f.rho as i64)?;
        let rhs = RealInterval::exact(
            BigRational::from_integer(big(c0).pow(2) * ps.d[i + 1].clone()),
        )
        .mul(&maxh.scale(&rat(input.d_field as i64)).add(&es_u));
        out.push(ge_condition(
            match i {
                0 => "arch-6-factor-1",
                1 => "arch-6-factor-2",
                _ => "arch-6-factor-n",
            },
            &ps.u,
            &rhs,
        ));
    }

    // Auxiliary: U >= C0^2 D log(D_0 S).
    let d0s = (&ps.d[0] * big(ps.s as i64)).max(BigInt::one());
    let aux_rhs = ln_rational(&BigRational::from_integer(d0s), prec)?
        .scale(&(BigRational::from_integer(big(c0).pow(2)) * rat(input.d_field as i64)));
    out.push(ge_condition("arch-aux-logD0S", &ps.u, &aux_rhs));

    Ok(out)
}

/// The ultrametric condition battery.
pub fn check_conditions_ultra(
    ps: &ParameterSet,
    input: &BoundInput,
    aleph_hi: &RealInterval,
) -> Result<Vec<ConditionReport>> {
    let prec = input.constants.prec;
    let PlaceData::Ultra { r, .. } = &input.place else {
        return Err(CoreError::Precondition("ultrametric place required".into()));
    };
    let log_r = ln_rational(r, prec)?;
    let c0 = input.constants.c0 as i64;
    let mut out = Vec::new();

    // (i) U >= C0^(3/2) D aleph.
    let c032 = RealInterval::from_i64(c0).pow_rational(&BigRational::new(big(3), big(2)), prec)?;
    out.push(ge_condition(
        "ultra-1-weight",
        &ps.u,
        &c032.mul(&aleph_hi.scale(&rat(input.d_field as i64))),
    ));

    // (ii) S0 log r >= C0 (D max{1,h(V)} + log S0).
    let lhs2 = log_r.scale(&rat(ps.s0 as i64));
    let log_s0 = ln_rational(&rat(ps.s0 as i64), prec)?;
    let rhs2 = RealInterval::exact(
        rat(input.d_field as i64) * input.h_v.clone().max(BigRational::one()),
    )
    .add(&log_s0)
    .scale(&rat(c0));
    out.push(ge_condition("ultra-2-S0-log", &lhs2, &rhs2));

    // (iii) U >= C0^2 D D_i maxh_i, per factor.
    let s_heights = (input.group.g() as u64 + 1) * ps.s;
    for (i, _f) in input.group.factors[1..].iter().enumerate() {
        let maxh = input.curves[i].max_up_to(s_heights, prec)?;
        let rhs = maxh.scale(
            &(BigRational::from_integer(big(c0).pow(2) * ps.d[i + 1].clone())
                * rat(input.d_field as i64)),
        );
        out.push(ge_condition(
            match i {
                0 => "ultra-3-factor-1",
                1 => "ultra-3-factor-2",
                _ => "ultra-3-factor-n",
            },
            &ps.u,
            &rhs,
        ));
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct OptimizeResult {
    /// Exponent `k` of the minimizer `e* = e^k`.
    pub k_star: BigRational,
    pub e_star_f64: f64,
    pub u0_star: RealInterval,
    /// `U0` at the reference choice `e = e sqrt(max{1, h(p)})`.
    pub u0_reference: RealInterval,
    /// Grid values `(k, U0(e^k))` for unimodality inspection.
    pub scan: Vec<(f64, f64)>,
}

/// Minimizes `U0` over `e in [e, e (1 + max h)^2]` by golden-section on
/// `log e`, re-deriving `a` per candidate; the reference point
/// `e sqrt(max{1,h(p)})` is always included, so the result can never be
/// worse than the reference.
pub fn optimize_e(input: &BoundInput, c5: &BigRational) -> Result<OptimizeResult> {
    input.validate()?;
    if input.group.n() != 1 {
        return Err(CoreError::Unsupported(
            "the optimal-e claim is asserted for n = 1 only".into(),
        ));
    }
    let prec = input.constants.prec;
    let hp = input.curves[0].h_point(prec)?;
    let hp_f = hp.to_f64().max(1.0);

    let eval_at = |k: &BigRational| -> Result<(BigInt, RealInterval)> {
        let mut trial = input.clone();
        let PlaceData::Arch { u_norms, .. } = &input.place else {
            return Err(CoreError::Precondition("optimize_e needs an archimedean place".into()));
        };
        trial.place = PlaceData::Arch {
            e_param: EParam::EulerPow(k.clone()),
            u_norms: u_norms.clone(),
        };
        // a = ceil(D max{1,hV}/k), exact since k is rational.
        let need = rat(trial.d_field as i64) * trial.h_v.clone().max(BigRational::one()) / k;
        let a = need.ceil().to_integer().max(BigInt::one());
        let u0 = eval_u0(&trial, &a, c5)?;
        Ok((a, u0))
    };

    // Search domain in k = log e: [1, 1 + 2 ln(1 + maxh)].
    let k_hi_f = 1.0 + 2.0 * (1.0 + hp_f).ln();
    let to_rat = |x: f64| BigRational::from_float(x).unwrap_or_else(BigRational::one);
    let (mut lo, mut hi) = (1.0f64, k_hi_f.max(1.0 + 1e-9));
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let obj = |x: f64| -> Result<f64> {
        let (_a, u) = eval_at(&to_rat(x))?;
        Ok(u.to_f64())
    };
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = obj(x1)?;
    let mut f2 = obj(x2)?;
    for _ in 0..48 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = obj(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = obj(x2)?;
        }
    }
    let k_search = if f1 <= f2 { x1 } else { x2 };

    // Reference: e sqrt(max{1, hp}), i.e. k = 1 + (1/2) ln max{1, hp}.
    let k_ref = 1.0 + 0.5 * hp_f.ln().max(0.0);
    let mut grid: Vec<f64> = vec![1.0, k_search, k_ref, k_hi_f];
    for i in 0..=24 {
        grid.push(1.0 + (k_hi_f - 1.0) * (i as f64) / 24.0);
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let mut best: Option<(BigRational, RealInterval, f64)> = None;
    let mut scan = Vec::with_capacity(grid.len());
    let mut u_ref: Option<RealInterval> = None;
    for k in &grid {
        let kq = to_rat(*k);
        let (_a, u) = eval_at(&kq)?;
        let uf = u.to_f64();
        scan.push((*k, uf));
        if (k - k_ref).abs() < 1e-12 {
            u_ref = Some(u.clone());
        }
        match &best {
            Some((_, _, b)) if *b <= uf => {}
            _ => best = Some((kq, u, uf)),
        }
    }
    let (k_star, u0_star, _) = best.ok_or_else(|| CoreError::Internal("empty scan".into()))?;
    let u0_reference = match u_ref {
        Some(u) => u,
        None => eval_at(&to_rat(k_ref))?.1,
    };
    // By construction the reference is in the grid, so this cannot fire;
    // keep it as a hard assertion of the paper's remark.
    if u0_star.to_f64() > u0_reference.to_f64() * (1.0 + 1e-12) {
        return Err(CoreError::Internal(
            "optimizer returned a worse value than the reference choice".into(),
        ));
    }
    Ok(OptimizeResult {
        e_star_f64: k_star.to_f64().unwrap_or(f64::NAN).exp(),
        k_star,
        u0_star,
        u0_reference,
        scan,
    })
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::polybasis::RadiusMode;
    use crate::ratio::rat2;

    fn toric_input_g1() -> BoundInput {
        // g = 1 toric, t = 1, D = 1, hV = 0, e = e, C0 = 2, p = 2,
        // ||u|| = log 2 (as a rational approximation).
        BoundInput {
            group: GroupDescriptor::toric(1),
            d_field: 1,
            t: 1,
            h_v: BigRational::zero(),
            curves: vec![HeightCurve::Toric { point: rat(2) }],
            place: PlaceData::Arch {
                e_param: EParam::euler(),
                u_norms: vec![rat2(693147, 1000000)],
            },
            constants: Constants::default(),
            toric_point: Some(vec![rat(2)]),
            v_lattice: Some(vec![]),
        }
    }

    #[test]
    fn arch_params_example() {
        let input = toric_input_g1();
        let ps = choose_params_arch(&input).unwrap();
        assert_eq!(ps.a_param, big(1));
        assert_eq!(ps.s0, 8);
        assert_eq!(ps.s, 64);
        assert!(ps.t_int >= big(1));
        assert!(ps.x.hi() <= &rat(1));
        assert!(ps.obstruction.is_some());
        // Adjusted degrees exist and D_1 >= 1.
        assert!(ps.d[1] >= big(1));
    }

    #[test]
    fn arch_params_huge_e() {
        let mut input = toric_input_g1();
        input.place = PlaceData::Arch {
            e_param: EParam::EulerPow(rat(100)),
            u_norms: vec![rat2(693147, 1000000)],
        };
        let ps = choose_params_arch(&input).unwrap();
        assert_eq!(ps.a_param, big(1));
        assert_eq!(ps.s0, 8);
    }

    #[test]
    fn arch_conditions_hold_on_example() {
        let input = toric_input_g1();
        let ps = choose_params_arch(&input).unwrap();
        // aleph upper bound via the Matveev weight estimate.
        let d0 = ps.d[0].to_u64().unwrap_or(0).max(1);
        let radius = RadiusMode::Archimedean { e_param: euler(96) };
        let aleph = crate::polybasis::weight_bound_matveev(
            d0,
            ps.d0_flat.to_u64().unwrap_or(0).max(1),
            ps.t_int.to_u64().unwrap_or(1),
            ps.s,
            &radius,
            input.d_field,
            &input.constants.weight_c,
            96,
        )
        .unwrap();
        let reports = check_conditions_arch(&ps, &input, &aleph).unwrap();
        for r in &reports {
            assert!(r.holds, "condition {} fails: lhs {} rhs {}", r.id, r.lhs, r.rhs);
        }
    }

    #[test]
    fn arch_conditions_fail_with_c0_one() {
        let mut input = toric_input_g1();
        input.constants.c0 = 1;
        let ps = choose_params_arch(&input).unwrap();
        let aleph = RealInterval::zero();
        let reports = check_conditions_arch(&ps, &input, &aleph).unwrap();
        assert!(
            reports.iter().any(|r| !r.holds),
            "expected some condition to fail with C0 = 1"
        );
    }

    #[test]
    fn eval_u0_example() {
        // (g=1, t=1, y=1, D=1, e=e, a=1, rho=1, c5=10, max h = 10 log 2,
        // ||u|| = log 2): about 22.707.
        let mut input = toric_input_g1();
        input.group.y = 1;
        let u0 = eval_u0(&input, &big(1), &rat(10)).unwrap();
        let e = std::f64::consts::E;
        let ln2 = std::f64::consts::LN_2;
        let expected = (1.0 + (e + 1.0f64).ln()) * (1.0 + 10.0 * ln2 + e * 0.693147);
        assert!(
            (u0.to_f64() - expected).abs() < 1e-6,
            "u0 = {}, expected {expected}",
            u0.to_f64()
        );
        assert!((u0.to_f64() - 22.7).abs() < 0.05);
    }

    #[test]
    fn eval_u0_vanishing_point_data() {
        // ||u|| = 0, h(sp) = 0, hV = 0: U0 = log e (1 + (D/log e) log(e + D/log e))^(1/t).
        let mut input = toric_input_g1();
        input.curves = vec![HeightCurve::Linear { hp: BigRational::zero() }];
        input.place = PlaceData::Arch {
            e_param: EParam::euler(),
            u_norms: vec![BigRational::zero()],
        };
        let u0 = eval_u0(&input, &big(1), &rat(10)).unwrap();
        let expected = 1.0 + (std::f64::consts::E + 1.0f64).ln();
        assert!((u0.to_f64() - expected).abs() < 1e-9);
    }

    #[test]
    fn eval_u0_monotone_in_exponent_structure() {
        // t = g with one factor: exponent g/t = 1, linear in max h.
        let mut input = toric_input_g1();
        input.curves = vec![HeightCurve::Linear { hp: rat(1) }];
        let u_a = eval_u0(&input, &big(1), &rat(4)).unwrap().to_f64();
        input.curves = vec![HeightCurve::Linear { hp: rat(2) }];
        let u_b = eval_u0(&input, &big(1), &rat(4)).unwrap().to_f64();
        input.curves = vec![HeightCurve::Linear { hp: rat(3) }];
        let u_c = eval_u0(&input, &big(1), &rat(4)).unwrap().to_f64();
        assert!((u_b - u_a - (u_c - u_b)).abs() < 1e-9, "not affine in hp");
    }

    fn ultra_input() -> BoundInput {
        BoundInput {
            group: GroupDescriptor::toric(1),
            d_field: 1,
            t: 1,
            h_v: BigRational::zero(),
            curves: vec![HeightCurve::Toric { point: rat(2) }],
            place: PlaceData::Ultra {
                p: 2,
                r: rat2(3, 2),
                u_norm: rat2(1, 8),
            },
            constants: Constants::default(),
            toric_point: Some(vec![rat(2)]),
            v_lattice: Some(vec![]),
        }
    }

    #[test]
    fn ultra_guard_examples() {
        // p = 2 (r_p = 1/2), ||u|| = 1/8, r = 3/2 in ]1, 2[: accepted.
        assert!(ultra_guards(2, &rat2(3, 2), &rat2(1, 8)).is_ok());
        // ||u|| = 1/2 >= r_p^2 = 1/4: rejected (strict).
        assert!(ultra_guards(2, &rat2(3, 2), &rat2(1, 2)).is_err());
        // r = 1: rejected (open interval).
        assert!(ultra_guards(2, &rat(1), &rat2(1, 8)).is_err());
        // r at the boundary 2 = r_p^2/||u||: rejected.
        assert!(ultra_guards(2, &rat(2), &rat2(1, 8)).is_err());
        // r just below the boundary: accepted.
        assert!(ultra_guards(2, &rat2(19, 10), &rat2(1, 8)).is_ok());
    }

    #[test]
    fn ultra_params_and_conditions() {
        let input = ultra_input();
        let ps = choose_params_ultra(&input).unwrap();
        assert!(ps.a_param >= big(1));
        assert_eq!(ps.s0 as i64, 8 * ps.a_param.to_i64().unwrap());
        let d0 = ps.d[0].to_u64().unwrap_or(0).max(1);
        let radius = RadiusMode::Ultrametric { r: rat2(3, 2), prime: None };
        let aleph = crate::polybasis::weight_bound_matveev(
            d0,
            ps.d0_flat.to_u64().unwrap_or(0).max(1),
            ps.t_int.to_u64().unwrap_or(1),
            ps.s,
            &radius,
            input.d_field,
            &input.constants.weight_c,
            96,
        )
        .unwrap();
        let reports = check_conditions_ultra(&ps, &input, &aleph).unwrap();
        for r in &reports {
            assert!(r.holds, "condition {} fails: lhs {} rhs {}", r.id, r.lhs, r.rhs);
        }
    }

    #[test]
    fn eval_u1_example() {
        // (g=1, t=1, y=1, D=1, r=2, a=2, max h = 20 log 2, c6=10).
        let mut input = ultra_input();
        input.group.y = 1;
        input.place = PlaceData::Ultra {
            p: 2,
            r: rat(2),
            u_norm: rat2(1, 16),
        };
        let u1 = eval_u1(&input, &big(2), &rat(10)).unwrap();
        let ln2 = std::f64::consts::LN_2;
        let expected = 2.0
            * 3f64.ln()
            * (2.0 + (std::f64::consts::E + 1.0 / ln2).ln() / ln2)
            * (1.0 + 20.0 * ln2 / (2.0 * ln2));
        assert!(
            (u1.to_f64() - expected).abs() < 1e-6,
            "u1 = {} vs {expected}",
            u1.to_f64()
        );
    }

    #[test]
    fn eval_u1_vanishing_heights() {
        let mut input = ultra_input();
        input.curves = vec![HeightCurve::Linear { hp: BigRational::zero() }];
        let u1 = eval_u1(&input, &big(2), &rat(10)).unwrap();
        // U1 = a log(1+r) (a^y + (D/log r) log(e + D/log r))^(1/t) with y=0.
        let lr = 1.5f64.ln();
        let expected = 2.0 * 2.5f64.ln() * (1.0 + (std::f64::consts::E + 1.0 / lr).ln() / lr);
        assert!((u1.to_f64() - expected).abs() < 1e-9);
    }

    #[test]
    fn simple_bound_examples() {
        // (g=2, t=1, b=e, hp=0, c=1) -> -1.
        let b = eval_simple_bound(2, 1, &EParam::euler(), &BigRational::zero(), &rat(1), 96)
            .unwrap();
        assert!((b.to_f64() + 1.0).abs() < 1e-12);
        // (g=2, t=2, b=e^2, hp=e, c=1) -> -(2^(5/2)) e.
        let hp = rat2(2718281828, 1000000000);
        let b2 = eval_simple_bound(
            2,
            2,
            &EParam::EulerPow(rat(2)),
            &hp,
            &rat(1),
            96,
        )
        .unwrap();
        let expected = -(2f64.powf(2.5)) * 2.718281828;
        assert!((b2.to_f64() - expected).abs() < 1e-6);
        // Monotone: nonincreasing in hp and b.
        let b3 = eval_simple_bound(2, 2, &EParam::EulerPow(rat(3)), &hp, &rat(1), 96).unwrap();
        assert!(b3.to_f64() <= b2.to_f64());
        assert!(eval_simple_bound(2, 1, &EParam::Rational(rat(2)), &hp, &rat(1), 96).is_err());
    }

    #[test]
    fn optimize_boundary_small_hp() {
        // hp <= 1: the search domain degenerates toward e* = e.
        let mut input = toric_input_g1();
        input.curves = vec![HeightCurve::Linear { hp: rat(1) }];
        input.place = PlaceData::Arch {
            e_param: EParam::euler(),
            u_norms: vec![rat(1)],
        };
        let res = optimize_e(&input, &rat(1)).unwrap();
        assert!((res.e_star_f64 - std::f64::consts::E).abs() < 0.3);
        assert!(res.u0_star.to_f64() <= res.u0_reference.to_f64() * (1.0 + 1e-9));
    }

    #[test]
    fn optimize_rejects_two_factors() {
        let mut input = toric_input_g1();
        input.group = GroupDescriptor::toric(2);
        input.curves = vec![
            HeightCurve::Linear { hp: rat(5) },
            HeightCurve::Linear { hp: rat(5) },
        ];
        input.place = PlaceData::Arch {
            e_param: EParam::euler(),
            u_norms: vec![rat(1), rat(1)],
        };
        input.t = 1;
        input.toric_point = None;
        input.v_lattice = None;
        assert!(matches!(
            optimize_e(&input, &rat(1)),
            Err(CoreError::Unsupported(_))
        ));
    }

    #[test]
    fn bridge_helper() {
        let (bridge, shape) = ultra_bridge(2, &rat2(3, 2), 96).unwrap();
        // 1 + log2/log(3/2) = 1 + 1.7095 = 2.7095.
        assert!((bridge.to_f64() - 2.70951).abs() < 1e-4);
        // shape = log(5/2)/log(3/2) = 2.2599...; bridge <= 2 * shape here.
        assert!(bridge.to_f64() <= 2.0 * shape.to_f64());
    }

    #[test]
    fn torsion_guard_detection() {
        // p = (2, 2) is torsion modulo the diagonal: guard must trip.
        let mut input = toric_input_g1();
        input.group = GroupDescriptor::toric(2);
        input.curves = vec![
            HeightCurve::Toric { point: rat(2) },
            HeightCurve::Toric { point: rat(2) },
        ];
        input.place = PlaceData::Arch {
            e_param: EParam::euler(),
            u_norms: vec![rat(1), rat(1)],
        };
        input.toric_point = Some(vec![rat(2), rat(2)]);
        input.v_lattice = Some(vec![]);
        input.t = 2;
        let mut warnings = Vec::new();
        let violations = torsion_guards(&input, 10, &mut warnings).unwrap();
        assert!(!violations.is_empty());
        // p = (2, 3) is not.
        input.toric_point = Some(vec![rat(2), rat(3)]);
        let v2 = torsion_guards(&input, 10, &mut warnings).unwrap();
        assert!(v2.is_empty());
    }
}
