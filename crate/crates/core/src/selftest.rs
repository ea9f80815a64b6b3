//! The acceptance suite: every quantitative claim of the library that
//! admits an independent check at desk scale, run end to end with fixed
//! seeds and exact oracles. The CLI `selftest` subcommand prints one
//! line per criterion; the integration test asserts them all.
//!
//! Oracles here are deliberately independent of the implementation path
//! they check (Legendre counts vs digit-sum valuations, brute-force
//! lattice-point Hilbert counts vs determinant multidegrees, exhaustive
//! corpora vs constructions).

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::auxsys;
use crate::bounds::{self, BoundInput, Constants, EParam, HeightCurve, PlaceData};
use crate::groups::{self, GroupDescriptor, ObstructionParams, PointSpec, SubgroupDescriptor};
use crate::heights::{product_formula_residual, sandwich_check, ProjVector, Subspace};
use crate::interp;
use crate::linalg::{self, IMat};
use crate::polybasis::UniPoly;
use crate::ratio::{big, rat, rat2};
use crate::real::{ln_rational, RealInterval};
use crate::siegel;

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
    pub runtime_ms: u128,
    pub budget_ms: u128,
}

pub fn run_all() -> Vec<CriterionResult> {
    (1..=12).map(run_criterion).collect()
}

pub fn run_criterion(id: u32) -> CriterionResult {
    let (name, budget_ms, f): (_, u128, fn() -> Result<String, String>) = match id {
        1 => ("fact-integrality-three-way", 30_000, c1_fact_integrality),
        2 => ("product-formula", 5_000, c2_product_formula),
        3 => ("height-sandwich", 5_000, c3_sandwich),
        4 => ("schmidt-duality", 60_000, c4_duality),
        5 => ("siegel-certificate", 120_000, c5_siegel),
        6 => ("multidegree-brute-force", 60_000, c6_multidegree),
        7 => ("obstruction-equality", 30_000, c7_obstruction),
        8 => ("rank-vs-bound", 120_000, c8_rank_bound),
        9 => ("interpolation-lemmas", 120_000, c9_interpolation),
        10 => ("optimal-e-shape", 10_000, c10_optimal_e),
        11 => ("u0-monotonicity", 10_000, c11_monotonicity),
        12 => ("end-to-end-sanity", 30_000, c12_end_to_end),
        _ => {
            return CriterionResult {
                id,
                name: "unknown",
                passed: false,
                details: format!("no criterion with id {id}"),
                runtime_ms: 0,
                budget_ms: 0,
            }
        }
    };
    let start = Instant::now();
    let outcome = f();
    let runtime_ms = start.elapsed().as_millis();
    match outcome {
        Ok(details) => CriterionResult {
            id,
            name,
            passed: runtime_ms <= budget_ms,
            details: if runtime_ms <= budget_ms {
                details
            } else {
                format!("{details}; EXCEEDED BUDGET {budget_ms} ms")
            },
            runtime_ms,
            budget_ms,
        },
        Err(details) => CriterionResult {
            id,
            name,
            passed: false,
            details,
            runtime_ms,
            budget_ms,
        },
    }
}

// ---------------------------------------------------------------- 1

fn c1_fact_integrality() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1001);
    let mut orders_seen = 0u64;
    for case in 0..1000 {
        let b = rng.gen_range(-5i64..=5);
        // One case in five is a structured high-order instance
        // (X - 1)^k X^a Y^c, whose exponential vanishes to order exactly
        // k when the frequencies stay distinct; the rest are random.
        let p = if case % 5 == 0 {
            let k = rng.gen_range(2..=4u32);
            let a = rng.gen_range(0..=2u32);
            let c = rng.gen_range(0..=2u32);
            let mut terms = std::collections::BTreeMap::new();
            // Binomial expansion of (X - 1)^k times X^a Y^c.
            let mut coef = BigInt::one();
            for i in 0..=k {
                // C(k, i) * (-1)^(k-i) X^(i+a) Y^c
                let sign = if (k - i) % 2 == 0 { 1 } else { -1 };
                *terms.entry((i + a, c)).or_insert_with(BigInt::zero) +=
                    &coef * big(sign);
                coef = &coef * big((k - i) as i64) / big(i as i64 + 1);
            }
            auxsys::IntPoly2::new(terms)
        } else {
            let nterms = rng.gen_range(1..=5usize);
            let mut terms = std::collections::BTreeMap::new();
            for _ in 0..nterms {
                let i = rng.gen_range(0..=4u32);
                let j = rng.gen_range(0..=4u32);
                let c = loop {
                    let c = rng.gen_range(-9i64..=9);
                    if c != 0 {
                        break c;
                    }
                };
                *terms.entry((i, j)).or_insert_with(BigInt::zero) += big(c);
            }
            auxsys::IntPoly2::new(terms)
        };
        if p.is_zero() {
            continue;
        }
        match auxsys::fact_integrality(&p, b, 24) {
            Ok(rep) => {
                if let Some(l) = rep.vanishing_order {
                    orders_seen = orders_seen.max(l);
                    let w = &rep.witnesses[l as usize];
                    if !w.is_integer {
                        return Err(format!(
                            "case {case}: leading coefficient not integral at order {l}"
                        ));
                    }
                }
            }
            Err(e) => return Err(format!("case {case}: {e}")),
        }
    }
    Ok(format!(
        "1000 random (P, b): three routes agree exactly; max vanishing order seen {orders_seen}"
    ))
}

// ---------------------------------------------------------------- 2

fn c2_product_formula() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1002);
    for case in 0..500 {
        let num = loop {
            let n = rng.gen_range(-1_000_000i64..=1_000_000);
            if n != 0 {
                break n;
            }
        };
        let den = rng.gen_range(1i64..=1_000_000);
        let x = rat2(num, den);
        match product_formula_residual(&x) {
            Ok(res) if res.is_one() => {}
            Ok(res) => return Err(format!("case {case}: residual {res} for {x}")),
            Err(e) => return Err(format!("case {case}: {e}")),
        }
    }
    Ok("500 random rationals: multiplicative residual exactly 1".into())
}

// ---------------------------------------------------------------- 3

fn c3_sandwich() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1003);
    for case in 0..500 {
        let dim = rng.gen_range(2..=8usize);
        let coords: Vec<BigInt> = loop {
            let v: Vec<BigInt> = (0..dim)
                .map(|_| big(rng.gen_range(-10_000i64..=10_000)))
                .collect();
            if v.iter().any(|x| !x.is_zero()) {
                break v;
            }
        };
        let pv = ProjVector::from_integers(coords).map_err(|e| e.to_string())?;
        if !sandwich_check(&pv).map_err(|e| e.to_string())? {
            return Err(format!("case {case}: sandwich inequality failed"));
        }
    }
    Ok("500 random vectors (dim 2-8): h <= h_L2 <= h + (1/2) log m exactly".into())
}

// -------------------------------------------------------- 4 and 5 corpus

fn norm_sign4(mut v: [i64; 4]) -> [i64; 4] {
    for x in v {
        if x != 0 {
            if x < 0 {
                for y in v.iter_mut() {
                    *y = -*y;
                }
            }
            break;
        }
    }
    v
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn primitive4(mut v: [i64; 4]) -> Option<[i64; 4]> {
    let g = v.iter().fold(0i64, |acc, &x| gcd_i64(acc, x));
    if g == 0 {
        return None;
    }
    for x in v.iter_mut() {
        *x /= g;
    }
    Some(norm_sign4(v))
}

/// All subspaces of `Q^4` with a basis of entries in [-2, 2], plus the
/// trivial dimensions, deduplicated exactly: lines by their primitive
/// direction, planes by their primitive Pluecker vector, hyperplanes by
/// their primitive normal.
fn q4_corpus() -> Result<Vec<Subspace>, String> {
    let mut dirs: Vec<[i64; 4]> = Vec::new();
    {
        let mut seen = std::collections::HashSet::new();
        for a in -2i64..=2 {
            for b in -2i64..=2 {
                for c in -2i64..=2 {
                    for d in -2i64..=2 {
                        if let Some(p) = primitive4([a, b, c, d]) {
                            if seen.insert(p) {
                                dirs.push(p);
                            }
                        }
                    }
                }
            }
        }
    }
    let mut out: Vec<Subspace> = Vec::new();
    let to_sub = |rows: Vec<Vec<i64>>| -> Result<Subspace, String> {
        Subspace::from_integer_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(big).collect())
                .collect(),
            4,
        )
        .map_err(|e| e.to_string())
    };
    for d in &dirs {
        out.push(to_sub(vec![d.to_vec()])?);
    }
    // Planes: dedup by primitive Pluecker 6-tuple.
    let pairs2 = |u: &[i64; 4], v: &[i64; 4]| -> [i64; 6] {
        let m = |i: usize, j: usize| u[i] * v[j] - u[j] * v[i];
        [m(0, 1), m(0, 2), m(0, 3), m(1, 2), m(1, 3), m(2, 3)]
    };
    let mut plane_reps: Vec<([i64; 4], [i64; 4])> = Vec::new();
    {
        let mut seen = std::collections::HashSet::new();
        for i in 0..dirs.len() {
            for j in (i + 1)..dirs.len() {
                let pl = pairs2(&dirs[i], &dirs[j]);
                if pl.iter().all(|&x| x == 0) {
                    continue;
                }
                let g = pl.iter().fold(0i64, |acc, &x| gcd_i64(acc, x));
                let mut key = pl.map(|x| x / g);
                for x in key {
                    if x != 0 {
                        if x < 0 {
                            for y in key.iter_mut() {
                                *y = -*y;
                            }
                        }
                        break;
                    }
                }
                if seen.insert(key) {
                    plane_reps.push((dirs[i], dirs[j]));
                }
            }
        }
    }
    for (u, v) in &plane_reps {
        out.push(to_sub(vec![u.to_vec(), v.to_vec()])?);
    }
    // Hyperplanes: dedup by primitive normal (3x3 minors of three rows).
    let mut normals: Vec<[i64; 4]> = Vec::new();
    {
        let mut seen = std::collections::HashSet::new();
        let det3 = |r: &[[i64; 4]; 3], cols: [usize; 3]| -> i64 {
            let m = |i: usize, j: usize| r[i][cols[j]];
            m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
                - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
        };
        for (u, v) in &plane_reps {
            for w in &dirs {
                let rows = [*u, *v, *w];
                let n = [
                    det3(&rows, [1, 2, 3]),
                    -det3(&rows, [0, 2, 3]),
                    det3(&rows, [0, 1, 3]),
                    -det3(&rows, [0, 1, 2]),
                ];
                if let Some(p) = primitive4(n) {
                    if seen.insert(p) {
                        normals.push(p);
                    }
                }
            }
        }
    }
    for n in &normals {
        let rows = linalg::integer_kernel(&vec![n.iter().map(|&x| big(x)).collect()], 4);
        out.push(Subspace::from_integer_rows(rows, 4).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

fn random_q5_subspaces(count: usize, seed: u64) -> Result<Vec<Subspace>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let d = rng.gen_range(1..=4usize);
        let rows: IMat = (0..d)
            .map(|_| (0..5).map(|_| big(rng.gen_range(-9i64..=9))).collect())
            .collect();
        if linalg::rank_int(&rows) != d {
            continue;
        }
        out.push(Subspace::from_integer_rows(rows, 5).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

fn c4_duality() -> Result<String, String> {
    let corpus = q4_corpus()?;
    for (i, s) in corpus.iter().enumerate() {
        if !siegel::duality_holds(s).map_err(|e| e.to_string())? {
            return Err(format!("duality failed on Q^4 corpus member {i}"));
        }
    }
    let extra = random_q5_subspaces(100, 0x1004)?;
    for (i, s) in extra.iter().enumerate() {
        if !siegel::duality_holds(s).map_err(|e| e.to_string())? {
            return Err(format!("duality failed on random Q^5 member {i}"));
        }
    }
    Ok(format!(
        "h(F) = h(F-perp) exactly on {} Q^4 subspaces + 100 random Q^5 subspaces",
        corpus.len()
    ))
}

fn c5_siegel() -> Result<String, String> {
    let mut corpus = q4_corpus()?;
    corpus.extend(random_q5_subspaces(100, 0x1005)?);
    let mut checked = 0usize;
    for (i, s) in corpus.iter().enumerate() {
        if s.dim() == 0 {
            continue;
        }
        let b = siegel::small_basis(s).map_err(|e| format!("member {i}: {e}"))?;
        let rows: IMat = b.vectors.iter().map(|v| v.primitive.clone()).collect();
        if !siegel::certificate_holds(&rows, s) {
            return Err(format!("Siegel certificate failed on member {i}"));
        }
        checked += 1;
    }
    Ok(format!(
        "sum h_L2(v_i) <= h(V) + d log d certified exactly on {checked} subspaces"
    ))
}

// ---------------------------------------------------------------- 6

fn c6_multidegree() -> Result<String, String> {
    let tori = groups::enumerate_subtori(3, 3);
    let mut checked = 0usize;
    for (i, t) in tori.iter().enumerate() {
        // Embed into the G_a x G_m^3 column convention (no G_a factor).
        let rows: IMat = t
            .iter()
            .map(|r| {
                let mut row = vec![BigInt::zero()];
                row.extend(r.iter().cloned());
                row
            })
            .collect();
        let sub = SubgroupDescriptor::new(rows, 4).map_err(|e| e.to_string())?;
        let md = groups::multidegree(&sub).map_err(|e| e.to_string())?;
        let brute = groups::hilbert_oracle::multidegree_brute(&sub)
            .map_err(|e| format!("subtorus {i}: {e}"))?;
        if md != brute {
            return Err(format!(
                "multidegree mismatch on subtorus {i}: {:?} vs {:?}",
                md.coeffs, brute.coeffs
            ));
        }
        let deg = groups::hilbert_oracle::degree_brute(&sub)
            .map_err(|e| format!("subtorus {i}: {e}"))?;
        if md.total() != deg {
            return Err(format!(
                "coefficient sum {} != brute-force degree {deg} on subtorus {i}",
                md.total()
            ));
        }
        checked += 1;
    }
    Ok(format!(
        "{checked} subtori of G_m^3 (entries <= 3): determinant multidegrees equal \
         brute-force Hilbert counts; sums equal independent degrees"
    ))
}

// ---------------------------------------------------------------- 7

fn c7_obstruction() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1007);
    let pool: Vec<BigRational> = vec![
        rat(2),
        rat(3),
        rat(5),
        rat(7),
        rat2(1, 2),
        rat2(3, 2),
        rat2(2, 3),
        rat2(5, 2),
        rat(4),
        rat(-2),
    ];
    let mut done = 0usize;
    while done < 50 {
        let n = rng.gen_range(1..=2usize);
        let point: Vec<BigRational> =
            (0..n).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect();
        let q = PointSpec::new(point).map_err(|e| e.to_string())?;
        let w = bounds::w_from_v_lattice(&Vec::new(), n).map_err(|e| e.to_string())?;
        let family = groups::eligible_family(n, 2, &w).map_err(|e| e.to_string())?;
        if family.is_empty() {
            continue;
        }
        let s = rng.gen_range(1..=20u64);
        let t_tilde = RealInterval::exact(rat2(rng.gen_range(2..=400), rng.gen_range(1..=4)));
        let d_tilde: Vec<RealInterval> = (0..=n)
            .map(|_| RealInterval::exact(rat2(rng.gen_range(2..=200), rng.gen_range(1..=3))))
            .collect();
        // Scale C0 up until some member has A <= 1 (A decreases in C0).
        let mut c0 = 2u64;
        let report = loop {
            let params = ObstructionParams {
                t_tilde: t_tilde.clone(),
                c0,
                d_tilde: d_tilde.clone(),
                s,
            };
            let rep = groups::choose_x(&family, &params, &q, &w, 96)
                .map_err(|e| format!("instance {done}: {e}"))?;
            if rep.lemma_equality_checked {
                break rep;
            }
            if c0 > 1 << 40 {
                return Err(format!("instance {done}: could not force A <= 1"));
            }
            c0 *= 4;
        };
        // The equality and homogeneity checks ran inside choose_x; also
        // make sure x really is the family minimum.
        for e in &report.family {
            if e.b.hi() < report.x.lo() {
                return Err(format!("instance {done}: x is not the minimum"));
            }
        }
        done += 1;
    }
    Ok("50 randomized instances: mho = 1 at the argmin (rel 1e-9), mho >= 1 elsewhere, \
        homogeneity identity verified"
        .into())
}

// ---------------------------------------------------------------- 8

fn c8_rank_bound() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1008);
    let smooth: Vec<BigRational> = vec![
        rat(2),
        rat(3),
        rat(5),
        rat(7),
        rat2(1, 2),
        rat2(2, 3),
        rat2(3, 2),
        rat2(5, 3),
    ];
    let mut done = 0usize;
    let mut constructed = 0usize;
    let mut max_ratio = 0.0f64;
    while done < 20 {
        let n = rng.gen_range(1..=2usize);
        let d0 = rng.gen_range(0..=3u64);
        let degrees: Vec<u64> = std::iter::once(d0)
            .chain((0..n).map(|_| rng.gen_range(1..=3u64)))
            .collect();
        let alphas: Vec<BigRational> =
            (0..n).map(|_| smooth[rng.gen_range(0..smooth.len())].clone()).collect();
        let v_lattice: IMat = if n == 2 && rng.gen_bool(0.5) {
            vec![vec![big(1), big(rng.gen_range(-3i64..=3))]]
        } else {
            vec![]
        };
        let family = if rng.gen_bool(0.5) {
            auxsys::BasisFamily::Monomial
        } else {
            auxsys::BasisFamily::Matveev {
                d_flat: rng.gen_range(1..=2usize),
            }
        };
        let spec = auxsys::SystemSpec {
            degrees,
            family,
            alphas,
            v_lattice,
            s1: rng.gen_range(1..=4),
            t1: rng.gen_range(1..=4),
        };
        let m = match auxsys::build_system(&spec) {
            Ok(m) => m,
            Err(_) => continue,
        };
        let rank = auxsys::system_rank(&m);
        if rank != auxsys::system_rank_rational(&m) {
            return Err(format!("instance {done}: the two rank routes disagree"));
        }
        // Default constant c = 2^g (g+1)! and D'_i = max(1, D_i).
        let g = n as u32;
        let mut c = BigInt::from(2u32).pow(g);
        for k in 2..=(g as u64 + 1) {
            c *= big(k as i64);
        }
        let c_iv = RealInterval::exact(BigRational::from_integer(c));
        let d_primes: Vec<RealInterval> = spec
            .degrees
            .iter()
            .map(|&d| RealInterval::from_i64(d.max(1) as i64))
            .collect();
        let w = bounds::w_from_v_lattice(&spec.v_lattice, n).map_err(|e| e.to_string())?;
        let q = PointSpec::new(spec.alphas.clone()).map_err(|e| e.to_string())?;
        for sub in groups::eligible_family(n, 2, &w).map_err(|e| e.to_string())? {
            let bound = groups::rank_bound(&sub, spec.t1, spec.s1, &d_primes, &q, &w, &c_iv)
                .map_err(|e| e.to_string())?;
            let bf = bound.to_f64();
            if (rank as f64) > bf {
                return Err(format!(
                    "instance {done}: rank {rank} exceeds bound {bf} for subgroup {:?}",
                    sub.lattice
                ));
            }
            if bf > 0.0 {
                max_ratio = max_ratio.max(rank as f64 / bf);
            }
        }
        // Kernel vectors re-verify M P = 0 exactly inside the Siegel
        // construction; reductions are run on kernels of workable size
        // (huge kernels only repeat the same check at larger cost).
        let kernel_dim = m.cols.len() - rank;
        if (1..=18).contains(&kernel_dim) {
            auxsys::construct_aux_poly(&m, &spec, 10.0, 1.0, 80)
                .map_err(|e| format!("instance {done}: {e}"))?;
            constructed += 1;
        }
        done += 1;
    }
    if constructed < 5 {
        return Err(format!(
            "only {constructed} instances produced a workable kernel; need >= 5"
        ));
    }
    Ok(format!(
        "20 exact systems: rank <= bound for every eligible subgroup \
         (max rank/bound ratio {max_ratio:.3}); {constructed} kernels re-verified exactly"
    ))
}

// ---------------------------------------------------------------- 9

fn c9_interpolation() -> Result<String, String> {
    // Valuations and kappa against Legendre counts.
    for p in [2u64, 3, 5, 7, 11, 13, 31, 61, 97] {
        for j in 0..=10_000u64 {
            let a = interp::factorial_valuation(j, p).map_err(|e| e.to_string())?;
            let b = interp::factorial_valuation_legendre(j, p).map_err(|e| e.to_string())?;
            if a != b {
                return Err(format!("valuation mismatch at p={p}, j={j}"));
            }
        }
    }
    for p in [2u64, 3, 5, 7, 97] {
        for s1 in 1..=200u64 {
            let k = interp::kappa(s1, p).map_err(|e| e.to_string())?;
            // Recompute the floor log with floats as a sanity cross-check.
            let fl = (s1 as f64).ln() / (p as f64).ln();
            let fl = fl.floor() as u64;
            let v = interp::factorial_valuation_legendre(s1, p).map_err(|e| e.to_string())?;
            if k != v + fl {
                return Err(format!("kappa mismatch at p={p}, S1={s1}"));
            }
        }
    }

    // Archimedean checker on random poly-exp samples.
    let mut rng = ChaCha8Rng::seed_from_u64(0x1009);
    let mut arch_done = 0usize;
    while arch_done < 100 {
        let s1 = rng.gen_range(1..=5u64);
        let t1 = rng.gen_range(1..=4u64);
        let r = rat(2 * s1 as i64);
        let rr = if rng.gen_bool(0.5) {
            rat(4 * s1 as i64)
        } else {
            rat(16 * s1 as i64)
        };
        let nterms = rng.gen_range(1..=3usize);
        let mut freqs = std::collections::BTreeSet::new();
        let mut terms = Vec::new();
        for _ in 0..nterms {
            let f = rat2(rng.gen_range(-6i64..=6), rng.gen_range(1..=2));
            if !freqs.insert(f.clone()) {
                continue;
            }
            let deg = rng.gen_range(0..=6usize);
            let poly = UniPoly::new(
                (0..=deg)
                    .map(|_| rat2(rng.gen_range(-9i64..=9), rng.gen_range(1..=3)))
                    .collect(),
            );
            terms.push(interp::PolyExpTerm { poly, frequency: f });
        }
        if terms.is_empty() || terms.iter().all(|t| t.poly.is_zero()) {
            continue;
        }
        let f = interp::AnalyticSample::new(terms).map_err(|e| e.to_string())?;
        let c = interp::check_waldschmidt(&f, s1, t1, &r, &rr, 96).map_err(|e| e.to_string())?;
        if !c.holds {
            return Err(format!(
                "archimedean sample {arch_done} not certified: lhs {} rhs {}",
                c.lhs_upper, c.rhs_lower
            ));
        }
        arch_done += 1;
    }

    // Ultrametric checker on random polynomials: never false.
    let mut roy_holds = 0usize;
    for p in [2u64, 3, 5] {
        let mut done = 0usize;
        while done < 100 {
            let deg = rng.gen_range(0..=8usize);
            let coeffs: Vec<BigRational> = (0..=deg)
                .map(|_| rat2(rng.gen_range(-50i64..=50), rng.gen_range(1..=30)))
                .collect();
            if coeffs.iter().all(|c| c.is_zero()) {
                continue;
            }
            let s1 = rng.gen_range(1..=5u64);
            let t1 = rng.gen_range(1..=3u64);
            let r = rat(1);
            let rr = rat(p.pow(rng.gen_range(1..=2u32)) as i64);
            let f = interp::PadicSeries::polynomial(p, coeffs, r.clone())
                .map_err(|e| e.to_string())?;
            let c = interp::check_roy(&f, s1, t1, &r, &rr).map_err(|e| e.to_string())?;
            match c.outcome {
                interp::RoyOutcome::Fails => {
                    return Err(format!(
                        "p-adic sample failed at p={p}: lhs {} rhs {}",
                        c.lhs, c.rhs
                    ))
                }
                interp::RoyOutcome::Holds => roy_holds += 1,
                interp::RoyOutcome::Inconclusive => {}
            }
            done += 1;
        }
    }
    Ok(format!(
        "valuations = Legendre counts (j <= 10^4, p <= 97); 100 archimedean samples \
         certified; 300 p-adic samples never false ({roy_holds} exact holds)"
    ))
}

// ---------------------------------------------------------------- 10

fn c10_optimal_e() -> Result<String, String> {
    let mk = |hp: i64| BoundInput {
        group: GroupDescriptor::toric(1),
        d_field: 1,
        t: 1,
        h_v: BigRational::zero(),
        curves: vec![HeightCurve::Linear { hp: rat(hp) }],
        place: PlaceData::Arch {
            e_param: EParam::euler(),
            u_norms: vec![rat(1)],
        },
        constants: Constants::default(),
        toric_point: None,
        v_lattice: None,
    };
    // Theorem-level constant c5 = 1 for the shape check (the engine-level
    // (g+1) C0^6 replacement is a different display; see the ledger).
    let c5 = rat(1);
    let mut l_value: Option<f64> = None;
    let mut lines = Vec::new();
    for hp in [10i64, 100, 1000] {
        let res = bounds::optimize_e(&mk(hp), &c5).map_err(|e| e.to_string())?;
        let target = std::f64::consts::E * (hp as f64).sqrt();
        let ratio = res.e_star_f64 / target;
        if !(0.25..=4.0).contains(&ratio) {
            return Err(format!(
                "hp={hp}: e* = {:.3} not within factor 4 of e sqrt(hp) = {target:.3}"
            , res.e_star_f64));
        }
        let val = res.u0_star.to_f64() * (hp as f64).ln() / hp as f64;
        match l_value {
            None => l_value = Some(val),
            Some(l) => {
                if !(val >= l * (1.0 - 1e-9) && val <= 8.0 * l) {
                    return Err(format!(
                        "hp={hp}: normalized value {val:.3} outside [L, 8L] with L={l:.3}"
                    ));
                }
            }
        }
        // Unimodality of the scan (informational; flagged in the details).
        let mut minima = 0;
        for i in 1..res.scan.len().saturating_sub(1) {
            if res.scan[i].1 < res.scan[i - 1].1 - 1e-9
                && res.scan[i].1 < res.scan[i + 1].1 - 1e-9
            {
                minima += 1;
            }
        }
        lines.push(format!(
            "hp={hp}: e*={:.2} (target {:.2}), U0* ln(hp)/hp = {:.3}{}",
            res.e_star_f64,
            target,
            val,
            if minima > 1 { " [scan not unimodal]" } else { "" }
        ));
    }
    Ok(lines.join("; "))
}

// ---------------------------------------------------------------- 11

fn c11_monotonicity() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x100b);
    let mut done = 0usize;
    while done < 200 {
        let n = rng.gen_range(1..=2usize);
        let abelian = rng.gen_bool(0.3);
        let mut group = GroupDescriptor::toric(n);
        if abelian {
            // Swap the last factor for an abelian-like one (rho = 2).
            let f = group.factors.last_mut().unwrap();
            f.kind = groups::FactorKind::AbelianLike;
            f.rho = 2;
            f.dim = rng.gen_range(1..=2usize).max(2);
            f.deg = rng.gen_range(1..=6u64);
        }
        let g = group.g() as u64;
        let t = rng.gen_range(1..=g);
        let hps: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=30)).collect();
        let us: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=4)).collect();
        let d_field = rng.gen_range(1..=4u64);
        // The evaluator requires a >= D max{1, h(V)}/log e = D here; keep
        // room for the +3 perturbation of D.
        let a = big(d_field as i64 + 3 + rng.gen_range(0..=4i64));
        let mk = |hps: &[i64], us: &[i64], d_field: u64| BoundInput {
            group: group.clone(),
            d_field,
            t,
            h_v: BigRational::zero(),
            curves: hps.iter().map(|&h| HeightCurve::Linear { hp: rat(h) }).collect(),
            place: PlaceData::Arch {
                e_param: EParam::euler(),
                u_norms: us.iter().map(|&u| rat(u)).collect(),
            },
            constants: Constants::default(),
            toric_point: None,
            v_lattice: None,
        };
        let c5 = rat(8);
        let base = bounds::eval_u0(&mk(&hps, &us, d_field), &a, &c5).map_err(|e| e.to_string())?;
        // Perturb one knob upward.
        let knob = rng.gen_range(0..4);
        let pert = match knob {
            0 => {
                let mut h2 = hps.clone();
                let i = rng.gen_range(0..n);
                h2[i] += rng.gen_range(1..=10);
                bounds::eval_u0(&mk(&h2, &us, d_field), &a, &c5)
            }
            1 => {
                let mut u2 = us.clone();
                let i = rng.gen_range(0..n);
                u2[i] += rng.gen_range(1..=3);
                bounds::eval_u0(&mk(&hps, &u2, d_field), &a, &c5)
            }
            2 => {
                let a2 = &a + big(rng.gen_range(1..=4i64));
                bounds::eval_u0(&mk(&hps, &us, d_field), &a2, &c5)
            }
            _ => bounds::eval_u0(&mk(&hps, &us, d_field + rng.gen_range(1..=3u64)), &a, &c5),
        }
        .map_err(|e| e.to_string())?;
        // A certified decrease would be a violation.
        if base.lo() > pert.hi() {
            return Err(format!(
                "case {done}: U0 decreased under knob {knob}: {} -> {}",
                base.to_f64(),
                pert.to_f64()
            ));
        }
        done += 1;
    }
    Ok("200 perturbation pairs: no certified decrease of U0 in h(sp_i), ||u_i||, a, D".into())
}

// ---------------------------------------------------------------- 12

fn c12_end_to_end() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x100c);
    let smooth: Vec<BigRational> = vec![
        rat(2),
        rat(3),
        rat(5),
        rat(7),
        rat2(3, 2),
        rat2(5, 2),
        rat2(7, 5),
        rat2(2, 3),
        rat(6),
        rat(10),
        rat2(9, 7),
        rat(35),
    ];
    let mut done = 0usize;
    let mut worst_gap = f64::INFINITY;
    while done < 20 {
        let a1 = smooth[rng.gen_range(0..smooth.len())].clone();
        let a2 = smooth[rng.gen_range(0..smooth.len())].clone();
        let b = rng.gen_range(-10i64..=10);
        if a1.is_one() || a2.is_one() {
            continue;
        }
        // Lambda = ln a2 - b ln a1 != 0 iff a2 != a1^b (exactly checkable).
        let a1_pow_b = if b >= 0 {
            a1.pow(b as i32)
        } else {
            a1.pow(b as i32)
        };
        if a2 == a1_pow_b {
            continue;
        }
        // Also avoid |ln| of exactly 1 arguments on the log side.
        let hv_hi = {
            // h(V) for V = span{(1, b)}: (1/2) log(1 + b^2); supply an
            // upper rational bound.
            let arg = rat(1 + b * b);
            let l = ln_rational(&arg, 96).map_err(|e| e.to_string())?;
            let half = BigRational::new(BigInt::one(), big(2));
            (l.hi() * &half).clone()
        };
        let u_hi = |x: &BigRational| -> Result<BigRational, String> {
            let l = ln_rational(&x.abs(), 96).map_err(|e| e.to_string())?;
            Ok(l.abs().hi().clone())
        };
        let input = BoundInput {
            group: GroupDescriptor::toric(2),
            d_field: 1,
            t: 1,
            h_v: hv_hi,
            curves: vec![
                HeightCurve::Toric { point: a1.clone() },
                HeightCurve::Toric { point: a2.clone() },
            ],
            place: PlaceData::Arch {
                e_param: EParam::euler(),
                u_norms: vec![u_hi(&a1)?, u_hi(&a2)?],
            },
            constants: Constants::default(),
            toric_point: Some(vec![a1.clone(), a2.clone()]),
            v_lattice: Some(vec![vec![big(1), big(b)]]),
        };
        let ps = bounds::choose_params_arch(&input).map_err(|e| format!("case {done}: {e}"))?;
        let c5 = input.constants.c56_value(2);
        let u0 = bounds::eval_u0(&input, &ps.a_param, &c5).map_err(|e| e.to_string())?;
        // log|Lambda| at 256 bits.
        let mut prec = 256;
        let log_lambda = loop {
            let l1 = ln_rational(&a1.abs(), prec).map_err(|e| e.to_string())?;
            let l2 = ln_rational(&a2.abs(), prec).map_err(|e| e.to_string())?;
            let lambda = l2.sub(&l1.scale(&rat(b)));
            if !lambda.contains_zero() {
                break lambda.abs().ln(prec).map_err(|e| e.to_string())?;
            }
            prec *= 2;
            if prec > 8192 {
                return Err(format!("case {done}: Lambda did not separate from zero"));
            }
        };
        // -c_thm U0 <= log|Lambda| must hold (c_thm = 1).
        let lhs = u0.neg();
        if lhs.lo() > log_lambda.hi() {
            return Err(format!(
                "case {done}: -U0 = {} exceeds log|Lambda| = {} (alpha1={a1}, alpha2={a2}, b={b})",
                lhs.to_f64(),
                log_lambda.to_f64()
            ));
        }
        worst_gap = worst_gap.min(log_lambda.to_f64() - lhs.to_f64());
        done += 1;
    }
    Ok(format!(
        "20 linear forms: -c_thm U0 <= log|Lambda| at 256-bit precision \
         (smallest margin {worst_gap:.1})"
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    // The full battery runs in the acceptance integration test; here only
    // the corpus builders get a sanity check.
    #[test]
    fn corpus_shapes() {
        let corpus = q4_corpus().unwrap();
        assert!(corpus.len() > 500);
        let dims: std::collections::BTreeSet<usize> = corpus.iter().map(|s| s.dim()).collect();
        assert_eq!(dims, [1usize, 2, 3].into_iter().collect());
        // No duplicates.
        let mut keys = std::collections::BTreeSet::new();
        for s in &corpus {
            assert!(keys.insert(s.canonical_key()), "duplicate subspace in corpus");
        }
    }
}
