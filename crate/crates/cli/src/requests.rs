//! JSON request schemas and their conversions into core types. Exact
//! rationals travel as strings (`"3/5"`); plain integers are accepted
//! where convenient.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Deserialize;
use serde_json::Value;

use linlog_core::auxsys::{BasisFamily, SystemSpec};
use linlog_core::bounds::{BoundInput, EParam, HeightCurve, PlaceData};
use linlog_core::groups::GroupDescriptor;
use linlog_core::heights::{ProjVector, Subspace};
use linlog_core::interp::{AnalyticSample, PadicSeries, PolyExpTerm};
use linlog_core::polybasis::UniPoly;
use linlog_core::ratio::parse_rational;

pub fn rational_of(v: &Value, what: &str) -> Result<BigRational, String> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|e| format!("{what}: {e}")),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigRational::from_integer(i.into()))
            } else if let Some(f) = n.as_f64() {
                BigRational::from_float(f).ok_or_else(|| format!("{what}: non-finite number"))
            } else {
                Err(format!("{what}: unsupported number"))
            }
        }
        _ => Err(format!("{what}: expected a rational (string or number)")),
    }
}

pub fn integer_of(v: &Value, what: &str) -> Result<BigInt, String> {
    let q = rational_of(v, what)?;
    if !q.is_integer() {
        return Err(format!("{what}: expected an integer"));
    }
    Ok(q.to_integer())
}

pub fn rational_vec(v: &Value, what: &str) -> Result<Vec<BigRational>, String> {
    let arr = v
        .as_array()
        .ok_or_else(|| format!("{what}: expected an array"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| rational_of(x, &format!("{what}[{i}]")))
        .collect()
}

pub fn integer_matrix(v: &Value, what: &str) -> Result<Vec<Vec<BigInt>>, String> {
    let arr = v
        .as_array()
        .ok_or_else(|| format!("{what}: expected an array of rows"))?;
    arr.iter()
        .enumerate()
        .map(|(i, row)| {
            let r = row
                .as_array()
                .ok_or_else(|| format!("{what}[{i}]: expected an array"))?;
            r.iter()
                .enumerate()
                .map(|(j, x)| integer_of(x, &format!("{what}[{i}][{j}]")))
                .collect()
        })
        .collect()
}

/// A projective vector given as `["1","2"]` or `{"coords": [...]}`.
pub fn proj_vector(v: &Value) -> Result<ProjVector, String> {
    let coords = match v {
        Value::Object(m) => rational_vec(
            m.get("coords").ok_or("vector: missing field `coords`")?,
            "coords",
        )?,
        other => rational_vec(other, "vector")?,
    };
    ProjVector::new(coords).map_err(|e| e.to_string())
}

/// A subspace given as `{"ambient": m, "basis": [[..], ..]}`.
pub fn subspace(v: &Value) -> Result<Subspace, String> {
    let m = v.as_object().ok_or("subspace: expected an object")?;
    let ambient = m
        .get("ambient")
        .and_then(Value::as_u64)
        .ok_or("subspace: missing integer field `ambient`")? as usize;
    let basis_val = m.get("basis").ok_or("subspace: missing field `basis`")?;
    let rows = basis_val
        .as_array()
        .ok_or("subspace: `basis` must be an array of rows")?;
    let rat_rows: Result<Vec<Vec<BigRational>>, String> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| rational_vec(r, &format!("basis[{i}]")))
        .collect();
    Subspace::from_rational_rows(rat_rows?, ambient).map_err(|e| e.to_string())
}

pub fn unipoly(v: &Value, what: &str) -> Result<UniPoly, String> {
    Ok(UniPoly::new(rational_vec(v, what)?))
}

pub fn e_param(v: &Value) -> Result<EParam, String> {
    match v {
        Value::String(s) if s == "euler" || s == "e" => Ok(EParam::euler()),
        Value::Object(m) => {
            if let Some(k) = m.get("euler_pow") {
                Ok(EParam::EulerPow(rational_of(k, "euler_pow")?))
            } else if let Some(q) = m.get("rational") {
                Ok(EParam::Rational(rational_of(q, "rational")?))
            } else {
                Err("e parameter: expected `euler_pow` or `rational`".into())
            }
        }
        other => Ok(EParam::Rational(rational_of(other, "e parameter")?)),
    }
}

fn height_curve(v: &Value, what: &str) -> Result<HeightCurve, String> {
    let m = v
        .as_object()
        .ok_or_else(|| format!("{what}: expected an object"))?;
    if let Some(p) = m.get("toric") {
        Ok(HeightCurve::Toric {
            point: rational_of(p, &format!("{what}.toric"))?,
        })
    } else if let Some(h) = m.get("linear") {
        Ok(HeightCurve::Linear {
            hp: rational_of(h, &format!("{what}.linear"))?,
        })
    } else if let Some(t) = m.get("table") {
        Ok(HeightCurve::Table {
            values: rational_vec(t, &format!("{what}.table"))?,
        })
    } else {
        Err(format!("{what}: expected `toric`, `linear` or `table`"))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundRequestRaw {
    group: GroupDescriptor,
    d_field: u64,
    t: u64,
    h_v: Value,
    curves: Vec<Value>,
    place: Value,
    #[serde(default)]
    point: Option<Value>,
    #[serde(default)]
    v_lattice: Option<Value>,
    /// Optional explicit `a` for the bound evaluators.
    #[serde(default)]
    pub a: Option<u64>,
    /// Optional explicit theorem constant for the height max range.
    #[serde(default)]
    pub c5: Option<Value>,
}

pub struct BoundRequest {
    pub input: BoundInput,
    pub a: Option<BigInt>,
    pub c5: Option<BigRational>,
}

pub fn bound_request(
    v: &Value,
    constants: linlog_core::bounds::Constants,
) -> Result<BoundRequest, String> {
    let raw: BoundRequestRaw = serde_json::from_value(v.clone()).map_err(|e| e.to_string())?;
    let curves: Result<Vec<HeightCurve>, String> = raw
        .curves
        .iter()
        .enumerate()
        .map(|(i, c)| height_curve(c, &format!("curves[{i}]")))
        .collect();
    let place_obj = raw.place.as_object().ok_or("place: expected an object")?;
    let place = if let Some(a) = place_obj.get("arch") {
        let am = a.as_object().ok_or("place.arch: expected an object")?;
        PlaceData::Arch {
            e_param: e_param(am.get("e").ok_or("place.arch: missing `e`")?)?,
            u_norms: rational_vec(
                am.get("u_norms").ok_or("place.arch: missing `u_norms`")?,
                "u_norms",
            )?,
        }
    } else if let Some(u) = place_obj.get("ultra") {
        let um = u.as_object().ok_or("place.ultra: expected an object")?;
        PlaceData::Ultra {
            p: um
                .get("p")
                .and_then(Value::as_u64)
                .ok_or("place.ultra: missing prime `p`")?,
            r: rational_of(um.get("r").ok_or("place.ultra: missing `r`")?, "r")?,
            u_norm: rational_of(
                um.get("u_norm").ok_or("place.ultra: missing `u_norm`")?,
                "u_norm",
            )?,
        }
    } else {
        return Err("place: expected `arch` or `ultra`".into());
    };
    let toric_point = match &raw.point {
        None => None,
        Some(p) => Some(rational_vec(p, "point")?),
    };
    let v_lattice = match &raw.v_lattice {
        None => None,
        Some(l) => Some(integer_matrix(l, "v_lattice")?),
    };
    let input = BoundInput {
        group: raw.group,
        d_field: raw.d_field,
        t: raw.t,
        h_v: rational_of(&raw.h_v, "h_v")?,
        curves: curves?,
        place,
        constants,
        toric_point,
        v_lattice,
    };
    input.validate().map_err(|e| e.to_string())?;
    let c5 = match &raw.c5 {
        None => None,
        Some(c) => Some(rational_of(c, "c5")?),
    };
    Ok(BoundRequest {
        input,
        a: raw.a.map(BigInt::from),
        c5,
    })
}

pub fn system_spec(v: &Value) -> Result<SystemSpec, String> {
    let m = v.as_object().ok_or("system: expected an object")?;
    let degrees: Vec<u64> = m
        .get("degrees")
        .and_then(Value::as_array)
        .ok_or("system: missing array `degrees`")?
        .iter()
        .map(|d| d.as_u64().ok_or_else(|| "degrees: expected naturals".to_string()))
        .collect::<Result<_, _>>()?;
    let family = match m.get("family") {
        None => BasisFamily::Monomial,
        Some(Value::String(s)) if s == "monomial" => BasisFamily::Monomial,
        Some(Value::Object(fm)) => {
            let d_flat = fm
                .get("matveev")
                .and_then(Value::as_u64)
                .ok_or("family: expected {\"matveev\": d_flat}")?;
            BasisFamily::Matveev {
                d_flat: d_flat as usize,
            }
        }
        Some(other) => return Err(format!("family: unsupported value {other}")),
    };
    let alphas = rational_vec(m.get("alphas").ok_or("system: missing `alphas`")?, "alphas")?;
    let v_lattice = match m.get("v_lattice") {
        None => Vec::new(),
        Some(l) => integer_matrix(l, "v_lattice")?,
    };
    let s1 = m
        .get("s1")
        .and_then(Value::as_u64)
        .ok_or("system: missing natural `s1`")?;
    let t1 = m
        .get("t1")
        .and_then(Value::as_u64)
        .ok_or("system: missing natural `t1`")?;
    Ok(SystemSpec {
        degrees,
        family,
        alphas,
        v_lattice,
        s1,
        t1,
    })
}

pub fn analytic_sample(v: &Value) -> Result<AnalyticSample, String> {
    let m = v.as_object().ok_or("sample: expected an object")?;
    if let Some(p) = m.get("poly") {
        return AnalyticSample::polynomial(unipoly(p, "poly")?).map_err(|e| e.to_string());
    }
    let terms = m
        .get("terms")
        .and_then(Value::as_array)
        .ok_or("sample: expected `poly` or `terms`")?;
    let parsed: Result<Vec<PolyExpTerm>, String> = terms
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let tm = t
                .as_object()
                .ok_or_else(|| format!("terms[{i}]: expected an object"))?;
            Ok(PolyExpTerm {
                poly: unipoly(
                    tm.get("poly")
                        .ok_or_else(|| format!("terms[{i}]: missing `poly`"))?,
                    "poly",
                )?,
                frequency: rational_of(
                    tm.get("frequency")
                        .ok_or_else(|| format!("terms[{i}]: missing `frequency`"))?,
                    "frequency",
                )?,
            })
        })
        .collect();
    AnalyticSample::new(parsed?).map_err(|e| e.to_string())
}

pub fn padic_series(v: &Value) -> Result<PadicSeries, String> {
    let m = v.as_object().ok_or("series: expected an object")?;
    let p = m
        .get("p")
        .and_then(Value::as_u64)
        .ok_or("series: missing prime `p`")?;
    let coeffs = rational_vec(m.get("coeffs").ok_or("series: missing `coeffs`")?, "coeffs")?;
    let radius = rational_of(m.get("radius").ok_or("series: missing `radius`")?, "radius")?;
    let mut s = PadicSeries::polynomial(p, coeffs, radius).map_err(|e| e.to_string())?;
    if let Some(t) = m.get("tail_bound") {
        if !t.is_null() {
            s.tail_bound = Some(rational_of(t, "tail_bound")?);
        }
    }
    Ok(s)
}
