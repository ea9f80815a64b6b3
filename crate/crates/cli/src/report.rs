//! Report values: every numeric output carries a float view, an exact
//! form when one exists, and a provenance tag.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use linlog_core::heights::LogValue;
use linlog_core::ratio::{format_rational, rational_to_f64};
use linlog_core::RealInterval;

pub fn exact_rational(q: &BigRational) -> Value {
    json!({
        "float": rational_to_f64(q),
        "exact": format_rational(q),
        "provenance": "exact",
    })
}

pub fn exact_integer(n: &BigInt) -> Value {
    json!({
        "float": rational_to_f64(&BigRational::from_integer(n.clone())),
        "exact": n.to_string(),
        "provenance": "exact",
    })
}

pub fn log_value(v: &LogValue) -> Value {
    json!({
        "float": v.approx,
        "exact": { "arg": format_rational(&v.argument), "half": v.half },
        "provenance": "exact",
    })
}

pub fn interval(iv: &RealInterval) -> Value {
    if let Some(q) = iv.as_exact() {
        return exact_rational(q);
    }
    json!({
        "float": iv.to_f64(),
        "interval": [format_rational(iv.lo()), format_rational(iv.hi())],
        "provenance": "interval",
    })
}

pub fn sampled(f: f64) -> Value {
    json!({ "float": f, "provenance": "sampled" })
}

/// Assembles the standard report envelope.
pub fn envelope(request: Value, results: Value, warnings: Vec<String>) -> Value {
    let mut m = Map::new();
    m.insert("request".into(), request);
    m.insert("results".into(), results);
    m.insert("warnings".into(), json!(warnings));
    Value::Object(m)
}
