//! TOML configuration: every non-explicit constant of the machinery in
//! one place, with defaults. Unknown keys are rejected; malformed files
//! exit with code 78 and line diagnostics.

use num_rational::BigRational;
use serde::Deserialize;

use linlog_core::bounds::{C56Rule, Constants};
use linlog_core::ratio::parse_rational;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub c0: Option<u64>,
    pub c_thm: Option<f64>,
    /// `"paper"` for `(g+1) C0^6`, or an explicit number.
    pub c56: Option<toml::Value>,
    pub chi_h_cap: Option<f64>,
    pub weight_c: Option<f64>,
    pub siegel_search_box: Option<u64>,
    pub subgroup_lattice_bound: Option<i64>,
    pub float_precision_bits: Option<u32>,
    pub factor_bound: Option<u64>,
    pub samples: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Config {
    pub constants: Constants,
    pub chi_h_cap: f64,
    pub factor_bound: u64,
    pub samples: usize,
    pub siegel_search_box: u64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            constants: Constants::default(),
            chi_h_cap: 1.0,
            factor_bound: linlog_core::heights::DEFAULT_FACTOR_BOUND,
            samples: 256,
            siegel_search_box: 3,
        }
    }
}

fn rational_from_f64(v: f64, what: &str) -> Result<BigRational, String> {
    BigRational::from_float(v).ok_or_else(|| format!("{what}: {v} is not a finite number"))
}

pub fn parse_config(text: &str) -> Result<Config, String> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| e.to_string())?;
    let mut cfg = Config::default();
    if let Some(c0) = file.c0 {
        if c0 < 2 {
            return Err("c0 must be at least 2".into());
        }
        cfg.constants.c0 = c0;
    }
    if let Some(c) = file.c_thm {
        if c <= 0.0 {
            return Err("c_thm must be positive".into());
        }
        cfg.constants.c_thm = rational_from_f64(c, "c_thm")?;
    }
    if let Some(v) = file.c56 {
        cfg.constants.c56 = match v {
            toml::Value::String(s) if s == "paper" => C56Rule::Paper,
            toml::Value::Float(f) => C56Rule::Explicit(rational_from_f64(f, "c56")?),
            toml::Value::Integer(i) => C56Rule::Explicit(BigRational::from_integer(i.into())),
            toml::Value::String(s) => C56Rule::Explicit(
                parse_rational(&s).map_err(|e| format!("c56: {e}"))?,
            ),
            other => return Err(format!("c56: unsupported value {other}")),
        };
    }
    if let Some(c) = file.chi_h_cap {
        if c < 0.0 {
            return Err("chi_h_cap must be >= 0".into());
        }
        cfg.chi_h_cap = c;
        cfg.constants.chi_cap = rational_from_f64(c, "chi_h_cap")?;
    }
    if let Some(c) = file.weight_c {
        if c < 1.0 {
            return Err("weight_c must be >= 1".into());
        }
        cfg.constants.weight_c = rational_from_f64(c, "weight_c")?;
    }
    if let Some(b) = file.siegel_search_box {
        cfg.siegel_search_box = b;
    }
    if let Some(b) = file.subgroup_lattice_bound {
        if b < 1 {
            return Err("subgroup_lattice_bound must be >= 1".into());
        }
        cfg.constants.subgroup_lattice_bound = b;
    }
    if let Some(p) = file.float_precision_bits {
        if p < 53 {
            return Err("float_precision_bits must be >= 53".into());
        }
        cfg.constants.prec = p;
    }
    if let Some(b) = file.factor_bound {
        cfg.factor_bound = b;
    }
    if let Some(s) = file.samples {
        cfg.samples = s;
    }
    Ok(cfg)
}

pub fn load(path: Option<&str>, precision_override: Option<u32>) -> Result<Config, String> {
    let path = path
        .map(|s| s.to_string())
        .or_else(|| std::env::var("LINLOG_CONFIG").ok());
    let mut cfg = match path {
        None => Config::default(),
        Some(p) => {
            let text =
                std::fs::read_to_string(&p).map_err(|e| format!("cannot read {p}: {e}"))?;
            parse_config(&text)?
        }
    };
    if let Some(prec) = precision_override {
        if prec < 53 {
            return Err("--precision must be >= 53".into());
        }
        cfg.constants.prec = prec;
    }
    Ok(cfg)
}
