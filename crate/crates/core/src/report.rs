//! Run reports emitted by the CLI, as line-oriented text or JSON.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

/// A real number that survives JSON round trips even when non-finite
/// (`inf`, `-inf` and `nan` are written as strings).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let x = self.0;
        if x.is_finite() {
            s.serialize_f64(x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct RealVisitor;
        impl Visitor<'_> for RealVisitor {
            type Value = Real;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Real, E> {
                Ok(Real(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Real, E> {
                match v {
                    "inf" => Ok(Real(f64::INFINITY)),
                    "-inf" => Ok(Real(f64::NEG_INFINITY)),
                    "nan" => Ok(Real(f64::NAN)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(RealVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReportValue {
    Bool(bool),
    Int(i64),
    Real(Real),
    Text(String),
}

impl From<f64> for ReportValue {
    fn from(x: f64) -> Self {
        ReportValue::Real(Real(x))
    }
}
impl From<bool> for ReportValue {
    fn from(b: bool) -> Self {
        ReportValue::Bool(b)
    }
}
impl From<u64> for ReportValue {
    fn from(n: u64) -> Self {
        ReportValue::Int(n as i64)
    }
}
impl From<u32> for ReportValue {
    fn from(n: u32) -> Self {
        ReportValue::Int(i64::from(n))
    }
}
impl From<usize> for ReportValue {
    fn from(n: usize) -> Self {
        ReportValue::Int(n as i64)
    }
}
impl From<String> for ReportValue {
    fn from(s: String) -> Self {
        ReportValue::Text(s)
    }
}
impl From<&str> for ReportValue {
    fn from(s: &str) -> Self {
        ReportValue::Text(s.to_owned())
    }
}

impl ReportValue {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            ReportValue::Real(Real(x)) => Some(*x),
            ReportValue::Int(n) => Some(*n as f64),
            _ => None,
        }
    }

    /// Exact rendering, used for echoed parameters.
    fn exact(&self) -> String {
        match self {
            ReportValue::Bool(b) => b.to_string(),
            ReportValue::Int(n) => n.to_string(),
            ReportValue::Real(Real(x)) => format_real_exact(*x),
            ReportValue::Text(s) => s.clone(),
        }
    }

    /// Six-significant-digit rendering, used for results.
    fn rounded(&self) -> String {
        match self {
            ReportValue::Real(Real(x)) => format_sig(*x, 6),
            other => other.exact(),
        }
    }
}

fn format_real_exact(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        let s = format!("{x:?}");
        s.strip_suffix(".0").map(str::to_owned).unwrap_or(s)
    }
}

/// `%g`-style formatting with `digits` significant digits.
pub fn format_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return format_real_exact(x);
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("LowerExp always has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        format!("{mantissa}e{exp}")
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_owned()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::ClosedForm => "closed-form",
            Provenance::Quadrature => "quadrature",
            Provenance::MonteCarlo => "monte-carlo",
        }
    }
}

pub type ValueMap = BTreeMap<String, ReportValue>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub parameters: ValueMap,
    pub results: ValueMap,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<ValueMap>,
    pub provenance: Vec<Provenance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partitions: Option<u32>,
}

impl RunReport {
    pub fn new(command: &str, provenance: &[Provenance]) -> Self {
        Self {
            command: command.to_owned(),
            parameters: ValueMap::new(),
            results: ValueMap::new(),
            rows: Vec::new(),
            provenance: provenance.to_vec(),
            seed: None,
            samples: None,
            partitions: None,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<ReportValue>) -> &mut Self {
        self.parameters.insert(key.to_owned(), value.into());
        self
    }

    pub fn result(&mut self, key: &str, value: impl Into<ReportValue>) -> &mut Self {
        self.results.insert(key.to_owned(), value.into());
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// Line-oriented rendering: `key = value` blocks, parameters exact and
    /// results to six significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        let prov: Vec<&str> = self.provenance.iter().map(|p| p.as_str()).collect();
        let _ = writeln!(out, "provenance: {}", prov.join(", "));
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "seed: {seed}");
        }
        if let Some(n) = self.samples {
            let _ = writeln!(out, "samples: {n}");
        }
        if let Some(k) = self.partitions {
            let _ = writeln!(out, "partitions: {k}");
        }
        if !self.parameters.is_empty() {
            out.push_str("parameters:\n");
            for (k, v) in &self.parameters {
                let _ = writeln!(out, "  {k} = {}", v.exact());
            }
        }
        if !self.results.is_empty() {
            out.push_str("results:\n");
            for (k, v) in &self.results {
                let _ = writeln!(out, "  {k} = {}", v.rounded());
            }
        }
        out
    }
}
