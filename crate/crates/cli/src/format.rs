//! Fixed textual forms for numbers and the metadata block.

use mdgi_core::dem::Quantization;
use serde::Serialize;

/// `x` with 6 significant digits, like C's `%g`.
pub fn g6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    trim_zeros(&format!("{:.*}", (5 - exp) as usize, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `x` rounded to 6 significant digits as a JSON number.
pub fn json_g6(x: f64) -> serde_json::Value {
    g6(x)
        .parse::<f64>()
        .ok()
        .and_then(serde_json::Number::from_f64)
        .map_or(serde_json::Value::Null, serde_json::Value::Number)
}

/// Unreduced `loss/total`, or `0` for no loss.
pub fn ratio(loss: u64, total: u64) -> String {
    if loss == 0 {
        "0".into()
    } else {
        format!("{loss}/{total}")
    }
}

/// Written into every JSON output.
#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub log_base: &'static str,
    pub pad: &'static str,
    /// Absent for outputs computed from feature tables.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quantization: Option<QuantizationMeta>,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuantizationMeta {
    pub rule: &'static str,
    pub step: f64,
    pub datum: f64,
}

impl Metadata {
    pub fn new(q: &Quantization) -> Metadata {
        Metadata {
            quantization: Some(QuantizationMeta {
                rule: "max(1, floor((z - datum) / step) + 1)",
                step: q.step,
                datum: q.datum,
            }),
            ..Metadata::tables()
        }
    }

    pub fn tables() -> Metadata {
        Metadata {
            tool: "mdgi",
            version: env!("CARGO_PKG_VERSION"),
            log_base: "e",
            pad: "cells outside the domain read as 0",
            quantization: None,
        }
    }
}
