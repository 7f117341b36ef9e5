//! JSON/TSV rendering of an invariants analysis.
//!
//! Keys are sorted (serde_json's default map is ordered) and every real is
//! rounded to 12 significant digits, so identical inputs give identical bytes.

use serde_json::{json, Map, Number, Value};
use shannon_invariants::format::round_sig;
use shannon_invariants::{BoundsReport, InvariantReport, JointDistribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Unit {
    Bits,
    Nats,
}

impl Unit {
    fn scale(self) -> f64 {
        match self {
            Unit::Bits => 1.0,
            Unit::Nats => std::f64::consts::LN_2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Unit::Bits => "bits",
            Unit::Nats => "nats",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

/// Inputs echoed into the report next to the results.
#[derive(Debug, Clone)]
pub struct ReportMeta {
    pub input: String,
    pub n_rows: usize,
    pub target: String,
    pub unit: Unit,
    pub threshold_bits: f64,
}

pub fn real(x: f64) -> Value {
    let r = round_sig(x, 12);
    // no "-0.0" in output
    let r = if r == 0.0 { 0.0 } else { r };
    Number::from_f64(r).map(Value::Number).unwrap_or(Value::Null)
}

fn reals(xs: &[f64], scale: f64) -> Value {
    Value::Array(xs.iter().map(|&x| real(x * scale)).collect())
}

fn bounds_value(b: &BoundsReport) -> Value {
    json!({
        "assumes_nonnegative_atoms": true,
        "min_source_synergy_fraction": real(b.min_source_synergy_fraction),
        "min_proper_redundancy_fraction": real(b.min_proper_redundancy_fraction),
        "min_robustness_fraction": real(b.min_robustness_fraction),
        "min_vulnerability_fraction": real(b.min_vulnerability_fraction),
        "redundancy_predominant": b.redundancy_predominant,
        "synergy_predominant": b.synergy_predominant,
        "robustness_predominant": b.robustness_predominant,
        "vulnerability_predominant": b.vulnerability_predominant,
    })
}

/// The report document. Information quantities are scaled to `meta.unit`;
/// the field names keep their `_bits` suffix regardless.
pub fn document(report: &InvariantReport, dist: &JointDistribution, meta: &ReportMeta) -> Value {
    let s = meta.unit.scale();
    json!({
        "n_sources": report.n_sources,
        "total_mi_bits": real(report.total_mi * s),
        "marginal_mi_bits": reals(&report.marginal_mi, s),
        "conditional_mi_bits": reals(&report.conditional_mi, s),
        "r_bar": report.r_bar.map(real),
        "v_bar": report.v_bar.map(real),
        "rsi_bits": real(report.rsi * s),
        "drsi_bits": real(report.drsi * s),
        "bounds": report.bounds.as_ref().map(bounds_value),
        "well_defined": report.is_well_defined(),
        "metadata": {
            "input": meta.input,
            "n_rows": meta.n_rows,
            "variables": dist.names(),
            "alphabet_sizes": dist.alphabet_sizes(),
            "tool_version": env!("CARGO_PKG_VERSION"),
            "config": {
                "target": meta.target,
                "unit": meta.unit.name(),
                "threshold_bits": real(meta.threshold_bits),
            },
        },
    })
}

pub fn render(doc: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(doc).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Tsv => {
            let mut lines = Vec::new();
            flatten("", doc, &mut lines);
            let mut s = String::new();
            for (k, v) in lines {
                s.push_str(&k);
                s.push('\t');
                s.push_str(&v);
                s.push('\n');
            }
            s
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => flatten_map(prefix, map, out),
        Value::Array(items) => {
            let joined = items.iter().map(scalar).collect::<Vec<_>>().join(",");
            out.push((prefix.to_string(), joined));
        }
        other => out.push((prefix.to_string(), scalar(other))),
    }
}

fn flatten_map(prefix: &str, map: &Map<String, Value>, out: &mut Vec<(String, String)>) {
    for (k, v) in map {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        flatten(&key, v, out);
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "null".into(),
        other => other.to_string(),
    }
}
