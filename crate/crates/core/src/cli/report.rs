//! Human-readable and JSON reports.

use serde_json::{json, Map, Value};

use crate::algebra::{HC0Class, K0Class};
use crate::spectral::SpectralFunction;
use crate::C64;

/// A report under construction: text lines plus JSON fields.
#[derive(Debug, Clone)]
pub struct Report {
    verb: String,
    lines: Vec<String>,
    fields: Map<String, Value>,
}

impl Report {
    pub fn new(verb: &str) -> Self {
        Report { verb: verb.to_string(), lines: Vec::new(), fields: Map::new() }
    }

    pub fn line(&mut self, s: impl Into<String>) -> &mut Self {
        self.lines.push(s.into());
        self
    }

    pub fn set(&mut self, key: &str, value: Value) -> &mut Self {
        self.fields.insert(key.to_string(), value);
        self
    }

    /// The text report; `timestamp` adds a header line.
    pub fn text(&self, timestamp: Option<u64>) -> String {
        let mut out = String::new();
        if let Some(t) = timestamp {
            out.push_str(&format!("# wstar {} at unix time {t}\n", self.verb));
        }
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        out
    }

    pub fn json(&self, timestamp: Option<u64>) -> String {
        let mut fields = Map::new();
        fields.insert("verb".into(), json!(self.verb));
        fields.insert("timestamp".into(), json!(timestamp));
        for (k, v) in &self.fields {
            fields.insert(k.clone(), v.clone());
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(fields)).expect("reports serialize");
        s.push('\n');
        s
    }
}

pub fn complex_json(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn k0_json(k: &K0Class) -> Value {
    json!(k.ranks)
}

pub fn hc0_json(h: &HC0Class) -> Value {
    Value::Array(h.traces.iter().map(|&z| complex_json(z)).collect())
}

pub fn function_json(f: &SpectralFunction) -> Value {
    Value::Array(f.support().iter().map(|(a, c)| json!({ "angle": a, "class": c.ranks })).collect())
}

/// Rows `angle  class` of a spectral function.
pub fn function_table(f: &SpectralFunction) -> Vec<String> {
    if f.is_zero() {
        return vec!["  (empty support)".into()];
    }
    f.support().iter().map(|(a, c)| format!("  φ = {a:.9}  class {c}")).collect()
}
