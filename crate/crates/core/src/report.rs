//! Verification reports and their JSON Lines / CSV encodings.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::Serialize;
use serde_json::Value;

/// Lower bound on `|reference|` in the relative error.
pub const REL_ERR_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub case_id: String,
    pub params: BTreeMap<String, Value>,
    pub computed: f64,
    pub reference: f64,
    pub rel_err: f64,
    pub pass: bool,
    pub notes: String,
}

pub fn rel_err(computed: f64, reference: f64) -> f64 {
    let e = (computed - reference).abs() / reference.abs().max(REL_ERR_FLOOR);
    if e.is_nan() {
        f64::INFINITY
    } else {
        e
    }
}

impl VerificationReport {
    /// Equality check: passes when `rel_err(computed, reference) <= tol`.
    pub fn compare(case_id: &str, computed: f64, reference: f64, tol: f64) -> Self {
        let rel_err = rel_err(computed, reference);
        Self {
            case_id: case_id.to_string(),
            params: BTreeMap::new(),
            computed,
            reference,
            rel_err,
            pass: rel_err <= tol,
            notes: String::new(),
        }
    }

    /// Inequality check `lower <= upper`. `computed` is the violation
    /// `max(lower - upper, 0)` and `reference` the scale it is measured
    /// against, so `pass ⇔ rel_err <= tol` still holds.
    pub fn inequality(case_id: &str, lower: f64, upper: f64, scale: f64, tol: f64) -> Self {
        let violation = if lower.is_nan() || upper.is_nan() { f64::INFINITY } else { (lower - upper).max(0.0) };
        let reference = scale.abs().max(REL_ERR_FLOOR);
        let rel_err = violation / reference;
        Self {
            case_id: case_id.to_string(),
            params: BTreeMap::new(),
            computed: violation,
            reference,
            rel_err,
            pass: rel_err <= tol,
            notes: String::new(),
        }
    }

    /// A failed case that could not be computed.
    pub fn failure(case_id: &str, notes: impl Into<String>) -> Self {
        Self {
            case_id: case_id.to_string(),
            params: BTreeMap::new(),
            computed: f64::NAN,
            reference: f64::NAN,
            rel_err: f64::INFINITY,
            pass: false,
            notes: notes.into(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn note(mut self, text: impl AsRef<str>) -> Self {
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str(text.as_ref());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Jsonl,
    Csv,
}

/// JSON has no NaN or infinity; they are written as strings.
fn number(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else {
        Value::from(x.to_string())
    }
}

fn report_value(r: &VerificationReport) -> Value {
    let mut map = serde_json::Map::new();
    map.insert("case_id".into(), Value::from(r.case_id.clone()));
    map.insert("params".into(), serde_json::to_value(&r.params).expect("params are plain JSON"));
    map.insert("computed".into(), number(r.computed));
    map.insert("reference".into(), number(r.reference));
    map.insert("rel_err".into(), number(r.rel_err));
    map.insert("pass".into(), Value::from(r.pass));
    map.insert("notes".into(), Value::from(r.notes.clone()));
    Value::Object(map)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_reports<W: Write + ?Sized>(out: &mut W, reports: &[VerificationReport], format: Format) -> io::Result<()> {
    match format {
        Format::Jsonl => {
            for r in reports {
                writeln!(out, "{}", report_value(r))?;
            }
        }
        Format::Csv => {
            writeln!(out, "case_id,params,computed,reference,rel_err,pass,notes")?;
            for r in reports {
                let params = serde_json::to_string(&r.params).expect("params are plain JSON");
                writeln!(
                    out,
                    "{},{},{:e},{:e},{:e},{},{}",
                    csv_field(&r.case_id),
                    csv_field(&params),
                    r.computed,
                    r.reference,
                    r.rel_err,
                    r.pass,
                    csv_field(&r.notes)
                )?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rel_err_uses_floor() {
        assert_eq!(rel_err(0.0, 0.0), 0.0);
        assert!(rel_err(1e-310, 0.0) > 0.0);
        assert!((rel_err(1.1, 1.0) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn inequality_report_passes_iff_within_tol() {
        assert!(VerificationReport::inequality("x", 1.0, 2.0, 1.0, 0.0).pass);
        assert!(!VerificationReport::inequality("x", 2.0, 1.0, 1.0, 1e-6).pass);
        assert!(!VerificationReport::inequality("x", f64::NAN, 1.0, 1.0, 1e-6).pass);
    }

    #[test]
    fn csv_quotes_params() {
        let r = VerificationReport::compare("c", 1.0, 1.0, 1e-9).param("dim", 3).param("p", 1.5);
        let mut buf = Vec::new();
        write_reports(&mut buf, &[r], Format::Csv).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap().starts_with("c,\"{\"\"dim\"\":3,\"\"p\"\":1.5}\""));
    }

    #[test]
    fn jsonl_encodes_nan_as_string() {
        let r = VerificationReport::failure("c", "boom");
        let mut buf = Vec::new();
        write_reports(&mut buf, &[r], Format::Jsonl).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["computed"], "NaN");
        assert_eq!(v["pass"], false);
    }
}
