//! Check records, the JSON machine report and the CSV rows.
//!
//! JSON schema `divcorr-report/1`: one top-level object with keys
//! `schema`, `mode`, `settings` (string map echoing the configuration),
//! `checks` (array) and `summary` (`total`, `passed`, `failed`). Each check
//! is an object with `suite`, `instance`, `verdict` (`pass` or `fail`),
//! `detail` (map of numbers, strings or booleans) and `message` (string or
//! null). Object keys are sorted and nothing run-dependent such as timing is
//! included, so identical runs give identical bytes.

use std::collections::BTreeMap;
use std::io::Write;

use divcorr_core::numeric::MomentReport;
use serde_json::{json, Map, Value};

pub const SCHEMA: &str = "divcorr-report/1";

#[derive(Clone, Debug, PartialEq)]
pub struct CheckRecord {
    pub suite: String,
    pub instance: String,
    pub passed: bool,
    pub detail: BTreeMap<String, Value>,
    pub message: Option<String>,
}

impl CheckRecord {
    pub fn new(suite: impl Into<String>, instance: impl Into<String>, passed: bool) -> Self {
        CheckRecord {
            suite: suite.into(),
            instance: instance.into(),
            passed,
            detail: BTreeMap::new(),
            message: None,
        }
    }

    /// A check that could not be computed.
    pub fn failed(suite: impl Into<String>, instance: impl Into<String>, message: impl ToString) -> Self {
        let mut r = Self::new(suite, instance, false);
        r.message = Some(message.to_string());
        r
    }

    pub fn with(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.detail.insert(key.to_string(), v.into());
        self
    }

    /// Non-finite floats are not JSON numbers; they go in as strings.
    pub fn with_f64(self, key: &str, v: f64) -> Self {
        if v.is_finite() {
            self.with(key, v)
        } else {
            self.with(key, v.to_string())
        }
    }

    pub fn verdict(&self) -> &'static str {
        if self.passed {
            "pass"
        } else {
            "fail"
        }
    }

    fn to_json(&self) -> Value {
        json!({
            "suite": self.suite,
            "instance": self.instance,
            "verdict": self.verdict(),
            "detail": Value::Object(self.detail.clone().into_iter().collect::<Map<_, _>>()),
            "message": self.message,
        })
    }

    /// One line of the human table.
    pub fn table_row(&self) -> String {
        let detail: Vec<String> = self
            .detail
            .iter()
            .map(|(k, v)| match v {
                Value::String(s) => format!("{k}={s}"),
                other => format!("{k}={other}"),
            })
            .collect();
        let mut line = format!("{:<4}  {:<18} {}", self.verdict(), self.suite, self.instance);
        if !detail.is_empty() {
            line.push_str("  [");
            line.push_str(&detail.join(" "));
            line.push(']');
        }
        if let Some(m) = &self.message {
            line.push_str("  ! ");
            line.push_str(m);
        }
        line
    }
}

/// Whole-run JSON document.
pub fn report_json(mode: &str, settings: &BTreeMap<String, String>, checks: &[CheckRecord]) -> Value {
    let passed = checks.iter().filter(|c| c.passed).count();
    json!({
        "schema": SCHEMA,
        "mode": mode,
        "settings": settings,
        "checks": checks.iter().map(CheckRecord::to_json).collect::<Vec<_>>(),
        "summary": { "total": checks.len(), "passed": passed, "failed": checks.len() - passed },
    })
}

/// Pretty JSON with a trailing newline.
pub fn write_json<W: Write>(w: W, doc: &Value) -> std::io::Result<()> {
    let mut w = w;
    serde_json::to_writer_pretty(&mut w, doc)?;
    writeln!(w)
}

/// CSV rows `method, value_re, value_im, error, params`; params are `key=value` joined by `;`.
pub fn write_csv<W: Write>(w: W, rows: &[MomentReport]) -> Result<(), csv::Error> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["method", "value_re", "value_im", "error", "params"])?;
    for r in rows {
        let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.write_record([
            r.method.tag().to_string(),
            format!("{:e}", r.value.re),
            format!("{:e}", r.value.im),
            format!("{:e}", r.error),
            params.join(";"),
        ])?;
    }
    out.flush()?;
    Ok(())
}
