//! Check records and suite reports.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// Outcome of one check on one structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backend: Option<String>,
    pub points: usize,
    pub failures: usize,
    pub pass: bool,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl CheckReport {
    pub fn new(check: &str, points: usize, failures: usize, seed: u64) -> Self {
        CheckReport {
            check: check.to_string(),
            structure: None,
            backend: None,
            points,
            failures,
            pass: failures == 0,
            seed,
            detail: None,
            timing_ms: None,
        }
    }

    pub fn with_structure(mut self, label: impl Into<String>) -> Self {
        self.structure = Some(label.into());
        self
    }

    pub fn with_backend(mut self, backend: impl ToString) -> Self {
        self.backend = Some(backend.to_string());
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Text,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            other => Err(format!("unknown format {other:?} (expected json or text)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<CheckReport>,
    pub pass: bool,
}

impl Report {
    pub fn new(checks: Vec<CheckReport>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Report { checks, pass }
    }

    pub fn push(&mut self, c: CheckReport) {
        self.checks.push(c);
        self.pass = self.checks.iter().all(|c| c.pass);
    }

    pub fn extend(&mut self, cs: impl IntoIterator<Item = CheckReport>) {
        for c in cs {
            self.push(c);
        }
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }

    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("report serializes"),
            Format::Text => self.to_text(),
        }
    }

    fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.pass { "PASS" } else { "FAIL" };
            let _ = write!(out, "{status} {}", c.check);
            if let Some(s) = &c.structure {
                let _ = write!(out, " [{s}]");
            }
            if let Some(b) = &c.backend {
                let _ = write!(out, " field={b}");
            }
            let _ = write!(out, " points={} failures={}", c.points, c.failures);
            if let Some(t) = c.timing_ms {
                let _ = write!(out, " {t:.1}ms");
            }
            if let Some(d) = &c.detail {
                let _ = write!(out, " ({d})");
            }
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "{} checks, {} failed: {}",
            self.checks.len(),
            self.failures(),
            if self.pass { "PASS" } else { "FAIL" }
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report() {
        let r = Report::new(vec![]);
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"checks":[],"pass":true}"#
        );
    }

    #[test]
    fn minimal_check_shape() {
        let c = CheckReport::new("aybe", 25, 0, 7);
        assert_eq!(
            serde_json::to_string(&c).unwrap(),
            r#"{"check":"aybe","points":25,"failures":0,"pass":true,"seed":7}"#
        );
    }

    #[test]
    fn one_failure_fails_the_report() {
        let mut r = Report::new(vec![CheckReport::new("skew", 3, 0, 1)]);
        assert!(r.pass);
        r.push(CheckReport::new("aybe", 3, 1, 1));
        assert!(!r.pass);
        assert_eq!(r.failures(), 1);
        assert!(r.emit(Format::Text).contains("FAIL aybe"));
    }
}
