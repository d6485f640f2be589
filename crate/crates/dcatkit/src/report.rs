//! Structured findings shared by the validator, the profile linter, the
//! ingester diagnostics and harvest runs.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Severity {
    #[serde(rename = "ERROR")]
    Error,
    #[serde(rename = "WARNING")]
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Error => write!(f, "ERROR"),
            Severity::Warning => write!(f, "WARNING"),
        }
    }
}

/// Rule identifiers carried by findings.
pub mod rules {
    pub const UNKNOWN_SLOT: &str = "UNKNOWN_SLOT";
    pub const CARDINALITY: &str = "CARDINALITY";
    pub const RANGE_CLASS: &str = "RANGE_CLASS";
    pub const RANGE_DATATYPE: &str = "RANGE_DATATYPE";
    pub const ABSTRACT_INSTANTIATION: &str = "ABSTRACT_INSTANTIATION";

    pub const DUPLICATE_SEMANTICS: &str = "DUPLICATE_SEMANTICS";
    pub const BROADENED_CARDINALITY: &str = "BROADENED_CARDINALITY";
    pub const MANDATORY_DROPPED: &str = "MANDATORY_DROPPED";

    pub const NO_TARGET: &str = "NO_TARGET";
    pub const NO_CONSTRAINT: &str = "NO_CONSTRAINT";
    pub const MULTIPLE_CONSTRAINTS: &str = "MULTIPLE_CONSTRAINTS";
    pub const DATATYPE_UNION_FALLBACK: &str = "DATATYPE_UNION_FALLBACK";
    pub const MIXED_OR_FALLBACK: &str = "MIXED_OR_FALLBACK";
    pub const UNSUPPORTED_KEYWORD: &str = "UNSUPPORTED_KEYWORD";
    pub const UNSUPPORTED_CONSTRAINT: &str = "UNSUPPORTED_CONSTRAINT";
    pub const UNSUPPORTED_DATATYPE: &str = "UNSUPPORTED_DATATYPE";
    pub const UNKNOWN_PATTERN: &str = "UNKNOWN_PATTERN";

    pub const MALFORMED_PAYLOAD: &str = "MALFORMED_PAYLOAD";
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub severity: Severity,
    pub rule: String,
    /// Slash-separated document path, or a shape/element id for compile
    /// diagnostics.
    pub path: String,
    pub message: String,
}

impl Finding {
    pub fn error(rule: &str, path: impl Into<String>, message: impl Into<String>) -> Self {
        Finding {
            severity: Severity::Error,
            rule: rule.to_string(),
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn warning(rule: &str, path: impl Into<String>, message: impl Into<String>) -> Self {
        Finding {
            severity: Severity::Warning,
            rule: rule.to_string(),
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] {}: {}",
            self.severity, self.rule, self.path, self.message
        )
    }
}

/// Aggregated findings. `conformant` holds iff there are zero ERROR findings.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
    pub conformant: bool,
}

impl ValidationReport {
    pub fn from_findings(findings: Vec<Finding>) -> Self {
        let conformant = !findings.iter().any(|f| f.severity == Severity::Error);
        ValidationReport {
            findings,
            conformant,
        }
    }

    pub fn empty() -> Self {
        ValidationReport {
            findings: Vec::new(),
            conformant: true,
        }
    }

    pub fn push(&mut self, finding: Finding) {
        if finding.severity == Severity::Error {
            self.conformant = false;
        }
        self.findings.push(finding);
    }

    pub fn error_count(&self) -> usize {
        self.findings
            .iter()
            .filter(|f| f.severity == Severity::Error)
            .count()
    }

    pub fn warning_count(&self) -> usize {
        self.findings
            .iter()
            .filter(|f| f.severity == Severity::Warning)
            .count()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings
            .iter()
            .filter(|f| f.severity == Severity::Error)
    }

    /// Human-readable rendering, one finding per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for f in &self.findings {
            out.push_str(&f.to_string());
            out.push('\n');
        }
        out.push_str(if self.conformant {
            "conformant: true\n"
        } else {
            "conformant: false\n"
        });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conformant_tracks_error_findings() {
        let mut r = ValidationReport::empty();
        assert!(r.conformant);
        r.push(Finding::warning(rules::NO_TARGET, "_:n1", "skipped"));
        assert!(r.conformant);
        r.push(Finding::error(rules::CARDINALITY, "/issued", "too many"));
        assert!(!r.conformant);
        assert_eq!(r.error_count(), 1);
        assert_eq!(r.warning_count(), 1);
    }

    #[test]
    fn report_serializes_with_uppercase_severity() {
        let r = ValidationReport::from_findings(vec![Finding::error(
            rules::UNKNOWN_SLOT,
            "/x",
            "no such slot",
        )]);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"ERROR\""));
        assert!(json.contains("UNKNOWN_SLOT"));
    }
}
