//! Three-valued verdicts with derivation traces.

use std::fmt;

use crate::error::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Verdict {
    Holds,
    Fails,
    Unknown(String),
}

impl Verdict {
    pub fn is_decided(&self) -> bool {
        !matches!(self, Verdict::Unknown(_))
    }

    pub fn from_bool(b: bool) -> Verdict {
        if b {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }

    /// Short lowercase label: `holds`, `fails` or `unknown`.
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Unknown(_) => "unknown",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds => f.write_str("Holds"),
            Verdict::Fails => f.write_str("Fails"),
            Verdict::Unknown(r) => write!(f, "Unknown({r})"),
        }
    }
}

/// One applied rule: an identifier, the fact it relies on, and what was
/// observed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TraceStep {
    pub rule: String,
    pub citation: String,
    pub detail: String,
}

impl TraceStep {
    pub fn new(rule: impl Into<String>, citation: impl Into<String>, detail: impl Into<String>) -> TraceStep {
        TraceStep {
            rule: rule.into(),
            citation: citation.into(),
            detail: detail.into(),
        }
    }
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {} ({})", self.rule, self.detail, self.citation)
    }
}

/// A verdict with its trace and named certificate items (printed values
/// of polynomials, operators, roots, ...).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub verdict: Verdict,
    pub trace: Vec<TraceStep>,
    pub certificate: Vec<(String, String)>,
}

impl Decision {
    pub fn new(verdict: Verdict) -> Decision {
        Decision {
            verdict,
            trace: Vec::new(),
            certificate: Vec::new(),
        }
    }

    pub fn unknown(reason: impl Into<String>) -> Decision {
        Decision::new(Verdict::Unknown(reason.into()))
    }

    /// Maps resource-limit errors to `Unknown`; other errors pass through.
    pub fn from_error(e: Error) -> Result<Decision, Error> {
        if e.is_resource_limit() {
            Ok(Decision::unknown(e.to_string()))
        } else {
            Err(e)
        }
    }

    pub fn step(mut self, rule: &str, citation: &str, detail: impl Into<String>) -> Decision {
        self.trace.push(TraceStep::new(rule, citation, detail));
        self
    }

    pub fn cert(mut self, key: impl Into<String>, value: impl ToString) -> Decision {
        self.certificate.push((key.into(), value.to_string()));
        self
    }

    pub fn push_step(&mut self, rule: &str, citation: &str, detail: impl Into<String>) {
        self.trace.push(TraceStep::new(rule, citation, detail));
    }
}
