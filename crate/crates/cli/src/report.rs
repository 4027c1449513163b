use std::collections::BTreeMap;
use std::fmt::Write as _;

use dcond_core::verdict::{Decision, Verdict};
use serde::{Deserialize, Serialize};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub input: InputEcho,
    pub verdicts: BTreeMap<String, VerdictReport>,
    pub limits: LimitsEcho,
    pub version: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InputEcho {
    pub command: String,
    pub vars: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub factors: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub trace: Vec<TraceJson>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub certificate: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceJson {
    pub rule: String,
    pub citation: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitsEcho {
    pub max_steps: u64,
    pub timeout_secs: f64,
    /// Checks that stopped on a resource limit.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hit: Vec<String>,
}

impl VerdictReport {
    pub fn from_decision(d: &Decision) -> VerdictReport {
        let (verdict, reason) = match &d.verdict {
            Verdict::Holds => ("Holds", None),
            Verdict::Fails => ("Fails", None),
            Verdict::Unknown(r) => ("Unknown", Some(r.clone())),
        };
        let mut certificate = BTreeMap::new();
        for (k, v) in &d.certificate {
            certificate.insert(k.clone(), v.clone());
        }
        VerdictReport {
            verdict: verdict.into(),
            reason,
            trace: d
                .trace
                .iter()
                .map(|s| TraceJson {
                    rule: s.rule.clone(),
                    citation: s.citation.clone(),
                    detail: s.detail.clone(),
                })
                .collect(),
            certificate,
        }
    }

    pub fn is_decided(&self) -> bool {
        self.verdict != "Unknown"
    }
}

fn resource_hit(reason: &str) -> bool {
    reason.contains("steps exceeded") || reason.contains("time limit")
}

impl Report {
    pub fn new(input: InputEcho, limits: LimitsEcho) -> Report {
        Report {
            input,
            verdicts: BTreeMap::new(),
            limits,
            version: VERSION.into(),
        }
    }

    pub fn insert(&mut self, name: &str, d: &Decision) {
        let v = VerdictReport::from_decision(d);
        if v.reason.as_deref().is_some_and(resource_hit) {
            self.limits.hit.push(name.into());
        }
        self.verdicts.insert(name.into(), v);
    }

    pub fn all_decided(&self) -> bool {
        self.verdicts.values().all(VerdictReport::is_decided)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let i = &self.input;
        let _ = writeln!(out, "{} in {}", i.command, i.vars.join(","));
        if let Some(p) = &i.poly {
            let _ = writeln!(out, "  h = {p}");
        }
        for f in &i.factors {
            let _ = writeln!(out, "  factor {f}");
        }
        for (name, v) in &self.verdicts {
            match &v.reason {
                Some(r) => {
                    let _ = writeln!(out, "{name}: {} ({r})", v.verdict);
                }
                None => {
                    let _ = writeln!(out, "{name}: {}", v.verdict);
                }
            }
            for s in &v.trace {
                let _ = writeln!(out, "    [{}] {}", s.rule, s.detail);
            }
            for (k, c) in &v.certificate {
                let _ = writeln!(out, "    {k} = {c}");
            }
        }
        if !self.limits.hit.is_empty() {
            let _ = writeln!(out, "limits hit: {}", self.limits.hit.join(", "));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let mut r = Report::new(
            InputEcho {
                command: "check".into(),
                vars: vec!["x1".into()],
                poly: Some("x1".into()),
                ..InputEcho::default()
            },
            LimitsEcho {
                max_steps: 10,
                timeout_secs: 1.0,
                hit: vec![],
            },
        );
        let d = Decision::new(Verdict::Holds).step("r", "c", "d").cert("k", "v");
        r.insert("B", &d);
        r.insert("W", &Decision::unknown("reduction budget of 10 steps exceeded"));
        let json = r.to_json();
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), json);
        assert_eq!(r.limits.hit, vec!["W"]);
        assert!(!r.all_decided());
    }
}
