use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use dcond_core::conditions::{propagate_implications, Condition, ConditionLattice};
use dcond_core::verdict::Verdict;
use dcond_core::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::commands::{check, Budget, Check};
use crate::input::{parse_germ, parse_weights};
use crate::report::VERSION;

/// One fixture file: a list of `[[case]]` stanzas.
#[derive(Debug, Deserialize)]
struct FixtureFile {
    #[serde(default)]
    case: Vec<Case>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Case {
    pub name: String,
    #[serde(default)]
    pub vars: Option<String>,
    #[serde(default)]
    pub poly: Option<String>,
    #[serde(default)]
    pub factors: Vec<String>,
    #[serde(default)]
    pub weights: Option<String>,
    /// Expected verdicts: `holds`, `fails` or `unknown`.
    #[serde(default)]
    pub expect: BTreeMap<String, String>,
    /// Verdicts recorded elsewhere, fed to the implication lattice only.
    #[serde(default)]
    pub given: BTreeMap<String, String>,
    /// Values kept for reference and excluded from pass/fail.
    #[serde(default)]
    pub documented: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub file: String,
    pub name: String,
    pub status: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub verdicts: BTreeMap<String, Comparison>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub expected: String,
    pub got: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub cases: Vec<Outcome>,
    pub passed: usize,
    pub failed: usize,
    pub documented: usize,
    pub version: String,
}

fn label(v: &Verdict) -> &'static str {
    v.label()
}

fn parse_expect(s: &str) -> Result<Option<bool>> {
    match s.trim().to_ascii_lowercase().as_str() {
        "holds" => Ok(Some(true)),
        "fails" => Ok(Some(false)),
        "unknown" => Ok(None),
        other => Err(Error::Unsupported(format!("expected verdict `{other}`"))),
    }
}

fn condition(name: &str) -> Result<Condition> {
    Condition::from_name(name).ok_or_else(|| Error::Unsupported(format!("unknown condition `{name}`")))
}

fn run_case(file: &str, case: &Case, budget: Budget) -> Outcome {
    let mut out = Outcome {
        file: file.to_string(),
        name: case.name.clone(),
        status: String::new(),
        verdicts: BTreeMap::new(),
        error: None,
        note: case.documented.clone(),
    };
    if case.expect.is_empty() && case.given.is_empty() {
        out.status = "documented".into();
        return out;
    }
    match evaluate(case, budget) {
        Ok(v) => {
            let ok = v.values().all(|c| c.expected == c.got);
            out.verdicts = v;
            out.status = if ok { "pass" } else { "fail" }.into();
        }
        Err(e) => {
            out.status = "fail".into();
            out.error = Some(e.to_string());
        }
    }
    out
}

fn evaluate(case: &Case, budget: Budget) -> Result<BTreeMap<String, Comparison>> {
    let germ = parse_germ(case.vars.as_deref(), case.poly.as_deref(), &case.factors)?;
    if let Some(w) = &case.weights {
        parse_weights(w, &germ.h)?;
    }
    let mut result = BTreeMap::new();
    // Lattice-only cases: recorded verdicts are closed under implications
    // and compared with the expectations.
    if !case.given.is_empty() {
        let mut lattice = ConditionLattice::new();
        for (k, v) in &case.given {
            if let Some(b) = parse_expect(v)? {
                lattice.set(condition(k)?, b, "given")?;
            }
        }
        let closed = propagate_implications(&lattice)?;
        for (k, v) in &case.expect {
            let got = match closed.get(condition(k)?) {
                Some(true) => "holds",
                Some(false) => "fails",
                None => "unknown",
            };
            result.insert(
                k.clone(),
                Comparison {
                    expected: v.to_ascii_lowercase(),
                    got: got.into(),
                },
            );
        }
        return Ok(result);
    }
    let mut checks = Vec::new();
    for k in case.expect.keys() {
        checks.push(Check::parse(k).ok_or_else(|| Error::Unsupported(format!("unknown condition `{k}`")))?);
        parse_expect(&case.expect[k])?;
    }
    let decisions = check(&germ, &checks, budget)?;
    for ((k, v), (_, d)) in case.expect.iter().zip(decisions) {
        result.insert(
            k.clone(),
            Comparison {
                expected: v.to_ascii_lowercase(),
                got: label(&d.verdict).into(),
            },
        );
    }
    Ok(result)
}

fn fixture_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::Unsupported(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    files.sort();
    Ok(files)
}

/// Runs every case of every `*.toml` file in `dir` (sorted by path) on a
/// worker pool; the report keeps file and stanza order.
pub fn run(dir: &Path, budget: Budget) -> Result<CorpusReport> {
    let mut cases = Vec::new();
    for path in fixture_files(dir)? {
        let text =
            std::fs::read_to_string(&path).map_err(|e| Error::Unsupported(format!("{}: {e}", path.display())))?;
        let parsed: FixtureFile =
            toml::from_str(&text).map_err(|e| Error::Unsupported(format!("{}: {e}", path.display())))?;
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        cases.extend(parsed.case.into_iter().map(|c| (name.clone(), c)));
    }
    let outcomes: Vec<Outcome> = cases.par_iter().map(|(f, c)| run_case(f, c, budget)).collect();
    Ok(CorpusReport {
        passed: outcomes.iter().filter(|o| o.status == "pass").count(),
        failed: outcomes.iter().filter(|o| o.status == "fail").count(),
        documented: outcomes.iter().filter(|o| o.status == "documented").count(),
        cases: outcomes,
        version: VERSION.into(),
    })
}

impl CorpusReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.cases {
            out.push_str(&format!("{:<10} {}: {}\n", c.status, c.file, c.name));
            for (k, v) in &c.verdicts {
                if v.expected != v.got {
                    out.push_str(&format!("    {k}: expected {}, got {}\n", v.expected, v.got));
                }
            }
            if let Some(n) = &c.note {
                out.push_str(&format!("    note: {n}\n"));
            }
            if let Some(e) = &c.error {
                out.push_str(&format!("    error: {e}\n"));
            }
        }
        out.push_str(&format!(
            "{} passed, {} failed, {} documented\n",
            self.passed, self.failed, self.documented
        ));
        out
    }
}
