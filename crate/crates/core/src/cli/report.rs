//! Machine-readable verification reports.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gaussproc::CmTerm;
use crate::itoverify::{McReport, Term};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseKind {
    Deterministic,
    Mc,
}

/// `None` stands in for non-finite values, which JSON cannot carry.
fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub name: String,
    pub value: Option<f64>,
    pub residual_contribution: Option<f64>,
}

impl From<&Term> for TermRecord {
    fn from(t: &Term) -> Self {
        Self {
            name: t.name.to_string(),
            value: finite(t.value),
            residual_contribution: finite(t.residual_contribution),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    pub estimate: Option<f64>,
    pub standard_error: Option<f64>,
    pub reference: Option<f64>,
    pub z_score: Option<f64>,
    pub n_paths: usize,
    pub seed: u64,
}

impl From<&McReport> for McSummary {
    fn from(r: &McReport) -> Self {
        Self {
            estimate: finite(r.estimate),
            standard_error: finite(r.standard_error),
            reference: finite(r.reference),
            z_score: finite(r.z_score),
            n_paths: r.n_paths,
            seed: r.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub id: String,
    pub kind: CaseKind,
    pub check: String,
    pub model: String,
    pub function: Option<String>,
    pub h: Option<Vec<CmTerm>>,
    pub lhs: Option<f64>,
    pub terms: Vec<TermRecord>,
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub mc: Option<McSummary>,
    pub error: Option<String>,
}

impl CaseRecord {
    pub(crate) fn new(id: String, kind: CaseKind, check: &str, model: String, tolerance: f64) -> Self {
        Self {
            id,
            kind,
            check: check.to_string(),
            model,
            function: None,
            h: None,
            lhs: None,
            terms: Vec::new(),
            residual: None,
            tolerance,
            pass: false,
            mc: None,
            error: None,
        }
    }

    pub(crate) fn set_residual(&mut self, residual: f64) {
        self.residual = finite(residual);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub deterministic: usize,
    pub mc: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    /// SHA-256 of the scenario file.
    pub scenario_hash: String,
    pub cases: Vec<CaseRecord>,
    pub summary: Summary,
}

impl VerificationReport {
    /// Sorts the cases by id and fills in the summary.
    pub fn new(scenario_hash: String, mut cases: Vec<CaseRecord>) -> Self {
        cases.sort_by(|a, b| a.id.cmp(&b.id));
        let passed = cases.iter().filter(|c| c.pass).count();
        let deterministic = cases.iter().filter(|c| c.kind == CaseKind::Deterministic).count();
        let summary = Summary {
            total: cases.len(),
            passed,
            failed: cases.len() - passed,
            deterministic,
            mc: cases.len() - deterministic,
        };
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            scenario_hash,
            cases,
            summary,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// One row per term per case: `case_id, term, value, residual_contribution`.
    pub fn write_terms_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let csv_err = |e: csv::Error| crate::error::Error::Io(std::io::Error::other(e));
        out.write_record(["case_id", "term", "value", "residual_contribution"])
            .map_err(csv_err)?;
        let fmt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        for c in &self.cases {
            for t in &c.terms {
                out.write_record([
                    c.id.as_str(),
                    t.name.as_str(),
                    &fmt(t.value),
                    &fmt(t.residual_contribution),
                ])
                .map_err(csv_err)?;
            }
        }
        out.flush()?;
        Ok(())
    }
}
