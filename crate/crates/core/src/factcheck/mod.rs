//! Rule-based fact checking against a declarative knowledge base, and the
//! Hallucination Index `HI = 2 * major + minor`.
//!
//! Extraction is pattern based and works on a plan's normalized text:
//! equations, constant values with units, comparative ordering claims
//! between members of an ordered category, full listings of such a
//! category, and possessive proper-name concepts (`X's law`). Validation
//! grades each finding against the KB and records every required target
//! that no finding matched as an omission. Omissions count as minor
//! errors.

mod extract;
pub mod kb;
pub mod units;
mod validate;

use serde::{Deserialize, Serialize};

use crate::corpus::PlanDocument;

pub use extract::{equation_regex, extract_facts};
pub use kb::{
    CategoryMember, ConstantTarget, EquationTarget, FactKb, KbError, OrderedCategory,
    DEFAULT_REL_TOLERANCE, EM_SPECTRUM_KB,
};
pub use validate::{hallucination_index, validate, JudgedFinding, Validation, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingKind {
    EquationPresent,
    ConstantValue,
    OrderingClaim,
    /// Every member of an ordered category is mentioned somewhere.
    CategoryListing,
    UnknownConcept,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractedValue {
    pub value: f64,
    /// Unit as written; `None` when the number stood alone.
    pub unit: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Greater,
    Less,
}

/// "`subject` has `direction` `axis` than `object`".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderingClaim {
    pub subject: String,
    pub object: String,
    pub axis: String,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactFinding {
    pub kind: FindingKind,
    pub surface_text: String,
    /// Byte offsets into the plan's normalized text.
    pub start: usize,
    pub end: usize,
    pub matched_target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extracted_value: Option<ExtractedValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ordering: Option<OrderingClaim>,
    /// For unknown concepts: KB targets mentioned in the same sentence.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub context_targets: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HallucinationReport {
    pub findings: Vec<JudgedFinding>,
    pub major_errors: u32,
    pub minor_errors: u32,
    pub omissions: Vec<String>,
    pub hi: u32,
}

impl HallucinationReport {
    pub fn needs_review(&self) -> usize {
        self.findings.iter().filter(|f| f.needs_review).count()
    }

    /// Findings graded as errors (omissions excluded).
    pub fn false_statements(&self) -> impl Iterator<Item = &JudgedFinding> {
        self.findings
            .iter()
            .filter(|f| matches!(f.verdict, Verdict::Minor(_) | Verdict::Major(_)))
    }
}

/// Extraction, validation and scoring in one step.
pub fn check_plan(plan: &PlanDocument, kb: &FactKb) -> HallucinationReport {
    check_text(&plan.normalized_text, kb)
}

pub fn check_text(normalized: &str, kb: &FactKb) -> HallucinationReport {
    let findings = extract::extract_from_text(normalized, kb);
    hallucination_index(validate(findings, kb))
}
