use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::kb::FactKb;
use super::units::{convert, parse_unit};
use super::{Direction, FactFinding, FindingKind, HallucinationReport, OrderingClaim};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "reason", rename_all = "snake_case")]
pub enum Verdict {
    Ok,
    Minor(String),
    Major(String),
    /// Reported for a human; does not affect the index.
    ReportOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgedFinding {
    #[serde(flatten)]
    pub finding: FactFinding,
    #[serde(flatten)]
    pub verdict: Verdict,
    pub needs_review: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Validation {
    pub findings: Vec<JudgedFinding>,
    /// Required targets that no finding matched, in KB order.
    pub omissions: Vec<String>,
}

/// Grades each finding against the KB and lists omitted required targets.
pub fn validate(findings: Vec<FactFinding>, kb: &FactKb) -> Validation {
    let matched: BTreeSet<&str> = findings
        .iter()
        .filter(|f| f.kind != FindingKind::UnknownConcept)
        .filter_map(|f| f.matched_target.as_deref())
        .collect();
    let omissions = kb
        .required_targets()
        .into_iter()
        .filter(|t| !matched.contains(t))
        .map(str::to_string)
        .collect();

    let findings = findings
        .into_iter()
        .map(|finding| {
            let verdict = judge(&finding, kb);
            JudgedFinding {
                needs_review: finding.kind == FindingKind::UnknownConcept,
                finding,
                verdict,
            }
        })
        .collect();
    Validation {
        findings,
        omissions,
    }
}

fn judge(f: &FactFinding, kb: &FactKb) -> Verdict {
    match f.kind {
        FindingKind::EquationPresent | FindingKind::CategoryListing => Verdict::Ok,
        FindingKind::ConstantValue => judge_constant(f, kb),
        FindingKind::OrderingClaim => judge_ordering(f, kb),
        FindingKind::UnknownConcept => judge_concept(f, kb),
    }
}

fn judge_constant(f: &FactFinding, kb: &FactKb) -> Verdict {
    let (Some(name), Some(extracted)) = (&f.matched_target, &f.extracted_value) else {
        return Verdict::Ok;
    };
    let Some(target) = kb.constants.iter().find(|c| &c.name == name) else {
        return Verdict::Ok;
    };
    let kb_unit = target.kb_unit();
    let value = match &extracted.unit {
        None => extracted.value,
        Some(raw) => match parse_unit(raw).and_then(|u| convert(extracted.value, u, kb_unit)) {
            Some(v) => v,
            None => return Verdict::Minor(format!("unit mismatch: {raw} vs {}", target.unit)),
        },
    };
    let deviation = (value - target.value).abs() / target.value;
    if deviation <= target.rel_tolerance {
        Verdict::Ok
    } else {
        Verdict::Minor(format!(
            "{} off by {:.1}% (reference {} {})",
            target.name,
            deviation * 100.0,
            target.value,
            target.unit
        ))
    }
}

fn judge_ordering(f: &FactFinding, kb: &FactKb) -> Verdict {
    let (Some(name), Some(claim)) = (&f.matched_target, &f.ordering) else {
        return Verdict::Ok;
    };
    let Some(category) = kb.ordered_categories.iter().find(|c| &c.name == name) else {
        return Verdict::Ok;
    };
    let OrderingClaim {
        subject,
        object,
        axis,
        direction,
    } = claim;
    let (Some(s), Some(o)) = (category.position(subject), category.position(object)) else {
        return Verdict::Ok;
    };
    let ascending = if category.same_order.contains(axis) {
        true
    } else if category.inverse_order.contains(axis) {
        false
    } else {
        return Verdict::Ok;
    };
    // Positions increase along the list; the claim says subject is greater
    // (or less) than object on `axis`.
    let subject_greater = (s > o) == ascending;
    let consistent = subject_greater == (*direction == Direction::Greater);
    if consistent {
        Verdict::Ok
    } else {
        Verdict::Major(format!("ordering inverted: {subject} vs {object} by {axis}"))
    }
}

fn judge_concept(f: &FactFinding, kb: &FactKb) -> Verdict {
    let owner = f
        .surface_text
        .split(['\'', '’'])
        .next()
        .unwrap_or_default()
        .to_lowercase();
    let attributions = kb
        .equations
        .iter()
        .map(|e| (&e.name, &e.attributed_to))
        .chain(kb.constants.iter().map(|c| (&c.name, &c.attributed_to)));
    for (name, attributed) in attributions {
        if attributed.is_empty() || !f.context_targets.contains(name) {
            continue;
        }
        if !attributed.iter().any(|a| a.to_lowercase() == owner) {
            return Verdict::Major(format!(
                "{} attributed to {} (expected {})",
                name,
                f.surface_text,
                attributed.join(" or ")
            ));
        }
    }
    Verdict::ReportOnly
}

/// Tallies a validation into the index. Omissions count as minor errors.
pub fn hallucination_index(v: Validation) -> HallucinationReport {
    let mut major = 0u32;
    let mut minor = v.omissions.len() as u32;
    for f in &v.findings {
        match f.verdict {
            Verdict::Major(_) => major += 1,
            Verdict::Minor(_) => minor += 1,
            Verdict::Ok | Verdict::ReportOnly => {}
        }
    }
    HallucinationReport {
        findings: v.findings,
        major_errors: major,
        minor_errors: minor,
        omissions: v.omissions,
        hi: 2 * major + minor,
    }
}
