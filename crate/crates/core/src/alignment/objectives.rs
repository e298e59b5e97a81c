use once_cell::sync::Lazy;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::{LineKind, PlanDocument, PlanKey};
use crate::readability::sentence_spans;

/// One learning objective found in a plan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Objective {
    pub text: String,
    /// Byte offsets into the plan's normalized text.
    pub start: usize,
    pub end: usize,
    pub plan_key: PlanKey,
}

static OBJECTIVES_HEADING: Lazy<Regex> = Lazy::new(|| Regex::new(r"(?i)\bobjectives?\b").unwrap());

static CUE: Lazy<Regex> = Lazy::new(|| {
    Regex::new(r"(?i)\b(?:students will be able to|swbat|learners will|by the end of th(?:is|e) lesson)\b")
        .unwrap()
});

static STEM: Lazy<Regex> = Lazy::new(|| {
    Regex::new(
        r"(?ix)^
        (?:by\ the\ end\ of\ th(?:is|e)\ (?:lesson|class|session|unit)[\s,]*)?
        (?:(?:students|learners|pupils|you)\s+(?:will|should|can)(?:\s+be\s+able\s+to)?|swbat|i\ can)?
        [\s:,.;-]*",
    )
    .unwrap()
});

/// Removes a leading objective stem ("Students will be able to:", "SWBAT",
/// "By the end of the lesson, learners will").
pub fn strip_stem(text: &str) -> &str {
    let mut rest = text.trim();
    // Stems can repeat ("By the end of the lesson, students will be able to").
    for _ in 0..3 {
        let m = STEM.find(rest).map_or(0, |m| m.end());
        if m == 0 {
            break;
        }
        rest = &rest[m..];
    }
    rest
}

fn has_content(text: &str) -> bool {
    strip_stem(text).chars().any(char::is_alphabetic)
}

/// Collects objectives from an objectives section, from bullet lists led in
/// by a cue line ending in `:`, and from cue sentences anywhere in the text.
/// Overlapping candidates keep the earlier (finer-grained) source.
pub fn extract_objectives(plan: &PlanDocument) -> Vec<Objective> {
    let text = &plan.normalized_text;
    let mut spans: Vec<(usize, usize)> = Vec::new();
    let push = |s: usize, e: usize, spans: &mut Vec<(usize, usize)>| {
        if has_content(&text[s..e]) && !spans.iter().any(|&(a, b)| s < b && a < e) {
            spans.push((s, e));
        }
    };

    let mut in_section = false;
    let mut in_lead_in = false;
    for line in &plan.line_spans {
        let body = &text[line.start..line.end];
        if line.kind == LineKind::Heading {
            in_section = OBJECTIVES_HEADING.is_match(body);
            in_lead_in = false;
            continue;
        }
        let listed = in_lead_in && matches!(line.kind, LineKind::Bullet | LineKind::TableRow);
        if in_section || listed {
            for (s, e) in sentence_spans(body) {
                push(line.start + s, line.start + e, &mut spans);
            }
        }
        if !listed {
            in_lead_in = line.kind == LineKind::Text && body.ends_with(':') && CUE.is_match(body);
        }
    }

    for (s, e) in sentence_spans(text) {
        if CUE.is_match(&text[s..e]) {
            push(s, e, &mut spans);
        }
    }

    spans.sort_unstable();
    let key = plan.key();
    spans
        .into_iter()
        .map(|(start, end)| Objective {
            text: text[start..end].to_string(),
            start,
            end,
            plan_key: key.clone(),
        })
        .collect()
}
