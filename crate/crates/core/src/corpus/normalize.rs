//! Markdown-aware text normalization.
//!
//! Every source line becomes one block of the output. Block structure
//! (headings, bullets, table rows) is stripped of its markers and, for
//! those structural lines, terminated with a period so that list-heavy
//! plans segment into sentences. Plain text lines are kept as-is apart
//! from inline marker removal. Blocks are joined with single spaces and
//! their byte ranges are kept in [`LineSpan`]s.

use once_cell::sync::Lazy;
use regex::Regex;
use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

/// Structural role of one source line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineKind {
    Heading,
    Bullet,
    TableRow,
    Text,
}

/// Byte range of one normalized line inside the normalized text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineSpan {
    pub start: usize,
    pub end: usize,
    pub kind: LineKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalized {
    pub text: String,
    pub lines: Vec<LineSpan>,
}

static HEADING_PREFIX: Lazy<Regex> = Lazy::new(|| Regex::new(r"^#{1,6}(?:\s+|$)").unwrap());
static HEADING_CLOSE: Lazy<Regex> = Lazy::new(|| Regex::new(r"\s+#+$").unwrap());
static BULLET_PREFIX: Lazy<Regex> = Lazy::new(|| {
    Regex::new(r"^(?:[-*+•▪◦‣●○■□–]|\d{1,3}[.)]|[a-z]\)|\[[ xX]\])(?:\s+|$)").unwrap()
});
static QUOTE_PREFIX: Lazy<Regex> = Lazy::new(|| Regex::new(r"^>\s*").unwrap());
static HORIZONTAL_RULE: Lazy<Regex> = Lazy::new(|| Regex::new(r"^(?:[-*_=]\s*){3,}$").unwrap());
static TABLE_SEPARATOR: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"^\|?(?:\s*:?-+:?\s*\|)+\s*(?::?-+:?\s*)?\|?$").unwrap());
static BOLD_LINE: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"^(?:\*\*|__)(.+?)(?:\*\*|__)\s*:?$").unwrap());
static TITLE_LIKE: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"^\p{L}[\p{L}\p{N}\s&'’/(),\-]*:?$").unwrap());
static OBJECTIVE_CUE: Lazy<Regex> = Lazy::new(|| {
    Regex::new(r"(?i)students will|swbat|learners (?:will|can)|by the end of th(?:is|e) lesson")
        .unwrap()
});
static WHITESPACE: Lazy<Regex> = Lazy::new(|| Regex::new(r"\s+").unwrap());
static MATH_DELIMS: Lazy<Regex> = Lazy::new(|| Regex::new(r"\$|\\[()\[\]]").unwrap());

/// Normalizes raw plan text. Total and idempotent on its own output.
pub fn normalize(raw: &str) -> Normalized {
    let composed: String = raw.nfc().collect();
    let mut text = String::with_capacity(composed.len());
    let mut lines = Vec::new();
    for line in composed.lines() {
        let Some((block, kind)) = normalize_line(line) else {
            continue;
        };
        if !text.is_empty() {
            text.push(' ');
        }
        let start = text.len();
        text.push_str(&block);
        lines.push(LineSpan {
            start,
            end: text.len(),
            kind,
        });
    }
    Normalized { text, lines }
}

fn normalize_line(line: &str) -> Option<(String, LineKind)> {
    let trimmed = line.trim();
    if trimmed.is_empty()
        || trimmed.starts_with("```")
        || trimmed.starts_with("~~~")
        || HORIZONTAL_RULE.is_match(trimmed)
        || (trimmed.contains('-') && TABLE_SEPARATOR.is_match(trimmed))
    {
        return None;
    }

    let mut kind = LineKind::Text;
    let mut current = trimmed.to_string();
    // Bounded: every productive round removes characters except termination,
    // which runs at most once per stable state.
    for _ in 0..16 {
        let (next, next_kind) = strip_once(&current);
        if kind == LineKind::Text {
            kind = next_kind;
        }
        let next = if kind == LineKind::Text {
            next
        } else {
            terminate(next)
        };
        if next == current {
            break;
        }
        current = next;
    }
    // Marker- or symbol-only lines carry no text.
    current
        .chars()
        .any(char::is_alphanumeric)
        .then_some((current, kind))
}

/// One round of block-prefix and inline-marker removal.
fn strip_once(line: &str) -> (String, LineKind) {
    let mut kind = LineKind::Text;
    let mut s = line.trim().to_string();

    loop {
        if let Some(m) = QUOTE_PREFIX.find(&s) {
            s = s[m.end()..].to_string();
        } else if let Some(m) = HEADING_PREFIX.find(&s) {
            s = HEADING_CLOSE.replace(&s[m.end()..], "").into_owned();
            kind = LineKind::Heading;
        } else if let Some(m) = BULLET_PREFIX.find(&s) {
            s = s[m.end()..].to_string();
            if kind == LineKind::Text {
                kind = LineKind::Bullet;
            }
        } else {
            break;
        }
        s = s.trim_start().to_string();
    }

    if s.starts_with('|') {
        kind = LineKind::TableRow;
        s = s
            .split('|')
            .map(str::trim)
            .filter(|cell| !cell.is_empty())
            .collect::<Vec<_>>()
            .join(", ");
    }

    if kind == LineKind::Text {
        if let Some(caps) = BOLD_LINE.captures(&s) {
            let inner = caps[1].trim();
            if TITLE_LIKE.is_match(inner) && inner.split_whitespace().count() <= 8 {
                kind = LineKind::Heading;
            }
        }
    }

    let mut s = strip_inline(&s);
    s = WHITESPACE.replace_all(s.trim(), " ").into_owned();
    s = s.nfc().collect();

    if kind == LineKind::Text
        && s.ends_with(':')
        && TITLE_LIKE.is_match(&s)
        && s.split_whitespace().count() <= 6
        && !OBJECTIVE_CUE.is_match(&s)
    {
        kind = LineKind::Heading;
    }
    (s, kind)
}

/// Ensures a structural line ends with sentence-final punctuation.
fn terminate(mut s: String) -> String {
    if s.is_empty() {
        return s;
    }
    let body = s.trim_end_matches([')', '"', '\'', '”', '’', ']']);
    if body.ends_with(['.', '!', '?']) {
        return s;
    }
    if s.ends_with([':', ';', ',']) {
        s.pop();
        s = s.trim_end().to_string();
        if s.is_empty() {
            return s;
        }
    }
    s.push('.');
    s
}

fn strip_inline(s: &str) -> String {
    let mut out = s.replace('`', "");
    out = MATH_DELIMS.replace_all(&out, "").into_owned();
    for marker in ['*', '_'] {
        out = strip_emphasis(&out, marker);
    }
    out
}

/// Removes emphasis runs of `marker` that are paired or flanking.
///
/// A run is opener-like when preceded by start/non-word and followed by a
/// non-space character; closer-like symmetrically. Intraword runs
/// (`10**8`, `snake_case`) and isolated runs (`3 * 4`) are kept. After one
/// call no opener-like or closer-like run remains, so joining lines with
/// spaces cannot create new pairs.
fn strip_emphasis(s: &str, marker: char) -> String {
    let chars: Vec<char> = s.chars().collect();
    let mut out = String::with_capacity(s.len());
    let mut i = 0;
    while i < chars.len() {
        if chars[i] != marker {
            out.push(chars[i]);
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && chars[i] == marker {
            i += 1;
        }
        let prev = if start == 0 { None } else { Some(chars[start - 1]) };
        let next = chars.get(i).copied();
        if flanking(prev, next, marker) {
            continue;
        }
        out.extend(std::iter::repeat_n(marker, i - start));
    }
    if out != s {
        // Removal may expose new flanking runs (`a ** *b`); iterate.
        return strip_emphasis(&out, marker);
    }
    out
}

fn flanking(prev: Option<char>, next: Option<char>, marker: char) -> bool {
    let is_word = |c: Option<char>| c.is_some_and(|c| c.is_alphanumeric() || c == marker);
    let is_space = |c: Option<char>| c.is_none_or(char::is_whitespace);
    let opener = !is_word(prev) && !is_space(next);
    let closer = !is_space(prev) && !is_word(next);
    opener || closer
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm(s: &str) -> String {
        normalize(s).text
    }

    #[test]
    fn heading_and_bullet_are_terminated() {
        assert_eq!(
            norm("## Objectives\n- Identify the seven bands"),
            "Objectives. Identify the seven bands."
        );
    }

    #[test]
    fn plain_sentence_is_fixed_point() {
        assert_eq!(norm("plain sentence."), "plain sentence.");
    }

    #[test]
    fn bold_equation_keeps_content() {
        assert_eq!(norm("**c = λf**"), "c = λf");
    }

    #[test]
    fn math_delimiters_removed() {
        assert_eq!(norm("Use $E = hf$ and \\(c = \\lambda f\\)"), "Use E = hf and c = \\lambda f");
        assert_eq!(norm("$$E = \\frac{hc}{\\lambda}$$"), "E = \\frac{hc}{\\lambda}");
    }

    #[test]
    fn intraword_and_spaced_stars_survive() {
        assert_eq!(norm("speed 3*10^8 and 2 * 5"), "speed 3*10^8 and 2 * 5");
        assert_eq!(norm("x = 10**8"), "x = 10**8");
    }

    #[test]
    fn table_rows_become_sentences() {
        let n = normalize("| Time | Activity |\n|---|---|\n| 5 min | Warm-up |");
        assert_eq!(n.text, "Time, Activity. 5 min, Warm-up.");
        assert!(n.lines.iter().all(|l| l.kind == LineKind::TableRow));
    }

    #[test]
    fn label_lines_are_headings() {
        let n = normalize("Learning Objectives:\n- Identify the seven EM bands\n- Explain c = λf");
        assert_eq!(n.text, "Learning Objectives. Identify the seven EM bands. Explain c = λf.");
        let kinds: Vec<_> = n.lines.iter().map(|l| l.kind).collect();
        assert_eq!(kinds, [LineKind::Heading, LineKind::Bullet, LineKind::Bullet]);
    }

    #[test]
    fn cue_lead_in_is_not_a_heading() {
        let n = normalize("Students will be able to:\n- identify bands");
        assert_eq!(n.lines[0].kind, LineKind::Text);
        assert_eq!(n.text, "Students will be able to: identify bands.");
    }

    #[test]
    fn bold_title_line_is_heading() {
        let n = normalize("**Materials:**\n* prism");
        assert_eq!(n.text, "Materials. prism.");
        assert_eq!(n.lines[0].kind, LineKind::Heading);
    }

    #[test]
    fn unicode_is_composed() {
        assert_eq!(norm("cafe\u{301}."), "caf\u{e9}.");
    }

    #[test]
    fn whitespace_runs_collapse() {
        assert_eq!(norm("a   b\t\tc.\n\n\n d."), "a b c. d.");
    }

    #[test]
    fn empty_and_marker_only_inputs() {
        assert_eq!(norm(""), "");
        assert_eq!(norm("---\n***\n```\n"), "");
        assert!(normalize("- \n#").lines.is_empty());
    }

    #[test]
    fn spans_index_lines() {
        let n = normalize("# Title\nBody text here.\n- item");
        let parts: Vec<_> = n.lines.iter().map(|l| &n.text[l.start..l.end]).collect();
        assert_eq!(parts, ["Title.", "Body text here.", "item."]);
    }
}
