use std::collections::HashMap;
use std::sync::Mutex;

use once_cell::sync::Lazy;
use regex::{Regex, RegexBuilder};

use super::kb::{ConstantTarget, FactKb, OrderedCategory};
use super::units::parse_unit;
use super::{Direction, ExtractedValue, FactFinding, FindingKind, OrderingClaim};
use crate::corpus::PlanDocument;
use crate::readability::sentence_spans;

const MUL_SEP: &str = r"\s*(?:[×*·⋅x]|\\cdot|\\times)?\s*";
const DIV_SEP: &str = r"\s*/\s*";
const EQ_SEP: &str = r"\s*=\s*";

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Sym(String),
    Word(String),
    Eq,
    Div,
    Mul,
}

fn symbol_regex(c: char) -> String {
    match c {
        'λ' => r"(?:λ|\\lambda|lambda)".to_string(),
        'ν' => r"(?:ν|\\nu)".to_string(),
        other => regex::escape(&other.to_string()),
    }
}

fn tokenize(pattern: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    for chunk in pattern.split_whitespace() {
        if chunk.chars().count() >= 3 && chunk.chars().all(char::is_alphabetic) {
            tokens.push(Token::Word(chunk.to_lowercase()));
            continue;
        }
        for c in chunk.chars() {
            tokens.push(match c {
                '=' => Token::Eq,
                '/' => Token::Div,
                '×' | '*' | '·' | '⋅' => Token::Mul,
                c => Token::Sym(c.to_string()),
            });
        }
    }
    tokens
}

fn operand_regex(tokens: &[Token]) -> Option<String> {
    let mut out = String::new();
    let mut prev_operand = false;
    for t in tokens {
        match t {
            Token::Sym(s) | Token::Word(s) => {
                if prev_operand {
                    out.push_str(MUL_SEP);
                }
                match t {
                    Token::Sym(_) => out.push_str(&symbol_regex(s.chars().next()?)),
                    _ => out.push_str(&format!("(?i:{})", regex::escape(s))),
                }
                prev_operand = true;
            }
            Token::Mul => {
                out.push_str(MUL_SEP);
                prev_operand = false;
            }
            Token::Div => {
                out.push_str(DIV_SEP);
                prev_operand = false;
            }
            Token::Eq => return None,
        }
    }
    (!out.is_empty() && prev_operand).then_some(out)
}

/// Compiles one equation pattern (`LHS = RHS`) into a tolerant regex.
/// Returns `None` for patterns without exactly one `=` and non-empty sides.
pub fn equation_regex(pattern: &str) -> Option<Regex> {
    let tokens = tokenize(pattern);
    let eq = tokens.iter().position(|t| *t == Token::Eq)?;
    let (lhs, rhs) = (&tokens[..eq], &tokens[eq + 1..]);
    if rhs.contains(&Token::Eq) {
        return None;
    }
    let lhs_re = operand_regex(lhs)?;
    let rhs_re = operand_regex(rhs)?;
    let mut alternatives = vec![format!("{lhs_re}{EQ_SEP}{rhs_re}")];
    if let Some(div) = rhs.iter().position(|t| *t == Token::Div) {
        let num = operand_regex(&rhs[..div])?;
        let den = operand_regex(&rhs[div + 1..])?;
        alternatives.push(format!(
            r"{lhs_re}{EQ_SEP}\\frac\s*\{{\s*{num}\s*\}}\s*\{{\s*{den}\s*\}}"
        ));
    }
    Regex::new(&format!("(?:{})", alternatives.join("|"))).ok()
}

fn cached_equation(pattern: &str) -> Option<Regex> {
    static EQUATIONS: Lazy<Mutex<HashMap<String, Option<Regex>>>> = Lazy::new(Default::default);
    let mut cache = EQUATIONS.lock().unwrap_or_else(|e| e.into_inner());
    cache
        .entry(pattern.to_string())
        .or_insert_with(|| equation_regex(pattern))
        .clone()
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Accepts a match only when it is not glued to surrounding word characters.
fn standalone(text: &str, start: usize, end: usize) -> bool {
    let before = text[..start].chars().next_back();
    let after = text[end..].chars().next();
    !before.is_some_and(|c| is_word_char(c) || c == '\\') && !after.is_some_and(is_word_char)
}

static NUMBER: Lazy<Regex> = Lazy::new(|| {
    Regex::new(
        r"(?x)
        (?P<mant>\d{1,3}(?:,\d{3})+(?:\.\d+)?|\d+(?:\.\d+)?)
        (?:
            \s*(?:[×x·⋅*]|\\times|\\cdot)\s*10\s*
            (?:
                (?:\^|\*\*)\s*[{(]?\s*(?P<exp>[-−–+]?\s*\d+)\s*[})]?
              | (?P<sup>[⁻⁺]?[⁰¹²³⁴⁵⁶⁷⁸⁹]+)
            )
          | [eE](?P<e>[-−+]?\d+)
        )?",
    )
    .unwrap()
});

static UNIT: Lazy<Regex> = Lazy::new(|| {
    Regex::new(
        r"(?x)^\s*(?P<unit>
            (?i:kilomet(?:er|re)s?\ per\ second|met(?:er|re)s?\ per\ second|miles?\ per\ second)
          | (?i:joule[-\ ]?seconds?)
          | km/s | km/h | mi/s | m/sec | m/s
          | m\s*[·⋅]?\s*s(?:⁻¹|\^\{?-1\}?|-1)
          | J\s*[·⋅*×]?\s*s | J/Hz
          | eV\s*[·⋅*×]?\s*s | eV/Hz
          | [pnμµukMGTP]?Hz | (?i:hertz)
          | [kMG]?eV | J
          | (?i:nanomet(?:er|re)s?|met(?:er|re)s?)
          | [pnμµuckM]?m
        )",
    )
    .unwrap()
});

static SYMBOL_LEAD: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"(?:=|≈|~|\\approx)\s*(?:about\s+|approximately\s+)?$").unwrap());

static COMPARATIVE: Lazy<Regex> = Lazy::new(|| {
    Regex::new(
        r"(?i)\b(higher|greater|larger|bigger|more|lower|smaller|less|longer|shorter)[\s-]+(frequenc(?:y|ies)|energ(?:y|ies)|wavelengths?)\b(?:[\s,]+[\w-]+){0,3}?[\s,]+than\b",
    )
    .unwrap()
});

static POSSESSIVE_CONCEPT: Lazy<Regex> = Lazy::new(|| {
    Regex::new(
        r"\b(\p{Lu}[\p{L}-]+)['’]s\s+((?i:law|constant|effect|equation|principle|rule|theorem|relation|experiment|hypothesis|formula)s?)\b",
    )
    .unwrap()
});

/// Capitalized common words that form possessives but not concept names.
const NOT_PROPER_NAMES: &[&str] = &[
    "today", "tomorrow", "yesterday", "teacher", "student", "everyone", "class", "group",
    "lesson", "partner", "week", "year", "day", "nature", "earth", "sun", "world",
];

static CACHE: Lazy<Mutex<HashMap<String, Option<Regex>>>> = Lazy::new(Default::default);

/// Case-insensitive regex compiled once per pattern string.
fn cached_ci(pattern: String) -> Option<Regex> {
    let mut cache = CACHE.lock().unwrap_or_else(|e| e.into_inner());
    cache
        .entry(pattern)
        .or_insert_with_key(|p| RegexBuilder::new(p).case_insensitive(true).build().ok())
        .clone()
}

pub fn extract_facts(plan: &PlanDocument, kb: &FactKb) -> Vec<FactFinding> {
    extract_from_text(&plan.normalized_text, kb)
}

pub(crate) fn extract_from_text(text: &str, kb: &FactKb) -> Vec<FactFinding> {
    let sentences = sentence_spans(text);
    let mut findings = Vec::new();
    extract_equations(text, kb, &mut findings);
    extract_constants(text, kb, &sentences, &mut findings);
    for category in &kb.ordered_categories {
        extract_ordering(text, category, &sentences, &mut findings);
    }
    extract_concepts(text, kb, &sentences, &mut findings);
    findings.sort_by(|a, b| (a.start, a.end).cmp(&(b.start, b.end)));
    findings
}

fn finding(text: &str, kind: FindingKind, start: usize, end: usize, target: Option<&str>) -> FactFinding {
    FactFinding {
        kind,
        surface_text: text[start..end].to_string(),
        start,
        end,
        matched_target: target.map(str::to_string),
        extracted_value: None,
        ordering: None,
        context_targets: Vec::new(),
    }
}

fn sentence_of(sentences: &[(usize, usize)], offset: usize) -> (usize, usize) {
    let idx = sentences.partition_point(|&(_, end)| end <= offset);
    match sentences.get(idx) {
        Some(&(s, e)) if s <= offset => (s, e),
        _ => (offset, offset),
    }
}

fn extract_equations(text: &str, kb: &FactKb, out: &mut Vec<FactFinding>) {
    let mut taken: Vec<(usize, usize)> = Vec::new();
    for eq in &kb.equations {
        for pattern in &eq.patterns {
            let Some(re) = cached_equation(pattern) else { continue };
            for m in re.find_iter(text) {
                let (s, e) = (m.start(), m.end());
                if !standalone(text, s, e) || taken.iter().any(|&(a, b)| s < b && a < e) {
                    continue;
                }
                taken.push((s, e));
                out.push(finding(text, FindingKind::EquationPresent, s, e, Some(&eq.name)));
            }
        }
    }
}

fn superscript_digit(c: char) -> Option<char> {
    let idx = "⁰¹²³⁴⁵⁶⁷⁸⁹".chars().position(|d| d == c)?;
    char::from_digit(idx as u32, 10)
}

fn parse_number(caps: &regex::Captures<'_>) -> Option<f64> {
    let mant: f64 = caps["mant"].replace(',', "").parse().ok()?;
    let exponent = if let Some(e) = caps.name("exp").or_else(|| caps.name("e")) {
        e.as_str()
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| if matches!(c, '−' | '–') { '-' } else { c })
            .collect::<String>()
    } else if let Some(sup) = caps.name("sup") {
        sup.as_str()
            .chars()
            .map(|c| match c {
                '⁻' => Some('-'),
                '⁺' => Some('+'),
                d => superscript_digit(d),
            })
            .collect::<Option<String>>()?
    } else {
        return Some(mant);
    };
    let exponent: i32 = exponent.parse().ok()?;
    let v = mant * 10f64.powi(exponent);
    v.is_finite().then_some(v)
}

fn contains_ci(haystack: &str, needle: &str) -> Option<usize> {
    let re = cached_ci(format!(r"\b{}\b", regex::escape(needle).replace(r"\ ", r"[\s-]+")))?;
    re.find_iter(haystack).last().map(|m| m.end())
}

/// Decides which constant (if any) a number at `start` refers to.
fn claim_number<'k>(
    text: &str,
    sentence: (usize, usize),
    start: usize,
    unit: Option<&str>,
    kb: &'k FactKb,
) -> Option<&'k ConstantTarget> {
    let before = &text[sentence.0.min(start)..start];
    let unit_dim = unit.and_then(parse_unit).map(|u| u.dimension);

    // `c = 3e8`, `h ≈ 6.6e-34`
    if let Some(lead) = SYMBOL_LEAD.find(before) {
        let head = before[..lead.start()].trim_end();
        for k in &kb.constants {
            let Some(sym) = k.symbol.as_deref() else { continue };
            if let Some(rest) = head.strip_suffix(sym) {
                let glued = rest.chars().next_back().is_some_and(|c| is_word_char(c) || c == '\\');
                if !glued {
                    return Some(k);
                }
            }
        }
    }

    // `the speed of light is about 3 × 10^8 m/s`
    let mut best: Option<(usize, &ConstantTarget)> = None;
    for k in &kb.constants {
        for alias in &k.aliases {
            let Some(end) = contains_ci(before, alias) else { continue };
            let filler = &before[end..];
            let plausible = !filler.chars().any(|c| c.is_ascii_digit())
                && filler.chars().count() <= 40
                && (unit_dim.is_none()
                    || unit_dim == Some(k.kb_unit().dimension)
                    || filler.chars().count() <= 20);
            if plausible && best.is_none_or(|(e, _)| end > e) {
                best = Some((end, k));
            }
        }
    }
    if let Some((_, k)) = best {
        return Some(k);
    }

    // `light travels at 300,000 km/s`
    let whole = &text[sentence.0.min(start)..sentence.1.max(start)];
    kb.constants.iter().find(|k| {
        unit_dim == Some(k.kb_unit().dimension)
            && k.context_words.iter().any(|w| contains_ci(whole, w).is_some())
    })
}

fn extract_constants(
    text: &str,
    kb: &FactKb,
    sentences: &[(usize, usize)],
    out: &mut Vec<FactFinding>,
) {
    if kb.constants.is_empty() {
        return;
    }
    let equations: Vec<(usize, usize)> = out.iter().map(|f| (f.start, f.end)).collect();
    for caps in NUMBER.captures_iter(text) {
        let whole = caps.get(0).unwrap();
        let start = whole.start();
        let glued = text[..start]
            .chars()
            .next_back()
            .is_some_and(|c| c.is_alphanumeric() || c == '.' || c == ',' || c == '^' || c == '_');
        if glued || equations.iter().any(|&(a, b)| start < b && a < whole.end()) {
            continue;
        }
        let Some(value) = parse_number(&caps) else { continue };

        let mut end = whole.end();
        let mut unit = None;
        if let Some(u) = UNIT.captures(&text[end..]) {
            let m = u.name("unit").unwrap();
            let unit_end = end + m.end();
            if !text[unit_end..].chars().next().is_some_and(char::is_alphabetic) {
                unit = Some(m.as_str().to_string());
                end = unit_end;
            }
        }

        let sentence = sentence_of(sentences, start);
        let Some(target) = claim_number(text, sentence, start, unit.as_deref(), kb) else {
            continue;
        };
        let mut f = finding(text, FindingKind::ConstantValue, start, end, Some(&target.name));
        f.extracted_value = Some(ExtractedValue { value, unit });
        out.push(f);
    }
}

struct Mention {
    start: usize,
    end: usize,
    member: usize,
}

fn member_mentions(text: &str, category: &OrderedCategory) -> Vec<Mention> {
    let mut all = Vec::new();
    for (idx, member) in category.members.iter().enumerate() {
        let mut aliases: Vec<&str> = member.aliases.iter().map(String::as_str).collect();
        aliases.push(&member.name);
        aliases.sort_by_key(|a| std::cmp::Reverse(a.len()));
        let body = aliases
            .iter()
            .map(|a| regex::escape(a).replace(r"\ ", r"[\s-]+").replace(r"\-", r"[\s-]?"))
            .collect::<Vec<_>>()
            .join("|");
        let Some(re) = cached_ci(format!(r"\b(?:{body})\b")) else {
            continue;
        };
        all.extend(re.find_iter(text).map(|m| Mention {
            start: m.start(),
            end: m.end(),
            member: idx,
        }));
    }
    all.sort_by_key(|m| (m.start, std::cmp::Reverse(m.end)));
    let mut kept: Vec<Mention> = Vec::new();
    for m in all {
        if kept.last().is_none_or(|k| m.start >= k.end) {
            kept.push(m);
        }
    }
    kept
}

fn axis_name(raw: &str) -> &'static str {
    let lower = raw.to_lowercase();
    if lower.starts_with("frequenc") {
        "frequency"
    } else if lower.starts_with("energ") {
        "energy"
    } else {
        "wavelength"
    }
}

fn extract_ordering(
    text: &str,
    category: &OrderedCategory,
    sentences: &[(usize, usize)],
    out: &mut Vec<FactFinding>,
) {
    let mentions = member_mentions(text, category);
    if mentions.is_empty() {
        return;
    }

    let mut seen = vec![None::<(usize, usize)>; category.members.len()];
    for m in &mentions {
        seen[m.member].get_or_insert((m.start, m.end));
    }
    if seen.iter().all(Option::is_some) {
        let start = seen.iter().flatten().map(|s| s.0).min().unwrap();
        let end = seen.iter().flatten().map(|s| s.1).max().unwrap();
        out.push(finding(text, FindingKind::CategoryListing, start, end, Some(&category.name)));
    }

    for &(s_start, s_end) in sentences {
        let sentence = &text[s_start..s_end];
        for caps in COMPARATIVE.captures_iter(sentence) {
            let comp = caps.get(0).unwrap();
            let axis = axis_name(&caps[2]);
            let known = category.same_order.iter().chain(&category.inverse_order).any(|a| a == axis);
            if !known {
                continue;
            }
            let (c_start, c_end) = (s_start + comp.start(), s_start + comp.end());
            let subject = mentions
                .iter()
                .filter(|m| m.start >= s_start && m.end <= c_start)
                .last();
            let object = mentions.iter().find(|m| m.start >= c_end && m.end <= s_end);
            let (Some(subject), Some(object)) = (subject, object) else { continue };
            if subject.member == object.member {
                continue;
            }
            let direction = match caps[1].to_lowercase().as_str() {
                "lower" | "smaller" | "less" | "shorter" => Direction::Less,
                _ => Direction::Greater,
            };
            let mut f = finding(
                text,
                FindingKind::OrderingClaim,
                subject.start,
                object.end,
                Some(&category.name),
            );
            f.ordering = Some(OrderingClaim {
                subject: category.members[subject.member].name.clone(),
                object: category.members[object.member].name.clone(),
                axis: axis.to_string(),
                direction,
            });
            out.push(f);
        }
    }
}

/// KB targets mentioned anywhere in `range`, by finding or by name.
fn targets_in(text: &str, kb: &FactKb, range: (usize, usize), found: &[FactFinding]) -> Vec<String> {
    let slice = &text[range.0..range.1];
    let mut names: Vec<String> = found
        .iter()
        .filter(|f| f.start >= range.0 && f.end <= range.1)
        .filter_map(|f| f.matched_target.clone())
        .collect();
    for k in &kb.constants {
        if k.aliases.iter().any(|a| contains_ci(slice, a).is_some()) {
            names.push(k.name.clone());
        }
    }
    for c in &kb.ordered_categories {
        if !member_mentions(slice, c).is_empty() {
            names.push(c.name.clone());
        }
    }
    names.sort();
    names.dedup();
    names
}

fn extract_concepts(
    text: &str,
    kb: &FactKb,
    sentences: &[(usize, usize)],
    out: &mut Vec<FactFinding>,
) {
    let mut concepts = Vec::new();
    for caps in POSSESSIVE_CONCEPT.captures_iter(text) {
        let whole = caps.get(0).unwrap();
        let name = &caps[1];
        if NOT_PROPER_NAMES.contains(&name.to_lowercase().as_str()) {
            continue;
        }
        let phrase = format!("{name}'s {}", &caps[2]);
        if kb.is_whitelisted(&phrase) || kb.is_whitelisted(whole.as_str()) {
            continue;
        }
        let mut f = finding(text, FindingKind::UnknownConcept, whole.start(), whole.end(), None);
        f.context_targets = targets_in(text, kb, sentence_of(sentences, whole.start()), out);
        concepts.push(f);
    }
    out.extend(concepts);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kb() -> FactKb {
        FactKb::em_spectrum()
    }

    fn kinds(text: &str) -> Vec<(FindingKind, Option<String>)> {
        extract_from_text(text, &kb())
            .into_iter()
            .map(|f| (f.kind, f.matched_target))
            .collect()
    }

    #[test]
    fn equation_variants() {
        for s in [
            "c = λf",
            "c=λf",
            "c = λ f",
            "c = λ × f",
            "c = lambda x f",
            "c = \\lambda f",
            "v = fλ",
            "λ = c/f",
            "λ = \\frac{c}{f}",
            "f = c / λ",
        ] {
            let found = kinds(s);
            assert_eq!(
                found,
                [(FindingKind::EquationPresent, Some("wave equation".into()))],
                "{s}"
            );
        }
        assert_eq!(
            kinds("E = hc/λ")[0],
            (FindingKind::EquationPresent, Some("photon energy (wavelength)".into()))
        );
        assert_eq!(
            kinds("Use E = h × f.")[0],
            (FindingKind::EquationPresent, Some("photon energy (frequency)".into()))
        );
    }

    #[test]
    fn equations_need_boundaries() {
        assert!(kinds("abc = λfoo").is_empty());
        assert!(kinds("E = hfx").is_empty());
    }

    #[test]
    fn paired_equation_and_constant() {
        let f = extract_from_text("using c = λf, where c = 3×10⁸ m/s", &kb());
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].kind, FindingKind::EquationPresent);
        assert_eq!(f[0].matched_target.as_deref(), Some("wave equation"));
        assert_eq!(f[1].kind, FindingKind::ConstantValue);
        assert_eq!(f[1].matched_target.as_deref(), Some("speed of light"));
        let v = f[1].extracted_value.as_ref().unwrap();
        assert_eq!(v.value, 3e8);
        assert_eq!(v.unit.as_deref(), Some("m/s"));
        assert_eq!(f[1].surface_text, "3×10⁸ m/s");
    }

    #[test]
    fn scientific_notation_forms() {
        for (s, want) in [
            ("c = 3x10^8 m/s", 3e8),
            ("c = 3·10⁸ m/s", 3e8),
            ("c = 3e8 m/s", 3e8),
            ("c = 2.998 × 10^{8} m/s", 2.998e8),
            ("c = 3.00 \\times 10^8 m/s", 3e8),
            ("h = 6.626 × 10^-34 J·s", 6.626e-34),
            ("h = 6.63 x 10⁻³⁴ J s", 6.63e-34),
            ("h = 6.626 × 10^(−34) J·s", 6.626e-34),
            ("The speed of light is 300,000,000 m/s", 3e8),
            ("Light travels at 300,000 km/s in a vacuum", 3e5),
            ("Planck's constant is approximately 6.6e-34 J·s", 6.6e-34),
        ] {
            let f = extract_from_text(s, &kb());
            let c: Vec<_> = f.iter().filter(|f| f.kind == FindingKind::ConstantValue).collect();
            assert_eq!(c.len(), 1, "{s}: {f:?}");
            let got = c[0].extracted_value.as_ref().unwrap().value;
            assert!((got - want).abs() <= want.abs() * 1e-12, "{s}: {got}");
        }
    }

    #[test]
    fn unrelated_numbers_are_ignored() {
        assert!(kinds("A 60-minute lesson for Grades 9–12 in 5 groups.").is_empty());
        assert!(kinds("Sound travels at 343 m/s in air.").is_empty());
    }

    #[test]
    fn ordering_claims() {
        let f = extract_from_text("Gamma rays have a higher frequency than radio waves.", &kb());
        assert_eq!(f.len(), 1);
        let o = f[0].ordering.as_ref().unwrap();
        assert_eq!((o.subject.as_str(), o.object.as_str()), ("gamma", "radio"));
        assert_eq!((o.axis.as_str(), o.direction), ("frequency", Direction::Greater));

        let f = extract_from_text("Radio waves have longer wavelengths than X-rays.", &kb());
        let o = f[0].ordering.as_ref().unwrap();
        assert_eq!((o.subject.as_str(), o.object.as_str(), o.axis.as_str()), ("radio", "x-ray", "wavelength"));

        let f = extract_from_text("Infrared carries less energy than ultraviolet light.", &kb());
        assert_eq!(f[0].ordering.as_ref().unwrap().direction, Direction::Less);
    }

    #[test]
    fn ordering_needs_two_bands_in_one_sentence() {
        assert!(kinds("Gamma rays have higher frequency. Radio is used for broadcasting.").is_empty());
        assert!(kinds("Gamma rays have higher frequency than visible light has.")
            .iter()
            .all(|(k, _)| *k == FindingKind::OrderingClaim));
    }

    #[test]
    fn full_band_listing() {
        let f = kinds(
            "The bands are radio, microwave, infrared, visible, ultraviolet, X-ray and gamma.",
        );
        assert_eq!(f, [(FindingKind::CategoryListing, Some("electromagnetic bands".into()))]);
        assert!(kinds("radio, microwave, infrared, visible, ultraviolet").is_empty());
    }

    #[test]
    fn unknown_concepts() {
        let f = extract_from_text("Recall Snell's law and Smith's law of rays.", &kb());
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].kind, FindingKind::UnknownConcept);
        assert_eq!(f[0].surface_text, "Smith's law");
        assert!(kinds("Planck’s constant links energy and frequency.").is_empty());
        assert!(kinds("Today's experiment uses a prism.").is_empty());
    }

    #[test]
    fn unknown_concept_records_context() {
        let f = extract_from_text("Bohr's constant h = 6.626 × 10^-34 J·s is tiny.", &kb());
        let u = f.iter().find(|f| f.kind == FindingKind::UnknownConcept).unwrap();
        assert_eq!(u.context_targets, ["Planck's constant"]);
    }

    #[test]
    fn empty_text() {
        assert!(extract_from_text("", &kb()).is_empty());
    }
}
