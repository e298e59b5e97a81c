//! Sentence segmentation and word tokenization.

/// Tokens ending in `.` that do not end a sentence.
pub const ABBREVIATIONS: &[&str] = &[
    "e.g.", "i.e.", "etc.", "vs.", "cf.", "approx.", "ca.", "al.", "dr.", "mr.", "mrs.", "ms.",
    "prof.", "st.", "fig.", "figs.", "eq.", "eqs.", "no.", "vol.", "p.", "pp.", "jr.", "sr.",
    "ch.", "sec.", "u.s.", "a.m.", "p.m.",
];

const CLOSERS: [char; 6] = [')', '"', '\'', '”', '’', ']'];

/// Byte ranges of sentences in `text`, trimmed, never empty and always
/// containing at least one alphanumeric character.
pub fn sentence_spans(text: &str) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut start = 0;
    let mut iter = text.char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        if !matches!(c, '.' | '!' | '?') {
            continue;
        }
        let mut end = i + c.len_utf8();
        let mut only_period = c == '.';
        while let Some(&(j, d)) = iter.peek() {
            if matches!(d, '.' | '!' | '?') {
                only_period &= d == '.';
            } else if !CLOSERS.contains(&d) {
                break;
            }
            end = j + d.len_utf8();
            iter.next();
        }
        let at_boundary = iter.peek().is_none_or(|&(_, d)| d.is_whitespace());
        if !at_boundary {
            continue;
        }
        if only_period && is_abbreviation(&text[start..end]) {
            continue;
        }
        push_span(text, start, end, &mut spans);
        start = end;
    }
    push_span(text, start, text.len(), &mut spans);
    spans
}

fn is_abbreviation(segment: &str) -> bool {
    let last = segment.split_whitespace().last().unwrap_or_default();
    let token = last
        .trim_start_matches(|c: char| !c.is_alphanumeric())
        .trim_end_matches(&CLOSERS[..])
        .to_lowercase();
    ABBREVIATIONS.contains(&token.as_str())
}

fn push_span(text: &str, start: usize, end: usize, spans: &mut Vec<(usize, usize)>) {
    let slice = &text[start..end];
    let lead = slice.len() - slice.trim_start().len();
    let trimmed = slice.trim();
    if trimmed.chars().any(char::is_alphanumeric) {
        spans.push((start + lead, start + lead + trimmed.len()));
    }
}

pub fn segment_sentences(text: &str) -> Vec<&str> {
    sentence_spans(text)
        .into_iter()
        .map(|(s, e)| &text[s..e])
        .collect()
}

/// A word token. Numeric tokens (anything containing a digit, such as
/// `3×10^8` or `60-minute`) are scored as one-syllable words.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Word<'a> {
    pub text: &'a str,
    pub numeric: bool,
}

/// Splits text into words: whitespace chunks containing a digit stay whole;
/// other chunks split into runs of letters and inner apostrophes.
pub fn words(text: &str) -> Vec<Word<'_>> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        if chunk.chars().any(char::is_numeric) {
            let t = chunk.trim_matches(|c: char| !c.is_alphanumeric());
            if !t.is_empty() {
                out.push(Word {
                    text: t,
                    numeric: true,
                });
            }
            continue;
        }
        let mut run_start: Option<usize> = None;
        for (i, c) in chunk.char_indices() {
            let part_of_word = c.is_alphabetic() || (is_apostrophe(c) && run_start.is_some());
            match (part_of_word, run_start) {
                (true, None) => run_start = Some(i),
                (false, Some(s)) => {
                    push_word(&chunk[s..i], &mut out);
                    run_start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = run_start {
            push_word(&chunk[s..], &mut out);
        }
    }
    out
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '’'
}

fn push_word<'a>(run: &'a str, out: &mut Vec<Word<'a>>) {
    let t = run.trim_end_matches(is_apostrophe);
    if !t.is_empty() {
        out.push(Word {
            text: t,
            numeric: false,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_sentences() {
        assert_eq!(
            segment_sentences("Light is a wave. It carries energy."),
            ["Light is a wave.", "It carries energy."]
        );
    }

    #[test]
    fn abbreviation_protected() {
        assert_eq!(
            segment_sentences("e.g. radio waves are long."),
            ["e.g. radio waves are long."]
        );
        assert_eq!(
            segment_sentences("Use a prism (e.g. glass) to split light. Then observe."),
            ["Use a prism (e.g. glass) to split light.", "Then observe."]
        );
    }

    #[test]
    fn empty_input() {
        assert!(segment_sentences("").is_empty());
        assert!(segment_sentences("   ").is_empty());
        assert!(segment_sentences(". . !").is_empty());
    }

    #[test]
    fn decimals_and_closers() {
        assert_eq!(
            segment_sentences("c is 3.0 m/s. \"Really?\" Yes!"),
            ["c is 3.0 m/s.", "\"Really?\"", "Yes!"]
        );
    }

    #[test]
    fn unterminated_tail_is_a_sentence() {
        assert_eq!(segment_sentences("One. two three"), ["One.", "two three"]);
    }

    #[test]
    fn tokenization() {
        let w: Vec<_> = words("Don't split 3×10^8 m/s, age-appropriate λf.")
            .iter()
            .map(|w| (w.text, w.numeric))
            .collect();
        assert_eq!(
            w,
            [
                ("Don't", false),
                ("split", false),
                ("3×10^8", true),
                ("m", false),
                ("s", false),
                ("age", false),
                ("appropriate", false),
                ("λf", false),
            ]
        );
    }

    #[test]
    fn symbols_are_not_words() {
        assert!(words("= + – → 'quoted'").iter().all(|w| w.text == "quoted"));
    }
}
