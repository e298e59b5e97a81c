//! Rule-based English syllable counting.
//!
//! Base rule: count maximal vowel groups (`a e i o u y`). Adjustments:
//!
//! * a final `e` after a consonant is silent (`wave`), except in a
//!   consonant + `le` ending (`table`);
//! * `-es` is silent unless it follows a sibilant (`waves` vs `boxes`);
//! * `-ed` is silent unless it follows `t` or `d` (`used` vs `heated`);
//! * an `e` between a consonant and the suffixes `-ful -fully -less -ly
//!   -ment -ments -ness` is silent (`carefully`, `statement`);
//! * the hiatus pairs `ia io iu eo ua` split into two syllables
//!   (`radio`, `video`, `medium`) unless the first vowel follows `c`, `s`
//!   or `t` (`-tion`, `-cial`) or `ua` follows `q`;
//! * a small exception table covers frequent words the rules miss.
//!
//! The result is never below 1.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not a word: `{0}`")]
pub struct NotAWord(pub String);

const EXCEPTIONS: &[(&str, usize)] = &[
    ("area", 3),
    ("areas", 3),
    ("being", 2),
    ("create", 2),
    ("created", 3),
    ("creates", 2),
    ("creating", 3),
    ("creation", 3),
    ("creative", 3),
    ("creativity", 5),
    ("idea", 3),
    ("ideas", 3),
    ("infrared", 3),
    ("people", 2),
    ("react", 2),
    ("reaction", 3),
    ("reactions", 3),
    ("science", 2),
    ("sciences", 3),
    ("scientific", 4),
    ("scientist", 3),
    ("scientists", 3),
    ("ultraviolet", 5),
    ("wavelength", 2),
    ("wavelengths", 2),
    ("everyone", 3),
    ("lineup", 2),
    ("somewhere", 2),
    ("therefore", 2),
    ("whereas", 2),
    ("element", 3),
    ("elements", 3),
    ("increment", 3),
    ("increments", 3),
    ("every", 2),
    ("everyday", 3),
    ("everything", 3),
    ("everywhere", 3),
    ("evaluate", 4),
    ("evaluated", 5),
    ("evaluates", 4),
    ("evaluating", 5),
    ("evaluation", 5),
];

const SILENT_E_SUFFIXES: [&str; 7] = ["fully", "ful", "less", "ly", "ments", "ment", "ness"];

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

/// Syllables in one word. Errors when the word contains no letter.
pub fn count_syllables(word: &str) -> Result<usize, NotAWord> {
    if !word.chars().any(char::is_alphabetic) {
        return Err(NotAWord(word.to_string()));
    }
    let folded = word.to_lowercase();
    let base = folded
        .strip_suffix("'s")
        .or_else(|| folded.strip_suffix("’s"))
        .unwrap_or(&folded);
    let lower: String = base.chars().filter(|c| c.is_alphabetic()).collect();
    let lower = lower.as_str();
    if let Some(&(_, n)) = EXCEPTIONS.iter().find(|(w, _)| *w == lower) {
        return Ok(n);
    }
    Ok(heuristic(lower).max(1))
}

fn heuristic(word: &str) -> usize {
    let chars: Vec<char> = word.chars().collect();
    let n = chars.len();
    let mut count = 0usize;
    let mut i = 0;
    while i < n {
        if !is_vowel(chars[i]) {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && is_vowel(chars[i]) {
            i += 1;
        }
        count += 1;
        // Hiatus split inside the group.
        for j in start..i.saturating_sub(1) {
            let pair = (chars[j], chars[j + 1]);
            let before = if j == 0 { None } else { Some(chars[j - 1]) };
            let hiatus = match pair {
                ('i', 'a' | 'o' | 'u') | ('e', 'o') => {
                    !matches!(before, Some('c' | 's' | 't'))
                }
                ('u', 'a') => !matches!(before, Some('q' | 'g')),
                _ => false,
            };
            if hiatus {
                count += 1;
            }
        }
    }

    let consonant_at = |k: usize| k < n && !is_vowel(chars[k]);
    for suffix in SILENT_E_SUFFIXES {
        let Some(stem) = word.strip_suffix(suffix).and_then(|w| w.strip_suffix('e')) else {
            continue;
        };
        let k = stem.chars().count();
        let le_stem = stem.ends_with('l') && k >= 2 && consonant_at(k - 2);
        if k >= 2 && consonant_at(k - 1) && !le_stem && stem.chars().any(is_vowel) && count > 1 {
            count -= 1;
        }
        break;
    }
    if n >= 2 && chars[n - 1] == 'e' && consonant_at(n - 2) {
        let le_ending = chars[n - 2] == 'l' && n >= 3 && consonant_at(n - 3);
        if !le_ending && count > 1 {
            count -= 1;
        }
    } else if n >= 3 && chars[n - 1] == 's' && chars[n - 2] == 'e' && consonant_at(n - 3) {
        let sibilant = matches!(chars[n - 3], 's' | 'x' | 'z' | 'c' | 'g')
            || (chars[n - 3] == 'h' && n >= 4 && matches!(chars[n - 4], 'c' | 's'));
        let le_ending = chars[n - 3] == 'l' && n >= 4 && consonant_at(n - 4);
        if !sibilant && !le_ending && count > 1 {
            count -= 1;
        }
    } else if n >= 3 && chars[n - 1] == 'd' && chars[n - 2] == 'e' && consonant_at(n - 3) {
        let voiced = matches!(chars[n - 3], 't' | 'd');
        let le_ending = chars[n - 3] == 'l' && n >= 4 && consonant_at(n - 4);
        if !voiced && !le_ending && count > 1 {
            count -= 1;
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    fn syl(w: &str) -> usize {
        count_syllables(w).unwrap()
    }

    #[test]
    fn reference_examples() {
        assert_eq!(syl("wave"), 1);
        assert_eq!(syl("a"), 1);
        assert_eq!(syl("electromagnetic"), 6);
    }

    #[test]
    fn hand_syllabified_words() {
        // Oracle: dictionary syllabification, written out by hand.
        let cases = [
            ("light", 1),      // light
            ("energy", 3),     // en-er-gy
            ("frequency", 3),  // fre-quen-cy
            ("wavelength", 2), // wave-length
            ("spectrum", 2),   // spec-trum
            ("radio", 3),      // ra-di-o
            ("radiation", 4),  // ra-di-a-tion
            ("microwaves", 3), // mi-cro-waves
            ("infrared", 3),   // in-fra-red
            ("visible", 3),    // vis-i-ble
            ("gamma", 2),      // gam-ma
            ("table", 2),      // ta-ble
            ("waves", 1),      // waves
            ("boxes", 2),      // box-es
            ("used", 1),       // used
            ("heated", 2),     // heat-ed
            ("video", 3),      // vid-e-o
            ("medium", 3),     // me-di-um
            ("nation", 2),     // na-tion
            ("students", 2),   // stu-dents
            ("the", 1),
            ("free", 1),
            ("lesson", 2),     // les-son
            ("identify", 4),   // i-den-ti-fy
            ("explain", 2),    // ex-plain
            ("calculate", 3),  // cal-cu-late
            ("ultraviolet", 5),
            ("science", 2),
            ("quality", 3),    // qual-i-ty
            ("ion", 2),        // i-on
            ("carefully", 3),  // care-ful-ly
            ("useful", 2),     // use-ful
            ("statement", 2),  // state-ment
            ("measurement", 3), // meas-ure-ment
            ("completely", 3), // com-plete-ly
            ("freely", 2),     // free-ly
            ("rely", 2),       // re-ly
            ("cement", 2),     // ce-ment
            ("supplement", 3), // sup-ple-ment
            ("element", 3),    // el-e-ment
            ("everyday", 3),   // ev-ery-day
        ];
        for (w, expected) in cases {
            assert_eq!(syl(w), expected, "{w}");
        }
    }

    #[test]
    fn case_and_possessive_ignored() {
        assert_eq!(syl("Planck's"), 1);
        assert_eq!(syl("WAVE"), 1);
    }

    #[test]
    fn non_words_rejected() {
        assert!(count_syllables("3×10^8").is_err());
        assert!(count_syllables("").is_err());
        assert!(count_syllables("--").is_err());
    }

    #[test]
    fn non_latin_letters_count_as_one() {
        assert_eq!(syl("λ"), 1);
    }
}
