//! Bloom's-taxonomy classification of objectives and the Cognitive Demand
//! Index (CDI), the proportion-weighted mean level:
//!
//! ```text
//! CDI = sum over i in 1..=6 of p_i * i
//! ```
//!
//! Levels: 1 Remember, 2 Understand, 3 Apply, 4 Analyze, 5 Evaluate,
//! 6 Create. Each objective is reduced to its principal verb (first word,
//! after the objective stem, whose lemma is in the lexicon).

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alignment::{strip_stem, Objective};
use crate::scalar::Scalar;

pub const BLOOM_V1: &str = include_str!("../data/bloom_v1.tsv");

pub const LEVEL_NAMES: [&str; 6] = ["Remember", "Understand", "Apply", "Analyze", "Evaluate", "Create"];

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}:{line}: {message}")]
    Format {
        origin: String,
        line: usize,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BloomLexicon {
    pub version: String,
    pub entries: HashMap<String, u8>,
}

impl BloomLexicon {
    pub fn bloom_v1() -> Self {
        Self::parse(BLOOM_V1, "bloom_v1.tsv").expect("shipped lexicon is valid")
    }

    pub fn load(path: &Path) -> Result<Self, LexiconError> {
        let text = fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parses `lemma<TAB>level` lines. `#` starts a comment; a
    /// `# version: <id>` comment names the lexicon version.
    pub fn parse(text: &str, origin: &str) -> Result<Self, LexiconError> {
        let mut version = None;
        let mut entries = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let fail = |message: String| LexiconError::Format {
                origin: origin.to_string(),
                line: i + 1,
                message,
            };
            let trimmed = raw.trim();
            if let Some(comment) = trimmed.strip_prefix('#') {
                if let Some(v) = comment.trim().strip_prefix("version:") {
                    version.get_or_insert_with(|| v.trim().to_string());
                }
                continue;
            }
            let line = raw.split('#').next().unwrap_or_default().trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split('\t').map(str::trim).filter(|c| !c.is_empty());
            let (Some(lemma), Some(level), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(fail(format!("expected `lemma<TAB>level`, got `{line}`")));
            };
            let level: u8 = level
                .parse()
                .ok()
                .filter(|l| (1..=6).contains(l))
                .ok_or_else(|| fail(format!("level `{level}` not in 1..=6")))?;
            let lemma = lemma.to_lowercase();
            if let Some(prev) = entries.insert(lemma.clone(), level) {
                return Err(fail(format!("`{lemma}` listed twice (levels {prev} and {level})")));
            }
        }
        let version = version.ok_or_else(|| LexiconError::Format {
            origin: origin.to_string(),
            line: 1,
            message: "missing `# version:` header".into(),
        })?;
        if entries.is_empty() {
            return Err(LexiconError::Format {
                origin: origin.to_string(),
                line: 1,
                message: "no entries".into(),
            });
        }
        Ok(Self { version, entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn level(&self, lemma: &str) -> Option<u8> {
        self.entries.get(lemma).copied()
    }
}

/// Irregular forms that suffix rules cannot reach.
const IRREGULAR: &[(&str, &str)] = &[
    ("built", "build"),
    ("chose", "choose"),
    ("chosen", "choose"),
    ("did", "do"),
    ("done", "do"),
    ("drew", "draw"),
    ("drawn", "draw"),
    ("found", "find"),
    ("gave", "give"),
    ("given", "give"),
    ("knew", "know"),
    ("known", "know"),
    ("made", "make"),
    ("read", "read"),
    ("shown", "show"),
    ("taught", "teach"),
    ("told", "tell"),
    ("understood", "understand"),
    ("wrote", "write"),
    ("written", "write"),
];

fn push_candidate(out: &mut Vec<String>, s: String) {
    if s.len() >= 2 && !out.contains(&s) {
        out.push(s);
    }
}

fn undouble(stem: &str) -> Option<String> {
    let b = stem.as_bytes();
    (b.len() >= 2 && b[b.len() - 1] == b[b.len() - 2] && !matches!(b[b.len() - 1], b'l' | b's' | b'z'))
        .then(|| stem[..stem.len() - 1].to_string())
}

/// Candidate lemmas for a lowercase word, most specific first.
fn lemma_candidates(word: &str) -> Vec<String> {
    let mut out = Vec::new();
    if let Some(&(_, lemma)) = IRREGULAR.iter().find(|(form, _)| *form == word) {
        out.push(lemma.to_string());
    }
    push_candidate(&mut out, word.to_string());
    if let Some(stem) = word.strip_suffix("ies").or_else(|| word.strip_suffix("ied")) {
        push_candidate(&mut out, format!("{stem}y"));
    }
    if let Some(stem) = word.strip_suffix("es") {
        push_candidate(&mut out, stem.to_string());
    }
    if let Some(stem) = word.strip_suffix('s') {
        if !stem.ends_with('s') {
            push_candidate(&mut out, stem.to_string());
        }
    }
    for suffix in ["ing", "ed"] {
        if let Some(stem) = word.strip_suffix(suffix) {
            push_candidate(&mut out, stem.to_string());
            push_candidate(&mut out, format!("{stem}e"));
            if let Some(u) = undouble(stem) {
                push_candidate(&mut out, u);
            }
        }
    }
    if let Some(stem) = word.strip_suffix('d') {
        push_candidate(&mut out, stem.to_string());
    }
    // British -yse / -ise spellings.
    for c in out.clone() {
        if let Some(stem) = c.strip_suffix("yse") {
            push_candidate(&mut out, format!("{stem}yze"));
        }
        if let Some(stem) = c.strip_suffix("ise") {
            push_candidate(&mut out, format!("{stem}ize"));
        }
    }
    out
}

/// Lemma of the first lexicon verb in `text` after any objective stem.
pub fn principal_verb_in(text: &str, lexicon: &BloomLexicon) -> Option<String> {
    let body = strip_stem(text);
    body.split(|c: char| !(c.is_alphabetic() || c == '-'))
        .filter(|w| !w.is_empty())
        .find_map(|w| {
            lemma_candidates(&w.to_lowercase())
                .into_iter()
                .find(|c| lexicon.entries.contains_key(c))
        })
}

pub fn principal_verb(objective: &Objective, lexicon: &BloomLexicon) -> Option<String> {
    principal_verb_in(&objective.text, lexicon)
}

/// Level of a lemma, or `None` ("unclassified") when it is not listed.
pub fn classify_verb(lemma: &str, lexicon: &BloomLexicon) -> Option<u8> {
    lexicon.level(lemma)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedObjective {
    pub text: String,
    pub verb: Option<String>,
    pub level: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct CognitiveProfile<S> {
    /// Shares of levels 1..=6 among classified objectives; all zero when
    /// nothing was classified.
    pub level_proportions: [S; 6],
    pub cdi: Option<S>,
    pub classified: usize,
    pub unclassified: usize,
}

impl<S: Scalar> CognitiveProfile<S> {
    pub fn from_levels(levels: &[Option<u8>]) -> Self {
        let mut counts = [0usize; 6];
        let mut unclassified = 0;
        for l in levels {
            match l {
                Some(l @ 1..=6) => counts[usize::from(*l) - 1] += 1,
                _ => unclassified += 1,
            }
        }
        let classified: usize = counts.iter().sum();
        let mut level_proportions = [S::zero(); 6];
        if classified == 0 {
            return Self {
                level_proportions,
                cdi: None,
                classified,
                unclassified,
            };
        }
        let n = S::from_count(classified);
        for (p, c) in level_proportions.iter_mut().zip(counts) {
            *p = S::from_count(c) / n;
        }
        let weighted: usize = counts.iter().enumerate().map(|(i, c)| (i + 1) * c).sum();
        Self {
            level_proportions,
            cdi: Some(S::from_count(weighted) / n),
            classified,
            unclassified,
        }
    }
}

pub fn classify_objectives(objectives: &[Objective], lexicon: &BloomLexicon) -> Vec<ClassifiedObjective> {
    objectives
        .iter()
        .map(|o| {
            let verb = principal_verb(o, lexicon);
            let level = verb.as_deref().and_then(|v| classify_verb(v, lexicon));
            ClassifiedObjective {
                text: o.text.clone(),
                verb,
                level,
            }
        })
        .collect()
}

pub fn cognitive_profile<S: Scalar>(objectives: &[Objective], lexicon: &BloomLexicon) -> CognitiveProfile<S> {
    let levels: Vec<Option<u8>> = classify_objectives(objectives, lexicon)
        .into_iter()
        .map(|c| c.level)
        .collect();
    CognitiveProfile::from_levels(&levels)
}

/// `sum p_i * i`, the identity the CDI satisfies for any profile.
pub fn cdi_from_proportions<S: Scalar>(p: &[S; 6]) -> S {
    p.iter()
        .enumerate()
        .map(|(i, p)| *p * S::from_count(i + 1))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lex() -> BloomLexicon {
        BloomLexicon::bloom_v1()
    }

    #[test]
    fn shipped_lexicon() {
        let l = lex();
        assert!(l.len() >= 250, "{}", l.len());
        assert_eq!(l.version, "bloom-v1");
        for (verb, level) in [
            ("identify", 1),
            ("list", 1),
            ("describe", 1),
            ("explain", 2),
            ("compare", 2),
            ("discuss", 2),
            ("interpret", 2),
            ("use", 3),
            ("calculate", 3),
            ("solve", 3),
            ("analyze", 4),
            ("evaluate", 5),
            ("design", 6),
        ] {
            assert_eq!(classify_verb(verb, &l), Some(level), "{verb}");
        }
        assert_eq!(classify_verb("frobnicate", &l), None);
    }

    #[test]
    fn principal_verbs() {
        let l = lex();
        let pv = |t: &str| principal_verb_in(t, &l);
        assert_eq!(pv("Students will be able to identify the seven bands").as_deref(), Some("identify"));
        assert_eq!(pv("Explain how wavelength relates to energy").as_deref(), Some("explain"));
        assert_eq!(pv("The electromagnetic spectrum"), None);
        assert_eq!(pv("SWBAT: analysing spectra").as_deref(), Some("analyse"));
        assert_eq!(pv("Identifies the bands").as_deref(), Some("identify"));
        assert_eq!(pv("Students classified waves").as_deref(), Some("classify"));
        assert_eq!(pv("Calculating photon energy").as_deref(), Some("calculate"));
        assert_eq!(pv("Wrote a summary").as_deref(), Some("write"));
        assert_eq!(pv("planning an investigation").as_deref(), Some("plan"));
    }

    #[test]
    fn profile_arithmetic() {
        let p = CognitiveProfile::<f64>::from_levels(&[Some(1), Some(1), Some(2)]);
        assert!((p.level_proportions[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((p.level_proportions[1] - 1.0 / 3.0).abs() < 1e-12);
        assert!((p.cdi.unwrap() - 4.0 / 3.0).abs() < 1e-12);

        let p = CognitiveProfile::<f64>::from_levels(&[Some(6)]);
        assert_eq!(p.cdi, Some(6.0));

        let p = CognitiveProfile::<f64>::from_levels(&[None, None]);
        assert_eq!((p.cdi, p.classified, p.unclassified), (None, 0, 2));
        assert_eq!(p.level_proportions, [0.0; 6]);
    }

    #[test]
    fn lexicon_format_errors() {
        assert!(BloomLexicon::parse("identify\t1\n", "x").is_err());
        let dup = "# version: t\nidentify\t1\nidentify\t2\n";
        let err = BloomLexicon::parse(dup, "dup.tsv").unwrap_err();
        assert!(err.to_string().starts_with("dup.tsv:3:"), "{err}");
        assert!(BloomLexicon::parse("# version: t\nx\t7\n", "x").is_err());
        let ok = BloomLexicon::parse("# version: t\nexplain\t2\t# note\n", "x").unwrap();
        assert_eq!(ok.level("explain"), Some(2));
    }
}
