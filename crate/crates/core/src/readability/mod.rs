//! Readability and lexical statistics: FKGL, FRE, Gunning Fog, type-token
//! ratio and mean sentence length.
//!
//! All indices are computed from one [`TextCounts`] pass over a plan's
//! normalized text. Formulas:
//!
//! ```text
//! FKGL = 0.39 (words / sentences) + 11.8 (syllables / words) - 15.59
//! FRE  = 206.835 - 1.015 (words / sentences) - 84.6 (syllables / words)
//! FOG  = 0.4 [ (words / sentences) + 100 (complex words / words) ]
//! TTR  = unique words / words
//! ```
//!
//! Negative grade levels are reported as computed.

mod syllables;
pub mod text;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::PlanDocument;
use crate::scalar::Scalar;

pub use syllables::{count_syllables, NotAWord};
pub use text::{segment_sentences, sentence_spans, words, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReadabilityError {
    #[error("text too short for readability ({sentences} sentences, {words} words)")]
    TooShort { sentences: usize, words: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TextCounts {
    pub sentences: usize,
    pub words: usize,
    pub syllables: usize,
    /// Words of three or more syllables.
    pub complex_words: usize,
    /// Distinct case-folded words.
    pub unique_words: usize,
}

impl TextCounts {
    pub fn words_per_sentence<S: Scalar>(&self) -> S {
        S::from_count(self.words) / S::from_count(self.sentences)
    }

    pub fn syllables_per_word<S: Scalar>(&self) -> S {
        S::from_count(self.syllables) / S::from_count(self.words)
    }
}

/// Counts sentences, words, syllables, complex and unique words.
pub fn count_text(normalized: &str) -> Result<TextCounts, ReadabilityError> {
    let sentences = sentence_spans(normalized).len();
    let tokens = words(normalized);
    let mut counts = TextCounts {
        sentences,
        words: tokens.len(),
        ..TextCounts::default()
    };
    if counts.sentences == 0 || counts.words == 0 {
        return Err(ReadabilityError::TooShort {
            sentences: counts.sentences,
            words: counts.words,
        });
    }
    let mut unique = HashSet::new();
    for w in &tokens {
        let syl = if w.numeric {
            1
        } else {
            count_syllables(w.text).unwrap_or(1)
        };
        counts.syllables += syl;
        if syl >= 3 {
            counts.complex_words += 1;
        }
        unique.insert(w.text.to_lowercase());
    }
    counts.unique_words = unique.len();
    Ok(counts)
}

pub fn compute_counts(plan: &PlanDocument) -> Result<TextCounts, ReadabilityError> {
    count_text(&plan.normalized_text)
}

pub fn fkgl<S: Scalar>(c: &TextCounts) -> S {
    S::lit(0.39) * c.words_per_sentence::<S>() + S::lit(11.8) * c.syllables_per_word::<S>()
        - S::lit(15.59)
}

pub fn fre<S: Scalar>(c: &TextCounts) -> S {
    S::lit(206.835)
        - S::lit(1.015) * c.words_per_sentence::<S>()
        - S::lit(84.6) * c.syllables_per_word::<S>()
}

pub fn fog<S: Scalar>(c: &TextCounts) -> S {
    let complex_share = S::from_count(c.complex_words) / S::from_count(c.words);
    S::lit(0.4) * (c.words_per_sentence::<S>() + S::lit(100.0) * complex_share)
}

pub fn ttr<S: Scalar>(c: &TextCounts) -> S {
    S::from_count(c.unique_words) / S::from_count(c.words)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct ReadabilityProfile<S> {
    pub fkgl: S,
    pub fre: S,
    pub fog: S,
    pub ttr: S,
    pub mean_sentence_length: S,
}

impl<S: Scalar> ReadabilityProfile<S> {
    pub fn from_counts(c: &TextCounts) -> Self {
        Self {
            fkgl: fkgl(c),
            fre: fre(c),
            fog: fog(c),
            ttr: ttr(c),
            mean_sentence_length: c.words_per_sentence(),
        }
    }
}

pub fn readability_profile<S: Scalar>(
    plan: &PlanDocument,
) -> Result<ReadabilityProfile<S>, ReadabilityError> {
    compute_counts(plan).map(|c| ReadabilityProfile::from_counts(&c))
}
