//! Curriculum-standards alignment: objectives are embedded alongside
//! standard descriptors and scored by cosine similarity.
//!
//! A plan usually states several objectives; each standard's score is the
//! best match over objectives ([`Aggregation::Max`]) unless the mean is
//! requested. Scores are banded as weak (< 0.20), moderate (0.20 to 0.35
//! inclusive) or strong (> 0.35).

pub mod backend;
mod objectives;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

pub use backend::{
    BackendError, EmbeddingBackend, HttpBackend, HttpBackendConfig, LexicalBackend,
    StaticVectorBackend,
};
pub use objectives::{extract_objectives, strip_stem, Objective};

/// The four HS-PS4 performance expectations scored by default.
pub const NGSS_HS_PS4: &str = include_str!("../../data/ngss_hs-ps4.json");
/// All five HS-PS4 performance expectations.
pub const NGSS_HS_PS4_FULL: &str = include_str!("../../data/ngss_hs-ps4_full.json");

#[derive(Debug, Error)]
pub enum AlignmentError {
    #[error("nothing to align: no objectives found")]
    NoObjectives,
    #[error("no standards to align against")]
    NoStandards,
    #[error("degenerate embedding (zero norm)")]
    DegenerateEmbedding,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error(transparent)]
    Backend(#[from] BackendError),
}

#[derive(Debug, Error)]
pub enum StandardsError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parsing {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StandardDescriptor {
    pub code: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StandardSet {
    pub name: String,
    #[serde(default)]
    pub version: String,
    pub standards: Vec<StandardDescriptor>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum StandardsFile {
    Set(StandardSet),
    List(Vec<StandardDescriptor>),
}

impl StandardSet {
    /// The default four-code HS-PS4 set.
    pub fn ngss_hs_ps4() -> Self {
        Self::parse(NGSS_HS_PS4, "ngss_hs-ps4.json").expect("shipped standards are valid")
    }

    pub fn load(path: &Path) -> Result<Self, StandardsError> {
        let text = fs::read_to_string(path).map_err(|source| StandardsError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Accepts `{"name", "version", "standards": [...]}` or a bare list of
    /// `{"code", "description"}` records.
    pub fn parse(text: &str, origin: &str) -> Result<Self, StandardsError> {
        let file: StandardsFile = serde_json::from_str(text).map_err(|source| StandardsError::Parse {
            path: origin.to_string(),
            source,
        })?;
        let set = match file {
            StandardsFile::Set(s) => s,
            StandardsFile::List(standards) => StandardSet {
                name: origin.to_string(),
                version: String::new(),
                standards,
            },
        };
        let invalid = |message: String| StandardsError::Invalid {
            path: origin.to_string(),
            message,
        };
        if set.standards.is_empty() {
            return Err(invalid("no standards".into()));
        }
        let mut seen = HashSet::new();
        for s in &set.standards {
            if s.code.trim().is_empty() || s.description.trim().is_empty() {
                return Err(invalid("empty code or description".into()));
            }
            if !seen.insert(s.code.as_str()) {
                return Err(invalid(format!("duplicate code {}", s.code)));
            }
        }
        Ok(set)
    }

    pub fn codes(&self) -> Vec<&str> {
        self.standards.iter().map(|s| s.code.as_str()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    Weak,
    Moderate,
    Strong,
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Band::Weak => "weak",
            Band::Moderate => "moderate",
            Band::Strong => "strong",
        })
    }
}

pub fn classify_alignment<S: Scalar>(s: S) -> Band {
    if s < S::lit(0.20) {
        Band::Weak
    } else if s <= S::lit(0.35) {
        Band::Moderate
    } else {
        Band::Strong
    }
}

/// How several objective scores collapse into one score per standard.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    #[default]
    Max,
    Mean,
}

impl FromStr for Aggregation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "max" => Ok(Aggregation::Max),
            "mean" => Ok(Aggregation::Mean),
            other => Err(format!("unknown aggregation `{other}` (expected max or mean)")),
        }
    }
}

pub fn cosine<S: Scalar>(a: &[S], b: &[S]) -> Result<S, AlignmentError> {
    if a.len() != b.len() {
        return Err(AlignmentError::DimensionMismatch(a.len(), b.len()));
    }
    let dot: S = a.iter().zip(b).map(|(x, y)| *x * *y).sum();
    let na = a.iter().map(|x| *x * *x).sum::<S>().sqrt();
    let nb = b.iter().map(|x| *x * *x).sum::<S>().sqrt();
    if na.is_zero() || nb.is_zero() || !na.is_finite() || !nb.is_finite() {
        return Err(AlignmentError::DegenerateEmbedding);
    }
    if a == b {
        return Ok(S::one());
    }
    let c = dot / (na * nb);
    Ok(c.max(-S::one()).min(S::one()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct StandardScore<S> {
    pub similarity: S,
    pub band: Band,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct AlignmentReport<S> {
    pub per_standard: BTreeMap<String, StandardScore<S>>,
    pub mean_similarity: S,
    pub aggregation: Aggregation,
    pub objectives: usize,
}

/// Standard descriptors embedded once per run.
#[derive(Debug, Clone)]
pub struct EmbeddedStandards<S> {
    pub codes: Vec<String>,
    pub vectors: Vec<Vec<S>>,
}

pub fn embed_standards<S: Scalar>(
    standards: &StandardSet,
    backend: &dyn EmbeddingBackend<S>,
) -> Result<EmbeddedStandards<S>, AlignmentError> {
    if standards.standards.is_empty() {
        return Err(AlignmentError::NoStandards);
    }
    let texts: Vec<&str> = standards.standards.iter().map(|s| s.description.as_str()).collect();
    let vectors = backend.embed_batch(&texts)?;
    Ok(EmbeddedStandards {
        codes: standards.standards.iter().map(|s| s.code.clone()).collect(),
        vectors,
    })
}

/// Scores already-embedded objectives against embedded standards.
pub fn align_vectors<S: Scalar>(
    objectives: &[Vec<S>],
    standards: &EmbeddedStandards<S>,
    aggregation: Aggregation,
) -> Result<AlignmentReport<S>, AlignmentError> {
    if objectives.is_empty() {
        return Err(AlignmentError::NoObjectives);
    }
    if standards.codes.is_empty() {
        return Err(AlignmentError::NoStandards);
    }
    let mut per_standard = BTreeMap::new();
    let mut total = S::zero();
    for (code, sv) in standards.codes.iter().zip(&standards.vectors) {
        let scores = objectives
            .iter()
            .map(|ov| cosine(ov, sv))
            .collect::<Result<Vec<S>, _>>()?;
        let similarity = match aggregation {
            Aggregation::Max => scores.iter().copied().fold(S::neg_infinity(), S::max),
            Aggregation::Mean => scores.iter().copied().sum::<S>() / S::from_count(scores.len()),
        };
        total = total + similarity;
        per_standard.insert(
            code.clone(),
            StandardScore {
                similarity,
                band: classify_alignment(similarity),
            },
        );
    }
    Ok(AlignmentReport {
        mean_similarity: total / S::from_count(standards.codes.len()),
        per_standard,
        aggregation,
        objectives: objectives.len(),
    })
}

pub fn align_plan<S: Scalar>(
    objectives: &[Objective],
    standards: &StandardSet,
    backend: &dyn EmbeddingBackend<S>,
    aggregation: Aggregation,
) -> Result<AlignmentReport<S>, AlignmentError> {
    if objectives.is_empty() {
        return Err(AlignmentError::NoObjectives);
    }
    let embedded = embed_standards(standards, backend)?;
    align_embedded(objectives, &embedded, backend, aggregation)
}

pub fn align_embedded<S: Scalar>(
    objectives: &[Objective],
    standards: &EmbeddedStandards<S>,
    backend: &dyn EmbeddingBackend<S>,
    aggregation: Aggregation,
) -> Result<AlignmentReport<S>, AlignmentError> {
    if objectives.is_empty() {
        return Err(AlignmentError::NoObjectives);
    }
    let texts: Vec<&str> = objectives.iter().map(|o| o.text.as_str()).collect();
    let vectors = backend.embed_batch(&texts)?;
    align_vectors(&vectors, standards, aggregation)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_examples() {
        assert!((cosine(&[1.0f64, 0.0], &[0.0, 1.0]).unwrap()).abs() < 1e-15);
        let c: f64 = cosine(&[1.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!((c - 0.70711).abs() < 1e-5);
        assert_eq!(cosine(&[2.0f64, 3.0], &[2.0, 3.0]).unwrap(), 1.0);
        assert!(matches!(
            cosine(&[0.0f64, 0.0], &[1.0, 0.0]),
            Err(AlignmentError::DegenerateEmbedding)
        ));
    }

    #[test]
    fn bands() {
        assert_eq!(classify_alignment(0.19f64), Band::Weak);
        assert_eq!(classify_alignment(0.20f64), Band::Moderate);
        assert_eq!(classify_alignment(0.25f64), Band::Moderate);
        assert_eq!(classify_alignment(0.35f64), Band::Moderate);
        assert_eq!(classify_alignment(0.40f64), Band::Strong);
        assert_eq!(classify_alignment(-1.0f64), Band::Weak);
    }

    #[test]
    fn mean_over_standards() {
        // One objective with known similarities to four unit standards.
        let o = vec![vec![0.2f64, 0.1, 0.1, 0.0, (1.0f64 - 0.06).sqrt()]];
        let unit = |i: usize| {
            let mut v = vec![0.0; 5];
            v[i] = 1.0;
            v
        };
        let standards = EmbeddedStandards {
            codes: vec!["A".into(), "B".into(), "C".into(), "D".into()],
            vectors: (0..4).map(unit).collect(),
        };
        let r = align_vectors(&o, &standards, Aggregation::Max).unwrap();
        assert!((r.mean_similarity - 0.10).abs() < 1e-12);
        assert_eq!(r.per_standard["A"].band, Band::Moderate);
    }

    #[test]
    fn shipped_standards() {
        let set = StandardSet::ngss_hs_ps4();
        assert_eq!(set.codes(), ["HS-PS4-1", "HS-PS4-3", "HS-PS4-4", "HS-PS4-5"]);
        let full = StandardSet::parse(NGSS_HS_PS4_FULL, "full").unwrap();
        assert_eq!(full.standards.len(), 5);
    }

    #[test]
    fn duplicate_codes_rejected() {
        let text = r#"[{"code":"A","description":"x"},{"code":"A","description":"y"}]"#;
        assert!(StandardSet::parse(text, "dup").is_err());
    }

    #[test]
    fn aggregation_parses() {
        assert_eq!("MEAN".parse::<Aggregation>().unwrap(), Aggregation::Mean);
        assert!("median".parse::<Aggregation>().is_err());
    }
}
