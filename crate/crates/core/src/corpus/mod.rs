//! Lesson-plan corpus: ingestion, metadata resolution and normalization.
//!
//! Plans are `.txt`/`.md` files in one directory. Metadata comes from an
//! optional manifest (see [`manifest`]) and falls back to the filename
//! convention `<model>__<framework>__<topic>.txt`. When both are present the
//! manifest wins.

pub mod manifest;
mod normalize;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracing::warn;

pub use manifest::{read_manifest, write_manifest, ManifestEntry, DEFAULT_MANIFEST_NAME};
pub use normalize::{normalize, LineKind, LineSpan, Normalized};

const PLAN_EXTENSIONS: [&str; 3] = ["txt", "md", "markdown"];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus directory {0} does not exist or is not a directory")]
    MissingDirectory(PathBuf),
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest {path}: {message}")]
    Manifest { path: PathBuf, message: String },
    #[error("duplicate plan key {key} ({first} and {second})")]
    DuplicateKey {
        key: PlanKey,
        first: PathBuf,
        second: PathBuf,
    },
    #[error("invalid metadata: {0}")]
    Metadata(String),
}

/// Prompt framework used to generate a plan.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Framework {
    Tag,
    Race,
    Costar,
    Custom(String),
}

impl Framework {
    pub const STANDARD: [Framework; 3] = [Framework::Tag, Framework::Race, Framework::Costar];

    pub fn as_str(&self) -> &str {
        match self {
            Framework::Tag => "TAG",
            Framework::Race => "RACE",
            Framework::Costar => "COSTAR",
            Framework::Custom(s) => s,
        }
    }
}

impl fmt::Display for Framework {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Framework {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s.to_ascii_uppercase().as_str() {
            "" => Err(CorpusError::Metadata("empty framework id".into())),
            "TAG" => Ok(Framework::Tag),
            "RACE" => Ok(Framework::Race),
            "COSTAR" | "CO-STAR" => Ok(Framework::Costar),
            _ => Ok(Framework::Custom(s.to_string())),
        }
    }
}

impl TryFrom<String> for Framework {
    type Error = CorpusError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Framework> for String {
    fn from(f: Framework) -> String {
        f.as_str().to_string()
    }
}

impl PartialOrd for Framework {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Framework {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.as_str().cmp(other.as_str())
    }
}

/// Identity of a plan within a corpus.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlanKey {
    pub model_id: String,
    pub framework: Framework,
    pub topic: String,
}

impl fmt::Display for PlanKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.model_id, self.framework, self.topic)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanMetadata {
    pub model_id: String,
    pub framework: Framework,
    pub topic: String,
    pub source_path: PathBuf,
    pub generated_at: Option<NaiveDate>,
}

impl PlanMetadata {
    pub fn new(
        model_id: impl Into<String>,
        framework: Framework,
        topic: impl Into<String>,
        source_path: impl Into<PathBuf>,
    ) -> Result<Self, CorpusError> {
        let model_id = model_id.into().trim().to_string();
        if model_id.is_empty() {
            return Err(CorpusError::Metadata("empty model id".into()));
        }
        if framework.as_str().is_empty() {
            return Err(CorpusError::Metadata("empty framework id".into()));
        }
        Ok(Self {
            model_id,
            framework,
            topic: topic.into(),
            source_path: source_path.into(),
            generated_at: None,
        })
    }

    pub fn key(&self) -> PlanKey {
        PlanKey {
            model_id: self.model_id.clone(),
            framework: self.framework.clone(),
            topic: self.topic.clone(),
        }
    }

    /// Parses `<model>__<framework>__<topic>.<ext>`.
    pub fn from_filename(path: &Path) -> Result<Self, CorpusError> {
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| CorpusError::Metadata(format!("{}: non UTF-8 name", path.display())))?;
        let parts: Vec<&str> = stem.split("__").collect();
        match parts.as_slice() {
            [model, framework, topic]
                if !model.is_empty() && !framework.is_empty() && !topic.is_empty() =>
            {
                Self::new(*model, framework.parse()?, *topic, path)
            }
            _ => Err(CorpusError::Metadata(format!(
                "{}: expected <model>__<framework>__<topic>",
                path.display()
            ))),
        }
    }
}

/// One lesson plan with its raw and normalized text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanDocument {
    pub metadata: PlanMetadata,
    pub raw_text: String,
    pub normalized_text: String,
    pub line_spans: Vec<LineSpan>,
}

impl PlanDocument {
    pub fn new(metadata: PlanMetadata, raw_text: impl Into<String>) -> Self {
        let raw_text = raw_text.into();
        let Normalized { text, lines } = normalize(&raw_text);
        Self {
            metadata,
            raw_text,
            normalized_text: text,
            line_spans: lines,
        }
    }

    /// Builds a plan from text alone, for tests and ad-hoc scoring.
    pub fn from_text(model_id: &str, framework: Framework, text: &str) -> Self {
        let metadata = PlanMetadata::new(model_id, framework, "adhoc", "<memory>")
            .expect("non-empty model id");
        Self::new(metadata, text)
    }

    pub fn key(&self) -> PlanKey {
        self.metadata.key()
    }

    pub fn line_text(&self, span: &LineSpan) -> &str {
        &self.normalized_text[span.start..span.end]
    }
}

/// A file that could not be turned into a plan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedFile {
    pub path: PathBuf,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSet {
    /// Sorted by key.
    pub plans: Vec<PlanDocument>,
    pub manifest_path: Option<PathBuf>,
    pub skipped: Vec<SkippedFile>,
}

impl CorpusSet {
    pub fn from_plans(mut plans: Vec<PlanDocument>) -> Result<Self, CorpusError> {
        plans.sort_by_key(PlanDocument::key);
        for pair in plans.windows(2) {
            if pair[0].key() == pair[1].key() {
                return Err(CorpusError::DuplicateKey {
                    key: pair[0].key(),
                    first: pair[0].metadata.source_path.clone(),
                    second: pair[1].metadata.source_path.clone(),
                });
            }
        }
        Ok(Self {
            plans,
            manifest_path: None,
            skipped: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.plans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plans.is_empty()
    }
}

/// Loads every plan file in `dir`.
///
/// When `manifest` is `None`, a `manifest.csv` inside `dir` is used if
/// present. Files whose metadata cannot be resolved are skipped and listed
/// in [`CorpusSet::skipped`].
pub fn load_corpus(dir: &Path, manifest: Option<&Path>) -> Result<CorpusSet, CorpusError> {
    if !dir.is_dir() {
        return Err(CorpusError::MissingDirectory(dir.to_path_buf()));
    }
    let manifest_path = match manifest {
        Some(p) => Some(p.to_path_buf()),
        None => Some(dir.join(DEFAULT_MANIFEST_NAME)).filter(|p| p.is_file()),
    };
    let mut by_file: HashMap<String, ManifestEntry> = HashMap::new();
    if let Some(path) = &manifest_path {
        for entry in read_manifest(path)? {
            let name = Path::new(&entry.path)
                .file_name()
                .and_then(|n| n.to_str())
                .unwrap_or(&entry.path)
                .to_string();
            by_file.insert(name, entry);
        }
    }

    let io_err = |source| CorpusError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && is_plan_file(p))
        .collect();
    files.sort();

    let mut plans = Vec::new();
    let mut skipped = Vec::new();
    for path in files {
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        let metadata = match by_file.remove(name) {
            Some(entry) => entry.to_metadata(&path),
            None => PlanMetadata::from_filename(&path),
        };
        let metadata = match metadata {
            Ok(m) => m,
            Err(e) => {
                warn!(path = %path.display(), error = %e, "skipping plan file");
                skipped.push(SkippedFile {
                    path,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        match fs::read_to_string(&path) {
            Ok(raw) => plans.push(PlanDocument::new(metadata, raw)),
            Err(e) => {
                warn!(path = %path.display(), error = %e, "skipping unreadable plan file");
                skipped.push(SkippedFile {
                    path,
                    reason: e.to_string(),
                });
            }
        }
    }
    for (name, _) in by_file {
        warn!(file = %name, "manifest entry has no matching plan file");
    }
    if plans.is_empty() {
        warn!(dir = %dir.display(), "corpus is empty");
    }

    let mut set = CorpusSet::from_plans(plans)?;
    set.manifest_path = manifest_path;
    set.skipped = skipped;
    Ok(set)
}

fn is_plan_file(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| PLAN_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
}

/// Counts plans per (model, framework) cell; used to check factorial completeness.
pub fn factorial_cells(corpus: &CorpusSet) -> BTreeMap<(String, Framework), usize> {
    let mut cells = BTreeMap::new();
    for plan in &corpus.plans {
        *cells
            .entry((plan.metadata.model_id.clone(), plan.metadata.framework.clone()))
            .or_insert(0) += 1;
    }
    cells
}
