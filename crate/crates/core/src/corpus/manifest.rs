//! Corpus manifest: a CSV table mapping plan files to metadata.
//!
//! ```text
//! path,model,framework,topic,generated_at
//! plan_07.txt,Claude,COSTAR,The Electromagnetic Spectrum,2025-06-14
//! ```
//!
//! `path` is matched against plan file names in the corpus directory.
//! `topic` and `generated_at` may be empty. Extra columns (sampling
//! settings written by the generation harness, for instance) are kept
//! when written and ignored when loading.

use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::{CorpusError, PlanMetadata};

pub const DEFAULT_MANIFEST_NAME: &str = "manifest.csv";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub model: String,
    pub framework: String,
    #[serde(default)]
    pub topic: String,
    #[serde(default)]
    pub generated_at: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provider_model: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_tokens: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attempts: Option<u32>,
}

impl ManifestEntry {
    pub(crate) fn to_metadata(&self, source_path: &Path) -> Result<PlanMetadata, CorpusError> {
        let topic = if self.topic.trim().is_empty() {
            // Fall back to the filename's topic segment when the manifest omits it.
            PlanMetadata::from_filename(source_path)
                .map(|m| m.topic)
                .unwrap_or_default()
        } else {
            self.topic.trim().to_string()
        };
        let mut meta = PlanMetadata::new(
            self.model.as_str(),
            self.framework.parse()?,
            topic,
            source_path,
        )?;
        meta.generated_at = parse_date(&self.generated_at)?;
        Ok(meta)
    }
}

fn parse_date(s: &str) -> Result<Option<NaiveDate>, CorpusError> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(None);
    }
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Ok(Some(d));
    }
    chrono::DateTime::parse_from_rfc3339(s)
        .map(|dt| Some(dt.date_naive()))
        .map_err(|_| CorpusError::Metadata(format!("unparseable generated_at `{s}`")))
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>, CorpusError> {
    let err = |message: String| CorpusError::Manifest {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| err(e.to_string()))?;
    reader
        .deserialize()
        .enumerate()
        .map(|(i, row)| row.map_err(|e| err(format!("row {}: {e}", i + 2))))
        .collect()
}

pub fn write_manifest<W: Write>(out: W, entries: &[ManifestEntry]) -> Result<(), CorpusError> {
    let mut writer = csv::Writer::from_writer(out);
    // Optional columns are written for every row so the header is stable.
    writer
        .write_record([
            "path",
            "model",
            "framework",
            "topic",
            "generated_at",
            "provider_model",
            "temperature",
            "max_tokens",
            "attempts",
        ])
        .and_then(|_| {
            entries.iter().try_for_each(|e| {
                writer.write_record([
                    e.path.clone(),
                    e.model.clone(),
                    e.framework.clone(),
                    e.topic.clone(),
                    e.generated_at.clone(),
                    e.provider_model.clone().unwrap_or_default(),
                    e.temperature.map(|t| t.to_string()).unwrap_or_default(),
                    e.max_tokens.map(|t| t.to_string()).unwrap_or_default(),
                    e.attempts.map(|t| t.to_string()).unwrap_or_default(),
                ])
            })
        })
        .and_then(|_| writer.flush().map_err(csv::Error::from))
        .map_err(|e| CorpusError::Manifest {
            path: PathBuf::from("<writer>"),
            message: e.to_string(),
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn written_manifest_reads_back() {
        let entries = vec![ManifestEntry {
            path: "a__tag__t.txt".into(),
            model: "Grok".into(),
            framework: "TAG".into(),
            topic: "The Electromagnetic Spectrum".into(),
            generated_at: "2025-06-01".into(),
            temperature: Some(0.7),
            attempts: Some(2),
            ..Default::default()
        }];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.csv");
        write_manifest(std::fs::File::create(&path).unwrap(), &entries).unwrap();
        let back = read_manifest(&path).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].model, "Grok");
        assert_eq!(back[0].temperature, Some(0.7));
        assert_eq!(back[0].provider_model, None);
    }

    #[test]
    fn dates_accept_plain_and_rfc3339() {
        assert_eq!(
            parse_date("2025-06-03").unwrap(),
            NaiveDate::from_ymd_opt(2025, 6, 3)
        );
        assert_eq!(
            parse_date("2025-06-03T10:00:00Z").unwrap(),
            NaiveDate::from_ymd_opt(2025, 6, 3)
        );
        assert!(parse_date("June").is_err());
    }
}
