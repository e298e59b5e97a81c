//! Corpus generation: one plan per (provider, framework).

use std::io::Write;
use std::path::{Path, PathBuf};
use std::thread;

use lessonlens::corpus::manifest::{read_manifest, write_manifest, ManifestEntry, DEFAULT_MANIFEST_NAME};
use lessonlens::corpus::Framework;
use lessonlens::retry::retry;
use thiserror::Error;
use tracing::{info, warn};

use crate::prompts::{render_prompt, Placeholders, PromptError};
use crate::provider::{build_client, complete, CallError, ProviderConfig};

#[derive(Debug, Error)]
pub enum GenError {
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error("{provider}/{framework}: {source} (after {attempts} attempt(s))")]
    Call {
        provider: String,
        framework: Framework,
        attempts: u32,
        source: CallError,
    },
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("manifest: {0}")]
    Manifest(String),
}

impl GenError {
    pub fn is_auth(&self) -> bool {
        matches!(
            self,
            GenError::Call {
                source: CallError::Auth(_) | CallError::MissingToken(_),
                ..
            }
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedPlan {
    pub path: PathBuf,
    pub entry: ManifestEntry,
    pub attempts: u32,
}

/// `The Electromagnetic Spectrum` -> `the-electromagnetic-spectrum`.
pub fn topic_slug(topic: &str) -> String {
    let mut slug = String::new();
    for c in topic.chars() {
        if c.is_alphanumeric() {
            slug.extend(c.to_lowercase());
        } else if !slug.is_empty() && !slug.ends_with('-') {
            slug.push('-');
        }
    }
    let slug = slug.trim_end_matches('-').to_string();
    if slug.is_empty() {
        "topic".into()
    } else {
        slug
    }
}

pub fn plan_file_name(model: &str, framework: &Framework, topic: &str) -> String {
    format!("{model}__{framework}__{}.txt", topic_slug(topic))
}

/// Writes `contents` to `path` through a temp file in the same directory
/// and a rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), GenError> {
    let io = |source| GenError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Calls one provider for one framework and saves the response unmodified.
pub fn generate_plan(
    client: &reqwest::blocking::Client,
    provider: &ProviderConfig,
    framework: &Framework,
    values: &Placeholders,
    out_dir: &Path,
) -> Result<GeneratedPlan, GenError> {
    let prompt = render_prompt(framework, values)?;
    let out = retry(&provider.retry, CallError::is_retryable, |attempt| {
        info!(provider = %provider.name, %framework, attempt, "requesting plan");
        complete(client, provider, &prompt)
    });
    let attempts = out.attempts;
    let text = out.result.map_err(|source| GenError::Call {
        provider: provider.name.clone(),
        framework: framework.clone(),
        attempts,
        source,
    })?;
    let name = plan_file_name(&provider.name, framework, &values.topic);
    let path = out_dir.join(&name);
    write_atomic(&path, text.as_bytes())?;
    info!(provider = %provider.name, %framework, attempts, file = %name, "plan written");
    Ok(GeneratedPlan {
        path,
        attempts,
        entry: ManifestEntry {
            path: name,
            model: provider.name.clone(),
            framework: framework.to_string(),
            topic: values.topic.clone(),
            generated_at: chrono::Utc::now().to_rfc3339(),
            provider_model: Some(provider.model.clone()),
            temperature: provider.temperature,
            max_tokens: provider.max_tokens,
            attempts: Some(attempts),
        },
    })
}

#[derive(Debug, Default)]
pub struct GenerationOutcome {
    pub plans: Vec<GeneratedPlan>,
    pub failures: Vec<GenError>,
    pub manifest: Option<PathBuf>,
}

/// Generates every (provider, framework) plan into `out_dir` and merges
/// the new rows into its manifest. Providers run concurrently; each
/// provider's calls run one after another.
pub fn generate_corpus(
    providers: &[ProviderConfig],
    frameworks: &[Framework],
    values: &Placeholders,
    out_dir: &Path,
) -> Result<GenerationOutcome, GenError> {
    for f in frameworks {
        render_prompt(f, values)?;
    }
    std::fs::create_dir_all(out_dir).map_err(|source| GenError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let results: Vec<Result<GeneratedPlan, GenError>> = thread::scope(|s| {
        let handles: Vec<_> = providers
            .iter()
            .map(|p| {
                s.spawn(move || {
                    let client = match build_client(p) {
                        Ok(c) => c,
                        Err(source) => {
                            return vec![Err(GenError::Call {
                                provider: p.name.clone(),
                                framework: frameworks.first().cloned().unwrap_or(Framework::Tag),
                                attempts: 0,
                                source,
                            })]
                        }
                    };
                    frameworks
                        .iter()
                        .map(|f| generate_plan(&client, p, f, values, out_dir))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("generation thread panicked"))
            .collect()
    });

    let mut outcome = GenerationOutcome::default();
    for r in results {
        match r {
            Ok(p) => outcome.plans.push(p),
            Err(e) => {
                warn!(error = %e, "generation failed");
                outcome.failures.push(e);
            }
        }
    }
    if !outcome.plans.is_empty() {
        outcome.manifest = Some(update_manifest(out_dir, &outcome.plans)?);
    }
    Ok(outcome)
}

fn update_manifest(out_dir: &Path, plans: &[GeneratedPlan]) -> Result<PathBuf, GenError> {
    let path = out_dir.join(DEFAULT_MANIFEST_NAME);
    let mut entries = if path.is_file() {
        read_manifest(&path).map_err(|e| GenError::Manifest(e.to_string()))?
    } else {
        Vec::new()
    };
    for p in plans {
        entries.retain(|e| e.path != p.entry.path);
        entries.push(p.entry.clone());
    }
    entries.sort_by(|a, b| a.path.cmp(&b.path));
    let mut buf = Vec::new();
    write_manifest(&mut buf, &entries).map_err(|e| GenError::Manifest(e.to_string()))?;
    write_atomic(&path, &buf)?;
    Ok(path)
}
