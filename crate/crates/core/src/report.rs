//! Run output: per-plan records, the six tables and a run manifest,
//! written as CSV, JSON or Markdown.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracing::warn;

use crate::aggregate::{build_tables, MetricTable, PlanMetrics, TableLayout};
use crate::alignment::{Aggregation, StandardSet};
use crate::corpus::SkippedFile;
use crate::pipeline::PlanRecord;
use crate::scalar::Scalar;

pub const TOOL_NAME: &str = "lessonlens";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const MANIFEST_FILE: &str = "run_manifest.json";
pub const JSON_FILE: &str = "report.json";
pub const MARKDOWN_FILE: &str = "report.md";
pub const PLANS_CSV_FILE: &str = "plans.csv";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("writing {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("serializing {path}: {message}")]
    Serialize { path: PathBuf, message: String },
    #[error("unknown output format `{0}` (expected csv, json or md)")]
    UnknownFormat(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Md,
}

impl FromStr for Format {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "md" | "markdown" => Ok(Format::Md),
            other => Err(ReportError::UnknownFormat(other.to_string())),
        }
    }
}

/// Parses a comma-separated format list such as `csv,json,md`.
pub fn parse_formats(list: &str) -> Result<Vec<Format>, ReportError> {
    let mut out = Vec::new();
    for f in list.split(',').filter(|s| !s.trim().is_empty()) {
        let f: Format = f.parse()?;
        if !out.contains(&f) {
            out.push(f);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub kb_version: Option<String>,
    pub lexicon_version: Option<String>,
    pub standards: Option<String>,
    pub backend_id: Option<String>,
    pub aggregation: Aggregation,
    pub scalar: String,
    pub corpus_dir: Option<PathBuf>,
    pub plans: usize,
    pub plans_with_failures: usize,
    #[serde(default)]
    pub skipped_files: Vec<SkippedFile>,
    #[serde(default)]
    pub warnings: Vec<String>,
    pub started_at: DateTime<Utc>,
    pub finished_at: DateTime<Utc>,
}

impl RunManifest {
    pub fn new<S: Scalar>(started_at: DateTime<Utc>) -> Self {
        Self {
            tool: TOOL_NAME.into(),
            tool_version: TOOL_VERSION.into(),
            kb_version: None,
            lexicon_version: None,
            standards: None,
            backend_id: None,
            aggregation: Aggregation::default(),
            scalar: std::any::type_name::<S>().into(),
            corpus_dir: None,
            plans: 0,
            plans_with_failures: 0,
            skipped_files: Vec::new(),
            warnings: Vec::new(),
            started_at,
            finished_at: started_at,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct ReportBundle<S> {
    pub run_manifest: RunManifest,
    pub per_plan: Vec<PlanRecord<S>>,
    pub tables: Vec<MetricTable<S>>,
}

/// Column header for the per-standard mean, e.g. `NGSS Mean`.
pub fn mean_label(standards: &StandardSet) -> String {
    match standards.name.split_whitespace().next() {
        Some(first) => format!("{first} Mean"),
        None => "Mean".into(),
    }
}

impl<S: Scalar> ReportBundle<S> {
    /// Builds the tables from `records`. Counts and warnings in the
    /// manifest are filled in here.
    pub fn new(mut run_manifest: RunManifest, per_plan: Vec<PlanRecord<S>>, standards: &StandardSet) -> Self {
        let metrics: Vec<PlanMetrics<S>> = per_plan.iter().map(|r| r.metrics.clone()).collect();
        let codes: Vec<String> = standards.standards.iter().map(|s| s.code.clone()).collect();
        let tables = if per_plan.is_empty() {
            Vec::new()
        } else {
            build_tables(&metrics, &codes, &mean_label(standards))
        };
        run_manifest.plans = per_plan.len();
        run_manifest.plans_with_failures = per_plan.iter().filter(|r| !r.failures.is_empty()).count();
        if per_plan.is_empty() {
            run_manifest.warnings.push("corpus is empty; no tables produced".into());
        } else if !crate::aggregate::is_complete_factorial(&metrics) {
            run_manifest
                .warnings
                .push("corpus is not a complete model x framework factorial".into());
        }
        if run_manifest.plans_with_failures > 0 {
            run_manifest.warnings.push(format!(
                "{} plan(s) have missing metrics; group means use the plans that have each metric",
                run_manifest.plans_with_failures
            ));
        }
        Self {
            run_manifest,
            per_plan,
            tables,
        }
    }

    pub fn table(&self, number: u8) -> Option<&MetricTable<S>> {
        self.tables.iter().find(|t| t.number == number)
    }

    pub fn has_failures(&self) -> bool {
        self.run_manifest.plans_with_failures > 0
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ReportError + '_ {
    move |source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), ReportError> {
    fs::write(path, contents).map_err(io_err(path))
}

fn json_bytes<T: Serialize>(value: &T, path: &Path) -> Result<Vec<u8>, ReportError> {
    serde_json::to_vec_pretty(value).map_err(|e| ReportError::Serialize {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Writes the bundle in each requested format and returns the files
/// written. The run manifest is always written. An empty corpus yields
/// the manifest alone.
pub fn emit<S: Scalar>(bundle: &ReportBundle<S>, formats: &[Format], out_dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut written = Vec::new();
    let manifest_path = out_dir.join(MANIFEST_FILE);
    write_file(&manifest_path, &json_bytes(&bundle.run_manifest, &manifest_path)?)?;
    written.push(manifest_path);
    if bundle.per_plan.is_empty() {
        warn!(dir = %out_dir.display(), "empty corpus: only the run manifest was written");
        return Ok(written);
    }
    for format in formats {
        match format {
            Format::Json => {
                let path = out_dir.join(JSON_FILE);
                write_file(&path, &json_bytes(bundle, &path)?)?;
                written.push(path);
            }
            Format::Md => {
                let path = out_dir.join(MARKDOWN_FILE);
                write_file(&path, render_markdown(bundle).as_bytes())?;
                written.push(path);
            }
            Format::Csv => {
                for table in &bundle.tables {
                    let path = out_dir.join(table_file_name(table));
                    write_file(&path, &table_csv(table, &path)?)?;
                    written.push(path);
                }
                let path = out_dir.join(PLANS_CSV_FILE);
                write_file(&path, &plans_csv(&bundle.per_plan, &bundle.tables, &path)?)?;
                written.push(path);
            }
        }
    }
    Ok(written)
}

pub fn table_file_name<S: Scalar>(table: &MetricTable<S>) -> String {
    let family = match table.family {
        crate::aggregate::MetricFamily::ReadabilityHallucination => "readability_hallucination",
        crate::aggregate::MetricFamily::Alignment => "alignment",
        crate::aggregate::MetricFamily::Cognitive => "cognitive",
    };
    format!("table{}_{}_by_{}.csv", table.number, family, table.group_by.label().to_lowercase())
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> ReportError + '_ {
    move |e| ReportError::Serialize {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn full(v: Option<impl Scalar>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Table as CSV: the group label column, then the table's columns.
/// Values are written at full precision.
pub fn table_csv<S: Scalar>(table: &MetricTable<S>, path: &Path) -> Result<Vec<u8>, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![table.group_by.label().to_string()];
    header.extend(table.columns.iter().map(|c| c.name.clone()));
    w.write_record(&header).map_err(csv_err(path))?;
    for row in &table.rows {
        let mut rec = vec![row.group.clone()];
        rec.extend(row.means.iter().map(|m| full(*m)));
        w.write_record(&rec).map_err(csv_err(path))?;
    }
    w.into_inner().map_err(|e| ReportError::Serialize {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// One row per plan with every metric the tables use.
pub fn plans_csv<S: Scalar>(records: &[PlanRecord<S>], tables: &[MetricTable<S>], path: &Path) -> Result<Vec<u8>, ReportError> {
    let codes: Vec<String> = tables
        .iter()
        .find(|t| t.family == crate::aggregate::MetricFamily::Alignment)
        .map(|t| t.columns[..t.columns.len() - 1].iter().map(|c| c.name.clone()).collect())
        .unwrap_or_default();
    let mean_label = tables
        .iter()
        .find(|t| t.family == crate::aggregate::MetricFamily::Alignment)
        .and_then(|t| t.columns.last())
        .map(|c| c.name.clone())
        .unwrap_or_else(|| "Mean".into());
    let layouts = [
        TableLayout::readability(),
        TableLayout::alignment(&codes, &mean_label),
        TableLayout::cognitive(),
    ];
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = ["Model", "Framework", "Topic", "Path"].map(String::from).to_vec();
    for l in &layouts {
        header.extend(l.columns.iter().map(|c| c.name.clone()));
    }
    header.extend(["MSL", "Major", "Minor", "Omissions", "Objectives", "Partial"].map(String::from));
    w.write_record(&header).map_err(csv_err(path))?;
    for r in records {
        let m = &r.metrics;
        let mut rec = vec![
            m.key.model_id.clone(),
            m.key.framework.to_string(),
            m.key.topic.clone(),
            r.source_path.display().to_string(),
        ];
        for l in &layouts {
            rec.extend(l.values(m).into_iter().map(full));
        }
        rec.push(full(m.readability.as_ref().map(|x| x.mean_sentence_length)));
        rec.push(r.factcheck.major_errors.to_string());
        rec.push(r.factcheck.minor_errors.to_string());
        rec.push(r.factcheck.omissions.len().to_string());
        rec.push(r.objectives.len().to_string());
        rec.push(m.partial.join("; "));
        w.write_record(&rec).map_err(csv_err(path))?;
    }
    w.into_inner().map_err(|e| ReportError::Serialize {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Rounded value for display; missing values print as `n/a`.
pub fn display_value<S: Scalar>(v: Option<S>, decimals: usize) -> String {
    match v {
        Some(v) => format!("{:.*}", decimals, v.as_f64()),
        None => "n/a".into(),
    }
}

pub fn render_table_markdown<S: Scalar>(table: &MetricTable<S>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "**{}**\n", table.title());
    let mut header = vec![table.group_by.label().to_string()];
    header.extend(table.columns.iter().map(|c| c.name.clone()));
    let _ = writeln!(s, "| {} |", header.join(" | "));
    let _ = writeln!(s, "|{}", "---|".repeat(header.len()));
    for row in &table.rows {
        let cells: Vec<String> = row
            .means
            .iter()
            .zip(&table.columns)
            .map(|(m, c)| display_value(*m, c.decimals))
            .collect();
        let _ = writeln!(s, "| {} | {} |", row.group, cells.join(" | "));
    }
    s
}

pub fn render_markdown<S: Scalar>(bundle: &ReportBundle<S>) -> String {
    let m = &bundle.run_manifest;
    let mut s = String::from("# Lesson plan evaluation\n\n");
    let _ = writeln!(
        s,
        "{} {} | {} plans | KB `{}` | lexicon `{}` | backend `{}` | {}\n",
        m.tool,
        m.tool_version,
        m.plans,
        m.kb_version.as_deref().unwrap_or("-"),
        m.lexicon_version.as_deref().unwrap_or("-"),
        m.backend_id.as_deref().unwrap_or("-"),
        m.finished_at.to_rfc3339(),
    );
    for w in &m.warnings {
        let _ = writeln!(s, "> warning: {w}\n");
    }
    for t in &bundle.tables {
        s.push_str(&render_table_markdown(t));
        s.push('\n');
    }
    s
}

/// Reads a bundle previously written as JSON.
pub fn read_bundle<S: Scalar>(path: &Path) -> Result<ReportBundle<S>, ReportError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| ReportError::Serialize {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}
