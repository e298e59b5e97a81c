//! Runs every metric stage over a corpus.

use std::fmt;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tracing::{debug, warn};

use crate::aggregate::PlanMetrics;
use crate::alignment::{
    align_embedded, embed_standards, extract_objectives, Aggregation, AlignmentError, AlignmentReport,
    EmbeddedStandards, EmbeddingBackend, StandardSet,
};
use crate::bloom::{classify_objectives, BloomLexicon, ClassifiedObjective, CognitiveProfile};
use crate::corpus::{CorpusSet, PlanDocument, PlanKey};
use crate::factcheck::{check_plan, FactKb, HallucinationReport};
use crate::readability::{compute_counts, ReadabilityProfile, TextCounts};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Readability,
    Factcheck,
    Alignment,
    Bloom,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Readability => "readability",
            Stage::Factcheck => "factcheck",
            Stage::Alignment => "alignment",
            Stage::Bloom => "bloom",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageFailure {
    pub stage: Stage,
    pub message: String,
}

impl fmt::Display for StageFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.stage, self.message)
    }
}

/// Everything computed for one plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct PlanRecord<S> {
    pub metrics: PlanMetrics<S>,
    pub source_path: PathBuf,
    pub counts: Option<TextCounts>,
    pub factcheck: HallucinationReport,
    pub objectives: Vec<ClassifiedObjective>,
    pub failures: Vec<StageFailure>,
}

impl<S: Scalar> PlanRecord<S> {
    pub fn key(&self) -> &PlanKey {
        &self.metrics.key
    }
}

pub struct Evaluator<'a, S: Scalar> {
    pub kb: &'a FactKb,
    pub standards: &'a StandardSet,
    pub lexicon: &'a BloomLexicon,
    pub backend: &'a dyn EmbeddingBackend<S>,
    pub aggregation: Aggregation,
}

struct Partial<S> {
    record: PlanRecord<S>,
    objectives: Vec<crate::alignment::Objective>,
}

impl<'a, S: Scalar> Evaluator<'a, S> {
    /// Scores every plan. Fails only when the standards themselves cannot
    /// be embedded; per-plan problems are recorded on each [`PlanRecord`].
    pub fn evaluate(&self, corpus: &CorpusSet) -> Result<Vec<PlanRecord<S>>, AlignmentError> {
        let standards = embed_standards(self.standards, self.backend)?;
        let partials: Vec<Partial<S>> = corpus.plans.par_iter().map(|p| self.local_stages(p)).collect();
        let align = |p: Partial<S>| self.finish(p, &standards);
        let records: Vec<PlanRecord<S>> = if self.backend.is_concurrent() {
            partials.into_par_iter().map(align).collect()
        } else {
            partials.into_iter().map(align).collect()
        };
        for r in &records {
            for f in &r.failures {
                warn!(plan = %r.metrics.key, stage = %f.stage, "{}", f.message);
            }
        }
        Ok(records)
    }

    pub fn evaluate_plan(&self, plan: &PlanDocument) -> Result<PlanRecord<S>, AlignmentError> {
        let standards = embed_standards(self.standards, self.backend)?;
        Ok(self.finish(self.local_stages(plan), &standards))
    }

    fn local_stages(&self, plan: &PlanDocument) -> Partial<S> {
        debug!(plan = %plan.key(), "scoring");
        let mut failures = Vec::new();
        let counts = match compute_counts(plan) {
            Ok(c) => Some(c),
            Err(e) => {
                failures.push(StageFailure {
                    stage: Stage::Readability,
                    message: e.to_string(),
                });
                None
            }
        };
        let factcheck = check_plan(plan, self.kb);
        let objectives = extract_objectives(plan);
        let classified = classify_objectives(&objectives, self.lexicon);
        let levels: Vec<Option<u8>> = classified.iter().map(|c| c.level).collect();
        let cognitive = CognitiveProfile::from_levels(&levels);
        if cognitive.classified == 0 {
            failures.push(StageFailure {
                stage: Stage::Bloom,
                message: "no objective with a classifiable verb".into(),
            });
        }
        let metrics = PlanMetrics {
            key: plan.key(),
            readability: counts.as_ref().map(ReadabilityProfile::from_counts),
            hi: Some(S::from_count(factcheck.hi as usize)),
            alignment: None,
            cognitive: Some(cognitive),
            partial: Vec::new(),
        };
        Partial {
            record: PlanRecord {
                metrics,
                source_path: plan.metadata.source_path.clone(),
                counts,
                factcheck,
                objectives: classified,
                failures,
            },
            objectives,
        }
    }

    fn finish(&self, p: Partial<S>, standards: &EmbeddedStandards<S>) -> PlanRecord<S> {
        let Partial { mut record, objectives } = p;
        let alignment: Result<AlignmentReport<S>, _> =
            align_embedded(&objectives, standards, self.backend, self.aggregation);
        match alignment {
            Ok(a) => record.metrics.alignment = Some(a),
            Err(e) => record.failures.push(StageFailure {
                stage: Stage::Alignment,
                message: e.to_string(),
            }),
        }
        record.failures.sort_by_key(|f| f.stage as u8);
        record.metrics.partial = record.failures.iter().map(ToString::to_string).collect();
        record
    }
}
