//! Batch evaluation of generated lesson plans: readability, fact checking
//! against a knowledge base, curriculum alignment and Bloom's taxonomy
//! profiles, rolled up into model- and framework-level tables.

pub mod aggregate;
pub mod alignment;
pub mod bloom;
pub mod corpus;
pub mod factcheck;
pub mod pipeline;
pub mod readability;
pub mod report;
pub mod retry;
pub mod scalar;

pub use scalar::Scalar;

pub type ReadabilityProfile = readability::ReadabilityProfile<f64>;
pub type AlignmentReport = alignment::AlignmentReport<f64>;
pub type CognitiveProfile = bloom::CognitiveProfile<f64>;
pub type PlanMetrics = aggregate::PlanMetrics<f64>;
pub type MetricTable = aggregate::MetricTable<f64>;
pub type PlanRecord = pipeline::PlanRecord<f64>;
pub type ReportBundle = report::ReportBundle<f64>;
