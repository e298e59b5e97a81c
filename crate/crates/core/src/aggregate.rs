//! Per-plan metrics rolled up to model- and framework-level means.
//!
//! Six tables: {readability + HI, per-standard alignment, Bloom profile}
//! grouped by framework (tables 1-3) and by model (tables 4-6). All means
//! are unweighted over the plans in a group that have the metric; plans
//! missing a metric are left out of that column only.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use tracing::warn;

use crate::alignment::AlignmentReport;
use crate::bloom::{CognitiveProfile, LEVEL_NAMES};
use crate::corpus::PlanKey;
use crate::readability::ReadabilityProfile;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct PlanMetrics<S> {
    pub key: PlanKey,
    pub readability: Option<ReadabilityProfile<S>>,
    pub hi: Option<S>,
    pub alignment: Option<AlignmentReport<S>>,
    pub cognitive: Option<CognitiveProfile<S>>,
    /// Why any component above is missing.
    #[serde(default)]
    pub partial: Vec<String>,
}

impl<S: Scalar> PlanMetrics<S> {
    pub fn is_partial(&self) -> bool {
        !self.partial.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupBy {
    Framework,
    Model,
}

impl GroupBy {
    pub fn label(self) -> &'static str {
        match self {
            GroupBy::Framework => "Framework",
            GroupBy::Model => "Model",
        }
    }

    fn key(self, k: &PlanKey) -> String {
        match self {
            GroupBy::Framework => k.framework.to_string(),
            GroupBy::Model => k.model_id.clone(),
        }
    }
}

impl fmt::Display for GroupBy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricFamily {
    ReadabilityHallucination,
    Alignment,
    Cognitive,
}

impl MetricFamily {
    pub fn caption(self, by: GroupBy) -> String {
        let what = match self {
            MetricFamily::ReadabilityHallucination => "Readability and Hallucination Metrics",
            MetricFamily::Alignment => "Curriculum Alignment Metrics",
            MetricFamily::Cognitive => "Cognitive Metrics",
        };
        format!("{what} Averaged by {}", by.label())
    }
}

/// Column layout of one table family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    /// Decimals used when the value is displayed.
    pub decimals: usize,
}

fn col(name: impl Into<String>, decimals: usize) -> Column {
    Column {
        name: name.into(),
        decimals,
    }
}

/// Columns and per-plan extractors for one metric family.
#[derive(Debug, Clone)]
pub struct TableLayout {
    pub family: MetricFamily,
    pub columns: Vec<Column>,
    standard_codes: Vec<String>,
}

impl TableLayout {
    pub fn readability() -> Self {
        Self {
            family: MetricFamily::ReadabilityHallucination,
            columns: ["TTR", "FRE", "FKGL", "FOG", "HI"].into_iter().map(|c| col(c, 2)).collect(),
            standard_codes: Vec::new(),
        }
    }

    /// One column per standard code, then `mean_label`.
    pub fn alignment(codes: &[String], mean_label: &str) -> Self {
        let mut columns: Vec<Column> = codes.iter().map(|c| col(c.as_str(), 3)).collect();
        columns.push(col(mean_label, 3));
        Self {
            family: MetricFamily::Alignment,
            columns,
            standard_codes: codes.to_vec(),
        }
    }

    pub fn cognitive() -> Self {
        let mut columns: Vec<Column> = LEVEL_NAMES.iter().map(|l| col(format!("Bloom - {l}"), 3)).collect();
        columns.push(col("CDI", 3));
        Self {
            family: MetricFamily::Cognitive,
            columns,
            standard_codes: Vec::new(),
        }
    }

    /// This plan's values for every column (`None` = not available).
    pub fn values<S: Scalar>(&self, m: &PlanMetrics<S>) -> Vec<Option<S>> {
        match self.family {
            MetricFamily::ReadabilityHallucination => {
                let r = m.readability.as_ref();
                vec![
                    r.map(|r| r.ttr),
                    r.map(|r| r.fre),
                    r.map(|r| r.fkgl),
                    r.map(|r| r.fog),
                    m.hi,
                ]
            }
            MetricFamily::Alignment => {
                let a = m.alignment.as_ref();
                let mut v: Vec<Option<S>> = self
                    .standard_codes
                    .iter()
                    .map(|c| a.and_then(|a| a.per_standard.get(c)).map(|s| s.similarity))
                    .collect();
                v.push(a.map(|a| a.mean_similarity));
                v
            }
            MetricFamily::Cognitive => {
                // Plans without a classified objective carry no profile.
                let c = m.cognitive.as_ref().filter(|c| c.classified > 0);
                let mut v: Vec<Option<S>> = (0..6).map(|i| c.map(|c| c.level_proportions[i])).collect();
                v.push(c.and_then(|c| c.cdi));
                v
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct GroupRow<S> {
    pub group: String,
    /// Plans in the group.
    pub n: usize,
    /// Column means; `None` when no plan in the group had the metric.
    pub means: Vec<Option<S>>,
    /// Plans that contributed to each column.
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct MetricTable<S> {
    pub number: u8,
    pub caption: String,
    pub family: MetricFamily,
    pub group_by: GroupBy,
    pub columns: Vec<Column>,
    /// Sorted by group name, case-insensitively.
    pub rows: Vec<GroupRow<S>>,
}

impl<S: Scalar> MetricTable<S> {
    pub fn row(&self, group: &str) -> Option<&GroupRow<S>> {
        self.rows.iter().find(|r| r.group == group)
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Mean of `column` for `group`.
    pub fn get(&self, group: &str, column: &str) -> Option<S> {
        let i = self.column_index(column)?;
        self.row(group)?.means[i]
    }

    pub fn title(&self) -> String {
        format!("Table {}. {}", self.number, self.caption)
    }
}

fn group_order(a: &str, b: &str) -> std::cmp::Ordering {
    a.to_lowercase().cmp(&b.to_lowercase()).then_with(|| a.cmp(b))
}

/// Unweighted per-group means of every column in `layout`.
pub fn group_mean<S: Scalar>(
    metrics: &[PlanMetrics<S>],
    group_by: GroupBy,
    layout: &TableLayout,
    number: u8,
) -> MetricTable<S> {
    let width = layout.columns.len();
    let mut groups: BTreeMap<String, (usize, Vec<S>, Vec<usize>)> = BTreeMap::new();
    for m in metrics {
        let entry = groups
            .entry(group_by.key(&m.key))
            .or_insert_with(|| (0, vec![S::zero(); width], vec![0; width]));
        entry.0 += 1;
        for (i, v) in layout.values(m).into_iter().enumerate() {
            if let Some(v) = v {
                entry.1[i] = entry.1[i] + v;
                entry.2[i] += 1;
            }
        }
    }
    let mut rows: Vec<GroupRow<S>> = groups
        .into_iter()
        .map(|(group, (n, sums, counts))| {
            let means = sums
                .iter()
                .zip(&counts)
                .map(|(s, &c)| (c > 0).then(|| *s / S::from_count(c)))
                .collect();
            for (column, &c) in layout.columns.iter().zip(&counts) {
                if c < n {
                    warn!(group = %group, column = %column.name, present = c, plans = n, "column averaged over a subset of plans");
                }
            }
            GroupRow { group, n, means, counts }
        })
        .collect();
    rows.sort_by(|a, b| group_order(&a.group, &b.group));
    MetricTable {
        number,
        caption: layout.family.caption(group_by),
        family: layout.family,
        group_by,
        columns: layout.columns.clone(),
        rows,
    }
}

/// Tables 1-6: three metric families by framework, then by model.
pub fn build_tables<S: Scalar>(
    metrics: &[PlanMetrics<S>],
    standard_codes: &[String],
    mean_label: &str,
) -> Vec<MetricTable<S>> {
    warn_if_incomplete(metrics);
    let layouts = [
        TableLayout::readability(),
        TableLayout::alignment(standard_codes, mean_label),
        TableLayout::cognitive(),
    ];
    let mut tables = Vec::with_capacity(6);
    let mut number = 1;
    for by in [GroupBy::Framework, GroupBy::Model] {
        for layout in &layouts {
            tables.push(group_mean(metrics, by, layout, number));
            number += 1;
        }
    }
    tables
}

/// Whether every (model, framework) cell holds exactly one plan.
pub fn is_complete_factorial<S: Scalar>(metrics: &[PlanMetrics<S>]) -> bool {
    let models: BTreeSet<&str> = metrics.iter().map(|m| m.key.model_id.as_str()).collect();
    let frameworks: BTreeSet<String> = metrics.iter().map(|m| m.key.framework.to_string()).collect();
    let cells: BTreeSet<(&str, String)> = metrics
        .iter()
        .map(|m| (m.key.model_id.as_str(), m.key.framework.to_string()))
        .collect();
    !metrics.is_empty() && cells.len() == metrics.len() && cells.len() == models.len() * frameworks.len()
}

fn warn_if_incomplete<S: Scalar>(metrics: &[PlanMetrics<S>]) {
    if !metrics.is_empty() && !is_complete_factorial(metrics) {
        warn!(plans = metrics.len(), "corpus is not a complete model x framework factorial; group means are not directly comparable");
    }
}

/// Mean of one column over individual plans.
pub fn plan_mean<S: Scalar>(metrics: &[PlanMetrics<S>], layout: &TableLayout, column: usize) -> Option<S> {
    let values: Vec<S> = metrics.iter().filter_map(|m| layout.values(m)[column]).collect();
    crate::scalar::mean(values)
}

/// Mean over a table's rows (each group weighted equally).
pub fn grand_mean<S: Scalar>(table: &MetricTable<S>, column: usize) -> Option<S> {
    let values: Vec<S> = table.rows.iter().filter_map(|r| r.means[column]).collect();
    crate::scalar::mean(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Framework;

    fn plan(model: &str, fw: Framework, hi: f64) -> PlanMetrics<f64> {
        PlanMetrics {
            key: PlanKey {
                model_id: model.into(),
                framework: fw,
                topic: "t".into(),
            },
            readability: None,
            hi: Some(hi),
            alignment: None,
            cognitive: None,
            partial: vec![],
        }
    }

    #[test]
    fn hi_group_mean() {
        let m = vec![
            plan("Grok", Framework::Tag, 2.0),
            plan("Grok", Framework::Race, 2.0),
            plan("Grok", Framework::Costar, 3.0),
        ];
        let t = group_mean(&m, GroupBy::Model, &TableLayout::readability(), 4);
        assert!((t.get("Grok", "HI").unwrap() - 7.0 / 3.0).abs() < 1e-12);
        assert_eq!(t.get("Grok", "FKGL"), None);
        assert_eq!(t.rows[0].n, 3);
        assert_eq!(t.title(), "Table 4. Readability and Hallucination Metrics Averaged by Model");
    }

    #[test]
    fn rows_sorted_alphabetically() {
        let m = vec![
            plan("grok", Framework::Tag, 1.0),
            plan("ChatGPT", Framework::Race, 1.0),
            plan("Claude", Framework::Costar, 1.0),
        ];
        let t = group_mean(&m, GroupBy::Framework, &TableLayout::readability(), 1);
        let groups: Vec<_> = t.rows.iter().map(|r| r.group.as_str()).collect();
        assert_eq!(groups, ["COSTAR", "RACE", "TAG"]);
        let t = group_mean(&m, GroupBy::Model, &TableLayout::readability(), 4);
        let groups: Vec<_> = t.rows.iter().map(|r| r.group.as_str()).collect();
        assert_eq!(groups, ["ChatGPT", "Claude", "grok"]);
    }

    #[test]
    fn six_tables_with_expected_columns() {
        let codes: Vec<String> = ["HS-PS4-1", "HS-PS4-3", "HS-PS4-4", "HS-PS4-5"].map(String::from).to_vec();
        let t = build_tables(&[plan("a", Framework::Tag, 1.0)], &codes, "NGSS Mean");
        assert_eq!(t.len(), 6);
        let names = |i: usize| t[i].columns.iter().map(|c| c.name.clone()).collect::<Vec<_>>();
        assert_eq!(names(0), ["TTR", "FRE", "FKGL", "FOG", "HI"]);
        assert_eq!(names(1), ["HS-PS4-1", "HS-PS4-3", "HS-PS4-4", "HS-PS4-5", "NGSS Mean"]);
        assert_eq!(names(2)[0], "Bloom - Remember");
        assert_eq!(names(2)[6], "CDI");
        assert_eq!(t[2].caption, "Cognitive Metrics Averaged by Framework");
        assert_eq!(t[4].caption, "Curriculum Alignment Metrics Averaged by Model");
    }

    #[test]
    fn factorial_detection() {
        let full: Vec<_> = ["a", "b"]
            .iter()
            .flat_map(|m| Framework::STANDARD.iter().map(move |f| plan(m, f.clone(), 0.0)))
            .collect();
        assert!(is_complete_factorial(&full));
        assert!(!is_complete_factorial(&full[1..]));
    }
}
