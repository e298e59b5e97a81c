//! Declarative fact knowledge base (TOML).
//!
//! ```toml
//! kb_version = "em-spectrum/1"
//! topic = "The Electromagnetic Spectrum"
//! concept_whitelist = ["Planck's constant", "Snell's law"]
//!
//! [[equations]]
//! name = "wave equation"
//! patterns = ["c = λf", "λ = c/f"]      # canonical and rearranged forms
//! required = true                      # default true
//! attributed_to = []                   # proper names allowed to own it
//!
//! [[constants]]
//! name = "speed of light"
//! symbol = "c"
//! aliases = ["speed of light"]
//! value = 2.998e8
//! unit = "m/s"
//! rel_tolerance = 0.10                 # default 0.10
//! context_words = ["light"]            # same-sentence cues for bare values
//!
//! [[ordered_categories]]
//! name = "electromagnetic bands"
//! same_order = ["frequency", "energy"] # quantities that increase along the list
//! inverse_order = ["wavelength"]       # quantities that decrease along it
//! members = [{ name = "radio", aliases = ["radio waves"] }, ...]
//! ```

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::Spanned;

use super::units::{parse_unit, Unit};

/// The shipped electromagnetic-spectrum knowledge base.
pub const EM_SPECTRUM_KB: &str = include_str!("../../data/em_spectrum.kb");

pub const DEFAULT_REL_TOLERANCE: f64 = 0.10;

#[derive(Debug, Error)]
pub enum KbError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}:{line}: {message}")]
    Schema {
        origin: String,
        line: usize,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquationTarget {
    pub name: String,
    pub patterns: Vec<String>,
    #[serde(default = "yes")]
    pub required: bool,
    #[serde(default)]
    pub attributed_to: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantTarget {
    pub name: String,
    #[serde(default)]
    pub symbol: Option<String>,
    #[serde(default)]
    pub aliases: Vec<String>,
    pub value: f64,
    pub unit: String,
    #[serde(default = "default_tolerance")]
    pub rel_tolerance: f64,
    #[serde(default = "yes")]
    pub required: bool,
    #[serde(default)]
    pub attributed_to: Vec<String>,
    /// Words that tie a bare value with a convertible unit to this constant
    /// when they occur in the same sentence.
    #[serde(default)]
    pub context_words: Vec<String>,
}

impl ConstantTarget {
    pub fn kb_unit(&self) -> Unit {
        parse_unit(&self.unit).expect("validated at load")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryMember {
    pub name: String,
    #[serde(default)]
    pub aliases: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderedCategory {
    pub name: String,
    pub members: Vec<CategoryMember>,
    #[serde(default)]
    pub same_order: Vec<String>,
    #[serde(default)]
    pub inverse_order: Vec<String>,
    #[serde(default = "yes")]
    pub required: bool,
}

impl OrderedCategory {
    pub fn position(&self, member: &str) -> Option<usize> {
        self.members.iter().position(|m| m.name == member)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactKb {
    pub kb_version: String,
    pub topic: String,
    #[serde(default)]
    pub equations: Vec<EquationTarget>,
    #[serde(default)]
    pub constants: Vec<ConstantTarget>,
    #[serde(default)]
    pub ordered_categories: Vec<OrderedCategory>,
    #[serde(default)]
    pub concept_whitelist: Vec<String>,
}

fn yes() -> bool {
    true
}

fn default_tolerance() -> f64 {
    DEFAULT_REL_TOLERANCE
}

#[derive(Deserialize)]
struct RawKb {
    kb_version: Spanned<String>,
    topic: String,
    #[serde(default)]
    equations: Vec<Spanned<EquationTarget>>,
    #[serde(default)]
    constants: Vec<Spanned<ConstantTarget>>,
    #[serde(default)]
    ordered_categories: Vec<Spanned<OrderedCategory>>,
    #[serde(default)]
    concept_whitelist: Vec<String>,
}

impl FactKb {
    /// The shipped EM-spectrum knowledge base.
    pub fn em_spectrum() -> Self {
        Self::parse(EM_SPECTRUM_KB, "em_spectrum.kb").expect("shipped KB is valid")
    }

    pub fn load(path: &Path) -> Result<Self, KbError> {
        let text = fs::read_to_string(path).map_err(|source| KbError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parses and validates a KB document. `origin` names it in diagnostics.
    pub fn parse(text: &str, origin: &str) -> Result<Self, KbError> {
        let line_of = |offset: usize| text[..offset.min(text.len())].matches('\n').count() + 1;
        let schema = |offset: usize, message: String| KbError::Schema {
            origin: origin.to_string(),
            line: line_of(offset),
            message,
        };

        let raw: RawKb = toml::from_str(text).map_err(|e| {
            let offset = e.span().map(|s| s.start).unwrap_or(0);
            schema(offset, e.message().to_string())
        })?;

        if raw.kb_version.get_ref().trim().is_empty() {
            return Err(schema(raw.kb_version.span().start, "kb_version is empty".into()));
        }

        let mut names = HashSet::new();
        let mut unique = |name: &str, offset: usize| {
            if names.insert(name.to_string()) {
                Ok(())
            } else {
                Err(schema(offset, format!("duplicate target name `{name}`")))
            }
        };

        for eq in &raw.equations {
            let at = eq.span().start;
            let e = eq.get_ref();
            unique(&e.name, at)?;
            if e.patterns.iter().all(|p| p.trim().is_empty()) {
                return Err(schema(at, format!("equation `{}` has no patterns", e.name)));
            }
            for p in &e.patterns {
                if super::extract::equation_regex(p).is_none() {
                    return Err(schema(at, format!("equation pattern `{p}` is not of the form LHS = RHS")));
                }
            }
        }
        for c in &raw.constants {
            let at = c.span().start;
            let k = c.get_ref();
            unique(&k.name, at)?;
            if !(k.value.is_finite() && k.value > 0.0) {
                return Err(schema(at, format!("constant `{}` value must be > 0", k.name)));
            }
            if !(k.rel_tolerance > 0.0 && k.rel_tolerance < 1.0) {
                return Err(schema(
                    at,
                    format!("constant `{}` rel_tolerance must lie in (0, 1)", k.name),
                ));
            }
            if parse_unit(&k.unit).is_none() {
                return Err(schema(at, format!("constant `{}` has unknown unit `{}`", k.name, k.unit)));
            }
            if k.symbol.is_none() && k.aliases.is_empty() {
                return Err(schema(at, format!("constant `{}` needs a symbol or aliases", k.name)));
            }
        }
        for cat in &raw.ordered_categories {
            let at = cat.span().start;
            let c = cat.get_ref();
            unique(&c.name, at)?;
            if c.members.len() < 2 {
                return Err(schema(at, format!("ordered list `{}` needs at least 2 members", c.name)));
            }
            let mut seen = HashSet::new();
            for m in &c.members {
                if !seen.insert(m.name.as_str()) {
                    return Err(schema(
                        at,
                        format!("ordered list `{}` repeats member `{}`", c.name, m.name),
                    ));
                }
            }
        }

        Ok(FactKb {
            kb_version: raw.kb_version.into_inner(),
            topic: raw.topic,
            equations: raw.equations.into_iter().map(Spanned::into_inner).collect(),
            constants: raw.constants.into_iter().map(Spanned::into_inner).collect(),
            ordered_categories: raw
                .ordered_categories
                .into_iter()
                .map(Spanned::into_inner)
                .collect(),
            concept_whitelist: raw.concept_whitelist,
        })
    }

    /// Names of all required targets, in KB order.
    pub fn required_targets(&self) -> Vec<&str> {
        self.equations
            .iter()
            .filter(|e| e.required)
            .map(|e| e.name.as_str())
            .chain(self.constants.iter().filter(|c| c.required).map(|c| c.name.as_str()))
            .chain(
                self.ordered_categories
                    .iter()
                    .filter(|c| c.required)
                    .map(|c| c.name.as_str()),
            )
            .collect()
    }

    /// Drops one target by name. Returns whether anything was removed.
    pub fn remove_target(&mut self, name: &str) -> bool {
        let before = self.equations.len() + self.constants.len() + self.ordered_categories.len();
        self.equations.retain(|e| e.name != name);
        self.constants.retain(|c| c.name != name);
        self.ordered_categories.retain(|c| c.name != name);
        before != self.equations.len() + self.constants.len() + self.ordered_categories.len()
    }

    pub fn is_whitelisted(&self, concept: &str) -> bool {
        let key = concept_key(concept);
        self.concept_whitelist.iter().any(|w| concept_key(w) == key)
    }
}

/// Case- and apostrophe-insensitive concept key; plural heads fold to singular.
pub(crate) fn concept_key(s: &str) -> String {
    let mut k = s.trim().to_lowercase().replace('’', "'");
    for (plural, singular) in [("laws", "law"), ("equations", "equation"), ("effects", "effect")] {
        if let Some(stem) = k.strip_suffix(plural) {
            k = format!("{stem}{singular}");
        }
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_kb_shape() {
        let kb = FactKb::em_spectrum();
        assert_eq!(kb.constants.len(), 2);
        assert_eq!(kb.equations.len(), 3);
        assert_eq!(kb.ordered_categories.len(), 1);
        assert_eq!(kb.ordered_categories[0].members.len(), 7);
        assert!(kb.constants.iter().all(|c| c.rel_tolerance == DEFAULT_REL_TOLERANCE));
        assert_eq!(kb.required_targets().len(), 6);
        let c = kb.constants.iter().find(|c| c.symbol.as_deref() == Some("c")).unwrap();
        assert_eq!(c.value, 2.998e8);
        let h = kb.constants.iter().find(|c| c.symbol.as_deref() == Some("h")).unwrap();
        assert_eq!(h.value, 6.626e-34);
    }

    const MINIMAL: &str = r#"
kb_version = "t/1"
topic = "t"

[[constants]]
name = "speed of light"
symbol = "c"
value = 3e8
unit = "m/s"
"#;

    #[test]
    fn tolerance_defaults() {
        let kb = FactKb::parse(MINIMAL, "mem").unwrap();
        assert_eq!(kb.constants[0].rel_tolerance, 0.10);
        assert!(kb.constants[0].required);
    }

    #[test]
    fn zero_tolerance_is_rejected_with_line() {
        let text = MINIMAL.replace("unit = \"m/s\"", "unit = \"m/s\"\nrel_tolerance = 0.0");
        match FactKb::parse(&text, "mem") {
            Err(KbError::Schema { line, message, .. }) => {
                assert!(message.contains("rel_tolerance"), "{message}");
                assert!(line >= 5, "line {line}");
            }
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn single_member_list_is_rejected() {
        let text = r#"
kb_version = "t/1"
topic = "t"

[[ordered_categories]]
name = "bands"
members = [{ name = "radio" }]
"#;
        let err = FactKb::parse(text, "mem").unwrap_err();
        assert!(err.to_string().contains("at least 2"), "{err}");
        assert!(err.to_string().starts_with("mem:5:"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let err = FactKb::parse("kb_version = \"x\"\ntopic = \n", "bad.kb").unwrap_err();
        assert!(err.to_string().starts_with("bad.kb:2:"), "{err}");
    }

    #[test]
    fn unknown_unit_rejected() {
        let text = MINIMAL.replace("m/s", "furlongs");
        assert!(FactKb::parse(&text, "mem").is_err());
    }

    #[test]
    fn whitelist_matching_is_loose() {
        let kb = FactKb::em_spectrum();
        assert!(kb.is_whitelisted("planck’s CONSTANT"));
        assert!(kb.is_whitelisted("Maxwell's equation"));
        assert!(!kb.is_whitelisted("Johnson's constant"));
    }
}
