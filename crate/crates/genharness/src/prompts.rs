//! The three framework prompts, with topic, duration and grade range as
//! placeholders.

use lessonlens::corpus::Framework;
use thiserror::Error;

pub const DEFAULT_TOPIC: &str = "The Electromagnetic Spectrum";
pub const DEFAULT_DURATION: &str = "60";
pub const DEFAULT_GRADE_RANGE: &str = "9–12";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PromptError {
    #[error("no prompt template for framework `{0}` (expected TAG, RACE or COSTAR)")]
    UnknownFramework(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    pub framework: Framework,
    /// `(label, text)` in prompt order; text may hold `{topic}`,
    /// `{duration}` and `{grade_range}`.
    pub sections: Vec<(&'static str, &'static str)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placeholders {
    pub topic: String,
    pub duration: String,
    pub grade_range: String,
}

impl Default for Placeholders {
    fn default() -> Self {
        Self {
            topic: DEFAULT_TOPIC.into(),
            duration: DEFAULT_DURATION.into(),
            grade_range: DEFAULT_GRADE_RANGE.into(),
        }
    }
}

impl Placeholders {
    pub fn with_topic(topic: impl Into<String>) -> Self {
        Self {
            topic: topic.into(),
            ..Self::default()
        }
    }

    fn fill(&self, text: &str) -> String {
        text.replace("{topic}", &self.topic)
            .replace("{duration}", &self.duration)
            .replace("{grade_range}", &self.grade_range)
    }
}

const TAG: &[(&str, &str)] = &[
    ("Task", "Generate a complete {duration}-minute lesson plan on {topic}."),
    ("Audience", "Mixed-ability high-school students (Grades {grade_range})."),
    (
        "Goal",
        "Ensure learning objectives are clear, activities are engaging and age-appropriate, and the plan includes differentiation strategies, hands-on demonstrations, formative assessment, and a closing reflection.",
    ),
];

const RACE: &[(&str, &str)] = &[
    ("Role", "You are a high-school physics teacher preparing a {duration}-minute lesson."),
    ("Action", "Design a detailed lesson plan on {topic}."),
    (
        "Context",
        "The class consists of mixed-ability students in Grades {grade_range}. Lessons should include clear learning objectives, engaging and age-appropriate activities, differentiation strategies, hands-on demonstrations, formative assessment, and a closing reflection.",
    ),
    (
        "Execute",
        "Present the plan in a structured format suitable for classroom use, including objectives, materials, procedures, and assessment methods.",
    ),
];

const COSTAR: &[(&str, &str)] = &[
    (
        "Context",
        "You are a high-school physics teacher teaching a mixed-ability high-school physics class (Grades {grade_range}) learning about {topic}.",
    ),
    (
        "Objective",
        "Create a {duration}-minute lesson plan where learning objectives are clear, activities are engaging and age-appropriate, and the lesson includes differentiation strategies, hands-on demonstrations, formative assessment, and a closing reflection",
    ),
    ("Style", "Structured, practical, and easy for a teacher to implement."),
    ("Tone", "Professional, supportive, and student-centred."),
    ("Audience", "Grades {grade_range} students with varying levels of prior science knowledge."),
    (
        "Response Format",
        "Provide a complete lesson plan including objectives, materials, step-by-step activities, assessment methods, and a short teacher reflection section.",
    ),
];

impl PromptTemplate {
    pub fn for_framework(framework: &Framework) -> Result<Self, PromptError> {
        let sections = match framework {
            Framework::Tag => TAG,
            Framework::Race => RACE,
            Framework::Costar => COSTAR,
            Framework::Custom(other) => return Err(PromptError::UnknownFramework(other.clone())),
        };
        Ok(Self {
            framework: framework.clone(),
            sections: sections.to_vec(),
        })
    }

    /// One `Label: text` line per section.
    pub fn render(&self, values: &Placeholders) -> String {
        self.sections
            .iter()
            .map(|(label, text)| format!("{label}: {}", values.fill(text)))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

pub fn render_prompt(framework: &Framework, values: &Placeholders) -> Result<String, PromptError> {
    Ok(PromptTemplate::for_framework(framework)?.render(values))
}

/// Lesson components every prompt asks for.
pub const REQUIRED_COMPONENTS: [&str; 5] = [
    "learning objectives",
    "differentiation strategies",
    "hands-on demonstrations",
    "formative assessment",
    "closing reflection",
];

/// Requirement phrases that appear in `prompt`: duration, grade range and
/// the required components.
pub fn requirement_phrases(prompt: &str, values: &Placeholders) -> std::collections::BTreeSet<String> {
    let mut wanted = vec![
        format!("{}-minute", values.duration),
        format!("Grades {}", values.grade_range),
    ];
    wanted.extend(REQUIRED_COMPONENTS.iter().map(|s| s.to_string()));
    wanted.into_iter().filter(|p| prompt.contains(p.as_str())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn race_opens_with_role() {
        let p = render_prompt(&Framework::Race, &Placeholders::default()).unwrap();
        assert!(p.starts_with("Role: You are a high-school physics teacher preparing a 60-minute lesson."));
    }

    #[test]
    fn tag_goal_line() {
        let p = render_prompt(&Framework::Tag, &Placeholders::default()).unwrap();
        assert!(p.contains("differentiation strategies, hands-on demonstrations, formative assessment, and a closing reflection"));
        assert!(p.contains("Task: Generate a complete 60-minute lesson plan on The Electromagnetic Spectrum."));
    }

    #[test]
    fn topic_is_substituted() {
        let p = render_prompt(&Framework::Costar, &Placeholders::with_topic("Optics")).unwrap();
        assert!(p.contains("learning about Optics."));
        assert!(!p.contains("Electromagnetic"));
        assert_eq!(p.lines().count(), 6);
    }

    #[test]
    fn custom_framework_rejected() {
        let err = render_prompt(&Framework::Custom("zero-shot".into()), &Placeholders::default()).unwrap_err();
        assert_eq!(err, PromptError::UnknownFramework("zero-shot".into()));
    }
}
