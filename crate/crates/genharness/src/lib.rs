//! Regenerates a lesson-plan corpus by sending the three framework prompts
//! to chat-completion providers.

pub mod generate;
pub mod prompts;
pub mod provider;
pub mod stub;

pub use generate::{generate_corpus, generate_plan, GenError, GeneratedPlan, GenerationOutcome};
pub use prompts::{render_prompt, Placeholders, PromptTemplate};
pub use provider::{load_providers, ApiKind, CallError, ProviderConfig};
