use std::fs;
use std::path::Path;

use lessonlens::corpus::{load_corpus, normalize, CorpusError, Framework};
use proptest::prelude::*;

fn markdown_line() -> impl Strategy<Value = String> {
    let prefix = prop::sample::select(vec![
        "", "", "", "# ", "## ", "### ", "- ", "* ", "+ ", "1. ", "2) ", "> ", "| ", "- - ", "• ",
    ]);
    let word = prop::sample::select(vec![
        "light", "wave", "c = λf", "**bold**", "*it*", "__b__", "_i_", "`code`", "$E = hf$",
        "\\(x\\)", "3*10^8", "10**8", "a * b", "e.g.", "Dr.", "é", "e\u{301}", "|", ":", "**",
        "*", "_", "x_y", "Objectives:", "—", "?", "!", ".", "(note)", "λ", "**x", "y**", "***",
        "[ ]", "#tag", "##", "1.", "-",
    ]);
    let suffix = prop::sample::select(vec!["", "", ".", ":", " |", "  ", "!", "**", "*"]);
    (prefix, prop::collection::vec(word, 0..7), suffix)
        .prop_map(|(p, words, s)| format!("{p}{}{s}", words.join(" ")))
}

fn markdown_doc() -> impl Strategy<Value = String> {
    prop::collection::vec(markdown_line(), 0..8).prop_map(|lines| lines.join("\n"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn normalize_is_idempotent(doc in markdown_doc()) {
        let once = normalize(&doc).text;
        let twice = normalize(&once).text;
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn line_spans_are_valid(doc in markdown_doc()) {
        let n = normalize(&doc);
        let mut last_end = 0;
        for span in &n.lines {
            prop_assert!(span.start <= span.end && span.end <= n.text.len());
            prop_assert!(span.start >= last_end);
            prop_assert!(n.text.is_char_boundary(span.start));
            prop_assert!(n.text.is_char_boundary(span.end));
            last_end = span.end;
        }
    }

    #[test]
    fn word_characters_survive(doc in markdown_doc()) {
        let n = normalize(&doc);
        if doc.chars().any(char::is_alphabetic) {
            prop_assert!(!n.text.is_empty());
        }
    }
}

fn write(dir: &Path, name: &str, body: &str) {
    fs::write(dir.join(name), body).unwrap();
}

#[test]
fn single_file_uses_filename_convention() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "deepseek__race__em-spectrum.txt", "# Plan\nLight is a wave.");
    let corpus = load_corpus(dir.path(), None).unwrap();
    assert_eq!(corpus.len(), 1);
    let meta = &corpus.plans[0].metadata;
    assert_eq!(meta.model_id, "deepseek");
    assert_eq!(meta.framework, Framework::Race);
    assert_eq!(corpus.plans[0].normalized_text, "Plan. Light is a wave.");
}

#[test]
fn factorial_corpus_of_fifteen() {
    let dir = tempfile::tempdir().unwrap();
    for model in ["chatgpt", "claude", "deepseek", "gemini", "grok"] {
        for fw in ["tag", "race", "costar"] {
            write(dir.path(), &format!("{model}__{fw}__em.txt"), "Text.");
        }
    }
    let corpus = load_corpus(dir.path(), None).unwrap();
    assert_eq!(corpus.len(), 15);
    let keys: std::collections::HashSet<_> = corpus.plans.iter().map(|p| p.key()).collect();
    assert_eq!(keys.len(), 15);
}

#[test]
fn empty_directory_gives_empty_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = load_corpus(dir.path(), None).unwrap();
    assert!(corpus.is_empty());
    assert!(corpus.skipped.is_empty());
}

#[test]
fn missing_directory_is_fatal() {
    assert!(matches!(
        load_corpus(Path::new("/nonexistent/lessonlens"), None),
        Err(CorpusError::MissingDirectory(_))
    ));
}

#[test]
fn unparseable_names_are_skipped() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "notes.txt", "Stray.");
    write(dir.path(), "grok__tag__em.txt", "Fine.");
    write(dir.path(), "image.png", "binary");
    let corpus = load_corpus(dir.path(), None).unwrap();
    assert_eq!(corpus.len(), 1);
    assert_eq!(corpus.skipped.len(), 1);
    assert!(corpus.skipped[0].path.ends_with("notes.txt"));
}

#[test]
fn manifest_wins_over_filename() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "grok__tag__em.txt", "Plan one.");
    write(dir.path(), "plan2.txt", "Plan two.");
    write(
        dir.path(),
        "manifest.csv",
        "path,model,framework,topic,generated_at\n\
         grok__tag__em.txt,Grok,COSTAR,The Electromagnetic Spectrum,2025-06-02\n\
         plan2.txt,Claude,RACE,The Electromagnetic Spectrum,\n",
    );
    let corpus = load_corpus(dir.path(), None).unwrap();
    assert_eq!(corpus.len(), 2);
    assert!(corpus.manifest_path.is_some());
    let grok = corpus.plans.iter().find(|p| p.metadata.model_id == "Grok").unwrap();
    assert_eq!(grok.metadata.framework, Framework::Costar);
    assert_eq!(grok.metadata.topic, "The Electromagnetic Spectrum");
    assert!(grok.metadata.generated_at.is_some());
}

#[test]
fn duplicate_keys_are_fatal() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.txt", "A.");
    write(dir.path(), "b.txt", "B.");
    write(
        dir.path(),
        "manifest.csv",
        "path,model,framework,topic\na.txt,Grok,TAG,em\nb.txt,Grok,TAG,em\n",
    );
    assert!(matches!(
        load_corpus(dir.path(), None),
        Err(CorpusError::DuplicateKey { .. })
    ));
}

#[test]
fn loading_is_order_independent() {
    // Two directories with the same files created in opposite orders.
    let names = ["b__tag__t.txt", "a__race__t.txt", "c__costar__t.txt", "a__tag__t.txt"];
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for n in names {
        write(d1.path(), n, n);
    }
    for n in names.iter().rev() {
        write(d2.path(), n, n);
    }
    let k1: Vec<_> = load_corpus(d1.path(), None).unwrap().plans.iter().map(|p| p.key()).collect();
    let k2: Vec<_> = load_corpus(d2.path(), None).unwrap().plans.iter().map(|p| p.key()).collect();
    assert_eq!(k1, k2);
}
