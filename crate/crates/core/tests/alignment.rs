use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread;

use lessonlens::alignment::{
    align_plan, align_vectors, classify_alignment, cosine, embed_standards, extract_objectives,
    Aggregation, AlignmentError, Band, EmbeddedStandards, EmbeddingBackend, HttpBackend,
    HttpBackendConfig, LexicalBackend, StandardSet,
};
use lessonlens::corpus::{Framework, PlanDocument};
use lessonlens::retry::RetryPolicy;
use proptest::prelude::*;

fn vector(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, dim)
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-6)
}

fn pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..16).prop_flat_map(|d| (vector(d), vector(d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn cosine_is_symmetric_and_bounded((a, b) in pair()) {
        let ab = cosine(&a, &b).unwrap();
        let ba = cosine(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() < 1e-9);
        prop_assert!((-1.0..=1.0).contains(&ab));
    }

    #[test]
    fn cosine_is_scale_invariant((a, b) in pair(), k in 0.001f64..1000.0) {
        let scaled: Vec<f64> = a.iter().map(|x| x * k).collect();
        prop_assert!((cosine(&scaled, &b).unwrap() - cosine(&a, &b).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn bands_are_monotone(x in -1.0f64..=1.0, y in -1.0f64..=1.0) {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        prop_assert!(classify_alignment(lo) <= classify_alignment(hi));
    }

    #[test]
    fn adding_an_objective_never_lowers_max_scores(
        texts in prop::collection::vec("[a-z ]{1,40}", 1..5),
        extra in "[a-z ]{1,40}",
    ) {
        let backend = LexicalBackend::default();
        let set = StandardSet::ngss_hs_ps4();
        let standards = embed_standards::<f64>(&set, &backend).unwrap();
        let mut objectives: Vec<Vec<f64>> = texts
            .iter()
            .map(|t| backend.embed_batch(&[t.as_str()]).unwrap().remove(0))
            .collect();
        let before = align_vectors(&objectives, &standards, Aggregation::Max).unwrap();
        objectives.push(backend.embed_batch(&[extra.as_str()]).unwrap().remove(0));
        let after = align_vectors(&objectives, &standards, Aggregation::Max).unwrap();
        for (code, score) in &before.per_standard {
            prop_assert!(after.per_standard[code].similarity >= score.similarity);
        }
    }

    #[test]
    fn mean_similarity_is_mean_of_standards(texts in prop::collection::vec("[a-z ]{1,40}", 1..5)) {
        let backend = LexicalBackend::default();
        let standards = embed_standards::<f64>(&StandardSet::ngss_hs_ps4(), &backend).unwrap();
        let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
        let vectors = backend.embed_batch(&refs).unwrap();
        for agg in [Aggregation::Max, Aggregation::Mean] {
            let r = align_vectors(&vectors, &standards, agg).unwrap();
            let mean = r.per_standard.values().map(|s| s.similarity).sum::<f64>() / 4.0;
            prop_assert!((r.mean_similarity - mean).abs() < 1e-12);
        }
    }
}

fn plan(text: &str) -> PlanDocument {
    PlanDocument::from_text("m", Framework::Costar, text)
}

#[test]
fn identical_text_scores_one() {
    let set = StandardSet::ngss_hs_ps4();
    let text = format!("## Objectives\n- {}", set.standards[0].description);
    let objectives = extract_objectives(&plan(&text));
    assert_eq!(objectives.len(), 1);
    let r = align_plan::<f64>(&objectives, &set, &LexicalBackend::default(), Aggregation::Max).unwrap();
    assert_eq!(r.per_standard["HS-PS4-1"].similarity, 1.0);
    assert_eq!(r.per_standard["HS-PS4-1"].band, Band::Strong);
}

#[test]
fn f32_and_f64_agree() {
    let set = StandardSet::ngss_hs_ps4();
    let objectives = extract_objectives(&plan(
        "Students will be able to:\n- calculate wavelength from frequency and wave speed\n- describe the particle model of light",
    ));
    let a = align_plan::<f64>(&objectives, &set, &LexicalBackend::default(), Aggregation::Max).unwrap();
    let b = align_plan::<f32>(&objectives, &set, &LexicalBackend::default(), Aggregation::Max).unwrap();
    assert!((a.mean_similarity - b.mean_similarity as f64).abs() < 1e-5);
}

#[test]
fn no_objectives_is_an_error() {
    let r = align_plan::<f64>(&[], &StandardSet::ngss_hs_ps4(), &LexicalBackend::default(), Aggregation::Max);
    assert!(matches!(r, Err(AlignmentError::NoObjectives)));
}

#[test]
fn mean_aggregation_is_below_max() {
    let set = StandardSet::ngss_hs_ps4();
    let objectives = extract_objectives(&plan(
        "## Objectives\n- Relate frequency, wavelength and speed of waves\n- Draw a poster",
    ));
    let b = LexicalBackend::default();
    let max = align_plan::<f64>(&objectives, &set, &b, Aggregation::Max).unwrap();
    let mean = align_plan::<f64>(&objectives, &set, &b, Aggregation::Mean).unwrap();
    assert!(mean.mean_similarity <= max.mean_similarity);
}

/// Serves canned HTTP responses in order, one per connection.
fn serve(responses: Vec<(u16, String)>) -> (String, Arc<AtomicUsize>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/embed", listener.local_addr().unwrap());
    let hits = Arc::new(AtomicUsize::new(0));
    let counter = hits.clone();
    thread::spawn(move || {
        for (status, body) in responses {
            let Ok((mut stream, _)) = listener.accept() else { return };
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut length = 0;
            loop {
                let mut line = String::new();
                if reader.read_line(&mut line).unwrap_or(0) == 0 || line == "\r\n" {
                    break;
                }
                if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                    length = v.trim().parse().unwrap_or(0);
                }
            }
            let mut buf = vec![0; length];
            let _ = reader.read_exact(&mut buf);
            counter.fetch_add(1, Ordering::SeqCst);
            let reply = format!(
                "HTTP/1.1 {status} X\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                body.len()
            );
            let _ = stream.write_all(reply.as_bytes());
        }
    });
    (url, hits)
}

fn fast_retry(max_attempts: u32) -> RetryPolicy {
    RetryPolicy {
        max_attempts,
        initial_backoff_ms: 1,
        max_backoff_ms: 5,
        multiplier: 2.0,
    }
}

#[test]
fn http_backend_retries_then_succeeds() {
    let (url, hits) = serve(vec![
        (500, "{}".into()),
        (200, r#"{"embeddings":[[1.0,0.0],[0.0,1.0]]}"#.into()),
    ]);
    let mut config = HttpBackendConfig::new(url);
    config.dimension = Some(2);
    config.retry = fast_retry(3);
    let backend = HttpBackend::connect(config).unwrap();
    let v: Vec<Vec<f64>> = backend.embed_batch(&["a", "b"]).unwrap();
    assert_eq!(v, [[1.0, 0.0], [0.0, 1.0]]);
    assert_eq!(hits.load(Ordering::SeqCst), 2);
    assert!(!EmbeddingBackend::<f64>::is_concurrent(&backend));
}

#[test]
fn http_backend_probes_dimension_and_reads_openai_shape() {
    let (url, _) = serve(vec![
        (200, r#"{"data":[{"embedding":[0.5,0.5,0.0],"index":0}]}"#.into()),
        (200, r#"{"data":[{"embedding":[0.0,1.0,0.0],"index":1},{"embedding":[1.0,0.0,0.0],"index":0}]}"#.into()),
    ]);
    let backend = HttpBackend::connect(HttpBackendConfig::new(url)).unwrap();
    assert_eq!(EmbeddingBackend::<f64>::dimension(&backend), 3);
    let v: Vec<Vec<f64>> = backend.embed_batch(&["x", "y"]).unwrap();
    assert_eq!(v[0], [1.0, 0.0, 0.0]);
}

#[test]
fn http_backend_gives_up_on_client_errors() {
    let (url, hits) = serve(vec![(401, "{}".into()), (200, "{}".into())]);
    let mut config = HttpBackendConfig::new(url);
    config.dimension = Some(2);
    config.retry = fast_retry(5);
    let backend = HttpBackend::connect(config).unwrap();
    let err = EmbeddingBackend::<f64>::embed_batch(&backend, &["a"]).unwrap_err();
    assert!(err.to_string().contains("401"), "{err}");
    assert!(err.to_string().contains("retry"), "{err}");
    assert_eq!(hits.load(Ordering::SeqCst), 1);
}

#[test]
fn embedded_standards_keep_file_order() {
    let e: EmbeddedStandards<f64> = embed_standards(&StandardSet::ngss_hs_ps4(), &LexicalBackend::default()).unwrap();
    assert_eq!(e.codes, ["HS-PS4-1", "HS-PS4-3", "HS-PS4-4", "HS-PS4-5"]);
}
