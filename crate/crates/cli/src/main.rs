use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use lessonlens::alignment::{
    align_embedded, embed_standards, extract_objectives, Aggregation, EmbeddingBackend, HttpBackend,
    HttpBackendConfig, LexicalBackend, StandardSet, StaticVectorBackend,
};
use lessonlens::bloom::{classify_objectives, BloomLexicon, CognitiveProfile};
use lessonlens::corpus::{load_corpus, CorpusSet, Framework, PlanDocument, PlanMetadata};
use lessonlens::factcheck::{check_plan, FactKb};
use lessonlens::pipeline::Evaluator;
use lessonlens::readability::{compute_counts, ReadabilityProfile};
use lessonlens::report::{emit, parse_formats, ReportBundle, RunManifest};
use lessonlens_genharness::prompts::Placeholders;
use lessonlens_genharness::stub::{StubConfig, StubServer, STUB_TOKEN, STUB_TOKEN_ENV};
use lessonlens_genharness::{generate_corpus, load_providers};
use tracing_subscriber::EnvFilter;

const EXIT_FATAL: u8 = 1;
const EXIT_PARTIAL: u8 = 2;

#[derive(Parser)]
#[command(name = "lessonlens", version, about = "Score lesson plans and aggregate by model and prompt framework")]
struct Cli {
    /// More log output (-v info, -vv debug). RUST_LOG overrides.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the plans found in a corpus directory.
    Ls(CorpusArgs),
    /// Readability indices per plan.
    Readability(InputArgs),
    /// Fact check against a knowledge base and report the Hallucination Index.
    Factcheck {
        #[command(flatten)]
        input: InputArgs,
        /// Fact knowledge base (defaults to the bundled spectrum KB)
        #[arg(long)]
        kb: Option<PathBuf>,
        /// Print every finding, not just the totals.
        #[arg(long)]
        findings: bool,
    },
    /// Similarity of extracted objectives to curriculum standards.
    Align {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        align: AlignArgs,
    },
    /// Bloom's taxonomy profile of extracted objectives.
    Bloom {
        #[command(flatten)]
        input: InputArgs,
        /// Bloom verb lexicon TSV (defaults to the bundled lexicon)
        #[arg(long)]
        lexicon: Option<PathBuf>,
    },
    /// Run every stage and write the six summary tables.
    Evaluate {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Fact knowledge base (defaults to the bundled spectrum KB)
        #[arg(long)]
        kb: Option<PathBuf>,
        /// Bloom verb lexicon TSV (defaults to the bundled lexicon)
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[command(flatten)]
        align: AlignArgs,
        /// Comma-separated: csv, json, md.
        #[arg(long, default_value = "csv,json,md")]
        format: String,
        /// Output directory for the report files
        #[arg(long, default_value = "report")]
        out: PathBuf,
    },
    /// Generate plans by prompting chat-completion providers.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct CorpusArgs {
    /// Corpus directory.
    dir: PathBuf,
    /// Manifest CSV (defaults to manifest.csv inside the directory).
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct InputArgs {
    /// A plan file or a corpus directory.
    path: PathBuf,
    /// Emit JSON instead of CSV.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct AlignArgs {
    /// Standards JSON (defaults to the bundled HS-PS4 set).
    #[arg(long)]
    standards: Option<PathBuf>,
    /// `lexical`, `vectors:<file>` or `http:<url>`.
    #[arg(long, default_value = "lexical")]
    backend: String,
    /// Model name sent to an HTTP embedding backend.
    #[arg(long)]
    embed_model: Option<String>,
    /// Environment variable holding the HTTP backend token.
    #[arg(long)]
    embed_token_env: Option<String>,
    /// Per-standard aggregation over objectives: max or mean.
    #[arg(long, default_value = "max")]
    aggregation: Aggregation,
}

#[derive(Args)]
struct GenerateArgs {
    /// Provider list (TOML). Not needed with --stub.
    #[arg(long, required_unless_present = "stub")]
    providers: Option<PathBuf>,
    /// Comma-separated prompt frameworks
    #[arg(long, default_value = "tag,race,costar")]
    frameworks: String,
    #[arg(long, default_value = lessonlens_genharness::prompts::DEFAULT_TOPIC)]
    topic: String,
    #[arg(long, default_value = lessonlens_genharness::prompts::DEFAULT_DURATION)]
    duration: String,
    #[arg(long, default_value = lessonlens_genharness::prompts::DEFAULT_GRADE_RANGE)]
    grade_range: String,
    /// Directory for generated plans and manifest.csv
    #[arg(long, default_value = "corpus")]
    out: PathBuf,
    /// Use a local stub server with five canned providers.
    #[arg(long)]
    stub: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_FATAL) } else { ExitCode::SUCCESS };
        }
    };
    let default_level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new(default_level)))
        .with_writer(std::io::stderr)
        .init();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_PARTIAL),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FATAL)
        }
    }
}

/// `Ok(false)` means some plan or call failed but output was still written.
fn run(command: Command) -> Result<bool> {
    match command {
        Command::Ls(args) => ls(&args),
        Command::Readability(input) => readability(&input),
        Command::Factcheck { input, kb, findings } => factcheck(&input, kb.as_deref(), findings),
        Command::Align { input, align } => align_cmd(&input, &align),
        Command::Bloom { input, lexicon } => bloom(&input, lexicon.as_deref()),
        Command::Evaluate {
            corpus,
            kb,
            lexicon,
            align,
            format,
            out,
        } => evaluate(&corpus, kb.as_deref(), lexicon.as_deref(), &align, &format, &out),
        Command::Generate(args) => generate(&args),
    }
}

fn load_input(path: &Path) -> Result<CorpusSet> {
    if path.is_dir() {
        return load_corpus(path, None).with_context(|| format!("loading corpus {}", path.display()));
    }
    let raw = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let metadata = PlanMetadata::from_filename(path).or_else(|_| {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("plan");
        PlanMetadata::new(stem, Framework::Custom("unknown".into()), "unknown", path)
    })?;
    Ok(CorpusSet::from_plans(vec![PlanDocument::new(metadata, raw)])?)
}

fn load_kb(path: Option<&Path>) -> Result<FactKb> {
    Ok(match path {
        Some(p) => FactKb::load(p)?,
        None => FactKb::em_spectrum(),
    })
}

fn load_lexicon(path: Option<&Path>) -> Result<BloomLexicon> {
    Ok(match path {
        Some(p) => BloomLexicon::load(p)?,
        None => BloomLexicon::bloom_v1(),
    })
}

fn load_standards(path: Option<&Path>) -> Result<StandardSet> {
    Ok(match path {
        Some(p) => StandardSet::load(p)?,
        None => StandardSet::ngss_hs_ps4(),
    })
}

fn make_backend(args: &AlignArgs) -> Result<Box<dyn EmbeddingBackend<f64>>> {
    let spec = args.backend.trim();
    if spec == "lexical" {
        return Ok(Box::new(LexicalBackend::default()));
    }
    if let Some(path) = spec.strip_prefix("vectors:") {
        return Ok(Box::new(
            StaticVectorBackend::load(Path::new(path)).with_context(|| format!("loading word vectors {path}"))?,
        ));
    }
    if spec.starts_with("http:") || spec.starts_with("https:") {
        let url = spec.strip_prefix("http:").filter(|u| !u.starts_with("//")).unwrap_or(spec);
        let mut config = HttpBackendConfig::new(url);
        config.model = args.embed_model.clone();
        config.token_env = args.embed_token_env.clone();
        return Ok(Box::new(HttpBackend::connect(config)?));
    }
    bail!("unknown backend `{spec}` (expected lexical, vectors:<file> or http:<url>)")
}

fn write_csv(header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(std::io::stdout().lock());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn ident(plan: &PlanDocument) -> Vec<String> {
    vec![
        plan.metadata.model_id.clone(),
        plan.metadata.framework.to_string(),
        plan.metadata.source_path.display().to_string(),
    ]
}

fn ls(args: &CorpusArgs) -> Result<bool> {
    let corpus = load_corpus(&args.dir, args.manifest.as_deref())
        .with_context(|| format!("loading corpus {}", args.dir.display()))?;
    let rows = corpus
        .plans
        .iter()
        .map(|p| {
            let mut r = ident(p);
            r.insert(2, p.metadata.topic.clone());
            r.push(p.normalized_text.split_whitespace().count().to_string());
            r
        })
        .collect();
    write_csv(&["model", "framework", "topic", "path", "tokens"], rows)?;
    for s in &corpus.skipped {
        eprintln!("skipped {}: {}", s.path.display(), s.reason);
    }
    Ok(corpus.skipped.is_empty())
}

fn readability(input: &InputArgs) -> Result<bool> {
    let corpus = load_input(&input.path)?;
    let mut ok = true;
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for plan in &corpus.plans {
        match compute_counts(plan) {
            Ok(c) => {
                let p = ReadabilityProfile::<f64>::from_counts(&c);
                let mut r = ident(plan);
                r.extend([p.ttr, p.fre, p.fkgl, p.fog, p.mean_sentence_length].map(|v| format!("{v:.4}")));
                rows.push(r);
                records.push(serde_json::json!({"plan": plan.key(), "counts": c, "profile": p}));
            }
            Err(e) => {
                ok = false;
                eprintln!("{}: {e}", plan.metadata.source_path.display());
            }
        }
    }
    if input.json {
        print_json(&records)?;
    } else {
        write_csv(&["model", "framework", "path", "TTR", "FRE", "FKGL", "FOG", "MSL"], rows)?;
    }
    Ok(ok)
}

fn factcheck(input: &InputArgs, kb: Option<&Path>, findings: bool) -> Result<bool> {
    let corpus = load_input(&input.path)?;
    let kb = load_kb(kb)?;
    let reports: Vec<_> = corpus.plans.iter().map(|p| (p, check_plan(p, &kb))).collect();
    if input.json {
        let v: Vec<_> = reports
            .iter()
            .map(|(p, r)| serde_json::json!({"plan": p.key(), "report": r}))
            .collect();
        return print_json(&v).map(|_| true);
    }
    let rows = reports
        .iter()
        .map(|(p, r)| {
            let mut row = ident(p);
            row.extend([
                r.hi.to_string(),
                r.major_errors.to_string(),
                r.minor_errors.to_string(),
                r.omissions.join("; "),
                r.needs_review().to_string(),
            ]);
            row
        })
        .collect();
    write_csv(&["model", "framework", "path", "HI", "major", "minor", "omissions", "needs_review"], rows)?;
    if findings {
        for (p, r) in &reports {
            for f in &r.findings {
                eprintln!(
                    "{}:{}: {:?} `{}` -> {:?}",
                    p.metadata.source_path.display(),
                    f.finding.start,
                    f.finding.kind,
                    f.finding.surface_text,
                    f.verdict
                );
            }
        }
    }
    Ok(true)
}

fn align_cmd(input: &InputArgs, args: &AlignArgs) -> Result<bool> {
    let corpus = load_input(&input.path)?;
    let standards = load_standards(args.standards.as_deref())?;
    let backend = make_backend(args)?;
    let embedded = embed_standards(&standards, backend.as_ref())?;
    let mut ok = true;
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for plan in &corpus.plans {
        let objectives = extract_objectives(plan);
        match align_embedded(&objectives, &embedded, backend.as_ref(), args.aggregation) {
            Ok(r) => {
                let mut row = ident(plan);
                row.extend(embedded.codes.iter().map(|c| format!("{:.4}", r.per_standard[c].similarity)));
                row.push(format!("{:.4}", r.mean_similarity));
                row.push(r.objectives.to_string());
                rows.push(row);
                records.push(serde_json::json!({"plan": plan.key(), "alignment": r}));
            }
            Err(e) => {
                ok = false;
                eprintln!("{}: {e}", plan.metadata.source_path.display());
            }
        }
    }
    if input.json {
        print_json(&records)?;
    } else {
        let mut header: Vec<&str> = vec!["model", "framework", "path"];
        header.extend(embedded.codes.iter().map(String::as_str));
        header.extend(["mean", "objectives"]);
        write_csv(&header, rows)?;
    }
    Ok(ok)
}

fn bloom(input: &InputArgs, lexicon: Option<&Path>) -> Result<bool> {
    let corpus = load_input(&input.path)?;
    let lexicon = load_lexicon(lexicon)?;
    let mut ok = true;
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for plan in &corpus.plans {
        let classified = classify_objectives(&extract_objectives(plan), &lexicon);
        let levels: Vec<Option<u8>> = classified.iter().map(|c| c.level).collect();
        let profile = CognitiveProfile::<f64>::from_levels(&levels);
        if profile.cdi.is_none() {
            ok = false;
            eprintln!("{}: no objective with a classifiable verb", plan.metadata.source_path.display());
        }
        let mut row = ident(plan);
        row.extend(profile.level_proportions.iter().map(|p| format!("{p:.4}")));
        row.push(profile.cdi.map(|c| format!("{c:.4}")).unwrap_or_default());
        row.push(profile.classified.to_string());
        row.push(profile.unclassified.to_string());
        rows.push(row);
        records.push(serde_json::json!({"plan": plan.key(), "objectives": classified, "profile": profile}));
    }
    if input.json {
        print_json(&records)?;
    } else {
        write_csv(
            &[
                "model", "framework", "path", "Remember", "Understand", "Apply", "Analyze", "Evaluate", "Create", "CDI",
                "classified", "unclassified",
            ],
            rows,
        )?;
    }
    Ok(ok)
}

fn evaluate(
    corpus_args: &CorpusArgs,
    kb: Option<&Path>,
    lexicon: Option<&Path>,
    align: &AlignArgs,
    format: &str,
    out: &Path,
) -> Result<bool> {
    let started = chrono::Utc::now();
    let formats = parse_formats(format)?;
    let kb = load_kb(kb)?;
    let lexicon = load_lexicon(lexicon)?;
    let standards = load_standards(align.standards.as_deref())?;
    let backend = make_backend(align)?;
    let corpus = load_corpus(&corpus_args.dir, corpus_args.manifest.as_deref())
        .with_context(|| format!("loading corpus {}", corpus_args.dir.display()))?;
    let evaluator = Evaluator {
        kb: &kb,
        standards: &standards,
        lexicon: &lexicon,
        backend: backend.as_ref(),
        aggregation: align.aggregation,
    };
    let records = evaluator.evaluate(&corpus).context("embedding standards")?;

    let mut manifest = RunManifest::new::<f64>(started);
    manifest.kb_version = Some(kb.kb_version.clone());
    manifest.lexicon_version = Some(lexicon.version.clone());
    manifest.standards = Some(format!("{} ({})", standards.name, standards.version));
    manifest.backend_id = Some(backend.backend_id());
    manifest.aggregation = align.aggregation;
    manifest.corpus_dir = Some(corpus_args.dir.clone());
    manifest.skipped_files = corpus.skipped.clone();
    manifest.finished_at = chrono::Utc::now();
    let bundle = ReportBundle::new(manifest, records, &standards);
    for w in &bundle.run_manifest.warnings {
        eprintln!("warning: {w}");
    }
    let written = emit(&bundle, &formats, out)?;
    for path in &written {
        println!("{}", path.display());
    }
    Ok(!bundle.has_failures() && corpus.skipped.is_empty())
}

fn generate(args: &GenerateArgs) -> Result<bool> {
    let frameworks = args
        .frameworks
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse::<Framework>())
        .collect::<Result<Vec<_>, _>>()?;
    if frameworks.is_empty() {
        bail!("no frameworks given");
    }
    let values = Placeholders {
        topic: args.topic.clone(),
        duration: args.duration.clone(),
        grade_range: args.grade_range.clone(),
    };
    let _server;
    let providers = if args.stub {
        if std::env::var_os(STUB_TOKEN_ENV).is_none() {
            std::env::set_var(STUB_TOKEN_ENV, STUB_TOKEN);
        }
        let server = StubServer::start(StubConfig::default()).context("starting stub server")?;
        let providers = server.providers(30.0, Default::default());
        _server = server;
        providers
    } else {
        let path = args.providers.as_deref().expect("clap requires --providers");
        load_providers(path)?
    };
    let outcome = generate_corpus(&providers, &frameworks, &values, &args.out)?;
    for p in &outcome.plans {
        println!("{}\t{} attempt(s)", p.path.display(), p.attempts);
    }
    if let Some(m) = &outcome.manifest {
        println!("{}", m.display());
    }
    for e in &outcome.failures {
        eprintln!("error: {e}");
    }
    Ok(outcome.failures.is_empty())
}
