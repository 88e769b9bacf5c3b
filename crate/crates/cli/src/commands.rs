use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde_json::json;

use emorec_core::corpus::{
    build_corpus, ingest, parse_stopwords, preprocess, sentiment_summary, CorpusFormat, RawDocument,
};
use emorec_core::eval::{run_cv, CvConfig, Lexicon};
use emorec_core::fmt::sig;
use emorec_core::model::{self, EmotionModel};
use emorec_core::predict::{Limits, PredictRequest, PredictResponse, Predictor};
use emorec_core::report::{
    binary_tsv, positivity_tsv, profiles_tsv, summary_tsv, TopicReport,
};
use emorec_core::topics::{baseline_partition, distance_matrix, load_partition, TopicPartition};
use emorec_core::{Document, PolarityMap, PreprocessConfig, Variant};

use crate::args::{
    CorpusArgs, CorpusFormatArg, EvaluateArgs, Global, OutputFormat, PredictArgs, ReportArgs,
    ServeArgs, TrainArgs,
};
use crate::exit::InputError;
use crate::server;

fn preprocess_config(g: &Global, c: &CorpusArgs) -> Result<PreprocessConfig> {
    let mut cfg = PreprocessConfig {
        min_count: c.min_count,
        keep_digits: c.keep_digits,
        ..PreprocessConfig::default()
    };
    if let Some(path) = &g.stopwords {
        cfg = cfg.with_stopwords_file(path)?;
    }
    Ok(cfg)
}

fn read_corpus(path: &Path, format: Option<CorpusFormatArg>) -> Result<Vec<RawDocument>> {
    let format = format.map_or_else(|| CorpusFormat::from_path(path), Into::into);
    Ok(ingest(path, format)?)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).with_context(|| format!("cannot create {}", path.display()))
}

fn print_json(out: &mut dyn Write, value: &impl serde::Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Splits `NAME=PATH`; a bare path is named after its file stem.
fn named_path(spec: &str) -> Result<(String, PathBuf)> {
    if let Some((name, path)) = spec.split_once('=') {
        if name.is_empty() || path.is_empty() {
            bail!(InputError(format!("expected NAME=PATH, got {spec:?}")));
        }
        return Ok((name.to_string(), PathBuf::from(path)));
    }
    let path = PathBuf::from(spec);
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .filter(|s| !s.is_empty())
        .ok_or_else(|| InputError(format!("cannot derive a name from {spec:?}")))?
        .to_string();
    Ok((name, path))
}

fn named_paths(specs: &[String], what: &str) -> Result<Vec<(String, PathBuf)>> {
    let mut out: Vec<(String, PathBuf)> = Vec::new();
    for spec in specs {
        let (name, path) = named_path(spec)?;
        if out.iter().any(|(n, _)| *n == name) {
            bail!(InputError(format!("duplicate {what} name {name:?}")));
        }
        out.push((name, path));
    }
    Ok(out)
}

pub fn train(g: &Global, a: &TrainArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = preprocess_config(g, &a.corpus)?;
    let pol = PolarityMap::load(&a.polarity)?;
    let raws = read_corpus(&a.corpus.corpus, a.corpus.corpus_format)?;
    let summary = sentiment_summary(&raws, &pol)?;
    let (docs, vocab) = build_corpus(&raws, &cfg)?;
    let variant: Variant = a.variant.into();
    let partition = match variant {
        Variant::FullVocab => None,
        Variant::Topic => Some(match (&a.partition, a.baseline_topics) {
            (Some(path), _) => load_partition(path, &vocab)?,
            (None, Some(n)) => baseline_partition(&docs, &vocab, n, g.seed)?,
            (None, None) => bail!(InputError(
                "the topic variant needs --partition or --baseline-topics".into()
            )),
        }),
    };
    let model = model::train(&docs, partition.as_ref(), &pol, g.epsilon, variant)?.with_preprocess(cfg);
    model.save(&a.out)?;

    let mut tags: BTreeMap<&str, usize> = BTreeMap::new();
    for d in &docs {
        for e in &d.emotions {
            *tags.entry(e.as_str()).or_insert(0) += 1;
        }
    }
    match g.format {
        OutputFormat::Json => print_json(
            out,
            &json!({
                "model": a.out,
                "variant": variant,
                "documents": docs.len(),
                "vocabulary": vocab.len(),
                "topics": partition.as_ref().map(TopicPartition::n_topics),
                "emotions": tags,
                "summary": summary,
            }),
        )?,
        OutputFormat::Text => {
            write!(out, "{}", summary_tsv(&summary))?;
            writeln!(out)?;
            writeln!(out, "Emotion\tPolarity\tDocuments")?;
            for (e, n) in &tags {
                writeln!(out, "{e}\t{}\t{n}", pol.require(e)?)?;
            }
            writeln!(out)?;
            writeln!(out, "documents\t{}", docs.len())?;
            writeln!(out, "vocabulary\t{}", vocab.len())?;
            writeln!(out, "emotions\t{}", tags.len())?;
            if let Some(p) = &partition {
                writeln!(out, "topics\t{}", p.n_topics())?;
            }
            writeln!(out, "model\t{}", a.out.display())?;
        }
    }
    Ok(())
}

fn predictor_for(g: &Global, model: EmotionModel) -> Result<Predictor> {
    Ok(match &g.stopwords {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("{}", path.display()))?;
            let cfg = PreprocessConfig {
                stopwords: parse_stopwords(&text),
                ..model.preprocess().clone()
            };
            Predictor::with_preprocess(model, cfg)
        }
        None => Predictor::new(model),
    })
}

pub fn render_prediction(resp: &PredictResponse) -> String {
    let mut s = format!(
        "positive_posterior\t{}\nsentiment\t{}\n\nemotion\tprior\tposterior\n",
        sig(resp.positive_posterior, 10),
        resp.sentiment
    );
    for e in &resp.emotions {
        s.push_str(&format!("{}\t{}\t{}\n", e.label, sig(e.prior, 10), sig(e.posterior, 10)));
    }
    if !resp.topic_attribution.is_empty() {
        s.push_str("\ntopic\tdensity\ttop_words\n");
        for t in &resp.topic_attribution {
            s.push_str(&format!("{}\t{}\t{}\n", t.topic, sig(t.density, 10), t.top_words.join(", ")));
        }
    }
    s
}

pub fn predict(g: &Global, a: &PredictArgs, out: &mut dyn Write) -> Result<()> {
    let model = EmotionModel::load(&a.model)?;
    let predictor = predictor_for(g, model)?;
    let text = match &a.text {
        Some(t) => t.clone(),
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .context("cannot read text from stdin")?;
            buf
        }
    };
    let resp = predictor.predict(&PredictRequest { text, top_k: a.top_k })?;
    for w in &resp.warnings {
        eprintln!("warning: {w}");
    }
    match g.format {
        OutputFormat::Json => print_json(out, &resp)?,
        OutputFormat::Text => write!(out, "{}", render_prediction(&resp))?,
    }
    Ok(())
}

/// File-system friendly version of a model name.
fn file_name(model: &str) -> String {
    model
        .chars()
        .map(|c| if c.is_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

pub fn evaluate(g: &Global, a: &EvaluateArgs, out: &mut dyn Write) -> Result<()> {
    if a.folds < 2 {
        bail!(InputError(format!("--folds must be at least 2, got {}", a.folds)));
    }
    let cfg = preprocess_config(g, &a.corpus)?;
    let pol = PolarityMap::load(&a.polarity)?;
    let raws = read_corpus(&a.corpus.corpus, a.corpus.corpus_format)?;
    let (docs, vocab) = build_corpus(&raws, &cfg)?;

    let partitions = named_paths(&a.partitions, "partition")?
        .into_iter()
        .map(|(name, path)| Ok((name, load_partition(&path, &vocab)?)))
        .collect::<Result<Vec<_>>>()?;
    let lexicons = named_paths(&a.lexicons, "lexicon")?
        .into_iter()
        .map(|(name, path)| Ok(Lexicon::load(name, &path)?))
        .collect::<Result<Vec<_>>>()?;

    // lexicons see every non-stopword token, before the frequency filter
    let lexicon_tokens = if lexicons.is_empty() {
        BTreeMap::new()
    } else {
        let kept: std::collections::HashSet<&str> = docs.iter().map(|d| d.id.as_str()).collect();
        raws.iter()
            .filter(|r| kept.contains(r.id.as_str()))
            .map(|r| (r.id.clone(), preprocess(&r.text, &cfg)))
            .collect()
    };

    let cv = CvConfig {
        folds: a.folds,
        seed: g.seed,
        epsilon: g.epsilon,
        max_rank: a.max_rank,
        full_vocab: !a.no_full_vocab,
        baselines: true,
        lexicons,
        relevance_partition: a.relevance_partition.clone(),
        lexicon_tokens,
    };
    let report = run_cv(&docs, &partitions, &pol, &cv)?;

    create_dir(&a.out_dir)?;
    let curves_dir = a.out_dir.join("curves");
    create_dir(&curves_dir)?;
    write_file(&a.out_dir.join("report.json"), &report.to_json()?)?;
    let table = binary_tsv(&report);
    write_file(&a.out_dir.join("binary_metrics.tsv"), &table)?;
    for m in &report.models {
        if m.mean.ranking.is_some() {
            write_file(
                &curves_dir.join(format!("{}.tsv", file_name(&m.name))),
                &report.curves_tsv(m),
            )?;
        }
    }
    match g.format {
        OutputFormat::Json => print_json(out, &report)?,
        OutputFormat::Text => write!(out, "{table}")?,
    }
    Ok(())
}

/// Keeps only words the partition knows and drops documents left empty.
fn restrict_to_partition(docs: Vec<Document>, part: &TopicPartition) -> Vec<Document> {
    docs.into_iter()
        .filter_map(|mut d| {
            d.bow.retain(|w, _| part.topic_of(w).is_some());
            (!d.bow.is_empty()).then_some(d)
        })
        .collect()
}

pub fn report(g: &Global, a: &ReportArgs, out: &mut dyn Write) -> Result<()> {
    let model = EmotionModel::load(&a.model)?;
    let part = model
        .partition()
        .ok_or(emorec_core::Error::RequiresTopicVariant)?
        .clone();
    let pol = match &a.polarity {
        Some(p) => PolarityMap::load(p)?,
        None => model.polarity().clone(),
    };
    create_dir(&a.out_dir)?;

    let mut cfg = model.preprocess().clone();
    if let Some(path) = &g.stopwords {
        cfg = cfg.with_stopwords_file(path)?;
    }
    let docs = match &a.corpus {
        Some(path) => {
            let raws = read_corpus(path, a.corpus_format)?;
            write_file(&a.out_dir.join("summary.tsv"), &summary_tsv(&sentiment_summary(&raws, &pol)?))?;
            let (docs, _) = build_corpus(&raws, &cfg)?;
            Some(restrict_to_partition(docs, &part))
        }
        None => None,
    };

    let topic_report = TopicReport::new(&model, docs.as_deref(), a.top_words)?;
    let rows = topic_report.positivity(&pol)?;
    let table = positivity_tsv(&rows);
    write_file(&a.out_dir.join("topic_positivity.tsv"), &table)?;
    write_file(&a.out_dir.join("profiles.tsv"), &profiles_tsv(&topic_report.profiles))?;
    let distances = distance_matrix(&topic_report.profiles)?;
    write_file(&a.out_dir.join("distances.tsv"), &distances.to_tsv())?;

    match g.format {
        OutputFormat::Json => print_json(
            out,
            &json!({
                "topics": rows,
                "profiles": topic_report.profiles,
                "distances": distances,
            }),
        )?,
        OutputFormat::Text => write!(out, "{table}")?,
    }
    Ok(())
}

pub fn serve(_g: &Global, a: &ServeArgs) -> Result<()> {
    let model = EmotionModel::load(&a.model)?;
    let limits = Limits {
        max_text_bytes: a.max_text_bytes,
        max_top_k: a.max_top_k,
    };
    let state = server::AppState::new(model, limits)?;
    let runtime = tokio::runtime::Runtime::new().context("cannot start the async runtime")?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(a.bind)
            .await
            .with_context(|| format!("cannot bind {}", a.bind))?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        server::serve(listener, state, shutdown_signal()).await
    })
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let terminate = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let terminate = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {}
        _ = terminate => {}
    }
}
