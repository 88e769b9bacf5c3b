//! k-fold cross-validation over the recommender variants and baselines.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{Document, Polarity, PolarityMap, Vocabulary};
use crate::error::{Error, Result};
use crate::eval::baselines::{lexicon_classify, mle_baseline, uniform_baseline, Lexicon};
use crate::eval::binary::{binary_metrics, BinaryMetrics};
use crate::eval::folds::kfold_split;
use crate::eval::graded::{gains, ideal_gains, ndcg_from_gains, q_measure_from_gains, RelevanceContext};
use crate::eval::rank::{interpolated_precision, recall_at_k, Query};
use crate::fmt::sig;
use crate::model::{self, classify_sentiment, empirical_sentiment, EmotionModel, RankedPrediction, Variant};
use crate::topics::{emotion_topic_profiles, TopicPartition};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct CvConfig {
    pub folds: usize,
    pub seed: u64,
    pub epsilon: f64,
    /// Deepest rank reported for the rank curves (capped by the emotion
    /// universe of each fold).
    pub max_rank: usize,
    pub full_vocab: bool,
    pub baselines: bool,
    pub lexicons: Vec<Lexicon>,
    /// Name of the partition whose training-fold profiles define graded
    /// relevance. Defaults to the first partition; with no partitions every
    /// word is its own topic.
    pub relevance_partition: Option<String>,
    /// Token sequences fed to the lexicon classifiers, keyed by document id.
    /// Documents without an entry fall back to their bag of words.
    pub lexicon_tokens: BTreeMap<String, Vec<String>>,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 10,
            seed: 42,
            epsilon: model::DEFAULT_EPSILON,
            max_rank: 20,
            full_vocab: true,
            baselines: true,
            lexicons: Vec::new(),
            relevance_partition: None,
            lexicon_tokens: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Topic,
    FullVocab,
    Mle,
    Uniform,
    Lexicon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingCurves {
    /// On the 101-point recall grid.
    pub interpolated_precision: Vec<f64>,
    /// Index `i` holds the value at cutoff `i + 1`.
    pub recall_at_k: Vec<f64>,
    pub q_measure: Vec<f64>,
    pub ndcg: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldMetrics {
    pub fold: usize,
    pub queries: usize,
    /// Queries with at least one label known to the training fold.
    pub graded_queries: usize,
    /// Queries answered with the prior because no token was modelled.
    pub fallbacks: usize,
    pub ranking: Option<RankingCurves>,
    pub binary: BinaryMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanMetrics {
    pub ranking: Option<RankingCurves>,
    pub binary: BinaryMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub name: String,
    pub kind: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<String>,
    pub folds: Vec<FoldMetrics>,
    pub mean: MeanMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionEcho {
    pub name: String,
    pub label: String,
    pub n_topics: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub folds: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub max_rank: usize,
    pub documents: usize,
    pub partitions: Vec<PartitionEcho>,
    pub relevance_partition: String,
    pub lexicons: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub schema_version: u32,
    pub config: ConfigEcho,
    pub models: Vec<ModelReport>,
}

impl MetricReport {
    pub fn model(&self, name: &str) -> Option<&ModelReport> {
        self.models.iter().find(|m| m.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)
            .map_err(|e| Error::invalid(format!("cannot serialise report: {e}")))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::from_json(e, text))
    }

    /// Flat `metric<TAB>x<TAB>value<TAB>fold` rows for one model; the macro
    /// average uses fold `mean`.
    pub fn curves_tsv(&self, model: &ModelReport) -> String {
        let mut out = String::from("metric\tx\tvalue\tfold\n");
        let mut emit = |curves: &RankingCurves, fold: &str| {
            let grid = crate::eval::rank::recall_grid();
            for (x, v) in grid.iter().zip(&curves.interpolated_precision) {
                out.push_str(&format!("interpolated_precision\t{}\t{}\t{fold}\n", sig(*x, 3), sig(*v, 10)));
            }
            for (name, values) in [
                ("recall_at_k", &curves.recall_at_k),
                ("q_measure", &curves.q_measure),
                ("ndcg", &curves.ndcg),
            ] {
                for (i, v) in values.iter().enumerate() {
                    out.push_str(&format!("{name}\t{}\t{}\t{fold}\n", i + 1, sig(*v, 10)));
                }
            }
        };
        for f in &model.folds {
            if let Some(c) = &f.ranking {
                emit(c, &f.fold.to_string());
            }
        }
        if let Some(c) = &model.mean.ranking {
            emit(c, "mean");
        }
        out
    }
}

/// Parses `metric<TAB>x<TAB>value<TAB>fold` rows back into tuples.
pub fn parse_curves_tsv(text: &str) -> Result<Vec<(String, f64, f64, String)>> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        let bad = || Error::Malformed {
            line: idx + 1,
            message: "expected metric<TAB>x<TAB>value<TAB>fold".into(),
        };
        if f.len() != 4 {
            return Err(bad());
        }
        let x: f64 = f[1].parse().map_err(|_| bad())?;
        let v: f64 = f[2].parse().map_err(|_| bad())?;
        rows.push((f[0].to_string(), x, v, f[3].to_string()));
    }
    Ok(rows)
}

enum Ranker<'a> {
    Model(EmotionModel),
    Mle(RankedPrediction),
    Uniform(&'a [String]),
    Lexicon(&'a Lexicon),
}

struct Spec<'a> {
    name: String,
    kind: ModelKind,
    partition: Option<&'a TopicPartition>,
}

/// Runs k-fold cross-validation. Every fold trains each configured model on
/// the other folds and scores the held-out documents; graded relevance uses
/// profiles from the training folds only.
pub fn run_cv(
    docs: &[Document],
    partitions: &[(String, TopicPartition)],
    pol: &PolarityMap,
    cfg: &CvConfig,
) -> Result<MetricReport> {
    if docs.len() < cfg.folds {
        return Err(Error::invalid(format!(
            "{} documents are not enough for {} folds",
            docs.len(),
            cfg.folds
        )));
    }
    if cfg.max_rank == 0 {
        return Err(Error::invalid("max_rank must be at least 1"));
    }
    let ids: Vec<String> = docs.iter().map(|d| d.id.clone()).collect();
    let assignment = kfold_split(&ids, cfg.folds, cfg.seed)?;

    let fallback_partition;
    let (relevance_name, relevance_part) = match &cfg.relevance_partition {
        Some(name) => {
            let (n, p) = partitions
                .iter()
                .find(|(n, _)| n == name)
                .ok_or_else(|| Error::invalid(format!("unknown relevance partition {name:?}")))?;
            (n.clone(), p)
        }
        None => match partitions.first() {
            Some((n, p)) => (n.clone(), p),
            None => {
                let vocab = Vocabulary::from_documents(docs);
                let singletons = vocab.words().enumerate().map(|(i, w)| (w.to_string(), i)).collect();
                fallback_partition = TopicPartition::new(singletons, "word identity")?;
                ("word identity".to_string(), &fallback_partition)
            }
        },
    };

    let mut specs: Vec<Spec> = partitions
        .iter()
        .map(|(name, part)| Spec {
            name: format!("topic:{name}"),
            kind: ModelKind::Topic,
            partition: Some(part),
        })
        .collect();
    if cfg.full_vocab {
        specs.push(Spec { name: "full_vocab".into(), kind: ModelKind::FullVocab, partition: None });
    }
    if cfg.baselines {
        specs.push(Spec { name: "mle".into(), kind: ModelKind::Mle, partition: None });
        specs.push(Spec { name: "uniform".into(), kind: ModelKind::Uniform, partition: None });
    }
    for lex in &cfg.lexicons {
        specs.push(Spec {
            name: format!("lexicon:{}", lex.name),
            kind: ModelKind::Lexicon,
            partition: None,
        });
    }
    if specs.is_empty() {
        return Err(Error::invalid("nothing to evaluate"));
    }

    let fold_results: Vec<Result<Vec<FoldMetrics>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..cfg.folds)
            .map(|fold| {
                let assignment = &assignment;
                let specs = &specs;
                scope.spawn(move || {
                    let train: Vec<Document> = assignment
                        .train_indices(fold)
                        .into_iter()
                        .map(|i| docs[i].clone())
                        .collect();
                    let test: Vec<usize> = assignment.test_indices(fold);
                    evaluate_fold(fold, docs, &train, &test, specs, relevance_part, pol, cfg)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("fold worker panicked"))
            .collect()
    });

    let mut per_model: Vec<Vec<FoldMetrics>> = vec![Vec::new(); specs.len()];
    for fold in fold_results {
        for (slot, m) in per_model.iter_mut().zip(fold?) {
            slot.push(m);
        }
    }

    let models = specs
        .iter()
        .zip(per_model)
        .map(|(spec, folds)| {
            let mean = MeanMetrics {
                ranking: mean_curves(folds.iter().filter_map(|f| f.ranking.as_ref())),
                binary: BinaryMetrics::mean(folds.iter().map(|f| &f.binary)),
            };
            ModelReport {
                name: spec.name.clone(),
                kind: spec.kind,
                partition: spec.partition.map(|p| p.label().to_string()),
                folds,
                mean,
            }
        })
        .collect();

    Ok(MetricReport {
        schema_version: REPORT_SCHEMA_VERSION,
        config: ConfigEcho {
            folds: cfg.folds,
            seed: cfg.seed,
            epsilon: cfg.epsilon,
            max_rank: cfg.max_rank,
            documents: docs.len(),
            partitions: partitions
                .iter()
                .map(|(name, p)| PartitionEcho {
                    name: name.clone(),
                    label: p.label().to_string(),
                    n_topics: p.n_topics(),
                })
                .collect(),
            relevance_partition: relevance_name,
            lexicons: cfg.lexicons.iter().map(|l| l.name.clone()).collect(),
        },
        models,
    })
}

#[allow(clippy::too_many_arguments)]
fn evaluate_fold(
    fold: usize,
    docs: &[Document],
    train: &[Document],
    test: &[usize],
    specs: &[Spec<'_>],
    relevance_part: &TopicPartition,
    pol: &PolarityMap,
    cfg: &CvConfig,
) -> Result<Vec<FoldMetrics>> {
    let profiles = emotion_topic_profiles(train, relevance_part)?;
    let ctx = RelevanceContext::new(profiles.values(), pol)?;
    let universe: Vec<String> = ctx.emotions().to_vec();
    let depth = cfg.max_rank.min(universe.len());

    let truths: Vec<Polarity> = test
        .iter()
        .map(|&i| empirical_sentiment(&docs[i], pol))
        .collect::<Result<_>>()?;

    let mut out = Vec::with_capacity(specs.len());
    for spec in specs {
        let ranker = match spec.kind {
            ModelKind::Topic => Ranker::Model(model::train(train, spec.partition, pol, cfg.epsilon, Variant::Topic)?),
            ModelKind::FullVocab => Ranker::Model(model::train(train, None, pol, cfg.epsilon, Variant::FullVocab)?),
            ModelKind::Mle => Ranker::Mle(mle_baseline(train, pol)?),
            ModelKind::Uniform => Ranker::Uniform(&universe),
            ModelKind::Lexicon => {
                let name = spec.name.trim_start_matches("lexicon:");
                Ranker::Lexicon(
                    cfg.lexicons
                        .iter()
                        .find(|l| l.name == name)
                        .expect("lexicon spec built from config"),
                )
            }
        };

        let mut preds = Vec::with_capacity(test.len());
        let mut queries = Vec::new();
        let mut q_acc = vec![0.0; depth];
        let mut ndcg_acc = vec![0.0; depth];
        let mut graded = 0usize;
        let mut fallbacks = 0usize;
        for &i in test {
            let doc = &docs[i];
            let prediction = match &ranker {
                Ranker::Model(m) => {
                    let (counts, _) = m.modelled_counts(&doc.bow);
                    match m.posterior_from_counts(&counts) {
                        Ok(p) => Some(p),
                        Err(Error::NoModelledTokens | Error::DegeneratePosterior) => {
                            fallbacks += 1;
                            Some(m.prior_prediction())
                        }
                        Err(e) => return Err(e),
                    }
                }
                Ranker::Mle(p) => Some(p.clone()),
                Ranker::Uniform(u) => Some(uniform_baseline(u, cfg.seed, i as u64, pol)?),
                Ranker::Lexicon(lex) => {
                    let polarity = match cfg.lexicon_tokens.get(&doc.id) {
                        Some(tokens) => lexicon_classify(tokens, lex),
                        None => {
                            let tokens: Vec<&str> = doc
                                .bow
                                .iter()
                                .flat_map(|(w, &c)| std::iter::repeat_n(w.as_str(), c as usize))
                                .collect();
                            lexicon_classify(&tokens, lex)
                        }
                    };
                    preds.push(polarity);
                    None
                }
            };
            let Some(pred) = prediction else { continue };
            preds.push(classify_sentiment(&pred, pol));

            let known: BTreeSet<String> = doc
                .emotions
                .iter()
                .filter(|e| ctx.contains(e))
                .cloned()
                .collect();
            if !known.is_empty() {
                let g = gains(&pred.ranking, &known, &ctx)?;
                let ideal = ideal_gains(&known, &ctx)?;
                for r in 1..=depth {
                    q_acc[r - 1] += q_measure_from_gains(&g, &ideal, r);
                    ndcg_acc[r - 1] += ndcg_from_gains(&g, &ideal, r);
                }
                graded += 1;
            }
            queries.push(Query {
                ranking: pred.ranking,
                labels: doc.emotions.clone(),
            });
        }

        let ranking = (spec.kind != ModelKind::Lexicon).then(|| {
            let norm = |acc: Vec<f64>| -> Vec<f64> {
                acc.into_iter()
                    .map(|v| if graded == 0 { 0.0 } else { v / graded as f64 })
                    .collect()
            };
            RankingCurves {
                interpolated_precision: interpolated_precision(&queries),
                recall_at_k: (1..=depth).map(|k| recall_at_k(&queries, k)).collect(),
                q_measure: norm(q_acc),
                ndcg: norm(ndcg_acc),
            }
        });
        out.push(FoldMetrics {
            fold,
            queries: test.len(),
            graded_queries: graded,
            fallbacks,
            ranking,
            binary: binary_metrics(&preds, &truths)?,
        });
    }
    Ok(out)
}

fn mean_curves<'a>(curves: impl Iterator<Item = &'a RankingCurves>) -> Option<RankingCurves> {
    let curves: Vec<&RankingCurves> = curves.collect();
    if curves.is_empty() {
        return None;
    }
    let avg = |pick: fn(&RankingCurves) -> &Vec<f64>| -> Vec<f64> {
        let len = curves.iter().map(|c| pick(c).len()).max().unwrap_or(0);
        (0..len)
            .map(|i| {
                let vals: Vec<f64> = curves.iter().filter_map(|c| pick(c).get(i).copied()).collect();
                vals.iter().sum::<f64>() / vals.len() as f64
            })
            .collect()
    };
    Some(RankingCurves {
        interpolated_precision: avg(|c| &c.interpolated_precision),
        recall_at_k: avg(|c| &c.recall_at_k),
        q_measure: avg(|c| &c.q_measure),
        ndcg: avg(|c| &c.ndcg),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(n: usize) -> (Vec<Document>, PolarityMap) {
        let emotions = ["happy", "sad"];
        let docs = (0..n)
            .map(|i| {
                let e = emotions[i % 2];
                let word = if i % 2 == 0 { "sun" } else { "rain" };
                Document {
                    id: format!("d{i}"),
                    bow: [(word.to_string(), 3)].into(),
                    emotions: [e.to_string()].into(),
                }
            })
            .collect();
        let pol = [
            ("happy".to_string(), Polarity::Positive),
            ("sad".to_string(), Polarity::Negative),
        ]
        .into_iter()
        .collect();
        (docs, pol)
    }

    #[test]
    fn two_folds_over_four_docs() {
        let (docs, pol) = corpus(4);
        let cfg = CvConfig { folds: 2, ..CvConfig::default() };
        let report = run_cv(&docs, &[], &pol, &cfg).unwrap();
        for m in &report.models {
            assert_eq!(m.folds.len(), 2);
            assert_eq!(m.folds.iter().map(|f| f.queries).sum::<usize>(), 4);
        }
        assert_eq!(report.config.relevance_partition, "word identity");
    }

    #[test]
    fn too_few_documents() {
        let (docs, pol) = corpus(3);
        assert!(run_cv(&docs, &[], &pol, &CvConfig::default()).is_err());
    }

    #[test]
    fn report_round_trips() {
        let (docs, pol) = corpus(20);
        let lex = Lexicon::parse_tsv("toy", "sun\t1\nrain\t-1\n").unwrap();
        let cfg = CvConfig { folds: 4, lexicons: vec![lex], ..CvConfig::default() };
        let report = run_cv(&docs, &[], &pol, &cfg).unwrap();
        let back = MetricReport::from_json(&report.to_json().unwrap()).unwrap();
        assert_eq!(back, report);
        let lex = report.model("lexicon:toy").unwrap();
        assert!(lex.mean.ranking.is_none());
        assert_eq!(lex.mean.binary.f1, 1.0);
        let fv = report.model("full_vocab").unwrap();
        let rows = parse_curves_tsv(&report.curves_tsv(fv)).unwrap();
        assert!(rows.iter().any(|r| r.0 == "ndcg" && r.3 == "mean"));
    }
}
