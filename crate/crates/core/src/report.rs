//! Tabular report writers and their readers.
//!
//! Three layouts are fixed: the corpus sentiment summary
//! (`Sentiment, Positivity, Count, Proportion, Tags per post`), the topic
//! positivity table (`Topic, Positive, Negative, Positivity`) and the binary
//! sentiment table (`Model, Accuracy, Balanced accuracy, F1, Precision,
//! Recall`). Each writer has a matching parser so outputs can be checked by
//! round-trip.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{Document, Polarity, PolarityMap, SentimentSummary};
use crate::error::{Error, Result};
use crate::eval::binary::BinaryMetrics;
use crate::eval::cv::MetricReport;
use crate::fmt::sig;
use crate::model::EmotionModel;
use crate::predict::top_words;
use crate::topics::{
    emotion_topic_profiles, sentiment_topic_density, topic_positivity, EmotionTopicProfile,
    Positivity, TopicDensity, TopicId,
};

pub const SUMMARY_HEADER: [&str; 5] = ["Sentiment", "Positivity", "Count", "Proportion", "Tags per post"];
pub const POSITIVITY_HEADER: [&str; 4] = ["Topic", "Positive", "Negative", "Positivity"];
pub const BINARY_HEADER: [&str; 6] = ["Model", "Accuracy", "Balanced accuracy", "F1", "Precision", "Recall"];

/// Number of words naming a topic in the positivity table.
pub const TOPIC_LABEL_WORDS: usize = 4;

fn header_line(cols: &[&str]) -> String {
    let mut s = cols.join("\t");
    s.push('\n');
    s
}

/// Splits a TSV body after checking its header; returns `(line number, fields)`.
fn body<'a>(text: &'a str, header: &[&str]) -> Result<Vec<(usize, Vec<&'a str>)>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let first = lines.next().map(|(_, l)| l).unwrap_or_default();
    if first.split('\t').ne(header.iter().copied()) {
        return Err(Error::Malformed {
            line: 1,
            message: format!("expected header {:?}", header.join("\t")),
        });
    }
    lines
        .map(|(i, l)| {
            let fields: Vec<&str> = l.split('\t').collect();
            if fields.len() != header.len() {
                return Err(Error::Malformed {
                    line: i + 1,
                    message: format!("expected {} fields, got {}", header.len(), fields.len()),
                });
            }
            Ok((i + 1, fields))
        })
        .collect()
}

fn number(line: usize, field: &str) -> Result<f64> {
    field.trim().parse().map_err(|_| Error::Malformed {
        line,
        message: format!("bad number {field:?}"),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryTableRow {
    pub sentiment: String,
    /// `None` where the table shows `-`.
    pub positivity: Option<f64>,
    pub count: usize,
    pub proportion: f64,
    pub tags_per_post: f64,
}

pub fn summary_tsv(summary: &SentimentSummary) -> String {
    let mut out = header_line(&SUMMARY_HEADER);
    for row in &summary.rows {
        let positivity = row
            .positivity
            .map(|p| format!("{p:.3}"))
            .unwrap_or_else(|| "-".into());
        out.push_str(&format!(
            "{}\t{positivity}\t{}\t{:.3}\t{:.3}\n",
            row.class.label(),
            row.count,
            row.proportion,
            row.tags_per_post
        ));
    }
    out
}

pub fn parse_summary_tsv(text: &str) -> Result<Vec<SummaryTableRow>> {
    body(text, &SUMMARY_HEADER)?
        .into_iter()
        .map(|(line, f)| {
            Ok(SummaryTableRow {
                sentiment: f[0].to_string(),
                positivity: if f[1] == "-" { None } else { Some(number(line, f[1])?) },
                count: f[2].trim().parse().map_err(|_| Error::Malformed {
                    line,
                    message: format!("bad count {:?}", f[2]),
                })?,
                proportion: number(line, f[3])?,
                tags_per_post: number(line, f[4])?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicPositivity {
    pub topic: TopicId,
    pub top_words: Vec<String>,
    /// Topic likelihood given a positive emotion.
    pub positive: f64,
    pub negative: f64,
    pub positivity: Positivity,
}

/// Per-topic sentiment likelihoods and positivity, least positive first
/// (finite ascending, then infinite, then undefined; ties by topic id).
pub fn positivity_table(
    profiles: &[EmotionTopicProfile],
    priors: &BTreeMap<String, f64>,
    pol: &PolarityMap,
    topic_words: &[Vec<String>],
) -> Result<Vec<TopicPositivity>> {
    let entries = || profiles.iter().map(|p| (p.emotion.as_str(), &p.density));
    let pos = sentiment_topic_density(entries(), priors, Polarity::Positive, pol)?;
    let neg = sentiment_topic_density(entries(), priors, Polarity::Negative, pol)?;
    let mut rows: Vec<TopicPositivity> = (0..pos.len())
        .map(|k| TopicPositivity {
            topic: k,
            top_words: topic_words.get(k).cloned().unwrap_or_default(),
            positive: pos.get(k),
            negative: neg.get(k),
            positivity: topic_positivity(k, &pos, &neg),
        })
        .collect();
    rows.sort_by(|a, b| {
        let (ca, va) = a.positivity.sort_key();
        let (cb, vb) = b.positivity.sort_key();
        ca.cmp(&cb).then(va.total_cmp(&vb)).then(a.topic.cmp(&b.topic))
    });
    Ok(rows)
}

/// Inputs of the topic reports for a topic-variant model. With a corpus the
/// profiles and priors are re-estimated from it without smoothing, so empty
/// cells stay exactly zero; otherwise the model's stored values are used.
pub struct TopicReport {
    pub profiles: Vec<EmotionTopicProfile>,
    pub priors: BTreeMap<String, f64>,
    pub topic_words: Vec<Vec<String>>,
}

impl TopicReport {
    pub fn new(model: &EmotionModel, docs: Option<&[Document]>, n_words: usize) -> Result<Self> {
        let part = model.partition().ok_or(Error::RequiresTopicVariant)?;
        let topic_words = part
            .topic_words()
            .into_iter()
            .map(|w| top_words(model, w, n_words))
            .collect();
        let (profiles, priors) = match docs {
            Some(docs) => {
                let profiles: Vec<EmotionTopicProfile> =
                    emotion_topic_profiles(docs, part)?.into_values().collect();
                (profiles, tag_priors(docs))
            }
            None => (
                model.topic_profiles().ok_or(Error::RequiresTopicVariant)?,
                model.priors(),
            ),
        };
        if profiles.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        Ok(TopicReport {
            profiles,
            priors,
            topic_words,
        })
    }

    pub fn positivity(&self, pol: &PolarityMap) -> Result<Vec<TopicPositivity>> {
        positivity_table(&self.profiles, &self.priors, pol, &self.topic_words)
    }
}

/// Tag-frequency emotion priors.
pub fn tag_priors(docs: &[Document]) -> BTreeMap<String, f64> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for d in docs {
        for e in &d.emotions {
            *counts.entry(e.clone()).or_insert(0) += 1;
        }
    }
    let total: u64 = counts.values().sum();
    counts
        .into_iter()
        .map(|(e, c)| (e, c as f64 / total as f64))
        .collect()
}

pub fn positivity_tsv(rows: &[TopicPositivity]) -> String {
    let mut out = header_line(&POSITIVITY_HEADER);
    for r in rows {
        out.push_str(&format!(
            "{}\t{:.3}\t{:.3}\t{}\n",
            r.top_words.join(", "),
            r.positive,
            r.negative,
            r.positivity
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositivityTableRow {
    pub topic: Vec<String>,
    pub positive: f64,
    pub negative: f64,
    pub positivity: Positivity,
}

pub fn parse_positivity_tsv(text: &str) -> Result<Vec<PositivityTableRow>> {
    body(text, &POSITIVITY_HEADER)?
        .into_iter()
        .map(|(line, f)| {
            Ok(PositivityTableRow {
                topic: f[0]
                    .split(',')
                    .map(str::trim)
                    .filter(|w| !w.is_empty())
                    .map(str::to_string)
                    .collect(),
                positive: number(line, f[1])?,
                negative: number(line, f[2])?,
                positivity: f[3].parse().map_err(|_| Error::Malformed {
                    line,
                    message: format!("bad positivity {:?}", f[3]),
                })?,
            })
        })
        .collect()
}

/// Emotion-topic profiles, one row per emotion, values to 10 significant
/// digits.
pub fn profiles_tsv(profiles: &[EmotionTopicProfile]) -> String {
    let n = profiles.first().map_or(0, |p| p.density.len());
    let mut out = String::from("emotion\tsupport");
    for k in 0..n {
        out.push_str(&format!("\ttopic_{k}"));
    }
    out.push('\n');
    for p in profiles {
        out.push_str(&format!("{}\t{}", p.emotion, p.support));
        for v in p.density.as_slice() {
            out.push('\t');
            out.push_str(&sig(*v, 10));
        }
        out.push('\n');
    }
    out
}

pub fn parse_profiles_tsv(text: &str) -> Result<Vec<EmotionTopicProfile>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(Error::Malformed {
        line: 1,
        message: "missing header".into(),
    })?;
    let width = header.split('\t').count();
    if width < 2 || !header.starts_with("emotion\tsupport") {
        return Err(Error::Malformed {
            line: 1,
            message: "expected header emotion<TAB>support<TAB>topic_0...".into(),
        });
    }
    lines
        .map(|(i, l)| {
            let f: Vec<&str> = l.split('\t').collect();
            if f.len() != width {
                return Err(Error::Malformed {
                    line: i + 1,
                    message: "row width differs from header".into(),
                });
            }
            Ok(EmotionTopicProfile {
                emotion: f[0].to_string(),
                support: f[1].parse().map_err(|_| Error::Malformed {
                    line: i + 1,
                    message: format!("bad support {:?}", f[1]),
                })?,
                density: TopicDensity(
                    f[2..]
                        .iter()
                        .map(|v| number(i + 1, v))
                        .collect::<Result<_>>()?,
                ),
            })
        })
        .collect()
}

/// Macro-averaged binary sentiment metrics of every model in a report.
pub fn binary_tsv(report: &MetricReport) -> String {
    let mut out = header_line(&BINARY_HEADER);
    for m in &report.models {
        let b = &m.mean.binary;
        out.push_str(&format!(
            "{}\t{:.3}\t{:.3}\t{:.3}\t{:.3}\t{:.3}\n",
            m.name, b.accuracy, b.balanced_accuracy, b.f1, b.precision, b.recall
        ));
    }
    out
}

pub fn parse_binary_tsv(text: &str) -> Result<Vec<(String, BinaryMetrics)>> {
    body(text, &BINARY_HEADER)?
        .into_iter()
        .map(|(line, f)| {
            Ok((
                f[0].to_string(),
                BinaryMetrics {
                    accuracy: number(line, f[1])?,
                    balanced_accuracy: number(line, f[2])?,
                    f1: number(line, f[3])?,
                    precision: number(line, f[4])?,
                    recall: number(line, f[5])?,
                },
            ))
        })
        .collect()
}
