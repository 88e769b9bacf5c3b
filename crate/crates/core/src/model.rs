//! The naive Bayes emotion recommender.
//!
//! A [`Variant::Topic`] model scores a document through the topics its words
//! belong to: every token of word `w` contributes `log p(k_w | e)`, where
//! `k_w` is the topic of `w` and `p(k | e)` the emotion-topic profile. The
//! within-topic word probabilities are identical for every emotion and drop
//! out of the normalisation, so they are never estimated. A
//! [`Variant::FullVocab`] model uses `log p(w | e)` directly. Posteriors are
//! normalised in the log domain with [`log_sum_exp`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Document, Polarity, PolarityMap, PreprocessConfig};
use crate::error::{Error, Result};
use crate::fmt::Exact;
use crate::topics::{emotion_topic_profiles, EmotionTopicProfile, TopicDensity, TopicPartition};

pub const FORMAT_VERSION: u32 = 1;
pub const DEFAULT_EPSILON: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Topic,
    FullVocab,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Topic => "topic",
            Variant::FullVocab => "full_vocab",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "topic" => Ok(Variant::Topic),
            "full-vocab" | "full_vocab" => Ok(Variant::FullVocab),
            other => Err(Error::invalid(format!("unknown model variant {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Features {
    Topics(TopicPartition),
    Words {
        words: Vec<String>,
        index: HashMap<String, usize>,
    },
}

impl Features {
    fn words(words: Vec<String>) -> Self {
        let index = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        Features::Words { words, index }
    }

    fn feature_of(&self, word: &str) -> Option<usize> {
        match self {
            Features::Topics(part) => part.topic_of(word),
            Features::Words { index, .. } => index.get(word).copied(),
        }
    }

    fn len(&self) -> usize {
        match self {
            Features::Topics(part) => part.n_topics(),
            Features::Words { words, .. } => words.len(),
        }
    }
}

/// A trained recommender. Immutable once built; share it freely across
/// threads.
#[derive(Debug, Clone, PartialEq)]
pub struct EmotionModel {
    variant: Variant,
    epsilon: f64,
    emotions: Vec<String>,
    priors: Vec<f64>,
    support: Vec<u64>,
    features: Features,
    profiles: Vec<Vec<f64>>,
    log_profiles: Vec<Vec<f64>>,
    polarity: PolarityMap,
    word_counts: BTreeMap<String, u64>,
    preprocess: PreprocessConfig,
}

/// Emotion posterior for one document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedPrediction {
    pub posterior: BTreeMap<String, f64>,
    /// Emotions by descending posterior.
    pub ranking: Vec<String>,
    pub positive_posterior: f64,
}

impl RankedPrediction {
    /// Ranks a posterior by descending probability, ties in label order.
    pub fn from_posterior(posterior: BTreeMap<String, f64>, pol: &PolarityMap) -> Self {
        let mut ranking: Vec<&String> = posterior.keys().collect();
        ranking.sort_by(|a, b| posterior[*b].total_cmp(&posterior[*a]));
        let ranking = ranking.into_iter().cloned().collect();
        let positive_posterior = positive_mass(&posterior, pol);
        RankedPrediction {
            posterior,
            ranking,
            positive_posterior,
        }
    }

    /// Same posterior with an explicitly supplied ranking order.
    pub fn with_ranking(
        posterior: BTreeMap<String, f64>,
        ranking: Vec<String>,
        pol: &PolarityMap,
    ) -> Self {
        let positive_posterior = positive_mass(&posterior, pol);
        RankedPrediction {
            posterior,
            ranking,
            positive_posterior,
        }
    }

    pub fn negative_posterior(&self) -> f64 {
        1.0 - self.positive_posterior
    }

    pub fn probability(&self, emotion: &str) -> f64 {
        self.posterior.get(emotion).copied().unwrap_or(0.0)
    }
}

fn positive_mass(posterior: &BTreeMap<String, f64>, pol: &PolarityMap) -> f64 {
    posterior
        .iter()
        .filter(|(e, _)| pol.is_positive(e))
        .map(|(_, p)| p)
        .sum::<f64>()
        .clamp(0.0, 1.0)
}

/// `log Σ exp(v)`, shifted by the maximum so that large negative inputs do
/// not underflow.
pub fn log_sum_exp(values: &[f64]) -> Result<f64> {
    let max = values
        .iter()
        .copied()
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))))
        .ok_or_else(|| Error::invalid("log_sum_exp of an empty list"))?;
    if max.is_infinite() {
        return Ok(max);
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    Ok(max + sum.ln())
}

fn smooth(profile: &mut [f64], epsilon: f64) {
    if epsilon <= 0.0 || !profile.iter().any(|&p| p == 0.0) {
        return;
    }
    for p in profile.iter_mut() {
        if *p == 0.0 {
            *p = epsilon;
        }
    }
    let total: f64 = profile.iter().sum();
    for p in profile.iter_mut() {
        *p /= total;
    }
}

/// Fits a model to labelled documents.
///
/// Priors are tag frequencies. Topic profiles are mean document-topic
/// densities per emotion; full-vocabulary profiles are the emotion's pooled
/// word frequencies. Zero profile entries are raised to `epsilon` and the
/// profile renormalised.
pub fn train(
    docs: &[Document],
    partition: Option<&TopicPartition>,
    pol: &PolarityMap,
    epsilon: f64,
    variant: Variant,
) -> Result<EmotionModel> {
    if docs.is_empty() {
        return Err(Error::invalid("cannot train on an empty document set"));
    }
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::invalid(format!("epsilon must lie in [0, 1), got {epsilon}")));
    }
    let mut tags: BTreeMap<&str, u64> = BTreeMap::new();
    for doc in docs {
        for e in &doc.emotions {
            *tags.entry(e.as_str()).or_insert(0) += 1;
        }
    }
    if tags.is_empty() {
        return Err(Error::invalid("training documents carry no emotion labels"));
    }
    let polarity = pol.restrict(tags.keys().copied())?;
    let total_tags: u64 = tags.values().sum();
    let emotions: Vec<String> = tags.keys().map(|e| e.to_string()).collect();
    let priors: Vec<f64> = tags.values().map(|&c| c as f64 / total_tags as f64).collect();
    let support: Vec<u64> = tags.values().copied().collect();

    let mut word_counts: BTreeMap<String, u64> = BTreeMap::new();
    for doc in docs {
        for (w, &c) in &doc.bow {
            *word_counts.entry(w.clone()).or_insert(0) += u64::from(c);
        }
    }

    let (features, mut profiles): (Features, Vec<Vec<f64>>) = match variant {
        Variant::Topic => {
            let part = partition
                .ok_or_else(|| Error::invalid("topic variant requires a topic partition"))?;
            let by_emotion = emotion_topic_profiles(docs, part)?;
            let profiles = emotions
                .iter()
                .map(|e| by_emotion[e].density.0.clone())
                .collect();
            (Features::Topics(part.clone()), profiles)
        }
        Variant::FullVocab => {
            let words: Vec<String> = word_counts.keys().cloned().collect();
            let features = Features::words(words);
            let mut counts = vec![vec![0u64; features.len()]; emotions.len()];
            let emotion_index: HashMap<&str, usize> = emotions
                .iter()
                .enumerate()
                .map(|(i, e)| (e.as_str(), i))
                .collect();
            for doc in docs {
                for e in &doc.emotions {
                    let row = &mut counts[emotion_index[e.as_str()]];
                    for (w, &c) in &doc.bow {
                        let f = features.feature_of(w).expect("word collected above");
                        row[f] += u64::from(c);
                    }
                }
            }
            let profiles = counts
                .into_iter()
                .map(|row| {
                    let total: u64 = row.iter().sum();
                    row.into_iter().map(|c| c as f64 / total as f64).collect()
                })
                .collect();
            (features, profiles)
        }
    };
    for profile in &mut profiles {
        smooth(profile, epsilon);
    }
    Ok(EmotionModel::assemble(
        variant, epsilon, emotions, priors, support, features, profiles, polarity, word_counts,
    ))
}

impl EmotionModel {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        variant: Variant,
        epsilon: f64,
        emotions: Vec<String>,
        priors: Vec<f64>,
        support: Vec<u64>,
        features: Features,
        profiles: Vec<Vec<f64>>,
        polarity: PolarityMap,
        word_counts: BTreeMap<String, u64>,
    ) -> Self {
        let log_profiles = profiles
            .iter()
            .map(|row| row.iter().map(|p| p.ln()).collect())
            .collect();
        EmotionModel {
            variant,
            epsilon,
            emotions,
            priors,
            support,
            features,
            profiles,
            log_profiles,
            polarity,
            word_counts,
            preprocess: PreprocessConfig::default(),
        }
    }

    /// Records the text normalisation the training corpus went through, so
    /// that prediction can apply the same rules.
    pub fn with_preprocess(mut self, cfg: PreprocessConfig) -> Self {
        self.preprocess = cfg;
        self
    }

    pub fn preprocess(&self) -> &PreprocessConfig {
        &self.preprocess
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Emotion universe in label order.
    pub fn emotions(&self) -> &[String] {
        &self.emotions
    }

    pub fn polarity(&self) -> &PolarityMap {
        &self.polarity
    }

    pub fn priors(&self) -> BTreeMap<String, f64> {
        self.emotions
            .iter()
            .cloned()
            .zip(self.priors.iter().copied())
            .collect()
    }

    pub fn prior(&self, emotion: &str) -> Option<f64> {
        let i = self.emotions.binary_search_by(|e| e.as_str().cmp(emotion)).ok()?;
        Some(self.priors[i])
    }

    pub fn partition(&self) -> Option<&TopicPartition> {
        match &self.features {
            Features::Topics(p) => Some(p),
            Features::Words { .. } => None,
        }
    }

    /// Number of model features: topics or vocabulary words.
    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    /// Training token counts per word.
    pub fn word_counts(&self) -> &BTreeMap<String, u64> {
        &self.word_counts
    }

    /// Emotion-topic profiles (topic variant only), in label order.
    pub fn topic_profiles(&self) -> Option<Vec<EmotionTopicProfile>> {
        self.partition()?;
        Some(
            self.emotions
                .iter()
                .zip(&self.profiles)
                .zip(&self.support)
                .map(|((e, p), &s)| EmotionTopicProfile {
                    emotion: e.clone(),
                    density: TopicDensity(p.clone()),
                    support: s as usize,
                })
                .collect(),
        )
    }

    /// Conditional probability of feature `f` (topic id or word index) given
    /// an emotion.
    pub fn feature_probability(&self, emotion: &str, f: usize) -> Option<f64> {
        let i = self.emotions.binary_search_by(|e| e.as_str().cmp(emotion)).ok()?;
        self.profiles[i].get(f).copied()
    }

    pub fn feature_of(&self, word: &str) -> Option<usize> {
        self.features.feature_of(word)
    }

    /// Aggregates a bag of words into per-feature counts. Words outside the
    /// model's domain are returned separately.
    pub fn modelled_counts<'a>(
        &self,
        bow: impl IntoIterator<Item = (&'a String, &'a u32)>,
    ) -> (BTreeMap<usize, u64>, Vec<String>) {
        let mut counts = BTreeMap::new();
        let mut dropped = Vec::new();
        for (w, &c) in bow {
            if c == 0 {
                continue;
            }
            match self.features.feature_of(w) {
                Some(f) => *counts.entry(f).or_insert(0) += u64::from(c),
                None => dropped.push(w.clone()),
            }
        }
        (counts, dropped)
    }

    /// Unnormalised log posterior per emotion (label order).
    pub fn log_numerators(&self, counts: &BTreeMap<usize, u64>) -> Vec<f64> {
        self.log_profiles
            .iter()
            .zip(&self.priors)
            .map(|(logs, prior)| {
                let mut s = 0.0;
                for (&f, &c) in counts {
                    s += c as f64 * logs[f];
                }
                s + prior.ln()
            })
            .collect()
    }

    /// Posterior from pre-aggregated feature counts.
    pub fn posterior_from_counts(&self, counts: &BTreeMap<usize, u64>) -> Result<RankedPrediction> {
        if counts.is_empty() {
            return Err(Error::NoModelledTokens);
        }
        let scores = self.log_numerators(counts);
        let norm = log_sum_exp(&scores)?;
        if !norm.is_finite() {
            return Err(Error::DegeneratePosterior);
        }
        let posterior = self
            .emotions
            .iter()
            .zip(scores)
            .map(|(e, s)| (e.clone(), (s - norm).exp()))
            .collect();
        Ok(RankedPrediction::from_posterior(posterior, &self.polarity))
    }

    /// The prior distribution as a prediction.
    pub fn prior_prediction(&self) -> RankedPrediction {
        RankedPrediction::from_posterior(self.priors(), &self.polarity)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        let profiles: BTreeMap<&str, ProfileOut<'_>> = self
            .emotions
            .iter()
            .zip(&self.profiles)
            .map(|(e, row)| {
                let out = match &self.features {
                    Features::Topics(_) => ProfileOut::Dense(row.iter().map(|&p| Exact(p)).collect()),
                    Features::Words { words, .. } => ProfileOut::Sparse(
                        words
                            .iter()
                            .zip(row)
                            .map(|(w, &p)| (w.as_str(), Exact(p)))
                            .collect(),
                    ),
                };
                (e.as_str(), out)
            })
            .collect();
        let file = ModelFileOut {
            format_version: FORMAT_VERSION,
            variant: self.variant,
            epsilon: Exact(self.epsilon),
            priors: self
                .emotions
                .iter()
                .zip(&self.priors)
                .map(|(e, &p)| (e.as_str(), Exact(p)))
                .collect(),
            support: self
                .emotions
                .iter()
                .zip(&self.support)
                .map(|(e, &s)| (e.as_str(), s))
                .collect(),
            profiles,
            partition: self.partition(),
            polarity: &self.polarity,
            word_counts: &self.word_counts,
            preprocess: &self.preprocess,
        };
        let mut text = serde_json::to_string_pretty(&file)
            .map_err(|e| Error::invalid(format!("cannot serialise model: {e}")))?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let probe: VersionProbe =
            serde_json::from_str(text).map_err(|e| Error::from_json(e, text))?;
        if probe.format_version != FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                found: probe.format_version,
                supported: FORMAT_VERSION,
            });
        }
        let file: ModelFileIn = serde_json::from_str(text).map_err(|e| Error::from_json(e, text))?;
        file.into_model()
    }
}

#[derive(Serialize)]
#[serde(untagged)]
enum ProfileOut<'a> {
    Dense(Vec<Exact>),
    Sparse(BTreeMap<&'a str, Exact>),
}

#[derive(Serialize)]
struct ModelFileOut<'a> {
    format_version: u32,
    variant: Variant,
    epsilon: Exact,
    priors: BTreeMap<&'a str, Exact>,
    support: BTreeMap<&'a str, u64>,
    profiles: BTreeMap<&'a str, ProfileOut<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    partition: Option<&'a TopicPartition>,
    polarity: &'a PolarityMap,
    word_counts: &'a BTreeMap<String, u64>,
    preprocess: &'a PreprocessConfig,
}

#[derive(Deserialize)]
struct VersionProbe {
    format_version: u32,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ProfileIn {
    Dense(Vec<f64>),
    Sparse(BTreeMap<String, f64>),
}

#[derive(Deserialize)]
struct ModelFileIn {
    variant: Variant,
    epsilon: f64,
    priors: BTreeMap<String, f64>,
    #[serde(default)]
    support: BTreeMap<String, u64>,
    profiles: BTreeMap<String, ProfileIn>,
    #[serde(default)]
    partition: Option<TopicPartition>,
    polarity: PolarityMap,
    #[serde(default)]
    word_counts: BTreeMap<String, u64>,
    #[serde(default)]
    preprocess: PreprocessConfig,
}

const SUM_TOLERANCE: f64 = 1e-9;

impl ModelFileIn {
    fn into_model(self) -> Result<EmotionModel> {
        let emotions: Vec<String> = self.priors.keys().cloned().collect();
        if emotions.is_empty() {
            return Err(Error::invalid("model has no emotions"));
        }
        let profile_keys: BTreeSet<&String> = self.profiles.keys().collect();
        if profile_keys != emotions.iter().collect() {
            return Err(Error::invalid("priors and profiles cover different emotions"));
        }
        let priors: Vec<f64> = self.priors.values().copied().collect();
        check_simplex("priors", &priors)?;
        let polarity = self.polarity.restrict(emotions.iter().map(String::as_str))?;
        let support = emotions
            .iter()
            .map(|e| self.support.get(e).copied().unwrap_or(0))
            .collect();

        let (features, profiles) = match (self.variant, self.partition) {
            (Variant::Topic, Some(part)) => {
                part.validate()?;
                let mut rows = Vec::with_capacity(emotions.len());
                for (e, p) in self.profiles {
                    let ProfileIn::Dense(row) = p else {
                        return Err(Error::invalid(format!("profile of {e:?} must be a list")));
                    };
                    if row.len() != part.n_topics() {
                        return Err(Error::DimensionMismatch(row.len(), part.n_topics()));
                    }
                    rows.push(row);
                }
                (Features::Topics(part), rows)
            }
            (Variant::Topic, None) => {
                return Err(Error::invalid("topic model file lacks a partition"));
            }
            (Variant::FullVocab, Some(_)) => {
                return Err(Error::invalid("full-vocabulary model file carries a partition"));
            }
            (Variant::FullVocab, None) => {
                let mut words: Option<Vec<String>> = None;
                let mut rows = Vec::with_capacity(emotions.len());
                for (e, p) in self.profiles {
                    let ProfileIn::Sparse(map) = p else {
                        return Err(Error::invalid(format!("profile of {e:?} must be an object")));
                    };
                    let keys: Vec<String> = map.keys().cloned().collect();
                    match &words {
                        None => words = Some(keys),
                        Some(w) if *w != keys => {
                            return Err(Error::invalid(format!(
                                "profile of {e:?} covers a different vocabulary"
                            )));
                        }
                        Some(_) => {}
                    }
                    rows.push(map.into_values().collect());
                }
                (Features::words(words.unwrap_or_default()), rows)
            }
        };
        for (e, row) in emotions.iter().zip(&profiles) {
            check_simplex(&format!("profile of {e:?}"), row)?;
        }
        Ok(EmotionModel::assemble(
            self.variant,
            self.epsilon,
            emotions,
            priors,
            support,
            features,
            profiles,
            polarity,
            self.word_counts,
        )
        .with_preprocess(self.preprocess))
    }
}

fn check_simplex(what: &str, values: &[f64]) -> Result<()> {
    if values.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
        return Err(Error::invalid(format!("{what} has entries outside [0, 1]")));
    }
    let total: f64 = values.iter().sum();
    if (total - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::invalid(format!("{what} sums to {total}, not 1")));
    }
    Ok(())
}

/// Emotion posterior of a bag of words. Words outside the model's domain are
/// ignored; if none remain the result is [`Error::NoModelledTokens`].
pub fn posterior(model: &EmotionModel, bow: &BTreeMap<String, u32>) -> Result<RankedPrediction> {
    let (counts, _) = model.modelled_counts(bow);
    model.posterior_from_counts(&counts)
}

/// Total posterior mass on positive emotions.
pub fn sentiment_posterior(pred: &RankedPrediction, pol: &PolarityMap) -> f64 {
    positive_mass(&pred.posterior, pol)
}

/// Hard sentiment call; ties go to positive.
pub fn classify_sentiment(pred: &RankedPrediction, pol: &PolarityMap) -> Polarity {
    if sentiment_posterior(pred, pol) >= 0.5 {
        Polarity::Positive
    } else {
        Polarity::Negative
    }
}

/// Sentiment implied by a document's own labels (majority, ties positive).
pub fn empirical_sentiment(doc: &Document, pol: &PolarityMap) -> Result<Polarity> {
    let mut pos = 0usize;
    let mut neg = 0usize;
    for e in &doc.emotions {
        match pol.require(e)? {
            Polarity::Positive => pos += 1,
            Polarity::Negative => neg += 1,
        }
    }
    Ok(if pos >= neg {
        Polarity::Positive
    } else {
        Polarity::Negative
    })
}

pub fn top_k(pred: &RankedPrediction, k: usize) -> Result<Vec<(String, f64)>> {
    if k == 0 || k > pred.ranking.len() {
        return Err(Error::invalid(format!(
            "k must lie in 1..={}, got {k}",
            pred.ranking.len()
        )));
    }
    Ok(pred.ranking[..k]
        .iter()
        .map(|e| (e.clone(), pred.probability(e)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> (Vec<Document>, TopicPartition, PolarityMap) {
        let doc = |id: &str, words: &[(&str, u32)], emotions: &[&str]| Document {
            id: id.into(),
            bow: words.iter().map(|&(w, c)| (w.to_string(), c)).collect(),
            emotions: emotions.iter().map(|e| e.to_string()).collect(),
        };
        let docs = vec![
            doc("d1", &[("v1", 2), ("v2", 1), ("v4", 1)], &["e1", "e2"]),
            doc("d2", &[("v1", 1), ("v2", 1)], &["e1"]),
            doc("d3", &[("v1", 1), ("v2", 1), ("v3", 1)], &["e3"]),
            doc("d4", &[("v3", 2), ("v4", 1)], &["e3"]),
        ];
        let part = TopicPartition::new(
            [("v1", 0), ("v2", 0), ("v3", 1), ("v4", 2)]
                .into_iter()
                .map(|(w, k)| (w.to_string(), k))
                .collect(),
            "toy",
        )
        .unwrap();
        let pol = [
            ("e1".to_string(), Polarity::Positive),
            ("e2".to_string(), Polarity::Negative),
            ("e3".to_string(), Polarity::Negative),
        ]
        .into_iter()
        .collect();
        (docs, part, pol)
    }

    fn w1() -> BTreeMap<String, u32> {
        [("v1", 2), ("v2", 1), ("v4", 1)]
            .into_iter()
            .map(|(w, c)| (w.to_string(), c))
            .collect()
    }

    #[test]
    fn log_sum_exp_cases() {
        assert_eq!(log_sum_exp(&[0.0]).unwrap(), 0.0);
        let l2 = 2f64.ln();
        assert!((log_sum_exp(&[l2, l2]).unwrap() - 4f64.ln()).abs() < 1e-15);
        let v = log_sum_exp(&[-2000.0, -2000.0]).unwrap();
        assert!(((-2000f64).exp() + (-2000f64).exp()).ln().is_infinite());
        assert!((v - (-2000.0 + l2)).abs() < 1e-12);
        assert!(log_sum_exp(&[]).is_err());
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY]).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn toy_priors_and_profiles() {
        let (docs, part, pol) = toy();
        let m = train(&docs, Some(&part), &pol, 0.0, Variant::Topic).unwrap();
        assert_eq!(m.priors().values().copied().collect::<Vec<_>>(), [0.4, 0.2, 0.4]);
        assert_eq!(m.profiles[0], [7.0 / 8.0, 0.0, 1.0 / 8.0]);
        assert_eq!(m.profiles[1], [0.75, 0.0, 0.25]);
        let m = train(&docs, Some(&part), &pol, DEFAULT_EPSILON, Variant::Topic).unwrap();
        let p = &m.profiles[1];
        assert!(p[1] > 0.0 && p[1] < 1e-9);
        assert!((p[0] - 0.75).abs() < 1e-9 && (p[2] - 0.25).abs() < 1e-9);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn toy_posterior() {
        let (docs, part, pol) = toy();
        let m = train(&docs, Some(&part), &pol, 0.0, Variant::Topic).unwrap();
        let pred = posterior(&m, &w1()).unwrap();
        let exact = [3969.0 / 6761.0, 17496.0 / 47327.0, 2048.0 / 47327.0];
        for (e, x) in ["e1", "e2", "e3"].iter().zip(exact) {
            assert!((pred.probability(e) - x).abs() < 1e-12);
        }
        assert_eq!(pred.ranking, ["e1", "e2", "e3"]);
        assert!((pred.positive_posterior - exact[0]).abs() < 1e-12);
        assert_eq!(classify_sentiment(&pred, &pol), Polarity::Positive);
        let top = top_k(&pred, 1).unwrap();
        assert_eq!(top[0].0, "e1");
        assert!(top_k(&pred, 0).is_err() && top_k(&pred, 4).is_err());
        assert_eq!(top_k(&pred, 3).unwrap().len(), 3);
    }

    #[test]
    fn posterior_errors() {
        let (docs, part, pol) = toy();
        let m = train(&docs, Some(&part), &pol, 0.0, Variant::Topic).unwrap();
        let oov: BTreeMap<String, u32> = [("zzz".to_string(), 3)].into();
        assert!(matches!(posterior(&m, &oov), Err(Error::NoModelledTokens)));
        assert!(matches!(posterior(&m, &BTreeMap::new()), Err(Error::NoModelledTokens)));
        let unused = TopicPartition::new(
            part.assignment()
                .iter()
                .map(|(w, &k)| (w.clone(), k))
                .chain([("v5".to_string(), 3)])
                .collect(),
            "toy+",
        )
        .unwrap();
        let m = train(&docs, Some(&unused), &pol, 0.0, Variant::Topic).unwrap();
        let v5: BTreeMap<String, u32> = [("v5".to_string(), 1)].into();
        assert!(matches!(posterior(&m, &v5), Err(Error::DegeneratePosterior)));
        let m = train(&docs, Some(&unused), &pol, DEFAULT_EPSILON, Variant::Topic).unwrap();
        assert!(posterior(&m, &v5).is_ok());
    }

    #[test]
    fn train_errors() {
        let (docs, part, pol) = toy();
        assert!(train(&[], Some(&part), &pol, 0.0, Variant::Topic).is_err());
        assert!(train(&docs, None, &pol, 0.0, Variant::Topic).is_err());
        let mut partial = PolarityMap::new();
        partial.insert("e1", Polarity::Positive);
        assert!(matches!(
            train(&docs, Some(&part), &partial, 0.0, Variant::Topic),
            Err(Error::MissingPolarity(_))
        ));
    }

    #[test]
    fn single_document_model() {
        let (docs, part, pol) = toy();
        let m = train(&docs[1..2], Some(&part), &pol, 0.0, Variant::Topic).unwrap();
        assert_eq!(m.priors()["e1"], 1.0);
        let pred = posterior(&m, &[("v2".to_string(), 4)].into()).unwrap();
        assert_eq!(pred.probability("e1"), 1.0);
        // v4 lies in a topic e1 never used, and with no smoothing nothing
        // else can explain it
        assert!(matches!(posterior(&m, &w1()), Err(Error::DegeneratePosterior)));
    }

    #[test]
    fn uniform_priors_identical_profiles() {
        let part = TopicPartition::new([("a".to_string(), 0), ("b".to_string(), 1)].into(), "p").unwrap();
        let docs: Vec<Document> = ["x", "y", "z"]
            .iter()
            .map(|e| Document {
                id: e.to_string(),
                bow: [("a".to_string(), 1), ("b".to_string(), 1)].into(),
                emotions: [e.to_string()].into(),
            })
            .collect();
        let pol: PolarityMap = ["x", "y", "z"]
            .iter()
            .map(|e| (e.to_string(), Polarity::Positive))
            .collect();
        let m = train(&docs, Some(&part), &pol, 0.0, Variant::Topic).unwrap();
        let pred = posterior(&m, &[("a".to_string(), 3)].into()).unwrap();
        for e in ["x", "y", "z"] {
            assert!((pred.probability(e) - 1.0 / 3.0).abs() < 1e-15);
        }
        assert_eq!(pred.ranking, ["x", "y", "z"]);
        assert!((sentiment_posterior(&pred, &pol) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sentiment_rules() {
        let pol: PolarityMap = [
            ("p".to_string(), Polarity::Positive),
            ("n".to_string(), Polarity::Negative),
            ("n2".to_string(), Polarity::Negative),
        ]
        .into_iter()
        .collect();
        let pred = |pp: f64| {
            RankedPrediction::from_posterior(
                [("p".to_string(), pp), ("n".to_string(), 1.0 - pp)].into(),
                &pol,
            )
        };
        assert_eq!(sentiment_posterior(&pred(0.6), &pol), 0.6);
        assert_eq!(classify_sentiment(&pred(0.5), &pol), Polarity::Positive);
        assert_eq!(classify_sentiment(&pred(0.49), &pol), Polarity::Negative);
        assert_eq!(classify_sentiment(&pred(0.995), &pol), Polarity::Positive);

        let doc = |tags: &[&str]| Document {
            id: String::new(),
            bow: BTreeMap::new(),
            emotions: tags.iter().map(|t| t.to_string()).collect(),
        };
        assert_eq!(empirical_sentiment(&doc(&["p"]), &pol).unwrap(), Polarity::Positive);
        assert_eq!(empirical_sentiment(&doc(&["n", "n2", "p"]), &pol).unwrap(), Polarity::Negative);
        assert_eq!(empirical_sentiment(&doc(&["p", "n"]), &pol).unwrap(), Polarity::Positive);
    }

    #[test]
    fn ranking_ties_are_lexicographic() {
        let pred = RankedPrediction::from_posterior(
            [("b".to_string(), 0.5), ("a".to_string(), 0.5)].into(),
            &PolarityMap::new(),
        );
        assert_eq!(pred.ranking, ["a", "b"]);
    }

    #[test]
    fn model_file_round_trip() {
        let (docs, part, pol) = toy();
        for variant in [Variant::Topic, Variant::FullVocab] {
            let m = train(&docs, Some(&part), &pol, DEFAULT_EPSILON, variant).unwrap();
            let back = EmotionModel::from_json(&m.to_json().unwrap()).unwrap();
            assert_eq!(back, m);
            assert_eq!(posterior(&back, &w1()).unwrap(), posterior(&m, &w1()).unwrap());
        }
    }

    #[test]
    fn model_file_errors() {
        let (docs, part, pol) = toy();
        let text = train(&docs, Some(&part), &pol, 0.0, Variant::Topic)
            .unwrap()
            .to_json()
            .unwrap();
        let cut = &text[..text.len() / 2];
        match EmotionModel::from_json(cut) {
            Err(Error::Parse { offset, .. }) => assert!(offset <= cut.len()),
            other => panic!("expected parse error, got {other:?}"),
        }
        let future = text.replacen("\"format_version\": 1", "\"format_version\": 7", 1);
        let err = EmotionModel::from_json(&future).unwrap_err();
        assert!(matches!(err, Error::VersionMismatch { found: 7, supported: 1 }));
        assert!(err.to_string().contains('7') && err.to_string().contains('1'));
    }

    #[test]
    fn probabilities_use_17_digits() {
        let (docs, part, pol) = toy();
        let text = train(&docs, Some(&part), &pol, 0.0, Variant::Topic)
            .unwrap()
            .to_json()
            .unwrap();
        assert!(text.contains("\"e1\": 4.0000000000000002e-1"), "{text}");
    }
}
