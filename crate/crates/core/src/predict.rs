//! Single-document prediction shared by the command line and the HTTP API.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{bag_of_words, preprocess, Polarity, PreprocessConfig};
use crate::error::{Error, Result};
use crate::model::{classify_sentiment, EmotionModel, Variant};
use crate::topics::TopicId;

pub const RESPONSE_SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_TOP_K: usize = 3;
pub const MAX_TOP_K: usize = 50;
pub const MAX_TEXT_BYTES: usize = 64 * 1024;
pub const TOP_WORDS: usize = 10;

fn default_top_k() -> usize {
    DEFAULT_TOP_K
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictRequest {
    pub text: String,
    #[serde(default = "default_top_k")]
    pub top_k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmotionScore {
    pub label: String,
    pub prior: f64,
    pub posterior: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicAttribution {
    pub topic: TopicId,
    pub top_words: Vec<String>,
    /// Share of the document's modelled tokens in this topic.
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictResponse {
    pub schema_version: u32,
    pub variant: Variant,
    pub positive_posterior: f64,
    pub sentiment: Polarity,
    /// Top emotions by descending posterior.
    pub emotions: Vec<EmotionScore>,
    pub topic_attribution: Vec<TopicAttribution>,
    pub modelled_tokens: u64,
    pub ignored_tokens: u64,
    pub warnings: Vec<String>,
}

/// Request limits enforced by [`Predictor::predict`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_text_bytes: usize,
    pub max_top_k: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_text_bytes: MAX_TEXT_BYTES,
            max_top_k: MAX_TOP_K,
        }
    }
}

/// A loaded model plus the preprocessing applied to incoming text.
#[derive(Debug, Clone)]
pub struct Predictor {
    model: EmotionModel,
    preprocess: PreprocessConfig,
    topic_words: Vec<Vec<String>>,
    limits: Limits,
}

impl Predictor {
    /// Predictor applying the text rules stored with the model.
    pub fn new(model: EmotionModel) -> Self {
        let cfg = model.preprocess().clone();
        Self::with_preprocess(model, cfg)
    }

    pub fn with_preprocess(model: EmotionModel, preprocess: PreprocessConfig) -> Self {
        let topic_words = model
            .partition()
            .map(|part| {
                part.topic_words()
                    .into_iter()
                    .map(|words| top_words(&model, words, TOP_WORDS))
                    .collect()
            })
            .unwrap_or_default();
        Predictor {
            model,
            preprocess,
            topic_words,
            limits: Limits::default(),
        }
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    pub fn model(&self) -> &EmotionModel {
        &self.model
    }

    /// The most frequent training words of each topic (ties by word).
    pub fn topic_words(&self) -> &[Vec<String>] {
        &self.topic_words
    }

    pub fn predict(&self, req: &PredictRequest) -> Result<PredictResponse> {
        let Limits {
            max_text_bytes,
            max_top_k,
        } = self.limits;
        if req.text.len() > max_text_bytes {
            return Err(Error::TextTooLarge {
                size: req.text.len(),
                limit: max_text_bytes,
            });
        }
        if req.top_k == 0 || req.top_k > max_top_k {
            return Err(Error::invalid(format!(
                "top_k must lie in 1..={max_top_k}, got {}",
                req.top_k
            )));
        }
        let tokens = preprocess(&req.text, &self.preprocess);
        if tokens.is_empty() {
            return Err(Error::NoTokens);
        }
        let bow = bag_of_words(&tokens);
        let (counts, dropped) = self.model.modelled_counts(&bow);
        let pred = self.model.posterior_from_counts(&counts)?;

        let modelled: u64 = counts.values().sum();
        let ignored = tokens.len() as u64 - modelled;
        let mut warnings = Vec::new();
        if !dropped.is_empty() {
            warnings.push(format!(
                "{ignored} token(s) of {} distinct word(s) outside the model vocabulary were ignored",
                dropped.len()
            ));
        }
        if req.top_k > pred.ranking.len() {
            warnings.push(format!(
                "top_k {} exceeds the {} known emotions",
                req.top_k,
                pred.ranking.len()
            ));
        }

        let priors = self.model.priors();
        let emotions = pred
            .ranking
            .iter()
            .take(req.top_k)
            .map(|e| EmotionScore {
                label: e.clone(),
                prior: priors[e],
                posterior: pred.probability(e),
            })
            .collect();

        let topic_attribution = if self.model.variant() == Variant::Topic {
            let mut by_topic: Vec<(TopicId, u64)> = counts.iter().map(|(&k, &c)| (k, c)).collect();
            by_topic.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
            by_topic
                .into_iter()
                .map(|(k, c)| TopicAttribution {
                    topic: k,
                    top_words: self.topic_words.get(k).cloned().unwrap_or_default(),
                    density: c as f64 / modelled as f64,
                })
                .collect()
        } else {
            Vec::new()
        };

        Ok(PredictResponse {
            schema_version: RESPONSE_SCHEMA_VERSION,
            variant: self.model.variant(),
            positive_posterior: pred.positive_posterior,
            sentiment: classify_sentiment(&pred, self.model.polarity()),
            emotions,
            topic_attribution,
            modelled_tokens: modelled,
            ignored_tokens: ignored,
            warnings,
        })
    }
}

/// Up to `n` of `words` ordered by training frequency, ties by word.
pub fn top_words(model: &EmotionModel, words: Vec<&str>, n: usize) -> Vec<String> {
    let counts: &BTreeMap<String, u64> = model.word_counts();
    let mut ranked: Vec<(&str, u64)> = words
        .into_iter()
        .map(|w| (w, counts.get(w).copied().unwrap_or(0)))
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    ranked.into_iter().take(n).map(|(w, _)| w.to_string()).collect()
}
