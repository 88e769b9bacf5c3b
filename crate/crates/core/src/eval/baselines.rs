//! Reference predictors: class-frequency and uniform-random emotion rankers,
//! and the average-score sentiment lexicon classifier.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{tokenize, Document, Polarity, PolarityMap};
use crate::error::{Error, Result};
use crate::model::RankedPrediction;

/// Tag-frequency distribution of the training documents, returned for every
/// query.
pub fn mle_baseline(train: &[Document], pol: &PolarityMap) -> Result<RankedPrediction> {
    let mut tags: BTreeMap<String, u64> = BTreeMap::new();
    for doc in train {
        for e in &doc.emotions {
            *tags.entry(e.clone()).or_insert(0) += 1;
        }
    }
    let total: u64 = tags.values().sum();
    if total == 0 {
        return Err(Error::invalid("baseline needs at least one labelled document"));
    }
    let posterior = tags
        .into_iter()
        .map(|(e, c)| (e, c as f64 / total as f64))
        .collect();
    Ok(RankedPrediction::from_posterior(posterior, pol))
}

/// Uniform posterior with a random ranking. The permutation depends only on
/// `seed` and `query`, so reruns reproduce it.
pub fn uniform_baseline(
    universe: &[String],
    seed: u64,
    query: u64,
    pol: &PolarityMap,
) -> Result<RankedPrediction> {
    if universe.is_empty() {
        return Err(Error::invalid("uniform baseline needs a non-empty emotion universe"));
    }
    let p = 1.0 / universe.len() as f64;
    let posterior = universe.iter().map(|e| (e.clone(), p)).collect();
    let mut ranking = universe.to_vec();
    ranking.sort();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(query);
    ranking.shuffle(&mut rng);
    Ok(RankedPrediction::with_ranking(posterior, ranking, pol))
}

/// Word sentiment scores.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Lexicon {
    pub name: String,
    scores: HashMap<String, f64>,
}

impl Lexicon {
    pub fn new(name: impl Into<String>, scores: HashMap<String, f64>) -> Self {
        Lexicon {
            name: name.into(),
            scores,
        }
    }

    pub fn score(&self, word: &str) -> Option<f64> {
        self.scores.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Parses `word<TAB>score` lines (`#` comments allowed). When two
    /// entries normalise to the same token the first wins.
    pub fn parse_tsv(name: impl Into<String>, text: &str) -> Result<Self> {
        let mut scores = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let malformed = |message: String| Error::Malformed {
                line: idx + 1,
                message,
            };
            let (word, score) = line
                .split_once('\t')
                .ok_or_else(|| malformed("expected word<TAB>score".into()))?;
            let score: f64 = score
                .trim()
                .parse()
                .map_err(|_| malformed(format!("bad score {:?}", score.trim())))?;
            if !score.is_finite() {
                return Err(malformed("score must be finite".into()));
            }
            // Entries are normalised like document text; emoticons and
            // multi-word phrases cannot match a token and are skipped.
            if let [token] = tokenize(word, true).as_slice() {
                scores.entry(token.clone()).or_insert(score);
            }
        }
        if scores.is_empty() {
            return Err(Error::invalid("lexicon is empty"));
        }
        Ok(Lexicon::new(name, scores))
    }

    pub fn load(name: impl Into<String>, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_tsv(name, &text)
    }
}

/// Mean lexicon score of the tokens found in the lexicon; non-negative means
/// positive, as does a document with no lexicon hits.
pub fn lexicon_classify<S: AsRef<str>>(tokens: &[S], lexicon: &Lexicon) -> Polarity {
    let mut sum = 0.0;
    let mut hits = 0usize;
    for t in tokens {
        if let Some(s) = lexicon.score(t.as_ref()) {
            sum += s;
            hits += 1;
        }
    }
    if hits == 0 || sum / hits as f64 >= 0.0 {
        Polarity::Positive
    } else {
        Polarity::Negative
    }
}
