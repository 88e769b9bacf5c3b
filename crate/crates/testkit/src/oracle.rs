//! Straightforward reference implementations used as test oracles.

use std::collections::{BTreeMap, BTreeSet};

use emorec_core::corpus::Polarity;
use emorec_core::{Document, EmotionModel};

fn normalise(scores: BTreeMap<String, f64>) -> BTreeMap<String, f64> {
    let total: f64 = scores.values().sum();
    scores.into_iter().map(|(e, s)| (e, s / total)).collect()
}

/// Posterior of a topic-variant model computed as a plain product of
/// probabilities, one factor per token, with no logarithms. Underflows on
/// long documents by design.
pub fn linear_topic_posterior(model: &EmotionModel, bow: &BTreeMap<String, u32>) -> BTreeMap<String, f64> {
    let part = model.partition().expect("topic model");
    let mut scores = BTreeMap::new();
    for e in model.emotions() {
        let mut p = model.prior(e).expect("known emotion");
        for (w, &c) in bow {
            if let Some(k) = part.topic_of(w) {
                for _ in 0..c {
                    p *= model.feature_probability(e, k).expect("known topic");
                }
            }
        }
        scores.insert(e.clone(), p);
    }
    normalise(scores)
}

/// Full-vocabulary naive Bayes written directly from the definition:
/// p(w|e) is the share of w among all tokens of documents tagged e, zero
/// cells are raised to `epsilon` and the row renormalised, and the posterior
/// is prior times the product over query tokens from the training
/// vocabulary. Returns `None` if no query token is in that vocabulary.
pub fn full_vocab_posterior(
    docs: &[Document],
    bow: &BTreeMap<String, u32>,
    epsilon: f64,
) -> Option<BTreeMap<String, f64>> {
    let vocab: BTreeSet<&str> = docs.iter().flat_map(|d| d.bow.keys().map(String::as_str)).collect();
    if !bow.keys().any(|w| vocab.contains(w.as_str())) {
        return None;
    }
    let emotions: BTreeSet<&str> = docs.iter().flat_map(|d| d.emotions.iter().map(String::as_str)).collect();
    let total_tags: usize = docs.iter().map(|d| d.emotions.len()).sum();
    let mut scores = BTreeMap::new();
    for e in emotions {
        let tagged: Vec<&Document> = docs.iter().filter(|d| d.emotions.contains(e)).collect();
        let prior = tagged.len() as f64 / total_tags as f64;
        let mut row: BTreeMap<&str, f64> = vocab.iter().map(|&w| (w, 0.0)).collect();
        let mut tokens = 0.0;
        for d in &tagged {
            for (w, &c) in &d.bow {
                *row.get_mut(w.as_str()).unwrap() += c as f64;
                tokens += c as f64;
            }
        }
        for v in row.values_mut() {
            *v /= tokens;
        }
        if epsilon > 0.0 && row.values().any(|&v| v == 0.0) {
            for v in row.values_mut() {
                if *v == 0.0 {
                    *v = epsilon;
                }
            }
            let s: f64 = row.values().sum();
            for v in row.values_mut() {
                *v /= s;
            }
        }
        let mut p = prior;
        for (w, &c) in bow {
            if let Some(&pw) = row.get(w.as_str()) {
                for _ in 0..c {
                    p *= pw;
                }
            }
        }
        scores.insert(e.to_string(), p);
    }
    Some(normalise(scores))
}

/// Q(k) from rank gains and ideal gains, written as a direct double loop.
pub fn q_measure(gains: &[f64], ideal: &[f64], k: usize) -> f64 {
    let mut total = 0.0;
    for r in 1..=k {
        if gains[r - 1] <= 0.0 {
            continue;
        }
        let cg: f64 = gains[..r].iter().sum();
        let hits = gains[..r].iter().filter(|&&g| g > 0.0).count() as f64;
        let cg_ideal: f64 = ideal[..r.min(ideal.len())].iter().sum();
        total += (cg + hits) / (cg_ideal + r as f64);
    }
    total / k as f64
}

pub fn ndcg(gains: &[f64], ideal: &[f64], r: usize) -> f64 {
    let dcg = |g: &[f64]| -> f64 {
        g.iter()
            .take(r)
            .enumerate()
            .map(|(i, &x)| (2f64.powf(x) - 1.0) / ((i + 2) as f64).log2())
            .sum()
    };
    let ideal_dcg = dcg(ideal);
    if ideal_dcg == 0.0 {
        0.0
    } else {
        dcg(gains) / ideal_dcg
    }
}

/// Accuracy, balanced accuracy, macro F1, macro precision and macro recall
/// from an explicit 2x2 confusion matrix.
pub fn binary_reference(preds: &[Polarity], truths: &[Polarity]) -> [f64; 5] {
    let mut m = [[0f64; 2]; 2];
    let idx = |p: Polarity| usize::from(p == Polarity::Negative);
    for (&p, &t) in preds.iter().zip(truths) {
        m[idx(t)][idx(p)] += 1.0;
    }
    let div = |a: f64, b: f64| if b == 0.0 { 0.0 } else { a / b };
    let mut precision = [0.0; 2];
    let mut recall = [0.0; 2];
    let mut f1 = [0.0; 2];
    for c in 0..2 {
        let tp = m[c][c];
        let fp = m[1 - c][c];
        let fn_ = m[c][1 - c];
        precision[c] = div(tp, tp + fp);
        recall[c] = div(tp, tp + fn_);
        f1[c] = div(2.0 * tp, 2.0 * tp + fp + fn_);
    }
    let accuracy = (m[0][0] + m[1][1]) / preds.len() as f64;
    let mean = |x: [f64; 2]| (x[0] + x[1]) / 2.0;
    [accuracy, mean(recall), mean(f1), mean(precision), mean(recall)]
}
