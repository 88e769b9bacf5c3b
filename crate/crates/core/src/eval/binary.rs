use serde::{Deserialize, Serialize};

use crate::corpus::Polarity;
use crate::error::{Error, Result};

/// Binary sentiment classification scores. Precision, recall and F1 are
/// unweighted means over the positive and negative classes.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BinaryMetrics {
    pub accuracy: f64,
    pub balanced_accuracy: f64,
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
}

impl BinaryMetrics {
    /// Field-wise mean.
    pub fn mean<'a>(items: impl IntoIterator<Item = &'a BinaryMetrics>) -> BinaryMetrics {
        let mut acc = BinaryMetrics::default();
        let mut n = 0usize;
        for m in items {
            acc.accuracy += m.accuracy;
            acc.balanced_accuracy += m.balanced_accuracy;
            acc.f1 += m.f1;
            acc.precision += m.precision;
            acc.recall += m.recall;
            n += 1;
        }
        if n > 0 {
            let n = n as f64;
            acc.accuracy /= n;
            acc.balanced_accuracy /= n;
            acc.f1 /= n;
            acc.precision /= n;
            acc.recall /= n;
        }
        acc
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn binary_metrics(preds: &[Polarity], truths: &[Polarity]) -> Result<BinaryMetrics> {
    if preds.len() != truths.len() {
        return Err(Error::invalid(format!(
            "{} predictions for {} truths",
            preds.len(),
            truths.len()
        )));
    }
    if preds.is_empty() {
        return Err(Error::invalid("binary metrics need at least one prediction"));
    }
    let mut precision = 0.0;
    let mut recall = 0.0;
    let mut f1 = 0.0;
    for class in [Polarity::Positive, Polarity::Negative] {
        let tp = preds.iter().zip(truths).filter(|(p, t)| **p == class && **t == class).count();
        let predicted = preds.iter().filter(|p| **p == class).count();
        let actual = truths.iter().filter(|t| **t == class).count();
        let p = ratio(tp, predicted);
        let r = ratio(tp, actual);
        precision += p;
        recall += r;
        f1 += if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
    }
    let correct = preds.iter().zip(truths).filter(|(p, t)| p == t).count();
    Ok(BinaryMetrics {
        accuracy: ratio(correct, preds.len()),
        balanced_accuracy: recall / 2.0,
        f1: f1 / 2.0,
        precision: precision / 2.0,
        recall: recall / 2.0,
    })
}
