//! Graded relevance between emotions and the Q-measure / nDCG rank metrics
//! built on it.
//!
//! The relevance of a predicted emotion to a true one falls linearly from 1
//! (same emotion) to 0 (the emotion farthest from the true one in topic
//! space), and is 0 outright when the two have different polarity. The gain
//! at a rank is the best relevance of that rank's emotion against any of the
//! query's labels.
//!
//! Q-measure here is normalised by the cutoff `k` rather than by the number
//! of relevant items:
//!
//! ```text
//! Q(k)  = 1/k * Σ_{r<=k} [g(r) > 0] * Br(r)
//! Br(r) = (cg(r) + #{i <= r : g(i) > 0}) / (cg_ideal(r) + r)
//! ```
//!
//! The ideal ranking orders the whole emotion universe of the context by
//! non-increasing gain.

use std::collections::{BTreeMap, BTreeSet};

use crate::corpus::PolarityMap;
use crate::error::{Error, Result};
use crate::topics::{density_distance, EmotionTopicProfile};

#[derive(Debug, Clone, PartialEq)]
pub struct RelevanceContext {
    labels: Vec<String>,
    index: BTreeMap<String, usize>,
    positive: Vec<bool>,
    distances: Vec<Vec<f64>>,
    max_dist: Vec<f64>,
}

impl RelevanceContext {
    /// Builds the context from emotion-topic profiles (usually those of a
    /// training fold). Every profiled emotion needs a polarity.
    pub fn new<'a>(
        profiles: impl IntoIterator<Item = &'a EmotionTopicProfile>,
        pol: &PolarityMap,
    ) -> Result<Self> {
        let mut sorted: Vec<&EmotionTopicProfile> = profiles.into_iter().collect();
        sorted.sort_by(|a, b| a.emotion.cmp(&b.emotion));
        sorted.dedup_by(|a, b| a.emotion == b.emotion);
        let n = sorted.len();
        let mut distances = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = density_distance(sorted[i].density.as_slice(), sorted[j].density.as_slice())?;
                distances[i][j] = d;
                distances[j][i] = d;
            }
        }
        let max_dist = distances
            .iter()
            .map(|row| row.iter().copied().fold(0.0, f64::max))
            .collect();
        let positive = sorted
            .iter()
            .map(|p| pol.require(&p.emotion).map(|_| pol.is_positive(&p.emotion)))
            .collect::<Result<_>>()?;
        Ok(RelevanceContext {
            labels: sorted.iter().map(|p| p.emotion.clone()).collect(),
            index: sorted
                .iter()
                .enumerate()
                .map(|(i, p)| (p.emotion.clone(), i))
                .collect(),
            positive,
            distances,
            max_dist,
        })
    }

    pub fn emotions(&self) -> &[String] {
        &self.labels
    }

    pub fn contains(&self, emotion: &str) -> bool {
        self.index.contains_key(emotion)
    }

    fn idx(&self, emotion: &str) -> Result<usize> {
        self.index
            .get(emotion)
            .copied()
            .ok_or_else(|| Error::UnknownEmotion(emotion.to_string()))
    }

    pub fn distance(&self, a: &str, b: &str) -> Result<f64> {
        Ok(self.distances[self.idx(a)?][self.idx(b)?])
    }

    /// Largest distance from `emotion` to any emotion of the context.
    pub fn max_dist(&self, emotion: &str) -> Result<f64> {
        Ok(self.max_dist[self.idx(emotion)?])
    }
}

/// Relevance of predicted emotion `predicted` for true emotion `truth`.
pub fn relevance(predicted: &str, truth: &str, ctx: &RelevanceContext) -> Result<f64> {
    let p = ctx.idx(predicted)?;
    let t = ctx.idx(truth)?;
    if ctx.positive[p] != ctx.positive[t] {
        return Ok(0.0);
    }
    let max = ctx.max_dist[t];
    if max == 0.0 {
        return Ok(if p == t { 1.0 } else { 0.0 });
    }
    Ok(((max - ctx.distances[p][t]) / max).clamp(0.0, 1.0))
}

fn label_gain(emotion: &str, labels: &BTreeSet<String>, ctx: &RelevanceContext) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::invalid("gain needs at least one label"));
    }
    let mut best = 0.0f64;
    for l in labels {
        best = best.max(relevance(emotion, l, ctx)?);
    }
    Ok(best)
}

/// Gain of the emotion at 1-based rank `r`.
pub fn gain(
    ranking: &[String],
    r: usize,
    labels: &BTreeSet<String>,
    ctx: &RelevanceContext,
) -> Result<f64> {
    if r == 0 || r > ranking.len() {
        return Err(Error::invalid(format!("rank {r} outside 1..={}", ranking.len())));
    }
    label_gain(&ranking[r - 1], labels, ctx)
}

/// Gains of every rank of `ranking`.
pub fn gains(ranking: &[String], labels: &BTreeSet<String>, ctx: &RelevanceContext) -> Result<Vec<f64>> {
    ranking.iter().map(|e| label_gain(e, labels, ctx)).collect()
}

/// Gains of the ideal ranking: every context emotion, by non-increasing gain.
pub fn ideal_gains(labels: &BTreeSet<String>, ctx: &RelevanceContext) -> Result<Vec<f64>> {
    let mut g = gains(ctx.emotions(), labels, ctx)?;
    g.sort_by(|a, b| b.total_cmp(a));
    Ok(g)
}

/// Q-measure at cutoff `k` from per-rank gains and ideal gains.
pub fn q_measure_from_gains(gains: &[f64], ideal: &[f64], k: usize) -> f64 {
    let k = k.min(gains.len());
    if k == 0 {
        return 0.0;
    }
    let mut cg = 0.0;
    let mut cg_ideal = 0.0;
    let mut hits = 0usize;
    let mut total = 0.0;
    for r in 0..k {
        let g = gains[r];
        cg += g;
        cg_ideal += ideal.get(r).copied().unwrap_or(0.0);
        if g > 0.0 {
            hits += 1;
            total += (cg + hits as f64) / (cg_ideal + (r + 1) as f64);
        }
    }
    total / k as f64
}

fn dcg(gains: &[f64], r: usize) -> f64 {
    gains
        .iter()
        .take(r)
        .enumerate()
        .map(|(i, g)| (g.exp2() - 1.0) / ((i + 2) as f64).log2())
        .sum()
}

/// nDCG at rank `r`; 0 when the ideal DCG is 0.
pub fn ndcg_from_gains(gains: &[f64], ideal: &[f64], r: usize) -> f64 {
    let idcg = dcg(ideal, r);
    if idcg <= 0.0 {
        return 0.0;
    }
    (dcg(gains, r) / idcg).min(1.0)
}

pub fn q_measure(
    ranking: &[String],
    labels: &BTreeSet<String>,
    k: usize,
    ctx: &RelevanceContext,
) -> Result<f64> {
    check_cutoff(k, ranking.len())?;
    let g = gains(&ranking[..k], labels, ctx)?;
    Ok(q_measure_from_gains(&g, &ideal_gains(labels, ctx)?, k))
}

pub fn ndcg(
    ranking: &[String],
    labels: &BTreeSet<String>,
    r: usize,
    ctx: &RelevanceContext,
) -> Result<f64> {
    check_cutoff(r, ranking.len())?;
    let g = gains(&ranking[..r], labels, ctx)?;
    Ok(ndcg_from_gains(&g, &ideal_gains(labels, ctx)?, r))
}

fn check_cutoff(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!("cutoff {k} outside 1..={n}")));
    }
    Ok(())
}
