//! Exact-match rank metrics: a ranked emotion counts only if it is one of the
//! query's labels.

use std::collections::BTreeSet;

/// One evaluated document: the emitted emotion ranking and its true labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub ranking: Vec<String>,
    pub labels: BTreeSet<String>,
}

pub const RECALL_GRID_POINTS: usize = 101;

/// Recall levels `0.00, 0.01, ..., 1.00`.
pub fn recall_grid() -> Vec<f64> {
    (0..RECALL_GRID_POINTS)
        .map(|i| i as f64 / (RECALL_GRID_POINTS - 1) as f64)
        .collect()
}

/// Interpolated precision of one query on the recall grid: at each level,
/// the best precision reached at any recall at or above it (0 if that recall
/// is never reached).
pub fn query_interpolated_precision(q: &Query) -> Vec<f64> {
    let grid = recall_grid();
    if q.labels.is_empty() {
        return vec![0.0; grid.len()];
    }
    let n_labels = q.labels.len() as f64;
    let mut points = Vec::with_capacity(q.ranking.len());
    let mut hits = 0usize;
    for (i, e) in q.ranking.iter().enumerate() {
        if q.labels.contains(e) {
            hits += 1;
        }
        points.push((hits as f64 / n_labels, hits as f64 / (i + 1) as f64));
    }
    // suffix maxima of precision, scanning from the deepest rank upwards
    let mut best_from = vec![0.0f64; points.len() + 1];
    for i in (0..points.len()).rev() {
        best_from[i] = best_from[i + 1].max(points[i].1);
    }
    grid.iter()
        .map(|&r| {
            // recall is non-decreasing with rank: find the first point reaching r
            let first = points.partition_point(|&(rec, _)| rec < r - 1e-12);
            best_from[first]
        })
        .collect()
}

/// Macro average of [`query_interpolated_precision`] over a run.
pub fn interpolated_precision(run: &[Query]) -> Vec<f64> {
    let mut acc = vec![0.0; RECALL_GRID_POINTS];
    if run.is_empty() {
        return acc;
    }
    for q in run {
        for (a, p) in acc.iter_mut().zip(query_interpolated_precision(q)) {
            *a += p;
        }
    }
    acc.iter_mut().for_each(|a| *a /= run.len() as f64);
    acc
}

pub fn query_recall_at_k(q: &Query, k: usize) -> f64 {
    if q.labels.is_empty() {
        return 0.0;
    }
    let found = q
        .ranking
        .iter()
        .take(k)
        .filter(|e| q.labels.contains(*e))
        .count();
    found as f64 / q.labels.len() as f64
}

/// Mean over queries of the fraction of labels found in the top `k`.
pub fn recall_at_k(run: &[Query], k: usize) -> f64 {
    if run.is_empty() {
        return 0.0;
    }
    run.iter().map(|q| query_recall_at_k(q, k)).sum::<f64>() / run.len() as f64
}
