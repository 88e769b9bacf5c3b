//! The four-word, four-document, three-emotion worked network.
//!
//! d1 = {v1:2, v2:1, v4:1} tagged {e1, e2}; d2 = {v1, v2} tagged {e1};
//! d3 = {v1, v2, v3} tagged {e3}; d4 = {v3:2, v4} tagged {e3}. Topics:
//! v1, v2 -> 0; v3 -> 1; v4 -> 2.

use std::collections::BTreeMap;

use emorec_core::{Document, Polarity, PolarityMap, TopicPartition};
use num_rational::Ratio;
use num_traits::ToPrimitive;

pub type Q = Ratio<i64>;

pub const QUERY_TEXT: &str = "v1 v2 v1 v4";
/// The worked answer as printed, to two decimals.
pub const ROUNDED_POSTERIOR: [f64; 3] = [0.59, 0.37, 0.04];

fn q(n: i64, d: i64) -> Q {
    Ratio::new(n, d)
}

pub fn to_f64(r: Q) -> f64 {
    r.to_f64().expect("small rational")
}

const DOCS: [(&str, &[(&str, u32)], &[&str]); 4] = [
    ("d1", &[("v1", 2), ("v2", 1), ("v4", 1)], &["e1", "e2"]),
    ("d2", &[("v1", 1), ("v2", 1)], &["e1"]),
    ("d3", &[("v1", 1), ("v2", 1), ("v3", 1)], &["e3"]),
    ("d4", &[("v3", 2), ("v4", 1)], &["e3"]),
];

pub fn documents() -> Vec<Document> {
    DOCS.iter()
        .map(|(id, words, emotions)| Document {
            id: id.to_string(),
            bow: words.iter().map(|&(w, c)| (w.to_string(), c)).collect(),
            emotions: emotions.iter().map(|e| e.to_string()).collect(),
        })
        .collect()
}

pub fn partition() -> TopicPartition {
    TopicPartition::new(
        [("v1", 0), ("v2", 0), ("v3", 1), ("v4", 2)]
            .into_iter()
            .map(|(w, k)| (w.to_string(), k))
            .collect(),
        "network",
    )
    .expect("valid partition")
}

fn polarity_of(pairs: [(&str, Polarity); 3]) -> PolarityMap {
    pairs.into_iter().map(|(e, p)| (e.to_string(), p)).collect()
}

/// e1 positive, e2 and e3 negative.
pub fn polarity() -> PolarityMap {
    polarity_of([
        ("e1", Polarity::Positive),
        ("e2", Polarity::Negative),
        ("e3", Polarity::Negative),
    ])
}

/// e1 and e2 positive, e3 negative (used for the relevance example).
pub fn relevance_polarity() -> PolarityMap {
    polarity_of([
        ("e1", Polarity::Positive),
        ("e2", Polarity::Positive),
        ("e3", Polarity::Negative),
    ])
}

pub fn query() -> BTreeMap<String, u32> {
    [("v1", 2), ("v2", 1), ("v4", 1)]
        .into_iter()
        .map(|(w, c)| (w.to_string(), c))
        .collect()
}

pub fn exact_priors() -> [Q; 3] {
    [q(2, 5), q(1, 5), q(2, 5)]
}

pub fn exact_d1_density() -> [Q; 3] {
    [q(3, 4), q(0, 1), q(1, 4)]
}

/// Columns of the emotion-topic matrix, one per emotion.
pub fn exact_profiles() -> [[Q; 3]; 3] {
    [
        [q(7, 8), q(0, 1), q(1, 8)],
        [q(3, 4), q(0, 1), q(1, 4)],
        [q(1, 3), q(1, 2), q(1, 6)],
    ]
}

/// Posterior of [`query`] with no smoothing, as exact fractions.
pub fn exact_posterior() -> [Q; 3] {
    let cube = |r: Q| r * r * r;
    let nums = [
        cube(q(7, 8)) * q(1, 8) * q(2, 5),
        cube(q(3, 4)) * q(1, 4) * q(1, 5),
        cube(q(1, 3)) * q(1, 6) * q(2, 5),
    ];
    let total = nums[0] + nums[1] + nums[2];
    nums.map(|n| n / total)
}

/// Corpus JSONL whose tokenisation (digits kept, no stopwords, min count 1)
/// reproduces [`documents`].
pub fn corpus_jsonl() -> String {
    let mut out = String::new();
    for (id, words, emotions) in DOCS {
        let text: Vec<&str> = words
            .iter()
            .flat_map(|&(w, c)| std::iter::repeat_n(w, c as usize))
            .collect();
        out.push_str(
            &serde_json::json!({"id": id, "text": text.join(" "), "emotions": emotions}).to_string(),
        );
        out.push('\n');
    }
    out
}

pub fn partition_tsv() -> &'static str {
    "v1\t0\nv2\t0\nv3\t1\nv4\t2\n"
}

pub fn polarity_tsv() -> &'static str {
    "e1\tpositive\ne2\tnegative\ne3\tnegative\n"
}
