//! Seeded random corpora, partitions and queries.

use std::collections::BTreeMap;

use emorec_core::{Document, Polarity, PolarityMap, TopicPartition};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct Instance {
    pub docs: Vec<Document>,
    pub partition: TopicPartition,
    pub polarity: PolarityMap,
    pub words: Vec<String>,
    pub query: BTreeMap<String, u32>,
}

fn word(i: usize) -> String {
    // letters only, so the words survive tokenisation unchanged
    let mut s = String::from("w");
    let mut n = i;
    loop {
        s.push((b'a' + (n % 26) as u8) as char);
        n /= 26;
        if n == 0 {
            break;
        }
    }
    s
}

/// A small labelled corpus with at most `max_emotions` emotions and
/// `max_words` words, a random partition over its vocabulary and a random
/// query drawn from the same vocabulary. Every emotion tags at least one
/// document and every word occurs at least once.
pub fn instance(seed: u64, max_emotions: usize, max_words: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_emotions = rng.random_range(2..=max_emotions.max(2));
    let n_words = rng.random_range(2..=max_words.max(2));
    let emotions: Vec<String> = (0..n_emotions).map(|i| format!("e{}", (b'a' + i as u8) as char)).collect();
    let words: Vec<String> = (0..n_words).map(word).collect();

    let n_docs = rng.random_range(n_emotions..=n_emotions + 10);
    let mut docs = Vec::with_capacity(n_docs);
    for i in 0..n_docs {
        let mut tags = std::collections::BTreeSet::new();
        if i < n_emotions {
            tags.insert(emotions[i].clone());
        }
        for _ in 0..rng.random_range(0..3) {
            tags.insert(emotions.choose(&mut rng).unwrap().clone());
        }
        if tags.is_empty() {
            tags.insert(emotions.choose(&mut rng).unwrap().clone());
        }
        let mut bow = BTreeMap::new();
        for _ in 0..rng.random_range(1..=8) {
            *bow.entry(words.choose(&mut rng).unwrap().clone()).or_insert(0) += rng.random_range(1..=4);
        }
        docs.push(Document {
            id: format!("d{i}"),
            bow,
            emotions: tags,
        });
    }
    // make sure every word occurs somewhere
    for (j, w) in words.iter().enumerate() {
        if !docs.iter().any(|d| d.bow.contains_key(w)) {
            let d = j % docs.len();
            docs[d].bow.insert(w.clone(), 1);
        }
    }

    let n_topics = rng.random_range(1..=n_words.min(6)) as u64;
    let raw: BTreeMap<String, u64> = words
        .iter()
        .map(|w| (w.clone(), rng.random_range(0..n_topics)))
        .collect();
    let partition = TopicPartition::compacted(raw, format!("random {seed}"));

    let polarity = emotions
        .iter()
        .map(|e| {
            let p = if rng.random_bool(0.5) { Polarity::Positive } else { Polarity::Negative };
            (e.clone(), p)
        })
        .collect();

    let mut query = BTreeMap::new();
    for _ in 0..rng.random_range(1..=6) {
        *query.entry(words.choose(&mut rng).unwrap().clone()).or_insert(0) += rng.random_range(1..=3);
    }
    Instance {
        docs,
        partition,
        polarity,
        words,
        query,
    }
}

/// Replaces every token of `bow` by a random word from the same topic.
pub fn substitute_within_topics(
    bow: &BTreeMap<String, u32>,
    partition: &TopicPartition,
    seed: u64,
) -> BTreeMap<String, u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let topics = partition.topic_words();
    let mut out = BTreeMap::new();
    for (w, &c) in bow {
        let k = partition.topic_of(w).expect("word in partition");
        for _ in 0..c {
            let replacement = topics[k].choose(&mut rng).unwrap();
            *out.entry(replacement.to_string()).or_insert(0) += 1;
        }
    }
    out
}

/// Gains for a ranking of `n` items, each zero with probability 1/3 and
/// otherwise uniform in (0, 1].
pub fn gains(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            if rng.random_bool(1.0 / 3.0) {
                0.0
            } else {
                1.0 - rng.random::<f64>()
            }
        })
        .collect()
}
