//! A perfectly separable corpus: each document carries one emotion and only
//! words private to that emotion.

use emorec_core::Polarity;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const EMOTIONS: [(&str, Polarity); 6] = [
    ("calm", Polarity::Positive),
    ("grateful", Polarity::Positive),
    ("happy", Polarity::Positive),
    ("angry", Polarity::Negative),
    ("sad", Polarity::Negative),
    ("scared", Polarity::Negative),
];

pub const WORDS_PER_EMOTION: usize = 12;

#[derive(Debug, Clone)]
pub struct SeparableCorpus {
    pub jsonl: String,
    pub polarity_tsv: String,
    /// One topic per emotion, holding exactly that emotion's words.
    pub partition_tsv: String,
}

/// Private vocabulary of emotion `i`: alphabetic words that are not
/// stopwords (`qx` + emotion letter + two letters).
pub fn words_of(i: usize) -> Vec<String> {
    (0..WORDS_PER_EMOTION)
        .map(|j| {
            let e = (b'a' + i as u8) as char;
            let a = (b'a' + (j / 26) as u8) as char;
            let b = (b'a' + (j % 26) as u8) as char;
            format!("qx{e}{a}{b}")
        })
        .collect()
}

pub fn separable_corpus(n_docs: usize, seed: u64) -> SeparableCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocab: Vec<Vec<String>> = (0..EMOTIONS.len()).map(words_of).collect();
    let mut jsonl = String::new();
    for i in 0..n_docs {
        let e = i % EMOTIONS.len();
        let len = rng.random_range(8..=16);
        let text: Vec<&str> = (0..len)
            .map(|_| vocab[e].choose(&mut rng).unwrap().as_str())
            .collect();
        jsonl.push_str(
            &serde_json::json!({
                "id": format!("doc{i:04}"),
                "text": text.join(" "),
                "emotions": [EMOTIONS[e].0],
            })
            .to_string(),
        );
        jsonl.push('\n');
    }
    let polarity_tsv = EMOTIONS
        .iter()
        .map(|(e, p)| format!("{e}\t{p}\n"))
        .collect();
    let partition_tsv = vocab
        .iter()
        .enumerate()
        .flat_map(|(k, ws)| ws.iter().map(move |w| format!("{w}\t{k}\n")))
        .collect();
    SeparableCorpus {
        jsonl,
        polarity_tsv,
        partition_tsv,
    }
}
