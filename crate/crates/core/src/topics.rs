//! Word-to-topic partitions and the densities derived from them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Document, Polarity, PolarityMap, Vocabulary};
use crate::error::{Error, Result};
use crate::fmt::sig;

pub type TopicId = usize;

/// Total map from vocabulary words to topics `0..n_topics`, every topic used
/// by at least one word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicPartition {
    assignment: BTreeMap<String, TopicId>,
    n_topics: usize,
    /// Topic that collects vocabulary words missing from the source file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reserved_topic: Option<TopicId>,
    #[serde(default)]
    label: String,
}

impl TopicPartition {
    /// Builds a partition from an assignment whose topic ids are already
    /// `0..n` with every id used.
    pub fn new(assignment: BTreeMap<String, TopicId>, label: impl Into<String>) -> Result<Self> {
        let used: BTreeSet<TopicId> = assignment.values().copied().collect();
        let n_topics = used.len();
        if used.iter().copied().ne(0..n_topics) {
            return Err(Error::invalid(
                "topic ids must be contiguous from 0 with every topic used",
            ));
        }
        Ok(TopicPartition {
            assignment,
            n_topics,
            reserved_topic: None,
            label: label.into(),
        })
    }

    /// Compacts arbitrary topic ids to `0..n` in ascending id order.
    pub fn compacted(assignment: BTreeMap<String, u64>, label: impl Into<String>) -> Self {
        let ids: BTreeSet<u64> = assignment.values().copied().collect();
        let remap: BTreeMap<u64, TopicId> = ids.into_iter().enumerate().map(|(i, id)| (id, i)).collect();
        let n_topics = remap.len();
        TopicPartition {
            assignment: assignment
                .into_iter()
                .map(|(w, id)| (w, remap[&id]))
                .collect(),
            n_topics,
            reserved_topic: None,
            label: label.into(),
        }
    }

    pub fn n_topics(&self) -> usize {
        self.n_topics
    }

    pub fn topic_of(&self, word: &str) -> Option<TopicId> {
        self.assignment.get(word).copied()
    }

    pub fn assignment(&self) -> &BTreeMap<String, TopicId> {
        &self.assignment
    }

    pub fn reserved_topic(&self) -> Option<TopicId> {
        self.reserved_topic
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Words of each topic, in word order.
    pub fn topic_words(&self) -> Vec<Vec<&str>> {
        let mut out = vec![Vec::new(); self.n_topics];
        for (w, &k) in &self.assignment {
            out[k].push(w.as_str());
        }
        out
    }

    /// Checks the internal invariants; used after deserialisation.
    pub fn validate(&self) -> Result<()> {
        let used: BTreeSet<TopicId> = self.assignment.values().copied().collect();
        if used.len() != self.n_topics || used.iter().copied().ne(0..self.n_topics) {
            return Err(Error::invalid(format!(
                "partition declares {} topics but uses ids {:?}",
                self.n_topics, used
            )));
        }
        Ok(())
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        if !self.label.is_empty() {
            out.push_str(&format!("# {}\n", self.label));
        }
        for (w, k) in &self.assignment {
            out.push_str(&format!("{w}\t{k}\n"));
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_tsv()).map_err(|e| Error::io(path, e))
    }
}

/// Parses `word<TAB>topic_id` lines into a raw assignment.
pub fn parse_partition_tsv(text: &str) -> Result<BTreeMap<String, u64>> {
    let mut assignment = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let (word, topic) = line.split_once('\t').ok_or_else(|| Error::Malformed {
            line: line_no,
            message: "expected word<TAB>topic_id".into(),
        })?;
        let topic: u64 = topic.trim().parse().map_err(|_| Error::Malformed {
            line: line_no,
            message: format!("topic id {:?} is not a non-negative integer", topic.trim()),
        })?;
        let word = word.trim().to_string();
        if assignment.insert(word.clone(), topic).is_some() {
            return Err(Error::DuplicateWord(word));
        }
    }
    Ok(assignment)
}

/// Restricts a raw assignment to `vocab`, compacts topic ids and sends
/// uncovered vocabulary words to one extra reserved topic.
pub fn partition_for_vocab(
    raw: BTreeMap<String, u64>,
    vocab: &Vocabulary,
    label: impl Into<String>,
) -> TopicPartition {
    let restricted: BTreeMap<String, u64> = raw
        .into_iter()
        .filter(|(w, _)| vocab.contains(w))
        .collect();
    let mut part = TopicPartition::compacted(restricted, label);
    let missing: Vec<&str> = vocab
        .words()
        .filter(|w| !part.assignment.contains_key(*w))
        .collect();
    if !missing.is_empty() {
        let reserved = part.n_topics;
        for w in missing {
            part.assignment.insert(w.to_string(), reserved);
        }
        part.n_topics += 1;
        part.reserved_topic = Some(reserved);
    }
    part
}

/// Loads a partition file for the given vocabulary. The partition label is
/// the file stem.
pub fn load_partition(path: impl AsRef<Path>, vocab: &Vocabulary) -> Result<TopicPartition> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let raw = parse_partition_tsv(&text)?;
    let label = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("partition")
        .to_string();
    Ok(partition_for_vocab(raw, vocab, label))
}

/// Empirical topic-use density of one document or emotion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TopicDensity(pub Vec<f64>);

impl TopicDensity {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, k: TopicId) -> f64 {
        self.0[k]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmotionTopicProfile {
    pub emotion: String,
    pub density: TopicDensity,
    /// Number of documents tagged with the emotion.
    pub support: usize,
}

/// Fraction of the document's tokens falling in each topic.
pub fn doc_topic_density(bow: &BTreeMap<String, u32>, part: &TopicPartition) -> Result<TopicDensity> {
    let mut counts = vec![0u64; part.n_topics()];
    let mut total = 0u64;
    for (w, &c) in bow {
        let k = part
            .topic_of(w)
            .ok_or_else(|| Error::UnknownWord(w.clone()))?;
        counts[k] += u64::from(c);
        total += u64::from(c);
    }
    if total == 0 {
        return Err(Error::NoTokens);
    }
    Ok(TopicDensity(
        counts.into_iter().map(|c| c as f64 / total as f64).collect(),
    ))
}

/// Mean document-topic density over the documents tagged `emotion`.
pub fn emotion_topic_profile(
    docs: &[Document],
    part: &TopicPartition,
    emotion: &str,
) -> Result<EmotionTopicProfile> {
    let mut sum = vec![0.0; part.n_topics()];
    let mut support = 0usize;
    for doc in docs.iter().filter(|d| d.emotions.contains(emotion)) {
        let density = doc_topic_density(&doc.bow, part)?;
        for (s, v) in sum.iter_mut().zip(density.0) {
            *s += v;
        }
        support += 1;
    }
    if support == 0 {
        return Err(Error::NoDocumentsForEmotion(emotion.to_string()));
    }
    Ok(EmotionTopicProfile {
        emotion: emotion.to_string(),
        density: TopicDensity(sum.into_iter().map(|s| s / support as f64).collect()),
        support,
    })
}

/// Profiles of every emotion occurring in `docs`, keyed by label. Each
/// document's density is computed once.
pub fn emotion_topic_profiles(
    docs: &[Document],
    part: &TopicPartition,
) -> Result<BTreeMap<String, EmotionTopicProfile>> {
    let mut acc: BTreeMap<&str, (Vec<f64>, usize)> = BTreeMap::new();
    for doc in docs {
        if doc.emotions.is_empty() {
            continue;
        }
        let density = doc_topic_density(&doc.bow, part)?;
        for e in &doc.emotions {
            let (sum, n) = acc
                .entry(e.as_str())
                .or_insert_with(|| (vec![0.0; part.n_topics()], 0));
            for (s, v) in sum.iter_mut().zip(&density.0) {
                *s += v;
            }
            *n += 1;
        }
    }
    Ok(acc
        .into_iter()
        .map(|(e, (sum, n))| {
            let profile = EmotionTopicProfile {
                emotion: e.to_string(),
                density: TopicDensity(sum.into_iter().map(|s| s / n as f64).collect()),
                support: n,
            };
            (e.to_string(), profile)
        })
        .collect())
}

/// Topic likelihood given any emotion of one polarity: the prior-weighted
/// mixture of that side's emotion profiles.
pub fn sentiment_topic_density<'a>(
    profiles: impl IntoIterator<Item = (&'a str, &'a TopicDensity)>,
    priors: &BTreeMap<String, f64>,
    side: Polarity,
    pol: &PolarityMap,
) -> Result<TopicDensity> {
    let mut sum: Option<Vec<f64>> = None;
    let mut mass = 0.0;
    for (e, density) in profiles {
        if pol.require(e)? != side {
            continue;
        }
        let p = *priors
            .get(e)
            .ok_or_else(|| Error::UnknownEmotion(e.to_string()))?;
        let acc = sum.get_or_insert_with(|| vec![0.0; density.len()]);
        if acc.len() != density.len() {
            return Err(Error::DimensionMismatch(acc.len(), density.len()));
        }
        for (a, v) in acc.iter_mut().zip(density.as_slice()) {
            *a += v * p;
        }
        mass += p;
    }
    let sum = sum.ok_or_else(|| Error::invalid(format!("no {side} emotions")))?;
    if mass <= 0.0 {
        return Err(Error::invalid(format!("{side} emotions carry no prior mass")));
    }
    Ok(TopicDensity(sum.into_iter().map(|s| s / mass).collect()))
}

/// Ratio of positive to negative topic likelihood.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Positivity {
    Finite(f64),
    /// Negative likelihood is zero, positive is not.
    Infinite,
    /// Both likelihoods are zero.
    Undefined,
}

impl Positivity {
    pub fn value(self) -> f64 {
        match self {
            Positivity::Finite(v) => v,
            Positivity::Infinite => f64::INFINITY,
            Positivity::Undefined => f64::NAN,
        }
    }

    /// Total order used for report tables: finite values ascending, then
    /// infinite, then undefined.
    pub fn sort_key(self) -> (u8, f64) {
        match self {
            Positivity::Finite(v) => (0, v),
            Positivity::Infinite => (1, 0.0),
            Positivity::Undefined => (2, 0.0),
        }
    }
}

impl fmt::Display for Positivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Positivity::Finite(v) => write!(f, "{v:.3}"),
            Positivity::Infinite => f.write_str("inf"),
            Positivity::Undefined => f.write_str("NA"),
        }
    }
}

impl FromStr for Positivity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" => Ok(Positivity::Infinite),
            "NA" => Ok(Positivity::Undefined),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(Positivity::Finite)
                .ok_or_else(|| Error::invalid(format!("bad positivity {other:?}"))),
        }
    }
}

/// Finite values serialise as numbers, the other cases as `"inf"` / `"NA"`.
impl Serialize for Positivity {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Positivity::Finite(v) => ser.serialize_f64(*v),
            other => ser.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Positivity {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(de)? {
            Repr::Num(v) => Ok(Positivity::Finite(v)),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

pub fn topic_positivity(k: TopicId, pos: &TopicDensity, neg: &TopicDensity) -> Positivity {
    ratio(pos.get(k), neg.get(k))
}

/// Reciprocal of [`topic_positivity`].
pub fn topic_negativity(k: TopicId, pos: &TopicDensity, neg: &TopicDensity) -> Positivity {
    ratio(neg.get(k), pos.get(k))
}

fn ratio(num: f64, den: f64) -> Positivity {
    if den > 0.0 {
        Positivity::Finite(num / den)
    } else if num > 0.0 {
        Positivity::Infinite
    } else {
        Positivity::Undefined
    }
}

/// Euclidean distance between two topic densities.
pub fn density_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(a.len(), b.len()));
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

pub fn emotion_distance(a: &EmotionTopicProfile, b: &EmotionTopicProfile) -> Result<f64> {
    density_distance(a.density.as_slice(), b.density.as_slice())
}

/// Symmetric pairwise emotion distances with zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl DistanceMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.labels.iter().position(|l| l == a)?;
        let j = self.labels.iter().position(|l| l == b)?;
        Some(self.values[i][j])
    }

    /// TSV with a header row and column of labels; values carry 10
    /// significant digits.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("emotion");
        for l in &self.labels {
            out.push('\t');
            out.push_str(l);
        }
        out.push('\n');
        for (l, row) in self.labels.iter().zip(&self.values) {
            out.push_str(l);
            for v in row {
                out.push('\t');
                out.push_str(&sig(*v, 10));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Malformed {
            line: 1,
            message: "missing header".into(),
        })?;
        let labels: Vec<String> = header.split('\t').skip(1).map(str::to_string).collect();
        let mut values = Vec::new();
        for (idx, line) in lines {
            let mut fields = line.split('\t');
            let label = fields.next().unwrap_or_default();
            if labels.get(values.len()).map(String::as_str) != Some(label) {
                return Err(Error::Malformed {
                    line: idx + 1,
                    message: format!("row label {label:?} does not match header order"),
                });
            }
            let row = fields
                .map(|f| {
                    f.parse::<f64>().map_err(|_| Error::Malformed {
                        line: idx + 1,
                        message: format!("bad number {f:?}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if row.len() != labels.len() {
                return Err(Error::Malformed {
                    line: idx + 1,
                    message: "row width differs from header".into(),
                });
            }
            values.push(row);
        }
        if values.len() != labels.len() {
            return Err(Error::Malformed {
                line: values.len() + 2,
                message: "matrix is not square".into(),
            });
        }
        Ok(DistanceMatrix { labels, values })
    }
}

pub fn distance_matrix<'a>(
    profiles: impl IntoIterator<Item = &'a EmotionTopicProfile>,
) -> Result<DistanceMatrix> {
    let profiles: Vec<&EmotionTopicProfile> = profiles.into_iter().collect();
    let n = profiles.len();
    let mut values = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = emotion_distance(profiles[i], profiles[j])?;
            values[i][j] = d;
            values[j][i] = d;
        }
    }
    Ok(DistanceMatrix {
        labels: profiles.iter().map(|p| p.emotion.clone()).collect(),
        values,
    })
}

/// Cheap stand-in for an externally inferred partition: words are embedded
/// by their per-document counts and grouped around `n_topics` farthest-first
/// seeds by cosine similarity to the running group centroids.
///
/// Deterministic for a given corpus and seed.
pub fn baseline_partition(
    docs: &[Document],
    vocab: &Vocabulary,
    n_topics: usize,
    seed: u64,
) -> Result<TopicPartition> {
    let words: Vec<&str> = vocab.words().collect();
    if n_topics == 0 || n_topics > words.len() {
        return Err(Error::invalid(format!(
            "topic count {n_topics} must be between 1 and the vocabulary size {}",
            words.len()
        )));
    }
    let index: BTreeMap<&str, usize> = words.iter().enumerate().map(|(i, w)| (*w, i)).collect();

    // unit-normalised sparse co-occurrence vectors: word -> [(doc, weight)]
    let mut vectors: Vec<Vec<(usize, f64)>> = vec![Vec::new(); words.len()];
    for (d, doc) in docs.iter().enumerate() {
        for (w, &c) in &doc.bow {
            if let Some(&i) = index.get(w.as_str()) {
                vectors[i].push((d, f64::from(c)));
            }
        }
    }
    for v in &mut vectors {
        let norm = v.iter().map(|(_, x)| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|(_, x)| *x /= norm);
        }
    }

    let mut order: Vec<usize> = (0..words.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    // farthest-first seeds
    let mut seeds = vec![order[0]];
    let mut is_seed = vec![false; words.len()];
    is_seed[order[0]] = true;
    let mut closest = vec![f64::NEG_INFINITY; words.len()];
    let mut scratch = vec![0.0; docs.len()];
    while seeds.len() < n_topics {
        let last = *seeds.last().expect("non-empty");
        for &(d, x) in &vectors[last] {
            scratch[d] = x;
        }
        for &i in &order {
            let s: f64 = vectors[i].iter().map(|&(d, x)| x * scratch[d]).sum();
            closest[i] = closest[i].max(s);
        }
        for &(d, _) in &vectors[last] {
            scratch[d] = 0.0;
        }
        let next = order
            .iter()
            .copied()
            .filter(|&i| !is_seed[i])
            .fold(None::<usize>, |best, i| match best {
                Some(b) if closest[b] <= closest[i] => Some(b),
                _ => Some(i),
            })
            .expect("more words than seeds");
        is_seed[next] = true;
        seeds.push(next);
    }

    let mut centroids: Vec<Vec<f64>> = vec![vec![0.0; docs.len()]; n_topics];
    let mut norms_sq = vec![0.0; n_topics];
    let mut topic = vec![usize::MAX; words.len()];
    let mut add = |k: usize, i: usize, centroids: &mut Vec<Vec<f64>>, norms_sq: &mut Vec<f64>| {
        let dot: f64 = vectors[i].iter().map(|&(d, x)| x * centroids[k][d]).sum();
        let self_sq: f64 = vectors[i].iter().map(|&(_, x)| x * x).sum();
        norms_sq[k] += 2.0 * dot + self_sq;
        for &(d, x) in &vectors[i] {
            centroids[k][d] += x;
        }
        topic[i] = k;
    };
    for (k, &s) in seeds.iter().enumerate() {
        add(k, s, &mut centroids, &mut norms_sq);
    }
    for &i in &order {
        if is_seed[i] {
            continue;
        }
        let mut best = 0;
        let mut best_sim = f64::NEG_INFINITY;
        for k in 0..n_topics {
            let dot: f64 = vectors[i].iter().map(|&(d, x)| x * centroids[k][d]).sum();
            let sim = if norms_sq[k] > 0.0 { dot / norms_sq[k].sqrt() } else { 0.0 };
            if sim > best_sim {
                best_sim = sim;
                best = k;
            }
        }
        add(best, i, &mut centroids, &mut norms_sq);
    }

    let assignment = words
        .iter()
        .enumerate()
        .map(|(i, w)| (w.to_string(), topic[i]))
        .collect();
    TopicPartition::new(assignment, format!("baseline partition (seed {seed})"))
}
