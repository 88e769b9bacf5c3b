//! Document ingestion, text normalisation, vocabulary construction and
//! corpus-level descriptive statistics.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords.txt");

/// A labelled narrative as read from disk, before any text processing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub id: String,
    pub text: String,
    pub emotions: BTreeSet<String>,
    pub date: Option<NaiveDate>,
    pub region: Option<String>,
}

/// A preprocessed document: bag of in-vocabulary word counts plus its
/// (non-empty) emotion labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub bow: BTreeMap<String, u32>,
    pub emotions: BTreeSet<String>,
}

impl Document {
    pub fn token_count(&self) -> u64 {
        self.bow.values().map(|&c| u64::from(c)).sum()
    }
}

/// Surviving corpus words with their total counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    counts: BTreeMap<String, u64>,
}

impl Vocabulary {
    pub fn from_counts(counts: BTreeMap<String, u64>) -> Self {
        Vocabulary { counts }
    }

    /// Vocabulary made of every word of the given documents.
    pub fn from_documents(docs: &[Document]) -> Self {
        let mut counts = BTreeMap::new();
        for doc in docs {
            for (w, &c) in &doc.bow {
                *counts.entry(w.clone()).or_insert(0) += u64::from(c);
            }
        }
        Vocabulary { counts }
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.counts.keys().map(String::as_str)
    }

    pub fn count(&self, word: &str) -> Option<u64> {
        self.counts.get(word).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.counts.contains_key(word)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
        })
    }
}

impl FromStr for Polarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "positive" | "pos" | "+" => Ok(Polarity::Positive),
            "negative" | "neg" | "-" => Ok(Polarity::Negative),
            other => Err(Error::invalid(format!(
                "polarity must be positive or negative, got {other:?}"
            ))),
        }
    }
}

/// Assignment of every emotion label to a sentiment side.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolarityMap(BTreeMap<String, Polarity>);

impl PolarityMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, emotion: impl Into<String>, polarity: Polarity) {
        self.0.insert(emotion.into(), polarity);
    }

    pub fn get(&self, emotion: &str) -> Option<Polarity> {
        self.0.get(emotion).copied()
    }

    /// Like [`get`](Self::get) but fails with [`Error::MissingPolarity`].
    pub fn require(&self, emotion: &str) -> Result<Polarity> {
        self.get(emotion)
            .ok_or_else(|| Error::MissingPolarity(emotion.to_string()))
    }

    pub fn is_positive(&self, emotion: &str) -> bool {
        self.get(emotion) == Some(Polarity::Positive)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Polarity)> {
        self.0.iter().map(|(e, &p)| (e.as_str(), p))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Emotions on the given side, in label order.
    pub fn side(&self, polarity: Polarity) -> impl Iterator<Item = &str> {
        self.iter()
            .filter(move |&(_, p)| p == polarity)
            .map(|(e, _)| e)
    }

    /// Restriction of the map to the given emotions, failing on any emotion
    /// without a polarity.
    pub fn restrict<'a>(&self, emotions: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let mut out = PolarityMap::new();
        for e in emotions {
            out.insert(e, self.require(e)?);
        }
        Ok(out)
    }

    /// Parses `emotion<TAB>polarity` lines. Blank lines and `#` comments are
    /// skipped.
    pub fn parse_tsv(text: &str) -> Result<Self> {
        let mut map = PolarityMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (emotion, polarity) = line.split_once('\t').ok_or_else(|| Error::Malformed {
                line: line_no,
                message: "expected emotion<TAB>polarity".into(),
            })?;
            let polarity: Polarity = polarity.parse().map_err(|e: Error| Error::Malformed {
                line: line_no,
                message: e.to_string(),
            })?;
            let emotion = emotion.trim();
            if let Some(prev) = map.get(emotion) {
                if prev != polarity {
                    return Err(Error::Malformed {
                        line: line_no,
                        message: format!("emotion {emotion:?} listed with both polarities"),
                    });
                }
            }
            map.insert(emotion, polarity);
        }
        Ok(map)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_tsv(&text)
    }
}

impl FromIterator<(String, Polarity)> for PolarityMap {
    fn from_iter<I: IntoIterator<Item = (String, Polarity)>>(iter: I) -> Self {
        PolarityMap(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessConfig {
    pub min_count: u64,
    pub stopwords: BTreeSet<String>,
    pub lowercase: bool,
    /// Treat digits as word characters (off by default, where they split
    /// words like any other non-letter).
    #[serde(default)]
    pub keep_digits: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            min_count: 5,
            stopwords: parse_stopwords(DEFAULT_STOPWORDS),
            lowercase: true,
            keep_digits: false,
        }
    }
}

impl PreprocessConfig {
    /// Config with no stopwords at all.
    pub fn without_stopwords(min_count: u64) -> Self {
        PreprocessConfig {
            min_count,
            stopwords: BTreeSet::new(),
            lowercase: true,
            keep_digits: false,
        }
    }

    pub fn with_stopwords_file(mut self, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.stopwords = parse_stopwords(&text);
        Ok(self)
    }
}

/// Reads a stopword list, one entry per line, `#` comments ignored. Entries
/// go through the same normalisation as document text.
pub fn parse_stopwords(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .flat_map(|l| tokenize(l, true))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Jsonl,
    Tsv,
}

impl CorpusFormat {
    /// Guesses the format from a file extension (`.tsv`/`.tab` → TSV,
    /// anything else → JSONL).
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("tsv") || ext.eq_ignore_ascii_case("tab") => {
                CorpusFormat::Tsv
            }
            _ => CorpusFormat::Jsonl,
        }
    }
}

impl FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" | "json" => Ok(CorpusFormat::Jsonl),
            "tsv" => Ok(CorpusFormat::Tsv),
            other => Err(Error::invalid(format!("unknown corpus format {other:?}"))),
        }
    }
}

#[derive(Debug, Deserialize)]
struct JsonRecord {
    id: String,
    text: String,
    emotions: Vec<String>,
    #[serde(default)]
    date: Option<String>,
    #[serde(default)]
    region: Option<String>,
}

pub fn ingest(path: impl AsRef<Path>, format: CorpusFormat) -> Result<Vec<RawDocument>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    match format {
        CorpusFormat::Jsonl => parse_jsonl(&text),
        CorpusFormat::Tsv => parse_tsv(&text),
    }
}

fn parse_date(s: &str, line: usize) -> Result<Option<NaiveDate>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(None);
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .map(Some)
        .map_err(|e| Error::Malformed {
            line,
            message: format!("invalid date {s:?}: {e}"),
        })
}

fn non_empty(s: Option<String>) -> Option<String> {
    s.map(|s| s.trim().to_string()).filter(|s| !s.is_empty())
}

fn push_unique(
    docs: &mut Vec<RawDocument>,
    seen: &mut HashSet<String>,
    doc: RawDocument,
) -> Result<()> {
    if !seen.insert(doc.id.clone()) {
        return Err(Error::DuplicateId(doc.id));
    }
    docs.push(doc);
    Ok(())
}

pub fn parse_jsonl(text: &str) -> Result<Vec<RawDocument>> {
    let mut docs = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec: JsonRecord = serde_json::from_str(line).map_err(|e| Error::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        let doc = RawDocument {
            id: rec.id,
            text: rec.text,
            emotions: rec
                .emotions
                .into_iter()
                .map(|e| e.trim().to_string())
                .filter(|e| !e.is_empty())
                .collect(),
            date: parse_date(rec.date.as_deref().unwrap_or(""), line_no)?,
            region: non_empty(rec.region),
        };
        push_unique(&mut docs, &mut seen, doc)?;
    }
    Ok(docs)
}

const TSV_HEADER: [&str; 5] = ["id", "text", "emotions", "date", "region"];

pub fn parse_tsv(text: &str) -> Result<Vec<RawDocument>> {
    let mut lines = text.lines().enumerate();
    let Some((_, header)) = lines.next() else {
        return Ok(Vec::new());
    };
    let cols: Vec<&str> = header.split('\t').map(str::trim).collect();
    if cols != TSV_HEADER {
        return Err(Error::Malformed {
            line: 1,
            message: format!("expected header {:?}", TSV_HEADER.join("\t")),
        });
    }
    let mut docs = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != TSV_HEADER.len() {
            return Err(Error::Malformed {
                line: line_no,
                message: format!("expected {} fields, found {}", TSV_HEADER.len(), fields.len()),
            });
        }
        let id = fields[0].trim();
        if id.is_empty() {
            return Err(Error::Malformed {
                line: line_no,
                message: "empty id".into(),
            });
        }
        let doc = RawDocument {
            id: id.to_string(),
            text: fields[1].to_string(),
            emotions: fields[2]
                .split('|')
                .map(str::trim)
                .filter(|e| !e.is_empty())
                .map(str::to_string)
                .collect(),
            date: parse_date(fields[3], line_no)?,
            region: non_empty(Some(fields[4].to_string())),
        };
        push_unique(&mut docs, &mut seen, doc)?;
    }
    Ok(docs)
}

fn is_joiner(c: char) -> bool {
    matches!(c, '-' | '\'' | '\u{2019}' | '\u{2010}' | '\u{2011}')
}

/// Lowercases (optionally), joins letter-flanked hyphens/apostrophes, blanks
/// every other non-alphabetic character and splits on whitespace.
pub fn tokenize(text: &str, lowercase: bool) -> Vec<String> {
    tokenize_with(text, lowercase, false)
}

/// [`tokenize`], optionally counting digits as word characters.
pub fn tokenize_with(text: &str, lowercase: bool, keep_digits: bool) -> Vec<String> {
    let is_word = |c: char| c.is_alphabetic() || (keep_digits && c.is_numeric());
    let chars: Vec<char> = if lowercase {
        text.chars().flat_map(char::to_lowercase).collect()
    } else {
        text.chars().collect()
    };
    let mut out = String::with_capacity(chars.len());
    for (i, &c) in chars.iter().enumerate() {
        if is_word(c) {
            out.push(c);
        } else if is_joiner(c)
            && i > 0
            && is_word(chars[i - 1])
            && chars.get(i + 1).is_some_and(|&n| is_word(n))
        {
            // contracted: "didn't" -> "didnt", "follow-up" -> "followup"
        } else {
            out.push(' ');
        }
    }
    out.split_whitespace().map(str::to_string).collect()
}

/// Token sequence for `text` with stopwords removed, in text order.
pub fn preprocess(text: &str, cfg: &PreprocessConfig) -> Vec<String> {
    tokenize_with(text, cfg.lowercase, cfg.keep_digits)
        .into_iter()
        .filter(|t| !cfg.stopwords.contains(t))
        .collect()
}

/// Turns raw records into modelling documents: drops unlabelled records,
/// removes words below `min_count` corpus-wide and drops documents left
/// without tokens.
pub fn build_corpus(
    raws: &[RawDocument],
    cfg: &PreprocessConfig,
) -> Result<(Vec<Document>, Vocabulary)> {
    if cfg.min_count < 1 {
        return Err(Error::invalid("min_count must be at least 1"));
    }
    let tokenized: Vec<(&RawDocument, Vec<String>)> = raws
        .iter()
        .filter(|r| !r.emotions.is_empty())
        .map(|r| (r, preprocess(&r.text, cfg)))
        .collect();

    let mut totals: HashMap<&str, u64> = HashMap::new();
    for (_, tokens) in &tokenized {
        for t in tokens {
            *totals.entry(t.as_str()).or_insert(0) += 1;
        }
    }
    let kept: BTreeMap<String, u64> = totals
        .into_iter()
        .filter(|&(_, c)| c >= cfg.min_count)
        .map(|(w, c)| (w.to_string(), c))
        .collect();

    let mut docs = Vec::new();
    for (raw, tokens) in &tokenized {
        let mut bow = BTreeMap::new();
        for t in tokens {
            if kept.contains_key(t) {
                *bow.entry(t.clone()).or_insert(0u32) += 1;
            }
        }
        if bow.is_empty() {
            continue;
        }
        docs.push(Document {
            id: raw.id.clone(),
            bow,
            emotions: raw.emotions.clone(),
        });
    }
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok((docs, Vocabulary::from_counts(kept)))
}

/// Counts tokens of `text` that survive preprocessing, keyed by word.
pub fn bag_of_words(tokens: &[String]) -> BTreeMap<String, u32> {
    let mut bow = BTreeMap::new();
    for t in tokens {
        *bow.entry(t.clone()).or_insert(0) += 1;
    }
    bow
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SentimentClass {
    Positive,
    Negative,
    Mixed,
    None,
}

impl SentimentClass {
    pub const ALL: [SentimentClass; 4] = [
        SentimentClass::Positive,
        SentimentClass::Negative,
        SentimentClass::Mixed,
        SentimentClass::None,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SentimentClass::Positive => "Positive",
            SentimentClass::Negative => "Negative",
            SentimentClass::Mixed => "Mixed",
            SentimentClass::None => "None",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub class: SentimentClass,
    /// Mean fraction of positive tags per post; absent for untagged posts.
    pub positivity: Option<f64>,
    pub count: usize,
    pub proportion: f64,
    pub tags_per_post: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentSummary {
    pub total: usize,
    pub rows: Vec<SummaryRow>,
}

impl SentimentSummary {
    pub fn row(&self, class: SentimentClass) -> &SummaryRow {
        self.rows
            .iter()
            .find(|r| r.class == class)
            .expect("summary has every class")
    }
}

/// Positive/negative/mixed/untagged breakdown of the raw (pre-filter) corpus.
pub fn sentiment_summary(raws: &[RawDocument], pol: &PolarityMap) -> Result<SentimentSummary> {
    #[derive(Default)]
    struct Acc {
        count: usize,
        positivity: f64,
        tags: usize,
    }
    let mut acc: BTreeMap<SentimentClass, Acc> = BTreeMap::new();
    for raw in raws {
        let mut pos = 0usize;
        for e in &raw.emotions {
            if pol.require(e)? == Polarity::Positive {
                pos += 1;
            }
        }
        let n = raw.emotions.len();
        let class = if n == 0 {
            SentimentClass::None
        } else if pos == n {
            SentimentClass::Positive
        } else if pos == 0 {
            SentimentClass::Negative
        } else {
            SentimentClass::Mixed
        };
        let a = acc.entry(class).or_default();
        a.count += 1;
        a.tags += n;
        if n > 0 {
            a.positivity += pos as f64 / n as f64;
        }
    }
    let total = raws.len();
    let rows = SentimentClass::ALL
        .iter()
        .map(|&class| {
            let a = acc.remove(&class).unwrap_or_default();
            let mean = |x: f64| if a.count == 0 { 0.0 } else { x / a.count as f64 };
            SummaryRow {
                class,
                positivity: (class != SentimentClass::None && a.count > 0)
                    .then(|| mean(a.positivity)),
                count: a.count,
                proportion: if total == 0 { 0.0 } else { a.count as f64 / total as f64 },
                tags_per_post: mean(a.tags as f64),
            }
        })
        .collect();
    Ok(SentimentSummary { total, rows })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankedEmotion {
    pub emotion: String,
    pub count: usize,
    pub rank: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankFrequency {
    pub positive: Vec<RankedEmotion>,
    pub negative: Vec<RankedEmotion>,
}

/// Emotion tag counts ranked within each polarity (descending count, ties by
/// label).
pub fn rank_frequency(docs: &[Document], pol: &PolarityMap) -> Result<RankFrequency> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in docs {
        for e in &doc.emotions {
            *counts.entry(e.as_str()).or_insert(0) += 1;
        }
    }
    let mut out = RankFrequency::default();
    for (polarity, list) in [
        (Polarity::Positive, &mut out.positive),
        (Polarity::Negative, &mut out.negative),
    ] {
        let mut side = Vec::new();
        for (&e, &c) in &counts {
            if pol.require(e)? == polarity {
                side.push((e, c));
            }
        }
        side.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        *list = side
            .into_iter()
            .enumerate()
            .map(|(i, (e, c))| RankedEmotion {
                emotion: e.to_string(),
                count: c,
                rank: i + 1,
            })
            .collect();
    }
    Ok(out)
}

pub const UNKNOWN_BUCKET: &str = "unknown";

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivityReport {
    /// Keyed by `YYYY-MM`, or [`UNKNOWN_BUCKET`].
    pub by_month: BTreeMap<String, usize>,
    pub by_region: BTreeMap<String, usize>,
}

pub fn activity_report(raws: &[RawDocument]) -> ActivityReport {
    let mut report = ActivityReport::default();
    for raw in raws {
        let month = raw
            .date
            .map(|d| format!("{:04}-{:02}", d.year(), d.month()))
            .unwrap_or_else(|| UNKNOWN_BUCKET.to_string());
        *report.by_month.entry(month).or_insert(0) += 1;
        let region = raw
            .region
            .clone()
            .unwrap_or_else(|| UNKNOWN_BUCKET.to_string());
        *report.by_region.entry(region).or_insert(0) += 1;
    }
    report
}
