//! Context-specific emotion recommendation over free-text documents.
//!
//! Documents are reduced to topic densities through a word partition and fed
//! to a naive Bayes posterior over emotion labels. The crate also carries the
//! evaluation machinery (graded relevance, Q-measure, nDCG, binary sentiment
//! metrics, k-fold cross-validation) and the report writers used by the CLI.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod fmt;
pub mod model;
pub mod predict;
pub mod report;
pub mod topics;

pub use corpus::{
    Document, PolarityMap, Polarity, PreprocessConfig, RawDocument, Vocabulary,
};
pub use error::{Error, Result};
pub use model::{EmotionModel, RankedPrediction, Variant};
pub use topics::{EmotionTopicProfile, TopicDensity, TopicPartition};
