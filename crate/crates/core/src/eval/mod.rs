//! Evaluation: fold splitting, graded-relevance ranking metrics, exact-match
//! rank metrics, binary sentiment metrics, baselines and the cross-validation
//! driver.

pub mod baselines;
pub mod binary;
pub mod cv;
pub mod folds;
pub mod graded;
pub mod rank;

pub use baselines::{lexicon_classify, mle_baseline, uniform_baseline, Lexicon};
pub use binary::{binary_metrics, BinaryMetrics};
pub use cv::{run_cv, CvConfig, MetricReport};
pub use folds::{kfold_split, FoldAssignment};
pub use graded::{gain, ndcg, q_measure, relevance, RelevanceContext};
pub use rank::{interpolated_precision, recall_at_k, Query};
