//! Intrinsic evaluation of embeddings.
//!
//! Items that mention an out-of-vocabulary token are skipped and counted,
//! never scored against a substitute vector.

mod datasets;
mod metrics;
mod projection;
mod tasks;

pub use datasets::{
    parse_analogy, parse_choice, parse_similarity, AnalogyDataset, AnalogyItem, ChoiceDataset, ChoiceItem,
    SimilarityDataset, SimilarityItem,
};
pub use metrics::{cosine, spearman, ZERO_NORM};
pub use projection::{project_2d, ProjectedPoint};
pub use tasks::{eval_analogy, eval_choice, eval_similarity, AnalogyDirection, EvalScore};
