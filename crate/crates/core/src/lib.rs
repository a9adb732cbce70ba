//! Retrofitting pre-trained word embeddings to semantic lexicon graphs.
//!
//! Vectors are pulled toward their lexicon neighbors while staying anchored
//! to their original positions, by repeated in-place sweeps of a weighted
//! averaging update. The crate also contains an exact dense solver for the
//! same fixed point, a lexicon prior with its gradient for training-time use,
//! and intrinsic evaluation (word similarity, analogies, synonym choice, PCA).
//!
//! All numeric code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar type for the common case.

pub mod embeddings;
pub mod error;
pub mod eval;
pub mod lexicon;
pub mod prior;
pub mod retrofit;
pub mod scalar;

pub use embeddings::{
    read_embeddings, write_embeddings, DuplicatePolicy, EmbeddingMatrix, LoadedEmbeddings, Vocabulary,
};
pub use error::{Error, Result};
pub use lexicon::{parse_lexicon, restrict_to_vocab, GraphStats, LexiconGraph, RestrictedGraph};
pub use retrofit::{
    max_adjacent_change, objective, retrofit, solve_exact, EdgeWeight, RetrofitConfig, Retrofitted, WeightScheme,
};
pub use scalar::Real;

pub type Embeddings = EmbeddingMatrix<f64>;
pub type Embeddings32 = EmbeddingMatrix<f32>;
pub type Weights = WeightScheme<f64>;
pub type Config = RetrofitConfig<f64>;
pub type Prior = prior::PriorConfig<f64>;
