//! Hashtag-seeded topic detection for microblog corpora.
//!
//! The pipeline turns a corpus of short posts into a topic model and then
//! classifies further posts against it:
//!
//! 1. [`corpus`] — post data model and hashtag extraction.
//! 2. [`preprocess`] — text normalization, traditional→simplified conversion,
//!    dictionary-based word segmentation, and part-of-speech filtering.
//! 3. [`vectorize`] — per-hashtag documents, TF-IDF, and sparse top-term
//!    vectors.
//! 4. [`topics`] — average-linkage hierarchical clustering of tag vectors and
//!    divisive extraction of topic clusters with centroids.
//! 5. [`assign`] — nearest-centroid classification of posts with a distance
//!    threshold, plus threshold calibration.
//! 6. [`compare`] — cross-corpus analytics: centroid distance matrices, CDFs,
//!    coverage fractions, rankings, and Kendall rank correlation.
//! 7. [`synth`] — seeded generators for corpora with planted topics and
//!    ground truth, used by the validation suites.
//!
//! The crate is `no_std` (with `alloc`); all float math goes through `libm`
//! so results are identical regardless of the host math library. File
//! formats, IO, and the command-line front end live in the companion
//! `topiclens` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(any(feature = "std", test))]
extern crate std;

pub mod assign;
pub mod compare;
pub mod corpus;
pub mod error;
pub mod preprocess;
pub mod synth;
pub mod topics;
pub mod vectorize;

pub use assign::{assign_post, calibrate, post_vector, Assignment, CalibrationReport, Via};
pub use compare::{
    cross_coverage, cross_matrix, distance_cdf, kendall_tau, rank_topics, rerank_deleted,
    Coverage, DistanceCdf, DistanceMatrix, TopicRanking,
};
pub use corpus::{extract_hashtags, filter_deleted, Corpus, Microblog, TagMode};
pub use error::{Error, Result};
pub use preprocess::{
    filter_tokens, normalize, segment_maxmatch, Dictionary, MaxMatchSegmenter, Pos, Preprocessor,
    Segmenter, Simplifier, Token, TokenizedPost,
};
pub use synth::{generate, generate_pair, GroundTruth, SynthSpec};
pub use topics::{
    agglomerate, agglomerate_with_distances, build_model, build_model_with_dendrogram,
    cosine_distance, divisive_cut, make_topics, BuildConfig, CentroidMode, Dendrogram, Merge,
    Topic, TopicModel,
};
pub use vectorize::{
    build_hashtag_documents, build_vocabulary, tfidf, top_terms, HashtagDocument, TermSelection,
    TermVector, TfidfWeights, Vocabulary,
};

/// Crate version, embedded into model and report files by the CLI.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
