//! File formats, IO, and orchestration for the `topiclens` pipeline.
//!
//! The algorithms live in [`topiclens_core`]; this crate adds corpus and
//! model files, report writers, configuration, and the command-line front
//! end. Every output file embeds a [`files::Manifest`] with input digests so
//! results are reproducible.

pub mod config;
pub mod corpus_io;
pub mod error;
pub mod files;
pub mod model_io;
pub mod reports;
pub mod resources;

pub use topiclens_core as core;

use rayon::prelude::*;

use topiclens_core::{Corpus, Preprocessor, Segmenter, TokenizedPost};

/// Environment variable capping worker parallelism (0 = auto).
pub const THREADS_ENV: &str = "TOPICLENS_THREADS";

/// Configures the global worker pool from [`THREADS_ENV`]. Call once at
/// startup; later calls are ignored.
pub fn init_thread_pool() {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| match v.parse::<usize>() {
            Ok(n) => Some(n),
            Err(_) => {
                log::warn!("ignoring non-numeric {THREADS_ENV}={v:?}");
                None
            }
        })
        .unwrap_or(0);
    if threads > 0 {
        if let Err(err) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            log::warn!("thread pool already initialized: {err}");
        }
    }
}

/// Preprocesses all posts, in parallel, preserving corpus order.
pub fn tokenize_corpus<S: Segmenter + Sync>(
    corpus: &Corpus,
    preprocessor: &Preprocessor<S>,
) -> Vec<TokenizedPost> {
    corpus.posts.par_iter().map(|post| preprocessor.process(post)).collect()
}
