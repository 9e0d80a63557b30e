//! Hashtag documents, TF-IDF weighting, and sparse top-term vectors.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::error::{Error, Result};
use crate::preprocess::TokenizedPost;

/// Number of terms kept per vector by default.
pub const DEFAULT_TERMS_PER_VECTOR: usize = 10;

/// All tokens of all posts sharing one hashtag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashtagDocument {
    pub hashtag: String,
    /// Aggregated token counts over member posts.
    pub term_counts: BTreeMap<String, u64>,
    /// Number of posts carrying the hashtag.
    pub post_count: u64,
}

/// Sparse term→weight map; absent terms are zero. Zero weights are never
/// stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TermVector {
    entries: BTreeMap<String, f64>,
}

impl TermVector {
    /// Builds a vector, dropping zero-weight entries. Weights must be
    /// non-negative and finite.
    pub fn from_entries(entries: impl IntoIterator<Item = (String, f64)>) -> TermVector {
        let entries: BTreeMap<String, f64> = entries
            .into_iter()
            .inspect(|(term, w)| {
                debug_assert!(w.is_finite() && *w >= 0.0, "bad weight {w} for {term:?}")
            })
            .filter(|(_, w)| *w != 0.0)
            .collect();
        TermVector { entries }
    }

    pub fn get(&self, term: &str) -> f64 {
        self.entries.get(term).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(t, w)| (t.as_str(), *w))
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Dot product over the shared terms, accumulated in term order so the
    /// result is bitwise symmetric.
    pub fn dot(&self, other: &TermVector) -> f64 {
        let mut sum = 0.0;
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        for (term, w) in small.iter() {
            sum += w * large.get(term);
        }
        sum
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        libm::sqrt(self.entries.values().map(|w| w * w).sum())
    }
}

/// Ordered term set spanning a model's vector space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    /// Sorted, duplicate-free.
    pub terms: Vec<String>,
    /// Number of vectors the union was built from.
    pub n_sources: usize,
}

impl Vocabulary {
    pub fn contains(&self, term: &str) -> bool {
        self.terms.binary_search_by(|t| t.as_str().cmp(term)).is_ok()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// How [`top_terms`] picks the terms it keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TermSelection {
    /// Highest raw count first. The kept terms still carry TF-IDF weights.
    #[default]
    Frequency,
    /// Highest TF-IDF weight first.
    Tfidf,
}

impl TermSelection {
    pub fn as_str(self) -> &'static str {
        match self {
            TermSelection::Frequency => "frequency",
            TermSelection::Tfidf => "tfidf",
        }
    }

    pub fn parse(s: &str) -> Option<TermSelection> {
        match s {
            "frequency" => Some(TermSelection::Frequency),
            "tfidf" => Some(TermSelection::Tfidf),
            _ => None,
        }
    }
}

/// TF-IDF weights for a document collection.
#[derive(Debug, Clone, PartialEq)]
pub struct TfidfWeights {
    /// Per-document term→weight maps, parallel to the input documents.
    /// Zero weights (terms present in every document) are kept here; they are
    /// dropped only when vectors are built.
    pub per_doc: Vec<BTreeMap<String, f64>>,
    /// Corpus-level `ln(D / df)` per term.
    pub idf: BTreeMap<String, f64>,
    pub doc_count: usize,
}

/// Merges posts into one document per hashtag and keeps the `top_n` most
/// posted ones.
///
/// A post with several hashtags contributes its tokens to every one of them.
/// Selection is by descending post count, ties broken by hashtag order. When
/// fewer than `top_n` hashtags exist, all are returned and a warning is
/// logged.
pub fn build_hashtag_documents(posts: &[TokenizedPost], top_n: usize) -> Vec<HashtagDocument> {
    let mut docs: BTreeMap<&str, HashtagDocument> = BTreeMap::new();
    for post in posts {
        for tag in &post.hashtags {
            let doc = docs.entry(tag.as_str()).or_insert_with(|| HashtagDocument {
                hashtag: tag.clone(),
                term_counts: BTreeMap::new(),
                post_count: 0,
            });
            doc.post_count += 1;
            for token in &post.tokens {
                *doc.term_counts.entry(token.surface.clone()).or_insert(0) += 1;
            }
        }
    }
    let mut docs: Vec<HashtagDocument> = docs.into_values().collect();
    if docs.len() < top_n {
        log::warn!("requested top {top_n} hashtags but corpus only has {}", docs.len());
    }
    docs.sort_by(|a, b| {
        Reverse(a.post_count).cmp(&Reverse(b.post_count)).then_with(|| a.hashtag.cmp(&b.hashtag))
    });
    docs.truncate(top_n);
    docs
}

/// Computes `count * ln(D / df)` for every term of every document.
pub fn tfidf(docs: &[HashtagDocument]) -> Result<TfidfWeights> {
    if docs.is_empty() {
        return Err(Error::EmptyInput("document list"));
    }
    let doc_count = docs.len();
    let mut df: BTreeMap<&str, u64> = BTreeMap::new();
    for doc in docs {
        for term in doc.term_counts.keys() {
            *df.entry(term).or_insert(0) += 1;
        }
    }
    let idf: BTreeMap<String, f64> = df
        .into_iter()
        .map(|(term, df)| (String::from(term), libm::log(doc_count as f64 / df as f64)))
        .collect();
    let per_doc = docs
        .iter()
        .map(|doc| {
            doc.term_counts
                .iter()
                .map(|(term, &count)| (term.clone(), count as f64 * idf[term]))
                .collect()
        })
        .collect();
    Ok(TfidfWeights { per_doc, idf, doc_count })
}

/// Keeps up to `k` terms of `doc` and returns them with their TF-IDF weights.
///
/// Under [`TermSelection::Frequency`] terms are picked by descending raw
/// count, under [`TermSelection::Tfidf`] by descending weight; ties break by
/// term order. Selected terms whose weight is zero are dropped from the
/// vector.
pub fn top_terms(
    doc: &HashtagDocument,
    weights: &BTreeMap<String, f64>,
    k: usize,
    selection: TermSelection,
) -> TermVector {
    let mut terms: Vec<(&String, u64)> = doc.term_counts.iter().map(|(t, &c)| (t, c)).collect();
    match selection {
        TermSelection::Frequency => {
            terms.sort_by(|a, b| Reverse(a.1).cmp(&Reverse(b.1)).then_with(|| a.0.cmp(b.0)));
        }
        TermSelection::Tfidf => {
            let weight = |t: &String| weights.get(t).copied().unwrap_or(0.0);
            terms.sort_by(|a, b| {
                weight(b.0).total_cmp(&weight(a.0)).then_with(|| a.0.cmp(b.0))
            });
        }
    }
    TermVector::from_entries(
        terms
            .into_iter()
            .take(k)
            .map(|(term, _)| (term.clone(), weights.get(term).copied().unwrap_or(0.0))),
    )
}

/// Union of all entry terms, sorted.
pub fn build_vocabulary(vectors: &[TermVector]) -> Vocabulary {
    let union: BTreeSet<&str> = vectors.iter().flat_map(|v| v.terms()).collect();
    Vocabulary {
        terms: union.into_iter().map(String::from).collect(),
        n_sources: vectors.len(),
    }
}
