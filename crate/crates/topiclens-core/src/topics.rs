//! Hierarchical clustering of hashtag vectors and topic extraction.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::TagMode;
use crate::error::{Error, Result};
use crate::preprocess::TokenizedPost;
use crate::vectorize::{
    build_hashtag_documents, build_vocabulary, tfidf, top_terms, HashtagDocument, TermSelection,
    TermVector, Vocabulary, DEFAULT_TERMS_PER_VECTOR,
};

/// Cosine distance between two non-negative sparse vectors: 0 means same
/// direction, 1 means orthogonal. An all-zero vector is at distance 1 from
/// everything. Clamped to `[0, 1]`.
///
/// ```
/// use topiclens_core::{cosine_distance, TermVector};
///
/// let u = TermVector::from_entries([("新闻".to_string(), 1.0)]);
/// let v = TermVector::from_entries([("音乐".to_string(), 2.0)]);
/// assert_eq!(cosine_distance(&u, &v), 1.0);
/// assert!(cosine_distance(&u, &u) < 1e-12);
/// ```
pub fn cosine_distance(u: &TermVector, v: &TermVector) -> f64 {
    let nu = u.norm();
    let nv = v.norm();
    if nu == 0.0 || nv == 0.0 {
        return 1.0;
    }
    let d = 1.0 - u.dot(v) / (nu * nv);
    d.clamp(0.0, 1.0)
}

/// One merge step; nodes `0..n` are leaves, node `n + i` is merge `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    /// Cosine distance between the merged clusters under average linkage.
    pub height: f64,
}

/// Binary merge tree over labeled leaves, produced by [`agglomerate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    labels: Vec<String>,
    merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn n_leaves(&self) -> usize {
        self.labels.len()
    }

    /// Root node id: the last merge, or the sole leaf.
    pub fn root(&self) -> usize {
        if self.merges.is_empty() {
            0
        } else {
            self.labels.len() + self.merges.len() - 1
        }
    }

    fn children(&self, node: usize) -> Option<(usize, usize)> {
        let n = self.labels.len();
        if node < n {
            None
        } else {
            let m = self.merges[node - n];
            Some((m.left, m.right))
        }
    }

    /// Leaf label indices under `node`, ascending.
    fn leaf_indices(&self, node: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = alloc::vec![node];
        while let Some(cur) = stack.pop() {
            match self.children(cur) {
                None => out.push(cur),
                Some((l, r)) => {
                    stack.push(l);
                    stack.push(r);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Average-linkage (UPGMA) agglomerative clustering over pairwise cosine
/// distances of the input vectors.
///
/// Tied minimum distances merge the pair whose smallest member label is
/// lexicographically least, then by the other cluster's smallest label, so
/// the result is independent of input order.
pub fn agglomerate(items: &[(String, TermVector)]) -> Result<Dendrogram> {
    let labels: Vec<String> = items.iter().map(|(l, _)| l.clone()).collect();
    let n = items.len();
    let mut condensed = Vec::with_capacity(n.saturating_sub(1) * n / 2);
    for i in 0..n {
        for j in i + 1..n {
            condensed.push(cosine_distance(&items[i].1, &items[j].1));
        }
    }
    agglomerate_with_distances(labels, &condensed)
}

struct Cluster {
    node: usize,
    size: usize,
    /// Index into the label list of the lexicographically smallest member.
    anchor: usize,
}

fn pair_key<'a>(labels: &'a [String], a: &Cluster, b: &Cluster, d: f64) -> (f64, &'a str, &'a str) {
    let la = labels[a.anchor].as_str();
    let lb = labels[b.anchor].as_str();
    if la <= lb {
        (d, la, lb)
    } else {
        (d, lb, la)
    }
}

/// Same as [`agglomerate`] but over a precomputed condensed distance matrix
/// (upper triangle, row-major: `d(0,1), d(0,2), ..., d(n-2,n-1)`).
#[allow(clippy::needless_range_loop)] // symmetric matrix updates read cleaner with indices
pub fn agglomerate_with_distances(labels: Vec<String>, condensed: &[f64]) -> Result<Dendrogram> {
    let n = labels.len();
    if n == 0 {
        return Err(Error::EmptyInput("cluster input"));
    }
    let expected = n * (n - 1) / 2;
    if condensed.len() != expected {
        return Err(Error::DistanceLengthMismatch {
            labels: n,
            expected,
            got: condensed.len(),
        });
    }
    if condensed.iter().any(|d| !d.is_finite() || *d < 0.0) {
        return Err(Error::InvalidParameter {
            name: "condensed",
            reason: "distances must be finite and non-negative",
        });
    }
    {
        let mut seen = BTreeSet::new();
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
    }

    let mut active: Vec<Cluster> =
        (0..n).map(|i| Cluster { node: i, size: 1, anchor: i }).collect();
    // dist[i][j] between active slots; only i != j is read.
    let mut dist: Vec<Vec<f64>> = alloc::vec![alloc::vec![0.0; n]; n];
    {
        let mut it = condensed.iter();
        for i in 0..n {
            for j in i + 1..n {
                let d = *it.next().unwrap();
                dist[i][j] = d;
                dist[j][i] = d;
            }
        }
    }

    let mut merges = Vec::with_capacity(n - 1);
    while active.len() > 1 {
        // Find the minimum-distance pair; ties resolve on the pair's ordered
        // anchor labels, which are unique across clusters.
        let mut best: Option<(usize, usize)> = None;
        for i in 0..active.len() {
            for j in i + 1..active.len() {
                let better = match best {
                    None => true,
                    Some((bi, bj)) => {
                        pair_key(&labels, &active[i], &active[j], dist[i][j])
                            < pair_key(&labels, &active[bi], &active[bj], dist[bi][bj])
                    }
                };
                if better {
                    best = Some((i, j));
                }
            }
        }
        let (i, j) = best.unwrap();
        let (si, sj) = (active[i].size as f64, active[j].size as f64);
        let height = dist[i][j];
        merges.push(Merge { left: active[i].node, right: active[j].node, height });

        // Average-linkage update of slot i to the merged cluster.
        for k in 0..active.len() {
            if k != i && k != j {
                let d = (si * dist[i][k] + sj * dist[j][k]) / (si + sj);
                dist[i][k] = d;
                dist[k][i] = d;
            }
        }
        active[i] = Cluster {
            node: n + merges.len() - 1,
            size: (si + sj) as usize,
            anchor: if labels[active[i].anchor] <= labels[active[j].anchor] {
                active[i].anchor
            } else {
                active[j].anchor
            },
        };
        // Drop slot j everywhere.
        let last = active.len() - 1;
        for row in dist.iter_mut().take(active.len()) {
            row.swap(j, last);
            row.truncate(last);
        }
        dist.swap(j, last);
        dist.truncate(last);
        active.swap_remove(j);
    }
    Ok(Dendrogram { labels, merges })
}

/// Extracts topic hashtag sets from a dendrogram.
///
/// Starting at the root, each split emits the child with fewer leaves and
/// descends into the larger one; on equal sizes the child holding the
/// lexicographically smallest label continues. The final leaf is emitted
/// last. The output partitions the leaf set.
pub fn divisive_cut(dendrogram: &Dendrogram) -> Vec<BTreeSet<String>> {
    let label_set = |node: usize| -> BTreeSet<String> {
        dendrogram
            .leaf_indices(node)
            .into_iter()
            .map(|i| dendrogram.labels()[i].clone())
            .collect()
    };
    let mut cuts = Vec::new();
    let mut current = dendrogram.root();
    loop {
        match dendrogram.children(current) {
            None => {
                cuts.push(label_set(current));
                return cuts;
            }
            Some((left, right)) => {
                let ls = label_set(left);
                let rs = label_set(right);
                let left_continues = rs.len() < ls.len()
                    || (rs.len() == ls.len() && ls.iter().next() <= rs.iter().next());
                let (emit, keep_node) = if left_continues { (rs, left) } else { (ls, right) };
                cuts.push(emit);
                current = keep_node;
            }
        }
    }
}

/// How topic centroids are derived from their member hashtags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CentroidMode {
    /// Component-wise mean of the member hashtag vectors.
    #[default]
    Mean,
    /// Fresh top-terms vector over the merged term counts of the member
    /// hashtag documents.
    ReTop,
}

impl CentroidMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CentroidMode::Mean => "mean",
            CentroidMode::ReTop => "retop10",
        }
    }

    pub fn parse(s: &str) -> Option<CentroidMode> {
        match s {
            "mean" => Some(CentroidMode::Mean),
            "retop10" => Some(CentroidMode::ReTop),
            _ => None,
        }
    }
}

/// A cluster of hashtags with its centroid vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Topic {
    pub id: u32,
    pub hashtags: BTreeSet<String>,
    pub centroid: TermVector,
    /// Member hashtags joined by `|` in lexicographic order.
    pub label: String,
    /// Total post count of the member hashtag documents; used to rank topics
    /// by popularity.
    pub post_count: u64,
}

/// Builds one topic per cut set, numbered in emission order.
pub fn make_topics(
    cuts: &[BTreeSet<String>],
    docs: &[HashtagDocument],
    vectors: &BTreeMap<String, TermVector>,
    mode: CentroidMode,
    idf: &BTreeMap<String, f64>,
    terms_per_vector: usize,
) -> Result<Vec<Topic>> {
    let by_tag: BTreeMap<&str, &HashtagDocument> =
        docs.iter().map(|d| (d.hashtag.as_str(), d)).collect();
    let mut topics = Vec::with_capacity(cuts.len());
    for (id, cut) in cuts.iter().enumerate() {
        if cut.is_empty() {
            return Err(Error::EmptyCut);
        }
        let centroid = match mode {
            CentroidMode::Mean => {
                let members: Vec<&TermVector> = cut
                    .iter()
                    .map(|tag| vectors.get(tag).ok_or_else(|| Error::MissingVector(tag.clone())))
                    .collect::<Result<_>>()?;
                mean_vector(&members)
            }
            CentroidMode::ReTop => {
                let mut merged = HashtagDocument {
                    hashtag: String::new(),
                    term_counts: BTreeMap::new(),
                    post_count: 0,
                };
                for tag in cut {
                    let doc = by_tag
                        .get(tag.as_str())
                        .ok_or_else(|| Error::MissingDocument(tag.clone()))?;
                    merged.post_count += doc.post_count;
                    for (term, count) in &doc.term_counts {
                        *merged.term_counts.entry(term.clone()).or_insert(0) += count;
                    }
                }
                let weights: BTreeMap<String, f64> = merged
                    .term_counts
                    .iter()
                    .map(|(term, &count)| {
                        (term.clone(), count as f64 * idf.get(term).copied().unwrap_or(0.0))
                    })
                    .collect();
                top_terms(&merged, &weights, terms_per_vector, TermSelection::Frequency)
            }
        };
        let mut label = String::new();
        for (i, tag) in cut.iter().enumerate() {
            if i > 0 {
                label.push('|');
            }
            label.push_str(tag);
        }
        let post_count = cut
            .iter()
            .map(|tag| by_tag.get(tag.as_str()).map_or(0, |d| d.post_count))
            .sum();
        topics.push(Topic { id: id as u32, hashtags: cut.clone(), centroid, label, post_count });
    }
    Ok(topics)
}

fn mean_vector(members: &[&TermVector]) -> TermVector {
    let m = members.len() as f64;
    let mut sums: BTreeMap<String, f64> = BTreeMap::new();
    for vector in members {
        for (term, w) in vector.iter() {
            *sums.entry(String::from(term)).or_insert(0.0) += w;
        }
    }
    TermVector::from_entries(sums.into_iter().map(|(t, s)| (t, s / m)))
}

/// Knobs of the model-building pipeline, snapshotted into the model.
#[derive(Debug, Clone, PartialEq)]
pub struct BuildConfig {
    pub tag_mode: TagMode,
    /// Number of hashtags kept (by post count).
    pub top_tags: usize,
    /// Number of topics considered in rankings and comparisons.
    pub top_topics: usize,
    /// Terms kept per tag vector.
    pub terms_per_vector: usize,
    pub selection: TermSelection,
    pub centroid: CentroidMode,
    /// Assignment distance threshold.
    pub threshold: f64,
    /// Seed recorded for synthetic corpora; the build itself is
    /// deterministic.
    pub seed: u64,
}

impl Default for BuildConfig {
    fn default() -> BuildConfig {
        BuildConfig {
            tag_mode: TagMode::Prefix,
            top_tags: 100,
            top_topics: 100,
            terms_per_vector: DEFAULT_TERMS_PER_VECTOR,
            selection: TermSelection::Frequency,
            centroid: CentroidMode::Mean,
            threshold: 0.9,
            seed: 0,
        }
    }
}

impl BuildConfig {
    pub fn validate(&self) -> Result<()> {
        if self.top_tags == 0 || self.top_topics == 0 {
            return Err(Error::InvalidParameter {
                name: "top_tags/top_topics",
                reason: "must be at least 1",
            });
        }
        if self.top_tags < self.top_topics {
            return Err(Error::InvalidParameter {
                name: "top_topics",
                reason: "must not exceed top_tags",
            });
        }
        if self.terms_per_vector == 0 {
            return Err(Error::InvalidParameter {
                name: "terms_per_vector",
                reason: "must be at least 1",
            });
        }
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "threshold",
                reason: "must be in (0, 1]",
            });
        }
        Ok(())
    }
}

/// A trained topic model: topics with centroids over a shared vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicModel {
    pub platform: String,
    /// Union of the topic centroid terms.
    pub vocabulary: Vocabulary,
    /// `ln(D / df)` per vocabulary term, from the build corpus.
    pub idf: BTreeMap<String, f64>,
    pub topics: Vec<Topic>,
    /// Assignment distance threshold.
    pub threshold: f64,
    pub config: BuildConfig,
}

impl TopicModel {
    /// The topic owning `tag`, if any. Topic hashtag sets are disjoint, so
    /// there is at most one.
    pub fn topic_of_tag(&self, tag: &str) -> Option<u32> {
        self.topics.iter().find(|t| t.hashtags.contains(tag)).map(|t| t.id)
    }

    /// Topics ordered by descending post count, ties by ascending id,
    /// truncated to `top_k`. Logs a warning when fewer are available.
    pub fn top_topics(&self, top_k: usize) -> Vec<&Topic> {
        if self.topics.len() < top_k {
            log::warn!(
                "requested top {top_k} topics but model only has {}",
                self.topics.len()
            );
        }
        let mut ranked: Vec<&Topic> = self.topics.iter().collect();
        ranked.sort_by(|a, b| {
            b.post_count.cmp(&a.post_count).then_with(|| a.id.cmp(&b.id))
        });
        ranked.truncate(top_k);
        ranked
    }
}

/// Runs the whole model-building pipeline over tokenized posts.
pub fn build_model(
    posts: &[TokenizedPost],
    platform: &str,
    config: &BuildConfig,
) -> Result<TopicModel> {
    build_model_with_dendrogram(posts, platform, config).map(|(model, _)| model)
}

/// Like [`build_model`], but also returns the tag merge tree for export.
pub fn build_model_with_dendrogram(
    posts: &[TokenizedPost],
    platform: &str,
    config: &BuildConfig,
) -> Result<(TopicModel, Dendrogram)> {
    config.validate()?;
    let docs = build_hashtag_documents(posts, config.top_tags);
    if docs.is_empty() {
        return Err(Error::EmptyInput("hashtag documents"));
    }
    let weights = tfidf(&docs)?;
    let vectors: BTreeMap<String, TermVector> = docs
        .iter()
        .zip(&weights.per_doc)
        .map(|(doc, w)| {
            (
                doc.hashtag.clone(),
                top_terms(doc, w, config.terms_per_vector, config.selection),
            )
        })
        .collect();
    let items: Vec<(String, TermVector)> =
        vectors.iter().map(|(tag, v)| (tag.clone(), v.clone())).collect();
    let dendrogram = agglomerate(&items)?;
    let cuts = divisive_cut(&dendrogram);
    let topics = make_topics(
        &cuts,
        &docs,
        &vectors,
        config.centroid,
        &weights.idf,
        config.terms_per_vector,
    )?;
    let centroids: Vec<TermVector> = topics.iter().map(|t| t.centroid.clone()).collect();
    let vocabulary = build_vocabulary(&centroids);
    let idf = vocabulary
        .terms
        .iter()
        .filter_map(|term| weights.idf.get(term).map(|&w| (term.clone(), w)))
        .collect();
    let model = TopicModel {
        platform: String::from(platform),
        vocabulary,
        idf,
        topics,
        threshold: config.threshold,
        config: config.clone(),
    };
    Ok((model, dendrogram))
}
