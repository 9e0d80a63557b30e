//! Cross-corpus analytics over two topic models.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::assign::{assign_post, Via};
use crate::error::{Error, Result};
use crate::preprocess::TokenizedPost;
use crate::topics::{cosine_distance, TopicModel};

/// Pairwise centroid distances between the top topics of two models.
/// Vectors are joined on exact term equality, so both models must come out
/// of the same preprocessing settings.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    pub row_ids: Vec<u32>,
    pub col_ids: Vec<u32>,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    /// Row-major, `row_ids.len() * col_ids.len()` values in `[0, 1]`.
    pub values: Vec<f64>,
}

impl DistanceMatrix {
    pub fn n_rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn n_cols(&self) -> usize {
        self.col_ids.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.n_cols() + col]
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Minimum distance in each row; the best foreign match per topic.
    pub fn row_minima(&self) -> Vec<f64> {
        (0..self.n_rows())
            .map(|r| {
                (0..self.n_cols())
                    .map(|c| self.get(r, c))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }
}

/// Centroid distance matrix between the `top_k` most-posted topics of each
/// model (ties by ascending topic id).
pub fn cross_matrix(
    model_a: &TopicModel,
    model_b: &TopicModel,
    top_k: usize,
) -> Result<DistanceMatrix> {
    if model_a.topics.is_empty() || model_b.topics.is_empty() {
        return Err(Error::EmptyInput("model topics"));
    }
    if top_k == 0 {
        return Err(Error::InvalidParameter { name: "top_k", reason: "must be at least 1" });
    }
    let rows = model_a.top_topics(top_k);
    let cols = model_b.top_topics(top_k);
    let mut values = Vec::with_capacity(rows.len() * cols.len());
    for a in &rows {
        for b in &cols {
            values.push(cosine_distance(&a.centroid, &b.centroid));
        }
    }
    Ok(DistanceMatrix {
        row_ids: rows.iter().map(|t| t.id).collect(),
        col_ids: cols.iter().map(|t| t.id).collect(),
        row_labels: rows.iter().map(|t| t.label.clone()).collect(),
        col_labels: cols.iter().map(|t| t.label.clone()).collect(),
        values,
    })
}

/// Cumulative distribution of matrix distances on a regular grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceCdf {
    /// `(grid point, fraction of cells <= grid point)`, non-decreasing,
    /// ending at exactly 1.
    pub points: Vec<(f64, f64)>,
    /// Fraction of cells strictly below 0.9.
    pub frac_below: f64,
}

/// Distance below which two topics count as overlapping in the headline
/// fraction.
pub const OVERLAP_DISTANCE: f64 = 0.9;

/// Empirical CDF of the matrix cells at `step` resolution, plus the strict
/// fraction below [`OVERLAP_DISTANCE`].
pub fn distance_cdf(matrix: &DistanceMatrix, step: f64) -> Result<DistanceCdf> {
    if matrix.is_empty() {
        return Err(Error::EmptyInput("distance matrix"));
    }
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidParameter { name: "step", reason: "must be in (0, 1]" });
    }
    let total = matrix.values.len() as f64;
    let n_points = libm::ceil(1.0 / step) as usize;
    let points = (0..=n_points)
        .map(|k| {
            let x = k as f64 * step;
            let below = matrix.values.iter().filter(|&&d| d <= x).count();
            (x, below as f64 / total)
        })
        .collect();
    let strict = matrix.values.iter().filter(|&&d| d < OVERLAP_DISTANCE).count();
    Ok(DistanceCdf { points, frac_below: strict as f64 / total })
}

/// How many foreign posts landed in the model, split by route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Coverage {
    pub posts: usize,
    pub covered: usize,
    pub via_tag: usize,
    pub via_centroid: usize,
}

impl Coverage {
    pub fn fraction(&self) -> f64 {
        self.covered as f64 / self.posts as f64
    }

    pub fn tag_fraction(&self) -> f64 {
        self.via_tag as f64 / self.posts as f64
    }

    pub fn centroid_fraction(&self) -> f64 {
        self.via_centroid as f64 / self.posts as f64
    }
}

/// Fraction of foreign posts assignable to the model's topics at threshold
/// `d_t`. Foreign hashtags normally never match, so coverage comes from the
/// centroid route; tag matches, if any, still count.
pub fn cross_coverage(
    model: &TopicModel,
    foreign_posts: &[TokenizedPost],
    d_t: f64,
) -> Result<Coverage> {
    if foreign_posts.is_empty() {
        return Err(Error::EmptyInput("foreign corpus"));
    }
    let mut coverage =
        Coverage { posts: foreign_posts.len(), covered: 0, via_tag: 0, via_centroid: 0 };
    for post in foreign_posts {
        let assignment = assign_post(post, model, d_t);
        match assignment.via {
            Via::Tag => {
                coverage.covered += 1;
                coverage.via_tag += 1;
            }
            Via::Centroid => {
                coverage.covered += 1;
                coverage.via_centroid += 1;
            }
            Via::Unknown => {}
        }
    }
    Ok(coverage)
}

/// Topics ordered by how many posts they received.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TopicRanking {
    /// `(topic id, post count)`, descending count, ties by ascending id.
    pub entries: Vec<(u32, u64)>,
}

impl TopicRanking {
    pub fn from_counts(counts: BTreeMap<u32, u64>) -> TopicRanking {
        let mut entries: Vec<(u32, u64)> = counts.into_iter().collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        TopicRanking { entries }
    }

    pub fn ids(&self) -> Vec<u32> {
        self.entries.iter().map(|&(id, _)| id).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Extends the ranking with zero counts for `ids` it does not mention,
    /// keeping the (count desc, id asc) order. Used to compare rankings over
    /// a common id set.
    pub fn extended_with_zeros(&self, ids: &[u32]) -> TopicRanking {
        let mut counts: BTreeMap<u32, u64> = ids.iter().map(|&id| (id, 0)).collect();
        for &(id, count) in &self.entries {
            counts.insert(id, count);
        }
        TopicRanking::from_counts(counts)
    }
}

/// Counts non-unknown assignments per topic.
pub fn rank_topics(assignments: &[crate::assign::Assignment]) -> TopicRanking {
    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    for assignment in assignments {
        if let Some(id) = assignment.topic_id {
            *counts.entry(id).or_insert(0) += 1;
        }
    }
    TopicRanking::from_counts(counts)
}

/// Kendall rank correlation (tau-a) between two strict rankings of the same
/// id set, with a two-sided p-value from the normal approximation.
///
/// ```
/// let (tau, _p) = topiclens_core::kendall_tau(&[1, 2, 3], &[2, 1, 3]).unwrap();
/// assert!((tau - 1.0 / 3.0).abs() < 1e-15);
/// ```
pub fn kendall_tau(rank_a: &[u32], rank_b: &[u32]) -> Result<(f64, f64)> {
    let n = rank_a.len();
    if n != rank_b.len() {
        return Err(Error::RankingMismatch);
    }
    if n < 2 {
        return Err(Error::RankingTooShort(n));
    }
    let positions = |rank: &[u32]| -> Result<BTreeMap<u32, usize>> {
        let mut map = BTreeMap::new();
        for (pos, &id) in rank.iter().enumerate() {
            if map.insert(id, pos).is_some() {
                return Err(Error::RankingMismatch);
            }
        }
        Ok(map)
    };
    let pos_a = positions(rank_a)?;
    let pos_b = positions(rank_b)?;
    if pos_a.keys().ne(pos_b.keys()) {
        return Err(Error::RankingMismatch);
    }

    let ids: Vec<u32> = pos_a.keys().copied().collect();
    let mut concordant: i64 = 0;
    let mut discordant: i64 = 0;
    for i in 0..n {
        for j in i + 1..n {
            let da = pos_a[&ids[i]] as i64 - pos_a[&ids[j]] as i64;
            let db = pos_b[&ids[i]] as i64 - pos_b[&ids[j]] as i64;
            if da * db > 0 {
                concordant += 1;
            } else {
                discordant += 1;
            }
        }
    }
    let pairs = (n * (n - 1) / 2) as f64;
    let tau = (concordant - discordant) as f64 / pairs;

    let nf = n as f64;
    let z = 3.0 * tau * libm::sqrt(nf * (nf - 1.0)) / libm::sqrt(2.0 * (2.0 * nf + 5.0));
    let p = libm::erfc(libm::fabs(z) / libm::sqrt(2.0));
    Ok((tau, p))
}

/// Assigns deleted posts against a (foreign) model and ranks its topics by
/// how many deleted posts they received.
pub fn rerank_deleted(
    model: &TopicModel,
    deleted_posts: &[TokenizedPost],
    d_t: f64,
) -> Result<TopicRanking> {
    if deleted_posts.is_empty() {
        return Err(Error::EmptyInput("deleted posts"));
    }
    let assignments: Vec<crate::assign::Assignment> =
        deleted_posts.iter().map(|post| assign_post(post, model, d_t)).collect();
    Ok(rank_topics(&assignments))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assign::Assignment;
    use crate::preprocess::{Pos, Token};
    use crate::topics::{BuildConfig, Topic};
    use crate::vectorize::{build_vocabulary, TermVector};
    use alloc::collections::BTreeSet;
    use alloc::vec;

    fn vector(entries: &[(&str, f64)]) -> TermVector {
        TermVector::from_entries(entries.iter().map(|(t, w)| (String::from(*t), *w)))
    }

    fn model(platform: &str, topics: Vec<(&[&str], TermVector, u64)>) -> TopicModel {
        let centroids: Vec<TermVector> = topics.iter().map(|(_, c, _)| c.clone()).collect();
        let vocabulary = build_vocabulary(&centroids);
        let idf = vocabulary.terms.iter().map(|t| (t.clone(), 1.0)).collect();
        TopicModel {
            platform: String::from(platform),
            vocabulary,
            idf,
            topics: topics
                .into_iter()
                .enumerate()
                .map(|(id, (tags, centroid, post_count))| Topic {
                    id: id as u32,
                    hashtags: tags.iter().map(|t| String::from(*t)).collect(),
                    centroid,
                    label: tags.join("|"),
                    post_count,
                })
                .collect(),
            threshold: 0.9,
            config: BuildConfig::default(),
        }
    }

    fn post(id: &str, tags: &[&str], tokens: &[&str]) -> TokenizedPost {
        TokenizedPost {
            post_id: String::from(id),
            tokens: tokens.iter().map(|t| Token::new(*t, Pos::Noun)).collect(),
            hashtags: tags.iter().map(|t| String::from(*t)).collect(),
        }
    }

    #[test]
    fn identical_models_have_zero_diagonal() {
        let m = model(
            "a",
            vec![
                (&["t1"], vector(&[("x", 1.0), ("y", 2.0)]), 5),
                (&["t2"], vector(&[("z", 1.0)]), 3),
            ],
        );
        let matrix = cross_matrix(&m, &m, 2).unwrap();
        assert_eq!(matrix.n_rows(), 2);
        for i in 0..2 {
            assert!(matrix.get(i, i) < 1e-12);
        }
    }

    #[test]
    fn disjoint_vocabularies_give_all_ones() {
        let a = model("a", vec![(&["t1"], vector(&[("x", 1.0)]), 1)]);
        let b = model("b", vec![(&["u1"], vector(&[("y", 1.0)]), 1)]);
        let matrix = cross_matrix(&a, &b, 1).unwrap();
        assert_eq!(matrix.values, vec![1.0]);
    }

    #[test]
    fn matrix_matches_brute_force_over_term_union() {
        let a = model(
            "a",
            vec![
                (&["t1"], vector(&[("x", 2.0), ("y", 1.0)]), 9),
                (&["t2"], vector(&[("y", 3.0), ("z", 1.0)]), 4),
            ],
        );
        let b = model(
            "b",
            vec![
                (&["u1"], vector(&[("y", 1.0), ("z", 2.0)]), 7),
                (&["u2"], vector(&[("x", 1.0)]), 2),
            ],
        );
        let matrix = cross_matrix(&a, &b, 2).unwrap();
        for (i, ta) in a.topics.iter().enumerate() {
            for (j, tb) in b.topics.iter().enumerate() {
                let terms: BTreeSet<&str> =
                    ta.centroid.terms().chain(tb.centroid.terms()).collect();
                let mut dot = 0.0;
                let mut na = 0.0;
                let mut nb = 0.0;
                for term in terms {
                    let wa = ta.centroid.get(term);
                    let wb = tb.centroid.get(term);
                    dot += wa * wb;
                    na += wa * wa;
                    nb += wb * wb;
                }
                let expected = 1.0 - dot / (na.sqrt() * nb.sqrt());
                assert!((matrix.get(i, j) - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn top_k_ranks_by_post_count() {
        let m = model(
            "a",
            vec![
                (&["t1"], vector(&[("x", 1.0)]), 2),
                (&["t2"], vector(&[("y", 1.0)]), 9),
                (&["t3"], vector(&[("z", 1.0)]), 9),
            ],
        );
        let matrix = cross_matrix(&m, &m, 2).unwrap();
        assert_eq!(matrix.row_ids, vec![1, 2]);
        // Requesting more than available falls back to all topics.
        let matrix = cross_matrix(&m, &m, 10).unwrap();
        assert_eq!(matrix.n_rows(), 3);
    }

    #[test]
    fn cdf_counts_fractions() {
        let matrix = DistanceMatrix {
            row_ids: vec![0],
            col_ids: vec![0, 1, 2],
            row_labels: vec![String::from("r")],
            col_labels: vec![String::from("a"), String::from("b"), String::from("c")],
            values: vec![0.5, 0.5, 1.0],
        };
        let cdf = distance_cdf(&matrix, 0.01).unwrap();
        let at = |x: f64| {
            cdf.points
                .iter()
                .find(|(g, _)| (g - x).abs() < 1e-9)
                .map(|(_, f)| *f)
                .unwrap()
        };
        assert!((at(0.5) - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(at(1.0), 1.0);
        assert_eq!(at(0.49), 0.0);
        assert_eq!(cdf.points.last().unwrap().1, 1.0);
    }

    #[test]
    fn cdf_is_step_function_for_constant_matrix() {
        let matrix = DistanceMatrix {
            row_ids: vec![0],
            col_ids: vec![0, 1],
            row_labels: vec![String::from("r")],
            col_labels: vec![String::from("a"), String::from("b")],
            values: vec![0.3, 0.3],
        };
        let cdf = distance_cdf(&matrix, 0.01).unwrap();
        for (x, f) in cdf.points {
            if x < 0.3 - 1e-9 {
                assert_eq!(f, 0.0);
            } else {
                assert_eq!(f, 1.0);
            }
        }
    }

    #[test]
    fn frac_below_is_strict() {
        let matrix = DistanceMatrix {
            row_ids: vec![0],
            col_ids: vec![0, 1],
            row_labels: vec![String::from("r")],
            col_labels: vec![String::from("a"), String::from("b")],
            values: vec![0.89, 0.9],
        };
        assert_eq!(distance_cdf(&matrix, 0.01).unwrap().frac_below, 0.5);
    }

    #[test]
    fn cdf_rejects_empty_matrix() {
        let matrix = DistanceMatrix {
            row_ids: vec![],
            col_ids: vec![],
            row_labels: vec![],
            col_labels: vec![],
            values: vec![],
        };
        assert!(distance_cdf(&matrix, 0.01).is_err());
    }

    #[test]
    fn coverage_zero_when_vocabularies_disjoint() {
        let m = model("a", vec![(&["t1"], vector(&[("x", 1.0)]), 1)]);
        let posts = vec![post("p1", &[], &["q"]), post("p2", &[], &["r"])];
        let coverage = cross_coverage(&m, &posts, 0.9).unwrap();
        assert_eq!(coverage.fraction(), 0.0);
    }

    #[test]
    fn coverage_full_on_own_training_posts() {
        let m = model("a", vec![(&["t1"], vector(&[("x", 1.0)]), 1)]);
        let posts = vec![post("p1", &[], &["x"]), post("p2", &["t1"], &["q"])];
        let coverage = cross_coverage(&m, &posts, 0.9).unwrap();
        assert_eq!(coverage.fraction(), 1.0);
        assert_eq!(coverage.via_tag, 1);
        assert_eq!(coverage.via_centroid, 1);
        assert!(cross_coverage(&m, &[], 0.9).is_err());
    }

    #[test]
    fn rank_topics_sorts_and_breaks_ties() {
        let assignment = |id: Option<u32>| Assignment {
            post_id: String::from("p"),
            topic_id: id,
            distance: None,
            via: if id.is_some() { Via::Tag } else { Via::Unknown },
        };
        let mut assignments = Vec::new();
        for _ in 0..3 {
            assignments.push(assignment(Some(1)));
        }
        for _ in 0..5 {
            assignments.push(assignment(Some(2)));
        }
        assignments.push(assignment(None));
        let ranking = rank_topics(&assignments);
        assert_eq!(ranking.entries, vec![(2, 5), (1, 3)]);

        let tied = vec![assignment(Some(2)), assignment(Some(1))];
        assert_eq!(rank_topics(&tied).entries, vec![(1, 1), (2, 1)]);
        assert!(rank_topics(&[assignment(None)]).is_empty());

        // Input order never matters.
        let mut reversed = assignments.clone();
        reversed.reverse();
        assert_eq!(rank_topics(&reversed), rank_topics(&assignments));
    }

    #[test]
    fn kendall_identity_reverse_and_example() {
        let ids: Vec<u32> = (0..5).collect();
        let reversed: Vec<u32> = ids.iter().rev().copied().collect();
        assert_eq!(kendall_tau(&ids, &ids).unwrap().0, 1.0);
        assert_eq!(kendall_tau(&ids, &reversed).unwrap().0, -1.0);
        // [1,2,3] vs [2,1,3]: pairs (1,2) discordant, (1,3) and (2,3)
        // concordant → tau = (2-1)/3.
        let (tau, p) = kendall_tau(&[1, 2, 3], &[2, 1, 3]).unwrap();
        assert!((tau - 1.0 / 3.0).abs() < 1e-15);
        assert!(p > 0.0 && p <= 1.0);
    }

    #[test]
    fn kendall_rejects_bad_inputs() {
        assert_eq!(kendall_tau(&[1], &[1]), Err(Error::RankingTooShort(1)));
        assert_eq!(kendall_tau(&[1, 2], &[1]), Err(Error::RankingMismatch));
        assert_eq!(kendall_tau(&[1, 2], &[1, 3]), Err(Error::RankingMismatch));
        assert_eq!(kendall_tau(&[1, 1], &[1, 2]), Err(Error::RankingMismatch));
    }

    #[test]
    fn kendall_p_value_normal_approximation() {
        // tau = 0.31 over 100 items comes out around 4e-6 under the normal
        // approximation; check the formula against a fixed value.
        let nf = 100.0f64;
        let tau = 0.31;
        let z = 3.0 * tau * (nf * (nf - 1.0)).sqrt() / (2.0 * (2.0 * nf + 5.0)).sqrt();
        let p = libm::erfc(z.abs() / 2f64.sqrt());
        assert!(p > 1e-6 && p < 1e-5, "p = {p}");
    }

    #[test]
    fn rerank_deleted_ranks_by_deleted_count() {
        let m = model(
            "a",
            vec![
                (&["t1"], vector(&[("a", 1.0)]), 1),
                (&["t2"], vector(&[("b", 1.0)]), 1),
                (&["t3"], vector(&[("c", 1.0)]), 1),
                (&["t4"], vector(&[("d", 1.0)]), 1),
            ],
        );
        let mut posts = Vec::new();
        for i in 0..4 {
            posts.push(post(&alloc::format!("d{i}"), &[], &["c", "c"]));
        }
        posts.push(post("d4", &[], &["a"]));
        let ranking = rerank_deleted(&m, &posts, 0.9).unwrap();
        assert_eq!(ranking.entries, vec![(2, 4), (0, 1)]);
        assert!(rerank_deleted(&m, &[], 0.9).is_err());
    }

    #[test]
    fn rerank_with_nothing_under_threshold_is_empty() {
        let m = model("a", vec![(&["t1"], vector(&[("a", 1.0)]), 1)]);
        let posts = vec![post("d0", &[], &["zz"])];
        assert!(rerank_deleted(&m, &posts, 0.9).unwrap().is_empty());
    }

    #[test]
    fn ranking_extension_adds_zero_counts() {
        let ranking = TopicRanking { entries: vec![(3, 5), (1, 2)] };
        let extended = ranking.extended_with_zeros(&[1, 2, 3, 4]);
        assert_eq!(extended.entries, vec![(3, 5), (1, 2), (2, 0), (4, 0)]);
    }
}
