//! Nearest-centroid classification of posts and threshold calibration.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::preprocess::TokenizedPost;
use crate::topics::{cosine_distance, TopicModel};
use crate::vectorize::TermVector;

/// How a post ended up in (or out of) a topic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Via {
    /// The post carries a hashtag owned by the topic.
    Tag,
    /// The post's vector is within the distance threshold of the centroid.
    Centroid,
    /// Nothing matched.
    Unknown,
}

impl Via {
    pub fn as_str(self) -> &'static str {
        match self {
            Via::Tag => "tag",
            Via::Centroid => "centroid",
            Via::Unknown => "unknown",
        }
    }
}

/// Result of classifying one post.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub post_id: String,
    /// `None` means unknown topic.
    pub topic_id: Option<u32>,
    /// Centroid distance; absent for direct tag matches and unknowns.
    pub distance: Option<f64>,
    pub via: Via,
}

/// Projects a post onto the model's vocabulary: token count times the
/// model's idf, for every vocabulary term the post contains.
pub fn post_vector(post: &TokenizedPost, model: &TopicModel) -> TermVector {
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for token in &post.tokens {
        if model.vocabulary.contains(&token.surface) {
            *counts.entry(token.surface.as_str()).or_insert(0) += 1;
        }
    }
    TermVector::from_entries(counts.into_iter().map(|(term, count)| {
        (String::from(term), count as f64 * model.idf.get(term).copied().unwrap_or(0.0))
    }))
}

/// Classifies one post.
///
/// A post whose hashtag is owned by a topic goes there directly (first
/// matching tag in post order). Otherwise the post is assigned to the
/// nearest centroid if that distance is below `d_t` (ties to the lowest
/// topic id), and is unknown otherwise.
pub fn assign_post(post: &TokenizedPost, model: &TopicModel, d_t: f64) -> Assignment {
    debug_assert!(d_t > 0.0 && d_t <= 1.0, "threshold {d_t} outside (0, 1]");
    for tag in &post.hashtags {
        if let Some(topic_id) = model.topic_of_tag(tag) {
            return Assignment {
                post_id: post.post_id.clone(),
                topic_id: Some(topic_id),
                distance: None,
                via: Via::Tag,
            };
        }
    }
    let vector = post_vector(post, model);
    let mut nearest: Option<(u32, f64)> = None;
    for topic in &model.topics {
        let d = cosine_distance(&vector, &topic.centroid);
        let closer = match nearest {
            None => true,
            Some((_, best)) => d < best,
        };
        if closer {
            nearest = Some((topic.id, d));
        }
    }
    match nearest {
        Some((topic_id, distance)) if distance < d_t => Assignment {
            post_id: post.post_id.clone(),
            topic_id: Some(topic_id),
            distance: Some(distance),
            via: Via::Centroid,
        },
        _ => Assignment {
            post_id: post.post_id.clone(),
            topic_id: None,
            distance: None,
            via: Via::Unknown,
        },
    }
}

/// Count and percentile summary (0%, 1%, …, 100%) of a distance sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSummary {
    pub count: usize,
    /// 101 linearly interpolated quantiles; empty when `count` is 0.
    pub quantiles: Vec<f64>,
}

impl DistributionSummary {
    fn from_samples(mut samples: Vec<f64>) -> DistributionSummary {
        samples.sort_by(f64::total_cmp);
        let count = samples.len();
        let quantiles = if count == 0 {
            Vec::new()
        } else {
            (0..=100)
                .map(|p| {
                    let pos = p as f64 / 100.0 * (count - 1) as f64;
                    let lo = pos as usize;
                    let hi = (lo + 1).min(count - 1);
                    let frac = pos - lo as f64;
                    samples[lo] * (1.0 - frac) + samples[hi] * frac
                })
                .collect()
        };
        DistributionSummary { count, quantiles }
    }
}

/// Distance distributions of tagged posts to their own and to foreign
/// centroids, with a threshold recommendation.
///
/// Intra distances include each post's own contribution to its topic.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationReport {
    pub intra: DistributionSummary,
    pub inter: DistributionSummary,
    /// Smallest grid threshold whose intra coverage reaches the target.
    pub recommended_threshold: f64,
    /// Fraction of tagged posts with intra distance strictly below 0.9.
    pub coverage_at_default: f64,
}

/// Default assignment threshold.
pub const DEFAULT_THRESHOLD: f64 = 0.9;

/// Measures intra- and inter-topic distances of tagged posts and recommends
/// the smallest threshold (on a 0.01 grid) whose intra coverage reaches
/// `target_intra_coverage`.
///
/// Posts whose hashtags are all outside the model are ignored; at least one
/// post must match.
pub fn calibrate(
    model: &TopicModel,
    tagged_posts: &[TokenizedPost],
    target_intra_coverage: f64,
) -> Result<CalibrationReport> {
    if !(0.0..=1.0).contains(&target_intra_coverage) {
        return Err(Error::InvalidParameter {
            name: "target_intra_coverage",
            reason: "must be in [0, 1]",
        });
    }
    let mut intra = Vec::new();
    let mut inter = Vec::new();
    for post in tagged_posts {
        let own_topic = post.hashtags.iter().find_map(|tag| model.topic_of_tag(tag));
        let Some(own_topic) = own_topic else { continue };
        let vector = post_vector(post, model);
        for topic in &model.topics {
            let d = cosine_distance(&vector, &topic.centroid);
            if topic.id == own_topic {
                intra.push(d);
            } else {
                inter.push(d);
            }
        }
    }
    if intra.is_empty() {
        return Err(Error::EmptyInput("tagged posts matching the model"));
    }
    let recommended_threshold = recommend_threshold(&intra, target_intra_coverage);
    let below = intra.iter().filter(|&&d| d < DEFAULT_THRESHOLD).count();
    let coverage_at_default = below as f64 / intra.len() as f64;
    Ok(CalibrationReport {
        intra: DistributionSummary::from_samples(intra),
        inter: DistributionSummary::from_samples(inter),
        recommended_threshold,
        coverage_at_default,
    })
}

/// Smallest grid value (step 0.01) `v` with `frac(intra < v) >= target`;
/// falls back to 1.0 when even the full grid cannot reach the target.
pub fn recommend_threshold(intra_distances: &[f64], target: f64) -> f64 {
    let n = intra_distances.len();
    for k in 1..=100u32 {
        let v = k as f64 / 100.0;
        let covered = intra_distances.iter().filter(|&&d| d < v).count();
        if n > 0 && covered as f64 / n as f64 >= target {
            return v;
        }
    }
    1.0
}
