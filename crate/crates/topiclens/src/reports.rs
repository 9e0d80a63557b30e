//! Analysis report files: comparison JSON + matrix CSV, calibration,
//! deleted-post re-ranking, and the synthetic ground truth.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use topiclens_core::{
    CalibrationReport, Coverage, DistanceCdf, DistanceMatrix, GroundTruth, SynthSpec,
    TopicRanking,
};

use crate::error::Result;
use crate::files::{atomic_write, to_json_bytes, Manifest};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfPoint {
    pub distance: f64,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub posts: usize,
    pub covered: usize,
    pub via_tag: usize,
    pub via_centroid: usize,
    pub fraction: f64,
    pub tag_fraction: f64,
    pub centroid_fraction: f64,
}

impl From<Coverage> for CoverageReport {
    fn from(c: Coverage) -> CoverageReport {
        CoverageReport {
            posts: c.posts,
            covered: c.covered,
            via_tag: c.via_tag,
            via_centroid: c.via_centroid,
            fraction: c.fraction(),
            tag_fraction: c.tag_fraction(),
            centroid_fraction: c.centroid_fraction(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KendallReport {
    pub tau: f64,
    pub p_value: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedTopic {
    pub topic_id: u32,
    pub label: String,
    pub count: u64,
}

/// Cross-platform comparison: distance CDF, overlap fraction, optional
/// coverage of each corpus on the other platform's model.
#[derive(Debug, Serialize, Deserialize)]
pub struct ComparisonReportFile {
    pub tool: String,
    pub version: String,
    pub kind: String,
    pub manifest: Manifest,
    pub top_k: usize,
    /// Top topics of each model by member post count, in matrix order.
    pub ranking_a: Vec<RankedTopic>,
    pub ranking_b: Vec<RankedTopic>,
    pub cdf: Vec<CdfPoint>,
    /// Fraction of centroid pairs at distance strictly below 0.9.
    pub frac_below: f64,
    /// Coverage of corpus A posts on model B, when corpus A was given.
    pub coverage_a_on_b: Option<CoverageReport>,
    pub coverage_b_on_a: Option<CoverageReport>,
    /// Rank correlation is produced by deleted-post re-ranking, not here.
    pub kendall: Option<KendallReport>,
}

pub fn comparison_report(
    manifest: Manifest,
    top_k: usize,
    ranking_a: Vec<RankedTopic>,
    ranking_b: Vec<RankedTopic>,
    cdf: &DistanceCdf,
    coverage_a_on_b: Option<Coverage>,
    coverage_b_on_a: Option<Coverage>,
) -> ComparisonReportFile {
    ComparisonReportFile {
        tool: "topiclens".to_string(),
        version: topiclens_core::VERSION.to_string(),
        kind: "comparison-report".to_string(),
        manifest,
        top_k,
        ranking_a,
        ranking_b,
        cdf: cdf
            .points
            .iter()
            .map(|&(distance, fraction)| CdfPoint { distance, fraction })
            .collect(),
        frac_below: cdf.frac_below,
        coverage_a_on_b: coverage_a_on_b.map(CoverageReport::from),
        coverage_b_on_a: coverage_b_on_a.map(CoverageReport::from),
        kendall: None,
    }
}

pub fn write_report<T: Serialize>(path: &Path, report: &T) -> Result<()> {
    atomic_write(path, &to_json_bytes(report)?)
}

/// Writes the distance matrix as CSV: header row and first column carry the
/// topic labels, cells are distances with six decimal places, row-major.
pub fn write_matrix_csv(path: &Path, matrix: &DistanceMatrix) -> Result<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec![String::new()];
    header.extend(matrix.col_labels.iter().cloned());
    writer.write_record(&header)?;
    for row in 0..matrix.n_rows() {
        let mut record = vec![matrix.row_labels[row].clone()];
        for col in 0..matrix.n_cols() {
            record.push(format!("{:.6}", matrix.get(row, col)));
        }
        writer.write_record(&record)?;
    }
    let bytes = writer.into_inner().expect("csv into_inner on Vec cannot fail");
    atomic_write(path, &bytes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub count: usize,
    pub quantiles: Vec<f64>,
}

/// Threshold calibration distributions.
#[derive(Debug, Serialize, Deserialize)]
pub struct CalibrationReportFile {
    pub tool: String,
    pub version: String,
    pub kind: String,
    pub manifest: Manifest,
    pub target_intra_coverage: f64,
    /// Intra distances include each post's own contribution to its topic
    /// centroid.
    pub intra_includes_self: bool,
    pub recommended_threshold: f64,
    pub default_threshold: f64,
    pub coverage_at_default: f64,
    pub intra: SummaryReport,
    pub inter: SummaryReport,
}

pub fn calibration_report(
    manifest: Manifest,
    target: f64,
    report: &CalibrationReport,
) -> CalibrationReportFile {
    CalibrationReportFile {
        tool: "topiclens".to_string(),
        version: topiclens_core::VERSION.to_string(),
        kind: "calibration-report".to_string(),
        manifest,
        target_intra_coverage: target,
        intra_includes_self: true,
        recommended_threshold: report.recommended_threshold,
        default_threshold: topiclens_core::assign::DEFAULT_THRESHOLD,
        coverage_at_default: report.coverage_at_default,
        intra: SummaryReport {
            count: report.intra.count,
            quantiles: report.intra.quantiles.clone(),
        },
        inter: SummaryReport {
            count: report.inter.count,
            quantiles: report.inter.quantiles.clone(),
        },
    }
}

/// Deleted-post re-ranking of a foreign model's topics.
#[derive(Debug, Serialize, Deserialize)]
pub struct RerankReportFile {
    pub tool: String,
    pub version: String,
    pub kind: String,
    pub manifest: Manifest,
    pub top_k: usize,
    pub deleted_posts: usize,
    /// Deleted posts that landed in some topic.
    pub classified: usize,
    /// Reference ranking of the model's top topics.
    pub base_ranking: Vec<RankedTopic>,
    /// The same topics re-ranked by deleted-post frequency.
    pub deleted_ranking: Vec<RankedTopic>,
    pub kendall: Option<KendallReport>,
}

/// Ground truth of a synthetic corpus (or pair).
#[derive(Debug, Serialize, Deserialize)]
pub struct GroundTruthFile {
    pub tool: String,
    pub version: String,
    pub kind: String,
    pub manifest: Manifest,
    pub tag_topics: BTreeMap<String, u32>,
    pub post_topics: BTreeMap<String, u32>,
    pub shared_topic_ids: Vec<u32>,
    pub topic_terms: BTreeMap<u32, Vec<String>>,
    pub noise_terms: Vec<String>,
}

pub fn ground_truth_file(manifest: Manifest, truth: &GroundTruth) -> GroundTruthFile {
    GroundTruthFile {
        tool: "topiclens".to_string(),
        version: topiclens_core::VERSION.to_string(),
        kind: "ground-truth".to_string(),
        manifest,
        tag_topics: truth.tag_topics.clone(),
        post_topics: truth.post_topics.clone(),
        shared_topic_ids: truth.shared_topic_ids.clone(),
        topic_terms: truth.topic_terms.clone(),
        noise_terms: truth.noise_terms.clone(),
    }
}

pub fn load_ground_truth(path: &Path) -> Result<GroundTruth> {
    let bytes = crate::files::read_bytes(path)?;
    let file: GroundTruthFile =
        serde_json::from_slice(&bytes).map_err(|err| crate::error::Error::Format {
            path: path.to_path_buf(),
            kind: "ground-truth",
            reason: err.to_string(),
        })?;
    Ok(GroundTruth {
        tag_topics: file.tag_topics,
        post_topics: file.post_topics,
        shared_topic_ids: file.shared_topic_ids,
        topic_terms: file.topic_terms,
        noise_terms: file.noise_terms,
    })
}

/// Writes a dictionary TSV covering all synthetic terms (tagged as nouns),
/// so generated corpora can run through the standard segmenter.
pub fn write_synth_dictionary(path: &Path, truth: &GroundTruth, manifest: &Manifest) -> Result<()> {
    let mut out = String::new();
    out.push_str("# manifest: ");
    out.push_str(&serde_json::to_string(manifest)?);
    out.push('\n');
    for term in truth.all_terms() {
        out.push_str(&term);
        out.push_str("\tn\n");
    }
    atomic_write(path, out.as_bytes())
}

/// Builds a ranking view with topic labels from the model.
pub fn ranked_topics(
    ranking: &TopicRanking,
    labels: &BTreeMap<u32, String>,
) -> Vec<RankedTopic> {
    ranking
        .entries
        .iter()
        .map(|&(topic_id, count)| RankedTopic {
            topic_id,
            label: labels.get(&topic_id).cloned().unwrap_or_default(),
            count,
        })
        .collect()
}

/// Manifest snapshot of a synth run.
#[derive(Debug, Serialize, Deserialize)]
pub struct SynthSnapshot {
    pub n_topics: usize,
    pub tags_per_topic: usize,
    pub terms_per_topic: usize,
    pub posts_per_tag: usize,
    pub tokens_per_post: usize,
    pub noise_prob: f64,
    pub shared_topic_fraction: f64,
    pub seed: u64,
    pub tag_mode: String,
    pub deleted_fraction: f64,
    pub noise_pool_size: usize,
    pub zipf_exponent: Option<f64>,
}

impl From<&SynthSpec> for SynthSnapshot {
    fn from(spec: &SynthSpec) -> SynthSnapshot {
        SynthSnapshot {
            n_topics: spec.n_topics,
            tags_per_topic: spec.tags_per_topic,
            terms_per_topic: spec.terms_per_topic,
            posts_per_tag: spec.posts_per_tag,
            tokens_per_post: spec.tokens_per_post,
            noise_prob: spec.noise_prob,
            shared_topic_fraction: spec.shared_topic_fraction,
            seed: spec.seed,
            tag_mode: spec.tag_mode.as_str().to_string(),
            deleted_fraction: spec.deleted_fraction,
            noise_pool_size: spec.noise_pool_size,
            zipf_exponent: spec.zipf_exponent,
        }
    }
}
