//! Topic model files and dendrogram export.
//!
//! A model file is one JSON document with a fixed field layout and sorted
//! maps, so loading and re-saving reproduces the bytes exactly.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use topiclens_core::{
    BuildConfig, CentroidMode, Dendrogram, TagMode, TermSelection, TermVector, Topic, TopicModel,
    Vocabulary,
};

use crate::error::{Error, Result};
use crate::files::{atomic_write, read_bytes, to_json_bytes, InputDigest, Manifest};

/// Only linkage the clusterer implements; recorded in every model file.
pub const LINKAGE: &str = "average";

/// Serialized form of [`BuildConfig`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigSnapshot {
    pub tag_mode: String,
    pub top_tags: usize,
    pub top_topics: usize,
    pub terms_per_vector: usize,
    pub selection: String,
    pub centroid: String,
    pub linkage: String,
    pub threshold: f64,
    pub seed: u64,
}

impl From<&BuildConfig> for ConfigSnapshot {
    fn from(config: &BuildConfig) -> ConfigSnapshot {
        ConfigSnapshot {
            tag_mode: config.tag_mode.as_str().to_string(),
            top_tags: config.top_tags,
            top_topics: config.top_topics,
            terms_per_vector: config.terms_per_vector,
            selection: config.selection.as_str().to_string(),
            centroid: config.centroid.as_str().to_string(),
            linkage: LINKAGE.to_string(),
            threshold: config.threshold,
            seed: config.seed,
        }
    }
}

impl ConfigSnapshot {
    fn to_build_config(&self, path: &Path) -> Result<BuildConfig> {
        let bad = |reason: String| Error::Format { path: path.to_path_buf(), kind: "model", reason };
        if self.linkage != LINKAGE {
            return Err(bad(format!("unsupported linkage {:?}", self.linkage)));
        }
        let config = BuildConfig {
            tag_mode: TagMode::parse(&self.tag_mode)
                .ok_or_else(|| bad(format!("unknown tag_mode {:?}", self.tag_mode)))?,
            top_tags: self.top_tags,
            top_topics: self.top_topics,
            terms_per_vector: self.terms_per_vector,
            selection: TermSelection::parse(&self.selection)
                .ok_or_else(|| bad(format!("unknown selection {:?}", self.selection)))?,
            centroid: CentroidMode::parse(&self.centroid)
                .ok_or_else(|| bad(format!("unknown centroid {:?}", self.centroid)))?,
            threshold: self.threshold,
            seed: self.seed,
        };
        config.validate().map_err(|err| bad(err.to_string()))?;
        Ok(config)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TopicEntry {
    id: u32,
    hashtags: Vec<String>,
    label: String,
    post_count: u64,
    centroid: BTreeMap<String, f64>,
}

/// On-disk model layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    tool: String,
    version: String,
    kind: String,
    platform: String,
    threshold: f64,
    config: ConfigSnapshot,
    manifest: Manifest,
    vocabulary: Vec<String>,
    idf: BTreeMap<String, f64>,
    topics: Vec<TopicEntry>,
}

const MODEL_KIND: &str = "topic-model";

impl ModelFile {
    pub fn from_model(model: &TopicModel, manifest: Manifest) -> ModelFile {
        ModelFile {
            tool: "topiclens".to_string(),
            version: topiclens_core::VERSION.to_string(),
            kind: MODEL_KIND.to_string(),
            platform: model.platform.clone(),
            threshold: model.threshold,
            config: ConfigSnapshot::from(&model.config),
            manifest,
            vocabulary: model.vocabulary.terms.clone(),
            idf: model.idf.clone(),
            topics: model
                .topics
                .iter()
                .map(|t| TopicEntry {
                    id: t.id,
                    hashtags: t.hashtags.iter().cloned().collect(),
                    label: t.label.clone(),
                    post_count: t.post_count,
                    centroid: t.centroid.iter().map(|(k, v)| (k.to_string(), v)).collect(),
                })
                .collect(),
        }
    }

    pub fn to_model(&self, path: &Path) -> Result<TopicModel> {
        if self.kind != MODEL_KIND {
            return Err(Error::Format {
                path: path.to_path_buf(),
                kind: "model",
                reason: format!("kind is {:?}, expected {MODEL_KIND:?}", self.kind),
            });
        }
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return Err(Error::Format {
                path: path.to_path_buf(),
                kind: "model",
                reason: format!("threshold {} outside (0, 1]", self.threshold),
            });
        }
        let config = self.config.to_build_config(path)?;
        Ok(TopicModel {
            platform: self.platform.clone(),
            vocabulary: Vocabulary {
                terms: self.vocabulary.clone(),
                n_sources: self.topics.len(),
            },
            idf: self.idf.clone(),
            topics: self
                .topics
                .iter()
                .map(|t| Topic {
                    id: t.id,
                    hashtags: t.hashtags.iter().cloned().collect(),
                    centroid: TermVector::from_entries(
                        t.centroid.iter().map(|(k, v)| (k.clone(), *v)),
                    ),
                    label: t.label.clone(),
                    post_count: t.post_count,
                })
                .collect(),
            threshold: self.threshold,
            config,
        })
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }
}

/// A model read back from disk, with the file's digest for downstream
/// manifests.
#[derive(Debug)]
pub struct LoadedModel {
    pub model: TopicModel,
    pub file: ModelFile,
    pub digest: InputDigest,
}

pub fn save_model(path: &Path, model: &TopicModel, manifest: Manifest) -> Result<()> {
    let file = ModelFile::from_model(model, manifest);
    atomic_write(path, &to_json_bytes(&file)?)
}

pub fn load_model(path: &Path) -> Result<LoadedModel> {
    let bytes = read_bytes(path)?;
    let digest = InputDigest::new("model", path.display().to_string(), &bytes);
    let file: ModelFile = serde_json::from_slice(&bytes).map_err(|err| Error::Format {
        path: path.to_path_buf(),
        kind: "model",
        reason: err.to_string(),
    })?;
    let model = file.to_model(path)?;
    Ok(LoadedModel { model, file, digest })
}

/// Merge-tree export for external plotting.
#[derive(Debug, Serialize, Deserialize)]
struct DendrogramFile {
    tool: String,
    version: String,
    kind: String,
    manifest: Manifest,
    leaves: Vec<String>,
    merges: Vec<MergeEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MergeEntry {
    left: usize,
    right: usize,
    height: f64,
}

pub fn save_dendrogram(path: &Path, dendrogram: &Dendrogram, manifest: Manifest) -> Result<()> {
    let file = DendrogramFile {
        tool: "topiclens".to_string(),
        version: topiclens_core::VERSION.to_string(),
        kind: "dendrogram".to_string(),
        manifest,
        leaves: dendrogram.labels().to_vec(),
        merges: dendrogram
            .merges()
            .iter()
            .map(|m| MergeEntry { left: m.left, right: m.right, height: m.height })
            .collect(),
    };
    atomic_write(path, &to_json_bytes(&file)?)
}
