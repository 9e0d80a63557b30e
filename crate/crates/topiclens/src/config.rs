//! Build configuration: TOML config file plus command-line overrides.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use topiclens_core::{BuildConfig, CentroidMode, TagMode, TermSelection};

use crate::error::{Error, Result};
use crate::files::read_string;

/// Key=value configuration, all fields optional. Command-line flags override
/// file values.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub tag_mode: Option<String>,
    pub top_tags: Option<usize>,
    pub top_topics: Option<usize>,
    pub terms_per_vector: Option<usize>,
    pub selection: Option<String>,
    pub centroid: Option<String>,
    pub threshold: Option<f64>,
    pub dictionary: Option<PathBuf>,
    pub t2s_table: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig> {
        let text = read_string(path)?;
        toml::from_str(&text)
            .map_err(|err| Error::Config(format!("{}: {err}", path.display())))
    }

    /// Fields set in `overrides` win.
    pub fn merged(self, overrides: FileConfig) -> FileConfig {
        FileConfig {
            tag_mode: overrides.tag_mode.or(self.tag_mode),
            top_tags: overrides.top_tags.or(self.top_tags),
            top_topics: overrides.top_topics.or(self.top_topics),
            terms_per_vector: overrides.terms_per_vector.or(self.terms_per_vector),
            selection: overrides.selection.or(self.selection),
            centroid: overrides.centroid.or(self.centroid),
            threshold: overrides.threshold.or(self.threshold),
            dictionary: overrides.dictionary.or(self.dictionary),
            t2s_table: overrides.t2s_table.or(self.t2s_table),
            seed: overrides.seed.or(self.seed),
        }
    }

    /// Resolves to a validated build configuration plus resource paths.
    pub fn into_settings(self) -> Result<BuildSettings> {
        let defaults = BuildConfig::default();
        let tag_mode = match &self.tag_mode {
            None => defaults.tag_mode,
            Some(s) => TagMode::parse(s)
                .ok_or_else(|| Error::Config(format!("unknown tag_mode {s:?}")))?,
        };
        let selection = match &self.selection {
            None => defaults.selection,
            Some(s) => TermSelection::parse(s)
                .ok_or_else(|| Error::Config(format!("unknown selection {s:?}")))?,
        };
        let centroid = match &self.centroid {
            None => defaults.centroid,
            Some(s) => CentroidMode::parse(s)
                .ok_or_else(|| Error::Config(format!("unknown centroid {s:?}")))?,
        };
        let top_tags = self.top_tags.unwrap_or(defaults.top_tags);
        let build = BuildConfig {
            tag_mode,
            top_tags,
            // An unset topic budget follows the tag budget down.
            top_topics: self.top_topics.unwrap_or(defaults.top_topics.min(top_tags)),
            terms_per_vector: self.terms_per_vector.unwrap_or(defaults.terms_per_vector),
            selection,
            centroid,
            threshold: self.threshold.unwrap_or(defaults.threshold),
            seed: self.seed.unwrap_or(defaults.seed),
        };
        build.validate()?;
        Ok(BuildSettings { build, dictionary: self.dictionary, t2s_table: self.t2s_table })
    }
}

/// Validated settings for a build run.
#[derive(Debug, Clone)]
pub struct BuildSettings {
    pub build: BuildConfig,
    pub dictionary: Option<PathBuf>,
    pub t2s_table: Option<PathBuf>,
}
