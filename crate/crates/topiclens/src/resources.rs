//! Bundled segmentation dictionary and traditional→simplified table, with
//! loaders that fall back to them when no path is given.

use std::path::Path;

use topiclens_core::{Dictionary, MaxMatchSegmenter, Preprocessor, Simplifier};

use crate::error::Result;
use crate::files::{read_string, InputDigest};

/// Default term→POS dictionary for the maximum-matching segmenter.
pub const BUNDLED_DICTIONARY: &str = include_str!("../data/dictionary.tsv");

/// Default character-level traditional→simplified table.
pub const BUNDLED_T2S: &str = include_str!("../data/t2s.tsv");

fn load_source(path: Option<&Path>, bundled: &'static str, role: &str) -> Result<(String, InputDigest)> {
    match path {
        Some(path) => {
            let text = read_string(path)?;
            let digest = InputDigest::new(role, path.display().to_string(), text.as_bytes());
            Ok((text, digest))
        }
        None => {
            let digest = InputDigest::new(role, format!("bundled:{role}"), bundled.as_bytes());
            Ok((bundled.to_string(), digest))
        }
    }
}

pub fn load_dictionary(path: Option<&Path>) -> Result<(Dictionary, InputDigest)> {
    let (text, digest) = load_source(path, BUNDLED_DICTIONARY, "dictionary")?;
    let (dictionary, skipped) = Dictionary::from_tsv(&text);
    if skipped > 0 {
        log::warn!("dictionary {}: skipped {skipped} malformed lines", digest.path);
    }
    Ok((dictionary, digest))
}

pub fn load_t2s(path: Option<&Path>) -> Result<(Simplifier, InputDigest)> {
    let (text, digest) = load_source(path, BUNDLED_T2S, "t2s")?;
    let (simplifier, skipped) = Simplifier::from_tsv(&text);
    if skipped > 0 {
        log::warn!("t2s table {}: skipped {skipped} malformed lines", digest.path);
    }
    Ok((simplifier, digest))
}

/// Builds the default preprocessing chain from optional dictionary and table
/// paths, returning the digests for the output manifest.
pub fn load_preprocessor(
    dictionary: Option<&Path>,
    t2s: Option<&Path>,
) -> Result<(Preprocessor, Vec<InputDigest>)> {
    let (dictionary, dict_digest) = load_dictionary(dictionary)?;
    let (simplifier, t2s_digest) = load_t2s(t2s)?;
    let preprocessor = Preprocessor::new(simplifier, MaxMatchSegmenter::new(dictionary));
    Ok((preprocessor, vec![dict_digest, t2s_digest]))
}
