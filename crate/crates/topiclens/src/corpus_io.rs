//! JSONL corpus and assignment files.
//!
//! A corpus file holds one JSON object per line with fields `id` (string,
//! required), `text` (string, required), `timestamp` (integer, optional) and
//! `deleted` (boolean, default false). Files written by this tool start with
//! a `{"manifest": ...}` header line, which readers skip.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use topiclens_core::{Assignment, Corpus, Microblog, TagMode, Via};

use crate::error::{Error, Result};
use crate::files::{atomic_write, read_string, InputDigest, Manifest};

#[derive(Debug, Deserialize)]
struct RawRecord {
    id: String,
    text: String,
    #[serde(default)]
    timestamp: Option<i64>,
    #[serde(default)]
    deleted: bool,
}

#[derive(Debug, Serialize)]
struct OutRecord<'a> {
    id: &'a str,
    text: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<i64>,
    #[serde(skip_serializing_if = "core::ops::Not::not")]
    deleted: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct ManifestLine<'a> {
    manifest: std::borrow::Cow<'a, Manifest>,
}

/// A parsed corpus plus per-file bookkeeping.
#[derive(Debug)]
pub struct ReadOutcome {
    pub corpus: Corpus,
    /// Records that failed validation and were skipped.
    pub skipped: usize,
    pub digest: InputDigest,
}

fn is_manifest_line(line: &str) -> bool {
    serde_json::from_str::<serde_json::Value>(line)
        .ok()
        .and_then(|v| v.as_object().map(|o| o.contains_key("manifest")))
        .unwrap_or(false)
}

/// Reads a JSONL corpus. Malformed or invalid records (bad JSON, empty id or
/// text, duplicate id) are skipped and counted; unreadable files fail.
pub fn read_corpus(path: &Path, tag_mode: TagMode, platform: &str) -> Result<ReadOutcome> {
    let text = read_string(path)?;
    let digest = InputDigest::new("corpus", path.display().to_string(), text.as_bytes());
    let mut corpus = Corpus::new(platform, tag_mode);
    let mut skipped = 0usize;
    let mut seen_ids: BTreeSet<String> = BTreeSet::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let record: RawRecord = match serde_json::from_str(line) {
            Ok(record) => record,
            Err(err) => {
                if is_manifest_line(line) {
                    continue;
                }
                log::warn!("{}:{}: skipping malformed record: {err}", path.display(), lineno + 1);
                skipped += 1;
                continue;
            }
        };
        match Microblog::new(record.id, platform, record.text, tag_mode) {
            Ok(mut post) => {
                if !seen_ids.insert(post.id.clone()) {
                    log::warn!(
                        "{}:{}: skipping duplicate id {:?}",
                        path.display(),
                        lineno + 1,
                        post.id
                    );
                    skipped += 1;
                    continue;
                }
                post.timestamp = record.timestamp;
                post.deleted = record.deleted;
                corpus.posts.push(post);
            }
            Err(err) => {
                log::warn!("{}:{}: skipping invalid record: {err}", path.display(), lineno + 1);
                skipped += 1;
            }
        }
    }
    Ok(ReadOutcome { corpus, skipped, digest })
}

/// Writes a corpus as JSONL with a leading manifest line.
pub fn write_corpus(path: &Path, corpus: &Corpus, manifest: &Manifest) -> Result<()> {
    let mut out = String::new();
    out.push_str(&serde_json::to_string(&ManifestLine {
        manifest: std::borrow::Cow::Borrowed(manifest),
    })?);
    out.push('\n');
    for post in &corpus.posts {
        let record = OutRecord {
            id: &post.id,
            text: &post.text,
            timestamp: post.timestamp,
            deleted: post.deleted,
        };
        out.push_str(&serde_json::to_string(&record)?);
        out.push('\n');
    }
    atomic_write(path, out.as_bytes())
}

#[derive(Debug, Serialize, Deserialize)]
struct AssignmentRecord {
    id: String,
    topic_id: Option<u32>,
    via: String,
    distance: Option<f64>,
}

/// Writes assignments as JSONL (manifest line first), one object per post in
/// input order: `{"id", "topic_id", "via", "distance"}` with `null` for
/// absent values.
pub fn write_assignments(
    path: &Path,
    assignments: &[Assignment],
    manifest: &Manifest,
) -> Result<()> {
    let mut out = String::new();
    out.push_str(&serde_json::to_string(&ManifestLine {
        manifest: std::borrow::Cow::Borrowed(manifest),
    })?);
    out.push('\n');
    for assignment in assignments {
        let record = AssignmentRecord {
            id: assignment.post_id.clone(),
            topic_id: assignment.topic_id,
            via: assignment.via.as_str().to_string(),
            distance: assignment.distance,
        };
        out.push_str(&serde_json::to_string(&record)?);
        out.push('\n');
    }
    atomic_write(path, out.as_bytes())
}

/// Reads an assignments file back, skipping the manifest line.
pub fn read_assignments(path: &Path) -> Result<(Vec<Assignment>, InputDigest)> {
    let text = read_string(path)?;
    let digest = InputDigest::new("assignments", path.display().to_string(), text.as_bytes());
    let mut assignments = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || is_manifest_line(line) {
            continue;
        }
        let record: AssignmentRecord =
            serde_json::from_str(line).map_err(|err| Error::Format {
                path: path.to_path_buf(),
                kind: "assignments",
                reason: format!("line {}: {err}", lineno + 1),
            })?;
        let via = match record.via.as_str() {
            "tag" => Via::Tag,
            "centroid" => Via::Centroid,
            "unknown" => Via::Unknown,
            other => {
                return Err(Error::Format {
                    path: path.to_path_buf(),
                    kind: "assignments",
                    reason: format!("line {}: unknown via {other:?}", lineno + 1),
                })
            }
        };
        assignments.push(Assignment {
            post_id: record.id,
            topic_id: record.topic_id,
            distance: record.distance,
            via,
        });
    }
    Ok((assignments, digest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::files::Manifest;

    #[test]
    fn reads_valid_lines_and_skips_invalid() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        std::fs::write(
            &path,
            concat!(
                "{\"id\":\"a\",\"text\":\"hello #One\"}\n",
                "{\"id\":\"b\",\"text\":\"  \"}\n",
                "{\"text\":\"missing id\"}\n",
                "{\"id\":\"a\",\"text\":\"duplicate\"}\n",
                "not json\n",
                "\n",
                "{\"id\":\"c\",\"text\":\"ok\",\"deleted\":true,\"timestamp\":12}\n",
            ),
        )
        .unwrap();
        let outcome = read_corpus(&path, TagMode::Prefix, "tw").unwrap();
        assert_eq!(outcome.corpus.len(), 2);
        assert_eq!(outcome.skipped, 4);
        assert_eq!(outcome.corpus.posts[0].hashtags, vec!["one"]);
        assert!(outcome.corpus.posts[1].deleted);
        assert_eq!(outcome.corpus.posts[1].timestamp, Some(12));
    }

    #[test]
    fn empty_file_gives_empty_corpus() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.jsonl");
        std::fs::write(&path, "").unwrap();
        let outcome = read_corpus(&path, TagMode::Paired, "weibo").unwrap();
        assert!(outcome.corpus.is_empty());
        assert_eq!(outcome.skipped, 0);
    }

    #[test]
    fn missing_file_is_fatal() {
        assert!(read_corpus(Path::new("/nonexistent/x.jsonl"), TagMode::Paired, "p").is_err());
    }

    #[test]
    fn reading_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        std::fs::write(&path, "{\"id\":\"a\",\"text\":\"#x# one\"}\n{\"id\":\"b\",\"text\":\"two\"}\n")
            .unwrap();
        let first = read_corpus(&path, TagMode::Paired, "p").unwrap();
        let second = read_corpus(&path, TagMode::Paired, "p").unwrap();
        assert_eq!(first.corpus, second.corpus);
        assert_eq!(first.digest, second.digest);
    }

    #[test]
    fn corpus_round_trips_through_write_and_read() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.jsonl");
        let mut corpus = Corpus::new("weibo", TagMode::Paired);
        let mut post = Microblog::new("p1", "weibo", "text #a# more", TagMode::Paired).unwrap();
        post.deleted = true;
        corpus.posts.push(post);
        corpus.posts.push(Microblog::new("p2", "weibo", "plain", TagMode::Paired).unwrap());
        write_corpus(&path, &corpus, &Manifest::new("test")).unwrap();

        let outcome = read_corpus(&path, TagMode::Paired, "weibo").unwrap();
        assert_eq!(outcome.skipped, 0, "manifest line must not count as skipped");
        assert_eq!(outcome.corpus, corpus);
    }

    #[test]
    fn assignments_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.jsonl");
        let assignments = vec![
            Assignment {
                post_id: "p1".into(),
                topic_id: Some(3),
                distance: Some(0.25),
                via: Via::Centroid,
            },
            Assignment { post_id: "p2".into(), topic_id: None, distance: None, via: Via::Unknown },
            Assignment { post_id: "p3".into(), topic_id: Some(1), distance: None, via: Via::Tag },
        ];
        write_assignments(&path, &assignments, &Manifest::new("test")).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"topic_id\":null"));
        assert!(text.contains("\"distance\":null"));
        let (parsed, _) = read_assignments(&path).unwrap();
        assert_eq!(parsed, assignments);
    }
}
