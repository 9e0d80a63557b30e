//! Post data model and hashtag extraction.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Maximum hashtag length, in characters.
pub const MAX_TAG_CHARS: usize = 64;

/// Hashtag syntax used by a corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TagMode {
    /// `#tag#` — the tag runs from a `#` to the next `#` on the same line.
    Paired,
    /// `#tag` — the tag is a maximal run of word characters after a `#`.
    Prefix,
}

impl TagMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TagMode::Paired => "paired",
            TagMode::Prefix => "prefix",
        }
    }

    pub fn parse(s: &str) -> Option<TagMode> {
        match s {
            "paired" => Some(TagMode::Paired),
            "prefix" => Some(TagMode::Prefix),
            _ => None,
        }
    }
}

/// One microblog post.
#[derive(Debug, Clone, PartialEq)]
pub struct Microblog {
    /// Unique within its corpus.
    pub id: String,
    /// Platform label, mirrors the owning corpus.
    pub platform: String,
    /// Raw post text.
    pub text: String,
    /// Epoch seconds, when known.
    pub timestamp: Option<i64>,
    /// Whether the platform reported the post as removed.
    pub deleted: bool,
    /// Normalized hashtags in order of first occurrence.
    pub hashtags: Vec<String>,
}

impl Microblog {
    /// Builds a post and extracts its hashtags. Fails if `id` is empty or
    /// `text` is blank.
    pub fn new(
        id: impl Into<String>,
        platform: impl Into<String>,
        text: impl Into<String>,
        tag_mode: TagMode,
    ) -> Result<Microblog> {
        let id = id.into();
        let text = text.into();
        if id.is_empty() {
            return Err(Error::InvalidParameter { name: "id", reason: "must be non-empty" });
        }
        if text.trim().is_empty() {
            return Err(Error::InvalidParameter {
                name: "text",
                reason: "must be non-empty after trimming",
            });
        }
        let hashtags = extract_hashtags(&text, tag_mode);
        Ok(Microblog {
            id,
            platform: platform.into(),
            text,
            timestamp: None,
            deleted: false,
            hashtags,
        })
    }
}

/// An ordered collection of posts from one platform.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub platform: String,
    pub tag_mode: TagMode,
    pub posts: Vec<Microblog>,
}

impl Corpus {
    pub fn new(platform: impl Into<String>, tag_mode: TagMode) -> Corpus {
        Corpus { platform: platform.into(), tag_mode, posts: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.posts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.posts.is_empty()
    }
}

/// Extracts normalized hashtags from `text`.
///
/// Paired mode takes the characters between a `#` and the next `#` on the
/// same line; prefix mode takes the maximal run of word characters (letters,
/// digits, `_`, including CJK) after a `#`. In both modes a candidate is kept
/// only if it is 1 to [`MAX_TAG_CHARS`] characters long. Results are ASCII
/// lowercased and de-duplicated preserving first occurrence.
///
/// ```
/// use topiclens_core::{extract_hashtags, TagMode};
///
/// assert_eq!(extract_hashtags("期待#林峰#新专辑", TagMode::Paired), ["林峰"]);
/// assert_eq!(extract_hashtags("check #Freetibet now", TagMode::Prefix), ["freetibet"]);
/// ```
pub fn extract_hashtags(text: &str, tag_mode: TagMode) -> Vec<String> {
    let mut tags: Vec<String> = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        if chars[i] != '#' {
            i += 1;
            continue;
        }
        match tag_mode {
            TagMode::Paired => {
                // Candidate runs to the next '#'; a newline in between voids it.
                let mut j = i + 1;
                while j < chars.len() && chars[j] != '#' && chars[j] != '\n' {
                    j += 1;
                }
                if j < chars.len() && chars[j] == '#' {
                    let len = j - i - 1;
                    if (1..=MAX_TAG_CHARS).contains(&len) {
                        push_tag(&mut tags, &chars[i + 1..j]);
                        i = j + 1; // closing '#' consumed
                        continue;
                    }
                }
                // Invalid candidate: the closing '#' (if any) may open a new tag.
                i = j.max(i + 1);
            }
            TagMode::Prefix => {
                let mut j = i + 1;
                while j < chars.len() && is_word_char(chars[j]) {
                    j += 1;
                }
                let len = j - i - 1;
                if (1..=MAX_TAG_CHARS).contains(&len) {
                    push_tag(&mut tags, &chars[i + 1..j]);
                }
                i = j.max(i + 1);
            }
        }
    }
    tags
}

fn push_tag(tags: &mut Vec<String>, raw: &[char]) {
    let tag: String = raw.iter().map(|c| c.to_ascii_lowercase()).collect();
    if !tags.contains(&tag) {
        tags.push(tag);
    }
}

pub(crate) fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Returns the sub-corpus of posts flagged as deleted, order preserved.
pub fn filter_deleted(corpus: &Corpus) -> Corpus {
    Corpus {
        platform: corpus.platform.clone(),
        tag_mode: corpus.tag_mode,
        posts: corpus.posts.iter().filter(|p| p.deleted).cloned().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn paired_extraction() {
        assert_eq!(extract_hashtags("期待#林峰#新专辑", TagMode::Paired), vec!["林峰"]);
    }

    #[test]
    fn prefix_extraction_case_folds() {
        assert_eq!(extract_hashtags("check #Freetibet now", TagMode::Prefix), vec!["freetibet"]);
    }

    #[test]
    fn no_tags_yields_empty() {
        assert!(extract_hashtags("no tags here", TagMode::Prefix).is_empty());
        assert!(extract_hashtags("no tags here", TagMode::Paired).is_empty());
    }

    #[test]
    fn paired_tags_do_not_cross_lines() {
        assert_eq!(extract_hashtags("#a\nb#c#", TagMode::Paired), vec!["c"]);
    }

    #[test]
    fn paired_empty_candidate_rescans_from_closing_hash() {
        // "##abc#": the empty "##" pair is invalid; its second '#' opens "abc".
        assert_eq!(extract_hashtags("##abc#", TagMode::Paired), vec!["abc"]);
    }

    #[test]
    fn paired_consecutive_tags() {
        assert_eq!(extract_hashtags("#a#x#b#", TagMode::Paired), vec!["a", "b"]);
    }

    #[test]
    fn prefix_stops_at_non_word_chars() {
        assert_eq!(extract_hashtags("#foo,bar #中文! x", TagMode::Prefix), vec!["foo", "中文"]);
    }

    #[test]
    fn duplicates_keep_first_occurrence() {
        assert_eq!(extract_hashtags("#A# and #a# again", TagMode::Paired), vec!["a"]);
    }

    #[test]
    fn overlong_candidates_are_dropped() {
        let long = "x".repeat(65);
        assert!(extract_hashtags(&alloc::format!("#{long}#"), TagMode::Paired).is_empty());
        assert!(extract_hashtags(&alloc::format!("#{long}"), TagMode::Prefix).is_empty());
        let ok = "x".repeat(64);
        assert_eq!(extract_hashtags(&alloc::format!("#{ok}#"), TagMode::Paired), vec![ok]);
    }

    #[test]
    fn microblog_validation() {
        assert!(Microblog::new("", "tw", "text", TagMode::Prefix).is_err());
        assert!(Microblog::new("p1", "tw", "   ", TagMode::Prefix).is_err());
        let post = Microblog::new("p1", "tw", "hi #Tag", TagMode::Prefix).unwrap();
        assert_eq!(post.hashtags, vec!["tag"]);
        assert!(!post.deleted);
    }

    #[test]
    fn filter_deleted_keeps_flagged_posts_in_order() {
        let mut corpus = Corpus::new("weibo", TagMode::Paired);
        for (id, deleted) in [("a", false), ("b", true), ("c", false)] {
            let mut post = Microblog::new(id, "weibo", "text", TagMode::Paired).unwrap();
            post.deleted = deleted;
            corpus.posts.push(post);
        }
        let kept = filter_deleted(&corpus);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept.posts[0].id, "b");

        corpus.posts.iter_mut().for_each(|p| p.deleted = false);
        assert!(filter_deleted(&corpus).is_empty());
        corpus.posts.iter_mut().for_each(|p| p.deleted = true);
        assert_eq!(filter_deleted(&corpus).posts, corpus.posts);
    }
}
