//! Text normalization, traditional→simplified conversion, word segmentation,
//! and part-of-speech filtering.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::{is_word_char, Microblog};

/// Longest run of word characters removed after an `@`.
pub const MAX_MENTION_CHARS: usize = 30;

/// Minimum surface length (in characters) for a token to survive filtering.
pub const MIN_TOKEN_CHARS: usize = 2;

/// Part-of-speech tag.
///
/// The inventory is the eight content categories kept by the pipeline plus
/// `Unknown` for everything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Pos {
    /// n — common noun
    Noun,
    /// nr — person name
    Name,
    /// ns — location
    Location,
    /// nt — organization
    Organization,
    /// t — time word
    Time,
    /// s — place word
    Place,
    /// f — position word
    Position,
    /// v — verb
    Verb,
    /// x — unknown / out of inventory
    Unknown,
}

impl Pos {
    pub fn tag(self) -> &'static str {
        match self {
            Pos::Noun => "n",
            Pos::Name => "nr",
            Pos::Location => "ns",
            Pos::Organization => "nt",
            Pos::Time => "t",
            Pos::Place => "s",
            Pos::Position => "f",
            Pos::Verb => "v",
            Pos::Unknown => "x",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Pos> {
        Some(match tag {
            "n" => Pos::Noun,
            "nr" => Pos::Name,
            "ns" => Pos::Location,
            "nt" => Pos::Organization,
            "t" => Pos::Time,
            "s" => Pos::Place,
            "f" => Pos::Position,
            "v" => Pos::Verb,
            "x" => Pos::Unknown,
            _ => return None,
        })
    }

    /// True for the eight categories kept by [`filter_tokens`].
    pub fn is_content(self) -> bool {
        self != Pos::Unknown
    }
}

/// A segmented word with its part-of-speech tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub pos: Pos,
}

impl Token {
    pub fn new(surface: impl Into<String>, pos: Pos) -> Token {
        Token { surface: surface.into(), pos }
    }
}

/// A post after preprocessing: content tokens plus the hashtags carried over
/// from the raw post.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenizedPost {
    pub post_id: String,
    pub tokens: Vec<Token>,
    pub hashtags: Vec<String>,
}

/// Maps a string to an ordered token list. The bundled implementation is
/// [`MaxMatchSegmenter`]; external segmenters plug in through this trait.
pub trait Segmenter {
    fn segment(&self, text: &str) -> Vec<Token>;
}

/// Removes short-URL runs and user mentions, then collapses whitespace.
///
/// A URL is `http://` or `https://` plus the maximal following run of
/// non-whitespace. A mention is `@` plus a run of word characters; at most
/// [`MAX_MENTION_CHARS`] characters of the run are removed, so pathological
/// runs do not swallow the rest of the post. Idempotent.
pub fn normalize(text: &str) -> String {
    let without_urls = strip_urls(text);
    let without_mentions = strip_mentions(&without_urls);
    collapse_whitespace(&without_mentions)
}

fn strip_urls(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    loop {
        let hit = ["http://", "https://"]
            .iter()
            .filter_map(|scheme| rest.find(scheme))
            .min();
        match hit {
            Some(start) => {
                out.push_str(&rest[..start]);
                let tail = &rest[start..];
                let end = tail.find(char::is_whitespace).unwrap_or(tail.len());
                rest = &tail[end..];
            }
            None => {
                out.push_str(rest);
                return out;
            }
        }
    }
}

fn strip_mentions(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '@' {
            let mut j = i + 1;
            while j < chars.len() && is_word_char(chars[j]) && j - i - 1 < MAX_MENTION_CHARS {
                j += 1;
            }
            if j > i + 1 {
                i = j; // drop '@' and the (capped) handle run
                continue;
            }
        }
        out.push(chars[i]);
        i += 1;
    }
    out
}

fn collapse_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut in_space = false;
    for c in text.trim().chars() {
        if c.is_whitespace() {
            in_space = true;
        } else {
            if in_space && !out.is_empty() {
                out.push(' ');
            }
            in_space = false;
            out.push(c);
        }
    }
    out
}

/// Character-level traditional→simplified conversion table.
#[derive(Debug, Clone, Default)]
pub struct Simplifier {
    table: BTreeMap<char, char>,
}

impl Simplifier {
    pub fn new(table: BTreeMap<char, char>) -> Simplifier {
        Simplifier { table }
    }

    /// Parses a two-column TSV (`traditional TAB simplified`, one character
    /// each). Returns the table and the number of skipped malformed lines.
    /// Lines starting with `#` are comments.
    pub fn from_tsv(source: &str) -> (Simplifier, usize) {
        let mut table = BTreeMap::new();
        let mut skipped = 0;
        for line in source.lines() {
            let line = line.trim_end_matches('\r');
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split('\t');
            match (parse_single_char(cols.next()), parse_single_char(cols.next())) {
                (Some(from), Some(to)) if cols.next().is_none() => {
                    table.insert(from, to);
                }
                _ => skipped += 1,
            }
        }
        (Simplifier { table }, skipped)
    }

    /// Replaces every mapped character; output character count equals input
    /// character count.
    pub fn convert(&self, text: &str) -> String {
        text.chars().map(|c| *self.table.get(&c).unwrap_or(&c)).collect()
    }

    /// True when no mapping target is itself a mapped source, which makes
    /// [`Simplifier::convert`] idempotent.
    pub fn is_idempotent(&self) -> bool {
        self.table.values().all(|v| !self.table.contains_key(v))
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

fn parse_single_char(col: Option<&str>) -> Option<char> {
    let col = col?;
    let mut chars = col.chars();
    let c = chars.next()?;
    chars.next().is_none().then_some(c)
}

/// Term→POS dictionary for maximum matching.
#[derive(Debug, Clone, Default)]
pub struct Dictionary {
    entries: BTreeMap<String, Pos>,
    max_chars: usize,
}

impl Dictionary {
    /// Parses a two-column TSV (`term TAB pos-tag`). Duplicate terms keep the
    /// last entry; malformed lines and unknown tags are skipped and counted.
    /// Lines starting with `#` are comments.
    pub fn from_tsv(source: &str) -> (Dictionary, usize) {
        let mut dict = Dictionary::default();
        let mut skipped = 0;
        for line in source.lines() {
            let line = line.trim_end_matches('\r');
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split('\t');
            let parsed = match (cols.next(), cols.next(), cols.next()) {
                (Some(term), Some(tag), None) if !term.is_empty() => {
                    Pos::from_tag(tag).map(|pos| (term, pos))
                }
                _ => None,
            };
            match parsed {
                Some((term, pos)) => dict.insert(term, pos),
                None => skipped += 1,
            }
        }
        (dict, skipped)
    }

    pub fn insert(&mut self, term: impl Into<String>, pos: Pos) {
        let term = term.into();
        self.max_chars = self.max_chars.max(term.chars().count());
        self.entries.insert(term, pos);
    }

    pub fn get(&self, term: &str) -> Option<Pos> {
        self.entries.get(term).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Character length of the longest entry.
    pub fn max_chars(&self) -> usize {
        self.max_chars
    }
}

/// Greedy forward maximum matching against `dictionary`.
///
/// At each position the longest dictionary entry starting there is emitted
/// with its stored tag; when none matches, the single character is emitted
/// with [`Pos::Unknown`]. Concatenating the surfaces reproduces the input
/// exactly.
///
/// ```
/// use topiclens_core::{segment_maxmatch, Dictionary};
///
/// let (dict, _) = Dictionary::from_tsv("中国\tns\n人民\tn\n");
/// let tokens = segment_maxmatch("中国人民", &dict);
/// let words: Vec<&str> = tokens.iter().map(|t| t.surface.as_str()).collect();
/// assert_eq!(words, ["中国", "人民"]);
/// ```
pub fn segment_maxmatch(text: &str, dictionary: &Dictionary) -> Vec<Token> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let start = chars[i].0;
        let mut matched = None;
        let longest = dictionary.max_chars().min(chars.len() - i);
        for len in (1..=longest).rev() {
            let end = byte_end(text, &chars, i + len);
            let candidate = &text[start..end];
            if let Some(pos) = dictionary.get(candidate) {
                matched = Some((len, candidate, pos));
                break;
            }
        }
        match matched {
            Some((len, surface, pos)) => {
                tokens.push(Token::new(surface, pos));
                i += len;
            }
            None => {
                let end = byte_end(text, &chars, i + 1);
                tokens.push(Token::new(&text[start..end], Pos::Unknown));
                i += 1;
            }
        }
    }
    tokens
}

fn byte_end(text: &str, chars: &[(usize, char)], char_idx: usize) -> usize {
    chars.get(char_idx).map_or(text.len(), |&(b, _)| b)
}

/// The bundled [`Segmenter`].
#[derive(Debug, Clone, Default)]
pub struct MaxMatchSegmenter {
    dictionary: Dictionary,
}

impl MaxMatchSegmenter {
    pub fn new(dictionary: Dictionary) -> MaxMatchSegmenter {
        MaxMatchSegmenter { dictionary }
    }

    pub fn dictionary(&self) -> &Dictionary {
        &self.dictionary
    }
}

impl Segmenter for MaxMatchSegmenter {
    fn segment(&self, text: &str) -> Vec<Token> {
        segment_maxmatch(text, &self.dictionary)
    }
}

/// Keeps content-tagged tokens of at least [`MIN_TOKEN_CHARS`] characters,
/// order preserved.
pub fn filter_tokens(tokens: Vec<Token>) -> Vec<Token> {
    tokens
        .into_iter()
        .filter(|t| t.pos.is_content() && t.surface.chars().count() >= MIN_TOKEN_CHARS)
        .collect()
}

/// Full per-post preprocessing: normalize, simplify, segment, filter.
///
/// All steps are pure; posts can be processed in parallel.
#[derive(Debug, Clone)]
pub struct Preprocessor<S = MaxMatchSegmenter> {
    simplifier: Simplifier,
    segmenter: S,
}

impl<S: Segmenter> Preprocessor<S> {
    pub fn new(simplifier: Simplifier, segmenter: S) -> Preprocessor<S> {
        Preprocessor { simplifier, segmenter }
    }

    pub fn process(&self, post: &Microblog) -> TokenizedPost {
        let cleaned = normalize(&post.text);
        let simplified = self.simplifier.convert(&cleaned);
        let tokens = filter_tokens(self.segmenter.segment(&simplified));
        TokenizedPost { post_id: post.id.clone(), tokens, hashtags: post.hashtags.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn tok(surface: &str, pos: Pos) -> Token {
        Token::new(surface, pos)
    }

    #[test]
    fn normalize_strips_urls() {
        assert_eq!(normalize("看这个 http://t.cn/abc 哈哈"), "看这个 哈哈");
        assert_eq!(normalize("x https://e.com/a?b=1"), "x");
    }

    #[test]
    fn normalize_strips_mentions() {
        assert_eq!(normalize("@user1 你好"), "你好");
        assert_eq!(normalize("hi @张三 there"), "hi there");
    }

    #[test]
    fn normalize_identity_on_plain_text() {
        assert_eq!(normalize("plain text"), "plain text");
    }

    #[test]
    fn normalize_collapses_whitespace() {
        assert_eq!(normalize("  a \t b\n\nc  "), "a b c");
    }

    #[test]
    fn mention_removal_is_capped() {
        let text = alloc::format!("@{} tail", "a".repeat(40));
        // 30 of the 40 run characters are removed with the '@'.
        assert_eq!(normalize(&text), alloc::format!("{} tail", "a".repeat(10)));
    }

    #[test]
    fn bare_at_sign_is_kept() {
        assert_eq!(normalize("meet @ noon"), "meet @ noon");
    }

    #[test]
    fn simplifier_converts_mapped_chars() {
        let (s, skipped) = Simplifier::from_tsv("語\t语\n言\t言\n");
        assert_eq!(skipped, 0);
        assert_eq!(s.convert("語言"), "语言");
        assert_eq!(s.convert("abc"), "abc");
        assert_eq!(s.convert(""), "");
    }

    #[test]
    fn simplifier_preserves_char_count() {
        let (s, _) = Simplifier::from_tsv("體\t体\n");
        let input = "體育 body 體";
        assert_eq!(s.convert(input).chars().count(), input.chars().count());
    }

    #[test]
    fn simplifier_skips_malformed_lines() {
        let (s, skipped) = Simplifier::from_tsv("語\t语\nbadline\n多字\t多\n# comment\n");
        assert_eq!(s.len(), 1);
        assert_eq!(skipped, 2);
    }

    #[test]
    fn maxmatch_prefers_longest_entry() {
        let (dict, _) = Dictionary::from_tsv("中国\tn\n人民\tn\n");
        assert_eq!(
            segment_maxmatch("中国人民", &dict),
            vec![tok("中国", Pos::Noun), tok("人民", Pos::Noun)]
        );
    }

    #[test]
    fn maxmatch_greedy_overrun_is_accepted() {
        // Greedy matching takes 研究生 and strands 命; this is the documented
        // behavior of forward maximum matching.
        let (dict, _) = Dictionary::from_tsv("研究\tv\n研究生\tn\n");
        assert_eq!(
            segment_maxmatch("研究生命", &dict),
            vec![tok("研究生", Pos::Noun), tok("命", Pos::Unknown)]
        );
    }

    #[test]
    fn maxmatch_emits_unknown_single_chars() {
        let (dict, _) = Dictionary::from_tsv("中国\tn\n");
        assert_eq!(
            segment_maxmatch("X中国", &dict),
            vec![tok("X", Pos::Unknown), tok("中国", Pos::Noun)]
        );
    }

    #[test]
    fn maxmatch_loses_no_characters() {
        let (dict, _) = Dictionary::from_tsv("中国\tn\n国人\tn\n");
        for text in ["中国人 x 国人", "", "abc", "中中中"] {
            let joined: String =
                segment_maxmatch(text, &dict).iter().map(|t| t.surface.as_str()).collect();
            assert_eq!(joined, text);
        }
    }

    #[test]
    fn dictionary_last_entry_wins() {
        let (dict, _) = Dictionary::from_tsv("北京\tns\n北京\tn\n");
        assert_eq!(dict.get("北京"), Some(Pos::Noun));
    }

    #[test]
    fn dictionary_skips_unknown_tags() {
        let (dict, skipped) = Dictionary::from_tsv("北京\tns\n上海\tzz\n");
        assert_eq!(dict.len(), 1);
        assert_eq!(skipped, 1);
    }

    #[test]
    fn filter_keeps_content_tokens_of_two_chars() {
        let tokens = vec![tok("中国", Pos::Noun), tok("命", Pos::Unknown)];
        assert_eq!(filter_tokens(tokens), vec![tok("中国", Pos::Noun)]);
    }

    #[test]
    fn filter_drops_single_char_content_tokens() {
        assert!(filter_tokens(vec![tok("大", Pos::Noun)]).is_empty());
        assert!(filter_tokens(vec![]).is_empty());
    }

    #[test]
    fn preprocessor_runs_full_chain() {
        use crate::corpus::{Microblog, TagMode};
        let (simplifier, _) = Simplifier::from_tsv("國\t国\n");
        let (dict, _) = Dictionary::from_tsv("中国\tns\n加油\tv\n");
        let pre = Preprocessor::new(simplifier, MaxMatchSegmenter::new(dict));
        let post =
            Microblog::new("p1", "weibo", "@friend 中國加油 http://t.cn/x #tag#", TagMode::Paired)
                .unwrap();
        let tokenized = pre.process(&post);
        assert_eq!(
            tokenized.tokens,
            vec![tok("中国", Pos::Location), tok("加油", Pos::Verb)]
        );
        assert_eq!(tokenized.hashtags, vec!["tag"]);
        assert_eq!(tokenized.post_id, "p1");
    }
}
