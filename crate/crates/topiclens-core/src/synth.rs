//! Seeded generators for corpora with planted topics and ground truth.
//!
//! The generators exist so the rest of the pipeline can be validated against
//! known answers: every post is sampled from one planted topic's term pool,
//! and the returned [`GroundTruth`] records the intended partition.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Microblog, TagMode};
use crate::error::{Error, Result};

/// Parameters of a synthetic corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    /// Number of planted topics.
    pub n_topics: usize,
    /// Distinct hashtags per topic.
    pub tags_per_topic: usize,
    /// Terms in each topic's pool.
    pub terms_per_topic: usize,
    pub posts_per_tag: usize,
    pub tokens_per_post: usize,
    /// Probability that a token is replaced by a draw from the noise pool.
    pub noise_prob: f64,
    /// Fraction of topic pools shared between the two corpora of
    /// [`generate_pair`].
    pub shared_topic_fraction: f64,
    pub seed: u64,
    /// Hashtag syntax written into the post text.
    pub tag_mode: TagMode,
    /// Fraction of posts marked deleted.
    pub deleted_fraction: f64,
    /// Terms in the noise pool; defaults to `terms_per_topic` via
    /// [`SynthSpec::new`].
    pub noise_pool_size: usize,
    /// Zipf exponent for skewed in-pool sampling; uniform when absent.
    pub zipf_exponent: Option<f64>,
}

impl SynthSpec {
    /// A spec with the given shape, paired tags, no deletions, and uniform
    /// sampling.
    pub fn new(
        n_topics: usize,
        tags_per_topic: usize,
        terms_per_topic: usize,
        posts_per_tag: usize,
        tokens_per_post: usize,
        noise_prob: f64,
        seed: u64,
    ) -> SynthSpec {
        SynthSpec {
            n_topics,
            tags_per_topic,
            terms_per_topic,
            posts_per_tag,
            tokens_per_post,
            noise_prob,
            shared_topic_fraction: 0.0,
            seed,
            tag_mode: TagMode::Paired,
            deleted_fraction: 0.0,
            noise_pool_size: terms_per_topic,
            zipf_exponent: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let counts: [(&'static str, usize); 6] = [
            ("n_topics", self.n_topics),
            ("tags_per_topic", self.tags_per_topic),
            ("terms_per_topic", self.terms_per_topic),
            ("posts_per_tag", self.posts_per_tag),
            ("tokens_per_post", self.tokens_per_post),
            ("noise_pool_size", self.noise_pool_size),
        ];
        for (name, value) in counts {
            if value == 0 {
                return Err(Error::InvalidParameter { name, reason: "must be at least 1" });
            }
        }
        if !(0.0..1.0).contains(&self.noise_prob) {
            return Err(Error::InvalidParameter {
                name: "noise_prob",
                reason: "must be in [0, 1)",
            });
        }
        if !(0.0..=1.0).contains(&self.shared_topic_fraction) {
            return Err(Error::InvalidParameter {
                name: "shared_topic_fraction",
                reason: "must be in [0, 1]",
            });
        }
        if !(0.0..=1.0).contains(&self.deleted_fraction) {
            return Err(Error::InvalidParameter {
                name: "deleted_fraction",
                reason: "must be in [0, 1]",
            });
        }
        if let Some(s) = self.zipf_exponent {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "zipf_exponent",
                    reason: "must be positive and finite",
                });
            }
        }
        Ok(())
    }

    /// Number of shared topic pools in a generated pair.
    pub fn shared_topics(&self) -> usize {
        (self.shared_topic_fraction * self.n_topics as f64) as usize
    }
}

/// The planted structure behind one or two generated corpora.
///
/// Topic ids are global across a pair: the first corpus plants
/// `0..n_topics`; non-shared topics of the second corpus continue from
/// `n_topics`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroundTruth {
    pub tag_topics: BTreeMap<String, u32>,
    pub post_topics: BTreeMap<String, u32>,
    /// Topic ids planted in both corpora of a pair.
    pub shared_topic_ids: Vec<u32>,
    /// Term pool per topic id.
    pub topic_terms: BTreeMap<u32, Vec<String>>,
    /// Noise terms of all generated corpora.
    pub noise_terms: Vec<String>,
}

impl GroundTruth {
    /// Every distinct term the generator used, sorted. Feeding these to a
    /// segmentation dictionary makes the synthetic corpora round-trip through
    /// the real preprocessing chain.
    pub fn all_terms(&self) -> Vec<String> {
        let mut terms: Vec<String> =
            self.topic_terms.values().flatten().chain(self.noise_terms.iter()).cloned().collect();
        terms.sort_unstable();
        terms.dedup();
        terms
    }
}

/// Synthetic terms are two-character strings from the private use area, so
/// they can never collide with real dictionary entries or hashtags.
fn term(index: usize) -> String {
    let base = 0xE000 + 2 * index as u32;
    debug_assert!(base < 0xF8FF, "term index {index} leaves the private use area");
    let a = char::from_u32(base).unwrap();
    let b = char::from_u32(base + 1).unwrap();
    let mut s = String::with_capacity(8);
    s.push(a);
    s.push(b);
    s
}

fn pool(start: usize, len: usize) -> Vec<String> {
    (start..start + len).map(term).collect()
}

struct Sampler {
    /// Cumulative weights for Zipf draws; empty means uniform.
    cumulative: Vec<f64>,
}

impl Sampler {
    fn new(pool_len: usize, zipf_exponent: Option<f64>) -> Sampler {
        let cumulative = match zipf_exponent {
            None => Vec::new(),
            Some(s) => {
                let mut acc = 0.0;
                (0..pool_len)
                    .map(|rank| {
                        acc += libm::pow((rank + 1) as f64, -s);
                        acc
                    })
                    .collect()
            }
        };
        Sampler { cumulative }
    }

    fn draw(&self, rng: &mut ChaCha8Rng, pool_len: usize) -> usize {
        if self.cumulative.is_empty() {
            rng.gen_range(0..pool_len)
        } else {
            let x = rng.gen::<f64>() * self.cumulative[self.cumulative.len() - 1];
            self.cumulative.partition_point(|&c| c < x).min(pool_len - 1)
        }
    }
}

struct Emitter<'a> {
    spec: &'a SynthSpec,
    rng: ChaCha8Rng,
    sampler: Sampler,
    noise: Vec<String>,
}

impl<'a> Emitter<'a> {
    fn new(spec: &'a SynthSpec, noise: Vec<String>) -> Emitter<'a> {
        Emitter {
            spec,
            rng: ChaCha8Rng::seed_from_u64(spec.seed),
            sampler: Sampler::new(spec.terms_per_topic, spec.zipf_exponent),
            noise,
        }
    }

    /// Appends all posts of one platform to `corpus` and records them in the
    /// ground truth. `topic_ids[k]` is the global id of the platform's k-th
    /// planted topic.
    fn emit_platform(
        &mut self,
        corpus: &mut Corpus,
        truth: &mut GroundTruth,
        tag_prefix: &str,
        topic_ids: &[u32],
        pools: &BTreeMap<u32, Vec<String>>,
    ) {
        let mut seq = 0usize;
        for (k, &topic_id) in topic_ids.iter().enumerate() {
            let pool = &pools[&topic_id];
            for tag_idx in 0..self.spec.tags_per_topic {
                let tag = format!("{tag_prefix}{k:03}x{tag_idx}");
                truth.tag_topics.insert(tag.clone(), topic_id);
                for _ in 0..self.spec.posts_per_tag {
                    let id = format!("{}-{seq:06}", corpus.platform);
                    seq += 1;
                    let mut text = match self.spec.tag_mode {
                        TagMode::Paired => format!("#{tag}#"),
                        TagMode::Prefix => format!("#{tag} "),
                    };
                    for _ in 0..self.spec.tokens_per_post {
                        if self.spec.noise_prob > 0.0
                            && self.rng.gen_bool(self.spec.noise_prob)
                        {
                            let i = self.rng.gen_range(0..self.noise.len());
                            text.push_str(&self.noise[i]);
                        } else {
                            let i = self.sampler.draw(&mut self.rng, pool.len());
                            text.push_str(&pool[i]);
                        }
                    }
                    let mut post =
                        Microblog::new(id.clone(), corpus.platform.clone(), text, corpus.tag_mode)
                            .expect("generated posts are valid");
                    if self.spec.deleted_fraction > 0.0 {
                        post.deleted = self.rng.gen_bool(self.spec.deleted_fraction);
                    }
                    truth.post_topics.insert(id, topic_id);
                    corpus.posts.push(post);
                }
            }
        }
    }
}

/// Generates one corpus with `n_topics` planted topics.
///
/// Every post carries exactly one hashtag; tokens are drawn from the post's
/// topic pool, each replaced with probability `noise_prob` by a noise-pool
/// draw. Deterministic for a fixed spec.
pub fn generate(spec: &SynthSpec) -> Result<(Corpus, GroundTruth)> {
    spec.validate()?;
    let mut truth = GroundTruth::default();
    let pools: BTreeMap<u32, Vec<String>> = (0..spec.n_topics)
        .map(|k| (k as u32, pool(k * spec.terms_per_topic, spec.terms_per_topic)))
        .collect();
    truth.topic_terms = pools.clone();
    let noise = pool(spec.n_topics * spec.terms_per_topic, spec.noise_pool_size);
    truth.noise_terms = noise.clone();

    let mut corpus = Corpus::new("synth", spec.tag_mode);
    let topic_ids: Vec<u32> = (0..spec.n_topics as u32).collect();
    Emitter::new(spec, noise).emit_platform(&mut corpus, &mut truth, "t", &topic_ids, &pools);
    Ok((corpus, truth))
}

/// Generates two corpora sharing `floor(shared_topic_fraction * n_topics)`
/// topic pools. Hashtags differ between the platforms even for shared
/// topics, and each platform has its own noise pool.
pub fn generate_pair(spec: &SynthSpec) -> Result<(Corpus, Corpus, GroundTruth)> {
    spec.validate()?;
    let shared = spec.shared_topics();
    let k = spec.n_topics;
    let p = spec.terms_per_topic;
    let mut truth = GroundTruth::default();

    // Term index layout: corpus A pools, then B's fresh pools, then the two
    // noise pools.
    let pools_a: BTreeMap<u32, Vec<String>> =
        (0..k).map(|i| (i as u32, pool(i * p, p))).collect();
    let fresh = k - shared;
    let pools_b: BTreeMap<u32, Vec<String>> = (0..k)
        .map(|i| {
            if i < shared {
                (i as u32, pools_a[&(i as u32)].clone())
            } else {
                let id = (k + i - shared) as u32;
                (id, pool(k * p + (i - shared) * p, p))
            }
        })
        .collect();
    let noise_base = (k + fresh) * p;
    let noise_a = pool(noise_base, spec.noise_pool_size);
    let noise_b = pool(noise_base + spec.noise_pool_size, spec.noise_pool_size);

    truth.topic_terms = pools_a.iter().chain(pools_b.iter()).map(|(k, v)| (*k, v.clone())).collect();
    truth.noise_terms = noise_a.iter().chain(noise_b.iter()).cloned().collect();
    truth.shared_topic_ids = (0..shared as u32).collect();

    let ids_a: Vec<u32> = (0..k as u32).collect();
    let mut ids_b: Vec<u32> = truth.shared_topic_ids.clone();
    ids_b.extend((0..fresh).map(|i| (k + i) as u32));

    let mut corpus_a = Corpus::new("synth-a", spec.tag_mode);
    let mut corpus_b = Corpus::new("synth-b", spec.tag_mode);
    let mut emitter = Emitter::new(spec, noise_a);
    emitter.emit_platform(&mut corpus_a, &mut truth, "a", &ids_a, &pools_a);
    emitter.noise = noise_b;
    emitter.emit_platform(&mut corpus_b, &mut truth, "b", &ids_b, &pools_b);
    Ok((corpus_a, corpus_b, truth))
}
