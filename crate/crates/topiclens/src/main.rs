//! Command-line front end for the topic detection pipeline.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use topiclens::config::{BuildSettings, FileConfig};
use topiclens::corpus_io::{read_assignments, read_corpus, write_assignments, write_corpus};
use topiclens::files::{InputDigest, Manifest};
use topiclens::model_io::{load_model, save_dendrogram, save_model, ConfigSnapshot, LoadedModel};
use topiclens::reports::{
    calibration_report, comparison_report, ground_truth_file, ranked_topics, write_matrix_csv,
    write_report, write_synth_dictionary, KendallReport, RankedTopic, RerankReportFile,
    SynthSnapshot,
};
use topiclens::resources::load_preprocessor;
use topiclens::{init_thread_pool, tokenize_corpus};

use topiclens_core::{
    assign_post, calibrate, cross_coverage, cross_matrix, distance_cdf, filter_deleted,
    generate, generate_pair, kendall_tau, rank_topics, rerank_deleted, SynthSpec, TagMode,
    TokenizedPost, TopicModel, TopicRanking,
};

#[derive(Parser)]
#[command(
    name = "topiclens",
    version,
    about = "Hashtag-seeded topic detection and cross-corpus comparison for microblog corpora"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a topic model from a hashtagged JSONL corpus
    Build(BuildArgs),
    /// Classify the posts of a corpus against a model
    Assign(AssignArgs),
    /// Measure intra/inter centroid distances and recommend a threshold
    Calibrate(CalibrateArgs),
    /// Compare the topic spaces of two models
    Compare(CompareArgs),
    /// Re-rank a model's topics by how often deleted posts land in them
    RerankDeleted(RerankArgs),
    /// Generate synthetic corpora with planted topics and ground truth
    Synth(SynthArgs),
}

/// Flags shared by every command that re-runs preprocessing.
#[derive(Args, Debug, Clone)]
struct ResourceArgs {
    /// Segmentation dictionary TSV (term TAB pos); bundled one by default
    #[arg(long)]
    dict: Option<PathBuf>,
    /// Traditional→simplified TSV table; bundled one by default
    #[arg(long)]
    t2s: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BuildArgs {
    /// Input corpus (JSONL)
    #[arg(long)]
    input: PathBuf,
    /// Output model file (JSON)
    #[arg(long)]
    out: PathBuf,
    /// Optional key=value config file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Platform label; defaults to the input file stem
    #[arg(long)]
    platform: Option<String>,
    /// Hashtag syntax: paired (#tag#) or prefix (#tag)
    #[arg(long)]
    tag_mode: Option<String>,
    /// Number of hashtags to keep, by post count
    #[arg(long)]
    top_tags: Option<usize>,
    /// Number of topics used in rankings and comparisons
    #[arg(long)]
    top_topics: Option<usize>,
    /// Terms kept per tag vector
    #[arg(long)]
    terms_per_vector: Option<usize>,
    /// Term selection: frequency or tfidf
    #[arg(long)]
    selection: Option<String>,
    /// Centroid derivation: mean or retop10
    #[arg(long)]
    centroid: Option<String>,
    /// Assignment distance threshold in (0, 1]
    #[arg(long)]
    threshold: Option<f64>,
    /// Seed recorded in the model (generation uses it; the build is
    /// deterministic regardless)
    #[arg(long)]
    seed: Option<u64>,
    /// Also export the tag merge tree as JSON
    #[arg(long)]
    dendrogram: Option<PathBuf>,
    #[command(flatten)]
    resources: ResourceArgs,
}

#[derive(Args, Debug)]
struct AssignArgs {
    /// Model file from `build`
    #[arg(long)]
    model: PathBuf,
    /// Corpus to classify (JSONL)
    #[arg(long)]
    input: PathBuf,
    /// Output assignments (JSONL)
    #[arg(long)]
    out: PathBuf,
    /// Override the model's distance threshold
    #[arg(long)]
    threshold: Option<f64>,
    /// Override the model's hashtag syntax for reading the corpus
    #[arg(long)]
    tag_mode: Option<String>,
    #[command(flatten)]
    resources: ResourceArgs,
}

#[derive(Args, Debug)]
struct CalibrateArgs {
    #[arg(long)]
    model: PathBuf,
    /// Tagged corpus to measure (JSONL)
    #[arg(long)]
    input: PathBuf,
    /// Output calibration report (JSON)
    #[arg(long)]
    out: PathBuf,
    /// Desired fraction of tagged posts within the recommended threshold
    #[arg(long, default_value_t = 0.65)]
    target: f64,
    #[command(flatten)]
    resources: ResourceArgs,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[arg(long)]
    model_a: PathBuf,
    #[arg(long)]
    model_b: PathBuf,
    /// Topics per model entering the distance matrix; defaults to the
    /// smaller of the two models' configured budgets
    #[arg(long)]
    top_k: Option<usize>,
    /// Output report (JSON)
    #[arg(long)]
    out: PathBuf,
    /// Output distance matrix (CSV)
    #[arg(long)]
    matrix: PathBuf,
    /// Corpus of platform A, for coverage of A's posts on model B
    #[arg(long)]
    corpus_a: Option<PathBuf>,
    /// Corpus of platform B, for coverage of B's posts on model A
    #[arg(long)]
    corpus_b: Option<PathBuf>,
    /// Override both models' thresholds for coverage
    #[arg(long)]
    threshold: Option<f64>,
    #[command(flatten)]
    resources: ResourceArgs,
}

#[derive(Args, Debug)]
struct RerankArgs {
    /// Model whose topics get re-ranked (typically the other platform's)
    #[arg(long)]
    model: PathBuf,
    /// Corpus containing deleted posts (JSONL)
    #[arg(long)]
    input: PathBuf,
    /// Output report (JSON)
    #[arg(long)]
    out: PathBuf,
    /// Size of the reference ranking entering the rank correlation
    #[arg(long, default_value_t = 100)]
    top_k: usize,
    /// Assignments of the model's own corpus; ranks the reference by
    /// assignment counts instead of member post counts
    #[arg(long)]
    base_assignments: Option<PathBuf>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    tag_mode: Option<String>,
    #[command(flatten)]
    resources: ResourceArgs,
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Output corpus (JSONL)
    #[arg(long)]
    out: PathBuf,
    /// Second corpus; switches to paired-platform generation
    #[arg(long)]
    out_b: Option<PathBuf>,
    /// Ground truth output (JSON)
    #[arg(long)]
    truth: PathBuf,
    /// Dictionary TSV covering the synthetic terms
    #[arg(long)]
    dict_out: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    topics: usize,
    #[arg(long, default_value_t = 5)]
    tags_per_topic: usize,
    #[arg(long, default_value_t = 40)]
    terms_per_topic: usize,
    #[arg(long, default_value_t = 100)]
    posts_per_tag: usize,
    #[arg(long, default_value_t = 8)]
    tokens_per_post: usize,
    /// Probability that a token is noise
    #[arg(long, default_value_t = 0.1)]
    noise: f64,
    /// Fraction of topics shared between the two corpora
    #[arg(long, default_value_t = 0.0)]
    shared: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "paired")]
    tag_mode: String,
    /// Fraction of posts marked deleted
    #[arg(long, default_value_t = 0.0)]
    deleted_fraction: f64,
    /// Noise pool size; defaults to terms-per-topic
    #[arg(long)]
    noise_pool: Option<usize>,
    /// Zipf exponent for skewed in-pool sampling (uniform when absent)
    #[arg(long)]
    zipf: Option<f64>,
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    init_thread_pool();
    match Cli::parse().command {
        Command::Build(args) => build(args),
        Command::Assign(args) => assign(args),
        Command::Calibrate(args) => run_calibrate(args),
        Command::Compare(args) => compare(args),
        Command::RerankDeleted(args) => rerank(args),
        Command::Synth(args) => synth(args),
    }
}

fn parse_tag_mode(s: &str) -> anyhow::Result<TagMode> {
    TagMode::parse(s).with_context(|| format!("unknown tag mode {s:?} (paired or prefix)"))
}

fn platform_label(explicit: Option<String>, input: &Path) -> String {
    explicit.unwrap_or_else(|| {
        input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| {
            "corpus".to_string()
        })
    })
}

/// Reads and tokenizes a corpus, returning the posts plus the digests of the
/// corpus and preprocessing resources.
fn load_posts(
    input: &Path,
    tag_mode: TagMode,
    platform: &str,
    resources: &ResourceArgs,
) -> anyhow::Result<(Vec<TokenizedPost>, topiclens_core::Corpus, Vec<InputDigest>)> {
    let (preprocessor, mut digests) =
        load_preprocessor(resources.dict.as_deref(), resources.t2s.as_deref())?;
    let outcome = read_corpus(input, tag_mode, platform)?;
    if outcome.skipped > 0 {
        log::warn!("{}: skipped {} invalid records", input.display(), outcome.skipped);
    }
    eprintln!(
        "read {} posts from {} ({} skipped)",
        outcome.corpus.len(),
        input.display(),
        outcome.skipped
    );
    digests.insert(0, outcome.digest);
    let posts = tokenize_corpus(&outcome.corpus, &preprocessor);
    Ok((posts, outcome.corpus, digests))
}

fn build(args: BuildArgs) -> anyhow::Result<()> {
    let file_config = match &args.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let overrides = FileConfig {
        tag_mode: args.tag_mode.clone(),
        top_tags: args.top_tags,
        top_topics: args.top_topics,
        terms_per_vector: args.terms_per_vector,
        selection: args.selection.clone(),
        centroid: args.centroid.clone(),
        threshold: args.threshold,
        dictionary: args.resources.dict.clone(),
        t2s_table: args.resources.t2s.clone(),
        seed: args.seed,
    };
    let BuildSettings { build: config, dictionary, t2s_table } =
        file_config.merged(overrides).into_settings()?;
    let resources = ResourceArgs { dict: dictionary, t2s: t2s_table };

    let platform = platform_label(args.platform, &args.input);
    let (posts, _, digests) = load_posts(&args.input, config.tag_mode, &platform, &resources)?;
    let (model, dendrogram) =
        topiclens_core::build_model_with_dendrogram(&posts, &platform, &config)?;

    let manifest = |command: &str| {
        let mut m = Manifest::new(command).with_config(&ConfigSnapshot::from(&config));
        for digest in &digests {
            m = m.with_input(digest.clone());
        }
        m
    };
    save_model(&args.out, &model, manifest("build"))?;
    eprintln!(
        "built model {}: {} tags clustered into {} topics",
        args.out.display(),
        dendrogram.n_leaves(),
        model.topics.len()
    );
    if let Some(path) = &args.dendrogram {
        save_dendrogram(path, &dendrogram, manifest("build"))?;
    }
    Ok(())
}

fn assign(args: AssignArgs) -> anyhow::Result<()> {
    let LoadedModel { model, digest, .. } = load_model(&args.model)?;
    let threshold = override_threshold(&model, args.threshold)?;
    let tag_mode = match &args.tag_mode {
        Some(s) => parse_tag_mode(s)?,
        None => model.config.tag_mode,
    };
    let platform = platform_label(None, &args.input);
    let (posts, _, mut digests) = load_posts(&args.input, tag_mode, &platform, &args.resources)?;
    digests.insert(0, digest);

    let assignments: Vec<_> =
        posts.par_iter().map(|post| assign_post(post, &model, threshold)).collect();
    let assigned = assignments.iter().filter(|a| a.topic_id.is_some()).count();

    let mut manifest = Manifest::new("assign")
        .with_config(&serde_json::json!({ "threshold": threshold }));
    for digest in digests {
        manifest = manifest.with_input(digest);
    }
    write_assignments(&args.out, &assignments, &manifest)?;
    eprintln!("assigned {assigned} of {} posts -> {}", assignments.len(), args.out.display());
    Ok(())
}

fn run_calibrate(args: CalibrateArgs) -> anyhow::Result<()> {
    let LoadedModel { model, digest, .. } = load_model(&args.model)?;
    let platform = platform_label(None, &args.input);
    let (posts, _, mut digests) =
        load_posts(&args.input, model.config.tag_mode, &platform, &args.resources)?;
    digests.insert(0, digest);

    let report = calibrate(&model, &posts, args.target)?;
    let mut manifest = Manifest::new("calibrate")
        .with_config(&serde_json::json!({ "target": args.target }));
    for digest in digests {
        manifest = manifest.with_input(digest);
    }
    eprintln!(
        "calibrated over {} intra / {} inter distances; recommended threshold {}",
        report.intra.count, report.inter.count, report.recommended_threshold
    );
    write_report(&args.out, &calibration_report(manifest, args.target, &report))?;
    Ok(())
}

fn override_threshold(model: &TopicModel, flag: Option<f64>) -> anyhow::Result<f64> {
    let threshold = flag.unwrap_or(model.threshold);
    if !(threshold > 0.0 && threshold <= 1.0) {
        bail!("threshold {threshold} outside (0, 1]");
    }
    Ok(threshold)
}

fn compare(args: CompareArgs) -> anyhow::Result<()> {
    let a = load_model(&args.model_a)?;
    let b = load_model(&args.model_b)?;
    let top_k = args
        .top_k
        .unwrap_or_else(|| a.model.config.top_topics.min(b.model.config.top_topics));

    let matrix = cross_matrix(&a.model, &b.model, top_k)?;
    let cdf = distance_cdf(&matrix, 0.01)?;

    let coverage_a_on_b = match &args.corpus_a {
        Some(path) => {
            let threshold = override_threshold(&b.model, args.threshold)?;
            let platform = platform_label(None, path);
            let (posts, _, _) =
                load_posts(path, a.model.config.tag_mode, &platform, &args.resources)?;
            Some(cross_coverage(&b.model, &posts, threshold)?)
        }
        None => None,
    };
    let coverage_b_on_a = match &args.corpus_b {
        Some(path) => {
            let threshold = override_threshold(&a.model, args.threshold)?;
            let platform = platform_label(None, path);
            let (posts, _, _) =
                load_posts(path, b.model.config.tag_mode, &platform, &args.resources)?;
            Some(cross_coverage(&a.model, &posts, threshold)?)
        }
        None => None,
    };

    let ranked = |model: &TopicModel| -> Vec<RankedTopic> {
        model
            .top_topics(top_k)
            .into_iter()
            .map(|t| RankedTopic { topic_id: t.id, label: t.label.clone(), count: t.post_count })
            .collect()
    };
    let mut manifest = Manifest::new("compare")
        .with_config(&serde_json::json!({ "top_k": top_k }))
        .with_input(a.digest)
        .with_input(b.digest);
    for path in [&args.corpus_a, &args.corpus_b].into_iter().flatten() {
        let bytes = topiclens::files::read_bytes(path)?;
        manifest = manifest.with_input(InputDigest::new("corpus", path.display().to_string(), &bytes));
    }

    let report = comparison_report(
        manifest,
        top_k,
        ranked(&a.model),
        ranked(&b.model),
        &cdf,
        coverage_a_on_b,
        coverage_b_on_a,
    );
    write_report(&args.out, &report)?;
    write_matrix_csv(&args.matrix, &matrix)?;
    eprintln!(
        "compared {}x{} topic pairs; {:.1}% below 0.9 -> {}, {}",
        matrix.n_rows(),
        matrix.n_cols(),
        100.0 * report.frac_below,
        args.out.display(),
        args.matrix.display()
    );
    Ok(())
}

fn rerank(args: RerankArgs) -> anyhow::Result<()> {
    let LoadedModel { model, digest, .. } = load_model(&args.model)?;
    let threshold = override_threshold(&model, args.threshold)?;
    let tag_mode = match &args.tag_mode {
        Some(s) => parse_tag_mode(s)?,
        None => model.config.tag_mode,
    };
    let platform = platform_label(None, &args.input);
    let (preprocessor, resource_digests) =
        load_preprocessor(args.resources.dict.as_deref(), args.resources.t2s.as_deref())?;
    let outcome = read_corpus(&args.input, tag_mode, &platform)?;
    let deleted_corpus = filter_deleted(&outcome.corpus);
    eprintln!(
        "{} deleted posts among {} in {}",
        deleted_corpus.len(),
        outcome.corpus.len(),
        args.input.display()
    );
    let deleted_posts = tokenize_corpus(&deleted_corpus, &preprocessor);

    let deleted_ranking = rerank_deleted(&model, &deleted_posts, threshold)?;
    let classified: u64 = deleted_ranking.entries.iter().map(|&(_, n)| n).sum();

    let labels: BTreeMap<u32, String> =
        model.topics.iter().map(|t| (t.id, t.label.clone())).collect();

    let mut manifest = Manifest::new("rerank-deleted")
        .with_config(&serde_json::json!({ "top_k": args.top_k, "threshold": threshold }))
        .with_input(digest)
        .with_input(outcome.digest);
    for digest in resource_digests {
        manifest = manifest.with_input(digest);
    }

    // Reference ranking over the model's top topics: assignment counts when
    // provided, member post counts otherwise.
    let base_ranking = match &args.base_assignments {
        Some(path) => {
            let (assignments, digest) = read_assignments(path)?;
            manifest = manifest.with_input(digest);
            let mut ranking = rank_topics(&assignments);
            ranking.entries.truncate(args.top_k);
            ranking
        }
        None => TopicRanking {
            entries: model
                .top_topics(args.top_k)
                .into_iter()
                .map(|t| (t.id, t.post_count))
                .collect(),
        },
    };

    let kendall = kendall_for_rerank(&base_ranking, &deleted_ranking);

    let report = RerankReportFile {
        tool: "topiclens".to_string(),
        version: topiclens_core::VERSION.to_string(),
        kind: "rerank-report".to_string(),
        manifest,
        top_k: args.top_k,
        deleted_posts: deleted_posts.len(),
        classified: classified as usize,
        base_ranking: ranked_topics(&base_ranking, &labels),
        deleted_ranking: ranked_topics(&deleted_ranking, &labels),
        kendall,
    };
    write_report(&args.out, &report)?;
    eprintln!(
        "classified {} deleted posts into {} topics -> {}",
        classified,
        report.deleted_ranking.len(),
        args.out.display()
    );
    Ok(())
}

/// Rank correlation between the reference ranking and the deleted re-ranking
/// restricted to the reference ids (absent topics count zero).
fn kendall_for_rerank(base: &TopicRanking, deleted: &TopicRanking) -> Option<KendallReport> {
    let base_ids = base.ids();
    if base_ids.len() < 2 {
        return None;
    }
    let restricted = TopicRanking {
        entries: deleted
            .entries
            .iter()
            .filter(|(id, _)| base_ids.contains(id))
            .copied()
            .collect(),
    };
    let full = restricted.extended_with_zeros(&base_ids);
    match kendall_tau(&base_ids, &full.ids()) {
        Ok((tau, p_value)) => Some(KendallReport { tau, p_value, n: base_ids.len() }),
        Err(err) => {
            log::warn!("skipping rank correlation: {err}");
            None
        }
    }
}

fn synth(args: SynthArgs) -> anyhow::Result<()> {
    let tag_mode = parse_tag_mode(&args.tag_mode)?;
    let mut spec = SynthSpec::new(
        args.topics,
        args.tags_per_topic,
        args.terms_per_topic,
        args.posts_per_tag,
        args.tokens_per_post,
        args.noise,
        args.seed,
    );
    spec.shared_topic_fraction = args.shared;
    spec.tag_mode = tag_mode;
    spec.deleted_fraction = args.deleted_fraction;
    if let Some(noise_pool) = args.noise_pool {
        spec.noise_pool_size = noise_pool;
    }
    spec.zipf_exponent = args.zipf;

    let manifest = Manifest::new("synth").with_config(&SynthSnapshot::from(&spec));
    let truth = if let Some(out_b) = &args.out_b {
        let (corpus_a, corpus_b, truth) = generate_pair(&spec)?;
        write_corpus(&args.out, &corpus_a, &manifest)?;
        write_corpus(out_b, &corpus_b, &manifest)?;
        eprintln!(
            "generated {} + {} posts ({} shared topics) -> {}, {}",
            corpus_a.len(),
            corpus_b.len(),
            truth.shared_topic_ids.len(),
            args.out.display(),
            out_b.display()
        );
        truth
    } else {
        let (corpus, truth) = generate(&spec)?;
        write_corpus(&args.out, &corpus, &manifest)?;
        eprintln!("generated {} posts -> {}", corpus.len(), args.out.display());
        truth
    };
    write_report(&args.truth, &ground_truth_file(manifest.clone(), &truth))?;
    if let Some(dict_out) = &args.dict_out {
        write_synth_dictionary(dict_out, &truth, &manifest)?;
    }
    Ok(())
}
