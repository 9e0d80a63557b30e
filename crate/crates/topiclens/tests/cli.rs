//! End-to-end tests of the command-line interface.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_topiclens"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn assert_ok(output: &Output) {
    assert!(
        output.status.success(),
        "command failed: {}\n{}",
        output.status,
        String::from_utf8_lossy(&output.stderr)
    );
}

/// Generates a small paired-platform corpus and returns the directory.
fn synth_fixture(dir: &Path) {
    let output = run_in(
        dir,
        &[
            "synth",
            "--out", "a.jsonl",
            "--out-b", "b.jsonl",
            "--truth", "truth.json",
            "--dict-out", "dict.tsv",
            "--topics", "4",
            "--tags-per-topic", "3",
            "--terms-per-topic", "8",
            "--posts-per-tag", "20",
            "--tokens-per-post", "6",
            "--noise", "0.05",
            "--shared", "0.5",
            "--seed", "11",
        ],
    );
    assert_ok(&output);
}

#[test]
fn full_pipeline_over_synthetic_pair() {
    let dir = tempfile::tempdir().unwrap();
    synth_fixture(dir.path());

    for (input, model) in [("a.jsonl", "ma.json"), ("b.jsonl", "mb.json")] {
        let output = run_in(
            dir.path(),
            &[
                "build",
                "--input", input,
                "--dict", "dict.tsv",
                "--tag-mode", "paired",
                "--top-tags", "12",
                "--out", model,
                "--dendrogram", "dendro.json",
            ],
        );
        assert_ok(&output);
    }

    // Assigning the training corpus: every post's tag is in the model, so
    // everything resolves through the tag route.
    let output = run_in(
        dir.path(),
        &["assign", "--model", "ma.json", "--input", "a.jsonl", "--dict", "dict.tsv",
          "--out", "assignments.jsonl"],
    );
    assert_ok(&output);
    let text = fs::read_to_string(dir.path().join("assignments.jsonl")).unwrap();
    let mut posts = 0;
    for line in text.lines().skip(1) {
        let value: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(value["via"], "tag", "line: {line}");
        assert!(value["topic_id"].is_u64());
        assert!(value["distance"].is_null());
        posts += 1;
    }
    assert_eq!(posts, 4 * 3 * 20);

    let output = run_in(
        dir.path(),
        &[
            "compare",
            "--model-a", "ma.json",
            "--model-b", "mb.json",
            "--top-k", "4",
            "--out", "report.json",
            "--matrix", "matrix.csv",
            "--corpus-a", "a.jsonl",
            "--corpus-b", "b.jsonl",
            "--dict", "dict.tsv",
        ],
    );
    assert_ok(&output);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["kind"], "comparison-report");
    assert!(report["coverage_a_on_b"]["fraction"].is_f64());
    assert!(report["frac_below"].as_f64().unwrap() > 0.0, "shared topics must overlap");
    let matrix = fs::read_to_string(dir.path().join("matrix.csv")).unwrap();
    assert_eq!(matrix.lines().count(), 5, "header plus four rows");

    // Calibration quantiles span 0..100 percent.
    let output = run_in(
        dir.path(),
        &["calibrate", "--model", "ma.json", "--input", "a.jsonl", "--dict", "dict.tsv",
          "--target", "0.65", "--out", "calibration.json"],
    );
    assert_ok(&output);
    let calibration: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("calibration.json")).unwrap())
            .unwrap();
    assert_eq!(calibration["intra"]["quantiles"].as_array().unwrap().len(), 101);
    assert_eq!(calibration["intra_includes_self"], true);
    let recommended = calibration["recommended_threshold"].as_f64().unwrap();
    assert!(recommended > 0.0 && recommended <= 1.0);
}

#[test]
fn compare_without_corpora_leaves_coverage_null() {
    let dir = tempfile::tempdir().unwrap();
    synth_fixture(dir.path());
    for (input, model) in [("a.jsonl", "ma.json"), ("b.jsonl", "mb.json")] {
        assert_ok(&run_in(
            dir.path(),
            &["build", "--input", input, "--dict", "dict.tsv", "--tag-mode", "paired",
              "--top-tags", "12", "--out", model],
        ));
    }
    assert_ok(&run_in(
        dir.path(),
        &["compare", "--model-a", "ma.json", "--model-b", "mb.json", "--top-k", "4",
          "--out", "report.json", "--matrix", "matrix.csv"],
    ));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert!(report["coverage_a_on_b"].is_null());
    assert!(report["coverage_b_on_a"].is_null());
    assert!(report["kendall"].is_null());
}

#[test]
fn rerank_deleted_reports_rank_correlation() {
    let dir = tempfile::tempdir().unwrap();
    synth_fixture(dir.path());
    assert_ok(&run_in(
        dir.path(),
        &["build", "--input", "a.jsonl", "--dict", "dict.tsv", "--tag-mode", "paired",
          "--top-tags", "12", "--out", "ma.json"],
    ));
    // A deleted-heavy corpus over the same planted pools.
    assert_ok(&run_in(
        dir.path(),
        &["synth", "--out", "del.jsonl", "--truth", "del-truth.json",
          "--topics", "4", "--tags-per-topic", "3", "--terms-per-topic", "8",
          "--posts-per-tag", "10", "--tokens-per-post", "6", "--noise", "0.05",
          "--deleted-fraction", "0.5", "--seed", "99"],
    ));
    assert_ok(&run_in(
        dir.path(),
        &["rerank-deleted", "--model", "ma.json", "--input", "del.jsonl", "--dict", "dict.tsv",
          "--top-k", "4", "--out", "rerank.json"],
    ));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("rerank.json")).unwrap())
            .unwrap();
    assert_eq!(report["kind"], "rerank-report");
    assert!(report["deleted_posts"].as_u64().unwrap() > 0);
    let tau = report["kendall"]["tau"].as_f64().unwrap();
    assert!((-1.0..=1.0).contains(&tau));
    let p = report["kendall"]["p_value"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&p));
}

#[test]
fn config_file_values_are_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    synth_fixture(dir.path());
    fs::write(dir.path().join("cfg.toml"), "top_tags = 12\nthreshold = 0.8\n").unwrap();
    assert_ok(&run_in(
        dir.path(),
        &["build", "--input", "a.jsonl", "--dict", "dict.tsv", "--tag-mode", "paired",
          "--config", "cfg.toml", "--top-tags", "6", "--out", "model.json"],
    ));
    let model: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("model.json")).unwrap())
            .unwrap();
    assert_eq!(model["config"]["top_tags"], 6, "flag wins over file");
    assert_eq!(model["config"]["threshold"], 0.8, "file fills unset flags");
    assert_eq!(model["threshold"], 0.8);
}

#[test]
fn usage_errors_exit_2_and_pipeline_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = run_in(dir.path(), &["no-such-command"]);
    assert_eq!(unknown.status.code(), Some(2));
    let unknown_flag = run_in(dir.path(), &["build", "--frobnicate"]);
    assert_eq!(unknown_flag.status.code(), Some(2));

    let missing_input = run_in(
        dir.path(),
        &["build", "--input", "missing.jsonl", "--out", "m.json"],
    );
    assert_eq!(missing_input.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&missing_input.stderr);
    assert!(stderr.contains("missing.jsonl"), "diagnostic names the file: {stderr}");

    // A corpus without any hashtags cannot seed topics.
    fs::write(dir.path().join("plain.jsonl"), "{\"id\":\"p\",\"text\":\"no tags\"}\n").unwrap();
    let no_tags = run_in(
        dir.path(),
        &["build", "--input", "plain.jsonl", "--tag-mode", "prefix", "--out", "m.json"],
    );
    assert_eq!(no_tags.status.code(), Some(1));

    let bad_threshold = run_in(
        dir.path(),
        &["synth", "--out", "x.jsonl", "--truth", "t.json", "--noise", "1.5"],
    );
    assert_eq!(bad_threshold.status.code(), Some(1));
}

#[test]
fn thread_cap_env_var_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    synth_fixture(dir.path());
    assert_ok(&run_in(
        dir.path(),
        &["build", "--input", "a.jsonl", "--dict", "dict.tsv", "--tag-mode", "paired",
          "--top-tags", "12", "--out", "ma.json"],
    ));
    let single = bin()
        .current_dir(dir.path())
        .env("TOPICLENS_THREADS", "1")
        .args(["assign", "--model", "ma.json", "--input", "a.jsonl", "--dict", "dict.tsv",
               "--out", "st.jsonl"])
        .output()
        .unwrap();
    assert_ok(&single);
    let parallel = bin()
        .current_dir(dir.path())
        .env("TOPICLENS_THREADS", "0")
        .args(["assign", "--model", "ma.json", "--input", "a.jsonl", "--dict", "dict.tsv",
               "--out", "mt.jsonl"])
        .output()
        .unwrap();
    assert_ok(&parallel);
    let normalize = |path: PathBuf| {
        let text = fs::read_to_string(path).unwrap();
        // Manifests differ only in the output name; post lines must match.
        text.lines().skip(1).map(String::from).collect::<Vec<_>>()
    };
    assert_eq!(
        normalize(dir.path().join("st.jsonl")),
        normalize(dir.path().join("mt.jsonl")),
        "thread count must not change results"
    );
}

#[test]
fn synth_corpus_reads_back_through_the_corpus_reader() {
    let dir = tempfile::tempdir().unwrap();
    synth_fixture(dir.path());
    // The manifest header line must not be counted as a skipped record.
    let output = run_in(
        dir.path(),
        &["build", "--input", "a.jsonl", "--dict", "dict.tsv", "--tag-mode", "paired",
          "--top-tags", "12", "--out", "m.json"],
    );
    assert_ok(&output);
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("(0 skipped)"), "{stderr}");
}
