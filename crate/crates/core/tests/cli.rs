mod common;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use idpos::corpus::{read_corpus, write_corpus_file};
use idpos::learners::{Algorithm, Criterion, TaggerModel};
use idpos::tagset::{Conjugation, Variant};

fn sample() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/annotated_sample.tsv")
}

fn idpos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_idpos"))
        .args(args)
        .env_remove("IDPOS_SEED")
        .env_remove("RUST_LOG")
        .output()
        .unwrap()
}

fn idpos_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_idpos"))
        .args(args)
        .env_remove("IDPOS_SEED")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn train(dir: &Path, extra: &[&str]) -> PathBuf {
    let model = dir.join("model.json");
    let corpus = sample();
    let mut args = vec![
        "train",
        "--corpus",
        corpus.to_str().unwrap(),
        "--model",
        model.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let o = idpos(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    model
}

#[test]
fn train_decodes_config_codes() {
    let dir = tempfile::tempdir().unwrap();
    let model = TaggerModel::load(&train(dir.path(), &["--n-estimators", "10"])).unwrap();
    assert_eq!(model.hyperparameters.algorithm, Algorithm::RandomForest);
    assert_eq!(model.hyperparameters.max_depth, 83);
    assert_eq!(model.trees.len(), 10);
    assert_eq!(model.dataset.conjugation, Conjugation::Conjugated);
    assert_eq!(model.dataset.variant, Variant::Plain);

    let model = TaggerModel::load(&train(dir.path(), &["--config", "dtca"])).unwrap();
    assert_eq!(model.hyperparameters.algorithm, Algorithm::DecisionTree);
    assert_eq!(model.hyperparameters.criterion, Criterion::Entropy);
    assert_eq!(model.hyperparameters.max_depth, 9);
    assert_eq!(model.trees.len(), 1);
    assert_eq!(model.dataset.variant, Variant::Augmented);
    assert!(model.augmentation.is_some());
}

#[test]
fn usage_errors_exit_2() {
    let c = sample();
    let c = c.to_str().unwrap();
    for args in [
        vec!["train", "--corpus", c, "--model", "/tmp/x.json", "--config", "XXXX"],
        vec!["train", "--corpus", c, "--model", "/tmp/x.json", "--features", "colour"],
        vec!["crossval", "--corpus", c, "--k", "1"],
        vec!["extract", "/definitely/not/here"],
        vec!["frobnicate"],
    ] {
        assert_eq!(idpos(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn data_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.tsv");
    fs::write(&bad, "not a corpus\n").unwrap();
    let o = idpos(&[
        "train",
        "--corpus",
        bad.to_str().unwrap(),
        "--model",
        dir.path().join("m").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));

    let model = train(dir.path(), &["--n-estimators", "5"]);
    let o = idpos_stdin(
        &["tag", "--model", model.to_str().unwrap(), "--features", "word,context"],
        "getX,FUNCTION\n",
    );
    assert_eq!(o.status.code(), Some(3));

    let o = idpos(&[
        "tag",
        "--model",
        bad.to_str().unwrap(),
        "--input",
        sample().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn tag_lines_and_empty_input() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.tsv");
    write_corpus_file(&corpus, &common::stand_in_corpus(1000, 1)).unwrap();
    let model = dir.path().join("model.json");
    let m = model.to_str().unwrap();
    assert!(idpos(&["train", "--corpus", corpus.to_str().unwrap(), "--model", m])
        .status
        .success());
    let o = idpos_stdin(&["tag", "--model", m], "GetUserToken,FUNCTION\nmaxSize,ATTRIBUTE,int\n");
    assert!(o.status.success());
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2, "{out}");
    assert_eq!(lines[0], "GetUserToken\tFUNCTION\tGet User Token\tV NM N");
    assert!(lines[1].starts_with("maxSize\tATTRIBUTE\tmax Size\t"));

    let o = idpos_stdin(&["tag", "--model", m], "");
    assert!(o.status.success());
    assert_eq!(stdout(&o), "");

    let o = idpos_stdin(&["tag", "--model", m, "--format", "json"], "getName,FUNCTION\n");
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v.is_array() || v.is_object());
}

#[test]
fn tag_corpus_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let model = train(dir.path(), &["--n-estimators", "20"]);
    let out = dir.path().join("tagged.tsv");
    let o = idpos(&[
        "tag",
        "--model",
        model.to_str().unwrap(),
        "--input",
        sample().to_str().unwrap(),
        "--format",
        "corpus",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let tagged = read_corpus(&out).unwrap();
    let original = read_corpus(&sample()).unwrap();
    assert_eq!(tagged.len(), original.len());
    for (t, r) in tagged.iter().zip(&original) {
        assert_eq!(t.words, r.words);
        assert_eq!(t.gold().unwrap().len(), r.len());
    }
}

#[test]
fn crossval_report_echoes_run() {
    let o = idpos(&[
        "crossval",
        "--corpus",
        sample().to_str().unwrap(),
        "--n-estimators",
        "10",
        "--seed",
        "3",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    let first = out.lines().next().unwrap();
    assert!(first.starts_with("# run\t"));
    let run: serde_json::Value = serde_json::from_str(first.trim_start_matches("# run\t")).unwrap();
    assert_eq!(run["command"], "crossval");
    assert_eq!(run["seed"], 3);
    assert_eq!(run["config"], "RFCP");
    assert_eq!(
        out.lines()
            .filter(|l| l.chars().next().is_some_and(|c| c.is_ascii_digit()))
            .count(),
        5
    );
    assert!(out.lines().any(|l| l.starts_with("mean\t")));

    let json = idpos(&[
        "crossval",
        "--corpus",
        sample().to_str().unwrap(),
        "--n-estimators",
        "10",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(v["report"]["k"], 5);
}

#[test]
fn seed_falls_back_to_env() {
    let o = Command::new(env!("CARGO_BIN_EXE_idpos"))
        .args([
            "crossval",
            "--corpus",
            sample().to_str().unwrap(),
            "--n-estimators",
            "5",
            "--format",
            "json",
        ])
        .env("IDPOS_SEED", "17")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["run"]["seed"], 17);
}

#[test]
fn gridsearch_evaluates_product() {
    let o = idpos(&[
        "gridsearch",
        "--corpus",
        sample().to_str().unwrap(),
        "--depths",
        "3,6,9",
        "--criteria",
        "gini,entropy",
        "--estimators",
        "5",
        "--k",
        "3",
        "--format",
        "json",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["search"]["rows"].as_array().unwrap().len(), 6);
}

#[test]
fn drop_column_visits_power_set() {
    let o = Command::new(env!("CARGO_BIN_EXE_idpos"))
        .args([
            "importance",
            "--corpus",
            sample().to_str().unwrap(),
            "--mode",
            "drop-column",
            "--features",
            "word,data_type,swum,posse,stanford,position,identifier_size,normalized_position,context",
            "--config",
            "DTCP",
            "--k",
            "2",
        ])
        .env("RUST_LOG", "info")
        .env_remove("IDPOS_SEED")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let log = String::from_utf8_lossy(&o.stderr);
    assert_eq!(
        log.lines()
            .filter(|l| l.contains("subset ") && l.contains("/511"))
            .count(),
        511
    );
}

#[test]
fn permutation_importance_lists_features() {
    let o = idpos(&[
        "importance",
        "--corpus",
        sample().to_str().unwrap(),
        "--n-estimators",
        "10",
        "--repeats",
        "2",
        "--k",
        "2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    // Two folds plus the mean, three metrics each.
    for f in ["swum", "posse", "stanford", "normalized_position", "context"] {
        assert_eq!(
            out.lines().filter(|l| l.contains(&format!("\t{f}\t"))).count(),
            3 * 3,
            "{f} in\n{out}"
        );
    }
}

#[test]
fn analyze_tagger_baseline_and_model() {
    let dir = tempfile::tempdir().unwrap();
    let c = sample();
    let o = idpos(&[
        "analyze",
        "--corpus",
        c.to_str().unwrap(),
        "--tagger",
        "swum",
        "--top",
        "3",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("Grammar Pattern\t# Incorrect\tActual\tProportion\n"));
    assert!(out.contains("Context\tWords\tWord Accuracy\tIdentifiers\tIdentifier Accuracy\n"));

    let model = train(dir.path(), &["--n-estimators", "10"]);
    let o = idpos(&[
        "analyze",
        "--corpus",
        c.to_str().unwrap(),
        "--model",
        model.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().any(|l| l.starts_with("Overall\t101\t")));

    let o = idpos(&["analyze", "--corpus", c.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sample_is_balanced() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sample.tsv");
    let o = idpos(&[
        "sample",
        "--corpus",
        sample().to_str().unwrap(),
        "--per-context",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let records = read_corpus(&out).unwrap();
    assert_eq!(records.len(), 15);
}

#[test]
fn extract_fixture_tree() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("proj");
    fs::create_dir_all(root.join("src")).unwrap();
    fs::create_dir_all(root.join("tests")).unwrap();
    fs::write(
        root.join("src/Cache.java"),
        "public class Cache {\n  private int maxEntries;\n  public String lookupKey(String rawKey) {\n    String trimmed = rawKey.trim();\n    return trimmed;\n  }\n}\n",
    )
    .unwrap();
    fs::write(
        root.join("src/test_utils.c"),
        "int helperCount;\nvoid resetAll(int level) {}\n",
    )
    .unwrap();
    fs::write(root.join("tests/CacheTest.java"), "class CacheTest { void run() {} }\n").unwrap();
    let out = dir.path().join("corpus.tsv");
    let o = idpos(&["extract", root.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let records = read_corpus(&out).unwrap();
    let got: Vec<(String, String)> = records
        .iter()
        .map(|r| (r.context.to_string(), r.raw_name.clone()))
        .collect();
    let want: Vec<(String, String)> = [
        ("CLASS", "Cache"),
        ("ATTRIBUTE", "maxEntries"),
        ("FUNCTION", "lookupKey"),
        ("PARAMETER", "rawKey"),
        ("DECLARATION", "trimmed"),
    ]
    .iter()
    .map(|(a, b)| (a.to_string(), b.to_string()))
    .collect();
    assert_eq!(got, want);
    assert!(records.iter().all(|r| r.system == "proj" && r.gold.is_none()));

    let only_tests = dir.path().join("only");
    fs::create_dir_all(&only_tests).unwrap();
    fs::write(only_tests.join("test_main.c"), "int counter;\n").unwrap();
    let out2 = dir.path().join("empty.tsv");
    let o = idpos(&["extract", only_tests.to_str().unwrap(), "--out", out2.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(read_corpus(&out2).unwrap().is_empty());
}
