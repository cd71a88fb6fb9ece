use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use stm::model::MODEL_OVERHEAD_BYTES;
use stm::synth::{text_corpus, TextCorpusSpec};
use stm::{save_model, StmModel, TrainConfig};
use tempfile::TempDir;

fn stm(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stm")).args(args).current_dir(dir).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn assert_ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

fn write_corpus(dir: &Path, documents: usize) -> PathBuf {
    let spec = TextCorpusSpec { documents, vocabulary: 5_000, ..TextCorpusSpec::default() };
    let text: String = text_corpus(&spec)
        .into_iter()
        .map(|(y, t)| format!("{}\t{t}\n", if y == 1 { "pos" } else { "neg" }))
        .collect();
    let path = dir.join("corpus.tsv");
    fs::write(&path, text).unwrap();
    path
}

/// Prepares a 300-token split of a small corpus: train.sparse and test.sparse.
fn prepared(dir: &Path) {
    write_corpus(dir, 600);
    let out = stm(
        &["prepare", "corpus.tsv", "--vocab-size", "300", "--test-fraction", "0.2", "--test-out", "test.sparse", "-o", "train.sparse"],
        dir,
    );
    assert_ok(&out);
}

const SMALL_MODEL: [&str; 10] = ["-n", "40", "-T", "20", "-s", "10", "-a", "40", "-p", "20"];

fn train(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["train", "train.sparse", "--test", "test.sparse", "--epochs", "3"];
    args.extend_from_slice(&SMALL_MODEL);
    args.extend_from_slice(extra);
    stm(&args, dir)
}

#[test]
fn prepare_sets_feature_count_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    write_corpus(dir.path(), 3_000);
    let args = ["prepare", "corpus.tsv", "--vocab-size", "2500", "-o", "a.sparse"];
    assert_ok(&stm(&args, dir.path()));
    let first = fs::read_to_string(dir.path().join("a.sparse")).unwrap();
    assert!(first.starts_with("#o=2500 m=2\n"), "{}", &first[..40]);
    assert_ok(&stm(&args, dir.path()));
    assert_eq!(first, fs::read_to_string(dir.path().join("a.sparse")).unwrap());
    assert!(dir.path().join("a.sparse.vocab.json").is_file());
}

#[test]
fn prepare_rejects_unknown_format() {
    let dir = TempDir::new().unwrap();
    write_corpus(dir.path(), 10);
    let out = stm(&["prepare", "corpus.tsv", "--format", "xml", "-o", "x.sparse"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn prepare_tabular() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("t.csv"), "a,b,c,Label\n1,0,1,malware\n0,0,0,goodware\n0,1,1,malware\n").unwrap();
    assert_ok(&stm(&["prepare", "t.csv", "--format", "tabular", "-o", "t.sparse"], dir.path()));
    let text = fs::read_to_string(dir.path().join("t.sparse")).unwrap();
    assert_eq!(text, "#o=3 m=2\n1 0:1 2:1\n0\n1 1:1 2:1\n");
    let out = stm(&["prepare", "missing.csv", "--format", "tabular", "-o", "t.sparse"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn train_writes_model_and_metrics_reproducibly() {
    let dir = TempDir::new().unwrap();
    prepared(dir.path());
    assert_ok(&train(dir.path(), &["--metrics-out", "run.jsonl", "-o", "a.stm"]));
    assert_ok(&train(dir.path(), &["-o", "b.stm"]));
    assert_eq!(fs::read(dir.path().join("a.stm")).unwrap(), fs::read(dir.path().join("b.stm")).unwrap());

    let metrics = fs::read_to_string(dir.path().join("run.jsonl")).unwrap();
    let lines: Vec<serde_json::Value> = metrics.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0]["config"]["clauses"], 40);
    assert_eq!(lines[0]["config"]["al_mode"], "dynamic");
    for (i, m) in lines[1..].iter().enumerate() {
        assert_eq!(m["epoch"], i + 1);
        for key in ["seconds", "train_acc", "test_acc", "mean_clause_size", "al_occupancy"] {
            assert!(!m[key].is_null(), "{key} missing");
        }
        assert!(m["mean_clause_size"].as_f64().unwrap() <= 20.0);
    }
    let csv = fs::read_to_string(dir.path().join("run.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.starts_with("epoch,seconds,train_acc,test_acc,mean_clause_size,al_occupancy"));
}

#[test]
fn train_rejects_threshold_above_states() {
    let dir = TempDir::new().unwrap();
    prepared(dir.path());
    let out = train(dir.path(), &["--states", "50", "-t", "60"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("model.stm").exists());
}

#[test]
fn eval_matches_final_train_accuracy() {
    let dir = TempDir::new().unwrap();
    prepared(dir.path());
    assert_ok(&train(dir.path(), &["--metrics-out", "run.jsonl"]));
    let metrics = fs::read_to_string(dir.path().join("run.jsonl")).unwrap();
    let last: serde_json::Value = serde_json::from_str(metrics.lines().last().unwrap()).unwrap();
    let out = stm(&["eval", "model.stm", "train.sparse"], dir.path());
    assert_ok(&out);
    let text = stdout(&out);
    let reported: f64 = text.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((reported - last["train_acc"].as_f64().unwrap()).abs() < 1e-4, "{text}");
    assert!(text.contains("neg") && text.contains("pos"));
}

#[test]
fn eval_rejects_bad_data() {
    let dir = TempDir::new().unwrap();
    prepared(dir.path());
    assert_ok(&train(dir.path(), &[]));
    fs::write(dir.path().join("empty.sparse"), "#o=300 m=2\n").unwrap();
    assert_eq!(stm(&["eval", "model.stm", "empty.sparse"], dir.path()).status.code(), Some(3));
    fs::write(dir.path().join("label.sparse"), "#o=300 m=3\n2 4:1\n").unwrap();
    let out = stm(&["eval", "model.stm", "label.sparse"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("label 2"));
}

#[test]
fn inspect_reports() {
    let dir = TempDir::new().unwrap();
    prepared(dir.path());
    assert_ok(&train(dir.path(), &[]));

    let none = stm(&["inspect", "model.stm", "--rules", "0"], dir.path());
    assert_ok(&none);
    assert_eq!(stdout(&none), "");

    let rules = stdout(&stm(&["inspect", "model.stm", "--rules", "3"], dir.path()));
    assert!(rules.lines().count() <= 3);
    assert!(rules.lines().all(|l| l.starts_with("IF ")), "{rules}");

    let occupancy = stdout(&stm(&["inspect", "model.stm", "--al-occupancy"], dir.path()));
    for line in occupancy.lines() {
        let (used, cap) = line.rsplit_once(' ').unwrap().1.split_once('/').unwrap();
        assert!(used.parse::<usize>().unwrap() <= cap.parse().unwrap(), "{line}");
    }
}

#[test]
fn inspect_memory_of_untrained_model() {
    let dir = TempDir::new().unwrap();
    let cfg = TrainConfig { clauses: 10, ..TrainConfig::default() };
    save_model(&StmModel::new(cfg, 1_000, 3).unwrap(), dir.path().join("empty.stm")).unwrap();
    let text = stdout(&stm(&["inspect", "empty.stm", "--memory"], dir.path()));
    let bytes = MODEL_OVERHEAD_BYTES + 3 * 10 * 4;
    assert!(text.contains(&format!("memory bytes: {bytes}\n")), "{text}");
}

#[test]
fn bench_emits_one_row_per_size_and_epoch() {
    let dir = TempDir::new().unwrap();
    write_corpus(dir.path(), 400);
    let mut args = vec!["bench", "corpus.tsv", "--vocab-sweep", "100:400:100", "--epochs", "2", "-o", "sweep.csv"];
    args.extend_from_slice(&SMALL_MODEL);
    assert_ok(&stm(&args, dir.path()));
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("V,epoch,seconds,accuracy"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4 * 2);
    let sizes: Vec<&str> = rows.iter().step_by(2).map(|r| r[0]).collect();
    assert_eq!(sizes, ["100", "200", "300", "400"]);
    assert!(rows.iter().all(|r| r[2].parse::<f64>().unwrap() > 0.0));

    let bad = stm(&["bench", "corpus.tsv", "--vocab-sweep", "10:5"], dir.path());
    assert_eq!(bad.status.code(), Some(2));
}
