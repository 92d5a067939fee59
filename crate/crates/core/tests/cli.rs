mod common;

use common::fixture;
use gec_eval::annotation::{load_pool, read_export, AnnotationService, ExportFilter};
use gec_eval::metrics::{qwk, LikertScore, RatingMatrix, ScoreTriple};
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gec-eval"))
        .args(args)
        .current_dir(fixture(""))
        .output()
        .unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn failure(args: &[&str]) -> String {
    let out = run(args);
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    String::from_utf8(out.stderr).unwrap()
}

#[test]
fn gleu_of_reference_is_one() {
    assert_eq!(stdout(&["score", "--metric", "gleu", "--src", "src.txt", "--hyp", "src.txt", "--ref", "src.txt"]), "1.0000\n");
    assert_eq!(stdout(&["score", "--metric", "gleu", "--src", "src.txt", "--hyp", "ref.txt", "--ref", "ref.txt"]), "1.0000\n");
}

#[test]
fn scribendi_of_unchanged_text_is_zero() {
    assert_eq!(stdout(&["score", "--metric", "scribendi", "--src", "src.txt", "--hyp", "src.txt"]), "0.0000\n");
    let levels = stdout(&[
        "score", "--metric", "scribendi", "--src", "src.txt", "--cefr", "cefr.txt", "--hyp", "Uncorrected=src.txt",
    ]);
    assert_eq!(levels, "Scribendi\nSystem          All       A       B       C\nUncorrected  0.0000  0.0000  0.0000  0.0000\n");
}

#[test]
fn agree_matches_qwk_oracle() {
    let ratings = read_export(&fixture("pilot.jsonl")).unwrap();
    let scores = |who: &str| -> Vec<u32> {
        ratings
            .iter()
            .filter(|r| r.annotator == who)
            .map(|r| u32::from(r.scores.meaning.numeric().unwrap()))
            .collect()
    };
    let pairs: Vec<(u32, u32)> = scores("anna").into_iter().zip(scores("bertil")).collect();
    let oracle = qwk(&RatingMatrix::new(4, pairs).unwrap()).unwrap();
    assert!((oracle - 16.0 / 19.0).abs() < 1e-12);

    let text = stdout(&["agree", "--annotations", "pilot.jsonl"]);
    assert_eq!(
        text,
        format!(
            "Quadratically weighted kappa (anna vs bertil)\nBatch  Grammaticality  Fluency  Meaning preservation\nAll            1.0000   {oracle:.4}                {oracle:.4}\n"
        )
    );
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&["--format", "json", "agree", "--annotations", "pilot.jsonl", "--dimension", "meaning"]))
            .unwrap();
    assert_eq!(json["rows"][0]["cells"][0]["kappa"].as_f64().unwrap(), oracle);
    assert_eq!(json["rows"][0]["cells"][0]["pairs"], 10);
}

#[test]
fn agree_rounds_become_rows() {
    let text = stdout(&[
        "agree", "--annotations", "Pilot=pilot.jsonl", "--annotations", "Repeat=pilot.jsonl", "--decimals", "2",
    ]);
    let rows: Vec<&str> = text.lines().skip(2).map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(rows, vec!["Pilot", "Repeat", "All"]);
}

#[test]
fn multi_system_report_layout() {
    let text = stdout(&[
        "score", "--metric", "gleu", "--metric", "fbeta", "--corpus", "corpus.jsonl", "--hyp", "Granska=granska.txt",
        "--hyp", "MT=mt.txt",
    ]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "GLEU");
    assert!(lines[1].starts_with("System") && lines[1].ends_with("All       A       B       C"), "{text}");
    assert!(lines[2].starts_with("Granska"));
    assert!(text.contains("\nF0.5\n"));
}

#[test]
fn input_errors_name_file_and_line() {
    let err = failure(&["score", "--metric", "gleu", "--src", "missing.txt", "--hyp", "src.txt", "--ref", "src.txt"]);
    assert!(err.starts_with("error: missing.txt:"), "{err}");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("corpus.jsonl");
    std::fs::write(&bad, "{\"id\":\"1\",\"source\":\"a b\"}\n{\"id\":\"1\",\"source\":\"c\"}\n").unwrap();
    let err = failure(&["score", "--metric", "gleu", "--corpus", bad.to_str().unwrap(), "--hyp", "src.txt"]);
    assert!(err.contains("corpus.jsonl:2: duplicate sentence id"), "{err}");

    let short = dir.path().join("short.txt");
    std::fs::write(&short, "one line\n").unwrap();
    let err = failure(&["score", "--metric", "gleu", "--src", "src.txt", "--ref", "ref.txt", "--hyp", short.to_str().unwrap()]);
    assert!(err.contains("short.txt: 1 lines, expected 6"), "{err}");

    let err = failure(&["score", "--metric", "scribendi", "--src", "src.txt", "--hyp", "mt.txt", "--threshold", "1.5"]);
    assert!(err.contains("threshold"), "{err}");
    let err = failure(&["score", "--metric", "fbeta", "--src", "src.txt", "--ref", "ref.txt", "--hyp", "mt.txt", "--beta=-1"]);
    assert!(err.contains("beta"), "{err}");

    let unknown = run(&["score", "--metric", "gleu", "--no-such-flag"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn scribendi_without_model_explains() {
    let err = failure(&["score", "--metric", "scribendi", "--src", "src.txt", "--hyp", "mt.txt"]);
    assert!(err.contains("no language model configured"), "{err}");
}

#[test]
fn tree_writes_exports() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("fig");
    let text = stdout(&["tree", "--versions", "versions.tsv", "--out-dir", out_dir.to_str().unwrap()]);
    assert!(text.contains("Tree: 12 nodes, 11 edges"), "{text}");
    for f in ["tree.json", "tree.dot", "tree.svg", "matrix.tsv"] {
        assert!(out_dir.join(f).is_file(), "{f}");
    }
    let dot = std::fs::read_to_string(out_dir.join("tree.dot")).unwrap();
    assert_eq!(dot.matches(" -> ").count(), 11);
    let matrix = std::fs::read_to_string(out_dir.join("matrix.tsv")).unwrap();
    assert_eq!(matrix.lines().count(), 13);
}

#[test]
fn train_then_correct() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("lm.json");
    let trace = dir.path().join("trace.jsonl");
    stdout(&["train-lm", "--input", "lm_train.txt", "--output", model.to_str().unwrap()]);
    let corrected = stdout(&[
        "correct", "--lm", model.to_str().unwrap(), "--lexicon", "lexicon.tsv", "--input", "to_correct.txt", "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(corrected.lines().next(), Some("han går hem"));
    let first: serde_json::Value =
        serde_json::from_str(std::fs::read_to_string(&trace).unwrap().lines().next().unwrap()).unwrap();
    assert_eq!(first["steps"].as_array().unwrap().len(), 1);
    assert_eq!(first["steps"][0]["kind"], "substitution");

    // A threshold no edit can meet leaves the input alone.
    let unchanged = stdout(&[
        "correct", "--lm", model.to_str().unwrap(), "--lexicon", "lexicon.tsv", "--input", "to_correct.txt", "--delta", "1000",
    ]);
    assert_eq!(unchanged, "han gå hem\nhon går hem\n");
}

#[test]
fn export_replays_log() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("events.jsonl");
    let pool = load_pool(&fixture("corpus.jsonl"), &fixture("outputs.jsonl")).unwrap();
    let expected = {
        let svc = AnnotationService::with_log(pool, 0, &log).unwrap();
        let sid = svc.open_session("anna", None).unwrap();
        for _ in 0..5 {
            let next = svc.next_item(&sid).unwrap();
            let id = next.view().unwrap().item_id().to_string();
            svc.submit_postedit(&sid, &id, "text").unwrap();
            svc.confirm_meaning(&sid, &id, true).unwrap();
            let s = LikertScore::Level(3);
            svc.submit_scores(&sid, &id, ScoreTriple { grammaticality: s, fluency: s, meaning: s }).unwrap();
        }
        svc.export(&ExportFilter::default())
    };
    let before = std::fs::read(&log).unwrap();
    let got = stdout(&["export", "--corpus", "corpus.jsonl", "--outputs", "outputs.jsonl", "--log", log.to_str().unwrap()]);
    assert_eq!(got, expected);
    assert_eq!(std::fs::read(&log).unwrap(), before, "export must not touch the log");
}

#[test]
fn help_documents_seed_default() {
    let help = stdout(&["--help"]);
    assert!(help.contains("--seed <SEED>") && help.contains("[default: 0]"), "{help}");
    for sub in ["score", "agree", "tree", "correct", "train-lm", "serve", "export"] {
        assert!(help.contains(sub), "{sub}");
    }
}

fn same_everywhere(args: &[&str]) {
    let first = stdout(args);
    assert_eq!(stdout(args), first);
    for jobs in ["1", "3", "8"] {
        let mut with_jobs = vec!["--jobs", jobs];
        with_jobs.extend_from_slice(args);
        assert_eq!(stdout(&with_jobs), first, "--jobs {jobs}");
    }
}

#[test]
fn output_is_deterministic() {
    same_everywhere(&[
        "score", "--metric", "gleu", "--metric", "fbeta", "--corpus", "corpus.jsonl", "--hyp", "Granska=granska.txt",
        "--hyp", "MT=mt.txt", "--hyp", "GPT-3=gpt3.txt", "--seed", "11",
    ]);
    same_everywhere(&["--format", "json", "tree", "--versions", "versions.tsv", "--seed", "5"]);
    same_everywhere(&["tree", "--versions", "versions.tsv"]);
}
