mod common;

use std::path::Path;

use fairvec::embedding::{Embedding, Format};
use fairvec::geometry::{cosine_to_direction, DirectionSource};
use fairvec::lexicons;
use serde_json::Value;
use tempfile::TempDir;

const TOY: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/occupations.txt");

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {}", self.stdout))
    }
}

fn fairvec(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = fairvec::cli::run(
        std::iter::once("fairvec").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

#[test]
fn direct_bias_on_toy_reports_value_and_skipped() {
    let run = fairvec(&["metric", "direct-bias", "--emb", TOY, "--words", "nurse,doctor,zzz"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let json = run.json();
    assert_eq!(json["command"], "metric");
    let value = json["result"]["values"]["value"].as_f64().unwrap();
    assert!(value > 0.0 && value <= 1.0);
    assert_eq!(json["result"]["skipped"], serde_json::json!(["zzz"]));
    assert_eq!(json["config"]["embedding"], TOY);
}

#[test]
fn unknown_metric_lists_names() {
    let run = fairvec(&["metric", "bogus", "--emb", TOY]);
    assert_eq!(run.code, 2);
    assert!(
        run.stderr.contains("direct-bias") && run.stderr.contains("sembias"),
        "{}",
        run.stderr
    );
    assert!(run.stdout.is_empty());
}

#[test]
fn oov_only_words_are_a_data_error() {
    assert_eq!(
        fairvec(&["metric", "direct-bias", "--emb", TOY, "--words", "zzz,qqq"]).code,
        3
    );
    assert_eq!(fairvec(&["report", "word", "zzz", "--emb", TOY]).code, 3);
    // WEAT is strict about vocabulary
    assert_eq!(fairvec(&["metric", "weat", "--emb", TOY]).code, 3);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(fairvec(&[]).code, 2);
    assert_eq!(fairvec(&["debias", "hard", "--emb", TOY]).code, 2);
    assert_eq!(fairvec(&["metric", "pmn", "--emb", TOY]).code, 2);
    assert_eq!(fairvec(&["metric", "direct-bias", "--words", "nurse"]).code, 2);
    assert_eq!(
        fairvec(&[
            "metric",
            "direct-bias",
            "--emb",
            TOY,
            "--words",
            "nurse",
            "--threads",
            "0"
        ])
        .code,
        2
    );
    let help = fairvec(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("metric") && help.stdout.contains("compare"));
}

#[test]
fn missing_file_is_a_data_error() {
    assert_eq!(
        fairvec(&["metric", "direct-bias", "--emb", "/no/such/file.txt", "--words", "a"]).code,
        3
    );
}

#[test]
fn hard_debias_output_passes_neutralization() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "toy.hard.txt");
    let run = fairvec(&["debias", "hard", "--emb", TOY, "--out", &out]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let json = run.json();
    let processed: Vec<String> = serde_json::from_value(json["report"]["processed"].clone()).unwrap();
    assert!(processed.iter().any(|w| w == "nurse"));

    let original = Embedding::load(TOY, Format::Text).unwrap().normalize().unwrap();
    let g = DirectionSource::PcaPairs {
        pairs: lexicons::definitional_pairs(),
    }
    .build(&original)
    .unwrap();
    let debiased = Embedding::load(&out, Format::Auto).unwrap();
    assert_eq!(debiased.vocab(), original.vocab());
    let equalized: Vec<String> = lexicons::equalize_pairs()
        .into_iter()
        .flat_map(|(a, b)| [a, b])
        .collect();
    for w in processed.iter().filter(|w| !equalized.contains(w)) {
        let c = cosine_to_direction(&debiased, debiased.lookup(w).unwrap(), &g).unwrap();
        assert!(c.abs() <= 1e-6, "{w}: {c}");
    }
}

#[test]
fn ran_runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (path(&dir, "a.txt"), path(&dir, "b.txt"));
    for (out, threads) in [(&a, "1"), (&b, "3")] {
        let run = fairvec(&[
            "debias",
            "ran",
            "--emb",
            TOY,
            "--out",
            out,
            "--seed",
            "7",
            "--threads",
            threads,
        ]);
        assert_eq!(run.code, 0, "{}", run.stderr);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn hsr_writes_requested_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "toy.bin");
    let run = fairvec(&["debias", "hsr", "--emb", TOY, "--out", &out]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_eq!(run.json()["format"], "word2vec-bin");
    assert_eq!(Embedding::load(&out, Format::Word2VecBin).unwrap().len(), 30);
}

#[test]
fn word_report_text_and_attachments() {
    let dir = tempfile::tempdir().unwrap();
    let run = fairvec(&[
        "report",
        "word",
        "nurse",
        "--emb",
        TOY,
        "--out-dir",
        dir.path().to_str().unwrap(),
        "--text",
    ]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(run.stdout.contains("direct bias"), "{}", run.stdout);
    assert!(run.stdout.contains("neighbours"));
    for name in ["nurse-neighbors.svg", "nurse-cloud.svg"] {
        assert!(dir.path().join(name).is_file(), "{name} missing");
    }
}

#[test]
fn global_report_lists_n_words_each_way() {
    let run = fairvec(&["report", "global", "--emb", TOY, "-n", "10"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let json = run.json();
    let sections = json["sections"].as_array().unwrap();
    let rows = |title: &str| {
        sections.iter().find(|s| s["title"] == title).unwrap()["rows"]
            .as_array()
            .unwrap()
            .len()
    };
    assert_eq!(rows("most biased"), 10);
    assert_eq!(rows("least biased"), 10);
}

fn delta(json: &Value, metric: &str) -> f64 {
    json["metrics"]
        .as_array()
        .unwrap()
        .iter()
        .find(|m| m["metric"] == metric)
        .unwrap_or_else(|| panic!("{metric} missing from {json}"))["delta"]
        .as_f64()
        .unwrap()
}

#[test]
fn compare_before_and_after_hard_debias() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "toy.hard.txt");
    assert_eq!(fairvec(&["debias", "hard", "--emb", TOY, "--out", &out]).code, 0);

    let run = fairvec(&["compare", "--emb", TOY, "--other", &out]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let json = run.json();
    assert!(delta(&json, "direct-bias") < 0.0);
    // the toy lacks the WEAT words
    assert!(json["notes"]
        .as_array()
        .unwrap()
        .iter()
        .any(|n| n.as_str().unwrap().starts_with("weat")));

    let same = fairvec(&["compare", "--emb", TOY, "--other", TOY]).json();
    for m in same["metrics"].as_array().unwrap() {
        assert_eq!(m["delta"].as_f64(), Some(0.0), "{m}");
    }
}

#[test]
fn compare_rejects_dimension_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let small = path(&dir, "small.txt");
    std::fs::write(&small, "nurse 1 0 0\ndoctor 0 1 0\n").unwrap();
    let run = fairvec(&["compare", "--emb", TOY, "--other", &small]);
    assert_eq!(run.code, 3);
    assert!(run.stderr.contains("dimension"), "{}", run.stderr);
}

#[test]
fn every_plot_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&str, &[&str]); 5] = [
        ("neighbors", &["--word", "nurse"]),
        ("bias-bar", &["--words", "nurse,doctor,engineer"]),
        ("pca", &["--words", "nurse,doctor,engineer,homemaker"]),
        ("cloud", &["--word", "nurse"]),
        ("cloud", &["--words", "nurse,doctor,engineer"]),
    ];
    for (i, (plot, extra)) in cases.iter().enumerate() {
        let out = path(&dir, &format!("{i}-{plot}.svg"));
        let mut args = vec!["viz", plot, "--emb", TOY, "--out", &out];
        args.extend_from_slice(extra);
        let run = fairvec(&args);
        assert_eq!(run.code, 0, "{plot}: {}", run.stderr);
        assert_eq!(run.json()["plot"], *plot);
        assert!(Path::new(&out).is_file());
    }
    assert_eq!(
        fairvec(&["viz", "cloud", "--emb", TOY, "--out", &path(&dir, "x.svg")]).code,
        2
    );
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = path(&dir, "run.json");
    std::fs::write(&config, format!(r#"{{"embedding": "{TOY}", "k": 5, "seed": 3}}"#)).unwrap();
    let run = fairvec(&["metric", "pmn", "--config", &config, "--word", "nurse", "-k", "7"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let json = run.json();
    assert_eq!(json["config"]["k"], 7);
    assert_eq!(json["config"]["seed"], 3);
    assert_eq!(json["result"]["parameters"]["k"], 7);

    std::fs::write(&config, r#"{"kk": 5}"#).unwrap();
    assert_eq!(
        fairvec(&["metric", "pmn", "--config", &config, "--emb", TOY, "--word", "nurse"]).code,
        2
    );
}

#[test]
fn gipe_is_thread_count_independent() {
    let words = "nurse,doctor,engineer,homemaker,programmer,developer,receptionist";
    let results: Vec<Value> = ["1", "4"]
        .iter()
        .map(|t| {
            fairvec(&[
                "metric",
                "gipe",
                "--emb",
                TOY,
                "--words",
                words,
                "-k",
                "8",
                "--threads",
                t,
            ])
            .json()["result"]
                .clone()
        })
        .collect();
    assert_eq!(results[0], results[1]);
}

#[test]
fn pair_diff_direction_and_sembias_sample() {
    let run = fairvec(&[
        "metric",
        "indirect-bias",
        "--emb",
        TOY,
        "--words",
        "nurse,doctor",
        "--direction",
        "pair-diff",
        "--pair",
        "she,he",
    ]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_eq!(run.json()["config"]["direction"], "pair-diff");
    // the bundled sample needs words the toy lacks
    assert_eq!(fairvec(&["metric", "sembias", "--emb", TOY]).code, 3);
    let dir = tempfile::tempdir().unwrap();
    let dataset = path(&dir, "sembias.json");
    let pair = |a: &str, b: &str, label: &str| format!(r#"{{"a": "{a}", "b": "{b}", "label": "{label}"}}"#);
    let instance = |p: [String; 4]| format!(r#"{{"pairs": [{}]}}"#, p.join(", "));
    let body = [
        instance([
            pair("king", "queen", "definition"),
            pair("doctor", "nurse", "stereotype"),
            pair("developer", "engineer", "none"),
            pair("mary", "girl", "none"),
        ]),
        instance([
            pair("surgeon", "receptionist", "stereotype"),
            pair("father", "mother", "definition"),
            pair("programmer", "developer", "none"),
            pair("doctor", "surgeon", "none"),
        ]),
    ];
    std::fs::write(&dataset, format!("[{}]", body.join(", "))).unwrap();
    let run = fairvec(&["metric", "sembias", "--emb", TOY, "--sembias", &dataset]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let values = &run.json()["result"]["values"];
    let total: f64 = ["definition", "stereotype", "none"]
        .iter()
        .map(|k| values[k].as_f64().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn fetch_unknown_name_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let registry = path(&dir, "registry.json");
    std::fs::write(
        &registry,
        r#"{"toy": {"url": "file:///dev/null", "sha256": "00", "format": "text"}}"#,
    )
    .unwrap();
    let run = fairvec(&["fetch", "glove", "--registry", &registry]);
    assert_eq!(run.code, 2, "{}", run.stderr);
    assert!(run.stderr.contains("toy"));
}
