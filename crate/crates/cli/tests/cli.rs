mod common;

use std::fs;

use common::*;
use emorec_core::predict::PredictResponse;
use emorec_core::report::{parse_binary_tsv, parse_positivity_tsv, parse_summary_tsv};
use emorec_testkit::network;

#[test]
fn train_prints_the_summary_table_and_writes_a_model() {
    let f = network_fixture();
    let model = train_network(&f);
    assert!(model.exists());
    let o = run(&[
        "train", "--corpus", p(&f.corpus), "--polarity", p(&f.polarity),
        "--partition", p(&f.partition), "--min-count", "1", "--keep-digits",
        "-o", p(&f.path("m2.json")),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let table: String = out.split("\n\n").next().unwrap().to_string() + "\n";
    let rows = parse_summary_tsv(&table).unwrap();
    assert!(!rows.is_empty());
    assert!(out.contains("topics\t3"));
}

#[test]
fn missing_polarity_file_is_an_input_error_naming_the_path() {
    let f = network_fixture();
    let missing = f.path("nope.tsv");
    let o = run(&[
        "train", "--corpus", p(&f.corpus), "--polarity", p(&missing),
        "--partition", p(&f.partition), "-o", p(&f.path("m.json")),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nope.tsv"), "{}", stderr(&o));
}

#[test]
fn topic_variant_needs_a_partition() {
    let f = network_fixture();
    let o = run(&[
        "train", "--corpus", p(&f.corpus), "--polarity", p(&f.polarity),
        "--min-count", "1", "--keep-digits", "-o", p(&f.path("m.json")),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&[
        "train", "--corpus", p(&f.corpus), "--polarity", p(&f.polarity),
        "--min-count", "1", "--keep-digits", "--variant", "full-vocab",
        "-o", p(&f.path("m.json")),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn baseline_partition_is_deterministic() {
    let f = separable_fixture(60, 1);
    let train = |out: &str| {
        let o = run(&[
            "train", "--corpus", p(&f.corpus), "--polarity", p(&f.polarity),
            "--baseline-topics", "6", "-o", p(&f.path(out)),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        fs::read(f.path(out)).unwrap()
    };
    assert_eq!(train("a.json"), train("b.json"));
}

#[test]
fn predict_reproduces_the_worked_example() {
    let f = network_fixture();
    let model = train_network(&f);
    let o = run(&["predict", "--model", p(&model), "--text", network::QUERY_TEXT, "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let resp: PredictResponse = serde_json::from_slice(&o.stdout).unwrap();
    let exact = network::exact_posterior();
    let labels: Vec<&str> = resp.emotions.iter().map(|e| e.label.as_str()).collect();
    assert_eq!(labels, ["e1", "e2", "e3"]);
    for (score, q) in resp.emotions.iter().zip(exact) {
        assert!((score.posterior - network::to_f64(q)).abs() < 1e-12);
    }
    assert!((resp.emotions[0].posterior - 0.587).abs() < 1e-3);

    let text = stdout(&run(&["predict", "--model", p(&model), "--text", network::QUERY_TEXT]));
    assert!(text.contains("e1\t"), "{text}");
}

#[test]
fn predict_reads_stdin_and_honours_top_k() {
    let f = network_fixture();
    let model = train_network(&f);
    let o = run_with_stdin(&["predict", "--model", p(&model), "--top-k", "2", "--format", "json"], network::QUERY_TEXT);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let resp: PredictResponse = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(resp.emotions.len(), 2);
}

#[test]
fn empty_prediction_exits_with_three() {
    let f = network_fixture();
    let model = train_network(&f);
    let o = run_with_stdin(&["predict", "--model", p(&model)], "");
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["predict", "--model", p(&model), "--text", "nothing modelled here"]);
    assert_eq!(o.status.code(), Some(3));
    // v4 only: e1 gives it zero probability without smoothing, but e2 does not
    let o = run(&["predict", "--model", p(&model), "--text", "v4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn out_of_vocabulary_tokens_are_warned_about() {
    let f = network_fixture();
    let model = train_network(&f);
    let o = run(&["predict", "--model", p(&model), "--text", "v1 zebra"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning"), "{}", stderr(&o));
}

#[test]
fn damaged_model_is_an_input_error() {
    let f = network_fixture();
    let bad = f.path("bad.json");
    fs::write(&bad, "{\"format_version\": 1,").unwrap();
    let o = run(&["predict", "--model", p(&bad), "--text", "v1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("byte"), "{}", stderr(&o));
}

#[test]
fn evaluate_rejects_a_single_fold() {
    let f = separable_fixture(60, 2);
    let o = run(&[
        "evaluate", "--corpus", p(&f.corpus), "--polarity", p(&f.polarity),
        "--partition", p(&f.partition), "--folds", "1", "--out-dir", p(&f.path("out")),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn evaluate_writes_reports_and_is_reproducible() {
    let f = separable_fixture(90, 3);
    let lexicon = f.path("lex.tsv");
    fs::write(&lexicon, "qxaaa\t1\nqxdaa\t-1\n").unwrap();
    let eval = |out: &str| {
        let o = run(&[
            "evaluate", "--corpus", p(&f.corpus), "--polarity", p(&f.polarity),
            "--partition", &format!("emo={}", p(&f.partition)),
            "--lexicon", p(&lexicon), "--folds", "3", "--out-dir", p(&f.path(out)),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        o
    };
    let first = eval("a");
    eval("b");
    let a = fs::read(f.path("a/report.json")).unwrap();
    assert_eq!(a, fs::read(f.path("b/report.json")).unwrap());
    let rows = parse_binary_tsv(&stdout(&first)).unwrap();
    let names: Vec<&str> = rows.iter().map(|(n, _)| n.as_str()).collect();
    for name in ["topic:emo", "full_vocab", "mle", "uniform", "lexicon:lex"] {
        assert!(names.contains(&name), "{names:?}");
    }
    assert!(f.path("a/curves/topic_emo.tsv").exists());
    assert!(f.path("a/binary_metrics.tsv").exists());
}

#[test]
fn report_renders_infinite_positivity() {
    let f = network_fixture();
    let model = train_network(&f);
    let out = f.path("report");
    // flipped polarities leave topic v3 with positive mass only
    let flipped = f.path("flipped.tsv");
    fs::write(&flipped, "e1\tnegative\ne2\tpositive\ne3\tpositive\n").unwrap();
    let o = run(&[
        "report", "--model", p(&model), "--corpus", p(&f.corpus),
        "--polarity", p(&flipped), "--out-dir", p(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = parse_positivity_tsv(&stdout(&o)).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(stdout(&o).contains("inf"), "{}", stdout(&o));
    for file in ["summary.tsv", "topic_positivity.tsv", "profiles.tsv", "distances.tsv"] {
        assert!(out.join(file).exists(), "{file}");
    }
}

#[test]
fn report_on_a_full_vocab_model_fails() {
    let f = network_fixture();
    let model = f.path("fv.json");
    let o = run(&[
        "train", "--corpus", p(&f.corpus), "--polarity", p(&f.polarity),
        "--min-count", "1", "--keep-digits", "--variant", "full-vocab", "-o", p(&model),
    ]);
    assert!(o.status.success());
    let o = run(&["report", "--model", p(&model), "--out-dir", p(&f.path("r"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("report requires topic variant"));
}

#[test]
fn environment_sets_global_flags() {
    let f = network_fixture();
    let model = train_network(&f);
    let o = bin()
        .args(["predict", "--model", p(&model), "--text", "v1"])
        .env("EMOREC_FORMAT", "json")
        .output()
        .unwrap();
    assert!(serde_json::from_slice::<PredictResponse>(&o.stdout).is_ok());
}
