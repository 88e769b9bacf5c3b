#![allow(dead_code)]

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use emorec_testkit::{network, synthetic};

pub fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_emorec"));
    for var in ["EMOREC_SEED", "EMOREC_EPSILON", "EMOREC_STOPWORDS", "EMOREC_FORMAT"] {
        cmd.env_remove(var);
    }
    cmd
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).stdin(Stdio::null()).output().expect("spawn emorec")
}

pub fn run_with_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn emorec");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

pub struct Fixture {
    pub dir: tempfile::TempDir,
    pub corpus: PathBuf,
    pub polarity: PathBuf,
    pub partition: PathBuf,
}

impl Fixture {
    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn fixture(corpus: &str, polarity: &str, partition: &str, partition_name: &str) -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let f = Fixture {
        corpus: dir.path().join("corpus.jsonl"),
        polarity: dir.path().join("polarity.tsv"),
        partition: dir.path().join(partition_name),
        dir,
    };
    fs::write(&f.corpus, corpus).unwrap();
    fs::write(&f.polarity, polarity).unwrap();
    fs::write(&f.partition, partition).unwrap();
    f
}

pub fn network_fixture() -> Fixture {
    fixture(
        &network::corpus_jsonl(),
        network::polarity_tsv(),
        network::partition_tsv(),
        "network.tsv",
    )
}

pub fn separable_fixture(n_docs: usize, seed: u64) -> Fixture {
    let c = synthetic::separable_corpus(n_docs, seed);
    fixture(&c.jsonl, &c.polarity_tsv, &c.partition_tsv, "emotions.tsv")
}

/// Trains the worked-example model without smoothing and returns its path.
pub fn train_network(f: &Fixture) -> PathBuf {
    let model = f.path("network-model.json");
    let o = run(&[
        "train",
        "--corpus",
        p(&f.corpus),
        "--polarity",
        p(&f.polarity),
        "--partition",
        p(&f.partition),
        "--min-count",
        "1",
        "--keep-digits",
        "--epsilon",
        "0",
        "-o",
        p(&model),
    ]);
    assert!(o.status.success(), "train failed: {}", stderr(&o));
    model
}
