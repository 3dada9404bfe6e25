//! Shared helpers for the integration and acceptance suites: locating
//! fixtures, invoking the binary, and building the full resource chain
//! into a temporary directory.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn slavlink() -> Command {
    Command::new(env!("CARGO_BIN_EXE_slavlink"))
}

pub fn run_args(args: &[&str]) -> Output {
    slavlink()
        .args(args)
        .output()
        .expect("binary should execute")
}

pub fn run_ok(args: &[&str]) -> Output {
    let output = run_args(args);
    assert!(
        output.status.success(),
        "command {:?} failed\nstdout: {}\nstderr: {}",
        args,
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
    output
}

pub struct Chain {
    pub dir: TempDir,
    pub config: PathBuf,
}

/// Runs build-morph, mine-wiki and build-catalog over the fixtures and
/// writes a run configuration pointing at the results.
pub fn build_chain(theta: f32) -> Chain {
    let dir = TempDir::new().expect("tempdir");
    let base = dir.path();
    let fix = fixtures();
    let p = |path: &Path| path.to_str().unwrap().to_string();

    run_ok(&[
        "build-morph",
        "--conllu",
        &p(&fix.join("conllu/cs.conllu")),
        "--out-dir",
        &p(&base.join("cs")),
        "--min-support",
        "1",
    ]);
    run_ok(&[
        "build-morph",
        "--conllu",
        &p(&fix.join("conllu/pl.conllu")),
        "--dict",
        &p(&fix.join("dict/pl_dict.tsv")),
        "--out-dir",
        &p(&base.join("pl")),
        "--min-support",
        "1",
    ]);
    run_ok(&[
        "mine-wiki",
        "--input",
        &p(&fix.join("wiki/cs_pages.txt")),
        "--rules",
        &p(&base.join("cs/rules.tsv")),
        "--out-dir",
        &p(&base.join("cs_wiki")),
        "--min-stopper-support",
        "2",
    ]);
    run_ok(&[
        "mine-wiki",
        "--input",
        &p(&fix.join("wiki/pl_pages.txt")),
        "--xml",
        &p(&fix.join("wiki/pl_dump.xml")),
        "--rules",
        &p(&base.join("pl/rules.tsv")),
        "--out-dir",
        &p(&base.join("pl_wiki")),
        "--min-stopper-support",
        "2",
    ]);
    run_ok(&[
        "build-catalog",
        "--entities",
        &p(&fix.join("kb/entities.jsonl")),
        "--out",
        &p(&base.join("catalog.json")),
        "--languages",
        "cs,pl",
    ]);

    let config = base.join("run.toml");
    let overrides = p(&fix.join("overrides.tsv"));
    std::fs::write(
        &config,
        format!(
            r#"languages = ["cs", "pl"]
theta = {theta}
catalog = "catalog.json"
overrides = "{overrides}"

[vectors]
dimension = 64
seed = 42

[resources.cs]
rules = "cs/rules.tsv"
lexicon = "cs/lexicon.tsv"
suffixes = "cs_wiki/suffixes.txt"
wiki_schemas = "cs_wiki/schemas.tsv"
stoppers = "cs_wiki/stoppers.txt"
lemma_freq = "cs_wiki/lemma_freq.tsv"

[resources.pl]
rules = "pl/rules.tsv"
lexicon = "pl/lexicon.tsv"
suffixes = "pl_wiki/suffixes.txt"
wiki_schemas = "pl_wiki/schemas.tsv"
stoppers = "pl_wiki/stoppers.txt"
lemma_freq = "pl_wiki/lemma_freq.tsv"
"#
        ),
    )
    .expect("write config");
    Chain { dir, config }
}

/// Runs the pipeline into `out` and returns the output directory.
pub fn run_pipeline(chain: &Chain, out: &str, workers: &str) -> PathBuf {
    let fix = fixtures();
    let out_dir = chain.dir.path().join(out);
    run_ok(&[
        "run",
        "--docs",
        fix.join("corpus/docs").to_str().unwrap(),
        "--annotations",
        fix.join("corpus/annotations").to_str().unwrap(),
        "--config",
        chain.config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--workers",
        workers,
    ]);
    out_dir
}

pub fn read_tree_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .expect("read out dir")
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).expect("read output file"),
            )
        })
        .collect()
}
