//! End-to-end tests of the subcommands over the fixture corpus.

mod common;

use common::{build_chain, fixtures, run_args, run_ok, run_pipeline, slavlink};

#[test]
fn full_chain_reproduces_golden_outputs() {
    let chain = build_chain(0.8);
    let out = run_pipeline(&chain, "out", "1");
    for name in ["d1.ann", "d2.ann", "d3.ann", "clusters.tsv"] {
        let produced = std::fs::read(out.join(name)).expect("output exists");
        let golden = std::fs::read(fixtures().join("golden").join(name)).expect("golden exists");
        assert_eq!(
            produced,
            golden,
            "{name} differs from golden:\n{}",
            String::from_utf8_lossy(&produced)
        );
    }
}

#[test]
fn worker_pool_output_matches_sequential() {
    let chain = build_chain(0.8);
    let sequential = run_pipeline(&chain, "out-seq", "1");
    let parallel = run_pipeline(&chain, "out-par", "4");
    assert_eq!(
        common::read_tree_bytes(&sequential),
        common::read_tree_bytes(&parallel)
    );
}

#[test]
fn baseline_toggles_keep_lemmas_identical_to_surfaces() {
    let chain = build_chain(0.8);
    let config = chain.dir.path().join("baseline.toml");
    let mut text = std::fs::read_to_string(&chain.config).unwrap();
    text.push_str("\n[cascade]\np = false\nw = false\nW = false\na = false\ns = false\n");
    std::fs::write(&config, text).unwrap();

    let out_dir = chain.dir.path().join("out-baseline");
    run_ok(&[
        "run",
        "--docs",
        fixtures().join("corpus/docs").to_str().unwrap(),
        "--annotations",
        fixtures().join("corpus/annotations").to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    for entry in std::fs::read_dir(&out_dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "ann") {
            let content = std::fs::read_to_string(&path).unwrap();
            for line in content.lines().skip(1) {
                let fields: Vec<&str> = line.split('\t').collect();
                assert_eq!(fields[0], fields[1], "baseline must not change lemmas");
            }
        }
    }
}

#[test]
fn eval_of_identical_directories_is_all_ones() {
    let chain = build_chain(0.8);
    let out = run_pipeline(&chain, "out", "1");
    // Drop the cluster report so the directory holds only annotation files.
    std::fs::remove_file(out.join("clusters.tsv")).unwrap();
    let report_path = chain.dir.path().join("report.tsv");
    run_ok(&[
        "eval",
        "--gold",
        out.to_str().unwrap(),
        "--pred",
        out.to_str().unwrap(),
        "--level",
        "cross-language",
        "--out",
        report_path.to_str().unwrap(),
    ]);
    let report = std::fs::read_to_string(report_path).unwrap();
    for key in [
        "recognition.overall.f1\t1.000000",
        "normalization.overall.accuracy\t1.000000",
        "linking.cross-language.f1\t1.000000",
    ] {
        assert!(report.contains(key), "missing `{key}` in:\n{report}");
    }
}

#[test]
fn eval_scores_a_constructed_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let gold = dir.path().join("gold");
    let pred = dir.path().join("pred");
    std::fs::create_dir_all(&gold).unwrap();
    std::fs::create_dir_all(&pred).unwrap();
    // 4 gold mentions, 3 predictions, 2 of them correct:
    // P = 2/3, R = 1/2, F1 = 4/7.
    std::fs::write(
        gold.join("d1.ann"),
        "d1\na\ta\tPER\tQ1\nb\tb\tPER\tQ1\nc\tc\tPER\tQ2\nd\td\tPER\tQ3\n",
    )
    .unwrap();
    std::fs::write(
        pred.join("d1.ann"),
        "d1\na\ta\tPER\tQ1\nb\tb\tPER\tQ1\nx\tx\tPER\tQ9\n",
    )
    .unwrap();
    let report_path = dir.path().join("report.tsv");
    run_ok(&[
        "eval",
        "--gold",
        gold.to_str().unwrap(),
        "--pred",
        pred.to_str().unwrap(),
        "--level",
        "language",
        "--out",
        report_path.to_str().unwrap(),
    ]);
    let report = std::fs::read_to_string(report_path).unwrap();
    assert!(report.contains("recognition.overall.precision\t0.666667"));
    assert!(report.contains("recognition.overall.recall\t0.500000"));
    assert!(report.contains("recognition.overall.f1\t0.571429"));
    // Matched mentions a and b share a cluster on both sides.
    assert!(report.contains("linking.language.f1\t1.000000"));
}

#[test]
fn mine_wiki_without_links_writes_empty_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let page = dir.path().join("empty.txt");
    std::fs::write(&page, "%%PAGE Nic\nStrona bez odsyłaczy.\n").unwrap();
    let out = dir.path().join("mined");
    let output = run_ok(&[
        "mine-wiki",
        "--input",
        page.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("validated_pairs\t0"));
    assert_eq!(std::fs::read_to_string(out.join("pairs.tsv")).unwrap(), "");
    assert_eq!(std::fs::read_to_string(out.join("stoppers.txt")).unwrap(), "");
}

#[test]
fn malformed_links_are_counted_not_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let page = dir.path().join("broken.txt");
    std::fs::write(&page, "%%PAGE X\nTekst [[urwany odkaz i [[Praga]] dalej.\n").unwrap();
    let out = dir.path().join("mined");
    let output = run_ok(&[
        "mine-wiki",
        "--input",
        page.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("skipped_malformed\t1"), "{stdout}");
    assert!(stdout.contains("extracted_pairs\t1"), "{stdout}");
}

#[test]
fn missing_inputs_exit_with_usage_code() {
    for args in [
        vec!["build-morph", "--conllu", "/nonexistent.conllu", "--out-dir", "/tmp/x"],
        vec!["mine-wiki", "--input", "/nonexistent.txt", "--out-dir", "/tmp/x"],
        vec!["eval", "--gold", "/nonexistent-dir", "--pred", "/nonexistent-dir"],
        vec!["build-catalog", "--entities", "/nonexistent.jsonl", "--out", "/tmp/x.json"],
    ] {
        let output = run_args(&args);
        assert_eq!(output.status.code(), Some(1), "args {args:?}");
    }
}

#[test]
fn malformed_data_exits_with_data_code() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.conllu");
    std::fs::write(&bad, "1\tword\tlemma\n").unwrap();
    let output = run_args(&[
        "build-morph",
        "--conllu",
        bad.to_str().unwrap(),
        "--out-dir",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("line 1"), "{stderr}");
}

#[test]
fn empty_category_roots_are_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "languages = [\"cs\"]\n[category_roots]\nPER = []\n").unwrap();
    let output = run_args(&[
        "build-catalog",
        "--entities",
        fixtures().join("kb/entities.jsonl").to_str().unwrap(),
        "--out",
        dir.path().join("catalog.json").to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn build_catalog_reports_table_of_roots_closure() {
    let dir = tempfile::tempdir().unwrap();
    let output = run_ok(&[
        "build-catalog",
        "--entities",
        fixtures().join("kb/entities.jsonl").to_str().unwrap(),
        "--out",
        dir.path().join("catalog.json").to_str().unwrap(),
        "--languages",
        "cs,pl",
    ]);
    let stdout = String::from_utf8_lossy(&output.stdout);
    // Q5 plus the four fixture humans.
    assert!(stdout.contains("closure.PER\t7"), "{stdout}");
}

#[test]
fn subcommands_are_idempotent() {
    let chain_a = build_chain(0.8);
    let chain_b = build_chain(0.8);
    for name in [
        "cs/rules.tsv",
        "pl/rules.tsv",
        "cs_wiki/schemas.tsv",
        "pl_wiki/stoppers.txt",
        "catalog.json",
    ] {
        let a = std::fs::read(chain_a.dir.path().join(name)).unwrap();
        let b = std::fs::read(chain_b.dir.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} not byte-identical across rebuilds");
    }
}

#[test]
fn help_succeeds_and_lists_subcommands() {
    let output = slavlink().arg("--help").output().unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    for sub in ["build-morph", "mine-wiki", "build-catalog", "run", "eval"] {
        assert!(stdout.contains(sub), "help misses {sub}");
    }
}
