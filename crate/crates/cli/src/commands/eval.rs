//! `eval`: score predicted annotation files against gold ones.
//!
//! Directories are either flat (`*.ann`, counted under the language "all")
//! or per-language (`<lang>/*.ann`). Recognition uses strict set matching,
//! normalization compares lemmas over matched mentions, linking scores
//! co-clustered mention pairs at the requested scope.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, Context};
use slavlink_core::{
    linking_f1_grouped, normalization_accuracy, parse_annotation_file, strict_recognition_f1,
    Category, EvalScores, LinkedMention, RecItem,
};

use crate::resources::open;
use crate::{CliError, IntoCliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Level {
    Document,
    Language,
    CrossLanguage,
}

type AnnotatedDoc = (String, String, Vec<LinkedMention>);
type MentionKey = (String, String, String, Category);

pub fn run(
    gold_dir: &Path,
    pred_dir: &Path,
    level: &str,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let level = match level {
        "document" => Level::Document,
        "language" => Level::Language,
        "cross-language" => Level::CrossLanguage,
        other => {
            return Err(CliError::Usage(anyhow!(
                "unknown level `{other}`; use document, language or cross-language"
            )))
        }
    };
    let gold = read_tree(gold_dir)?;
    let pred = read_tree(pred_dir)?;

    let gold_items = rec_items(&gold);
    let pred_items = rec_items(&pred);
    let recognition = strict_recognition_f1(&gold_items, &pred_items);

    let gold_norm = norm_items(&gold);
    let pred_norm = norm_items(&pred);
    let normalization = normalization_accuracy(&gold_norm, &pred_norm);

    let matched: BTreeSet<MentionKey> = {
        let g: BTreeSet<MentionKey> = gold_norm.iter().map(|(i, _)| key_of(i)).collect();
        let p: BTreeSet<MentionKey> = pred_norm.iter().map(|(i, _)| key_of(i)).collect();
        g.intersection(&p).cloned().collect()
    };
    let gold_clusters = clusters_at(&gold, level, &matched);
    let pred_clusters = clusters_at(&pred, level, &matched);
    let linking = linking_f1_grouped(&gold_clusters, &pred_clusters);

    // Human-readable table.
    println!("{:<24} {:>9} {:>9} {:>9}", "measure", "P", "R", "F1");
    let print_scores = |name: &str, s: &EvalScores| {
        println!(
            "{name:<24} {:>9.4} {:>9.4} {:>9.4}",
            s.precision, s.recall, s.f1
        );
    };
    for (lang, scores) in &recognition.per_language {
        print_scores(&format!("recognition[{lang}]"), scores);
    }
    print_scores("recognition", &recognition.overall);
    for (lang, acc) in &normalization.per_language {
        match acc {
            Some(a) => println!("{:<24} {a:>29.4}", format!("normalization[{lang}]")),
            None => println!("{:<24} {:>29}", format!("normalization[{lang}]"), "undefined"),
        }
    }
    match normalization.overall {
        Some(a) => println!("{:<24} {a:>29.4}", "normalization"),
        None => println!("{:<24} {:>29}", "normalization", "undefined"),
    }
    print_scores(&format!("linking[{}]", level_name(level)), &linking);

    // Machine-readable key-value report.
    fn kv(report: &mut String, key: String, value: f64) {
        let _ = writeln!(report, "{key}\t{value:.6}");
    }
    let mut report = String::new();
    for (lang, s) in &recognition.per_language {
        kv(&mut report, format!("recognition.{lang}.precision"), s.precision);
        kv(&mut report, format!("recognition.{lang}.recall"), s.recall);
        kv(&mut report, format!("recognition.{lang}.f1"), s.f1);
    }
    kv(&mut report, "recognition.overall.precision".into(), recognition.overall.precision);
    kv(&mut report, "recognition.overall.recall".into(), recognition.overall.recall);
    kv(&mut report, "recognition.overall.f1".into(), recognition.overall.f1);
    for (lang, acc) in &normalization.per_language {
        if let Some(a) = acc {
            kv(&mut report, format!("normalization.{lang}.accuracy"), *a);
        } else {
            let _ = writeln!(report, "normalization.{lang}.accuracy\tundefined");
        }
    }
    match normalization.overall {
        Some(a) => kv(&mut report, "normalization.overall.accuracy".into(), a),
        None => {
            let _ = writeln!(report, "normalization.overall.accuracy\tundefined");
        }
    }
    let level_key = level_name(level);
    kv(&mut report, format!("linking.{level_key}.precision"), linking.precision);
    kv(&mut report, format!("linking.{level_key}.recall"), linking.recall);
    kv(&mut report, format!("linking.{level_key}.f1"), linking.f1);

    match out {
        Some(path) => std::fs::write(path, report)
            .with_context(|| format!("cannot write {}", path.display()))
            .usage()?,
        None => print!("{report}"),
    }
    Ok(())
}

fn level_name(level: Level) -> &'static str {
    match level {
        Level::Document => "document",
        Level::Language => "language",
        Level::CrossLanguage => "cross-language",
    }
}

/// Reads a gold/pred directory tree. Subdirectories are language codes;
/// a flat directory counts as the single language "all".
fn read_tree(dir: &Path) -> Result<Vec<AnnotatedDoc>, CliError> {
    if !dir.is_dir() {
        return Err(CliError::Usage(anyhow!(
            "not a directory: {}",
            dir.display()
        )));
    }
    let mut subdirs: Vec<PathBufAlias> = std::fs::read_dir(dir)
        .usage()?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    subdirs.sort();

    let mut docs = Vec::new();
    if subdirs.is_empty() {
        read_language_dir(dir, "all", &mut docs)?;
    } else {
        for sub in subdirs {
            let language = sub
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            read_language_dir(&sub, &language, &mut docs)?;
        }
    }
    Ok(docs)
}

type PathBufAlias = std::path::PathBuf;

fn read_language_dir(
    dir: &Path,
    language: &str,
    docs: &mut Vec<AnnotatedDoc>,
) -> Result<(), CliError> {
    let mut files: Vec<PathBufAlias> = std::fs::read_dir(dir)
        .usage()?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "ann"))
        .collect();
    files.sort();
    for path in files {
        let (doc_id, mentions) = parse_annotation_file(open(&path).usage()?)
            .with_context(|| format!("in {}", path.display()))
            .data()?;
        docs.push((language.to_string(), doc_id, mentions));
    }
    Ok(())
}

fn rec_items(docs: &[AnnotatedDoc]) -> Vec<RecItem> {
    docs.iter()
        .flat_map(|(language, doc_id, mentions)| {
            mentions.iter().map(move |m| RecItem {
                language: language.clone(),
                doc_id: doc_id.clone(),
                surface: m.mention.surface.clone(),
                category: m.mention.category,
            })
        })
        .collect()
}

fn norm_items(docs: &[AnnotatedDoc]) -> Vec<(RecItem, String)> {
    docs.iter()
        .flat_map(|(language, doc_id, mentions)| {
            mentions.iter().map(move |m| {
                (
                    RecItem {
                        language: language.clone(),
                        doc_id: doc_id.clone(),
                        surface: m.mention.surface.clone(),
                        category: m.mention.category,
                    },
                    m.lemma.clone(),
                )
            })
        })
        .collect()
}

fn key_of(item: &RecItem) -> MentionKey {
    (
        item.language.clone(),
        item.doc_id.clone(),
        item.surface.clone(),
        item.category,
    )
}

/// Partitions of matched mentions by entity id, per scope unit.
fn clusters_at(
    docs: &[AnnotatedDoc],
    level: Level,
    matched: &BTreeSet<MentionKey>,
) -> BTreeMap<String, Vec<Vec<MentionKey>>> {
    let mut scoped: BTreeMap<String, BTreeMap<String, Vec<MentionKey>>> = BTreeMap::new();
    for (language, doc_id, mentions) in docs {
        for m in mentions {
            let key = (
                language.clone(),
                doc_id.clone(),
                m.mention.surface.clone(),
                m.mention.category,
            );
            if !matched.contains(&key) {
                continue;
            }
            let scope = match level {
                Level::Document => format!("{language}/{doc_id}"),
                Level::Language => language.clone(),
                Level::CrossLanguage => "all".to_string(),
            };
            scoped
                .entry(scope)
                .or_default()
                .entry(m.entity_id.clone())
                .or_default()
                .push(key);
        }
    }
    scoped
        .into_iter()
        .map(|(scope, by_id)| (scope, by_id.into_values().collect()))
        .collect()
}
