//! `run`: lemmatize and link recognized mentions, document by document,
//! then refine identifiers per language across the whole document set.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use rayon::prelude::*;
use slavlink_core::link::{add_and_link, apply_overrides, refine, LinkConfig};
use slavlink_core::{
    parse_annotation_file, parse_document_file, write_annotation_file, Category, Document,
    LinkedMention, Mention,
};

use crate::config::RunConfig;
use crate::resources::{load_run, open, LoadedRun};
use crate::{CliError, IntoCliError};

struct DocInput {
    stem: String,
    doc_id: String,
    language: String,
    mentions: Vec<Mention>,
}

struct DocOutput {
    stem: String,
    doc_id: String,
    language: String,
    linked: Vec<LinkedMention>,
}

pub fn run(
    docs_dir: &Path,
    annotations_dir: &Path,
    config_path: &Path,
    out_dir: &Path,
    workers: usize,
) -> Result<(), CliError> {
    let config = RunConfig::load(config_path).usage()?;
    let loaded = load_run(&config).data()?;

    let documents = read_documents(docs_dir, &config)?;
    let inputs = read_inputs(annotations_dir, &documents)?;

    let process = |input: &DocInput| -> anyhow::Result<DocOutput> {
        let lemmatizer = loaded
            .lemmatizers
            .get(&input.language)
            .ok_or_else(|| anyhow!("no lemmatizer for language {}", input.language))?;
        let mentions = apply_overrides(input.mentions.clone(), &loaded.overrides);
        let triples: Vec<(String, String, Category)> = mentions
            .iter()
            .map(|m| {
                (
                    m.surface.clone(),
                    lemmatizer.lemmatize(&m.surface),
                    m.category,
                )
            })
            .collect();
        let link_config = LinkConfig {
            language: input.language.clone(),
            theta: loaded.theta,
        };
        let assigned = add_and_link(&triples, &loaded.catalog, &link_config);
        let linked: Vec<LinkedMention> = mentions
            .into_iter()
            .zip(&triples)
            .map(|(mention, triple)| {
                let id = &assigned[triple];
                LinkedMention::new(mention, &triple.1, id)
            })
            .collect::<slavlink_core::Result<_>>()?;
        Ok(DocOutput {
            stem: input.stem.clone(),
            doc_id: input.doc_id.clone(),
            language: input.language.clone(),
            linked,
        })
    };

    let mut outputs: Vec<DocOutput> = if workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| anyhow!(e))
            .usage()?;
        pool.install(|| inputs.par_iter().map(process).collect::<anyhow::Result<_>>())
            .data()?
    } else {
        inputs
            .iter()
            .map(process)
            .collect::<anyhow::Result<_>>()
            .data()?
    };

    refine_per_language(&mut outputs, &loaded);
    write_outputs(out_dir, &outputs)?;

    let mentions: usize = outputs.iter().map(|o| o.linked.len()).sum();
    let distinct: std::collections::BTreeSet<&str> = outputs
        .iter()
        .flat_map(|o| o.linked.iter().map(|m| m.entity_id.as_str()))
        .collect();
    println!("documents\t{}", outputs.len());
    println!("mentions\t{mentions}");
    println!("entities\t{}", distinct.len());
    println!("out_dir\t{}", out_dir.display());
    Ok(())
}

fn read_documents(docs_dir: &Path, config: &RunConfig) -> Result<BTreeMap<String, Document>, CliError> {
    let mut documents = BTreeMap::new();
    for path in sorted_files(docs_dir, "txt")? {
        let doc = parse_document_file(open(&path).usage()?)
            .with_context(|| format!("in {}", path.display()))
            .data()?;
        if !config.languages.contains(&doc.language) {
            return Err(CliError::Data(anyhow!(
                "{}: language `{}` is not configured",
                path.display(),
                doc.language
            )));
        }
        documents.insert(doc.doc_id.clone(), doc);
    }
    Ok(documents)
}

fn read_inputs(
    annotations_dir: &Path,
    documents: &BTreeMap<String, Document>,
) -> Result<Vec<DocInput>, CliError> {
    let mut inputs = Vec::new();
    for path in sorted_files(annotations_dir, "ann")? {
        let (doc_id, mentions) = parse_annotation_file(open(&path).usage()?)
            .with_context(|| format!("in {}", path.display()))
            .data()?;
        let document = documents.get(&doc_id).ok_or_else(|| {
            CliError::Data(anyhow!(
                "{}: no document file for id `{doc_id}`",
                path.display()
            ))
        })?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| doc_id.clone());
        inputs.push(DocInput {
            stem,
            doc_id,
            language: document.language.clone(),
            // Input lemma and id columns are placeholders; only the
            // recognized surface and category are consumed.
            mentions: mentions.into_iter().map(|m| m.mention).collect(),
        });
    }
    Ok(inputs)
}

fn sorted_files(dir: &Path, extension: &str) -> Result<Vec<PathBuf>, CliError> {
    let entries = std::fs::read_dir(dir)
        .with_context(|| format!("cannot read directory {}", dir.display()))
        .usage()?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == extension))
        .collect();
    files.sort();
    Ok(files)
}

/// Refinement runs once per language over all documents of that language;
/// cross-language grouping happens implicitly through shared catalog ids.
fn refine_per_language(outputs: &mut [DocOutput], loaded: &LoadedRun) {
    let mut by_language: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, output) in outputs.iter().enumerate() {
        by_language
            .entry(output.language.clone())
            .or_default()
            .push(i);
    }
    for doc_indices in by_language.values() {
        let mut flat: Vec<LinkedMention> = Vec::new();
        let mut slots: Vec<(usize, usize)> = Vec::new();
        for &d in doc_indices {
            for (m, mention) in outputs[d].linked.iter().enumerate() {
                flat.push(mention.clone());
                slots.push((d, m));
            }
        }
        let refined = refine(&flat, &loaded.table, loaded.catalog.tf_index(), loaded.theta);
        for ((d, m), relabeled) in slots.into_iter().zip(refined) {
            outputs[d].linked[m] = relabeled;
        }
    }
}

fn write_outputs(out_dir: &Path, outputs: &[DocOutput]) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))
        .usage()?;
    for output in outputs {
        let path = out_dir.join(format!("{}.ann", output.stem));
        let mut writer = BufWriter::new(File::create(&path).usage()?);
        write_annotation_file(&mut writer, &output.doc_id, &output.linked).data()?;
    }

    let mut rows: Vec<(String, String, String, String)> = Vec::new();
    let mut seen = HashMap::new();
    for output in outputs {
        for m in &output.linked {
            let row = (
                m.entity_id.clone(),
                output.language.clone(),
                output.doc_id.clone(),
                m.mention.surface.clone(),
            );
            if seen.insert(row.clone(), ()).is_none() {
                rows.push(row);
            }
        }
    }
    rows.sort();
    let path = out_dir.join("clusters.tsv");
    let mut writer = BufWriter::new(File::create(&path).usage()?);
    use std::io::Write;
    for (id, language, doc_id, surface) in rows {
        writeln!(writer, "{id}\t{language}\t{doc_id}\t{surface}").data()?;
    }
    Ok(())
}
